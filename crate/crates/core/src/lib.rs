//! Hotplug coded caching with placement delivery arrays.
//!
//! The crate builds hotplug placement delivery arrays (MAN and t-design
//! families), runs the MDS-coded placement and array-driven delivery end to
//! end over real bytes, and computes exact rate-memory points together with a
//! converse bound for comparison.

pub mod analysis;
pub mod cli;
pub mod combin;
pub mod designs;
pub mod engine;
pub mod gf;
pub mod hppda;
pub mod mds;
pub mod pda;

pub use analysis::{converse_bound, lower_envelope, proposed_point, theorem1_point, RatePoint, Scheme};
pub use designs::{Design, DesignError};
pub use engine::{simulate, SimReport, Simulator};
pub use hppda::{find_zeta, man_hppda, tdesign_hppda, verify_hppda, HpPda, HpParams, VerifyMode, ZetaMatch};
pub use mds::RsCodec;
pub use pda::{man_pda, strip_to_stars, verify_pda, Cell, CellArray, Pda, StarArray};
