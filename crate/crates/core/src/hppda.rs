//! Hotplug placement delivery arrays.
//!
//! An HpPDA is a pair `(P, B)`: `P` is an F x K star/null placement array for
//! all K users and `B` is a PDA for the K' users that turn up at delivery
//! time. For every active set `tau` of K' users there must be F' rows of `P`
//! whose restriction to `tau` has exactly the star layout of `B`.
//!
//! Two families are built here: the MAN family and the family obtained from
//! a t-design.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::combin::{binomial, subsets};
use crate::designs::{Design, DesignError};
use crate::pda::{
    man_pda, verify_pda, Cell, CellArray, Pda, PdaError, PdaViolation, StarArray,
    StarGrid,
};

/// Exhaustive verification is used up to this many active sets.
pub const EXHAUSTIVE_LIMIT: u128 = 100_000;
/// Sample size and seed used by [`VerifyMode::Auto`] above the limit.
pub const AUTO_SAMPLE_COUNT: usize = 1000;
pub const AUTO_SAMPLE_SEED: u64 = 0;

/// Star patterns are bitmasks over the active columns.
const MAX_ACTIVE: usize = 128;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HpPdaError {
    #[error("K' must be less than K (K={k}, K'={kp})")]
    ActiveNotLessThanTotal { k: usize, kp: usize },
    #[error("t must satisfy 1 <= t <= K' (t={t}, K'={kp})")]
    BadLevel { t: usize, kp: usize },
    #[error("expected {expected} values a_1..a_(t-1), got {found}")]
    WrongALength { expected: usize, found: usize },
    #[error("a_{s} = {value} exceeds lambda_{s}^t = {max}")]
    AExceedsLambda { s: usize, value: usize, max: usize },
    #[error("at least one a_s must be positive")]
    AllZero,
    #[error("design is not a valid t-design ({0} violating t-subsets)")]
    InvalidDesign(usize),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Pda(#[from] PdaError),
    #[error("array shape {found} does not match header {expected}")]
    Shape { expected: String, found: String },
    #[error("B declares Z'={z_active}, S={s} but the array has Z'={found_z}, S={found_s}")]
    BParams {
        z_active: usize,
        s: usize,
        found_z: usize,
        found_s: usize,
    },
    #[error("active set must be {kp} distinct users in [1, {k}], got {tau:?}")]
    BadActiveSet { tau: Vec<usize>, k: usize, kp: usize },
    #[error("at most {MAX_ACTIVE} active users are supported, got {0}")]
    TooManyActive(usize),
    #[error("not an HpPDA for tau={tau:?}: no unused row of P matches row {b_row} of B")]
    NoMatch { tau: Vec<usize>, b_row: usize },
    #[error("bundle: {0}")]
    Bundle(String),
}

/// The seven parameters (K, K', F, F', Z, Z', S).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HpParams {
    pub k: usize,
    pub k_active: usize,
    pub f: usize,
    pub f_active: usize,
    pub z: usize,
    pub z_active: usize,
    pub s: usize,
}

impl HpParams {
    /// F' - Z' + Z: the number of message subfiles per file in the coded
    /// placement scheme.
    pub fn subpacketization(&self) -> usize {
        self.f_active + self.z - self.z_active
    }
}

impl fmt::Display for HpParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {} {}",
            self.k, self.k_active, self.f, self.f_active, self.z, self.z_active, self.s
        )
    }
}

impl FromStr for HpParams {
    type Err = HpPdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<usize> = s
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| HpPdaError::Bundle(format!("bad header {s:?}")))?;
        let [k, k_active, f, f_active, z, z_active, s_] = v[..] else {
            return Err(HpPdaError::Bundle(format!(
                "header needs 7 integers \"K K' F F' Z Z' S\", got {s:?}"
            )));
        };
        Ok(HpParams {
            k,
            k_active,
            f,
            f_active,
            z,
            z_active,
            s: s_,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpPda {
    params: HpParams,
    p: StarArray,
    b: Pda,
}

impl HpPda {
    /// Assemble from arrays. Only shapes and B's own parameters are checked;
    /// the placement and matching conditions are left to [`verify_hppda`] so
    /// that damaged bundles can still be loaded and diagnosed.
    pub fn from_parts(params: HpParams, p: StarArray, b: Pda) -> Result<Self, HpPdaError> {
        let shape = |r: usize, c: usize| format!("{r}x{c}");
        if (p.n_rows(), p.n_cols()) != (params.f, params.k) {
            return Err(HpPdaError::Shape {
                expected: format!("P {}", shape(params.f, params.k)),
                found: format!("P {}", shape(p.n_rows(), p.n_cols())),
            });
        }
        if (b.f(), b.k()) != (params.f_active, params.k_active) {
            return Err(HpPdaError::Shape {
                expected: format!("B {}", shape(params.f_active, params.k_active)),
                found: format!("B {}", shape(b.f(), b.k())),
            });
        }
        if b.z() != params.z_active || b.s() as usize != params.s {
            return Err(HpPdaError::BParams {
                z_active: params.z_active,
                s: params.s,
                found_z: b.z(),
                found_s: b.s() as usize,
            });
        }
        if params.k_active > MAX_ACTIVE {
            return Err(HpPdaError::TooManyActive(params.k_active));
        }
        Ok(HpPda { params, p, b })
    }

    pub fn params(&self) -> &HpParams {
        &self.params
    }
    pub fn p(&self) -> &StarArray {
        &self.p
    }
    pub fn b(&self) -> &Pda {
        &self.b
    }

    /// Bundle text: the parameter header, P, a `---` line, then B.
    pub fn to_bundle(&self) -> String {
        format!("{}\n{}---\n{}", self.params, self.p, self.b)
    }

    pub fn from_bundle(text: &str) -> Result<Self, HpPdaError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| HpPdaError::Bundle("empty bundle".into()))?;
        let params: HpParams = header.parse()?;
        let rest: Vec<&str> = lines.collect();
        let sep = rest
            .iter()
            .position(|l| l.trim() == "---")
            .ok_or_else(|| HpPdaError::Bundle("missing \"---\" separator".into()))?;
        let p = StarArray::parse(&rest[..sep].join("\n"))?;
        let b = Pda::parse(&rest[sep + 1..].join("\n"))?;
        Self::from_parts(params, p, b)
    }
}

/// MAN HpPDA: `B` is the MAN PDA for `kp` users at level `t`, `P` is the MAN
/// PDA for `k` users with its integers erased.
pub fn man_hppda(k: usize, kp: usize, t: usize) -> Result<HpPda, HpPdaError> {
    if kp >= k {
        return Err(HpPdaError::ActiveNotLessThanTotal { k, kp });
    }
    if t == 0 || t > kp {
        return Err(HpPdaError::BadLevel { t, kp });
    }
    let c = |n: usize, r: usize| binomial(n as u64, r as u64) as usize;
    let params = HpParams {
        k,
        k_active: kp,
        f: c(k, t),
        f_active: c(kp, t),
        z: c(k - 1, t - 1),
        z_active: c(kp - 1, t - 1),
        s: c(kp, t + 1),
    };
    let rows: Vec<Vec<usize>> = subsets(k, t).collect();
    let p = StarArray::from_fn(params.f, k, |r, c| rows[r].binary_search(&(c + 1)).is_ok());
    let b = man_pda(kp, t)?;
    HpPda::from_parts(params, p, b)
}

/// HpPDA from a t-design with multiplicities `a = [a_1, ..., a_{t-1}]`.
///
/// Rows of `P` are the blocks in file order, columns the points. Rows of `B`
/// are the pairs `(Y, i)` with `|Y| = s`, `i ∈ [a_s]`, ordered by `s`
/// descending, then `i`, then `Y` lexicographically. Integer labels number
/// the pairs `(Y', i)` with `|Y'| = s + 1` by size descending, then `Y'`
/// lexicographically, then `i`.
pub fn tdesign_hppda(d: &Design, a: &[usize]) -> Result<HpPda, HpPdaError> {
    let t = d.t();
    if a.len() + 1 != t {
        return Err(HpPdaError::WrongALength {
            expected: t.saturating_sub(1),
            found: a.len(),
        });
    }
    let report = d.verify();
    if !report.valid {
        return Err(HpPdaError::InvalidDesign(report.violations.len()));
    }
    for (idx, &value) in a.iter().enumerate() {
        let s = idx + 1;
        let max = d.lambda_exact(s)?;
        if value > max {
            return Err(HpPdaError::AExceedsLambda { s, value, max });
        }
    }
    if a.iter().all(|&x| x == 0) {
        return Err(HpPdaError::AllZero);
    }
    let a_of = |s: usize| a[s - 1];
    let c = |n: usize, r: usize| binomial(n as u64, r as u64) as usize;

    let mut labels: HashMap<(Vec<usize>, usize), u32> = HashMap::new();
    for size in (2..=t).rev() {
        for y in subsets(t, size) {
            for i in 1..=a_of(size - 1) {
                let next = labels.len() as u32 + 1;
                labels.insert((y.clone(), i), next);
            }
        }
    }

    let mut rows = Vec::new();
    for s in (1..t).rev() {
        for i in 1..=a_of(s) {
            for y in subsets(t, s) {
                let row = (1..=t)
                    .map(|j| {
                        if y.binary_search(&j).is_ok() {
                            Cell::Star
                        } else {
                            let mut u = y.clone();
                            u.insert(u.partition_point(|&x| x < j), j);
                            Cell::Int(labels[&(u, i)])
                        }
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    let b = Pda::new(CellArray::from_rows(rows)?)?;

    let blocks = d.blocks();
    let p = StarArray::from_fn(blocks.len(), d.v(), |r, col| {
        blocks[r].binary_search(&(col + 1)).is_ok()
    });

    let params = HpParams {
        k: d.v(),
        k_active: t,
        f: d.num_blocks(),
        f_active: (1..t).map(|s| a_of(s) * c(t, s)).sum(),
        z: d.lambda_s(1)?,
        z_active: (1..t).map(|s| a_of(s) * c(t - 1, s - 1)).sum(),
        s: (1..t).map(|s| a_of(s) * c(t, s + 1)).sum(),
    };
    HpPda::from_parts(params, p, b)
}

/// Rows of `P` aligned with the rows of `B` for one active set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaMatch {
    /// Active users, ascending, 1-based.
    pub tau: Vec<usize>,
    /// `zeta[r]` is the 1-based row of `P` standing in for row `r` of `B`.
    pub zeta: Vec<usize>,
    /// `P` restricted to `zeta x tau` with B's integers filled in.
    pub b_bar: Pda,
}

fn normalize_tau(h: &HpPda, tau: &[usize]) -> Result<Vec<usize>, HpPdaError> {
    let HpParams { k, k_active, .. } = *h.params();
    let mut sorted = tau.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k_active || sorted.len() != tau.len() || sorted.iter().any(|&u| u == 0 || u > k) {
        return Err(HpPdaError::BadActiveSet {
            tau: tau.to_vec(),
            k,
            kp: k_active,
        });
    }
    Ok(sorted)
}

fn mask_of(grid: &impl StarGrid, row: usize, cols: impl Iterator<Item = usize>) -> u128 {
    cols.enumerate()
        .filter(|&(_, c)| grid.is_star(row, c))
        .fold(0, |m, (j, _)| m | 1 << j)
}

/// Find the rows of `P` that realise `B` on the active set `tau`.
///
/// B's rows are processed top to bottom; each takes the smallest unused row
/// of `P` whose stars on `tau` (mapped order-preservingly onto B's columns)
/// coincide with its own. Rows with different patterns never compete, so
/// this greedy choice succeeds whenever any matching exists.
pub fn find_zeta(h: &HpPda, tau: &[usize]) -> Result<ZetaMatch, HpPdaError> {
    let tau = normalize_tau(h, tau)?;
    let p = h.p();
    let mut by_pattern: HashMap<u128, Vec<usize>> = HashMap::new();
    for f in (0..p.n_rows()).rev() {
        let m = mask_of(p, f, tau.iter().map(|&u| u - 1));
        by_pattern.entry(m).or_default().push(f);
    }
    let b = h.b();
    let mut zeta = Vec::with_capacity(b.f());
    for r in 0..b.f() {
        let m = mask_of(b, r, 0..b.k());
        match by_pattern.get_mut(&m).and_then(Vec::pop) {
            Some(f) => zeta.push(f + 1),
            None => {
                return Err(HpPdaError::NoMatch {
                    tau,
                    b_row: r + 1,
                })
            }
        }
    }
    Ok(ZetaMatch {
        tau,
        zeta,
        b_bar: b.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Exhaustive,
    Sample { count: usize, seed: u64 },
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] active sets, otherwise
    /// `Sample { count: 1000, seed: 0 }`.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HpProblem {
    ColumnStars { col: usize, found: usize, expected: usize },
    BNotPda(PdaViolation),
    ZActiveExceedsZ { z_active: usize, z: usize },
    SubpacketizationExceedsF { needed: usize, f: usize },
    NoMatch { tau: Vec<usize>, b_row: usize },
}

impl fmt::Display for HpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HpProblem::ColumnStars {
                col,
                found,
                expected,
            } => write!(f, "column {col} of P has {found} stars, expected Z={expected}"),
            HpProblem::BNotPda(v) => write!(f, "B is not a PDA: {v}"),
            HpProblem::ZActiveExceedsZ { z_active, z } => write!(f, "Z'={z_active} exceeds Z={z}"),
            HpProblem::SubpacketizationExceedsF { needed, f: rows } => {
                write!(f, "F'-Z'+Z={needed} exceeds F={rows}")
            }
            HpProblem::NoMatch { tau, b_row } => {
                write!(f, "no matching row of P for row {b_row} of B at tau={tau:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HpVerifyReport {
    pub valid: bool,
    pub problems: Vec<HpProblem>,
    /// First active set (in checking order) without a matching.
    pub failing_tau: Option<Vec<usize>>,
    pub sets_checked: usize,
    pub exhaustive: bool,
    /// Z < F', the condition under which the uncoded-placement memory point
    /// Z/F' is below one.
    pub z_below_f_active: bool,
}

fn active_sets(h: &HpPda, mode: VerifyMode) -> (Vec<Vec<usize>>, bool) {
    let HpParams { k, k_active, .. } = *h.params();
    let total = binomial(k as u64, k_active as u64);
    let mode = match mode {
        VerifyMode::Auto if total <= EXHAUSTIVE_LIMIT => VerifyMode::Exhaustive,
        VerifyMode::Auto => VerifyMode::Sample {
            count: AUTO_SAMPLE_COUNT,
            seed: AUTO_SAMPLE_SEED,
        },
        m => m,
    };
    match mode {
        VerifyMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sets = (0..count)
                .map(|_| {
                    let mut tau: Vec<usize> = rand::seq::index::sample(&mut rng, k, k_active)
                        .into_iter()
                        .map(|u| u + 1)
                        .collect();
                    tau.sort_unstable();
                    tau
                })
                .collect();
            (sets, false)
        }
        _ => (subsets(k, k_active).collect(), true),
    }
}

/// Check every HpPDA condition and report what fails.
pub fn verify_hppda(h: &HpPda, mode: VerifyMode) -> HpVerifyReport {
    let params = *h.params();
    let mut problems = Vec::new();

    if let Some((col, &found)) = h
        .p()
        .column_star_counts()
        .iter()
        .enumerate()
        .find(|(_, &c)| c != params.z)
    {
        problems.push(HpProblem::ColumnStars {
            col: col + 1,
            found,
            expected: params.z,
        });
    }
    if let Some(v) = verify_pda(h.b().array()).violation {
        problems.push(HpProblem::BNotPda(v));
    }
    if params.z_active > params.z {
        problems.push(HpProblem::ZActiveExceedsZ {
            z_active: params.z_active,
            z: params.z,
        });
    }
    let needed = params.subpacketization();
    if needed > params.f {
        problems.push(HpProblem::SubpacketizationExceedsF {
            needed,
            f: params.f,
        });
    }

    let (sets, exhaustive) = active_sets(h, mode);
    let failure = sets
        .par_iter()
        .map(|tau| find_zeta(h, tau).err())
        .find_first(Option::is_some)
        .flatten();
    let mut failing_tau = None;
    if let Some(HpPdaError::NoMatch { tau, b_row }) = failure {
        failing_tau = Some(tau.clone());
        problems.push(HpProblem::NoMatch { tau, b_row });
    }

    HpVerifyReport {
        valid: problems.is_empty(),
        problems,
        failing_tau,
        sets_checked: sets.len(),
        exhaustive,
        z_below_f_active: params.z < params.f_active,
    }
}
