//! The coded-placement hotplug scheme, end to end over real bytes.
//!
//! Placement: every file is split into F'-Z'+Z subfiles, MDS-encoded into F
//! coded subfiles `C_{n,f}`, and user `k` caches `C_{n,f}` for every file
//! whenever `P(f, k)` is a star.
//!
//! Delivery: for the active set `tau` the server matches rows `zeta` of `P`
//! to `B` and sends, for every integer `s` of `B`, the field sum of
//! `C_{d_k, f}` over the cells of the matched array holding `s`.
//!
//! Decoding: each integer in a user's column yields one new coded subfile of
//! the demanded file once the other terms are cancelled with cached data.
//! Together with the Z cached subfiles that makes F'-Z'+Z distinct
//! coordinates, enough for the MDS decoder.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hppda::{find_zeta, HpPda, HpPdaError, ZetaMatch};
use crate::mds::{symbols_to_bytes, CodecError, RsCodec, SymbolBlock};
use crate::pda::{Cell, StarGrid};

/// Bytes per simulated file, per message subfile.
pub const DEFAULT_BYTES_PER_SUBFILE: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    HpPda(#[from] HpPdaError),
    #[error("codec is [{n}, {k}] but the HpPDA needs [{f}, {sub}]")]
    CodecMismatch {
        n: usize,
        k: usize,
        f: usize,
        sub: usize,
    },
    #[error("demand out of range: {demand} not in [1, {n_files}]")]
    DemandOutOfRange { demand: usize, n_files: usize },
    #[error("expected {expected} demands, got {found}")]
    DemandCount { expected: usize, found: usize },
    #[error("library has no files")]
    EmptyLibrary,
    #[error("user {0} is not active")]
    InactiveUser(usize),
    #[error("transmission X_{0} missing")]
    MissingTransmission(u32),
    #[error("internal fault: transmission X_{label} has no terms")]
    EmptyTransmission { label: u32 },
    #[error("internal fault: user {user} cannot cancel C_({file},{row}) in X_{label}")]
    MissingCancelTerm {
        user: usize,
        file: usize,
        row: usize,
        label: u32,
    },
    #[error("internal fault: user {user} collected {found} coordinates, needs {needed}")]
    CoordinateCount {
        user: usize,
        found: usize,
        needed: usize,
    },
}

/// The `[F, F'-Z'+Z]` codec an HpPDA calls for.
pub fn codec_for(h: &HpPda) -> Result<RsCodec, EngineError> {
    let p = h.params();
    Ok(RsCodec::new(p.f, p.subpacketization())?)
}

/// Files held by the server, with their coded subfiles.
#[derive(Debug, Clone)]
pub struct FileLibrary {
    codec: RsCodec,
    originals: Vec<Vec<u8>>,
    /// coded[n][f], both 0-based.
    coded: Vec<Vec<SymbolBlock>>,
}

impl FileLibrary {
    /// Pad all files to a common length and encode them.
    pub fn new(codec: RsCodec, files: Vec<Vec<u8>>) -> Result<Self, EngineError> {
        if files.is_empty() {
            return Err(EngineError::EmptyLibrary);
        }
        let longest = files.iter().map(Vec::len).max().unwrap_or(0);
        let padded = codec.padded_len(longest);
        let coded = files
            .iter()
            .map(|bytes| codec.encode(&codec.split_padded(bytes, padded)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FileLibrary {
            codec,
            originals: files,
            coded,
        })
    }

    /// `n_files` seeded pseudo-random files of `file_bytes` bytes each.
    pub fn random(
        codec: RsCodec,
        n_files: usize,
        file_bytes: usize,
        seed: u64,
    ) -> Result<Self, EngineError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let files = (0..n_files)
            .map(|_| {
                let mut buf = vec![0u8; file_bytes];
                rng.fill_bytes(&mut buf);
                buf
            })
            .collect();
        Self::new(codec, files)
    }

    pub fn codec(&self) -> &RsCodec {
        &self.codec
    }
    pub fn n_files(&self) -> usize {
        self.originals.len()
    }
    /// Original bytes of file `n` (1-based).
    pub fn original(&self, n: usize) -> &[u8] {
        &self.originals[n - 1]
    }
    /// Coded subfile `C_{n,f}` (both 1-based).
    pub fn coded(&self, n: usize, f: usize) -> &SymbolBlock {
        &self.coded[n - 1][f - 1]
    }
    /// Symbols per coded subfile.
    pub fn subfile_symbols(&self) -> usize {
        self.coded[0][0].len()
    }
}

/// What one user keeps after placement.
#[derive(Debug, Clone)]
pub struct CacheContent {
    pub user: usize,
    /// 1-based rows f with `P(f, user)` a star.
    rows: Vec<usize>,
    store: HashMap<(usize, usize), SymbolBlock>,
}

impl CacheContent {
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }
    pub fn get(&self, file: usize, row: usize) -> Option<&SymbolBlock> {
        self.store.get(&(file, row))
    }
    /// Number of coded subfiles held, over all files.
    pub fn len(&self) -> usize {
        self.store.len()
    }
    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }
}

fn check_codec(h: &HpPda, codec: &RsCodec) -> Result<(), EngineError> {
    let p = h.params();
    if codec.n() != p.f || codec.k() != p.subpacketization() {
        return Err(EngineError::CodecMismatch {
            n: codec.n(),
            k: codec.k(),
            f: p.f,
            sub: p.subpacketization(),
        });
    }
    Ok(())
}

/// Fill every user's cache from the star pattern of its column of `P`.
pub fn place(h: &HpPda, lib: &FileLibrary) -> Result<Vec<CacheContent>, EngineError> {
    check_codec(h, lib.codec())?;
    let p = h.p();
    Ok((0..p.n_cols())
        .map(|col| {
            let rows: Vec<usize> = p.star_rows(col).into_iter().map(|r| r + 1).collect();
            let store = (1..=lib.n_files())
                .flat_map(|n| rows.iter().map(move |&f| (n, f)))
                .map(|(n, f)| ((n, f), lib.coded(n, f).clone()))
                .collect();
            CacheContent {
                user: col + 1,
                rows,
                store,
            }
        })
        .collect())
}

/// One summand `C_{file,row}` of a transmission, destined for `user`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub user: usize,
    pub file: usize,
    pub row: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    /// The integer `s` of `B` this transmission serves.
    pub label: u32,
    pub terms: Vec<Term>,
    pub payload: SymbolBlock,
}

/// Everything the server broadcasts for one active set, plus the matching
/// it used (which users need to know to decode).
#[derive(Debug, Clone)]
pub struct Delivery {
    pub matching: ZetaMatch,
    /// Demands aligned with `matching.tau`.
    pub demands: Vec<usize>,
    pub transmissions: Vec<Transmission>,
}

impl Delivery {
    /// One line per transmission: the label, its terms, and the payload in
    /// hex (big-endian, one field symbol at a time).
    pub fn dump_hex(&self, codec: &RsCodec) -> String {
        let mut out = String::new();
        for x in &self.transmissions {
            let terms: Vec<String> = x
                .terms
                .iter()
                .map(|t| format!("C_{},{}", t.file, t.row))
                .collect();
            let hex: String = symbols_to_bytes(codec.field(), &x.payload)
                .iter()
                .map(|b| format!("{b:02x}"))
                .collect();
            let _ = writeln!(out, "X_{} = {} : {}", x.label, terms.join(" + "), hex);
        }
        out
    }
}

fn check_demands(h: &HpPda, n_files: usize, demands: &[usize]) -> Result<(), EngineError> {
    let expected = h.params().k_active;
    if demands.len() != expected {
        return Err(EngineError::DemandCount {
            expected,
            found: demands.len(),
        });
    }
    if let Some(&demand) = demands.iter().find(|&&d| d == 0 || d > n_files) {
        return Err(EngineError::DemandOutOfRange { demand, n_files });
    }
    Ok(())
}

/// Server side of the delivery phase. `demands[j]` is the file wanted by the
/// j-th smallest user of `tau`.
pub fn deliver(
    h: &HpPda,
    lib: &FileLibrary,
    tau: &[usize],
    demands: &[usize],
) -> Result<Delivery, EngineError> {
    check_codec(h, lib.codec())?;
    check_demands(h, lib.n_files(), demands)?;
    // demands follow the caller's tau order; re-align to the sorted order
    let mut pairs: Vec<(usize, usize)> = tau.iter().copied().zip(demands.iter().copied()).collect();
    pairs.sort_unstable();
    let matching = find_zeta(h, tau)?;
    let demands: Vec<usize> = pairs.into_iter().map(|(_, d)| d).collect();

    let b_bar = &matching.b_bar;
    let mut terms: Vec<Vec<Term>> = vec![Vec::new(); b_bar.s() as usize];
    // column-major so each sum lists its terms by ascending user
    for (c, (&user, &file)) in matching.tau.iter().zip(&demands).enumerate() {
        for r in 0..b_bar.f() {
            if let Cell::Int(s) = b_bar.get(r, c) {
                terms[s as usize - 1].push(Term {
                    user,
                    file,
                    row: matching.zeta[r],
                });
            }
        }
    }

    let len = lib.subfile_symbols();
    let field = lib.codec().field();
    let transmissions = terms
        .into_iter()
        .enumerate()
        .map(|(i, terms)| {
            let label = i as u32 + 1;
            if terms.is_empty() {
                return Err(EngineError::EmptyTransmission { label });
            }
            let mut payload = vec![0; len];
            for t in &terms {
                field.mul_add_into(&mut payload, lib.coded(t.file, t.row), 1);
            }
            Ok(Transmission {
                label,
                terms,
                payload,
            })
        })
        .collect::<Result<_, _>>()?;

    Ok(Delivery {
        matching,
        demands,
        transmissions,
    })
}

/// The coded subfiles of its demanded file a user ends up holding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collected {
    pub user: usize,
    pub demand: usize,
    /// Rows taken straight from the cache.
    pub cached: Vec<usize>,
    /// Rows peeled out of transmissions, in the order of B's rows.
    pub recovered: Vec<usize>,
    /// `coords[i]` is the 1-based coordinate of `values[i]`.
    pub coords: Vec<usize>,
    pub values: Vec<SymbolBlock>,
}

/// Cancel known terms out of the transmissions addressed to `cache.user` and
/// collect its coded subfiles of the demanded file.
pub fn collect_user(
    h: &HpPda,
    cache: &CacheContent,
    delivery: &Delivery,
) -> Result<Collected, EngineError> {
    let user = cache.user;
    let m = &delivery.matching;
    let col = m
        .tau
        .iter()
        .position(|&u| u == user)
        .ok_or(EngineError::InactiveUser(user))?;
    let demand = delivery.demands[col];

    let mut recovered = Vec::new();
    let mut rec_values = Vec::new();
    for r in 0..m.b_bar.f() {
        let Cell::Int(s) = m.b_bar.get(r, col) else {
            continue;
        };
        let x = delivery
            .transmissions
            .get(s as usize - 1)
            .filter(|x| x.label == s)
            .ok_or(EngineError::MissingTransmission(s))?;
        let mut value = x.payload.clone();
        for t in x.terms.iter().filter(|t| t.user != user) {
            let missing = EngineError::MissingCancelTerm {
                user,
                file: t.file,
                row: t.row,
                label: s,
            };
            // C3 puts a star at (t.row, user) for every sibling term
            if !h.p().is_star(t.row - 1, user - 1) {
                return Err(missing);
            }
            let known = cache.get(t.file, t.row).ok_or(missing)?;
            xor_into(&mut value, known);
        }
        recovered.push(m.zeta[r]);
        rec_values.push(value);
    }

    let cached: Vec<usize> = cache.rows().to_vec();
    let mut coords = cached.clone();
    coords.extend(&recovered);
    let mut values: Vec<SymbolBlock> = cached
        .iter()
        .map(|&f| {
            cache
                .get(demand, f)
                .cloned()
                .expect("cache holds every file at its star rows")
        })
        .collect();
    values.extend(rec_values);

    Ok(Collected {
        user,
        demand,
        cached,
        recovered,
        coords,
        values,
    })
}

fn xor_into(dst: &mut [u16], src: &[u16]) {
    dst.iter_mut().zip(src).for_each(|(d, &s)| *d ^= s);
}

/// Recover the demanded file of `cache.user`. `file_len` is the unpadded
/// length of the file, which the server announces alongside the library.
pub fn decode_user(
    h: &HpPda,
    cache: &CacheContent,
    delivery: &Delivery,
    codec: &RsCodec,
    file_len: usize,
) -> Result<Vec<u8>, EngineError> {
    check_codec(h, codec)?;
    let got = collect_user(h, cache, delivery)?;
    if got.coords.len() != codec.k() {
        return Err(EngineError::CoordinateCount {
            user: got.user,
            found: got.coords.len(),
            needed: codec.k(),
        });
    }
    let message = codec.decode_from(&got.coords, &got.values)?;
    Ok(codec.join(&message, file_len))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserOutcome {
    pub user: usize,
    pub demand: usize,
    pub success: bool,
    pub bytes_compared: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    pub tau: Vec<usize>,
    pub demands: Vec<usize>,
    pub users: Vec<UserOutcome>,
    /// Transmitted symbols over file symbols.
    pub rate: BigRational,
    pub transmissions: usize,
    pub subpacketization: usize,
}

impl SimReport {
    pub fn all_success(&self) -> bool {
        self.users.iter().all(|u| u.success)
    }
}

/// `p/q` even for integers.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for SimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for u in &self.users {
            writeln!(
                f,
                "user={} demand={} success={} bytes={}",
                u.user, u.demand, u.success, u.bytes_compared
            )?;
        }
        writeln!(f, "rate={}", format_ratio(&self.rate))
    }
}

/// A placed library ready to serve any number of delivery rounds.
#[derive(Debug, Clone)]
pub struct Simulator {
    hppda: HpPda,
    library: FileLibrary,
    caches: Vec<CacheContent>,
}

impl Simulator {
    pub fn new(h: HpPda, library: FileLibrary) -> Result<Self, EngineError> {
        let caches = place(&h, &library)?;
        Ok(Simulator {
            hppda: h,
            library,
            caches,
        })
    }

    /// `n_files` seeded random files of `64 * (F'-Z'+Z)` bytes.
    pub fn with_random_files(h: HpPda, n_files: usize, seed: u64) -> Result<Self, EngineError> {
        let codec = codec_for(&h)?;
        let bytes = DEFAULT_BYTES_PER_SUBFILE * codec.k();
        let library = FileLibrary::random(codec, n_files, bytes, seed)?;
        Self::new(h, library)
    }

    pub fn hppda(&self) -> &HpPda {
        &self.hppda
    }
    pub fn library(&self) -> &FileLibrary {
        &self.library
    }
    /// Cache of user `k` (1-based).
    pub fn cache(&self, k: usize) -> &CacheContent {
        &self.caches[k - 1]
    }

    pub fn deliver(&self, tau: &[usize], demands: &[usize]) -> Result<Delivery, EngineError> {
        deliver(&self.hppda, &self.library, tau, demands)
    }

    /// Deliver to `tau` and decode at every active user.
    pub fn run(&self, tau: &[usize], demands: &[usize]) -> Result<SimReport, EngineError> {
        let delivery = self.deliver(tau, demands)?;
        self.report(&delivery)
    }

    pub fn report(&self, delivery: &Delivery) -> Result<SimReport, EngineError> {
        let codec = self.library.codec();
        let mut users = Vec::with_capacity(delivery.matching.tau.len());
        for (&user, &demand) in delivery.matching.tau.iter().zip(&delivery.demands) {
            let original = self.library.original(demand);
            let got = decode_user(&self.hppda, self.cache(user), delivery, codec, original.len())?;
            users.push(UserOutcome {
                user,
                demand,
                success: got == original,
                bytes_compared: original.len(),
            });
        }
        let sent: usize = delivery.transmissions.iter().map(|x| x.payload.len()).sum();
        let file_symbols = self.library.subfile_symbols() * codec.k();
        Ok(SimReport {
            tau: delivery.matching.tau.clone(),
            demands: delivery.demands.clone(),
            users,
            rate: BigRational::new(BigInt::from(sent), BigInt::from(file_symbols)),
            transmissions: delivery.transmissions.len(),
            subpacketization: codec.k(),
        })
    }
}

/// Place `n_files` seeded random files and serve one demand vector.
pub fn simulate(
    h: &HpPda,
    n_files: usize,
    tau: &[usize],
    demands: &[usize],
    seed: u64,
) -> Result<SimReport, EngineError> {
    check_demands(h, n_files, demands)?;
    Simulator::with_random_files(h.clone(), n_files, seed)?.run(tau, demands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::design_3_8_4_1;
    use crate::hppda::{man_hppda, tdesign_hppda};

    fn terms_of(x: &Transmission) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = x.terms.iter().map(|t| (t.file, t.row)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn example1_placement() {
        let h = man_hppda(6, 4, 2).unwrap();
        let sim = Simulator::with_random_files(h, 6, 1).unwrap();
        assert_eq!(sim.cache(1).rows(), &[1, 2, 3, 4, 5]);
        assert_eq!(sim.cache(6).rows(), &[5, 9, 12, 14, 15]);
        assert_eq!(sim.cache(1).len(), 30);
    }

    #[test]
    fn example2_placement() {
        let h = tdesign_hppda(&design_3_8_4_1(), &[1, 2]).unwrap();
        let sim = Simulator::with_random_files(h, 6, 1).unwrap();
        assert_eq!(sim.cache(5).rows(), &[1, 4, 5, 8, 10, 12, 14]);
        assert_eq!(sim.cache(2).rows(), &[1, 3, 6, 7, 9, 12, 14]);
    }

    #[test]
    fn example1_transmissions() {
        let h = man_hppda(6, 4, 2).unwrap();
        let sim = Simulator::with_random_files(h, 6, 1).unwrap();
        let d = sim.deliver(&[1, 4, 5, 6], &[2, 3, 1, 5]).unwrap();
        let xs: Vec<_> = d.transmissions.iter().map(terms_of).collect();
        assert_eq!(xs[0], vec![(1, 3), (2, 13), (3, 4)]);
        assert_eq!(xs[1], vec![(2, 14), (3, 5), (5, 3)]);
        assert_eq!(xs[2], vec![(1, 5), (2, 15), (5, 4)]);
        assert_eq!(xs[3], vec![(1, 14), (3, 15), (5, 13)]);

        let got = collect_user(sim.hppda(), sim.cache(1), &d).unwrap();
        assert_eq!(got.recovered, vec![13, 14, 15]);
        assert_eq!(got.cached, vec![1, 2, 3, 4, 5]);
        let lib = sim.library();
        for (i, &row) in got.recovered.iter().enumerate() {
            assert_eq!(&got.values[5 + i], lib.coded(2, row));
        }
    }

    #[test]
    fn example2_transmissions() {
        let h = tdesign_hppda(&design_3_8_4_1(), &[1, 2]).unwrap();
        let sim = Simulator::with_random_files(h, 6, 1).unwrap();
        let d = sim.deliver(&[2, 6, 8], &[1, 3, 4]).unwrap();
        let xs: Vec<_> = d.transmissions.iter().map(terms_of).collect();
        assert_eq!(xs[0], vec![(1, 8), (3, 9), (4, 1)]);
        assert_eq!(xs[1], vec![(1, 11), (3, 14), (4, 6)]);
        assert_eq!(xs[2], vec![(1, 10), (3, 7)]);
        assert_eq!(xs[3], vec![(1, 2), (4, 7)]);
        assert_eq!(xs[4], vec![(3, 2), (4, 10)]);
        let got = collect_user(sim.hppda(), sim.cache(2), &d).unwrap();
        assert_eq!(got.recovered, vec![8, 11, 10, 2]);
        let mut coords = got.coords.clone();
        coords.sort_unstable();
        assert_eq!(coords, vec![1, 2, 3, 6, 7, 8, 9, 10, 11, 12, 14]);
    }

    #[test]
    fn simulate_examples() {
        let h = man_hppda(6, 4, 2).unwrap();
        let r = simulate(&h, 6, &[1, 4, 5, 6], &[2, 3, 1, 5], 42).unwrap();
        assert!(r.all_success());
        assert_eq!(format_ratio(&r.rate), "1/2");
        assert_eq!(r.transmissions, 4);
        assert_eq!(r.subpacketization, 8);

        let h = tdesign_hppda(&design_3_8_4_1(), &[1, 2]).unwrap();
        let r = simulate(&h, 6, &[2, 6, 8], &[1, 3, 4], 42).unwrap();
        assert!(r.all_success());
        assert_eq!(format_ratio(&r.rate), "5/11");
        assert!(r.to_string().ends_with("rate=5/11\n"));
    }

    #[test]
    fn demands_follow_caller_tau_order() {
        let h = man_hppda(6, 4, 2).unwrap();
        let r = simulate(&h, 6, &[6, 1, 5, 4], &[5, 2, 1, 3], 7).unwrap();
        assert_eq!(r.tau, vec![1, 4, 5, 6]);
        assert_eq!(r.demands, vec![2, 3, 1, 5]);
        assert!(r.all_success());
    }

    #[test]
    fn repeated_demands_and_few_files() {
        let h = man_hppda(6, 4, 2).unwrap();
        let r = simulate(&h, 1, &[1, 2, 3, 4], &[1, 1, 1, 1], 3).unwrap();
        assert!(r.all_success());
        assert_eq!(r.transmissions, 4);
    }

    #[test]
    fn top_level_man_decodes_from_cache() {
        // t = K': B is one all-star row and nothing is transmitted
        let h = man_hppda(4, 2, 2).unwrap();
        let r = simulate(&h, 3, &[1, 3], &[2, 3], 5).unwrap();
        assert!(r.all_success());
        assert_eq!(r.transmissions, 0);
        assert_eq!(format_ratio(&r.rate), "0/1");
    }

    #[test]
    fn demand_errors() {
        let h = man_hppda(6, 4, 2).unwrap();
        assert_eq!(
            simulate(&h, 6, &[1, 4, 5, 6], &[9, 1, 1, 1], 0).unwrap_err(),
            EngineError::DemandOutOfRange {
                demand: 9,
                n_files: 6
            }
        );
        assert_eq!(
            simulate(&h, 6, &[1, 4, 5, 6], &[1, 1], 0).unwrap_err(),
            EngineError::DemandCount {
                expected: 4,
                found: 2
            }
        );
    }

    #[test]
    fn inactive_user_rejected() {
        let h = man_hppda(6, 4, 2).unwrap();
        let sim = Simulator::with_random_files(h, 2, 0).unwrap();
        let d = sim.deliver(&[1, 4, 5, 6], &[1, 2, 1, 2]).unwrap();
        assert_eq!(
            collect_user(sim.hppda(), sim.cache(2), &d).unwrap_err(),
            EngineError::InactiveUser(2)
        );
    }

    #[test]
    fn codec_mismatch() {
        let h = man_hppda(6, 4, 2).unwrap();
        let lib = FileLibrary::random(RsCodec::new(15, 7).unwrap(), 2, 10, 0).unwrap();
        assert!(matches!(
            place(&h, &lib),
            Err(EngineError::CodecMismatch { .. })
        ));
    }

    #[test]
    fn dump_lists_every_transmission() {
        let h = man_hppda(6, 4, 2).unwrap();
        let sim = Simulator::with_random_files(h, 6, 1).unwrap();
        let d = sim.deliver(&[1, 4, 5, 6], &[2, 3, 1, 5]).unwrap();
        let dump = d.dump_hex(sim.library().codec());
        assert_eq!(dump.lines().count(), 4);
        assert!(dump.starts_with("X_1 = C_2,13 + C_3,4 + C_1,3 : "));
    }
}
