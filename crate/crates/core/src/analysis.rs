//! Rate-memory points, the converse bound, and lower convex envelopes.
//!
//! Scheme points are exact rationals. The converse bound is maximised over a
//! grid in alpha and is therefore a float; a finer grid can only raise it.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::engine::format_ratio;
use crate::hppda::HpPda;

/// Default alpha grid step for [`converse_bound`].
pub const DEFAULT_ALPHA_STEP: f64 = 1e-3;
/// Default number of M samples for the bound curve in a sweep.
pub const DEFAULT_BOUND_SAMPLES: usize = 101;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("memory M={m} outside [0, {n}]")]
    MemoryOutOfRange { m: f64, n: usize },
    #[error("alpha step must be in (0, 1], got {0}")]
    BadAlphaStep(f64),
    #[error("need N >= 1 and K' >= 1")]
    BadSystem,
    #[error("no points given")]
    Empty,
    #[error("F'-Z'+Z is zero")]
    ZeroSubpacketization,
    #[error("uncoded-placement point needs Z < F' (Z={z}, F'={f_active})")]
    NotBelowOne { z: usize, f_active: usize },
    #[error("family members disagree on (K, K'): {0}")]
    MixedFamily(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Coded placement: (Z/(F'-Z'+Z), S/(F'-Z'+Z)).
    Proposed,
    /// Uncoded placement: (Z/F', S/F').
    Theorem1,
    Custom(String),
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Proposed => f.write_str("proposed"),
            Scheme::Theorem1 => f.write_str("theorem1"),
            Scheme::Custom(name) => f.write_str(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatePoint {
    pub m_over_n: BigRational,
    pub rate: BigRational,
    pub scheme: Scheme,
}

fn ratio(p: usize, q: usize) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl RatePoint {
    pub fn new(m_over_n: BigRational, rate: BigRational, scheme: Scheme) -> Self {
        RatePoint {
            m_over_n,
            rate,
            scheme,
        }
    }

    pub fn from_ints(m: (usize, usize), r: (usize, usize), scheme: Scheme) -> Self {
        Self::new(ratio(m.0, m.1), ratio(r.0, r.1), scheme)
    }

    /// Cache size in files for a library of `n` files.
    pub fn memory(&self, n: usize) -> BigRational {
        &self.m_over_n * BigInt::from(n)
    }
}

impl fmt::Display for RatePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}, {})",
            self.scheme,
            format_ratio(&self.m_over_n),
            format_ratio(&self.rate)
        )
    }
}

/// `(Z/(F'-Z'+Z), S/(F'-Z'+Z))`.
pub fn proposed_point(h: &HpPda) -> Result<RatePoint, AnalysisError> {
    let p = h.params();
    let sub = p.subpacketization();
    if sub == 0 {
        return Err(AnalysisError::ZeroSubpacketization);
    }
    Ok(RatePoint::from_ints((p.z, sub), (p.s, sub), Scheme::Proposed))
}

/// `(Z/F', S/F')`, defined only when the memory is below one library, Z < F'.
pub fn theorem1_point(h: &HpPda) -> Result<RatePoint, AnalysisError> {
    let p = h.params();
    if p.z >= p.f_active {
        return Err(AnalysisError::NotBelowOne {
            z: p.z,
            f_active: p.f_active,
        });
    }
    Ok(RatePoint::from_ints(
        (p.z, p.f_active),
        (p.s, p.f_active),
        Scheme::Theorem1,
    ))
}

fn check_system(n: usize, kp: usize, alpha_step: f64) -> Result<(), AnalysisError> {
    if n == 0 || kp == 0 {
        return Err(AnalysisError::BadSystem);
    }
    if !(alpha_step > 0.0 && alpha_step <= 1.0) {
        return Err(AnalysisError::BadAlphaStep(alpha_step));
    }
    Ok(())
}

/// Alpha values `0, step, 2 step, ...` and always 1.
fn alpha_grid(step: f64) -> impl Iterator<Item = f64> {
    let count = (1.0 / step).floor() as usize;
    (0..=count)
        .map(move |i| i as f64 * step)
        .filter(|&a| a < 1.0)
        .chain(std::iter::once(1.0))
}

/// Smallest `l` in `1..=s` with `(s(s-1) - l(l-1))/2 + alpha s <= (N-l+1) l`.
fn min_ell(n: usize, s: usize, alpha: f64) -> usize {
    let (nf, sf) = (n as f64, s as f64);
    (1..=s)
        .find(|&l| {
            let lf = l as f64;
            (sf * (sf - 1.0) - lf * (lf - 1.0)) / 2.0 + alpha * sf <= (nf - lf + 1.0) * lf + 1e-12
        })
        .unwrap_or(s)
}

/// Lower bound on the rate of a K'-user, N-file system with memory `m`:
/// the maximum over `s ∈ [min(N, K')]` and alpha on a grid of
/// `s - 1 + alpha - (s(s-1) - l(l-1) + 2 alpha s) / (2 (N - l + 1)) * M`,
/// clamped at zero.
pub fn converse_bound(n: usize, kp: usize, m: f64, alpha_step: f64) -> Result<f64, AnalysisError> {
    check_system(n, kp, alpha_step)?;
    if !(0.0..=n as f64).contains(&m) {
        return Err(AnalysisError::MemoryOutOfRange { m, n });
    }
    let nf = n as f64;
    let mut best = 0.0f64;
    for s in 1..=n.min(kp) {
        let sf = s as f64;
        for alpha in alpha_grid(alpha_step) {
            let l = min_ell(n, s, alpha) as f64;
            let slope = (sf * (sf - 1.0) - l * (l - 1.0) + 2.0 * alpha * sf) / (2.0 * (nf - l + 1.0));
            best = best.max(sf - 1.0 + alpha - slope * m);
        }
    }
    // rounding residue at M = N
    Ok(if best < 1e-12 { 0.0 } else { best })
}

/// Samples of the converse bound at evenly spaced memories in `[0, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub n: usize,
    pub kp: usize,
    /// `(M, R)` pairs, M ascending.
    pub samples: Vec<(f64, f64)>,
}

pub fn bound_curve(
    n: usize,
    kp: usize,
    samples: usize,
    alpha_step: f64,
) -> Result<BoundCurve, AnalysisError> {
    check_system(n, kp, alpha_step)?;
    let count = samples.max(2);
    let samples = (0..count)
        .map(|i| {
            // last sample pinned to exactly N
            let m = if i + 1 == count {
                n as f64
            } else {
                n as f64 * i as f64 / (count - 1) as f64
            };
            converse_bound(n, kp, m, alpha_step).map(|r| (m, r))
        })
        .collect::<Result<_, _>>()?;
    Ok(BoundCurve { n, kp, samples })
}

/// Piecewise-linear lower convex envelope in the (M/N, R) plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    /// Vertices, M/N strictly increasing, slopes strictly increasing.
    pub vertices: Vec<(BigRational, BigRational)>,
}

impl Envelope {
    /// Linear interpolation between neighbouring vertices, constant beyond
    /// the first and last vertex.
    pub fn eval(&self, m_over_n: &BigRational) -> BigRational {
        let v = &self.vertices;
        if m_over_n <= &v[0].0 {
            return v[0].1.clone();
        }
        for w in v.windows(2) {
            let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
            if m_over_n <= x1 {
                return y0 + (y1 - y0) * (m_over_n - x0) / (x1 - x0);
            }
        }
        v[v.len() - 1].1.clone()
    }

    pub fn slopes(&self) -> Vec<BigRational> {
        self.vertices
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }
}

/// Extra points for [`lower_envelope`]: no caching, `(0, min(N, K'))`, and
/// a full cache, `(1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anchors {
    pub n: usize,
    pub kp: usize,
}

/// Lower convex hull of the points; only the given points are used unless
/// `anchors` is set.
pub fn lower_envelope(
    points: &[RatePoint],
    anchors: Option<Anchors>,
) -> Result<Envelope, AnalysisError> {
    let mut pts: Vec<(BigRational, BigRational)> = points
        .iter()
        .map(|p| (p.m_over_n.clone(), p.rate.clone()))
        .collect();
    if let Some(Anchors { n, kp }) = anchors {
        pts.push((BigRational::zero(), ratio(n.min(kp), 1)));
        pts.push((ratio(1, 1), BigRational::zero()));
    }
    if pts.is_empty() {
        return Err(AnalysisError::Empty);
    }
    pts.sort();
    // keep the lowest rate at each memory
    pts.dedup_by(|later, earlier| later.0 == earlier.0);

    let mut hull: Vec<(BigRational, BigRational)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
            if cross > BigRational::zero() {
                break;
            }
            hull.pop();
        }
        hull.push(p);
    }
    Ok(Envelope { vertices: hull })
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Scheme points of an HpPDA family for an N-file system, plus the converse
/// bound sampled over `[0, N]`.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub n: usize,
    pub points: Vec<RatePoint>,
    pub bound: BoundCurve,
}

impl Sweep {
    /// `scheme,M,R` with six decimals; points first, then the bound samples.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scheme,M,R\n");
        for p in &self.points {
            out += &format!(
                "{},{:.6},{:.6}\n",
                p.scheme,
                to_f64(&p.memory(self.n)),
                to_f64(&p.rate)
            );
        }
        for (m, r) in &self.bound.samples {
            out += &format!("bound,{m:.6},{r:.6}\n");
        }
        out
    }

    /// The scheme points again, with `M` and `R` as exact `p/q` strings.
    pub fn to_exact_csv(&self) -> String {
        let mut out = String::from("scheme,M,R\n");
        for p in &self.points {
            out += &format!(
                "{},{},{}\n",
                p.scheme,
                format_ratio(&p.memory(self.n)),
                format_ratio(&p.rate)
            );
        }
        out
    }
}

/// Proposed points for every member and uncoded-placement points for the
/// members with Z < F'.
pub fn sweep(
    family: &[HpPda],
    n: usize,
    kp: usize,
    bound_samples: usize,
    alpha_step: f64,
) -> Result<Sweep, AnalysisError> {
    let first = family.first().ok_or(AnalysisError::Empty)?.params();
    for h in family {
        let p = h.params();
        if (p.k, p.k_active) != (first.k, first.k_active) || p.k_active != kp {
            return Err(AnalysisError::MixedFamily(format!(
                "({}, {}) vs ({}, {}) with K'={kp}",
                p.k, p.k_active, first.k, first.k_active
            )));
        }
    }
    let mut points = Vec::new();
    for h in family {
        points.push(proposed_point(h)?);
    }
    for h in family {
        if let Ok(p) = theorem1_point(h) {
            points.push(p);
        }
    }
    let bound = bound_curve(n, kp, bound_samples, alpha_step)?;
    Ok(Sweep { n, points, bound })
}

/// Where the exact sidecar of a CSV goes: `x.csv` -> `x.rationals.csv`.
pub fn exact_sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    csv.with_file_name(format!("{stem}.rationals.csv"))
}

/// Write the CSV and its exact sidecar; returns the sidecar path.
pub fn write_sweep(s: &Sweep, out: &Path) -> Result<PathBuf, AnalysisError> {
    fs::write(out, s.to_csv())?;
    let side = exact_sidecar_path(out);
    fs::write(&side, s.to_exact_csv())?;
    Ok(side)
}
