//! Combinatorial t-designs: parsing, exhaustive verification and the
//! block-counting parameters used by the design-based HpPDA family.
//!
//! Points are 1-based. Block order is file order and becomes the row order of
//! the placement array downstream, so nothing here ever reorders blocks.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::combin::{binomial, subsets};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DesignError {
    #[error("line {line}: malformed header, expected \"t v k lambda\"")]
    MalformedHeader { line: usize },
    #[error("missing header line")]
    MissingHeader,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("line {line}: could not parse point {token:?}")]
    BadPoint { line: usize, token: String },
    #[error("block {block}: expected {expected} points, found {found}")]
    WrongBlockSize {
        block: usize,
        expected: usize,
        found: usize,
    },
    #[error("block {block}: point {point} repeated")]
    DuplicatePoint { block: usize, point: usize },
    #[error("block {block} duplicates block {first}")]
    DuplicateBlock { block: usize, first: usize },
    #[error("block {block}: point {point} outside [1, {v}]")]
    PointOutOfRange { block: usize, point: usize, v: usize },
    #[error("{what} index {index} outside 0..={t}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        t: usize,
    },
    #[error("closed form for {what} is not an integer for these parameters")]
    NonIntegral { what: &'static str },
    #[error("T must have exactly {t} distinct points in [1, {v}]")]
    BadTSet { t: usize, v: usize },
    #[error("Y is not a subset of T")]
    NotSubset,
}

/// A block design with declared parameters t-(v, k, lambda).
///
/// Construction checks the structural invariants (block sizes, point range,
/// no repeated points or blocks). The t-wise balance is *not* checked here;
/// that is [`Design::verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    t: usize,
    v: usize,
    k: usize,
    lambda: usize,
    blocks: Vec<Vec<usize>>,
}

/// Outcome of the exhaustive t-subset count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignReport {
    pub valid: bool,
    /// Every t-subset whose block count differs from lambda, with its count.
    pub violations: Vec<(Vec<usize>, usize)>,
}

impl Design {
    pub fn new(
        t: usize,
        v: usize,
        k: usize,
        lambda: usize,
        blocks: Vec<Vec<usize>>,
    ) -> Result<Self, DesignError> {
        if t == 0 || k == 0 || v == 0 || lambda == 0 {
            return Err(DesignError::InvalidParameters(
                "t, v, k and lambda must be positive".into(),
            ));
        }
        if t > k || k > v {
            return Err(DesignError::InvalidParameters(format!(
                "need t <= k <= v, got t={t} k={k} v={v}"
            )));
        }
        let mut seen: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
        for (idx, block) in blocks.into_iter().enumerate() {
            let number = idx + 1;
            if block.len() != k {
                return Err(DesignError::WrongBlockSize {
                    block: number,
                    expected: k,
                    found: block.len(),
                });
            }
            let mut sorted = block;
            sorted.sort_unstable();
            for &p in &sorted {
                if p == 0 || p > v {
                    return Err(DesignError::PointOutOfRange {
                        block: number,
                        point: p,
                        v,
                    });
                }
            }
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(DesignError::DuplicatePoint {
                    block: number,
                    point: w[0],
                });
            }
            if let Some(first) = seen.iter().position(|b| *b == sorted) {
                return Err(DesignError::DuplicateBlock {
                    block: number,
                    first: first + 1,
                });
            }
            seen.push(sorted);
        }
        Ok(Design {
            t,
            v,
            k,
            lambda,
            blocks: seen,
        })
    }

    /// Parse the line-oriented design format: a `t v k lambda` header, then
    /// one block per non-empty line. Lines starting with `#` are comments.
    pub fn parse(text: &str) -> Result<Self, DesignError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = lines.next().ok_or(DesignError::MissingHeader)?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| DesignError::MalformedHeader { line: hline })?;
        let [t, v, k, lambda] = nums[..] else {
            return Err(DesignError::MalformedHeader { line: hline });
        };

        let mut blocks = Vec::new();
        for (line, body) in lines {
            let block = body
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| DesignError::BadPoint {
                        line,
                        token: tok.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            blocks.push(block);
        }
        Design::new(t, v, k, lambda, blocks)
    }

    /// Header plus one block per line, points sorted within each block.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn t(&self) -> usize {
        self.t
    }
    pub fn v(&self) -> usize {
        self.v
    }
    pub fn block_size(&self) -> usize {
        self.k
    }
    pub fn lambda(&self) -> usize {
        self.lambda
    }
    /// Number of blocks, b.
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }
    /// Blocks in file order, each sorted ascending.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    fn block_contains_all(block: &[usize], points: &[usize]) -> bool {
        points.iter().all(|p| block.binary_search(p).is_ok())
    }

    /// Number of blocks containing every point of `points`.
    pub fn count_containing(&self, points: &[usize]) -> usize {
        self.blocks
            .iter()
            .filter(|b| Self::block_contains_all(b, points))
            .count()
    }

    /// Count blocks over every t-subset of `[v]` and compare with lambda.
    pub fn verify(&self) -> DesignReport {
        let violations: Vec<_> = subsets(self.v, self.t)
            .filter_map(|ts| {
                let count = self.count_containing(&ts);
                (count != self.lambda).then_some((ts, count))
            })
            .collect();
        DesignReport {
            valid: violations.is_empty(),
            violations,
        }
    }

    fn exact_quotient(num: u128, den: u128, what: &'static str) -> Result<usize, DesignError> {
        if den == 0 || !num.is_multiple_of(den) {
            return Err(DesignError::NonIntegral { what });
        }
        Ok((num / den) as usize)
    }

    /// lambda_s = lambda * C(v-s, t-s) / C(k-s, t-s): blocks through any fixed
    /// s-subset of points.
    pub fn lambda_s(&self, s: usize) -> Result<usize, DesignError> {
        if s > self.t {
            return Err(DesignError::IndexOutOfRange {
                what: "s",
                index: s,
                t: self.t,
            });
        }
        let (v, k, t, s) = (self.v as u64, self.k as u64, self.t as u64, s as u64);
        Self::exact_quotient(
            self.lambda as u128 * binomial(v - s, t - s),
            binomial(k - s, t - s),
            "lambda_s",
        )
    }

    /// lambda_i^t = lambda * C(v-t, k-i) / C(v-t, k-t): blocks meeting a fixed
    /// t-set T in exactly a fixed i-subset Y.
    pub fn lambda_exact(&self, i: usize) -> Result<usize, DesignError> {
        if i > self.t {
            return Err(DesignError::IndexOutOfRange {
                what: "i",
                index: i,
                t: self.t,
            });
        }
        let (v, k, t, i) = (self.v as u64, self.k as u64, self.t as u64, i as u64);
        if k - i > v - t {
            return Ok(0);
        }
        Self::exact_quotient(
            self.lambda as u128 * binomial(v - t, k - i),
            binomial(v - t, k - t),
            "lambda_exact",
        )
    }

    /// 1-based indices (file order) of the blocks A with `A ∩ T = Y`.
    pub fn blocks_matching(&self, tset: &[usize], y: &[usize]) -> Result<Vec<usize>, DesignError> {
        let tset: BTreeSet<usize> = tset.iter().copied().collect();
        if tset.len() != self.t || tset.iter().any(|&p| p == 0 || p > self.v) {
            return Err(DesignError::BadTSet {
                t: self.t,
                v: self.v,
            });
        }
        let y: BTreeSet<usize> = y.iter().copied().collect();
        if !y.is_subset(&tset) {
            return Err(DesignError::NotSubset);
        }
        Ok(self
            .blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| {
                tset.iter()
                    .all(|p| b.binary_search(p).is_ok() == y.contains(p))
            })
            .map(|(i, _)| i + 1)
            .collect())
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {} {}", self.t, self.v, self.k, self.lambda)?;
        for b in &self.blocks {
            let line: Vec<String> = b.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// The 3-(8,4,1) design shipped with the crate.
pub fn design_3_8_4_1() -> Design {
    Design::parse(include_str!("../data/3-8-4-1.txt")).expect("shipped design parses")
}
