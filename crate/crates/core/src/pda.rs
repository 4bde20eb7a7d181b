//! Placement delivery arrays.
//!
//! An F x K array over {`*`, integers, null}. Rows are subfiles, columns are
//! users; a star means the user caches that subfile and each integer is one
//! multicast transmission.
//!
//! Array accessors (`get`, `is_star`) take 0-based positions. Anything that
//! names a domain object (a user, a row label, an integer) is 1-based.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::combin::{binomial, lex_rank, subsets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Star,
    Int(u32),
    Null,
}

impl Cell {
    pub fn is_star(self) -> bool {
        matches!(self, Cell::Star)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Star => f.write_str("*"),
            Cell::Null => f.write_str("-"),
            Cell::Int(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Cell {
    type Err = PdaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "*" => Ok(Cell::Star),
            "-" => Ok(Cell::Null),
            tok => tok
                .parse::<u32>()
                .ok()
                .filter(|&v| v >= 1)
                .map(Cell::Int)
                .ok_or_else(|| PdaError::BadCell(tok.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdaError {
    #[error("unrecognised cell {0:?}")]
    BadCell(String),
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("array is empty")]
    Empty,
    #[error("star array may only contain '*' and '-' (row {row}, column {col})")]
    IntegerInStarArray { row: usize, col: usize },
    #[error("not a PDA: {0}")]
    NotAPda(PdaViolation),
    #[error("MAN PDA needs 1 <= t <= K', got K'={kp} t={t}")]
    ManParameters { kp: usize, t: usize },
    #[error("index out of range: {0}")]
    OutOfRange(String),
}

/// First reason an array fails the PDA conditions. Positions are 1-based
/// `(row, column)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PdaViolation {
    Empty,
    /// C1: column star counts differ.
    ColumnStarCount {
        col: usize,
        expected: usize,
        found: usize,
    },
    /// C2: an integer in `1..=S` never appears.
    MissingInteger(u32),
    /// C3(a): two copies of `s` share a row.
    SameRow {
        s: u32,
        a: (usize, usize),
        b: (usize, usize),
    },
    /// C3(a): two copies of `s` share a column.
    SameColumn {
        s: u32,
        a: (usize, usize),
        b: (usize, usize),
    },
    /// C3(b): the 2x2 sub-array spanned by two copies of `s` lacks a star on
    /// the other diagonal.
    CornerNotStar {
        s: u32,
        a: (usize, usize),
        b: (usize, usize),
    },
}

impl fmt::Display for PdaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdaViolation::Empty => f.write_str("empty array"),
            PdaViolation::ColumnStarCount {
                col,
                expected,
                found,
            } => write!(f, "C1: column {col} has {found} stars, expected {expected}"),
            PdaViolation::MissingInteger(s) => write!(f, "C2: integer {s} never appears"),
            PdaViolation::SameRow { s, a, b } => {
                write!(f, "C3: {s} at {a:?} and {b:?} share a row")
            }
            PdaViolation::SameColumn { s, a, b } => {
                write!(f, "C3: {s} at {a:?} and {b:?} share a column")
            }
            PdaViolation::CornerNotStar { s, a, b } => {
                write!(f, "C3: {s} at {a:?} and {b:?} without stars on the opposite corners")
            }
        }
    }
}

/// Anything that can answer "is there a star at (row, col)".
pub trait StarGrid {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    /// 0-based position.
    fn is_star(&self, row: usize, col: usize) -> bool;

    fn column_star_counts(&self) -> Vec<usize> {
        (0..self.n_cols())
            .map(|c| (0..self.n_rows()).filter(|&r| self.is_star(r, c)).count())
            .collect()
    }
}

/// Rectangular grid of cells with no PDA guarantees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellArray {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
}

impl CellArray {
    pub fn from_rows(rows: Vec<Vec<Cell>>) -> Result<Self, PdaError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut cells = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(PdaError::Ragged {
                    row: i + 1,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            cells.extend(row);
        }
        Ok(CellArray {
            rows: n_rows,
            cols: n_cols,
            cells,
        })
    }

    /// Parse the CSV-like array format: one row per line, `*`, `-` or a
    /// positive integer per comma-separated cell. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, PdaError> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.split(',').map(str::parse).collect::<Result<Vec<Cell>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, cell: Cell) {
        self.cells[row * self.cols + col] = cell;
    }

    pub fn row(&self, row: usize) -> &[Cell] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Cell]> {
        self.cells.chunks(self.cols.max(1)).take(self.rows)
    }

    /// Largest integer present, 0 if none.
    pub fn max_integer(&self) -> u32 {
        self.cells
            .iter()
            .filter_map(|c| match c {
                Cell::Int(s) => Some(*s),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

impl StarGrid for CellArray {
    fn n_rows(&self) -> usize {
        self.rows
    }
    fn n_cols(&self) -> usize {
        self.cols
    }
    fn is_star(&self, row: usize, col: usize) -> bool {
        self.get(row, col).is_star()
    }
}

impl fmt::Display for CellArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdaReport {
    pub valid: bool,
    pub k: usize,
    pub f: usize,
    /// Stars per column when uniform.
    pub z: Option<usize>,
    pub s: u32,
    /// `Some(g)` when every integer occurs exactly g times.
    pub regularity: Option<usize>,
    pub violation: Option<PdaViolation>,
}

/// Check C1-C3 on an arbitrary grid.
///
/// C3 is checked pairwise inside each integer class, so the cost is
/// quadratic in the number of occurrences of a single integer.
pub fn verify_pda(a: &CellArray) -> PdaReport {
    let (f, k) = (a.n_rows(), a.n_cols());
    let s_max = a.max_integer();
    let mut report = PdaReport {
        valid: false,
        k,
        f,
        z: None,
        s: s_max,
        regularity: None,
        violation: None,
    };
    if f == 0 || k == 0 {
        report.violation = Some(PdaViolation::Empty);
        return report;
    }

    let counts = a.column_star_counts();
    let z = counts[0];
    if let Some(col) = counts.iter().position(|&c| c != z) {
        report.violation = Some(PdaViolation::ColumnStarCount {
            col: col + 1,
            expected: z,
            found: counts[col],
        });
        return report;
    }
    report.z = Some(z);

    let mut occurrences: Vec<Vec<(usize, usize)>> = vec![Vec::new(); s_max as usize + 1];
    for r in 0..f {
        for c in 0..k {
            if let Cell::Int(s) = a.get(r, c) {
                occurrences[s as usize].push((r, c));
            }
        }
    }
    if let Some(s) = (1..=s_max).find(|&s| occurrences[s as usize].is_empty()) {
        report.violation = Some(PdaViolation::MissingInteger(s));
        return report;
    }

    for s in 1..=s_max {
        let occ = &occurrences[s as usize];
        for (i, &(r1, c1)) in occ.iter().enumerate() {
            for &(r2, c2) in &occ[i + 1..] {
                let (pa, pb) = ((r1 + 1, c1 + 1), (r2 + 1, c2 + 1));
                let violation = if r1 == r2 {
                    Some(PdaViolation::SameRow { s, a: pa, b: pb })
                } else if c1 == c2 {
                    Some(PdaViolation::SameColumn { s, a: pa, b: pb })
                } else if !(a.is_star(r1, c2) && a.is_star(r2, c1)) {
                    Some(PdaViolation::CornerNotStar { s, a: pa, b: pb })
                } else {
                    None
                };
                if violation.is_some() {
                    report.violation = violation;
                    return report;
                }
            }
        }
    }

    let g = occurrences.get(1).map_or(0, Vec::len);
    if occurrences[1..].iter().all(|o| o.len() == g) && s_max > 0 {
        report.regularity = Some(g);
    }
    report.valid = true;
    report
}

/// A grid that satisfies C1-C3, i.e. a [K, F, Z, S]-PDA.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pda {
    array: CellArray,
    z: usize,
    s: u32,
}

impl Pda {
    pub fn new(array: CellArray) -> Result<Self, PdaError> {
        let report = verify_pda(&array);
        match report.violation {
            Some(v) => Err(PdaError::NotAPda(v)),
            None => Ok(Pda {
                z: report.z.unwrap_or(0),
                s: report.s,
                array,
            }),
        }
    }

    pub fn parse(text: &str) -> Result<Self, PdaError> {
        Self::new(CellArray::parse(text)?)
    }

    /// Number of users (columns).
    pub fn k(&self) -> usize {
        self.array.n_cols()
    }
    /// Number of rows (subpacketization).
    pub fn f(&self) -> usize {
        self.array.n_rows()
    }
    /// Stars per column.
    pub fn z(&self) -> usize {
        self.z
    }
    /// Number of distinct integers.
    pub fn s(&self) -> u32 {
        self.s
    }
    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.array.get(row, col)
    }
    pub fn array(&self) -> &CellArray {
        &self.array
    }
    pub fn into_array(self) -> CellArray {
        self.array
    }
}

impl StarGrid for Pda {
    fn n_rows(&self) -> usize {
        self.array.n_rows()
    }
    fn n_cols(&self) -> usize {
        self.array.n_cols()
    }
    fn is_star(&self, row: usize, col: usize) -> bool {
        self.array.is_star(row, col)
    }
}

impl fmt::Display for Pda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.array.fmt(f)
    }
}

/// The MAN PDA for `kp` users at level `t`.
///
/// Rows are the t-subsets of `[kp]` in lexicographic order. Cell `(T, k)` is
/// a star when `k ∈ T`, otherwise the 1-based lexicographic rank of `T ∪ {k}`
/// among the (t+1)-subsets. `t = kp` gives the single all-star row with no
/// integers.
pub fn man_pda(kp: usize, t: usize) -> Result<Pda, PdaError> {
    if t == 0 || t > kp {
        return Err(PdaError::ManParameters { kp, t });
    }
    let f = binomial(kp as u64, t as u64) as usize;
    let mut cells = Vec::with_capacity(f * kp);
    let mut union = Vec::with_capacity(t + 1);
    for row in subsets(kp, t) {
        for k in 1..=kp {
            if row.binary_search(&k).is_ok() {
                cells.push(Cell::Star);
            } else {
                union.clear();
                union.extend_from_slice(&row);
                let pos = union.partition_point(|&x| x < k);
                union.insert(pos, k);
                cells.push(Cell::Int(lex_rank(&union, kp) as u32));
            }
        }
    }
    let array = CellArray {
        rows: f,
        cols: kp,
        cells,
    };
    let s = binomial(kp as u64, t as u64 + 1) as u32;
    let z = binomial(kp as u64 - 1, t as u64 - 1) as usize;
    debug_assert_eq!(array.max_integer(), s);
    Ok(Pda { array, z, s })
}

/// Star/null array: the placement half of an HpPDA.
///
/// Column star counts are not forced to be uniform here so that damaged
/// arrays can still be loaded and diagnosed; see [`StarArray::uniform_z`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarArray {
    rows: usize,
    cols: usize,
    stars: Vec<bool>,
}

impl StarArray {
    pub fn from_fn(rows: usize, cols: usize, mut star: impl FnMut(usize, usize) -> bool) -> Self {
        let mut stars = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                stars.push(star(r, c));
            }
        }
        StarArray { rows, cols, stars }
    }

    /// Accepts a cell grid holding only stars and nulls.
    pub fn from_cells(a: &CellArray) -> Result<Self, PdaError> {
        for r in 0..a.n_rows() {
            for c in 0..a.n_cols() {
                if let Cell::Int(_) = a.get(r, c) {
                    return Err(PdaError::IntegerInStarArray {
                        row: r + 1,
                        col: c + 1,
                    });
                }
            }
        }
        Ok(Self::from_fn(a.n_rows(), a.n_cols(), |r, c| a.is_star(r, c)))
    }

    pub fn parse(text: &str) -> Result<Self, PdaError> {
        Self::from_cells(&CellArray::parse(text)?)
    }

    pub fn set_star(&mut self, row: usize, col: usize, star: bool) {
        self.stars[row * self.cols + col] = star;
    }

    /// Stars per column if every column has the same count.
    pub fn uniform_z(&self) -> Option<usize> {
        let counts = self.column_star_counts();
        let z = *counts.first()?;
        counts.iter().all(|&c| c == z).then_some(z)
    }

    /// 0-based rows holding a star in 0-based column `col`.
    pub fn star_rows(&self, col: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.is_star(r, col)).collect()
    }

    pub fn to_cells(&self) -> CellArray {
        CellArray {
            rows: self.rows,
            cols: self.cols,
            cells: self
                .stars
                .iter()
                .map(|&s| if s { Cell::Star } else { Cell::Null })
                .collect(),
        }
    }
}

impl StarGrid for StarArray {
    fn n_rows(&self) -> usize {
        self.rows
    }
    fn n_cols(&self) -> usize {
        self.cols
    }
    fn is_star(&self, row: usize, col: usize) -> bool {
        self.stars[row * self.cols + col]
    }
}

impl fmt::Display for StarArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_cells().fmt(f)
    }
}

/// Replace every integer with null.
pub fn strip_to_stars(p: &Pda) -> StarArray {
    StarArray::from_fn(p.f(), p.k(), |r, c| p.is_star(r, c))
}

/// Positions (1-based, within `cols`) of the stars in row `row` restricted to
/// the ordered columns `cols`. `row` and `cols` are 1-based labels.
pub fn star_pattern<G: StarGrid + ?Sized>(
    grid: &G,
    row: usize,
    cols: &[usize],
) -> Result<Vec<usize>, PdaError> {
    if row == 0 || row > grid.n_rows() {
        return Err(PdaError::OutOfRange(format!(
            "row {row} not in [1, {}]",
            grid.n_rows()
        )));
    }
    if let Some(&c) = cols.iter().find(|&&c| c == 0 || c > grid.n_cols()) {
        return Err(PdaError::OutOfRange(format!(
            "column {c} not in [1, {}]",
            grid.n_cols()
        )));
    }
    Ok(cols
        .iter()
        .enumerate()
        .filter(|(_, &c)| grid.is_star(row - 1, c - 1))
        .map(|(j, _)| j + 1)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE1_B: &str = "*,*,1,2\n*,1,*,3\n*,2,3,*\n1,*,*,4\n2,*,4,*\n3,4,*,*\n";

    #[test]
    fn example1_b_is_a_regular_pda() {
        let a = CellArray::parse(EXAMPLE1_B).unwrap();
        let r = verify_pda(&a);
        assert!(r.valid, "{r:?}");
        assert_eq!((r.k, r.f, r.z, r.s), (4, 6, Some(3), 4));
        assert_eq!(r.regularity, Some(3));
    }

    #[test]
    fn example2_b_is_a_pda() {
        let a = CellArray::parse("*,*,1\n*,1,*\n1,*,*\n*,*,2\n*,2,*\n2,*,*\n*,3,4\n3,*,5\n4,5,*\n")
            .unwrap();
        let r = verify_pda(&a);
        assert!(r.valid);
        assert_eq!((r.k, r.f, r.z, r.s), (3, 9, Some(5), 5));
        assert_eq!(r.regularity, None);
    }

    #[test]
    fn same_row_violation() {
        let a = CellArray::from_rows(vec![
            vec![Cell::Int(1), Cell::Int(1)],
            vec![Cell::Star, Cell::Star],
        ])
        .unwrap();
        let r = verify_pda(&a);
        assert!(!r.valid);
        assert_eq!(
            r.violation,
            Some(PdaViolation::SameRow {
                s: 1,
                a: (1, 1),
                b: (1, 2)
            })
        );
    }

    #[test]
    fn other_violations() {
        let a = CellArray::parse("*,1\n1,-\n").unwrap();
        assert!(matches!(
            verify_pda(&a).violation,
            Some(PdaViolation::ColumnStarCount { col: 2, .. })
        ));
        let a = CellArray::parse("*,2\n2,*\n").unwrap();
        assert_eq!(verify_pda(&a).violation, Some(PdaViolation::MissingInteger(1)));
        let a = CellArray::parse("1,*\n1,*\n*,2\n*,2\n").unwrap();
        assert!(matches!(
            verify_pda(&a).violation,
            Some(PdaViolation::SameColumn { s: 1, .. })
        ));
        let a = CellArray::parse("*,1,-\n1,-,*\n-,*,-\n").unwrap();
        assert!(matches!(
            verify_pda(&a).violation,
            Some(PdaViolation::CornerNotStar { s: 1, .. })
        ));
        let a = CellArray::from_rows(vec![]).unwrap();
        assert_eq!(verify_pda(&a).violation, Some(PdaViolation::Empty));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(CellArray::parse("*,x\n"), Err(PdaError::BadCell("x".into())));
        assert_eq!(CellArray::parse("*,0\n"), Err(PdaError::BadCell("0".into())));
        assert_eq!(
            CellArray::parse("*,*\n*\n"),
            Err(PdaError::Ragged {
                row: 2,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            StarArray::parse("*,1\n"),
            Err(PdaError::IntegerInStarArray { row: 1, col: 2 })
        );
    }

    #[test]
    fn parser_trims_and_serializer_is_compact() {
        let a = CellArray::parse(" * , 12 ,- \n").unwrap();
        assert_eq!(a.to_string(), "*,12,-\n");
    }

    #[test]
    fn man_4_2_is_example1_b() {
        let p = man_pda(4, 2).unwrap();
        assert_eq!(p.to_string(), EXAMPLE1_B);
        assert_eq!((p.k(), p.f(), p.z(), p.s()), (4, 6, 3, 4));
    }

    #[test]
    fn man_small_cases() {
        assert_eq!(man_pda(2, 1).unwrap().to_string(), "*,1\n1,*\n");
        assert_eq!(man_pda(3, 1).unwrap().to_string(), "*,1,2\n1,*,3\n2,3,*\n");
        let full = man_pda(3, 3).unwrap();
        assert_eq!(full.to_string(), "*,*,*\n");
        assert_eq!(full.s(), 0);
        assert!(verify_pda(full.array()).valid);
        assert_eq!(man_pda(3, 0), Err(PdaError::ManParameters { kp: 3, t: 0 }));
        assert_eq!(man_pda(3, 4), Err(PdaError::ManParameters { kp: 3, t: 4 }));
    }

    #[test]
    fn man_pdas_verify_exhaustively() {
        for kp in 2..=8 {
            for t in 1..kp {
                let p = man_pda(kp, t).unwrap();
                let r = verify_pda(p.array());
                assert!(r.valid, "kp={kp} t={t}: {:?}", r.violation);
                assert_eq!(r.f as u128, binomial(kp as u64, t as u64));
                assert_eq!(r.z.unwrap() as u128, binomial(kp as u64 - 1, t as u64 - 1));
                assert_eq!(r.s as u128, binomial(kp as u64, t as u64 + 1));
                assert_eq!(r.regularity, Some(t + 1));
                for col in 0..kp {
                    let ints = (0..r.f).filter(|&row| !p.is_star(row, col)).count();
                    assert_eq!(r.z.unwrap() + ints, r.f);
                }
            }
        }
    }

    #[test]
    fn strip_keeps_star_counts() {
        let p = man_pda(6, 2).unwrap();
        let stars = strip_to_stars(&p);
        assert_eq!(stars.uniform_z(), Some(5));
        assert_eq!(stars.column_star_counts(), p.column_star_counts());
        assert_eq!(
            strip_to_stars(&man_pda(4, 2).unwrap()).to_string(),
            "*,*,-,-\n*,-,*,-\n*,-,-,*\n-,*,*,-\n-,*,-,*\n-,-,*,*\n"
        );
        let all = Pda::parse("*\n").unwrap();
        assert_eq!(strip_to_stars(&all).to_string(), "*\n");
    }

    #[test]
    fn star_patterns() {
        let p = strip_to_stars(&man_pda(6, 2).unwrap());
        assert_eq!(star_pattern(&p, 13, &[1, 4, 5, 6]).unwrap(), vec![2, 3]);
        assert_eq!(star_pattern(&p, 13, &[]).unwrap(), Vec::<usize>::new());
        assert!(star_pattern(&p, 16, &[1]).is_err());
        assert!(star_pattern(&p, 1, &[7]).is_err());
    }
}
