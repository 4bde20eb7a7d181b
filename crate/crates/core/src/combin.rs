//! Small combinatorics helpers: binomials and lexicographic k-subsets of `[n]`.
//!
//! Subsets are always sorted ascending and 1-based, matching how users, points
//! and rows are labelled throughout the crate.

/// `C(n, k)`, zero when `k > n`.
///
/// Panics on overflow of `u128`, which is far outside anything this crate
/// enumerates.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) at this point
        acc = acc
            .checked_mul((n - i) as u128)
            .expect("binomial overflow")
            / (i as u128 + 1);
    }
    acc
}

/// Iterator over the `k`-subsets of `[n]` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        // rightmost position that can still be incremented
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - (k - 1 - i) {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// All `k`-subsets of `[n]`, lexicographic. `k = 0` yields the single empty set.
pub fn subsets(n: usize, k: usize) -> Subsets {
    let current = if k <= n { Some((1..=k).collect()) } else { None };
    Subsets { n, current }
}

/// 1-based lexicographic rank of a sorted `k`-subset of `[n]`.
pub fn lex_rank(subset: &[usize], n: usize) -> usize {
    let k = subset.len();
    let mut rank: u128 = 0;
    let mut prev = 0;
    for (i, &a) in subset.iter().enumerate() {
        for j in prev + 1..a {
            rank += binomial((n - j) as u64, (k - i - 1) as u64);
        }
        prev = a;
    }
    rank as usize + 1
}

/// Every subset of `set`, grouped by nothing in particular: bitmask order.
pub fn power_set(set: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0u64..1 << set.len()).map(move |mask| {
        set.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}
