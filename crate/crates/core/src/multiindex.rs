//! Multi-indices and their graded enumeration.
//!
//! A [`MultiIndex`] is an exponent vector `α ∈ ℕⁿ`. The canonical order is
//! graded: first by degree `|α|`, then lexicographically *descending* inside a
//! degree, so that for `n = 2, m = 2` the order is `(2,0) < (1,1) < (0,2)`.
//! Every degree therefore occupies a contiguous range of a sorted table.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(alpha: Vec<u32>) -> Self {
        assert!(!alpha.is_empty(), "multi-index must have at least one entry");
        MultiIndex(alpha)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex::new(vec![0; n])
    }

    /// The unit index `e_j` (zero-based axis).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut alpha = vec![0; n];
        alpha[j] = 1;
        MultiIndex::new(alpha)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// `α!` as a float; only used for reporting.
    pub fn factorial(&self) -> f64 {
        self.0
            .iter()
            .map(|&a| (1..=a).map(f64::from).product::<f64>())
            .product()
    }

    /// `α - e_j`, or `None` when `α_j = 0`.
    pub fn lowered(&self, j: usize) -> Option<MultiIndex> {
        let mut alpha = self.0.clone();
        alpha[j] = alpha[j].checked_sub(1)?;
        Some(MultiIndex(alpha))
    }

    pub fn raised(&self, j: usize) -> MultiIndex {
        let mut alpha = self.0.clone();
        alpha[j] += 1;
        MultiIndex(alpha)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of dimension `n` and degree `m`, in graded-lex order.
pub fn enumerate(n: usize, m: u32) -> Vec<MultiIndex> {
    assert!(n >= 1, "dimension must be positive");
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut current, 0, m, &mut out);
    out
}

// First entries are assigned largest-first, which yields descending lex order.
fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        fill(current, pos + 1, remaining - a, out);
    }
}

/// All multi-indices of dimension `n` with degree at most `max_degree`.
pub fn enumerate_up_to(n: usize, max_degree: u32) -> Vec<MultiIndex> {
    (0..=max_degree).flat_map(|m| enumerate(n, m)).collect()
}

/// Number of monomials of degree `m` in `n` variables, `C(m+n-1, n-1)`.
pub fn monomial_count(n: usize, m: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::usage("dimension must be positive"));
    }
    let overflow = || Error::Overflow(format!("C({}+{}-1, {}-1)", m, n, n));
    let m = u64::from(m);
    let k = u64::try_from(n - 1).map_err(|_| overflow())?;
    // c_i = C(m+i, i), built incrementally; each step is exact.
    let mut c: u64 = 1;
    for i in 1..=k {
        let top = m.checked_add(i).ok_or_else(overflow)?;
        let g = c.gcd(&i);
        let reduced_c = c / g;
        let reduced_i = i / g;
        c = reduced_c
            .checked_mul(top / reduced_i)
            .ok_or_else(overflow)?;
    }
    Ok(c)
}
