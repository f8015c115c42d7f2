//! Binomial coefficients and ranking of k-subsets.
//!
//! `C(a, b)` is zero whenever `b < 0` or `b > a`; callers that evaluate
//! formulas with fractional arguments go through [`binomial_ratio`].

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, k)` as an exact big integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` for a signed lower argument; negative `k` gives zero.
pub fn binomial_signed(n: u64, k: i64) -> BigUint {
    if k < 0 {
        BigUint::zero()
    } else {
        binomial(n, k as u64)
    }
}

/// `C(n, num/den)`, zero unless `den` divides `num` exactly and the quotient
/// is in range.
pub fn binomial_ratio(n: u64, num: i64, den: i64) -> BigUint {
    if num < 0 || num % den != 0 {
        BigUint::zero()
    } else {
        binomial(n, (num / den) as u64)
    }
}

/// `C(n, k)` in machine integers, `None` on overflow.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc.checked_mul(n as u128 - i)? / (i + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Small Pascal triangle for repeated ranking work.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    size: usize,
    rows: Vec<u64>,
}

impl BinomialTable {
    /// Table covering `C(a, b)` for `0 <= a, b <= size`. Entries that would
    /// overflow saturate at `u64::MAX`.
    pub fn new(size: usize) -> Self {
        let w = size + 1;
        let mut rows = vec![0u64; w * w];
        for a in 0..=size {
            rows[a * w] = 1;
            for b in 1..=a {
                let up = rows[(a - 1) * w + b - 1];
                let left = if b < a { rows[(a - 1) * w + b] } else { 0 };
                rows[a * w + b] = up.saturating_add(left);
            }
        }
        BinomialTable { size, rows }
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u64 {
        if b > a || a > self.size {
            0
        } else {
            self.rows[a * (self.size + 1) + b]
        }
    }
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order, written into
/// `out` (ascending).
pub fn unrank_combination(table: &BinomialTable, n: usize, k: usize, mut rank: u64, out: &mut Vec<usize>) {
    out.clear();
    let mut next = 0;
    for slot in 0..k {
        let left = k - slot - 1;
        loop {
            let with_next = table.get(n - next - 1, left);
            if rank < with_next {
                break;
            }
            rank -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
}

/// Advance `combo` (ascending k-subset of `0..n`) to its lexicographic
/// successor. Returns `false` after the last subset, leaving `combo` reset to
/// the first one.
pub fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    for (j, c) in combo.iter_mut().enumerate() {
        *c = j;
    }
    false
}
