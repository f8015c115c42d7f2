//! Orbit counts via Burnside's lemma, the reduction ratio and ratio sweeps.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::combin::binomial;
use crate::grid::{GridError, Symmetry, SymmetryGroup};
use crate::partitions::{reduced_size, CaseTag, PartitionError};

/// Default bound on `m * n` for ratio sweeps (side length 22 squares).
pub const DEFAULT_SWEEP_CAP: usize = 484;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BurnsideError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("r = {r} exceeds the {cells} cells of the board")]
    TooManyBlocked { r: usize, cells: usize },
    #[error("{rows}x{cols} board exceeds the sweep cap of {cap} cells")]
    SweepTooLarge { rows: usize, cols: usize, cap: usize },
}

/// Cycle lengths of the cell permutation induced by `g`.
fn cycle_lengths(g: Symmetry, rows: usize, cols: usize) -> Result<Vec<usize>, GridError> {
    let perm = g.cell_permutation(rows, cols)?;
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        out.push(len);
    }
    Ok(out)
}

/// Coefficient `r` of the result is the number of boards with `r` blocked
/// cells fixed by `g`: a fixed board is a union of cycles of `g`.
pub fn fixed_count_polynomial(g: Symmetry, rows: usize, cols: usize) -> Result<Vec<BigUint>, GridError> {
    let area = rows * cols;
    let mut poly = vec![BigUint::zero(); area + 1];
    poly[0] = BigUint::one();
    let mut top = 0;
    for len in cycle_lengths(g, rows, cols)? {
        top += len;
        for s in (len..=top).rev() {
            let (lo, hi) = poly.split_at_mut(s);
            hi[0] += &lo[s - len];
        }
    }
    Ok(poly)
}

/// `|B(m, n; r)^g|`, the number of boards fixed by `g`.
pub fn fixed_count(g: Symmetry, rows: usize, cols: usize, r: usize) -> Result<BigUint, GridError> {
    let poly = fixed_count_polynomial(g, rows, cols)?;
    Ok(poly.into_iter().nth(r).unwrap_or_default())
}

/// Orbit counts for every `r` in `0..=m*n` from one pass over the group.
pub fn orbit_counts(rows: usize, cols: usize) -> Result<Vec<BigUint>, BurnsideError> {
    let group = SymmetryGroup::of(rows, cols);
    let mut sums = vec![BigUint::zero(); rows * cols + 1];
    for &g in group.elements() {
        for (acc, f) in sums.iter_mut().zip(fixed_count_polynomial(g, rows, cols)?) {
            *acc += f;
        }
    }
    let order = BigUint::from(group.order());
    Ok(sums
        .into_iter()
        .map(|s| {
            let (q, rem) = s.div_rem(&order);
            assert!(rem.is_zero(), "Burnside sum not divisible by the group order");
            q
        })
        .collect())
}

/// `|O_G(B(m, n; r))|` from the generic fixed-set counts.
pub fn orbit_count(rows: usize, cols: usize, r: usize) -> Result<BigUint, BurnsideError> {
    check_r(rows, cols, r)?;
    let group = SymmetryGroup::of(rows, cols);
    let mut sum = BigUint::zero();
    for &g in group.elements() {
        sum += fixed_count(g, rows, cols, r)?;
    }
    let (q, rem) = sum.div_rem(&BigUint::from(group.order()));
    assert!(rem.is_zero(), "Burnside sum not divisible by the group order");
    Ok(q)
}

fn check_r(rows: usize, cols: usize, r: usize) -> Result<(), BurnsideError> {
    if rows == 0 || cols == 0 {
        return Err(GridError::ZeroDimension { rows, cols }.into());
    }
    if r > rows * cols {
        return Err(BurnsideError::TooManyBlocked { r, cells: rows * cols });
    }
    Ok(())
}

fn c(n: usize, k: usize) -> BigUint {
    binomial(n as u64, k as u64)
}

/// `C(n, num/den)`, zero unless the division is exact.
fn c_frac(n: usize, num: usize, den: usize) -> BigUint {
    if num.is_multiple_of(den) {
        c(n, num / den)
    } else {
        BigUint::zero()
    }
}

/// `Σ_t C(a, t) · C(b, (r - t)/2)` over `t` with `r - t` even.
fn mirror_sum(a: usize, b: usize, r: usize) -> BigUint {
    (0..=r.min(a)).filter(|t| (r - t).is_multiple_of(2)).map(|t| c(a, t) * c(b, (r - t) / 2)).sum()
}

fn exact_div(sum: BigUint, d: u32) -> BigUint {
    let (q, rem) = sum.div_rem(&BigUint::from(d));
    assert!(rem.is_zero(), "closed-form sum not divisible by {d}");
    q
}

/// The per-case closed-form orbit count.
pub fn orbit_count_closed_form(rows: usize, cols: usize, r: usize) -> Result<BigUint, BurnsideError> {
    check_r(rows, cols, r)?;
    let (m, n) = (rows, cols);
    let count = match CaseTag::for_dims(m, n) {
        CaseTag::SingleRowEven | CaseTag::SingleRowOdd => {
            let len = m.max(n);
            if len == 1 {
                c(1, r)
            } else if len % 2 == 0 {
                exact_div(c(len, r) + c_frac(len / 2, r, 2), 2)
            } else {
                exact_div(c(len, r) + c(len / 2, r / 2), 2)
            }
        }
        CaseTag::SquareEven => {
            let k = m / 2;
            let sum = c(4 * k * k, r)
                + c_frac(k * k, r, 4) * 2u32
                + c_frac(2 * k * k, r, 2) * 3u32
                + mirror_sum(2 * k, k * (2 * k - 1), r) * 2u32;
            exact_div(sum, 8)
        }
        CaseTag::SquareOdd => {
            let k = m / 2;
            let quarter = c_frac(k * (k + 1), r, 4) + if r >= 1 { c_frac(k * (k + 1), r - 1, 4) } else { BigUint::zero() };
            let sum = c((2 * k + 1) * (2 * k + 1), r)
                + quarter * 2u32
                + c(2 * k * (k + 1), r / 2)
                + mirror_sum(2 * k + 1, k * (2 * k + 1), r) * 4u32;
            exact_div(sum, 8)
        }
        CaseTag::RectEven => {
            let (k, l) = (m / 2, n / 2);
            exact_div(c(4 * k * l, r) + c_frac(2 * k * l, r, 2) * 3u32, 4)
        }
        CaseTag::RectOdd => {
            let (k, l) = (m / 2, n / 2);
            let sum = c((2 * k + 1) * (2 * l + 1), r)
                + c(2 * k * l + k + l, r / 2)
                + mirror_sum(2 * k + 1, 2 * k * l + l, r)
                + mirror_sum(2 * l + 1, 2 * k * l + k, r);
            exact_div(sum, 4)
        }
        CaseTag::RectMixed => {
            // Stated for 2k rows by 2l+1 columns; the transpose has the same count.
            let (even, odd) = if m % 2 == 0 { (m, n) } else { (n, m) };
            let (k, l) = (even / 2, odd / 2);
            let sum = c(2 * k * (2 * l + 1), r) + c_frac(k * (2 * l + 1), r, 2) * 2u32 + mirror_sum(2 * k, 2 * k * l, r);
            exact_div(sum, 4)
        }
    };
    Ok(count)
}

/// `R(m, n; r) = |reduced set| / |orbits|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioReport {
    pub rows: usize,
    pub cols: usize,
    pub r: usize,
    pub reduced_size: BigUint,
    pub orbit_count: BigUint,
    pub ratio: BigRational,
}

impl RatioReport {
    fn new(rows: usize, cols: usize, r: usize, reduced_size: BigUint, orbit_count: BigUint) -> RatioReport {
        let ratio = BigRational::new(reduced_size.clone().into(), orbit_count.clone().into());
        RatioReport { rows, cols, r, reduced_size, orbit_count, ratio }
    }

    /// The ratio rounded to `places` decimals.
    pub fn decimal(&self, places: usize) -> String {
        format_decimal(&self.ratio, places)
    }

    pub fn is_exact(&self) -> bool {
        self.reduced_size == self.orbit_count
    }

    pub fn to_f64(&self) -> f64 {
        self.ratio.to_f64().unwrap_or(f64::NAN)
    }
}

/// Rounds a nonnegative rational half-up to `places` decimals.
pub fn format_decimal(x: &BigRational, places: usize) -> String {
    let scale = num_bigint::BigInt::from(10u32).pow(places as u32);
    let scaled = (x * BigRational::from_integer(scale.clone())).round().to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    if places == 0 {
        return int.to_string();
    }
    format!("{}.{:0>width$}", int, frac.to_string(), width = places)
}

pub fn ratio(rows: usize, cols: usize, r: usize) -> Result<RatioReport, BurnsideError> {
    check_r(rows, cols, r)?;
    let reduced = reduced_size(rows, cols, r)?;
    let orbits = orbit_count_closed_form(rows, cols, r)?;
    Ok(RatioReport::new(rows, cols, r, reduced, orbits))
}

/// One pass/fail line of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureCheck {
    pub name: String,
    pub passed: bool,
    /// Whether a failure contradicts a stated claim, as opposed to a case the
    /// sweep only reports on.
    pub asserted: bool,
    pub detail: String,
}

impl fmt::Display for ConjectureCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.passed, self.asserted) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "NOTE",
        };
        write!(f, "{status} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioSweep {
    pub rows: usize,
    pub cols: usize,
    pub reports: Vec<RatioReport>,
    pub checks: Vec<ConjectureCheck>,
}

impl RatioSweep {
    /// True when no asserted check failed.
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.passed || !c.asserted)
    }

    pub fn report(&self, r: usize) -> Option<&RatioReport> {
        self.reports.iter().find(|rep| rep.r == r)
    }
}

/// Ratios for `1 <= r <= r_max` (default `ceil(mn/2)`) and the checks that
/// apply to the board's family.
pub fn ratio_sweep(rows: usize, cols: usize, r_max: Option<usize>, cap: usize) -> Result<RatioSweep, BurnsideError> {
    check_r(rows, cols, 0)?;
    let area = rows * cols;
    if area > cap {
        return Err(BurnsideError::SweepTooLarge { rows, cols, cap });
    }
    let r_max = r_max.unwrap_or(area.div_ceil(2)).min(area);
    let orbits = orbit_counts(rows, cols)?;
    let mut reports = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let reduced = reduced_size(rows, cols, r)?;
        reports.push(RatioReport::new(rows, cols, r, reduced, orbits[r].clone()));
    }
    let checks = sweep_checks(rows, cols, &reports);
    Ok(RatioSweep { rows, cols, reports, checks })
}

fn strictly_decreasing(reports: &[&RatioReport]) -> Result<(), String> {
    for w in reports.windows(2) {
        if w[1].ratio >= w[0].ratio {
            return Err(format!(
                "R(r={}) = {} is not below R(r={}) = {}",
                w[1].r,
                w[1].decimal(4),
                w[0].r,
                w[0].decimal(4)
            ));
        }
    }
    Ok(())
}

fn rs(reports: &[&RatioReport]) -> String {
    reports.iter().map(|rep| rep.r.to_string()).collect::<Vec<_>>().join(",")
}

fn max_report(reports: &[RatioReport]) -> Option<&RatioReport> {
    reports.iter().fold(None, |best: Option<&RatioReport>, rep| match best {
        Some(b) if b.ratio >= rep.ratio => Some(b),
        _ => Some(rep),
    })
}

fn sweep_checks(rows: usize, cols: usize, reports: &[RatioReport]) -> Vec<ConjectureCheck> {
    let mut checks = Vec::new();
    let label = format!("{rows}x{cols}");
    let case = CaseTag::for_dims(rows, cols);
    let max = max_report(reports);
    let at = |r: usize| reports.iter().find(|rep| rep.r == r);
    match case {
        CaseTag::SquareEven => {
            let asserted = rows >= 8;
            for s in 0..4 {
                let seq: Vec<&RatioReport> = reports.iter().filter(|rep| rep.r % 4 == s).collect();
                let result = strictly_decreasing(&seq);
                checks.push(ConjectureCheck {
                    name: format!("{label} decreasing for r = {s} mod 4"),
                    passed: result.is_ok(),
                    asserted,
                    detail: result.err().unwrap_or_else(|| format!("r in [{}]", rs(&seq))),
                });
            }
            if let (Some(max), Some(r2)) = (max, at(2)) {
                checks.push(ConjectureCheck {
                    name: format!("{label} maximum at r = 2"),
                    passed: max.ratio <= r2.ratio,
                    asserted,
                    detail: format!("max R = {} at r = {}, R(r=2) = {}", max.decimal(4), max.r, r2.decimal(4)),
                });
            }
        }
        CaseTag::RectEven => {
            let small = matches!((rows.min(cols), rows.max(cols)), (2, 4) | (2, 6));
            let even: Vec<&RatioReport> = reports.iter().filter(|rep| rep.r % 2 == 0).collect();
            let result = strictly_decreasing(&even);
            checks.push(ConjectureCheck {
                name: format!("{label} decreasing over even r"),
                passed: result.is_ok(),
                asserted: !small,
                detail: result.err().unwrap_or_else(|| format!("r in [{}]", rs(&even))),
            });
            if let (Some(max), Some(r2)) = (max, at(2)) {
                checks.push(ConjectureCheck {
                    name: format!("{label} maximum at r = 2"),
                    passed: max.ratio <= r2.ratio,
                    asserted: !small,
                    detail: format!("max R = {} at r = {}, R(r=2) = {}", max.decimal(4), max.r, r2.decimal(4)),
                });
            }
            let odd: Vec<&RatioReport> = reports.iter().filter(|rep| rep.r % 2 == 1).collect();
            let bad: Vec<String> = odd.iter().filter(|rep| !rep.is_exact()).map(|rep| rep.r.to_string()).collect();
            checks.push(ConjectureCheck {
                name: format!("{label} exact at odd r"),
                passed: bad.is_empty(),
                asserted: true,
                detail: if bad.is_empty() {
                    format!("R = 1 for r in [{}]", rs(&odd))
                } else {
                    format!("R > 1 for r in [{}]", bad.join(","))
                },
            });
        }
        CaseTag::SingleRowEven if rows.max(cols) > 1 => {
            let odd: Vec<&RatioReport> = reports.iter().filter(|rep| rep.r % 2 == 1).collect();
            let bad: Vec<String> = odd.iter().filter(|rep| !rep.is_exact()).map(|rep| rep.r.to_string()).collect();
            checks.push(ConjectureCheck {
                name: format!("{label} exact at odd r"),
                passed: bad.is_empty(),
                asserted: true,
                detail: if bad.is_empty() {
                    format!("R = 1 for r in [{}]", rs(&odd))
                } else {
                    format!("R > 1 for r in [{}]", bad.join(","))
                },
            });
        }
        _ => {}
    }
    if rows != cols {
        if let Some(r1) = at(1) {
            checks.push(ConjectureCheck {
                name: format!("{label} exact at r = 1"),
                passed: r1.is_exact(),
                asserted: true,
                detail: format!("R(r=1) = {}", r1.decimal(4)),
            });
        }
    }
    if let Some(max) = max {
        checks.push(ConjectureCheck {
            name: format!("{label} maximum"),
            passed: true,
            asserted: false,
            detail: format!("max R = {} at r = {}", max.decimal(4), max.r),
        });
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::binomial;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn fixed_count_examples() {
        assert_eq!(fixed_count(Symmetry::R0, 6, 6, 7).unwrap(), binomial(36, 7));
        assert_eq!(fixed_count(Symmetry::R90, 6, 6, 8).unwrap(), big(36));
        assert_eq!(fixed_count(Symmetry::H, 3, 3, 2).unwrap(), big(6));
        assert!(fixed_count(Symmetry::R90, 3, 4, 2).is_err());
    }

    #[test]
    fn orbit_count_examples() {
        assert_eq!(orbit_count(3, 3, 2).unwrap(), big(8));
        assert_eq!(orbit_count(6, 6, 7).unwrap(), big(1_044_690));
        assert_eq!(orbit_count(8, 8, 4).unwrap(), big(79_920));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(orbit_count_closed_form(5, 7, 5).unwrap(), big(81_648));
        assert_eq!(orbit_count_closed_form(5, 5, 10).unwrap(), big(410_170));
        assert_eq!(orbit_count_closed_form(6, 7, 6).unwrap(), big(1_312_957));
        assert_eq!(orbit_count_closed_form(6, 8, 3).unwrap(), big(4_324));
    }

    #[test]
    fn closed_form_matches_generic_small() {
        for m in 1..=6 {
            for n in 1..=6 {
                let all = orbit_counts(m, n).unwrap();
                for r in 0..=m * n {
                    assert_eq!(orbit_count_closed_form(m, n, r).unwrap(), all[r], "{m}x{n} r={r}");
                }
            }
        }
    }

    #[test]
    fn decimals() {
        let x = BigRational::new(7.into(), 3.into());
        assert_eq!(format_decimal(&x, 4), "2.3333");
        let x = BigRational::new(2.into(), 3.into());
        assert_eq!(format_decimal(&x, 4), "0.6667");
        assert_eq!(format_decimal(&BigRational::from_integer(1.into()), 4), "1.0000");
        let x = BigRational::new(1.into(), 20000.into());
        assert_eq!(format_decimal(&x, 4), "0.0001");
    }

    #[test]
    fn ratio_examples() {
        assert!(ratio(6, 8, 3).unwrap().is_exact());
        assert_eq!(ratio(4, 4, 4).unwrap().decimal(2), "2.19");
        assert_eq!(ratio(4, 2, 4).unwrap().decimal(2), "1.41");
        for r in 1..=4 {
            assert!(ratio(2, 2, r).unwrap().is_exact());
        }
    }

    #[test]
    fn sweep_small_squares() {
        let s = ratio_sweep(6, 6, None, DEFAULT_SWEEP_CAP).unwrap();
        let max = max_report(&s.reports).unwrap();
        assert_eq!((max.r, max.decimal(2)), (4, "2.21".to_string()));
        let s = ratio_sweep(6, 2, None, DEFAULT_SWEEP_CAP).unwrap();
        let max = max_report(&s.reports).unwrap();
        assert_eq!((max.r, max.decimal(2)), (4, "1.47".to_string()));
        assert!(s.holds());
        assert!(matches!(ratio_sweep(30, 30, None, DEFAULT_SWEEP_CAP), Err(BurnsideError::SweepTooLarge { .. })));
    }
}
