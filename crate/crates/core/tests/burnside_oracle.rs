//! Cross-checks of orbit counting and the reduction ratio.

use std::collections::HashSet;

use num_bigint::BigUint;
use tilecensus_core::burnside::{orbit_count, orbit_count_closed_form, orbit_counts, ratio, ratio_sweep, DEFAULT_SWEEP_CAP};
use tilecensus_core::grid::{brute_force_orbit_classes, for_each_packed_subset, PackedPermuter, DEFAULT_BRUTE_FORCE_CAP};
use tilecensus_core::partitions::reduced_size;

#[test]
fn closed_forms_match_cycle_counting_up_to_nine() {
    for m in 1..=9 {
        for n in 1..=9 {
            let generic = orbit_counts(m, n).unwrap();
            for r in 0..=m * n {
                assert_eq!(orbit_count_closed_form(m, n, r).unwrap(), generic[r], "{m}x{n} r={r}");
            }
            let r = (m * n).min(2);
            assert_eq!(orbit_count(m, n, r).unwrap(), generic[r]);
        }
    }
}

#[test]
fn orbit_counts_match_brute_force() {
    for m in 1..=5 {
        for n in 1..=5 {
            let perms = PackedPermuter::for_group(m, n);
            let counts = orbit_counts(m, n).unwrap();
            for r in 0..=m * n {
                let mut classes = HashSet::new();
                for_each_packed_subset(m * n, r, |mask| {
                    classes.insert(perms.canonical(mask));
                });
                assert_eq!(BigUint::from(classes.len()), counts[r], "{m}x{n} r={r}");
            }
        }
    }
    for (m, n, r) in [(3, 3, 2), (4, 4, 5), (3, 5, 4), (2, 6, 6)] {
        let classes = brute_force_orbit_classes(m, n, r, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(BigUint::from(classes.len()), orbit_count(m, n, r).unwrap());
    }
}

#[test]
fn complement_symmetry() {
    for m in 1..=7 {
        for n in 1..=7 {
            let counts = orbit_counts(m, n).unwrap();
            let area = m * n;
            for r in 0..=area {
                assert_eq!(counts[r], counts[area - r]);
                assert_eq!(reduced_size(m, n, r).unwrap(), reduced_size(m, n, area - r).unwrap(), "{m}x{n} r={r}");
            }
        }
    }
}

#[test]
fn exact_reduction_cases() {
    // Even non-square boards at odd r.
    for (m, n) in [(2, 4), (4, 2), (4, 6), (6, 8), (2, 10), (8, 4)] {
        for r in (1..=m * n).step_by(2) {
            assert!(ratio(m, n, r).unwrap().is_exact(), "{m}x{n} r={r}");
        }
    }
    // Single even row at odd r.
    for len in [2, 4, 6, 10] {
        for r in (1..=len).step_by(2) {
            assert!(ratio(1, len, r).unwrap().is_exact());
            assert!(ratio(len, 1, r).unwrap().is_exact());
        }
    }
    // One blocker on any non-square board.
    for m in 1..=8 {
        for n in 1..=8 {
            if m != n {
                assert!(ratio(m, n, 1).unwrap().is_exact(), "{m}x{n}");
            }
        }
    }
}

#[test]
fn ratio_at_least_one() {
    for m in 1..=8 {
        for n in 1..=8 {
            let orbits = orbit_counts(m, n).unwrap();
            for r in 0..=m * n {
                let reduced = reduced_size(m, n, r).unwrap();
                assert!(reduced >= orbits[r], "{m}x{n} r={r}");
            }
        }
    }
}

#[test]
fn small_sweeps_hold() {
    for (m, n) in [(2, 2), (4, 4), (6, 6), (4, 2), (6, 2), (2, 4), (6, 4), (8, 2), (1, 8), (5, 7)] {
        let s = ratio_sweep(m, n, None, DEFAULT_SWEEP_CAP).unwrap();
        assert!(s.holds(), "{m}x{n}: {:?}", s.checks);
    }
    let s = ratio_sweep(4, 4, None, DEFAULT_SWEEP_CAP).unwrap();
    let max = s.reports.iter().max_by(|a, b| a.ratio.cmp(&b.ratio)).unwrap();
    assert_eq!((max.r, max.decimal(2).as_str()), (4, "2.19"));
    assert!(s.reports.iter().all(|rep| rep.ratio <= max.ratio));
    for rep in ratio_sweep(2, 2, None, DEFAULT_SWEEP_CAP).unwrap().reports {
        assert!(rep.is_exact());
    }
}
