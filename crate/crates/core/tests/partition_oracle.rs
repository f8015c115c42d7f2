//! Brute-force checks of the board-partition reduction on small boards.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use tilecensus_core::burnside::orbit_count;
use tilecensus_core::combin::binomial;
use tilecensus_core::grid::{for_each_packed_subset, PackedPermuter};
use tilecensus_core::partitions::{
    admissible_partitions_in, all_partitions, boards_with_partition, partition_in,
    reduced_set, reduced_size, region_scheme, weighted_total, CaseTag, Counts, Region, RegionScheme,
};

fn region_masks(scheme: &RegionScheme) -> Vec<(usize, u64)> {
    Region::ALL
        .iter()
        .map(|&r| (r.index(), scheme.cells(r).iter().fold(0u64, |m, &i| m | 1 << i)))
        .filter(|&(_, m)| m != 0)
        .collect()
}

struct Sweep {
    reduced: u64,
    orbits_hit: usize,
}

/// Walks every board of `B(m, n; r)`, checking that equivalent admissible
/// boards share a partition.
fn sweep(m: usize, n: usize, r: usize) -> Sweep {
    let scheme = region_scheme(m, n).unwrap();
    let masks = region_masks(&scheme);
    let perms = PackedPermuter::for_group(m, n);
    let mut seen: HashMap<u64, Counts> = HashMap::new();
    let mut reduced = 0u64;
    for_each_packed_subset(m * n, r, |mask| {
        let mut counts = [0u32; 9];
        for &(i, rm) in &masks {
            counts[i] = (mask & rm).count_ones();
        }
        if !scheme.admits(&counts) {
            return;
        }
        reduced += 1;
        let canon = perms.canonical(mask);
        let prev = seen.entry(canon).or_insert(counts);
        assert_eq!(*prev, counts, "{m}x{n} r={r}: equivalent reduced boards with different partitions");
    });
    Sweep { reduced, orbits_hit: seen.len() }
}

#[test]
fn coverage_and_partition_equivalence_up_to_five() {
    for m in 1..=5 {
        for n in 1..=5 {
            for r in 0..=m * n {
                let s = sweep(m, n, r);
                let orbits = orbit_count(m, n, r).unwrap();
                assert_eq!(BigUint::from(s.orbits_hit), orbits, "{m}x{n} r={r}: some orbit has no reduced board");
                assert_eq!(BigUint::from(s.reduced), reduced_size(m, n, r).unwrap(), "{m}x{n} r={r}");
                assert!(BigUint::from(s.reduced) >= orbits);
            }
        }
    }
}

#[test]
fn coverage_on_wider_boards() {
    for (m, n, r) in [(6, 6, 3), (6, 6, 4), (5, 7, 3), (6, 7, 3), (7, 6, 3), (7, 7, 3), (2, 9, 5), (1, 11, 5), (6, 8, 2)] {
        let s = sweep(m, n, r);
        assert_eq!(BigUint::from(s.orbits_hit), orbit_count(m, n, r).unwrap(), "{m}x{n} r={r}");
    }
}

#[test]
fn streamed_reduced_set_matches_predicate() {
    for m in 1..=4 {
        for n in 1..=4 {
            for r in 0..=m * n {
                let scheme = region_scheme(m, n).unwrap();
                let mut from_stream: Vec<u64> = reduced_set(m, n, r).unwrap().map(|b| b.packed().unwrap()).collect();
                let mut from_filter = Vec::new();
                let masks = region_masks(&scheme);
                for_each_packed_subset(m * n, r, |mask| {
                    let mut counts = [0u32; 9];
                    for &(i, rm) in &masks {
                        counts[i] = (mask & rm).count_ones();
                    }
                    if scheme.admits(&counts) {
                        from_filter.push(mask);
                    }
                });
                from_stream.sort_unstable();
                from_filter.sort_unstable();
                assert_eq!(from_stream, from_filter, "{m}x{n} r={r}");
            }
        }
    }
}

#[test]
fn weighted_totals_recover_binomials() {
    for m in 1..=6 {
        for n in 1..=6 {
            for r in 0..=m * n {
                assert_eq!(weighted_total(m, n, r).unwrap(), binomial((m * n) as u64, r as u64), "{m}x{n} r={r}");
            }
        }
    }
}

#[test]
fn maximality_of_stabilizers() {
    for m in 1..=7 {
        for n in 1..=7 {
            let scheme = region_scheme(m, n).unwrap();
            for r in 0..=m * n {
                for class in admissible_partitions_in(&scheme, r as u32) {
                    let p = class.partition.counts();
                    for &g in scheme.group().elements() {
                        if class.stabilizer.contains(g) {
                            assert_eq!(&scheme.permute(g, p), p);
                        } else {
                            let image = scheme.permute(g, p);
                            assert_ne!(&image, p);
                            assert!(!scheme.admits(&image), "{m}x{n}: {g} maps {} to an admissible tuple", class.partition);
                        }
                    }
                    assert_eq!(class.weight as usize * class.stabilizer.order(), scheme.group().order());
                    assert!(class.stabilizer.is_closed());
                }
            }
        }
    }
}

#[test]
fn admissible_partitions_are_filtered_all_partitions() {
    for (m, n) in [(4, 4), (5, 5), (4, 6), (5, 7), (4, 5), (5, 4), (1, 6), (1, 7)] {
        let scheme = region_scheme(m, n).unwrap();
        for r in 0..=m * n {
            let want: Vec<Counts> =
                all_partitions(&scheme, r as u32).into_iter().map(|p| *p.counts()).filter(|c| scheme.admits(c)).collect();
            let got: Vec<Counts> =
                admissible_partitions_in(&scheme, r as u32).into_iter().map(|c| *c.partition.counts()).collect();
            assert_eq!(got, want, "{m}x{n} r={r}");
        }
    }
}

/// Every row of the per-case weight tables matching a tuple, in the
/// even-rows orientation for mixed boards. No match means the "all others"
/// row, the trivial stabilizer.
fn table_stabilizer(case: CaseTag, l: [u32; 4], d: [u32; 4]) -> Vec<&'static str> {
    let [l1, l2, l3, l4] = l;
    let [d1, d2, d3, d4] = d;
    let all_l = l1 == l2 && l2 == l3 && l3 == l4;
    let mut rows = Vec::new();
    let mut row = |cond: bool, k: &'static str| {
        if cond {
            rows.push(k);
        }
    };
    match case {
        CaseTag::SquareEven => {
            row(all_l, "D4");
            row(l1 == l3 && l3 > l2 && l2 == l4, "<D,D'>");
            row(l1 == l2 && l2 > l3 && l3 == l4, "<V>");
            row(l1 == l3 && l2 != l4, "<D'>");
            row(l2 == l4 && l1 != l3, "<D>");
        }
        CaseTag::SquareOdd => {
            row(all_l && d1 == d2 && d2 == d3 && d3 == d4, "D4");
            row(all_l && d1 == d2 && d2 > d3 && d3 == d4, "<D'>");
            row(all_l && d1 == d3 && d3 > d2 && d2 == d4, "<H,V>");
            row(all_l && d1 == d3 && d3 >= d2 && d2 > d4, "<H>");
            row(all_l && d1 > d3 && d2 == d4, "<V>");
            row(l1 == l3 && l3 > l2 && l2 == l4 && d1 == d2 && d2 == d3 && d3 == d4, "<D,D'>");
            row(l1 == l3 && l3 > l2 && l2 == l4 && d1 == d3 && d2 == d4 && d2 != d3, "<R180>");
            row(l1 == l2 && l2 > l3 && l3 == l4 && d2 == d4, "<V>");
            row(l1 == l3 && l2 != l4 && d1 == d2 && d3 == d4, "<D'>");
            row(l2 == l4 && l1 != l3 && d1 == d4 && d2 == d3, "<D>");
            // Rows missing from the printed table: diagonal symmetry with
            // l1 = l3 > l2 = l4 and unequal strips.
            row(l1 == l3 && l3 > l2 && l2 == l4 && d1 == d2 && d3 == d4 && d2 != d3, "<D'>");
            row(l1 == l3 && l3 > l2 && l2 == l4 && d1 == d4 && d2 == d3 && d1 != d2, "<D>");
        }
        CaseTag::RectEven => {
            row(all_l, "<H,V>");
            row(l1 == l2 && l2 > l3 && l3 == l4, "<V>");
            row(l1 == l3 && l3 > l2 && l2 == l4, "<R180>");
            row(l1 == l4 && l4 > l2 && l2 == l3, "<H>");
        }
        CaseTag::RectOdd => {
            row(all_l && d1 == d3 && d2 == d4, "<H,V>");
            row(l1 == l3 && l3 > l2 && l2 == l4 && d1 == d3 && d2 == d4, "<R180>");
            row(l1 == l2 && l3 == l4 && d2 == d4 && (l2 != l3 || d1 != d3), "<V>");
            // Printed as "if l2 = l3 then d2 != d4"; l2 = l3 always holds in
            // this row, so the exception only makes sense for l1 = l2.
            row(l1 == l4 && l2 == l3 && d1 == d3 && (l1 != l2 || d2 != d4), "<H>");
        }
        CaseTag::RectMixed => {
            row(all_l && d1 == d2, "<H,V>");
            row(all_l && d1 != d2, "<V>");
            row(l1 == l2 && l2 > l3 && l3 == l4, "<V>");
            row(l1 == l4 && l4 > l2 && l2 == l3 && d1 == d2, "<H>");
            // Missing from the printed table.
            row(l1 == l3 && l3 > l2 && l2 == l4 && d1 == d2, "<R180>");
        }
        CaseTag::SingleRowEven | CaseTag::SingleRowOdd => {
            row(l1 == l2, "<R180>");
        }
    }
    if rows.is_empty() {
        rows.push("<e>");
    }
    rows
}

#[test]
fn stabilizers_agree_with_weight_tables() {
    let mut mismatches = Vec::new();
    for m in 1..=7 {
        for n in 1..=7 {
            if m * n == 1 {
                continue;
            }
            let scheme: Arc<RegionScheme> = region_scheme(m, n).unwrap();
            for r in 0..=m * n {
                for class in admissible_partitions_in(&scheme, r as u32) {
                    let p = &class.partition;
                    let (mut l, d) = (p.lambda(), p.delta());
                    let mut name = class.stabilizer.name();
                    if p.case() == CaseTag::RectMixed && m % 2 == 1 {
                        l = [l[0], l[3], l[2], l[1]];
                        name = match name.as_str() {
                            "<H>" => "<V>".into(),
                            "<V>" => "<H>".into(),
                            _ => name,
                        };
                    }
                    let rows = table_stabilizer(p.case(), l, d);
                    if rows.len() != 1 || rows[0] != name {
                        mismatches.push(format!("{m}x{n} {p}: computed {name}, table {rows:?}"));
                    }
                }
            }
        }
    }
    assert!(mismatches.is_empty(), "{} mismatches:\n{}", mismatches.len(), mismatches.join("\n"));
}

#[test]
fn class_streams_partition_the_reduced_set() {
    let scheme = region_scheme(5, 5).unwrap();
    for class in admissible_partitions_in(&scheme, 4) {
        let n = boards_with_partition(&class.partition)
            .inspect(|b| assert_eq!(&partition_in(&scheme, b), &class.partition))
            .count();
        assert_eq!(BigUint::from(n), class.board_count);
    }
}
