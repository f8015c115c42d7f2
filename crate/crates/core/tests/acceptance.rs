//! Release gate: prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tilecensus_core::burnside::{orbit_count, orbit_count_closed_form, orbit_counts, ratio, ratio_sweep, DEFAULT_SWEEP_CAP};
use tilecensus_core::census::{run_census, CensusConfig, CensusReport};
use tilecensus_core::combin::binomial;
use tilecensus_core::grid::{
    apply_symmetry, brute_force_orbit_classes, for_each_packed_subset, symmetry_group_of, Board, PackedPermuter,
    DEFAULT_BRUTE_FORCE_CAP,
};
use tilecensus_core::partitions::{admissible_partitions, partition_board_count, region_scheme, weighted_total, Region};
use tilecensus_core::polyomino::{parse_pieces, preset, PieceSet};
use tilecensus_core::solver::{validate_tiling, Solver};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn counting_identities() -> Outcome {
    let mut cases = 0;
    for m in 1..=6 {
        for n in 1..=6 {
            for r in 0..=m * n {
                let w = weighted_total(m, n, r).map_err(|e| e.to_string())?;
                ensure(w == binomial((m * n) as u64, r as u64), || format!("{m}x{n} r={r}: weighted total {w}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (m,n,r) cases"))
}

fn orbit_cross_validation() -> Outcome {
    let mut cases = 0;
    for m in 1..=5 {
        for n in 1..=5 {
            let generic = orbit_counts(m, n).map_err(|e| e.to_string())?;
            for r in 0..=m * n {
                let closed = orbit_count_closed_form(m, n, r).map_err(|e| e.to_string())?;
                let brute = brute_force_orbit_classes(m, n, r, DEFAULT_BRUTE_FORCE_CAP).map_err(|e| e.to_string())?;
                ensure(closed == generic[r] && BigUint::from(brute.len()) == closed, || {
                    format!("{m}x{n} r={r}: closed {closed}, generic {}, brute {}", generic[r], brute.len())
                })?;
                cases += 1;
            }
        }
    }
    let spots = [(6, 6, 7, 1_044_690u64), (8, 8, 4, 79_920), (5, 7, 5, 81_648), (5, 5, 10, 410_170), (6, 7, 6, 1_312_957), (6, 8, 3, 4_324)];
    for (m, n, r, want) in spots {
        let got = orbit_count(m, n, r).map_err(|e| e.to_string())?;
        ensure(got == BigUint::from(want), || format!("({m},{n},{r}): {got}, expected {want}"))?;
    }
    Ok(format!("{cases} cases, {} spot values", spots.len()))
}

fn coverage_oracle() -> Outcome {
    let mut cases = 0;
    for m in 1..=5 {
        for n in 1..=5 {
            let scheme = region_scheme(m, n).map_err(|e| e.to_string())?;
            let masks: Vec<(usize, u64)> = Region::ALL
                .iter()
                .map(|&reg| (reg.index(), scheme.cells(reg).iter().fold(0u64, |acc, &i| acc | 1 << i)))
                .filter(|&(_, mask)| mask != 0)
                .collect();
            let perms = PackedPermuter::for_group(m, n);
            for r in 0..=m * n {
                let mut seen: HashMap<u64, [u32; 9]> = HashMap::new();
                let mut conflict = None;
                for_each_packed_subset(m * n, r, |mask| {
                    let mut counts = [0u32; 9];
                    for &(i, rm) in &masks {
                        counts[i] = (mask & rm).count_ones();
                    }
                    if scheme.admits(&counts) {
                        let prev = seen.entry(perms.canonical(mask)).or_insert(counts);
                        if *prev != counts && conflict.is_none() {
                            conflict = Some(mask);
                        }
                    }
                });
                ensure(conflict.is_none(), || format!("{m}x{n} r={r}: equivalent reduced boards with different partitions"))?;
                let orbits = orbit_count(m, n, r).map_err(|e| e.to_string())?;
                ensure(BigUint::from(seen.len()) == orbits, || {
                    format!("{m}x{n} r={r}: reduced set meets {} of {orbits} classes", seen.len())
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (m,n,r) cases"))
}

fn reduced_sizes() -> Outcome {
    let want = [(6, 6, 7, 1_521_054u64), (8, 8, 4, 175_516), (5, 7, 5, 89_278), (5, 5, 10, 467_376), (6, 8, 3, 4_324), (6, 7, 6, 1_556_344)];
    for (m, n, r, size) in want {
        let classes = admissible_partitions(m, n, r).map_err(|e| e.to_string())?;
        let total: BigUint = classes.iter().map(|c| partition_board_count(&c.partition)).sum();
        ensure(total == BigUint::from(size), || format!("({m},{n},{r}): {total}, expected {size}"))?;
    }
    Ok(format!("{} configurations", want.len()))
}

fn canonical_propositions() -> Outcome {
    let mut cases = 0;
    for m in 1..=12usize {
        for n in 1..=12usize {
            let area = m * n;
            let even_rect = m % 2 == 0 && n % 2 == 0 && m != n;
            let even_row = m.min(n) == 1 && area % 2 == 0;
            if even_rect || even_row {
                for r in (1..=area).step_by(2) {
                    let rep = ratio(m, n, r).map_err(|e| e.to_string())?;
                    ensure(rep.is_exact(), || format!("R({m},{n};{r}) = {}", rep.decimal(4)))?;
                    cases += 1;
                }
            }
            if m != n {
                let rep = ratio(m, n, 1).map_err(|e| e.to_string())?;
                ensure(rep.is_exact(), || format!("R({m},{n};1) = {}", rep.decimal(4)))?;
                cases += 1;
            }
        }
    }
    for (m, n, r, want) in [(4, 4, 4, "2.19"), (6, 6, 4, "2.21"), (4, 2, 4, "1.41"), (6, 2, 4, "1.47")] {
        let got = ratio(m, n, r).map_err(|e| e.to_string())?.decimal(2);
        ensure(got == want, || format!("R({m},{n};{r}) = {got}, expected {want}"))?;
    }
    Ok(format!("{cases} exact cases, 4 remarks"))
}

fn conjecture_sweeps() -> Outcome {
    let mut notes = Vec::new();
    let mut boards = Vec::new();
    for n in [8, 10, 12] {
        boards.push((n, n));
    }
    for m in (2..=60).step_by(2) {
        for n in (2..=60).step_by(2) {
            if m != n && m * n <= 120 && !matches!((m.min(n), m.max(n)), (2, 4) | (2, 6)) {
                boards.push((m, n));
            }
        }
    }
    for &(m, n) in &boards {
        let sweep = ratio_sweep(m, n, None, DEFAULT_SWEEP_CAP).map_err(|e| e.to_string())?;
        for c in &sweep.checks {
            if !c.passed {
                ensure(!c.asserted, || format!("{}: {}", c.name, c.detail))?;
                notes.push(c.name.clone());
            }
        }
    }
    Ok(format!("{} boards swept, {} report-only failures", boards.len(), notes.len()))
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn census_tier(configs: &[(usize, usize, usize, PieceSet, u64, u64)]) -> Outcome {
    let mut parts = Vec::new();
    let mut bad = Vec::new();
    for (m, n, r, pieces, reduced, weighted) in configs {
        let t = Instant::now();
        let rep = run_census(&CensusConfig::new(*m, *n, *r, pieces.clone()).jobs(jobs())).map_err(|e| e.to_string())?;
        let got = format!("({m},{n},{r}) {}/{} in {:.0}s", rep.reduced_unsolvable, rep.weighted_unsolvable, t.elapsed().as_secs_f64());
        if rep.weighted_total != binomial((m * n) as u64, *r as u64) {
            bad.push(format!("({m},{n},{r}): weighted total"));
        } else if rep.reduced_unsolvable != *reduced || rep.weighted_unsolvable != BigUint::from(*weighted) {
            bad.push(format!("{got}, expected {reduced}/{weighted}"));
        }
        parts.push(got);
    }
    ensure(bad.is_empty(), || format!("{}; all rows: {}", bad.join("; "), parts.join(", ")))?;
    Ok(format!("{}, {} worker(s)", parts.join(", "), jobs()))
}

fn pieces(text: &str) -> PieceSet {
    preset(text).unwrap_or_else(|| parse_pieces(text).expect("valid piece text"))
}

fn random_board(rng: &mut ChaCha8Rng, m: usize, n: usize, r: usize) -> Board {
    Board::from_indices(m, n, sample(rng, m * n, r)).expect("distinct cells")
}

fn report_text(rep: &CensusReport) -> String {
    let mut csv = Vec::new();
    rep.write_csv(&mut csv).expect("in-memory write");
    format!("{rep}\n{}\n{}", rep.summary_line(), String::from_utf8_lossy(&csv))
}

fn solver_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let tier = [(6, 8, 3, pieces("P:9")), (5, 7, 5, pieces("L-tromino:10"))];
    let mut solvers: Vec<Solver> = tier.iter().map(|(m, n, _, p)| Solver::new(*m, *n, p).expect("small board")).collect();

    let mut witnesses = 0;
    let mut tries = 0;
    while witnesses < 1000 {
        tries += 1;
        let k = rng.gen_range(0..tier.len());
        let (m, n, r, p) = &tier[k];
        let b = random_board(&mut rng, *m, *n, *r);
        if let Some(t) = solvers[k].solve(&b).map_err(|e| e.to_string())? {
            validate_tiling(&b, p, &t).map_err(|e| format!("{b:?}: {e}"))?;
            witnesses += 1;
        }
    }

    for _ in 0..1000 {
        let k = rng.gen_range(0..tier.len());
        let (m, n, r, _) = &tier[k];
        let b = random_board(&mut rng, *m, *n, *r);
        let group = symmetry_group_of(*m, *n);
        let g = group.elements()[rng.gen_range(0..group.order())];
        let img = apply_symmetry(g, &b).map_err(|e| e.to_string())?;
        let (a, c) = (solvers[k].solvable(&b), solvers[k].solvable(&img));
        ensure(a == c, || format!("{b:?} under {g}: {a:?} vs {c:?}"))?;
    }

    for (m, n, r, p) in &tier {
        let mut texts = Vec::new();
        for jobs in [1, 4, 8] {
            let cfg = CensusConfig::new(*m, *n, *r, p.clone()).jobs(jobs).shard_size(500);
            texts.push(report_text(&run_census(&cfg).map_err(|e| e.to_string())?));
        }
        ensure(texts.iter().all(|t| *t == texts[0]), || format!("({m},{n},{r}) reports differ across worker counts"))?;
    }
    Ok(format!("1000 witnesses valid ({tries} boards drawn), 1000 symmetry pairs agree, reports equal for 1/4/8 workers"))
}

fn main() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("counting identities", Box::new(counting_identities)),
        ("orbit-count cross-validation", Box::new(orbit_cross_validation)),
        ("reduced-set coverage and non-redundancy", Box::new(coverage_oracle)),
        ("reduced-set sizes", Box::new(reduced_sizes)),
        ("canonical-representation propositions", Box::new(canonical_propositions)),
        ("conjecture sweeps", Box::new(conjecture_sweeps)),
        (
            "fast census tier",
            Box::new(|| {
                census_tier(&[
                    (6, 8, 3, pieces("P:9"), 2_572, 10_288),
                    (5, 7, 5, pieces("L-tromino:10"), 68_252, 247_694),
                ])
            }),
        ),
        (
            "medium census tier",
            Box::new(|| {
                census_tier(&[
                    (5, 5, 10, pieces("i-pieces"), 459_652, 3_213_292),
                    (8, 8, 4, pieces("pentominoes-all"), 1_900, 9_552),
                ])
            }),
        ),
        (
            "long census tier",
            Box::new(|| {
                census_tier(&[
                    (6, 6, 7, pieces("genius-square"), 29_813, 172_440),
                    (6, 7, 6, pieces("tetrominoes-6x7"), 925_208, 3_137_062),
                ])
            }),
        ),
        ("solver properties", Box::new(solver_properties)),
    ];
    let filter: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if filter.as_ref().is_some_and(|f| !f.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{:.1}s]", t.elapsed().as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {why} [{:.1}s]", t.elapsed().as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
