//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stopset::agcode::{
    generator_matrix, h_star, h_star_matrix, is_stopping_set_oracle, mds_distribution, min_distance_bruteforce,
    residue_generator, Distribution, EllipticCodeSpec, SupportProfile, DEFAULT_MAX_ROWS,
};
use stopset::curve::EllipticCurve;
use stopset::decoder::{peel, random_codeword, residual_is_stopping, ErasureInstance};
use stopset::ffield::{Field, FieldElement};
use stopset::groupcount::{
    closed_form_p_power, closed_form_two_power_terms, closed_form_two_primes, count_formula, count_s_m, AbelianGroup,
    SubsetSumTable,
};
use stopset::stoptheory::{distribution, enumerate_s_m, enumerate_s_m1, stopping_distance, CountSource};
use stopset::subsets::{combinations, IndexSet};
use stopset::verify::{all_curves, h_star_rows, residue_min_distance, verify_instance, verify_rs, Limits, Mismatch};

const ROW_BOUND: u64 = 1 << 17;

struct Outcome {
    failures: Vec<String>,
    note: String,
}

impl Outcome {
    fn new() -> Self {
        Self { failures: Vec::new(), note: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn report(id: u32, title: &str, budget: Option<Duration>, start: Instant, out: &Outcome) -> bool {
    let elapsed = start.elapsed();
    let late = budget.is_some_and(|b| elapsed > b);
    let ok = out.failures.is_empty() && !late;
    let budget_text = budget.map(|b| format!(" / budget {}s", b.as_secs())).unwrap_or_default();
    println!(
        "criterion {id:>2} {}: {title} [{:.2}s{budget_text}]{}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if out.note.is_empty() { String::new() } else { format!(" {}", out.note) }
    );
    if late {
        println!("    over time budget");
    }
    for f in out.failures.iter().take(10) {
        println!("    {f}");
    }
    if out.failures.len() > 10 {
        println!("    ... {} more", out.failures.len() - 10);
    }
    ok
}

fn example_spec() -> EllipticCodeSpec {
    let curve = EllipticCurve::over_prime(5, 1, 1).unwrap();
    let base = curve.parse_point("0,1").unwrap();
    EllipticCodeSpec::multiples_of(curve, &base, 3).unwrap()
}

fn sets(list: &[&[usize]]) -> Vec<IndexSet> {
    list.iter().map(|s| IndexSet::from_indices(s.iter().copied())).collect()
}

fn criterion_1() -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    let spec = example_spec();
    let curve = spec.curve();
    let points = curve.rational_points();
    out.check(points.len() == 9, || format!("{} rational points", points.len()));
    let s = curve.group_structure().unwrap();
    out.check((s.m1, s.m2) == (1, 9), || format!("structure ({}, {})", s.m1, s.m2));
    let s3 = enumerate_s_m(&spec, 24).unwrap();
    let expected = sets(&[&[1, 2, 6], &[1, 3, 5], &[2, 3, 4], &[3, 7, 8], &[4, 6, 8], &[5, 6, 7]]);
    out.check(s3 == expected, || format!("S(3) = {s3:?}"));
    let s4 = enumerate_s_m1(&spec, 24).unwrap();
    out.check(s4.len() == 40, || format!("#S(4) = {}", s4.len()));
    let golden = Distribution::from_u64(&[1, 0, 0, 6, 40, 56, 28, 8, 1]);
    for source in [CountSource::Enumerate, CountSource::Dp, CountSource::Formula] {
        let d = distribution(&spec, source, 24).unwrap();
        out.check(d == golden, || format!("{source:?} distribution {d}"));
    }
    let rows = h_star_rows(&spec, DEFAULT_MAX_ROWS).unwrap();
    let oracle = SupportProfile::from_rows(spec.n(), &rows).distribution().unwrap();
    out.check(oracle == golden, || format!("oracle distribution {oracle}"));
    let sd = stopping_distance(&spec).unwrap();
    out.check(sd == 3, || format!("stopping distance {sd}"));
    let d = min_distance_bruteforce(&residue_generator(&spec), DEFAULT_MAX_ROWS).unwrap();
    out.check(d == 3, || format!("minimum distance {d}"));
    report(1, "example curve over F_5", Some(Duration::from_secs(5)), start, &out)
}

/// Counts of every `(k, b)` by visiting each subset of `G \ {0}` once.
/// Subsets are split into a low half and a high half; each pair is visited.
fn exhaustive_counts(group: &AbelianGroup) -> Vec<Vec<u64>> {
    let n = group.order() as usize;
    let elements = group.elements();
    let add: Vec<Vec<u8>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| group.index_of(&group.add(a, b)) as u8).collect())
        .collect();
    let nonzero: Vec<usize> = (1..n).collect();
    let (low, high) = nonzero.split_at(nonzero.len() / 2);
    let half = |part: &[usize]| -> (Vec<u8>, Vec<u8>) {
        let mut ks = vec![0u8; 1 << part.len()];
        let mut sums = vec![0u8; 1 << part.len()];
        for mask in 1usize..1 << part.len() {
            let bit = mask.trailing_zeros() as usize;
            let prev = mask & (mask - 1);
            ks[mask] = ks[prev] + 1;
            sums[mask] = add[sums[prev] as usize][part[bit]];
        }
        (ks, sums)
    };
    let (low_k, low_s) = half(low);
    let (high_k, high_s) = half(high);
    let mut counts = vec![0u64; n * n];
    for (&hk, &hs) in high_k.iter().zip(&high_s) {
        let row = &add[hs as usize];
        let base = &mut counts[hk as usize * n..];
        for (&lk, &ls) in low_k.iter().zip(&low_s) {
            base[lk as usize * n + row[ls as usize] as usize] += 1;
        }
    }
    counts.chunks(n).map(<[u64]>::to_vec).collect()
}

fn all_groups_up_to(max: u64) -> Vec<AbelianGroup> {
    (1..=max).flat_map(stopset::verify::groups_of_order).collect()
}

fn criterion_2() -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    let groups = all_groups_up_to(32);
    let mut checked = 0u64;
    for group in &groups {
        let n = group.order();
        let exhaustive = exhaustive_counts(group);
        let table = SubsetSumTable::build(group, &group.nonzero_elements(), n as usize - 1).unwrap();
        for k in 0..n {
            for (bi, b) in group.elements().iter().enumerate() {
                let f = count_formula(group, k, b).unwrap();
                let d = table.get(k as usize, b);
                let e = BigUint::from(exhaustive[k as usize][bi]);
                checked += 1;
                out.check(f == d && d == e, || format!("{group} k={k} b=({b}): formula {f}, dp {d}, exhaustive {e}"));
            }
        }
    }
    out.note = format!("{} groups, {checked} (k, b) pairs", groups.len());
    report(2, "count formula = DP = exhaustive, |G| <= 32", Some(Duration::from_secs(60)), start, &out)
}

fn criterion_3() -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    let mut compare = |label: String, group: AbelianGroup, form: &dyn Fn(u64) -> BigInt| {
        for m in 1..group.order() {
            let expected = BigInt::from(count_s_m(&group, m).unwrap());
            let got = form(m);
            out.check(got == expected, || format!("{label} m={m}: closed form {got}, count {expected}"));
        }
    };
    for (p, t) in [(2u64, 2u32), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (2, 5), (7, 2), (2, 6)] {
        let group = AbelianGroup::cyclic(p.pow(t)).unwrap();
        compare(format!("Z/{p}^{t}"), group, &|m| closed_form_p_power(p, t, m).unwrap());
    }
    for (p, t1, t2) in [(2u64, 1u32, 2u32), (3, 1, 2), (2, 1, 3)] {
        let group = AbelianGroup::new(vec![p.pow(t1), p.pow(t2)]).unwrap();
        compare(format!("Z/{p}^{t1}+Z/{p}^{t2}"), group, &|m| closed_form_two_power_terms(p, t1, t2, m).unwrap());
    }
    for (p1, t1, p2, t2) in [(2u64, 1u32, 3u64, 1u32), (2, 2, 3, 1), (2, 1, 3, 2)] {
        let group = AbelianGroup::from_cyclic(&[p1.pow(t1), p2.pow(t2)]).unwrap();
        compare(format!("Z/{p1}^{t1}+Z/{p2}^{t2}"), group, &|m| closed_form_two_primes(p1, t1, p2, t2, m).unwrap());
    }
    report(3, "closed forms = count_S_m", Some(Duration::from_secs(30)), start, &out)
}

/// Curve instances of criteria 4, 5 and 8 with their mismatches.
struct CurveRun {
    instances: usize,
    mismatches: Vec<Mismatch>,
    elapsed: Duration,
}

fn run_curves() -> CurveRun {
    let start = Instant::now();
    let limits = Limits { max_rows: ROW_BOUND, ..Limits::default() };
    let mut instances = 0;
    let mut mismatches = Vec::new();
    for p in [5u64, 7] {
        for curve in all_curves(p) {
            let n = curve.rational_points().len() - 1;
            for m in 2..=4usize {
                if p.pow(m as u32) > ROW_BOUND || m >= n {
                    continue;
                }
                let spec = EllipticCodeSpec::all_minus_o(curve.clone(), m).unwrap();
                let rows = h_star_rows(&spec, ROW_BOUND).unwrap();
                mismatches.extend(verify_instance(&spec, &rows, &limits).unwrap());
                instances += 1;
            }
        }
    }
    CurveRun { instances, mismatches, elapsed: start.elapsed() }
}

fn curve_criterion(id: u32, title: &str, run: &CurveRun, checks: &[&str], budget: Option<Duration>) -> bool {
    let start = Instant::now() - run.elapsed;
    let mut out = Outcome::new();
    for m in run.mismatches.iter().filter(|m| checks.contains(&m.check.as_str())) {
        out.failures.push(format!("{} on {} {:?}: expected {}, found {}", m.check, m.instance, m.subset, m.expected, m.found));
    }
    out.note = format!("{} instances", run.instances);
    report(id, title, budget, start, &out)
}

fn criterion_6() -> (bool, usize) {
    let start = Instant::now();
    let mut out = Outcome::new();
    let mut instances = 0;
    for p in [5u64, 7] {
        let field = Field::prime(p).unwrap();
        for n in 2..=p as usize {
            for k in 1..n {
                if p.pow((n - k) as u32) > ROW_BOUND {
                    continue;
                }
                instances += 1;
                for m in verify_rs(&field, n, k, ROW_BOUND).unwrap() {
                    out.failures.push(format!("{} on {}: expected {}, found {}", m.check, m.instance, m.expected, m.found));
                }
                let expected = mds_distribution(n, k).unwrap();
                let t = expected.values();
                let shape_ok = (1..=n - k).all(|i| t[i] == BigUint::from(0u8))
                    && (n - k + 1..=n).all(|i| t[i] == BigUint::from(stopset::subsets::binomial_u64(n as u64, i as u64)));
                out.check(shape_ok, || format!("mds_distribution({n},{k}) = {expected}"));
            }
        }
    }
    out.note = format!("{instances} codes");
    (report(6, "RS codes over F_5, F_7: MDS stopping sets", Some(Duration::from_secs(120)), start, &out), instances)
}

fn criterion_7() -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    let spec = example_spec();
    let dual = generator_matrix(&spec);
    let rows: Vec<Vec<FieldElement>> = h_star(&dual, DEFAULT_MAX_ROWS).unwrap().collect();
    let mut blocking = enumerate_s_m(&spec, 24).unwrap();
    blocking.extend(enumerate_s_m1(&spec, 24).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let word = random_codeword(&residue_generator(&spec), &mut rng);
    let orders: Vec<Vec<Vec<FieldElement>>> = (0..10)
        .map(|seed| {
            let mut r = rows.clone();
            r.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            r
        })
        .collect();
    let mut tested = 0;
    for size in 0..=5 {
        for erased in combinations(spec.n(), size) {
            tested += 1;
            let inst = ErasureInstance::new(word.clone(), erased, &dual).unwrap();
            let base = peel(&rows, &inst, None).unwrap();
            let blocked = blocking.iter().any(|s| s.is_subset(erased));
            out.check(base.is_complete() != blocked, || format!("{erased}: complete = {}, blocked = {blocked}", base.is_complete()));
            if base.is_complete() {
                let values: Vec<_> = base.recovered.iter().map(|v| v.clone().unwrap()).collect();
                out.check(values == word, || format!("{erased}: wrong recovered values"));
            }
            out.check(residual_is_stopping(&rows, base.residual), || format!("{erased}: residual {} not stopping", base.residual));
            for (seed, order) in orders.iter().enumerate() {
                let r = peel(order, &inst, None).unwrap().residual;
                out.check(r == base.residual, || format!("{erased}: shuffle {seed} residual {r} vs {}", base.residual));
            }
        }
    }
    out.note = format!("{tested} erasure sets");
    report(7, "peeling decoder on the example", Some(Duration::from_secs(120)), start, &out)
}

fn criterion_8(run: &CurveRun, rs_instances: usize) -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    let spec = example_spec();
    let sd = stopping_distance(&spec).unwrap();
    let d = residue_min_distance(&spec, 1 << 20);
    out.check(sd == d, || format!("example: stopping distance {sd}, minimum distance {d}"));
    for m in run
        .mismatches
        .iter()
        .filter(|m| ["stopping-vs-min-distance", "stopping-distance-oracle", "mds-stopping-distance"].contains(&m.check.as_str()))
    {
        out.failures.push(format!("{} on {}: expected {}, found {}", m.check, m.instance, m.expected, m.found));
    }
    // The RS half is checked inside verify_rs (criterion 6); repeat it here for the record.
    for p in [5u64, 7] {
        let field = Field::prime(p).unwrap();
        for n in 2..=p as usize {
            for k in (1..n).filter(|k| p.pow((n - k) as u32) <= ROW_BOUND) {
                let rs = stopset::agcode::rs_code(&field, n, k).unwrap();
                let profile = SupportProfile::from_rows(n, h_star(&rs.null_space(), ROW_BOUND).unwrap());
                let d = min_distance_bruteforce(&rs, 1 << 20).unwrap();
                out.check(profile.stopping_distance() == Some(d), || {
                    format!("RS [{n},{k}] over F_{p}: s = {:?}, d = {d}", profile.stopping_distance())
                });
            }
        }
    }
    out.note = format!("1 + {} curve + {rs_instances} RS instances", run.instances);
    report(8, "stopping distance = minimum distance", None, start, &out)
}

fn stopping_family(rows: &[Vec<FieldElement>], n: usize, max_size: usize) -> BTreeSet<u64> {
    (0..=max_size)
        .flat_map(|k| combinations(n, k))
        .filter(|s| is_stopping_set_oracle(rows.iter().map(Vec::as_slice), *s))
        .map(IndexSet::mask)
        .collect()
}

fn criterion_9() -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    let spec = example_spec();
    let field = spec.field().clone();
    let h = h_star_matrix(&generator_matrix(&spec), DEFAULT_MAX_ROWS).unwrap();
    let base = stopping_family(h.rows(), spec.n(), 5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..5 {
        let scales: Vec<FieldElement> =
            (0..spec.n()).map(|_| field.from_index(rng.gen_range(1..field.order()))).collect();
        let scaled = h.scale_columns(&scales).unwrap();
        let family = stopping_family(scaled.rows(), spec.n(), 5);
        out.check(family == base, || format!("scaling {trial} changes the family"));
    }
    out.note = format!("{} stopping sets of size <= 5", base.len());
    report(9, "column scaling preserves stopping sets", None, start, &out)
}

fn criterion_10() -> bool {
    let start = Instant::now();
    let mut out = Outcome::new();
    let spec = example_spec();
    let rows = h_star_rows(&spec, DEFAULT_MAX_ROWS).unwrap();
    let full = SupportProfile::from_rows(spec.n(), &rows).distribution().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for trial in 0..20 {
        let keep = rng.gen_range(0..rows.len());
        let subset: Vec<_> = rows.choose_multiple(&mut rng, keep).cloned().collect();
        let partial = SupportProfile::from_rows(spec.n(), &subset).distribution().unwrap();
        let ok = partial.values().iter().zip(full.values()).all(|(a, b)| a >= b);
        out.check(ok, || format!("trial {trial} ({keep} rows): {partial} vs {full}"));
    }
    report(10, "row subsets only add stopping sets", None, start, &out)
}

fn main() {
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |id: u32| filter.is_empty() || filter.contains(&id);
    let mut ok = true;
    if wanted(1) {
        ok &= criterion_1();
    }
    if wanted(2) {
        ok &= criterion_2();
    }
    if wanted(3) {
        ok &= criterion_3();
    }
    let curves = (wanted(4) || wanted(5) || wanted(8)).then(run_curves);
    if let Some(run) = &curves {
        if wanted(4) {
            ok &= curve_criterion(
                4,
                "classify = H* oracle, all curves over F_5, F_7",
                run,
                &["classify-vs-oracle", "h-star-row-in-dual", "distribution", "distribution-formula", "distribution-dp"],
                Some(Duration::from_secs(600)),
            );
        }
        if wanted(5) {
            ok &= curve_criterion(
                5,
                "S+(m) structure and reverse recovery",
                run,
                &["s-plus-size", "s-plus-disjoint", "s-plus-union", "s-m1-vs-oracle", "reverse-recovery"],
                None,
            );
        }
    }
    let mut rs_instances = 0;
    if wanted(6) || wanted(8) {
        let (pass, count) = criterion_6();
        rs_instances = count;
        if wanted(6) {
            ok &= pass;
        }
    }
    if wanted(7) {
        ok &= criterion_7();
    }
    if let (true, Some(run)) = (wanted(8), &curves) {
        ok &= criterion_8(run, rs_instances);
    }
    if wanted(9) {
        ok &= criterion_9();
    }
    if wanted(10) {
        ok &= criterion_10();
    }
    if !ok {
        std::process::exit(1);
    }
}
