//! Cross-checks of the group-law characterisation against the definitional
//! `H*` oracle, instance by instance, with counterexample records.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::agcode::{
    generator_matrix, h_star, mds_distribution, min_distance_bruteforce, min_distance_from_parity_check,
    residue_generator, rs_code, CodeError, EllipticCodeSpec, SupportProfile,
};
use crate::curve::EllipticCurve;
use crate::ffield::{Field, FieldElement};
use crate::groupcount::{count_formula, AbelianGroup, SubsetSumTable};
use crate::stoptheory::{
    build_s_m_plus, distribution, distribution_from_count, enumerate_s_m, enumerate_s_m1, recover_s_m, Classifier,
    CountSource, TheoryError,
};
use crate::subsets::{binomial_u64, combinations, IndexSet};

/// Per-size cap on checked subsets before switching to random sampling.
pub const DEFAULT_SUBSET_CAP: u64 = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub check: String,
    pub instance: String,
    pub subset: Option<IndexSet>,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone)]
pub struct Limits {
    pub max_rows: u64,
    pub subset_cap: u64,
    pub seed: u64,
    /// Largest `n` for full subset sweeps and explicit `S(m)` lists.
    pub max_n: usize,
    /// Largest codeword count for brute-force minimum distance by enumeration.
    pub max_codewords: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_rows: 1 << 17, subset_cap: DEFAULT_SUBSET_CAP, seed: 0, max_n: 20, max_codewords: 1 << 20 }
    }
}

/// `k`-subsets of `[n]`: all of them, or `cap` distinct random ones.
pub fn subsets_capped(n: usize, k: usize, cap: u64, rng: &mut ChaCha8Rng) -> Vec<IndexSet> {
    if binomial_u64(n as u64, k as u64) <= cap {
        return combinations(n, k).collect();
    }
    let mut seen = HashSet::new();
    while (seen.len() as u64) < cap {
        seen.insert(IndexSet::from_indices(sample(rng, n, k).into_iter().map(|i| i + 1)));
    }
    let mut out: Vec<IndexSet> = seen.into_iter().collect();
    out.sort_by(IndexSet::lex_cmp);
    out
}

fn describe(spec: &EllipticCodeSpec) -> String {
    let c = spec.curve();
    format!("y^2 = x^3 + {}x + {} over F_{}, n = {}, m = {}", c.a(), c.b(), spec.field().spec(), spec.n(), spec.m())
}

/// Minimum distance of `C_Omega(D, mO)`: codeword enumeration when small,
/// otherwise the smallest dependent column set of the `C_L` generator.
pub fn residue_min_distance(spec: &EllipticCodeSpec, max_codewords: u64) -> usize {
    match min_distance_bruteforce(&residue_generator(spec), max_codewords) {
        Ok(d) => d,
        Err(_) => min_distance_from_parity_check(&generator_matrix(spec)).expect("n - m >= 1 gives a dependency"),
    }
}

/// Runs every check on one code, with `rows` standing in for `H*`.
pub fn verify_instance(
    spec: &EllipticCodeSpec,
    rows: &[Vec<FieldElement>],
    limits: &Limits,
) -> Result<Vec<Mismatch>, TheoryError> {
    let mut out = Vec::new();
    let instance = describe(spec);
    let mut miss = |check: &str, subset: Option<IndexSet>, expected: String, found: String| {
        out.push(Mismatch { check: check.into(), instance: instance.clone(), subset, expected, found });
    };
    let (n, m) = (spec.n(), spec.m());

    let residue = residue_generator(spec);
    for (r, row) in rows.iter().enumerate() {
        if !residue.annihilates(row) {
            miss("h-star-row-in-dual", None, "orthogonal to C_Omega".into(), format!("row {r} is not"));
        }
    }

    let profile = SupportProfile::from_rows(n, rows);
    let classifier = Classifier::new(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    for k in m - 1..=(m + 2).min(n) {
        for s in subsets_capped(n, k, limits.subset_cap, &mut rng) {
            let theory = classifier.classify(s);
            let oracle = profile.is_stopping(s);
            if theory.is_stopping() != oracle {
                miss("classify-vs-oracle", Some(s), format!("oracle stopping = {oracle}"), format!("{:?}", theory.verdict));
            }
        }
    }

    if n <= limits.max_n {
        let s_m = enumerate_s_m(spec, limits.max_n)?;
        let plus = build_s_m_plus(spec, &s_m)?;
        if plus.len() != (n - m) * s_m.len() {
            miss("s-plus-size", None, format!("{}", (n - m) * s_m.len()), format!("{}", plus.len()));
        }
        let s_m1 = enumerate_s_m1(spec, limits.max_n)?;
        let plus_set: HashSet<_> = plus.iter().collect();
        if s_m1.iter().any(|s| plus_set.contains(s)) {
            miss("s-plus-disjoint", None, "disjoint".into(), "overlap".into());
        }
        if (s_m1.len() + plus.len()) as u64 != binomial_u64(n as u64, m as u64 + 1) {
            miss("s-plus-union", None, binomial_u64(n as u64, m as u64 + 1).to_string(), (s_m1.len() + plus.len()).to_string());
        }
        for s in &s_m1 {
            if !profile.is_stopping(*s) {
                miss("s-m1-vs-oracle", Some(*s), "stopping".into(), "not stopping".into());
            }
        }
        if recover_s_m(spec, &plus)? != s_m {
            miss("reverse-recovery", None, format!("{} sets", s_m.len()), "different family".into());
        }

        let oracle_dist = profile.distribution()?;
        let theory_dist = distribution_from_count(n, m, &BigUint::from(s_m.len()));
        if oracle_dist != theory_dist {
            miss("distribution", None, oracle_dist.to_string(), theory_dist.to_string());
        }
        if let Ok(formula) = distribution(spec, CountSource::Formula, limits.max_n) {
            if formula != theory_dist {
                miss("distribution-formula", None, theory_dist.to_string(), formula.to_string());
            }
        }
        let dp = distribution(spec, CountSource::Dp, limits.max_n)?;
        if dp != theory_dist {
            miss("distribution-dp", None, theory_dist.to_string(), dp.to_string());
        }
    }

    let theory_sd = crate::stoptheory::stopping_distance(spec)?;
    let oracle_sd = profile.stopping_distance();
    let d = residue_min_distance(spec, limits.max_codewords);
    if oracle_sd != Some(theory_sd) {
        miss("stopping-distance-oracle", None, format!("{oracle_sd:?}"), theory_sd.to_string());
    }
    if d != theory_sd {
        miss("stopping-vs-min-distance", None, d.to_string(), theory_sd.to_string());
    }
    Ok(out)
}

/// `H*` of `C_Omega(D, mO)` collected into memory.
pub fn h_star_rows(spec: &EllipticCodeSpec, max_rows: u64) -> Result<Vec<Vec<FieldElement>>, CodeError> {
    Ok(h_star(&generator_matrix(spec), max_rows)?.collect())
}

/// Every nonsingular curve over `F_p`.
pub fn all_curves(p: u64) -> Vec<EllipticCurve> {
    (0..p as i64)
        .flat_map(|a| (0..p as i64).map(move |b| (a, b)))
        .filter_map(|(a, b)| EllipticCurve::over_prime(p, a, b).ok())
        .collect()
}

/// Checks the MDS stopping-set distribution of the RS `[n, k]` code.
pub fn verify_rs(field: &Field, n: usize, k: usize, max_rows: u64) -> Result<Vec<Mismatch>, CodeError> {
    let rs = rs_code(field, n, k)?;
    let dual = rs.null_space();
    let profile = SupportProfile::from_rows(n, h_star(&dual, max_rows)?);
    let instance = format!("RS [{n},{k}] over F_{}", field.spec());
    let mut out = Vec::new();
    let found = profile.distribution()?;
    let expected = mds_distribution(n, k)?;
    if found != expected {
        out.push(Mismatch { check: "mds-distribution".into(), instance: instance.clone(), subset: None, expected: expected.to_string(), found: found.to_string() });
    }
    let d = min_distance_bruteforce(&rs, max_rows.max(1 << 20))?;
    if profile.stopping_distance() != Some(d) || d != n - k + 1 {
        out.push(Mismatch {
            check: "mds-stopping-distance".into(),
            instance,
            subset: None,
            expected: format!("{}", n - k + 1),
            found: format!("s = {:?}, d = {d}", profile.stopping_distance()),
        });
    }
    Ok(out)
}

/// Formula against dynamic programme for every `k` and target.
pub fn verify_group(group: &AbelianGroup) -> Vec<Mismatch> {
    let n = group.order();
    let table = SubsetSumTable::build(group, &group.nonzero_elements(), n as usize - 1).expect("distinct elements");
    let mut out = Vec::new();
    for k in 0..n {
        for b in group.elements() {
            let f = count_formula(group, k, &b).expect("k < N");
            let d = table.get(k as usize, &b);
            if f != d {
                out.push(Mismatch {
                    check: "count-formula-vs-dp".into(),
                    instance: format!("Z/{group} k = {k} b = ({b})"),
                    subset: None,
                    expected: d.to_string(),
                    found: f.to_string(),
                });
            }
        }
    }
    out
}

/// Every invariant-factor shape of order `n`.
pub fn groups_of_order(n: u64) -> Vec<AbelianGroup> {
    // Each prime's exponent is split into a partition; combine across primes.
    fn partitions(e: u32, max: u32) -> Vec<Vec<u32>> {
        if e == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=e.min(max)).rev() {
            for mut rest in partitions(e - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut shapes: Vec<Vec<u64>> = vec![vec![]];
    for (p, e) in crate::groupcount::factorize(n) {
        let mut next = Vec::new();
        for shape in &shapes {
            for part in partitions(e, e) {
                let mut s = shape.clone();
                s.extend(part.iter().map(|&t| p.pow(t)));
                next.push(s);
            }
        }
        shapes = next;
    }
    let mut groups: Vec<AbelianGroup> =
        shapes.iter().map(|s| AbelianGroup::from_cyclic(s).expect("positive factors")).collect();
    groups.sort_by(|a, b| a.invariant_factors().len().cmp(&b.invariant_factors().len()).then(a.invariant_factors().cmp(b.invariant_factors())));
    groups.dedup();
    groups
}
