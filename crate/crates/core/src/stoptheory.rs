//! Stopping sets of `C_Omega(D, mO)` on an elliptic curve under `H*`.
//!
//! With `O` outside `D`, a nonempty `A` subset of `[n]` is classified by size:
//!
//! * `|A| <= m - 1`: never stopping;
//! * `|A| = m`: stopping iff the points `P_j`, `j in A`, sum to `O`;
//! * `|A| = m + 1`: stopping iff no `A \ {i}` sums to `O`;
//! * `|A| >= m + 2`: always stopping.
//!
//! `S(m)` and `S(m+1)` denote the stopping sets of sizes `m` and `m + 1`, and
//! `S+(m)` the sets `A u {i}` with `A in S(m)`, `i not in A`. The union
//! defining `S+(m)` is disjoint and `S(m+1)` is exactly the complement of
//! `S+(m)` among the `(m+1)`-subsets, so the whole distribution follows from
//! `#S(m)`.
//!
//! Only `G = mO` is handled. A general `G` of degree `m` gives an equivalent
//! code (same stopping sets) after choosing a point `Q` outside `D` and
//! rescaling columns; that reduction is left to the caller.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::agcode::{CodeError, Distribution, EllipticCodeSpec};
use crate::curve::{CurveError, CurvePoint, EllipticCurve, GroupStructure};
use crate::groupcount::{binomial, count_s_m, AbelianGroup, CountError, GroupElement, SubsetSumTable};
use crate::subsets::{binomial_u64, combinations, IndexSet};

/// Largest `n` for which subset lists are enumerated by default.
pub const DEFAULT_MAX_ENUM_N: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("enumeration over n = {n} exceeds the bound n <= {max}")]
    TooLarge { n: usize, max: usize },
    #[error("D u {{O}} is not a subgroup; the closed-form count does not apply")]
    NotSubgroup,
    #[error("set {0} is produced twice while extending S(m)")]
    DuplicateExtension(IndexSet),
    #[error("{0} has no index j with P_j equal to its sum")]
    NoRecoveryIndex(IndexSet),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The empty set, a stopping set by convention.
    Empty,
    NotStoppingBySize,
    StoppingBySize,
    StoppingSumZero,
    NotStoppingSumNonzero,
    StoppingNoInteriorZero,
    NotStoppingInteriorZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StoppingStatus {
    pub verdict: Verdict,
    /// For [`Verdict::NotStoppingInteriorZero`]: the `i in A` with
    /// `sum_{j in A \ {i}} P_j = O`.
    pub witness: Option<usize>,
}

impl StoppingStatus {
    fn plain(verdict: Verdict) -> Self {
        Self { verdict, witness: None }
    }

    pub fn is_stopping(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::Empty | Verdict::StoppingBySize | Verdict::StoppingSumZero | Verdict::StoppingNoInteriorZero
        )
    }
}

/// Sums of points of `D` by the group law.
pub struct Classifier<'a> {
    spec: &'a EllipticCodeSpec,
}

impl<'a> Classifier<'a> {
    pub fn new(spec: &'a EllipticCodeSpec) -> Self {
        Self { spec }
    }

    fn curve(&self) -> &EllipticCurve {
        self.spec.curve()
    }

    pub fn sum(&self, set: IndexSet) -> CurvePoint {
        set.iter()
            .fold(CurvePoint::Infinity, |acc, i| self.curve().add_unchecked(&acc, self.spec.point(i)))
    }

    pub fn classify(&self, set: IndexSet) -> StoppingStatus {
        let m = self.spec.m();
        let size = set.len();
        if size == 0 {
            StoppingStatus::plain(Verdict::Empty)
        } else if size < m {
            StoppingStatus::plain(Verdict::NotStoppingBySize)
        } else if size >= m + 2 {
            StoppingStatus::plain(Verdict::StoppingBySize)
        } else if size == m {
            if self.sum(set).is_infinity() {
                StoppingStatus::plain(Verdict::StoppingSumZero)
            } else {
                StoppingStatus::plain(Verdict::NotStoppingSumNonzero)
            }
        } else {
            // Removing P_i leaves sum O exactly when P_i equals the total.
            let total = self.sum(set);
            match set.iter().find(|&i| self.spec.point(i) == &total) {
                Some(i) => StoppingStatus { verdict: Verdict::NotStoppingInteriorZero, witness: Some(i) },
                None => StoppingStatus::plain(Verdict::StoppingNoInteriorZero),
            }
        }
    }

    /// The `j in I` with `P_j = sum_{i in I} P_i`, if any.
    pub fn recovery_index(&self, set: IndexSet) -> Option<usize> {
        let total = self.sum(set);
        set.iter().find(|&i| self.spec.point(i) == &total)
    }
}

pub fn classify(spec: &EllipticCodeSpec, set: IndexSet) -> StoppingStatus {
    Classifier::new(spec).classify(set)
}

fn check_enum(spec: &EllipticCodeSpec, max_n: usize) -> Result<(), TheoryError> {
    if spec.n() > max_n {
        Err(TheoryError::TooLarge { n: spec.n(), max: max_n })
    } else {
        Ok(())
    }
}

/// `S(m)`: all `m`-subsets whose points sum to `O`, lexicographic.
pub fn enumerate_s_m(spec: &EllipticCodeSpec, max_n: usize) -> Result<Vec<IndexSet>, TheoryError> {
    check_enum(spec, max_n)?;
    let curve = spec.curve();
    let (n, m) = (spec.n(), spec.m());
    let mut out = Vec::new();
    // Depth-first over increasing indices, carrying the partial sum.
    let mut stack: Vec<(usize, IndexSet, CurvePoint)> = vec![(1, IndexSet::EMPTY, CurvePoint::Infinity)];
    while let Some((next, set, acc)) = stack.pop() {
        if set.len() == m {
            if acc.is_infinity() {
                out.push(set);
            }
            continue;
        }
        let need = m - set.len();
        for i in (next..=n + 1 - need).rev() {
            stack.push((i + 1, set.insert(i), curve.add_unchecked(&acc, spec.point(i))));
        }
    }
    Ok(out)
}

/// `S+(m)`, lexicographic. Fails if two extensions coincide.
pub fn build_s_m_plus(spec: &EllipticCodeSpec, s_m: &[IndexSet]) -> Result<Vec<IndexSet>, TheoryError> {
    let n = spec.n();
    let mut seen = HashSet::with_capacity(s_m.len() * (n - spec.m()));
    let mut out = Vec::with_capacity(seen.capacity());
    for &a in s_m {
        for i in (1..=n).filter(|&i| !a.contains(i)) {
            let ext = a.insert(i);
            if !seen.insert(ext) {
                return Err(TheoryError::DuplicateExtension(ext));
            }
            out.push(ext);
        }
    }
    out.sort_by(IndexSet::lex_cmp);
    Ok(out)
}

/// `S(m+1)` as the `(m+1)`-subsets outside `S+(m)`.
pub fn enumerate_s_m1(spec: &EllipticCodeSpec, max_n: usize) -> Result<Vec<IndexSet>, TheoryError> {
    let s_m = enumerate_s_m(spec, max_n)?;
    let plus: HashSet<IndexSet> = build_s_m_plus(spec, &s_m)?.into_iter().collect();
    Ok(combinations(spec.n(), spec.m() + 1).filter(|s| !plus.contains(s)).collect())
}

/// `S(m+1)` by testing every `(m+1)`-subset for an interior zero sum.
pub fn enumerate_s_m1_direct(spec: &EllipticCodeSpec, max_n: usize) -> Result<Vec<IndexSet>, TheoryError> {
    check_enum(spec, max_n)?;
    let classifier = Classifier::new(spec);
    Ok(combinations(spec.n(), spec.m() + 1).filter(|&s| classifier.classify(s).is_stopping()).collect())
}

/// Recovers `S(m)` from `S+(m)` by dropping from each `I` the index `j(I)`
/// with `P_{j(I)} = sum_{i in I} P_i`.
pub fn recover_s_m(spec: &EllipticCodeSpec, s_m_plus: &[IndexSet]) -> Result<Vec<IndexSet>, TheoryError> {
    let classifier = Classifier::new(spec);
    let mut out: Vec<IndexSet> = s_m_plus
        .iter()
        .map(|&set| {
            classifier
                .recovery_index(set)
                .map(|j| set.remove(j))
                .ok_or(TheoryError::NoRecoveryIndex(set))
        })
        .collect::<Result<HashSet<_>, _>>()?
        .into_iter()
        .collect();
    out.sort_by(IndexSet::lex_cmp);
    Ok(out)
}

/// `#S(m)` by a subset-sum dynamic program over `E(F_q)`, without listing sets.
pub fn count_s_m_dp(spec: &EllipticCodeSpec) -> Result<BigUint, TheoryError> {
    let structure = spec.curve().group_structure()?;
    let group = structure.abelian_group();
    let elements: Vec<GroupElement> = spec
        .points()
        .iter()
        .map(|p| structure.group_element(p).expect("points of D lie on the curve"))
        .collect();
    let table = SubsetSumTable::build(&group, &elements, spec.m())?;
    Ok(table.get(spec.m(), &group.identity()))
}

/// Invariant factors of `D u {O}` when it is closed under addition.
pub fn is_subgroup_minus_o(curve: &EllipticCurve, points: &[CurvePoint]) -> Option<AbelianGroup> {
    let mut all: Vec<CurvePoint> = vec![CurvePoint::Infinity];
    all.extend(points.iter().filter(|p| !p.is_infinity()).cloned());
    if all.iter().any(|p| !curve.is_on_curve(p)) {
        return None;
    }
    let members: HashSet<&CurvePoint> = all.iter().collect();
    if members.len() != all.len() {
        return None;
    }
    for p in &all {
        for q in &all {
            if !members.contains(&curve.add_unchecked(p, q)) {
                return None;
            }
        }
    }
    GroupStructure::discover(curve, &all).ok().map(|s| s.abelian_group())
}

/// Where `#S(m)` comes from when assembling a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountSource {
    /// List `S(m)` explicitly.
    Enumerate,
    /// Subset-sum dynamic program over the curve group.
    Dp,
    /// Closed-form count; needs `D u {O}` to be a subgroup.
    Formula,
}

/// `T_0 = 1`, zeros below `m`, `#S(m)`, `C(n, m+1) - (n - m) #S(m)`, then `C(n, i)`.
pub fn distribution_from_count(n: usize, m: usize, s_m: &BigUint) -> Distribution {
    let (n64, m64) = (n as u64, m as u64);
    let t = (0..=n)
        .map(|i| match i {
            0 => BigUint::from(1u32),
            i if i < m => BigUint::zero(),
            i if i == m => s_m.clone(),
            i if i == m + 1 => binomial(n64, m64 + 1) - BigUint::from(n64 - m64) * s_m,
            i => binomial(n64, i as u64),
        })
        .collect();
    Distribution::new(t)
}

pub fn s_m_count(spec: &EllipticCodeSpec, source: CountSource, max_n: usize) -> Result<BigUint, TheoryError> {
    match source {
        CountSource::Enumerate => Ok(BigUint::from(enumerate_s_m(spec, max_n)?.len())),
        CountSource::Dp => count_s_m_dp(spec),
        CountSource::Formula => {
            let group = is_subgroup_minus_o(spec.curve(), spec.points()).ok_or(TheoryError::NotSubgroup)?;
            Ok(count_s_m(&group, spec.m() as u64)?)
        }
    }
}

pub fn distribution(spec: &EllipticCodeSpec, source: CountSource, max_n: usize) -> Result<Distribution, TheoryError> {
    let count = s_m_count(spec, source, max_n)?;
    Ok(distribution_from_count(spec.n(), spec.m(), &count))
}

/// `m` if some `m` points of `D` sum to `O`, else `m + 1`.
pub fn stopping_distance(spec: &EllipticCodeSpec) -> Result<usize, TheoryError> {
    let count = count_s_m_dp(spec)?;
    Ok(if count.is_zero() { spec.m() + 1 } else { spec.m() })
}

#[derive(Debug, Clone)]
pub struct StoppingReport {
    pub spec: EllipticCodeSpec,
    /// Listed only when `C(n, m)` stays within the listing bound.
    pub s_m: Option<Vec<IndexSet>>,
    pub s_m_count: BigUint,
    pub s_m1_count: BigUint,
    pub distribution: Distribution,
    pub stopping_distance: usize,
}

impl StoppingReport {
    /// Counts by dynamic programming; lists `S(m)` when `n <= max_n` and the
    /// list has at most `max_listed` members.
    pub fn compute(spec: &EllipticCodeSpec, max_n: usize, max_listed: usize) -> Result<Self, TheoryError> {
        let s_m_count = count_s_m_dp(spec)?;
        let s_m = if spec.n() <= max_n && s_m_count.to_usize().is_some_and(|c| c <= max_listed) {
            let listed = enumerate_s_m(spec, max_n)?;
            debug_assert_eq!(BigUint::from(listed.len()), s_m_count);
            Some(listed)
        } else {
            None
        };
        let distribution = distribution_from_count(spec.n(), spec.m(), &s_m_count);
        let s_m1_count = distribution.values()[spec.m() + 1].clone();
        let stopping_distance = if s_m_count.is_zero() { spec.m() + 1 } else { spec.m() };
        Ok(Self { spec: spec.clone(), s_m, s_m_count, s_m1_count, distribution, stopping_distance })
    }
}

/// Number of `m`-subsets, for sizing decisions.
pub fn subset_count(n: usize, k: usize) -> u64 {
    binomial_u64(n as u64, k as u64)
}
