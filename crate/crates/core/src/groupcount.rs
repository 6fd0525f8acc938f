//! Counting `k`-subsets of a finite abelian group with a prescribed sum.
//!
//! [`count_formula`] evaluates the exact Möbius-inversion formula for
//! `N(k, b, G \ {0})`; [`dp_count`] is an independent dynamic program over
//! `(element, chosen count, partial sum)` used as its oracle. The closed forms
//! specialise the formula to `Z/p^t`, `Z/p^t1 + Z/p^t2` and
//! `Z/p1^t1 + Z/p2^t2`.
//!
//! Deciding whether a `k`-subset with a given sum exists is NP-hard in
//! general (under RP-reductions for elliptic-curve groups); the formula only
//! applies when the candidate set is the whole group minus zero.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ffield::is_prime;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("invariant factors {0:?} do not form a divisibility chain")]
    NotChain(Vec<u64>),
    #[error("group factor must be positive")]
    ZeroFactor,
    #[error("element {0:?} does not belong to the group")]
    ForeignElement(Vec<u64>),
    #[error("subset size {k} out of range 0..={max}")]
    KOutOfRange { k: u64, max: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("duplicate element {0:?} in candidate list")]
    Duplicate(Vec<u64>),
    #[error("sum {0} is not divisible by the group order {1}")]
    Inexact(BigInt, u64),
    #[error("cannot parse group {0:?}")]
    Parse(String),
}

/// `Z/d1 + Z/d2 + ... + Z/dr` with `d1 | d2 | ... | dr`, all `d_i > 1`.
/// The trivial group has no factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<u64>,
}

impl GroupElement {
    pub fn new(coords: Vec<u64>) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "{}", c.join(","))
    }
}

impl AbelianGroup {
    /// From invariant factors; unit factors are dropped.
    pub fn new(factors: Vec<u64>) -> Result<Self, CountError> {
        if factors.contains(&0) {
            return Err(CountError::ZeroFactor);
        }
        let kept: Vec<u64> = factors.iter().copied().filter(|&d| d > 1).collect();
        if kept.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(CountError::NotChain(factors));
        }
        Ok(Self { factors: kept })
    }

    /// Direct sum of arbitrary cyclic groups, normalised to invariant factors.
    pub fn from_cyclic(orders: &[u64]) -> Result<Self, CountError> {
        if orders.contains(&0) {
            return Err(CountError::ZeroFactor);
        }
        // Prime-power parts grouped by prime, largest first.
        let mut by_prime: Vec<(u64, Vec<u64>)> = Vec::new();
        for &n in orders {
            for (p, e) in factorize(n) {
                let pp = p.pow(e);
                match by_prime.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, v)) => v.push(pp),
                    None => by_prime.push((p, vec![pp])),
                }
            }
        }
        let rank = by_prime.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let mut factors = vec![1u64; rank];
        for (_, mut powers) in by_prime {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (slot, pp) in powers.into_iter().enumerate() {
                factors[rank - 1 - slot] *= pp;
            }
        }
        Self::new(factors)
    }

    pub fn cyclic(n: u64) -> Result<Self, CountError> {
        Self::from_cyclic(&[n])
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(vec![0; self.factors.len()])
    }

    pub fn contains(&self, b: &GroupElement) -> bool {
        b.coords.len() == self.factors.len() && b.coords.iter().zip(&self.factors).all(|(c, d)| c < d)
    }

    fn check(&self, b: &GroupElement) -> Result<(), CountError> {
        if self.contains(b) {
            Ok(())
        } else {
            Err(CountError::ForeignElement(b.coords.clone()))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement::new(
            a.coords
                .iter()
                .zip(&b.coords)
                .zip(&self.factors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement::new(a.coords.iter().zip(&self.factors).map(|(x, d)| (d - x) % d).collect())
    }

    /// Mixed-radix position, first coordinate most significant.
    pub fn index_of(&self, b: &GroupElement) -> usize {
        b.coords.iter().zip(&self.factors).fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.factors.len()];
        for (slot, &d) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElement::new(coords)
    }

    /// All elements in index order, identity first.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order() as usize).map(|i| self.element_at(i)).collect()
    }

    /// Every element except the identity.
    pub fn nonzero_elements(&self) -> Vec<GroupElement> {
        self.elements().into_iter().skip(1).collect()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let c: Vec<String> = self.factors.iter().map(u64::to_string).collect();
        write!(f, "{}", c.join("x"))
    }
}

/// Parses `d1xd2x...`; factors need not form a chain.
impl FromStr for AbelianGroup {
    type Err = CountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let orders = s
            .split(['x', 'X'])
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CountError::Parse(s.to_string()))?;
        AbelianGroup::from_cyclic(&orders)
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn moebius(n: u64) -> i8 {
    assert!(n >= 1, "moebius of 0");
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `#G[d] = prod gcd(d, d_i)`.
pub fn torsion_count(group: &AbelianGroup, d: u64) -> u64 {
    group.factors.iter().map(|&f| d.gcd(&f)).product()
}

/// Whether `b = d*x` is solvable, decided per coordinate as `gcd(d, d_i) | b_i`.
pub fn is_divisible(group: &AbelianGroup, b: &GroupElement, d: u64) -> bool {
    b.coords.iter().zip(&group.factors).all(|(&c, &f)| c % d.gcd(&f) == 0)
}

/// Largest divisor `d` of `exp(G)` with `b` in `dG`.
pub fn e_of_b(group: &AbelianGroup, b: &GroupElement) -> Result<u64, CountError> {
    group.check(b)?;
    Ok(divisors(group.exponent())
        .into_iter()
        .filter(|&d| is_divisible(group, b, d))
        .max()
        .unwrap_or(1))
}

pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn sign(exp: u64) -> BigInt {
    if exp % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn exact_div(total: BigInt, n: u64) -> Result<BigInt, CountError> {
    let (quot, rem) = total.div_rem(&BigInt::from(n));
    if rem.is_zero() {
        Ok(quot)
    } else {
        Err(CountError::Inexact(total, n))
    }
}

/// Number of `k`-subsets of `G \ {0}` whose elements sum to `b`.
pub fn count_formula(group: &AbelianGroup, k: u64, b: &GroupElement) -> Result<BigUint, CountError> {
    let n = group.order();
    if k >= n {
        return Err(CountError::KOutOfRange { k, max: n - 1 });
    }
    let e = e_of_b(group, b)?;
    let mut total = BigInt::zero();
    for s in divisors(group.exponent()) {
        let inner: i128 = divisors(e.gcd(&s))
            .into_iter()
            .map(|d| moebius(s / d) as i128 * torsion_count(group, d) as i128)
            .sum();
        if inner == 0 {
            continue;
        }
        let term = BigInt::from(binomial(n / s - 1, k / s)) * BigInt::from(inner);
        total += sign(k + k / s) * term;
    }
    let count = exact_div(total, n)?;
    Ok(count.to_biguint().expect("subset counts are nonnegative"))
}

/// `#S(m)` for `D = G \ {O}`: the `b = O` instance of [`count_formula`].
pub fn count_s_m(group: &AbelianGroup, m: u64) -> Result<BigUint, CountError> {
    let n = group.order();
    if m == 0 || m >= n {
        return Err(CountError::KOutOfRange { k: m, max: n.saturating_sub(1) });
    }
    count_formula(group, m, &group.identity())
}

fn check_m(m: u64, order: u64) -> Result<(), CountError> {
    if m == 0 || m >= order {
        return Err(CountError::KOutOfRange { k: m, max: order - 1 });
    }
    Ok(())
}

fn check_prime(p: u64) -> Result<(), CountError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(CountError::InvalidParams(format!("{p} is not prime")))
    }
}

fn checked_pow(p: u64, t: u32) -> Result<u64, CountError> {
    p.checked_pow(t).ok_or_else(|| CountError::InvalidParams(format!("{p}^{t} overflows")))
}

fn pow_i(p: u64, t: u32) -> BigInt {
    BigInt::from(p).pow(t)
}

fn into_count(value: BigInt) -> Result<BigInt, CountError> {
    if value.is_negative() {
        Err(CountError::InvalidParams(format!("closed form produced {value}")))
    } else {
        Ok(value)
    }
}

/// `#S(m)` for `P = Z/p^t`, general-`t` closed form.
pub fn closed_form_p_power(p: u64, t: u32, m: u64) -> Result<BigInt, CountError> {
    check_prime(p)?;
    if t == 0 {
        return Err(CountError::InvalidParams("t must be at least 1".into()));
    }
    let order = checked_pow(p, t)?;
    check_m(m, order)?;
    // floor(log_p m)
    let mut levels = 0u32;
    while p.pow(levels + 1) <= m {
        levels += 1;
    }
    let mut total = BigInt::from(binomial(order - 1, m));
    total += sign(m) * (pow_i(p, t) - pow_i(p, levels));
    for i in 1..=levels {
        let pi = p.pow(i);
        total += sign(m + m / pi)
            * (pow_i(p, i) - pow_i(p, i - 1))
            * BigInt::from(binomial(p.pow(t - i) - 1, m / pi));
    }
    into_count(exact_div(total, order)?)
}

/// `#S(m)` for `P = Z/p^t1 + Z/p^t2`, `1 <= t1 <= t2`.
pub fn closed_form_two_power_terms(p: u64, t1: u32, t2: u32, m: u64) -> Result<BigInt, CountError> {
    check_prime(p)?;
    if t1 == 0 || t1 > t2 {
        return Err(CountError::InvalidParams(format!("need 1 <= t1 <= t2, got t1={t1}, t2={t2}")));
    }
    let order = checked_pow(p, t1 + t2)?;
    check_m(m, order)?;
    let mut total = BigInt::from(binomial(order - 1, m));
    for i in 1..=t2 {
        let pi = p.pow(i);
        let weight = pow_i(p, i + i.min(t1)) - pow_i(p, i - 1 + (i - 1).min(t1));
        total += sign(m + m / pi) * BigInt::from(binomial(p.pow(t1 + t2 - i) - 1, m / pi)) * weight;
    }
    into_count(exact_div(total, order)?)
}

/// `#S(m)` for `P = Z/p1^t1 + Z/p2^t2` with distinct primes.
pub fn closed_form_two_primes(p1: u64, t1: u32, p2: u64, t2: u32, m: u64) -> Result<BigInt, CountError> {
    check_prime(p1)?;
    check_prime(p2)?;
    if p1 == p2 {
        return Err(CountError::InvalidParams("primes must be distinct".into()));
    }
    if t1 == 0 || t2 == 0 {
        return Err(CountError::InvalidParams("exponents must be at least 1".into()));
    }
    let (a, b) = (checked_pow(p1, t1)?, checked_pow(p2, t2)?);
    let order = a.checked_mul(b).ok_or_else(|| CountError::InvalidParams("order overflows".into()))?;
    check_m(m, order)?;
    let mut total = BigInt::from(binomial(order - 1, m));

    let mut mixed = BigInt::zero();
    for i in 1..=t1 {
        for j in 1..=t2 {
            let s = p1.pow(i) * p2.pow(j);
            mixed += sign(m + m / s)
                * pow_i(p1, i - 1)
                * pow_i(p2, j - 1)
                * BigInt::from(binomial(p1.pow(t1 - i) * p2.pow(t2 - j) - 1, m / s));
        }
    }
    total += BigInt::from((p1 - 1) * (p2 - 1)) * mixed;

    for i in 1..=t1 {
        let s = p1.pow(i);
        total += sign(m + m / s)
            * BigInt::from(binomial(p1.pow(t1 - i) * b - 1, m / s))
            * (pow_i(p1, i) - pow_i(p1, i - 1));
    }
    for j in 1..=t2 {
        let s = p2.pow(j);
        total += sign(m + m / s)
            * BigInt::from(binomial(a * p2.pow(t2 - j) - 1, m / s))
            * (pow_i(p2, j) - pow_i(p2, j - 1));
    }
    into_count(exact_div(total, order)?)
}

/// `table[c][g]` = number of `c`-subsets of the candidate list summing to the
/// element with index `g`, for `c <= max_k`.
#[derive(Debug, Clone)]
pub struct SubsetSumTable {
    group: AbelianGroup,
    counts: Vec<Vec<BigUint>>,
}

impl SubsetSumTable {
    pub fn build(group: &AbelianGroup, elements: &[GroupElement], max_k: usize) -> Result<Self, CountError> {
        let order = group.order() as usize;
        let mut seen = vec![false; order];
        let mut idx = Vec::with_capacity(elements.len());
        for e in elements {
            group.check(e)?;
            let i = group.index_of(e);
            if std::mem::replace(&mut seen[i], true) {
                return Err(CountError::Duplicate(e.coords.clone()));
            }
            idx.push(i);
        }
        // add_table[g][x] = index of g + x
        let all = group.elements();
        let shift: Vec<Vec<usize>> = idx
            .iter()
            .map(|&x| all.iter().map(|g| group.index_of(&group.add(g, &all[x]))).collect())
            .collect();

        let mut counts = vec![vec![BigUint::zero(); order]; max_k + 1];
        counts[0][0] = BigUint::one();
        for (processed, shift) in shift.iter().enumerate() {
            let top = max_k.min(processed + 1);
            for c in (1..=top).rev() {
                let (lower, upper) = counts.split_at_mut(c);
                let (src, dst) = (&lower[c - 1], &mut upper[0]);
                for (g, v) in src.iter().enumerate() {
                    if !v.is_zero() {
                        dst[shift[g]] += v;
                    }
                }
            }
        }
        Ok(Self { group: group.clone(), counts })
    }

    pub fn get(&self, k: usize, b: &GroupElement) -> BigUint {
        self.counts.get(k).map(|row| row[self.group.index_of(b)].clone()).unwrap_or_default()
    }
}

/// Number of `k`-subsets of `elements` summing to `b`, by dynamic programming.
pub fn dp_count(
    group: &AbelianGroup,
    elements: &[GroupElement],
    k: usize,
    b: &GroupElement,
) -> Result<BigUint, CountError> {
    group.check(b)?;
    if k > elements.len() {
        return Ok(BigUint::zero());
    }
    Ok(SubsetSumTable::build(group, elements, k)?.get(k, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(f: &[u64]) -> AbelianGroup {
        AbelianGroup::from_cyclic(f).unwrap()
    }

    fn el(c: &[u64]) -> GroupElement {
        GroupElement::new(c.to_vec())
    }

    /// Plain recursive enumeration of every subset.
    fn brute(group: &AbelianGroup, k: usize, b: &GroupElement) -> u64 {
        fn go(group: &AbelianGroup, els: &[GroupElement], k: usize, acc: GroupElement, b: &GroupElement) -> u64 {
            if k == 0 {
                return (&acc == b) as u64;
            }
            if els.len() < k {
                return 0;
            }
            go(group, &els[1..], k - 1, group.add(&acc, &els[0]), b) + go(group, &els[1..], k, acc, b)
        }
        go(group, &group.nonzero_elements(), k, group.identity(), b)
    }

    #[test]
    fn normalisation() {
        assert_eq!(g(&[4, 3]).invariant_factors(), &[12]);
        assert_eq!(g(&[2, 4]).invariant_factors(), &[2, 4]);
        assert_eq!(g(&[6, 4]).invariant_factors(), &[2, 12]);
        assert_eq!(g(&[1]).invariant_factors(), &[] as &[u64]);
        assert_eq!("2x4".parse::<AbelianGroup>().unwrap(), g(&[2, 4]));
        assert_eq!(AbelianGroup::new(vec![4, 2]), Err(CountError::NotChain(vec![4, 2])));
    }

    #[test]
    fn moebius_values() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(30), -1);
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(torsion_count(&g(&[9]), 3), 3);
        assert_eq!(torsion_count(&g(&[2, 4]), 1), 1);
        let g24 = g(&[2, 4]);
        let census = g24.elements().iter().filter(|x| g24.add(x, x) == g24.identity()).count() as u64;
        assert_eq!(census, 4);
        assert_eq!(torsion_count(&g24, 2), census);
    }

    #[test]
    fn e_of_b_examples() {
        assert_eq!(e_of_b(&g(&[9]), &el(&[0])).unwrap(), 9);
        assert_eq!(e_of_b(&g(&[9]), &el(&[3])).unwrap(), 3);
        // d*x = (0,2) in Z/2 + Z/4, checked by search over x.
        let g24 = g(&[2, 4]);
        let b = el(&[0, 2]);
        let solvable = |d: u64| {
            g24.elements().iter().any(|x| {
                let mut acc = g24.identity();
                for _ in 0..d {
                    acc = g24.add(&acc, x);
                }
                acc == b
            })
        };
        let expected = divisors(4).into_iter().filter(|&d| solvable(d)).max().unwrap();
        assert_eq!(expected, 2);
        assert_eq!(e_of_b(&g24, &b).unwrap(), 2);
        assert!(e_of_b(&g24, &el(&[2, 0])).is_err());
    }

    #[test]
    fn formula_examples() {
        let z9 = g(&[9]);
        assert_eq!(count_formula(&z9, 3, &z9.identity()).unwrap(), BigUint::from(6u32));
        assert_eq!(count_formula(&z9, 0, &z9.identity()).unwrap(), BigUint::one());
        assert_eq!(count_formula(&z9, 1, &z9.identity()).unwrap(), BigUint::zero());
        assert!(matches!(count_formula(&z9, 9, &z9.identity()), Err(CountError::KOutOfRange { .. })));
        assert_eq!(count_s_m(&z9, 3).unwrap(), BigUint::from(6u32));
        assert_eq!(count_s_m(&z9, 1).unwrap(), BigUint::zero());
        // (C(6,3) - 6) / 7 = 2
        assert_eq!(count_s_m(&g(&[7]), 3).unwrap(), BigUint::from(2u32));
        assert!(count_s_m(&z9, 0).is_err());
    }

    #[test]
    fn formula_dp_brute_small_groups() {
        for shape in [&[2][..], &[3], &[4], &[2, 2], &[6], &[8], &[2, 4], &[2, 2, 2], &[9], &[3, 3], &[12], &[2, 6]] {
            let group = g(shape);
            let n = group.order() as usize;
            let table = SubsetSumTable::build(&group, &group.nonzero_elements(), n - 1).unwrap();
            for k in 0..n {
                let mut total = BigUint::zero();
                for b in group.elements() {
                    let f = count_formula(&group, k as u64, &b).unwrap();
                    assert_eq!(f, table.get(k, &b), "{group} k={k} b={b}");
                    assert_eq!(f, BigUint::from(brute(&group, k, &b)), "{group} k={k} b={b}");
                    total += f;
                }
                assert_eq!(total, binomial(n as u64 - 1, k as u64));
            }
        }
    }

    #[test]
    fn dp_examples() {
        let z9 = g(&[9]);
        let els = z9.nonzero_elements();
        assert_eq!(dp_count(&z9, &els, 3, &z9.identity()).unwrap(), BigUint::from(6u32));
        assert_eq!(dp_count(&z9, &els[..2], 0, &z9.identity()).unwrap(), BigUint::one());
        assert_eq!(dp_count(&z9, &els[..2], 3, &z9.identity()).unwrap(), BigUint::zero());
        let dup = vec![els[0].clone(), els[0].clone()];
        assert!(matches!(dp_count(&z9, &dup, 1, &els[0]), Err(CountError::Duplicate(_))));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_p_power(3, 2, 3).unwrap(), BigInt::from(6));
        assert_eq!(closed_form_p_power(7, 1, 3).unwrap(), BigInt::from(2));
        let z6 = g(&[6]);
        assert_eq!(
            closed_form_two_primes(2, 1, 3, 1, 2).unwrap(),
            BigInt::from(count_s_m(&z6, 2).unwrap())
        );
        assert!(closed_form_p_power(4, 1, 2).is_err());
        assert!(closed_form_p_power(3, 2, 9).is_err());
        assert!(closed_form_two_power_terms(2, 2, 1, 3).is_err());
        assert!(closed_form_two_primes(3, 1, 3, 1, 2).is_err());
    }

    #[test]
    fn closed_forms_match_formula() {
        for (p, t) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (2, 6)] {
            let group = g(&[p.pow(t)]);
            for m in 1..group.order() {
                assert_eq!(
                    closed_form_p_power(p, t, m).unwrap(),
                    BigInt::from(count_s_m(&group, m).unwrap()),
                    "Z/{p}^{t} m={m}"
                );
            }
        }
        for (p, t1, t2) in [(2u64, 1u32, 1u32), (2, 1, 2), (2, 2, 2), (3, 1, 1), (3, 1, 2), (2, 1, 4)] {
            let group = g(&[p.pow(t1), p.pow(t2)]);
            for m in 1..group.order() {
                assert_eq!(
                    closed_form_two_power_terms(p, t1, t2, m).unwrap(),
                    BigInt::from(count_s_m(&group, m).unwrap())
                );
            }
        }
        for (p1, t1, p2, t2) in [(2u64, 1u32, 3u64, 1u32), (2, 2, 3, 1), (2, 1, 3, 2), (3, 1, 5, 1), (2, 3, 3, 1)] {
            let group = g(&[p1.pow(t1), p2.pow(t2)]);
            for m in 1..group.order() {
                assert_eq!(
                    closed_form_two_primes(p1, t1, p2, t2, m).unwrap(),
                    BigInt::from(count_s_m(&group, m).unwrap())
                );
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn formula_is_a_partition(shape in prop::sample::select(vec![vec![5u64], vec![2, 2], vec![10], vec![2, 8], vec![4, 4], vec![3, 6], vec![16]]), k in 0u64..16) {
                let group = g(&shape);
                let k = k % group.order();
                let total: BigUint = group.elements().iter().map(|b| count_formula(&group, k, b).unwrap()).sum();
                prop_assert_eq!(total, binomial(group.order() - 1, k));
            }

            #[test]
            fn index_roundtrip(shape in prop::sample::select(vec![vec![2u64, 6], vec![3, 3, 9], vec![7]]), i in 0usize..200) {
                let group = g(&shape);
                let i = i % group.order() as usize;
                prop_assert_eq!(group.index_of(&group.element_at(i)), i);
            }
        }
    }
}
