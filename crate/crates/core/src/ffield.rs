//! Finite fields `F_q`, `q = p^k`, in a polynomial basis over `F_p`.
//!
//! Elements are packed as base-`p` integers: coefficient `c_i` of `t^i`
//! contributes `c_i * p^i`. Packing order doubles as the enumeration order,
//! so zero is always first and `F_p` enumerates as `0, 1, ..., p-1`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Largest field order accepted unless a caller asks for more.
pub const DEFAULT_MAX_Q: u64 = 1 << 20;

/// Fields up to this order take square roots by exhaustive search.
const EXHAUSTIVE_SQRT_LIMIT: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {q} exceeds the bound {max}")]
    TooLarge { q: u128, max: u64 },
    #[error("modulus must have {expected} coefficients (constant first, monic), got {got}")]
    ModulusShape { expected: usize, got: usize },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus coefficient {0} is not reduced mod p")]
    UnreducedCoefficient(u64),
    #[error("modulus is reducible over F_{0}")]
    Reducible(u64),
    #[error("no irreducible polynomial of degree {k} over F_{p}")]
    NoIrreducible { p: u64, k: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields ({0} and {1})")]
    Mismatch(String, String),
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// Parameters of `F_{p^k}`. `modulus` lists the `k + 1` coefficients of a
/// monic irreducible polynomial, constant term first; it is empty for `k = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    k: u32,
    modulus: Vec<u64>,
}

impl FieldSpec {
    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1, None)
    }

    /// Builds `F_{p^k}`. Without an explicit modulus, the lexicographically
    /// smallest monic irreducible polynomial (constant-first coefficient
    /// order) is chosen.
    pub fn new(p: u64, k: u32, modulus: Option<Vec<u64>>) -> Result<Self, FieldError> {
        Self::with_max_q(p, k, modulus, DEFAULT_MAX_Q)
    }

    pub fn with_max_q(
        p: u64,
        k: u32,
        modulus: Option<Vec<u64>>,
        max_q: u64,
    ) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if q > max_q as u128 || q > u32::MAX as u128 {
            return Err(FieldError::TooLarge { q, max: max_q });
        }
        if k == 1 {
            return match modulus {
                None => Ok(Self { p, k, modulus: Vec::new() }),
                Some(m) if m.is_empty() => Ok(Self { p, k, modulus: Vec::new() }),
                // A linear modulus t - c gives the same field; accept only monic.
                Some(m) => {
                    check_modulus_shape(p, 1, &m)?;
                    Ok(Self { p, k, modulus: Vec::new() })
                }
            };
        }
        let modulus = match modulus {
            Some(m) => {
                check_modulus_shape(p, k, &m)?;
                if !is_irreducible(p, &m) {
                    return Err(FieldError::Reducible(p));
                }
                m
            }
            None => smallest_irreducible(p, k).ok_or(FieldError::NoIrreducible { p, k })?,
        };
        Ok(Self { p, k, modulus })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }
}

fn check_modulus_shape(p: u64, k: u32, m: &[u64]) -> Result<(), FieldError> {
    if m.len() != k as usize + 1 {
        return Err(FieldError::ModulusShape { expected: k as usize + 1, got: m.len() });
    }
    if let Some(&c) = m.iter().find(|&&c| c >= p) {
        return Err(FieldError::UnreducedCoefficient(c));
    }
    if m[k as usize] != 1 {
        return Err(FieldError::NotMonic);
    }
    Ok(())
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            let m: Vec<String> = self.modulus.iter().map(u64::to_string).collect();
            write!(f, "{},{},{}", self.p, self.k, m.join("."))
        }
    }
}

/// Parses `p`, `p,k` or `p,k,c0.c1.....ck`.
impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Parse(s.to_string());
        let parts: Vec<&str> = s.trim().split(',').map(str::trim).collect();
        let p: u64 = parts[0].parse().map_err(|_| bad())?;
        let k: u32 = match parts.get(1) {
            Some(k) => k.parse().map_err(|_| bad())?,
            None => 1,
        };
        let modulus = match parts.get(2) {
            Some(m) => Some(
                m.split('.')
                    .map(|c| c.parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?,
            ),
            None => None,
        };
        if parts.len() > 3 {
            return Err(bad());
        }
        FieldSpec::new(p, k, modulus)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// Polynomials over F_p as constant-first coefficient vectors.

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(p: u64, a: &[u64], divisor: &[u64]) -> Vec<u64> {
    let divisor = poly_trim(divisor.to_vec());
    let dd = divisor.len() - 1;
    let lead_inv = pow_mod(divisor[dd], p - 2, p);
    let mut r = poly_trim(a.to_vec());
    while r.len() > dd {
        let shift = r.len() - 1 - dd;
        let factor = r[r.len() - 1] * lead_inv % p;
        for (i, &c) in divisor.iter().enumerate() {
            let t = factor * c % p;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Exhaustive trial division by every monic polynomial of degree `1..=k/2`.
fn is_irreducible(p: u64, modulus: &[u64]) -> bool {
    let k = modulus.len() - 1;
    for deg in 1..=k / 2 {
        let count = p.pow(deg as u32);
        for low in 0..count {
            let mut f = digits(low, p, deg);
            f.push(1);
            if poly_rem(p, modulus, &f).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u64, k: u32) -> Option<Vec<u64>> {
    let k = k as usize;
    let count = p.pow(k as u32);
    // Constant-first lexicographic order: the constant term is the most
    // significant digit of the counter.
    (0..count).find_map(|n| {
        let mut m = digits(n, p, k);
        m.reverse();
        m.push(1);
        is_irreducible(p, &m).then_some(m)
    })
}

fn digits(mut n: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(n % p);
        n /= p;
    }
    out
}

#[derive(Debug)]
struct FieldInner {
    spec: FieldSpec,
    q: u32,
}

/// Shared handle to a validated field. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Self {
        let q = spec.order() as u32;
        Field(Arc::new(FieldInner { spec, q }))
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Ok(Self::new(FieldSpec::prime(p)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn order(&self) -> u64 {
        self.0.q as u64
    }

    pub fn characteristic(&self) -> u64 {
        self.0.spec.p
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.0.spec.p as i64;
        self.wrap(n.rem_euclid(p) as u32)
    }

    /// Element with the given polynomial-basis coefficients, constant first.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement, FieldError> {
        let spec = &self.0.spec;
        if coeffs.len() != spec.k as usize {
            return Err(FieldError::Parse(format!("{coeffs:?}")));
        }
        let mut v = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= spec.p {
                return Err(FieldError::Parse(format!("{coeffs:?}")));
            }
            v = v * spec.p + c;
        }
        Ok(self.wrap(v as u32))
    }

    /// Element from its packed index in enumeration order.
    pub fn from_index(&self, index: u64) -> FieldElement {
        assert!(index < self.order(), "index {index} outside F_{}", self.order());
        self.wrap(index as u32)
    }

    pub(crate) fn wrap(&self, value: u32) -> FieldElement {
        FieldElement { field: self.clone(), value }
    }

    /// All `q` elements, zero first, in packed-index order.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.0.q).map(|v| self.wrap(v)).collect()
    }

    /// Parses an integer (reduced into the prime subfield) or a dotted
    /// constant-first coefficient list such as `1.2` for `1 + 2t`.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        let s = s.trim();
        if self.0.spec.k == 1 || !s.contains('.') {
            let n: i64 = s.parse().map_err(|_| FieldError::Parse(s.to_string()))?;
            return Ok(self.from_int(n));
        }
        let coeffs = s
            .split('.')
            .map(|c| c.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FieldError::Parse(s.to_string()))?;
        self.from_coeffs(&coeffs)
    }

    // Raw arithmetic on packed values.

    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        let spec = &self.0.spec;
        if spec.k == 1 {
            let s = a as u64 + b as u64;
            return (if s >= spec.p { s - spec.p } else { s }) as u32;
        }
        let (p, mut a, mut b) = (spec.p, a as u64, b as u64);
        let (mut out, mut place) = (0u64, 1u64);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out as u32
    }

    pub(crate) fn neg_raw(&self, a: u32) -> u32 {
        let spec = &self.0.spec;
        if spec.k == 1 {
            return if a == 0 { 0 } else { (spec.p - a as u64) as u32 };
        }
        let (p, mut a) = (spec.p, a as u64);
        let (mut out, mut place) = (0u64, 1u64);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out as u32
    }

    pub(crate) fn sub_raw(&self, a: u32, b: u32) -> u32 {
        self.add_raw(a, self.neg_raw(b))
    }

    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let spec = &self.0.spec;
        if spec.k == 1 {
            return (a as u64 * b as u64 % spec.p) as u32;
        }
        let (p, k) = (spec.p, spec.k as usize);
        let da = digits(a as u64, p, k);
        let db = digits(b as u64, p, k);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        let r = poly_rem(p, &prod, &spec.modulus);
        r.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
    }

    pub(crate) fn pow_raw(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, a);
            }
            a = self.mul_raw(a, a);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv_raw(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.pow_raw(a, self.order() - 2))
    }

    fn sqrt_raw(&self, a: u32) -> Vec<u32> {
        let q = self.order();
        if a == 0 {
            return vec![0];
        }
        if q > EXHAUSTIVE_SQRT_LIMIT && q % 4 == 3 {
            let r = self.pow_raw(a, (q + 1) / 4);
            if self.mul_raw(r, r) != a {
                return Vec::new();
            }
            let mut roots = vec![r, self.neg_raw(r)];
            roots.sort_unstable();
            return roots;
        }
        (0..q as u32).filter(|&x| self.mul_raw(x, x) == a).collect()
    }

    fn check(&self, other: &Field) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self.spec().to_string(), other.spec().to_string()))
        }
    }
}

/// An element of `F_q`. Comparison and ordering follow the packed index.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Packed index; also the position in [`Field::elements`].
    pub fn index(&self) -> u64 {
        self.value as u64
    }

    pub(crate) fn raw(&self) -> u32 {
        self.value
    }

    /// Polynomial-basis coefficients, constant first, length `k`.
    pub fn coeffs(&self) -> Vec<u64> {
        let spec = self.field.spec();
        digits(self.value as u64, spec.p, spec.k as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.field.check(&rhs.field)?;
        Ok(self.field.wrap(self.field.add_raw(self.value, rhs.value)))
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.field.check(&rhs.field)?;
        Ok(self.field.wrap(self.field.sub_raw(self.value, rhs.value)))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self, FieldError> {
        self.field.check(&rhs.field)?;
        Ok(self.field.wrap(self.field.mul_raw(self.value, rhs.value)))
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        self.field
            .inv_raw(self.value)
            .map(|v| self.field.wrap(v))
            .ok_or(FieldError::ZeroInverse)
    }

    /// `self^e`; negative exponents invert first. `0^0 = 1`.
    pub fn pow(&self, e: i64) -> Result<Self, FieldError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        Ok(self.field.wrap(self.field.pow_raw(base.value, e.unsigned_abs())))
    }

    /// Every `x` with `x^2 = self`, in ascending index order.
    pub fn sqrt(&self) -> Vec<Self> {
        self.field.sqrt_raw(self.value).into_iter().map(|v| self.field.wrap(v)).collect()
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && self.field == other.field
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.value.cmp(&other.value)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.spec().k == 1 {
            write!(f, "{}", self.value)
        } else {
            let c: Vec<String> = self.coeffs().iter().map(u64::to_string).collect();
            write!(f, "{}", c.join("."))
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// Operator forms panic on mixed-field operands; use the `try_*` methods
// where operands come from untrusted input.
macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("mixed-field arithmetic")
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.wrap(self.field.neg_raw(self.value))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}
