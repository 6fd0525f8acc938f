//! Algebraic-geometry codes on an elliptic curve with `G = mO`.
//!
//! The functional code `C_L(D, mO)` is the image of `L(mO)` under evaluation
//! at the points of `D`. The residue code `C_Omega(D, mO)` is its dual, so it
//! is materialised here as the null space of the `C_L` generator; Weil
//! differentials, residues `res_P(omega)`, the canonical divisor and the
//! effective-divisor description of stopping sets for general curves have no
//! counterpart in this crate.
//!
//! `H*`, the parity-check matrix whose rows are all nonzero codewords of the
//! dual code, has `q^m - 1` rows. It is streamed by [`Codewords`]; repeated
//! stopping-set queries go through [`SupportProfile`], which keeps only the
//! distinct row supports.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::curve::{CurveError, CurvePoint, EllipticCurve};
use crate::ffield::{Field, FieldElement};
use crate::groupcount::binomial;
use crate::subsets::{combinations, IndexSet, MAX_N};

/// Default cap on the number of streamed codewords (`q^m`).
pub const DEFAULT_MAX_ROWS: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("invalid code parameters: {0}")]
    InvalidSpec(String),
    #[error("{what} needs {count} items, above the bound {max}")]
    TooLarge { what: &'static str, count: u128, max: u64 },
    #[error("column scale factors must be nonzero (index {0})")]
    ZeroScale(usize),
    #[error("matrix dimensions do not match: {0}")]
    Shape(String),
}

/// The data `(E, D, m)` defining `C_Omega(D, mO)`.
#[derive(Debug, Clone)]
pub struct EllipticCodeSpec {
    curve: EllipticCurve,
    points: Vec<CurvePoint>,
    m: usize,
}

impl EllipticCodeSpec {
    pub fn new(curve: EllipticCurve, points: Vec<CurvePoint>, m: usize) -> Result<Self, CodeError> {
        let n = points.len();
        if n > MAX_N {
            return Err(CodeError::InvalidSpec(format!("length {n} exceeds {MAX_N}")));
        }
        if points.iter().any(CurvePoint::is_infinity) {
            return Err(CodeError::InvalidSpec("D must not contain the point at infinity".into()));
        }
        if let Some(p) = points.iter().find(|p| !curve.is_on_curve(p)) {
            return Err(CurveError::NotOnCurve(p.to_string()).into());
        }
        if points.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(CodeError::InvalidSpec("D has repeated points".into()));
        }
        if m == 0 || m >= n {
            return Err(CodeError::InvalidSpec(format!("need 0 < m < n, got m = {m}, n = {n}")));
        }
        Ok(Self { curve, points, m })
    }

    /// `D = E(F_q) \ {O}` in canonical point order.
    pub fn all_minus_o(curve: EllipticCurve, m: usize) -> Result<Self, CodeError> {
        let points = curve.rational_points().into_iter().skip(1).collect();
        Self::new(curve, points, m)
    }

    /// `D = ([1]P, [2]P, ..., [r-1]P)` where `r` is the order of `P`.
    pub fn multiples_of(curve: EllipticCurve, base: &CurvePoint, m: usize) -> Result<Self, CodeError> {
        let order = curve.point_order(base)?;
        let points = (1..order as i64).map(|i| curve.scalar_mul_unchecked(i, base)).collect();
        Self::new(curve, points, m)
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }

    pub fn field(&self) -> &Field {
        self.curve.field()
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    /// `P_i` for a 1-based index.
    pub fn point(&self, i: usize) -> &CurvePoint {
        &self.points[i - 1]
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// `x^i y^j` with pole order `2i + 3j` at `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Monomial {
    pub x_pow: u32,
    pub y_pow: u32,
}

impl Monomial {
    pub fn pole_order(self) -> u32 {
        2 * self.x_pow + 3 * self.y_pow
    }

    pub fn eval(self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        let xi = x.pow(self.x_pow as i64).expect("nonnegative exponent");
        let yj = y.pow(self.y_pow as i64).expect("nonnegative exponent");
        &xi * &yj
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.x_pow, self.y_pow) {
            (0, 0) => write!(f, "1"),
            (i, j) => {
                let x = match i {
                    0 => String::new(),
                    1 => "x".into(),
                    i => format!("x^{i}"),
                };
                write!(f, "{x}{}", if j == 1 { "y" } else { "" })
            }
        }
    }
}

/// Basis of `L(mO)`: `x^i y^j` with `j <= 1` and `2i + 3j <= m`, sorted by
/// pole order. Has exactly `m` elements for `m >= 1`.
pub fn rr_basis(m: usize) -> Result<Vec<Monomial>, CodeError> {
    if m == 0 {
        return Err(CodeError::InvalidSpec("L(mO) basis needs m >= 1".into()));
    }
    let m = m as u32;
    let mut out: Vec<Monomial> = (0..=1)
        .flat_map(|j| (0..=m / 2).map(move |i| Monomial { x_pow: i, y_pow: j }))
        .filter(|mono| mono.pole_order() <= m)
        .collect();
    out.sort_by_key(|mono| mono.pole_order());
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixRole {
    Generator,
    ParityCheck,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeMatrix {
    field: Field,
    role: MatrixRole,
    cols: usize,
    rows: Vec<Vec<FieldElement>>,
}

impl CodeMatrix {
    pub fn new(field: Field, role: MatrixRole, cols: usize, rows: Vec<Vec<FieldElement>>) -> Result<Self, CodeError> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(CodeError::Shape(format!("row {r} has {} entries, expected {cols}", row.len())));
            }
            if row.iter().any(|e| e.field() != &field) {
                return Err(CodeError::Shape(format!("row {r} has entries outside {}", field.spec())));
            }
        }
        Ok(Self { field, role, cols, rows })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    pub fn with_role(mut self, role: MatrixRole) -> Self {
        self.role = role;
        self
    }

    pub fn rows(&self) -> &[Vec<FieldElement>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    /// Entries as strings, row-major.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
    }

    fn rref(&self) -> (Vec<Vec<FieldElement>>, Vec<usize>) {
        let mut a = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(pr) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, pr);
            let inv = a[r][c].inv().expect("pivot is nonzero");
            a[r] = a[r].iter().map(|x| x * &inv).collect();
            for i in 0..a.len() {
                if i != r && !a[i][c].is_zero() {
                    let factor = a[i][c].clone();
                    let pivot_row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x = &*x - &(&factor * y);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == a.len() {
                break;
            }
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : M v^T = 0}` as the rows of a matrix with the opposite role.
    pub fn null_space(&self) -> CodeMatrix {
        let (reduced, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let zero = self.field.zero();
        let rows = free
            .iter()
            .map(|&f| {
                let mut v = vec![zero.clone(); self.cols];
                v[f] = self.field.one();
                for (row, &pc) in reduced.iter().zip(&pivots) {
                    v[pc] = -&row[f];
                }
                v
            })
            .collect();
        let role = match self.role {
            MatrixRole::Generator => MatrixRole::ParityCheck,
            MatrixRole::ParityCheck => MatrixRole::Generator,
        };
        CodeMatrix { field: self.field.clone(), role, cols: self.cols, rows }
    }

    /// Multiplies column `i` by `scales[i]`.
    pub fn scale_columns(&self, scales: &[FieldElement]) -> Result<CodeMatrix, CodeError> {
        if scales.len() != self.cols {
            return Err(CodeError::Shape(format!("{} scale factors for {} columns", scales.len(), self.cols)));
        }
        if let Some(i) = scales.iter().position(FieldElement::is_zero) {
            return Err(CodeError::ZeroScale(i));
        }
        let rows = self.rows.iter().map(|r| r.iter().zip(scales).map(|(x, a)| x * a).collect()).collect();
        Ok(CodeMatrix { rows, ..self.clone() })
    }

    /// Whether `v` is orthogonal to every row.
    pub fn annihilates(&self, v: &[FieldElement]) -> bool {
        self.rows.iter().all(|row| dot(row, v).is_zero())
    }

    /// All `q^rows` linear combinations of the rows, zero first.
    pub fn codewords(&self, max_rows: u64) -> Result<Codewords, CodeError> {
        let q = self.field.order() as u128;
        let count = q.checked_pow(self.rows.len() as u32).unwrap_or(u128::MAX);
        if count > max_rows as u128 {
            return Err(CodeError::TooLarge { what: "codeword enumeration", count, max: max_rows });
        }
        let basis = self.rows.iter().map(|r| r.iter().map(FieldElement::raw).collect()).collect();
        Ok(Codewords {
            field: self.field.clone(),
            basis,
            coeffs: vec![0; self.rows.len()],
            current: vec![0; self.cols],
            remaining: count as u64,
        })
    }
}

pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    let field = a.first().or(b.first()).map(|e| e.field().clone());
    match field {
        None => panic!("dot product of empty vectors has no field"),
        Some(f) => a.iter().zip(b).fold(f.zero(), |acc, (x, y)| &acc + &(x * y)),
    }
}

pub fn weight(v: &[FieldElement]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

pub fn support(v: &[FieldElement]) -> IndexSet {
    IndexSet::from_indices(v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, _)| i + 1))
}

/// Streams every codeword spanned by a basis, as a base-`q` counter over the
/// coefficient vector (first row least significant). Each step updates the
/// running codeword by the change in the touched coefficients only.
pub struct Codewords {
    field: Field,
    basis: Vec<Vec<u32>>,
    coeffs: Vec<u32>,
    current: Vec<u32>,
    remaining: u64,
}

impl Iterator for Codewords {
    type Item = Vec<FieldElement>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.current.iter().map(|&v| self.field.wrap(v)).collect();
        if self.remaining > 0 {
            let q = self.field.order() as u32;
            for (digit, row) in self.coeffs.iter_mut().zip(&self.basis) {
                let next = (*digit + 1) % q;
                let delta = self.field.sub_raw(next, *digit);
                for (c, &r) in self.current.iter_mut().zip(row) {
                    *c = self.field.add_raw(*c, self.field.mul_raw(delta, r));
                }
                *digit = next;
                if next != 0 {
                    break;
                }
            }
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

/// Generator of `C_L(D, mO)`: one row per basis function of `L(mO)`.
pub fn generator_matrix(spec: &EllipticCodeSpec) -> CodeMatrix {
    let basis = rr_basis(spec.m()).expect("m >= 1 by construction");
    let rows = basis
        .iter()
        .map(|mono| {
            spec.points()
                .iter()
                .map(|p| match p {
                    CurvePoint::Affine { x, y } => mono.eval(x, y),
                    CurvePoint::Infinity => unreachable!("O is excluded from D"),
                })
                .collect()
        })
        .collect();
    CodeMatrix { field: spec.field().clone(), role: MatrixRole::Generator, cols: spec.n(), rows }
}

/// Generator of the residue code `C_Omega(D, mO) = C_L(D, mO)^perp`.
pub fn residue_generator(spec: &EllipticCodeSpec) -> CodeMatrix {
    generator_matrix(spec).null_space().with_role(MatrixRole::Generator)
}

/// Every codeword of `C_L(D, mO)`; the nonzero ones are the rows of `H*`.
pub fn dual_rows(spec: &EllipticCodeSpec, max_rows: u64) -> Result<Codewords, CodeError> {
    generator_matrix(spec).codewords(max_rows)
}

/// Nonzero rows of `H*` for the code whose dual is spanned by `dual_generator`.
pub fn h_star(dual_generator: &CodeMatrix, max_rows: u64) -> Result<impl Iterator<Item = Vec<FieldElement>>, CodeError> {
    Ok(dual_generator.codewords(max_rows)?.filter(|r| weight(r) > 0))
}

/// `H*` collected into a parity-check matrix.
pub fn h_star_matrix(dual_generator: &CodeMatrix, max_rows: u64) -> Result<CodeMatrix, CodeError> {
    let rows = h_star(dual_generator, max_rows)?.collect();
    CodeMatrix::new(dual_generator.field().clone(), MatrixRole::ParityCheck, dual_generator.n_cols(), rows)
}

/// Definitional test: `S` is a stopping set iff no row restricted to `S` has
/// weight exactly one. The empty set always is.
pub fn is_stopping_set_oracle<I, R>(rows: I, set: IndexSet) -> bool
where
    I: IntoIterator<Item = R>,
    R: AsRef<[FieldElement]>,
{
    rows.into_iter().all(|row| (support(row.as_ref()).mask() & set.mask()).count_ones() != 1)
}

/// Distinct supports of the nonzero rows of a parity-check matrix. Stopping
/// sets depend on nothing else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportProfile {
    n: usize,
    supports: Vec<u64>,
}

impl SupportProfile {
    pub fn from_rows<I, R>(n: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[FieldElement]>,
    {
        let set: BTreeSet<u64> = rows.into_iter().map(|r| support(r.as_ref()).mask()).filter(|&m| m != 0).collect();
        Self { n, supports: set.into_iter().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn supports(&self) -> &[u64] {
        &self.supports
    }

    pub fn is_stopping(&self, set: IndexSet) -> bool {
        let s = set.mask();
        self.supports.iter().all(|&r| (r & s).count_ones() != 1)
    }

    /// `T_0..T_n` by checking every subset of `[n]`.
    pub fn distribution(&self) -> Result<Distribution, CodeError> {
        if self.n > 26 {
            return Err(CodeError::TooLarge { what: "subset sweep", count: 1u128 << self.n, max: 1 << 26 });
        }
        let mut t = vec![0u64; self.n + 1];
        for mask in 0..1u64 << self.n {
            if self.is_stopping(IndexSet::from_mask(mask)) {
                t[mask.count_ones() as usize] += 1;
            }
        }
        Ok(Distribution::new(t.into_iter().map(BigUint::from).collect()))
    }

    /// Size of the smallest nonempty stopping set, searching sizes upward.
    pub fn stopping_distance(&self) -> Option<usize> {
        (1..=self.n).find(|&k| combinations(self.n, k).any(|s| self.is_stopping(s)))
    }
}

/// Stopping-set distribution `T_0..T_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    t: Vec<BigUint>,
}

impl Distribution {
    pub fn new(t: Vec<BigUint>) -> Self {
        Self { t }
    }

    pub fn from_u64(t: &[u64]) -> Self {
        Self { t: t.iter().map(|&v| BigUint::from(v)).collect() }
    }

    pub fn values(&self) -> &[BigUint] {
        &self.t
    }

    pub fn n(&self) -> usize {
        self.t.len() - 1
    }

    /// Total number of stopping sets, the empty set included.
    pub fn total(&self) -> BigUint {
        self.t.iter().sum()
    }

    /// `i,T_i` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,T_i\n");
        for (i, v) in self.t.iter().enumerate() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.t.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Values that fit in `u64` are JSON numbers; larger ones are decimal strings.
impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.t.iter().map(big_json))
    }
}

pub(crate) fn big_json(v: &BigUint) -> serde_json::Value {
    match u64::try_from(v) {
        Ok(x) => serde_json::Value::from(x),
        Err(_) => serde_json::Value::from(v.to_string()),
    }
}

/// Minimum weight over all nonzero codewords spanned by `generator`.
pub fn min_distance_bruteforce(generator: &CodeMatrix, max_rows: u64) -> Result<usize, CodeError> {
    generator
        .codewords(max_rows)?
        .map(|c| weight(&c))
        .filter(|&w| w > 0)
        .min()
        .ok_or_else(|| CodeError::InvalidSpec("code has no nonzero codeword".into()))
}

/// Minimum distance of `{v : H v^T = 0}` as the size of the smallest linearly
/// dependent set of columns of `H`, searched by increasing size.
pub fn min_distance_from_parity_check(parity: &CodeMatrix) -> Option<usize> {
    let n = parity.n_cols();
    (1..=n).find(|&k| {
        combinations(n, k).any(|s| {
            let cols: Vec<Vec<FieldElement>> = s.iter().map(|j| parity.rows.iter().map(|r| r[j - 1].clone()).collect()).collect();
            let sub = CodeMatrix { field: parity.field.clone(), role: MatrixRole::ParityCheck, cols: parity.n_rows(), rows: cols };
            sub.rank() < k
        })
    })
}

/// Reed-Solomon generator on the first `n` field elements: rows `x^0..x^{k-1}`.
pub fn rs_code(field: &Field, n: usize, k: usize) -> Result<CodeMatrix, CodeError> {
    if n as u64 > field.order() {
        return Err(CodeError::InvalidSpec(format!("RS length {n} exceeds q = {}", field.order())));
    }
    if k == 0 || k >= n {
        return Err(CodeError::InvalidSpec(format!("need 0 < k < n, got k = {k}, n = {n}")));
    }
    let xs: Vec<FieldElement> = field.elements().into_iter().take(n).collect();
    let rows = (0..k as i64)
        .map(|i| xs.iter().map(|x| x.pow(i).expect("nonnegative exponent")).collect())
        .collect();
    CodeMatrix::new(field.clone(), MatrixRole::Generator, n, rows)
}

/// Stopping-set distribution of an `[n, k]` MDS code under `H*`:
/// `T_0 = 1`, zero through `n - k`, `C(n, i)` from `n - k + 1` on.
pub fn mds_distribution(n: usize, k: usize) -> Result<Distribution, CodeError> {
    if k == 0 || k >= n {
        return Err(CodeError::InvalidSpec(format!("need 0 < k < n, got k = {k}, n = {n}")));
    }
    let t = (0..=n)
        .map(|i| match i {
            0 => BigUint::from(1u32),
            i if i <= n - k => BigUint::from(0u32),
            i => binomial(n as u64, i as u64),
        })
        .collect();
    Ok(Distribution::new(t))
}
