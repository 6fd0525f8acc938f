//! Short Weierstrass curves `y^2 = x^3 + ax + b` over `F_q` with `char >= 5`.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::ffield::{Field, FieldElement, FieldError};
use crate::groupcount::{AbelianGroup, GroupElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("characteristic {0} is below 5; only short Weierstrass curves are supported")]
    SmallCharacteristic(u64),
    #[error("curve is singular (4a^3 + 27b^2 = 0)")]
    Singular,
    #[error("point {0} is not on the curve")]
    NotOnCurve(String),
    #[error("group structure inconsistent: {0}")]
    Structure(String),
    #[error("cannot parse point {0:?}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurvePoint {
    Infinity,
    Affine { x: FieldElement, y: FieldElement },
}

impl CurvePoint {
    pub fn affine(x: FieldElement, y: FieldElement) -> Self {
        CurvePoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CurvePoint::Infinity)
    }

    /// Coordinates as strings, `None` for the point at infinity.
    pub fn to_strings(&self) -> Option<[String; 2]> {
        match self {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { x, y } => Some([x.to_string(), y.to_string()]),
        }
    }
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "inf"),
            CurvePoint::Affine { x, y } => write!(f, "{x},{y}"),
        }
    }
}

impl fmt::Debug for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCurve {
    field: Field,
    a: FieldElement,
    b: FieldElement,
}

impl EllipticCurve {
    pub fn new(a: FieldElement, b: FieldElement) -> Result<Self, CurveError> {
        let field = a.field().clone();
        if field != *b.field() {
            return Err(FieldError::Mismatch(field.spec().to_string(), b.field().spec().to_string()).into());
        }
        let p = field.characteristic();
        if p < 5 {
            return Err(CurveError::SmallCharacteristic(p));
        }
        let disc = &(&field.from_int(4) * &a.pow(3)?) + &(&field.from_int(27) * &(&b * &b));
        if disc.is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(Self { field, a, b })
    }

    /// Curve over `F_p` from integer coefficients.
    pub fn over_prime(p: u64, a: i64, b: i64) -> Result<Self, CurveError> {
        let field = Field::prime(p)?;
        Self::new(field.from_int(a), field.from_int(b))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    fn rhs(&self, x: &FieldElement) -> FieldElement {
        &(&(&(x * x) * x) + &(&self.a * x)) + &self.b
    }

    pub fn is_on_curve(&self, point: &CurvePoint) -> bool {
        match point {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => {
                x.field() == &self.field && y.field() == &self.field && y * y == self.rhs(x)
            }
        }
    }

    /// Parses `x,y` or `inf` and checks membership.
    pub fn parse_point(&self, s: &str) -> Result<CurvePoint, CurveError> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "O" {
            return Ok(CurvePoint::Infinity);
        }
        let (x, y) = s.split_once(',').ok_or_else(|| CurveError::Parse(s.to_string()))?;
        let point = CurvePoint::affine(self.field.parse_element(x)?, self.field.parse_element(y)?);
        self.ensure_on_curve(&point)?;
        Ok(point)
    }

    fn ensure_on_curve(&self, point: &CurvePoint) -> Result<(), CurveError> {
        if self.is_on_curve(point) {
            Ok(())
        } else {
            Err(CurveError::NotOnCurve(point.to_string()))
        }
    }

    pub fn neg(&self, point: &CurvePoint) -> Result<CurvePoint, CurveError> {
        self.ensure_on_curve(point)?;
        Ok(self.neg_unchecked(point))
    }

    fn neg_unchecked(&self, point: &CurvePoint) -> CurvePoint {
        match point {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::affine(x.clone(), -y),
        }
    }

    pub fn add(&self, p: &CurvePoint, q: &CurvePoint) -> Result<CurvePoint, CurveError> {
        self.ensure_on_curve(p)?;
        self.ensure_on_curve(q)?;
        Ok(self.add_unchecked(p, q))
    }

    /// Chord-and-tangent addition for points already known to lie on the curve.
    pub(crate) fn add_unchecked(&self, p: &CurvePoint, q: &CurvePoint) -> CurvePoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => {
                (x1, y1, x2, y2)
            }
        };
        let slope = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return CurvePoint::Infinity;
            }
            let num = &(&self.field.from_int(3) * &(x1 * x1)) + &self.a;
            let den = y1 + y1;
            &num * &den.inv().expect("2y != 0 on a doubling")
        } else {
            &(y2 - y1) * &(x2 - x1).inv().expect("distinct x")
        };
        let x3 = &(&(&slope * &slope) - x1) - x2;
        let y3 = &(&slope * &(x1 - &x3)) - y1;
        CurvePoint::affine(x3, y3)
    }

    /// `[n]P` by double-and-add; negative `n` negates.
    pub fn scalar_mul(&self, n: i64, point: &CurvePoint) -> Result<CurvePoint, CurveError> {
        self.ensure_on_curve(point)?;
        Ok(self.scalar_mul_unchecked(n, point))
    }

    pub(crate) fn scalar_mul_unchecked(&self, n: i64, point: &CurvePoint) -> CurvePoint {
        let mut base = if n < 0 { self.neg_unchecked(point) } else { point.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = CurvePoint::Infinity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn sum_points<'a, I>(&self, points: I) -> Result<CurvePoint, CurveError>
    where
        I: IntoIterator<Item = &'a CurvePoint>,
    {
        points.into_iter().try_fold(CurvePoint::Infinity, |acc, p| self.add(&acc, p))
    }

    /// Infinity, then affine points ordered by `(x, y)` in field order.
    pub fn rational_points(&self) -> Vec<CurvePoint> {
        let mut out = vec![CurvePoint::Infinity];
        for x in self.field.elements() {
            for y in self.rhs(&x).sqrt() {
                out.push(CurvePoint::affine(x.clone(), y));
            }
        }
        out
    }

    pub fn point_order(&self, point: &CurvePoint) -> Result<u64, CurveError> {
        self.ensure_on_curve(point)?;
        let mut acc = point.clone();
        let mut n = 1;
        while !acc.is_infinity() {
            acc = self.add_unchecked(&acc, point);
            n += 1;
        }
        Ok(n)
    }

    /// Invariant factors of `E(F_q)` with an explicit coordinate map, found by
    /// an element-order census and a generator search.
    pub fn group_structure(&self) -> Result<GroupStructure, CurveError> {
        let points = self.rational_points();
        GroupStructure::discover(self, &points)
    }
}

/// `E(F_q)` (or a subgroup) presented as `Z/m1 + Z/m2`, `m1 | m2`.
#[derive(Debug, Clone)]
pub struct GroupStructure {
    pub m1: u64,
    pub m2: u64,
    /// `(g2, g1)`: `g2` has order `m2`, `g1` has order `m1` (Infinity when `m1 = 1`).
    pub generators: (CurvePoint, CurvePoint),
    coords: HashMap<CurvePoint, (u64, u64)>,
}

impl GroupStructure {
    /// Structure of the finite subgroup whose elements are `points`
    /// (closure under addition is assumed and checked through the map).
    pub fn discover(curve: &EllipticCurve, points: &[CurvePoint]) -> Result<Self, CurveError> {
        let n = points.len() as u64;
        let mut orders = Vec::with_capacity(points.len());
        for p in points {
            orders.push(curve.point_order(p)?);
        }
        let m2 = orders.iter().fold(1u64, |acc, &o| acc.lcm(&o));
        if n % m2 != 0 {
            return Err(CurveError::Structure(format!("exponent {m2} does not divide order {n}")));
        }
        let m1 = n / m2;
        if m2 % m1 != 0 {
            return Err(CurveError::Structure(format!("m1 = {m1} does not divide m2 = {m2}")));
        }
        let g2 = points
            .iter()
            .zip(&orders)
            .find(|(_, &o)| o == m2)
            .map(|(p, _)| p.clone())
            .ok_or_else(|| CurveError::Structure("no element of exponent order".into()))?;
        let cyclic: Vec<CurvePoint> = (0..m2).map(|i| curve.scalar_mul_unchecked(i as i64, &g2)).collect();
        let in_cyclic: HashMap<&CurvePoint, u64> =
            cyclic.iter().enumerate().map(|(i, p)| (p, i as u64)).collect();

        // A complement generator: order m1 with no nonzero multiple in <g2>.
        let g1 = if m1 == 1 {
            CurvePoint::Infinity
        } else {
            points
                .iter()
                .zip(&orders)
                .filter(|(_, &o)| o == m1)
                .map(|(p, _)| p)
                .find(|p| {
                    (1..m1).all(|j| !in_cyclic.contains_key(&curve.scalar_mul_unchecked(j as i64, p)))
                })
                .cloned()
                .ok_or_else(|| CurveError::Structure("no complement generator".into()))?
        };

        let mut coords = HashMap::with_capacity(points.len());
        let mut row = CurvePoint::Infinity;
        for c1 in 0..m1 {
            for (c2, base) in cyclic.iter().enumerate() {
                let p = curve.add_unchecked(&row, base);
                if coords.insert(p, (c1, c2 as u64)).is_some() {
                    return Err(CurveError::Structure("generators are not independent".into()));
                }
            }
            row = curve.add_unchecked(&row, &g1);
        }
        if coords.len() != points.len() || points.iter().any(|p| !coords.contains_key(p)) {
            return Err(CurveError::Structure("point set is not the span of its generators".into()));
        }
        let structure = Self { m1, m2, generators: (g2, g1), coords };
        structure.verify_homomorphism(curve, points)?;
        Ok(structure)
    }

    // All pairs up to 200 points, otherwise each point against the generators.
    fn verify_homomorphism(&self, curve: &EllipticCurve, points: &[CurvePoint]) -> Result<(), CurveError> {
        let partners: Vec<&CurvePoint> = if points.len() <= 200 {
            points.iter().collect()
        } else {
            vec![&self.generators.0, &self.generators.1]
        };
        for p in points {
            for q in &partners {
                let lhs = self.coords(&curve.add_unchecked(p, q));
                let (a, b) = (self.coords[p], self.coords[*q]);
                let rhs = ((a.0 + b.0) % self.m1, (a.1 + b.1) % self.m2);
                if lhs != Some(rhs) {
                    return Err(CurveError::Structure(format!("coordinate map fails at {p} + {q}")));
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> u64 {
        self.m1 * self.m2
    }

    pub fn is_cyclic(&self) -> bool {
        self.m1 == 1
    }

    /// `(c1 mod m1, c2 mod m2)` with `P = [c1]g1 + [c2]g2`.
    pub fn coords(&self, point: &CurvePoint) -> Option<(u64, u64)> {
        self.coords.get(point).copied()
    }

    pub fn abelian_group(&self) -> AbelianGroup {
        AbelianGroup::new(vec![self.m1, self.m2]).expect("m1 | m2 checked at discovery")
    }

    /// The point's coordinates in [`Self::abelian_group`].
    pub fn group_element(&self, point: &CurvePoint) -> Option<GroupElement> {
        let (c1, c2) = self.coords(point)?;
        Some(if self.m1 == 1 {
            GroupElement::new(vec![c2])
        } else {
            GroupElement::new(vec![c1, c2])
        })
    }
}
