//! Short Weierstrass curves `y^2 = x^3 + a x + b` with exact group law and rational torsion.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::AlgNum;
use crate::error::{DynError, Result};
use crate::poly::HomPoly;
use crate::projective::PolyEndo;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EllipticCurve {
    a: i64,
    b: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EllPoint {
    Infinity,
    Affine(AlgNum, AlgNum),
}

impl EllPoint {
    pub fn affine(x: AlgNum, y: AlgNum) -> Self {
        EllPoint::Affine(x, y)
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        EllPoint::Affine(x.into(), y.into())
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, EllPoint::Infinity)
    }

    pub fn coords(&self) -> Option<(&AlgNum, &AlgNum)> {
        match self {
            EllPoint::Infinity => None,
            EllPoint::Affine(x, y) => Some((x, y)),
        }
    }

    /// True when both coordinates are integers.
    pub fn is_integral(&self) -> bool {
        match self {
            EllPoint::Infinity => true,
            EllPoint::Affine(x, y) => [x, y]
                .iter()
                .all(|c| c.as_rat().is_some_and(|r| r.is_integer())),
        }
    }
}

impl fmt::Display for EllPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllPoint::Infinity => write!(f, "O"),
            EllPoint::Affine(x, y) => write!(f, "({}, {})", x, y),
        }
    }
}

impl EllipticCurve {
    pub fn new(a: i64, b: i64) -> Result<Self> {
        let e = EllipticCurve { a, b };
        if e.disc_core().is_zero() {
            return Err(DynError::SingularCurve { a, b });
        }
        Ok(e)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `4a^3 + 27b^2`.
    fn disc_core(&self) -> BigInt {
        let a = BigInt::from(self.a);
        let b = BigInt::from(self.b);
        BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b
    }

    /// `-16 (4a^3 + 27b^2)`.
    pub fn discriminant(&self) -> BigInt {
        BigInt::from(-16) * self.disc_core()
    }

    fn rhs(&self, x: &AlgNum) -> Result<AlgNum> {
        let x3 = x.pow(3)?;
        x3.try_add(&x.scale_int(&self.a.into()))?
            .try_add(&AlgNum::from(self.b))
    }

    pub fn contains(&self, p: &EllPoint) -> bool {
        match p {
            EllPoint::Infinity => true,
            EllPoint::Affine(x, y) => match (y.pow(2), self.rhs(x)) {
                (Ok(l), Ok(r)) => l == r,
                _ => false,
            },
        }
    }

    pub fn check_point(&self, p: &EllPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(DynError::NotOnCurve(format!("{} on {}", p, self)))
        }
    }

    /// The point with abscissa `x` and positive (or zero) ordinate, if rational.
    pub fn lift_x(&self, x: i64) -> Option<EllPoint> {
        let rhs = BigInt::from(x).pow(3) + BigInt::from(self.a) * x + self.b;
        if rhs.is_negative() {
            return None;
        }
        let s = rhs.sqrt();
        (&s * &s == rhs).then(|| EllPoint::Affine(x.into(), AlgNum::from(s)))
    }

    pub fn neg(&self, p: &EllPoint) -> EllPoint {
        match p {
            EllPoint::Infinity => EllPoint::Infinity,
            EllPoint::Affine(x, y) => EllPoint::Affine(x.clone(), y.neg()),
        }
    }

    pub fn add(&self, p: &EllPoint, q: &EllPoint) -> Result<EllPoint> {
        let (x1, y1) = match p {
            EllPoint::Infinity => return Ok(q.clone()),
            EllPoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match q {
            EllPoint::Infinity => return Ok(p.clone()),
            EllPoint::Affine(x, y) => (x, y),
        };
        let lambda = if x1 == x2 {
            if y1.try_add(y2)?.is_zero() {
                return Ok(EllPoint::Infinity);
            }
            // tangent slope (3x^2 + a) / 2y
            let num = x1
                .pow(2)?
                .scale_int(&3.into())
                .try_add(&AlgNum::from(self.a))?;
            num.try_div(&y1.scale_int(&2.into()))?
        } else {
            y2.try_sub(y1)?.try_div(&x2.try_sub(x1)?)?
        };
        let x3 = lambda.pow(2)?.try_sub(x1)?.try_sub(x2)?;
        let y3 = lambda.try_mul(&x1.try_sub(&x3)?)?.try_sub(y1)?;
        Ok(EllPoint::Affine(x3, y3))
    }

    pub fn double(&self, p: &EllPoint) -> Result<EllPoint> {
        self.add(p, p)
    }

    pub fn mul(&self, k: &BigInt, p: &EllPoint) -> Result<EllPoint> {
        let base = if k.is_negative() {
            self.neg(p)
        } else {
            p.clone()
        };
        let k = k.abs();
        let mut acc = EllPoint::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.double(&acc)?;
            if k.bit(i) {
                acc = self.add(&acc, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn mul_i64(&self, k: i64, p: &EllPoint) -> Result<EllPoint> {
        self.mul(&BigInt::from(k), p)
    }

    /// Order of `p` if it is at most `ceiling`. Rational torsion points have integral
    /// multiples, so a non-integral multiple proves infinite order early.
    pub fn order(&self, p: &EllPoint, ceiling: u32) -> Result<Option<u32>> {
        let mut q = p.clone();
        for n in 1..=ceiling {
            if q.is_infinity() {
                return Ok(Some(n));
            }
            if p.as_rat_point() && !q.is_integral() {
                return Ok(None);
            }
            q = self.add(&q, p)?;
        }
        Ok(None)
    }

    /// `x([2]P)` as a degree-4 self-map of P^1:
    /// `[X^4 - 2aX^2Z^2 - 8bXZ^3 + a^2Z^4, 4X^3Z + 4aXZ^3 + 4bZ^4]`.
    pub fn duplication_map(&self) -> PolyEndo {
        let (a, b) = (BigInt::from(self.a), BigInt::from(self.b));
        let m = |e: [u32; 2], c: BigInt| (e.to_vec(), c);
        let num = HomPoly::from_terms(
            2,
            [
                m([4, 0], 1.into()),
                m([2, 2], -BigInt::from(2) * &a),
                m([1, 3], -BigInt::from(8) * &b),
                m([0, 4], &a * &a),
            ],
        );
        let den = HomPoly::from_terms(
            2,
            [
                m([3, 1], 4.into()),
                m([1, 3], BigInt::from(4) * &a),
                m([0, 4], BigInt::from(4) * &b),
            ],
        );
        PolyEndo::single(vec![num, den])
            .and_then(|f| f.with_polarization(4))
            .expect("duplication map of a nonsingular curve")
    }
}

impl EllPoint {
    fn as_rat_point(&self) -> bool {
        match self {
            EllPoint::Infinity => true,
            EllPoint::Affine(x, y) => x.as_rat().is_some() && y.as_rat().is_some(),
        }
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3")?;
        match self.a {
            0 => {}
            1 => write!(f, " + x")?,
            -1 => write!(f, " - x")?,
            a if a < 0 => write!(f, " - {}x", -a)?,
            a => write!(f, " + {}x", a)?,
        }
        match self.b {
            0 => Ok(()),
            b if b < 0 => write!(f, " - {}", -b),
            b => write!(f, " + {}", b),
        }
    }
}

/// Rational torsion point together with its exact order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TorsionPoint {
    pub point: EllPoint,
    pub order: u32,
}

/// Default order ceiling for certifying a Lutz–Nagell candidate as torsion.
pub const TORSION_CEILING: u32 = 12;

pub fn torsion_subgroup(e: &EllipticCurve) -> Result<Vec<TorsionPoint>> {
    torsion_subgroup_with(e, TORSION_CEILING)
}

/// Integer roots of `x^3 + a x + c`.
fn integer_cubic_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    // any root satisfies |x|^3 <= |a||x| + |c|, so |x| <= max(1, sqrt(2|a|), cbrt(2|c|))
    let bound: BigInt = BigInt::from(2) * a.abs();
    let bound: BigInt = Roots::sqrt(&bound)
        .max(Roots::cbrt(&(BigInt::from(2) * c.abs())))
        .max(BigInt::from(1))
        + 1;
    let b = bound.to_i64().expect("root bound fits in i64");
    (-b..=b)
        .map(BigInt::from)
        .filter(|x| (x * x * x + a * x + c).is_zero())
        .collect()
}

/// Lutz–Nagell: torsion points are integral with `y = 0` or `y^2 | 4a^3 + 27b^2`.
/// Each candidate is certified by finding its order below `ceiling`.
pub fn torsion_subgroup_with(e: &EllipticCurve, ceiling: u32) -> Result<Vec<TorsionPoint>> {
    let a = BigInt::from(e.a);
    let b = BigInt::from(e.b);
    let d = e.disc_core().abs();
    let mut candidates = Vec::new();
    for x in integer_cubic_roots(&a, &b) {
        candidates.push(EllPoint::Affine(AlgNum::from(x), AlgNum::zero()));
    }
    let ymax = Roots::sqrt(&d);
    let mut y = BigInt::from(1);
    while y <= ymax {
        let y2 = &y * &y;
        if (&d % &y2).is_zero() {
            for x in integer_cubic_roots(&a, &(&b - &y2)) {
                let (px, py) = (AlgNum::from(x), AlgNum::from(y.clone()));
                candidates.push(EllPoint::Affine(px.clone(), py.neg()));
                candidates.push(EllPoint::Affine(px, py));
            }
        }
        y += 1;
    }
    let mut out = vec![TorsionPoint {
        point: EllPoint::Infinity,
        order: 1,
    }];
    for p in candidates {
        if let Some(n) = e.order(&p, ceiling)? {
            out.push(TorsionPoint { point: p, order: n });
        }
    }
    out.sort();
    Ok(out)
}

/// `Z/n` or `Z/2 x Z/2m`, from the group order and the number of 2-torsion points.
pub fn torsion_structure(points: &[TorsionPoint]) -> String {
    let n = points.len();
    let two_torsion = points.iter().filter(|t| t.order == 2).count();
    if two_torsion == 3 {
        format!("Z/2 x Z/{}", n / 2)
    } else if n == 1 {
        "trivial".to_string()
    } else {
        format!("Z/{}", n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(ts: &[TorsionPoint]) -> Vec<String> {
        ts.iter().map(|t| t.point.to_string()).collect()
    }

    #[test]
    fn group_law_examples() {
        let e = EllipticCurve::new(0, 1).unwrap();
        let p = EllPoint::from_ints(2, 3);
        assert_eq!(e.add(&p, &EllPoint::Infinity).unwrap(), p);
        assert_eq!(e.add(&p, &e.neg(&p)).unwrap(), EllPoint::Infinity);
        assert_eq!(e.double(&p).unwrap(), EllPoint::from_ints(0, 1));
        assert_eq!(e.order(&p, 12).unwrap(), Some(6));
        assert!(EllipticCurve::new(0, 0).is_err());
    }

    #[test]
    fn torsion_examples() {
        let t = torsion_subgroup(&EllipticCurve::new(-1, 0).unwrap()).unwrap();
        assert_eq!(pts(&t), vec!["O", "(-1, 0)", "(0, 0)", "(1, 0)"]);
        assert_eq!(torsion_structure(&t), "Z/2 x Z/2");
        let t = torsion_subgroup(&EllipticCurve::new(0, 1).unwrap()).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(torsion_structure(&t), "Z/6");
        assert_eq!(
            torsion_subgroup(&EllipticCurve::new(0, 2).unwrap())
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            torsion_subgroup(&EllipticCurve::new(-43, 166).unwrap())
                .unwrap()
                .len(),
            7
        );
    }

    #[test]
    fn duplication_map_matches_group_law() {
        let e = EllipticCurve::new(0, 8).unwrap();
        let p = EllPoint::from_ints(1, 3);
        let phi = e.duplication_map();
        let x = crate::projective::ProjPoint::affine(AlgNum::from(1));
        let img = crate::projective::evaluate(&phi, &x).unwrap();
        let (x2, _) = e
            .double(&p)
            .unwrap()
            .coords()
            .map(|(x, y)| (x.clone(), y.clone()))
            .unwrap();
        assert_eq!(img.affine_coordinate().unwrap(), x2);
    }

    proptest! {
        #[test]
        fn group_axioms(i in -3i64..4, j in -3i64..4, k in -3i64..4) {
            // y^2 = x^3 + 8 has the point (1, 3) of infinite order and (-2, 0) of order 2
            let e = EllipticCurve::new(0, 8).unwrap();
            let g = EllPoint::from_ints(1, 3);
            let t = EllPoint::from_ints(-2, 0);
            let p = e.add(&e.mul_i64(i, &g).unwrap(), &t).unwrap();
            let q = e.mul_i64(j, &g).unwrap();
            let r = e.add(&e.mul_i64(k, &g).unwrap(), &t).unwrap();
            let left = e.add(&e.add(&p, &q).unwrap(), &r).unwrap();
            let right = e.add(&p, &e.add(&q, &r).unwrap()).unwrap();
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(e.add(&p, &q).unwrap(), e.add(&q, &p).unwrap());
            prop_assert!(e.contains(&left));
            prop_assert_eq!(e.add(&p, &e.neg(&p)).unwrap(), EllPoint::Infinity);
        }
    }
}
