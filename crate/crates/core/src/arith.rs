//! Exact rational and quadratic-field arithmetic.
//!
//! Rationals are `num_rational::BigRational`, which already keeps numerator and
//! denominator coprime with a positive denominator. Quadratic irrationalities
//! `a + b*sqrt(D)` are carried by [`QuadExt`] with `D` squarefree, and
//! [`AlgNum`] is the tagged union used for every coordinate in the crate.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{DynError, Result};
use crate::heights::HeightValue;

pub type Rat = BigRational;

/// Error bound attached to a single double-precision logarithm.
pub const LOG_EVAL_ERROR: f64 = 1e-12;

pub fn rat_normalize(num: BigInt, den: BigInt) -> Result<Rat> {
    if den.is_zero() {
        return Err(DynError::DivisionByZero);
    }
    Ok(Rat::new(num, den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Natural log of `|n|`; `-inf` for zero. Works for integers far beyond `f64` range.
pub fn log_abs_int(n: &BigInt) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn log_abs_rat(r: &Rat) -> f64 {
    log_abs_int(r.numer()) - log_abs_int(r.denom())
}

/// `log(e^x + e^y)` without overflow.
pub(crate) fn log_add_exp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// Splits `d` as `s^2 * k` with `k` squarefree (sign kept on `k`). Returns `(k, s)`.
pub fn squarefree_kernel(d: i64) -> (i64, i64) {
    assert!(d != 0, "squarefree kernel of zero");
    let sign = d.signum();
    let mut rest = d.unsigned_abs();
    let mut kernel: u64 = 1;
    let mut root: u64 = 1;
    let mut p: u64 = 2;
    while p * p <= rest {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            root *= p;
        }
        if e % 2 == 1 {
            kernel *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    kernel *= rest;
    (sign * kernel as i64, root as i64)
}

/// `a + b*sqrt(d)` with `d` squarefree, `d != 1` and `b != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadExt {
    a: Rat,
    b: Rat,
    d: i64,
}

impl QuadExt {
    pub fn a(&self) -> &Rat {
        &self.a
    }
    pub fn b(&self) -> &Rat {
        &self.b
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    /// Field norm `a^2 - b^2 d`.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * rat_int(self.d)
    }

    pub fn trace(&self) -> Rat {
        &self.a + &self.a
    }
}

/// An element of Q or of a single quadratic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgNum {
    Rat(Rat),
    Quad(QuadExt),
}

// `Ratio`'s own Hash and Ord recurse along the continued fraction, which overflows the
// stack on the huge coordinates met in orbits. Rationals are always reduced, so hashing
// numerator and denominator agrees with equality.
fn hash_rat<H: Hasher>(r: &Rat, state: &mut H) {
    r.numer().hash(state);
    r.denom().hash(state);
}

fn cmp_rat(x: &Rat, y: &Rat) -> Ordering {
    (x.numer() * y.denom()).cmp(&(y.numer() * x.denom()))
}

impl Hash for QuadExt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        hash_rat(&self.a, state);
        hash_rat(&self.b, state);
        self.d.hash(state);
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_rat(&self.a, &other.a)
            .then_with(|| cmp_rat(&self.b, &other.b))
            .then_with(|| self.d.cmp(&other.d))
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for AlgNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            AlgNum::Rat(r) => {
                0u8.hash(state);
                hash_rat(r, state);
            }
            AlgNum::Quad(q) => {
                1u8.hash(state);
                q.hash(state);
            }
        }
    }
}

/// Rationals first (numerically), then quadratic elements.
impl Ord for AlgNum {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (AlgNum::Rat(x), AlgNum::Rat(y)) => cmp_rat(x, y),
            (AlgNum::Rat(_), AlgNum::Quad(_)) => Ordering::Less,
            (AlgNum::Quad(_), AlgNum::Rat(_)) => Ordering::Greater,
            (AlgNum::Quad(x), AlgNum::Quad(y)) => x.cmp(y),
        }
    }
}

impl PartialOrd for AlgNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Rewrites `a + b*sqrt(d)` with `d` replaced by its squarefree kernel.
pub fn quad_reduce(a: Rat, b: Rat, d: i64) -> AlgNum {
    if b.is_zero() || d == 0 {
        return AlgNum::Rat(a);
    }
    let (kernel, root) = squarefree_kernel(d);
    let b = b * rat_int(root);
    if kernel == 1 {
        return AlgNum::Rat(a + b);
    }
    AlgNum::Quad(QuadExt { a, b, d: kernel })
}

impl From<Rat> for AlgNum {
    fn from(r: Rat) -> Self {
        AlgNum::Rat(r)
    }
}

impl From<i64> for AlgNum {
    fn from(n: i64) -> Self {
        AlgNum::Rat(rat_int(n))
    }
}

impl From<BigInt> for AlgNum {
    fn from(n: BigInt) -> Self {
        AlgNum::Rat(Rat::from_integer(n))
    }
}

impl AlgNum {
    pub fn zero() -> Self {
        AlgNum::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        AlgNum::Rat(Rat::one())
    }

    /// `sqrt(d)` for an integer `d`.
    pub fn sqrt_int(d: i64) -> Self {
        quad_reduce(Rat::zero(), Rat::one(), d)
    }

    /// Squarefree `D` of the field this element generates, `None` when rational.
    pub fn field(&self) -> Option<i64> {
        match self {
            AlgNum::Rat(_) => None,
            AlgNum::Quad(q) => Some(q.d),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, AlgNum::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, AlgNum::Rat(r) if r.is_one())
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            AlgNum::Rat(r) => Some(r),
            AlgNum::Quad(_) => None,
        }
    }

    /// Rational part and irrational coefficient, with the field's `D` (0 for Q).
    pub fn parts(&self) -> (Rat, Rat, i64) {
        match self {
            AlgNum::Rat(r) => (r.clone(), Rat::zero(), 0),
            AlgNum::Quad(q) => (q.a.clone(), q.b.clone(), q.d),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            AlgNum::Rat(_) => 1,
            AlgNum::Quad(_) => 2,
        }
    }

    fn common_field(&self, other: &AlgNum) -> Result<i64> {
        match (self.field(), other.field()) {
            (Some(x), Some(y)) if x != y => Err(DynError::FieldMismatch { left: x, right: y }),
            (Some(x), _) | (_, Some(x)) => Ok(x),
            (None, None) => Ok(0),
        }
    }

    pub fn try_add(&self, other: &AlgNum) -> Result<AlgNum> {
        if let (AlgNum::Rat(x), AlgNum::Rat(y)) = (self, other) {
            return Ok(AlgNum::Rat(x + y));
        }
        let d = self.common_field(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        Ok(quad_reduce(a1 + a2, b1 + b2, d))
    }

    pub fn try_sub(&self, other: &AlgNum) -> Result<AlgNum> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &AlgNum) -> Result<AlgNum> {
        if let (AlgNum::Rat(x), AlgNum::Rat(y)) = (self, other) {
            return Ok(AlgNum::Rat(x * y));
        }
        let d = self.common_field(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        let a = &a1 * &a2 + &b1 * &b2 * rat_int(d);
        let b = a1 * b2 + a2 * b1;
        Ok(quad_reduce(a, b, d))
    }

    pub fn inv(&self) -> Result<AlgNum> {
        match self {
            AlgNum::Rat(r) => {
                if r.is_zero() {
                    Err(DynError::DivisionByZero)
                } else {
                    Ok(AlgNum::Rat(r.recip()))
                }
            }
            AlgNum::Quad(q) => {
                let n = q.norm();
                Ok(quad_reduce(&q.a / &n, -&q.b / &n, q.d))
            }
        }
    }

    pub fn try_div(&self, other: &AlgNum) -> Result<AlgNum> {
        self.try_mul(&other.inv()?)
    }

    pub fn neg(&self) -> AlgNum {
        match self {
            AlgNum::Rat(r) => AlgNum::Rat(-r),
            AlgNum::Quad(q) => AlgNum::Quad(QuadExt {
                a: -&q.a,
                b: -&q.b,
                d: q.d,
            }),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> AlgNum {
        let k = Rat::from_integer(k.clone());
        match self {
            AlgNum::Rat(r) => AlgNum::Rat(r * k),
            AlgNum::Quad(q) => quad_reduce(&q.a * &k, &q.b * &k, q.d),
        }
    }

    /// Galois conjugate `a - b*sqrt(D)`; identity on rationals.
    pub fn conjugate(&self) -> AlgNum {
        match self {
            AlgNum::Rat(_) => self.clone(),
            AlgNum::Quad(q) => AlgNum::Quad(QuadExt {
                a: q.a.clone(),
                b: -&q.b,
                d: q.d,
            }),
        }
    }

    pub fn pow(&self, e: u32) -> Result<AlgNum> {
        let mut acc = AlgNum::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Bit size of the largest numerator or denominator involved.
    pub fn bits(&self) -> u64 {
        let rb = |r: &Rat| r.numer().bits().max(r.denom().bits());
        match self {
            AlgNum::Rat(r) => rb(r),
            AlgNum::Quad(q) => rb(&q.a).max(rb(&q.b)),
        }
    }

    /// Approximate complex value under the embedding `sqrt(D) > 0` (or `i*sqrt|D|`).
    pub fn to_complex(&self) -> (f64, f64) {
        let f = |r: &Rat| r.to_f64().unwrap_or(f64::NAN);
        match self {
            AlgNum::Rat(r) => (f(r), 0.0),
            AlgNum::Quad(q) => {
                let s = (q.d.unsigned_abs() as f64).sqrt();
                if q.d > 0 {
                    (f(&q.a) + f(&q.b) * s, 0.0)
                } else {
                    (f(&q.a), f(&q.b) * s)
                }
            }
        }
    }

    pub fn min_poly(&self) -> IntPoly {
        match self {
            AlgNum::Rat(r) => IntPoly::from_rat_coeffs(&[-r.clone(), Rat::one()]),
            AlgNum::Quad(q) => IntPoly::from_rat_coeffs(&[q.norm(), -q.trace(), Rat::one()]),
        }
    }

    /// Absolute logarithmic Weil height via the Mahler measure of the minimal polynomial.
    pub fn abs_height(&self) -> HeightValue {
        HeightValue::new(self.log_mahler() / self.degree() as f64, LOG_EVAL_ERROR)
    }

    /// `log M(min_poly)`, computed from closed-form conjugate absolute values.
    fn log_mahler(&self) -> f64 {
        match self {
            AlgNum::Rat(r) => log_abs_int(r.numer()).max(log_abs_int(r.denom())),
            AlgNum::Quad(q) => {
                let mp = self.min_poly();
                let lead = log_abs_int(&mp.coeffs[2]);
                let log_const = log_abs_int(&mp.coeffs[0]);
                if q.d < 0 {
                    // complex pair of equal modulus: M = max(lead, |const|)
                    return lead.max(log_const);
                }
                // real conjugates: the larger one is |a| + |b| sqrt(D)
                let log_big = log_add_exp(
                    log_abs_rat(&q.a),
                    log_abs_rat(&q.b) + 0.5 * (q.d as f64).ln(),
                );
                let log_small = log_const - lead - log_big;
                lead + log_big.max(0.0) + log_small.max(0.0)
            }
        }
    }
}

/// Alias kept for callers that think in terms of the operation name.
pub fn min_poly(alpha: &AlgNum) -> IntPoly {
    alpha.min_poly()
}

pub fn abs_height_alg(alpha: &AlgNum) -> HeightValue {
    alpha.abs_height()
}

impl fmt::Display for AlgNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgNum::Rat(r) => write!(f, "{}", r),
            AlgNum::Quad(q) => {
                let root = format!("sqrt({})", q.d);
                let irr = if q.b.is_one() {
                    root
                } else if q.b == -Rat::one() {
                    format!("-{}", root)
                } else {
                    format!("{}*{}", q.b, root)
                };
                if q.a.is_zero() {
                    write!(f, "{}", irr)
                } else if irr.starts_with('-') {
                    write!(f, "{}{}", q.a, irr)
                } else {
                    write!(f, "{}+{}", q.a, irr)
                }
            }
        }
    }
}

/// Primitive integer polynomial with positive leading coefficient, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Clears denominators and content; panics on the zero polynomial.
    pub fn from_rat_coeffs(coeffs: &[Rat]) -> IntPoly {
        let lcm = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut ints: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        while ints.last().is_some_and(|c| c.is_zero()) {
            ints.pop();
        }
        assert!(!ints.is_empty(), "zero polynomial has no primitive form");
        let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let scale = content * sign;
        IntPoly {
            coeffs: ints.into_iter().map(|c| c / &scale).collect(),
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &AlgNum) -> Result<AlgNum> {
        let mut acc = AlgNum::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(x)?.try_add(&AlgNum::from(c.clone()))?;
        }
        Ok(acc)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || k == 0;
            match (show_coeff, k) {
                (true, 0) => write!(f, "{}", mag)?,
                (true, 1) => write!(f, "{}x", mag)?,
                (true, _) => write!(f, "{}x^{}", mag, k)?,
                (false, 1) => write!(f, "x")?,
                (false, _) => write!(f, "x^{}", k)?,
            }
        }
        Ok(())
    }
}
