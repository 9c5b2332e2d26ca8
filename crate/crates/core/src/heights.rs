//! Weil-height bookkeeping, canonical heights of polarized maps and Néron–Tate heights.
//!
//! On P^1 the map changes heights by a bounded amount in both directions:
//! `r h(P) - C⁻ <= h(f(P)) <= r h(P) + C⁺`. The upper constant comes from the
//! triangle inequality. The lower one comes from integral cofactors with
//! `R X^(2r-1) = g1 F + g2 G` and `R Y^(2r-1) = g3 F + g4 G`; by the product
//! formula the integer `R` drops out and `C⁻ = log max(|g1|+|g2|, |g3|+|g4|)`
//! (coefficient L1 norms). The same integer `R` is a multiple of every
//! `gcd(F(X,Y), G(X,Y))` with `X, Y` coprime, which is what lets [`P1Tracker`]
//! follow heights along an orbit without ever forming the iterates exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{log_abs_int, Rat, LOG_EVAL_ERROR};
use crate::elliptic::{EllPoint, EllipticCurve};
use crate::error::{DynError, Result};
use crate::linalg;
use crate::orbits::{orbit_with, OrbitLimits, OrbitStatus};
use crate::poly::HomPoly;
use crate::projective::{block_height, morphism_check, sylvester_matrix, PolyEndo, ProjPoint};

/// A real height estimate with an error bound; `rigorous` means the bound is proven.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeightValue {
    pub value: f64,
    pub error: f64,
    pub rigorous: bool,
}

impl HeightValue {
    pub fn new(value: f64, error: f64) -> Self {
        HeightValue {
            value,
            error,
            rigorous: true,
        }
    }

    pub fn exact(value: f64) -> Self {
        HeightValue::new(value, 0.0)
    }

    pub fn heuristic(value: f64, error: f64) -> Self {
        HeightValue {
            value,
            error,
            rigorous: false,
        }
    }

    pub fn add(&self, other: &HeightValue) -> HeightValue {
        HeightValue {
            value: self.value + other.value,
            error: self.error + other.error,
            rigorous: self.rigorous && other.rigorous,
        }
    }

    pub fn scale(&self, k: f64) -> HeightValue {
        HeightValue {
            value: self.value * k,
            error: self.error * k.abs(),
            rigorous: self.rigorous,
        }
    }

    pub fn lower(&self) -> f64 {
        self.value - self.error
    }

    pub fn upper(&self) -> f64 {
        self.value + self.error
    }

    /// Replaces a value that is zero within its error by exactly zero.
    fn clamped(mut self) -> HeightValue {
        if self.value < 0.0 {
            if -self.value <= self.error {
                self.error += self.value.abs();
                self.value = 0.0;
            } else {
                self.value = 0.0;
                self.rigorous = false;
            }
        }
        self
    }
}

/// Constants with `r h(P) - lower <= h(f(P)) <= r h(P) + upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformBound {
    pub upper: f64,
    pub lower: Option<f64>,
    pub rigorous: bool,
}

impl TransformBound {
    /// `max(C⁺, C⁻)` when two-sided.
    pub fn two_sided_max(&self) -> Option<f64> {
        self.lower.map(|l| l.max(self.upper))
    }
}

/// Exact two-sided data for a binary-form pair of degree `r`.
#[derive(Clone, Debug)]
pub(crate) struct P1Constants {
    pub upper: f64,
    pub lower: f64,
    /// Positive integer multiple of every gcd that can appear in one step.
    pub gcd_bound: BigInt,
    /// `exp(C⁻)` rounded up, used for precision planning.
    pub lower_l1: BigInt,
}

fn upper_constant(polys: &[HomPoly]) -> f64 {
    let m = polys
        .iter()
        .map(|p| p.num_terms())
        .max()
        .unwrap_or(1)
        .max(1);
    let c = polys
        .iter()
        .map(|p| p.max_abs_coeff())
        .max()
        .unwrap_or_else(BigInt::one);
    log_abs_int(&(c * BigInt::from(m)))
}

pub(crate) fn p1_constants(polys: &[HomPoly], r: u32) -> Result<P1Constants> {
    let s = sylvester_matrix(&polys[0], &polys[1], r);
    let n = s.len();
    if linalg::determinant(&s).is_zero() {
        return Err(DynError::NotAMorphism("resultant vanishes".into()));
    }
    // rows of s are x^(r-1-j) y^j F and x^(r-1-j) y^j G; solve s^T w = e_target
    let st: Vec<Vec<Rat>> = (0..n)
        .map(|c| {
            (0..n)
                .map(|row| Rat::from_integer(s[row][c].clone()))
                .collect()
        })
        .collect();
    let mut sols = Vec::new();
    for target in [0, n - 1] {
        let mut e = vec![Rat::zero(); n];
        e[target] = Rat::one();
        sols.push(linalg::solve(&st, &e).expect("nonsingular Sylvester matrix"));
    }
    let common = sols
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let scale = Rat::from_integer(common.clone());
    let l1 = sols
        .iter()
        .map(|w| {
            w.iter()
                .map(|c| (c * &scale).to_integer().abs())
                .sum::<BigInt>()
        })
        .max()
        .unwrap();
    Ok(P1Constants {
        upper: upper_constant(polys),
        lower: log_abs_int(&l1),
        gcd_bound: common,
        lower_l1: l1,
    })
}

/// Explicit constants for the height transformation law of a single-factor map.
pub fn height_difference_bound(f: &PolyEndo) -> Result<TransformBound> {
    if !f.ambient().is_single() {
        return Err(DynError::Unsupported(
            "height bounds are computed per factor; pass a single-factor map".into(),
        ));
    }
    let block = &f.blocks()[0];
    if f.ambient().is_p1() {
        let c = p1_constants(block, f.degree())?;
        return Ok(TransformBound {
            upper: c.upper,
            lower: Some(c.lower),
            rigorous: true,
        });
    }
    match morphism_check(f) {
        Ok(false) => return Err(DynError::NotAMorphism(f.notation())),
        Ok(true) | Err(DynError::Unverified(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(TransformBound {
        upper: upper_constant(block),
        lower: None,
        rigorous: false,
    })
}

/// Follows the height of the orbit of a rational point of P^1 without computing the
/// iterates exactly: the gcd part is exact modulo a power of the cofactor multiple and
/// the archimedean part uses a fixed-point direction vector with enough guard bits.
#[derive(Clone, Debug)]
pub(crate) struct P1Tracker {
    // coeffs[k] multiplies x^k y^(r-k)
    f: Vec<BigInt>,
    g: Vec<BigInt>,
    r: u32,
    prec: u64,
    modulus: Option<BigInt>,
    res: (BigInt, BigInt),
    dir: (BigInt, BigInt),
    steps_left: u32,
    pub h: f64,
    pub err: f64,
}

impl P1Tracker {
    pub(crate) fn new(polys: &[HomPoly], r: u32, start: &[BigInt], steps: u32) -> Result<Self> {
        let c = p1_constants(polys, r)?;
        let f: Vec<BigInt> = (0..=r).map(|k| polys[0].binary_coeff(k, r)).collect();
        let g: Vec<BigInt> = (0..=r).map(|k| polys[1].binary_coeff(k, r)).collect();
        // one step may amplify a direction error by 2 r m |f| exp(C⁻)
        let m = polys.iter().map(|p| p.num_terms()).max().unwrap_or(1) as u64;
        let amp = BigInt::from(2 * r as u64 * m)
            * polys.iter().map(|p| p.max_abs_coeff()).max().unwrap()
            * &c.lower_l1;
        let prec = 128 + (steps as u64 + 2) * (amp.bits() + 1);
        let (x, y) = (start[0].clone(), start[1].clone());
        let big = x.abs().max(y.abs());
        let dir = ((&x << prec) / &big, (&y << prec) / &big);
        let modulus = (!c.gcd_bound.is_one())
            .then(|| num_traits::pow(c.gcd_bound.clone(), steps as usize + 1));
        let res = match &modulus {
            Some(md) => (x.mod_floor(md), y.mod_floor(md)),
            None => (BigInt::zero(), BigInt::zero()),
        };
        Ok(P1Tracker {
            f,
            g,
            r,
            prec,
            modulus,
            res,
            dir,
            steps_left: steps,
            h: log_abs_int(&big),
            err: LOG_EVAL_ERROR,
        })
    }

    fn eval_fixed(&self, coeffs: &[BigInt]) -> BigInt {
        let r = self.r as usize;
        let mut px = vec![BigInt::one()];
        let mut py = vec![BigInt::one()];
        for k in 1..=r {
            px.push(&px[k - 1] * &self.dir.0);
            py.push(&py[k - 1] * &self.dir.1);
        }
        let mut acc = BigInt::zero();
        for (k, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc += c * &px[k] * &py[r - k];
            }
        }
        acc >> (self.prec * (self.r as u64 - 1))
    }

    fn eval_mod(coeffs: &[BigInt], x: &BigInt, y: &BigInt, r: u32, md: &BigInt) -> BigInt {
        let r = r as usize;
        let mut px = vec![BigInt::one()];
        let mut py = vec![BigInt::one()];
        for k in 1..=r {
            px.push((&px[k - 1] * x).mod_floor(md));
            py.push((&py[k - 1] * y).mod_floor(md));
        }
        let mut acc = BigInt::zero();
        for (k, c) in coeffs.iter().enumerate() {
            acc += c * &px[k] * &py[r - k];
        }
        acc.mod_floor(md)
    }

    /// Advances one step and returns `h(f(P)) - r h(P)`.
    pub(crate) fn step(&mut self) -> Result<f64> {
        if self.steps_left == 0 {
            return Err(DynError::BudgetExceeded {
                what: "height tracker step budget".into(),
                partial: None,
            });
        }
        self.steps_left -= 1;
        let fv = self.eval_fixed(&self.f);
        let gv = self.eval_fixed(&self.g);
        let big = fv.abs().max(gv.abs());
        if big.is_zero() {
            return Err(DynError::NotAMorphismAtPoint(
                "precision exhausted in height tracker".into(),
            ));
        }
        let arch = log_abs_int(&big) - self.prec as f64 * std::f64::consts::LN_2;
        self.dir = ((&fv << self.prec) / &big, (&gv << self.prec) / &big);
        let mut gcd_log = 0.0;
        if let Some(md) = &self.modulus {
            let fm = Self::eval_mod(&self.f, &self.res.0, &self.res.1, self.r, md);
            let gm = Self::eval_mod(&self.g, &self.res.0, &self.res.1, self.r, md);
            let g = fm.gcd(&gm).gcd(md);
            let next = md / &g;
            self.res = ((fm / &g).mod_floor(&next), (gm / &g).mod_floor(&next));
            self.modulus = Some(next);
            gcd_log = log_abs_int(&g);
        }
        let delta = arch - gcd_log;
        self.h = self.r as f64 * self.h + delta;
        self.err = self.r as f64 * self.err + 2.0 * LOG_EVAL_ERROR + self.h.abs() * f64::EPSILON;
        Ok(delta)
    }
}

/// Heights along an orbit, factor by factor.
pub(crate) enum OrbitHeights {
    Tracked(Vec<P1Tracker>),
    Exact {
        f: PolyEndo,
        point: ProjPoint,
        max_bits: u64,
    },
}

impl OrbitHeights {
    /// Tracked mode for rational points on products of P^1, exact iteration otherwise.
    pub(crate) fn new(f: &PolyEndo, p: &ProjPoint, steps: u32, max_bits: u64) -> Result<Self> {
        if p.ambient() != *f.ambient() {
            return Err(DynError::InvalidInput(format!(
                "point {} is not on {}",
                p,
                f.ambient()
            )));
        }
        if p.is_rational() && f.ambient().factors().iter().all(|&n| n == 1) {
            let mut trackers = Vec::new();
            for (i, block) in f.blocks().iter().enumerate() {
                let ints = ProjPoint::primitive_ints(&p.blocks()[i]).expect("rational block");
                match P1Tracker::new(block, f.block_degrees()[i], &ints, steps) {
                    Ok(t) => trackers.push(t),
                    Err(DynError::NotAMorphism(_)) => {
                        return Ok(OrbitHeights::Exact {
                            f: f.clone(),
                            point: p.clone(),
                            max_bits,
                        })
                    }
                    Err(e) => return Err(e),
                }
            }
            return Ok(OrbitHeights::Tracked(trackers));
        }
        Ok(OrbitHeights::Exact {
            f: f.clone(),
            point: p.clone(),
            max_bits,
        })
    }

    pub(crate) fn factor_heights(&self) -> Result<Vec<HeightValue>> {
        match self {
            OrbitHeights::Tracked(ts) => {
                Ok(ts.iter().map(|t| HeightValue::new(t.h, t.err)).collect())
            }
            OrbitHeights::Exact { point, .. } => {
                point.blocks().iter().map(|b| block_height(b)).collect()
            }
        }
    }

    pub(crate) fn advance(&mut self) -> Result<()> {
        match self {
            OrbitHeights::Tracked(ts) => {
                for t in ts.iter_mut() {
                    t.step()?;
                }
                Ok(())
            }
            OrbitHeights::Exact { f, point, max_bits } => {
                let next = crate::projective::evaluate(f, point)?;
                if next.bits() > *max_bits {
                    return Err(DynError::BudgetExceeded {
                        what: format!("coordinates exceed {} bits", max_bits),
                        partial: None,
                    });
                }
                *point = next;
                Ok(())
            }
        }
    }
}

/// Stopping and budget controls for canonical heights.
#[derive(Clone, Debug)]
pub struct CanonicalOptions {
    pub tol: f64,
    pub max_iter: u32,
    /// Bit budget for coordinates when the orbit has to be iterated exactly.
    pub max_bits: u64,
}

impl Default for CanonicalOptions {
    fn default() -> Self {
        CanonicalOptions {
            tol: 1e-9,
            max_iter: 64,
            max_bits: 1 << 16,
        }
    }
}

/// Sum of the two-sided constants of every factor, if all factors are P^1 morphisms.
pub(crate) fn product_p1_constants(f: &PolyEndo) -> Option<(f64, f64)> {
    if !f.ambient().factors().iter().all(|&n| n == 1) {
        return None;
    }
    let mut up = 0.0;
    let mut lo = 0.0;
    for (block, &r) in f.blocks().iter().zip(f.block_degrees()) {
        let c = p1_constants(block, r).ok()?;
        up += c.upper;
        lo += c.lower;
    }
    Some((up, lo))
}

pub fn canonical_height(f: &PolyEndo, p: &ProjPoint, tol: f64) -> Result<HeightValue> {
    canonical_height_with(
        f,
        p,
        &CanonicalOptions {
            tol,
            ..CanonicalOptions::default()
        },
    )
}

/// `lim h(f^n(P)) / r^n` with a rigorous tail bound whenever the map is a product of
/// P^1 morphisms of common degree, and successive-difference stabilization otherwise.
pub fn canonical_height_with(
    f: &PolyEndo,
    p: &ProjPoint,
    opts: &CanonicalOptions,
) -> Result<HeightValue> {
    let r = f
        .polarization_degree()
        .or_else(|| {
            let d = f.block_degrees();
            (d.iter().all(|&x| x == d[0]) && d[0] >= 2 && f.declared_polarization().is_some())
                .then_some(d[0])
        })
        .ok_or_else(|| DynError::Unsupported(format!("{} is not polarized", f.notation())))?;
    if r < 2 {
        return Err(DynError::Unsupported(
            "canonical heights need degree at least 2".into(),
        ));
    }
    if !opts.tol.is_finite() || opts.tol <= 0.0 {
        return Err(DynError::InvalidInput("tolerance must be positive".into()));
    }
    let rf = r as f64;
    let constants = product_p1_constants(f);

    // finite orbits have canonical height exactly zero
    let escape = constants.map(|(_, lo)| lo / (rf - 1.0) + 1e-9);
    let pre = orbit_with(
        f,
        p,
        &OrbitLimits {
            max_steps: opts.max_iter as usize,
            height_cutoff: escape.unwrap_or(f64::INFINITY),
            max_bits: 256,
        },
    )?;
    if pre.status == OrbitStatus::Cycle {
        return Ok(HeightValue::exact(0.0));
    }

    let tail = |n: u32| -> Option<f64> {
        constants.map(|(up, lo)| up.max(lo) * rf / (rf.powi(n as i32) * (rf - 1.0)))
    };
    let mut steps = opts.max_iter;
    if let Some((up, lo)) = constants {
        // smallest n whose tail bound is already below tol, plus slack for the difference test
        let c = up.max(lo) * rf / (rf - 1.0);
        if c > 0.0 {
            let need = ((c / opts.tol).ln() / rf.ln()).ceil().max(0.0) as u32 + 2;
            steps = steps.min(need.max(2));
        } else {
            steps = steps.min(2);
        }
    }
    let mut seq = OrbitHeights::new(f, p, steps, opts.max_bits)?;
    let mut current = sum_heights(&seq.factor_heights()?);
    let mut diff = f64::INFINITY;
    let mut scale = 1.0;
    let mut n_reached = 0;
    for n in 1..=steps {
        if let Err(e) = seq.advance() {
            return Err(match e {
                DynError::BudgetExceeded { what, .. } => DynError::BudgetExceeded {
                    what,
                    partial: Some(HeightValue {
                        value: current.value,
                        error: current.error + tail(n - 1).unwrap_or(diff),
                        rigorous: constants.is_some(),
                    }),
                },
                other => other,
            });
        }
        scale *= rf;
        let hn = sum_heights(&seq.factor_heights()?);
        let value = hn.value / scale;
        diff = (value - current.value).abs();
        current = HeightValue {
            value,
            error: hn.error / scale,
            rigorous: hn.rigorous,
        };
        n_reached = n;
        if tail(n).is_none_or(|t| t < opts.tol) && diff < opts.tol {
            break;
        }
    }
    let out = match tail(n_reached) {
        Some(t) => HeightValue {
            value: current.value,
            error: current.error + t,
            rigorous: current.rigorous,
        },
        None => HeightValue::heuristic(current.value, diff.max(current.error)),
    };
    Ok(out.clamped())
}

fn sum_heights(hs: &[HeightValue]) -> HeightValue {
    hs.iter().fold(HeightValue::exact(0.0), |acc, h| acc.add(h))
}

/// Néron–Tate height `(1/2) lim h(x([2^n]P)) / 4^n`, computed as half the canonical
/// height of the x-coordinate under the degree-4 duplication map.
pub fn neron_tate(e: &EllipticCurve, p: &EllPoint, tol: f64) -> Result<HeightValue> {
    let Some((x, _)) = p.coords() else {
        return Ok(HeightValue::exact(0.0));
    };
    e.check_point(p)?;
    let phi = e.duplication_map();
    let xp = ProjPoint::affine(x.clone());
    let h = canonical_height(&phi, &xp, 2.0 * tol)?;
    Ok(h.scale(0.5))
}
