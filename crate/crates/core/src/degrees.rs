//! Dynamical degrees and arithmetic-degree estimates.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{DynError, Result};
use crate::heights::{HeightValue, OrbitHeights};
use crate::linalg::{self, upoly, IntMatrix};
use crate::orbits::{is_preperiodic, orbit_with, Certificate, OrbitLimits, OrbitStatus};
use crate::projective::{morphism_check, PolyEndo, ProjPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeSource {
    Polarized,
    SpectralRadius,
    ProductRule,
    PowerRule,
}

impl fmt::Display for DegreeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DegreeSource::Polarized => "polarized",
            DegreeSource::SpectralRadius => "spectral-radius",
            DegreeSource::ProductRule => "product-rule",
            DegreeSource::PowerRule => "power-rule",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynDegree {
    pub value: f64,
    pub error: f64,
    pub source: DegreeSource,
}

/// Dyadic precision used when isolating the largest eigenvalue modulus.
const RADIUS_BITS: u64 = 60;

/// Largest eigenvalue modulus of an integer matrix, with an error bound.
///
/// `rho^2` is the largest real root of the characteristic polynomial of `M ⊗ M`
/// (its eigenvalues are the products of pairs of eigenvalues of `M`, and `|λ|^2`
/// appears for every eigenvalue), which is isolated with a Sturm chain.
pub fn spectral_radius(m: &IntMatrix) -> Result<(f64, f64)> {
    let n = m.len();
    if n == 0 || m.iter().any(|row| row.len() != n) {
        return Err(DynError::InvalidInput(
            "spectral radius needs a square matrix".into(),
        ));
    }
    if m.iter().flatten().all(|c| c.is_zero()) {
        return Err(DynError::InvalidInput(
            "spectral radius of the zero matrix".into(),
        ));
    }
    let cp = linalg::char_poly(&linalg::kronecker(m, m));
    let (lo, hi) = upoly::largest_real_root(&cp, RADIUS_BITS);
    if hi.is_zero() {
        return Ok((0.0, 0.0));
    }
    let scale = 2f64.powi(RADIUS_BITS as i32);
    let to_f = |v: &BigInt| v.to_f64().unwrap_or(f64::INFINITY) / scale;
    let (l, h) = (to_f(&lo).sqrt(), to_f(&hi).sqrt());
    let value = 0.5 * (l + h);
    Ok((value, 0.5 * (h - l) + value * 4.0 * f64::EPSILON))
}

fn factor_degree(f: &PolyEndo) -> Result<DynDegree> {
    if let Some(q) = f.declared_polarization() {
        return Ok(DynDegree {
            value: q as f64,
            error: 0.0,
            source: DegreeSource::Polarized,
        });
    }
    if let Some(m) = f.ns_matrix() {
        let (value, error) = spectral_radius(m)?;
        return Ok(DynDegree {
            value,
            error,
            source: DegreeSource::SpectralRadius,
        });
    }
    match morphism_check(f) {
        Ok(true) => Ok(DynDegree {
            value: f.degree() as f64,
            error: 0.0,
            source: DegreeSource::Polarized,
        }),
        Ok(false) => Err(DynError::NotAMorphism(f.notation())),
        Err(DynError::Unverified(msg)) => Err(DynError::Unresolvable(format!(
            "{}; declare a polarization or supply an NS matrix",
            msg
        ))),
        Err(e) => Err(e),
    }
}

/// Dynamical degree from a declared polarization, an NS matrix, or the product rule.
pub fn dyn_degree(f: &PolyEndo) -> Result<DynDegree> {
    if f.ambient().is_single() || f.declared_polarization().is_some() || f.ns_matrix().is_some() {
        return factor_degree(f);
    }
    let mut best: Option<DynDegree> = None;
    for i in 0..f.blocks().len() {
        let d = factor_degree(&f.factor(i))?;
        if best.is_none_or(|b| d.value > b.value) {
            best = Some(d);
        }
    }
    let b = best.expect("at least one factor");
    Ok(DynDegree {
        value: b.value,
        error: b.error,
        source: DegreeSource::ProductRule,
    })
}

/// `δ(f^n) = δ(f)^n`.
pub fn dyn_degree_of_iterate(f: &PolyEndo, n: u32) -> Result<DynDegree> {
    let d = dyn_degree(f)?;
    let value = d.value.powi(n as i32);
    Ok(DynDegree {
        value,
        error: n as f64 * d.value.powi(n as i32 - 1) * d.error,
        source: DegreeSource::PowerRule,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithVerdict {
    ExactOnePreperiodic,
    EqualsDeltaCertified,
    Estimate,
}

impl fmt::Display for ArithVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArithVerdict::ExactOnePreperiodic => "exact-one-preperiodic",
            ArithVerdict::EqualsDeltaCertified => "equals-delta-certified",
            ArithVerdict::Estimate => "estimate",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HeightChoice {
    /// Sum of the factor heights.
    #[default]
    Sum,
    /// Largest factor height.
    Max,
}

#[derive(Clone, Debug)]
pub struct ArithDegreeEstimate {
    pub point: ProjPoint,
    /// `h_H(f^n x)` with `h_H = 1 + h`, for `n = 0..`.
    pub height_trace: Vec<HeightValue>,
    /// `h_H(f^(n+1) x) / h_H(f^n x)`.
    pub ratio_trace: Vec<f64>,
    /// `h_H(f^n x)^(1/n)` for `n >= 1`.
    pub root_trace: Vec<f64>,
    /// Headline estimate, clamped to `[1, δ]`.
    pub estimate: f64,
    /// Geometric mean of the last half of the ratio trace.
    pub ratio_geometric_mean: f64,
    pub dyn_degree: f64,
    pub verdict: ArithVerdict,
}

#[derive(Clone, Debug)]
pub struct ArithOptions {
    pub n_max: usize,
    pub height: HeightChoice,
    pub max_bits: u64,
}

impl Default for ArithOptions {
    fn default() -> Self {
        ArithOptions {
            n_max: 20,
            height: HeightChoice::Sum,
            max_bits: 1 << 16,
        }
    }
}

/// Aitken extrapolation of the last three terms, falling back to the last term when
/// the sequence is not behaving geometrically.
pub fn extrapolate_ratios(ratios: &[f64]) -> f64 {
    let n = ratios.len();
    if n == 0 {
        return 1.0;
    }
    let last = ratios[n - 1];
    if n < 3 {
        return last;
    }
    let (r0, r1, r2) = (ratios[n - 3], ratios[n - 2], ratios[n - 1]);
    let denom = r2 - 2.0 * r1 + r0;
    if !denom.is_finite() || denom.abs() < 1e-14 * r2.abs().max(1.0) {
        return last;
    }
    let a = r2 - (r2 - r1) * (r2 - r1) / denom;
    if !a.is_finite() || (a - r2).abs() > (r2 - r0).abs() {
        return last;
    }
    a
}

fn geometric_mean_tail(ratios: &[f64]) -> f64 {
    if ratios.is_empty() {
        return 1.0;
    }
    let k = ratios.len().div_ceil(2);
    let tail = &ratios[ratios.len() - k..];
    (tail.iter().map(|r| r.ln()).sum::<f64>() / k as f64).exp()
}

/// Summarizes a trace of ample heights `h_H(f^n x)` (each >= 1).
pub(crate) fn summarize_trace(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let ratios = values.windows(2).map(|w| w[1] / w[0]).collect();
    let roots = values
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, v)| v.powf(1.0 / n as f64))
        .collect();
    (ratios, roots)
}

pub fn arith_degree_estimate(
    f: &PolyEndo,
    p: &ProjPoint,
    n_max: usize,
) -> Result<ArithDegreeEstimate> {
    arith_degree_estimate_with(
        f,
        p,
        &ArithOptions {
            n_max,
            ..ArithOptions::default()
        },
    )
}

pub fn arith_degree_estimate_with(
    f: &PolyEndo,
    p: &ProjPoint,
    opts: &ArithOptions,
) -> Result<ArithDegreeEstimate> {
    if opts.n_max < 4 {
        return Err(DynError::InvalidInput(format!(
            "n_max must be >= 4, got {}",
            opts.n_max
        )));
    }
    let delta = dyn_degree(f)?.value;
    let mut est = ArithDegreeEstimate {
        point: p.clone(),
        height_trace: Vec::new(),
        ratio_trace: Vec::new(),
        root_trace: Vec::new(),
        estimate: 1.0,
        ratio_geometric_mean: 1.0,
        dyn_degree: delta,
        verdict: ArithVerdict::Estimate,
    };

    // certified cases first
    let rigorous_p1 =
        f.ambient().factors().iter().all(|&n| n == 1) && f.block_degrees().iter().all(|&r| r >= 2);
    let mut wandering_polarized = false;
    if rigorous_p1 {
        let pre = is_preperiodic(f, p)?;
        if pre.preperiodic {
            est.verdict = ArithVerdict::ExactOnePreperiodic;
        } else if f.ambient().is_single()
            && matches!(pre.certificate, Certificate::Escape { hhat_lower, .. } if hhat_lower > 0.0)
        {
            wandering_polarized = true;
        }
    } else {
        let rec = orbit_with(
            f,
            p,
            &OrbitLimits {
                max_steps: opts.n_max.max(64),
                height_cutoff: f64::INFINITY,
                max_bits: 1024,
            },
        )?;
        if rec.status == OrbitStatus::Cycle {
            est.verdict = ArithVerdict::ExactOnePreperiodic;
        }
    }

    let mut seq = OrbitHeights::new(f, p, opts.n_max as u32, opts.max_bits)?;
    let mut budget_hit = false;
    for n in 0..=opts.n_max {
        if n > 0 {
            match seq.advance() {
                Ok(()) => {}
                Err(DynError::BudgetExceeded { .. }) => {
                    budget_hit = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let hs = seq.factor_heights()?;
        let h = match opts.height {
            HeightChoice::Sum => hs.iter().fold(HeightValue::exact(0.0), |a, h| a.add(h)),
            HeightChoice::Max => *hs
                .iter()
                .max_by(|a, b| a.value.total_cmp(&b.value))
                .expect("nonempty"),
        };
        est.height_trace.push(HeightValue {
            value: 1.0 + h.value,
            ..h
        });
    }
    let values: Vec<f64> = est.height_trace.iter().map(|h| h.value).collect();
    let (ratios, roots) = summarize_trace(&values);
    est.ratio_trace = ratios;
    est.root_trace = roots;
    est.ratio_geometric_mean = geometric_mean_tail(&est.ratio_trace);
    est.estimate = match est.verdict {
        ArithVerdict::ExactOnePreperiodic => 1.0,
        _ => extrapolate_ratios(&est.ratio_trace).clamp(1.0, delta),
    };
    if wandering_polarized {
        est.verdict = ArithVerdict::EqualsDeltaCertified;
    }
    if budget_hit && est.verdict == ArithVerdict::Estimate {
        return Err(DynError::ArithDegreeBudget(Box::new(est)));
    }
    Ok(est)
}

impl ArithDegreeEstimate {
    /// The certified value when there is one, the numerical estimate otherwise.
    pub fn alpha(&self) -> f64 {
        match self.verdict {
            ArithVerdict::ExactOnePreperiodic => 1.0,
            ArithVerdict::EqualsDeltaCertified => self.dyn_degree,
            ArithVerdict::Estimate => self.estimate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Preperiodic,
    MaxDegree,
    Unknown,
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PointClass::Preperiodic => "preperiodic",
            PointClass::MaxDegree => "max-degree",
            PointClass::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// For polarized maps a point has arithmetic degree 1 if preperiodic and `δ` otherwise.
pub fn classify_point_polarized(f: &PolyEndo, p: &ProjPoint) -> Result<PointClass> {
    if f.polarization_degree().is_none() {
        return Err(DynError::Unsupported(format!(
            "{} is not polarized",
            f.notation()
        )));
    }
    match is_preperiodic(f, p) {
        Ok(res) if res.preperiodic => Ok(PointClass::Preperiodic),
        Ok(res) => match res.certificate {
            Certificate::Escape { hhat_lower, .. } if hhat_lower > 0.0 => Ok(PointClass::MaxDegree),
            _ => Ok(PointClass::Unknown),
        },
        Err(DynError::Undecided(_)) => Ok(PointClass::Unknown),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductClass {
    /// Certified arithmetic degree of each factor coordinate (1 or the factor degree).
    pub factor_alphas: Vec<f64>,
    pub factor_degrees: Vec<f64>,
    pub alpha: f64,
    pub dyn_degree: f64,
    /// `α < δ`.
    pub in_zf: bool,
}

/// Certified classification on a product of polarized P^1 maps: each coordinate is
/// classified by its own factor and `α = max` over the factors.
pub fn classify_product(f: &PolyEndo, p: &ProjPoint) -> Result<ProductClass> {
    let mut alphas = Vec::new();
    let mut degrees = Vec::new();
    for i in 0..f.blocks().len() {
        let fi = f.factor(i);
        let di = fi.degree() as f64;
        let alpha = match classify_point_polarized(&fi, &p.block_point(i))? {
            PointClass::Preperiodic => 1.0,
            PointClass::MaxDegree => di,
            PointClass::Unknown => {
                return Err(DynError::Undecided(format!("factor {} of {}", i + 1, p)));
            }
        };
        alphas.push(alpha);
        degrees.push(di);
    }
    let alpha = alphas.iter().cloned().fold(1.0, f64::max);
    let delta = degrees.iter().cloned().fold(1.0, f64::max);
    Ok(ProductClass {
        factor_alphas: alphas,
        factor_degrees: degrees,
        alpha,
        dyn_degree: delta,
        in_zf: alpha < delta,
    })
}
