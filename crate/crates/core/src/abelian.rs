//! Integer-matrix endomorphisms (with translation) of `E^g` and their arithmetic degrees.
//!
//! Heights are handled through a rank-one lattice model: every probe point is written as
//! `k G + T` for a fixed point `G` of infinite order and a torsion point `T`. The
//! Néron–Tate height is a quadratic form, so a tuple with coefficient vector `v` has
//! height `ĥ(G) |v|^2`, and iterating `F = τ_a ∘ M` acts on coefficients as
//! `v -> M v + a`. The model is checked against direct Néron–Tate computations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{log_abs_int, AlgNum};
use crate::degrees::{
    extrapolate_ratios, spectral_radius, summarize_trace, DegreeSource, DynDegree,
};
use crate::elliptic::{torsion_subgroup_with, EllPoint, EllipticCurve, TorsionPoint};
use crate::error::{DynError, Result};
use crate::exec::{par_map, Execution};
use crate::heights::{neron_tate, HeightValue};
use crate::linalg::{self, IntMatrix};
use crate::orbits::is_preperiodic;
use crate::projective::ProjPoint;

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixEndo {
    curve: EllipticCurve,
    m: IntMatrix,
    translation: Vec<EllPoint>,
}

impl MatrixEndo {
    pub fn new(curve: EllipticCurve, m: IntMatrix, translation: Vec<EllPoint>) -> Result<Self> {
        let g = m.len();
        if !(1..=2).contains(&g) || m.iter().any(|row| row.len() != g) {
            return Err(DynError::InvalidInput(format!(
                "matrix endomorphisms act on E^1 or E^2; got a {}-row matrix",
                g
            )));
        }
        if linalg::determinant(&m).is_zero() {
            return Err(DynError::InvalidInput(
                "the isogeny part must have nonzero determinant".into(),
            ));
        }
        if translation.len() != g {
            return Err(DynError::InvalidInput(format!(
                "translation needs {} points",
                g
            )));
        }
        for t in &translation {
            curve.check_point(t)?;
        }
        Ok(MatrixEndo {
            curve,
            m,
            translation,
        })
    }

    /// Pure isogeny (no translation).
    pub fn isogeny(curve: EllipticCurve, m: IntMatrix) -> Result<Self> {
        let g = m.len();
        MatrixEndo::new(curve, m, vec![EllPoint::Infinity; g])
    }

    pub fn curve(&self) -> &EllipticCurve {
        &self.curve
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.m
    }

    pub fn translation(&self) -> &[EllPoint] {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }
}

/// `Q_i = a_i + Σ_j [M_ij] P_j`.
pub fn matrix_endo_apply(f: &MatrixEndo, p: &[EllPoint]) -> Result<Vec<EllPoint>> {
    if p.len() != f.dim() {
        return Err(DynError::InvalidInput(format!(
            "expected {} points, got {}",
            f.dim(),
            p.len()
        )));
    }
    let e = &f.curve;
    for q in p {
        e.check_point(q)?;
    }
    let mut out = Vec::with_capacity(p.len());
    for (i, row) in f.m.iter().enumerate() {
        let mut acc = f.translation[i].clone();
        for (mij, pj) in row.iter().zip(p) {
            acc = e.add(&acc, &e.mul(mij, pj)?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// True when `p` has infinite order: its abscissa is not preperiodic under duplication.
pub fn is_non_torsion(e: &EllipticCurve, p: &EllPoint) -> Result<bool> {
    let Some((x, _)) = p.coords() else {
        return Ok(false);
    };
    let phi = e.duplication_map();
    Ok(!is_preperiodic(&phi, &ProjPoint::affine(x.clone()))?.preperiodic)
}

/// A point of infinite order of small height: rational if one exists with `|x| <= 200`,
/// otherwise a point `(x, sqrt(x^3 + a x + b))` over a quadratic field.
pub fn find_generator(e: &EllipticCurve) -> Result<Option<EllPoint>> {
    let mut xs: Vec<i64> = (-200..=200).collect();
    xs.sort_by_key(|x| (x.abs(), *x));
    for &x in &xs {
        if let Some(p) = e.lift_x(x) {
            if is_non_torsion(e, &p)? {
                return Ok(Some(p));
            }
        }
    }
    for &x in xs.iter().take(41) {
        let rhs = x as i128 * x as i128 * x as i128 + e.a() as i128 * x as i128 + e.b() as i128;
        if rhs == 0 {
            continue;
        }
        let Ok(rhs) = i64::try_from(rhs) else {
            continue;
        };
        let p = EllPoint::affine(AlgNum::from(x), AlgNum::sqrt_int(rhs));
        if p.coords().unwrap().1.field().is_some() && is_non_torsion(e, &p)? {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Rank-one lattice `Z G + Tor` used to model heights of probe tuples.
#[derive(Clone, Debug)]
pub struct Lattice {
    curve: EllipticCurve,
    generator: EllPoint,
    torsion: Vec<TorsionPoint>,
    hhat: HeightValue,
    search: i64,
}

impl Lattice {
    pub fn new(curve: EllipticCurve, generator: EllPoint, torsion_ceiling: u32) -> Result<Self> {
        curve.check_point(&generator)?;
        if !is_non_torsion(&curve, &generator)? {
            return Err(DynError::InsufficientGenerators(format!(
                "{} is a torsion point",
                generator
            )));
        }
        let hhat = match neron_tate(&curve, &generator, 1e-9) {
            Ok(h) => h,
            Err(DynError::BudgetExceeded {
                partial: Some(h), ..
            }) => h,
            Err(e) => return Err(e),
        };
        Ok(Lattice {
            curve,
            generator,
            torsion: torsion_subgroup_with(&curve, torsion_ceiling)?,
            hhat,
            search: 64,
        })
    }

    pub fn generator(&self) -> &EllPoint {
        &self.generator
    }

    pub fn torsion(&self) -> &[TorsionPoint] {
        &self.torsion
    }

    pub fn generator_height(&self) -> HeightValue {
        self.hhat
    }

    pub fn point(&self, k: i64, t: &EllPoint) -> Result<EllPoint> {
        self.curve.add(&self.curve.mul_i64(k, &self.generator)?, t)
    }

    /// Writes `p = k G + T` with `|k| <= search` and `T` rational torsion, if possible.
    pub fn decompose(&self, p: &EllPoint) -> Result<Option<(i64, EllPoint)>> {
        let e = &self.curve;
        let neg_g = e.neg(&self.generator);
        let mut up = p.clone();
        let mut down = p.clone();
        for k in 0..=self.search {
            // up = p - k G, down = p + k G
            if let Some(t) = self.torsion.iter().find(|t| t.point == up) {
                return Ok(Some((k, t.point.clone())));
            }
            if let Some(t) = self.torsion.iter().find(|t| t.point == down) {
                return Ok(Some((-k, t.point.clone())));
            }
            up = e.add(&up, &neg_g)?;
            down = e.add(&down, &self.generator)?;
        }
        Ok(None)
    }

    fn coefficients(&self, pts: &[EllPoint]) -> Result<Vec<i64>> {
        pts.iter()
            .map(|p| {
                self.decompose(p)?.map(|(k, _)| k).ok_or_else(|| {
                    DynError::InsufficientGenerators(format!(
                        "{} is not in Z G + Tor for G = {}",
                        p, self.generator
                    ))
                })
            })
            .collect()
    }
}

fn sq_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

fn affine_step(m: &IntMatrix, v: &[BigInt], a: &[BigInt]) -> Vec<BigInt> {
    linalg::mat_vec(m, v)
        .into_iter()
        .zip(a)
        .map(|(x, y)| x + y)
        .collect()
}

/// Growth rate `(|M^N c|^2 / |M^(N/2) c|^2)^(2/N)`, maximized over a few probe vectors,
/// with `N` doubled from 20 until two successive values agree to 1e-6 (or `N = 4096`).
fn squared_norm_growth(m: &IntMatrix) -> (f64, usize) {
    let g = m.len();
    let mut probes: Vec<Vec<BigInt>> = (0..g)
        .map(|i| (0..g).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    probes.push((1..=g as i64).map(BigInt::from).collect());
    let rate = |n: usize| -> f64 {
        probes
            .iter()
            .map(|c| {
                let mut v = c.clone();
                let mut half = BigInt::zero();
                for k in 1..=n {
                    v = linalg::mat_vec(m, &v);
                    if k == n / 2 {
                        half = sq_norm(&v);
                    }
                }
                let full = sq_norm(&v);
                if full.is_zero() || half.is_zero() {
                    return 0.0;
                }
                ((log_abs_int(&full) - log_abs_int(&half)) * 2.0 / n as f64).exp()
            })
            .fold(0.0, f64::max)
    };
    let mut n = 20;
    let mut prev = rate(n);
    while n < 4096 {
        let next = rate(2 * n);
        n *= 2;
        let done = (next - prev).abs() < 1e-6 * next.max(1.0);
        prev = next;
        if done {
            break;
        }
    }
    (prev, n)
}

#[derive(Clone, Debug)]
pub struct DegreeCheck {
    pub rho_squared: f64,
    pub growth: f64,
    pub iterations: usize,
    pub relative_error: f64,
    pub passed: bool,
}

/// Relative tolerance between `ρ(M)^2` and the observed height growth.
pub const DEGREE_CHECK_TOL: f64 = 1e-2;

pub fn matrix_endo_degree_check(f: &MatrixEndo) -> Result<DegreeCheck> {
    let (rho, _) = spectral_radius(&f.m)?;
    let rho2 = rho * rho;
    let (growth, iterations) = squared_norm_growth(&f.m);
    let rel = (growth - rho2).abs() / rho2;
    Ok(DegreeCheck {
        rho_squared: rho2,
        growth,
        iterations,
        relative_error: rel,
        passed: rel <= DEGREE_CHECK_TOL,
    })
}

/// `δ = ρ(M)^2`, accepted only after the height-growth cross-check passes.
pub fn matrix_endo_dyn_degree(f: &MatrixEndo) -> Result<DynDegree> {
    let check = matrix_endo_degree_check(f)?;
    if !check.passed {
        return Err(DynError::Invariant(format!(
            "height growth {} disagrees with rho^2 = {} (relative error {:.3e})",
            check.growth, check.rho_squared, check.relative_error
        )));
    }
    let (rho, err) = spectral_radius(&f.m)?;
    Ok(DynDegree {
        value: rho * rho,
        error: 2.0 * rho * err + err * err,
        source: DegreeSource::SpectralRadius,
    })
}

/// Compares `Σ ĥ(F(P)_i)` computed directly with the lattice model `ĥ(G) |M c + a|^2`.
/// Returns the absolute discrepancy and the allowed error.
pub fn model_discrepancy(
    f: &MatrixEndo,
    lattice: &Lattice,
    probe: &[EllPoint],
) -> Result<(f64, f64)> {
    let c = lattice.coefficients(probe)?;
    let a = lattice.coefficients(&f.translation)?;
    let v = affine_step(&f.m, &to_big(&c), &to_big(&a));
    let model = lattice.hhat.value * sq_norm(&v).to_f64().unwrap_or(f64::INFINITY);
    let model_err = lattice.hhat.error * sq_norm(&v).to_f64().unwrap_or(f64::INFINITY);
    let image = matrix_endo_apply(f, probe)?;
    let mut direct = HeightValue::exact(0.0);
    for q in &image {
        let h = match neron_tate(&f.curve, q, 1e-9) {
            Ok(h) => h,
            Err(DynError::BudgetExceeded {
                partial: Some(h), ..
            }) => h,
            Err(e) => return Err(e),
        };
        direct = direct.add(&h);
    }
    Ok((
        (direct.value - model).abs(),
        direct.error + model_err + 1e-9,
    ))
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Hypothesized `B + p`: `B + Tor = {Q : V Q torsion}` for the integer rows `forms`
/// and `p` given by its generator coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub forms: Vec<Vec<i64>>,
    pub p: Option<Vec<i64>>,
}

impl Hypothesis {
    /// `B = 0`: the low-degree locus is torsion (translated by `p`).
    pub fn trivial(g: usize) -> Self {
        Hypothesis {
            forms: (0..g)
                .map(|i| (0..g).map(|j| (i == j) as i64).collect())
                .collect(),
            p: None,
        }
    }

    fn kernel_contains(&self, v: &[i64]) -> bool {
        self.forms
            .iter()
            .all(|row| row.iter().zip(v).map(|(a, b)| a * b).sum::<i64>() == 0)
    }
}

#[derive(Clone, Debug)]
pub struct StructureOptions {
    /// Probe coordinates are `k G + T` with `|k| <= multiples`.
    pub multiples: i64,
    /// Only probe coordinates whose abscissa has height <= this bound are used.
    pub height_bound: f64,
    pub n_max: usize,
    pub tol: f64,
    pub generator: Option<EllPoint>,
    pub hypothesis: Option<Hypothesis>,
    pub torsion_ceiling: u32,
    pub exec: Execution,
}

impl Default for StructureOptions {
    fn default() -> Self {
        StructureOptions {
            multiples: 2,
            height_bound: 20.0,
            n_max: 20,
            tol: 0.5,
            generator: None,
            hypothesis: None,
            torsion_ceiling: crate::elliptic::TORSION_CEILING,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub point: Vec<EllPoint>,
    pub coefficients: Vec<i64>,
    pub alpha: f64,
    pub low: bool,
    pub predicted: bool,
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub delta: f64,
    pub degree_check: DegreeCheck,
    pub generator: EllPoint,
    pub hypothesis: Hypothesis,
    /// Coefficients of the translation point `p` used for the prediction.
    pub p: Vec<i64>,
    /// `F(B + p) ⊆ B + p + Tor` holds for the hypothesis.
    pub invariant: bool,
    pub probes: Vec<ProbeResult>,
    pub violations: Vec<usize>,
    /// Probes whose verdict changes after translating by a rational torsion tuple.
    pub shift_violations: usize,
    pub alpha_above_delta: usize,
    pub model_checks: usize,
    pub model_failures: usize,
}

impl StructureReport {
    pub fn low_points(&self) -> Vec<&ProbeResult> {
        self.probes.iter().filter(|p| p.low).collect()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
            && self.shift_violations == 0
            && self.alpha_above_delta == 0
            && self.model_failures == 0
            && self.invariant
            && self.degree_check.passed
    }
}

/// Arithmetic degree of a tuple with generator coefficients `c` under `v -> M v + a`,
/// using `1 + Σ ĥ` as the ample height.
pub fn lattice_alpha(
    m: &IntMatrix,
    a: &[i64],
    c: &[i64],
    hhat_g: f64,
    n_max: usize,
    delta: f64,
) -> f64 {
    let a = to_big(a);
    let mut v = to_big(c);
    let mut values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            v = affine_step(m, &v, &a);
        }
        let s = sq_norm(&v);
        let t = if s.is_zero() {
            0.0
        } else {
            (log_abs_int(&s) + hhat_g.ln()).exp()
        };
        values.push(1.0 + t);
    }
    let (ratios, _) = summarize_trace(&values);
    extrapolate_ratios(&ratios).clamp(1.0, delta)
}

/// Checks that every probe of low arithmetic degree lies in the hypothesized `B + p + Tor`
/// and vice versa.
pub fn zf_structure_check(f: &MatrixEndo, d: u32, b: f64, n_max: usize) -> Result<StructureReport> {
    zf_structure_check_with(
        f,
        d,
        &StructureOptions {
            height_bound: b,
            n_max,
            ..StructureOptions::default()
        },
    )
}

pub fn zf_structure_check_with(
    f: &MatrixEndo,
    d: u32,
    opts: &StructureOptions,
) -> Result<StructureReport> {
    if d != 1 {
        return Err(DynError::Unsupported(format!(
            "structure checks use rational probes (d = 1), got d = {}",
            d
        )));
    }
    let g = f.dim();
    let e = f.curve;
    let delta = matrix_endo_dyn_degree(f)?.value;
    if delta <= 1.0 + 1e-9 {
        return Err(DynError::Unsupported(
            "the structure check needs dynamical degree > 1".into(),
        ));
    }
    let degree_check = matrix_endo_degree_check(f)?;
    let generator = match &opts.generator {
        Some(p) => p.clone(),
        None => find_generator(&e)?.ok_or_else(|| {
            DynError::InsufficientGenerators(format!("no point of infinite order found on {}", e))
        })?,
    };
    let lattice = Lattice::new(e, generator.clone(), opts.torsion_ceiling)?;
    let a = lattice.coefficients(&f.translation)?;
    let hyp = opts
        .hypothesis
        .clone()
        .unwrap_or_else(|| Hypothesis::trivial(g));
    if hyp.forms.iter().any(|row| row.len() != g) {
        return Err(DynError::InvalidInput(format!(
            "hypothesis forms must have {} entries",
            g
        )));
    }

    // invariance of B under M: the rows of V M lie in the row space of V
    let v_mat: IntMatrix = hyp.forms.iter().map(|r| to_big(r)).collect();
    let vm = if v_mat.is_empty() {
        Vec::new()
    } else {
        linalg::mat_mul(&v_mat, &f.m)
    };
    let mut stacked = v_mat.clone();
    stacked.extend(vm);
    let b_invariant = v_mat.is_empty() || linalg::rank(&stacked) == linalg::rank(&v_mat);
    let moves_into_b = |cp: &[i64]| -> bool {
        let img = affine_step(&f.m, &to_big(cp), &to_big(&a));
        let diff: Vec<i64> = img
            .iter()
            .zip(cp)
            .map(|(x, y)| x.to_i64().unwrap_or(i64::MAX) - y)
            .collect();
        hyp.kernel_contains(&diff)
    };
    let (p, p_ok) = match &hyp.p {
        Some(p) => (p.clone(), moves_into_b(p)),
        None => {
            let k = opts.multiples.max(2);
            let mut cands: Vec<Vec<i64>> = vec![Vec::new()];
            for _ in 0..g {
                cands = cands
                    .into_iter()
                    .flat_map(|v| {
                        (-k..=k).map(move |x| {
                            let mut w = v.clone();
                            w.push(x);
                            w
                        })
                    })
                    .collect();
            }
            cands.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
            match cands.into_iter().find(|c| moves_into_b(c)) {
                Some(c) => (c, true),
                None => (vec![0; g], false),
            }
        }
    };

    // probe coordinates k G + T of bounded height
    let mut coords: Vec<(i64, EllPoint)> = Vec::new();
    for k in -opts.multiples..=opts.multiples {
        for t in lattice.torsion() {
            let q = lattice.point(k, &t.point)?;
            let h = match q.coords() {
                None => 0.0,
                Some((x, _)) => x.abs_height().value,
            };
            if h <= opts.height_bound + 1e-12 {
                coords.push((k, q));
            }
        }
    }
    let mut tuples: Vec<(Vec<i64>, Vec<EllPoint>)> = vec![(Vec::new(), Vec::new())];
    for _ in 0..g {
        let mut next = Vec::new();
        for (ks, ps) in &tuples {
            for (k, q) in &coords {
                let mut ks2 = ks.clone();
                ks2.push(*k);
                let mut ps2 = ps.clone();
                ps2.push(q.clone());
                next.push((ks2, ps2));
            }
        }
        tuples = next;
    }

    let hg = lattice.generator_height().value;
    let predicted = |c: &[i64]| {
        let diff: Vec<i64> = c.iter().zip(&p).map(|(x, y)| x - y).collect();
        hyp.kernel_contains(&diff)
    };
    let probes: Vec<ProbeResult> = par_map(opts.exec, &tuples, |(c, pts)| {
        let alpha = lattice_alpha(&f.m, &a, c, hg, opts.n_max, delta);
        ProbeResult {
            point: pts.clone(),
            coefficients: c.clone(),
            alpha,
            low: alpha < delta - opts.tol,
            predicted: predicted(c),
        }
    });
    let violations: Vec<usize> = probes
        .iter()
        .enumerate()
        .filter(|(_, p)| p.low != p.predicted)
        .map(|(i, _)| i)
        .collect();
    let alpha_above_delta = probes.iter().filter(|p| p.alpha > delta + opts.tol).count();

    // translating by rational torsion must not change any verdict
    let mut shifts: Vec<Vec<EllPoint>> = vec![Vec::new()];
    for _ in 0..g {
        shifts = shifts
            .into_iter()
            .flat_map(|v| {
                lattice.torsion().iter().map(move |t| {
                    let mut w = v.clone();
                    w.push(t.point.clone());
                    w
                })
            })
            .collect();
    }
    let shift_results = par_map(opts.exec, &probes, |pr| -> Result<usize> {
        let mut bad = 0;
        for s in &shifts {
            let moved: Vec<EllPoint> = pr
                .point
                .iter()
                .zip(s)
                .map(|(q, t)| e.add(q, t))
                .collect::<Result<_>>()?;
            let c = lattice.coefficients(&moved)?;
            let alpha = lattice_alpha(&f.m, &a, &c, hg, opts.n_max, delta);
            if (alpha < delta - opts.tol) != pr.low {
                bad += 1;
            }
        }
        Ok(bad)
    });
    let mut shift_violations = 0;
    for r in shift_results {
        shift_violations += r?;
    }

    // model check on the probes built from the smallest multiples
    let mut model_checks = 0;
    let mut model_failures = 0;
    if generator
        .coords()
        .is_some_and(|(x, y)| x.as_rat().is_some() && y.as_rat().is_some())
    {
        let sample: Vec<&Vec<EllPoint>> = tuples
            .iter()
            .filter(|(c, _)| c.iter().all(|k| k.abs() <= 1))
            .map(|(_, p)| p)
            .take(8)
            .collect();
        for probe in sample {
            let (diff, allowed) = model_discrepancy(f, &lattice, probe)?;
            model_checks += 1;
            if diff > allowed {
                model_failures += 1;
            }
        }
    }

    Ok(StructureReport {
        delta,
        degree_check,
        generator,
        hypothesis: hyp,
        p,
        invariant: b_invariant && p_ok,
        probes,
        violations,
        shift_violations,
        alpha_above_delta,
        model_checks,
        model_failures,
    })
}

#[derive(Clone, Debug)]
pub struct UbcRow {
    pub a: i64,
    pub b: i64,
    pub order: Option<usize>,
    pub structure: Option<String>,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug)]
pub struct UbcReport {
    pub rows: Vec<UbcRow>,
    pub max_order: Option<usize>,
    pub histogram: BTreeMap<usize, usize>,
    /// Curves whose torsion exceeds the configured ceiling.
    pub ceiling_violations: usize,
    pub ceiling: u32,
}

/// Rational torsion orders across a family of curves.
pub fn torsion_count_ubc(
    curves: &[(i64, i64)],
    ceiling: u32,
    exec: Execution,
) -> Result<UbcReport> {
    let rows = par_map(exec, curves, |&(a, b)| -> Result<UbcRow> {
        match EllipticCurve::new(a, b) {
            Err(e) => Ok(UbcRow {
                a,
                b,
                order: None,
                structure: None,
                diagnostic: Some(e.to_string()),
            }),
            Ok(curve) => {
                let t = torsion_subgroup_with(&curve, ceiling)?;
                Ok(UbcRow {
                    a,
                    b,
                    order: Some(t.len()),
                    structure: Some(crate::elliptic::torsion_structure(&t)),
                    diagnostic: None,
                })
            }
        }
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut histogram = BTreeMap::new();
    for r in &rows {
        if let Some(o) = r.order {
            *histogram.entry(o).or_insert(0) += 1;
        }
    }
    Ok(UbcReport {
        max_order: rows.iter().filter_map(|r| r.order).max(),
        ceiling_violations: rows
            .iter()
            .filter(|r| r.order.is_some_and(|o| o > ceiling as usize))
            .count(),
        rows,
        histogram,
        ceiling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_matrix;

    fn e8() -> EllipticCurve {
        EllipticCurve::new(0, 8).unwrap()
    }

    #[test]
    fn apply_examples() {
        let e = e8();
        let p = EllPoint::from_ints(1, 3);
        let t = EllPoint::from_ints(-2, 0);
        let id = MatrixEndo::isogeny(e, int_matrix(&[vec![1, 0], vec![0, 1]])).unwrap();
        assert_eq!(
            matrix_endo_apply(&id, &[p.clone(), t.clone()]).unwrap(),
            vec![p.clone(), t.clone()]
        );
        let d23 = MatrixEndo::isogeny(e, int_matrix(&[vec![2, 0], vec![0, 3]])).unwrap();
        let out = matrix_endo_apply(&d23, &[p.clone(), t.clone()]).unwrap();
        assert_eq!(out, vec![e.double(&p).unwrap(), t.clone()]);
        let sh = MatrixEndo::isogeny(e, int_matrix(&[vec![1, 1], vec![0, 1]])).unwrap();
        let q = e.double(&p).unwrap();
        let out = matrix_endo_apply(&sh, &[p.clone(), q.clone()]).unwrap();
        assert_eq!(out, vec![e.add(&p, &q).unwrap(), q]);
    }

    #[test]
    fn degree_examples() {
        let e = e8();
        let cases = [
            (int_matrix(&[vec![3]]), 9.0),
            (int_matrix(&[vec![2, 0], vec![0, 3]]), 9.0),
            (
                int_matrix(&[vec![1, 1], vec![1, 0]]),
                ((1.0 + 5f64.sqrt()) / 2.0).powi(2),
            ),
            (int_matrix(&[vec![1, 1], vec![0, 1]]), 1.0),
        ];
        for (m, want) in cases {
            let f = MatrixEndo::isogeny(e, m).unwrap();
            let d = matrix_endo_dyn_degree(&f).unwrap();
            assert!((d.value - want).abs() < 1e-9, "{} vs {}", d.value, want);
        }
    }

    #[test]
    fn decomposition_round_trip() {
        let e = e8();
        let lat = Lattice::new(e, EllPoint::from_ints(1, 3), 12).unwrap();
        let t = EllPoint::from_ints(-2, 0);
        for k in -3..=3 {
            let p = lat.point(k, &t).unwrap();
            assert_eq!(lat.decompose(&p).unwrap(), Some((k, t.clone())));
        }
    }

    #[test]
    fn ubc_family() {
        let curves: Vec<(i64, i64)> = (-10..=10).map(|b| (0, b)).collect();
        let rep = torsion_count_ubc(&curves, 12, Execution::Sequential).unwrap();
        assert_eq!(rep.max_order, Some(6));
        assert!(rep.rows.iter().any(|r| r.b == 0 && r.diagnostic.is_some()));
        let curves: Vec<(i64, i64)> = (-10..=10).filter(|&a| a != 0).map(|a| (a, 0)).collect();
        let rep = torsion_count_ubc(&curves, 12, Execution::Sequential).unwrap();
        assert_eq!(rep.max_order, Some(4));
    }
}
