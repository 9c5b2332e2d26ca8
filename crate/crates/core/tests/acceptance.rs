//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Every expected value here comes from an oracle written independently of the library:
//! integer orbit iteration, i128 Sylvester determinants, and a separate rational
//! implementation of the elliptic group law.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use aridyn::abelian::{
    matrix_endo_degree_check, zf_structure_check_with, Hypothesis, MatrixEndo, StructureOptions,
};
use aridyn::arith::{rat_int, AlgNum, Rat};
use aridyn::degrees::{
    arith_degree_estimate, classify_point_polarized, classify_product, dyn_degree, spectral_radius,
    ArithVerdict, PointClass,
};
use aridyn::elliptic::{torsion_subgroup, EllPoint, EllipticCurve};
use aridyn::exec::Execution;
use aridyn::heights::{canonical_height, height_difference_bound};
use aridyn::linalg::{int_matrix, mat_pow, IntMatrix};
use aridyn::orbits::{enumerate_points, family_ubc_experiment_with, zf_d_search};
use aridyn::parse::{parse_map, parse_param_list, AffineFamily};
use aridyn::poly::HomPoly;
use aridyn::projective::{evaluate, morphism_check, point_height, Ambient, PolyEndo, ProjPoint};
use aridyn::torsion_count_ubc;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{}: {}", what, e))
}

// ---------- oracles ----------

/// Preperiodicity of `(a:b)` under `x^2`, by iterating `(a, b) -> (a^2, b^2)` on primitive pairs.
fn square_map_oracle(a: i64, b: i64) -> bool {
    let (mut a, mut b) = (BigInt::from(a), BigInt::from(b));
    let mut seen = HashSet::new();
    let cap = BigInt::from(10).pow(30);
    loop {
        let g = a.gcd(&b);
        a /= &g;
        b /= &g;
        if b.is_negative() || (b.is_zero() && a.is_negative()) {
            a = -a;
            b = -b;
        }
        if !seen.insert((a.clone(), b.clone())) {
            return true;
        }
        if a.abs() > cap || b.abs() > cap {
            return false;
        }
        a = &a * &a;
        b = &b * &b;
    }
}

/// Preperiodicity of the roots of `a X^2 + b X + c` under squaring: the squares of the roots
/// are the roots of `a^2 Y^2 - (b^2 - 2ac) Y + c^2`.
fn quadratic_square_oracle(a: i64, b: i64, c: i64) -> bool {
    let (mut a, mut b, mut c) = (a as i128, b as i128, c as i128);
    let mut seen = HashSet::new();
    loop {
        let g = a.gcd(&b).gcd(&c);
        (a, b, c) = (a / g, b / g, c / g);
        if a < 0 {
            (a, b, c) = (-a, -b, -c);
        }
        if !seen.insert((a, b, c)) {
            return true;
        }
        if a.abs().max(b.abs()).max(c.abs()) > 1_000_000_000 {
            return false;
        }
        (a, b, c) = (a * a, -(b * b - 2 * a * c), c * c);
    }
}

/// Resultant of binary forms of degree r via an i128 fraction-free determinant.
fn sylvester_det(f: &[i64], g: &[i64]) -> i128 {
    // f, g: coefficients of X^r, X^(r-1) Y, ..., Y^r
    let r = f.len() - 1;
    let n = 2 * r;
    let mut m = vec![vec![0i128; n]; n];
    for i in 0..r {
        for (j, &c) in f.iter().enumerate() {
            m[i][i + j] = c as i128;
        }
        for (j, &c) in g.iter().enumerate() {
            m[r + i][i + j] = c as i128;
        }
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Independent exact group law on `y^2 = x^3 + a x + b` over Q.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum OPt {
    Inf,
    Aff(Rat, Rat),
}

fn o_add(a: i64, p: &OPt, q: &OPt) -> OPt {
    match (p, q) {
        (OPt::Inf, _) => q.clone(),
        (_, OPt::Inf) => p.clone(),
        (OPt::Aff(x1, y1), OPt::Aff(x2, y2)) => {
            let lambda = if x1 == x2 {
                if (y1 + y2).is_zero() {
                    return OPt::Inf;
                }
                (rat_int(3) * x1 * x1 + rat_int(a)) / (rat_int(2) * y1)
            } else {
                (y2 - y1) / (x2 - x1)
            };
            let x3 = &lambda * &lambda - x1 - x2;
            let y3 = lambda * (x1 - &x3) - y1;
            OPt::Aff(x3, y3)
        }
    }
}

/// Rational torsion by brute force: every torsion point is integral with `y^2 | 4a^3 + 27b^2`,
/// hence `|y| <= 207` and `|x| < 1000` when `|a|, |b| <= 20`; orders are at most 12, so
/// multiples up to 16 certify.
fn torsion_oracle(a: i64, b: i64) -> BTreeSet<(i64, i64)> {
    let mut out = BTreeSet::new();
    for x in -1000i64..=1000 {
        let rhs = x * x * x + a * x + b;
        if rhs < 0 {
            continue;
        }
        let y = (rhs as f64).sqrt().round() as i64;
        for y in [y - 1, y, y + 1] {
            if y < 0 || y * y != rhs {
                continue;
            }
            for yy in [y, -y] {
                let p = OPt::Aff(rat_int(x), rat_int(yy));
                let mut q = p.clone();
                for _ in 1..16 {
                    q = o_add(a, &q, &p);
                    if q == OPt::Inf {
                        out.insert((x, yy));
                        break;
                    }
                }
            }
        }
    }
    out
}

// ---------- criteria ----------

fn x_squared() -> PolyEndo {
    parse_map("P1:[x^2, y^2]").unwrap()
}

fn criterion_1() -> Check {
    let f = x_squared();
    let d = ok(dyn_degree(&f), "dyn_degree")?;
    ensure!(
        d.value == 2.0 && d.error == 0.0,
        "dyn_degree = {} ± {}",
        d.value,
        d.error
    );
    let rep = ok(zf_d_search(&f, 2, 100f64.ln()), "zf_d_search")?;
    for e in &rep.entries {
        let est = ok(
            arith_degree_estimate(&f, &e.point, 20),
            "arith_degree_estimate",
        )?;
        ensure!(
            est.verdict == ArithVerdict::ExactOnePreperiodic && est.alpha() == 1.0,
            "{} not certified alpha = 1",
            e.point
        );
    }
    let p = ProjPoint::from_ints(&[2, 1]).unwrap();
    let cls = ok(classify_point_polarized(&f, &p), "classify")?;
    ensure!(cls == PointClass::MaxDegree, "(2:1) classified {}", cls);
    let h = ok(canonical_height(&f, &p, 1e-10), "canonical_height")?;
    ensure!(
        (h.value - 2f64.ln()).abs() <= 1e-9,
        "hhat(2:1) = {}",
        h.value
    );
    Ok(format!(
        "{} preperiodic points certified alpha=1; hhat(2:1)={:.12}",
        rep.entries.len(),
        h.value
    ))
}

fn criterion_2() -> Check {
    let f = x_squared();
    let b = 100f64.ln();
    let r1 = ok(zf_d_search(&f, 1, b), "d=1 search")?;
    let got1: BTreeSet<ProjPoint> = r1.entries.iter().map(|e| e.point.clone()).collect();
    // oracle over the full box max(|a|,|b|) <= 100
    let mut want1 = BTreeSet::new();
    for a in -100i64..=100 {
        for c in 0i64..=100 {
            if a.gcd(&c) != 1 || (c == 0 && a != 1) {
                continue;
            }
            if square_map_oracle(a, c) {
                want1.insert(ProjPoint::from_ints(&[a, c]).unwrap());
            }
        }
    }
    ensure!(
        got1 == want1 && got1.len() == 4,
        "d=1: got {:?}, oracle {:?}",
        got1,
        want1
    );

    let r2 = ok(zf_d_search(&f, 2, b), "d=2 search")?;
    let got2: BTreeSet<ProjPoint> = r2.entries.iter().map(|e| e.point.clone()).collect();
    ensure!(got2.len() == 10, "d=2 found {} points", got2.len());
    // oracle: rational points above plus roots of irreducible aX^2 + bX + c with
    // h <= log 4 (the box M = 16 on the leading/constant coefficients)
    let mut want2 = want1.clone();
    let m = 16i64;
    for a in 1..=m {
        for c in -m..=m {
            for bb in -2 * m..=2 * m {
                if c == 0 || a.gcd(&bb).gcd(&c) != 1 {
                    continue;
                }
                let disc = bb * bb - 4 * a * c;
                let s = (disc.abs() as f64).sqrt().round() as i64;
                if disc >= 0 && s * s == disc {
                    continue;
                }
                if !quadratic_square_oracle(a, bb, c) {
                    continue;
                }
                // roots (-b ± sqrt(disc)) / 2a
                for sign in [1i64, -1] {
                    let alpha = AlgNum::from(Rat::new(BigInt::from(-bb), BigInt::from(2 * a)))
                        .try_add(
                            &AlgNum::sqrt_int(disc)
                                .scale_int(&BigInt::from(sign))
                                .try_div(&AlgNum::from(rat_int(2 * a)))
                                .unwrap(),
                        )
                        .unwrap();
                    want2.insert(ProjPoint::affine(alpha));
                }
            }
        }
    }
    ensure!(got2 == want2, "d=2: got {:?}, oracle {:?}", got2, want2);
    Ok(format!(
        "d=1: {} points, d=2: {} points, both match the orbit oracle",
        got1.len(),
        got2.len()
    ))
}

fn random_binary_form(rng: &mut ChaCha8Rng, r: u32) -> Vec<i64> {
    (0..=r).map(|_| rng.gen_range(-9..=9)).collect()
}

fn form_to_hom(c: &[i64]) -> HomPoly {
    let r = (c.len() - 1) as u32;
    HomPoly::from_terms(
        2,
        c.iter()
            .enumerate()
            .map(|(k, &v)| (vec![r - k as u32, k as u32], BigInt::from(v))),
    )
}

fn random_morphism(rng: &mut ChaCha8Rng, r: u32) -> Result<PolyEndo, String> {
    loop {
        let f = random_binary_form(rng, r);
        let g = random_binary_form(rng, r);
        if f[0] == 0 && g[0] == 0 {
            continue;
        }
        let map = match PolyEndo::single(vec![form_to_hom(&f), form_to_hom(&g)]) {
            Ok(m) => m,
            Err(_) => continue,
        };
        let oracle = sylvester_det(&f, &g) != 0;
        let lib = ok(morphism_check(&map), "morphism_check")?;
        ensure!(
            oracle == lib,
            "morphism_check disagrees with Sylvester determinant on {}",
            map.notation()
        );
        if lib && map.degree() == r {
            return Ok(map);
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, h: i64) -> ProjPoint {
    loop {
        let a = rng.gen_range(-h..=h);
        let b = rng.gen_range(0..=h);
        if a != 0 || b != 0 {
            return ProjPoint::from_ints(&[a, b]).unwrap();
        }
    }
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for i in 0..200 {
        let r = if i % 2 == 0 { 2 } else { 3 };
        let f = random_morphism(&mut rng, r)?;
        let c = ok(height_difference_bound(&f), "height_difference_bound")?;
        let c_sum = c.upper + c.lower.unwrap_or(f64::INFINITY);
        for _ in 0..50 {
            let p = random_point(&mut rng, 50);
            let fp = ok(evaluate(&f, &p), "evaluate")?;
            let hp = ok(canonical_height(&f, &p, 1e-9), "canonical_height")?;
            let hfp = ok(canonical_height(&f, &fp, 1e-9), "canonical_height")?;
            let lhs = (hfp.value - r as f64 * hp.value).abs();
            let allowed = hfp.error + r as f64 * hp.error + 1e-12;
            ensure!(
                lhs <= allowed,
                "{} at {}: |hhat(f P) - r hhat(P)| = {:e} > {:e}",
                f.notation(),
                p,
                lhs,
                allowed
            );
            let h = ok(point_height(&p), "height")?;
            ensure!(
                (hp.value - h.value).abs() <= c_sum + hp.error + h.error,
                "{} at {}: |hhat - h| = {} > {}",
                f.notation(),
                p,
                (hp.value - h.value).abs(),
                c_sum
            );
            checked += 1;
        }
    }
    Ok(format!(
        "{} (map, point) pairs satisfy both bounds",
        checked
    ))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let pts = ok(
        enumerate_points(&Ambient::projective(1), 1, 20f64.ln()),
        "enumerate",
    )?;
    let mut compared = 0;
    for _ in 0..20 {
        let f = random_morphism(&mut rng, 2)?;
        let ff = ok(f.iterate(2), "iterate")?;
        for p in &pts {
            let a = ok(classify_point_polarized(&f, p), "classify f")?;
            let b = ok(classify_point_polarized(&ff, p), "classify f∘f")?;
            ensure!(
                a == b,
                "{} at {}: {} under f, {} under f∘f",
                f.notation(),
                p,
                a,
                b
            );
            compared += 1;
        }
    }

    // (x^2, y^3): alpha = 1 if both coordinates are preperiodic, 3 if the second is not,
    // 2 if only the first is not
    let g = ok(parse_map("P1xP1:[x^2, y^2];[x^3, y^3]"), "parse product")?;
    let prep = |p: &ProjPoint| {
        let v = ProjPoint::primitive_ints(&p.blocks()[0]).unwrap();
        let (a, b) = (&v[0], &v[1]);
        a.is_zero() || b.is_zero() || a.abs() == b.abs()
    };
    let reps: Vec<ProjPoint> = ["0:1", "1:0", "1:1", "-1:1", "2:1", "1:3", "-5:7", "20:19"]
        .iter()
        .map(|s| aridyn::parse_point(s).unwrap())
        .collect();
    let mut pairs = Vec::new();
    for p in &pts {
        for q in &reps {
            pairs.push((p.clone(), q.clone()));
            pairs.push((q.clone(), p.clone()));
        }
    }
    for (p, q) in &pairs {
        let pt = ProjPoint::product(&[p.clone(), q.clone()]).unwrap();
        let cls = ok(classify_product(&g, &pt), "classify_product")?;
        let want = match (prep(p), prep(q)) {
            (true, true) => 1.0,
            (false, true) => 2.0,
            (_, false) => 3.0,
        };
        ensure!(
            cls.alpha == want && cls.in_zf == (want < 3.0),
            "({}, {}): alpha {} want {}",
            p,
            q,
            cls.alpha,
            want
        );
    }
    let p22 = aridyn::parse_point("2:1;2:1").unwrap();
    let est = ok(arith_degree_estimate(&g, &p22, 20), "arith_degree_estimate")?;
    ensure!(
        (est.estimate - 3.0).abs() <= 1e-3,
        "alpha((2,2)) estimate {}",
        est.estimate
    );
    Ok(format!(
        "{} f vs f∘f classifications agree; {} product verdicts match; alpha((2,2)) = {:.6}",
        compared,
        pairs.len(),
        est.estimate
    ))
}

fn criterion_5() -> Check {
    // [2] on y^2 = x^3 + 1
    let e1 = ok(EllipticCurve::new(0, 1), "curve")?;
    let f = ok(MatrixEndo::isogeny(e1, int_matrix(&[vec![2]])), "endo")?;
    let opts = StructureOptions {
        height_bound: 20.0,
        exec: Execution::Parallel,
        ..StructureOptions::default()
    };
    let rep = ok(zf_structure_check_with(&f, 1, &opts), "structure check [2]")?;
    let low: BTreeSet<EllPoint> = rep
        .low_points()
        .iter()
        .map(|p| p.point[0].clone())
        .collect();
    let tors: BTreeSet<EllPoint> = torsion_oracle(0, 1)
        .into_iter()
        .map(|(x, y)| EllPoint::from_ints(x, y))
        .chain([EllPoint::Infinity])
        .collect();
    ensure!(
        tors.len() == 6 && low == tors,
        "[2]: low set {:?}, torsion {:?}",
        low,
        tors
    );
    ensure!(
        rep.passed(),
        "[2]: structure report failed: {} violations",
        rep.violations.len()
    );

    // diag(2,3) on (y^2 = x^3 + 8)^2
    let e8 = ok(EllipticCurve::new(0, 8), "curve")?;
    let f = ok(
        MatrixEndo::isogeny(e8, int_matrix(&[vec![2, 0], vec![0, 3]])),
        "endo",
    )?;
    // low-degree locus: E x Tor, i.e. the second coefficient vanishes
    let opts23 = StructureOptions {
        hypothesis: Some(Hypothesis {
            forms: vec![vec![0, 1]],
            p: None,
        }),
        ..opts.clone()
    };
    let rep = ok(
        zf_structure_check_with(&f, 1, &opts23),
        "structure check diag(2,3)",
    )?;
    let tors8: BTreeSet<EllPoint> = torsion_oracle(0, 8)
        .into_iter()
        .map(|(x, y)| EllPoint::from_ints(x, y))
        .chain([EllPoint::Infinity])
        .collect();
    let mut mixed = 0;
    for pr in &rep.probes {
        let t1 = tors8.contains(&pr.point[0]);
        let t2 = tors8.contains(&pr.point[1]);
        if pr.alpha < 9.0 - 0.5 {
            ensure!(
                t2,
                "probe {:?} has alpha {} but non-torsion second coordinate",
                pr.point,
                pr.alpha
            );
        }
        if !t1 && t2 {
            mixed += 1;
            ensure!(
                (pr.alpha - 4.0).abs() <= 0.5,
                "probe {:?}: alpha {} not near 4",
                pr.point,
                pr.alpha
            );
        }
    }
    ensure!(mixed > 0, "no (non-torsion, torsion) probes in the box");
    ensure!(
        rep.passed(),
        "diag(2,3): structure report failed ({} violations, {} shift violations, {} model failures)",
        rep.violations.len(),
        rep.shift_violations,
        rep.model_failures
    );
    Ok(format!(
        "[2]: low set = 6 torsion points; diag(2,3): {} probes, {} mixed probes near 4",
        rep.probes.len(),
        mixed
    ))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut n = 0;
    while n < 50 {
        let (a, b) = (rng.gen_range(-20..=20), rng.gen_range(-20..=20));
        let Ok(e) = EllipticCurve::new(a, b) else {
            continue;
        };
        let lib: BTreeSet<(i64, i64)> = ok(torsion_subgroup(&e), "torsion")?
            .iter()
            .filter_map(|t| t.point.coords().map(|(x, y)| (x.clone(), y.clone())))
            .map(|(x, y)| {
                let x = x.as_rat().unwrap().to_integer();
                let y = y.as_rat().unwrap().to_integer();
                (i64::try_from(x).unwrap(), i64::try_from(y).unwrap())
            })
            .collect();
        let want = torsion_oracle(a, b);
        ensure!(
            lib == want,
            "y^2 = x^3 + {}x + {}: {:?} vs oracle {:?}",
            a,
            b,
            lib,
            want
        );
        n += 1;
    }
    let fam: Vec<(i64, i64)> = (-10..=10).map(|b| (0, b)).collect();
    let rep = ok(torsion_count_ubc(&fam, 12, Execution::Parallel), "ubc")?;
    ensure!(
        rep.max_order == Some(6),
        "family max order {:?}",
        rep.max_order
    );
    let e = ok(EllipticCurve::new(-43, 166), "curve")?;
    let t = ok(torsion_subgroup(&e), "torsion")?;
    ensure!(
        t.len() == 7,
        "y^2 = x^3 - 43x + 166 has {} torsion points",
        t.len()
    );
    Ok("50 random curves match the oracle; family max 6; order 7 found".into())
}

fn criterion_7() -> Check {
    let fam = ok(AffineFamily::parse("x^2 + c", "c"), "family")?;
    let params = ok(parse_param_list("box:5"), "params")?;
    let b = 100f64.ln();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| family_ubc_experiment_with(&fam, &params, 1, b, Execution::Parallel))
    };
    let seq = ok(
        family_ubc_experiment_with(&fam, &params, 1, b, Execution::Sequential),
        "sequential",
    )?;
    let summary = |r: &aridyn::orbits::FamilyReport| -> Vec<(Rat, Option<usize>, Vec<ProjPoint>)> {
        r.rows
            .iter()
            .map(|row| (row.param.clone(), row.count, row.points.clone()))
            .collect()
    };
    for threads in [1, 4] {
        let par = ok(run(threads), "parallel")?;
        ensure!(
            summary(&par) == summary(&seq),
            "results differ with {} workers",
            threads
        );
    }
    ensure!(
        seq.rows.iter().all(|r| r.count.is_some()),
        "a fiber has no count"
    );
    // spot-check fibers against the integer orbit oracle for x^2 + c at c = 0 and c = -1
    for (c, want) in [(rat_int(0), 4), (rat_int(-1), 4), (rat_int(-2), 6)] {
        let row = seq.rows.iter().find(|r| r.param == c).unwrap();
        ensure!(
            row.count == Some(want),
            "fiber c = {}: count {:?}, expected {}",
            c,
            row.count,
            want
        );
    }
    Ok(format!(
        "{} fibers; max count {:?} at {:?}; identical for 1, 4 workers and sequential",
        seq.rows.len(),
        seq.max_count,
        seq.argmax.iter().map(|r| r.to_string()).collect::<Vec<_>>()
    ))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tested = 0;
    while tested < 100 {
        let n = rng.gen_range(1..=4);
        let m: IntMatrix = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| BigInt::from(rng.gen_range(-5i64..=5)))
                    .collect()
            })
            .collect();
        if m.iter().all(|r| r.iter().all(Zero::is_zero)) {
            continue;
        }
        let (r1, _) = ok(spectral_radius(&m), "spectral_radius")?;
        let m2 = mat_pow(&m, 2);
        let r2 = if m2.iter().all(|r| r.iter().all(Zero::is_zero)) {
            0.0
        } else {
            ok(spectral_radius(&m2), "spectral_radius")?.0
        };
        ensure!(
            (r2 - r1 * r1).abs() <= 1e-8 * (1.0f64).max(r2),
            "rho(M^2) = {} but rho(M)^2 = {} for {:?}",
            r2,
            r1 * r1,
            m
        );
        tested += 1;
    }
    let e = ok(EllipticCurve::new(0, 8), "curve")?;
    let mut endos = vec![
        int_matrix(&[vec![2]]),
        int_matrix(&[vec![-3]]),
        int_matrix(&[vec![2, 0], vec![0, 3]]),
        int_matrix(&[vec![1, 1], vec![1, 0]]),
        int_matrix(&[vec![1, 1], vec![0, 1]]),
        int_matrix(&[vec![1, -2], vec![1, 1]]),
        int_matrix(&[vec![0, 1], vec![-1, 0]]),
    ];
    while endos.len() < 40 {
        let m: Vec<Vec<i64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.gen_range(-4..=4)).collect())
            .collect();
        if m[0][0] * m[1][1] - m[0][1] * m[1][0] != 0 {
            endos.push(int_matrix(&m));
        }
    }
    let mut worst: f64 = 0.0;
    for m in &endos {
        let f = ok(MatrixEndo::isogeny(e, m.clone()), "endo")?;
        let chk = ok(matrix_endo_degree_check(&f), "degree check")?;
        ensure!(
            chk.passed,
            "{:?}: growth {} vs rho^2 {}",
            m,
            chk.growth,
            chk.rho_squared
        );
        worst = worst.max(chk.relative_error);
    }
    Ok(format!(
        "{} random matrices satisfy rho(M^2) = rho(M)^2; {} endomorphisms cross-validated (worst rel. err {:.2e})",
        tested,
        endos.len(),
        worst
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 8] = [
        ("x^2 worked example", criterion_1, Duration::from_secs(1)),
        (
            "Z_f(d) search for x^2",
            criterion_2,
            Duration::from_secs(30),
        ),
        (
            "canonical height contract",
            criterion_3,
            Duration::from_secs(120),
        ),
        (
            "iterate and product laws",
            criterion_4,
            Duration::from_secs(u64::MAX / 4),
        ),
        ("abelian structure", criterion_5, Duration::from_secs(120)),
        ("elliptic torsion", criterion_6, Duration::from_secs(60)),
        (
            "family harness x^2 + c",
            criterion_7,
            Duration::from_secs(300),
        ),
        (
            "numerical guards",
            criterion_8,
            Duration::from_secs(u64::MAX / 4),
        ),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *budget => ("PASS", d),
            Ok(d) => (
                "FAIL",
                format!("{} (took {:.2?}, limit {:.0?})", d, elapsed, budget),
            ),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {}: {} ({:.2?})",
            i + 1,
            status,
            name,
            detail,
            elapsed
        );
    }
    if failures > 0 {
        println!("{} criterion/criteria failed", failures);
        std::process::exit(1);
    }
}
