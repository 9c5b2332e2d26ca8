//! Property tests for height, degree, search and torsion invariants.

use std::collections::{BTreeSet, HashSet};

use aridyn::arith::{quad_reduce, rat_int, AlgNum, Rat};
use aridyn::degrees::{
    arith_degree_estimate, arith_degree_estimate_with, dyn_degree, spectral_radius, ArithOptions,
    HeightChoice,
};
use aridyn::elliptic::{torsion_subgroup, EllPoint, EllipticCurve};
use aridyn::heights::{canonical_height, neron_tate};
use aridyn::linalg::{mat_pow, IntMatrix};
use aridyn::orbits::{enumerate_points, is_preperiodic, orbit, zf_d_search, Certificate};
use aridyn::parse::parse_map;
use aridyn::poly::HomPoly;
use aridyn::projective::{evaluate, morphism_check, point_height, Ambient, PolyEndo, ProjPoint};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn form(c: &[i64]) -> HomPoly {
    let r = (c.len() - 1) as u32;
    HomPoly::from_terms(
        2,
        c.iter()
            .enumerate()
            .map(|(k, &v)| (vec![r - k as u32, k as u32], BigInt::from(v))),
    )
}

/// Random morphisms of P^1 of degree 2 or 3 with small coefficients.
fn morphism() -> impl Strategy<Value = PolyEndo> {
    (2u32..=3)
        .prop_flat_map(|r| {
            (
                prop::collection::vec(-5i64..=5, r as usize + 1),
                prop::collection::vec(-5i64..=5, r as usize + 1),
            )
        })
        .prop_filter_map("not a morphism", |(f, g)| {
            let map = PolyEndo::single(vec![form(&f), form(&g)]).ok()?;
            (morphism_check(&map).ok()? && map.degree() as usize == f.len() - 1).then_some(map)
        })
}

fn rat_point(h: i64) -> impl Strategy<Value = ProjPoint> {
    (-h..=h, 0..=h)
        .prop_filter("zero vector", |(a, b)| *a != 0 || *b != 0)
        .prop_map(|(a, b)| ProjPoint::from_ints(&[a, b]).unwrap())
}

fn quad() -> impl Strategy<Value = AlgNum> {
    (
        -20i64..=20,
        1i64..=9,
        -20i64..=20,
        1i64..=9,
        prop::sample::select(vec![-3i64, -1, 2, 5, 7]),
    )
        .prop_map(|(a, b, c, d, disc)| {
            quad_reduce(
                Rat::new(a.into(), b.into()),
                Rat::new(c.into(), d.into()),
                disc,
            )
        })
}

/// Independent preperiodicity oracle: iterate on primitive integer pairs until a repeat, or
/// until the coordinates are far beyond any preperiodic height for these coefficient sizes.
fn orbit_oracle(f: &PolyEndo, a: i64, b: i64) -> bool {
    let polys = &f.blocks()[0];
    let mut v = vec![BigInt::from(a), BigInt::from(b)];
    let mut seen = HashSet::new();
    loop {
        let g = v[0].gcd(&v[1]);
        v = v.iter().map(|x| x / &g).collect();
        if v[1].is_negative() || (v[1].is_zero() && v[0].is_negative()) {
            v = v.iter().map(|x| -x).collect();
        }
        if !seen.insert(v.clone()) {
            return true;
        }
        if v[0].bits().max(v[1].bits()) > 4096 {
            return false;
        }
        v = polys.iter().map(|p| p.eval_int(&v)).collect();
    }
}

fn sample_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(-5i64..=5, n), n).prop_map(|rows| {
            rows.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugates_have_equal_height(x in quad()) {
        prop_assert_eq!(x.abs_height().value, x.conjugate().abs_height().value);
        prop_assert!(x.min_poly().eval(&x).unwrap().is_zero());
    }

    #[test]
    fn rational_height_formula(p in -10_000i64..10_000, q in 1i64..10_000) {
        let r = Rat::new(p.into(), q.into());
        let want = (r.numer().abs().max(r.denom().clone()).to_string().parse::<f64>().unwrap()).ln();
        prop_assert!((AlgNum::from(r).abs_height().value - want).abs() <= 1e-12);
    }

    #[test]
    fn evaluate_height_bound(f in morphism(), p in rat_point(200)) {
        let r = f.degree() as f64;
        let m = f.max_monomials() as f64;
        let norm: f64 = f.max_abs_coeff().to_string().parse().unwrap();
        let hp = point_height(&p).unwrap().value;
        let hfp = point_height(&evaluate(&f, &p).unwrap()).unwrap().value;
        prop_assert!(hfp <= r * hp + (m * norm).ln() + 1e-9);
    }

    #[test]
    fn evaluate_commutes_with_conjugation(f in morphism(), x in quad()) {
        let p = ProjPoint::affine(x);
        let lhs = evaluate(&f, &p.galois_conjugate());
        let rhs = evaluate(&f, &p).map(|q| q.galois_conjugate());
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }

    #[test]
    fn product_evaluates_factorwise(f in morphism(), g in morphism(), p in rat_point(30), q in rat_point(30)) {
        let fg = PolyEndo::product(&[f.clone(), g.clone()]).unwrap();
        let pq = ProjPoint::product(&[p.clone(), q.clone()]).unwrap();
        let want = ProjPoint::product(&[evaluate(&f, &p).unwrap(), evaluate(&g, &q).unwrap()]).unwrap();
        prop_assert_eq!(evaluate(&fg, &pq).unwrap(), want);
    }

    #[test]
    fn transform_law(f in morphism(), p in rat_point(60)) {
        let r = f.degree() as f64;
        let a = canonical_height(&f, &p, 1e-9).unwrap();
        let b = canonical_height(&f, &evaluate(&f, &p).unwrap(), 1e-9).unwrap();
        prop_assert!((b.value - r * a.value).abs() <= b.error + r * a.error + 1e-12);
    }

    #[test]
    fn iterate_has_the_same_canonical_height(f in morphism(), p in rat_point(30)) {
        let ff = f.iterate(2).unwrap();
        let a = canonical_height(&f, &p, 1e-9).unwrap();
        let b = canonical_height(&ff, &p, 1e-9).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.error + b.error + 1e-12);
    }

    #[test]
    fn zero_canonical_height_iff_preperiodic(f in morphism(), p in rat_point(54)) {
        let h = canonical_height(&f, &p, 1e-9).unwrap();
        let pre = is_preperiodic(&f, &p).unwrap();
        prop_assert_eq!(h.lower() <= 0.0, pre.preperiodic);
        prop_assert_eq!(pre.preperiodic, orbit_oracle(&f, {
            let v = ProjPoint::primitive_ints(&p.blocks()[0]).unwrap();
            i64::try_from(&v[0]).unwrap()
        }, {
            let v = ProjPoint::primitive_ints(&p.blocks()[0]).unwrap();
            i64::try_from(&v[1]).unwrap()
        }));
    }

    #[test]
    fn certificates_are_never_wrong(f in morphism(), p in rat_point(40)) {
        let res = is_preperiodic(&f, &p).unwrap();
        match res.certificate {
            Certificate::Cycle { tail, cycle } => {
                prop_assert!(res.preperiodic);
                prop_assert_eq!(&res.orbit.points[tail + cycle], &res.orbit.points[tail]);
            }
            Certificate::Escape { hhat_lower, .. } => {
                prop_assert!(!res.preperiodic);
                prop_assert!(hhat_lower > 0.0);
                let h = canonical_height(&f, &p, 1e-9).unwrap();
                prop_assert!(h.upper() >= hhat_lower);
            }
        }
    }

    #[test]
    fn orbit_cycle_invariant(f in morphism(), p in rat_point(20)) {
        let rec = orbit(&f, &p, 200, f64::INFINITY).unwrap();
        if let Some(c) = rec.cycle_length {
            prop_assert_eq!(&rec.points[rec.tail_length + c], &rec.points[rec.tail_length]);
        }
    }

    #[test]
    fn alpha_at_most_delta(f in morphism(), p in rat_point(20)) {
        let est = arith_degree_estimate(&f, &p, 12).unwrap();
        prop_assert!(est.estimate >= 1.0 && est.estimate <= dyn_degree(&f).unwrap().value + 1e-9);
    }

    #[test]
    fn spectral_radius_power_law(m in sample_matrix(), k in 2u32..=4) {
        prop_assume!(!m.iter().all(|r| r.iter().all(Zero::is_zero)));
        let (rho, _) = spectral_radius(&m).unwrap();
        let mk = mat_pow(&m, k);
        let rho_k = if mk.iter().all(|r| r.iter().all(Zero::is_zero)) { 0.0 } else { spectral_radius(&mk).unwrap().0 };
        prop_assert!((rho_k - rho.powi(k as i32)).abs() <= 1e-8 * rho_k.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn neron_tate_laws(k in 1i64..=3, shift in any::<bool>()) {
        let e = EllipticCurve::new(0, 8).unwrap();
        let mut p = e.mul_i64(k, &EllPoint::from_ints(1, 3)).unwrap();
        if shift {
            p = e.add(&p, &EllPoint::from_ints(-2, 0)).unwrap();
        }
        let tol = 1e-9;
        let h = neron_tate(&e, &p, tol).unwrap();
        let h2 = neron_tate(&e, &e.double(&p).unwrap(), tol).unwrap();
        let hn = neron_tate(&e, &e.neg(&p), tol).unwrap();
        prop_assert!((h2.value - 4.0 * h.value).abs() <= 4.0 * tol + h2.error + 4.0 * h.error);
        prop_assert!((hn.value - h.value).abs() <= hn.error + h.error);
    }

    #[test]
    fn height_choice_does_not_matter(a in 2i64..9, b in 2i64..9) {
        let f = parse_map("P1xP1:[x^2, y^2];[x^3, y^3]").unwrap();
        let p = ProjPoint::product(&[
            ProjPoint::from_ints(&[a, 1]).unwrap(),
            ProjPoint::from_ints(&[b, 1]).unwrap(),
        ]).unwrap();
        let sum = arith_degree_estimate_with(&f, &p, &ArithOptions { n_max: 20, height: HeightChoice::Sum, ..ArithOptions::default() }).unwrap();
        let max = arith_degree_estimate_with(&f, &p, &ArithOptions { n_max: 20, height: HeightChoice::Max, ..ArithOptions::default() }).unwrap();
        prop_assert!((sum.estimate - max.estimate).abs() <= 2e-3);
    }

    #[test]
    fn searches_are_monotone_and_iterate_stable(f in morphism()) {
        let b1 = 5f64.ln();
        let b2 = 20f64.ln();
        let s11 = zf_d_search(&f, 1, b1).unwrap();
        let s12 = zf_d_search(&f, 1, b2).unwrap();
        // quadratic boxes grow like e^(6B); keep d = 2 at height log 3
        let b0 = 3f64.ln();
        let s10 = zf_d_search(&f, 1, b0).unwrap();
        let s20 = zf_d_search(&f, 2, b0).unwrap();
        prop_assert!(s11.entries.len() <= s12.entries.len());
        prop_assert!(s10.entries.len() <= s20.entries.len());
        let ff = f.iterate(2).unwrap();
        let set = |r: &aridyn::orbits::SearchReport| r.entries.iter().map(|e| e.point.clone()).collect::<BTreeSet<_>>();
        let b3 = 8f64.ln();
        prop_assert_eq!(set(&zf_d_search(&ff, 1, b3).unwrap()), set(&zf_d_search(&f, 1, b3).unwrap()));
    }

    #[test]
    fn search_matches_orbit_oracle(f in morphism()) {
        let b = 20f64.ln();
        let got: BTreeSet<ProjPoint> = zf_d_search(&f, 1, b).unwrap().entries.into_iter().map(|e| e.point).collect();
        let want: BTreeSet<ProjPoint> = enumerate_points(&Ambient::projective(1), 1, b)
            .unwrap()
            .into_iter()
            .filter(|p| {
                let v = ProjPoint::primitive_ints(&p.blocks()[0]).unwrap();
                orbit_oracle(&f, i64::try_from(&v[0]).unwrap(), i64::try_from(&v[1]).unwrap())
            })
            .collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn galois_stable_findings(c in -3i64..=1) {
        let f = PolyEndo::from_affine_poly(&[rat_int(c), rat_int(0), rat_int(1)]).unwrap();
        let rep = zf_d_search(&f, 2, 4f64.ln()).unwrap();
        prop_assert!(rep.galois_stable);
        for e in &rep.entries {
            let a = is_preperiodic(&f, &e.point).unwrap();
            let b = is_preperiodic(&f, &e.point.galois_conjugate()).unwrap();
            prop_assert!(a.preperiodic && b.preperiodic);
            prop_assert_eq!(a.certificate, b.certificate);
        }
    }

    #[test]
    fn torsion_orders_are_exact(a in -20i64..=20, b in -20i64..=20) {
        let Ok(e) = EllipticCurve::new(a, b) else { return Ok(()); };
        let t = torsion_subgroup(&e).unwrap();
        for p in &t {
            prop_assert!(e.mul_i64(p.order as i64, &p.point).unwrap().is_infinity());
            prop_assert_eq!(t.len() % p.order as usize, 0);
        }
    }
}
