//! Orbits, certified preperiodicity, bounded-height enumeration and preperiodic-point searches.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::One;

use crate::arith::{quad_reduce, Rat};
use crate::error::{DynError, Result};
use crate::exec::{par_map, Execution};
use crate::heights::{p1_constants, HeightValue};
use crate::parse::AffineFamily;
use crate::projective::{evaluate, point_height, Ambient, PolyEndo, ProjPoint};

/// Slack added to every height comparison that involves double-precision logarithms.
pub const HEIGHT_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitStatus {
    Cycle,
    Escaped,
    Budget,
}

#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub start: ProjPoint,
    pub tail_length: usize,
    pub cycle_length: Option<usize>,
    pub points: Vec<ProjPoint>,
    pub height_trace: Vec<HeightValue>,
    pub status: OrbitStatus,
}

#[derive(Clone, Debug)]
pub struct OrbitLimits {
    pub max_steps: usize,
    /// The orbit is reported as escaped once a height is certainly above this value.
    pub height_cutoff: f64,
    pub max_bits: u64,
}

impl Default for OrbitLimits {
    fn default() -> Self {
        OrbitLimits {
            max_steps: 1000,
            height_cutoff: f64::INFINITY,
            max_bits: 1 << 14,
        }
    }
}

pub fn orbit(
    f: &PolyEndo,
    p: &ProjPoint,
    max_steps: usize,
    height_cutoff: f64,
) -> Result<OrbitRecord> {
    orbit_with(
        f,
        p,
        &OrbitLimits {
            max_steps,
            height_cutoff,
            ..OrbitLimits::default()
        },
    )
}

pub fn orbit_with(f: &PolyEndo, p: &ProjPoint, lim: &OrbitLimits) -> Result<OrbitRecord> {
    let mut seen: HashMap<ProjPoint, usize> = HashMap::new();
    let mut rec = OrbitRecord {
        start: p.clone(),
        tail_length: 0,
        cycle_length: None,
        points: vec![p.clone()],
        height_trace: vec![point_height(p)?],
        status: OrbitStatus::Budget,
    };
    seen.insert(p.clone(), 0);
    if rec.height_trace[0].lower() > lim.height_cutoff {
        rec.status = OrbitStatus::Escaped;
        return Ok(rec);
    }
    for _ in 0..lim.max_steps {
        let next = evaluate(f, rec.points.last().unwrap())?;
        let h = point_height(&next)?;
        let hit = seen.get(&next).copied();
        rec.points.push(next.clone());
        rec.height_trace.push(h);
        if let Some(i) = hit {
            rec.tail_length = i;
            rec.cycle_length = Some(rec.points.len() - 1 - i);
            rec.status = OrbitStatus::Cycle;
            return Ok(rec);
        }
        if h.lower() > lim.height_cutoff {
            rec.status = OrbitStatus::Escaped;
            return Ok(rec);
        }
        if next.bits() > lim.max_bits {
            return Ok(rec);
        }
        seen.insert(next, rec.points.len() - 1);
    }
    Ok(rec)
}

/// Default escape cutoff `B + C⁺ + C⁻ + log 2` for a single-factor map on P^1.
pub fn default_height_cutoff(f: &PolyEndo, b: f64) -> Result<f64> {
    if !f.ambient().is_p1() {
        return Ok(f64::INFINITY);
    }
    let c = p1_constants(&f.blocks()[0], f.degree())?;
    Ok(b + c.upper + c.lower + std::f64::consts::LN_2)
}

/// Height above which no point of P^1 is preperiodic: `C⁻ / (r - 1)`.
pub fn preperiodic_height_bound(f: &PolyEndo) -> Result<f64> {
    if !f.ambient().is_p1() || f.degree() < 2 {
        return Err(DynError::Unsupported(
            "a preperiodic height bound needs a map of degree >= 2 on P1".into(),
        ));
    }
    let c = p1_constants(&f.blocks()[0], f.degree())?;
    Ok(c.lower / (f.degree() as f64 - 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// The orbit repeats exactly.
    Cycle { tail: usize, cycle: usize },
    /// In factor `factor`, step `step` has height above every preperiodic point, so the
    /// canonical height is at least `hhat_lower > 0`.
    Escape {
        factor: usize,
        step: usize,
        height: f64,
        bound: f64,
        hhat_lower: f64,
    },
}

#[derive(Clone, Debug)]
pub struct Preperiodicity {
    pub preperiodic: bool,
    pub certificate: Certificate,
    pub orbit: OrbitRecord,
}

const DECISION_STEPS: usize = 100_000;

fn decide_p1(f: &PolyEndo, p: &ProjPoint, factor: usize, bound: f64) -> Result<Preperiodicity> {
    let r = f.degree();
    let rec = orbit_with(
        f,
        p,
        &OrbitLimits {
            max_steps: DECISION_STEPS,
            height_cutoff: bound + HEIGHT_MARGIN,
            max_bits: u64::MAX,
        },
    )?;
    match rec.status {
        OrbitStatus::Cycle => Ok(Preperiodicity {
            preperiodic: true,
            certificate: Certificate::Cycle {
                tail: rec.tail_length,
                cycle: rec.cycle_length.unwrap(),
            },
            orbit: rec,
        }),
        OrbitStatus::Escaped => {
            let step = rec.points.len() - 1;
            let h = rec.height_trace[step];
            let hhat_lower = (h.lower() - bound - HEIGHT_MARGIN) / (r as f64).powi(step as i32);
            Ok(Preperiodicity {
                preperiodic: false,
                certificate: Certificate::Escape {
                    factor,
                    step,
                    height: h.value,
                    bound,
                    hhat_lower,
                },
                orbit: rec,
            })
        }
        OrbitStatus::Budget => Err(DynError::Undecided(format!(
            "orbit of {} neither cycled nor escaped within {} steps",
            p, DECISION_STEPS
        ))),
    }
}

/// Certified preperiodicity. On products of P^1 with all factor degrees >= 2 the answer
/// is always decided; elsewhere a cycle proves `true` and anything else is `Undecided`.
pub fn is_preperiodic(f: &PolyEndo, p: &ProjPoint) -> Result<Preperiodicity> {
    is_preperiodic_given(f, p, &factor_bounds(f)?)
}

fn decidable(f: &PolyEndo) -> bool {
    f.ambient().factors().iter().all(|&n| n == 1) && f.block_degrees().iter().all(|&r| r >= 2)
}

/// Per-factor preperiodic height bounds when preperiodicity is decidable, else empty.
fn factor_bounds(f: &PolyEndo) -> Result<Vec<f64>> {
    if !decidable(f) {
        return Ok(Vec::new());
    }
    (0..f.blocks().len())
        .map(|i| preperiodic_height_bound(&f.factor(i)))
        .collect()
}

fn is_preperiodic_given(f: &PolyEndo, p: &ProjPoint, bounds: &[f64]) -> Result<Preperiodicity> {
    if p.ambient() != *f.ambient() {
        return Err(DynError::InvalidInput(format!(
            "point {} is not on {}",
            p,
            f.ambient()
        )));
    }
    if decidable(f) {
        if f.ambient().is_single() {
            return decide_p1(f, p, 0, bounds[0]);
        }
        for i in 0..f.blocks().len() {
            let res = decide_p1(&f.factor(i), &p.block_point(i), i, bounds[i])?;
            if !res.preperiodic {
                let orbit = OrbitRecord {
                    start: p.clone(),
                    tail_length: 0,
                    cycle_length: None,
                    points: vec![p.clone()],
                    height_trace: vec![point_height(p)?],
                    status: OrbitStatus::Escaped,
                };
                return Ok(Preperiodicity {
                    preperiodic: false,
                    certificate: res.certificate,
                    orbit,
                });
            }
        }
        // every factor has a finite orbit, so the product orbit is finite too
        let rec = orbit_with(
            f,
            p,
            &OrbitLimits {
                max_steps: DECISION_STEPS,
                height_cutoff: f64::INFINITY,
                max_bits: u64::MAX,
            },
        )?;
        if rec.status != OrbitStatus::Cycle {
            return Err(DynError::Undecided(format!(
                "product orbit of {} is too long",
                p
            )));
        }
        return Ok(Preperiodicity {
            preperiodic: true,
            certificate: Certificate::Cycle {
                tail: rec.tail_length,
                cycle: rec.cycle_length.unwrap(),
            },
            orbit: rec,
        });
    }
    let rec = orbit_with(
        f,
        p,
        &OrbitLimits {
            max_steps: 10_000,
            height_cutoff: f64::INFINITY,
            max_bits: 1 << 12,
        },
    )?;
    if rec.status == OrbitStatus::Cycle {
        return Ok(Preperiodicity {
            preperiodic: true,
            certificate: Certificate::Cycle {
                tail: rec.tail_length,
                cycle: rec.cycle_length.unwrap(),
            },
            orbit: rec,
        });
    }
    Err(DynError::Undecided(format!(
        "no rigorous height bound on {}; orbit of {} did not cycle within budget",
        f.ambient(),
        p
    )))
}

/// Largest candidate count an enumeration may visit.
const ENUMERATION_LIMIT: u128 = 2_000_000_000;

fn height_radius(b: f64) -> Result<i64> {
    if !b.is_finite() || b < 0.0 {
        return Err(DynError::InvalidInput(format!(
            "height bound must be >= 0, got {}",
            b
        )));
    }
    let h = (b + 1e-12).exp().floor();
    if h > 1e9 {
        return Err(DynError::BudgetExceeded {
            what: format!("height bound {} is too large to enumerate", b),
            partial: None,
        });
    }
    Ok(h as i64)
}

/// Primitive integer vectors of length `n + 1` with max norm <= `h`, leftmost nonzero positive.
fn primitive_vectors(n: usize, h: i64, exec: Execution) -> Result<Vec<Vec<i64>>> {
    let count = (2 * h as u128 + 1).pow(n as u32 + 1);
    if count > ENUMERATION_LIMIT {
        return Err(DynError::BudgetExceeded {
            what: format!("{} candidate vectors exceed the enumeration limit", count),
            partial: None,
        });
    }
    // split on the first coordinate; a zero first coordinate recurses into a shorter block
    fn rest(len: usize, h: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>, lead_done: bool) {
        if len == 0 {
            let g = prefix.iter().fold(0i64, |acc, &v| acc.gcd(&v));
            if g == 1 {
                out.push(prefix.clone());
            }
            return;
        }
        let lo = if lead_done { -h } else { 0 };
        for v in lo..=h {
            prefix.push(v);
            rest(len - 1, h, prefix, out, lead_done || v != 0);
            prefix.pop();
        }
    }
    let firsts: Vec<i64> = (0..=h).collect();
    let chunks = par_map(exec, &firsts, |&x0| {
        let mut out = Vec::new();
        let mut prefix = vec![x0];
        rest(n, h, &mut prefix, &mut out, x0 != 0);
        out
    });
    Ok(chunks.into_iter().flatten().collect())
}

fn rational_factor_points(n: usize, b: f64, exec: Execution) -> Result<Vec<(ProjPoint, f64)>> {
    let h = height_radius(b)?;
    let vecs = primitive_vectors(n, h, exec)?;
    let mut pts: Vec<(ProjPoint, f64)> = par_map(exec, &vecs, |v| {
        let p = ProjPoint::from_ints(v).expect("nonzero vector");
        let ht = point_height(&p).expect("rational point").value;
        (p, ht)
    });
    pts.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(pts)
}

/// Box size `M` for quadratic points of height <= `bound`.
fn quadratic_box(bound: f64) -> Result<i64> {
    let m = (2.0 * bound + 2e-12).exp().floor();
    if m.is_nan() || m >= 1e6 || 8.0 * m * m * m > ENUMERATION_LIMIT as f64 {
        return Err(DynError::BudgetExceeded {
            what: format!("quadratic box for height {} is too large", bound),
            partial: None,
        });
    }
    Ok(m as i64)
}

/// Roots of height <= `bound` of the irreducible primitive quadratics `a x^2 + b x + c`
/// with leading coefficient `a`, inside the box `M`.
fn quadratic_points_with_lead(a: i64, m: i64, bound: f64) -> Vec<ProjPoint> {
    let mut out = Vec::new();
    for c in -m..=m {
        if c == 0 {
            continue;
        }
        // a + |b| + |c| <= a (1 + |x1|)(1 + |x2|) <= 4 M(poly)
        let bmax = (4 * m - a - c.abs()).min(2 * m);
        if bmax < 0 {
            continue;
        }
        for b in -bmax..=bmax {
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
            if disc >= 0 {
                let s = (disc as u128).sqrt();
                if s * s == disc as u128 {
                    continue;
                }
            }
            let two_a = BigInt::from(2 * a);
            let re = Rat::new(BigInt::from(-b), two_a.clone());
            let half = Rat::new(BigInt::one(), two_a);
            for sign in [1i64, -1] {
                let root = quad_reduce(
                    re.clone(),
                    &half * Rat::from_integer(sign.into()),
                    disc as i64,
                );
                if root.abs_height().value <= bound + 1e-12 {
                    out.push(ProjPoint::affine(root));
                }
            }
        }
    }
    out
}

fn quadratic_points(bound: f64, exec: Execution) -> Result<Vec<ProjPoint>> {
    let m = quadratic_box(bound)?;
    let leads: Vec<i64> = (1..=m).collect();
    let chunks = par_map(exec, &leads, |&a| quadratic_points_with_lead(a, m, bound));
    Ok(chunks.into_iter().flatten().collect())
}

/// All points of height <= `b` (sum of factor heights) whose coordinates generate a
/// field of degree <= `d`, sorted by canonical form.
pub fn enumerate_points(ambient: &Ambient, d: u32, b: f64) -> Result<Vec<ProjPoint>> {
    enumerate_points_with(ambient, d, b, Execution::default())
}

pub fn enumerate_points_with(
    ambient: &Ambient,
    d: u32,
    b: f64,
    exec: Execution,
) -> Result<Vec<ProjPoint>> {
    match d {
        1 => {}
        2 if ambient.is_p1() => {}
        2 => {
            return Err(DynError::Unsupported(format!(
                "quadratic points are only enumerated on P1, not {}",
                ambient
            )))
        }
        _ => {
            return Err(DynError::Unsupported(format!(
                "field degree {} (only 1 and 2)",
                d
            )))
        }
    }
    let mut acc: Vec<(Vec<ProjPoint>, f64)> = vec![(Vec::new(), 0.0)];
    for &n in ambient.factors() {
        let pts = rational_factor_points(n, b, exec)?;
        let mut next = Vec::new();
        for (prefix, h0) in &acc {
            for (p, h) in &pts {
                if h0 + h <= b + 1e-12 {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    next.push((v, h0 + h));
                }
            }
        }
        acc = next;
    }
    let mut out: Vec<ProjPoint> = acc
        .into_iter()
        .map(|(parts, _)| ProjPoint::product(&parts).expect("rational blocks"))
        .collect();
    if d == 2 {
        out.extend(quadratic_points(b, exec)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ZfEntry {
    pub point: ProjPoint,
    pub field: Option<i64>,
    /// Minimal polynomial of each affine coordinate (`-` at infinity), `;`-separated.
    pub min_poly: String,
    pub height: HeightValue,
    pub tail: usize,
    pub cycle: usize,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub map: String,
    pub d: u32,
    pub bound: f64,
    /// Height up to which candidates were actually enumerated.
    pub searched_bound: f64,
    /// Every preperiodic point has height at most this value.
    pub preperiodic_bound: f64,
    /// True when `bound >= preperiodic_bound`, i.e. the list is all preperiodic points of degree <= d.
    pub complete: bool,
    pub entries: Vec<ZfEntry>,
    pub counts_per_field: BTreeMap<String, usize>,
    pub candidates: usize,
    pub galois_stable: bool,
    pub elapsed: Duration,
}

pub fn field_label(field: Option<i64>) -> String {
    match field {
        None => "Q".to_string(),
        Some(d) => format!("Q(sqrt({}))", d),
    }
}

fn min_poly_label(p: &ProjPoint) -> String {
    p.blocks()
        .iter()
        .map(|b| {
            if b.len() != 2 {
                return "-".to_string();
            }
            if b[1].is_zero() {
                "-".to_string()
            } else {
                b[0].try_div(&b[1])
                    .expect("same field")
                    .min_poly()
                    .to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn zf_d_search(f: &PolyEndo, d: u32, b: f64) -> Result<SearchReport> {
    zf_d_search_with(f, d, b, Execution::default())
}

/// Preperiodic points of degree <= `d` and height <= `b`. For maps of degree >= 2 on
/// (products of) P^1 these are exactly the points of arithmetic degree below the
/// dynamical degree, and the search is complete once `b` reaches the preperiodic bound.
pub fn zf_d_search_with(f: &PolyEndo, d: u32, b: f64, exec: Execution) -> Result<SearchReport> {
    let started = Instant::now();
    if !f.ambient().factors().iter().all(|&n| n == 1) || f.block_degrees().iter().any(|&r| r < 2) {
        return Err(DynError::Unsupported(format!(
            "rigorous searches need maps of degree >= 2 on products of P1, got {}",
            f.notation()
        )));
    }
    let bounds = factor_bounds(f)?;
    let pre_bound: f64 = bounds.iter().sum();
    let searched = b.min(pre_bound + HEIGHT_MARGIN);
    let keep = |p: &ProjPoint| -> Result<Option<ZfEntry>> {
        let v = is_preperiodic_given(f, p, &bounds)?;
        Ok(match (v.preperiodic, &v.certificate) {
            (true, Certificate::Cycle { tail, cycle }) => Some(ZfEntry {
                point: p.clone(),
                field: p.field(),
                min_poly: min_poly_label(p),
                height: point_height(p)?,
                tail: *tail,
                cycle: *cycle,
            }),
            _ => None,
        })
    };
    let rational = enumerate_points_with(f.ambient(), 1, searched, exec)?;
    let mut candidates = rational.len();
    let mut entries = Vec::new();
    for e in par_map(exec, &rational, |p| keep(p)) {
        entries.extend(e?);
    }
    if d == 2 {
        if !f.ambient().is_p1() {
            return Err(DynError::Unsupported(format!(
                "quadratic points are only enumerated on P1, not {}",
                f.ambient()
            )));
        }
        // stream the quadratic box one leading coefficient at a time
        let m = quadratic_box(searched)?;
        let leads: Vec<i64> = (1..=m).collect();
        let chunks = par_map(exec, &leads, |&a| -> Result<(usize, Vec<ZfEntry>)> {
            let pts = quadratic_points_with_lead(a, m, searched);
            let mut found = Vec::new();
            for p in &pts {
                found.extend(keep(p)?);
            }
            Ok((pts.len(), found))
        });
        for c in chunks {
            let (n, found) = c?;
            candidates += n;
            entries.extend(found);
        }
    } else if d != 1 {
        return Err(DynError::Unsupported(format!(
            "field degree {} (only 1 and 2)",
            d
        )));
    }
    entries.sort_by(|a, b| a.point.cmp(&b.point));
    let mut counts = BTreeMap::new();
    for e in &entries {
        *counts.entry(field_label(e.field)).or_insert(0) += 1;
    }
    let index: HashMap<&ProjPoint, (usize, usize)> = entries
        .iter()
        .map(|e| (&e.point, (e.tail, e.cycle)))
        .collect();
    let galois_stable = entries.iter().all(|e| {
        e.field.is_none() || index.get(&e.point.galois_conjugate()) == Some(&(e.tail, e.cycle))
    });
    Ok(SearchReport {
        map: f.notation(),
        d,
        bound: b,
        searched_bound: searched,
        preperiodic_bound: pre_bound,
        complete: b + HEIGHT_MARGIN >= pre_bound,
        entries,
        counts_per_field: counts,
        candidates,
        galois_stable,
        elapsed: started.elapsed(),
    })
}

#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub param: Rat,
    pub map: Option<String>,
    pub count: Option<usize>,
    pub points: Vec<ProjPoint>,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub family: String,
    pub d: u32,
    pub bound: f64,
    pub rows: Vec<FamilyRow>,
    pub max_count: Option<usize>,
    pub argmax: Vec<Rat>,
    /// count -> number of fibers with that count
    pub histogram: BTreeMap<usize, usize>,
}

pub fn family_ubc_experiment(
    family: &AffineFamily,
    params: &[Rat],
    d: u32,
    b: f64,
) -> Result<FamilyReport> {
    family_ubc_experiment_with(family, params, d, b, Execution::default())
}

pub fn family_ubc_experiment_with(
    family: &AffineFamily,
    params: &[Rat],
    d: u32,
    b: f64,
    exec: Execution,
) -> Result<FamilyReport> {
    let unique: Vec<Rat> = params
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let generic = family.generic_degree();
    let rows = par_map(exec, &unique, |c| -> Result<FamilyRow> {
        let mut row = FamilyRow {
            param: c.clone(),
            map: None,
            count: None,
            points: Vec::new(),
            diagnostic: None,
        };
        let f = match family.specialize(c) {
            Ok(f) => f,
            Err(e) => {
                row.diagnostic = Some(format!("degenerate fiber: {}", e));
                return Ok(row);
            }
        };
        row.map = Some(f.notation());
        if f.degree() != generic {
            row.diagnostic = Some(format!(
                "resultant vanishes: degree drops from {} to {}",
                generic,
                f.degree()
            ));
            return Ok(row);
        }
        if f.degree() < 2 {
            row.diagnostic = Some("fiber map has degree 1".into());
            return Ok(row);
        }
        let rep = zf_d_search_with(&f, d, b, Execution::Sequential)?;
        row.count = Some(rep.entries.len());
        row.points = rep.entries.into_iter().map(|e| e.point).collect();
        Ok(row)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let max_count = rows.iter().filter_map(|r| r.count).max();
    let argmax = rows
        .iter()
        .filter(|r| r.count.is_some() && r.count == max_count)
        .map(|r| r.param.clone())
        .collect();
    let mut histogram = BTreeMap::new();
    for r in &rows {
        if let Some(c) = r.count {
            *histogram.entry(c).or_insert(0) += 1;
        }
    }
    Ok(FamilyReport {
        family: family.source().to_string(),
        d,
        bound: b,
        rows,
        max_count,
        argmax,
        histogram,
    })
}

/// Numerator/denominator pair of a rational, for callers that print parameters.
pub fn rat_parts(r: &Rat) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_int;
    use crate::parse::{parse_map, parse_point};

    fn pt(s: &str) -> ProjPoint {
        parse_point(s).unwrap()
    }

    #[test]
    fn orbit_examples() {
        let sq = parse_map("x^2").unwrap();
        let rec = orbit(&sq, &pt("-1:1"), 10, f64::INFINITY).unwrap();
        assert_eq!(
            (rec.status, rec.tail_length, rec.cycle_length),
            (OrbitStatus::Cycle, 1, Some(1))
        );
        let f = parse_map("x^2 - 1").unwrap();
        let rec = orbit(&f, &pt("0:1"), 10, f64::INFINITY).unwrap();
        assert_eq!((rec.tail_length, rec.cycle_length), (0, Some(2)));
        assert_eq!(rec.points[2], rec.points[0]);
        let rec = orbit(&sq, &pt("2:1"), 50, 5.0).unwrap();
        assert_eq!(rec.status, OrbitStatus::Escaped);
        let ln2 = std::f64::consts::LN_2;
        for (k, h) in rec.height_trace.iter().enumerate() {
            assert!((h.value - ln2 * 2f64.powi(k as i32)).abs() < 1e-9);
        }
    }

    #[test]
    fn preperiodicity_examples() {
        let sq = parse_map("x^2").unwrap();
        assert!(is_preperiodic(&sq, &pt("1:1")).unwrap().preperiodic);
        let two = is_preperiodic(&sq, &pt("2:1")).unwrap();
        assert!(!two.preperiodic);
        match two.certificate {
            Certificate::Escape { hhat_lower, .. } => assert!(hhat_lower > 0.0),
            _ => panic!("expected an escape certificate"),
        }
        let f = parse_map("x^2 - 1").unwrap();
        let i = is_preperiodic(&f, &pt("i:1")).unwrap();
        assert!(!i.preperiodic);
        assert_eq!(i.orbit.points[1], pt("-2:1"));
    }

    #[test]
    fn enumeration_counts() {
        let p1 = Ambient::projective(1);
        let pts = enumerate_points(&p1, 1, 0.0).unwrap();
        assert_eq!(pts.len(), 4);
        let pts = enumerate_points(&p1, 1, 2f64.ln()).unwrap();
        assert_eq!(pts.len(), 8);
        let pts = enumerate_points(&p1, 2, 0.0).unwrap();
        assert_eq!(pts.len(), 10);
        assert!(enumerate_points(&Ambient::projective(2), 2, 0.0).is_err());
    }

    #[test]
    fn search_examples() {
        let sq = parse_map("x^2").unwrap();
        let rep = zf_d_search(&sq, 1, 100f64.ln()).unwrap();
        assert_eq!(rep.entries.len(), 4);
        assert!(rep.complete);
        let f = parse_map("x^2 - 1").unwrap();
        let rep = zf_d_search(&f, 1, 100f64.ln()).unwrap();
        let found: Vec<String> = rep.entries.iter().map(|e| e.point.notation()).collect();
        assert_eq!(found, vec!["0:1", "-1:1", "1:0", "1:1"]);
    }

    #[test]
    fn family_examples() {
        let fam = AffineFamily::parse("x^2 + c", "c").unwrap();
        let rep = family_ubc_experiment(
            &fam,
            &[rat_int(0), rat_int(-1), rat_int(-2)],
            1,
            100f64.ln(),
        )
        .unwrap();
        let counts: Vec<usize> = rep.rows.iter().map(|r| r.count.unwrap()).collect();
        // rows are sorted by parameter: -2, -1, 0
        assert_eq!(counts, vec![6, 4, 4]);
        assert_eq!(rep.max_count, Some(6));
        let one = family_ubc_experiment(&fam, &[rat_int(1)], 1, 100f64.ln()).unwrap();
        assert_eq!(one.rows[0].count, Some(1));
        let deg = AffineFamily::parse("c*x^2 + x", "c").unwrap();
        let rep = family_ubc_experiment(&deg, &[rat_int(0)], 1, 1.0).unwrap();
        assert!(rep.rows[0].diagnostic.is_some());
    }
}
