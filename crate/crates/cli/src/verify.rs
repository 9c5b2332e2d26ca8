//! Re-checks a report written by any other command, row by row.
//!
//! Exact claims (orbit steps, cycles, torsion orders, counts) are recomputed exactly.
//! Floating-point columns are recomputed with the same code and compared after formatting,
//! except canonical heights, whose stored error interval must overlap the recomputed one.

use std::collections::HashMap;
use std::path::Path;

use aridyn::abelian::matrix_endo_degree_check;
use aridyn::degrees::{arith_degree_estimate_with, classify_product, ArithOptions, HeightChoice};
use aridyn::elliptic::{EllPoint, EllipticCurve};
use aridyn::heights::canonical_height;
use aridyn::linalg::int_matrix;
use aridyn::orbits::{
    field_label, is_preperiodic, orbit_with, Certificate, OrbitLimits, OrbitStatus,
};
use aridyn::parse::{parse_map, parse_point, parse_rat, AffineFamily};
use aridyn::projective::{evaluate, point_height, PolyEndo, ProjPoint};
use aridyn::{dyn_degree, MatrixEndo};

use crate::commands::{parse_curve, parse_ell_point, parse_ell_tuple, parse_int_rows};
use crate::error::CliError;
use crate::report::{num, Table};

pub const VERIFY_COLUMNS: &[&str] = &["kind", "row", "checked_kind", "status", "detail"];

struct Row {
    index: usize,
    cells: HashMap<String, String>,
}

impl Row {
    fn get(&self, col: &str) -> &str {
        self.cells.get(col).map(String::as_str).unwrap_or("")
    }

    fn need(&self, col: &str) -> Result<&str, String> {
        match self.get(col) {
            "" => Err(format!("missing column '{}'", col)),
            v => Ok(v),
        }
    }

    fn usize(&self, col: &str) -> Result<usize, String> {
        self.need(col)?
            .parse()
            .map_err(|_| format!("column '{}' is not a count", col))
    }

    fn f64(&self, col: &str) -> Result<f64, String> {
        self.need(col)?
            .parse()
            .map_err(|_| format!("column '{}' is not a number", col))
    }

    fn bool(&self, col: &str) -> Result<bool, String> {
        match self.need(col)? {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(format!("column '{}' is not a boolean", col)),
        }
    }
}

fn lib<T>(r: aridyn::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn expect_eq(what: &str, stored: &str, fresh: &str) -> Result<(), String> {
    if stored == fresh {
        Ok(())
    } else {
        Err(format!(
            "{}: stored {} but recomputed {}",
            what, stored, fresh
        ))
    }
}

fn map_of(row: &Row, cache: &mut HashMap<String, PolyEndo>) -> Result<PolyEndo, String> {
    let s = row.need("map")?;
    if let Some(f) = cache.get(s) {
        return Ok(f.clone());
    }
    let f = lib(parse_map(s))?;
    cache.insert(s.to_string(), f.clone());
    Ok(f)
}

fn iterates(f: &PolyEndo, p: &ProjPoint, n: usize) -> Result<Vec<ProjPoint>, String> {
    let mut out = vec![p.clone()];
    for _ in 0..n {
        let q = lib(evaluate(f, out.last().unwrap()))?;
        out.push(q);
    }
    Ok(out)
}

/// `f^(tail+cycle)(p) = f^tail(p)` with no earlier coincidence.
fn check_exact_cycle(f: &PolyEndo, p: &ProjPoint, tail: usize, cycle: usize) -> Result<(), String> {
    if cycle == 0 {
        return Err("cycle length 0".into());
    }
    let pts = iterates(f, p, tail + cycle)?;
    if pts[tail + cycle] != pts[tail] {
        return Err(format!("f^{}(P) != f^{}(P)", tail + cycle, tail));
    }
    for j in 1..tail + cycle {
        if pts[..j].contains(&pts[j]) {
            return Err(format!("orbit repeats already at step {}", j));
        }
    }
    Ok(())
}

fn check_height(row: &Row, p: &ProjPoint) -> Result<(), String> {
    if row.get("height").is_empty() {
        return Ok(());
    }
    let h = lib(point_height(p))?;
    expect_eq("height", row.get("height"), &num(h.value))?;
    expect_eq("height_err", row.get("height_err"), &num(h.error))
}

fn check_within_bound(row: &Row, p: &ProjPoint) -> Result<(), String> {
    let b = row.f64("bound")?;
    let h = lib(point_height(p))?;
    // the stored bound is rounded to 12 significant digits
    if h.lower() > b * (1.0 + 1e-11) + 1e-11 {
        return Err(format!(
            "height {} exceeds the bound {}",
            num(h.value),
            num(b)
        ));
    }
    let d = row.usize("d")?;
    let deg = p.field().map_or(1, |_| 2);
    if deg > d {
        return Err(format!("point of degree {} exceeds d = {}", deg, d));
    }
    Ok(())
}

fn ell_curve(row: &Row) -> Result<EllipticCurve, String> {
    if !row.get("curve").is_empty() {
        return parse_curve(row.get("curve")).map_err(|e| e.to_string());
    }
    let a: i64 = row.need("a")?.parse().map_err(|_| "bad 'a'".to_string())?;
    let b: i64 = row.need("b")?.parse().map_err(|_| "bad 'b'".to_string())?;
    lib(EllipticCurve::new(a, b))
}

fn matrix_endo_of(row: &Row) -> Result<MatrixEndo, String> {
    let e = ell_curve(row)?;
    let m = parse_int_rows(row.need("matrix")?).map_err(|e| e.to_string())?;
    let t = parse_ell_tuple(row.need("translation")?).map_err(|e| e.to_string())?;
    lib(MatrixEndo::new(e, int_matrix(&m), t))
}

struct Verifier {
    maps: HashMap<String, PolyEndo>,
    /// Current orbit being replayed from `orbit_point` rows.
    orbit: Vec<ProjPoint>,
    /// Heights from the `arith_step` rows preceding a summary.
    arith_steps: Vec<String>,
    /// Points listed per group key, for count checks.
    listed: HashMap<String, usize>,
    /// `(count, param)` of fibers, per family key.
    fibers: HashMap<String, Vec<(Option<usize>, String)>>,
    /// Torsion counts per curve, for the summary.
    torsion_counts: Vec<usize>,
}

impl Verifier {
    fn check(&mut self, kind: &str, row: &Row) -> Result<(), String> {
        match kind {
            "height" => {
                let p = lib(parse_point(row.need("point")?))?;
                check_height(row, &p)?;
                let f = map_of(row, &mut self.maps)?;
                let stored = row.f64("canonical_height")?;
                let stored_err = row.f64("canonical_err")?;
                let fresh = lib(canonical_height(&f, &p, 1e-9))?;
                let slack = stored_err + fresh.error + 1e-11 * (1.0 + stored.abs());
                if (stored - fresh.value).abs() > slack {
                    return Err(format!(
                        "canonical height {} ± {} disagrees with {} ± {}",
                        num(stored),
                        num(stored_err),
                        num(fresh.value),
                        num(fresh.error)
                    ));
                }
                Ok(())
            }
            "orbit_point" => {
                let f = map_of(row, &mut self.maps)?;
                let p = lib(parse_point(row.need("point")?))?;
                let n = row.usize("n")?;
                if n == 0 {
                    self.orbit.clear();
                } else {
                    if self.orbit.len() != n {
                        return Err(format!("step {} out of sequence", n));
                    }
                    let next = lib(evaluate(&f, self.orbit.last().unwrap()))?;
                    expect_eq("point", &p.notation(), &next.notation())?;
                }
                check_height(row, &p)?;
                self.orbit.push(p);
                Ok(())
            }
            "orbit" => {
                let start = lib(parse_point(row.need("point")?))?;
                if self.orbit.first() != Some(&start) || self.orbit.len() != row.usize("n")? + 1 {
                    return Err("orbit summary does not match the listed steps".into());
                }
                if row.need("status")? == "cycle" {
                    let f = map_of(row, &mut self.maps)?;
                    check_exact_cycle(&f, &start, row.usize("tail")?, row.usize("cycle")?)?;
                }
                Ok(())
            }
            "classification" => {
                let f = map_of(row, &mut self.maps)?;
                let p = lib(parse_point(row.need("point")?))?;
                match row.need("class")? {
                    "preperiodic" => {
                        check_exact_cycle(&f, &p, row.usize("tail")?, row.usize("cycle")?)
                    }
                    "max-degree" if f.blocks().len() == 1 => {
                        match lib(is_preperiodic(&f, &p))?.certificate {
                            Certificate::Escape { hhat_lower, .. } if hhat_lower > 0.0 => Ok(()),
                            _ => Err("no escape certificate".into()),
                        }
                    }
                    class @ ("max-degree" | "zariski-low") => {
                        let c = lib(classify_product(&f, &p))?;
                        expect_eq(
                            "class",
                            class,
                            if c.in_zf { "zariski-low" } else { "max-degree" },
                        )?;
                        expect_eq("alpha", row.get("alpha"), &num(c.alpha))
                    }
                    "unknown" => Ok(()),
                    other => Err(format!("unknown class '{}'", other)),
                }
            }
            "dyn_degree" => {
                if row.get("map").is_empty() {
                    let f = matrix_endo_of(row)?;
                    let c = lib(matrix_endo_degree_check(&f))?;
                    expect_eq("value", row.get("value"), &num(c.rho_squared))?;
                    expect_eq("growth", row.get("growth"), &num(c.growth))?;
                    expect_eq("passed", row.get("passed"), &c.passed.to_string())
                } else {
                    let mut f = map_of(row, &mut self.maps)?;
                    if !row.get("matrix").is_empty() {
                        let m = parse_int_rows(row.get("matrix")).map_err(|e| e.to_string())?;
                        f = lib(f.with_ns_matrix(int_matrix(&m)))?;
                    }
                    let d = lib(dyn_degree(&f))?;
                    expect_eq("value", row.get("value"), &num(d.value))?;
                    expect_eq("source", row.get("source"), &d.source.to_string())
                }
            }
            "arith_step" => {
                if row.usize("n")? == 0 {
                    self.arith_steps.clear();
                }
                if self.arith_steps.len() != row.usize("n")? {
                    return Err("step out of sequence".into());
                }
                self.arith_steps.push(row.need("height")?.to_string());
                Ok(())
            }
            "arith_degree" => {
                let f = map_of(row, &mut self.maps)?;
                let p = lib(parse_point(row.need("point")?))?;
                let opts = ArithOptions {
                    n_max: row.usize("n")?,
                    height: match row.get("height_choice") {
                        "max" => HeightChoice::Max,
                        _ => HeightChoice::Sum,
                    },
                    ..ArithOptions::default()
                };
                let est = lib(arith_degree_estimate_with(&f, &p, &opts))?;
                let trace: Vec<String> = est.height_trace.iter().map(|h| num(h.value)).collect();
                if trace != self.arith_steps {
                    return Err("listed height trace differs from the recomputed one".into());
                }
                expect_eq("estimate", row.get("estimate"), &num(est.estimate))?;
                expect_eq("alpha", row.get("alpha"), &num(est.alpha()))?;
                expect_eq("verdict", row.get("verdict"), &est.verdict.to_string())
            }
            "zf_point" => {
                let f = map_of(row, &mut self.maps)?;
                let p = lib(parse_point(row.need("point")?))?;
                check_exact_cycle(&f, &p, row.usize("tail")?, row.usize("cycle")?)?;
                check_within_bound(row, &p)?;
                check_height(row, &p)?;
                expect_eq("field", row.get("field"), &field_label(p.field()))?;
                let key = format!("{}|{}|{}", row.get("map"), row.get("d"), row.get("bound"));
                *self.listed.entry(key).or_default() += 1;
                Ok(())
            }
            "zf_summary" => {
                let key = format!("{}|{}|{}", row.get("map"), row.get("d"), row.get("bound"));
                let listed = self.listed.get(&key).copied().unwrap_or(0);
                expect_eq("count", row.need("count")?, &listed.to_string())
            }
            "fiber_point" => {
                let f = self.fiber_map(row)?;
                let p = lib(parse_point(row.need("point")?))?;
                let rec = lib(orbit_with(&f, &p, &OrbitLimits::default()))?;
                if rec.status != OrbitStatus::Cycle {
                    return Err("point is not preperiodic within the step budget".into());
                }
                check_within_bound(row, &p)?;
                let key = format!("{}|{}", row.get("family"), row.get("param"));
                *self.listed.entry(key).or_default() += 1;
                Ok(())
            }
            "fiber" => {
                if !row.get("map").is_empty() {
                    self.fiber_map(row)?;
                }
                let key = format!("{}|{}", row.get("family"), row.get("param"));
                let listed = self.listed.get(&key).copied().unwrap_or(0);
                let count = match row.get("count") {
                    "" => None,
                    c => {
                        expect_eq("count", c, &listed.to_string())?;
                        Some(listed)
                    }
                };
                self.fibers
                    .entry(row.get("family").to_string())
                    .or_default()
                    .push((count, row.get("param").to_string()));
                Ok(())
            }
            "family_summary" => {
                let fibers = self
                    .fibers
                    .get(row.get("family"))
                    .cloned()
                    .unwrap_or_default();
                let max = fibers.iter().filter_map(|(c, _)| *c).max();
                expect_eq(
                    "max_count",
                    row.get("max_count"),
                    &max.map(|m| m.to_string()).unwrap_or_default(),
                )?;
                let argmax: Vec<&str> = fibers
                    .iter()
                    .filter(|(c, _)| max.is_some() && *c == max)
                    .map(|(_, p)| p.as_str())
                    .collect();
                expect_eq("argmax", row.get("argmax"), &argmax.join(";"))
            }
            "torsion_point" => {
                let e = ell_curve(row)?;
                let p = parse_ell_point(row.need("point")?).map_err(|e| e.to_string())?;
                if !e.contains(&p) {
                    return Err("point is not on the curve".into());
                }
                let order = row.usize("order")? as u32;
                expect_eq(
                    "order",
                    &order.to_string(),
                    &lib(e.order(&p, order))?
                        .map(|o| o.to_string())
                        .unwrap_or("none".into()),
                )?;
                let key = format!("{}|{}", row.get("a"), row.get("b"));
                *self.listed.entry(key).or_default() += 1;
                Ok(())
            }
            "curve" => {
                let key = format!("{}|{}", row.get("a"), row.get("b"));
                let listed = self.listed.get(&key).copied().unwrap_or(0);
                if !row.get("count").is_empty() {
                    expect_eq("count", row.get("count"), &listed.to_string())?;
                    self.torsion_counts.push(listed);
                }
                Ok(())
            }
            "torsion_summary" => {
                let max = self
                    .torsion_counts
                    .iter()
                    .max()
                    .map(|m| m.to_string())
                    .unwrap_or_default();
                expect_eq("max_order", row.get("max_order"), &max)
            }
            "probe" => {
                let e = ell_curve(row)?;
                let pts = parse_ell_tuple(row.need("point")?).map_err(|e| e.to_string())?;
                if let Some(bad) = pts.iter().find(|p| !e.contains(p)) {
                    return Err(format!("{} is not on the curve", bad));
                }
                let g: EllPoint =
                    parse_ell_point(row.need("generator")?).map_err(|e| e.to_string())?;
                if !e.contains(&g) {
                    return Err("generator is not on the curve".into());
                }
                Ok(())
            }
            "degree_check" => {
                let f = matrix_endo_of(row)?;
                let c = lib(matrix_endo_degree_check(&f))?;
                expect_eq("value", row.get("value"), &num(c.rho_squared))?;
                expect_eq("growth", row.get("growth"), &num(c.growth))?;
                expect_eq("passed", row.get("passed"), &c.passed.to_string())
            }
            "structure" => {
                let clean = row.usize("violations")? == 0
                    && row.usize("shift_violations")? == 0
                    && row.usize("model_failures")? == 0;
                if row.bool("passed")? && !clean {
                    return Err("marked passed despite recorded violations".into());
                }
                Ok(())
            }
            other => Err(format!("unknown row kind '{}'", other)),
        }
    }

    fn fiber_map(&mut self, row: &Row) -> Result<PolyEndo, String> {
        let f = map_of(row, &mut self.maps)?;
        // the fiber must be the family specialized at the stored parameter
        let fam = lib(AffineFamily::parse(
            row.need("family")?,
            row.need("param_name")?,
        ))?;
        let c = lib(parse_rat(row.need("param")?))?;
        let g = lib(fam.specialize(&c))?;
        expect_eq("map", &f.notation(), &g.notation())?;
        Ok(f)
    }
}

pub fn verify(input: &Path) -> Result<(Table, usize, Vec<String>), CliError> {
    let mut reader = csv::Reader::from_path(input)
        .map_err(|e| CliError::Input(format!("cannot read {}: {}", input.display(), e)))?;
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("kind") {
        return Err(CliError::Input(format!(
            "{}: first column must be 'kind'",
            input.display()
        )));
    }
    let mut v = Verifier {
        maps: HashMap::new(),
        orbit: Vec::new(),
        arith_steps: Vec::new(),
        listed: HashMap::new(),
        fibers: HashMap::new(),
        torsion_counts: Vec::new(),
    };
    let mut table = Table::new(VERIFY_COLUMNS);
    let mut failures = Vec::new();
    let mut n = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = Row {
            index: i + 2,
            cells: headers
                .iter()
                .zip(rec.iter())
                .map(|(h, c)| (h.to_string(), c.to_string()))
                .collect(),
        };
        let kind = row.get("kind").to_string();
        let result = v.check(&kind, &row);
        let (status, detail) = match &result {
            Ok(()) => ("ok", String::new()),
            Err(msg) => ("failed", msg.clone()),
        };
        if let Err(msg) = result {
            failures.push(format!("line {} ({}): {}", row.index, kind, msg));
        }
        table.push(&[
            ("kind", "verification".into()),
            ("row", row.index.to_string()),
            ("checked_kind", kind),
            ("status", status.into()),
            ("detail", detail),
        ]);
        n += 1;
    }
    Ok((table, n, failures))
}
