//! One function per experiment; each returns a CSV table whose first column is `kind`.

use aridyn::abelian::{
    matrix_endo_degree_check, zf_structure_check_with, Hypothesis, StructureOptions,
};
use aridyn::degrees::{arith_degree_estimate_with, classify_product, ArithOptions, HeightChoice};
use aridyn::elliptic::{torsion_subgroup_with, EllPoint, EllipticCurve};
use aridyn::exec::{par_map, Execution};
use aridyn::heights::{canonical_height_with, CanonicalOptions};
use aridyn::linalg::{int_matrix, IntMatrix};
use aridyn::orbits::{
    default_height_cutoff, family_ubc_experiment_with, field_label, is_preperiodic, orbit_with,
    zf_d_search_with, Certificate, OrbitLimits, OrbitStatus,
};
use aridyn::parse::{parse_algnum, parse_map, parse_param_list, parse_point, AffineFamily};
use aridyn::projective::{point_height, PolyEndo, ProjPoint};
use aridyn::{dyn_degree, torsion_count_ubc, MatrixEndo};

use crate::config::{Command, ExperimentConfig, HeightChoiceArg};
use crate::error::CliError;
use crate::report::{num, Table};

pub const HEIGHT_COLUMNS: &[&str] = &[
    "kind",
    "map",
    "point",
    "height",
    "height_err",
    "canonical_height",
    "canonical_err",
    "rigorous",
];

pub const ORBIT_COLUMNS: &[&str] = &[
    "kind",
    "map",
    "point",
    "n",
    "height",
    "height_err",
    "status",
    "tail",
    "cycle",
];

pub const CLASSIFY_COLUMNS: &[&str] = &[
    "kind",
    "map",
    "point",
    "class",
    "certificate",
    "tail",
    "cycle",
    "escape_step",
    "hhat_lower",
    "alpha",
    "dyn_degree",
];

pub const DEGREE_COLUMNS: &[&str] = &[
    "kind",
    "map",
    "curve",
    "matrix",
    "translation",
    "value",
    "error",
    "source",
    "growth",
    "iterations",
    "relative_error",
    "passed",
];

pub const ARITH_COLUMNS: &[&str] = &[
    "kind",
    "map",
    "point",
    "n",
    "height",
    "height_err",
    "ratio",
    "estimate",
    "geometric_mean",
    "alpha",
    "dyn_degree",
    "verdict",
    "height_choice",
];

pub const ZF_COLUMNS: &[&str] = &[
    "kind",
    "map",
    "d",
    "bound",
    "point",
    "field",
    "min_poly",
    "height",
    "height_err",
    "tail",
    "cycle",
    "count",
    "complete",
    "searched_bound",
    "preperiodic_bound",
    "candidates",
    "galois_stable",
];

pub const FAMILY_COLUMNS: &[&str] = &[
    "kind",
    "family",
    "param_name",
    "param",
    "map",
    "d",
    "bound",
    "point",
    "count",
    "diagnostic",
    "max_count",
    "argmax",
    "histogram",
];

pub const TORSION_COLUMNS: &[&str] = &[
    "kind",
    "a",
    "b",
    "point",
    "order",
    "count",
    "structure",
    "diagnostic",
    "max_order",
    "histogram",
    "ceiling_violations",
];

pub const ABELIAN_COLUMNS: &[&str] = &[
    "kind",
    "curve",
    "matrix",
    "translation",
    "generator",
    "point",
    "coefficients",
    "alpha",
    "low",
    "predicted",
    "value",
    "growth",
    "iterations",
    "relative_error",
    "passed",
    "hypothesis",
    "p",
    "violations",
    "shift_violations",
    "alpha_above_delta",
    "model_checks",
    "model_failures",
];

pub struct Outcome {
    pub table: Table,
    /// One human-readable line for stderr.
    pub summary: String,
    /// Set when the run completed but a check it performed failed.
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(table: Table, summary: String) -> Self {
        Outcome {
            table,
            summary,
            failure: None,
        }
    }
}

pub fn run(cfg: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Height => heights(cfg, true),
        Command::CanonicalHeight => heights(cfg, false),
        Command::Orbit => orbits(cfg),
        Command::Classify => classify(cfg),
        Command::DynDegree => degree(cfg),
        Command::ArithDegree => arith(cfg),
        Command::Zfd => zfd(cfg, exec),
        Command::FamilyUbc => family(cfg, exec),
        Command::EllTorsion => torsion(cfg, exec),
        Command::AbelianCheck => abelian(cfg, exec),
        Command::Verify => unreachable!("verify is dispatched separately"),
    }
}

fn map_and_points(cfg: &ExperimentConfig) -> Result<(PolyEndo, Vec<ProjPoint>), CliError> {
    let f = parse_map(cfg.require_map()?)?;
    let points = cfg
        .require_points()?
        .iter()
        .map(|s| parse_point(s))
        .collect::<aridyn::Result<Vec<_>>>()?;
    for p in &points {
        if p.ambient() != *f.ambient() {
            return Err(CliError::Input(format!(
                "point {} does not lie in the ambient space of {}",
                p.notation(),
                f.notation()
            )));
        }
    }
    Ok((f, points))
}

fn heights(cfg: &ExperimentConfig, with_naive: bool) -> Result<Outcome, CliError> {
    let (f, points) = map_and_points(cfg)?;
    let opts = CanonicalOptions {
        tol: cfg.tol.unwrap_or(1e-9),
        ..CanonicalOptions::default()
    };
    let mut t = Table::new(HEIGHT_COLUMNS);
    let mut last = String::new();
    for p in &points {
        let hc = canonical_height_with(&f, p, &opts)?;
        let mut cells = vec![
            ("kind", "height".to_string()),
            ("map", f.notation()),
            ("point", p.notation()),
            ("canonical_height", num(hc.value)),
            ("canonical_err", num(hc.error)),
            ("rigorous", hc.rigorous.to_string()),
        ];
        if with_naive {
            let h = point_height(p)?;
            cells.push(("height", num(h.value)));
            cells.push(("height_err", num(h.error)));
        }
        t.push(&cells);
        last = format!(
            "{}: canonical height {} ± {}",
            p.notation(),
            num(hc.value),
            num(hc.error)
        );
    }
    let summary = if points.len() == 1 {
        last
    } else {
        format!("{} points", points.len())
    };
    Ok(Outcome::ok(t, summary))
}

fn orbits(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (f, points) = map_and_points(cfg)?;
    let cutoff = match cfg.bound {
        Some(b) if f.ambient().is_p1() => default_height_cutoff(&f, b)?,
        Some(b) => b,
        None => f64::INFINITY,
    };
    let lim = OrbitLimits {
        max_steps: cfg.max_steps,
        height_cutoff: cutoff,
        ..OrbitLimits::default()
    };
    let mut t = Table::new(ORBIT_COLUMNS);
    let mut statuses = Vec::new();
    for p in &points {
        let rec = orbit_with(&f, p, &lim)?;
        for (n, (q, h)) in rec.points.iter().zip(&rec.height_trace).enumerate() {
            t.push(&[
                ("kind", "orbit_point".into()),
                ("map", f.notation()),
                ("point", q.notation()),
                ("n", n.to_string()),
                ("height", num(h.value)),
                ("height_err", num(h.error)),
            ]);
        }
        let status = match rec.status {
            OrbitStatus::Cycle => "cycle",
            OrbitStatus::Escaped => "escaped",
            OrbitStatus::Budget => "budget",
        };
        let mut cells = vec![
            ("kind", "orbit".to_string()),
            ("map", f.notation()),
            ("point", p.notation()),
            ("n", (rec.points.len() - 1).to_string()),
            ("status", status.to_string()),
        ];
        if let Some(c) = rec.cycle_length {
            cells.push(("tail", rec.tail_length.to_string()));
            cells.push(("cycle", c.to_string()));
        }
        t.push(&cells);
        statuses.push(match rec.cycle_length {
            Some(c) => format!("{}: tail {}, cycle {}", p.notation(), rec.tail_length, c),
            None => format!(
                "{}: {} after {} steps",
                p.notation(),
                status,
                rec.points.len() - 1
            ),
        });
    }
    Ok(Outcome::ok(t, statuses.join("; ")))
}

fn classify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (f, points) = map_and_points(cfg)?;
    let mut t = Table::new(CLASSIFY_COLUMNS);
    let mut classes = Vec::new();
    if f.blocks().len() > 1 {
        for p in &points {
            let c = classify_product(&f, p)?;
            let class = if c.in_zf { "zariski-low" } else { "max-degree" };
            t.push(&[
                ("kind", "classification".into()),
                ("map", f.notation()),
                ("point", p.notation()),
                ("class", class.into()),
                ("alpha", num(c.alpha)),
                ("dyn_degree", num(c.dyn_degree)),
            ]);
            classes.push(format!("{}: {}", p.notation(), class));
        }
        return Ok(Outcome::ok(t, classes.join("; ")));
    }
    let Some(delta) = f.polarization_degree() else {
        return Err(CliError::Input(format!(
            "classify needs a polarized map or a product of P^1 maps, got {}",
            f.notation()
        )));
    };
    for p in &points {
        let mut cells = vec![
            ("kind", "classification".to_string()),
            ("map", f.notation()),
            ("point", p.notation()),
            ("dyn_degree", num(delta as f64)),
        ];
        let class = match is_preperiodic(&f, p) {
            Ok(res) => match res.certificate {
                Certificate::Cycle { tail, cycle } if res.preperiodic => {
                    cells.push(("certificate", "cycle".into()));
                    cells.push(("tail", tail.to_string()));
                    cells.push(("cycle", cycle.to_string()));
                    cells.push(("alpha", "1".into()));
                    "preperiodic"
                }
                Certificate::Escape {
                    step, hhat_lower, ..
                } if hhat_lower > 0.0 => {
                    cells.push(("certificate", "escape".into()));
                    cells.push(("escape_step", step.to_string()));
                    cells.push(("hhat_lower", num(hhat_lower)));
                    cells.push(("alpha", num(delta as f64)));
                    "max-degree"
                }
                _ => "unknown",
            },
            Err(aridyn::DynError::Undecided(_)) => "unknown",
            Err(e) => return Err(e.into()),
        };
        cells.push(("class", class.into()));
        t.push(&cells);
        classes.push(format!("{}: {}", p.notation(), class));
    }
    Ok(Outcome::ok(t, classes.join("; ")))
}

pub fn parse_curve(s: &str) -> Result<EllipticCurve, CliError> {
    let body = s.trim();
    let body = body
        .strip_prefix("E:")
        .or_else(|| body.strip_prefix("E :"))
        .unwrap_or(body);
    let parts: Vec<&str> = body
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|w| !w.is_empty())
        .collect();
    let [a, b] = parts.as_slice() else {
        return Err(CliError::Input(format!("curve '{}': expected 'E: a b'", s)));
    };
    let a: i64 = a
        .parse()
        .map_err(|_| CliError::Input(format!("curve '{}': bad coefficient '{}'", s, a)))?;
    let b: i64 = b
        .parse()
        .map_err(|_| CliError::Input(format!("curve '{}': bad coefficient '{}'", s, b)))?;
    Ok(EllipticCurve::new(a, b)?)
}

/// `O` or `x,y` with algebraic coordinates; parentheses are optional.
pub fn parse_ell_point(s: &str) -> Result<EllPoint, CliError> {
    let t = s.trim();
    if t == "O" {
        return Ok(EllPoint::Infinity);
    }
    let t = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .unwrap_or(t);
    let Some((x, y)) = t.split_once(',') else {
        return Err(CliError::Input(format!(
            "curve point '{}': expected 'O' or 'x,y'",
            s
        )));
    };
    Ok(EllPoint::affine(
        parse_algnum(x.trim())?,
        parse_algnum(y.trim())?,
    ))
}

pub fn ell_notation(p: &EllPoint) -> String {
    match p.coords() {
        None => "O".into(),
        Some((x, y)) => format!("{},{}", x, y),
    }
}

pub fn ell_tuple_notation(ps: &[EllPoint]) -> String {
    ps.iter().map(ell_notation).collect::<Vec<_>>().join(";")
}

pub fn parse_ell_tuple(s: &str) -> Result<Vec<EllPoint>, CliError> {
    s.split(';').map(parse_ell_point).collect()
}

pub fn parse_int_vec(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|w| {
            w.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Input(format!("'{}': expected comma-separated integers", s)))
        })
        .collect()
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_int_rows(s: &str) -> Result<Vec<Vec<i64>>, CliError> {
    let rows = s
        .split(';')
        .map(parse_int_vec)
        .collect::<Result<Vec<_>, _>>()?;
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(CliError::Input(format!(
            "'{}': rows have different lengths",
            s
        )));
    }
    Ok(rows)
}

fn int_rows_notation(rows: &[Vec<i64>]) -> String {
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn matrix_notation(m: &IntMatrix) -> String {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

pub fn matrix_endo(cfg: &ExperimentConfig) -> Result<MatrixEndo, CliError> {
    let curve = match cfg.curves.as_slice() {
        [c] => parse_curve(c)?,
        _ => {
            return Err(CliError::Input(format!(
                "{} needs exactly one --curve",
                cfg.command
            )))
        }
    };
    let rows = parse_int_rows(
        cfg.matrix
            .as_deref()
            .ok_or_else(|| CliError::Input(format!("{} needs --matrix", cfg.command)))?,
    )?;
    let translation = match &cfg.translation {
        Some(s) => parse_ell_tuple(s)?,
        None => vec![EllPoint::Infinity; rows.len()],
    };
    Ok(MatrixEndo::new(curve, int_matrix(&rows), translation)?)
}

fn degree(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut t = Table::new(DEGREE_COLUMNS);
    if cfg.map.is_none() {
        let f = matrix_endo(cfg)?;
        let check = matrix_endo_degree_check(&f)?;
        t.push(&[
            ("kind", "dyn_degree".into()),
            ("curve", curve_label(f.curve())),
            ("matrix", matrix_notation(f.matrix())),
            ("translation", ell_tuple_notation(f.translation())),
            ("value", num(check.rho_squared)),
            ("source", "spectral-radius".into()),
            ("growth", num(check.growth)),
            ("iterations", check.iterations.to_string()),
            ("relative_error", num(check.relative_error)),
            ("passed", check.passed.to_string()),
        ]);
        let summary = format!(
            "dynamical degree {} (height growth {}, relative error {})",
            num(check.rho_squared),
            num(check.growth),
            num(check.relative_error)
        );
        let failure = (!check.passed).then(|| {
            format!(
                "spectral radius and height growth disagree: {} vs {}",
                num(check.rho_squared),
                num(check.growth)
            )
        });
        return Ok(Outcome {
            table: t,
            summary,
            failure,
        });
    }
    let mut f = parse_map(cfg.require_map()?)?;
    if let Some(m) = &cfg.matrix {
        f = f.with_ns_matrix(int_matrix(&parse_int_rows(m)?))?;
    }
    let d = dyn_degree(&f)?;
    let mut cells = vec![
        ("kind", "dyn_degree".to_string()),
        ("map", f.notation()),
        ("value", num(d.value)),
        ("error", num(d.error)),
        ("source", d.source.to_string()),
    ];
    if let Some(m) = f.ns_matrix() {
        cells.push(("matrix", matrix_notation(m)));
    }
    t.push(&cells);
    Ok(Outcome::ok(
        t,
        format!("dynamical degree {} ({})", num(d.value), d.source),
    ))
}

fn arith(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let (f, points) = map_and_points(cfg)?;
    let opts = ArithOptions {
        n_max: cfg.n_max,
        height: match cfg.height_choice {
            HeightChoiceArg::Sum => HeightChoice::Sum,
            HeightChoiceArg::Max => HeightChoice::Max,
        },
        ..ArithOptions::default()
    };
    let choice = match cfg.height_choice {
        HeightChoiceArg::Sum => "sum",
        HeightChoiceArg::Max => "max",
    };
    let mut t = Table::new(ARITH_COLUMNS);
    let mut lines = Vec::new();
    for p in &points {
        let est = arith_degree_estimate_with(&f, p, &opts)?;
        for (n, h) in est.height_trace.iter().enumerate() {
            let mut cells = vec![
                ("kind", "arith_step".to_string()),
                ("map", f.notation()),
                ("point", p.notation()),
                ("n", n.to_string()),
                ("height", num(h.value)),
                ("height_err", num(h.error)),
                ("height_choice", choice.to_string()),
            ];
            if n > 0 {
                cells.push(("ratio", num(est.ratio_trace[n - 1])));
            }
            t.push(&cells);
        }
        t.push(&[
            ("kind", "arith_degree".into()),
            ("map", f.notation()),
            ("point", p.notation()),
            ("n", est.ratio_trace.len().to_string()),
            ("estimate", num(est.estimate)),
            ("geometric_mean", num(est.ratio_geometric_mean)),
            ("alpha", num(est.alpha())),
            ("dyn_degree", num(est.dyn_degree)),
            ("verdict", est.verdict.to_string()),
            ("height_choice", choice.to_string()),
        ]);
        lines.push(format!(
            "{}: alpha {} ({})",
            p.notation(),
            num(est.alpha()),
            est.verdict
        ));
    }
    Ok(Outcome::ok(t, lines.join("; ")))
}

fn zfd(cfg: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let f = parse_map(cfg.require_map()?)?;
    let b = cfg.require_bound()?;
    let rep = zf_d_search_with(&f, cfg.d, b, exec)?;
    let mut t = Table::new(ZF_COLUMNS);
    for e in &rep.entries {
        t.push(&[
            ("kind", "zf_point".into()),
            ("map", f.notation()),
            ("d", cfg.d.to_string()),
            ("bound", num(b)),
            ("point", e.point.notation()),
            ("field", field_label(e.field)),
            ("min_poly", e.min_poly.clone()),
            ("height", num(e.height.value)),
            ("height_err", num(e.height.error)),
            ("tail", e.tail.to_string()),
            ("cycle", e.cycle.to_string()),
        ]);
    }
    t.push(&[
        ("kind", "zf_summary".into()),
        ("map", f.notation()),
        ("d", cfg.d.to_string()),
        ("bound", num(b)),
        ("count", rep.entries.len().to_string()),
        ("complete", rep.complete.to_string()),
        ("searched_bound", num(rep.searched_bound)),
        ("preperiodic_bound", num(rep.preperiodic_bound)),
        ("candidates", rep.candidates.to_string()),
        ("galois_stable", rep.galois_stable.to_string()),
    ]);
    let summary = format!(
        "{} preperiodic points of degree <= {} and height <= {} ({} candidates{})",
        rep.entries.len(),
        cfg.d,
        num(b),
        rep.candidates,
        if rep.complete {
            ""
        } else {
            ", search truncated"
        }
    );
    Ok(Outcome::ok(t, summary))
}

fn histogram_notation(h: &std::collections::BTreeMap<usize, usize>) -> String {
    h.iter()
        .map(|(k, v)| format!("{}:{}", k, v))
        .collect::<Vec<_>>()
        .join(";")
}

fn family(cfg: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let src = cfg
        .family
        .as_deref()
        .ok_or_else(|| CliError::Input("family-ubc needs --family".into()))?;
    let fam = AffineFamily::parse(src, &cfg.param_name)?;
    let params = parse_param_list(
        cfg.params
            .as_deref()
            .ok_or_else(|| CliError::Input("family-ubc needs a parameter list --c".into()))?,
    )?;
    let b = cfg.require_bound()?;
    let rep = family_ubc_experiment_with(&fam, &params, cfg.d, b, exec)?;
    let mut t = Table::new(FAMILY_COLUMNS);
    for row in &rep.rows {
        let map = row.map.clone().unwrap_or_default();
        for p in &row.points {
            t.push(&[
                ("kind", "fiber_point".into()),
                ("family", src.to_string()),
                ("param_name", cfg.param_name.clone()),
                ("param", row.param.to_string()),
                ("map", map.clone()),
                ("d", cfg.d.to_string()),
                ("bound", num(b)),
                ("point", p.notation()),
            ]);
        }
        let mut cells = vec![
            ("kind", "fiber".to_string()),
            ("family", src.to_string()),
            ("param_name", cfg.param_name.clone()),
            ("param", row.param.to_string()),
            ("map", map),
            ("d", cfg.d.to_string()),
            ("bound", num(b)),
        ];
        if let Some(c) = row.count {
            cells.push(("count", c.to_string()));
        }
        if let Some(diag) = &row.diagnostic {
            cells.push(("diagnostic", diag.clone()));
        }
        t.push(&cells);
    }
    let argmax = rep
        .argmax
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(";");
    t.push(&[
        ("kind", "family_summary".into()),
        ("family", src.to_string()),
        ("d", cfg.d.to_string()),
        ("bound", num(b)),
        (
            "max_count",
            rep.max_count.map(|m| m.to_string()).unwrap_or_default(),
        ),
        ("argmax", argmax.clone()),
        ("histogram", histogram_notation(&rep.histogram)),
    ]);
    let summary = match rep.max_count {
        Some(m) => format!("max count {} at {} = {}", m, cfg.param_name, argmax),
        None => "no fiber could be searched".to_string(),
    };
    Ok(Outcome::ok(t, summary))
}

fn int_list(s: &str, what: &str) -> Result<Vec<i64>, CliError> {
    parse_param_list(s)?
        .iter()
        .map(|r| {
            if r.is_integer() {
                i64::try_from(r.to_integer())
                    .map_err(|_| CliError::Input(format!("{}: {} is too large", what, r)))
            } else {
                Err(CliError::Input(format!(
                    "{}: {} is not an integer",
                    what, r
                )))
            }
        })
        .collect()
}

fn torsion(cfg: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let mut curves: Vec<(i64, i64)> = Vec::new();
    for c in &cfg.curves {
        let e = parse_curve(c);
        // singular curves are still reported, with a diagnostic
        let ab = match e {
            Ok(e) => (e.a(), e.b()),
            Err(_) => {
                let nums = c
                    .trim_start_matches("E:")
                    .split(|ch: char| ch.is_whitespace() || ch == ',')
                    .filter(|w| !w.is_empty())
                    .map(|w| w.parse::<i64>())
                    .collect::<Result<Vec<_>, _>>();
                match nums.as_deref() {
                    Ok([a, b]) => (*a, *b),
                    _ => return Err(parse_curve(c).unwrap_err()),
                }
            }
        };
        curves.push(ab);
    }
    match (&cfg.a_range, &cfg.b_range) {
        (Some(a), Some(b)) => {
            let bs = int_list(b, "--b-range")?;
            for a in int_list(a, "--a-range")? {
                curves.extend(bs.iter().map(|&b| (a, b)));
            }
        }
        (None, None) => {}
        _ => {
            return Err(CliError::Input(
                "--a-range and --b-range must be given together".into(),
            ))
        }
    }
    if curves.is_empty() {
        return Err(CliError::Input(
            "ell-torsion needs --curve or --a-range/--b-range".into(),
        ));
    }
    curves.sort_unstable();
    curves.dedup();
    let rep = torsion_count_ubc(&curves, cfg.ceiling, exec)?;
    let points = par_map(exec, &rep.rows, |row| {
        match EllipticCurve::new(row.a, row.b) {
            Ok(e) if row.order.is_some() => torsion_subgroup_with(&e, cfg.ceiling).ok(),
            _ => None,
        }
    });
    let mut t = Table::new(TORSION_COLUMNS);
    for (row, pts) in rep.rows.iter().zip(&points) {
        for tp in pts.iter().flatten() {
            t.push(&[
                ("kind", "torsion_point".into()),
                ("a", row.a.to_string()),
                ("b", row.b.to_string()),
                ("point", ell_notation(&tp.point)),
                ("order", tp.order.to_string()),
            ]);
        }
        let mut cells = vec![
            ("kind", "curve".to_string()),
            ("a", row.a.to_string()),
            ("b", row.b.to_string()),
        ];
        if let Some(o) = row.order {
            cells.push(("count", o.to_string()));
        }
        if let Some(s) = &row.structure {
            cells.push(("structure", s.clone()));
        }
        if let Some(d) = &row.diagnostic {
            cells.push(("diagnostic", d.clone()));
        }
        t.push(&cells);
    }
    t.push(&[
        ("kind", "torsion_summary".into()),
        (
            "max_order",
            rep.max_order.map(|m| m.to_string()).unwrap_or_default(),
        ),
        ("histogram", histogram_notation(&rep.histogram)),
        ("ceiling_violations", rep.ceiling_violations.to_string()),
    ]);
    let summary = format!(
        "{} curves, largest torsion subgroup {}",
        rep.rows.len(),
        rep.max_order
            .map(|m| m.to_string())
            .unwrap_or_else(|| "-".into())
    );
    let failure = (rep.ceiling_violations > 0).then(|| {
        format!(
            "{} curves exceed the torsion ceiling {}",
            rep.ceiling_violations, rep.ceiling
        )
    });
    Ok(Outcome {
        table: t,
        summary,
        failure,
    })
}

fn abelian(cfg: &ExperimentConfig, exec: Execution) -> Result<Outcome, CliError> {
    let f = matrix_endo(cfg)?;
    let hypothesis = match &cfg.hypothesis {
        Some(v) => Some(Hypothesis {
            forms: parse_int_rows(v)?,
            p: cfg.p.as_deref().map(parse_int_vec).transpose()?,
        }),
        None if cfg.p.is_some() => return Err(CliError::Input("--p needs --hypothesis".into())),
        None => None,
    };
    let opts = StructureOptions {
        multiples: cfg.multiples,
        height_bound: cfg
            .bound
            .unwrap_or(StructureOptions::default().height_bound),
        n_max: cfg.n_max,
        tol: cfg.tol.unwrap_or(StructureOptions::default().tol),
        generator: cfg.generator.as_deref().map(parse_ell_point).transpose()?,
        hypothesis,
        torsion_ceiling: cfg.ceiling,
        exec,
    };
    let rep = zf_structure_check_with(&f, cfg.d, &opts)?;
    let curve = curve_label(f.curve());
    let matrix = matrix_notation(f.matrix());
    let translation = ell_tuple_notation(f.translation());
    let generator = ell_notation(&rep.generator);
    let mut t = Table::new(ABELIAN_COLUMNS);
    let base = |kind: &str| {
        vec![
            ("kind", kind.to_string()),
            ("curve", curve.clone()),
            ("matrix", matrix.clone()),
            ("translation", translation.clone()),
            ("generator", generator.clone()),
        ]
    };
    for pr in &rep.probes {
        let mut cells = base("probe");
        cells.extend([
            ("point", ell_tuple_notation(&pr.point)),
            (
                "coefficients",
                pr.coefficients
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("alpha", num(pr.alpha)),
            ("low", pr.low.to_string()),
            ("predicted", pr.predicted.to_string()),
        ]);
        t.push(&cells);
    }
    let dc = &rep.degree_check;
    let mut cells = base("degree_check");
    cells.extend([
        ("value", num(dc.rho_squared)),
        ("growth", num(dc.growth)),
        ("iterations", dc.iterations.to_string()),
        ("relative_error", num(dc.relative_error)),
        ("passed", dc.passed.to_string()),
    ]);
    t.push(&cells);
    let passed = rep.passed();
    let mut cells = base("structure");
    cells.extend([
        ("value", num(rep.delta)),
        ("hypothesis", int_rows_notation(&rep.hypothesis.forms)),
        (
            "p",
            rep.p
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ),
        ("violations", rep.violations.len().to_string()),
        ("shift_violations", rep.shift_violations.to_string()),
        ("alpha_above_delta", rep.alpha_above_delta.to_string()),
        ("model_checks", rep.model_checks.to_string()),
        ("model_failures", rep.model_failures.to_string()),
        ("passed", passed.to_string()),
    ]);
    t.push(&cells);
    let summary = format!(
        "{} probes, {} of low degree, {} violations, delta {}",
        rep.probes.len(),
        rep.low_points().len(),
        rep.violations.len(),
        num(rep.delta)
    );
    let failure = (!passed).then(|| {
        format!(
            "structure check failed: {} violations, {} shift violations, {} model failures, degree check {}",
            rep.violations.len(),
            rep.shift_violations,
            rep.model_failures,
            if dc.passed { "passed" } else { "failed" }
        )
    });
    Ok(Outcome {
        table: t,
        summary,
        failure,
    })
}

pub fn curve_label(e: &EllipticCurve) -> String {
    format!("E: {} {}", e.a(), e.b())
}
