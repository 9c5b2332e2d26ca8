//! `aridyn`: runs height, orbit, degree and structure experiments and writes CSV reports.

mod commands;
mod config;
mod error;
mod report;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use aridyn::exec::Execution;
use clap::Parser;

use config::{merge, read_config_file, Command, ExperimentConfig, Origin, Setting};
use error::CliError;
use report::Table;

#[derive(Parser, Debug)]
#[command(
    name = "aridyn",
    version,
    about = "Arithmetic dynamics experiments with exact arithmetic"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Worker threads for parallel searches.
    #[arg(long)]
    workers: Option<String>,

    /// CSV output file (stdout if omitted).
    #[arg(long)]
    output: Option<String>,

    /// Map, e.g. `P1:[x^2 - y^2, x*y]` or the affine polynomial `x^2 - 2`.
    #[arg(long)]
    map: Option<String>,

    /// Point such as `2:1` or `1:2;0:1`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    point: Vec<String>,

    /// Degree bound of the searched number fields (1 or 2).
    #[arg(long)]
    d: Option<String>,

    /// Height bound: a number or `log N`.
    #[arg(long = "B")]
    bound: Option<String>,

    #[arg(long)]
    tol: Option<String>,

    #[arg(long)]
    n_max: Option<String>,

    #[arg(long)]
    max_steps: Option<String>,

    /// Height on products for arithmetic degrees: `sum` or `max`.
    #[arg(long)]
    height_choice: Option<String>,

    /// One-parameter family of polynomials, e.g. `x^2 + c`.
    #[arg(long)]
    family: Option<String>,

    /// Name of the family parameter (default `c`).
    #[arg(long)]
    param_name: Option<String>,

    /// Parameter values: `box:N`, `lo..hi` or a comma list.
    #[arg(long = "c", allow_hyphen_values = true)]
    params: Option<String>,

    /// Elliptic curve `E: a b` for y^2 = x^3 + a x + b; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    curve: Vec<String>,

    #[arg(long, allow_hyphen_values = true)]
    a_range: Option<String>,

    #[arg(long, allow_hyphen_values = true)]
    b_range: Option<String>,

    /// Integer matrix with rows separated by `;`, e.g. `2,0;0,3`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,

    /// Translation points on the curve, `O` or `x,y`, separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    translation: Option<String>,

    /// Generator `x,y` of the lattice of probes.
    #[arg(long, allow_hyphen_values = true)]
    generator: Option<String>,

    /// Linear forms cutting out the hypothesized subgroup, rows separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    hypothesis: Option<String>,

    /// Coefficients of the translate of the hypothesized subgroup.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,

    #[arg(long)]
    multiples: Option<String>,

    /// Largest torsion order that is tested.
    #[arg(long)]
    ceiling: Option<String>,

    /// Report to re-check (for `verify`).
    #[arg(long)]
    input: Option<String>,
}

impl Cli {
    fn settings(&self) -> Vec<Setting> {
        let single = [
            ("workers", &self.workers),
            ("output", &self.output),
            ("map", &self.map),
            ("d", &self.d),
            ("B", &self.bound),
            ("tol", &self.tol),
            ("n-max", &self.n_max),
            ("max-steps", &self.max_steps),
            ("height-choice", &self.height_choice),
            ("family", &self.family),
            ("param-name", &self.param_name),
            ("c", &self.params),
            ("a-range", &self.a_range),
            ("b-range", &self.b_range),
            ("matrix", &self.matrix),
            ("translation", &self.translation),
            ("generator", &self.generator),
            ("hypothesis", &self.hypothesis),
            ("p", &self.p),
            ("multiples", &self.multiples),
            ("ceiling", &self.ceiling),
            ("input", &self.input),
        ];
        let mut out: Vec<Setting> = single
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| setting(k, v)))
            .collect();
        out.extend(self.point.iter().map(|v| setting("point", v)));
        out.extend(self.curve.iter().map(|v| setting("curve", v)));
        out
    }
}

fn setting(key: &str, value: &str) -> Setting {
    Setting {
        key: key.to_string(),
        value: value.to_string(),
        origin: Origin::Flag,
    }
}

fn write_table(table: &Table, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Input(format!("cannot create {}: {}", path.display(), e)))?;
            table.write(BufWriter::new(file))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn execute(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.command == Command::Verify {
        let input = cfg
            .input
            .as_ref()
            .ok_or_else(|| CliError::Input("verify needs --input".into()))?;
        let (table, rows, failures) = verify::verify(input)?;
        write_table(&table, cfg.output.as_ref())?;
        if failures.is_empty() {
            eprintln!("verified {} rows", rows);
            return Ok(());
        }
        for f in failures.iter().take(10) {
            eprintln!("{}", f);
        }
        return Err(CliError::Invariant(format!(
            "{} of {} rows failed verification",
            failures.len(),
            rows
        )));
    }
    let outcome = commands::run(cfg, Execution::Parallel)?;
    write_table(&outcome.table, cfg.output.as_ref())?;
    eprintln!("{}", outcome.summary);
    match outcome.failure {
        Some(msg) => Err(CliError::Invariant(msg)),
        None => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => Vec::new(),
    };
    let cfg = ExperimentConfig::from_settings(cli.command, &merge(file, cli.settings()))?;
    match cfg.workers {
        Some(n) => run_with_workers(&cfg, n),
        None => execute(&cfg),
    }
}

#[cfg(feature = "parallel")]
fn run_with_workers(cfg: &ExperimentConfig, n: usize) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start {} workers: {}", n, e)))?;
    pool.install(|| execute(cfg))
}

#[cfg(not(feature = "parallel"))]
fn run_with_workers(cfg: &ExperimentConfig, _n: usize) -> Result<(), CliError> {
    execute(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
