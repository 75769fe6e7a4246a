//! Argument parsing and command dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperspec::{HypParams, C64};

use crate::bench::{self, Study};
use crate::error::{exit, CliError, Result};
use crate::evaluate::{relative_error, Evaluator, RunConfig, DEFAULT_N_MAX, DEFAULT_TOL};
use crate::grid::{self, GridSpec, Region};
use crate::literal::{format_complex, parse_complex, parse_real, LiteralError};
use crate::output::{emit, finite_or_null, json_complex, num, opt_num, Document, Format};
use crate::table;

pub const THREADS_ENV: &str = "HYPERSPEC_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hyperspec", version, about = "Spectral evaluation of the Gauss hypergeometric function F(a, b, c; z)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate F at one or more points.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        /// Argument, e.g. `0.5`, `1+0.5i`, `-1/3`, `inf`; repeatable.
        #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_complex)]
        z: Vec<C64>,
        /// Also compare with the series oracle where it converges.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Reproduce table rows and report the deviation of each.
    Table {
        /// CSV in the shipped table format; the shipped tables if omitted.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Which shipped table to use when no file is given.
        #[arg(long, value_enum, default_value_t = TableChoice::All)]
        table: TableChoice,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate F on a grid.
    Grid {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum)]
        region: Region,
        /// Points per axis, at most 2000.
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real_arg, default_value = "-10")]
        x_min: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real_arg, default_value = "10")]
        x_max: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real_arg, default_value = "-3")]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real_arg, default_value = "3")]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real_arg, default_value = "-3")]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real_arg, default_value = "3")]
        im_max: f64,
        /// Compute errors against the series oracle where it converges.
        #[arg(long)]
        oracle: bool,
        /// Leave points closer than this to z = 1 out of the error summary.
        #[arg(long, default_value_t = 0.0)]
        exclude: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Convergence and conditioning studies on [-1/2, 1/2].
    Bench {
        #[command(flatten)]
        params: OptionalParamArgs,
        #[arg(long, value_enum)]
        study: Study,
        /// System sizes; defaults depend on the study.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Fourier truncations K (N = 2K + 1 modes) for the conditioning study.
        #[arg(long, value_delimiter = ',')]
        modes: Vec<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableChoice {
    All,
    Real,
    Complex,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub a: C64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub b: C64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub c: C64,
}

/// Parameters defaulting to the cube-root example `(-1/3, 1/2, 1/2)`.
#[derive(Debug, Args)]
pub struct OptionalParamArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, default_value = "-1/3")]
    pub a: C64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, default_value = "1/2")]
    pub b: C64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, default_value = "1/2")]
    pub c: C64,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Real semi-axis A of the ellipses, in (1/2, 1).
    #[arg(long = "A", visible_alias = "ellipse-a", value_parser = parse_real_arg, default_value = "0.6")]
    pub a_ellipse: f64,
    #[arg(long, value_parser = parse_real_arg, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    pub n_max: usize,
    /// Distance to a degenerate parameter set that triggers a warning.
    #[arg(long, value_parser = parse_real_arg, default_value_t = hyperspec::params::DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_real_arg(s: &str) -> std::result::Result<f64, LiteralError> {
    parse_real(s)
}

impl CommonArgs {
    fn config(&self, a: C64, b: C64, c: C64) -> Result<RunConfig> {
        let config = RunConfig {
            params: HypParams::new(a, b, c)?,
            a_ellipse: self.a_ellipse,
            tol: self.tol,
            n_max: self.n_max,
            epsilon: self.epsilon,
        };
        config.validate()?;
        Ok(config)
    }
}

fn header(command: &str, config: &RunConfig, warnings: &[String]) -> Vec<String> {
    let p = &config.params;
    let mut lines = vec![
        format!("hyperspec {} {command}", env!("CARGO_PKG_VERSION")),
        format!(
            "a = {}, b = {}, c = {}",
            format_complex(p.a),
            format_complex(p.b),
            format_complex(p.c)
        ),
        format!(
            "A = {}, tol = {:e}, n_max = {}, epsilon = {:e}",
            config.a_ellipse, config.tol, config.n_max, config.epsilon
        ),
    ];
    lines.extend(warnings.iter().map(|w| format!("warning: near-degenerate parameters: {w}")));
    lines
}

/// Cap rayon's pool from the environment; unset means all cores.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run_eval(params: &ParamArgs, z: &[C64], oracle: bool, common: &CommonArgs) -> Result<Document> {
    let config = common.config(params.a, params.b, params.c)?;
    let evaluator = Evaluator::new(config)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &z in z {
        let rec = evaluator.eval(z)?;
        let delta = evaluator.reference(z, oracle).map(|r| relative_error(rec.value, r));
        rows.push(vec![
            num(z.re),
            num(z.im),
            num(rec.value.re),
            num(rec.value.im),
            rec.domain.to_string(),
            rec.branch.to_string(),
            opt_num(delta),
        ]);
        let mut point = serde_json::json!({
            "z": json_complex(z),
            "F": json_complex(rec.value),
            "domain": rec.domain,
            "branch": rec.branch,
        });
        if let Some(d) = delta {
            point["dF"] = finite_or_null(d);
        }
        points.push(point);
    }
    let p = &config.params;
    Ok(Document {
        header: header("eval", &config, &evaluator.warnings()),
        columns: ["z_re", "z_im", "F_re", "F_im", "domain", "branch", "dF"]
            .map(String::from)
            .to_vec(),
        rows,
        footer: Vec::new(),
        json: serde_json::json!({
            "a": json_complex(p.a),
            "b": json_complex(p.b),
            "c": json_complex(p.c),
            "points": points,
        }),
    })
}

fn run_table(file: Option<&PathBuf>, choice: TableChoice, common: &CommonArgs) -> Result<(Document, bool)> {
    let rows = match file {
        Some(path) => {
            if let Err(e) = std::fs::metadata(path).and_then(|m| {
                if m.is_file() {
                    Ok(())
                } else {
                    Err(std::io::Error::other("not a regular file"))
                }
            }) {
                return Err(CliError::Unreadable {
                    path: path.clone(),
                    reason: e.to_string(),
                });
            }
            hyperspec_oracle::read_table_file(path).map_err(|e| match e {
                hyperspec_oracle::OracleError::Data(msg) if msg.starts_with(&path.display().to_string()) => {
                    CliError::Unreadable {
                        path: path.clone(),
                        reason: msg,
                    }
                }
                other => CliError::Data(other.to_string()),
            })?
        }
        None => hyperspec_oracle::table_reference()
            .into_iter()
            .filter(|r| match choice {
                TableChoice::All => true,
                TableChoice::Real => r.table == hyperspec_oracle::Table::RealArgument,
                TableChoice::Complex => r.table == hyperspec_oracle::Table::ComplexArgument,
            })
            .collect(),
    };
    // per-row parameters replace these; the options still apply
    let base = common.config(C64::new(0.1, 0.0), C64::new(0.2, 0.0), C64::new(0.3, 0.0))?;
    let outcomes = table::evaluate_rows(&rows, &base);
    let all_pass = outcomes.iter().all(|o| o.pass);
    let mut head = vec![
        format!("hyperspec {} table", env!("CARGO_PKG_VERSION")),
        format!(
            "A = {}, tol = {:e}, n_max = {}, epsilon = {:e}",
            base.a_ellipse, base.tol, base.n_max, base.epsilon
        ),
        format!(
            "pass: dF <= max({:e} * reported_dF, {:e}) and one unit in the last printed digit",
            table::DELTA_FACTOR,
            table::DELTA_FLOOR
        ),
    ];
    if let Some(path) = file {
        head.push(format!("file: {}", path.display()));
    }
    Ok((table::document(&outcomes, head), all_pass))
}

#[allow(clippy::too_many_arguments)]
fn run_grid(
    params: &ParamArgs,
    region: Region,
    resolution: usize,
    x_range: (f64, f64),
    re_range: (f64, f64),
    im_range: (f64, f64),
    oracle: bool,
    exclude: f64,
    common: &CommonArgs,
) -> Result<Document> {
    let config = common.config(params.a, params.b, params.c)?;
    let spec = GridSpec {
        region,
        resolution,
        x_range,
        re_range,
        im_range,
    };
    let pts = grid::points(&spec, config.a_ellipse)?;
    let evaluator = Evaluator::new(config)?;
    let values = grid::evaluate(&evaluator, &pts, oracle)?;
    let mut head = header("grid", &config, &evaluator.warnings());
    head.push(format!(
        "region = {}, resolution = {resolution}",
        region.to_possible_value().expect("no skipped variants").get_name()
    ));
    Ok(grid::document(&evaluator, &values, exclude, head))
}

fn run_bench(params: &OptionalParamArgs, study: Study, sizes: &[usize], modes: &[usize], common: &CommonArgs) -> Result<Document> {
    let config = common.config(params.a, params.b, params.c)?;
    let evaluator = Evaluator::new(config)?;
    let mut head = header("bench", &config, &evaluator.warnings());
    match study {
        Study::Conditioning => {
            let ns = if sizes.is_empty() { vec![40, 80, 160, 320] } else { sizes.to_vec() };
            let ks = if modes.is_empty() { (4..=24).step_by(2).collect() } else { modes.to_vec() };
            if ns.len() < 2 || ks.len() < 2 {
                return Err(CliError::Usage("a fit needs at least two sizes and two mode counts".into()));
            }
            head.push("study = conditioning (2-norm condition numbers)".into());
            let result = bench::conditioning(&config.params, config.a_ellipse, &ns, &ks)?;
            Ok(bench::conditioning_document(&result, head))
        }
        Study::Convergence => {
            let ns = if sizes.is_empty() { (4..=64).step_by(4).collect() } else { sizes.to_vec() };
            head.push("study = convergence (error relative to max |F| on [-1/2, 1/2])".into());
            let result = bench::convergence(&config.params, &ns)?;
            Ok(bench::convergence_document(&result, head))
        }
    }
}

/// Run a parsed command; the returned flag is false when table rows failed.
pub fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let (doc, common, rows_ok) = match &cli.command {
        Command::Eval { params, z, oracle, common } => (run_eval(params, z, *oracle, common)?, common, true),
        Command::Table { file, table, common } => {
            let (doc, ok) = run_table(file.as_ref(), *table, common)?;
            (doc, common, ok)
        }
        Command::Grid {
            params,
            region,
            resolution,
            x_min,
            x_max,
            re_min,
            re_max,
            im_min,
            im_max,
            oracle,
            exclude,
            common,
        } => (
            run_grid(
                params,
                *region,
                *resolution,
                (*x_min, *x_max),
                (*re_min, *re_max),
                (*im_min, *im_max),
                *oracle,
                *exclude,
                common,
            )?,
            common,
            true,
        ),
        Command::Bench {
            params,
            study,
            sizes,
            modes,
            common,
        } => (run_bench(params, *study, sizes, modes, common)?, common, true),
    };
    emit(&doc.render(common.format)?, common.out.as_deref())?;
    if !rows_ok {
        let failed = doc.rows.iter().filter(|r| r.get(14).map(String::as_str) == Some("false")).count();
        return Err(CliError::RowsFailed {
            failed,
            total: doc.rows.len(),
        });
    }
    Ok(())
}

/// Parse `args`, run, report errors on stderr and return the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => exit::OK,
        Err(e) => {
            eprintln!("hyperspec: {e}");
            e.exit_code()
        }
    }
}
