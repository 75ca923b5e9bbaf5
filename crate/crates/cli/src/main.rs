//! `nulfrac`: fractional sums, differences, Abel solvers, Taylor defects,
//! fractional exponential/trigonometric series and the verification suite,
//! on quadratic and q-quadratic lattices.
//!
//! Exit status: 0 on success, 1 when a verification run has failures,
//! 2 on input or configuration errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;

use nulfrac_core::central::{
    central_caputo, central_rl_diff, CentralConfig, CentralMode,
};
use nulfrac_core::nabla::{
    abel_solve, caputo_diff, frac_sum, frac_taylor_defect, rl_diff_compose, rl_diff_direct,
    rl_diff_residue, taylor_expand_integer, AbelVariant, TaylorKind,
};
use nulfrac_core::series::{frac_exp, frac_trig, solve_seq_fde, SeriesSpec};
use nulfrac_core::{Grid64, Lattice64, OperatorConfig};

mod io;
use io::{CliError, FileConfig};

#[derive(Parser)]
#[command(name = "nulfrac", version, about = "Discrete fractional calculus on non-uniform lattices")]
struct Cli {
    /// JSON file providing defaults for lattice/gamma/alpha/input/output;
    /// command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Lattice as inline JSON, e.g. '{"family":"quadratic","c1":1,"c2":0,"c3":0}'
    #[arg(long)]
    lattice: Option<String>,
    /// Shift of the backward operators
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Fractional order
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Input grid CSV with header s,f
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DiffMode {
    Compose,
    Direct,
    Residue,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CentralDiffMode {
    Compose,
    Direct,
    Caputo,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AbelMode {
    Compose,
    InitialData,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TaylorDefectKind {
    Rl,
    Caputo,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TrigPart {
    Cos,
    Sin,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fractional sum of the input grid
    Sum(CommonArgs),
    /// Riemann-Liouville difference of the input grid
    Diff {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = DiffMode::Compose)]
        mode: DiffMode,
    },
    /// Central difference of the input grid (half-shifted output combs)
    CentralDiff {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = CentralDiffMode::Compose)]
        mode: CentralDiffMode,
    },
    /// Caputo difference of the input grid
    Caputo(CommonArgs),
    /// Solve the convolution equation sum(g) = f for g
    SolveAbel {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = AbelMode::Compose)]
        variant: AbelMode,
    },
    /// Taylor expansion: remainder of depth k, or the fractional defect
    Taylor {
        #[command(flatten)]
        common: CommonArgs,
        /// Integer expansion depth (writes the remainder grid)
        #[arg(long, conflicts_with = "kind")]
        k: Option<usize>,
        /// Fractional identity whose pointwise defect is written
        #[arg(long, value_enum)]
        kind: Option<TaylorDefectKind>,
    },
    /// Fractional exponential sampled on a unit-step grid
    Exp {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        series: SeriesArgs,
        /// Eigenvalue of the series
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Fractional cosine/sine sampled on a unit-step grid
    Trig {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        series: SeriesArgs,
        /// Frequency
        #[arg(long, default_value_t = 0.5)]
        omega: f64,
        /// Which series to write
        #[arg(long, value_enum, default_value_t = TrigPart::Cos)]
        part: TrigPart,
    },
    /// Characteristic roots and residual of a sequential difference equation
    SolveFde {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        series: SeriesArgs,
        /// Coefficients a0,a1,...,an of the characteristic polynomial
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        coeffs: Vec<f64>,
    },
    /// Run the numeric identity suite and write a JSON report
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SeriesArgs {
    /// Anchor of the series terms
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    anchor: f64,
    /// First sample point (defaults to anchor + 1)
    #[arg(long, allow_negative_numbers = true)]
    base: Option<f64>,
    /// Number of sample points
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// Term budget
    #[arg(long)]
    max_terms: Option<usize>,
    /// Relative tail tolerance (NULFRAC_TAIL_TOL overrides the default)
    #[arg(long)]
    tail_tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.config.as_deref().map(io::load_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &config) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(2)
        }
    }
}

struct Resolved {
    lattice: Lattice64,
    gamma: f64,
    alpha: f64,
    input: PathBuf,
    output: PathBuf,
}

fn resolve(common: &CommonArgs, config: &FileConfig, needs_alpha: bool) -> Result<Resolved, CliError> {
    resolve_with(common, config, needs_alpha, true)
}

fn resolve_with(
    common: &CommonArgs,
    config: &FileConfig,
    needs_alpha: bool,
    needs_input: bool,
) -> Result<Resolved, CliError> {
    let lattice = match (&common.lattice, &config.lattice) {
        (Some(arg), _) => io::parse_lattice_arg(arg)?,
        (None, Some(spec)) => spec.build()?,
        (None, None) => return Err(CliError::Config("no lattice given (flag --lattice or config file)".into())),
    };
    let gamma = common.gamma.or(config.gamma).unwrap_or(0.0);
    let alpha = match common.alpha.or(config.alpha) {
        Some(a) => a,
        None if needs_alpha => return Err(CliError::Config("no alpha given".into())),
        None => 1.0,
    };
    let input = match common.input.clone().or_else(|| config.input.as_ref().map(PathBuf::from)) {
        Some(p) => p,
        None if needs_input => return Err(CliError::Config("no input path given".into())),
        None => PathBuf::new(),
    };
    let output = common
        .output
        .clone()
        .or_else(|| config.output.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::Config("no output path given".into()))?;
    Ok(Resolved { lattice, gamma, alpha, input, output })
}

fn series_spec(args: &SeriesArgs, config: &FileConfig, lambda: Complex<f64>, omega: f64) -> Result<SeriesSpec<f64>, CliError> {
    let tail_env = std::env::var("NULFRAC_TAIL_TOL").ok().and_then(|v| v.parse::<f64>().ok());
    let tail = args.tail_tol.or(tail_env).or(config.tail_tol).unwrap_or(1e-12);
    let max_terms = args.max_terms.or(config.max_terms).unwrap_or(300);
    Ok(SeriesSpec::new(lambda, omega, max_terms, tail)?)
}

fn grid_op(
    common: &CommonArgs,
    config: &FileConfig,
    op: impl FnOnce(&OperatorConfig<f64>, &Grid64) -> Result<Grid64, nulfrac_core::Error>,
) -> Result<u8, CliError> {
    let r = resolve(common, config, true)?;
    let cfg = OperatorConfig::new(r.lattice, r.gamma, r.alpha)?;
    let f = io::load_grid_csv(&r.input)?;
    let out = op(&cfg, &f)?;
    io::write_grid_csv(&r.output, &out)?;
    Ok(0)
}

fn central_op(
    common: &CommonArgs,
    config: &FileConfig,
    op: impl FnOnce(&CentralConfig<f64>, &Grid64) -> Result<Grid64, nulfrac_core::Error>,
) -> Result<u8, CliError> {
    let r = resolve(common, config, true)?;
    let spec = SeriesSpec::new(Complex::new(0.0, 0.0), 0.0, 300, 1e-12)?;
    let cfg = CentralConfig::new(r.lattice, r.alpha, 0.0, spec)?;
    let f = io::load_grid_csv(&r.input)?;
    let out = op(&cfg, &f)?;
    io::write_grid_csv(&r.output, &out)?;
    Ok(0)
}

fn series_points(args: &SeriesArgs) -> (f64, usize) {
    (args.base.unwrap_or(args.anchor + 1.0), args.count)
}

fn run(command: Command, config: &FileConfig) -> Result<u8, CliError> {
    match command {
        Command::Sum(common) => grid_op(&common, config, frac_sum),
        Command::Diff { common, mode } => grid_op(&common, config, |c, f| match mode {
            DiffMode::Compose => rl_diff_compose(c, f),
            DiffMode::Direct => rl_diff_direct(c, f),
            DiffMode::Residue => rl_diff_residue(c, f),
        }),
        Command::CentralDiff { common, mode } => central_op(&common, config, |c, f| match mode {
            CentralDiffMode::Compose => central_rl_diff(c, f, CentralMode::Compose),
            CentralDiffMode::Direct => central_rl_diff(c, f, CentralMode::Direct),
            CentralDiffMode::Caputo => central_caputo(c, f),
        }),
        Command::Caputo(common) => grid_op(&common, config, caputo_diff),
        Command::SolveAbel { common, variant } => grid_op(&common, config, |c, f| {
            abel_solve(
                c,
                f,
                match variant {
                    AbelMode::Compose => AbelVariant::Compose,
                    AbelMode::InitialData => AbelVariant::InitialData,
                },
            )
        }),
        Command::Taylor { common, k, kind } => match (k, kind) {
            (Some(k), None) => grid_op(&common, config, move |c, f| {
                taylor_expand_integer(c, k, f).map(|(_, rem)| rem)
            }),
            (None, Some(kind)) => grid_op(&common, config, move |c, f| {
                frac_taylor_defect(
                    c,
                    f,
                    match kind {
                        TaylorDefectKind::Rl => TaylorKind::Rl,
                        TaylorDefectKind::Caputo => TaylorKind::Caputo,
                    },
                )
            }),
            _ => Err(CliError::Config("taylor needs exactly one of --k or --kind".into())),
        },
        Command::Exp { common, series, lambda } => {
            let r = resolve_with(&common, config, true, false)?;
            let spec = series_spec(&series, config, Complex::new(lambda, 0.0), 0.0)?;
            let cfg = CentralConfig::new(r.lattice, r.alpha, series.anchor, spec)?;
            let (base, count) = series_points(&series);
            let mut rows = Vec::with_capacity(count);
            for j in 0..count {
                let z = base + j as f64;
                let v = frac_exp(&cfg, z)?;
                rows.push((z, v.value, v.err_estimate));
            }
            io::write_series_csv(&r.output, &rows)?;
            Ok(0)
        }
        Command::Trig { common, series, omega, part } => {
            let r = resolve_with(&common, config, true, false)?;
            let spec = series_spec(&series, config, Complex::new(0.0, 0.0), omega)?;
            let cfg = CentralConfig::new(r.lattice, r.alpha, series.anchor, spec)?;
            let (base, count) = series_points(&series);
            let mut rows = Vec::with_capacity(count);
            for j in 0..count {
                let z = base + j as f64;
                let t = frac_trig(&cfg, z)?;
                let v = match part {
                    TrigPart::Cos => t.cos,
                    TrigPart::Sin => t.sin,
                };
                rows.push((z, v, t.err_estimate));
            }
            io::write_series_csv(&r.output, &rows)?;
            Ok(0)
        }
        Command::SolveFde { common, series, coeffs } => {
            let r = resolve_with(&common, config, true, false)?;
            let spec = series_spec(&series, config, Complex::new(0.0, 0.0), 0.0)?;
            let cfg = CentralConfig::new(r.lattice, r.alpha, series.anchor, spec)?;
            let sol = solve_seq_fde(&cfg, &coeffs)?;
            let (base, count) = series_points(&series);
            let points: Vec<f64> = (0..count).map(|j| base + j as f64).collect();
            let residual = sol.residual(&cfg, &points)?;
            #[derive(serde::Serialize)]
            struct RootJson {
                re: f64,
                im: f64,
            }
            #[derive(serde::Serialize)]
            struct FdeJson {
                roots: Vec<RootJson>,
                residual: f64,
                repeated_roots: bool,
            }
            let json = io::to_json_full_precision(&FdeJson {
                roots: sol
                    .roots()
                    .iter()
                    .map(|r| RootJson { re: r.lambda.re, im: r.lambda.im })
                    .collect(),
                residual,
                repeated_roots: sol.has_repeated_roots(),
            })?;
            if sol.has_repeated_roots() {
                eprintln!("warning: repeated characteristic roots; the returned basis is incomplete");
            }
            std::fs::write(&r.output, json)?;
            Ok(0)
        }
        Command::Verify { seed, trials, output } => {
            let seed = seed.or(config.seed).unwrap_or(0);
            let trials = trials.or(config.trials).unwrap_or(1);
            if trials == 0 {
                return Err(CliError::Config("trials must be >= 1".into()));
            }
            let reports = nulfrac_verify::run_suite(seed, trials);
            let mut failed = 0usize;
            // tolerate a closed stdout (e.g. piping into head)
            let mut console = |line: String| {
                use std::io::Write;
                let _ = writeln!(std::io::stdout(), "{}", line);
            };
            for r in &reports {
                let status = if r.passed { "pass" } else { "FAIL" };
                console(format!(
                    "[{}] {:<24} defect {:.3e} tol {:.1e} ({:.1} ms)",
                    status,
                    r.id,
                    r.max_rel_defect,
                    r.tolerance,
                    r.elapsed.as_secs_f64() * 1e3
                ));
                for w in &r.conditioning_warnings {
                    console(format!("       warning: {}", w));
                }
                if !r.passed {
                    failed += 1;
                }
            }
            if let Some(path) = output.or_else(|| config.output.as_ref().map(PathBuf::from)) {
                io::write_report_json(Path::new(&path), &reports)?;
            }
            console(format!("{} checks, {} failed", reports.len(), failed));
            Ok(if failed > 0 { 1 } else { 0 })
        }
    }
}
