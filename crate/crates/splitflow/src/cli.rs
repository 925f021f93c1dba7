//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on a numerical failure or a failed check,
//! 2 on invalid arguments.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use splitflow_core::order::{certification_window, certify_order};
use splitflow_core::scheme::{
    count_factors, expand_to_dimension, factor_count_table, named, MAX_EXPANDED_FACTORS,
};
use splitflow_core::systems::{by_name, SYSTEM_NAMES};
use splitflow_core::{integrate, IntegratorOptions, OdeSystem, Scheme};

use crate::bench::{emit_csv, rmse_table, run_benchmark, table_preset, DEFAULT_REPEATS};
use crate::formats::{read_scheme, write_trajectory_csv};

#[derive(Debug, Parser)]
#[command(
    name = "splitflow",
    version,
    about = "Coordinate-wise splitting integrators with frozen one-dimensional flows"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one system with one scheme and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Count the frozen-flow factors per step of the recursive substitution.
    Count(CountArgs),
    /// Measure RMSE against the RK45 reference and wall time; write CSV.
    Bench(BenchArgs),
    /// Measure the local order of a two-operator scheme with random matrices.
    VerifyOrder(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// System name: lotka-volterra, van-der-pol or lorenz.
    #[arg(long)]
    pub system: Option<String>,
    /// Parameter override `key=value`; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Final time (defaults to the system's standard horizon).
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<f64>,
    /// Initial state as comma-separated values (defaults to the system's
    /// standard initial state).
    #[arg(
        long,
        value_name = "X1,X2,...",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub u0: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Scheme name: lie-trotter, strang, 3rd, 4th, 6th, 8th, 10th, 12th, 14th.
    #[arg(
        long,
        conflicts_with = "scheme_file",
        required_unless_present = "scheme_file"
    )]
    pub scheme: Option<String>,
    /// Scheme file (`# dim=<N> order=<p> label=<text>` then `coord re im`
    /// lines). Two-operator files are expanded for larger systems.
    #[arg(long, value_name = "PATH")]
    pub scheme_file: Option<PathBuf>,
    /// Number of uniform steps.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Drop the imaginary part of the state after every step.
    #[arg(long)]
    pub project_real: bool,
    /// Record every k-th grid point.
    #[arg(long, default_value_t = 1, value_name = "K")]
    pub record_every: usize,
    /// Output file (standard output if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Number of coordinates.
    #[arg(long = "N", value_name = "N", required_unless_present = "table")]
    pub dims: Option<usize>,
    /// Factor count of the two-operator base (odd).
    #[arg(long, required_unless_present = "table")]
    pub q: Option<usize>,
    /// Print the factor-count table for all registered bases.
    #[arg(long, conflicts_with_all = ["dims", "q"])]
    pub table: bool,
    /// Largest N in the table.
    #[arg(long, default_value_t = 8, requires = "table")]
    pub max_n: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Preset with the system, schemes, step counts, horizon and initial
    /// state of reference table 2 (Lotka-Volterra), 3 (Van der Pol) or 4
    /// (Lorenz).
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4),
          conflicts_with_all = ["system", "params", "horizon", "u0", "schemes", "n_list"])]
    pub table: Option<u8>,
    #[command(flatten)]
    pub system: SystemArgs,
    /// Comma-separated scheme names.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<String>>,
    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Timed integrations per record (after one discarded warm-up).
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeats: usize,
    /// Output file (standard output if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Scheme name.
    #[arg(
        long,
        conflicts_with = "scheme_file",
        required_unless_present = "scheme_file"
    )]
    pub scheme: Option<String>,
    /// Two-operator scheme file.
    #[arg(long, value_name = "PATH")]
    pub scheme_file: Option<PathBuf>,
    /// Seeds as an inclusive range `a..b` or a comma-separated list.
    #[arg(long, default_value = "0..4")]
    pub seeds: String,
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn config(msg: impl std::fmt::Display) -> CliError {
    CliError::Config(msg.to_string())
}

fn failure(msg: impl std::fmt::Display) -> CliError {
    CliError::Failure(msg.to_string())
}

fn io_failure(e: std::io::Error) -> CliError {
    failure(format!("I/O error: {e}"))
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out, err),
        Command::Count(a) => count(a, out),
        Command::Bench(a) => bench(a, out, err),
        Command::VerifyOrder(a) => verify_order(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let msg = match &e {
                CliError::Config(m) => format!("error: {m}"),
                CliError::Failure(m) => format!("failed: {m}"),
            };
            let _ = writeln!(err, "{msg}");
            e.code()
        }
    }
}

fn parse_params(raw: &[String]) -> CliResult<Vec<(String, f64)>> {
    raw.iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| config(format!("parameter `{p}` is not KEY=VALUE")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| config(format!("parameter `{k}` has non-numeric value `{v}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

struct Setup {
    sys: Box<dyn OdeSystem>,
    horizon: f64,
    u0: Vec<f64>,
}

fn resolve_system(a: &SystemArgs) -> CliResult<Setup> {
    let name = a.system.as_deref().ok_or_else(|| {
        config(format!(
            "--system is required (one of {})",
            SYSTEM_NAMES.join(", ")
        ))
    })?;
    let params = parse_params(&a.params)?;
    let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    let sys = by_name(name, &refs).map_err(config)?;
    let horizon = match a.horizon.or(sys.default_horizon()) {
        Some(t) if t.is_finite() && t > 0.0 => t,
        Some(t) => return Err(config(format!("--T must be positive and finite, got {t}"))),
        None => return Err(config("--T is required for this system")),
    };
    let u0 = match a.u0.clone().or(sys.default_initial_state()) {
        Some(u) => u,
        None => return Err(config("--u0 is required for this system")),
    };
    if u0.len() != sys.dim() {
        return Err(config(format!(
            "--u0 has {} values but {} has dimension {}",
            u0.len(),
            sys.name(),
            sys.dim()
        )));
    }
    if u0.iter().any(|x| !x.is_finite()) {
        return Err(config("--u0 values must be finite"));
    }
    Ok(Setup { sys, horizon, u0 })
}

fn load_scheme_file(path: &Path) -> CliResult<Scheme> {
    let file = File::open(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let s = read_scheme(file).map_err(|e| config(format!("{}: {e}", path.display())))?;
    s.validate()
        .map_err(|e| config(format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn scheme_for_dim(name: Option<&str>, file: Option<&Path>, dim: usize) -> CliResult<Scheme> {
    let s = match (name, file) {
        (Some(n), _) => return named(n, dim).map_err(config),
        (None, Some(p)) => load_scheme_file(p)?,
        (None, None) => return Err(config("a scheme is required")),
    };
    if s.dim() == dim {
        return Ok(s);
    }
    if s.dim() == 2 && dim > 2 {
        let expected = count_factors(dim, s.len()).map_err(config)?;
        if expected > MAX_EXPANDED_FACTORS {
            return Err(config(format!(
                "expanding to dimension {dim} needs {expected} factors per step"
            )));
        }
        return expand_to_dimension(&s, dim).map_err(config);
    }
    Err(config(format!(
        "scheme has dimension {} but the system has dimension {dim}",
        s.dim()
    )))
}

fn open_output<'a>(path: Option<&Path>, out: &'a mut dyn Write) -> CliResult<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| failure(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(out),
    })
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let setup = resolve_system(&a.system)?;
    let scheme = scheme_for_dim(
        a.scheme.as_deref(),
        a.scheme_file.as_deref(),
        setup.sys.dim(),
    )?;
    if a.n == 0 {
        return Err(config("--n must be at least 1"));
    }
    if a.record_every == 0 {
        return Err(config("--record-every must be at least 1"));
    }
    if scheme.has_complex_coefficients() && !setup.sys.analytic_time() {
        return Err(config(format!(
            "{} has complex coefficients, which {} does not support",
            scheme.label(),
            setup.sys.name()
        )));
    }
    let opts = IntegratorOptions {
        project_real_each_step: a.project_real,
        record_every: a.record_every,
        ..Default::default()
    };
    let traj = integrate(
        setup.sys.as_ref(),
        &scheme,
        setup.horizon,
        a.n,
        &setup.u0,
        &opts,
    )
    .map_err(failure)?;
    let mut w = open_output(a.output.as_deref(), out)?;
    write_trajectory_csv(&traj, &mut w).map_err(failure)?;
    w.flush().map_err(io_failure)?;
    writeln!(
        err,
        "{} {} n={} factors/step={} max_imag={:e}",
        setup.sys.name(),
        scheme.label(),
        a.n,
        scheme.len(),
        traj.max_imag
    )
    .map_err(io_failure)?;
    Ok(0)
}

fn count(a: CountArgs, out: &mut dyn Write) -> CliResult<i32> {
    if a.table {
        if a.max_n < 2 {
            return Err(config("--max-n must be at least 2"));
        }
        let rows = factor_count_table(a.max_n);
        let mut line = format!("{:<12} {:>3}", "base", "p");
        for n in 2..=a.max_n {
            line += &format!(" {:>14}", format!("N={n}"));
        }
        writeln!(out, "{line}").map_err(io_failure)?;
        for row in rows {
            let mut line = format!("{:<12} {:>3}", row.name, row.order);
            for c in row.counts {
                line += &format!(" {c:>14}");
            }
            writeln!(out, "{line}").map_err(io_failure)?;
        }
        return Ok(0);
    }
    let (n, q) = (a.dims.unwrap_or(0), a.q.unwrap_or(0));
    let c = count_factors(n, q).map_err(config)?;
    writeln!(out, "{c}").map_err(io_failure)?;
    Ok(0)
}

fn bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    if a.repeats == 0 {
        return Err(config("--repeats must be at least 1"));
    }
    let (setup, schemes, n_values) = match a.table {
        Some(t) => {
            let p = table_preset(t).ok_or_else(|| config(format!("no preset for table {t}")))?;
            let sys = by_name(p.system, &[]).map_err(config)?;
            let schemes = p.schemes().map_err(config)?;
            let setup = Setup {
                sys,
                horizon: p.horizon,
                u0: p.u0.to_vec(),
            };
            (setup, schemes, p.n_values.to_vec())
        }
        None => {
            let setup = resolve_system(&a.system)?;
            let names: Vec<String> = a
                .schemes
                .unwrap_or_default()
                .into_iter()
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if names.is_empty() {
                return Err(config("--schemes must name at least one scheme"));
            }
            let schemes = names
                .iter()
                .map(|n| named(n, setup.sys.dim()).map_err(config))
                .collect::<CliResult<Vec<_>>>()?;
            let n_values = a.n_list.unwrap_or_default();
            if n_values.is_empty() || n_values.contains(&0) {
                return Err(config("--n-list must hold positive step counts"));
            }
            (setup, schemes, n_values)
        }
    };
    let results = run_benchmark(
        setup.sys.as_ref(),
        &schemes,
        &n_values,
        setup.horizon,
        &setup.u0,
        a.repeats,
    );
    let mut records = Vec::new();
    let mut failures = 0;
    for r in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => {
                failures += 1;
                writeln!(err, "failed: {e}").map_err(io_failure)?;
            }
        }
    }
    let mut w = open_output(a.output.as_deref(), out)?;
    emit_csv(&records, &mut w).map_err(failure)?;
    w.flush().map_err(io_failure)?;
    drop(w);

    let (names, rows) = rmse_table(&records);
    let mut line = format!("{:>8}", "n");
    for s in &names {
        line += &format!(" {s:>11}");
    }
    writeln!(err, "RMSE, {}\n{line}", setup.sys.name()).map_err(io_failure)?;
    for (n, cells) in rows {
        let mut line = format!("{n:>8}");
        for c in cells {
            line += &match c {
                Some(v) => format!(" {v:>11.3e}"),
                None => format!(" {:>11}", "-"),
            };
        }
        writeln!(err, "{line}").map_err(io_failure)?;
    }
    Ok(if failures > 0 { 1 } else { 0 })
}

/// Parses `a..b` (inclusive), `a..=b`, or `a,b,c`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    let bad = || format!("invalid seed list `{s}`");
    if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    let seeds: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

fn verify_order(a: VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let seeds = parse_seeds(&a.seeds).map_err(config)?;
    let scheme = scheme_for_dim(a.scheme.as_deref(), a.scheme_file.as_deref(), 2)?;
    let window = certification_window(scheme.declared_order());
    let results = certify_order(&scheme, &seeds).map_err(config)?;
    let expected = scheme.declared_order() + 1;
    writeln!(
        out,
        "scheme {} ({} factors), declared order {}, expected slope {} ± {}, t in 2^{}..2^{}",
        scheme.label(),
        scheme.len(),
        scheme.declared_order(),
        expected,
        window.tolerance,
        window.lo_exp,
        window.hi_exp
    )
    .map_err(io_failure)?;
    let mut all = true;
    for r in &results {
        let pass = r.passed();
        all &= pass;
        let verdict = if pass { "pass" } else { "FAIL" };
        match &r.slope {
            Ok(m) => writeln!(out, "seed {}: slope {m:.3} {verdict}", r.seed),
            Err(splitflow_core::Error::PrecisionFloor { floor }) => writeln!(
                out,
                "seed {}: errors at or below the precision floor {floor:e}; \
                 the scheme is too accurate for double-precision certification at these t {verdict}",
                r.seed
            ),
            Err(e) => writeln!(out, "seed {}: {e} {verdict}", r.seed),
        }
        .map_err(io_failure)?;
    }
    writeln!(out, "{}", if all { "certified" } else { "not certified" }).map_err(io_failure)?;
    Ok(if all { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds() {
        assert_eq!(parse_seeds("0..4").unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_seeds("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_seeds("7, 9").unwrap(), vec![7, 9]);
        assert!(parse_seeds("4..1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn params() {
        let p = parse_params(&["alpha=0.3".into(), " rho = 20".into()]).unwrap();
        assert_eq!(
            p,
            vec![("alpha".to_string(), 0.3), ("rho".to_string(), 20.0)]
        );
        assert!(parse_params(&["alpha".into()]).is_err());
        assert!(parse_params(&["alpha=x".into()]).is_err());
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
