//! Work-precision benchmarks against the RK45 reference.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::time::Instant;

use serde::Deserialize;
use splitflow_core::scheme::{named, SCHEME_NAMES};
use splitflow_core::{
    integrate, rk45_solve, rmse, uniform_grid, IntegratorOptions, OdeSystem, RkOptions, Scheme,
    Trajectory,
};

use crate::error::Result;
use crate::formats::fmt_f64;

pub const CSV_HEADER: [&str; 7] = [
    "system",
    "scheme",
    "n",
    "factor_count",
    "rmse",
    "wall_time_s",
    "repeats",
];

pub const DEFAULT_REPEATS: usize = 5;

/// One `(system, scheme, n)` measurement.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BenchmarkRecord {
    pub system: String,
    pub scheme: String,
    pub n: usize,
    /// Frozen-flow evaluations per step.
    pub factor_count: usize,
    pub rmse: f64,
    /// Median wall time of the timed integrations, in seconds.
    pub wall_time_s: f64,
    pub repeats: usize,
}

/// A run that produced no record.
#[derive(Debug, thiserror::Error)]
#[error("{system}/{scheme} n={n}: {source}")]
pub struct RecordFailure {
    pub system: String,
    pub scheme: String,
    pub n: usize,
    #[source]
    pub source: splitflow_core::Error,
}

/// A named system with the run setup of one of the reference tables.
pub struct TablePreset {
    pub table: u8,
    pub system: &'static str,
    pub schemes: &'static [&'static str],
    pub n_values: &'static [usize],
    pub horizon: f64,
    pub u0: &'static [f64],
}

const PLANAR_SCHEMES: &[&str] = &[
    "lie-trotter",
    "strang",
    "3rd",
    "6th",
    "8th",
    "10th",
    "12th",
    "14th",
];

pub const TABLE_PRESETS: &[TablePreset] = &[
    TablePreset {
        table: 2,
        system: "lotka-volterra",
        schemes: PLANAR_SCHEMES,
        n_values: &[100, 1000, 10000],
        horizon: 100.0,
        u0: &[100.0, 10.0],
    },
    TablePreset {
        table: 3,
        system: "van-der-pol",
        schemes: PLANAR_SCHEMES,
        n_values: &[125, 500, 1000],
        horizon: 25.0,
        u0: &[-0.2, 0.0],
    },
    TablePreset {
        table: 4,
        system: "lorenz",
        schemes: &["lie-trotter", "strang", "3rd", "6th"],
        n_values: &[1000, 20000, 100000],
        horizon: 20.0,
        u0: &[1.0, 1.0, 1.0],
    },
];

pub fn table_preset(table: u8) -> Option<&'static TablePreset> {
    TABLE_PRESETS.iter().find(|p| p.table == table)
}

impl TablePreset {
    /// Resolves the preset's scheme names for its system's dimension.
    pub fn schemes(&self) -> Result<Vec<Scheme>> {
        let dim = self.u0.len();
        Ok(self
            .schemes
            .iter()
            .map(|name| named(name, dim))
            .collect::<splitflow_core::Result<_>>()?)
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn timed_run(
    sys: &dyn OdeSystem,
    scheme: &Scheme,
    horizon: f64,
    n: usize,
    u0: &[f64],
    repeats: usize,
) -> splitflow_core::Result<(Trajectory, f64)> {
    let opts = IntegratorOptions::default();
    // warm-up, discarded
    let traj = integrate(sys, scheme, horizon, n, u0, &opts)?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        std::hint::black_box(integrate(sys, scheme, horizon, n, u0, &opts)?);
        // a zero reading means the run was below the 1 ns timer resolution
        times.push(start.elapsed().as_secs_f64().max(1e-9));
    }
    Ok((traj, median(times)))
}

/// Runs every `(scheme, n)` pair: one RK45 reference per `n` at
/// `rtol = atol = 1e-12`, then `repeats` timed integrations after a
/// discarded warm-up. Timing covers the integration only.
pub fn run_benchmark(
    sys: &dyn OdeSystem,
    schemes: &[Scheme],
    n_values: &[usize],
    horizon: f64,
    u0: &[f64],
    repeats: usize,
) -> Vec<std::result::Result<BenchmarkRecord, RecordFailure>> {
    let repeats = repeats.max(1);
    let mut out = Vec::with_capacity(schemes.len() * n_values.len());
    if schemes.is_empty() {
        return out;
    }
    let fail = |scheme: &Scheme, n: usize, source| RecordFailure {
        system: sys.name().to_string(),
        scheme: scheme.label().to_string(),
        n,
        source,
    };
    for &n in n_values {
        let grid = uniform_grid(horizon, n);
        let reference = rk45_solve(sys, horizon, &grid, u0, &RkOptions::default());
        for scheme in schemes {
            let record = reference
                .as_ref()
                .map_err(|e| fail(scheme, n, e.clone()))
                .and_then(|reference| {
                    let (traj, wall) = timed_run(sys, scheme, horizon, n, u0, repeats)
                        .map_err(|e| fail(scheme, n, e))?;
                    let err = rmse(&traj, reference).map_err(|e| fail(scheme, n, e))?;
                    Ok(BenchmarkRecord {
                        system: sys.name().to_string(),
                        scheme: scheme.label().to_string(),
                        n,
                        factor_count: scheme.len(),
                        rmse: err,
                        wall_time_s: wall,
                        repeats,
                    })
                });
            out.push(record);
        }
    }
    out
}

fn scheme_rank(label: &str) -> usize {
    SCHEME_NAMES
        .iter()
        .position(|&n| n == label)
        .unwrap_or(SCHEME_NAMES.len())
}

/// Sorts by system name, then scheme (registry order, unknown labels after
/// it alphabetically), then ascending `n`.
pub fn sort_records(records: &mut [BenchmarkRecord]) {
    records.sort_by(|a, b| {
        (
            a.system.as_str(),
            scheme_rank(&a.scheme),
            a.scheme.as_str(),
            a.n,
        )
            .cmp(&(
                b.system.as_str(),
                scheme_rank(&b.scheme),
                b.scheme.as_str(),
                b.n,
            ))
    });
}

/// Writes the records as CSV with LF line endings, floats at 17
/// significant digits, in [`sort_records`] order.
pub fn emit_csv<W: Write>(records: &[BenchmarkRecord], destination: W) -> Result<()> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(destination);
    w.write_record(CSV_HEADER)?;
    for r in &sorted {
        w.write_record([
            r.system.clone(),
            r.scheme.clone(),
            r.n.to_string(),
            r.factor_count.to_string(),
            fmt_f64(r.rmse),
            fmt_f64(r.wall_time_s),
            r.repeats.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records written by [`emit_csv`].
pub fn parse_csv<R: Read>(source: R) -> Result<Vec<BenchmarkRecord>> {
    let mut r = csv::Reader::from_reader(source);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(crate::Error::Parse {
            line: 1,
            message: format!(
                "unexpected header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Rows of `(n, one RMSE per scheme column)`.
pub type RmseRows = Vec<(usize, Vec<Option<f64>>)>;

/// Groups records into an `n x scheme` RMSE table in record order.
pub fn rmse_table(records: &[BenchmarkRecord]) -> (Vec<String>, RmseRows) {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut schemes: Vec<String> = Vec::new();
    let mut ns: Vec<usize> = Vec::new();
    let mut cells = HashMap::new();
    for r in &sorted {
        if !schemes.contains(&r.scheme) {
            schemes.push(r.scheme.clone());
        }
        if !ns.contains(&r.n) {
            ns.push(r.n);
        }
        cells.insert((r.scheme.clone(), r.n), r.rmse);
    }
    ns.sort_unstable();
    let rows = ns
        .into_iter()
        .map(|n| {
            let row = schemes
                .iter()
                .map(|s| cells.get(&(s.clone(), n)).copied())
                .collect();
            (n, row)
        })
        .collect();
    (schemes, rows)
}
