//! Measurement and operation counts, and the experiment drivers behind the CLI.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::baseline::CsConfig;
use crate::error::Result;
use crate::recon::decode;
use crate::shatter::{encode, find_sigma, separates, ShatterConfig, DEFAULT_THRESHOLD};
use crate::sigcore::{generate_sparse_spectrum, idft};

/// σ tried first by the drivers before falling back to a search.
pub const DEFAULT_SIGMA: u64 = 11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Shattering,
    Conventional,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Shattering => "shattering",
            Method::Conventional => "conventional",
        })
    }
}

/// Parameters of [`cost_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostParams {
    /// `t` filters, `retained` filters kept after thresholding.
    Shattering { n: usize, t: usize, retained: usize },
    /// `m` rows of the random sensing matrix.
    Conventional { n: usize, m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CostReport {
    pub method: Method,
    pub stored_real_measurements: usize,
    pub additions: u64,
    pub multiplications: u64,
}

/// Analytic cost of sensing a length-`n` real vector.
///
/// Shattering applies the stacked `2T×N` complex matrix, i.e. `4T` real rows,
/// to every input regardless of how many filters survive the threshold, and
/// stores two complex numbers per retained filter. Conventional sensing
/// applies `M` real rows and stores `M` values.
pub fn cost_model(params: CostParams) -> CostReport {
    match params {
        CostParams::Shattering { n, t, retained } => {
            let rows = 4 * t as u64;
            CostReport {
                method: Method::Shattering,
                stored_real_measurements: 4 * retained,
                additions: rows * (n as u64 - 1),
                multiplications: rows * n as u64,
            }
        }
        CostParams::Conventional { n, m } => CostReport {
            method: Method::Conventional,
            stored_real_measurements: m,
            additions: m as u64 * (n as u64 - 1),
            multiplications: m as u64 * n as u64,
        },
    }
}

/// Outcome of encoding one generated signal.
#[derive(Clone, Debug, PartialEq)]
pub struct ShatterRun {
    pub sigma: u64,
    pub retained: usize,
    pub max_abs_err: f64,
}

/// Generates an `m`-sparse signal and round-trips it through the encoder.
///
/// `preferred_sigma` is used when it separates the support; otherwise the
/// smallest working `σ` above it is searched for.
pub fn shatter_trial(
    n: usize,
    t: usize,
    m: usize,
    seed: u64,
    preferred_sigma: u64,
    threshold: f64,
) -> Result<ShatterRun> {
    let spectrum = generate_sparse_spectrum(n, m, seed)?;
    let support: BTreeSet<usize> = spectrum.occupied_bins().into_iter().collect();
    let sigma =
        if ShatterConfig::new(n, t, preferred_sigma, threshold).is_ok() && separates(&support, n, t, preferred_sigma) {
            preferred_sigma
        } else {
            find_sigma(n, t, &support, preferred_sigma)?
        };
    let config = ShatterConfig::new(n, t, sigma, threshold)?;
    let x = idft(&spectrum)?;
    let set = encode(&x, &config)?;
    let recovered = decode(&set)?;
    Ok(ShatterRun {
        sigma,
        retained: set.entries.len(),
        max_abs_err: recovered.max_abs_diff(&x),
    })
}

/// One row of the comparison table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub sigma: u64,
    pub cs: CostReport,
    pub shattering: CostReport,
    pub max_abs_err: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table1Params {
    pub n: usize,
    pub t: usize,
    pub sparsities: Vec<usize>,
    pub multiplier: f64,
    pub sigma: u64,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for Table1Params {
    fn default() -> Self {
        Self {
            n: 1000,
            t: 100,
            sparsities: vec![5, 25],
            multiplier: crate::baseline::DEFAULT_MULTIPLIER,
            sigma: DEFAULT_SIGMA,
            threshold: DEFAULT_THRESHOLD,
            seed: 7,
        }
    }
}

/// Runs the encoder at each sparsity and prices both methods.
///
/// The conventional matrix is sized for the largest sparsity, so its cost is
/// the same on every row.
pub fn table1(params: &Table1Params) -> Result<Vec<Table1Row>> {
    let m_max = params.sparsities.iter().copied().max().unwrap_or(0);
    let cs = CsConfig::new(params.n, m_max, params.multiplier, params.seed)?;
    params
        .sparsities
        .iter()
        .map(|&m| {
            let run = shatter_trial(params.n, params.t, m, params.seed, params.sigma, params.threshold)?;
            Ok(Table1Row {
                n: params.n,
                m,
                t: params.t,
                sigma: run.sigma,
                cs: cost_model(CostParams::Conventional {
                    n: params.n,
                    m: cs.measurements(),
                }),
                shattering: cost_model(CostParams::Shattering {
                    n: params.n,
                    t: params.t,
                    retained: run.retained,
                }),
                max_abs_err: run.max_abs_err,
            })
        })
        .collect()
}

pub fn write_table1<W: Write>(rows: &[Table1Row], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "n",
        "m",
        "t",
        "sigma",
        "cs_measurements",
        "shatter_measurements",
        "cs_additions",
        "shatter_additions",
        "cs_multiplications",
        "shatter_multiplications",
        "max_abs_err_shatter",
    ])?;
    for r in rows {
        writer.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.t.to_string(),
            r.sigma.to_string(),
            r.cs.stored_real_measurements.to_string(),
            r.shattering.stored_real_measurements.to_string(),
            r.cs.additions.to_string(),
            r.shattering.additions.to_string(),
            r.cs.multiplications.to_string(),
            r.shattering.multiplications.to_string(),
            format!("{:e}", r.max_abs_err),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepParams {
    pub n: usize,
    pub t: usize,
    pub sparsities: Vec<usize>,
    /// Design sparsity of the conventional baseline; defaults to the largest swept value.
    pub m_max: Option<usize>,
    pub multiplier: f64,
    pub seeds: Vec<u64>,
    pub sigma: u64,
    pub threshold: f64,
}

/// One `(m, seed)` cell of a sweep. Failed cells keep the error name in `status`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: usize,
    pub seed: u64,
    pub sigma: Option<u64>,
    pub stored_shatter: Option<usize>,
    pub stored_cs: usize,
    pub max_abs_err_shatter: Option<f64>,
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Stored-measurement counts of both methods over a range of sparsities.
///
/// Rows are computed in parallel and returned sorted by `(m, seed)`.
pub fn sweep_measurements(params: &SweepParams) -> Result<Vec<SweepRow>> {
    let m_max = params
        .m_max
        .or_else(|| params.sparsities.iter().copied().max())
        .unwrap_or(0);
    let stored_cs = CsConfig::new(params.n, m_max, params.multiplier, 0)?.measurements();
    let cells: Vec<(usize, u64)> = params
        .sparsities
        .iter()
        .flat_map(|&m| params.seeds.iter().map(move |&s| (m, s)))
        .collect();
    let mut rows: Vec<SweepRow> = cells
        .into_par_iter()
        .map(
            |(m, seed)| match shatter_trial(params.n, params.t, m, seed, params.sigma, params.threshold) {
                Ok(run) => SweepRow {
                    m,
                    seed,
                    sigma: Some(run.sigma),
                    stored_shatter: Some(4 * run.retained),
                    stored_cs,
                    max_abs_err_shatter: Some(run.max_abs_err),
                    status: "ok".into(),
                },
                Err(e) => SweepRow {
                    m,
                    seed,
                    sigma: None,
                    stored_shatter: None,
                    stored_cs,
                    max_abs_err_shatter: None,
                    status: e.name().into(),
                },
            },
        )
        .collect();
    rows.sort_by_key(|r| (r.m, r.seed));
    Ok(rows)
}

pub fn write_sweep<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([
        "m",
        "seed",
        "sigma",
        "stored_shatter",
        "stored_cs",
        "max_abs_err_shatter",
        "status",
    ])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        writer.write_record([
            r.m.to_string(),
            r.seed.to_string(),
            opt(r.sigma.map(|s| s.to_string())),
            opt(r.stored_shatter.map(|s| s.to_string())),
            r.stored_cs.to_string(),
            opt(r.max_abs_err_shatter.map(|e| format!("{e:e}"))),
            r.status.clone(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
