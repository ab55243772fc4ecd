//! Distortion sweeps over `(N, m, algorithm)` and slicing at a target distortion.
//!
//! Each `(N, trial)` cell draws one fresh dataset that every algorithm and
//! code length in the cell is evaluated on; each `(algorithm, m)` inside the
//! cell gets its own embedder seed. Both seeds depend only on
//! `(seed, N, trial)` (plus `algorithm, m` for the embedder), so any single
//! record can be regenerated with [`run_cell`].

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedders::Embedder;
use crate::error::{Error, Result};
use crate::metrics::{CodeMetric, GeodesicTable};
use crate::seed::{SeedLabel, SeedTree};
use crate::types::{round_up_to_blocks, Algorithm, Dataset, EmbedderConfig};

use super::data::gen_sphere_dataset;

/// One `(algorithm, N, m, trial)` measurement. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub algorithm: Algorithm,
    #[serde(rename = "N")]
    pub n_points: usize,
    pub p: usize,
    pub m: usize,
    pub n: Option<usize>,
    #[serde(rename = "B")]
    pub blocks: usize,
    pub seed: u64,
    pub trial: u64,
    pub max_distortion: f64,
    pub mean_distortion: f64,
    pub fit_ms: f64,
    pub embed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub ns: Vec<usize>,
    pub ms: Vec<usize>,
    pub p: usize,
    pub algorithms: Vec<Algorithm>,
    pub trials: u64,
    pub first_trial: u64,
    pub seed: u64,
    /// Fixed FBE block count; `None` uses the `1.8 ln N` default.
    pub blocks: Option<usize>,
    /// Raise `m` to a multiple of `B` instead of rejecting the config.
    pub round_m: bool,
    /// Record wall-clock times; disable for byte-reproducible output.
    pub timing: bool,
}

impl SweepSpec {
    pub fn new(ns: Vec<usize>, ms: Vec<usize>, p: usize, algorithms: Vec<Algorithm>, trials: u64, seed: u64) -> Self {
        Self {
            ns,
            ms,
            p,
            algorithms,
            trials,
            first_trial: 0,
            seed,
            blocks: None,
            round_m: false,
            timing: true,
        }
    }
}

/// FBE codes use the median-of-blocks estimator, the others plain Hamming.
pub fn metric_for(algorithm: Algorithm) -> CodeMetric {
    match algorithm {
        Algorithm::Fbe => CodeMetric::MedianBlock,
        Algorithm::Urp | Algorithm::Fbe2 => CodeMetric::Hamming,
    }
}

fn cell_tree(seed: u64, n_points: usize, trial: u64) -> SeedTree {
    SeedTree::new(seed).fork(n_points as u64).fork(trial)
}

fn cell_dataset_seed(seed: u64, n_points: usize, trial: u64) -> u64 {
    cell_tree(seed, n_points, trial).derive(SeedLabel::Dataset, 0)
}

pub fn cell_embedder_seed(seed: u64, n_points: usize, trial: u64, algorithm: Algorithm, m: usize) -> u64 {
    cell_tree(seed, n_points, trial)
        .fork(algorithm.code())
        .fork(m as u64)
        .master()
}

/// Embedder config used by sweeps: `n = ceil(1.3 m)` and `B` from `blocks` or the `N` default.
pub fn config_for(
    algorithm: Algorithm,
    p: usize,
    m: usize,
    n_points: usize,
    blocks: Option<usize>,
    round_m: bool,
    seed: u64,
) -> Result<EmbedderConfig> {
    let mut config = EmbedderConfig::with_defaults(algorithm, p, m, n_points, seed);
    if algorithm == Algorithm::Fbe {
        if let Some(b) = blocks {
            let m = if round_m { round_up_to_blocks(m, b.max(1)) } else { m };
            config = EmbedderConfig::with_defaults(algorithm, p, m, n_points, seed);
            config.blocks = b;
        }
    }
    config.validate()?;
    Ok(config)
}

fn measure(
    spec: &SweepSpec,
    algorithm: Algorithm,
    m: usize,
    trial: u64,
    data: &Dataset,
    table: &GeodesicTable,
) -> Result<SweepRecord> {
    let n_points = data.n_points();
    let seed = cell_embedder_seed(spec.seed, n_points, trial, algorithm, m);
    let config = config_for(algorithm, spec.p, m, n_points, spec.blocks, spec.round_m, seed)?;
    let t0 = Instant::now();
    let embedder = Embedder::fit(config)?;
    let fit_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let codes = embedder.embed_batch(data)?;
    let embed_ms = t1.elapsed().as_secs_f64() * 1e3;
    let report = table.distortion(&codes, metric_for(algorithm))?;
    Ok(SweepRecord {
        algorithm,
        n_points,
        p: spec.p,
        m: config.code_bits,
        n: config.intermediate_dim,
        blocks: config.blocks,
        seed: spec.seed,
        trial,
        max_distortion: report.max_abs_distortion,
        mean_distortion: report.mean_abs_distortion,
        fit_ms: if spec.timing { fit_ms } else { 0.0 },
        embed_ms: if spec.timing { embed_ms } else { 0.0 },
    })
}

fn run_cell_all(spec: &SweepSpec, n_points: usize, trial: u64) -> Result<Vec<SweepRecord>> {
    let data = gen_sphere_dataset(n_points, spec.p, cell_dataset_seed(spec.seed, n_points, trial))?;
    let table = GeodesicTable::new(&data);
    let mut out = Vec::with_capacity(spec.algorithms.len() * spec.ms.len());
    for &algorithm in &spec.algorithms {
        for &m in &spec.ms {
            out.push(measure(spec, algorithm, m, trial, &data, &table)?);
        }
    }
    Ok(out)
}

/// Runs every `(N, trial)` cell of the spec; records are sorted by `(algorithm, N, m, trial)`.
pub fn distortion_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    if spec.ns.is_empty() || spec.ms.is_empty() || spec.algorithms.is_empty() || spec.trials == 0 {
        return Err(Error::InvalidConfig("sweep needs at least one N, m, algorithm and trial".into()));
    }
    // Surface config errors before any expensive work.
    for &algorithm in &spec.algorithms {
        for &m in &spec.ms {
            for &n_points in &spec.ns {
                config_for(algorithm, spec.p, m, n_points, spec.blocks, spec.round_m, 0)?;
            }
        }
    }
    let cells: Vec<(usize, u64)> = spec
        .ns
        .iter()
        .flat_map(|&n| (spec.first_trial..spec.first_trial + spec.trials).map(move |t| (n, t)))
        .collect();
    let mut records: Vec<SweepRecord> = cells
        .into_par_iter()
        .map(|(n, t)| run_cell_all(spec, n, t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    records.sort_by_key(|r| (r.algorithm, r.n_points, r.m, r.trial));
    Ok(records)
}

/// Regenerates the single record for `(algorithm, N, m, trial)` of a sweep.
pub fn run_cell(spec: &SweepSpec, algorithm: Algorithm, n_points: usize, m: usize, trial: u64) -> Result<SweepRecord> {
    let data = gen_sphere_dataset(n_points, spec.p, cell_dataset_seed(spec.seed, n_points, trial))?;
    let table = GeodesicTable::new(&data);
    measure(spec, algorithm, m, trial, &data, &table)
}

/// Trial statistics for one `(algorithm, N, m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub algorithm: Algorithm,
    #[serde(rename = "N")]
    pub n_points: usize,
    pub m: usize,
    pub trials: usize,
    pub mean_max_distortion: f64,
    pub std_max_distortion: f64,
    pub mean_mean_distortion: f64,
    pub mean_embed_ms: f64,
}

/// Mean and (sample) standard deviation across trials.
pub fn aggregate(records: &[SweepRecord]) -> Vec<SweepSummary> {
    let mut groups: BTreeMap<(Algorithm, usize, usize), Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.algorithm, r.n_points, r.m)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((algorithm, n_points, m), rs)| {
            let k = rs.len() as f64;
            let mean = rs.iter().map(|r| r.max_distortion).sum::<f64>() / k;
            let var = if rs.len() > 1 {
                rs.iter().map(|r| (r.max_distortion - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            SweepSummary {
                algorithm,
                n_points,
                m,
                trials: rs.len(),
                mean_max_distortion: mean,
                std_max_distortion: var.sqrt(),
                mean_mean_distortion: rs.iter().map(|r| r.mean_distortion).sum::<f64>() / k,
                mean_embed_ms: rs.iter().map(|r| r.embed_ms).sum::<f64>() / k,
            }
        })
        .collect()
}

/// Interpolated code length reaching the target distortion for one `(algorithm, N)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaSlice {
    pub algorithm: Algorithm,
    #[serde(rename = "N")]
    pub n_points: usize,
    pub m: f64,
}

/// For each `(algorithm, N)`, linearly interpolates the trial-mean max distortion
/// in `m` to find where it first drops to `target`.
pub fn m_for_target_delta(records: &[SweepRecord], target: f64) -> Result<Vec<DeltaSlice>> {
    let mut curves: BTreeMap<(Algorithm, usize), Vec<(usize, f64)>> = BTreeMap::new();
    for s in aggregate(records) {
        curves
            .entry((s.algorithm, s.n_points))
            .or_default()
            .push((s.m, s.mean_max_distortion));
    }
    curves
        .into_iter()
        .map(|((algorithm, n_points), mut curve)| {
            curve.sort_by_key(|&(m, _)| m);
            let not_bracketed = |reason| Error::NotBracketed {
                n_points,
                target,
                reason,
            };
            let k = curve
                .iter()
                .position(|&(_, d)| d <= target)
                .ok_or_else(|| not_bracketed("no swept m reaches the target"))?;
            if k == 0 {
                return Err(not_bracketed("the smallest swept m is already below the target"));
            }
            let (m0, d0) = curve[k - 1];
            let (m1, d1) = curve[k];
            let m = m0 as f64 + (d0 - target) * (m1 - m0) as f64 / (d0 - d1);
            Ok(DeltaSlice { algorithm, n_points, m })
        })
        .collect()
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidDimension("a line fit needs at least two paired points".into()));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidDimension("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

pub fn write_sweep_csv<W: Write>(w: W, records: &[SweepRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(r: R) -> Result<Vec<SweepRecord>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
