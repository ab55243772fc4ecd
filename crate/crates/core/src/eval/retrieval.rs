//! Nearest-neighbor recall of code-space search against exact geodesic neighbors.

use std::cmp::Ordering;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BinaryCode;
use crate::embedders::Embedder;
use crate::error::{Error, Result};
use crate::metrics::{geodesic, CodeMetric};
use crate::seed::{SeedLabel, SeedTree};
use crate::types::{Algorithm, Dataset, EmbedderConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalResult {
    pub k_relevant: usize,
    pub n_queries: usize,
    pub recall: f64,
}

/// One retrieval CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRecord {
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: Option<usize>,
    #[serde(rename = "B")]
    pub blocks: usize,
    pub k: usize,
    pub n_queries: usize,
    pub recall: f64,
    pub embed_ms: f64,
    pub query_ms: f64,
}

fn check_k(base: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k >= base.n_points() {
        return Err(Error::KOutOfRange {
            k,
            base: base.n_points(),
        });
    }
    Ok(())
}

/// Indices of the `k` smallest distances; ties go to the lower index.
fn top_k(distances: &[f64], k: usize) -> Vec<usize> {
    let order = |&a: &usize, &b: &usize| {
        distances[a]
            .partial_cmp(&distances[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    };
    let mut idx: Vec<usize> = (0..distances.len()).collect();
    idx.select_nth_unstable_by(k - 1, order);
    idx.truncate(k);
    idx.sort_unstable_by(order);
    idx
}

/// Exact `k` nearest base points of every query under geodesic distance.
pub fn exact_neighbors(base: &Dataset, queries: &Dataset, k: usize) -> Result<Vec<Vec<usize>>> {
    check_k(base, k)?;
    if base.dim() != queries.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            actual: queries.dim(),
        });
    }
    Ok((0..queries.n_points())
        .into_par_iter()
        .map(|q| {
            let d: Vec<f64> = base
                .rows()
                .map(|b| geodesic(queries.row(q), b).expect("same dimension"))
                .collect();
            top_k(&d, k)
        })
        .collect())
}

/// Recall of ranking base points by `distance(query, base)` against the exact geodesic neighbors.
pub fn retrieval_eval_with<F>(base: &Dataset, queries: &Dataset, k: usize, distance: F) -> Result<RetrievalResult>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let truth = exact_neighbors(base, queries, k)?;
    let hits: usize = (0..queries.n_points())
        .into_par_iter()
        .map(|q| {
            let d: Vec<f64> = (0..base.n_points()).map(|b| distance(q, b)).collect();
            let retrieved = top_k(&d, k);
            retrieved.iter().filter(|i| truth[q].contains(i)).count()
        })
        .sum();
    Ok(RetrievalResult {
        k_relevant: k,
        n_queries: queries.n_points(),
        recall: hits as f64 / (k * queries.n_points()) as f64,
    })
}

/// Harness check: ranking by geodesic distance itself must recover every neighbor.
pub fn geodesic_oracle_recall(base: &Dataset, queries: &Dataset, k: usize) -> Result<RetrievalResult> {
    retrieval_eval_with(base, queries, k, |q, b| {
        geodesic(queries.row(q), base.row(b)).expect("same dimension")
    })
}

fn code_distances<'a>(
    base_codes: &'a [BinaryCode],
    query_codes: &'a [BinaryCode],
    metric: CodeMetric,
) -> impl Fn(usize, usize) -> f64 + Sync + 'a {
    move |q, b| metric.distance(&query_codes[q], &base_codes[b]).expect("codes share a layout")
}

/// Recall of `metric` over the embedder's codes.
pub fn retrieval_eval(
    base: &Dataset,
    queries: &Dataset,
    k: usize,
    embedder: &Embedder,
    metric: CodeMetric,
) -> Result<RetrievalResult> {
    check_k(base, k)?;
    let base_codes = embedder.embed_batch(base)?;
    let query_codes = embedder.embed_batch(queries)?;
    retrieval_eval_with(base, queries, k, code_distances(&base_codes, &query_codes, metric))
}

/// Fits `config`, embeds base and queries, and times embedding and code-space search.
pub fn retrieval_benchmark(
    base: &Dataset,
    queries: &Dataset,
    k: usize,
    config: EmbedderConfig,
    metric: CodeMetric,
) -> Result<RetrievalRecord> {
    check_k(base, k)?;
    let embedder = Embedder::fit(config)?;
    let t0 = Instant::now();
    let base_codes = embedder.embed_batch(base)?;
    let query_codes = embedder.embed_batch(queries)?;
    let embed_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let result = retrieval_eval_with(base, queries, k, code_distances(&base_codes, &query_codes, metric))?;
    let query_ms = t1.elapsed().as_secs_f64() * 1e3;
    Ok(RetrievalRecord {
        algorithm: config.algorithm,
        m: config.code_bits,
        n: config.intermediate_dim,
        blocks: config.blocks,
        k,
        n_queries: result.n_queries,
        recall: result.recall,
        embed_ms,
        query_ms,
    })
}

/// Splits `data` into `(base, queries)` with `n_queries` rows chosen at random.
pub fn split_queries(data: &Dataset, n_queries: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if n_queries == 0 || n_queries >= data.n_points() {
        return Err(Error::InvalidDimension(format!(
            "cannot take {n_queries} queries from {} points",
            data.n_points()
        )));
    }
    let mut idx: Vec<usize> = (0..data.n_points()).collect();
    idx.shuffle(&mut SeedTree::new(seed).rng(SeedLabel::Dataset, 1));
    let (q, b) = idx.split_at(n_queries);
    let (mut q, mut b) = (q.to_vec(), b.to_vec());
    q.sort_unstable();
    b.sort_unstable();
    Ok((data.select(&b)?, data.select(&q)?))
}

pub fn write_retrieval_csv<W: Write>(w: W, records: &[RetrievalRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}
