//! Monte-Carlo estimators for the identities the embeddings rely on.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::geodesic;
use crate::seed::{SeedLabel, SeedTree};
use crate::transforms::{rademacher, standard_normals, HadamardSketch};
use crate::types::Dataset;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_same_dim(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// Fraction of `trials` random Gaussian hyperplanes that separate `x` and `y`.
///
/// Its expectation is the geodesic distance `d(x, y)`.
pub fn tessellation_oracle(x: &[f64], y: &[f64], trials: u64, seed: u64) -> Result<f64> {
    check_same_dim(x, y)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let mut rng = SeedTree::new(seed).rng(SeedLabel::GaussianDense, 0);
    let mut row = vec![0.0; x.len()];
    let mut flips = 0u64;
    for _ in 0..trials {
        row.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        if (dot(&row, x) >= 0.0) != (dot(&row, y) >= 0.0) {
            flips += 1;
        }
    }
    Ok(flips as f64 / trials as f64)
}

/// 2x2 joint frequency table of two sign variables; index 1 is `+1`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct JointCounts {
    pub counts: [[u64; 2]; 2],
}

impl JointCounts {
    fn add(&mut self, a: bool, b: bool) {
        self.counts[a as usize][b as usize] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Empirical `Pr(first = a, second = b)`.
    pub fn cell(&self, a: bool, b: bool) -> f64 {
        self.counts[a as usize][b as usize] as f64 / self.total() as f64
    }

    pub fn first_positive(&self) -> f64 {
        self.cell(true, false) + self.cell(true, true)
    }

    pub fn second_positive(&self) -> f64 {
        self.cell(false, true) + self.cell(true, true)
    }

    pub fn agree(&self) -> f64 {
        self.cell(false, false) + self.cell(true, true)
    }
}

/// Joint sign statistics of two rows `xi`, `xi'` of one sign-flipped Toeplitz matrix
/// applied to two fixed vectors:
/// `X = sign<xi*zeta, x>`, `X' = sign<xi'*zeta, x>`, `Y = sign<xi*zeta, y>`, `Y' = sign<xi'*zeta, y>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceTable {
    pub trials: u64,
    pub rows: (usize, usize),
    /// Cross-row pairs `(X,X')`, `(X,Y')`, `(Y,X')`, `(Y,Y')`, which should be independent.
    pub pairs: [(&'static str, JointCounts); 4],
    /// The same-row pair `(X,Y)`, which is correlated whenever `x` and `y` are.
    pub same_row: JointCounts,
}

/// [`independence_oracle_rows`] on the first two rows, whose generators overlap the most.
pub fn independence_oracle(x: &[f64], y: &[f64], trials: u64, seed: u64) -> Result<IndependenceTable> {
    independence_oracle_rows(x, y, (0, 1), trials, seed)
}

pub fn independence_oracle_rows(
    x: &[f64],
    y: &[f64],
    rows: (usize, usize),
    trials: u64,
    seed: u64,
) -> Result<IndependenceTable> {
    check_same_dim(x, y)?;
    let n = x.len();
    if n < 2 || rows.0 == rows.1 || rows.0 >= n || rows.1 >= n {
        return Err(Error::InvalidConfig(format!(
            "need two distinct rows below n={n}, got {rows:?}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let tree = SeedTree::new(seed);
    let mut gen_rng = tree.rng(SeedLabel::ToeplitzGen, 0);
    let mut diag_rng = tree.rng(SeedLabel::ToeplitzDiag, 0);
    let mut pairs = [
        ("X,X'", JointCounts::default()),
        ("X,Y'", JointCounts::default()),
        ("Y,X'", JointCounts::default()),
        ("Y,Y'", JointCounts::default()),
    ];
    let mut same_row = JointCounts::default();
    let mut r0 = vec![0.0; n];
    let mut r1 = vec![0.0; n];
    for _ in 0..trials {
        let g = standard_normals(&mut gen_rng, 2 * n - 1);
        let zeta = rademacher(&mut diag_rng, n);
        for j in 0..n {
            r0[j] = g[rows.0 + n - 1 - j] * zeta[j];
            r1[j] = g[rows.1 + n - 1 - j] * zeta[j];
        }
        let bx = dot(&r0, x) >= 0.0;
        let bx2 = dot(&r1, x) >= 0.0;
        let by = dot(&r0, y) >= 0.0;
        let by2 = dot(&r1, y) >= 0.0;
        pairs[0].1.add(bx, bx2);
        pairs[1].1.add(bx, by2);
        pairs[2].1.add(by, bx2);
        pairs[3].1.add(by, by2);
        same_row.add(bx, by);
    }
    Ok(IndependenceTable {
        trials,
        rows,
        pairs,
        same_row,
    })
}

/// Worst-case distortions of a Hadamard sketch over a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JlReport {
    /// `max |‖y_i − y_j‖ − ‖x_i − x_j‖| / ‖x_i − x_j‖` over pairs.
    pub max_pair_distortion: f64,
    /// `max |‖y_i‖ − 1|` over points.
    pub max_norm_deviation: f64,
    /// `max |d(y_i, y_j) − d(x_i, x_j)|` over pairs.
    pub max_geodesic_deviation: f64,
}

impl JlReport {
    /// The single `delta` for which both the pair and the norm conditions hold.
    pub fn norm_distortion(&self) -> f64 {
        self.max_pair_distortion.max(self.max_norm_deviation)
    }
}

pub fn jl_distortion_oracle(sketch: &HadamardSketch, data: &Dataset) -> Result<JlReport> {
    if data.dim() != sketch.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: sketch.input_dim(),
            actual: data.dim(),
        });
    }
    let ys: Vec<Vec<f64>> = data.rows().map(|x| sketch.apply(x)).collect::<Result<_>>()?;
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    let mut report = JlReport {
        max_pair_distortion: 0.0,
        max_norm_deviation: 0.0,
        max_geodesic_deviation: 0.0,
    };
    for (i, y) in ys.iter().enumerate() {
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        report.max_norm_deviation = report.max_norm_deviation.max((norm - 1.0).abs());
        for j in i + 1..ys.len() {
            let dx = dist(data.row(i), data.row(j));
            if dx > 0.0 {
                let rel = (dist(y, &ys[j]) - dx).abs() / dx;
                report.max_pair_distortion = report.max_pair_distortion.max(rel);
            }
            let geo = (geodesic(y, &ys[j])? - geodesic(data.row(i), data.row(j))?).abs();
            report.max_geodesic_deviation = report.max_geodesic_deviation.max(geo);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::gen_sphere_dataset;

    #[test]
    fn tessellation_endpoints() {
        let x = [0.6, 0.8, 0.0];
        assert_eq!(tessellation_oracle(&x, &x, 10_000, 1).unwrap(), 0.0);
        assert_eq!(tessellation_oracle(&x, &[-0.6, -0.8, 0.0], 10_000, 1).unwrap(), 1.0);
        assert!(tessellation_oracle(&x, &[1.0, 0.0], 10, 1).is_err());
    }

    #[test]
    fn tessellation_orthogonal() {
        let p = tessellation_oracle(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], 100_000, 3).unwrap();
        assert!((p - 0.5).abs() <= 0.005, "{p}");
    }

    #[test]
    fn independence_table_shape() {
        let d = gen_sphere_dataset(2, 16, 1).unwrap();
        let t = independence_oracle(d.row(0), d.row(1), 2000, 7).unwrap();
        for (_, c) in t.pairs {
            assert_eq!(c.total(), 2000);
            assert!((c.cell(false, false) + c.cell(false, true) + c.cell(true, false) + c.cell(true, true) - 1.0).abs() < 1e-12);
        }
        assert!(independence_oracle_rows(d.row(0), d.row(1), (2, 2), 10, 0).is_err());
        assert!(independence_oracle_rows(d.row(0), d.row(1), (0, 16), 10, 0).is_err());
    }

    #[test]
    fn full_orthonormal_sketch_is_an_isometry() {
        let p = 64;
        let sketch = HadamardSketch::from_parts(p, vec![1.0; p], (0..p).collect()).unwrap();
        let d = gen_sphere_dataset(30, p, 2).unwrap();
        let r = jl_distortion_oracle(&sketch, &d).unwrap();
        assert!(r.max_pair_distortion < 1e-6);
        assert!(r.max_norm_deviation < 1e-6);
        assert!(r.max_geodesic_deviation < 1e-6);
    }
}
