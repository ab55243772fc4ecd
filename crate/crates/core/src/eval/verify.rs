//! The tolerance-checked oracle suite behind `binembed verify`.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::data::gen_sphere_dataset;
use crate::eval::oracles::{independence_oracle, jl_distortion_oracle, tessellation_oracle};
use crate::metrics::geodesic;
use crate::seed::{SeedLabel, SeedTree};
use crate::transforms::{fwht_inplace, rademacher, standard_normals, HadamardSketch, ToeplitzBlock};

/// One named comparison of an observed deviation against its allowance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub allowed: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, observed: f64, allowed: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            allowed,
            passed: observed <= allowed,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: observed {:.3e}, allowed {:.3e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.observed,
            self.allowed
        )
    }
}

fn trial_scale(trials: u64) -> f64 {
    (1e5 / trials as f64).sqrt()
}

/// Allowed deviation of an empirical flip rate from `d` after `trials` draws.
///
/// Endpoints are deterministic, so 0 and 1 must be hit exactly.
pub fn tessellation_tolerance(d: f64, trials: u64) -> f64 {
    if d == 0.0 || d == 1.0 {
        return 0.0;
    }
    let sigma = (d * (1.0 - d) / trials as f64).sqrt();
    (3.0 * sigma).max(0.005 * trial_scale(trials))
}

/// Two unit vectors in dimension `p` at the given angle.
///
/// Both lie in the span of the first two coordinates; 0 and 180 degrees give
/// `y = x` and `y = -x` exactly.
pub fn angle_pair(p: usize, degrees: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if p < 2 {
        return Err(Error::InvalidDimension(format!("angle pairs need p >= 2, got {p}")));
    }
    if !(0.0..=180.0).contains(&degrees) {
        return Err(Error::InvalidConfig(format!("angle {degrees} outside [0, 180]")));
    }
    let mut x = vec![0.0; p];
    x[0] = 1.0;
    let y = if degrees == 0.0 {
        x.clone()
    } else if degrees == 180.0 {
        x.iter().map(|v| -v).collect()
    } else {
        let t = degrees.to_radians();
        let mut y = vec![0.0; p];
        y[0] = t.cos();
        y[1] = t.sin();
        y
    };
    Ok((x, y))
}

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    let norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(f64::MIN_POSITIVE)
}

fn fwht_checks(seeds: &SeedTree) -> Result<Vec<Check>> {
    let mut rng = seeds.rng(SeedLabel::GaussianDense, 1);
    let (mut norm_err, mut inv_err) = (0.0f64, 0.0f64);
    for k in 1..=12 {
        let x = standard_normals(&mut rng, 1 << k);
        let mut v = x.clone();
        fwht_inplace(&mut v)?;
        let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        norm_err = norm_err.max((nv - nx).abs() / nx);
        fwht_inplace(&mut v)?;
        inv_err = inv_err.max(rel_err(&v, &x));
    }
    Ok(vec![
        Check::new("fwht preserves norms (orthonormal), lengths 2..4096", norm_err, 1e-6),
        Check::new("fwht is an involution, lengths 2..4096", inv_err, 1e-6),
    ])
}

fn toeplitz_check(seeds: &SeedTree, instances: usize) -> Result<Check> {
    let mut rng = seeds.rng(SeedLabel::ToeplitzGen, 1);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let n = rng.random_range(1..=256usize);
        let rows = rng.random_range(1..=n);
        let block = ToeplitzBlock::from_parts(
            standard_normals(&mut rng, 2 * n - 1),
            rademacher(&mut rng, n),
            rows,
        )?;
        let y = standard_normals(&mut rng, n);
        worst = worst.max(rel_err(&block.apply(&y)?, &block.apply_naive(&y)?));
    }
    Ok(Check::new(
        format!("toeplitz FFT product equals dense product, {instances} instances n <= 256"),
        worst,
        1e-8,
    ))
}

/// `sqrt(L/n) P H D pad(x)` with an explicit Sylvester matrix.
fn dense_sketch(s: &HadamardSketch, x: &[f64]) -> Vec<f64> {
    let l = s.padded_dim();
    let norm = (l as f64).sqrt();
    let mut dx = vec![0.0; l];
    for (i, v) in x.iter().enumerate() {
        dx[i] = v * s.diag_signs()[i];
    }
    s.row_indices()
        .iter()
        .map(|&r| {
            let hx: f64 = dx
                .iter()
                .enumerate()
                .map(|(c, v)| if (r & c).count_ones() % 2 == 0 { *v } else { -*v })
                .sum();
            s.scale() * hx / norm
        })
        .collect()
}

fn sketch_check(seeds: &SeedTree) -> Result<Check> {
    let mut rng = seeds.rng(SeedLabel::HadamardRows, 1);
    let mut worst = 0.0f64;
    for p in 1..=64 {
        let n = rng.random_range(1..=2 * p);
        let sketch = HadamardSketch::build(p, n, &seeds.fork(p as u64))?;
        let x = standard_normals(&mut rng, p);
        let fast = sketch.apply(&x)?;
        let slow = dense_sketch(&sketch, &x);
        let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(err / nx);
    }
    Ok(Check::new("hadamard sketch equals dense sqrt(L/n) P H D, p <= 64", worst, 1e-6))
}

fn tessellation_checks(trials: u64, seeds: &SeedTree) -> Result<Vec<Check>> {
    [0.0, 45.0, 90.0, 135.0, 180.0]
        .iter()
        .enumerate()
        .map(|(i, &deg)| {
            let (x, y) = angle_pair(16, deg)?;
            let d = geodesic(&x, &y)?;
            let est = tessellation_oracle(&x, &y, trials, seeds.derive(SeedLabel::GaussianDense, 100 + i as u64))?;
            Ok(Check::new(
                format!("tessellation identity E[sign flip] = d(x,y) at {deg} deg (d = {d:.4})"),
                (est - d).abs(),
                tessellation_tolerance(d, trials),
            ))
        })
        .collect()
}

fn independence_checks(trials: u64, seeds: &SeedTree) -> Result<Vec<Check>> {
    let pts = gen_sphere_dataset(2, 64, seeds.derive(SeedLabel::Dataset, 7))?;
    let table = independence_oracle(pts.row(0), pts.row(1), trials, seeds.derive(SeedLabel::ToeplitzGen, 7))?;
    let marg_tol = 0.005 * trial_scale(trials);
    let cell_tol = 0.007 * trial_scale(trials);
    let mut checks = Vec::new();
    for (name, c) in table.pairs {
        let marg = (c.first_positive() - 0.5).abs().max((c.second_positive() - 0.5).abs());
        checks.push(Check::new(format!("toeplitz row independence: marginals of ({name}) balanced"), marg, marg_tol));
        let cell = [(false, false), (false, true), (true, false), (true, true)]
            .iter()
            .map(|&(a, b)| (c.cell(a, b) - 0.25).abs())
            .fold(0.0, f64::max);
        checks.push(Check::new(format!("toeplitz row independence: joint cells of ({name}) = 1/4"), cell, cell_tol));
    }
    let xy2 = table.pairs[1].1;
    checks.push(Check::new(
        "toeplitz row independence: Pr(X = Y') = 1/2",
        (xy2.agree() - 0.5).abs(),
        marg_tol,
    ));
    Ok(checks)
}

fn jl_checks(seeds: &SeedTree) -> Result<Vec<Check>> {
    let data = gen_sphere_dataset(100, 512, seeds.derive(SeedLabel::Dataset, 8))?;
    let sketch = HadamardSketch::build(512, 1024, &seeds.fork(8))?;
    let r = jl_distortion_oracle(&sketch, &data)?;
    let delta = r.norm_distortion();
    Ok(vec![
        Check::new("hadamard JL embedding: relative norm distortion, p=512 n=1024 N=100", delta, 0.3),
        Check::new(
            "hadamard JL embedding: geodesic deviation within 4x norm distortion",
            r.max_geodesic_deviation,
            4.0 * delta,
        ),
    ])
}

/// Runs every oracle; Monte-Carlo tolerances scale as `1/sqrt(trials)`.
pub fn verify_suite(trials: u64, seed: u64) -> Result<Vec<Check>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let seeds = SeedTree::new(seed);
    let mut checks = fwht_checks(&seeds)?;
    checks.push(toeplitz_check(&seeds, 200)?);
    checks.push(sketch_check(&seeds)?);
    checks.extend(tessellation_checks(trials, &seeds)?);
    checks.extend(independence_checks(trials, &seeds)?);
    checks.extend(jl_checks(&seeds)?);
    Ok(checks)
}
