//! Python bindings: `import pybinembed`.

use binembed::eval::{self, SweepSpec};
use binembed::{Algorithm, CodeMetric, Dataset};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: binembed::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = binembed::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn dataset(rows: Vec<Vec<f64>>) -> PyResult<Dataset> {
    let dim = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != dim) {
        return Err(PyValueError::new_err("rows must all have the same length"));
    }
    Dataset::from_flat(dim, rows.concat()).map_err(err)
}

/// A packed binary code with `n_bits` bits split into `n_blocks` equal blocks.
#[pyclass(module = "pybinembed", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct BinaryCode(binembed::BinaryCode);

#[pymethods]
impl BinaryCode {
    #[new]
    #[pyo3(signature = (bits, blocks = 1))]
    fn new(bits: Vec<bool>, blocks: usize) -> PyResult<Self> {
        binembed::pack_bits(&bits, blocks).map(Self).map_err(err)
    }

    #[getter]
    fn n_bits(&self) -> usize {
        self.0.n_bits()
    }

    #[getter]
    fn n_blocks(&self) -> usize {
        self.0.n_blocks()
    }

    /// Little-endian 64-bit words, bit `k` at word `k / 64`, position `k % 64`.
    #[getter]
    fn words(&self) -> Vec<u64> {
        self.0.words().to_vec()
    }

    fn bits(&self) -> Vec<bool> {
        self.0.unpack_bits()
    }

    fn hamming(&self, other: &BinaryCode) -> PyResult<f64> {
        binembed::hamming_norm(&self.0, &other.0).map_err(err)
    }

    fn median_block(&self, other: &BinaryCode) -> PyResult<f64> {
        binembed::median_block_hamming(&self.0, &other.0).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.n_bits()
    }

    fn __repr__(&self) -> String {
        format!("BinaryCode(n_bits={}, n_blocks={})", self.0.n_bits(), self.0.n_blocks())
    }
}

/// A fitted embedder. `n` and `blocks` default to `ceil(1.3 m)` and the
/// divisor of `m` nearest `1.8 ln n_points`.
#[pyclass(module = "pybinembed", frozen)]
struct Embedder(binembed::Embedder);

#[pymethods]
impl Embedder {
    #[new]
    #[pyo3(signature = (algorithm, input_dim, code_bits, n = None, blocks = None, n_points = 1000, seed = 0))]
    fn new(
        algorithm: &str,
        input_dim: usize,
        code_bits: usize,
        n: Option<usize>,
        blocks: Option<usize>,
        n_points: usize,
        seed: u64,
    ) -> PyResult<Self> {
        let algorithm: Algorithm = parse(algorithm)?;
        let mut cfg = binembed::EmbedderConfig::with_defaults(algorithm, input_dim, code_bits, n_points, seed);
        if algorithm != Algorithm::Urp && n.is_some() {
            cfg.intermediate_dim = n;
        }
        if let Some(b) = blocks {
            cfg.blocks = b;
        }
        binembed::Embedder::fit(cfg).map(Self).map_err(err)
    }

    #[getter]
    fn algorithm(&self) -> &'static str {
        self.0.config().algorithm.as_str()
    }

    #[getter]
    fn code_bits(&self) -> usize {
        self.0.config().code_bits
    }

    #[getter]
    fn intermediate_dim(&self) -> Option<usize> {
        self.0.config().intermediate_dim
    }

    #[getter]
    fn blocks(&self) -> usize {
        self.0.config().blocks
    }

    fn embed(&self, x: Vec<f64>) -> PyResult<BinaryCode> {
        self.0.embed(&x).map(BinaryCode).map_err(err)
    }

    fn embed_batch(&self, rows: Vec<Vec<f64>>) -> PyResult<Vec<BinaryCode>> {
        let data = dataset(rows)?;
        let codes = self.0.embed_batch(&data).map_err(err)?;
        Ok(codes.into_iter().map(BinaryCode).collect())
    }

    /// Code-space distance with the estimator suited to this algorithm.
    fn distance(&self, a: &BinaryCode, b: &BinaryCode) -> PyResult<f64> {
        eval::metric_for(self.0.config().algorithm).distance(&a.0, &b.0).map_err(err)
    }
}

/// Normalized angle between two vectors, in `[0, 1]`.
#[pyfunction]
fn geodesic(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    binembed::geodesic(&x, &y).map_err(err)
}

/// `n_points` uniform points on the sphere `S^{dim-1}`, as a list of rows.
#[pyfunction]
#[pyo3(signature = (n_points, dim, seed = 0))]
fn gen_sphere_dataset(n_points: usize, dim: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let d = eval::gen_sphere_dataset(n_points, dim, seed).map_err(err)?;
    Ok(d.rows().map(<[f64]>::to_vec).collect())
}

/// `(max, mean)` absolute gap between code distances and geodesic distances over all pairs.
#[pyfunction]
#[pyo3(signature = (rows, codes, metric = "hamming"))]
fn pairwise_distortion(rows: Vec<Vec<f64>>, codes: Vec<BinaryCode>, metric: &str) -> PyResult<(f64, f64)> {
    let data = dataset(rows)?;
    let codes: Vec<_> = codes.into_iter().map(|c| c.0).collect();
    let metric: CodeMetric = parse(metric)?;
    let r = binembed::pairwise_distortion(&data, &codes, metric).map_err(err)?;
    Ok((r.max_abs_distortion, r.mean_abs_distortion))
}

/// Runs a distortion sweep and returns it as CSV text.
#[pyfunction]
#[pyo3(signature = (ns, ms, p, algorithms, trials, seed = 0, timing = false))]
fn distortion_sweep(
    ns: Vec<usize>,
    ms: Vec<usize>,
    p: usize,
    algorithms: Vec<String>,
    trials: u64,
    seed: u64,
    timing: bool,
) -> PyResult<String> {
    let algorithms = algorithms.iter().map(|a| parse(a)).collect::<PyResult<Vec<Algorithm>>>()?;
    let mut spec = SweepSpec::new(ns, ms, p, algorithms, trials, seed);
    spec.timing = timing;
    let records = eval::distortion_sweep(&spec).map_err(err)?;
    let mut buf = Vec::new();
    eval::write_sweep_csv(&mut buf, &records).map_err(err)?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// The oracle suite as `(name, observed, allowed, passed)` tuples.
#[pyfunction]
#[pyo3(signature = (trials = 100_000, seed = 0))]
fn verify(trials: u64, seed: u64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let checks = eval::verify_suite(trials, seed).map_err(err)?;
    Ok(checks.into_iter().map(|c| (c.name, c.observed, c.allowed, c.passed)).collect())
}

#[pymodule]
fn pybinembed(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<BinaryCode>()?;
    m.add_class::<Embedder>()?;
    m.add_function(wrap_pyfunction!(geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(gen_sphere_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_distortion, m)?)?;
    m.add_function(wrap_pyfunction!(distortion_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
