use binembed::eval::{angle_pair, gen_sphere_dataset};
use binembed::transforms::HadamardSketch;
use binembed::{
    geodesic, hamming_norm, median_block_hamming, pairwise_distortion, Algorithm, CodeMetric, Dataset, Embedder,
    EmbedderConfig, SeedTree,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sylvester(l: usize) -> Vec<Vec<f64>> {
    let mut h = vec![vec![1.0]];
    while h.len() < l {
        let k = h.len();
        let mut next = vec![vec![0.0; 2 * k]; 2 * k];
        for i in 0..k {
            for j in 0..k {
                next[i][j] = h[i][j];
                next[i][j + k] = h[i][j];
                next[i + k][j] = h[i][j];
                next[i + k][j + k] = -h[i][j];
            }
        }
        h = next;
    }
    let s = 1.0 / (l as f64).sqrt();
    h.into_iter().map(|r| r.into_iter().map(|v| v * s).collect()).collect()
}

#[test]
fn sketch_matches_dense_matrix_product() {
    let sketch = HadamardSketch::build(32, 48, &SeedTree::new(11)).unwrap();
    let l = sketch.padded_dim();
    assert_eq!(l, 32);
    let h = sylvester(l);
    let scale = (l as f64 / 48.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let x: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dx: Vec<f64> = x.iter().zip(sketch.diag_signs()).map(|(a, s)| a * s).collect();
        let dense: Vec<f64> = sketch
            .row_indices()
            .iter()
            .map(|&r| scale * h[r].iter().zip(&dx).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let fast = sketch.apply(&x).unwrap();
        let err: f64 = fast.iter().zip(&dense).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = dense.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!(err <= 1e-6 * norm, "err {err} norm {norm}");
    }
}

#[test]
fn long_codes_are_unbiased_for_geodesic_distance() {
    let (x, y) = angle_pair(64, 45.0).unwrap();
    let d = geodesic(&x, &y).unwrap();
    assert!((d - 0.25).abs() < 1e-12);
    let m = 100_000;
    let configs = [
        EmbedderConfig::urp(64, m, 1),
        EmbedderConfig::fbe2(64, 4096, 5000, 2),
        EmbedderConfig::fbe(64, m, 130_000, 10, 3),
    ];
    for cfg in configs {
        let e = Embedder::fit(cfg).unwrap();
        let h = hamming_norm(&e.embed(&x).unwrap(), &e.embed(&y).unwrap()).unwrap();
        // FBE2 is checked at a smaller m to bound the dense matrix size.
        let tol = if cfg.algorithm == Algorithm::Fbe2 { 0.03 } else { 0.01 };
        assert!((h - 0.25).abs() <= tol, "{}: {h}", cfg.algorithm);
    }
}

#[test]
fn urp_distortion_at_standard_size() {
    let data = gen_sphere_dataset(300, 512, 21).unwrap();
    let e = Embedder::fit(EmbedderConfig::urp(512, 4000, 22)).unwrap();
    let codes = e.embed_batch(&data).unwrap();
    let r = pairwise_distortion(&data, &codes, CodeMetric::Hamming).unwrap();
    assert_eq!(r.n_pairs, 300 * 299 / 2);
    assert!(r.max_abs_distortion < 0.15, "{r:?}");
    assert!(r.mean_abs_distortion < r.max_abs_distortion);
}

#[test]
fn antipodal_points_are_estimated_at_one() {
    let x = gen_sphere_dataset(1, 512, 4).unwrap();
    let neg: Vec<f64> = x.row(0).iter().map(|v| -v).collect();
    let data = Dataset::from_flat(512, [x.row(0), &neg[..]].concat()).unwrap();
    let e = Embedder::fit(EmbedderConfig::urp(512, 1000, 9)).unwrap();
    let codes = e.embed_batch(&data).unwrap();
    assert!((hamming_norm(&codes[0], &codes[1]).unwrap() - 1.0).abs() <= 0.05);
    let r = pairwise_distortion(&data, &codes, CodeMetric::Hamming).unwrap();
    assert!(r.max_abs_distortion <= 0.05);
}

#[test]
fn fbe_median_estimator_tracks_geodesic() {
    let data = gen_sphere_dataset(60, 128, 30).unwrap();
    let cfg = EmbedderConfig::fbe(128, 2000, 2600, 8, 31);
    let e = Embedder::fit(cfg).unwrap();
    let codes = e.embed_batch(&data).unwrap();
    for i in 0..10 {
        for j in i + 1..10 {
            let est = median_block_hamming(&codes[i], &codes[j]).unwrap();
            let d = geodesic(data.row(i), data.row(j)).unwrap();
            assert!((est - d).abs() < 0.1, "({i},{j}) est {est} d {d}");
        }
    }
}

#[test]
fn default_fbe_layout_for_the_standard_setting() {
    let cfg = EmbedderConfig::fbe(512, 960, 1248, 16, 0);
    let e = Embedder::fit(cfg).unwrap();
    let s = e.sketch().unwrap();
    assert_eq!((s.input_dim(), s.out_dim()), (512, 1248));
    assert_eq!(e.blocks().len(), 16);
    assert!(e.blocks().iter().all(|b| b.rows_out() == 60 && b.dim() == 1248));
    let urp = Embedder::fit(EmbedderConfig::urp(512, 1000, 0)).unwrap();
    let a = urp.dense_matrix().unwrap();
    assert_eq!((a.rows(), a.cols()), (1000, 512));
}
