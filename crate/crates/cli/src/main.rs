mod plot;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use binembed::eval::{
    aggregate, distortion_sweep, gen_sphere_dataset, linear_fit, m_for_target_delta, read_sweep_csv,
    retrieval_benchmark, split_queries, verify_suite, write_retrieval_csv, write_sweep_csv, SweepSpec,
};
use binembed::io::{read_vectors, write_codes, write_vectors};
use binembed::seed::fnv1a64;
use binembed::types::round_up_to_blocks;
use binembed::{Algorithm, CodeMetric, Dataset, Embedder, EmbedderConfig};
use clap::{Args, Parser, Subcommand};

use plot::{line_chart, Series};

/// Binary embeddings on the unit sphere: data generation, embedding, sweeps and checks.
#[derive(Parser, Debug)]
#[command(name = "binembed", version)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample N uniform points on S^{p-1} into a BEMB file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit an embedder and write the codes of a BEMB file as BCOD.
    Embed {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        embed: EmbedArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distortion sweep over N, m and algorithms; CSV on stdout.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "urp,fbe,fbe2")]
        algos: Vec<Algorithm>,
        #[arg(long = "N", value_delimiter = ',', default_value = "300")]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000,4000,8000")]
        ms: Vec<usize>,
        #[arg(long, default_value_t = 512)]
        p: usize,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        first_trial: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fixed FBE block count instead of the 1.8 ln N default.
        #[arg(long)]
        b: Option<usize>,
        /// Raise m to a multiple of B when they do not divide.
        #[arg(long)]
        round_m: bool,
        /// Write zeros in the timing columns so output is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
        /// Also write an SVG of mean max distortion against m.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interpolate the m reaching a target distortion from a sweep CSV.
    Slice {
        /// Sweep CSV; stdin when omitted.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        /// Also write an SVG of m against ln N.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Nearest-neighbor recall of code-space search against geodesic ground truth.
    Retrieve {
        /// BEMB file to split into base and queries; synthetic data when omitted.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Separate BEMB query file; requires --in.
        #[arg(long, requires = "input")]
        queries: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "urp,fbe2")]
        algos: Vec<Algorithm>,
        #[arg(long, value_delimiter = ',', default_value = "5000")]
        ms: Vec<usize>,
        /// Synthetic base size.
        #[arg(long = "N", default_value_t = 5000)]
        n_base: usize,
        #[arg(long, default_value_t = 512)]
        p: usize,
        #[arg(long, default_value_t = 500)]
        n_queries: usize,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        round_m: bool,
        /// Code metric: hamming or median_block (default: median_block for fbe).
        #[arg(long)]
        metric: Option<CodeMetric>,
    },
    /// Run the Monte-Carlo oracle suite; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[arg(long)]
    algo: Algorithm,
    /// Intermediate dimension (default ceil(1.3 m)).
    #[arg(long)]
    n: Option<usize>,
    /// FBE block count (default: divisor of m nearest 1.8 ln N).
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Raise m to a multiple of B when they do not divide.
    #[arg(long)]
    round_m: bool,
}

fn build_config(
    algo: Algorithm,
    p: usize,
    m: usize,
    n_points: usize,
    n: Option<usize>,
    b: Option<usize>,
    round_m: bool,
    seed: u64,
) -> Result<EmbedderConfig> {
    let m = match (algo, b) {
        (Algorithm::Fbe, Some(b)) if round_m && b > 0 => round_up_to_blocks(m, b),
        _ => m,
    };
    let mut config = EmbedderConfig::with_defaults(algo, p, m, n_points, seed);
    match algo {
        Algorithm::Urp if n.is_some() || b.is_some() => bail!("urp takes neither --n nor --b"),
        Algorithm::Fbe2 if b.is_some_and(|b| b != 1) => bail!("fbe2 produces a single block; drop --b"),
        _ => {}
    }
    if let Some(b) = b {
        config.blocks = b;
    }
    if algo != Algorithm::Urp {
        config.intermediate_dim = n.or(config.intermediate_dim);
    }
    config.validate().context("invalid embedder configuration")?;
    Ok(config)
}

fn read_dataset(path: &Path) -> Result<Dataset> {
    let mut r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    read_vectors(&mut r).with_context(|| format!("reading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_gen(n: usize, p: usize, seed: u64, out: &Path) -> Result<()> {
    let data = gen_sphere_dataset(n, p, seed)?;
    let mut bytes = Vec::new();
    write_vectors(&mut bytes, &data)?;
    std::fs::write(out, &bytes).with_context(|| format!("writing {}", out.display()))?;
    println!("N={n} p={p} fnv1a64={:016x} -> {}", fnv1a64(&bytes), out.display());
    Ok(())
}

fn cmd_embed(input: &Path, a: &EmbedArgs, m: usize, out: &Path) -> Result<()> {
    let data = read_dataset(input)?;
    let config = build_config(a.algo, data.dim(), m, data.n_points(), a.n, a.b, a.round_m, a.seed)?;
    let t0 = Instant::now();
    let embedder = Embedder::fit(config)?;
    let fit_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let codes = embedder.embed_batch(&data)?;
    let embed_ms = t1.elapsed().as_secs_f64() * 1e3;
    let mut w = create(out)?;
    write_codes(&mut w, &codes)?;
    w.flush()?;
    let n = config.intermediate_dim.map_or("-".to_string(), |n| n.to_string());
    eprintln!(
        "{} N={} p={} m={} n={n} B={}: fit {fit_ms:.1} ms, embed {embed_ms:.1} ms ({:.4} ms/point)",
        config.algorithm,
        data.n_points(),
        data.dim(),
        config.code_bits,
        config.blocks,
        embed_ms / data.n_points() as f64
    );
    Ok(())
}

fn sweep_plot(records: &[binembed::eval::SweepRecord]) -> String {
    let mut groups: BTreeMap<(Algorithm, usize), Vec<(f64, f64, f64)>> = BTreeMap::new();
    for s in aggregate(records) {
        groups
            .entry((s.algorithm, s.n_points))
            .or_default()
            .push((s.m as f64, s.mean_max_distortion, s.std_max_distortion));
    }
    let series: Vec<Series> = groups
        .into_iter()
        .map(|((a, n), points)| Series {
            label: format!("{a} N={n}"),
            points,
            line: true,
        })
        .collect();
    line_chart("max distortion vs code length", "m", "mean max distortion", &series)
}

fn cmd_slice(input: Option<&Path>, delta: f64, plot: Option<&Path>) -> Result<()> {
    let records = match input {
        Some(p) => read_sweep_csv(BufReader::new(File::open(p).with_context(|| format!("opening {}", p.display()))?))?,
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            read_sweep_csv(buf.as_slice())?
        }
    };
    let slices = m_for_target_delta(&records, delta)?;
    let mut out = io::stdout().lock();
    writeln!(out, "algorithm,N,ln_N,m")?;
    let mut by_algo: BTreeMap<Algorithm, Vec<(f64, f64)>> = BTreeMap::new();
    for s in &slices {
        let ln_n = (s.n_points as f64).ln();
        writeln!(out, "{},{},{ln_n},{}", s.algorithm, s.n_points, s.m)?;
        by_algo.entry(s.algorithm).or_default().push((ln_n, s.m));
    }
    let mut series = Vec::new();
    for (algo, pts) in &by_algo {
        series.push(Series {
            label: format!("{algo}"),
            points: pts.iter().map(|&(x, y)| (x, y, 0.0)).collect(),
            line: false,
        });
        if pts.len() >= 2 {
            let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            let fit = linear_fit(&xs, &ys)?;
            eprintln!(
                "{algo}: m = {:.3} ln N + {:.3}, R^2 = {:.4}",
                fit.slope, fit.intercept, fit.r_squared
            );
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            series.push(Series {
                label: format!("{algo} fit"),
                points: [lo, hi].iter().map(|&x| (x, fit.slope * x + fit.intercept, 0.0)).collect(),
                line: true,
            });
        }
    }
    if let Some(p) = plot {
        let title = format!("m at delta = {delta}");
        std::fs::write(p, line_chart(&title, "ln N", "m", &series))?;
    }
    Ok(())
}

fn cmd_verify(trials: u64, seed: u64) -> Result<bool> {
    let checks = verify_suite(trials, seed)?;
    let mut ok = true;
    for c in &checks {
        println!("{c}");
        ok &= c.passed;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    match cli.command {
        Command::Gen { n, p, seed, out } => cmd_gen(n, p, seed, &out)?,
        Command::Embed { input, embed, m, out } => cmd_embed(&input, &embed, m, &out)?,
        Command::Sweep {
            algos,
            ns,
            ms,
            p,
            trials,
            first_trial,
            seed,
            b,
            round_m,
            no_timing,
            plot,
            out,
        } => {
            let mut spec = SweepSpec::new(ns, ms, p, algos, trials, seed);
            spec.first_trial = first_trial;
            spec.blocks = b;
            spec.round_m = round_m;
            spec.timing = !no_timing;
            let records = distortion_sweep(&spec)?;
            let mut w = output(out.as_deref())?;
            write_sweep_csv(&mut w, &records)?;
            w.flush()?;
            if let Some(path) = plot {
                std::fs::write(&path, sweep_plot(&records)).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Slice { input, delta, plot } => cmd_slice(input.as_deref(), delta, plot.as_deref())?,
        Command::Retrieve {
            input,
            queries,
            algos,
            ms,
            n_base,
            p,
            n_queries,
            k,
            seed,
            b,
            n,
            round_m,
            metric,
        } => {
            let (base, qs) = match (input, queries) {
                (Some(i), Some(q)) => (read_dataset(&i)?, read_dataset(&q)?),
                (Some(i), None) => split_queries(&read_dataset(&i)?, n_queries, seed)?,
                (None, _) => split_queries(&gen_sphere_dataset(n_base + n_queries, p, seed)?, n_queries, seed)?,
            };
            let mut records = Vec::new();
            for &algo in &algos {
                for &m in &ms {
                    let (n, b) = match algo {
                        Algorithm::Urp => (None, None),
                        Algorithm::Fbe => (n, b),
                        Algorithm::Fbe2 => (n, None),
                    };
                    let config = build_config(algo, base.dim(), m, base.n_points(), n, b, round_m, seed)?;
                    let metric = metric.unwrap_or(binembed::eval::metric_for(algo));
                    records.push(retrieval_benchmark(&base, &qs, k, config, metric)?);
                }
            }
            let mut w = io::stdout().lock();
            write_retrieval_csv(&mut w, &records)?;
        }
        Command::Verify { trials, seed } => return cmd_verify(trials, seed),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
