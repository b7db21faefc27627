//! Synthetic low-rank plus sparse recovery experiments.
//!
//! Every trial draws two complex matrices `M = X Y^* + S`, embeds them into one
//! hypercomplex matrix, runs PCP, and scores each recovered low-rank part
//! against its ground truth for a list of relative-error thresholds.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hyperalgebra::Field;
use crate::hypermatrix::HyperMatrix;
use crate::solvers::{self, SolverConfig, Variant};

/// Environment variable capping the worker pool of [`run_grid`].
pub const THREADS_ENV: &str = "POLARPCP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Embedding {
    /// `Re M1 + Im M1 e1 + Re M2 e2 + Im M2 e3` over `K_4`.
    Polar4Complex,
    /// `M1 + M2 e1` over `CK_2`.
    Polar2Bicomplex,
}

impl Embedding {
    pub const ALL: [Embedding; 2] = [Embedding::Polar4Complex, Embedding::Polar2Bicomplex];

    pub fn as_str(self) -> &'static str {
        match self {
            Embedding::Polar4Complex => "polar4complex",
            Embedding::Polar2Bicomplex => "polar2bicomplex",
        }
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Embedding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polar4complex" => Ok(Embedding::Polar4Complex),
            "polar2bicomplex" => Ok(Embedding::Polar2Bicomplex),
            _ => Err(Error::InvalidParameter(format!("unknown embedding {s:?}"))),
        }
    }
}

/// A phase-transition experiment: every `(r, rho)` cell is run `trials`
/// times for every embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    pub m: usize,
    pub ranks: Vec<usize>,
    pub rhos: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub embeddings: Vec<Embedding>,
    pub trials: usize,
    pub seed: u64,
    pub variant: Variant,
}

impl Default for TrialSpec {
    fn default() -> Self {
        Self {
            m: 100,
            ranks: (1..=10).map(|i| 2 * i).collect(),
            rhos: (1..=10).map(|i| 0.02 * i as f64).collect(),
            epsilons: vec![0.1, 0.05, 0.01],
            embeddings: Embedding::ALL.to_vec(),
            trials: 10,
            seed: 0,
            variant: Variant::Frequency,
        }
    }
}

impl TrialSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.m == 0 {
            return bad("m must be >= 1".into());
        }
        if self.ranks.is_empty() || self.rhos.is_empty() || self.epsilons.is_empty() || self.embeddings.is_empty() {
            return bad("ranks, rhos, epsilons and embeddings must be non-empty".into());
        }
        if let Some(r) = self.ranks.iter().find(|&&r| r == 0 || r > self.m) {
            return bad(format!("rank {r} outside 1..={}", self.m));
        }
        if let Some(rho) = self.rhos.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            return bad(format!("sparsity {rho} outside [0, 1]"));
        }
        if let Some(eps) = self.epsilons.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
            return bad(format!("threshold {eps} outside (0, 1)"));
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.variant == Variant::Naive {
            return bad("simulations use the frequency or tensor-rpca variant".into());
        }
        Ok(())
    }
}

/// One draw of `M = X Y^* + S` with its ground truth.
#[derive(Debug, Clone)]
pub struct LowRankSparse {
    pub m: DMatrix<Complex64>,
    pub low_rank: DMatrix<Complex64>,
    pub sparse: DMatrix<Complex64>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one generated instance; depends only on the base seed and the
/// instance coordinates, never on scheduling.
pub fn instance_seed(base: u64, r: usize, rho: f64, trial: usize, instance: usize) -> u64 {
    [r as u64, rho.to_bits(), trial as u64, instance as u64]
        .iter()
        .fold(splitmix(base), |acc, &w| splitmix(acc ^ w))
}

fn complex_normal(rng: &mut ChaCha12Rng, sd: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

/// `M = X Y^*  + S` with `X, Y` `m x r` of i.i.d. `CN(0, 1/m)` entries and `S`
/// Bernoulli(`rho`) supported with uniformly random unit phases.
pub fn gen_low_rank_sparse(m: usize, r: usize, rho: f64, seed: u64) -> Result<LowRankSparse> {
    if m == 0 || r == 0 || r > m {
        return Err(Error::InvalidParameter(format!("need 0 < r <= m, got r = {r}, m = {m}")));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::InvalidParameter(format!("sparsity {rho} outside [0, 1]")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let sd = (0.5 / m as f64).sqrt();
    let x = DMatrix::from_fn(m, r, |_, _| complex_normal(&mut rng, sd));
    let y = DMatrix::from_fn(m, r, |_, _| complex_normal(&mut rng, sd));
    let sparse = DMatrix::from_fn(m, m, |_, _| {
        if rng.random_bool(rho) {
            Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>())
        } else {
            Complex64::default()
        }
    });
    let low_rank = &x * y.adjoint();
    Ok(LowRankSparse {
        m: &low_rank + &sparse,
        low_rank,
        sparse,
    })
}

pub fn embed(m1: &DMatrix<Complex64>, m2: &DMatrix<Complex64>, mode: Embedding) -> Result<HyperMatrix> {
    if m1.shape() != m2.shape() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", m1.shape(), m2.shape())));
    }
    let (rows, cols) = m1.shape();
    Ok(match mode {
        Embedding::Polar4Complex => HyperMatrix::from_fn(rows, cols, 4, Field::Real, |i, k, t| {
            let z = if t < 2 { m1[(i, k)] } else { m2[(i, k)] };
            Complex64::new(if t % 2 == 0 { z.re } else { z.im }, 0.0)
        }),
        Embedding::Polar2Bicomplex => {
            HyperMatrix::from_fn(rows, cols, 2, Field::Complex, |i, k, t| if t == 0 { m1[(i, k)] } else { m2[(i, k)] })
        }
    })
}

/// Inverse of [`embed`].
pub fn extract(h: &HyperMatrix, mode: Embedding) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let (rows, cols) = (h.rows(), h.cols());
    match mode {
        Embedding::Polar4Complex => {
            if h.n() != 4 {
                return Err(Error::DimensionMismatch(format!("polar 4-complex extraction from n = {}", h.n())));
            }
            let part = |j: usize| DMatrix::from_fn(rows, cols, |i, k| Complex64::new(h.tube(i, k)[j].re, h.tube(i, k)[j + 1].re));
            Ok((part(0), part(2)))
        }
        Embedding::Polar2Bicomplex => {
            if h.n() != 2 {
                return Err(Error::DimensionMismatch(format!("polar 2-bicomplex extraction from n = {}", h.n())));
            }
            let part = |j: usize| DMatrix::from_fn(rows, cols, |i, k| h.tube(i, k)[j]);
            Ok((part(0), part(1)))
        }
    }
}

/// Result of one trial for one embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Relative recovery errors of the two low-rank parts.
    pub errors: [f64; 2],
    /// `successes[e][p]`: part `p` recovered within `epsilons[e]`.
    pub successes: Vec<[bool; 2]>,
    pub iterations: usize,
    pub converged: bool,
}

fn relative_error(estimate: &DMatrix<Complex64>, truth: &DMatrix<Complex64>) -> f64 {
    (estimate - truth).norm() / truth.norm()
}

pub fn run_trial(spec: &TrialSpec, embedding: Embedding, r: usize, rho: f64, trial: usize) -> Result<TrialOutcome> {
    let first = gen_low_rank_sparse(spec.m, r, rho, instance_seed(spec.seed, r, rho, trial, 0))?;
    let second = gen_low_rank_sparse(spec.m, r, rho, instance_seed(spec.seed, r, rho, trial, 1))?;
    let input = embed(&first.m, &second.m, embedding)?;
    let cfg = SolverConfig {
        variant: spec.variant,
        ..SolverConfig::default()
    };
    let out = solvers::pcp_ialm(&input, &cfg)?;
    let (l1, l2) = extract(&out.l, embedding)?;
    let errors = [relative_error(&l1, &first.low_rank), relative_error(&l2, &second.low_rank)];
    let successes = spec.epsilons.iter().map(|&eps| [errors[0] < eps, errors[1] < eps]).collect();
    Ok(TrialOutcome {
        errors,
        successes,
        iterations: out.iterations,
        converged: out.converged,
    })
}

/// One CSV row: successes of part `part` (1 or 2) in one cell at one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub embedding: Embedding,
    pub r: usize,
    pub rho: f64,
    pub epsilon: f64,
    pub part: u8,
    pub successes: usize,
    pub trials: usize,
    pub seed: u64,
}

impl GridRow {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Debug, Clone)]
pub struct GridResult {
    /// Sorted by embedding name, then `r`, `rho`, `epsilon`, `part`.
    pub rows: Vec<GridRow>,
    /// Per-trial outcomes in job order (embedding, r, rho, trial).
    pub outcomes: Vec<((Embedding, usize, f64, usize), TrialOutcome)>,
    pub runtime: Duration,
}

impl GridResult {
    pub fn fraction(&self, embedding: Embedding, r: usize, rho: f64, epsilon: f64, part: u8) -> Option<f64> {
        self.rows
            .iter()
            .find(|row| row.embedding == embedding && row.r == r && row.rho == rho && row.epsilon == epsilon && row.part == part)
            .map(GridRow::fraction)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&t| t > 0)
            .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))
}

pub fn run_grid(spec: &TrialSpec) -> Result<GridResult> {
    spec.validate()?;
    let start = Instant::now();
    let mut jobs = Vec::new();
    for &embedding in &spec.embeddings {
        for &r in &spec.ranks {
            for &rho in &spec.rhos {
                for trial in 0..spec.trials {
                    jobs.push((embedding, r, rho, trial));
                }
            }
        }
    }
    let outcomes: Vec<TrialOutcome> = thread_pool()?.install(|| {
        jobs.par_iter()
            .map(|&(embedding, r, rho, trial)| run_trial(spec, embedding, r, rho, trial))
            .collect::<Result<_>>()
    })?;

    let mut rows = Vec::new();
    for (cell, chunk) in jobs.chunks(spec.trials).zip(outcomes.chunks(spec.trials)) {
        let (embedding, r, rho, _) = cell[0];
        for (e, &epsilon) in spec.epsilons.iter().enumerate() {
            for part in [1u8, 2] {
                rows.push(GridRow {
                    embedding,
                    r,
                    rho,
                    epsilon,
                    part,
                    successes: chunk.iter().filter(|o| o.successes[e][part as usize - 1]).count(),
                    trials: spec.trials,
                    seed: spec.seed,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.embedding
            .as_str()
            .cmp(b.embedding.as_str())
            .then(a.r.cmp(&b.r))
            .then(a.rho.total_cmp(&b.rho))
            .then(a.epsilon.total_cmp(&b.epsilon))
            .then(a.part.cmp(&b.part))
    });
    Ok(GridResult {
        rows,
        outcomes: jobs.into_iter().zip(outcomes).collect(),
        runtime: start.elapsed(),
    })
}

pub const CSV_HEADER: &str = "embedding,r,rho,epsilon,part,successes,trials,seed";

pub fn write_csv<W: Write>(result: &GridResult, writer: W) -> Result<()> {
    let mut w = std::io::BufWriter::new(writer);
    writeln!(w, "{CSV_HEADER}")?;
    for row in &result.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            row.embedding, row.r, row.rho, row.epsilon, row.part, row.successes, row.trials, row.seed
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(result: &GridResult, path: impl AsRef<Path>) -> Result<()> {
    write_csv(result, std::fs::File::create(path)?)
}
