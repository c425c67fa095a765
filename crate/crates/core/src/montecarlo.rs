//! Sampling estimates of attack time.
//!
//! Iterations are grouped in blocks of [`BLOCK`]; block `b` draws from its
//! own generator `stream(master_seed, [b])`, so the samples do not depend on
//! how blocks are spread over threads.

use std::time::Duration;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use thiserror::Error;

use crate::analytic::{juggernaut, AttackAnalysis};
use crate::params::{AttackPlan, DefenseConfig, DefenseKind, DramGeometry, TimingParams};
use crate::rng::{derive_seed, stream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("success probability is zero; attack time is unbounded")]
    Degenerate,
    #[error("iterations ≥ 1")]
    NoIterations,
    #[error("binomial draws need about {0:.3e} epochs per iteration; use the geometric mode")]
    TooSlow(f64),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum McMode {
    /// Epochs-to-success drawn directly from Geometric(p_success) by
    /// inversion.
    #[default]
    GeometricEvent,
    /// Per epoch, the number of the `G` guesses that hit the target is drawn
    /// from Binomial(G, 1/R); the epoch succeeds on exactly `k` hits.
    BinomialDraw,
}

/// Largest expected epochs per iteration accepted in binomial mode.
pub const BINOMIAL_MAX_EPOCHS: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub iterations: u64,
    pub master_seed: u64,
    pub mode: McMode,
    pub epoch: Duration,
    /// Epochs to success, in iteration order. Empty for sweep points,
    /// which keep only the summary.
    pub samples: Vec<u64>,
    pub mean_epochs: f64,
    pub mean_s: f64,
    pub p50_s: f64,
    pub p90_s: f64,
    pub p99_s: f64,
}

impl McRun {
    fn from_samples(samples: Vec<u64>, master_seed: u64, mode: McMode, epoch: Duration) -> Self {
        let n = samples.len();
        let mean_epochs = samples.iter().map(|&s| s as f64).sum::<f64>() / n as f64;
        let mut scratch = samples.clone();
        let epoch_s = epoch.as_secs_f64();
        let mut pct = |q: f64| {
            let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
            *scratch.select_nth_unstable(rank - 1).1 as f64 * epoch_s
        };
        Self {
            iterations: n as u64,
            master_seed,
            mode,
            epoch,
            mean_epochs,
            mean_s: mean_epochs * epoch_s,
            p99_s: pct(0.99),
            p90_s: pct(0.90),
            p50_s: pct(0.50),
            samples,
        }
    }

    /// Sample variance of epochs-to-success.
    pub fn variance_epochs(&self) -> f64 {
        let n = self.samples.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        self.samples.iter().map(|&s| (s as f64 - self.mean_epochs).powi(2)).sum::<f64>() / (n - 1.0)
    }
}

/// Standard error of the mean epochs for Geometric(p) over `n` samples.
pub fn geometric_standard_error(p: f64, n: u64) -> f64 {
    (1.0 - p).sqrt() / p / (n as f64).sqrt()
}

/// Iterations sharing one generator.
pub const BLOCK: u64 = 256;

enum Sampler {
    Once,
    /// Inversion: floor(ln U / ln(1 − p)) failures. Holds ln(1 − p).
    Geometric(f64),
    Binomial(Binomial, u64),
}

impl Sampler {
    fn new(analysis: &AttackAnalysis, mode: McMode) -> Self {
        match mode {
            _ if analysis.p_success >= 1.0 => Sampler::Once,
            McMode::GeometricEvent => Sampler::Geometric((-analysis.p_success).ln_1p()),
            McMode::BinomialDraw => Sampler::Binomial(
                Binomial::new(analysis.guesses, 1.0 / f64::from(analysis.rows)).expect("valid binomial"),
                analysis.k,
            ),
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> u64 {
        match self {
            Sampler::Once => 1,
            Sampler::Geometric(ln_q) => {
                // 1 − u lies in (0, 1]
                let u: f64 = rng.random();
                ((1.0 - u).ln() / ln_q).floor() as u64 + 1
            }
            Sampler::Binomial(b, k) => {
                let mut epochs = 1;
                while b.sample(rng) != *k {
                    epochs += 1;
                }
                epochs
            }
        }
    }

    /// Samples for block `b` of a run of `iterations`.
    fn block(&self, seed: u64, b: u64, iterations: u64) -> Vec<u64> {
        let mut rng = stream(seed, &[b]);
        let len = BLOCK.min(iterations - b * BLOCK);
        (0..len).map(|_| self.sample(&mut rng)).collect()
    }
}

/// Runs `f(i)` for `0..n` on `jobs` threads (1 = current thread), keeping
/// results in index order.
pub fn par_indexed<T: Send>(n: u64, jobs: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    if jobs <= 1 {
        return (0..n).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

pub fn mc_attack_time(
    analysis: &AttackAnalysis,
    iterations: u64,
    master_seed: u64,
    mode: McMode,
    jobs: usize,
) -> Result<McRun, McError> {
    if iterations == 0 {
        return Err(McError::NoIterations);
    }
    if analysis.p_success.is_nan() || analysis.p_success <= 0.0 {
        return Err(McError::Degenerate);
    }
    if mode == McMode::BinomialDraw && analysis.at_iter > BINOMIAL_MAX_EPOCHS {
        return Err(McError::TooSlow(analysis.at_iter));
    }
    let sampler = Sampler::new(analysis, mode);
    let blocks = iterations.div_ceil(BLOCK);
    let samples = par_indexed(blocks, jobs, |b| sampler.block(master_seed, b, iterations)).concat();
    Ok(McRun::from_samples(samples, master_seed, mode, analysis.epoch))
}

#[derive(Debug, Clone, PartialEq)]
pub struct McPoint {
    pub n: u64,
    pub analytic: AttackAnalysis,
    pub run: McRun,
}

/// Analytic and sampled attack time for each feasible N in `n_values`;
/// infeasible N are skipped. N's samples use `derive_seed(seed, [N])`.
pub fn mc_sweep(
    timing: &TimingParams,
    geom: &DramGeometry,
    cfg: &DefenseConfig,
    n_values: &[u64],
    iterations: u64,
    seed: u64,
    jobs: usize,
) -> Result<Vec<McPoint>, McError> {
    if !matches!(cfg.kind, DefenseKind::Rrs | DefenseKind::Srs) {
        return Err(McError::Invalid(format!("mc_sweep does not model `{}`", cfg.kind)));
    }
    if iterations == 0 {
        return Err(McError::NoIterations);
    }
    let analyses: Vec<AttackAnalysis> = n_values
        .iter()
        .filter_map(|&n| juggernaut(timing, geom, cfg, &AttackPlan::juggernaut(n)).ok())
        .filter(|a| a.p_success > 0.0)
        .collect();
    let runs = par_indexed(analyses.len() as u64, jobs, |idx| {
        let a = &analyses[idx as usize];
        let sampler = Sampler::new(a, McMode::GeometricEvent);
        let n_seed = derive_seed(seed, &[a.rounds]);
        let samples = (0..iterations.div_ceil(BLOCK)).flat_map(|b| sampler.block(n_seed, b, iterations)).collect();
        let mut run = McRun::from_samples(samples, seed, McMode::GeometricEvent, a.epoch);
        run.samples = Vec::new();
        run
    });
    Ok(analyses.into_iter().zip(runs).map(|(a, run)| McPoint { n: a.rounds, run, analytic: a }).collect())
}
