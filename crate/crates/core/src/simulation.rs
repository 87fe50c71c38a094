//! Seeded Monte Carlo studies of the coefficient estimators.
//!
//! Replicate `r` at sample size `n` draws from the substream
//! `(mix_seed(seed, n), r)`, so every result depends only on the master seed.
//! Replicates run in parallel; sums are taken pairwise in replicate order.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients;
use crate::curves::CurveIndex;
use crate::distributions::DistributionModel;
use crate::empirical::{gini_hat, Grid, Sample};
use crate::error::{Error, Result};
use crate::quadrature::pairwise_sum;
use crate::rng::{mix_seed, RandomStream};

/// Normal quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub indices: Vec<CurveIndex>,
    pub sample_sizes: Vec<usize>,
    pub replicates: usize,
    pub grid: usize,
    pub seed: u64,
}

impl StudyConfig {
    pub fn new(indices: Vec<CurveIndex>, sample_sizes: Vec<usize>, replicates: usize, seed: u64) -> Result<Self> {
        let config = Self {
            indices,
            sample_sizes,
            replicates,
            grid: crate::DEFAULT_GRID,
            seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_grid(mut self, grid: usize) -> Result<Self> {
        self.grid = grid;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.indices.is_empty() {
            return Err(Error::InvalidParameter("a study needs at least one index".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter("sample sizes must be >= 2".into()));
        }
        if self.replicates < 2 {
            return Err(Error::InvalidParameter("replicate count must be >= 2".into()));
        }
        Grid::new(self.grid).map(|_| ())
    }
}

/// Summary of one (index, n) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyCell {
    pub index: CurveIndex,
    pub n: usize,
    /// The population value `G_i(J)` the estimates are compared with.
    pub target: f64,
    pub mean: f64,
    pub bias: f64,
    /// `sqrt(n)` times the root mean squared error.
    pub root_n_se: f64,
    pub coverage: Option<f64>,
    pub width: Option<f64>,
}

impl StudyCell {
    pub fn se(&self) -> f64 {
        self.root_n_se / (self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyResult {
    pub cells: Vec<StudyCell>,
}

impl StudyResult {
    pub fn cell(&self, index: CurveIndex, n: usize) -> Option<&StudyCell> {
        self.cells.iter().find(|c| c.index == index && c.n == n)
    }

    /// Writes one CSV row per cell.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,n,target,mean,bias,root_n_se,coverage,width")?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.6}"));
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},{},{}",
                c.index.number(),
                c.n,
                c.target,
                c.mean,
                c.bias,
                c.root_n_se,
                opt(c.coverage),
                opt(c.width)
            )?;
        }
        Ok(())
    }
}

/// Estimates of every configured index for each replicate at sample size `n`.
fn replicate_estimates<S>(config: &StudyConfig, n: usize, sampler: &S) -> Result<Vec<Vec<f64>>>
where
    S: Fn(usize, &mut RandomStream) -> Result<Sample> + Sync,
{
    let grid = Grid::new(config.grid)?;
    let seed = mix_seed(config.seed, n as u64);
    (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut stream = RandomStream::substream(seed, r as u64);
            let sample = sampler(n, &mut stream)?;
            config.indices.iter().map(|&i| gini_hat(&sample, i, &grid)).collect()
        })
        .collect()
}

/// Runs a study with an arbitrary sampler against the given population
/// values (`targets[k]` belongs to `config.indices[k]`). With `sigma`, also
/// records coverage of `G_hat +- 1.96 sigma / sqrt(n)` and its width.
pub fn run_study<S>(config: &StudyConfig, targets: &[f64], sigma: Option<&[f64]>, sampler: S) -> Result<StudyResult>
where
    S: Fn(usize, &mut RandomStream) -> Result<Sample> + Sync,
{
    config.validate()?;
    let k = config.indices.len();
    if targets.len() != k || sigma.is_some_and(|s| s.len() != k) {
        return Err(Error::InvalidParameter(
            "one target (and sigma) per index is required".into(),
        ));
    }
    let reps = config.replicates as f64;
    let mut cells = Vec::with_capacity(k * config.sample_sizes.len());
    for &n in &config.sample_sizes {
        let estimates = replicate_estimates(config, n, &sampler)?;
        let root_n = (n as f64).sqrt();
        for (j, &index) in config.indices.iter().enumerate() {
            let column: Vec<f64> = estimates.iter().map(|e| e[j]).collect();
            let target = targets[j];
            let mean = pairwise_sum(&column) / reps;
            let squared: Vec<f64> = column.iter().map(|g| (g - target).powi(2)).collect();
            let rmse = (pairwise_sum(&squared) / reps).sqrt();
            let (coverage, width) = match sigma {
                Some(s) => {
                    let half = Z_95 * s[j] / root_n;
                    let hits = column.iter().filter(|g| (*g - target).abs() <= half).count();
                    (Some(hits as f64 / reps), Some(2.0 * half))
                }
                None => (None, None),
            };
            cells.push(StudyCell {
                index,
                n,
                target,
                mean,
                bias: mean - target,
                root_n_se: root_n * rmse,
                coverage,
                width,
            });
        }
    }
    Ok(StudyResult { cells })
}

fn population_targets(model: &DistributionModel, config: &StudyConfig) -> Result<Vec<f64>> {
    config
        .indices
        .iter()
        .map(|&i| coefficients::coefficient_any(model, i, config.grid))
        .collect()
}

/// Finite-sample `sqrt(n) * RMSE` of each estimator. Heavy-tailed models are
/// compared with the extended `G0 = 1`.
pub fn se_study(model: &DistributionModel, config: &StudyConfig) -> Result<StudyResult> {
    let targets = population_targets(model, config)?;
    run_study(config, &targets, None, |n, rng| model.sample(n, rng))
}

/// Coverage and width of the nominal 95% intervals `G_hat +- 1.96 sigma / sqrt(n)`;
/// `sigma[k]` belongs to `config.indices[k]`, which must be quantile indices.
pub fn ci_study(model: &DistributionModel, config: &StudyConfig, sigma: &[f64]) -> Result<StudyResult> {
    if config.indices.iter().any(|i| !i.is_quantile()) {
        return Err(Error::InvalidParameter(
            "intervals are available for indices 1..=3 only".into(),
        ));
    }
    if sigma.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    let targets = population_targets(model, config)?;
    run_study(config, &targets, Some(sigma), |n, rng| model.sample(n, rng))
}

/// Smallest `n` with `k_i / sqrt(n) <= c`, where `k_1 = 0.55` and `k_2 = k_3 = 0.43`.
pub fn sample_size_for_se(c: f64, index: CurveIndex) -> Result<usize> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::domain("c", c, "(0, inf)"));
    }
    let k = match index {
        CurveIndex::Lorenz => return Err(Error::InvalidParameter("no sample-size rule exists for G0".into())),
        CurveIndex::Median => 0.55,
        CurveIndex::Upper | CurveIndex::Midrange => 0.43,
    };
    let exact = (k / c).powi(2);
    let nearest = exact.round();
    let n = if (exact - nearest).abs() <= 1e-9 * exact.max(1.0) {
        nearest
    } else {
        exact.ceil()
    };
    Ok((n as usize).max(1))
}
