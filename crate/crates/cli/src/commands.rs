//! One function per subcommand; each returns the table to emit.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use qlorenz::convexity::{self, ConvexityReport};
use qlorenz::curves::{self, CurveIndex, HeavyTailPolicy};
use qlorenz::distributions::{DistributionModel, Family};
use qlorenz::empirical::{gini_hat, Grid, Sample};
use qlorenz::quadrature::QuadratureSpec;
use qlorenz::simulation::{self, StudyConfig, StudyResult};
use qlorenz::{coefficients, influence, transfer};

use crate::output::{Table, Value};
use crate::{DistArg, GridArg, Indices, UsageError};

fn policy(extend: bool) -> HeavyTailPolicy {
    if extend {
        HeavyTailPolicy::Extend
    } else {
        HeavyTailPolicy::Error
    }
}

fn index_names(indices: &[CurveIndex]) -> Vec<String> {
    indices.iter().map(|i| i.to_string()).collect()
}

/// 0.005, 0.010, ..., 0.995.
pub fn level_grid() -> Vec<f64> {
    convexity::default_p_grid()
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Curve index: 0 (Lorenz), 1 (median), 2 (upper quantile), 3 (quantile midrange) or all
    #[arg(long, default_value = "all")]
    pub index: Indices,
    /// Evaluate at this population proportion p in (0, 1) only
    #[arg(long)]
    pub p: Option<f64>,
    #[command(flatten)]
    pub grid: GridArg,
    /// Treat an infinite-mean Lorenz curve as 0 on (0, 1) instead of failing
    #[arg(long)]
    pub extend_heavy_tail: bool,
}

pub fn curve(a: &CurveArgs) -> anyhow::Result<Table> {
    let model = &a.dist.dist;
    let policy = policy(a.extend_heavy_tail);
    if let Some(p) = a.p {
        let mut t = Table::new(&["index", "p", "value"]);
        for &i in &a.index.0 {
            t.push(vec![
                i.to_string().into(),
                p.into(),
                curves::value(model, i, p, policy)?.into(),
            ]);
        }
        return Ok(t);
    }
    let grid = Grid::new(a.grid.grid)?;
    let mut columns = vec!["p".to_string()];
    columns.extend(index_names(&a.index.0));
    let mut t = Table::new(&columns);
    for p in grid.iter() {
        let mut row = vec![Value::from(p)];
        for &i in &a.index.0 {
            row.push(curves::value(model, i, p, policy)?.into());
        }
        t.push(row);
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct GiniArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Coefficient index 0..=3 or all
    #[arg(long, default_value = "all")]
    pub index: Indices,
    #[command(flatten)]
    pub grid: GridArg,
    /// Report G0 = 1 for infinite-mean models instead of failing
    #[arg(long)]
    pub extend_heavy_tail: bool,
}

pub fn gini(a: &GiniArgs) -> anyhow::Result<Table> {
    let model = &a.dist.dist;
    let mut t = Table::new(&["index", "G", "extended"]);
    for &i in &a.index.0 {
        let (value, extended) = match i {
            CurveIndex::Lorenz => {
                let g = coefficients::gini0(model, a.grid.grid)?;
                if g.extended && !a.extend_heavy_tail {
                    bail!(UsageError(
                        "G0 is undefined because the mean income is infinite; pass --extend-heavy-tail to report G0 = 1"
                            .into()
                    ));
                }
                (g.value, g.extended)
            }
            _ => (coefficients::coefficient(model, i, a.grid.grid)?, false),
        };
        t.push(vec![Value::Int(i.number() as i64), value.into(), extended.into()]);
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV of incomes: first column, optional header line, '#' comments
    #[arg(long, value_name = "PATH")]
    pub data: PathBuf,
    /// Coefficient index 0..=3 or all
    #[arg(long, default_value = "all")]
    pub index: Indices,
    #[command(flatten)]
    pub grid: GridArg,
}

pub fn estimate(a: &EstimateArgs) -> anyhow::Result<Table> {
    let file = File::open(&a.data).with_context(|| format!("cannot read {}", a.data.display()))?;
    let sample = Sample::from_reader(BufReader::new(file))
        .with_context(|| format!("invalid income file {}", a.data.display()))?;
    let grid = Grid::new(a.grid.grid)?;
    let mut t = Table::new(&["index", "estimate", "n"]);
    for &i in &a.index.0 {
        t.push(vec![
            Value::Int(i.number() as i64),
            gini_hat(&sample, i, &grid)?.into(),
            sample.len().into(),
        ]);
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct InfluenceArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Curve index 1, 2, 3 or all (the Lorenz curve has no bounded influence function)
    #[arg(long, default_value = "all")]
    pub index: Indices,
    /// Population proportion p of the curve ordinate L_i(p)
    #[arg(long)]
    pub p: Option<f64>,
    /// Contamination point z (income units)
    #[arg(long)]
    pub z: Option<f64>,
    /// Influence on the coefficient G_i instead of the curve ordinate
    #[arg(long)]
    pub coefficient: bool,
}

/// Incomes at the quantile levels 0.005, ..., 0.995.
fn z_grid(model: &DistributionModel) -> anyhow::Result<Vec<f64>> {
    Ok(level_grid()
        .into_iter()
        .map(|u| model.quantile(u))
        .collect::<Result<_, _>>()?)
}

pub fn influence(a: &InfluenceArgs) -> anyhow::Result<Table> {
    let model = &a.dist.dist;
    let indices = a.index.quantile()?;
    let quad = QuadratureSpec::default();
    if let Some(z) = a.z {
        influence::ContaminationPoint::new(z)?;
    }
    let mut columns = vec![];
    let table = match (a.coefficient, a.p, a.z) {
        (true, Some(_), _) => bail!(UsageError("--coefficient integrates over p; drop --p".into())),
        (true, None, z) => {
            let zs = match z {
                Some(z) => vec![z],
                None => z_grid(model)?,
            };
            columns.push("z".to_string());
            columns.extend(indices.iter().map(|i| format!("IF_G{}", i.number())));
            let mut t = Table::new(&columns);
            for z in zs {
                let mut row = vec![Value::from(z)];
                for &i in &indices {
                    row.push(influence::if_coefficient(model, i, z, &quad)?.into());
                }
                t.push(row);
            }
            t
        }
        (false, Some(p), Some(z)) => {
            let mut t = Table::new(&["index", "p", "z", "IF"]);
            for &i in &indices {
                t.push(vec![
                    i.to_string().into(),
                    p.into(),
                    z.into(),
                    influence::if_curve(model, i, p, z)?.into(),
                ]);
            }
            t
        }
        (false, Some(p), None) => {
            columns.push("z".to_string());
            columns.extend(indices.iter().map(|i| format!("IF_{i}")));
            let mut t = Table::new(&columns);
            for z in z_grid(model)? {
                let mut row = vec![Value::from(z)];
                for &i in &indices {
                    row.push(influence::if_curve(model, i, p, z)?.into());
                }
                t.push(row);
            }
            t
        }
        (false, None, Some(z)) => {
            columns.push("p".to_string());
            columns.extend(indices.iter().map(|i| format!("IF_{i}")));
            let mut t = Table::new(&columns);
            for p in level_grid() {
                let mut row = vec![Value::from(p)];
                for &i in &indices {
                    row.push(influence::if_curve(model, i, p, z)?.into());
                }
                t.push(row);
            }
            t
        }
        (false, None, None) => bail!(UsageError("give --p, --z or --coefficient".into())),
    };
    Ok(table)
}

#[derive(Debug, Args)]
pub struct SeArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Coefficient index 1, 2, 3 or all
    #[arg(long, default_value = "all")]
    pub index: Indices,
}

pub fn se(a: &SeArgs) -> anyhow::Result<Table> {
    let quad = QuadratureSpec::default();
    let mut t = Table::new(&["index", "sigma"]);
    for i in a.index.quantile()? {
        let s = influence::asymptotic_se(&a.dist.dist, i, &quad)?;
        t.push(vec![Value::Int(i.number() as i64), s.into()]);
    }
    Ok(t)
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    /// Sample sizes, comma separated [default: 25,100 for simulate; 25,100,400 for ci]
    #[arg(long, value_delimiter = ',', value_name = "N,...")]
    pub n: Vec<usize>,
    /// Monte Carlo replicates per sample size [default: 1000 for simulate; 10000 for ci]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed (required); replicate r at size n uses its own substream
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub grid: GridArg,
}

impl StudyArgs {
    fn config(
        &self,
        indices: Vec<CurveIndex>,
        default_n: &[usize],
        default_reps: usize,
    ) -> anyhow::Result<StudyConfig> {
        let n = if self.n.is_empty() {
            default_n.to_vec()
        } else {
            self.n.clone()
        };
        let config = StudyConfig::new(indices, n, self.reps.unwrap_or(default_reps), self.seed)?;
        Ok(config.with_grid(self.grid.grid)?)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Coefficient index 0..=3 or all
    #[arg(long, default_value = "all")]
    pub index: Indices,
    #[command(flatten)]
    pub study: StudyArgs,
}

pub fn study_table(result: &StudyResult) -> Table {
    let mut t = Table::new(&["index", "n", "target", "mean", "bias", "sqrt_n_se", "coverage", "width"]);
    for c in &result.cells {
        t.push(vec![
            Value::Int(c.index.number() as i64),
            c.n.into(),
            c.target.into(),
            c.mean.into(),
            c.bias.into(),
            c.root_n_se.into(),
            c.coverage.into(),
            c.width.into(),
        ]);
    }
    t
}

pub fn simulate(a: &SimulateArgs) -> anyhow::Result<Table> {
    let config = a.study.config(a.index.0.clone(), &[25, 100], 1000)?;
    Ok(study_table(&simulation::se_study(&a.dist.dist, &config)?))
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Coefficient index 1, 2, 3 or all
    #[arg(long, default_value = "all")]
    pub index: Indices,
    /// sigma_i per selected index, comma separated [default: computed asymptotic SEs]
    #[arg(long, value_delimiter = ',', value_name = "S,...")]
    pub sigma: Vec<f64>,
    #[command(flatten)]
    pub study: StudyArgs,
}

pub fn ci(a: &CiArgs) -> anyhow::Result<Table> {
    let indices = a.index.quantile()?;
    let sigma = if a.sigma.is_empty() {
        let quad = QuadratureSpec::default();
        indices
            .iter()
            .map(|&i| influence::asymptotic_se(&a.dist.dist, i, &quad))
            .collect::<Result<Vec<_>, _>>()?
    } else if a.sigma.len() == indices.len() {
        a.sigma.clone()
    } else {
        bail!(UsageError(format!(
            "--sigma needs {} values, one per index",
            indices.len()
        )));
    };
    let config = a.study.config(indices, &[25, 100, 400], 10_000)?;
    Ok(study_table(&simulation::ci_study(&a.dist.dist, &config, &sigma)?))
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Proportion p0 in (0, 0.5) lifted to the poverty line; without it the
    /// coefficient changes are tabulated for p0 = 0.005, 0.010, ..., 0.495
    #[arg(long)]
    pub p0: Option<f64>,
    #[command(flatten)]
    pub grid: GridArg,
}

pub fn transfer_effects_table(rows: &[transfer::TransferEffect]) -> Table {
    let mut t = Table::new(&["p0", "dG0", "dG1", "dG2", "dG3", "rG0", "rG1", "rG2", "rG3"]);
    for r in rows {
        let mut row = vec![Value::from(r.p0)];
        row.extend(r.absolute.iter().chain(&r.relative).map(|&v| Value::from(v)));
        t.push(row);
    }
    t
}

pub fn transfer(a: &TransferArgs) -> anyhow::Result<Table> {
    let model = &a.dist.dist;
    let Some(p0) = a.p0 else {
        let rows = transfer::transfer_effect(model, &transfer::default_p0_grid(), a.grid.grid)?;
        return Ok(transfer_effects_table(&rows));
    };
    let t = transfer::TransferredDistribution::levy(model, p0)?;
    let s = t.spec();
    let effect = transfer::transfer_effect(model, &[p0], a.grid.grid)?[0];
    let mut table = Table::new(&["quantity", "value"]);
    let mut put = |name: &str, v: f64| table.push(vec![name.into(), v.into()]);
    put("p0", p0);
    put("poverty_line_b", s.b);
    put("levy_threshold_c", s.c);
    put("levy_d", s.d);
    put("mean_income_below_b", model.cumulative_income(p0)? / p0);
    put("median_before", model.quantile(0.5)?);
    put("median_after", t.quantile(0.5)?);
    put("full_levy_level", t.levy_full());
    for (k, v) in effect.absolute.iter().enumerate() {
        put(&format!("dG{k}"), *v);
    }
    for (k, v) in effect.relative.iter().enumerate() {
        put(&format!("rG{k}"), *v);
    }
    Ok(table)
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[command(flatten)]
    pub dist: DistArg,
    /// Curve index 0..=3 or all
    #[arg(long, default_value = "all")]
    pub index: Indices,
    /// Second-difference step (shrunk near the ends of (0, 1))
    #[arg(long, default_value_t = convexity::DEFAULT_STEP)]
    pub h: f64,
    /// Emit the second differences on p = 0.005, ..., 0.995 instead of a summary
    #[arg(long)]
    pub profile: bool,
    /// Sweep the shape parameter (Pareto a or Weibull beta) over FROM:TO:STEP
    #[arg(long, value_name = "FROM:TO:STEP")]
    pub sweep: Option<String>,
}

fn parse_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| UsageError(format!("expected FROM:TO:STEP, got '{text}'")))?;
    let [from, to, step] = parts[..] else {
        bail!(UsageError(format!("expected FROM:TO:STEP, got '{text}'")));
    };
    if !(step > 0.0) || !(to >= from) {
        bail!(UsageError("the range needs FROM <= TO and STEP > 0".into()));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| from + k as f64 * step).collect())
}

/// The model with its shape parameter replaced.
pub fn with_shape(model: &DistributionModel, shape: f64) -> qlorenz::Result<DistributionModel> {
    let sigma = model.scale();
    match model.family() {
        Family::ParetoI => DistributionModel::pareto_i(shape, sigma),
        Family::ParetoII => DistributionModel::pareto_ii(shape, sigma),
        Family::Weibull => DistributionModel::weibull(shape, sigma),
        _ => Err(qlorenz::Error::UnsupportedFamily(
            "shape sweeps cover Pareto and Weibull families",
        )),
    }
}

fn report_row(t: &mut Table, kind: &str, r: &ConvexityReport) {
    t.push(vec![
        kind.into(),
        r.model.clone().into(),
        Value::Int(r.index.number() as i64),
        r.parameter.into(),
        r.min_second.into(),
        r.argmin_p.into(),
        r.at_boundary.into(),
        r.convex.into(),
    ]);
}

pub fn convexity(a: &ConvexityArgs) -> anyhow::Result<Table> {
    let model = &a.dist.dist;
    let grid = convexity::default_p_grid();
    if a.profile {
        let mut columns = vec!["p".to_string()];
        columns.extend(a.index.0.iter().map(|i| format!("{i}''")));
        let mut t = Table::new(&columns);
        for &p in &grid {
            let mut row = vec![Value::from(p)];
            for &i in &a.index.0 {
                row.push(convexity::second_difference_near(model, i, p, a.h)?.into());
            }
            t.push(row);
        }
        return Ok(t);
    }
    let mut t = Table::new(&[
        "kind",
        "model",
        "index",
        "parameter",
        "min_second",
        "argmin_p",
        "at_boundary",
        "convex",
    ]);
    let name = model.to_string();
    match &a.sweep {
        None => {
            for &i in &a.index.0 {
                report_row(
                    &mut t,
                    "curve",
                    &convexity::convexity_check(&name, model, i, &grid, a.h)?,
                );
            }
        }
        Some(range) => {
            let params = parse_range(range)?;
            with_shape(model, params[0])?;
            let family = model.family().to_string();
            for &i in &a.index.0 {
                let sweep = convexity::convexity_sweep(&family, |s| with_shape(model, s), i, &grid, &params, a.h)?;
                report_row(&mut t, "global", &sweep.global);
                if let Some(r) = &sweep.interior {
                    report_row(&mut t, "interior", r);
                }
            }
        }
    }
    Ok(t)
}
