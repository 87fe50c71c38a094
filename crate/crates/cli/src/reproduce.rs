//! Data sets behind the reference tables and figures.

use anyhow::bail;
use clap::{Args, ValueEnum};
use qlorenz::catalogue::{self, Entry};
use qlorenz::coefficients::{self, CoefficientReport};
use qlorenz::convexity;
use qlorenz::curves::{self, CurveIndex, HeavyTailPolicy};
use qlorenz::distributions::DistributionModel;
use qlorenz::influence::{self, AsymptoticSe};
use qlorenz::quadrature::QuadratureSpec;
use qlorenz::rng::mix_seed;
use qlorenz::simulation::{self, StudyConfig};
use qlorenz::transfer;

use crate::commands::transfer_effects_table;
use crate::output::{Table, Value};
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Coefficients of the 14 reference models, their ranks and Spearman correlations
    Table1,
    /// sqrt(n) SE at n = 25, 100 (Monte Carlo) and the asymptotic sigma_i
    Table2,
    /// Coverage and width of 95% intervals at n = 25, 100, 400
    Table3,
    /// L0..L3 for chi-square(3), lognormal, Pareto II(2), Weibull(0.5)
    Figure1,
    /// L0..L3 for Pareto II with a = 0.5, 1, 1.5, 2 (L0 = 0 when the mean is infinite)
    Figure2,
    /// Coefficient changes under the levy transfer, Pareto II a = 1.1 and 2
    Figure3,
    /// sqrt(n) SE against ln(n), n = 20..1600
    Figure4,
    /// sqrt(n) SE for Pareto II(a), a = 0.25, 0.35, ..., 2.45
    Figure5,
    /// IF(z; L_i(p)) against z for Pareto II(1)
    Figure6,
    /// IF(z; L_i(p)) against p for Pareto II(1)
    Figure7,
    /// IF(z; G_i) against z for Pareto II(a)
    Figure8,
    /// Beta(0.1, 0.05) density and curves
    Figure9,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Which data set to produce
    #[arg(long, value_enum)]
    pub which: Which,
    /// Master seed; required for table2, table3, figure4 and figure5
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the replicate count (defaults: table2 4000, table3 10000, figures 1000)
    #[arg(long)]
    pub reps: Option<usize>,
    /// Number of midpoint-grid points J
    #[arg(long, default_value_t = qlorenz::DEFAULT_GRID)]
    pub grid: usize,
}

/// Asymptotic SEs printed for the interval study: lognormal, then Pareto II(2).
pub const PRINTED_SIGMA: [(&str, [f64; 3]); 2] = [
    ("Lognormal", [0.417, 0.351, 0.322]),
    ("Pareto(2)", [0.485, 0.381, 0.379]),
];

fn require_seed(a: &TablesArgs) -> anyhow::Result<u64> {
    match a.seed {
        Some(s) => Ok(s),
        None => bail!(UsageError(
            format!("--which {:?} is stochastic and needs --seed", a.which).to_lowercase()
        )),
    }
}

fn entry(name: &str) -> Entry {
    catalogue::find(name).expect("catalogue entry exists")
}

fn linear(from: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| from + k as f64 * step).collect()
}

pub fn tables(a: &TablesArgs) -> anyhow::Result<Table> {
    match a.which {
        Which::Table1 => table1(a.grid),
        Which::Table2 => table2(require_seed(a)?, a.reps.unwrap_or(4000), a.grid),
        Which::Table3 => table3(require_seed(a)?, a.reps.unwrap_or(10_000), a.grid),
        Which::Figure1 => {
            let names = ["ChiSq(3)", "Lognormal", "Pareto(2)", "Weibull(0.5)"];
            curves_figure(&names.map(entry))
        }
        Which::Figure2 => {
            let models: Vec<Entry> = [0.5, 1.0, 1.5, 2.0]
                .iter()
                .map(|&a| Entry {
                    name: format!("Pareto({a})"),
                    model: DistributionModel::pareto_ii(a, 1.0).expect("valid shape"),
                })
                .collect();
            curves_figure(&models)
        }
        Which::Figure3 => figure3(a.grid),
        Which::Figure4 => figure4(require_seed(a)?, a.reps.unwrap_or(1000), a.grid),
        Which::Figure5 => figure5(require_seed(a)?, a.reps.unwrap_or(1000), a.grid),
        Which::Figure6 => figure6(),
        Which::Figure7 => figure7(),
        Which::Figure8 => figure8(),
        Which::Figure9 => figure9(),
    }
}

pub fn table1(grid: usize) -> anyhow::Result<Table> {
    let reports = catalogue::reference_models()
        .iter()
        .map(|e| CoefficientReport::compute(&e.name, &e.model, grid))
        .collect::<Result<Vec<_>, _>>()?;
    let ranks = coefficients::rank_table(&reports, Some(3))?;
    let mut t = Table::new(&["model", "G0", "R0", "G1", "R1", "G2", "R2", "G3", "R3", "G0_extended"]);
    for (r, rk) in reports.iter().zip(&ranks.ranks) {
        t.push(vec![
            r.model.clone().into(),
            r.g0.value.into(),
            rk[0].into(),
            r.g[0].into(),
            rk[1].into(),
            r.g[1].into(),
            rk[2].into(),
            r.g[2].into(),
            rk[3].into(),
            r.g0.extended.into(),
        ]);
    }
    let s = ranks.spearman;
    t.push(vec![
        "spearman_vs_G0".into(),
        Value::Missing,
        Value::Missing,
        s[0].into(),
        Value::Missing,
        s[1].into(),
        Value::Missing,
        s[2].into(),
        Value::Missing,
        Value::Missing,
    ]);
    Ok(t)
}

pub fn table2(seed: u64, reps: usize, grid: usize) -> anyhow::Result<Table> {
    let quad = QuadratureSpec::default();
    let mut t = Table::new(&[
        "model", "G1_25", "G1_100", "G1_inf", "G2_25", "G2_100", "G2_inf", "G3_25", "G3_100", "G3_inf",
    ]);
    for (k, e) in catalogue::reference_models().iter().enumerate() {
        let config = StudyConfig::new(
            CurveIndex::QUANTILE.to_vec(),
            vec![25, 100],
            reps,
            mix_seed(seed, k as u64),
        )?
        .with_grid(grid)?;
        let study = simulation::se_study(&e.model, &config)?;
        let sigma = AsymptoticSe::compute(&e.name, &e.model, &quad)?;
        let mut row = vec![Value::from(e.name.as_str())];
        for i in CurveIndex::QUANTILE {
            for n in [25, 100] {
                row.push(study.cell(i, n).expect("cell exists").root_n_se.into());
            }
            row.push(sigma.get(i)?.into());
        }
        t.push(row);
    }
    Ok(t)
}

pub fn table3(seed: u64, reps: usize, grid: usize) -> anyhow::Result<Table> {
    let mut t = Table::new(&["model", "index", "n", "sigma", "coverage", "width"]);
    for (k, (name, sigma)) in PRINTED_SIGMA.iter().enumerate() {
        let model = entry(name).model;
        let config = StudyConfig::new(
            CurveIndex::QUANTILE.to_vec(),
            vec![25, 100, 400],
            reps,
            mix_seed(seed, k as u64),
        )?
        .with_grid(grid)?;
        let study = simulation::ci_study(&model, &config, sigma)?;
        for c in &study.cells {
            t.push(vec![
                (*name).into(),
                Value::Int(c.index.number() as i64),
                c.n.into(),
                sigma[c.index.number() - 1].into(),
                c.coverage.into(),
                c.width.into(),
            ]);
        }
    }
    Ok(t)
}

fn curves_figure(models: &[Entry]) -> anyhow::Result<Table> {
    let mut t = Table::new(&["model", "p", "L0", "L1", "L2", "L3"]);
    for e in models {
        for p in convexity::default_p_grid() {
            let mut row = vec![Value::from(e.name.as_str()), p.into()];
            for i in CurveIndex::ALL {
                row.push(curves::value(&e.model, i, p, HeavyTailPolicy::Extend)?.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn figure3(grid: usize) -> anyhow::Result<Table> {
    let mut out: Option<Table> = None;
    for a in [1.1, 2.0] {
        let model = DistributionModel::pareto_ii(a, 1.0)?;
        let effects = transfer_effects_table(&transfer::transfer_effect(&model, &transfer::default_p0_grid(), grid)?);
        let mut columns = vec!["a".to_string()];
        columns.extend(effects.columns.iter().cloned());
        let mut t = Table::new(&columns);
        for row in effects.rows {
            let mut r = vec![Value::from(a)];
            r.extend(row);
            t.push(r);
        }
        match &mut out {
            Some(o) => o.extend(t),
            None => out = Some(t),
        }
    }
    Ok(out.expect("two models"))
}

fn figure4(seed: u64, reps: usize, grid: usize) -> anyhow::Result<Table> {
    let names = ["Uniform", "Lognormal", "Pareto(2)", "Weibull(1)"];
    let ns = vec![20, 25, 50, 100, 200, 400, 800, 1600];
    let mut t = Table::new(&["model", "index", "n", "ln_n", "sqrt_n_se"]);
    for (k, name) in names.iter().enumerate() {
        let model = entry(name).model;
        let config =
            StudyConfig::new(CurveIndex::ALL.to_vec(), ns.clone(), reps, mix_seed(seed, k as u64))?.with_grid(grid)?;
        for c in simulation::se_study(&model, &config)?.cells {
            t.push(vec![
                (*name).into(),
                Value::Int(c.index.number() as i64),
                c.n.into(),
                (c.n as f64).ln().into(),
                c.root_n_se.into(),
            ]);
        }
    }
    Ok(t)
}

fn figure5(seed: u64, reps: usize, grid: usize) -> anyhow::Result<Table> {
    let mut t = Table::new(&["a", "index", "n", "sqrt_n_se"]);
    for (k, a) in linear(0.25, 0.1, 23).into_iter().enumerate() {
        let model = DistributionModel::pareto_ii(a, 1.0)?;
        let config =
            StudyConfig::new(CurveIndex::ALL.to_vec(), vec![100], reps, mix_seed(seed, k as u64))?.with_grid(grid)?;
        for c in simulation::se_study(&model, &config)?.cells {
            t.push(vec![
                a.into(),
                Value::Int(c.index.number() as i64),
                c.n.into(),
                c.root_n_se.into(),
            ]);
        }
    }
    Ok(t)
}

fn pareto_one() -> DistributionModel {
    DistributionModel::pareto_ii(1.0, 1.0).expect("valid shape")
}

fn figure6() -> anyhow::Result<Table> {
    let model = pareto_one();
    let mut t = Table::new(&["p", "z", "IF_L1", "IF_L2", "IF_L3"]);
    for p in [0.1, 0.3, 0.6, 0.9] {
        for z in linear(0.02, 0.02, 250) {
            let mut row = vec![Value::from(p), z.into()];
            for i in CurveIndex::QUANTILE {
                row.push(influence::if_curve(&model, i, p, z)?.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn figure7() -> anyhow::Result<Table> {
    let model = pareto_one();
    let mut t = Table::new(&["z", "p", "IF_L1", "IF_L2", "IF_L3"]);
    for z in [0.5, 1.0, 1.1, 1.5] {
        for p in convexity::default_p_grid() {
            let mut row = vec![Value::from(z), p.into()];
            for i in CurveIndex::QUANTILE {
                row.push(influence::if_curve(&model, i, p, z)?.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn figure8() -> anyhow::Result<Table> {
    let quad = QuadratureSpec::default();
    let mut t = Table::new(&["a", "z", "IF_G1", "IF_G2", "IF_G3"]);
    for a in [0.5, 1.0, 2.0] {
        let model = DistributionModel::pareto_ii(a, 1.0)?;
        for z in linear(0.02, 0.02, 250) {
            let mut row = vec![Value::from(a), z.into()];
            for i in CurveIndex::QUANTILE {
                row.push(influence::if_coefficient(&model, i, z, &quad)?.into());
            }
            t.push(row);
        }
    }
    Ok(t)
}

fn figure9() -> anyhow::Result<Table> {
    let model = DistributionModel::beta(0.1, 0.05)?;
    let mut t = Table::new(&["t", "density", "L0", "L1", "L2", "L3"]);
    for x in convexity::default_p_grid() {
        let mut row = vec![Value::from(x), model.density(x).into()];
        for i in CurveIndex::ALL {
            row.push(curves::value(&model, i, x, HeavyTailPolicy::Error)?.into());
        }
        t.push(row);
    }
    Ok(t)
}
