//! Population coefficients of inequality and their rankings.
//!
//! `G_i(J) = (2/J) * sum_j (p_j - L_i(p_j))` on the midpoint grid. Gini's `G0`
//! uses the same rule on the Lorenz curve; with an infinite mean it is
//! extended to 1 and flagged.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{self, CurveIndex, HeavyTailPolicy};
use crate::distributions::DistributionModel;
use crate::empirical::Grid;
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// `G_i(J)` for a quantile curve.
pub fn coefficient(model: &DistributionModel, index: CurveIndex, grid_points: usize) -> Result<f64> {
    if !index.is_quantile() {
        return Err(Error::InvalidParameter("use gini0 for the Lorenz coefficient".into()));
    }
    Grid::new(grid_points)?.coefficient_from(|p| curves::curve_value(model, index, p))
}

/// Gini's coefficient, possibly extended to 1 for an infinite mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gini0 {
    pub value: f64,
    pub extended: bool,
}

pub fn gini0(model: &DistributionModel, grid_points: usize) -> Result<Gini0> {
    let grid = Grid::new(grid_points)?;
    if model.mean().is_infinite() {
        return Ok(Gini0 {
            value: 1.0,
            extended: true,
        });
    }
    let value = grid.coefficient_from(|p| curves::lorenz_value(model, p, HeavyTailPolicy::Error))?;
    Ok(Gini0 { value, extended: false })
}

/// Any coefficient; `G0` follows the extension convention.
pub fn coefficient_any(model: &DistributionModel, index: CurveIndex, grid_points: usize) -> Result<f64> {
    match index {
        CurveIndex::Lorenz => gini0(model, grid_points).map(|g| g.value),
        _ => coefficient(model, index, grid_points),
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub reps: usize,
}

const ORACLE_CHUNK: usize = 50_000;

/// Expectation form of the quantile coefficients.
///
/// With `V` the larger of two incomes drawn below the median (so
/// `F(V) = sqrt(U) / 2` for uniform `U`) and `W = Q(1 - F(V))`:
/// `G1 = E[(m - V)/m]`, `G2 = E[(W - V)/W]`, `G3 = E[(W - V)/(V + W)]`.
///
/// Returns the three estimates from one common set of draws. Chunks of draws
/// use substreams of a seed forked from `rng`, so the result does not depend on
/// the number of worker threads.
pub fn prop1_oracle_all(model: &DistributionModel, reps: usize, rng: &mut RandomStream) -> Result<[McEstimate; 3]> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be >= 1".into()));
    }
    let seed = rng.fork_seed();
    let median = model.quantile(0.5)?;
    let chunks = reps.div_ceil(ORACLE_CHUNK);
    let partial: Vec<[(f64, f64); 3]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut stream = RandomStream::substream(seed, c as u64);
            let count = ORACLE_CHUNK.min(reps - c * ORACLE_CHUNK);
            let mut acc = [(0.0, 0.0); 3];
            for _ in 0..count {
                let level = 0.5 * stream.uniform().sqrt();
                let v = model.quantile(level)?;
                let w = model.quantile(1.0 - level)?;
                let terms = [(median - v) / median, (w - v) / w, (w - v) / (v + w)];
                for (a, t) in acc.iter_mut().zip(terms) {
                    a.0 += t;
                    a.1 += t * t;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let n = reps as f64;
    let mut out = [McEstimate {
        mean: 0.0,
        std_error: 0.0,
        reps,
    }; 3];
    for (i, est) in out.iter_mut().enumerate() {
        let sum: f64 = partial.iter().map(|c| c[i].0).sum();
        let sum_sq: f64 = partial.iter().map(|c| c[i].1).sum();
        let mean = sum / n;
        let var = if reps > 1 {
            ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        est.mean = mean;
        est.std_error = (var / n).sqrt();
    }
    Ok(out)
}

pub fn prop1_oracle(
    model: &DistributionModel,
    index: CurveIndex,
    reps: usize,
    rng: &mut RandomStream,
) -> Result<McEstimate> {
    if !index.is_quantile() {
        return Err(Error::InvalidParameter(
            "the expectation oracle covers indices 1..=3".into(),
        ));
    }
    Ok(prop1_oracle_all(model, reps, rng)?[index.number() - 1])
}

/// All four coefficients of one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientReport {
    pub model: String,
    pub g0: Gini0,
    pub g: [f64; 3],
    pub grid: usize,
}

impl CoefficientReport {
    pub fn compute(name: &str, model: &DistributionModel, grid_points: usize) -> Result<Self> {
        Ok(Self {
            model: name.to_string(),
            g0: gini0(model, grid_points)?,
            g: [
                coefficient(model, CurveIndex::Median, grid_points)?,
                coefficient(model, CurveIndex::Upper, grid_points)?,
                coefficient(model, CurveIndex::Midrange, grid_points)?,
            ],
            grid: grid_points,
        })
    }

    pub fn value(&self, index: CurveIndex) -> f64 {
        match index {
            CurveIndex::Lorenz => self.g0.value,
            _ => self.g[index.number() - 1],
        }
    }
}

/// Ranks of every model under each coefficient and the Spearman correlation
/// of the `G0` ranking with each quantile ranking.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankTable {
    pub ranks: Vec<[f64; 4]>,
    pub spearman: [f64; 3],
}

/// Ascending ranks starting at 1; tied values share their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of the average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::InvalidParameter(
            "spearman needs two equal-length lists of >= 2 values".into(),
        ));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::InvalidParameter(
            "spearman is undefined for a constant list".into(),
        ));
    }
    Ok(sab / (saa * sbb).sqrt())
}

/// Rounds to `decimals` places, as a printed table does before ranking.
pub fn round_to(value: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (value * f).round() / f
}

/// Ranks models under each coefficient. With `decimals`, values are first
/// rounded to that many places so that equal printed values tie.
pub fn rank_table(reports: &[CoefficientReport], decimals: Option<i32>) -> Result<RankTable> {
    if reports.len() < 2 {
        return Err(Error::InvalidParameter("ranking needs at least two models".into()));
    }
    let column = |index: CurveIndex| -> Vec<f64> {
        reports
            .iter()
            .map(|r| {
                let v = r.value(index);
                decimals.map_or(v, |d| round_to(v, d))
            })
            .collect()
    };
    let columns: Vec<Vec<f64>> = CurveIndex::ALL.iter().map(|&i| column(i)).collect();
    let rank_columns: Vec<Vec<f64>> = columns.iter().map(|c| average_ranks(c)).collect();
    let ranks = (0..reports.len())
        .map(|m| {
            [
                rank_columns[0][m],
                rank_columns[1][m],
                rank_columns[2][m],
                rank_columns[3][m],
            ]
        })
        .collect();
    let spearman = [
        spearman(&columns[0], &columns[1])?,
        spearman(&columns[0], &columns[2])?,
        spearman(&columns[0], &columns[3])?,
    ];
    Ok(RankTable { ranks, spearman })
}

/// Writes `model,G0,R0,G1,R1,G2,R2,G3,R3,G0_extended`.
pub fn write_table_csv<W: Write>(reports: &[CoefficientReport], ranks: &RankTable, mut out: W) -> std::io::Result<()> {
    writeln!(out, "model,G0,R0,G1,R1,G2,R2,G3,R3,G0_extended")?;
    for (r, rk) in reports.iter().zip(&ranks.ranks) {
        writeln!(
            out,
            "{},{:.6},{},{:.6},{},{:.6},{},{:.6},{},{}",
            r.model, r.g0.value, rk[0], r.g[0], rk[1], r.g[1], rk[2], r.g[2], rk[3], r.g0.extended
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_coefficients() {
        let u = DistributionModel::uniform(1.0).unwrap();
        assert!((coefficient(&u, CurveIndex::Median, 1000).unwrap() - 0.333).abs() < 0.002);
        // G2 = 1 - 2 * int p^2/(2-p) dp = 1 - 2 * (4 ln 2 - 5/2)
        let exact = 1.0 - 2.0 * (4.0 * 2f64.ln() - 2.5);
        let g2 = coefficient(&u, CurveIndex::Upper, 1000).unwrap();
        assert!((g2 - exact).abs() < 1e-5, "{g2} vs {exact}");
        assert!((g2 - 0.455).abs() < 0.002);
        let g0 = gini0(&u, 1000).unwrap();
        assert!(!g0.extended);
        assert!((g0.value - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn weibull_examples() {
        let w4 = DistributionModel::weibull(4.0, 1.0).unwrap();
        assert!((coefficient(&w4, CurveIndex::Midrange, 1000).unwrap() - 0.134).abs() < 0.002);
        let w1 = DistributionModel::weibull(1.0, 1.0).unwrap();
        assert!((gini0(&w1, 1000).unwrap().value - 0.5).abs() < 0.002);
    }

    #[test]
    fn heavy_tail_gini_is_extended() {
        let p = DistributionModel::pareto_i(1.0, 1.0).unwrap();
        assert_eq!(
            gini0(&p, 1000).unwrap(),
            Gini0 {
                value: 1.0,
                extended: true
            }
        );
        assert!(coefficient(&p, CurveIndex::Lorenz, 1000).is_err());
    }

    #[test]
    fn oracle_matches_uniform_closed_form() {
        let u = DistributionModel::uniform(1.0).unwrap();
        let est = prop1_oracle(&u, CurveIndex::Median, 200_000, &mut RandomStream::new(3)).unwrap();
        assert!((est.mean - 1.0 / 3.0).abs() < 4.0 * est.std_error, "{est:?}");
        assert!(est.std_error < 1e-3);
    }

    #[test]
    fn oracle_orders_upper_above_midrange() {
        let m = DistributionModel::chi_square(3.0).unwrap();
        let all = prop1_oracle_all(&m, 20_000, &mut RandomStream::new(8)).unwrap();
        assert!(all[2].mean <= all[1].mean);
    }

    #[test]
    fn oracle_is_deterministic() {
        let m = DistributionModel::lognormal(1.0).unwrap();
        let a = prop1_oracle_all(&m, 120_001, &mut RandomStream::new(4)).unwrap();
        let b = prop1_oracle_all(&m, 120_001, &mut RandomStream::new(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ranks_and_spearman() {
        assert_eq!(average_ranks(&[0.3, 0.1, 0.3, 0.2]), vec![3.5, 1.0, 3.5, 2.0]);
        let a = [0.1, 0.5, 0.3, 0.9];
        assert_relative_eq!(spearman(&a, &a).unwrap(), 1.0);
        let rev: Vec<f64> = a.iter().map(|x| -x).collect();
        assert_relative_eq!(spearman(&a, &rev).unwrap(), -1.0);
        assert!(spearman(&a, &[1.0; 4]).is_err());
        assert_eq!(round_to(0.33349, 3), 0.333);
    }
}
