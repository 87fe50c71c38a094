//! Median-preserving income transfers.
//!
//! The levy transfer raises every income below the poverty line `b = x_{p0}`
//! to `b`, financed by taking `d` from every income above `c = x_{1-p0}`
//! (incomes in `[c, c + d)` are lowered to `c`). The transferred quantile
//! function is
//!
//! ```text
//! Q_Y(p) = b            0 <= p < p0
//!          Q(p)         p0 <= p < 1 - p0
//!          c            1 - p0 <= p < F(c + d)
//!          Q(p) - d     F(c + d) <= p
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients;
use crate::curves::{CurveIndex, HeavyTailPolicy};
use crate::distributions::DistributionModel;
use crate::empirical::Grid;
use crate::error::{Error, Result};

/// Anything with a quantile function and a CDF.
pub trait IncomeDistribution {
    fn quantile(&self, p: f64) -> Result<f64>;
    fn cdf(&self, x: f64) -> f64;
}

impl IncomeDistribution for DistributionModel {
    fn quantile(&self, p: f64) -> Result<f64> {
        DistributionModel::quantile(self, p)
    }

    fn cdf(&self, x: f64) -> f64 {
        DistributionModel::cdf(self, x)
    }
}

/// Poverty line `b`, levy threshold `c` and levy `d`, all in income units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferSpec {
    pub p0: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// The levy that lifts the poorest `p0` to the poverty line `b = x_{p0}`:
/// `d = b - C(F; p0) / p0`, charged above `c = x_{1-p0}`.
pub fn levy_amount(model: &DistributionModel, p0: f64) -> Result<TransferSpec> {
    if !(p0 > 0.0 && p0 < 0.5) {
        return Err(Error::domain("p0", p0, "(0, 0.5)"));
    }
    if model.mean().is_infinite() {
        return Err(Error::HeavyTail("the levy amount"));
    }
    let b = model.quantile(p0)?;
    let c = model.quantile(1.0 - p0)?;
    let d = b - model.cumulative_income(p0)? / p0;
    Ok(TransferSpec { p0, b, c, d })
}

/// Income distribution after a levy transfer.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferredDistribution {
    base: DistributionModel,
    spec: TransferSpec,
    top: f64,
}

impl TransferredDistribution {
    pub fn new(base: DistributionModel, spec: TransferSpec) -> Result<Self> {
        let median = base.quantile(0.5)?;
        let ordered = spec.b > 0.0 && spec.b < median && median < spec.c;
        if !ordered || !(spec.d > 0.0) || !spec.d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transfer needs 0 < b < median < c and d > 0, got b={}, median={median}, c={}, d={}",
                spec.b, spec.c, spec.d
            )));
        }
        let top = base.cdf(spec.c + spec.d);
        Ok(Self { base, spec, top })
    }

    /// The levy transfer of [`levy_amount`].
    pub fn levy(base: &DistributionModel, p0: f64) -> Result<Self> {
        Self::new(*base, levy_amount(base, p0)?)
    }

    pub fn base(&self) -> &DistributionModel {
        &self.base
    }

    pub fn spec(&self) -> TransferSpec {
        self.spec
    }

    /// `F(b)`: the probability mass lifted to the poverty line.
    pub fn lower_mass(&self) -> f64 {
        self.base.cdf(self.spec.b)
    }

    /// `F(c)`.
    pub fn levy_start(&self) -> f64 {
        self.base.cdf(self.spec.c)
    }

    /// `F(c + d)`: incomes above this level pay the full levy.
    pub fn levy_full(&self) -> f64 {
        self.top
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("p", p, "[0, 1]"));
        }
        let TransferSpec { b, c, d, .. } = self.spec;
        Ok(if p < self.lower_mass() {
            b
        } else if p < self.levy_start() {
            self.base.quantile(p)?
        } else if p < self.top {
            c
        } else {
            self.base.quantile(p)? - d
        })
    }

    pub fn cdf(&self, y: f64) -> f64 {
        let TransferSpec { b, c, d, .. } = self.spec;
        if y < b {
            0.0
        } else if y < c {
            self.base.cdf(y)
        } else {
            self.base.cdf(y + d)
        }
    }

    /// `C(F_Y; p) = int_0^p Q_Y(u) du`, assembled from the base `C(F; .)`.
    pub fn cumulative_income(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("p", p, "[0, 1]"));
        }
        let TransferSpec { b, c, d, .. } = self.spec;
        let (p_b, p_c, p_t) = (self.lower_mass(), self.levy_start(), self.top);
        let base = |u: f64| self.base.cumulative_income(u);
        if p <= p_b {
            return Ok(b * p);
        }
        let at_b = b * p_b;
        if p <= p_c {
            return Ok(at_b + base(p)? - base(p_b)?);
        }
        let at_c = at_b + base(p_c)? - base(p_b)?;
        if p <= p_t {
            return Ok(at_c + c * (p - p_c));
        }
        let at_t = at_c + c * (p_t - p_c);
        Ok(at_t + base(p)? - base(p_t)? - d * (p - p_t))
    }

    pub fn mean(&self) -> Result<f64> {
        self.cumulative_income(1.0)
    }

    pub fn lorenz_value(&self, p: f64) -> Result<f64> {
        Ok(self.cumulative_income(p)? / self.mean()?)
    }
}

impl IncomeDistribution for TransferredDistribution {
    fn quantile(&self, p: f64) -> Result<f64> {
        TransferredDistribution::quantile(self, p)
    }

    fn cdf(&self, x: f64) -> f64 {
        TransferredDistribution::cdf(self, x)
    }
}

/// A quantile curve of any income distribution.
pub fn quantile_curve<D: IncomeDistribution + ?Sized>(dist: &D, index: CurveIndex, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    let low = dist.quantile(0.5 * p)?;
    let denominator = match index {
        CurveIndex::Lorenz => {
            return Err(Error::InvalidParameter(
                "the Lorenz curve is not a quantile curve".into(),
            ))
        }
        CurveIndex::Median => dist.quantile(0.5)?,
        CurveIndex::Upper => dist.quantile(1.0 - 0.5 * p)?,
        CurveIndex::Midrange => 0.5 * (low + dist.quantile(1.0 - 0.5 * p)?),
    };
    Ok(p * low / denominator)
}

/// `G_i(F_Y)` on the midpoint grid.
pub fn transferred_coefficient(t: &TransferredDistribution, index: CurveIndex, grid: &Grid) -> Result<f64> {
    match index {
        CurveIndex::Lorenz => {
            let mu = t.mean()?;
            grid.coefficient_from(|p| Ok(t.cumulative_income(p)? / mu))
        }
        _ => grid.coefficient_from(|p| quantile_curve(t, index, p)),
    }
}

/// Coefficient changes caused by the levy at one `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferEffect {
    pub p0: f64,
    /// `G_i(F) - G_i(F_Y)`.
    pub absolute: [f64; 4],
    /// `(G_i(F) - G_i(F_Y)) / G_i(F)`.
    pub relative: [f64; 4],
}

/// The default `p0` grid: 0.005, 0.010, ..., 0.495.
pub fn default_p0_grid() -> Vec<f64> {
    (1..=99).map(|k| k as f64 * 0.005).collect()
}

pub fn transfer_effect(model: &DistributionModel, p0_grid: &[f64], grid_points: usize) -> Result<Vec<TransferEffect>> {
    let grid = Grid::new(grid_points)?;
    let before: Vec<f64> = CurveIndex::ALL
        .iter()
        .map(|&i| match i {
            CurveIndex::Lorenz => {
                grid.coefficient_from(|p| crate::curves::lorenz_value(model, p, HeavyTailPolicy::Error))
            }
            _ => coefficients::coefficient(model, i, grid_points),
        })
        .collect::<Result<_>>()?;
    p0_grid
        .par_iter()
        .map(|&p0| {
            let t = TransferredDistribution::levy(model, p0)?;
            let mut absolute = [0.0; 4];
            let mut relative = [0.0; 4];
            for (k, &index) in CurveIndex::ALL.iter().enumerate() {
                absolute[k] = before[k] - transferred_coefficient(&t, index, &grid)?;
                relative[k] = absolute[k] / before[k];
            }
            Ok(TransferEffect { p0, absolute, relative })
        })
        .collect()
}

/// Writes `p0,dG0,dG1,dG2,dG3,rG0,rG1,rG2,rG3`.
pub fn write_effects_csv<W: std::io::Write>(rows: &[TransferEffect], mut out: W) -> std::io::Result<()> {
    writeln!(out, "p0,dG0,dG1,dG2,dG3,rG0,rG1,rG2,rG3")?;
    for r in rows {
        let cells: Vec<String> = r
            .absolute
            .iter()
            .chain(&r.relative)
            .map(|v| format!("{v:.8}"))
            .collect();
        writeln!(out, "{},{}", r.p0, cells.join(","))?;
    }
    Ok(())
}

/// Outcome of checking the median-preserving transfer conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MedianPreservingReport {
    pub median_before: f64,
    pub median_after: f64,
    pub median_preserved: bool,
    /// `F_Y(y) <= F(y)` for every grid `y` below the median.
    pub lower_raised: bool,
    /// `F_Y(y) >= F(y)` for every grid `y` above the median.
    pub upper_lowered: bool,
}

impl MedianPreservingReport {
    pub fn holds(&self) -> bool {
        self.median_preserved && self.lower_raised && self.upper_lowered
    }
}

/// Checks the median-preserving conditions on income levels `ys`.
pub fn verify_median_preserving<A, B>(before: &A, after: &B, ys: &[f64]) -> Result<MedianPreservingReport>
where
    A: IncomeDistribution + ?Sized,
    B: IncomeDistribution + ?Sized,
{
    const TOL: f64 = 1e-12;
    let m = before.quantile(0.5)?;
    let m_y = after.quantile(0.5)?;
    let mut lower_raised = true;
    let mut upper_lowered = true;
    for &y in ys {
        let (f, f_y) = (before.cdf(y), after.cdf(y));
        if y < m && f_y > f + TOL {
            lower_raised = false;
        }
        if y > m && f_y < f - TOL {
            upper_lowered = false;
        }
    }
    Ok(MedianPreservingReport {
        median_before: m,
        median_after: m_y,
        median_preserved: (m - m_y).abs() <= 1e-9 * m.abs().max(1.0),
        lower_raised,
        upper_lowered,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadratureSpec};

    fn pareto2() -> DistributionModel {
        DistributionModel::pareto_ii(2.0, 100_000.0).unwrap()
    }

    #[test]
    fn levy_example() {
        let s = levy_amount(&pareto2(), 0.2).unwrap();
        assert!((s.b - 11_803.40).abs() < 0.01, "{s:?}");
        // d = (mu / p) * ((a - p) * x_p - p) with x_p the unit-scale quantile
        let x = 0.8f64.powf(-0.5) - 1.0;
        let d = 100_000.0 / 0.2 * ((2.0 - 0.2) * x - 0.2);
        assert!((s.d - d).abs() < 1e-8, "{s:?}");
        assert!((s.c - 100_000.0 * (5f64.sqrt() - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn heavy_tail_and_domain_errors() {
        let p1 = DistributionModel::pareto_ii(1.0, 1.0).unwrap();
        assert_eq!(levy_amount(&p1, 0.2), Err(Error::HeavyTail("the levy amount")));
        assert!(levy_amount(&pareto2(), 0.5).is_err());
        assert!(levy_amount(&pareto2(), 0.0).is_err());
    }

    #[test]
    fn quantile_branches() {
        let t = TransferredDistribution::levy(&pareto2(), 0.2).unwrap();
        let s = t.spec();
        assert_eq!(t.quantile(0.1).unwrap(), s.b);
        assert!((t.quantile(0.5).unwrap() - 41_421.36).abs() < 0.01);
        assert!(t.levy_full() <= 0.95);
        assert_eq!(t.quantile(0.95).unwrap(), pareto2().quantile(0.95).unwrap() - s.d);
        assert_eq!(t.quantile(0.81).unwrap(), s.c);
        let mut last = 0.0;
        for k in 0..=1000 {
            let q = t.quantile(k as f64 / 1000.0 * 0.999).unwrap();
            assert!(q >= last);
            last = q;
        }
    }

    #[test]
    fn cumulative_income_matches_quadrature() {
        let m = DistributionModel::weibull(1.5, 2.0).unwrap();
        let t = TransferredDistribution::levy(&m, 0.15).unwrap();
        let spec = QuadratureSpec::default();
        let breaks = [t.lower_mass(), t.levy_start(), t.levy_full()];
        for p in [0.1, 0.3, 0.86, 0.9, 0.99] {
            let direct = integrate(|u| t.quantile(u).unwrap(), 0.0, p, &breaks, &spec)
                .unwrap()
                .value;
            let got = t.cumulative_income(p).unwrap();
            assert!((got - direct).abs() < 1e-7, "p={p}: {got} vs {direct}");
        }
    }

    #[test]
    fn transfer_reduces_every_coefficient() {
        let rows = transfer_effect(&pareto2(), &[0.2], 1000).unwrap();
        assert!(rows[0].absolute.iter().all(|&d| d > 0.0), "{rows:?}");
    }

    #[test]
    fn median_preserving_checks() {
        let t = TransferredDistribution::levy(&pareto2(), 0.2).unwrap();
        let ys: Vec<f64> = (1..400).map(|k| k as f64 * 1000.0).collect();
        assert!(verify_median_preserving(&pareto2(), &t, &ys).unwrap().holds());
        assert!(verify_median_preserving(&pareto2(), &pareto2(), &ys).unwrap().holds());
        let moved = pareto2().rescaled(1.1).unwrap();
        assert!(!verify_median_preserving(&pareto2(), &moved, &ys).unwrap().holds());
    }
}
