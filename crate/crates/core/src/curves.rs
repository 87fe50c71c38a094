//! Population inequality curves.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::distributions::DistributionModel;
use crate::empirical::Grid;
use crate::error::{Error, Result};

/// Which inequality curve: the Lorenz curve (0) or one of the quantile curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CurveIndex {
    /// `L0(p) = p * mu_p / mu`.
    Lorenz = 0,
    /// `L1(p) = p * x_{p/2} / x_{1/2}`.
    Median = 1,
    /// `L2(p) = p * x_{p/2} / x_{1-p/2}`.
    Upper = 2,
    /// `L3(p) = 2p * x_{p/2} / (x_{p/2} + x_{1-p/2})`.
    Midrange = 3,
}

impl CurveIndex {
    pub const ALL: [CurveIndex; 4] = [
        CurveIndex::Lorenz,
        CurveIndex::Median,
        CurveIndex::Upper,
        CurveIndex::Midrange,
    ];
    pub const QUANTILE: [CurveIndex; 3] = [CurveIndex::Median, CurveIndex::Upper, CurveIndex::Midrange];

    pub fn from_number(i: u8) -> Result<Self> {
        match i {
            0 => Ok(CurveIndex::Lorenz),
            1 => Ok(CurveIndex::Median),
            2 => Ok(CurveIndex::Upper),
            3 => Ok(CurveIndex::Midrange),
            _ => Err(Error::InvalidParameter(format!("curve index must be 0..=3, got {i}"))),
        }
    }

    pub fn number(self) -> usize {
        self as usize
    }

    pub fn is_quantile(self) -> bool {
        self != CurveIndex::Lorenz
    }
}

impl fmt::Display for CurveIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.number())
    }
}

/// What to do with the Lorenz curve when the mean income is infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeavyTailPolicy {
    #[default]
    Error,
    /// Treat `L0(p)` as 0 on `(0, 1)`, hence `G0 = 1`.
    Extend,
}

/// Sampled points `(p, L(p))` of one curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    index: CurveIndex,
    points: Vec<(f64, f64)>,
}

impl CurveTable {
    pub fn new(index: CurveIndex, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidParameter("curve abscissae must strictly increase".into()));
        }
        Ok(Self { index, points })
    }

    pub fn index(&self) -> CurveIndex {
        self.index
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Adds the limit points `(0, 0)` and `(1, 1)` when they are missing.
    pub fn with_endpoints(mut self) -> Self {
        if self.points.first().is_none_or(|p| p.0 > 0.0) {
            self.points.insert(0, (0.0, 0.0));
        }
        if self.points.last().is_none_or(|p| p.0 < 1.0) {
            self.points.push((1.0, 1.0));
        }
        self
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "p,value")?;
        for (p, v) in &self.points {
            writeln!(out, "{p},{v}")?;
        }
        Ok(())
    }
}

/// `L_i(F; p)` for a quantile curve.
pub fn curve_value(model: &DistributionModel, index: CurveIndex, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    let low = model.quantile(0.5 * p)?;
    Ok(match index {
        CurveIndex::Lorenz => return Err(Error::InvalidParameter("use lorenz_value for the Lorenz curve".into())),
        CurveIndex::Median => p * low / model.quantile(0.5)?,
        CurveIndex::Upper => p * low / model.quantile(1.0 - 0.5 * p)?,
        CurveIndex::Midrange => {
            let high = model.quantile(1.0 - 0.5 * p)?;
            2.0 * p * low / (low + high)
        }
    })
}

/// Lorenz curve `L0(F; p) = C(F; p) / mu`.
pub fn lorenz_value(model: &DistributionModel, p: f64, policy: HeavyTailPolicy) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", p, "[0, 1]"));
    }
    match (model.mean().finite(), policy) {
        (Some(mu), _) => Ok(model.cumulative_income(p)? / mu),
        (None, HeavyTailPolicy::Extend) => Ok(if p == 1.0 { 1.0 } else { 0.0 }),
        (None, HeavyTailPolicy::Error) => Err(Error::HeavyTail("the Lorenz curve")),
    }
}

/// Any of the four curves at `p`.
pub fn value(model: &DistributionModel, index: CurveIndex, p: f64, policy: HeavyTailPolicy) -> Result<f64> {
    match index {
        CurveIndex::Lorenz => lorenz_value(model, p, policy),
        _ => curve_value(model, index, p),
    }
}

/// Evaluates a curve on the midpoint grid.
pub fn curve_table(
    model: &DistributionModel,
    index: CurveIndex,
    grid: &Grid,
    policy: HeavyTailPolicy,
) -> Result<CurveTable> {
    let points = grid
        .iter()
        .map(|p| value(model, index, p, policy).map(|v| (p, v)))
        .collect::<Result<Vec<_>>>()?;
    CurveTable::new(index, points)
}
