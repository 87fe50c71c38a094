//! Convexity checks for the inequality curves: central second differences,
//! grid minimization with golden-section refinement, and closed-form `L1''`
//! for families where it is available.

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{self, CurveIndex, HeavyTailPolicy};
use crate::distributions::{DistributionModel, Family};
use crate::error::{Error, Result};
use crate::special;

/// Default second-difference step.
pub const DEFAULT_STEP: f64 = 1e-4;
/// Curves whose minimum second difference is at least `-CONVEXITY_TOL` are convex.
pub const CONVEXITY_TOL: f64 = 1e-6;

/// `(L(p - h) - 2 L(p) + L(p + h)) / h^2`.
pub fn second_difference(model: &DistributionModel, index: CurveIndex, p: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(p - h > 0.0 && p + h < 1.0) {
        return Err(Error::StepTooLarge { p, h });
    }
    let l = |x: f64| curves::value(model, index, x, HeavyTailPolicy::Error);
    Ok((l(p - h)? - 2.0 * l(p)? + l(p + h)?) / (h * h))
}

/// [`second_difference`] with the step shrunk to fit inside `(0, 1)`.
pub fn second_difference_near(model: &DistributionModel, index: CurveIndex, p: f64, h: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    second_difference(model, index, p, h.min(0.5 * p).min(0.5 * (1.0 - p)))
}

/// `p * g'' + 2 g'` over the median, where `L1 = p g(p) / m`.
fn l1_second_from(g1: f64, g2: f64, p: f64, median: f64) -> f64 {
    (2.0 * g1 + p * g2) / median
}

/// Closed-form `L1''(p)`; scale does not enter.
pub fn analytic_l1_second(model: &DistributionModel, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    match model.family() {
        Family::Exponential => Ok((4.0 - p) / ((p - 2.0).powi(2) * std::f64::consts::LN_2)),
        Family::ParetoI | Family::ParetoII => {
            let a = model.pareto_shape().expect("Pareto models have a shape");
            let k = 1.0 / a;
            let s = 1.0 - 0.5 * p;
            let g1 = 0.5 * k * s.powf(-k - 1.0);
            let g2 = 0.25 * k * (k + 1.0) * s.powf(-k - 2.0);
            let median = if model.family() == Family::ParetoI {
                2f64.powf(k)
            } else {
                2f64.powf(k) - 1.0
            };
            Ok(l1_second_from(g1, g2, p, median))
        }
        Family::Weibull => {
            let k = 1.0 / model.weibull_shape().expect("Weibull models have a shape");
            let t = -(-0.5 * p).ln_1p();
            let t1 = 1.0 / (2.0 - p);
            let t2 = t1 * t1;
            let g1 = k * t.powf(k - 1.0) * t1;
            let g2 = k * (k - 1.0) * t.powf(k - 2.0) * t1 * t1 + k * t.powf(k - 1.0) * t2;
            Ok(l1_second_from(g1, g2, p, std::f64::consts::LN_2.powf(k)))
        }
        Family::Lognormal => {
            let z = special::normal_quantile(0.5 * p);
            let phi = special::normal_pdf(z);
            let l1 = p * z.exp();
            Ok(l1 * lognormal_l1_condition(p) / (4.0 * p * phi * phi))
        }
        _ => Err(Error::UnsupportedFamily(
            "closed-form L1'' covers exponential, Pareto, Weibull and lognormal",
        )),
    }
}

/// `4 phi(z) + p (1 + z)` at `z = z_{p/2}`; the lognormal `L1''` has its sign.
pub fn lognormal_l1_condition(p: f64) -> f64 {
    let z = special::normal_quantile(0.5 * p);
    4.0 * special::normal_pdf(z) + p * (1.0 + z)
}

/// Smallest second difference of one curve over a `p` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub model: String,
    pub index: CurveIndex,
    pub grid_points: usize,
    pub min_second: f64,
    pub argmin_p: f64,
    /// The family parameter at the minimum, when sweeping a family.
    pub parameter: Option<f64>,
    /// The minimum sits at the first or last grid point.
    pub at_boundary: bool,
    pub convex: bool,
}

/// 0.005, 0.010, ..., 0.995.
pub fn default_p_grid() -> Vec<f64> {
    (1..200).map(|k| k as f64 * 0.005).collect()
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[lo, hi]`.
fn golden_min<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Minimizes the second difference over `p_grid` and refines an interior
/// grid minimum between its neighbours.
pub fn convexity_check(
    name: &str,
    model: &DistributionModel,
    index: CurveIndex,
    p_grid: &[f64],
    h: f64,
) -> Result<ConvexityReport> {
    if p_grid.is_empty() {
        return Err(Error::InvalidParameter("the p grid is empty".into()));
    }
    let values = p_grid
        .iter()
        .map(|&p| second_difference_near(model, index, p, h))
        .collect::<Result<Vec<_>>>()?;
    let k = (0..values.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty grid");
    let at_boundary = k == 0 || k == values.len() - 1;
    let (argmin_p, min_second) = if at_boundary {
        (p_grid[k], values[k])
    } else {
        let (p, v) = golden_min(
            |p| second_difference_near(model, index, p, h),
            p_grid[k - 1],
            p_grid[k + 1],
            1e-6,
        )?;
        if v < values[k] {
            (p, v)
        } else {
            (p_grid[k], values[k])
        }
    };
    Ok(ConvexityReport {
        model: name.to_string(),
        index,
        grid_points: p_grid.len(),
        min_second,
        argmin_p,
        parameter: None,
        at_boundary,
        convex: min_second >= -CONVEXITY_TOL,
    })
}

/// Minimum over a family: the overall minimum, and the smallest minimum that
/// is attained strictly inside the `p` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub global: ConvexityReport,
    pub interior: Option<ConvexityReport>,
    pub per_parameter: Vec<ConvexityReport>,
}

pub fn convexity_sweep<B>(
    name: &str,
    build: B,
    index: CurveIndex,
    p_grid: &[f64],
    parameters: &[f64],
    h: f64,
) -> Result<SweepReport>
where
    B: Fn(f64) -> Result<DistributionModel> + Sync,
{
    if parameters.is_empty() {
        return Err(Error::InvalidParameter("the parameter grid is empty".into()));
    }
    let per_parameter: Vec<ConvexityReport> = parameters
        .par_iter()
        .map(|&a| {
            let model = build(a)?;
            let mut r = convexity_check(&format!("{name}({a})"), &model, index, p_grid, h)?;
            r.parameter = Some(a);
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let smallest = |it: &mut dyn Iterator<Item = &ConvexityReport>| {
        it.min_by(|a, b| a.min_second.total_cmp(&b.min_second)).cloned()
    };
    let global = smallest(&mut per_parameter.iter()).expect("non-empty parameter grid");
    let interior = smallest(&mut per_parameter.iter().filter(|r| !r.at_boundary));
    Ok(SweepReport {
        global,
        interior,
        per_parameter,
    })
}
