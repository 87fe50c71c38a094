//! Influence functions of quantiles, quantile curves and quantile coefficients.
//!
//! For a model with strictly positive density the contamination point `z`
//! enters only through its level `u = F(z)`: `z < x_p` exactly when `u < p`.
//! The `*_at_level` functions take `u` directly and avoid the round trip
//! through the CDF.

use std::cell::RefCell;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::CurveIndex;
use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, pairwise_sum, QuadratureSpec};
use crate::transfer::IncomeDistribution;

/// An income value at which the model is contaminated.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ContaminationPoint(f64);

impl ContaminationPoint {
    pub fn new(z: f64) -> Result<Self> {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::domain("z", z, "[0, inf)"));
        }
        Ok(Self(z))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_level(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(name, v, "(0, 1)"))
    }
}

fn check_quantile_index(index: CurveIndex) -> Result<()> {
    if index.is_quantile() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "influence functions are provided for the quantile curves L1..L3 only".into(),
        ))
    }
}

/// `IF(z; x_p)` with `u = F(z)`: `(p - 1) q(p)` below, 0 at, `p q(p)` above `x_p`.
pub fn if_quantile_at_level(model: &DistributionModel, p: f64, u: f64) -> Result<f64> {
    check_level("p", p)?;
    let q = model.quantile_density(p)?;
    Ok(if u < p {
        (p - 1.0) * q
    } else if u > p {
        p * q
    } else {
        0.0
    })
}

pub fn if_quantile(model: &DistributionModel, p: f64, z: f64) -> Result<f64> {
    check_level("p", p)?;
    let x = model.quantile(p)?;
    let q = model.quantile_density(p)?;
    Ok(if z < x {
        (p - 1.0) * q
    } else if z > x {
        p * q
    } else {
        0.0
    })
}

/// `IF(z; L_i(p)) = p (IF(x_{p/2}) / d - x_{p/2} IF(d) / d^2)` with `u = F(z)`.
pub fn if_curve_at_level(model: &DistributionModel, index: CurveIndex, p: f64, u: f64) -> Result<f64> {
    check_quantile_index(index)?;
    check_level("p", p)?;
    let low = model.quantile(0.5 * p)?;
    let if_low = if_quantile_at_level(model, 0.5 * p, u)?;
    let (d, if_d) = match index {
        CurveIndex::Median => (model.quantile(0.5)?, if_quantile_at_level(model, 0.5, u)?),
        CurveIndex::Upper => (
            model.quantile(1.0 - 0.5 * p)?,
            if_quantile_at_level(model, 1.0 - 0.5 * p, u)?,
        ),
        _ => {
            let high = model.quantile(1.0 - 0.5 * p)?;
            let if_high = if_quantile_at_level(model, 1.0 - 0.5 * p, u)?;
            (0.5 * (low + high), 0.5 * (if_low + if_high))
        }
    };
    Ok(p * (if_low / d - low * if_d / (d * d)))
}

pub fn if_curve(model: &DistributionModel, index: CurveIndex, p: f64, z: f64) -> Result<f64> {
    if_curve_at_level(model, index, p, model.cdf(z))
}

/// Integrates a fallible integrand, reporting the first evaluation error.
fn integrate_checked<F>(f: F, a: f64, b: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure = RefCell::new(None);
    let result = integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        breaks,
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    result.map(|r| r.value)
}

/// `IF(z; G_i) = -2 int_0^1 IF(z; L_i(p)) dp` with `u = F(z)`. The integrand
/// jumps at `p = 2u` and `p = 2(1 - u)`.
pub fn if_coefficient_at_level(
    model: &DistributionModel,
    index: CurveIndex,
    u: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_quantile_index(index)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::domain("u", u, "[0, 1]"));
    }
    let breaks = [2.0 * u, 2.0 * (1.0 - u)];
    let integral = integrate_checked(|p| if_curve_at_level(model, index, p, u), 0.0, 1.0, &breaks, quad)?;
    Ok(-2.0 * integral)
}

pub fn if_coefficient(model: &DistributionModel, index: CurveIndex, z: f64, quad: &QuadratureSpec) -> Result<f64> {
    if_coefficient_at_level(model, index, model.cdf(z), quad)
}

/// Number of midpoint cells of the outer `u` integral.
pub const OUTER_POINTS: usize = 10_000;

/// `sqrt(E[IF(Z; G_i)^2])` by the midpoint rule over `u` with `points` cells.
///
/// Cells are evaluated in parallel and summed pairwise in cell order, so the
/// result does not depend on the number of worker threads.
pub fn asymptotic_se_with(
    model: &DistributionModel,
    index: CurveIndex,
    quad: &QuadratureSpec,
    points: usize,
) -> Result<f64> {
    let squares = outer_values(model, index, quad, points, |g| g * g)?;
    Ok((pairwise_sum(&squares) / points as f64).sqrt())
}

pub fn asymptotic_se(model: &DistributionModel, index: CurveIndex, quad: &QuadratureSpec) -> Result<f64> {
    asymptotic_se_with(model, index, quad, OUTER_POINTS)
}

/// `E[IF(Z; G_i)]` by the same rule; zero up to discretization error.
pub fn if_coefficient_mean(
    model: &DistributionModel,
    index: CurveIndex,
    quad: &QuadratureSpec,
    points: usize,
) -> Result<f64> {
    let values = outer_values(model, index, quad, points, |g| g)?;
    Ok(pairwise_sum(&values) / points as f64)
}

fn outer_values(
    model: &DistributionModel,
    index: CurveIndex,
    quad: &QuadratureSpec,
    points: usize,
    map: impl Fn(f64) -> f64 + Sync,
) -> Result<Vec<f64>> {
    check_quantile_index(index)?;
    if points < 2 {
        return Err(Error::InvalidParameter("the outer grid needs at least 2 cells".into()));
    }
    (0..points)
        .into_par_iter()
        .map(|k| {
            let u = (k as f64 + 0.5) / points as f64;
            if_coefficient_at_level(model, index, u, quad).map(&map)
        })
        .collect()
}

/// Asymptotic standard errors of the three quantile coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticSe {
    pub model: String,
    pub sigma: [f64; 3],
}

impl AsymptoticSe {
    pub fn compute(name: &str, model: &DistributionModel, quad: &QuadratureSpec) -> Result<Self> {
        let mut sigma = [0.0; 3];
        for (s, index) in sigma.iter_mut().zip(CurveIndex::QUANTILE) {
            *s = asymptotic_se(model, index, quad)?;
        }
        Ok(Self {
            model: name.to_string(),
            sigma,
        })
    }

    pub fn get(&self, index: CurveIndex) -> Result<f64> {
        check_quantile_index(index)?;
        Ok(self.sigma[index.number() - 1])
    }
}

/// `(1 - eps) F + eps * delta_z`, the model contaminated by a point mass at `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contaminated {
    base: DistributionModel,
    z: f64,
    eps: f64,
}

impl Contaminated {
    pub fn new(base: DistributionModel, z: f64, eps: f64) -> Result<Self> {
        ContaminationPoint::new(z)?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain("eps", eps, "(0, 1)"));
        }
        Ok(Self { base, z, eps })
    }

    /// Finite-difference influence of contamination on `L_i(p)`:
    /// `(L_i(F_eps; p) - L_i(F; p)) / eps`.
    pub fn curve_difference(&self, index: CurveIndex, p: f64) -> Result<f64> {
        use crate::transfer::quantile_curve;
        let after = quantile_curve(self, index, p)?;
        let before = quantile_curve(&self.base, index, p)?;
        Ok((after - before) / self.eps)
    }
}

impl IncomeDistribution for Contaminated {
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("p", p, "[0, 1]"));
        }
        let keep = 1.0 - self.eps;
        let below = keep * self.base.cdf(self.z);
        if p <= below {
            self.base.quantile(p / keep)
        } else if p <= below + self.eps {
            Ok(self.z)
        } else {
            self.base.quantile(((p - self.eps) / keep).min(1.0))
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let mass = if x >= self.z { self.eps } else { 0.0 };
        (1.0 - self.eps) * self.base.cdf(x) + mass
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_if_examples() {
        let e = DistributionModel::exponential(1.0).unwrap();
        assert!((if_quantile(&e, 0.5, 10.0).unwrap() - 1.0).abs() < 1e-12);
        let median = e.quantile(0.5).unwrap();
        assert_eq!(if_quantile(&e, 0.5, median).unwrap(), 0.0);
        let u = DistributionModel::uniform(1.0).unwrap();
        assert!((if_quantile(&u, 0.25, 0.1).unwrap() + 0.75).abs() < 1e-12);
    }

    #[test]
    fn lorenz_index_is_rejected() {
        let u = DistributionModel::uniform(1.0).unwrap();
        assert!(if_curve(&u, CurveIndex::Lorenz, 0.5, 0.2).is_err());
        assert!(if_coefficient(&u, CurveIndex::Lorenz, 0.2, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn uniform_coefficient_if_matches_riemann_sum() {
        let u = DistributionModel::uniform(1.0).unwrap();
        let got = if_coefficient(&u, CurveIndex::Median, 0.5, &QuadratureSpec::default()).unwrap();
        let m = 200_000;
        let sum: f64 = (0..m)
            .map(|k| {
                let p = (k as f64 + 0.5) / m as f64;
                if_curve_at_level(&u, CurveIndex::Median, p, 0.5).unwrap()
            })
            .sum();
        let riemann = -2.0 * sum / m as f64;
        assert!((got - riemann).abs() < 1e-5, "{got} vs {riemann}");
    }

    #[test]
    fn contaminated_quantile_has_an_atom() {
        let u = DistributionModel::uniform(1.0).unwrap();
        let c = Contaminated::new(u, 0.5, 0.1).unwrap();
        assert!((c.quantile(0.45).unwrap() - 0.5).abs() < 1e-15);
        assert!((c.quantile(0.2).unwrap() - 0.2 / 0.9).abs() < 1e-15);
        assert!((c.quantile(0.9).unwrap() - 0.8 / 0.9).abs() < 1e-15);
        assert!((c.cdf(0.5) - 0.55).abs() < 1e-15);
    }
}
