//! Parametric income distributions.
//!
//! Every model is a base family with unit scale multiplied by a positive scale
//! factor `sigma`, so `X = sigma * Y`. All curves and coefficients are scale
//! invariant; the scale only matters for quantities measured in income units
//! (quantiles, cumulative income, transfers).
//!
//! Quantiles use closed forms where they exist. Chi-square and beta quantiles are
//! found by a bracketed Newton iteration on the regularized incomplete gamma and
//! beta functions.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::special;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    Uniform,
    Exponential,
    ChiSquare,
    Lognormal,
    ParetoI,
    ParetoII,
    Weibull,
    Beta,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Family::Uniform => "uniform",
            Family::Exponential => "exponential",
            Family::ChiSquare => "chisq",
            Family::Lognormal => "lognormal",
            Family::ParetoI => "paretoI",
            Family::ParetoII => "paretoII",
            Family::Weibull => "weibull",
            Family::Beta => "beta",
        };
        f.write_str(name)
    }
}

/// A real number or `+inf`. Only means of heavy-tailed Pareto models are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::PosInfinity)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInfinity => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Uniform,
    Exponential,
    ChiSquare { k: f64 },
    Lognormal,
    ParetoI { a: f64 },
    ParetoII { a: f64 },
    Weibull { beta: f64 },
    Beta { alpha: f64, beta: f64 },
}

/// An immutable, validated income distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionModel {
    shape: Shape,
    scale: f64,
}

fn positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {value}"
        )))
    }
}

impl DistributionModel {
    fn build(shape: Shape, scale: f64) -> Result<Self> {
        positive("sigma", scale)?;
        Ok(Self { shape, scale })
    }

    /// Uniform on `(0, sigma)`.
    pub fn uniform(sigma: f64) -> Result<Self> {
        Self::build(Shape::Uniform, sigma)
    }

    pub fn exponential(sigma: f64) -> Result<Self> {
        Self::build(Shape::Exponential, sigma)
    }

    pub fn chi_square(k: f64) -> Result<Self> {
        Self::build(Shape::ChiSquare { k: positive("k", k)? }, 1.0)
    }

    /// Lognormal with log-scale location `ln sigma` and unit log-scale spread.
    pub fn lognormal(sigma: f64) -> Result<Self> {
        Self::build(Shape::Lognormal, sigma)
    }

    /// Type I Pareto: `1 - F(x) = (x / sigma)^-a` on `[sigma, inf)`.
    pub fn pareto_i(a: f64, sigma: f64) -> Result<Self> {
        Self::build(Shape::ParetoI { a: positive("a", a)? }, sigma)
    }

    /// Type II Pareto (Lomax): `1 - F(x) = (1 + x / sigma)^-a` on `[0, inf)`.
    pub fn pareto_ii(a: f64, sigma: f64) -> Result<Self> {
        Self::build(Shape::ParetoII { a: positive("a", a)? }, sigma)
    }

    pub fn weibull(beta: f64, sigma: f64) -> Result<Self> {
        Self::build(
            Shape::Weibull {
                beta: positive("beta", beta)?,
            },
            sigma,
        )
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(
            Shape::Beta {
                alpha: positive("alpha", alpha)?,
                beta: positive("beta", beta)?,
            },
            1.0,
        )
    }

    /// The same family with the scale multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        positive("scale factor", factor)?;
        Self::build(self.shape, self.scale * factor)
    }

    pub fn family(&self) -> Family {
        match self.shape {
            Shape::Uniform => Family::Uniform,
            Shape::Exponential => Family::Exponential,
            Shape::ChiSquare { .. } => Family::ChiSquare,
            Shape::Lognormal => Family::Lognormal,
            Shape::ParetoI { .. } => Family::ParetoI,
            Shape::ParetoII { .. } => Family::ParetoII,
            Shape::Weibull { .. } => Family::Weibull,
            Shape::Beta { .. } => Family::Beta,
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Shape parameter `a` of a Pareto model.
    pub fn pareto_shape(&self) -> Option<f64> {
        match self.shape {
            Shape::ParetoI { a } | Shape::ParetoII { a } => Some(a),
            _ => None,
        }
    }

    /// Shape parameter of a Weibull model.
    pub fn weibull_shape(&self) -> Option<f64> {
        match self.shape {
            Shape::Weibull { beta } => Some(beta),
            _ => None,
        }
    }

    /// Lower end of the support.
    pub fn support_min(&self) -> f64 {
        match self.shape {
            Shape::ParetoI { .. } => self.scale,
            _ => 0.0,
        }
    }

    /// Upper end of the support (`inf` for unbounded families).
    pub fn support_max(&self) -> f64 {
        match self.shape {
            Shape::Uniform | Shape::Beta { .. } => self.scale,
            _ => f64::INFINITY,
        }
    }

    /// Distribution function `F(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let y = x / self.scale;
        if y.is_nan() {
            return f64::NAN;
        }
        match self.shape {
            Shape::Uniform => y.clamp(0.0, 1.0),
            Shape::Exponential => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-y).exp_m1()
                }
            }
            Shape::ChiSquare { k } => special::reg_lower_gamma(0.5 * k, 0.5 * y),
            Shape::Lognormal => {
                if y <= 0.0 {
                    0.0
                } else {
                    special::normal_cdf(y.ln())
                }
            }
            Shape::ParetoI { a } => {
                if y <= 1.0 {
                    0.0
                } else {
                    -(-a * y.ln()).exp_m1()
                }
            }
            Shape::ParetoII { a } => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-a * y.ln_1p()).exp_m1()
                }
            }
            Shape::Weibull { beta } => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-y.powf(beta)).exp_m1()
                }
            }
            Shape::Beta { alpha, beta } => special::reg_beta(alpha, beta, y),
        }
    }

    /// Density `f(x) = F'(x)`; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        let y = x / self.scale;
        let base = match self.shape {
            Shape::Uniform => {
                if (0.0..=1.0).contains(&y) {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Exponential => {
                if y < 0.0 {
                    0.0
                } else {
                    (-y).exp()
                }
            }
            Shape::ChiSquare { k } => {
                if y <= 0.0 {
                    if y == 0.0 && k < 2.0 {
                        f64::INFINITY
                    } else if y == 0.0 && k == 2.0 {
                        0.5
                    } else {
                        0.0
                    }
                } else {
                    let h = 0.5 * k;
                    ((h - 1.0) * y.ln() - 0.5 * y - h * std::f64::consts::LN_2 - special::ln_gamma(h)).exp()
                }
            }
            Shape::Lognormal => {
                if y <= 0.0 {
                    0.0
                } else {
                    special::normal_pdf(y.ln()) / y
                }
            }
            Shape::ParetoI { a } => {
                if y < 1.0 {
                    0.0
                } else {
                    a * (-(a + 1.0) * y.ln()).exp()
                }
            }
            Shape::ParetoII { a } => {
                if y < 0.0 {
                    0.0
                } else {
                    a * (-(a + 1.0) * y.ln_1p()).exp()
                }
            }
            Shape::Weibull { beta } => {
                if y < 0.0 {
                    0.0
                } else if y == 0.0 {
                    match beta.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => 1.0,
                        _ => 0.0,
                    }
                } else {
                    let t = y.powf(beta);
                    beta * t / y * (-t).exp()
                }
            }
            Shape::Beta { alpha, beta } => {
                if y <= 0.0 || y >= 1.0 {
                    0.0
                } else {
                    ((alpha - 1.0) * y.ln() + (beta - 1.0) * (-y).ln_1p() - special::ln_beta(alpha, beta)).exp()
                }
            }
        };
        base / self.scale
    }

    /// Quantile function `Q(p) = inf { x : F(x) >= p }`.
    ///
    /// `Q(0)` is the lower support endpoint and `Q(1)` the upper one, which is
    /// `+inf` for unbounded families.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("p", p, "[0, 1]"));
        }
        if p == 0.0 {
            return Ok(self.support_min());
        }
        if p == 1.0 {
            return Ok(self.support_max());
        }
        let base = match self.shape {
            Shape::Uniform => p,
            Shape::Exponential => -(-p).ln_1p(),
            Shape::ChiSquare { k } => self.invert_chi_square(k, p)?,
            Shape::Lognormal => special::normal_quantile(p).exp(),
            Shape::ParetoI { a } => (-(-p).ln_1p() / a).exp(),
            Shape::ParetoII { a } => (-(-p).ln_1p() / a).exp_m1(),
            Shape::Weibull { beta } => (-(-p).ln_1p()).powf(1.0 / beta),
            Shape::Beta { alpha, beta } => invert_beta(alpha, beta, p)?,
        };
        Ok(self.scale * base)
    }

    /// Quantile density `q(p) = dQ/dp = 1 / f(Q(p))`.
    pub fn quantile_density(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain("p", p, "(0, 1)"));
        }
        let base = match self.shape {
            Shape::Uniform => 1.0,
            Shape::Exponential => 1.0 / (1.0 - p),
            Shape::Lognormal => {
                let z = special::normal_quantile(p);
                z.exp() / special::normal_pdf(z)
            }
            Shape::ParetoI { a } | Shape::ParetoII { a } => (-(1.0 / a + 1.0) * (-p).ln_1p()).exp() / a,
            Shape::Weibull { beta } => {
                let t = -(-p).ln_1p();
                t.powf(1.0 / beta - 1.0) / (beta * (1.0 - p))
            }
            Shape::ChiSquare { .. } => {
                let x = self.quantile(p)?;
                return Ok(1.0 / self.density(x));
            }
            Shape::Beta { alpha, beta } => {
                let y = beta_upper_gap(alpha, beta, p)?;
                let x = if p > 0.5 { 1.0 - y } else { invert_beta(alpha, beta, p)? };
                1.0 / beta_density(alpha, beta, x, y)
            }
        };
        Ok(self.scale * base)
    }

    /// Mean income; `+inf` for Pareto models with `a <= 1`.
    pub fn mean(&self) -> ExtendedReal {
        let base = match self.shape {
            Shape::Uniform => 0.5,
            Shape::Exponential => 1.0,
            Shape::ChiSquare { k } => k,
            Shape::Lognormal => 0.5f64.exp(),
            Shape::ParetoI { a } => {
                if a <= 1.0 {
                    return ExtendedReal::PosInfinity;
                }
                a / (a - 1.0)
            }
            Shape::ParetoII { a } => {
                if a <= 1.0 {
                    return ExtendedReal::PosInfinity;
                }
                1.0 / (a - 1.0)
            }
            Shape::Weibull { beta } => special::gamma_fn(1.0 + 1.0 / beta),
            Shape::Beta { alpha, beta } => alpha / (alpha + beta),
        };
        ExtendedReal::Finite(self.scale * base)
    }

    /// Cumulative income `C(F; p) = int_0^{x_p} y dF(y) = int_0^p Q(u) du`.
    ///
    /// `C(F; 1)` is the mean and is a heavy-tail error when the mean is infinite.
    pub fn cumulative_income(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("p", p, "[0, 1]"));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        if p == 1.0 {
            return self
                .mean()
                .finite()
                .ok_or(Error::HeavyTail("cumulative income at p = 1"));
        }
        let x = self.quantile(p)? / self.scale;
        let base = match self.shape {
            Shape::Uniform => 0.5 * p * p,
            Shape::Exponential => p + (1.0 - p) * (-p).ln_1p(),
            Shape::ChiSquare { k } => k * special::reg_lower_gamma(0.5 * k + 1.0, 0.5 * x),
            Shape::Lognormal => 0.5f64.exp() * special::normal_cdf(x.ln() - 1.0),
            Shape::ParetoI { a } => {
                if a == 1.0 {
                    x.ln()
                } else {
                    a / (a - 1.0) * (1.0 - x.powf(1.0 - a))
                }
            }
            Shape::ParetoII { a } => {
                if a == 1.0 {
                    x.ln_1p() - x * (1.0 - p)
                } else {
                    (p - a * (1.0 - p) * x) / (a - 1.0)
                }
            }
            Shape::Weibull { beta } => {
                let s = 1.0 + 1.0 / beta;
                special::gamma_fn(s) * special::reg_lower_gamma(s, -(-p).ln_1p())
            }
            Shape::Beta { alpha, beta } => {
                let mean = alpha / (alpha + beta);
                if p > 0.5 {
                    let y = beta_upper_gap(alpha, beta, p)?;
                    mean * (1.0 - special::reg_beta(beta, alpha + 1.0, y))
                } else {
                    mean * special::reg_beta(alpha + 1.0, beta, x)
                }
            }
        };
        Ok(self.scale * base)
    }

    /// Draws `n` incomes by inverse-transform sampling (unsorted, in draw order).
    pub fn draw(&self, n: usize, rng: &mut RandomStream) -> Result<Vec<f64>> {
        (0..n).map(|_| self.quantile(rng.uniform())).collect()
    }

    /// `n` i.i.d. draws as a sorted [`Sample`]; needs `n >= 2`.
    pub fn sample(&self, n: usize, rng: &mut RandomStream) -> Result<Sample> {
        Sample::new(self.draw(n, rng)?)
    }

    fn invert_chi_square(&self, k: f64, p: f64) -> Result<f64> {
        let h = 0.5 * k;
        let unit = DistributionModel {
            shape: self.shape,
            scale: 1.0,
        };
        // Work with the upper tail when p is large so the residual keeps precision.
        let upper = p > 0.5;
        let target = if upper { 1.0 - p } else { p };
        let residual = |x: f64| {
            if upper {
                target - special::reg_upper_gamma(h, 0.5 * x)
            } else {
                special::reg_lower_gamma(h, 0.5 * x) - target
            }
        };
        solve_increasing(residual, |x| unit.density(x), k.max(1.0), p)
    }
}

fn invert_beta(alpha: f64, beta: f64, p: f64) -> Result<f64> {
    if p > 0.5 {
        Ok(1.0 - invert_beta_lower(beta, alpha, 1.0 - p)?)
    } else {
        invert_beta_lower(alpha, beta, p)
    }
}

/// `1 - Q(p)` of a beta model, accurate when `Q(p)` rounds to 1.
fn beta_upper_gap(alpha: f64, beta: f64, p: f64) -> Result<f64> {
    if p > 0.5 {
        invert_beta_lower(beta, alpha, 1.0 - p)
    } else {
        Ok(1.0 - invert_beta_lower(alpha, beta, p)?)
    }
}

/// Beta density at `x = 1 - y`, given both `x` and `y`.
fn beta_density(alpha: f64, beta: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 || y <= 0.0 {
        return 0.0;
    }
    ((alpha - 1.0) * x.ln() + (beta - 1.0) * y.ln() - special::ln_beta(alpha, beta)).exp()
}

fn invert_beta_lower(alpha: f64, beta: f64, p: f64) -> Result<f64> {
    let density = |x: f64| {
        if x <= 0.0 || x >= 1.0 {
            0.0
        } else {
            beta_density(alpha, beta, x, 1.0 - x)
        }
    };
    let residual = |x: f64| special::reg_beta(alpha, beta, x) - p;
    let x = solve_increasing(residual, density, alpha / (alpha + beta), p)?;
    Ok(x.min(1.0))
}

/// Bracketed Newton iteration for the root of an increasing `residual` on
/// `(0, inf)`. Bisection steps are geometric while the bracket spans more than a
/// factor of four, which keeps quantiles that sit many decades below the guess
/// cheap to find.
fn solve_increasing<R, D>(residual: R, derivative: D, guess: f64, p: f64) -> Result<f64>
where
    R: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut hi = guess.max(f64::MIN_POSITIVE);
    let mut expansions = 0;
    while residual(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 2100 || !hi.is_finite() {
            return Err(Error::RootFinding(p));
        }
    }
    let mut lo = hi;
    expansions = 0;
    loop {
        lo *= 0.5;
        if residual(lo) < 0.0 {
            break;
        }
        expansions += 1;
        if lo == 0.0 || expansions > 2100 {
            return Ok(lo);
        }
    }
    let mut x = (lo * hi).sqrt();
    for _ in 0..400 {
        let r = residual(x);
        if r == 0.0 {
            return Ok(x);
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(0.5 * (lo + hi));
        }
        let d = derivative(x);
        let newton = x - r / d;
        x = if d.is_finite() && d > 0.0 && newton > lo && newton < hi {
            newton
        } else if hi > 4.0 * lo && lo > 0.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::RootFinding(p))
}

impl fmt::Display for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = self.family();
        match self.shape {
            Shape::Uniform | Shape::Exponential | Shape::Lognormal => write!(f, "{family}")?,
            Shape::ChiSquare { k } => write!(f, "{family}:k={k}")?,
            Shape::ParetoI { a } | Shape::ParetoII { a } => write!(f, "{family}:a={a}")?,
            Shape::Weibull { beta } => write!(f, "{family}:beta={beta}")?,
            Shape::Beta { alpha, beta } => write!(f, "{family}:alpha={alpha},beta={beta}")?,
        }
        if self.scale != 1.0 {
            let sep = if matches!(self.shape, Shape::Uniform | Shape::Exponential | Shape::Lognormal) {
                ':'
            } else {
                ','
            };
            write!(f, "{sep}sigma={}", self.scale)?;
        }
        Ok(())
    }
}

/// Parses `family:key=value,...`, e.g. `paretoII:a=2,sigma=100000`.
/// Family names and keys are case-insensitive; unknown keys are rejected.
impl FromStr for DistributionModel {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let fail = |reason: String| Error::Spec {
            spec: spec.to_string(),
            reason,
        };
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), a.trim()),
            None => (spec.trim(), ""),
        };
        let mut params: Vec<(String, f64)> = Vec::new();
        for item in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| fail(format!("expected key=value, got '{item}'")))?;
            let key = key.trim().to_ascii_lowercase();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| fail(format!("'{}' is not a number", value.trim())))?;
            if params.iter().any(|(k, _)| *k == key) {
                return Err(fail(format!("duplicate key '{key}'")));
            }
            params.push((key, value));
        }
        let family = match name.to_ascii_lowercase().as_str() {
            "uniform" | "unif" => Family::Uniform,
            "exponential" | "exp" => Family::Exponential,
            "chisq" | "chi2" | "chisquare" | "chi-square" => Family::ChiSquare,
            "lognormal" | "lnorm" => Family::Lognormal,
            "paretoi" | "pareto1" => Family::ParetoI,
            "paretoii" | "pareto2" | "pareto" | "lomax" => Family::ParetoII,
            "weibull" => Family::Weibull,
            "beta" => Family::Beta,
            other => return Err(fail(format!("unknown family '{other}'"))),
        };
        let (required, optional): (&[&str], &[&str]) = match family {
            Family::Uniform | Family::Exponential | Family::Lognormal => (&[], &["sigma"]),
            Family::ChiSquare => (&["k"], &[]),
            Family::ParetoI | Family::ParetoII => (&["a"], &["sigma"]),
            Family::Weibull => (&["beta"], &["sigma"]),
            Family::Beta => (&["alpha", "beta"], &[]),
        };
        for (key, _) in &params {
            if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                return Err(fail(format!("unknown key '{key}' for family {family}")));
            }
        }
        let get = |key: &str| params.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        for key in required {
            if get(key).is_none() {
                return Err(fail(format!("missing required key '{key}'")));
            }
        }
        let sigma = get("sigma").unwrap_or(1.0);
        let model = match family {
            Family::Uniform => Self::uniform(sigma),
            Family::Exponential => Self::exponential(sigma),
            Family::Lognormal => Self::lognormal(sigma),
            Family::ChiSquare => Self::chi_square(get("k").unwrap_or_default()),
            Family::ParetoI => Self::pareto_i(get("a").unwrap_or_default(), sigma),
            Family::ParetoII => Self::pareto_ii(get("a").unwrap_or_default(), sigma),
            Family::Weibull => Self::weibull(get("beta").unwrap_or_default(), sigma),
            Family::Beta => Self::beta(get("alpha").unwrap_or_default(), get("beta").unwrap_or_default()),
        };
        model.map_err(|e| fail(e.to_string()))
    }
}
