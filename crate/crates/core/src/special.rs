//! Total wrappers over the special functions in `statrs` and `libm`.
//!
//! The statrs versions panic outside the open domain; these clamp to the
//! boundary values instead. `erfc` comes from `libm`, which is accurate to a
//! few ulp; the statrs `erfc_inv` only seeds a Newton step.

use statrs::function::{beta, erf, gamma};
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Standard normal quantile, refined by one Newton step on [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p > 0.5 {
        return -normal_quantile(1.0 - p);
    }
    let z = -SQRT_2 * erf::erfc_inv(2.0 * p);
    let density = normal_pdf(z);
    if density > 0.0 {
        z - (normal_cdf(z) - p) / density
    } else {
        z
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma::gamma(x)
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma::gamma_lr(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn reg_upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x.is_infinite() {
        0.0
    } else {
        gamma::gamma_ur(a, x)
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    beta::ln_beta(a, b)
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn reg_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        beta::beta_reg(a, b, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_quantile_inverts_cdf() {
        for &p in &[1e-12, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999, 1.0 - 1e-9] {
            let z = normal_quantile(p);
            let back = normal_cdf(z);
            assert!(
                (back - p).abs() <= 1e-12 * p.min(1.0 - p).max(1e-3),
                "p={p} z={z} back={back}"
            );
        }
        let z = normal_quantile(0.975);
        assert!((z - 1.959_963_984_540_054).abs() < 1e-12, "{z:.17}");
        assert_eq!(normal_quantile(0.5), 0.0);
    }

    #[test]
    fn incomplete_functions_at_boundaries() {
        assert_eq!(reg_lower_gamma(0.5, 0.0), 0.0);
        assert_eq!(reg_lower_gamma(0.5, f64::INFINITY), 1.0);
        assert_eq!(reg_upper_gamma(2.0, 0.0), 1.0);
        assert_eq!(reg_beta(0.1, 0.05, 0.0), 0.0);
        assert_eq!(reg_beta(0.1, 0.05, 1.0), 1.0);
        // P(1, x) = 1 - exp(-x)
        assert!((reg_lower_gamma(1.0, 2.0) - (1.0 - (-2.0f64).exp())).abs() < 1e-14);
        // I_x(1, 1) = x
        assert!((reg_beta(1.0, 1.0, 0.3) - 0.3).abs() < 1e-14);
    }
}
