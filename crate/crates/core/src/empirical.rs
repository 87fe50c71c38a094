//! Distribution-free estimators.
//!
//! Sample quantiles use the Hyndman-Fan Type 8 rule: linear interpolation
//! between the points `(p_k, x_(k))` with plotting positions
//! `p_k = (k - 1/3) / (n + 1/3)`. Below `p_1` and above `p_n` the estimate is
//! clamped to the extreme order statistics.

use std::io::BufRead;

use crate::curves::{CurveIndex, CurveTable};
use crate::error::{Error, Result};

/// Sorted, finite, non-negative incomes; at least two of them.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a sample needs at least 2 incomes, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "incomes must be finite and non-negative, got {bad}"
            )));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Ascending order statistics.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be > 0, got {factor}"
            )));
        }
        Ok(Self {
            values: self.values.iter().map(|x| x * factor).collect(),
        })
    }

    /// Reads one income per line. Blank lines and `#` comments are skipped and
    /// the first data line may be a non-numeric header. Only the first
    /// comma-separated field of a line is used.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut values = Vec::new();
        let mut seen_data = false;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let field = content.split(',').next().unwrap_or("").trim();
            match field.parse::<f64>() {
                Ok(x) if x.is_finite() && x >= 0.0 => values.push(x),
                Ok(x) => {
                    return Err(Error::Csv {
                        line: lineno,
                        reason: format!("income must be finite and non-negative, got {x}"),
                    })
                }
                Err(_) if !seen_data => {}
                Err(_) => {
                    return Err(Error::Csv {
                        line: lineno,
                        reason: format!("'{field}' is not a number"),
                    })
                }
            }
            seen_data = true;
        }
        Self::new(values).map_err(|e| Error::Csv {
            line: 0,
            reason: e.to_string(),
        })
    }
}

/// Midpoint grid `p_j = (j - 1/2) / J`, `j = 1..=J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    points: usize,
}

impl Grid {
    pub fn new(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter(format!("grid needs J >= 2, got {points}")));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.points as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|j| self.point(j))
    }

    /// `(2/J) * sum_j (p_j - L(p_j))`.
    pub fn coefficient_from<F>(&self, mut curve: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut acc = 0.0;
        for p in self.iter() {
            acc += p - curve(p)?;
        }
        Ok(2.0 * acc / self.points as f64)
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            points: crate::DEFAULT_GRID,
        }
    }
}

/// Type 8 sample quantile.
pub fn hf8_quantile(sample: &Sample, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    Ok(hf8_unchecked(sample.values(), p))
}

fn hf8_unchecked(x: &[f64], p: f64) -> f64 {
    let n = x.len() as f64;
    // Position h such that p = (h - 1/3) / (n + 1/3).
    let h = (n + 1.0 / 3.0) * p + 1.0 / 3.0;
    if h <= 1.0 {
        return x[0];
    }
    if h >= n {
        return x[x.len() - 1];
    }
    let k = h.floor();
    let lo = x[k as usize - 1];
    let hi = x[k as usize];
    lo + (h - k) * (hi - lo)
}

/// The empirical Lorenz polygon through `(i/n, sum_{j<=i} x_(j) / sum x)`.
pub fn empirical_lorenz(sample: &Sample) -> Result<CurveTable> {
    let total = sample.total();
    if total <= 0.0 {
        return Err(Error::ZeroTotal);
    }
    let n = sample.len() as f64;
    let mut points = Vec::with_capacity(sample.len() + 1);
    points.push((0.0, 0.0));
    let mut running = 0.0;
    for (i, x) in sample.values().iter().enumerate() {
        running += x;
        points.push(((i + 1) as f64 / n, running / total));
    }
    if let Some(last) = points.last_mut() {
        last.1 = 1.0;
    }
    CurveTable::new(CurveIndex::Lorenz, points)
}

/// Plug-in estimate of `L_i(p)` for a quantile curve (`index` 1, 2 or 3).
pub fn empirical_curve(sample: &Sample, index: CurveIndex, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("p", p, "(0, 1)"));
    }
    curve_from_quantiles(sample.values(), index, p)
}

fn curve_from_quantiles(x: &[f64], index: CurveIndex, p: f64) -> Result<f64> {
    let low = hf8_unchecked(x, 0.5 * p);
    match index {
        CurveIndex::Lorenz => Err(Error::InvalidParameter(
            "the Lorenz curve is estimated by empirical_lorenz".into(),
        )),
        CurveIndex::Median => {
            let median = hf8_unchecked(x, 0.5);
            if median == 0.0 {
                return Err(Error::ZeroDenominator("median"));
            }
            Ok(p * low / median)
        }
        CurveIndex::Upper => {
            let high = hf8_unchecked(x, 1.0 - 0.5 * p);
            if high == 0.0 {
                return Err(Error::ZeroDenominator("upper"));
            }
            Ok(p * low / high)
        }
        CurveIndex::Midrange => {
            let high = hf8_unchecked(x, 1.0 - 0.5 * p);
            if low + high == 0.0 {
                return Err(Error::ZeroDenominator("upper"));
            }
            Ok(2.0 * p * low / (low + high))
        }
    }
}

/// Estimated coefficient of inequality.
///
/// For the quantile curves this is `(2/J) * sum_j (p_j - L_i(p_j))`; for the Lorenz
/// curve it is one minus twice the exact area under the empirical polygon
/// (the grid is not used).
pub fn gini_hat(sample: &Sample, index: CurveIndex, grid: &Grid) -> Result<f64> {
    match index {
        CurveIndex::Lorenz => gini_from_polygon(sample),
        _ => grid.coefficient_from(|p| curve_from_quantiles(sample.values(), index, p)),
    }
}

fn gini_from_polygon(sample: &Sample) -> Result<f64> {
    let total = sample.total();
    if total <= 0.0 {
        return Err(Error::ZeroTotal);
    }
    // Trapezoids under the polygon: area = sum_i (S_{i-1} + S_i) / (2 n T).
    let n = sample.len() as f64;
    let mut running = 0.0;
    let mut twice_area = 0.0;
    for x in sample.values() {
        let previous = running;
        running += x;
        twice_area += previous + running;
    }
    let area = twice_area / (2.0 * n * total);
    Ok((1.0 - 2.0 * area).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionModel;
    use crate::rng::RandomStream;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn hf8_examples() {
        let s = sample(&[4.0, 1.0, 3.0, 2.0]);
        assert_relative_eq!(hf8_quantile(&s, 0.5).unwrap(), 2.5, epsilon = 1e-15);
        // p_1 = 2/13, p_4 = 11/13: clamped outside.
        assert_eq!(hf8_quantile(&s, 0.1).unwrap(), 1.0);
        assert_eq!(hf8_quantile(&s, 0.9).unwrap(), 4.0);
        assert_relative_eq!(hf8_quantile(&s, 5.0 / 13.0).unwrap(), 2.0, epsilon = 1e-14);
        let c = sample(&[3.5; 7]);
        for p in [0.01, 0.5, 0.99] {
            assert_eq!(hf8_quantile(&c, p).unwrap(), 3.5);
        }
        assert!(hf8_quantile(&s, 0.0).is_err());
        assert!(hf8_quantile(&s, 1.0).is_err());
    }

    #[test]
    fn hf8_is_consistent_for_the_exponential_median() {
        let m = DistributionModel::exponential(1.0).unwrap();
        let s = m.sample(100_000, &mut RandomStream::new(5)).unwrap();
        assert!((hf8_quantile(&s, 0.5).unwrap() - 2f64.ln()).abs() < 0.01);
    }

    #[test]
    fn lorenz_polygon_examples() {
        let t = empirical_lorenz(&sample(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        let ys: Vec<f64> = t.points().iter().map(|p| p.1).collect();
        for (a, b) in ys.iter().zip([0.0, 0.1, 0.3, 0.6, 1.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let t = empirical_lorenz(&sample(&[2.0, 2.0, 2.0])).unwrap();
        let ys: Vec<f64> = t.points().iter().map(|p| p.1).collect();
        for (a, b) in ys.iter().zip([0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let t = empirical_lorenz(&sample(&[0.0, 0.0, 1.0])).unwrap();
        let ys: Vec<f64> = t.points().iter().map(|p| p.1).collect();
        assert_eq!(ys, vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(empirical_lorenz(&sample(&[0.0, 0.0])), Err(Error::ZeroTotal));
    }

    #[test]
    fn gini_hat_examples() {
        let grid = Grid::default();
        assert_relative_eq!(
            gini_hat(&sample(&[1.0, 2.0, 3.0, 4.0]), CurveIndex::Lorenz, &grid).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        let c = sample(&[5.0; 10]);
        for index in CurveIndex::ALL {
            assert!(gini_hat(&c, index, &grid).unwrap().abs() < 1e-15, "{index:?}");
        }
        for p in [0.1, 0.5, 0.9] {
            assert_eq!(empirical_curve(&c, CurveIndex::Median, p).unwrap(), p);
        }
    }

    #[test]
    fn zero_denominators_are_errors() {
        let s = sample(&[0.0, 0.0, 0.0, 1.0]);
        assert_eq!(
            empirical_curve(&s, CurveIndex::Median, 0.5),
            Err(Error::ZeroDenominator("median"))
        );
        assert!(gini_hat(&s, CurveIndex::Median, &Grid::default()).is_err());
        // x_{1-p/2} reaches the zero median as p -> 1
        assert!(gini_hat(&s, CurveIndex::Upper, &Grid::default()).is_err());
        let t = sample(&[0.0, 0.0, 1.0, 1.0]);
        assert!(gini_hat(&t, CurveIndex::Upper, &Grid::default()).is_ok());
    }

    #[test]
    fn reads_income_files() {
        let text = "income\n# survey wave 3\n1.5\n\n2.5 # trailing comment\n3,extra\n";
        let s = Sample::from_reader(text.as_bytes()).unwrap();
        assert_eq!(s.values(), &[1.5, 2.5, 3.0]);
        let err = Sample::from_reader("1\n2\n-3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 3, .. }), "{err}");
        let err = Sample::from_reader("1\n2\nabc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 3, .. }), "{err}");
    }

    #[test]
    fn grid_points() {
        let g = Grid::new(4).unwrap();
        let p: Vec<f64> = g.iter().collect();
        assert_eq!(p, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(Grid::new(1).is_err());
    }

    proptest! {
        #[test]
        fn hf8_monotone_and_scale_equivariant(
            values in prop::collection::vec(0.0f64..1e6, 2..60),
            p1 in 0.001f64..0.999,
            p2 in 0.001f64..0.999,
            c in 0.01f64..100.0,
        ) {
            let s = Sample::new(values).unwrap();
            let (a, b) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            prop_assert!(hf8_quantile(&s, a).unwrap() <= hf8_quantile(&s, b).unwrap());
            let scaled = s.scaled(c).unwrap();
            let lhs = hf8_quantile(&scaled, a).unwrap();
            let rhs = c * hf8_quantile(&s, a).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn gini_hat_is_bounded_and_scale_invariant(
            values in prop::collection::vec(0.01f64..1e4, 2..40),
            power in -20i32..20,
        ) {
            let s = Sample::new(values).unwrap();
            // Powers of two rescale exactly in floating point.
            let c = 2f64.powi(power);
            let scaled = s.scaled(c).unwrap();
            let grid = Grid::new(200).unwrap();
            for index in CurveIndex::ALL {
                let g = gini_hat(&s, index, &grid).unwrap();
                prop_assert!((0.0..=1.0).contains(&g));
                prop_assert_eq!(g, gini_hat(&scaled, index, &grid).unwrap());
            }
        }
    }
}
