use proptest::prelude::*;
use qlorenz::coefficients::coefficient;
use qlorenz::curves::{curve_value, lorenz_value};
use qlorenz::empirical::gini_hat;
use qlorenz::transfer::{quantile_curve, transfer_effect, verify_median_preserving, TransferredDistribution};
use qlorenz::{CurveIndex, DistributionModel, Grid, HeavyTailPolicy, RandomStream};

fn model() -> impl Strategy<Value = DistributionModel> {
    prop_oneof![
        (0.2..8.0_f64).prop_map(|k| DistributionModel::chi_square(k).unwrap()),
        (0.2..2.0_f64).prop_map(|s| DistributionModel::lognormal(s).unwrap()),
        (0.3..6.0_f64).prop_map(|a| DistributionModel::pareto_ii(a, 1.0).unwrap()),
        (0.3..6.0_f64).prop_map(|a| DistributionModel::pareto_i(a, 1.0).unwrap()),
        (0.2..6.0_f64).prop_map(|b| DistributionModel::weibull(b, 1.0).unwrap()),
        Just(DistributionModel::uniform(1.0).unwrap()),
    ]
}

fn finite_mean_model() -> impl Strategy<Value = DistributionModel> {
    model().prop_filter("finite mean", |m| !m.mean().is_infinite())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn quantile_curves_lie_below_the_diagonal_and_increase(m in model(), p in 0.001..0.998_f64, dp in 0.0005..0.5_f64) {
        let q = (p + dp).min(0.999);
        for index in CurveIndex::QUANTILE {
            let a = curve_value(&m, index, p).unwrap();
            let b = curve_value(&m, index, q).unwrap();
            prop_assert!(a <= p * (1.0 + 1e-12), "L{}({p}) = {a}", index.number());
            prop_assert!(a >= 0.0);
            prop_assert!(a <= b * (1.0 + 1e-12), "L{} decreases between {p} and {q}", index.number());
        }
    }

    #[test]
    fn lorenz_curve_lies_below_the_diagonal(m in finite_mean_model(), p in 0.001..0.999_f64) {
        let l = lorenz_value(&m, p, HeavyTailPolicy::Error).unwrap();
        prop_assert!(l <= p * (1.0 + 1e-10) && l >= 0.0);
    }

    #[test]
    fn upper_coefficient_dominates(m in model()) {
        let g: Vec<f64> = CurveIndex::QUANTILE.iter().map(|&i| coefficient(&m, i, 400).unwrap()).collect();
        prop_assert!(g[0] <= g[1] + 1e-12);
        prop_assert!(g[2] <= g[1] + 1e-12);
    }

    #[test]
    fn estimates_are_exactly_scale_invariant(m in model(), seed in any::<u64>(), n in 2usize..300, k in -20i32..20) {
        let sample = m.sample(n, &mut RandomStream::new(seed)).unwrap();
        let scaled = sample.scaled(2f64.powi(k)).unwrap();
        let grid = Grid::new(200).unwrap();
        for index in CurveIndex::ALL {
            prop_assert_eq!(gini_hat(&sample, index, &grid).unwrap(), gini_hat(&scaled, index, &grid).unwrap());
        }
    }

    #[test]
    fn estimates_are_scale_invariant_for_any_factor(m in model(), seed in any::<u64>(), factor in 1e-3..1e3_f64) {
        let sample = m.sample(50, &mut RandomStream::new(seed)).unwrap();
        let scaled = sample.scaled(factor).unwrap();
        let grid = Grid::new(200).unwrap();
        for index in CurveIndex::ALL {
            let a = gini_hat(&sample, index, &grid).unwrap();
            let b = gini_hat(&scaled, index, &grid).unwrap();
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn levy_raises_every_quantile_curve(m in finite_mean_model(), p0 in 0.01..0.49_f64, p in 0.001..0.999_f64) {
        let t = TransferredDistribution::levy(&m, p0).unwrap();
        for index in CurveIndex::QUANTILE {
            let before = curve_value(&m, index, p).unwrap();
            let after = quantile_curve(&t, index, p).unwrap();
            prop_assert!(before <= after * (1.0 + 1e-12), "L{}: {before} > {after}", index.number());
        }
        let ys: Vec<f64> = (1..100).map(|k| m.quantile(k as f64 / 100.0).unwrap()).collect();
        let report = verify_median_preserving(&m, &t, &ys).unwrap();
        prop_assert!(report.holds(), "{report:?}");
        prop_assert!((report.median_before - report.median_after).abs() <= 1e-9 * report.median_before);
    }

    #[test]
    fn levy_lowers_every_coefficient(m in finite_mean_model(), p0 in 0.01..0.49_f64) {
        let effect = transfer_effect(&m, &[p0], 400).unwrap();
        for d in effect[0].absolute {
            prop_assert!(d >= -1e-12, "{effect:?}");
        }
    }

    #[test]
    fn transferred_quantile_and_cdf_are_inverse(m in finite_mean_model(), p0 in 0.01..0.49_f64, u in 0.01..0.99_f64) {
        let t = TransferredDistribution::levy(&m, p0).unwrap();
        let y = t.quantile(u).unwrap();
        let back = t.cdf(y);
        prop_assert!(back >= u - 1e-9, "u = {u}, F_Y(Q_Y(u)) = {back}");
        let spec = t.spec();
        if u <= t.lower_mass() {
            prop_assert!((y - spec.b).abs() <= 1e-12 * spec.b);
        } else if u >= t.levy_start() && u <= t.levy_full() {
            prop_assert!((y - spec.c).abs() <= 1e-9 * spec.c);
        } else {
            prop_assert!((back - u).abs() <= 1e-8, "u = {u}, F_Y(Q_Y(u)) = {back}");
        }
    }
}

#[test]
fn larger_levies_lower_the_quantile_coefficients_further() {
    let m = DistributionModel::lognormal(1.0).unwrap();
    let p0: Vec<f64> = (1..=49).map(|k| k as f64 * 0.01).collect();
    let effects = transfer_effect(&m, &p0, 1000).unwrap();
    for w in effects.windows(2) {
        for i in 1..4 {
            assert!(w[1].absolute[i] >= w[0].absolute[i] - 1e-12, "G{i} at p0 = {}", w[1].p0);
        }
    }
}
