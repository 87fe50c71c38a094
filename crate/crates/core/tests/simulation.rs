use qlorenz::catalogue;
use qlorenz::influence::asymptotic_se;
use qlorenz::quadrature::QuadratureSpec;
use qlorenz::rng::mix_seed;
use qlorenz::simulation::{ci_study, sample_size_for_se, se_study, StudyConfig, Z_95};
use qlorenz::{CurveIndex, DistributionModel};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    let m = DistributionModel::lognormal(1.0).unwrap();
    let config = StudyConfig::new(CurveIndex::ALL.to_vec(), vec![20, 60], 64, 99).unwrap();
    let one = in_pool(1, || se_study(&m, &config).unwrap());
    let four = in_pool(4, || se_study(&m, &config).unwrap());
    assert_eq!(one, four);
    let quad = QuadratureSpec::default();
    let s1 = in_pool(1, || asymptotic_se(&m, CurveIndex::Upper, &quad).unwrap());
    let s4 = in_pool(4, || asymptotic_se(&m, CurveIndex::Upper, &quad).unwrap());
    assert_eq!(s1.to_bits(), s4.to_bits());
}

#[test]
fn seeds_select_distinct_streams() {
    let m = DistributionModel::weibull(1.0, 1.0).unwrap();
    let a = se_study(
        &m,
        &StudyConfig::new(vec![CurveIndex::Median], vec![30], 50, 1).unwrap(),
    )
    .unwrap();
    let b = se_study(
        &m,
        &StudyConfig::new(vec![CurveIndex::Median], vec![30], 50, 2).unwrap(),
    )
    .unwrap();
    assert_ne!(a.cells[0].mean, b.cells[0].mean);
}

#[test]
fn large_sample_errors_approach_the_asymptotic_values() {
    let quad = QuadratureSpec::default();
    for (k, m) in catalogue::reference_models().iter().enumerate() {
        let config = StudyConfig::new(
            vec![CurveIndex::Upper, CurveIndex::Midrange],
            vec![1600],
            300,
            mix_seed(7, k as u64),
        )
        .unwrap();
        let result = se_study(&m.model, &config).unwrap();
        for index in [CurveIndex::Upper, CurveIndex::Midrange] {
            let mc = result.cell(index, 1600).unwrap().root_n_se;
            let sigma = asymptotic_se(&m.model, index, &quad).unwrap();
            assert!((0.13..=0.55).contains(&mc), "{} G{}: {mc}", m.name, index.number());
            assert!(
                (mc - sigma).abs() <= 0.05,
                "{} G{}: {mc} vs {sigma}",
                m.name,
                index.number()
            );
        }
    }
}

#[test]
fn bias_shrinks_with_the_sample_size() {
    let m = DistributionModel::chi_square(0.5).unwrap();
    let config = StudyConfig::new(vec![CurveIndex::Median], vec![25, 400], 2000, 11).unwrap();
    let result = se_study(&m, &config).unwrap();
    let small = result.cell(CurveIndex::Median, 25).unwrap().bias.abs();
    let large = result.cell(CurveIndex::Median, 400).unwrap().bias.abs();
    assert!(large < small / 4.0, "{small} vs {large}");
}

#[test]
fn interval_width_follows_the_sigma() {
    let m = DistributionModel::lognormal(1.0).unwrap();
    let config = StudyConfig::new(vec![CurveIndex::Upper], vec![100], 200, 5).unwrap();
    let result = ci_study(&m, &config, &[0.351]).unwrap();
    let cell = result.cell(CurveIndex::Upper, 100).unwrap();
    assert!((cell.width.unwrap() - 2.0 * Z_95 * 0.351 / 10.0).abs() < 1e-12);
    let coverage = cell.coverage.unwrap();
    assert!((0.85..=1.0).contains(&coverage), "{coverage}");
}

#[test]
fn intervals_need_quantile_indices_and_positive_sigma() {
    let m = DistributionModel::uniform(1.0).unwrap();
    let lorenz = StudyConfig::new(vec![CurveIndex::Lorenz], vec![10], 10, 1).unwrap();
    assert!(ci_study(&m, &lorenz, &[0.3]).is_err());
    let upper = StudyConfig::new(vec![CurveIndex::Upper], vec![10], 10, 1).unwrap();
    assert!(ci_study(&m, &upper, &[0.0]).is_err());
}

#[test]
fn invalid_configurations_are_rejected() {
    assert!(StudyConfig::new(vec![], vec![10], 10, 1).is_err());
    assert!(StudyConfig::new(vec![CurveIndex::Median], vec![1], 10, 1).is_err());
    assert!(StudyConfig::new(vec![CurveIndex::Median], vec![10], 1, 1).is_err());
    assert!(StudyConfig::new(vec![CurveIndex::Median], vec![10], 10, 1)
        .unwrap()
        .with_grid(0)
        .is_err());
}

#[test]
fn sample_size_rules() {
    assert_eq!(sample_size_for_se(0.01, CurveIndex::Median).unwrap(), 3025);
    assert_eq!(sample_size_for_se(0.01, CurveIndex::Upper).unwrap(), 1849);
    assert_eq!(sample_size_for_se(0.01, CurveIndex::Midrange).unwrap(), 1849);
    assert_eq!(sample_size_for_se(0.05, CurveIndex::Median).unwrap(), 121);
    assert!(sample_size_for_se(0.01, CurveIndex::Lorenz).is_err());
    assert!(sample_size_for_se(0.0, CurveIndex::Median).is_err());
}
