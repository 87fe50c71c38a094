//! Named model lists used by the reproduction tables.

use crate::distributions::DistributionModel;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub name: String,
    pub model: DistributionModel,
}

fn entry(name: &str, model: crate::Result<DistributionModel>) -> Entry {
    Entry {
        name: name.to_string(),
        model: model.expect("catalogue parameters are valid"),
    }
}

/// The fourteen reference models, in table order. Pareto rows are Type II
/// with unit scale.
pub fn reference_models() -> Vec<Entry> {
    vec![
        entry("Uniform", DistributionModel::uniform(1.0)),
        entry("ChiSq(0.5)", DistributionModel::chi_square(0.5)),
        entry("ChiSq(1)", DistributionModel::chi_square(1.0)),
        entry("ChiSq(3)", DistributionModel::chi_square(3.0)),
        entry("ChiSq(5)", DistributionModel::chi_square(5.0)),
        entry("Lognormal", DistributionModel::lognormal(1.0)),
        entry("Pareto(0.5)", DistributionModel::pareto_ii(0.5, 1.0)),
        entry("Pareto(1)", DistributionModel::pareto_ii(1.0, 1.0)),
        entry("Pareto(1.5)", DistributionModel::pareto_ii(1.5, 1.0)),
        entry("Pareto(2)", DistributionModel::pareto_ii(2.0, 1.0)),
        entry("Weibull(0.25)", DistributionModel::weibull(0.25, 1.0)),
        entry("Weibull(0.5)", DistributionModel::weibull(0.5, 1.0)),
        entry("Weibull(1)", DistributionModel::weibull(1.0, 1.0)),
        entry("Weibull(4)", DistributionModel::weibull(4.0, 1.0)),
    ]
}

/// The two models of the confidence-interval study.
pub fn interval_models() -> Vec<Entry> {
    vec![
        entry("Lognormal", DistributionModel::lognormal(1.0)),
        entry("Pareto(2)", DistributionModel::pareto_ii(2.0, 1.0)),
    ]
}

/// Looks up a reference model by its table name (case-insensitive).
pub fn find(name: &str) -> Option<Entry> {
    reference_models()
        .into_iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
}
