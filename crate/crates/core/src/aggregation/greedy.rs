use crate::aggregation::{tie_break, Outcome, Rule};
use crate::model::{project_scores, Instance, ValuationProfile};
use crate::scalar::Scalar;

/// Project indices in the order greedy considers them: score descending,
/// then cost ascending, then id ascending.
pub fn consideration_order(instance: &Instance, scores: &[u64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| scores[b].cmp(&scores[a]).then_with(|| tie_break(instance, a, b)));
    order
}

/// Indices funded by greedy, in selection order.
pub fn select(instance: &Instance, scores: &[u64]) -> Vec<usize> {
    assert_eq!(scores.len(), instance.len(), "one score per project");
    let mut remaining = instance.budget();
    let mut chosen = Vec::new();
    for j in consideration_order(instance, scores) {
        let cost = instance.projects()[j].cost;
        if cost <= remaining {
            remaining -= cost;
            chosen.push(j);
        }
    }
    chosen
}

pub fn outcome<S: Scalar>(instance: &Instance, valuations: &ValuationProfile) -> Outcome<S> {
    assert_eq!(valuations.num_projects(), instance.len(), "valuation columns must match instance projects");
    if valuations.num_voters() == 0 {
        log::warn!("greedy aggregation over an empty profile funds nothing");
        return Outcome::from_indices(Rule::Greedy, instance, &[]);
    }
    let chosen = select(instance, &project_scores(valuations));
    Outcome::from_indices(Rule::Greedy, instance, &chosen)
}

/// Funds projects in decreasing total score, skipping any that no longer fit.
pub fn aggregate_greedy(instance: &Instance, valuations: &ValuationProfile) -> crate::Outcome {
    outcome(instance, valuations)
}
