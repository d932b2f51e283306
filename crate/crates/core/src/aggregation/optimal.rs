//! Exact welfare-maximizing outcome via 0/1 knapsack over the budget.

use crate::aggregation::{AggregationError, Outcome, Rule};
use crate::model::{project_scores, Instance, ValuationProfile};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_TABLE_CELLS: u128 = 20_000_000;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Indices of the welfare-maximizing feasible set.
///
/// Among maximizers the set preferring lower project ids wins: projects are
/// visited in id order and each is included whenever some optimal completion
/// still contains it.
pub fn solve(instance: &Instance, scores: &[u64], max_cells: u128) -> Result<Vec<usize>, AggregationError> {
    assert_eq!(scores.len(), instance.len(), "one score per project");
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by(|&a, &b| instance.projects()[a].id.cmp(&instance.projects()[b].id));

    let costs: Vec<u64> = order.iter().map(|&j| instance.projects()[j].cost).collect();
    let total_cost: u64 = costs.iter().sum();
    let capacity = instance.budget().min(total_cost);
    let unit = costs.iter().fold(capacity, |g, &c| gcd(g, c)).max(1);
    let weights: Vec<usize> = costs.iter().map(|&c| (c / unit) as usize).collect();
    let cap = (capacity / unit) as usize;

    let m = order.len();
    let cells = (m as u128 + 1) * (cap as u128 + 1);
    if cells > max_cells {
        return Err(AggregationError::KnapsackTooLarge { cells, cap: max_cells });
    }

    // best[k][b]: max score from order[k..] within capacity b
    let width = cap + 1;
    let mut best = vec![0u64; (m + 1) * width];
    for k in (0..m).rev() {
        let score = scores[order[k]];
        for b in 0..width {
            let skip = best[(k + 1) * width + b];
            let take = if weights[k] <= b { score + best[(k + 1) * width + b - weights[k]] } else { 0 };
            best[k * width + b] = if weights[k] <= b { skip.max(take) } else { skip };
        }
    }

    let mut chosen = Vec::new();
    let mut b = cap;
    for k in 0..m {
        if weights[k] <= b && scores[order[k]] + best[(k + 1) * width + b - weights[k]] == best[k * width + b] {
            chosen.push(order[k]);
            b -= weights[k];
        }
    }
    Ok(chosen)
}

pub fn outcome<S: Scalar>(instance: &Instance, valuations: &ValuationProfile, max_cells: u128) -> Result<Outcome<S>, AggregationError> {
    assert_eq!(valuations.num_projects(), instance.len(), "valuation columns must match instance projects");
    let chosen = solve(instance, &project_scores(valuations), max_cells)?;
    Ok(Outcome::from_indices(Rule::Optimal, instance, &chosen))
}

/// Budget-feasible set of maximum total score.
pub fn optimal_welfare_outcome(instance: &Instance, valuations: &ValuationProfile) -> Result<crate::Outcome, AggregationError> {
    outcome(instance, valuations, DEFAULT_MAX_TABLE_CELLS)
}
