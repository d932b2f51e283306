//! Method of Equal Shares with exact prices and the limit form of its
//! completion by infinitesimal perturbation.
//!
//! Every voter starts with `B / n`. In the supporters phase a project is
//! affordable if its supporters can cover its cost; the affordable project
//! with the smallest price per unit of utility `rho` is bought, each
//! supporter paying `min(budget_i, rho * v_i(p))`. When nothing is
//! affordable any more, the completion phase spends what is left: giving
//! everyone value `epsilon` for every project and letting `epsilon -> 0`
//! means supporters pay all they have and non-supporters split the rest
//! equally up to a cap `x`, cheapest `x` first.

use std::cmp::Ordering;

use crate::aggregation::{tie_break, FundingStep, Outcome, PaymentLedger, Phase, Rule};
use crate::model::{Instance, ValuationProfile};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct MesState<S> {
    initial_share: S,
    budgets: Vec<S>,
    funded: Vec<usize>,
    steps: Vec<FundingStep<S>>,
}

impl<S: Scalar> MesState<S> {
    /// Everyone holds an equal share of the budget, nothing funded yet.
    pub fn new(instance: &Instance, valuations: &ValuationProfile) -> Self {
        let n = valuations.num_voters();
        let initial_share = if n == 0 {
            S::zero()
        } else {
            S::from_u64(instance.budget()) / S::from_u64(n as u64)
        };
        MesState { budgets: vec![initial_share.clone(); n], initial_share, funded: Vec::new(), steps: Vec::new() }
    }

    pub fn initial_share(&self) -> &S {
        &self.initial_share
    }

    /// Remaining virtual budget per voter.
    pub fn budgets(&self) -> &[S] {
        &self.budgets
    }

    /// Funded project indices in purchase order.
    pub fn funded(&self) -> &[usize] {
        &self.funded
    }

    pub fn steps(&self) -> &[FundingStep<S>] {
        &self.steps
    }

    pub fn total_remaining(&self) -> S {
        self.budgets.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    fn is_funded(&self, project: usize) -> bool {
        self.funded.contains(&project)
    }

    fn charge(&mut self, instance: &Instance, project: usize, phase: Phase, price: S, payments: Vec<S>) {
        for (b, pay) in self.budgets.iter_mut().zip(&payments) {
            *b = b.clone() - pay.clone();
            debug_assert!(!b.is_negative_value(), "voter budget went negative");
        }
        self.funded.push(project);
        self.steps.push(FundingStep { project: instance.projects()[project].id.clone(), phase, price, payments });
    }

    pub fn into_outcome(self, instance: &Instance, valuations: &ValuationProfile) -> Outcome<S> {
        let spent = self.steps.iter().flat_map(|s| s.payments.iter().cloned()).fold(S::zero(), |a, b| a + b);
        Outcome {
            rule: Rule::Mes,
            funded: self.steps.iter().map(|s| s.project.clone()).collect(),
            leftover: S::from_u64(instance.budget()) - spent,
            payments: Some(PaymentLedger {
                voters: valuations.voters().to_vec(),
                initial_share: self.initial_share,
                steps: self.steps,
            }),
        }
    }
}

/// Smallest `price` with `sum_i min(budget_i, price * weight_i) = target`,
/// over voters with positive weight. `None` if their budgets fall short.
pub(crate) fn solve_price<S: Scalar>(target: S, weights: &[u64], budgets: &[S]) -> Option<S> {
    debug_assert_eq!(weights.len(), budgets.len());
    let mut payers: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0).collect();
    let available = payers.iter().map(|&i| budgets[i].clone()).fold(S::zero(), |a, b| a + b);
    if available < target {
        return None;
    }
    // ascending budget_i / weight_i, compared without dividing
    payers.sort_by(|&a, &b| {
        let lhs = budgets[a].clone() * S::from_u64(weights[b]);
        let rhs = budgets[b].clone() * S::from_u64(weights[a]);
        lhs.partial_cmp(&rhs).unwrap_or(Ordering::Equal).then(a.cmp(&b))
    });
    let mut remaining = target;
    let mut weight_left: u64 = payers.iter().map(|&i| weights[i]).sum();
    for &i in &payers {
        let price = remaining.clone() / S::from_u64(weight_left);
        if price.clone() * S::from_u64(weights[i]) <= budgets[i] {
            return Some(price);
        }
        remaining = remaining - budgets[i].clone();
        weight_left -= weights[i];
    }
    // only reachable through floating-point rounding
    payers.last().map(|&i| budgets[i].clone() / S::from_u64(weights[i]))
}

/// Price per unit of utility at which the project's supporters can buy it,
/// or `None` if their combined budgets are below its cost.
pub fn mes_rho<S: Scalar>(cost: u64, column: &[u64], budgets: &[S]) -> Option<S> {
    solve_price(S::from_u64(cost), column, budgets)
}

fn pick_cheapest<S: Scalar>(instance: &Instance, candidates: Vec<(usize, S)>) -> Option<(usize, S)> {
    candidates.into_iter().min_by(|(a, pa), (b, pb)| {
        pa.partial_cmp(pb).unwrap_or(Ordering::Equal).then_with(|| tie_break(instance, *a, *b))
    })
}

/// Runs the supporters phase until no unfunded project is affordable by its supporters.
///
/// Budgets only shrink, so a project's `rho` never decreases and a project
/// that became unaffordable stays so. Earlier prices serve as lower bounds:
/// projects are re-priced in bound order until the next bound exceeds the
/// best price found.
pub fn supporters_phase<S: Scalar>(instance: &Instance, valuations: &ValuationProfile, state: &mut MesState<S>) {
    let columns: Vec<Vec<u64>> = (0..instance.len()).map(|j| valuations.column(j)).collect();
    let mut bounds: Vec<(usize, S)> = (0..instance.len())
        .filter(|&j| !state.is_funded(j))
        .filter_map(|j| mes_rho(instance.projects()[j].cost, &columns[j], &state.budgets).map(|rho| (j, rho)))
        .collect();
    loop {
        bounds.sort_by(|(a, pa), (b, pb)| pa.partial_cmp(pb).unwrap_or(Ordering::Equal).then_with(|| tie_break(instance, *a, *b)));
        let mut best: Option<(usize, S)> = None;
        let mut dropped = Vec::new();
        for slot in bounds.iter_mut() {
            if let Some((_, rho)) = &best {
                if slot.1 > *rho {
                    break;
                }
            }
            match mes_rho(instance.projects()[slot.0].cost, &columns[slot.0], &state.budgets) {
                None => dropped.push(slot.0),
                Some(rho) => {
                    slot.1 = rho.clone();
                    best = pick_cheapest(instance, best.into_iter().chain(std::iter::once((slot.0, rho))).collect());
                }
            }
        }
        bounds.retain(|(j, _)| !dropped.contains(j));
        let Some((j, rho)) = best else { break };
        bounds.retain(|(k, _)| *k != j);
        let payments = columns[j]
            .iter()
            .zip(&state.budgets)
            .map(|(&v, b)| if v == 0 { S::zero() } else { b.clone().min_of(rho.clone() * S::from_u64(v)) })
            .collect();
        state.charge(instance, j, Phase::Supporters, rho, payments);
    }
}

/// Completion phase, as the exact `epsilon -> 0` limit of perturbing every
/// utility by `epsilon`.
///
/// For an unfunded project, `slack = cost - (supporters' remaining funds)`;
/// it is fundable if non-supporters can cover `slack` with equal payments
/// capped at their budgets. The project with the smallest such cap `x` is
/// bought: supporters pay everything they have, non-supporters `min(budget, x)`.
pub fn mes_completion<S: Scalar>(instance: &Instance, valuations: &ValuationProfile, mut state: MesState<S>) -> MesState<S> {
    let columns: Vec<Vec<u64>> = (0..instance.len()).map(|j| valuations.column(j)).collect();
    loop {
        if state.total_remaining() <= S::zero() {
            break;
        }
        let mut candidates = Vec::new();
        for j in (0..instance.len()).filter(|&j| !state.is_funded(j)) {
            let column = &columns[j];
            let supporter_funds = column
                .iter()
                .zip(&state.budgets)
                .filter(|(&v, _)| v > 0)
                .fold(S::zero(), |acc, (_, b)| acc + b.clone());
            let slack = S::from_u64(instance.projects()[j].cost) - supporter_funds;
            assert!(slack > S::zero(), "completion started before the supporters phase finished");
            let outsiders: Vec<u64> = column.iter().map(|&v| u64::from(v == 0)).collect();
            if let Some(x) = solve_price(slack, &outsiders, &state.budgets) {
                candidates.push((j, x));
            }
        }
        let Some((j, x)) = pick_cheapest(instance, candidates) else { break };
        let payments = columns[j]
            .iter()
            .zip(&state.budgets)
            .map(|(&v, b)| if v > 0 { b.clone() } else { b.clone().min_of(x.clone()) })
            .collect();
        state.charge(instance, j, Phase::Completion, x, payments);
    }
    state
}

/// Equal Shares followed by completion, over any [`Scalar`].
pub fn run<S: Scalar>(instance: &Instance, valuations: &ValuationProfile) -> Outcome<S> {
    assert_eq!(valuations.num_projects(), instance.len(), "valuation columns must match instance projects");
    let mut state = MesState::new(instance, valuations);
    if valuations.num_voters() == 0 {
        log::warn!("equal shares over an empty profile funds nothing");
        return state.into_outcome(instance, valuations);
    }
    supporters_phase(instance, valuations, &mut state);
    mes_completion(instance, valuations, state).into_outcome(instance, valuations)
}

/// Equal Shares with completion, in exact rationals.
pub fn aggregate_mes(instance: &Instance, valuations: &ValuationProfile) -> crate::Outcome {
    run(instance, valuations)
}
