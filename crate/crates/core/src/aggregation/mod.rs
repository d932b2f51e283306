//! Aggregation rules mapping a valuation profile to a budget-feasible outcome.

pub mod greedy;
pub mod mes;
pub mod optimal;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, ProjectId, ValuationProfile, VoterId};
use crate::scalar::Scalar;

pub use greedy::aggregate_greedy;
pub use mes::{aggregate_mes, mes_completion, mes_rho};
pub use optimal::{optimal_welfare_outcome, DEFAULT_MAX_TABLE_CELLS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Greedy,
    Mes,
    /// Exact welfare maximizer; a reference point, not a voting rule.
    Optimal,
}

impl Rule {
    pub fn tag(self) -> &'static str {
        match self {
            Rule::Greedy => "greedy",
            Rule::Mes => "mes",
            Rule::Optimal => "optimal",
        }
    }

    /// Runs the rule with exact rational bookkeeping.
    pub fn apply(self, instance: &Instance, valuations: &ValuationProfile) -> Result<crate::Outcome, AggregationError> {
        match self {
            Rule::Greedy => Ok(aggregate_greedy(instance, valuations)),
            Rule::Mes => Ok(aggregate_mes(instance, valuations)),
            Rule::Optimal => optimal_welfare_outcome(instance, valuations),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Rule {
    type Err = AggregationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "greedy" => Ok(Rule::Greedy),
            "mes" | "es" | "equal-shares" => Ok(Rule::Mes),
            "optimal" | "oracle" => Ok(Rule::Optimal),
            _ => Err(AggregationError::UnknownRule(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AggregationError {
    #[error("unknown rule `{0}` (expected greedy, mes or optimal)")]
    UnknownRule(String),
    #[error("knapsack table needs {cells} cells, above the cap of {cap}")]
    KnapsackTooLarge { cells: u128, cap: u128 },
}

/// Equal Shares phase in which a project was bought.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    /// Paid for by supporters alone at price-per-utility `rho`.
    Supporters,
    /// Completion: supporters spend everything, non-supporters top up to `x` each.
    Completion,
}

impl Phase {
    pub fn number(self) -> u8 {
        match self {
            Phase::Supporters => 1,
            Phase::Completion => 2,
        }
    }
}

/// One Equal Shares purchase: which project, at what price, who paid what.
#[derive(Clone, Debug, PartialEq)]
pub struct FundingStep<S> {
    pub project: ProjectId,
    pub phase: Phase,
    /// `rho` in the supporters phase, the per-voter cap `x` in completion.
    pub price: S,
    /// Payment of each voter, indexed like the ledger's voters.
    pub payments: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PaymentLedger<S> {
    pub voters: Vec<VoterId>,
    pub initial_share: S,
    pub steps: Vec<FundingStep<S>>,
}

impl<S: Scalar> PaymentLedger<S> {
    /// What voter `i` paid towards `project`; zero for unfunded projects.
    pub fn payment(&self, voter: usize, project: &ProjectId) -> S {
        self.steps
            .iter()
            .find(|s| &s.project == project)
            .map(|s| s.payments[voter].clone())
            .unwrap_or_else(S::zero)
    }

    pub fn voter_total(&self, voter: usize) -> S {
        self.steps.iter().fold(S::zero(), |acc, s| acc + s.payments[voter].clone())
    }

    pub fn project_total(&self, project: &ProjectId) -> S {
        self.steps
            .iter()
            .filter(|s| &s.project == project)
            .flat_map(|s| s.payments.iter().cloned())
            .fold(S::zero(), |a, b| a + b)
    }

    pub fn total(&self) -> S {
        self.steps.iter().flat_map(|s| s.payments.iter().cloned()).fold(S::zero(), |a, b| a + b)
    }
}

/// A funded set plus rule-specific bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<S> {
    pub rule: Rule,
    /// Funded projects in the order the rule selected them.
    pub funded: Vec<ProjectId>,
    /// Unspent budget.
    pub leftover: S,
    /// Equal Shares only.
    pub payments: Option<PaymentLedger<S>>,
}

impl<S: Scalar> Outcome<S> {
    pub(crate) fn from_indices(rule: Rule, instance: &Instance, chosen: &[usize]) -> Self {
        let spent: u64 = chosen.iter().map(|&j| instance.projects()[j].cost).sum();
        Outcome {
            rule,
            funded: chosen.iter().map(|&j| instance.projects()[j].id.clone()).collect(),
            leftover: S::from_u64(instance.budget() - spent),
            payments: None,
        }
    }

    pub fn funded_set(&self) -> BTreeSet<ProjectId> {
        self.funded.iter().cloned().collect()
    }

    /// Total cost of the funded projects.
    pub fn cost(&self, instance: &Instance) -> u64 {
        instance.cost_of(&self.funded).expect("outcome references instance projects")
    }

    pub fn is_feasible(&self, instance: &Instance) -> bool {
        self.cost(instance) <= instance.budget()
    }
}

/// Ordering key shared by every rule: better primary value, then lower cost, then lower id.
pub(crate) fn tie_break(instance: &Instance, a: usize, b: usize) -> std::cmp::Ordering {
    let (pa, pb) = (&instance.projects()[a], &instance.projects()[b]);
    pa.cost.cmp(&pb.cost).then_with(|| pa.id.cmp(&pb.id))
}
