use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::instance::{Instance, ProjectId};

/// Total number of points a `Points` voter distributes.
pub const POINTS_TOTAL: u64 = 100;

/// The six ballot languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Points,
    #[serde(rename = "kapp")]
    KApproval,
    #[serde(rename = "tapp")]
    ThresholdApproval,
    #[serde(rename = "knap")]
    Knapsack,
    Rank,
    #[serde(rename = "vfm")]
    ValueForMoney,
}

impl Format {
    pub const ALL: [Format; 6] = [
        Format::Points,
        Format::KApproval,
        Format::ThresholdApproval,
        Format::Knapsack,
        Format::Rank,
        Format::ValueForMoney,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Format::Points => "points",
            Format::KApproval => "kapp",
            Format::ThresholdApproval => "tapp",
            Format::Knapsack => "knap",
            Format::Rank => "rank",
            Format::ValueForMoney => "vfm",
        }
    }

    /// Approval-style formats whose proxy valuations are 0/1 indicators.
    pub fn is_binary(self) -> bool {
        matches!(self, Format::KApproval | Format::ThresholdApproval | Format::Knapsack)
    }

    pub fn is_ranking(self) -> bool {
        matches!(self, Format::Rank | Format::ValueForMoney)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown ballot format `{0}` (expected one of points, kapp, tapp, knap, rank, vfm)")]
pub struct UnknownFormat(pub String);

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Format::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownFormat(s.to_string()))
    }
}

/// Per-profile format parameters. `k` bounds k-approval ballots; the
/// threshold `t` is recorded but never used computationally.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
}

impl FormatParams {
    pub fn k(k: u32) -> Self {
        FormatParams { k: Some(k), t: None }
    }

    pub fn t(t: u32) -> Self {
        FormatParams { k: None, t: Some(t) }
    }
}

/// One voter's ballot, in one of the six formats.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "format", content = "payload", rename_all = "lowercase")]
pub enum Ballot {
    /// Points per project; omitted projects get zero.
    Points(Vec<(ProjectId, u32)>),
    #[serde(rename = "kapp")]
    KApproval(Vec<ProjectId>),
    #[serde(rename = "tapp")]
    ThresholdApproval(Vec<ProjectId>),
    #[serde(rename = "knap")]
    Knapsack(Vec<ProjectId>),
    /// Projects from most to least valued.
    Rank(Vec<ProjectId>),
    /// Projects from best to worst value for money.
    #[serde(rename = "vfm")]
    ValueForMoney(Vec<ProjectId>),
}

impl Ballot {
    pub fn format(&self) -> Format {
        match self {
            Ballot::Points(_) => Format::Points,
            Ballot::KApproval(_) => Format::KApproval,
            Ballot::ThresholdApproval(_) => Format::ThresholdApproval,
            Ballot::Knapsack(_) => Format::Knapsack,
            Ballot::Rank(_) => Format::Rank,
            Ballot::ValueForMoney(_) => Format::ValueForMoney,
        }
    }

    /// Builds a ballot of `format` from a list of ids (all formats but `Points`).
    pub fn from_ids(format: Format, ids: Vec<ProjectId>) -> Option<Ballot> {
        Some(match format {
            Format::Points => return None,
            Format::KApproval => Ballot::KApproval(ids),
            Format::ThresholdApproval => Ballot::ThresholdApproval(ids),
            Format::Knapsack => Ballot::Knapsack(ids),
            Format::Rank => Ballot::Rank(ids),
            Format::ValueForMoney => Ballot::ValueForMoney(ids),
        })
    }

    /// The id list of set and ranking ballots; `None` for points.
    pub fn ids(&self) -> Option<&[ProjectId]> {
        match self {
            Ballot::Points(_) => None,
            Ballot::KApproval(ids)
            | Ballot::ThresholdApproval(ids)
            | Ballot::Knapsack(ids)
            | Ballot::Rank(ids)
            | Ballot::ValueForMoney(ids) => Some(ids),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BallotViolation {
    #[error("unknown project id `{0}`")]
    UnknownProject(ProjectId),
    #[error("project `{0}` appears more than once")]
    DuplicateProject(ProjectId),
    #[error("points sum to {total}, expected {POINTS_TOTAL}")]
    PointsSum { total: u64 },
    #[error("approval count {count} exceeds k = {k}")]
    ApprovalCountExceedsK { count: usize, k: u32 },
    #[error("k-approval ballot checked without a k parameter")]
    MissingK,
    #[error("cost {total} exceeds budget {budget}")]
    KnapsackOverBudget { total: u64, budget: u64 },
    #[error("ranking is not a permutation of the {expected} projects ({missing} missing)")]
    NotAPermutation { expected: usize, missing: usize },
    #[error("ballot has format {found}, profile expects {expected}")]
    FormatMismatch { expected: Format, found: Format },
}

/// Checks one ballot against the instance and the format's own constraint.
pub fn validate_ballot(instance: &Instance, params: &FormatParams, ballot: &Ballot) -> Result<(), BallotViolation> {
    if let Ballot::Points(alloc) = ballot {
        let mut seen = HashSet::with_capacity(alloc.len());
        for (id, _) in alloc {
            check_known(instance, id)?;
            if !seen.insert(id) {
                return Err(BallotViolation::DuplicateProject(id.clone()));
            }
        }
        let total: u64 = alloc.iter().map(|(_, pts)| u64::from(*pts)).sum();
        if total != POINTS_TOTAL {
            return Err(BallotViolation::PointsSum { total });
        }
        return Ok(());
    }

    let ids = ballot.ids().expect("non-points ballot carries ids");
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        check_known(instance, id)?;
        if !seen.insert(id) {
            return Err(BallotViolation::DuplicateProject(id.clone()));
        }
    }

    match ballot {
        Ballot::KApproval(ids) => {
            let k = params.k.ok_or(BallotViolation::MissingK)?;
            if ids.len() > k as usize {
                return Err(BallotViolation::ApprovalCountExceedsK { count: ids.len(), k });
            }
        }
        Ballot::Knapsack(ids) => {
            let total = instance.cost_of(ids).expect("ids checked above");
            if total > instance.budget() {
                return Err(BallotViolation::KnapsackOverBudget { total, budget: instance.budget() });
            }
        }
        Ballot::Rank(ids) | Ballot::ValueForMoney(ids) => {
            if ids.len() != instance.len() {
                return Err(BallotViolation::NotAPermutation {
                    expected: instance.len(),
                    missing: instance.len() - ids.len(),
                });
            }
        }
        Ballot::ThresholdApproval(_) | Ballot::Points(_) => {}
    }
    Ok(())
}

fn check_known(instance: &Instance, id: &ProjectId) -> Result<(), BallotViolation> {
    match instance.index_of(id) {
        Some(_) => Ok(()),
        None => Err(BallotViolation::UnknownProject(id.clone())),
    }
}
