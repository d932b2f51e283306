use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ballot::{validate_ballot, Ballot, BallotViolation, Format, FormatParams};
use super::instance::Instance;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VoterId(String);

impl VoterId {
    pub fn new(id: impl Into<String>) -> Self {
        VoterId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VoterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VoterId {
    fn from(s: &str) -> Self {
        VoterId(s.to_string())
    }
}

impl From<String> for VoterId {
    fn from(s: String) -> Self {
        VoterId(s)
    }
}

/// A ballot together with its voter and optional consistency-check result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallotEntry {
    pub voter: VoterId,
    pub ballot: Ballot,
    pub consistent: Option<bool>,
}

impl From<(VoterId, Ballot)> for BallotEntry {
    fn from((voter, ballot): (VoterId, Ballot)) -> Self {
        BallotEntry { voter, ballot, consistent: None }
    }
}

/// A ballot problem located at a row (0-based position among the ballots).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("row {row} (voter `{voter}`): {violation}")]
pub struct RowError {
    pub row: usize,
    pub voter: VoterId,
    pub violation: BallotViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("k-approval profile requires the k parameter")]
    MissingK,
    #[error("threshold-approval profile requires the t parameter")]
    MissingThreshold,
    #[error("duplicate voter id `{0}`")]
    DuplicateVoter(VoterId),
    #[error("{} invalid ballot(s); first: {}", .0.len(), .0[0])]
    InvalidBallots(Vec<RowError>),
}

/// All ballots cast in one format for one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    instance: Arc<Instance>,
    format: Format,
    params: FormatParams,
    entries: Vec<BallotEntry>,
    election: Option<String>,
}

impl Profile {
    pub fn new(
        instance: impl Into<Arc<Instance>>,
        format: Format,
        params: FormatParams,
        ballots: Vec<(VoterId, Ballot)>,
    ) -> Result<Self, ProfileError> {
        Self::with_entries(instance, format, params, ballots.into_iter().map(BallotEntry::from).collect())
    }

    /// Validates every ballot, collecting all row errors rather than stopping at the first.
    pub fn with_entries(
        instance: impl Into<Arc<Instance>>,
        format: Format,
        params: FormatParams,
        entries: Vec<BallotEntry>,
    ) -> Result<Self, ProfileError> {
        let instance = instance.into();
        match format {
            Format::KApproval if params.k.is_none() => return Err(ProfileError::MissingK),
            Format::ThresholdApproval if params.t.is_none() => return Err(ProfileError::MissingThreshold),
            _ => {}
        }
        let mut voters = HashSet::with_capacity(entries.len());
        for e in &entries {
            if !voters.insert(&e.voter) {
                return Err(ProfileError::DuplicateVoter(e.voter.clone()));
            }
        }
        let errors: Vec<RowError> = entries
            .iter()
            .enumerate()
            .filter_map(|(row, e)| {
                let found = e.ballot.format();
                let verdict = if found != format {
                    Err(BallotViolation::FormatMismatch { expected: format, found })
                } else {
                    validate_ballot(&instance, &params, &e.ballot)
                };
                verdict.err().map(|violation| RowError { row, voter: e.voter.clone(), violation })
            })
            .collect();
        if !errors.is_empty() {
            return Err(ProfileError::InvalidBallots(errors));
        }
        if entries.is_empty() {
            log::warn!("profile in format {} has no ballots", format);
        }
        Ok(Profile { election: instance.election().map(str::to_string), instance, format, params, entries })
    }

    pub fn with_election(mut self, election: impl Into<String>) -> Self {
        self.election = Some(election.into());
        self
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn shared_instance(&self) -> &Arc<Instance> {
        &self.instance
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn params(&self) -> &FormatParams {
        &self.params
    }

    pub fn election(&self) -> Option<&str> {
        self.election.as_deref()
    }

    pub fn entries(&self) -> &[BallotEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when at least one ballot carries a consistency flag.
    pub fn has_consistency_metadata(&self) -> bool {
        self.entries.iter().any(|e| e.consistent.is_some())
    }

    /// Indices of the ballots eligible for sampling: those marked consistent
    /// when consistency metadata is present, otherwise all of them.
    pub fn sampling_pool(&self) -> Vec<usize> {
        if self.has_consistency_metadata() {
            (0..self.entries.len()).filter(|&i| self.entries[i].consistent == Some(true)).collect()
        } else {
            (0..self.entries.len()).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Project;

    fn instance() -> Instance {
        Instance::new(vec![Project::synthetic("a", 3), Project::synthetic("b", 4)], 5).unwrap()
    }

    #[test]
    fn collects_every_row_error() {
        let ballots = vec![
            ("v1".into(), Ballot::Knapsack(vec!["a".into()])),
            ("v2".into(), Ballot::Knapsack(vec!["a".into(), "b".into()])),
            ("v3".into(), Ballot::Knapsack(vec!["zz".into()])),
        ];
        let Err(ProfileError::InvalidBallots(errs)) = Profile::new(instance(), Format::Knapsack, FormatParams::default(), ballots) else {
            panic!("expected row errors");
        };
        assert_eq!(errs.iter().map(|e| e.row).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(errs[0].violation, BallotViolation::KnapsackOverBudget { total: 7, budget: 5 });
    }

    #[test]
    fn rejects_mixed_formats_and_duplicate_voters() {
        let mixed = vec![("v1".into(), Ballot::Rank(vec!["a".into(), "b".into()]))];
        assert!(matches!(
            Profile::new(instance(), Format::ValueForMoney, FormatParams::default(), mixed),
            Err(ProfileError::InvalidBallots(_))
        ));
        let dup = vec![("v1".into(), Ballot::Knapsack(vec![])), ("v1".into(), Ballot::Knapsack(vec![]))];
        assert_eq!(
            Profile::new(instance(), Format::Knapsack, FormatParams::default(), dup).unwrap_err(),
            ProfileError::DuplicateVoter("v1".into())
        );
    }

    #[test]
    fn approval_formats_require_params() {
        assert_eq!(Profile::new(instance(), Format::KApproval, FormatParams::default(), vec![]).unwrap_err(), ProfileError::MissingK);
        assert_eq!(
            Profile::new(instance(), Format::ThresholdApproval, FormatParams::k(2), vec![]).unwrap_err(),
            ProfileError::MissingThreshold
        );
    }

    #[test]
    fn sampling_pool_prefers_consistent_voters() {
        let entries = vec![
            BallotEntry { voter: "v1".into(), ballot: Ballot::Knapsack(vec![]), consistent: Some(true) },
            BallotEntry { voter: "v2".into(), ballot: Ballot::Knapsack(vec![]), consistent: Some(false) },
            BallotEntry { voter: "v3".into(), ballot: Ballot::Knapsack(vec![]), consistent: None },
        ];
        let p = Profile::with_entries(instance(), Format::Knapsack, FormatParams::default(), entries).unwrap();
        assert_eq!(p.sampling_pool(), vec![0]);
        let plain = Profile::new(instance(), Format::Knapsack, FormatParams::default(), vec![("v1".into(), Ballot::Knapsack(vec![]))]).unwrap();
        assert_eq!(plain.sampling_pool(), vec![0]);
    }
}
