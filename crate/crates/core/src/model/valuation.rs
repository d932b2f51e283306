use serde::{Deserialize, Serialize};

use super::ballot::Ballot;
use super::instance::ProjectId;
use super::profile::{Profile, ProfileError, RowError, VoterId};
use crate::model::validate_ballot;

/// How ballots are mapped onto integer proxy utilities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValuationScheme {
    /// Points as given, 0/1 indicators for approval formats, Borda scores for rankings.
    #[default]
    Proxy,
    /// Like `Proxy`, but approval formats give an approved project its cost instead of 1.
    CostScaled,
}

/// The n x m matrix of proxy utilities, columns in instance project order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationProfile {
    voters: Vec<VoterId>,
    projects: Vec<ProjectId>,
    rows: Vec<Vec<u64>>,
}

impl ValuationProfile {
    /// Builds a profile directly from a matrix; panics if a row has the wrong width.
    pub fn from_rows(voters: Vec<VoterId>, projects: Vec<ProjectId>, rows: Vec<Vec<u64>>) -> Self {
        assert_eq!(voters.len(), rows.len(), "one row per voter");
        assert!(rows.iter().all(|r| r.len() == projects.len()), "row width must equal project count");
        ValuationProfile { voters, projects, rows }
    }

    /// Anonymous voters `v0, v1, ...` over the given project ids.
    pub fn anonymous(projects: Vec<ProjectId>, rows: Vec<Vec<u64>>) -> Self {
        let voters = (0..rows.len()).map(|i| VoterId::new(format!("v{i}"))).collect();
        Self::from_rows(voters, projects, rows)
    }

    pub fn voters(&self) -> &[VoterId] {
        &self.voters
    }

    pub fn projects(&self) -> &[ProjectId] {
        &self.projects
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn num_voters(&self) -> usize {
        self.rows.len()
    }

    pub fn num_projects(&self) -> usize {
        self.projects.len()
    }

    pub fn value(&self, voter: usize, project: usize) -> u64 {
        self.rows[voter][project]
    }

    /// One project's column.
    pub fn column(&self, project: usize) -> Vec<u64> {
        self.rows.iter().map(|r| r[project]).collect()
    }

    /// Restriction to the given voter rows, in the given order.
    pub fn select_voters(&self, indices: &[usize]) -> ValuationProfile {
        ValuationProfile {
            voters: indices.iter().map(|&i| self.voters[i].clone()).collect(),
            projects: self.projects.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> ValuationProfile {
        ValuationProfile {
            voters: self.voters.clone(),
            projects: self.projects.clone(),
            rows: self.rows.iter().map(|r| r.iter().map(|v| v * factor).collect()).collect(),
        }
    }
}

pub fn derive_valuations(profile: &Profile) -> Result<ValuationProfile, ProfileError> {
    derive_valuations_with(profile, ValuationScheme::Proxy)
}

/// Maps every ballot to a row of proxy utilities.
///
/// Rankings use Borda scores `m - position`, with the top project at position 1,
/// so rows are permutations of `0..m`.
pub fn derive_valuations_with(profile: &Profile, scheme: ValuationScheme) -> Result<ValuationProfile, ProfileError> {
    let instance = profile.instance();
    let m = instance.len();

    let errors: Vec<RowError> = profile
        .entries()
        .iter()
        .enumerate()
        .filter_map(|(row, e)| {
            validate_ballot(instance, profile.params(), &e.ballot)
                .err()
                .map(|violation| RowError { row, voter: e.voter.clone(), violation })
        })
        .collect();
    if !errors.is_empty() {
        return Err(ProfileError::InvalidBallots(errors));
    }

    let index = |id: &ProjectId| instance.index_of(id).expect("validated ballot references known project");
    let rows = profile
        .entries()
        .iter()
        .map(|e| {
            let mut row = vec![0u64; m];
            match &e.ballot {
                Ballot::Points(alloc) => {
                    for (id, pts) in alloc {
                        row[index(id)] = u64::from(*pts);
                    }
                }
                Ballot::KApproval(ids) | Ballot::ThresholdApproval(ids) | Ballot::Knapsack(ids) => {
                    for id in ids {
                        let j = index(id);
                        row[j] = match scheme {
                            ValuationScheme::Proxy => 1,
                            ValuationScheme::CostScaled => instance.projects()[j].cost,
                        };
                    }
                }
                Ballot::Rank(order) | Ballot::ValueForMoney(order) => {
                    for (pos, id) in order.iter().enumerate() {
                        row[index(id)] = (m - (pos + 1)) as u64;
                    }
                }
            }
            row
        })
        .collect();

    Ok(ValuationProfile {
        voters: profile.entries().iter().map(|e| e.voter.clone()).collect(),
        projects: instance.projects().iter().map(|p| p.id.clone()).collect(),
        rows,
    })
}

/// Column sums `v(p)`, aligned with `valuations.projects()`.
pub fn project_scores(valuations: &ValuationProfile) -> Vec<u64> {
    let mut scores = vec![0u64; valuations.num_projects()];
    for row in &valuations.rows {
        for (s, v) in scores.iter_mut().zip(row) {
            *s += v;
        }
    }
    scores
}

/// Total utility of the funded set, summed over all voters.
///
/// Panics if `funded` names a project missing from the valuation profile.
pub fn social_welfare(valuations: &ValuationProfile, funded: &[ProjectId]) -> u64 {
    let cols: Vec<usize> = funded
        .iter()
        .map(|id| {
            valuations
                .projects
                .iter()
                .position(|p| p == id)
                .unwrap_or_else(|| panic!("project `{id}` not in valuation profile"))
        })
        .collect();
    valuations.rows.iter().map(|row| cols.iter().map(|&j| row[j]).sum::<u64>()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Format, FormatParams, Instance, Project};
    use proptest::prelude::*;

    fn instance(m: usize) -> Instance {
        Instance::new((1..=m).map(|i| Project::synthetic(format!("p{i}"), 1)).collect(), 100).unwrap()
    }

    fn ids(v: &[&str]) -> Vec<ProjectId> {
        v.iter().map(|s| ProjectId::from(*s)).collect()
    }

    #[test]
    fn borda_scores_for_three_projects() {
        let inst = Instance::new(vec![Project::synthetic("A", 1), Project::synthetic("B", 1), Project::synthetic("C", 1)], 5).unwrap();
        let profile = Profile::new(inst, Format::Rank, FormatParams::default(), vec![("v".into(), Ballot::Rank(ids(&["B", "A", "C"])))]).unwrap();
        let vals = derive_valuations(&profile).unwrap();
        assert_eq!(vals.rows()[0], vec![1, 2, 0]);
    }

    #[test]
    fn approval_indicator_row() {
        let profile = Profile::new(instance(5), Format::KApproval, FormatParams::k(5), vec![("v".into(), Ballot::KApproval(ids(&["p1", "p4"])))]).unwrap();
        assert_eq!(derive_valuations(&profile).unwrap().rows()[0], vec![1, 0, 0, 1, 0]);
    }

    #[test]
    fn points_row_is_copied() {
        let profile = Profile::new(instance(10), Format::Points, FormatParams::default(), vec![("v".into(), Ballot::Points(vec![("p1".into(), 100)]))]).unwrap();
        let mut expected = vec![0; 10];
        expected[0] = 100;
        assert_eq!(derive_valuations(&profile).unwrap().rows()[0], expected);
    }

    #[test]
    fn cost_scaled_binary_rows() {
        let inst = Instance::new(vec![Project::synthetic("a", 7), Project::synthetic("b", 9)], 20).unwrap();
        let profile = Profile::new(inst, Format::Knapsack, FormatParams::default(), vec![("v".into(), Ballot::Knapsack(ids(&["b"])))]).unwrap();
        assert_eq!(derive_valuations_with(&profile, ValuationScheme::CostScaled).unwrap().rows()[0], vec![0, 9]);
    }

    #[test]
    fn scores_examples() {
        let p = ids(&["p"]);
        assert_eq!(project_scores(&ValuationProfile::anonymous(p.clone(), vec![vec![1]; 3])), vec![3]);
        assert_eq!(project_scores(&ValuationProfile::anonymous(ids(&["a", "b"]), vec![])), vec![0, 0]);
        let borda = ValuationProfile::anonymous(ids(&["a", "b", "c"]), vec![vec![2, 1, 0], vec![0, 1, 2]]);
        assert_eq!(project_scores(&borda), vec![2, 2, 2]);
    }

    #[test]
    fn welfare_examples() {
        let single = ValuationProfile::anonymous(ids(&["p1", "p2", "p3"]), vec![vec![3, 2, 1]]);
        assert_eq!(social_welfare(&single, &[]), 0);
        assert_eq!(social_welfare(&single, &ids(&["p1", "p3"])), 4);
        let two = ValuationProfile::anonymous(ids(&["a", "b"]), vec![vec![5, 0], vec![0, 5]]);
        assert_eq!(social_welfare(&two, &ids(&["a", "b"])), 10);
    }

    fn rank_profile() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
        (1usize..8).prop_flat_map(|m| {
            let perm = Just((0..m).collect::<Vec<_>>()).prop_shuffle();
            (Just(m), prop::collection::vec(perm, 0..6))
        })
    }

    proptest! {
        #[test]
        fn rank_rows_are_permutations((m, orders) in rank_profile()) {
            let inst = instance(m);
            let ballots = orders.iter().enumerate().map(|(i, o)| {
                (VoterId::new(format!("v{i}")), Ballot::ValueForMoney(o.iter().map(|&j| inst.projects()[j].id.clone()).collect()))
            }).collect();
            let profile = Profile::new(inst.clone(), Format::ValueForMoney, FormatParams::default(), ballots).unwrap();
            let vals = derive_valuations(&profile).unwrap();
            prop_assert_eq!(vals.clone(), derive_valuations(&profile).unwrap());
            for row in vals.rows() {
                let mut sorted = row.clone();
                sorted.sort();
                prop_assert_eq!(sorted, (0..m as u64).collect::<Vec<_>>());
            }
        }

        #[test]
        fn welfare_is_linear_in_scores(rows in prop::collection::vec(prop::collection::vec(0u64..50, 5), 0..8), mask in prop::collection::vec(any::<bool>(), 5)) {
            let vals = ValuationProfile::anonymous(ids(&["a", "b", "c", "d", "e"]), rows);
            let scores = project_scores(&vals);
            let funded: Vec<ProjectId> = vals.projects().iter().zip(&mask).filter(|(_, &m)| m).map(|(p, _)| p.clone()).collect();
            let via_scores: u64 = mask.iter().zip(&scores).filter(|(m, _)| **m).map(|(_, s)| s).sum();
            prop_assert_eq!(social_welfare(&vals, &funded), via_scores);
        }

        #[test]
        fn binary_row_sums_equal_approval_counts(sets in prop::collection::vec(prop::sample::subsequence((1..=6).collect::<Vec<_>>(), 0..=6), 0..6)) {
            let inst = instance(6);
            let ballots = sets.iter().enumerate().map(|(i, s)| {
                (VoterId::new(format!("v{i}")), Ballot::ThresholdApproval(s.iter().map(|j| ProjectId::new(format!("p{j}"))).collect()))
            }).collect();
            let profile = Profile::new(inst, Format::ThresholdApproval, FormatParams::t(1), ballots).unwrap();
            let vals = derive_valuations(&profile).unwrap();
            for (row, s) in vals.rows().iter().zip(&sets) {
                prop_assert!(row.iter().all(|&v| v <= 1));
                prop_assert_eq!(row.iter().sum::<u64>(), s.len() as u64);
            }
        }
    }
}
