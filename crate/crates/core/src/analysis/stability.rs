use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::entropy::entropy;
use super::sampling::{sample_digest, sample_without_replacement, StreamKey};
use super::AnalysisError;
use crate::aggregation::Rule;
use crate::model::{derive_valuations, Format, Profile, ProjectId};

/// Which ballots subsamples are drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingPool {
    /// Only ballots that passed the consistency check.
    Consistent,
    /// Every ballot; used when the profile has no consistency metadata.
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub election: String,
    pub format: Format,
    pub rule: Rule,
    pub n_prime: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    pub pool: SamplingPool,
    pub pool_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectFrequency {
    pub project: ProjectId,
    pub cost: u64,
    pub funded_count: u64,
    pub frequency: f64,
}

/// One repetition's sample fingerprint and funded set, kept for audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionRecord {
    pub repetition: usize,
    pub sample_digest: String,
    pub funded: Vec<ProjectId>,
}

/// Funding frequencies of one (format, rule, n') configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub config: StabilityConfig,
    /// In instance project order.
    pub projects: Vec<ProjectFrequency>,
    pub entropy: f64,
    pub runs: Vec<RepetitionRecord>,
}

impl StabilityReport {
    pub fn frequencies(&self) -> Vec<f64> {
        self.projects.iter().map(|p| p.frequency).collect()
    }

    /// Exact `funded_count / repetitions`.
    pub fn exact_frequency(&self, project: &ProjectId) -> Option<Ratio<u64>> {
        self.projects
            .iter()
            .find(|p| &p.project == project)
            .map(|p| Ratio::new(p.funded_count, self.config.repetitions as u64))
    }

    /// Entropy recomputed from the stored frequencies.
    pub fn recomputed_entropy(&self) -> f64 {
        entropy(&self.frequencies())
    }
}

/// Repeatedly subsamples `n_prime` ballots and aggregates each subsample
/// under every rule, returning one report per rule.
///
/// Each repetition draws from a stream keyed on (seed, election, format,
/// n', repetition) and every rule sees the same draw.
pub fn run_stability(
    profile: &Profile,
    rules: &[Rule],
    n_prime: usize,
    repetitions: usize,
    master_seed: u64,
) -> Result<Vec<StabilityReport>, AnalysisError> {
    if repetitions == 0 {
        return Err(AnalysisError::NoRepetitions);
    }
    let pool = profile.sampling_pool();
    if n_prime > pool.len() {
        return Err(AnalysisError::SampleTooLarge { n_prime, pool: pool.len() });
    }
    let pool_kind = if profile.has_consistency_metadata() { SamplingPool::Consistent } else { SamplingPool::All };
    let election = profile.election().unwrap_or("unnamed").to_string();
    let instance = profile.instance();
    let valuations = derive_valuations(profile).expect("profile ballots are validated at construction");

    let per_rep: Vec<(String, Vec<Vec<usize>>)> = (0..repetitions)
        .into_par_iter()
        .map(|repetition| {
            let key = StreamKey { master_seed, election: &election, format: profile.format(), n_prime, repetition };
            let sample = sample_without_replacement(&pool, n_prime, &key);
            let sub = valuations.select_voters(&sample);
            let digest = sample_digest(&sub.voters().iter().collect::<Vec<_>>());
            let funded = rules
                .iter()
                .map(|rule| {
                    let outcome = rule.apply(instance, &sub)?;
                    Ok(outcome.funded.iter().map(|id| instance.index_of(id).expect("funded project exists")).collect())
                })
                .collect::<Result<Vec<Vec<usize>>, AnalysisError>>()?;
            Ok((digest, funded))
        })
        .collect::<Result<_, AnalysisError>>()?;

    let reports = rules
        .iter()
        .enumerate()
        .map(|(r, &rule)| {
            let mut counts = vec![0u64; instance.len()];
            let runs = per_rep
                .iter()
                .enumerate()
                .map(|(repetition, (digest, funded))| {
                    let mut set = funded[r].clone();
                    for &j in &set {
                        counts[j] += 1;
                    }
                    set.sort_unstable();
                    RepetitionRecord {
                        repetition,
                        sample_digest: digest.clone(),
                        funded: set.iter().map(|&j| instance.projects()[j].id.clone()).collect(),
                    }
                })
                .collect();
            let projects: Vec<ProjectFrequency> = instance
                .projects()
                .iter()
                .zip(&counts)
                .map(|(p, &c)| ProjectFrequency {
                    project: p.id.clone(),
                    cost: p.cost,
                    funded_count: c,
                    frequency: c as f64 / repetitions as f64,
                })
                .collect();
            let entropy = entropy(&projects.iter().map(|p| p.frequency).collect::<Vec<_>>());
            StabilityReport {
                config: StabilityConfig {
                    election: election.clone(),
                    format: profile.format(),
                    rule,
                    n_prime,
                    repetitions,
                    master_seed,
                    pool: pool_kind,
                    pool_size: pool.len(),
                },
                projects,
                entropy,
                runs,
            }
        })
        .collect();
    Ok(reports)
}

/// [`run_stability`] for each sample size in turn.
pub fn run_stability_sweep(
    profile: &Profile,
    rules: &[Rule],
    n_primes: &[usize],
    repetitions: usize,
    master_seed: u64,
) -> Result<Vec<StabilityReport>, AnalysisError> {
    let mut out = Vec::new();
    for &n in n_primes {
        out.extend(run_stability(profile, rules, n, repetitions, master_seed)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Ballot, BallotEntry, FormatParams, Instance, Project, VoterId};

    fn instance() -> Instance {
        Instance::new((0..5).map(|i| Project::synthetic(format!("p{i}"), 10 + i as u64)).collect(), 30)
            .unwrap()
            .with_election("toy")
    }

    fn varied_profile(n: usize) -> Profile {
        let ballots = (0..n)
            .map(|i| {
                let ids = [i % 5, (i % 5 + 1 + (i / 5) % 4) % 5].iter().map(|j| ProjectId::new(format!("p{j}"))).collect();
                (VoterId::new(format!("v{i:03}")), Ballot::ThresholdApproval(ids))
            })
            .collect();
        Profile::new(instance(), Format::ThresholdApproval, FormatParams::t(50), ballots).unwrap()
    }

    #[test]
    fn full_sample_is_deterministic_outcome() {
        let profile = varied_profile(12);
        for report in run_stability(&profile, &[Rule::Greedy, Rule::Mes], 12, 9, 1).unwrap() {
            assert!(report.frequencies().iter().all(|&f| f == 0.0 || f == 1.0));
            assert_eq!(report.entropy, 0.0);
            assert!(report.runs.windows(2).all(|w| w[0].funded == w[1].funded));
        }
    }

    #[test]
    fn identical_ballots_give_degenerate_frequencies() {
        let ballots = (0..58)
            .map(|i| (VoterId::new(format!("v{i}")), Ballot::ThresholdApproval(vec!["p1".into(), "p3".into()])))
            .collect();
        let profile = Profile::new(instance(), Format::ThresholdApproval, FormatParams::t(1), ballots).unwrap();
        for report in run_stability(&profile, &[Rule::Greedy, Rule::Mes], 40, 20, 99).unwrap() {
            assert!(report.frequencies().iter().all(|&f| f == 0.0 || f == 1.0));
        }
    }

    #[test]
    fn rerun_is_identical_and_rules_are_paired() {
        let profile = varied_profile(30);
        let a = run_stability(&profile, &[Rule::Greedy, Rule::Mes], 10, 25, 2024).unwrap();
        let b = run_stability(&profile, &[Rule::Greedy, Rule::Mes], 10, 25, 2024).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for (g, m) in a[0].runs.iter().zip(&a[1].runs) {
            assert_eq!(g.sample_digest, m.sample_digest);
        }
        for report in &a {
            for p in &report.projects {
                let from_runs = report.runs.iter().filter(|r| r.funded.contains(&p.project)).count() as u64;
                assert_eq!(from_runs, p.funded_count);
            }
            assert_eq!(report.recomputed_entropy(), report.entropy);
        }
    }

    #[test]
    fn oversized_sample_is_rejected() {
        let profile = varied_profile(5);
        assert_eq!(
            run_stability(&profile, &[Rule::Greedy], 6, 1, 0).unwrap_err(),
            AnalysisError::SampleTooLarge { n_prime: 6, pool: 5 }
        );
        assert_eq!(run_stability(&profile, &[Rule::Greedy], 2, 0, 0).unwrap_err(), AnalysisError::NoRepetitions);
    }

    #[test]
    fn consistent_pool_is_used_when_flags_exist() {
        let entries = (0..10)
            .map(|i| BallotEntry {
                voter: VoterId::new(format!("v{i}")),
                ballot: Ballot::ThresholdApproval(vec!["p0".into()]),
                consistent: Some(i < 6),
            })
            .collect();
        let profile = Profile::with_entries(instance(), Format::ThresholdApproval, FormatParams::t(1), entries).unwrap();
        let reports = run_stability(&profile, &[Rule::Greedy], 6, 3, 5).unwrap();
        assert_eq!(reports[0].config.pool, SamplingPool::Consistent);
        assert_eq!(reports[0].config.pool_size, 6);
        assert!(run_stability(&profile, &[Rule::Greedy], 7, 3, 5).is_err());
    }
}
