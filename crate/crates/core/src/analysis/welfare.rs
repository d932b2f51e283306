use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::aggregation::{optimal_welfare_outcome, Rule};
use crate::model::{derive_valuations, social_welfare, Format, Profile, ProjectId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareEntry {
    pub format: Format,
    pub rule: Rule,
    /// Mean reference-voter welfare of the outcome.
    pub per_voter: f64,
    /// `per_voter` divided by the optimum's per-voter welfare.
    pub normalized: Option<f64>,
    /// Single-election matrices only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub funded: Option<Vec<ProjectId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_welfare: Option<u64>,
}

/// Welfare of each (format, rule) outcome, measured with one format's voters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareMatrix {
    pub reference: Format,
    pub elections: Vec<String>,
    pub entries: Vec<WelfareEntry>,
}

impl WelfareMatrix {
    pub fn get(&self, format: Format, rule: Rule) -> Option<&WelfareEntry> {
        self.entries.iter().find(|e| e.format == format && e.rule == rule)
    }
}

/// Aggregates each full profile under each rule and scores the outcome with
/// the reference profile's proxy valuations, per reference voter.
pub fn cross_format_welfare(
    profiles: &[Profile],
    rules: &[Rule],
    reference: Format,
    normalize: bool,
) -> Result<WelfareMatrix, AnalysisError> {
    let ref_profile = profiles.iter().find(|p| p.format() == reference).ok_or(AnalysisError::MissingReference(reference))?;
    let instance = ref_profile.instance();
    let ref_vals = derive_valuations(ref_profile).expect("profile ballots are validated at construction");
    let voters = ref_vals.num_voters();
    if voters == 0 {
        log::warn!("reference {} profile is empty; welfare is reported as 0", reference);
    }
    let per_voter = |total: u64| if voters == 0 { 0.0 } else { total as f64 / voters as f64 };

    let optimum = if normalize {
        let best = optimal_welfare_outcome(instance, &ref_vals)?;
        Some(per_voter(social_welfare(&ref_vals, &best.funded)))
    } else {
        None
    };

    let mut entries = Vec::new();
    for profile in profiles {
        if profile.instance().projects() != instance.projects() {
            return Err(AnalysisError::InstanceMismatch(profile.format()));
        }
        let vals = derive_valuations(profile).expect("profile ballots are validated at construction");
        for &rule in rules {
            let outcome = rule.apply(instance, &vals)?;
            let total = social_welfare(&ref_vals, &outcome.funded);
            let value = per_voter(total);
            let normalized = optimum.map(|best| if best == 0.0 { 1.0 } else { value / best });
            entries.push(WelfareEntry {
                format: profile.format(),
                rule,
                per_voter: value,
                normalized,
                funded: Some(outcome.funded),
                total_welfare: Some(total),
            });
        }
    }
    Ok(WelfareMatrix {
        reference,
        elections: ref_profile.election().map(|e| vec![e.to_string()]).unwrap_or_default(),
        entries,
    })
}

/// Mean of per-election entries; an entry missing from some elections is
/// averaged over the elections that have it.
pub fn average_welfare(matrices: &[WelfareMatrix]) -> Option<WelfareMatrix> {
    let reference = matrices.first()?.reference;
    let mut sums: BTreeMap<(Format, Rule), (f64, Option<f64>, usize)> = BTreeMap::new();
    for e in matrices.iter().flat_map(|m| &m.entries) {
        let slot = sums.entry((e.format, e.rule)).or_insert((0.0, Some(0.0), 0));
        slot.0 += e.per_voter;
        slot.1 = slot.1.zip(e.normalized).map(|(a, b)| a + b);
        slot.2 += 1;
    }
    let entries = sums
        .into_iter()
        .map(|((format, rule), (total, norm, count))| WelfareEntry {
            format,
            rule,
            per_voter: total / count as f64,
            normalized: norm.map(|n| n / count as f64),
            funded: None,
            total_welfare: None,
        })
        .collect();
    Some(WelfareMatrix {
        reference,
        elections: matrices.iter().flat_map(|m| m.elections.iter().cloned()).collect(),
        entries,
    })
}
