use std::collections::BTreeMap;

use serde::Serialize;

use super::IoError;
use crate::aggregation::{Outcome, Rule};
use crate::analysis::{frequency_heatmap, Heatmap, StabilityReport, WelfareMatrix};
use crate::model::Format;
use crate::scalar::Scalar;

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 output")
}

/// `format,rule,n_prime,<project ids by increasing cost>`, one row per report.
pub fn heatmap_csv(map: &Heatmap) -> String {
    let header = ["format", "rule", "n_prime"].iter().map(|s| s.to_string()).chain(map.columns.iter().map(|c| c.to_string()));
    let rows = map.rows.iter().map(|r| {
        [r.format.to_string(), r.rule.to_string(), r.n_prime.to_string()]
            .into_iter()
            .chain(r.cells.iter().map(|c| c.to_string()))
            .collect()
    });
    csv_string(std::iter::once(header.collect()).chain(rows))
}

pub fn entropy_csv(reports: &[StabilityReport]) -> String {
    let header = ["election", "format", "rule", "n_prime", "repetitions", "entropy"].map(String::from).to_vec();
    let rows = reports.iter().map(|r| {
        let c = &r.config;
        vec![c.election.clone(), c.format.to_string(), c.rule.to_string(), c.n_prime.to_string(), c.repetitions.to_string(), r.entropy.to_string()]
    });
    csv_string(std::iter::once(header).chain(rows))
}

type EntropyPairs = BTreeMap<(String, Format, usize), (Option<f64>, Option<f64>)>;

/// Greedy vs Equal Shares entropy per (election, format, n'), with a flag
/// saying whether Equal Shares came out strictly lower.
pub fn entropy_comparison_csv(reports: &[StabilityReport]) -> String {
    let mut pairs = EntropyPairs::new();
    for r in reports {
        let slot = pairs.entry((r.config.election.clone(), r.config.format, r.config.n_prime)).or_default();
        match r.config.rule {
            Rule::Greedy => slot.0 = Some(r.entropy),
            Rule::Mes => slot.1 = Some(r.entropy),
            Rule::Optimal => {}
        }
    }
    let header = ["election", "format", "n_prime", "greedy_entropy", "mes_entropy", "mes_lower"].map(String::from).to_vec();
    let rows = pairs.into_iter().filter_map(|((election, format, n), (g, m))| {
        let (g, m) = (g?, m?);
        Some(vec![election, format.to_string(), n.to_string(), g.to_string(), m.to_string(), (m < g).to_string()])
    });
    csv_string(std::iter::once(header).chain(rows))
}

pub fn stability_json(reports: &[StabilityReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

pub fn welfare_csv(matrix: &WelfareMatrix) -> String {
    let header = ["reference", "format", "rule", "per_voter", "normalized"].map(String::from).to_vec();
    let rows = matrix.entries.iter().map(|e| {
        vec![
            matrix.reference.to_string(),
            e.format.to_string(),
            e.rule.to_string(),
            e.per_voter.to_string(),
            e.normalized.map(|n| n.to_string()).unwrap_or_default(),
        ]
    });
    csv_string(std::iter::once(header).chain(rows))
}

#[derive(Serialize)]
struct OutcomeDoc {
    rule: Rule,
    funded: Vec<String>,
    cost: u64,
    leftover: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_share: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<Vec<StepDoc>>,
}

#[derive(Serialize)]
struct StepDoc {
    project: String,
    phase: u8,
    price: String,
    /// Non-zero payments only, keyed by voter id.
    payments: BTreeMap<String, String>,
}

/// JSON for one outcome; rationals are written as `n` or `n/d` strings.
pub fn outcome_json<S: Scalar>(outcome: &Outcome<S>, instance: &crate::model::Instance) -> String {
    let ledger = outcome.payments.as_ref();
    let doc = OutcomeDoc {
        rule: outcome.rule,
        funded: outcome.funded.iter().map(|p| p.to_string()).collect(),
        cost: outcome.cost(instance),
        leftover: outcome.leftover.to_string(),
        initial_share: ledger.map(|l| l.initial_share.to_string()),
        steps: ledger.map(|l| {
            l.steps
                .iter()
                .map(|s| StepDoc {
                    project: s.project.to_string(),
                    phase: s.phase.number(),
                    price: s.price.to_string(),
                    payments: l
                        .voters
                        .iter()
                        .zip(&s.payments)
                        .filter(|(_, p)| !p.is_zero())
                        .map(|(v, p)| (v.to_string(), p.to_string()))
                        .collect(),
                })
                .collect()
        }),
    };
    serde_json::to_string_pretty(&doc).expect("outcome serializes")
}

/// The CSV and JSON views of one election's stability reports.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportDocuments {
    pub heatmap_csv: String,
    pub entropy_csv: String,
    pub report_json: String,
}

pub fn export_report(reports: &[StabilityReport]) -> Result<ReportDocuments, IoError> {
    let map = frequency_heatmap(reports).map_err(|e| IoError::Field { field: "reports".into(), message: e.to_string() })?;
    Ok(ReportDocuments { heatmap_csv: heatmap_csv(&map), entropy_csv: entropy_csv(reports), report_json: stability_json(reports) })
}
