use serde::Serialize;

use super::stability::StabilityReport;
use super::AnalysisError;
use crate::aggregation::Rule;
use crate::model::{Format, ProjectId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatmapRow {
    pub format: Format,
    pub rule: Rule,
    pub n_prime: usize,
    pub cells: Vec<f64>,
}

/// Funding frequencies with one row per report and projects as columns,
/// cheapest first.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Heatmap {
    pub election: Option<String>,
    pub columns: Vec<ProjectId>,
    pub rows: Vec<HeatmapRow>,
}

impl Heatmap {
    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(|r| r.cells.len()).sum()
    }
}

pub fn frequency_heatmap(reports: &[StabilityReport]) -> Result<Heatmap, AnalysisError> {
    let Some(first) = reports.first() else {
        return Ok(Heatmap { election: None, columns: Vec::new(), rows: Vec::new() });
    };
    if let Some(other) = reports.iter().find(|r| r.config.election != first.config.election) {
        return Err(AnalysisError::MixedElections(first.config.election.clone(), other.config.election.clone()));
    }
    let mut order: Vec<usize> = (0..first.projects.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&first.projects[a], &first.projects[b]);
        pa.cost.cmp(&pb.cost).then_with(|| pa.project.cmp(&pb.project))
    });
    let columns: Vec<ProjectId> = order.iter().map(|&j| first.projects[j].project.clone()).collect();
    let rows = reports
        .iter()
        .map(|r| HeatmapRow {
            format: r.config.format,
            rule: r.config.rule,
            n_prime: r.config.n_prime,
            cells: columns
                .iter()
                .map(|id| r.projects.iter().find(|p| &p.project == id).map_or(0.0, |p| p.frequency))
                .collect(),
        })
        .collect();
    Ok(Heatmap { election: Some(first.config.election.clone()), columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::run_stability;
    use crate::io::fixtures::{self, Election};
    use crate::model::{Ballot, FormatParams, Profile, VoterId};

    fn small_a_reports() -> Vec<StabilityReport> {
        let inst = fixtures::instance(Election::SmallA);
        let ballots = (0..3)
            .map(|i| (VoterId::new(format!("v{i}")), Ballot::Knapsack(vec!["sa01".into(), "sa03".into()])))
            .collect();
        let profile = Profile::new(inst, Format::Knapsack, FormatParams::default(), ballots).unwrap();
        run_stability(&profile, &[Rule::Greedy], 3, 4, 0).unwrap()
    }

    #[test]
    fn small_a_columns_run_from_bus_monitors_to_toilet() {
        let map = frequency_heatmap(&small_a_reports()).unwrap();
        assert_eq!(map.columns.first().unwrap().as_str(), "sa03");
        assert_eq!(map.columns.last().unwrap().as_str(), "sa05");
        assert_eq!(map.cell_count(), 10);
    }

    #[test]
    fn unanimous_outcome_row() {
        let reports = small_a_reports();
        let map = frequency_heatmap(&reports).unwrap();
        // sa03 and sa01 are the two cheapest columns; both always funded
        assert_eq!(map.rows[0].cells[..2], [1.0, 1.0]);
    }

    #[test]
    fn empty_input_gives_empty_table() {
        let map = frequency_heatmap(&[]).unwrap();
        assert!(map.columns.is_empty() && map.rows.is_empty());
    }
}
