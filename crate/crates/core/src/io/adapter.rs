//! Column-mapping adapter from an external vote table to a [`Profile`].
//!
//! External datasets keep votes in their own layouts; this maps named
//! columns (voter, vote, optional consistency flag, optional row filters)
//! and external project identifiers onto the native ballot schema.

use std::collections::HashMap;
use std::sync::Arc;

use super::{IoError, RowIssue};
use crate::model::{Ballot, BallotEntry, Format, FormatParams, Instance, Profile, ProfileError, ProjectId, VoterId};

#[derive(Clone, Debug)]
pub struct AdapterConfig {
    pub format: Format,
    pub params: FormatParams,
    pub election: Option<String>,
    pub voter_column: String,
    pub vote_column: String,
    pub consistent_column: Option<String>,
    /// Keep only rows whose `column` equals `value`.
    pub filters: Vec<(String, String)>,
    /// Separator between items inside the vote cell.
    pub item_separator: char,
    /// External project identifier to instance id; identity when empty.
    pub project_map: HashMap<String, ProjectId>,
}

impl AdapterConfig {
    pub fn new(format: Format, voter_column: impl Into<String>, vote_column: impl Into<String>) -> Self {
        AdapterConfig {
            format,
            params: FormatParams::default(),
            election: None,
            voter_column: voter_column.into(),
            vote_column: vote_column.into(),
            consistent_column: None,
            filters: Vec::new(),
            item_separator: ';',
            project_map: HashMap::new(),
        }
    }
}

/// Reads a two-column `external,id` mapping table (header row required).
pub fn read_project_map(text: &str) -> Result<HashMap<String, ProjectId>, IoError> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut map = HashMap::new();
    for rec in r.records() {
        let rec = rec?;
        let (Some(ext), Some(id)) = (rec.get(0), rec.get(1)) else {
            return Err(IoError::Field { field: "project map".into(), message: "rows need two cells".into() });
        };
        map.insert(ext.to_string(), ProjectId::new(id));
    }
    Ok(map)
}

fn truthy(cell: &str) -> Option<bool> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "pass" | "passed" => Some(true),
        "0" | "false" | "no" | "fail" | "failed" => Some(false),
        _ => None,
    }
}

pub fn adapt(text: &str, config: &AdapterConfig, instance: impl Into<Arc<Instance>>) -> Result<Profile, IoError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| IoError::Field { field: name.to_string(), message: "no such column".into() })
    };
    let voter_col = column(&config.voter_column)?;
    let vote_col = column(&config.vote_column)?;
    let flag_col = config.consistent_column.as_deref().map(column).transpose()?;
    let filters = config.filters.iter().map(|(c, v)| Ok((column(c)?, v.as_str()))).collect::<Result<Vec<_>, IoError>>()?;
    let map_id = |ext: &str| config.project_map.get(ext).cloned().unwrap_or_else(|| ProjectId::new(ext));

    let mut entries = Vec::new();
    let mut lines = Vec::new();
    let mut issues = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if !filters.iter().all(|&(c, v)| rec.get(c) == Some(v)) {
            continue;
        }
        let voter = rec.get(voter_col).unwrap_or_default().to_string();
        let items = rec.get(vote_col).unwrap_or_default().split(config.item_separator).map(str::trim).filter(|s| !s.is_empty());
        let ballot = if config.format == Format::Points {
            let alloc: Result<Vec<_>, String> = items
                .map(|item| {
                    let (ext, pts) = item.split_once([':', '=']).ok_or_else(|| format!("points item `{item}` lacks an amount"))?;
                    let pts = pts.trim().parse::<u32>().map_err(|_| format!("bad points in `{item}`"))?;
                    Ok((map_id(ext.trim()), pts))
                })
                .collect();
            match alloc {
                Ok(a) => Ballot::Points(a),
                Err(message) => {
                    issues.push(RowIssue { line, voter: Some(voter), message });
                    continue;
                }
            }
        } else {
            Ballot::from_ids(config.format, items.map(map_id).collect()).expect("non-points format")
        };
        let consistent = flag_col.and_then(|c| rec.get(c)).and_then(truthy);
        entries.push(BallotEntry { voter: VoterId::new(voter), ballot, consistent });
        lines.push(line);
    }

    let profile = match Profile::with_entries(instance, config.format, config.params, entries) {
        Ok(p) if issues.is_empty() => p,
        Ok(_) => return Err(IoError::InvalidRows(issues)),
        Err(ProfileError::InvalidBallots(rows)) => {
            issues.extend(rows.into_iter().map(|r| RowIssue { line: lines[r.row], voter: Some(r.voter.to_string()), message: r.violation.to_string() }));
            issues.sort_by_key(|r| r.line);
            return Err(IoError::InvalidRows(issues));
        }
        Err(other) => return Err(IoError::Field { field: "profile".into(), message: other.to_string() }),
    };
    Ok(match &config.election {
        Some(e) => profile.with_election(e.clone()),
        None => profile,
    })
}
