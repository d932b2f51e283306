//! Instance and profile documents, report exports and the bundled elections.

pub mod adapter;
pub mod fixtures;
mod instance_file;
mod profile_file;
mod report;

use thiserror::Error;

use crate::model::InstanceError;

pub use instance_file::{parse_instance, serialize_instance, INSTANCE_SCHEMA_VERSION};
pub use profile_file::{parse_profile, read_profile_header, serialize_profile, ProfileHeader, PROFILE_MAGIC};
pub use report::{
    entropy_comparison_csv, entropy_csv, export_report, heatmap_csv, outcome_json, stability_json, welfare_csv,
    ReportDocuments,
};

/// A problem in one ballot row, located by 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}{}: {message}", voter.as_ref().map(|v| format!(" (voter `{v}`)")).unwrap_or_default())]
pub struct RowIssue {
    pub line: u64,
    pub voter: Option<String>,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("unsupported schema version {0}")]
    UnsupportedSchema(u32),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("profile header (line 1): {0}")]
    Header(String),
    #[error("{} invalid row(s):\n{}", .0.len(), .0.iter().map(|r| format!("  {r}")).collect::<Vec<_>>().join("\n"))]
    InvalidRows(Vec<RowIssue>),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

impl IoError {
    pub fn file(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        IoError::File { path: path.as_ref().display().to_string(), source }
    }
}
