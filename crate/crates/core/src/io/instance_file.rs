use serde::{Deserialize, Serialize};

use super::IoError;
use crate::model::{Category, Instance, Project, ProjectId};

pub const INSTANCE_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    election: Option<String>,
    budget: i64,
    #[serde(default)]
    projects: Vec<ProjectDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectDoc {
    id: String,
    name: String,
    #[serde(default)]
    description: String,
    category: String,
    cost: i64,
    #[serde(default)]
    coordinates: Vec<[i64; 2]>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn field(index: usize, name: &str, message: impl Into<String>) -> IoError {
    IoError::Field { field: format!("projects[{index}].{name}"), message: message.into() }
}

/// Parses a TOML instance document and validates it.
pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let doc: InstanceDoc = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        IoError::Syntax { line, column, message: e.message().to_string() }
    })?;
    if doc.schema_version != INSTANCE_SCHEMA_VERSION {
        return Err(IoError::UnsupportedSchema(doc.schema_version));
    }
    let budget = u64::try_from(doc.budget)
        .ok()
        .filter(|&b| b > 0)
        .ok_or_else(|| IoError::Field { field: "budget".into(), message: format!("must be positive, got {}", doc.budget) })?;

    let mut projects = Vec::with_capacity(doc.projects.len());
    for (i, p) in doc.projects.into_iter().enumerate() {
        let category: Category = p.category.parse().map_err(|e: crate::model::InstanceError| field(i, "category", e.to_string()))?;
        let cost = u64::try_from(p.cost)
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| field(i, "cost", format!("must be positive, got {}", p.cost)))?;
        let coordinates = p
            .coordinates
            .iter()
            .map(|&[x, y]| match (u32::try_from(x), u32::try_from(y)) {
                (Ok(x), Ok(y)) => Ok((x, y)),
                _ => Err(field(i, "coordinates", format!("({x}, {y}) is off the map"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        projects.push(Project { id: ProjectId::new(p.id), name: p.name, description: p.description, category, cost, coordinates });
    }
    let instance = Instance::new(projects, budget)?;
    Ok(match doc.election {
        Some(e) => instance.with_election(e),
        None => instance,
    })
}

pub fn serialize_instance(instance: &Instance) -> String {
    let doc = InstanceDoc {
        schema_version: INSTANCE_SCHEMA_VERSION,
        election: instance.election().map(str::to_string),
        budget: instance.budget() as i64,
        projects: instance
            .projects()
            .iter()
            .map(|p| ProjectDoc {
                id: p.id.to_string(),
                name: p.name.clone(),
                description: p.description.clone(),
                category: p.category.tag().to_string(),
                cost: p.cost as i64,
                coordinates: p.coordinates.iter().map(|&(x, y)| [i64::from(x), i64::from(y)]).collect(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("instance document serializes")
}
