use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Side length of the square city map project coordinates live on.
pub const MAP_SIZE: u32 = 100;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectId(String);

impl ProjectId {
    pub fn new(id: impl Into<String>) -> Self {
        ProjectId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ProjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ProjectId {
    fn from(s: &str) -> Self {
        ProjectId(s.to_string())
    }
}

impl From<String> for ProjectId {
    fn from(s: String) -> Self {
        ProjectId(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    CultureAndCommunity,
    StreetsSidewalksAndTransit,
    EnvironmentPublicHealthAndSafety,
    FacilitiesParksAndRecreation,
    Education,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::CultureAndCommunity,
        Category::StreetsSidewalksAndTransit,
        Category::EnvironmentPublicHealthAndSafety,
        Category::FacilitiesParksAndRecreation,
        Category::Education,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Category::CultureAndCommunity => "culture-and-community",
            Category::StreetsSidewalksAndTransit => "streets-sidewalks-and-transit",
            Category::EnvironmentPublicHealthAndSafety => "environment-public-health-and-safety",
            Category::FacilitiesParksAndRecreation => "facilities-parks-and-recreation",
            Category::Education => "education",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Category {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| InstanceError::UnknownCategory(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Project {
    pub id: ProjectId,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub category: Category,
    pub cost: u64,
    #[serde(default)]
    pub coordinates: Vec<(u32, u32)>,
}

impl Project {
    /// Bare project with a placeholder category, for synthetic instances.
    pub fn synthetic(id: impl Into<ProjectId>, cost: u64) -> Self {
        let id = id.into();
        Project {
            name: id.to_string(),
            id,
            description: String::new(),
            category: Category::CultureAndCommunity,
            cost,
            coordinates: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("project id must not be empty")]
    EmptyProjectId,
    #[error("duplicate project id `{0}`")]
    DuplicateProjectId(ProjectId),
    #[error("project `{0}` has non-positive cost")]
    NonPositiveCost(ProjectId),
    #[error("project `{project}` coordinate ({x}, {y}) lies outside the {MAP_SIZE}x{MAP_SIZE} map")]
    CoordinateOutOfRange { project: ProjectId, x: u32, y: u32 },
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
}

/// A PB election: candidate projects and a global budget. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    election: Option<String>,
    projects: Vec<Project>,
    budget: u64,
    index: HashMap<ProjectId, usize>,
}

impl Instance {
    pub fn new(projects: Vec<Project>, budget: u64) -> Result<Self, InstanceError> {
        if budget == 0 {
            return Err(InstanceError::ZeroBudget);
        }
        let mut index = HashMap::with_capacity(projects.len());
        for (i, p) in projects.iter().enumerate() {
            if p.id.as_str().is_empty() {
                return Err(InstanceError::EmptyProjectId);
            }
            if p.cost == 0 {
                return Err(InstanceError::NonPositiveCost(p.id.clone()));
            }
            if let Some(&(x, y)) = p.coordinates.iter().find(|(x, y)| *x > MAP_SIZE || *y > MAP_SIZE) {
                return Err(InstanceError::CoordinateOutOfRange { project: p.id.clone(), x, y });
            }
            if index.insert(p.id.clone(), i).is_some() {
                return Err(InstanceError::DuplicateProjectId(p.id.clone()));
            }
        }
        let instance = Instance { election: None, projects, budget, index };
        if !instance.has_affordable_project() {
            log::warn!("no project fits within budget {}; every outcome is empty", budget);
        }
        Ok(instance)
    }

    pub fn with_election(mut self, election: impl Into<String>) -> Self {
        self.election = Some(election.into());
        self
    }

    pub fn election(&self) -> Option<&str> {
        self.election.as_deref()
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projects.is_empty()
    }

    pub fn index_of(&self, id: &ProjectId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn project(&self, id: &ProjectId) -> Option<&Project> {
        self.index_of(id).map(|i| &self.projects[i])
    }

    pub fn costs(&self) -> Vec<u64> {
        self.projects.iter().map(|p| p.cost).collect()
    }

    pub fn has_affordable_project(&self) -> bool {
        self.projects.iter().any(|p| p.cost <= self.budget)
    }

    /// Total cost of a set of projects; `None` if an id is unknown.
    pub fn cost_of<'a>(&self, ids: impl IntoIterator<Item = &'a ProjectId>) -> Option<u64> {
        ids.into_iter().map(|id| self.project(id).map(|p| p.cost)).sum()
    }

    /// Project indices ordered by increasing cost, ties by id.
    pub fn cost_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.projects.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (&self.projects[a], &self.projects[b]);
            pa.cost.cmp(&pb.cost).then_with(|| pa.id.cmp(&pb.id))
        });
        order
    }
}
