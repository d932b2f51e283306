//! The four bundled elections: two with 10 projects, two with 20, each with
//! a 500,000 budget.

use std::fmt;
use std::str::FromStr;

use crate::model::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Election {
    SmallA,
    SmallB,
    LargeA,
    LargeB,
}

impl Election {
    pub const ALL: [Election; 4] = [Election::SmallA, Election::SmallB, Election::LargeA, Election::LargeB];

    pub fn tag(self) -> &'static str {
        match self {
            Election::SmallA => "small-a",
            Election::SmallB => "small-b",
            Election::LargeA => "large-a",
            Election::LargeB => "large-b",
        }
    }

    /// The instance document as shipped.
    pub fn source(self) -> &'static str {
        match self {
            Election::SmallA => include_str!("../../fixtures/small-a.toml"),
            Election::SmallB => include_str!("../../fixtures/small-b.toml"),
            Election::LargeA => include_str!("../../fixtures/large-a.toml"),
            Election::LargeB => include_str!("../../fixtures/large-b.toml"),
        }
    }
}

impl fmt::Display for Election {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Election {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Election::ALL.into_iter().find(|e| e.tag() == s).ok_or_else(|| format!("unknown election `{s}`"))
    }
}

pub fn instance(election: Election) -> Instance {
    super::parse_instance(election.source()).expect("bundled fixture is valid")
}
