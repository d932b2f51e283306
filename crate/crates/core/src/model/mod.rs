//! Domain types: instances, ballots, profiles and proxy valuations.

mod ballot;
mod instance;
mod profile;
mod valuation;

pub use ballot::{validate_ballot, Ballot, BallotViolation, Format, FormatParams};
pub use instance::{Category, Instance, InstanceError, Project, ProjectId};
pub use profile::{BallotEntry, Profile, ProfileError, RowError, VoterId};
pub use valuation::{
    derive_valuations, derive_valuations_with, project_scores, social_welfare, ValuationProfile,
    ValuationScheme,
};
