//! Participatory budgeting toolkit: six ballot formats with validation,
//! proxy valuations, greedy and Method of Equal Shares aggregation, and a
//! seeded stability / welfare analysis harness.
//!
//! The Equal Shares machinery is generic over [`Scalar`]; the crate-root
//! aliases pick exact big rationals, which is what every public entry point
//! and the CLI use.
//!
//! ```
//! use pbvote::io::fixtures::{self, Election};
//! use pbvote::{aggregate_mes, Ballot, Format, FormatParams, Profile};
//!
//! let instance = fixtures::instance(Election::SmallA);
//! let ballots = vec![
//!     ("v1".into(), Ballot::Knapsack(vec!["sa01".into(), "sa03".into()])),
//!     ("v2".into(), Ballot::Knapsack(vec!["sa01".into()])),
//! ];
//! let profile = Profile::new(instance.clone(), Format::Knapsack, FormatParams::default(), ballots).unwrap();
//! let valuations = pbvote::derive_valuations(&profile).unwrap();
//! let outcome = aggregate_mes(&instance, &valuations);
//! assert!(outcome.funded.contains(&"sa01".into()));
//! ```

pub mod aggregation;
pub mod analysis;
pub mod cli;
pub mod io;
pub mod model;
pub mod scalar;

pub use aggregation::{
    aggregate_greedy, aggregate_mes, mes_rho, optimal_welfare_outcome, Rule,
};
pub use analysis::{cross_format_welfare, entropy, frequency_heatmap, run_stability};
pub use model::{
    derive_valuations, project_scores, social_welfare, validate_ballot, Ballot, Category, Format,
    FormatParams, Instance, Profile, Project, ProjectId, ValuationProfile, VoterId,
};
pub use scalar::Scalar;

/// Exact arbitrary-precision rational used for Equal Shares prices and payments.
pub type Rational = num_rational::BigRational;

/// An aggregation outcome carrying exact rational payments.
pub type Outcome = aggregation::Outcome<Rational>;

/// Equal Shares working state over exact rationals.
pub type MesState = aggregation::mes::MesState<Rational>;

/// Payment ledger over exact rationals.
pub type PaymentLedger = aggregation::PaymentLedger<Rational>;

/// Approximate outcome type, for quick exploratory runs where exactness is not needed.
pub type FloatOutcome = aggregation::Outcome<f64>;
