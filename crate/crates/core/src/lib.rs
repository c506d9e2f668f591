//! Power measures, bribery and weight maximization for liquid democracy
//! elections modeled as delegative simple games.

pub mod branching;
pub mod bribery;
pub mod dp;
pub mod error;
pub mod exact;
pub mod game;
pub mod graph;
pub mod instance;
pub mod maximin;
pub mod random;
pub mod rational;
pub mod weightmax;

pub use error::{Error, Result};
pub use exact::{IndexKind, IndexReport};
pub use game::{Coalition, EvaluableGame};
pub use graph::{
    Choice, DelegationForest, DelegationProfile, LiquidElection, PartialElection, QuotaRule,
    SocialNetwork,
    VoterId, WeightAssignment,
};
pub use rational::RationalValue;
