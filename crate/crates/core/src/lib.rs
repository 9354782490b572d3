//! Cascading failures in interdependent power/communication networks.
//!
//! A communication network and a power network are coupled by support
//! links: every comm node is powered by one power node, and a power node
//! stays up only while at least one of the comm nodes it serves is
//! functional. Attacks on the comm side propagate back and forth until a
//! steady state is reached.
//!
//! * [`graph`]: graph storage with an alive-mask and component labelling
//! * [`netgen`]: scale-free / Erdős–Rényi generators and the coupled grid
//! * [`attacks`]: random, degree-targeted and mixed attack samplers
//! * [`cascade`]: the staged simulation engine
//! * [`analytic`]: generating-function predictions of the same process
//! * [`harness`]: replicated attack sweeps and CSV output

pub mod analytic;
pub mod attacks;
pub mod cascade;
pub mod graph;
pub mod harness;
pub mod netgen;

use serde::{Deserialize, Serialize};

pub use analytic::{DegreeDistribution, GenFnSet};
pub use attacks::{AttackKind, AttackResult, AttackSpec};
pub use cascade::{run_cascade, CascadeOptions, CascadeTrace, StageRecord};
pub use graph::{ComponentLabeling, Graph};
pub use harness::{ExperimentConfig, SweepResult};
pub use netgen::{InterdependentGrid, NetworkRecipe};

/// Which network of the grid a stage acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Comm,
    Power,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Comm => "comm",
            Side::Power => "power",
        })
    }
}
