//! Many-objective influence maximization.
//!
//! Seed sets are searched with NSGA-II over up to six objectives: expected
//! spread, seed-set size, balance of the activated communities, balance of
//! the seeds across communities, budget (total seed out-degree) and
//! propagation time. Degree-discount and CELF greedy baselines, hypervolume
//! and correlation analysis complete the toolkit.
//!
//! ```
//! use imopt::{Graph, PropagationModel, Tau, monte_carlo};
//!
//! let g = Graph::from_edges(3, vec![(0, 1), (1, 2)], true).unwrap();
//! let est = monte_carlo(&g, PropagationModel::WeightedCascade, &[0], Tau::Unbounded, 10, 0, None);
//! assert_eq!(est.mean_influence, 3.0);
//! ```

pub mod analysis;
pub mod baselines;
pub mod community;
pub mod error;
pub mod graph;
pub mod moea;
pub mod objectives;
pub mod propagation;

pub use analysis::{hypervolume, FrontEntry, ParetoFront};
pub use baselines::{celf, gdd, prefix_sweep, GreedyTrace};
pub use community::{detect_communities, modularity, CommunityAssignment};
pub use error::{Error, Result};
pub use graph::Graph;
pub use moea::{run_nsga2, MoeaConfig, RunHistory};
pub use objectives::{Evaluator, NormalizationContext, Objective, ObjectiveMask, ObjectiveVector};
pub use propagation::{monte_carlo, PropagationModel, SpreadEstimate, Tau};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    mod propagation {}
    #[doc = include_str!("../../../book/src/objectives.md")]
    mod objectives {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/baselines.md")]
    mod baselines {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
