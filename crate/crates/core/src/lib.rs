//! Binary-action threshold games on weighted directed networks.
//!
//! Agent `i` prefers action 1 exactly when the weighted number of its active
//! out-neighbours reaches its threshold `k_i`. Thresholds are arbitrary
//! rationals, possibly zero or negative. The [`transform`] module rewrites
//! such a game as a common-threshold game on an adjusted network with one
//! extra, always-active shadow agent, which turns extremal equilibria into
//! 1-cores ([`kcore`], [`equilibrium`]). [`analysis`] adds centralities,
//! removal effects and comparative statics.
//!
//! All arithmetic is exact ([`Rational`]).
//!
//! ```
//! use tgame::{maximal_equilibrium, minimal_equilibrium, Network, Rational, ThresholdGame};
//!
//! let one = Rational::one();
//! let net = Network::from_edges(&["A", "B"], &[("A", "B", one.clone()), ("B", "A", one.clone())])?;
//! let game = ThresholdGame::uniform(net, one);
//! assert_eq!(maximal_equilibrium(&game)?.count_active(), 2);
//! assert_eq!(minimal_equilibrium(&game)?.count_active(), 0);
//! # Ok::<(), tgame::Error>(())
//! ```

pub mod analysis;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod graph;
pub mod kcore;
pub mod par;
pub mod rational;
pub mod sample;
pub mod transform;

pub use equilibrium::{
    all_equilibria_brute, all_equilibria_core, br_dynamics, find_indifference, maximal_equilibrium,
    minimal_equilibrium, verify_lattice, EquilibriumSet, Method,
};
pub use error::{Error, Result};
pub use game::{ActionProfile, BestResponse, LinearQuadraticParams, ThresholdGame, TiePolicy};
pub use graph::{AgentId, AgentSet, Network, NetworkBuilder};
pub use kcore::{k_core, peeling_values, CoreResult, Peel};
pub use par::Exec;
pub use rational::Rational;
pub use transform::{adjust, adjust_default, AdjustedNetwork, SHADOW_LABEL};
