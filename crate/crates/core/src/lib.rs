//! Biobjective maximum-flow network interdiction on two-terminal
//! series-parallel graphs.
//!
//! An interdictor removes arcs under a budget so as to minimize two
//! maximum-flow values at once, one per capacity function. The crate
//! computes the nondominated outcomes of that game:
//!
//! * [`exact`]: pseudopolynomial dynamic program over the series-parallel
//!   decomposition tree, returning the full nondominated front.
//! * [`fptas`]: geometric-rounding approximation scheme for unit
//!   interdiction costs.
//! * [`knapsack`]: biobjective knapsack equivalence on parallel graphs and
//!   the knapsack hardness construction.
//! * [`oracle`]: brute-force enumeration used as ground truth.
//!
//! Supporting modules hold the data model ([`model`]), decomposition trees
//! ([`sp`]), flow evaluation ([`flow`]), Pareto-set algebra ([`pareto`]),
//! exact rational rounding ([`rounding`]) and seeded instance generation
//! ([`generator`]).

pub mod error;
pub mod exact;
pub mod flow;
pub mod fptas;
pub mod generator;
pub mod knapsack;
pub mod model;
pub mod oracle;
pub mod pareto;
pub mod rounding;
pub mod sp;

mod table;

pub use error::{Error, Result};
pub use model::{ArcAttrs, ArcId, Capacity, Dominance, Instance, Strategy, Topology, ValuePair};
pub use pareto::LabeledPoint;
pub use rounding::Epsilon;
pub use sp::{EdgeList, SpTree};
