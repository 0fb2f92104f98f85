//! Exact discrete optimal transport between `m` equally weighted sources and
//! `n` equally weighted targets, with tools for studying how rigid the
//! optimal plans are.
//!
//! Masses are integers at the scale `S = lcm(m, n)`, so every plan the
//! solver returns is an exact vertex of the transportation polytope.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`instance`] | cost matrices, point clouds, genericity scan, perturbation |
//! | [`solver`] | network simplex, dual certificates, crossings and uncrossing |
//! | [`analysis`] | fanout/fanin statistics and the rigidity bounds |
//! | [`constructions`] | Birkhoff decomposition, gcd dummy-point construction |
//! | [`oracle`] | brute-force enumeration of integral plans |
//! | [`harness`] | experiment presets and SVG output |
//! | [`io`] | instance JSON, plan CSV, stats and decomposition JSON |

pub mod analysis;
pub mod constructions;
pub mod error;
pub mod harness;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
pub use instance::{CostMatrix, Instance};
pub use solver::{objective, solve, TransportPlan};
