//! Gap reductions from bounded 3-dimensional matching to 2-dimensional vector
//! bin packing (general and skewed) and vector bin covering: instance
//! generators, exact and heuristic solvers, and brute-force verifiers.

pub mod gadgets;
pub mod matching;
pub mod model;
pub mod solvers;
pub mod verify;
