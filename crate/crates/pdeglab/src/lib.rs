//! An executable laboratory for the probabilistic degree of Boolean
//! functions: exact truth-table measures, multilinear rational polynomials,
//! seeded probabilistic polynomials with certified degree bounds, the
//! OR/AND constructions and their reductions, a Hadamard-coded addressing
//! upper-bound construction, a decision-tree projection pipeline producing
//! pseudoaddressing certificates, and an exact agreement oracle.
//!
//! Everything random is driven by explicit 64-bit seeds (see [`seed`]);
//! identical seeds reproduce identical artifacts bit for bit.

pub mod agreement;
pub mod boolfn;
pub mod error;
pub mod hadamard;
pub mod orpoly;
pub mod poly;
pub mod probpoly;
pub mod projection;
pub mod seed;
pub mod tree;

pub use boolfn::{BooleanFunction, Projection, Restriction, RestrictionValue};
pub use error::{Error, Result};
pub use poly::Polynomial;
pub use probpoly::ProbPolynomial;
pub use tree::{DecisionTree, TreeNode, TreePath};
