//! Exact Poisson homology and cohomology with coefficients in free Poisson
//! modules over polynomial rings, and a checker for the twisted duality
//! between them.

pub mod calculus;
pub mod catalog;
pub mod cli;
pub mod complexes;
pub mod homology;
pub mod linalg;
pub mod pmodule;
pub mod poisson;
pub mod poly;
pub mod random;
