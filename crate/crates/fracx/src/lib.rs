//! fracx: a convexification toolkit for fractional programs.
//!
//! Builds, solves, and compares linear relaxations of sums of ratios of
//! affine functions over polyhedra with binary variables: McCormick-lifted
//! extended formulations, homogenized first-level RLT, boolean-quadric-
//! polytope cuts (triangle, odd cycle), a finite RLT hierarchy that reaches
//! the simultaneous hull, and Hankel moment-hull relaxations for univariate
//! fractional terms. Everything is verified against exhaustive oracles at
//! desk scale.

pub mod bench;
pub mod bqp;
pub mod lp;
pub mod model;
pub mod moment;
pub mod oracle;
pub mod transform;
