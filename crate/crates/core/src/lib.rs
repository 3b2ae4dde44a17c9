//! Two-sided bounds on the distance from a point in C^2 to the zero set of
//! a bivariate polynomial, computed from the polynomial's mixed partials at
//! that point alone.
//!
//! The crate is organised in four layers:
//!
//! * [`polynomial`]: dense bivariate/univariate polynomials with evaluation,
//!   differentiation, Taylor shift, line restriction, and unitary changes of
//!   coordinates.
//! * [`bounds`]: the derivative ratio `gamma` and the certified lower and
//!   upper distance bounds built from it, plus single-line (axis) bounds.
//! * [`oracle`]: an independent numerical estimate of the true distance via
//!   a sweep of complex lines through the point, used to sandwich-test the
//!   certified bounds.
//! * [`subdivision`]: a quadtree renderer for real curves that uses the
//!   lower bound as a box exclusion predicate, with SVG output.
//!
//! With the default `parallel` feature the direction sweep and the quadtree
//! recursion run on rayon; the sequential fallback produces bit-identical
//! results.

pub mod bounds;
pub mod oracle;
pub mod polynomial;
pub mod subdivision;

pub use num_complex::Complex64;
