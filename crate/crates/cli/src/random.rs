//! Seeded random instances for batch checks and the test suites.
//!
//! The distribution is fixed: full coefficient triangles drawn uniformly
//! from the complex unit disk, evaluation points from a polydisk, and
//! points nearly on the zero set rejected so the bound machinery has a
//! nonzero value to divide by.

use rand::Rng;
use varsep::polynomial::{BivariatePoly, Point2};
use varsep::Complex64;

/// Threshold below which an instance counts as on-variety and is redrawn.
pub const REJECT_VALUE: f64 = 1e-8;

/// Uniform sample from the closed disk of the given radius (rejection
/// from the bounding square).
pub fn disk(rng: &mut impl Rng, radius: f64) -> Complex64 {
    loop {
        let re: f64 = rng.gen_range(-1.0..=1.0);
        let im: f64 = rng.gen_range(-1.0..=1.0);
        if re * re + im * im <= 1.0 {
            return Complex64::new(re * radius, im * radius);
        }
    }
}

/// Dense polynomial of exactly the given total degree, coefficients
/// uniform in the unit disk.
pub fn poly(rng: &mut impl Rng, degree: usize) -> BivariatePoly {
    let mut terms = Vec::new();
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            terms.push(((i, j), disk(rng, 1.0)));
        }
    }
    BivariatePoly::from_terms(terms).expect("unit-disk coefficients are finite")
}

/// Point with both coordinates uniform in the radius-`radius` disk.
pub fn point(rng: &mut impl Rng, radius: f64) -> Point2 {
    Point2::new(disk(rng, radius), disk(rng, radius))
}

/// One test instance: degree uniform in `1..=max_degree`, point in the
/// radius-2 polydisk, redrawn until the value at the point clears
/// [`REJECT_VALUE`].
pub fn instance(rng: &mut impl Rng, max_degree: usize) -> (BivariatePoly, Point2) {
    assert!(max_degree >= 1);
    loop {
        let d = rng.gen_range(1..=max_degree);
        let f = poly(rng, d);
        let p = point(rng, 2.0);
        if !f.is_zero() && f.eval(p).norm() >= REJECT_VALUE {
            return (f, p);
        }
    }
}
