//! Randomized invariants tying the four core modules together.
//!
//! Cheap algebraic identities run under proptest; the heavier numeric
//! checks (direction sweeps, subdivision audits) run as fixed seeded
//! loops so the suite stays fast and reproducible.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{LN_2, SQRT_2};
use varsep::bounds::{
    coefficient_gamma, gamma, sep_lower, sep_upper, univariate_sep_upper_with, UnivariateBoundForm,
};
use varsep::oracle::{sep_estimate, SamplingPlan};
use varsep::polynomial::{rotate_point_inverse, BivariatePoly, Direction2, Point2, UnivariatePoly};
use varsep::subdivision::{exclusion_test, subdivide, BoxRegion};

fn poly_from_flat(degree: usize, coeffs: &[(f64, f64)]) -> BivariatePoly {
    let mut terms = Vec::new();
    let mut it = coeffs.iter();
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            let &(re, im) = it.next().unwrap();
            terms.push(((i, j), Complex64::new(re, im)));
        }
    }
    BivariatePoly::from_terms(terms).unwrap()
}

fn arb_poly(max_degree: usize, real_only: bool) -> impl Strategy<Value = BivariatePoly> {
    (1..=max_degree).prop_flat_map(move |d| {
        let n = (d + 1) * (d + 2) / 2;
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |mut cs| {
            if real_only {
                for c in &mut cs {
                    c.1 = 0.0;
                }
            }
            poly_from_flat(d, &cs)
        })
    })
}

fn arb_point(radius: f64) -> impl Strategy<Value = Point2> {
    let r = move || -radius..radius;
    (r(), r(), r(), r())
        .prop_map(|(a, b, c, d)| Point2::new(Complex64::new(a, b), Complex64::new(c, d)))
}

fn arb_real_point(radius: f64) -> impl Strategy<Value = Point2> {
    let r = move || -radius..radius;
    (r(), r()).prop_map(|(a, b)| Point2::real(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    /// Central finite differences reproduce the first partials.
    #[test]
    fn finite_differences_match_first_partials(
        f in arb_poly(6, true),
        p in arb_real_point(1.5),
    ) {
        let h = 1e-5;
        let fx = f.partial(1, 0).eval(p);
        let fy = f.partial(0, 1).eval(p);
        let east = f.eval(Point2::real(p.x.re + h, p.y.re));
        let west = f.eval(Point2::real(p.x.re - h, p.y.re));
        let north = f.eval(Point2::real(p.x.re, p.y.re + h));
        let south = f.eval(Point2::real(p.x.re, p.y.re - h));
        let fd_x = (east - west) / (2.0 * h);
        let fd_y = (north - south) / (2.0 * h);
        prop_assert!((fd_x - fx).norm() <= 1e-6 * (1.0 + fx.norm()));
        prop_assert!((fd_y - fy).norm() <= 1e-6 * (1.0 + fy.norm()));
    }

    /// Shifting the polynomial and shifting the argument agree.
    #[test]
    fn taylor_shift_preserves_evaluation(
        f in arb_poly(6, false),
        p in arb_point(1.5),
        q in arb_point(1.5),
    ) {
        let shifted = f.taylor_shift(p);
        let a = shifted.eval(q);
        let b = f.eval(Point2::new(q.x + p.x, q.y + p.y));
        prop_assert!(
            (a - b).norm() <= 1e-11 * (1.0 + a.norm() + b.norm()),
            "shifted {a} direct {b}"
        );
    }

    /// A line restriction evaluates like the polynomial along the line.
    #[test]
    fn line_restriction_matches_direct_evaluation(
        f in arb_poly(6, false),
        p in arb_point(1.5),
        alpha in 0.0..std::f64::consts::FRAC_PI_2,
        phi in 0.0..std::f64::consts::TAU,
        t_re in -2.0f64..2.0,
        t_im in -2.0f64..2.0,
    ) {
        let u = Direction2::from_angles(alpha, 0.0, phi);
        let g = f.restrict_to_line(p, u);
        let t = Complex64::new(t_re, t_im);
        let moved = Point2::new(p.x + t * u.ux(), p.y + t * u.uy());
        let a = g.eval(t);
        let b = f.eval(moved);
        prop_assert!(
            (a - b).norm() <= 1e-10 * (1.0 + a.norm() + b.norm()),
            "restricted {a} direct {b}"
        );
    }

    /// The coefficient-based ratio equals the derivative ratio at the
    /// origin.
    #[test]
    fn coefficient_form_matches_origin_form(f in arb_poly(8, false)) {
        prop_assume!(f.coeff(0, 0).norm() > 1e-6);
        let a = coefficient_gamma(&f).unwrap();
        let b = gamma(&f, Point2::origin()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.max(1.0), "{a} vs {b}");
    }

    /// Upper over lower is a degree-only constant.
    #[test]
    fn bound_ratio_depends_only_on_degree(
        f in arb_poly(7, false),
        p in arb_point(1.5),
    ) {
        prop_assume!(f.eval(p).norm() > 1e-6);
        let lower = sep_lower(&f, p).unwrap();
        let upper = sep_upper(&f, p).unwrap();
        prop_assume!(lower.is_finite());
        let want = 2.0 * f.total_degree() as f64 * SQRT_2 / LN_2;
        let got = upper / lower;
        prop_assert!((got - want).abs() <= 1e-12 * want, "{got} vs {want}");
    }

    /// The factorial-weighted univariate bound never exceeds the plain
    /// degree-power form.
    #[test]
    fn sharp_univariate_bound_no_larger_than_degree_form(
        coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..=9),
        z_re in -2.0f64..2.0,
        z_im in -2.0f64..2.0,
    ) {
        let g = UnivariatePoly::new(
            coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        );
        prop_assume!(g.degree() >= 1);
        let z = Complex64::new(z_re, z_im);
        prop_assume!(g.eval(z).norm() > 1e-9);
        let sharp = univariate_sep_upper_with(&g, z, UnivariateBoundForm::Sharp).unwrap();
        let degree = univariate_sep_upper_with(&g, z, UnivariateBoundForm::Degree).unwrap();
        prop_assert!(sharp <= degree * (1.0 + 1e-12), "{sharp} vs {degree}");
    }
}

/// The certified bounds sandwich the sweep estimate on random instances.
#[test]
fn bounds_sandwich_sweep_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let plan = SamplingPlan::default();
    let mut checked = 0;
    while checked < 30 {
        let d = rng.gen_range(1..=5);
        let n = (d + 1) * (d + 2) / 2;
        let coeffs: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = poly_from_flat(d, &coeffs);
        let p = Point2::new(
            Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
            Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
        );
        if f.is_zero() || f.eval(p).norm() < 1e-8 {
            continue;
        }
        checked += 1;
        let lower = sep_lower(&f, p).unwrap();
        let upper = sep_upper(&f, p).unwrap();
        let est = sep_estimate(&f, p, &plan).unwrap().value;
        assert!(
            lower <= est + 1e-9,
            "lower {lower} above estimate {est} (degree {d})"
        );
        assert!(
            est <= upper * 1.05,
            "estimate {est} above upper {upper} (degree {d})"
        );
    }
}

/// Rotating coordinates moves the bounds but keeps them a sandwich for
/// the same distance, measured on the original polynomial.
#[test]
fn rotated_bounds_still_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(402);
    let plan = SamplingPlan::default();
    let mut checked = 0;
    while checked < 12 {
        let d = rng.gen_range(1..=4);
        let n = (d + 1) * (d + 2) / 2;
        let coeffs: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let f = poly_from_flat(d, &coeffs);
        let p = Point2::new(
            Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
            Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)),
        );
        if f.is_zero() || f.eval(p).norm() < 1e-6 {
            continue;
        }
        checked += 1;
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let psi = rng.gen_range(0.0..std::f64::consts::TAU);
        let rotated = f.rotate_unitary(theta, psi);
        let q = rotate_point_inverse(theta, psi, p);
        let est = sep_estimate(&f, p, &plan).unwrap().value;
        let lower = sep_lower(&rotated, q).unwrap();
        let upper = sep_upper(&rotated, q).unwrap();
        assert!(
            lower <= est + 1e-9,
            "rotated lower {lower} above estimate {est}"
        );
        assert!(
            est <= upper * 1.05,
            "estimate {est} above rotated upper {upper}"
        );
    }
}

/// Excluded boxes never contain a sign change of a real curve.
#[test]
fn excluded_boxes_have_constant_sign() {
    let one = Complex64::new(1.0, 0.0);
    let curves = [
        BivariatePoly::from_terms([((2, 0), one), ((0, 2), one), ((0, 0), -one)]).unwrap(),
        BivariatePoly::from_terms([((4, 0), one), ((2, 0), -one), ((0, 2), one)]).unwrap(),
        BivariatePoly::from_terms([((1, 1), one), ((0, 0), -0.25 * one)]).unwrap(),
    ];
    for f in &curves {
        let out = subdivide(f, BoxRegion::root((0.0, 0.0), 2.0), 6).unwrap();
        for b in &out.excluded {
            let mut sign = 0.0f64;
            for gx in 0..5 {
                for gy in 0..5 {
                    let x = b.center.0 + b.half_width * (gx as f64 / 2.0 - 1.0);
                    let y = b.center.1 + b.half_width * (gy as f64 / 2.0 - 1.0);
                    let v = f.eval(Point2::real(x, y)).re;
                    assert!(v != 0.0, "zero inside excluded box at ({x}, {y})");
                    if sign == 0.0 {
                        sign = v.signum();
                    } else {
                        assert_eq!(
                            v.signum(),
                            sign,
                            "sign change inside excluded box centered at \
                             ({}, {})",
                            b.center.0,
                            b.center.1
                        );
                    }
                }
            }
        }
    }
}

/// The exclusion predicate is monotone in the box size: growing a box can
/// only lose the certificate, shrinking it concentric keeps it.
#[test]
fn exclusion_is_monotone_in_half_width() {
    let one = Complex64::new(1.0, 0.0);
    let f = BivariatePoly::from_terms([((2, 0), one), ((0, 2), one), ((0, 0), -one)]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(403);
    for _ in 0..200 {
        let cx = rng.gen_range(-2.0..2.0);
        let cy = rng.gen_range(-2.0..2.0);
        let h = rng.gen_range(1e-3..0.5);
        let small = BoxRegion {
            center: (cx, cy),
            half_width: h,
            depth: 0,
        };
        let large = BoxRegion {
            center: (cx, cy),
            half_width: 2.0 * h,
            depth: 0,
        };
        if exclusion_test(&f, &large) {
            assert!(exclusion_test(&f, &small));
        }
    }
}
