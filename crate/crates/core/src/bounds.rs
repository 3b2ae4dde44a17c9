//! Certified distance bounds from derivative ratios at a single point.
//!
//! For `f` of total degree `D` with `f(p) != 0`, let
//!
//! ```text
//! gamma = max over 1 <= k <= D, 0 <= i <= k of |f_(i,k-i)(p) / f(p)|^(1/k)
//! ```
//!
//! where `f_(i,j)` is the mixed partial of order `(i, j)`. The distance
//! `sep` from `p` to the zero set of `f` then satisfies
//!
//! ```text
//! ln(2) / (sqrt(2) * gamma)  <=  sep  <  2 D / gamma
//! ```
//!
//! so the two sides always agree up to the fixed factor
//! `2 D sqrt(2) / ln 2`. All k-th roots are taken in log space: the ratio
//! of a huge derivative to a tiny value stays representable as a logarithm
//! long after the plain quotient would overflow.

use num_complex::Complex64;
use std::f64::consts::{LN_2, SQRT_2};
use thiserror::Error;

use crate::oracle::ON_VARIETY_EPS;
use crate::polynomial::{BivariatePoly, Direction2, Point2, UnivariatePoly, FACTORIAL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("the point lies on the zero set, no ratio bound exists there")]
    OnVariety,
    #[error("polynomial is identically zero")]
    IdenticallyZero,
}

/// Everything the bound machinery derives at one point.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub degree: usize,
    pub value_at_p: Complex64,
    pub gamma: f64,
    /// `ln 2 / (sqrt 2 * gamma)`; certified: no zero of `f` lies closer.
    pub lower: f64,
    /// The weaker closed form `1 / (3 gamma)`, always <= `lower`.
    pub lower_coarse: f64,
    /// `2 D / gamma`; certified: some zero of `f` lies strictly closer.
    pub upper: f64,
    /// Row `k-1` holds `max_i |f_(i,k-i)(p)/f(p)|^(1/k)`; `gamma` is the
    /// largest row.
    pub per_order: Vec<PerOrderRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerOrderRow {
    pub k: usize,
    pub max_ratio: f64,
}

fn per_order_rows(
    f: &BivariatePoly,
    p: Point2,
) -> Result<(Vec<PerOrderRow>, Complex64), BoundsError> {
    if f.is_zero() {
        return Err(BoundsError::IdenticallyZero);
    }
    let table = f.eval_all_partials(p);
    let value = table.get(0, 0);
    if value.norm() < ON_VARIETY_EPS {
        return Err(BoundsError::OnVariety);
    }
    let ln_value = value.norm().ln();
    let d = f.total_degree();
    let mut rows = Vec::with_capacity(d);
    for k in 1..=d {
        let mut row = 0.0_f64;
        for i in 0..=k {
            // |f_(i,k-i)/f|^(1/k) via logs; a zero partial contributes
            // exp(-inf) = 0 with no special casing.
            let ratio = ((table.get(i, k - i).norm().ln() - ln_value) / k as f64).exp();
            row = row.max(ratio);
        }
        rows.push(PerOrderRow { k, max_ratio: row });
    }
    Ok((rows, value))
}

/// The derivative ratio `gamma` at `p`. Zero exactly when `f` is a nonzero
/// constant (no derivatives exist to compete with the value).
pub fn gamma(f: &BivariatePoly, p: Point2) -> Result<f64, BoundsError> {
    let (rows, _) = per_order_rows(f, p)?;
    Ok(rows.iter().fold(0.0, |m, r| m.max(r.max_ratio)))
}

/// Certified lower bound `ln 2 / (sqrt 2 * gamma)` on the distance from
/// `p` to the zero set. `+infinity` when the zero set is empty.
pub fn sep_lower(f: &BivariatePoly, p: Point2) -> Result<f64, BoundsError> {
    let g = gamma(f, p)?;
    Ok(if g == 0.0 {
        f64::INFINITY
    } else {
        LN_2 / (SQRT_2 * g)
    })
}

/// Certified strict upper bound `2 D / gamma` on the same distance.
/// `+infinity` for nonzero constants.
pub fn sep_upper(f: &BivariatePoly, p: Point2) -> Result<f64, BoundsError> {
    let g = gamma(f, p)?;
    let d = f.total_degree();
    Ok(if d == 0 {
        f64::INFINITY
    } else {
        2.0 * d as f64 / g
    })
}

/// Full per-point report; one derivative-table pass serves every field.
pub fn bound_report(f: &BivariatePoly, p: Point2) -> Result<BoundReport, BoundsError> {
    let (per_order, value_at_p) = per_order_rows(f, p)?;
    let gamma = per_order.iter().fold(0.0_f64, |m, r| m.max(r.max_ratio));
    let d = f.total_degree();
    let (lower, lower_coarse, upper) = if gamma == 0.0 {
        (f64::INFINITY, f64::INFINITY, f64::INFINITY)
    } else {
        (
            LN_2 / (SQRT_2 * gamma),
            1.0 / (3.0 * gamma),
            2.0 * d as f64 / gamma,
        )
    };
    Ok(BoundReport {
        degree: d,
        value_at_p,
        gamma,
        lower,
        lower_coarse,
        upper,
        per_order,
    })
}

/// Which constant multiplies the k-th derivative ratio in the univariate
/// upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnivariateBoundForm {
    /// `(k! C(d,k) |g(z)/g^(k)(z)|)^(1/k)`: the term-count constant of the
    /// logarithmic-derivative expansion, with the factorial that the
    /// k-fold product rule generates. Never larger than [`Degree`] (since
    /// `k! C(d,k) <= d^k`) and tight for `g = t^2 - 1` at the origin.
    ///
    /// [`Degree`]: UnivariateBoundForm::Degree
    Sharp,
    /// `d * |g(z)/g^(k)(z)|^(1/k)`: the same bound with `k! C(d,k)`
    /// relaxed to `d^k`.
    Degree,
}

/// Upper bound on the distance from `z` to the nearest root of `g`:
/// the minimum over derivative orders `k` of the chosen constant times
/// `|g(z)/g^(k)(z)|^(1/k)`. Orders with a vanishing derivative are skipped;
/// for degree-1 input both forms return the root distance exactly.
/// `+infinity` for nonzero constants (no roots at all).
pub fn univariate_sep_upper_with(
    g: &UnivariatePoly,
    z: Complex64,
    form: UnivariateBoundForm,
) -> Result<f64, BoundsError> {
    if g.is_zero() {
        return Err(BoundsError::IdenticallyZero);
    }
    let shifted = g.taylor_shift(z);
    let value = shifted.coeff(0);
    if value.norm() < ON_VARIETY_EPS {
        return Err(BoundsError::OnVariety);
    }
    let d = g.degree();
    if d == 0 {
        return Ok(f64::INFINITY);
    }
    let ln_value = value.norm().ln();
    let mut best = f64::INFINITY;
    for k in 1..=d {
        // g^(k)(z) = k! * (shifted coefficient k).
        let deriv = FACTORIAL[k] * shifted.coeff(k).norm();
        if deriv == 0.0 {
            continue;
        }
        let ln_ratio = ln_value - deriv.ln();
        let bound = match form {
            UnivariateBoundForm::Sharp => {
                // k! C(d,k) = d! / (d-k)!.
                let falling = FACTORIAL[d] / FACTORIAL[d - k];
                ((falling.ln() + ln_ratio) / k as f64).exp()
            }
            UnivariateBoundForm::Degree => d as f64 * (ln_ratio / k as f64).exp(),
        };
        best = best.min(bound);
    }
    Ok(best)
}

/// [`univariate_sep_upper_with`] using the sharp constant.
pub fn univariate_sep_upper(g: &UnivariatePoly, z: Complex64) -> Result<f64, BoundsError> {
    univariate_sep_upper_with(g, z, UnivariateBoundForm::Sharp)
}

/// Upper bounds along the two coordinate lines through `p`: the univariate
/// bound applied to `t -> f(p + t e_x)` and `t -> f(p + t e_y)`, in that
/// order. Either entry is `+infinity` when the corresponding restriction
/// is constant (the line misses the zero set).
pub fn axis_bounds(f: &BivariatePoly, p: Point2) -> Result<(f64, f64), BoundsError> {
    if f.is_zero() {
        return Err(BoundsError::IdenticallyZero);
    }
    let shifted = f.taylor_shift(p);
    if shifted.coeff(0, 0).norm() < ON_VARIETY_EPS {
        return Err(BoundsError::OnVariety);
    }
    let zero = Complex64::new(0.0, 0.0);
    let gx = shifted.collapse_direction(Direction2::axis_x());
    let gy = shifted.collapse_direction(Direction2::axis_y());
    Ok((
        univariate_sep_upper(&gx, zero)?,
        univariate_sep_upper(&gy, zero)?,
    ))
}

/// `gamma` at the origin read directly off the coefficients:
/// `max over k, i of (i! (k-i)! |a_(i,k-i) / a_(0,0)|)^(1/k)`.
///
/// Agrees with [`gamma`] at the origin because `f_(i,j)(0) = i! j! a_(i,j)`;
/// the factorial product is exactly `k! / C(k,i)`.
pub fn coefficient_gamma(f: &BivariatePoly) -> Result<f64, BoundsError> {
    if f.is_zero() {
        return Err(BoundsError::IdenticallyZero);
    }
    let a0 = f.coeff(0, 0);
    if a0.norm() < ON_VARIETY_EPS {
        return Err(BoundsError::OnVariety);
    }
    let ln_a0 = a0.norm().ln();
    let d = f.total_degree();
    let mut best = 0.0_f64;
    for k in 1..=d {
        for i in 0..=k {
            let weight = FACTORIAL[i] * FACTORIAL[k - i];
            let ln_term = (weight * f.coeff(i, k - i).norm()).ln();
            best = best.max(((ln_term - ln_a0) / k as f64).exp());
        }
    }
    Ok(best)
}
