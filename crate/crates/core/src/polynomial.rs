//! Dense bivariate and univariate polynomials over `Complex64`.
//!
//! A bivariate polynomial is stored as a square coefficient grid indexed by
//! `(i, j)` for the monomial `x^i * y^j`, with everything above the
//! anti-diagonal `i + j = total_degree` exactly zero. Dense storage keeps
//! the Taylor shift cache-friendly: shifting is two passes of univariate
//! Horner shifts, first along rows (y) and then across rows (x).

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

/// Largest supported total degree.
///
/// Mixed partials scale coefficients by `i! * j!` with `i + j <= D`, and
/// 120 is the last degree for which every such product stays inside `f64`
/// range (`120! ~ 6.7e198`). Checked at construction.
pub const MAX_DEGREE: usize = 120;

const fn factorial_table() -> [f64; MAX_DEGREE + 1] {
    let mut t = [1.0_f64; MAX_DEGREE + 1];
    let mut i = 1;
    while i <= MAX_DEGREE {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
}

/// `n!` as `f64` for `n <= MAX_DEGREE`.
pub(crate) const FACTORIAL: [f64; MAX_DEGREE + 1] = factorial_table();

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("coefficient of x^{i}*y^{j} is not finite")]
    NonFiniteCoefficient { i: usize, j: usize },
    #[error("total degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooLarge(usize),
}

/// A point of C^2. Components must be finite; constructors check this.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: Complex64,
    pub y: Complex64,
}

impl Point2 {
    pub fn new(x: Complex64, y: Complex64) -> Self {
        assert!(
            x.is_finite() && y.is_finite(),
            "point components must be finite"
        );
        Self { x, y }
    }

    /// Point with real coordinates.
    pub fn real(x: f64, y: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), Complex64::new(y, 0.0))
    }

    pub fn origin() -> Self {
        Self {
            x: C_ZERO,
            y: C_ZERO,
        }
    }
}

/// A unit direction in C^2: `|u_x|^2 + |u_y|^2 = 1` within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction2 {
    ux: Complex64,
    uy: Complex64,
}

impl Direction2 {
    const UNIT_TOL: f64 = 1e-12;

    /// Wraps an already-normalized pair; panics if the norm is off by more
    /// than the tolerance above.
    pub fn new(ux: Complex64, uy: Complex64) -> Self {
        let n2 = ux.norm_sqr() + uy.norm_sqr();
        assert!(
            (n2 - 1.0).abs() <= Self::UNIT_TOL,
            "direction must have unit norm, got |u|^2 = {n2}"
        );
        Self { ux, uy }
    }

    /// Normalizes an arbitrary nonzero pair.
    pub fn normalized(ux: Complex64, uy: Complex64) -> Self {
        let n = (ux.norm_sqr() + uy.norm_sqr()).sqrt();
        assert!(
            n.is_finite() && n > 0.0,
            "cannot normalize a zero direction"
        );
        Self::new(ux / n, uy / n)
    }

    /// `(cos(alpha) e^{i beta}, sin(alpha) e^{i phi})`. Unit by construction.
    pub fn from_angles(alpha: f64, beta: f64, phi: f64) -> Self {
        Self {
            ux: Complex64::from_polar(alpha.cos(), beta),
            uy: Complex64::from_polar(alpha.sin(), phi),
        }
    }

    pub fn axis_x() -> Self {
        Self {
            ux: C_ONE,
            uy: C_ZERO,
        }
    }

    pub fn axis_y() -> Self {
        Self {
            ux: C_ZERO,
            uy: C_ONE,
        }
    }

    #[inline]
    pub fn ux(&self) -> Complex64 {
        self.ux
    }

    #[inline]
    pub fn uy(&self) -> Complex64 {
        self.uy
    }
}

/// In-place Taylor shift of univariate coefficients: rewrites `c` so that
/// the new polynomial at `t` equals the old one at `t + a`. Classic
/// repeated synthetic division, O(d^2).
pub(crate) fn shift_slice(c: &mut [Complex64], a: Complex64) {
    let d = c.len().saturating_sub(1);
    for k in 0..d {
        for j in (k..d).rev() {
            let add = a * c[j + 1];
            c[j] += add;
        }
    }
}

/// Univariate polynomial in one complex variable, low-order coefficient
/// first. Normalized so the leading coefficient is nonzero; the zero
/// polynomial is the single coefficient `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<Complex64>,
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        assert!(
            coeffs.iter().all(|c| c.is_finite()),
            "univariate coefficients must be finite"
        );
        while coeffs.len() > 1 && coeffs.last() == Some(&C_ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C_ZERO);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![C_ZERO],
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(C_ZERO)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == C_ZERO
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = C_ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let d: Vec<Complex64> = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, &c)| c * (k + 1) as f64)
            .collect();
        Self::new(d)
    }

    /// Coefficients of `g(t + a)`; entry `k` equals `g^(k)(a) / k!`.
    pub fn taylor_shift(&self, a: Complex64) -> Self {
        let mut c = self.coeffs.clone();
        shift_slice(&mut c, a);
        Self::new(c)
    }
}

/// Bivariate polynomial over C with dense coefficient storage.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    /// Square `(degree + 1)^2` grid, row-major; row index = power of x.
    coeffs: Vec<Complex64>,
    degree: usize,
    zero: bool,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self {
            coeffs: vec![C_ZERO],
            degree: 0,
            zero: true,
        }
    }

    pub fn constant(c: Complex64) -> Result<Self, PolyError> {
        Self::from_terms([((0, 0), c)])
    }

    /// Builds from `((i, j), coefficient)` terms; repeated index pairs are
    /// summed. Rejects non-finite coefficients and total degree above
    /// [`MAX_DEGREE`].
    pub fn from_terms<I>(terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = ((usize, usize), Complex64)>,
    {
        let mut acc: Vec<((usize, usize), Complex64)> = Vec::new();
        for ((i, j), c) in terms {
            if !c.is_finite() {
                return Err(PolyError::NonFiniteCoefficient { i, j });
            }
            match acc.iter_mut().find(|(ij, _)| *ij == (i, j)) {
                Some((_, sum)) => *sum += c,
                None => acc.push(((i, j), c)),
            }
        }
        let degree = acc
            .iter()
            .filter(|&&(_, c)| c != C_ZERO)
            .map(|&((i, j), _)| i + j)
            .max();
        let degree = match degree {
            None => return Ok(Self::zero()),
            Some(d) if d > MAX_DEGREE => return Err(PolyError::DegreeTooLarge(d)),
            Some(d) => d,
        };
        let side = degree + 1;
        let mut coeffs = vec![C_ZERO; side * side];
        for ((i, j), c) in acc {
            if c != C_ZERO {
                coeffs[i * side + j] = c;
            }
        }
        let out = Self {
            coeffs,
            degree,
            zero: false,
        };
        out.check_finite()?;
        Ok(out)
    }

    /// Normalizes a square grid: recomputes the total degree, repacks, and
    /// verifies finiteness.
    fn from_square_grid(grid: Vec<Complex64>, side: usize) -> Result<Self, PolyError> {
        debug_assert_eq!(grid.len(), side * side);
        let mut degree = None;
        for i in 0..side {
            for j in 0..side {
                if grid[i * side + j] != C_ZERO {
                    let k = i + j;
                    if degree.map_or(true, |d| k > d) {
                        degree = Some(k);
                    }
                }
            }
        }
        let degree = match degree {
            None => return Ok(Self::zero()),
            Some(d) if d > MAX_DEGREE => return Err(PolyError::DegreeTooLarge(d)),
            Some(d) => d,
        };
        let ns = degree + 1;
        let mut coeffs = vec![C_ZERO; ns * ns];
        for i in 0..ns.min(side) {
            for j in 0..ns.min(side) {
                if i + j <= degree {
                    coeffs[i * ns + j] = grid[i * side + j];
                }
            }
        }
        let out = Self {
            coeffs,
            degree,
            zero: false,
        };
        out.check_finite()?;
        Ok(out)
    }

    fn check_finite(&self) -> Result<(), PolyError> {
        let side = self.degree + 1;
        for i in 0..side {
            for j in 0..side {
                if !self.coeffs[i * side + j].is_finite() {
                    return Err(PolyError::NonFiniteCoefficient { i, j });
                }
            }
        }
        Ok(())
    }

    /// Total degree; 0 for constants, including the zero polynomial (which
    /// is additionally flagged by [`is_zero`](Self::is_zero)).
    pub fn total_degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Coefficient of `x^i * y^j`, zero outside the stored triangle.
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i + j > self.degree {
            return C_ZERO;
        }
        self.coeffs[i * (self.degree + 1) + j]
    }

    /// Nonzero terms in row-major order.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        let side = self.degree + 1;
        (0..side).flat_map(move |i| {
            (0..side - i).filter_map(move |j| {
                let c = self.coeffs[i * side + j];
                (c != C_ZERO).then_some(((i, j), c))
            })
        })
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Nested Horner evaluation: the polynomial is read as a polynomial in
    /// x whose coefficients are polynomials in y.
    pub fn eval(&self, p: Point2) -> Complex64 {
        let n = self.degree;
        let side = n + 1;
        let mut acc = C_ZERO;
        for i in (0..side).rev() {
            let row = &self.coeffs[i * side..(i + 1) * side];
            let mut r = C_ZERO;
            for j in (0..side - i).rev() {
                r = r * p.y + row[j];
            }
            acc = acc * p.x + r;
        }
        acc
    }

    /// Mixed partial derivative `d^(ox+oy) f / dx^ox dy^oy` as a polynomial.
    pub fn partial(&self, ox: usize, oy: usize) -> Self {
        if self.zero || ox + oy > self.degree {
            return Self::zero();
        }
        let n = self.degree;
        let side = n + 1;
        let m = n - ox - oy;
        let ns = m + 1;
        let mut grid = vec![C_ZERO; ns * ns];
        for r in 0..=m {
            for s in 0..=m - r {
                let fx = FACTORIAL[r + ox] / FACTORIAL[r];
                let fy = FACTORIAL[s + oy] / FACTORIAL[s];
                grid[r * ns + s] = self.coeffs[(r + ox) * side + (s + oy)] * (fx * fy);
            }
        }
        Self::from_square_grid(grid, ns).expect("derivative coefficients stay finite")
    }

    /// Recentered coefficients: returns `g` with `g(x, y) = f(x + p.x, y + p.y)`.
    ///
    /// Two passes of univariate Horner shifts (rows in y, then across rows
    /// in x), O(degree^3) arithmetic. The total degree is preserved exactly:
    /// the top homogeneous part is untouched by either pass.
    pub fn taylor_shift(&self, p: Point2) -> Self {
        if self.zero {
            return Self::zero();
        }
        let n = self.degree;
        let side = n + 1;
        let mut g = self.coeffs.clone();
        if p.y != C_ZERO {
            for i in 0..side {
                shift_slice(&mut g[i * side..i * side + (side - i)], p.y);
            }
        }
        if p.x != C_ZERO {
            // Same recurrence with whole rows as the "coefficients".
            for k in 0..n {
                for r in (k..n).rev() {
                    for j in 0..side {
                        let add = p.x * g[(r + 1) * side + j];
                        g[r * side + j] += add;
                    }
                }
            }
        }
        Self {
            coeffs: g,
            degree: n,
            zero: false,
        }
    }

    /// Every mixed partial evaluated at `p`: one Taylor shift, then the
    /// factorial rescaling `f_(i,j)(p) = i! * j! * b_(i,j)`.
    pub fn eval_all_partials(&self, p: Point2) -> PartialsTable {
        let shifted = self.taylor_shift(p);
        let n = self.degree;
        let mut values = Vec::with_capacity((n + 1) * (n + 2) / 2);
        for k in 0..=n {
            for i in 0..=k {
                let j = k - i;
                values.push(shifted.coeff(i, j) * (FACTORIAL[i] * FACTORIAL[j]));
            }
        }
        PartialsTable { degree: n, values }
    }

    /// Collapses the polynomial onto the line `t -> t * u` through the
    /// origin of its own coordinates.
    pub(crate) fn collapse_direction(&self, u: Direction2) -> UnivariatePoly {
        if self.zero {
            return UnivariatePoly::zero();
        }
        let n = self.degree;
        let mut px = Vec::with_capacity(n + 1);
        let mut py = Vec::with_capacity(n + 1);
        px.push(C_ONE);
        py.push(C_ONE);
        for k in 1..=n {
            px.push(px[k - 1] * u.ux);
            py.push(py[k - 1] * u.uy);
        }
        let mut c = vec![C_ZERO; n + 1];
        for ((i, j), a) in self.terms() {
            c[i + j] += a * px[i] * py[j];
        }
        UnivariatePoly::new(c)
    }

    /// Restriction to the complex line `t -> p + t * u`, as a univariate
    /// polynomial in `t`. The degree deflates whenever the direction kills
    /// the top coefficients (normalization strips exact zeros).
    pub fn restrict_to_line(&self, p: Point2, u: Direction2) -> UnivariatePoly {
        self.taylor_shift(p).collapse_direction(u)
    }

    /// Substitutes the linear forms `x = xx*X + xy*Y`, `y = yx*X + yy*Y`.
    fn substitute_linear(
        &self,
        xx: Complex64,
        xy: Complex64,
        yx: Complex64,
        yy: Complex64,
    ) -> Self {
        if self.zero {
            return Self::zero();
        }
        let n = self.degree;
        let side = n + 1;
        // powers[m] = coefficients of (a X + b Y)^m over X^r Y^(m-r).
        let form_powers = |a: Complex64, b: Complex64| -> Vec<Vec<Complex64>> {
            let mut pows = Vec::with_capacity(n + 1);
            pows.push(vec![C_ONE]);
            for m in 1..=n {
                let prev: &Vec<Complex64> = &pows[m - 1];
                let mut cur = vec![C_ZERO; m + 1];
                for r in 0..=m {
                    let mut v = C_ZERO;
                    if r > 0 {
                        v += a * prev[r - 1];
                    }
                    if r < m {
                        v += b * prev[r];
                    }
                    cur[r] = v;
                }
                pows.push(cur);
            }
            pows
        };
        let pow_x = form_powers(xx, xy);
        let pow_y = form_powers(yx, yy);
        let mut grid = vec![C_ZERO; side * side];
        for ((i, j), a) in self.terms() {
            let k = i + j;
            // Convolution of the two homogeneous forms, degree k.
            for r in 0..=i {
                for s in 0..=j {
                    let t = r + s;
                    grid[t * side + (k - t)] += a * pow_x[i][r] * pow_y[j][s];
                }
            }
        }
        Self::from_square_grid(grid, side).expect("unitary substitution keeps coefficients finite")
    }

    /// Change of coordinates by the unitary map
    /// `x = (e^{i theta} X + e^{-i psi} Y) / sqrt(2)`,
    /// `y = (e^{i psi} X - e^{-i theta} Y) / sqrt(2)`.
    ///
    /// Distances to the zero set are invariant under this substitution, so
    /// bounds computed for the image polynomial transfer verbatim.
    pub fn rotate_unitary(&self, theta: f64, psi: f64) -> Self {
        let (a, b, c, d) = unitary_entries(theta, psi);
        self.substitute_linear(a, b, c, d)
    }

    /// Inverse of [`rotate_unitary`](Self::rotate_unitary) (the adjoint
    /// substitution); composing the two returns the original polynomial up
    /// to rounding.
    pub fn rotate_unitary_inverse(&self, theta: f64, psi: f64) -> Self {
        let (a, b, c, d) = unitary_entries(theta, psi);
        self.substitute_linear(a.conj(), c.conj(), b.conj(), d.conj())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -*c;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, PolyError> {
        let side = self.degree.max(rhs.degree) + 1;
        let mut grid = vec![C_ZERO; side * side];
        for ((i, j), c) in self.terms().chain(rhs.terms()) {
            grid[i * side + j] += c;
        }
        Self::from_square_grid(grid, side)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, PolyError> {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, PolyError> {
        if self.zero || rhs.zero {
            return Ok(Self::zero());
        }
        let d = self.degree + rhs.degree;
        if d > MAX_DEGREE {
            return Err(PolyError::DegreeTooLarge(d));
        }
        let side = d + 1;
        let mut grid = vec![C_ZERO; side * side];
        for ((i1, j1), c1) in self.terms() {
            for ((i2, j2), c2) in rhs.terms() {
                grid[(i1 + i2) * side + (j1 + j2)] += c1 * c2;
            }
        }
        Self::from_square_grid(grid, side)
    }

    pub fn powi(&self, exp: u32) -> Result<Self, PolyError> {
        let d = self.degree * exp as usize;
        if !self.zero && d > MAX_DEGREE {
            return Err(PolyError::DegreeTooLarge(d));
        }
        let mut out = Self::constant(C_ONE)?;
        for _ in 0..exp {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Result<Self, PolyError> {
        let side = self.degree + 1;
        let grid = self.coeffs.iter().map(|&a| a * c).collect();
        Self::from_square_grid(grid, side)
    }
}

fn unitary_entries(theta: f64, psi: f64) -> (Complex64, Complex64, Complex64, Complex64) {
    let s = FRAC_1_SQRT_2;
    (
        Complex64::from_polar(s, theta),
        Complex64::from_polar(s, -psi),
        Complex64::from_polar(s, psi),
        -Complex64::from_polar(s, -theta),
    )
}

/// Image of a point under the unitary map used by
/// [`BivariatePoly::rotate_unitary`].
pub fn rotate_point(theta: f64, psi: f64, p: Point2) -> Point2 {
    let (a, b, c, d) = unitary_entries(theta, psi);
    Point2::new(a * p.x + b * p.y, c * p.x + d * p.y)
}

/// Image of a point under the inverse (adjoint) map: if `F = f.rotate_unitary`
/// then `F(rotate_point_inverse(q)) = f(q)`.
pub fn rotate_point_inverse(theta: f64, psi: f64, p: Point2) -> Point2 {
    let (a, b, c, d) = unitary_entries(theta, psi);
    Point2::new(
        a.conj() * p.x + c.conj() * p.y,
        b.conj() * p.x + d.conj() * p.y,
    )
}

/// All mixed partials of a polynomial at one point, indexed by derivative
/// order `(i, j)`.
#[derive(Debug, Clone)]
pub struct PartialsTable {
    degree: usize,
    /// Triangular layout: order `k` occupies `k*(k+1)/2 ..`, entry `i`
    /// within a row is the `(i, k-i)` partial.
    values: Vec<Complex64>,
}

impl PartialsTable {
    /// Value of `d^(i+j) f / dx^i dy^j` at the table's point; zero above
    /// the total degree.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let k = i + j;
        if k > self.degree {
            return C_ZERO;
        }
        self.values[k * (k + 1) / 2 + i]
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}
