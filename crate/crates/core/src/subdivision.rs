//! Quadtree rendering of a real plane curve from the certified lower bound.
//!
//! A square box is *excluded* once the lower distance bound at its center
//! exceeds the half-diagonal: the curve provably misses the whole box.
//! Boxes that cannot be excluded are split into four children until a depth
//! cap, where the survivors are emitted as *undecided*. Because exclusion
//! is certified, the curve is contained in the union of undecided boxes;
//! no excluded box ever touches it.
//!
//! Outcome lists are always in canonical depth-first order with children
//! visited NW, NE, SW, SE, whether the recursion runs sequentially or on
//! rayon. Rendering is therefore byte-reproducible.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use thiserror::Error;

use crate::bounds::sep_lower;
use crate::polynomial::{BivariatePoly, Point2};

/// Hard cap on subdivision depth: at depth 24 the child coordinates ride on
/// the last few bits of the parent center, so deeper boxes would no longer
/// have exactly representable centers.
pub const MAX_SUBDIVISION_DEPTH: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SubdivisionError {
    #[error("polynomial is identically zero, every box meets the zero set")]
    IdenticallyZero,
    #[error("curve rendering needs real coefficients")]
    NonRealCoefficients,
    #[error("requested depth {0} exceeds the supported maximum {MAX_SUBDIVISION_DEPTH}")]
    DepthLimitExceeded(u32),
}

/// Axis-aligned square, identified by center and half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRegion {
    pub center: (f64, f64),
    pub half_width: f64,
    pub depth: u32,
}

impl BoxRegion {
    /// Root box of a subdivision run (depth 0).
    pub fn root(center: (f64, f64), half_width: f64) -> Self {
        assert!(
            center.0.is_finite() && center.1.is_finite(),
            "box center must be finite"
        );
        assert!(
            half_width.is_finite() && half_width > 0.0,
            "box half-width must be positive"
        );
        Self {
            center,
            half_width,
            depth: 0,
        }
    }

    /// Children in canonical order: NW, NE, SW, SE.
    fn children(&self) -> [BoxRegion; 4] {
        let h = self.half_width / 2.0;
        let (cx, cy) = self.center;
        let child = |dx: f64, dy: f64| BoxRegion {
            center: (cx + dx * h, cy + dy * h),
            half_width: h,
            depth: self.depth + 1,
        };
        [
            child(-1.0, 1.0),
            child(1.0, 1.0),
            child(-1.0, -1.0),
            child(1.0, -1.0),
        ]
    }
}

/// Result of one subdivision run.
#[derive(Debug, Clone)]
pub struct SubdivisionOutcome {
    /// Boxes certified to miss the curve, depth-first order.
    pub excluded: Vec<BoxRegion>,
    /// Depth-capped boxes that could not be excluded, depth-first order.
    pub undecided: Vec<BoxRegion>,
    /// Per-depth tallies for depths `0..=max_depth`.
    pub per_depth: Vec<DepthCount>,
    /// Number of exclusion-predicate evaluations performed.
    pub predicate_evaluations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthCount {
    pub depth: u32,
    pub excluded: usize,
    pub undecided: usize,
}

/// True when the certified lower bound at the box center clears the box
/// half-diagonal, so the zero set cannot enter the box. A center on (or
/// numerically indistinguishable from) the curve always fails.
pub fn exclusion_test(f: &BivariatePoly, b: &BoxRegion) -> bool {
    let center = Point2::real(b.center.0, b.center.1);
    match sep_lower(f, center) {
        Ok(lower) => lower > b.half_width * SQRT_2,
        Err(_) => false,
    }
}

type Partial = (Vec<BoxRegion>, Vec<BoxRegion>, u64);

fn recurse_seq(f: &BivariatePoly, b: BoxRegion, max_depth: u32) -> Partial {
    let mut excluded = Vec::new();
    let mut undecided = Vec::new();
    let mut evals = 0u64;
    let mut stack = vec![b];
    // Explicit stack, pushed in reverse child order to emit NW..SE first.
    while let Some(cur) = stack.pop() {
        evals += 1;
        if exclusion_test(f, &cur) {
            excluded.push(cur);
        } else if cur.depth == max_depth {
            undecided.push(cur);
        } else {
            let kids = cur.children();
            for k in kids.into_iter().rev() {
                stack.push(k);
            }
        }
    }
    (excluded, undecided, evals)
}

#[cfg(feature = "parallel")]
fn recurse_par(f: &BivariatePoly, b: BoxRegion, max_depth: u32) -> Partial {
    // Fork only near the root; the subtrees below are cheap enough that
    // sequential descent beats task overhead.
    const FORK_DEPTH: u32 = 6;
    if b.depth >= FORK_DEPTH {
        return recurse_seq(f, b, max_depth);
    }
    if exclusion_test(f, &b) {
        return (vec![b], Vec::new(), 1);
    }
    if b.depth == max_depth {
        return (Vec::new(), vec![b], 1);
    }
    let [nw, ne, sw, se] = b.children();
    let ((a, bb), (c, d)) = rayon::join(
        || {
            rayon::join(
                || recurse_par(f, nw, max_depth),
                || recurse_par(f, ne, max_depth),
            )
        },
        || {
            rayon::join(
                || recurse_par(f, sw, max_depth),
                || recurse_par(f, se, max_depth),
            )
        },
    );
    let evals = 1 + a.2 + bb.2 + c.2 + d.2;
    let mut excluded = a.0;
    let mut undecided = a.1;
    for part in [bb, c, d] {
        excluded.extend(part.0);
        undecided.extend(part.1);
    }
    (excluded, undecided, evals)
}

fn finish(
    excluded: Vec<BoxRegion>,
    undecided: Vec<BoxRegion>,
    evals: u64,
    max_depth: u32,
) -> SubdivisionOutcome {
    let mut per_depth: Vec<DepthCount> = (0..=max_depth)
        .map(|depth| DepthCount {
            depth,
            excluded: 0,
            undecided: 0,
        })
        .collect();
    for b in &excluded {
        per_depth[b.depth as usize].excluded += 1;
    }
    for b in &undecided {
        per_depth[b.depth as usize].undecided += 1;
    }
    SubdivisionOutcome {
        excluded,
        undecided,
        per_depth,
        predicate_evaluations: evals,
    }
}

fn check_inputs(f: &BivariatePoly, max_depth: u32) -> Result<(), SubdivisionError> {
    if f.is_zero() {
        return Err(SubdivisionError::IdenticallyZero);
    }
    if !f.has_real_coefficients() {
        return Err(SubdivisionError::NonRealCoefficients);
    }
    if max_depth > MAX_SUBDIVISION_DEPTH {
        return Err(SubdivisionError::DepthLimitExceeded(max_depth));
    }
    Ok(())
}

/// Runs the exclusion quadtree from `root` down to `max_depth`.
///
/// Increasing the depth only ever splits previously undecided boxes;
/// every excluded box of a shallower run is excluded again verbatim.
pub fn subdivide(
    f: &BivariatePoly,
    root: BoxRegion,
    max_depth: u32,
) -> Result<SubdivisionOutcome, SubdivisionError> {
    check_inputs(f, max_depth)?;
    #[cfg(feature = "parallel")]
    let (e, u, n) = recurse_par(f, root, max_depth);
    #[cfg(not(feature = "parallel"))]
    let (e, u, n) = recurse_seq(f, root, max_depth);
    Ok(finish(e, u, n, max_depth))
}

/// Always-sequential variant of [`subdivide`], for benchmarking and for
/// cross-checking that the parallel merge preserves canonical order.
pub fn subdivide_sequential(
    f: &BivariatePoly,
    root: BoxRegion,
    max_depth: u32,
) -> Result<SubdivisionOutcome, SubdivisionError> {
    check_inputs(f, max_depth)?;
    let (e, u, n) = recurse_seq(f, root, max_depth);
    Ok(finish(e, u, n, max_depth))
}

/// 17-significant-digit formatting: parses back to the identical double.
fn fmt_exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// Plain-text listing, one box per line:
/// `status depth center_x center_y half_width`, excluded boxes first,
/// both groups in canonical depth-first order.
pub fn box_list(outcome: &SubdivisionOutcome) -> String {
    let mut out = String::new();
    let mut emit = |status: &str, b: &BoxRegion| {
        let _ = writeln!(
            out,
            "{status} {} {} {} {}",
            b.depth,
            fmt_exact(b.center.0),
            fmt_exact(b.center.1),
            fmt_exact(b.half_width),
        );
    };
    for b in &outcome.excluded {
        emit("excluded", b);
    }
    for b in &outcome.undecided {
        emit("undecided", b);
    }
    out
}

/// SVG rendering of a subdivision outcome over its root box. Excluded
/// boxes are drawn first (light), then undecided boxes (dark); elements
/// appear in canonical depth-first order within each group, so the output
/// is byte-for-byte reproducible. The y axis is flipped so the picture
/// matches mathematical orientation.
pub fn render_svg(outcome: &SubdivisionOutcome, root: &BoxRegion) -> String {
    let side = 2.0 * root.half_width;
    let min_x = root.center.0 - root.half_width;
    let min_y = -(root.center.1 + root.half_width);
    let stroke = root.half_width / 512.0;
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" \
         width=\"800\" height=\"800\">\n",
        fmt_coord(min_x),
        fmt_coord(min_y),
        fmt_coord(side),
        fmt_coord(side),
    );
    let group = |svg: &mut String, boxes: &[BoxRegion], fill: &str| {
        let _ = write!(
            svg,
            "<g fill=\"{fill}\" stroke=\"#606060\" stroke-width=\"{}\">\n",
            fmt_coord(stroke)
        );
        for b in boxes {
            let _ = write!(
                svg,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n",
                fmt_coord(b.center.0 - b.half_width),
                fmt_coord(-(b.center.1 + b.half_width)),
                fmt_coord(2.0 * b.half_width),
                fmt_coord(2.0 * b.half_width),
            );
        }
        svg.push_str("</g>\n");
    };
    group(&mut svg, &outcome.excluded, "#e8ead8");
    group(&mut svg, &outcome.undecided, "#28537e");
    svg.push_str("</svg>\n");
    svg
}

fn fmt_coord(v: f64) -> String {
    // Fixed precision keeps the file compact; exact coordinates live in
    // the box list, the SVG is for looking at.
    format!("{v:.6}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::C_ONE;
    use num_complex::Complex64;

    fn circle() -> BivariatePoly {
        BivariatePoly::from_terms([((2, 0), C_ONE), ((0, 2), C_ONE), ((0, 0), -C_ONE)]).unwrap()
    }

    fn hyperbola_xy() -> BivariatePoly {
        BivariatePoly::from_terms([((1, 1), C_ONE)]).unwrap()
    }

    #[test]
    fn exclusion_cases() {
        let f = circle();
        // Far from the curve: excluded.
        let b = BoxRegion {
            center: (3.0, 3.0),
            half_width: 0.5,
            depth: 0,
        };
        assert!(exclusion_test(&f, &b));
        // Center on the curve: never excluded.
        let b = BoxRegion {
            center: (1.0, 0.0),
            half_width: 0.1,
            depth: 0,
        };
        assert!(!exclusion_test(&f, &b));
        // Center inside: lower bound ln(2)/2 < half-diagonal.
        let b = BoxRegion {
            center: (0.0, 0.0),
            half_width: 0.5,
            depth: 0,
        };
        assert!(!exclusion_test(&f, &b));
    }

    #[test]
    fn constant_excludes_at_the_root() {
        let one = BivariatePoly::constant(C_ONE).unwrap();
        let out = subdivide(&one, BoxRegion::root((0.0, 0.0), 2.0), 6).unwrap();
        assert_eq!(out.excluded.len(), 1);
        assert_eq!(out.excluded[0].depth, 0);
        assert!(out.undecided.is_empty());
        assert_eq!(out.predicate_evaluations, 1);
    }

    #[test]
    fn input_errors() {
        assert!(matches!(
            subdivide(&BivariatePoly::zero(), BoxRegion::root((0.0, 0.0), 1.0), 3),
            Err(SubdivisionError::IdenticallyZero)
        ));
        let complex_coeff =
            BivariatePoly::from_terms([((1, 0), Complex64::new(0.0, 1.0))]).unwrap();
        assert!(matches!(
            subdivide(&complex_coeff, BoxRegion::root((0.0, 0.0), 1.0), 3),
            Err(SubdivisionError::NonRealCoefficients)
        ));
        assert!(matches!(
            subdivide(&circle(), BoxRegion::root((0.0, 0.0), 1.0), 25),
            Err(SubdivisionError::DepthLimitExceeded(25))
        ));
    }

    #[test]
    fn tiling_preserves_area() {
        let out = subdivide(&circle(), BoxRegion::root((0.0, 0.0), 2.0), 6).unwrap();
        let area: f64 = out
            .excluded
            .iter()
            .chain(&out.undecided)
            .map(|b| (2.0 * b.half_width).powi(2))
            .sum();
        let total = 16.0;
        assert!((area - total).abs() <= 1e-9 * total, "area {area}");
        // Half-widths follow the depth exactly.
        for b in out.excluded.iter().chain(&out.undecided) {
            assert_eq!(b.half_width, 2.0 / (1u64 << b.depth) as f64);
        }
    }

    #[test]
    fn undecided_boxes_track_the_circle() {
        let out = subdivide(&circle(), BoxRegion::root((0.0, 0.0), 2.0), 7).unwrap();
        assert!(!out.undecided.is_empty());
        for b in &out.undecided {
            assert_eq!(b.depth, 7, "undecided boxes only appear at the cap");
            let r = (b.center.0.powi(2) + b.center.1.powi(2)).sqrt();
            assert!(
                (r - 1.0).abs() <= 8.0 * b.half_width,
                "undecided box far from curve at ({}, {})",
                b.center.0,
                b.center.1
            );
        }
    }

    #[test]
    fn deeper_runs_keep_every_exclusion() {
        let f = circle();
        let root = BoxRegion::root((0.0, 0.0), 2.0);
        let shallow = subdivide(&f, root, 4).unwrap();
        let deep = subdivide(&f, root, 5).unwrap();
        for b in &shallow.excluded {
            assert!(
                deep.excluded.iter().any(|c| c == b),
                "box at ({}, {}) depth {} lost",
                b.center.0,
                b.center.1,
                b.depth
            );
        }
        // Undecided area shrinks (or stays) as the depth grows.
        let area = |out: &SubdivisionOutcome| -> f64 {
            out.undecided
                .iter()
                .map(|b| (2.0 * b.half_width).powi(2))
                .sum()
        };
        assert!(area(&deep) <= area(&shallow) + 1e-12);
    }

    #[test]
    fn quadrants_of_the_line_product() {
        let out = subdivide(&hyperbola_xy(), BoxRegion::root((0.0, 0.0), 1.0), 6).unwrap();
        // Excluded mass must appear strictly inside all four quadrants.
        for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let n = out
                .excluded
                .iter()
                .filter(|b| b.center.0 * sx > 0.0 && b.center.1 * sy > 0.0)
                .count();
            assert!(n > 0, "no exclusions in quadrant ({sx}, {sy})");
        }
        // And the undecided boxes hug the axes.
        for b in &out.undecided {
            let m = b.center.0.abs().min(b.center.1.abs());
            assert!(m <= 8.0 * b.half_width);
        }
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_order_is_canonical() {
        let f = circle();
        let root = BoxRegion::root((0.0, 0.0), 2.0);
        let par = subdivide(&f, root, 6).unwrap();
        let seq = subdivide_sequential(&f, root, 6).unwrap();
        assert_eq!(par.excluded, seq.excluded);
        assert_eq!(par.undecided, seq.undecided);
        assert_eq!(par.predicate_evaluations, seq.predicate_evaluations);
        assert_eq!(par.per_depth, seq.per_depth);
    }

    #[test]
    fn rendering_is_reproducible_and_complete() {
        let out = subdivide(&circle(), BoxRegion::root((0.0, 0.0), 2.0), 5).unwrap();
        let root = BoxRegion::root((0.0, 0.0), 2.0);
        let svg1 = render_svg(&out, &root);
        let svg2 = render_svg(&out, &root);
        assert_eq!(svg1, svg2);
        let rects = svg1.matches("<rect ").count();
        assert_eq!(rects, out.excluded.len() + out.undecided.len());

        let listing = box_list(&out);
        assert_eq!(listing.lines().count(), rects);
        // Round-trip one line through the exact formatter.
        let first = listing.lines().next().unwrap();
        let fields: Vec<&str> = first.split_whitespace().collect();
        assert_eq!(fields.len(), 5);
        let cx: f64 = fields[2].parse().unwrap();
        assert_eq!(cx, out.excluded[0].center.0);
    }
}
