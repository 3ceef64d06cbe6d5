//! Builds a metric graph whose DtN matrix at a given `λ > 0` equals a
//! prescribed real symmetric matrix.
//!
//! The construction works at `λ = 1` and rescales lengths at the end.
//! At `λ = 1` a segment of length `l` has DtN matrix `[[a, b], [b, a]]` with
//! `a = cot l`, `b = −1/sin l`, so `b² − a² = 1`. In the coordinates
//! `x = a + b`, `y = b − a` such a segment is a point on the hyperbola
//! `xy = 1`, with `tan(l/2) = −x`. Any target `(a, b)` splits into four
//! hyperbola points, giving four parallel edges ([`realize_equal_diag`]).
//! Unequal diagonals use the concatenation trick ([`realize_diag_a0`]), and
//! `k×k` targets are assembled from one 2×2 block per vertex pair.

use std::f64::consts::PI;

use thiserror::Error;

use crate::dtn::{dtn_matrix, DtnError};
use crate::graph::{attach, concatenate, glue, glue_aligned, Block, GraphError, MetricGraph};
use crate::linalg::SymMatrix;

/// Accepted range for `|x|` of a hyperbola point.
pub const X_MIN: f64 = 1e-3;
pub const X_MAX: f64 = 1e3;
/// Extra offsets tried after the default one in [`split_mixed_sign`].
pub const RETRIES: usize = 8;
/// Diagonal gaps below this go through [`realize_2x2`]'s balanced variant.
pub const DIAG_GAP_MIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("lambda must be positive (got {0})")]
    NonPositiveLambda(f64),
    #[error("target must be at least 2x2 (got order {0})")]
    OrderTooSmall(usize),
    #[error("split needs x*y < 0 (got x = {x}, y = {y})")]
    NotMixedSign { x: f64, y: f64 },
    #[error("hyperbola point must be nonzero")]
    ZeroPoint,
    #[error("diag(a, 0) construction needs a != 0")]
    ZeroDiagonal,
    #[error("no balanced four-point decomposition of (a, b) = ({a}, {b}) after {RETRIES} retries")]
    DecompositionDegenerate { a: f64, b: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dtn(#[from] DtnError),
}

/// `(x, y) = (a + b, b − a)` for a 2×2 matrix `[[a, b], [b, a]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XYPair {
    pub x: f64,
    pub y: f64,
}

impl XYPair {
    pub fn from_ab(a: f64, b: f64) -> Self {
        Self { x: a + b, y: b - a }
    }

    /// `(a, b)` back from the rotated coordinates.
    pub fn to_ab(self) -> (f64, f64) {
        ((self.x - self.y) / 2.0, (self.x + self.y) / 2.0)
    }
}

/// A point `(x, 1/x)` on the hyperbola `xy = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolaPoint {
    x: f64,
}

impl HyperbolaPoint {
    pub fn new(x: f64) -> Result<Self, SynthesisError> {
        if x == 0.0 || !x.is_finite() {
            Err(SynthesisError::ZeroPoint)
        } else {
            Ok(Self { x })
        }
    }

    pub fn x(self) -> f64 {
        self.x
    }

    pub fn y(self) -> f64 {
        1.0 / self.x
    }

    /// Matrix coordinates `(a, b) = ((x − 1/x)/2, (x + 1/x)/2)`.
    pub fn to_ab(self) -> (f64, f64) {
        let y = self.y();
        ((self.x - y) / 2.0, (self.x + y) / 2.0)
    }
}

/// Splits any pair into two pairs with negative coordinate products.
///
/// With offset `o` (1 by default): for `x ≥ 0` the first part is
/// `(x + o, min(y, 0) − o)` and the second `(−o, y − y₁)`; for `x < 0` it is
/// `(x − o, max(y, 0) + o)` and `(o, y − y₁)`.
pub fn split_mixed_sign(p: XYPair) -> (XYPair, XYPair) {
    split_mixed_sign_with_offset(p, 1.0)
}

fn split_mixed_sign_with_offset(p: XYPair, o: f64) -> (XYPair, XYPair) {
    let (x1, y1, x2) = if p.x >= 0.0 {
        (p.x + o, p.y.min(0.0) - o, -o)
    } else {
        (p.x - o, p.y.max(0.0) + o, o)
    };
    (XYPair { x: x1, y: y1 }, XYPair { x: x2, y: p.y - y1 })
}

/// Writes a pair with `xy < 0` as a sum of two hyperbola points.
///
/// For `x > 0 > y` the first point is `−u` where `u > 0` solves
/// `(x + u)(y + 1/u) = 1`, i.e. `y u² + x y u + x = 0`; the second is
/// `x + u`. The product of the roots is `x/y < 0`, so exactly one root is
/// positive. The case `x < 0 < y` is solved for `(−x, −y)` and negated.
pub fn split_hyperbola(p: XYPair) -> Result<(HyperbolaPoint, HyperbolaPoint), SynthesisError> {
    if !(p.x * p.y < 0.0) {
        return Err(SynthesisError::NotMixedSign { x: p.x, y: p.y });
    }
    let (x, y, sign) = if p.x > 0.0 { (p.x, p.y, 1.0) } else { (-p.x, -p.y, -1.0) };
    // u² + x u + c = 0 with c = x/y < 0; positive root without cancellation
    let c = x / y;
    let u = -2.0 * c / (x + (x * x - 4.0 * c).sqrt());
    Ok((
        HyperbolaPoint::new(-sign * u)?,
        HyperbolaPoint::new(sign * (x + u))?,
    ))
}

fn balanced(points: &[HyperbolaPoint]) -> bool {
    points.iter().all(|h| (X_MIN..=X_MAX).contains(&h.x.abs()))
}

/// Four hyperbola points whose `(x, y)` coordinates sum to `(a + b, b − a)`.
///
/// Offsets `1, 2, …, 1 + RETRIES` are tried in turn until every point has
/// `|x|` within `[X_MIN, X_MAX]`.
pub fn decompose_four(a: f64, b: f64) -> Result<[HyperbolaPoint; 4], SynthesisError> {
    let target = XYPair::from_ab(a, b);
    for j in 0..=RETRIES {
        let (p, q) = split_mixed_sign_with_offset(target, 1.0 + j as f64);
        let (h1, h2) = split_hyperbola(p)?;
        let (h3, h4) = split_hyperbola(q)?;
        let points = [h1, h2, h3, h4];
        if balanced(&points) {
            return Ok(points);
        }
    }
    Err(SynthesisError::DecompositionDegenerate { a, b })
}

/// Length `l ∈ (0, 2π) ∖ {π}` of the segment whose unit-λ DtN matrix has
/// rotated coordinates `(x, 1/x)`: `tan(l/2) = −x`.
pub fn length_for_point(h: HyperbolaPoint) -> f64 {
    if h.x < 0.0 {
        2.0 * (-h.x).atan()
    } else {
        2.0 * (PI - h.x.atan())
    }
}

/// Two boundary vertices joined by four parallel edges, with unit-λ DtN
/// matrix `[[a, b], [b, a]]`.
pub fn realize_equal_diag(a: f64, b: f64) -> Result<MetricGraph, SynthesisError> {
    let lengths = decompose_four(a, b)?.map(length_for_point);
    Ok(MetricGraph::parallel(&lengths)?)
}

/// A graph with unit-λ DtN matrix `diag(a, 0)`: the equal-diagonal graph for
/// `(a, 0)` concatenated with the one for `(0, 0)`.
pub fn realize_diag_a0(a: f64) -> Result<MetricGraph, SynthesisError> {
    if a == 0.0 {
        return Err(SynthesisError::ZeroDiagonal);
    }
    Ok(concatenate(&realize_equal_diag(a, 0.0)?, &realize_equal_diag(0.0, 0.0)?)?)
}

/// A graph with unit-λ DtN matrix equal to the 2×2 target.
///
/// Equal diagonals use [`realize_equal_diag`] alone. Otherwise the target
/// is `[[a22, a12], [a12, a22]] + diag(a11 − a22, 0)`. The joint vertex of the
/// diag piece carries a pivot of size `a11 − a22`, so when that gap is below
/// [`DIAG_GAP_MIN`] the split `[[a22 − 1, a12], ..] + diag(gap + 1, 0) + diag(0, 1)`
/// is used instead.
pub fn realize_2x2(a: &SymMatrix) -> Result<MetricGraph, SynthesisError> {
    if a.order() != 2 {
        return Err(SynthesisError::OrderTooSmall(a.order()));
    }
    let (a11, a12, a22) = (a.get(0, 0), 0.5 * (a.get(0, 1) + a.get(1, 0)), a.get(1, 1));
    let gap = a11 - a22;
    if gap == 0.0 {
        realize_equal_diag(a11, a12)
    } else if gap.abs() >= DIAG_GAP_MIN {
        Ok(glue_aligned(&realize_equal_diag(a22, a12)?, &realize_diag_a0(gap)?)?)
    } else {
        let head = glue_aligned(&realize_equal_diag(a22 - 1.0, a12)?, &realize_diag_a0(gap + 1.0)?)?;
        Ok(glue(&head, &realize_diag_a0(1.0)?, &[1, 0])?)
    }
}

/// The 2×2 block placed on the pair `(i, j)`, `i < j`, of a `k×k` target.
///
/// The off-diagonal entry is `a_ij`. Vertex `i` receives `a_ii` from the
/// block `(i, i + 1)`, and the last vertex receives `a_kk` from the block
/// `(k − 1, k)`; all other diagonal slots are zero.
pub fn pair_block(a: &SymMatrix, i: usize, j: usize) -> SymMatrix {
    let k = a.order();
    let c = if j == i + 1 { a.get(i, i) } else { 0.0 };
    let d = if i + 2 == k && j + 1 == k { a.get(j, j) } else { 0.0 };
    let off = 0.5 * (a.get(i, j) + a.get(j, i));
    SymMatrix::from_rows(&[vec![c, off], vec![off, d]]).expect("symmetric by construction")
}

/// A graph with unit-λ DtN matrix equal to the `k×k` target, built from one
/// block per vertex pair.
pub fn realize_kxk(a: &SymMatrix) -> Result<MetricGraph, SynthesisError> {
    let k = a.order();
    if k < 2 {
        return Err(SynthesisError::OrderTooSmall(k));
    }
    let mut blocks = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            blocks.push(Block {
                graph: realize_2x2(&pair_block(a, i, j))?,
                first: i,
                second: j,
            });
        }
    }
    Ok(attach(k, &blocks)?)
}

/// A graph whose DtN matrix at `lambda` equals `a`.
///
/// Realizes `a / √λ` at unit λ and then divides every length by `√λ`,
/// using `R_g(λ) = √λ · R_{√λ·g}(1)`.
pub fn synthesize(a: &SymMatrix, lambda: f64) -> Result<MetricGraph, SynthesisError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(SynthesisError::NonPositiveLambda(lambda));
    }
    if a.order() < 2 {
        return Err(SynthesisError::OrderTooSmall(a.order()));
    }
    let w = lambda.sqrt();
    let unit = realize_kxk(&a.scale(1.0 / w))?;
    Ok(unit.scale_lengths(1.0 / w)?)
}

/// `‖R(λ) − A‖∞` for a synthesized graph.
pub fn residual(g: &MetricGraph, a: &SymMatrix, lambda: f64) -> Result<f64, SynthesisError> {
    Ok((&dtn_matrix(g, lambda)? - a).norm_inf())
}
