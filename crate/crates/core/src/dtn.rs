//! Dirichlet-to-Neumann matrices of metric graphs.
//!
//! On an edge of length `l` every solution of `ψ'' + λψ = 0` is fixed by
//! its two endpoint values, and the outward derivatives at both ends are a
//! linear function of them: the 2×2 edge kernel. Summing kernels over the
//! edges gives the vertex matrix `M`, whose row `v` maps vertex values to
//! `ψ'(v)`. Imposing Kirchhoff at interior vertices and eliminating them
//! leaves the Schur complement `R(λ) = M_BB − M_BI M_II⁻¹ M_IB`.
//!
//! Vertex derivatives point out of the edge into the vertex: `−ψ_e'(0)` at
//! the initial vertex and `ψ_e'(l)` at the terminal one. With this sign the
//! unit-λ kernel has `cot l` on its diagonal.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::{EdgeId, MetricGraph, VertexId, Violation};
use crate::linalg::{norm_1, reciprocal_condition, Ldlt, SymMatrix};

/// Edge kernels with `|sin(√λ l)|` below this are treated as singular.
pub const EPS_SING: f64 = 1e-8;
/// Interior blocks with reciprocal condition below this are treated as singular.
pub const EPS_COND: f64 = 1e-10;

/// Why `R(λ)` could not be formed: `λ` sits on (or numerically next to)
/// the Dirichlet spectrum.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumHit {
    Edge { edge: EdgeId, length: f64, sin: f64 },
    Interior { rcond: f64 },
}

impl fmt::Display for SpectrumHit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumHit::Edge { edge, length, sin } => write!(
                f,
                "edge {edge} (length {length}) is singular at this lambda: |sin(sqrt(lambda) l)| = {:.3e} < {EPS_SING:e}",
                sin.abs()
            ),
            SpectrumHit::Interior { rcond } => write!(
                f,
                "interior block is singular: reciprocal condition {rcond:.3e} < {EPS_COND:e}"
            ),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DtnError {
    #[error("lambda is at the Dirichlet spectrum: {0}")]
    SpectrumHit(SpectrumHit),
    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGraph(Vec<Violation>),
    #[error("boundary data has length {got}, expected {expected}")]
    BoundaryDataLength { got: usize, expected: usize },
    #[error("edge length must be finite and positive (got {0})")]
    BadLength(f64),
}

/// Diagonal and off-diagonal entry of the edge kernel.
fn kernel_entries(l: f64, lambda: f64) -> Result<(f64, f64), f64> {
    if lambda > 0.0 {
        let w = lambda.sqrt();
        let (s, c) = (w * l).sin_cos();
        if s.abs() < EPS_SING {
            return Err(s);
        }
        Ok((w * c / s, -w / s))
    } else if lambda == 0.0 {
        Ok((1.0 / l, -1.0 / l))
    } else {
        let w = (-lambda).sqrt();
        let x = w * l;
        Ok((w / x.tanh(), -w / x.sinh()))
    }
}

/// The 2×2 DtN matrix of a single segment of length `l`.
///
/// `w[[cot wl, −1/sin wl], [−1/sin wl, cot wl]]` with `w = √λ` for `λ > 0`,
/// `[[1, −1], [−1, 1]]/l` at `λ = 0`, and the hyperbolic analogue with
/// `w = √−λ` for `λ < 0`.
pub fn edge_kernel(l: f64, lambda: f64) -> Result<SymMatrix, DtnError> {
    if !(l.is_finite() && l > 0.0) {
        return Err(DtnError::BadLength(l));
    }
    let (d, o) = kernel_entries(l, lambda).map_err(|sin| {
        DtnError::SpectrumHit(SpectrumHit::Edge {
            edge: 0,
            length: l,
            sin,
        })
    })?;
    Ok(SymMatrix::from_computed(DMatrix::from_row_slice(2, 2, &[d, o, o, d])))
}

/// `|V|×|V|` matrix whose row `v` maps vertex values to `ψ'(v)`; rows and
/// columns follow [`MetricGraph::vertices`].
pub fn assemble_vertex_matrix(g: &MetricGraph, lambda: f64) -> Result<SymMatrix, DtnError> {
    assemble_with_magnitude(g, lambda).map(|(m, _)| SymMatrix::from_computed(m))
}

/// Vertex matrix plus, per vertex, the sum of absolute kernel entries that
/// went into its row.
fn assemble_with_magnitude(
    g: &MetricGraph,
    lambda: f64,
) -> Result<(DMatrix<f64>, Vec<f64>), DtnError> {
    let index = g.vertex_index();
    let n = g.vertex_count();
    let mut m = DMatrix::zeros(n, n);
    let mut magnitude = vec![0.0; n];
    for e in g.edges() {
        let (d, o) = kernel_entries(e.length, lambda).map_err(|sin| {
            DtnError::SpectrumHit(SpectrumHit::Edge {
                edge: e.id,
                length: e.length,
                sin,
            })
        })?;
        let (a, b) = (index[&e.from], index[&e.to]);
        m[(a, a)] += d;
        m[(b, b)] += d;
        m[(a, b)] += o;
        m[(b, a)] += o;
        magnitude[a] += d.abs() + o.abs();
        magnitude[b] += d.abs() + o.abs();
    }
    Ok((m, magnitude))
}

/// `R(λ)` together with the conditioning of the eliminated block.
#[derive(Debug, Clone)]
pub struct DtnAssembly {
    pub matrix: SymMatrix,
    /// Reciprocal condition of `M_II` measured against the kernel magnitudes
    /// summed into it (see [`EPS_COND`]); `None` when every vertex is on the boundary.
    pub interior_rcond: Option<f64>,
}

/// Boundary positions (boundary order) and interior positions (vertex order).
fn partition(g: &MetricGraph) -> (Vec<usize>, Vec<usize>) {
    let index = g.vertex_index();
    let b: Vec<usize> = g.boundary().iter().map(|v| index[v]).collect();
    let i: Vec<usize> = (0..g.vertex_count()).filter(|p| !b.contains(p)).collect();
    (b, i)
}

fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

struct Elimination {
    m: DMatrix<f64>,
    b: Vec<usize>,
    i: Vec<usize>,
    /// `M_II⁻¹ M_IB`
    x: DMatrix<f64>,
    rcond: Option<f64>,
}

fn eliminate(g: &MetricGraph, lambda: f64) -> Result<Elimination, DtnError> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(DtnError::InvalidGraph(violations));
    }
    let (m, magnitude) = assemble_with_magnitude(g, lambda)?;
    let (b, i) = partition(g);
    if i.is_empty() {
        return Ok(Elimination { x: DMatrix::zeros(0, b.len()), m, b, i, rcond: None });
    }
    let m_ii = submatrix(&m, &i, &i);
    let f = Ldlt::factor(&m_ii);
    // Cancellation inside a row of M_II is invisible to a plain condition
    // number (a 1×1 block always has condition 1), so the forward norm is
    // taken over the absolute kernel contributions.
    let scale = i.iter().map(|&p| magnitude[p]).fold(norm_1(&m_ii), f64::max);
    let rcond = reciprocal_condition(&m_ii, &f) * norm_1(&m_ii) / scale;
    if rcond < EPS_COND {
        return Err(DtnError::SpectrumHit(SpectrumHit::Interior { rcond }));
    }
    let x = f.solve(&submatrix(&m, &i, &b));
    Ok(Elimination { m, b, i, x, rcond: Some(rcond) })
}

/// Assembles `R(λ)` and reports the interior conditioning.
pub fn assemble_dtn(g: &MetricGraph, lambda: f64) -> Result<DtnAssembly, DtnError> {
    let el = eliminate(g, lambda)?;
    let mut r = submatrix(&el.m, &el.b, &el.b);
    if !el.i.is_empty() {
        r -= submatrix(&el.m, &el.b, &el.i) * &el.x;
    }
    Ok(DtnAssembly {
        matrix: SymMatrix::from_computed(r),
        interior_rcond: el.rcond,
    })
}

/// The `k×k` Dirichlet-to-Neumann matrix `R(λ)`, rows in boundary order.
pub fn dtn_matrix(g: &MetricGraph, lambda: f64) -> Result<SymMatrix, DtnError> {
    assemble_dtn(g, lambda).map(|a| a.matrix)
}

/// Edge basis `(C, S)` with `C(0) = 1, S(0) = 0` solving `ψ'' + λψ = 0`.
#[derive(Debug, Clone, Copy)]
enum Basis {
    Trig(f64),
    Linear,
    Hyperbolic(f64),
}

impl Basis {
    fn new(lambda: f64) -> Self {
        if lambda > 0.0 {
            Basis::Trig(lambda.sqrt())
        } else if lambda == 0.0 {
            Basis::Linear
        } else {
            Basis::Hyperbolic((-lambda).sqrt())
        }
    }

    fn values(self, s: f64) -> (f64, f64) {
        match self {
            Basis::Trig(w) => ((w * s).cos(), (w * s).sin()),
            Basis::Linear => (1.0, s),
            Basis::Hyperbolic(w) => ((w * s).cosh(), (w * s).sinh()),
        }
    }

    fn derivatives(self, s: f64) -> (f64, f64) {
        match self {
            Basis::Trig(w) => (-w * (w * s).sin(), w * (w * s).cos()),
            Basis::Linear => (0.0, 1.0),
            Basis::Hyperbolic(w) => (w * (w * s).sinh(), w * (w * s).cosh()),
        }
    }

    /// `(∫C², ∫CS, ∫S²)` over `[0, l]`.
    fn gram(self, l: f64) -> (f64, f64, f64) {
        match self {
            Basis::Trig(w) => {
                let q = (2.0 * w * l).sin() / (4.0 * w);
                let sl = (w * l).sin();
                (0.5 * l + q, sl * sl / (2.0 * w), 0.5 * l - q)
            }
            Basis::Linear => (l, 0.5 * l * l, l * l * l / 3.0),
            Basis::Hyperbolic(w) => {
                let q = (2.0 * w * l).sinh() / (4.0 * w);
                let sl = (w * l).sinh();
                (0.5 * l + q, sl * sl / (2.0 * w), q - 0.5 * l)
            }
        }
    }
}

/// Per-edge representation `ψ_e(s) = α C(s) + β S(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCoefficients {
    pub edge: EdgeId,
    pub alpha: f64,
    pub beta: f64,
}

/// Solution of `ψ'' + λψ = 0` with Kirchhoff at interior vertices and
/// prescribed boundary values `x`.
#[derive(Debug, Clone)]
pub struct HarmonicExtension {
    pub lambda: f64,
    /// `(vertex, ψ(vertex))` in vertex order.
    pub vertex_values: Vec<(VertexId, f64)>,
    /// One entry per edge, in edge order.
    pub edge_coefficients: Vec<EdgeCoefficients>,
    pub boundary_data: Vec<f64>,
    /// `ξ = R(λ) x`.
    pub boundary_derivatives: Vec<f64>,
    graph: MetricGraph,
}

pub fn harmonic_extension(
    g: &MetricGraph,
    lambda: f64,
    x: &[f64],
) -> Result<HarmonicExtension, DtnError> {
    let k = g.boundary_size();
    if x.len() != k {
        return Err(DtnError::BoundaryDataLength { got: x.len(), expected: k });
    }
    let el = eliminate(g, lambda)?;
    let n = g.vertex_count();
    let mut values = vec![0.0; n];
    for (r, &p) in el.b.iter().enumerate() {
        values[p] = x[r];
    }
    for (r, &p) in el.i.iter().enumerate() {
        values[p] = -(0..k).map(|c| el.x[(r, c)] * x[c]).sum::<f64>();
    }
    let index = g.vertex_index();
    let basis = Basis::new(lambda);
    let edge_coefficients = g
        .edges()
        .iter()
        .map(|e| {
            let alpha = values[index[&e.from]];
            let (c, s) = basis.values(e.length);
            EdgeCoefficients {
                edge: e.id,
                alpha,
                beta: (values[index[&e.to]] - alpha * c) / s,
            }
        })
        .collect();
    let boundary_derivatives = el
        .b
        .iter()
        .map(|&p| (0..n).map(|q| el.m[(p, q)] * values[q]).sum())
        .collect();
    Ok(HarmonicExtension {
        lambda,
        vertex_values: g.vertices().iter().copied().zip(values).collect(),
        edge_coefficients,
        boundary_data: x.to_vec(),
        boundary_derivatives,
        graph: g.clone(),
    })
}

impl HarmonicExtension {
    fn basis(&self) -> Basis {
        Basis::new(self.lambda)
    }

    /// `ψ_e(s)` on the edge at position `edge_pos`, `s` measured from its initial vertex.
    pub fn value(&self, edge_pos: usize, s: f64) -> f64 {
        let c = self.edge_coefficients[edge_pos];
        let (cv, sv) = self.basis().values(s);
        c.alpha * cv + c.beta * sv
    }

    /// `ψ_e'(s)` along the edge orientation.
    pub fn slope(&self, edge_pos: usize, s: f64) -> f64 {
        let c = self.edge_coefficients[edge_pos];
        let (cd, sd) = self.basis().derivatives(s);
        c.alpha * cd + c.beta * sd
    }

    /// `ψ'(v)`: sum over incident edges of the derivative pointing into `v`,
    /// computed from the edge coefficients.
    pub fn vertex_derivative(&self, v: VertexId) -> f64 {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .map(|(p, e)| {
                let mut d = 0.0;
                if e.from == v {
                    d -= self.slope(p, 0.0);
                }
                if e.to == v {
                    d += self.slope(p, e.length);
                }
                d
            })
            .sum()
    }

    /// Largest `|ψ'(v)|` over interior vertices.
    pub fn kirchhoff_residual(&self) -> f64 {
        self.graph
            .vertices()
            .iter()
            .filter(|&&v| self.graph.boundary_rank(v).is_none())
            .map(|&v| self.vertex_derivative(v).abs())
            .fold(0.0, f64::max)
    }

    /// Scale for residual checks: derivative magnitudes at interior vertices.
    pub fn residual_scale(&self) -> f64 {
        let basis = self.basis();
        let mut scale: f64 = 1.0;
        for (p, e) in self.graph.edges().iter().enumerate() {
            let c = self.edge_coefficients[p];
            for s in [0.0, e.length] {
                let (cd, sd) = basis.derivatives(s);
                scale = scale.max((c.alpha * cd).abs()).max((c.beta * sd).abs());
            }
        }
        scale
    }

    /// `∫_G ψ² ds`, in closed form per edge.
    pub fn l2_norm_squared(&self) -> f64 {
        let basis = self.basis();
        self.graph
            .edges()
            .iter()
            .zip(&self.edge_coefficients)
            .map(|(e, c)| {
                let (cc, cs, ss) = basis.gram(e.length);
                c.alpha * c.alpha * cc + 2.0 * c.alpha * c.beta * cs + c.beta * c.beta * ss
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{concatenate, glue_aligned};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn close(a: &SymMatrix, b: &[[f64; 2]; 2], tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a.get(i, j) - b[i][j]).abs() <= tol))
    }

    #[test]
    fn kernel_quarter_wave() {
        let k = edge_kernel(FRAC_PI_2, 1.0).unwrap();
        assert!(close(&k, &[[0.0, -1.0], [-1.0, 0.0]], 1e-15));
    }

    #[test]
    fn kernel_third_of_pi() {
        // cot(π/3) = 1/√3, 1/sin(π/3) = 2/√3
        let c = 1.0 / 3f64.sqrt();
        let k = edge_kernel(FRAC_PI_3, 1.0).unwrap();
        assert!(close(&k, &[[c, -2.0 * c], [-2.0 * c, c]], 1e-14));
        assert!((k.get(0, 0) - 0.57735).abs() < 1e-5);
        assert!((k.get(0, 1) + 1.15470).abs() < 1e-5);
    }

    #[test]
    fn kernel_branches_meet_at_zero() {
        let zero = edge_kernel(1.0, 0.0).unwrap();
        assert!(close(&zero, &[[1.0, -1.0], [-1.0, 1.0]], 0.0));
        for lam in [1e-8, -1e-8] {
            let k = edge_kernel(1.0, lam).unwrap();
            assert!((&k - &zero).norm_inf() < 1e-6, "{lam}: {k:?}");
        }
    }

    #[test]
    fn kernel_singular_at_pi() {
        assert!(matches!(
            edge_kernel(PI, 1.0),
            Err(DtnError::SpectrumHit(SpectrumHit::Edge { .. }))
        ));
        assert!(edge_kernel(0.0, 1.0).is_err());
    }

    #[test]
    fn vertex_matrix_examples() {
        let s = MetricGraph::segment(0.8).unwrap();
        assert_eq!(
            assemble_vertex_matrix(&s, 2.0).unwrap(),
            edge_kernel(0.8, 2.0).unwrap()
        );
        let p = MetricGraph::parallel(&[FRAC_PI_2, FRAC_PI_2]).unwrap();
        let m = assemble_vertex_matrix(&p, 1.0).unwrap();
        assert!(close(&m, &[[0.0, -2.0], [-2.0, 0.0]], 1e-15));
        let star = MetricGraph::star(&[1.0, 1.0, 1.0]).unwrap();
        let m = assemble_vertex_matrix(&star, 1.0).unwrap();
        assert!((m.get(0, 0) - 3.0 / 1f64.tan()).abs() < 1e-14);
    }

    #[test]
    fn dtn_segment_and_path() {
        let r = dtn_matrix(&MetricGraph::segment(FRAC_PI_2).unwrap(), 1.0).unwrap();
        assert!(close(&r, &[[0.0, -1.0], [-1.0, 0.0]], 1e-15));

        let third = MetricGraph::segment(FRAC_PI_3).unwrap();
        let path = concatenate(&third, &third).unwrap();
        let r = dtn_matrix(&path, 1.0).unwrap();
        let l = 2.0 * FRAC_PI_3;
        let expect = [[1.0 / l.tan(), -1.0 / l.sin()], [-1.0 / l.sin(), 1.0 / l.tan()]];
        assert!(close(&r, &expect, 1e-12), "{r:?}");
        assert!((r.get(0, 0) + 0.57735).abs() < 1e-5);
    }

    #[test]
    fn dtn_gluing_adds() {
        let a = MetricGraph::star(&[0.3, 1.2]).unwrap();
        let b = MetricGraph::parallel(&[0.9, 2.2]).unwrap();
        let g = glue_aligned(&a, &b).unwrap();
        for lam in [-2.0, 0.0, 0.7, 3.1] {
            let sum = &dtn_matrix(&a, lam).unwrap() + &dtn_matrix(&b, lam).unwrap();
            assert!((&dtn_matrix(&g, lam).unwrap() - &sum).norm_inf() < 1e-10);
        }
    }

    #[test]
    fn interior_singularity_detected() {
        // path of two π/2 edges: total length π, Dirichlet eigenvalue 1
        let p = MetricGraph::path(&[FRAC_PI_2, FRAC_PI_2]).unwrap();
        match dtn_matrix(&p, 1.0) {
            Err(DtnError::SpectrumHit(SpectrumHit::Interior { rcond })) => assert!(rcond < EPS_COND),
            other => panic!("{other:?}"),
        }
        let a = assemble_dtn(&p, 0.5).unwrap();
        assert!(a.interior_rcond.unwrap() > EPS_COND);
    }

    #[test]
    fn harmonic_extension_of_quarter_wave() {
        let s = MetricGraph::segment(FRAC_PI_2).unwrap();
        let h = harmonic_extension(&s, 1.0, &[1.0, 0.0]).unwrap();
        for t in [0.0, 0.3, 1.0, FRAC_PI_2] {
            assert!((h.value(0, t) - t.cos()).abs() < 1e-15);
        }
        assert!((h.boundary_derivatives[0]).abs() < 1e-15);
        assert!((h.boundary_derivatives[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_extension_zero_and_linear() {
        let g = MetricGraph::star(&[1.0, 0.7, 1.3]).unwrap();
        let zero = harmonic_extension(&g, 2.0, &[0.0; 3]).unwrap();
        assert!(zero.vertex_values.iter().all(|&(_, v)| v == 0.0));
        assert!(zero.boundary_derivatives.iter().all(|&v| v == 0.0));

        let x = [1.0, -2.0, 0.5];
        let y = [0.3, 0.1, -1.0];
        let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (hx, hy, hxy) = (
            harmonic_extension(&g, 2.0, &x).unwrap(),
            harmonic_extension(&g, 2.0, &y).unwrap(),
            harmonic_extension(&g, 2.0, &xy).unwrap(),
        );
        for p in 0..3 {
            for t in [0.0, 0.2, 0.6] {
                let sum = hx.value(p, t) + hy.value(p, t);
                assert!((hxy.value(p, t) - sum).abs() < 1e-12);
            }
        }
        assert!(harmonic_extension(&g, 2.0, &[1.0]).is_err());
    }

    #[test]
    fn extension_satisfies_kirchhoff_and_matches_r() {
        let g = MetricGraph::from_edge_list(
            4,
            &[(0, 1, 1.0), (1, 2, 0.6), (2, 3, 1.4), (3, 1, 0.9), (0, 2, 2.1)],
            &[0, 3],
        )
        .unwrap();
        for lam in [-3.0, 0.0, 1.7, 6.0] {
            let x = [0.8, -1.3];
            let h = harmonic_extension(&g, lam, &x).unwrap();
            assert!(h.kirchhoff_residual() <= 1e-9 * h.residual_scale());
            let xi = dtn_matrix(&g, lam).unwrap().mul_vec(&x);
            for (a, b) in xi.iter().zip(&h.boundary_derivatives) {
                assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
            }
            // boundary derivatives recomputed from coefficients
            for (r, &b) in g.boundary().iter().enumerate() {
                assert!((h.vertex_derivative(b) - h.boundary_derivatives[r]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn l2_norm_matches_simpson() {
        let g = MetricGraph::star(&[1.0, 0.7, 1.3]).unwrap();
        for lam in [-4.0, 0.0, 2.5] {
            let h = harmonic_extension(&g, lam, &[1.0, 0.5, -0.7]).unwrap();
            let mut quad = 0.0;
            for (p, e) in g.edges().iter().enumerate() {
                let n = 2000;
                let step = e.length / n as f64;
                let f = |s: f64| h.value(p, s).powi(2);
                let mut acc = f(0.0) + f(e.length);
                for i in 1..n {
                    acc += f(i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                quad += acc * step / 3.0;
            }
            assert!((h.l2_norm_squared() - quad).abs() < 1e-10, "{lam}");
        }
    }
}
