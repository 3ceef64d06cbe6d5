//! Eigenvalue counting for the graph Laplacian under Neumann, Dirichlet and
//! Robin boundary conditions, independent of the DtN code path.
//!
//! Each edge carries piecewise-linear elements; vertex values are shared
//! degrees of freedom, so continuity is built in and Kirchhoff is the
//! natural condition. The number of generalized eigenvalues of `(K, M)`
//! below `λ` equals the number of negative eigenvalues of `K − λM`
//! (Sylvester). That inertia is computed by eliminating each edge's
//! interior chain (a tridiagonal block) and then factoring the small dense
//! Schur complement on the vertices; inertia adds over the two steps.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;
use sprs::{CsMat, TriMat};
use thiserror::Error;

use crate::dtn::{dtn_matrix, DtnError};
use crate::graph::{EdgeId, MetricGraph};
use crate::io::format_sig;
use crate::linalg::{count_in_interval, count_negative, norm_inf, Ldlt, LinalgError};
use crate::synthesis::synthesize;
use crate::SymMatrix;

/// Elements per unit length before the `√(1+|λ|)` wavelength scaling.
pub const BASE_RESOLUTION: f64 = 16.0;
pub const MIN_RESOLUTION: f64 = 4.0;
pub const MIN_ELEMENTS_PER_EDGE: usize = 8;
/// Resolution doublings tried by [`counting_function`].
pub const MAX_DOUBLINGS: usize = 6;
/// Relative pivot size below which inertia is not trusted.
pub const PIVOT_TOL: f64 = 1e-12;
/// Minimum distance of an eigenvalue of `R(λ)` from a counted level.
pub const LEVEL_GAP: f64 = 1e-8;
/// Perturbation step for unusable sample points, relative to `1 + |λ|`.
pub const PERTURB_STEP: f64 = 1e-6;
pub const MAX_PERTURBATIONS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("pivot {pivot:e} below {threshold:e} at lambda = {lambda}; lambda is too close to the discrete spectrum, perturb it")]
    PivotBreakdown { lambda: f64, pivot: f64, threshold: f64 },
    #[error("resolution must be at least {MIN_RESOLUTION} (got {0})")]
    BadResolution(f64),
    #[error("Robin parameter must be finite and non-negative (got {0})")]
    BadRobin(f64),
    #[error("Robin levels need 0 <= a < b (got a = {a}, b = {b})")]
    BadLevels { a: f64, b: f64 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("bad lambda grid {0:?}: expected start:stop:count")]
    BadGrid(String),
    #[error(transparent)]
    Dtn(#[from] DtnError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Neumann,
    Dirichlet,
    /// `ψ'(v) + a ψ(v) = 0` on the boundary, `a ≥ 0`.
    Robin(f64),
}

/// Degrees of freedom of one edge's interior nodes.
#[derive(Debug, Clone)]
struct Chain {
    edge: EdgeId,
    from: Option<usize>,
    to: Option<usize>,
    /// first interior dof
    start: usize,
    /// number of interior nodes (elements − 1)
    len: usize,
}

/// Stiffness and mass matrices of a graph for one boundary condition.
///
/// Dofs `0..vertex_dofs` are the retained vertices (vertex order, Dirichlet
/// boundary vertices removed); each edge's interior nodes follow as one
/// consecutive block.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    pub bc: BoundaryCondition,
    pub resolution: f64,
    pub lambda_ref: f64,
    stiffness: CsMat<f64>,
    mass: CsMat<f64>,
    vertex_dofs: usize,
    chains: Vec<Chain>,
}

/// Elements on an edge of length `l`.
pub fn elements_for(l: f64, resolution: f64, lambda_ref: f64) -> usize {
    let n = (resolution * l * (1.0 + lambda_ref.abs()).sqrt()).ceil();
    (n as usize).max(MIN_ELEMENTS_PER_EDGE)
}

/// Piecewise-linear discretization of the graph Laplacian.
pub fn discretize(
    g: &MetricGraph,
    bc: BoundaryCondition,
    resolution: f64,
    lambda_ref: f64,
) -> Result<DiscretizedOperator, OracleError> {
    if !(resolution >= MIN_RESOLUTION) {
        return Err(OracleError::BadResolution(resolution));
    }
    if let BoundaryCondition::Robin(a) = bc {
        if !(a.is_finite() && a >= 0.0) {
            return Err(OracleError::BadRobin(a));
        }
    }
    let violations = g.validate();
    if !violations.is_empty() {
        let msg = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        return Err(OracleError::InvalidGraph(msg));
    }
    let index = g.vertex_index();
    let mut vertex_dof = vec![None; g.vertex_count()];
    let mut next = 0;
    for (p, &v) in g.vertices().iter().enumerate() {
        let removed = bc == BoundaryCondition::Dirichlet && g.boundary_rank(v).is_some();
        if !removed {
            vertex_dof[p] = Some(next);
            next += 1;
        }
    }
    let vertex_dofs = next;
    let mut chains = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let n = elements_for(e.length, resolution, lambda_ref);
        chains.push(Chain {
            edge: e.id,
            from: vertex_dof[index[&e.from]],
            to: vertex_dof[index[&e.to]],
            start: next,
            len: n - 1,
        });
        next += n - 1;
    }
    let ndof = next;
    let mut k = TriMat::new((ndof, ndof));
    let mut m = TriMat::new((ndof, ndof));
    for (e, c) in g.edges().iter().zip(&chains) {
        let h = e.length / (c.len + 1) as f64;
        let nodes: Vec<Option<usize>> = std::iter::once(c.from)
            .chain((0..c.len).map(|i| Some(c.start + i)))
            .chain(std::iter::once(c.to))
            .collect();
        for pair in nodes.windows(2) {
            let (p, q) = (pair[0], pair[1]);
            for (a, b, ks, ms) in [(p, p, 1.0, 2.0), (q, q, 1.0, 2.0), (p, q, -1.0, 1.0), (q, p, -1.0, 1.0)] {
                if let (Some(a), Some(b)) = (a, b) {
                    k.add_triplet(a, b, ks / h);
                    m.add_triplet(a, b, ms * h / 6.0);
                }
            }
        }
    }
    if let BoundaryCondition::Robin(a) = bc {
        for &v in g.boundary() {
            if let Some(d) = vertex_dof[index[&v]] {
                // explicit zero keeps the Robin(0) pattern identical to Neumann
                k.add_triplet(d, d, a);
            }
        }
    }
    Ok(DiscretizedOperator {
        bc,
        resolution,
        lambda_ref,
        stiffness: k.to_csr(),
        mass: m.to_csr(),
        vertex_dofs,
        chains,
    })
}

impl DiscretizedOperator {
    pub fn stiffness(&self) -> &CsMat<f64> {
        &self.stiffness
    }

    pub fn mass(&self) -> &CsMat<f64> {
        &self.mass
    }

    pub fn dof_count(&self) -> usize {
        self.stiffness.rows()
    }

    pub fn vertex_dof_count(&self) -> usize {
        self.vertex_dofs
    }

    /// Number of elements on each edge, in edge order.
    pub fn elements_per_edge(&self) -> Vec<(EdgeId, usize)> {
        self.chains.iter().map(|c| (c.edge, c.len + 1)).collect()
    }
}

fn entry(m: &CsMat<f64>, i: usize, j: usize) -> f64 {
    m.get(i, j).copied().unwrap_or(0.0)
}

/// Number of eigenvalues of the pencil `(K, M)` strictly below `lambda`.
pub fn count_below(op: &DiscretizedOperator, lambda: f64) -> Result<usize, OracleError> {
    let a = |i: usize, j: usize| entry(&op.stiffness, i, j) - lambda * entry(&op.mass, i, j);
    let norm = op
        .stiffness
        .outer_iterator()
        .zip(op.mass.outer_iterator())
        .map(|(kr, mr)| {
            kr.iter()
                .zip(mr.iter())
                .map(|((_, k), (_, m))| (k - lambda * m).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let threshold = PIVOT_TOL * norm;
    let breakdown = |pivot: f64| OracleError::PivotBreakdown { lambda, pivot, threshold };

    let nv = op.vertex_dofs;
    let mut schur = DMatrix::from_fn(nv, nv, &a);
    let mut negative = 0;
    for c in &op.chains {
        let n = c.len;
        let diag: Vec<f64> = (0..n).map(|i| a(c.start + i, c.start + i)).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| a(c.start + i, c.start + i + 1)).collect();
        // T = L D Lᵀ with unit lower bidiagonal L, multipliers l[i] = off[i] / d[i]
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n - 1);
        for i in 0..n {
            let di = if i == 0 { diag[0] } else { diag[i] - off[i - 1] * l[i - 1] };
            if di.abs() < threshold || !di.is_finite() {
                return Err(breakdown(di));
            }
            if di < 0.0 {
                negative += 1;
            }
            d.push(di);
            if i + 1 < n {
                l.push(off[i] / di);
            }
        }
        let solve = |rhs_at: usize| {
            let mut z = vec![0.0; n];
            z[rhs_at] = 1.0;
            for i in 1..n {
                z[i] -= l[i - 1] * z[i - 1];
            }
            for i in 0..n {
                z[i] /= d[i];
            }
            for i in (0..n - 1).rev() {
                z[i] -= l[i] * z[i + 1];
            }
            z
        };
        let first = solve(0);
        let inv_00 = first[0];
        let inv_0n = first[n - 1];
        let inv_nn = 1.0 / d[n - 1];
        let cf = c.from.map(|v| (v, a(v, c.start)));
        let ct = c.to.map(|v| (v, a(v, c.start + n - 1)));
        if let Some((f, x)) = cf {
            schur[(f, f)] -= x * x * inv_00;
        }
        if let Some((t, y)) = ct {
            schur[(t, t)] -= y * y * inv_nn;
        }
        if let (Some((f, x)), Some((t, y))) = (cf, ct) {
            schur[(f, t)] -= x * y * inv_0n;
            schur[(t, f)] -= x * y * inv_0n;
        }
    }
    if nv > 0 {
        let f = Ldlt::factor(&schur);
        let vertex_threshold = PIVOT_TOL * norm.max(norm_inf(&schur));
        let p = f.min_pivot_magnitude();
        if p < vertex_threshold || !p.is_finite() {
            return Err(OracleError::PivotBreakdown { lambda, pivot: p, threshold: vertex_threshold });
        }
        negative += f.inertia().negative;
    }
    Ok(negative)
}

/// Counting-function value with its refinement history.
#[derive(Debug, Clone, PartialEq)]
pub struct Count {
    pub count: usize,
    /// Three consecutive resolutions (two doublings) agreed.
    pub stable: bool,
    pub resolutions: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Counts eigenvalues below `lambda`, doubling the resolution from
/// [`BASE_RESOLUTION`] until two consecutive doublings leave the count
/// unchanged, for at most [`MAX_DOUBLINGS`] doublings.
pub fn counting_function(
    g: &MetricGraph,
    bc: BoundaryCondition,
    lambda: f64,
) -> Result<Count, OracleError> {
    counting_function_from(g, bc, lambda, BASE_RESOLUTION)
}

pub fn counting_function_from(
    g: &MetricGraph,
    bc: BoundaryCondition,
    lambda: f64,
    base: f64,
) -> Result<Count, OracleError> {
    let mut resolutions = Vec::new();
    let mut counts = Vec::new();
    for j in 0..=MAX_DOUBLINGS {
        let r = base * f64::powi(2.0, j as i32);
        let op = discretize(g, bc, r, lambda)?;
        counts.push(count_below(&op, lambda)?);
        resolutions.push(r);
        let n = counts.len();
        if n >= 3 && counts[n - 1] == counts[n - 2] && counts[n - 2] == counts[n - 3] {
            return Ok(Count { count: counts[n - 1], stable: true, resolutions, counts });
        }
    }
    Ok(Count { count: *counts.last().unwrap(), stable: false, resolutions, counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        }
    }
}

/// Which relation a [`CountReport`] checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// `N_N − N_D = n_−`
    NeumannDirichlet,
    /// `N_a − N_b = n_{a,b}`
    Robin { a: f64, b: f64 },
    /// `0 ≤ N_N − N_D ≤ k`
    Interlacing,
}

/// Outcome of one sample point.
#[derive(Debug, Clone)]
pub struct CountReport {
    pub check: Check,
    pub lambda_requested: f64,
    /// Point actually evaluated after perturbation.
    pub lambda: f64,
    pub perturbations: usize,
    /// `(N_N, N_D)` or `(N_a, N_b)`.
    pub counts: Option<(usize, usize)>,
    /// `n_−` or `n_{a,b}`; absent for [`Check::Interlacing`].
    pub dtn_count: Option<usize>,
    /// Eigenvalues of `R(λ)`, when it was formed.
    pub sigma: Vec<f64>,
    pub resolutions: Vec<f64>,
    pub stable: bool,
    pub verdict: Verdict,
    pub note: String,
}

impl CountReport {
    /// Oracle-side difference `N_N − N_D` or `N_a − N_b`.
    pub fn difference(&self) -> Option<i64> {
        self.counts.map(|(x, y)| x as i64 - y as i64)
    }
}

enum Attempt {
    Retry(String),
    Done(CountReport),
}

fn attempt(g: &MetricGraph, check: Check, lambda: f64, requested: f64, tries: usize) -> Result<Attempt, OracleError> {
    let (bc_hi, bc_lo, levels) = match check {
        Check::NeumannDirichlet => (BoundaryCondition::Neumann, BoundaryCondition::Dirichlet, vec![0.0]),
        Check::Robin { a, b } => (BoundaryCondition::Robin(a), BoundaryCondition::Robin(b), vec![-a, -b]),
        Check::Interlacing => (BoundaryCondition::Neumann, BoundaryCondition::Dirichlet, vec![]),
    };
    let mut sigma = Vec::new();
    let mut dtn_count = None;
    if check != Check::Interlacing {
        let r = match dtn_matrix(g, lambda) {
            Ok(r) => r,
            Err(DtnError::SpectrumHit(hit)) => return Ok(Attempt::Retry(hit.to_string())),
            Err(e) => return Err(e.into()),
        };
        sigma = r.eigenvalues();
        if let Some(s) = sigma
            .iter()
            .find(|&&s| levels.iter().any(|&lv| (s - lv).abs() < LEVEL_GAP))
        {
            return Ok(Attempt::Retry(format!("eigenvalue {s:e} of R touches a counted level")));
        }
        dtn_count = Some(match check {
            Check::Robin { a, b } => count_in_interval(&r, a, b)?,
            _ => count_negative(&r),
        });
    }
    let hi = counting_function(g, bc_hi, lambda);
    let lo = counting_function(g, bc_lo, lambda);
    let (hi, lo) = match (hi, lo) {
        (Ok(h), Ok(l)) => (h, l),
        (Err(e @ OracleError::PivotBreakdown { .. }), _) | (_, Err(e @ OracleError::PivotBreakdown { .. })) => {
            return Ok(Attempt::Retry(e.to_string()))
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let diff = hi.count as i64 - lo.count as i64;
    let stable = hi.stable && lo.stable;
    let holds = match check {
        Check::Interlacing => diff >= 0 && diff <= g.boundary_size() as i64,
        _ => Some(diff) == dtn_count.map(|n| n as i64),
    };
    let (verdict, note) = if !stable {
        (Verdict::Fail, "finite-element counts did not stabilize".to_string())
    } else if holds {
        (Verdict::Pass, String::new())
    } else {
        (Verdict::Fail, "relation violated".to_string())
    };
    let resolutions = if hi.resolutions.len() >= lo.resolutions.len() { hi.resolutions } else { lo.resolutions };
    Ok(Attempt::Done(CountReport {
        check,
        lambda_requested: requested,
        lambda,
        perturbations: tries,
        counts: Some((hi.count, lo.count)),
        dtn_count,
        sigma,
        resolutions,
        stable,
        verdict,
        note,
    }))
}

/// Evaluates one relation at `lambda`, shifting `lambda` by
/// `PERTURB_STEP·(1+|λ|)` up to [`MAX_PERTURBATIONS`] times when the point
/// is unusable, then reporting it as skipped.
pub fn verify_at(g: &MetricGraph, check: Check, lambda: f64) -> Result<CountReport, OracleError> {
    if let Check::Robin { a, b } = check {
        if !(a >= 0.0 && a < b && b.is_finite()) {
            return Err(OracleError::BadLevels { a, b });
        }
    }
    let step = PERTURB_STEP * (1.0 + lambda.abs());
    let mut reason = String::new();
    for t in 0..=MAX_PERTURBATIONS {
        let lam = lambda + t as f64 * step;
        match attempt(g, check, lam, lambda, t)? {
            Attempt::Done(r) => return Ok(r),
            Attempt::Retry(why) => reason = why,
        }
    }
    Ok(CountReport {
        check,
        lambda_requested: lambda,
        lambda: lambda + MAX_PERTURBATIONS as f64 * step,
        perturbations: MAX_PERTURBATIONS,
        counts: None,
        dtn_count: None,
        sigma: Vec::new(),
        resolutions: Vec::new(),
        stable: false,
        verdict: Verdict::Skipped,
        note: reason,
    })
}

/// `N_N(λ) − N_D(λ) = n_−(λ)`.
pub fn verify_identity_3(g: &MetricGraph, lambda: f64) -> Result<CountReport, OracleError> {
    verify_at(g, Check::NeumannDirichlet, lambda)
}

/// `N_a(λ) − N_b(λ) = n_{a,b}(λ)` for `0 ≤ a < b`.
pub fn verify_identity_4(g: &MetricGraph, lambda: f64, a: f64, b: f64) -> Result<CountReport, OracleError> {
    verify_at(g, Check::Robin { a, b }, lambda)
}

/// `0 ≤ N_N(λ) − N_D(λ) ≤ k` at every grid point.
pub fn verify_inequality_1(g: &MetricGraph, grid: &[f64]) -> Result<Vec<CountReport>, OracleError> {
    verify_grid(g, Check::Interlacing, grid)
}

/// Runs [`verify_at`] over a grid, concurrently, keeping grid order.
pub fn verify_grid(g: &MetricGraph, check: Check, grid: &[f64]) -> Result<Vec<CountReport>, OracleError> {
    grid.par_iter().map(|&lam| verify_at(g, check, lam)).collect()
}

/// Closed-form spectra of a segment of length `l`: the first `n` Neumann
/// eigenvalues `((j−1)π/l)²` and Dirichlet eigenvalues `(jπ/l)²`.
pub fn segment_spectra(l: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let pi_l = std::f64::consts::PI / l;
    let neumann = (0..n).map(|j| (j as f64 * pi_l).powi(2)).collect();
    let dirichlet = (1..=n).map(|j| (j as f64 * pi_l).powi(2)).collect();
    (neumann, dirichlet)
}

/// `μ_j ≤ λ_j ≤ μ_{j+k}` for `j = 1..=j_max` (needs `j_max + k` Neumann values).
pub fn interlaces(neumann: &[f64], dirichlet: &[f64], k: usize, j_max: usize) -> bool {
    (0..j_max).all(|j| neumann[j] <= dirichlet[j] && dirichlet[j] <= neumann[j + k])
}

/// Linear grid `start:stop:count`, endpoints included.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, OracleError> {
    let bad = || OracleError::BadGrid(spec.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    Ok(linspace(start, stop, count))
}

pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    (0..count)
        .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
        .collect()
}

/// One row of a λ-sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub lambda_requested: f64,
    pub lambda: f64,
    pub perturbations: usize,
    /// Eigenvalues of `R(λ)`, ascending; empty when skipped.
    pub sigma: Vec<f64>,
    pub n_neumann: Option<usize>,
    pub n_dirichlet: Option<usize>,
    /// Every `σ_j` decreased since the previous row of the same continuity
    /// interval; `None` when there is no such row.
    pub monotone: Option<bool>,
}

/// `σ(λ)`, `N_N` and `N_D` along a grid.
///
/// Consecutive rows with equal `N_D` have no Dirichlet eigenvalue between
/// them, so `R` is continuous there and each `σ_j` must decrease.
pub fn sweep(g: &MetricGraph, grid: &[f64]) -> Result<Vec<SweepRow>, OracleError> {
    let mut rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&lam| {
            let report = verify_identity_3(g, lam)?;
            Ok(SweepRow {
                lambda_requested: lam,
                lambda: report.lambda,
                perturbations: report.perturbations,
                sigma: report.sigma,
                n_neumann: report.counts.map(|c| c.0),
                n_dirichlet: report.counts.map(|c| c.1),
                monotone: None,
            })
        })
        .collect::<Result<_, OracleError>>()?;
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if prev.n_dirichlet.is_some() && prev.n_dirichlet == cur.n_dirichlet && !cur.sigma.is_empty() && !prev.sigma.is_empty() {
            let ok = cur.sigma.iter().zip(&prev.sigma).all(|(c, p)| c < p);
            rows[i].monotone = Some(ok);
        }
    }
    Ok(rows)
}

/// Graphs the identities are cross-checked on: a segment, a multigraph, a
/// star with interior center, a cycle with one boundary vertex, and a
/// synthesized graph built from two glued blocks.
pub fn default_corpus() -> Vec<(&'static str, MetricGraph)> {
    let synth_target = SymMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, -1.0]]).expect("symmetric");
    vec![
        ("segment", MetricGraph::segment(1.0).expect("valid")),
        (
            "parallel",
            MetricGraph::parallel(&[std::f64::consts::FRAC_PI_2, 1.3]).expect("valid"),
        ),
        ("star", MetricGraph::star(&[1.0, 0.7, 1.3]).expect("valid")),
        (
            "triangle",
            MetricGraph::from_edge_list(3, &[(0, 1, 1.0), (1, 2, 1.1), (2, 0, 0.9)], &[0]).expect("valid"),
        ),
        ("synthesized", synthesize(&synth_target, 1.0).expect("synthesis succeeds")),
    ]
}

/// Human-readable table: λ, the two oracle counts, the DtN count, verdict.
pub fn reports_to_table(reports: &[CountReport]) -> String {
    let mut s = String::new();
    let header = match reports.first().map(|r| r.check) {
        Some(Check::Robin { .. }) => ("N_a", "N_b", "n_ab"),
        Some(Check::Interlacing) => ("N_N", "N_D", "diff"),
        _ => ("N_N", "N_D", "n_-"),
    };
    writeln!(s, "{:>14} {:>6} {:>6} {:>6}  verdict", "lambda", header.0, header.1, header.2).unwrap();
    for r in reports {
        let cell = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
        let third = match r.check {
            Check::Interlacing => r.difference().map_or("-".to_string(), |d| d.to_string()),
            _ => cell(r.dtn_count),
        };
        let mark = if r.perturbations > 0 { "*" } else { "" };
        write!(
            s,
            "{:>14} {:>6} {:>6} {:>6}  {}",
            format!("{}{}", format_sig(r.lambda, 6), mark),
            cell(r.counts.map(|c| c.0)),
            cell(r.counts.map(|c| c.1)),
            third,
            r.verdict.as_str()
        )
        .unwrap();
        if !r.note.is_empty() {
            write!(s, "  ({})", r.note).unwrap();
        }
        s.push('\n');
    }
    s
}

/// `{"points":[{"check":..,"lambda":..,"counts":{..},"verdict":".."}]}`
pub fn reports_to_json(reports: &[CountReport]) -> String {
    let mut s = String::from("{\"points\":[");
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let (check, names) = match r.check {
            Check::Robin { .. } => ("identity_4", ("N_a", "N_b", "n_ab")),
            Check::Interlacing => ("inequality_1", ("N_N", "N_D", "")),
            Check::NeumannDirichlet => ("identity_3", ("N_N", "N_D", "n_minus")),
        };
        let mut counts = Vec::new();
        if let Some((x, y)) = r.counts {
            counts.push(format!("\"{}\":{x}", names.0));
            counts.push(format!("\"{}\":{y}", names.1));
        }
        if let Some(n) = r.dtn_count {
            counts.push(format!("\"{}\":{n}", names.2));
        }
        write!(
            s,
            "{{\"check\":\"{check}\",\"lambda\":{},\"requested\":{},\"perturbations\":{},\"counts\":{{{}}},\"stable\":{},\"verdict\":\"{}\"}}",
            format_sig(r.lambda, 17),
            format_sig(r.lambda_requested, 17),
            r.perturbations,
            counts.join(","),
            r.stable,
            r.verdict.as_str()
        )
        .unwrap();
    }
    s.push_str("]}\n");
    s
}
