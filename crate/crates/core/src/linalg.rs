//! Dense symmetric matrices, a pivoted symmetric-indefinite factorization,
//! and eigenvalue counting.

use std::fmt;
use std::ops::{Add, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

/// Relative asymmetry accepted by [`SymMatrix::from_rows`] and friends.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows} rows, row {row} has {len} entries)")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("matrix has a non-finite entry at ({0}, {1})")]
    NonFinite(usize, usize),
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },
    #[error("order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("interval [-b, -a) needs a < b (got a = {a}, b = {b})")]
    BadInterval { a: f64, b: f64 },
}

/// Dense real symmetric `k×k` matrix.
///
/// Matrices built from user data are checked for symmetry; matrices coming
/// out of an assembly are stored exactly as computed so their residual
/// asymmetry can be measured with [`asymmetry`](Self::asymmetry).
#[derive(Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.order()).map(|i| self.0.row(i).iter().copied().collect::<Vec<_>>()))
            .finish()
    }
}

impl SymMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let k = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != k {
                return Err(LinalgError::NotSquare { rows: k, row: i, len: r.len() });
            }
        }
        Self::from_matrix(DMatrix::from_fn(k, k, |i, j| rows[i][j]))
    }

    /// Checks finiteness and symmetry within [`SYMMETRY_TOL`] relative to the max entry.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self, LinalgError> {
        if m.nrows() != m.ncols() {
            return Err(LinalgError::NotSquare { rows: m.nrows(), row: 0, len: m.ncols() });
        }
        let scale = 1.0 + m.amax();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if !m[(i, j)].is_finite() {
                    return Err(LinalgError::NonFinite(i, j));
                }
                let gap = (m[(i, j)] - m[(j, i)]).abs();
                if gap > SYMMETRY_TOL * scale {
                    return Err(LinalgError::NotSymmetric { i, j, gap });
                }
            }
        }
        Ok(Self(m))
    }

    /// Wraps a computed matrix as is.
    pub(crate) fn from_computed(m: DMatrix<f64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn zeros(k: usize) -> Self {
        Self(DMatrix::zeros(k, k))
    }

    pub fn identity(k: usize) -> Self {
        Self(DMatrix::identity(k, k))
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.order())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.0)
    }

    /// `‖A − Aᵀ‖∞`.
    pub fn asymmetry(&self) -> f64 {
        norm_inf(&(&self.0 - self.0.transpose()))
    }

    /// Quadratic form `(A x, x)`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        v.dot(&(&self.0 * &v))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (&self.0 * DVector::from_column_slice(x)).iter().copied().collect()
    }

    /// Eigenvalues in nondecreasing order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigenvalues_sym(self)
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

pub fn norm_inf(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigenvalues of a symmetric matrix in nondecreasing order.
pub fn eigenvalues_sym(a: &SymMatrix) -> Vec<f64> {
    if a.order() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(a.0.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Number of strictly negative eigenvalues.
pub fn count_negative(a: &SymMatrix) -> usize {
    eigenvalues_sym(a).iter().filter(|&&s| s < 0.0).count()
}

/// Number of eigenvalues in the half-open interval `[-b, -a)`.
pub fn count_in_interval(a_mat: &SymMatrix, a: f64, b: f64) -> Result<usize, LinalgError> {
    if !(a < b) {
        return Err(LinalgError::BadInterval { a, b });
    }
    Ok(eigenvalues_sym(a_mat)
        .iter()
        .filter(|&&s| s >= -b && s < -a)
        .count())
}

/// Counts of negative, zero and positive eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

impl Add for Inertia {
    type Output = Inertia;
    fn add(self, o: Inertia) -> Inertia {
        Inertia {
            negative: self.negative + o.negative,
            zero: self.zero + o.zero,
            positive: self.positive + o.positive,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Pivot {
    One(f64),
    /// `[d11, d21, d22]`
    Two([f64; 3]),
}

/// Bunch–Kaufman factorization `P A Pᵀ = L D Lᵀ` with 1×1 and 2×2 pivots.
#[derive(Debug, Clone)]
pub struct Ldlt {
    n: usize,
    /// unit lower triangle stored below the diagonal
    l: DMatrix<f64>,
    pivots: Vec<(usize, Pivot)>,
    /// `perm[i]` is the original row placed at position `i`
    perm: Vec<usize>,
}

impl Ldlt {
    pub fn factor(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let alpha = (1.0 + 17f64.sqrt()) / 8.0;
        let mut w = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut pivots = Vec::new();
        let mut k = 0;
        while k < n {
            let absakk = w[(k, k)].abs();
            let (imax, colmax) = ((k + 1)..n)
                .map(|i| (i, w[(i, k)].abs()))
                .fold((k, 0.0), |best, c| if c.1 > best.1 { c } else { best });
            let (kp, two) = if absakk.max(colmax) == 0.0 || absakk >= alpha * colmax {
                (k, false)
            } else {
                let rowmax = (k..n)
                    .filter(|&j| j != imax)
                    .map(|j| w[(imax, j)].abs())
                    .fold(0.0, f64::max);
                if absakk * rowmax >= alpha * colmax * colmax {
                    (k, false)
                } else if w[(imax, imax)].abs() >= alpha * rowmax {
                    (imax, false)
                } else {
                    (imax, true)
                }
            };
            let target = if two { k + 1 } else { k };
            if kp != target {
                w.swap_rows(kp, target);
                w.swap_columns(kp, target);
                perm.swap(kp, target);
            }
            if !two {
                let d = w[(k, k)];
                pivots.push((k, Pivot::One(d)));
                if d != 0.0 {
                    let col: Vec<f64> = ((k + 1)..n).map(|i| w[(i, k)]).collect();
                    for (ii, i) in ((k + 1)..n).enumerate() {
                        for (jj, j) in ((k + 1)..n).enumerate() {
                            w[(i, j)] -= col[ii] * col[jj] / d;
                        }
                        w[(i, k)] = col[ii] / d;
                    }
                } else {
                    // column is entirely zero; nothing to eliminate
                    for i in (k + 1)..n {
                        w[(i, k)] = 0.0;
                    }
                }
                k += 1;
            } else {
                let (d11, d21, d22) = (w[(k, k)], w[(k + 1, k)], w[(k + 1, k + 1)]);
                let det = d11 * d22 - d21 * d21;
                let c1: Vec<f64> = ((k + 2)..n).map(|i| w[(i, k)]).collect();
                let c2: Vec<f64> = ((k + 2)..n).map(|i| w[(i, k + 1)]).collect();
                // rows of C D⁻¹
                let l1: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| (d22 * a - d21 * b) / det).collect();
                let l2: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| (d11 * b - d21 * a) / det).collect();
                for (ii, i) in ((k + 2)..n).enumerate() {
                    for (jj, j) in ((k + 2)..n).enumerate() {
                        w[(i, j)] -= l1[ii] * c1[jj] + l2[ii] * c2[jj];
                    }
                    w[(i, k)] = l1[ii];
                    w[(i, k + 1)] = l2[ii];
                }
                pivots.push((k, Pivot::Two([d11, d21, d22])));
                k += 2;
            }
        }
        Self { n, l: w, pivots, perm }
    }

    pub fn inertia(&self) -> Inertia {
        let mut out = Inertia::default();
        for &(_, p) in &self.pivots {
            match p {
                Pivot::One(d) => match d.partial_cmp(&0.0) {
                    Some(std::cmp::Ordering::Less) => out.negative += 1,
                    Some(std::cmp::Ordering::Greater) => out.positive += 1,
                    _ => out.zero += 1,
                },
                Pivot::Two([a, b, c]) => {
                    let det = a * c - b * b;
                    if det < 0.0 {
                        out.negative += 1;
                        out.positive += 1;
                    } else if det == 0.0 {
                        out.zero += 1;
                        if a + c < 0.0 {
                            out.negative += 1;
                        } else {
                            out.positive += 1;
                        }
                    } else if a + c < 0.0 {
                        out.negative += 2;
                    } else {
                        out.positive += 2;
                    }
                }
            }
        }
        out
    }

    /// Smallest magnitude among the eigenvalues of the pivot blocks.
    pub fn min_pivot_magnitude(&self) -> f64 {
        self.pivots
            .iter()
            .map(|&(_, p)| match p {
                Pivot::One(d) => d.abs(),
                Pivot::Two([a, b, c]) => {
                    let mean = 0.5 * (a + c);
                    let rad = (0.25 * (a - c) * (a - c) + b * b).sqrt();
                    (mean + rad).abs().min((mean - rad).abs())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_singular(&self) -> bool {
        self.pivots.iter().any(|&(_, p)| match p {
            Pivot::One(d) => d == 0.0,
            Pivot::Two([a, b, c]) => a * c - b * b == 0.0,
        })
    }

    /// Solves `A x = b` in place for every column of `b`.
    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut x = DMatrix::from_fn(n, b.ncols(), |i, j| b[(self.perm[i], j)]);
        for c in 0..b.ncols() {
            // L y = P b
            for &(k, p) in &self.pivots {
                let width = if matches!(p, Pivot::One(_)) { 1 } else { 2 };
                for col in k..k + width {
                    let v = x[(col, c)];
                    for i in (k + width)..n {
                        x[(i, c)] -= self.l[(i, col)] * v;
                    }
                }
            }
            // D z = y
            for &(k, p) in &self.pivots {
                match p {
                    Pivot::One(d) => x[(k, c)] /= d,
                    Pivot::Two([a, b2, d]) => {
                        let det = a * d - b2 * b2;
                        let (y1, y2) = (x[(k, c)], x[(k + 1, c)]);
                        x[(k, c)] = (d * y1 - b2 * y2) / det;
                        x[(k + 1, c)] = (a * y2 - b2 * y1) / det;
                    }
                }
            }
            // Lᵀ w = z
            for &(k, p) in self.pivots.iter().rev() {
                let width = if matches!(p, Pivot::One(_)) { 1 } else { 2 };
                for col in (k..k + width).rev() {
                    let mut s = x[(col, c)];
                    for i in (k + width)..n {
                        s -= self.l[(i, col)] * x[(i, c)];
                    }
                    x[(col, c)] = s;
                }
            }
        }
        let mut out = DMatrix::zeros(n, b.ncols());
        for i in 0..n {
            out.set_row(self.perm[i], &x.row(i));
        }
        out
    }
}

/// Reciprocal 1-norm condition number `1 / (‖A‖₁ ‖A⁻¹‖₁)`, computed from the
/// explicit inverse. Zero for singular input; one for an empty matrix.
pub fn reciprocal_condition(a: &DMatrix<f64>, f: &Ldlt) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    if f.is_singular() {
        return 0.0;
    }
    let inv = f.solve(&DMatrix::identity(a.nrows(), a.nrows()));
    let r = 1.0 / (norm_1(a) * norm_1(&inv));
    if r.is_finite() {
        r
    } else {
        0.0
    }
}
