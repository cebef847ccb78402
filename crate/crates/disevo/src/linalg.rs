//! Dense linear algebra kernel: rank, null spaces, affine solves and the
//! symplectic pairing. Everything is deterministic: null bases come from the
//! (canonical) reduced row echelon form, each basis vector rescaled so its
//! first nonzero entry is +1.

use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense row-major matrix over a [`Scalar`] field.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul_mat(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows, "matmul shape");
        Mat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matvec shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for k in 0..self.cols {
                    acc = acc + self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape");
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn neg(&self) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    pub fn scale(&self, s: &S) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * s.clone())
    }

    pub fn hstack(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.rows, other.rows, "hstack shape");
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn is_symmetric(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if !(self[(i, j)].clone() - self[(j, i)].clone()).is_negligible() {
                    return false;
                }
            }
        }
        true
    }

    pub fn symmetrize(&self) -> Mat<S> {
        assert_eq!(self.rows, self.cols, "symmetrize shape");
        let half = S::from_ratio(1, 2);
        Mat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)].clone() + self[(j, i)].clone()) * half.clone()
        })
    }

    /// Largest entry magnitude; the relative scale for float zero tests.
    pub fn scale_estimate(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    assert_eq!(u.len(), v.len(), "dot shape");
    u.iter()
        .zip(v)
        .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

pub fn vec_add<S: Scalar>(u: &[S], v: &[S]) -> Vec<S> {
    u.iter().zip(v).map(|(a, b)| a.clone() + b.clone()).collect()
}

pub fn vec_sub<S: Scalar>(u: &[S], v: &[S]) -> Vec<S> {
    u.iter().zip(v).map(|(a, b)| a.clone() - b.clone()).collect()
}

pub fn vec_scale<S: Scalar>(u: &[S], s: &S) -> Vec<S> {
    u.iter().map(|a| a.clone() * s.clone()).collect()
}

pub fn vec_neg<S: Scalar>(u: &[S]) -> Vec<S> {
    u.iter().map(|a| -a.clone()).collect()
}

pub fn vec_is_zero<S: Scalar>(u: &[S], scale: f64) -> bool {
    u.iter().all(|a| a.is_negligible_scaled(scale))
}

/// In-place reduced row echelon form. Pivots are searched only within the
/// first `pivot_cols` columns (trailing columns act as a symbolic right-hand
/// side). Returns the pivot columns in order. `scale` feeds the float-mode
/// zero test; exact mode ignores it.
pub fn rref<S: Scalar>(m: &mut Mat<S>, pivot_cols: usize, scale: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..pivot_cols.min(m.cols) {
        // Partial pivoting: magnitude only breaks ties in float mode; the
        // resulting RREF is canonical either way.
        let mut best: Option<(usize, f64)> = None;
        for r in row..m.rows {
            if !m[(r, col)].is_negligible_scaled(scale) {
                let mag = m[(r, col)].magnitude();
                if best.is_none_or(|(_, bm)| mag > bm) {
                    best = Some((r, mag));
                }
            }
        }
        let Some((prow, _)) = best else { continue };
        m.data.swap_chunks(row, prow, m.cols);
        let inv = m[(row, col)].clone();
        for j in col..m.cols {
            m[(row, j)] = m[(row, j)].clone() / inv.clone();
        }
        for r in 0..m.rows {
            if r != row && !m[(r, col)].is_zero() {
                let factor = m[(r, col)].clone();
                for j in col..m.cols {
                    let delta = factor.clone() * m[(row, j)].clone();
                    m[(r, j)] = m[(r, j)].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.rows {
            break;
        }
    }
    pivots
}

trait SwapChunks {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize);
}

impl<S> SwapChunks for Vec<S> {
    fn swap_chunks(&mut self, a: usize, b: usize, width: usize) {
        if a == b {
            return;
        }
        for j in 0..width {
            self.swap(a * width + j, b * width + j);
        }
    }
}

/// Rescales a vector so its first non-negligible entry equals +1.
pub fn normalize_leading<S: Scalar>(v: &mut [S]) {
    let lead = v.iter().find(|e| !e.is_negligible()).cloned();
    if let Some(lead) = lead {
        for e in v.iter_mut() {
            *e = e.clone() / lead.clone();
        }
    }
}

fn right_null_basis<S: Scalar>(m: &Mat<S>) -> (usize, Vec<Vec<S>>) {
    let scale = m.scale_estimate();
    let mut r = m.clone();
    let pivots = rref(&mut r, m.ncols(), scale);
    let rank = pivots.len();
    let pivot_set: Vec<usize> = pivots.clone();
    let mut basis = Vec::new();
    for f in 0..m.ncols() {
        if pivot_set.contains(&f) {
            continue;
        }
        let mut v = vec![S::zero(); m.ncols()];
        v[f] = S::one();
        for (prow, &pc) in pivot_set.iter().enumerate() {
            v[pc] = -r[(prow, f)].clone();
        }
        normalize_leading(&mut v);
        basis.push(v);
    }
    (rank, basis)
}

/// Rank and deterministic right/left null bases of a rectangular matrix.
pub fn rank_nullspace<S: Scalar>(m: &Mat<S>) -> (usize, Vec<Vec<S>>, Vec<Vec<S>>) {
    let (rank, right) = right_null_basis(m);
    let (_, left) = right_null_basis(&m.transpose());
    (rank, right, left)
}

/// Full solution set of `M x = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSolution<S> {
    /// One solution (free variables pinned to zero).
    pub particular: Vec<S>,
    /// Basis of the homogeneous solutions; the solution set is
    /// particular + span(null_basis).
    pub null_basis: Vec<Vec<S>>,
}

/// Proof of infeasibility: a left-null vector of `M` with certificate·b ≠ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Infeasible<S> {
    pub certificate: Vec<S>,
}

pub fn affine_solve<S: Scalar>(m: &Mat<S>, b: &[S]) -> Result<AffineSolution<S>, Infeasible<S>> {
    assert_eq!(m.nrows(), b.len(), "affine_solve shape");
    let sym = solve_affine_symbolic(m, &Mat::zeros(m.nrows(), 0), b);
    for (cond_y, cond_0) in &sym.conditions {
        debug_assert!(cond_y.is_empty());
        let _ = cond_y;
        if !cond_0.is_negligible_scaled(sym.scale) {
            // Fredholm alternative: some left-null direction sees the residual.
            let (_, _, left) = rank_nullspace(m);
            let cert = left
                .into_iter()
                .find(|w| !dot(w, b).is_negligible_scaled(sym.scale))
                .expect("inconsistent system must have a certifying left-null vector");
            return Err(Infeasible { certificate: cert });
        }
    }
    Ok(AffineSolution {
        particular: sym.constant,
        null_basis: sym.free,
    })
}

/// Solution of `M x = N y + r` with `y` symbolic:
/// x = linear·y + constant + span(free), subject to the listed solvability
/// conditions (rows `cy·y + c0 = 0` coming from rank-deficient rows of `M`).
#[derive(Debug, Clone)]
pub struct SymbolicSolution<S> {
    pub linear: Mat<S>,
    pub constant: Vec<S>,
    pub free: Vec<Vec<S>>,
    pub conditions: Vec<(Vec<S>, S)>,
    pub scale: f64,
}

pub fn solve_affine_symbolic<S: Scalar>(
    m: &Mat<S>,
    n: &Mat<S>,
    r: &[S],
) -> SymbolicSolution<S> {
    assert_eq!(m.nrows(), n.nrows(), "symbolic solve shape");
    assert_eq!(m.nrows(), r.len(), "symbolic solve shape");
    let nx = m.ncols();
    let ny = n.ncols();
    let rhs = Mat::from_fn(m.nrows(), ny + 1, |i, j| {
        if j < ny {
            n[(i, j)].clone()
        } else {
            r[i].clone()
        }
    });
    let mut aug = m.hstack(&rhs);
    let scale = aug.scale_estimate();
    let pivots = rref(&mut aug, nx, scale);

    let mut linear = Mat::zeros(nx, ny);
    let mut constant = vec![S::zero(); nx];
    for (prow, &pc) in pivots.iter().enumerate() {
        for j in 0..ny {
            linear[(pc, j)] = aug[(prow, nx + j)].clone();
        }
        constant[pc] = aug[(prow, nx + ny)].clone();
    }

    let mut free = Vec::new();
    for f in 0..nx {
        if pivots.contains(&f) {
            continue;
        }
        let mut v = vec![S::zero(); nx];
        v[f] = S::one();
        for (prow, &pc) in pivots.iter().enumerate() {
            v[pc] = -aug[(prow, f)].clone();
        }
        normalize_leading(&mut v);
        free.push(v);
    }

    let mut conditions = Vec::new();
    for row in pivots.len()..m.nrows() {
        let cy: Vec<S> = (0..ny).map(|j| -aug[(row, nx + j)].clone()).collect();
        let c0 = -aug[(row, nx + ny)].clone();
        if !vec_is_zero(&cy, scale) || !c0.is_negligible_scaled(scale) {
            conditions.push((cy, c0));
        }
    }

    SymbolicSolution {
        linear,
        constant,
        free,
        conditions,
        scale,
    }
}

/// Canonical pairing Σ_j (δx_u)_j (δp_v)_j − (δx_v)_j (δp_u)_j.
pub fn symplectic_pairing<S: Scalar>(
    u: (&[S], &[S]),
    v: (&[S], &[S]),
) -> Result<S, KernelError> {
    let (xu, pu) = u;
    let (xv, pv) = v;
    if xu.len() != pu.len() || xv.len() != pv.len() || xu.len() != xv.len() {
        return Err(KernelError::DimensionMismatch(format!(
            "pairing over ({},{}) vs ({},{})",
            xu.len(),
            pu.len(),
            xv.len(),
            pv.len()
        )));
    }
    Ok(dot(xu, pv) - dot(xv, pu))
}
