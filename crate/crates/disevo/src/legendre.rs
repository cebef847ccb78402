//! Discrete Legendre transforms, the Lagrangian two-form, and extraction of
//! pre-/post-constraint sets from one action contribution.
//!
//! Constraints are emitted in the normal form whose p-gradient IS the
//! deterministic null-basis vector of the two-form, so the Hessian/bracket
//! identity in the analysis module is directly testable.

use thiserror::Error;

use crate::action::{QuadraticAction, Slice};
use crate::linalg::{dot, rank_nullspace, rref, vec_is_zero, vec_neg, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum LegendreError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("constraint sets live on different slices")]
    SliceMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumTag {
    Pre,
    Post,
    Matched,
}

/// Configuration and momentum at one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<S> {
    pub slice: Slice,
    pub x: Vec<S>,
    pub p: Vec<S>,
    pub tag: MomentumTag,
}

impl<S: Scalar> PhasePoint<S> {
    pub fn new(slice: Slice, x: Vec<S>, p: Vec<S>, tag: MomentumTag) -> Self {
        assert_eq!(slice.dim(), x.len(), "x dimension");
        assert_eq!(slice.dim(), p.len(), "p dimension");
        PhasePoint { slice, x, p, tag }
    }

    pub fn zero(slice: Slice, tag: MomentumTag) -> Self {
        let q = slice.dim();
        PhasePoint {
            slice,
            x: vec![S::zero(); q],
            p: vec![S::zero(); q],
            tag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintTag {
    Pre,
    Post,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Primary,
    Secondary,
    Extension,
}

/// Affine constraint gxᵀx + gpᵀp + c0 = 0 at one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineConstraint<S> {
    pub slice: Slice,
    pub gx: Vec<S>,
    pub gp: Vec<S>,
    pub c0: S,
    pub tag: ConstraintTag,
    pub provenance: Provenance,
}

impl<S: Scalar> AffineConstraint<S> {
    pub fn evaluate(&self, x: &[S], p: &[S]) -> S {
        dot(&self.gx, x) + dot(&self.gp, p) + self.c0.clone()
    }

    /// Stacked coefficient row (gx | gp | c0).
    pub fn row(&self) -> Vec<S> {
        let mut r = self.gx.clone();
        r.extend(self.gp.iter().cloned());
        r.push(self.c0.clone());
        r
    }

    pub fn from_row(
        slice: Slice,
        row: &[S],
        tag: ConstraintTag,
        provenance: Provenance,
    ) -> Self {
        let q = slice.dim();
        assert_eq!(row.len(), 2 * q + 1, "constraint row width");
        AffineConstraint {
            slice,
            gx: row[..q].to_vec(),
            gp: row[q..2 * q].to_vec(),
            c0: row[2 * q].clone(),
            tag,
            provenance,
        }
    }
}

/// Outcome of inserting a constraint into an irreducible set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    /// Already implied by the set.
    Dependent,
    /// Independent; the set grew.
    Added,
    /// Contradicts the set (gradient dependent, constant part not).
    Inconsistent,
}

/// Irreducible list of affine constraints at one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet<S> {
    pub slice: Slice,
    pub constraints: Vec<AffineConstraint<S>>,
}

impl<S: Scalar> ConstraintSet<S> {
    pub fn empty(slice: Slice) -> Self {
        ConstraintSet {
            slice,
            constraints: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    fn gradient_rows(&self) -> Mat<S> {
        let q = self.slice.dim();
        Mat::from_fn(self.constraints.len(), 2 * q, |i, j| {
            let c = &self.constraints[i];
            if j < q {
                c.gx[j].clone()
            } else {
                c.gp[j - q].clone()
            }
        })
    }

    fn full_rows(&self) -> Mat<S> {
        let q = self.slice.dim();
        Mat::from_fn(self.constraints.len(), 2 * q + 1, |i, j| {
            let c = &self.constraints[i];
            if j < q {
                c.gx[j].clone()
            } else if j < 2 * q {
                c.gp[j - q].clone()
            } else {
                c.c0.clone()
            }
        })
    }

    /// Full row rank of the stacked (gx, gp) gradients.
    pub fn is_irreducible(&self) -> bool {
        let rows = self.gradient_rows();
        let (rank, _, _) = rank_nullspace(&rows);
        rank == self.constraints.len()
    }

    /// Reduces a candidate constraint against the set and inserts it if
    /// independent. Tags/provenance of the candidate are kept as given.
    pub fn insert_reduced(&mut self, cand: AffineConstraint<S>) -> AddOutcome {
        assert!(cand.slice.same_vars(&self.slice), "constraint slice");
        let q = self.slice.dim();
        let scale = 1.0f64.max(
            cand.row()
                .iter()
                .map(|v| v.magnitude())
                .fold(0.0, f64::max),
        );
        if vec_is_zero(&cand.gx, scale) && vec_is_zero(&cand.gp, scale) {
            return if cand.c0.is_negligible_scaled(scale) {
                AddOutcome::Dependent
            } else {
                AddOutcome::Inconsistent
            };
        }
        // Row-reduce [existing rows; candidate] twice: once on the gradient
        // part, once including the constant, to separate dependence from
        // contradiction.
        let mut grad_rows: Vec<Vec<S>> = self
            .constraints
            .iter()
            .map(|c| {
                let mut r = c.gx.clone();
                r.extend(c.gp.iter().cloned());
                r
            })
            .collect();
        grad_rows.push({
            let mut r = cand.gx.clone();
            r.extend(cand.gp.iter().cloned());
            r
        });
        let mut gm = Mat::from_rows(grad_rows);
        let gscale = gm.scale_estimate();
        let grank_with = rref(&mut gm, 2 * q, gscale).len();
        if grank_with == self.constraints.len() + 1 {
            self.constraints.push(cand);
            return AddOutcome::Added;
        }
        // Gradient is dependent; check the affine row for a contradiction.
        let mut full_rows: Vec<Vec<S>> =
            self.constraints.iter().map(|c| c.row()).collect();
        full_rows.push(cand.row());
        let mut fm = Mat::from_rows(full_rows);
        let fscale = fm.scale_estimate();
        let frank_with = rref(&mut fm, 2 * q + 1, fscale).len();
        if frank_with == self.constraints.len() {
            AddOutcome::Dependent
        } else {
            AddOutcome::Inconsistent
        }
    }

    /// The combined affine system is infeasible (no (x, p) satisfies all).
    pub fn is_infeasible(&self) -> bool {
        let q = self.slice.dim();
        let full = self.full_rows();
        let grads = self.gradient_rows();
        let mut fm = full.clone();
        let fscale = fm.scale_estimate();
        let frank = rref(&mut fm, 2 * q + 1, fscale).len();
        let (grank, _, _) = rank_nullspace(&grads);
        frank > grank
    }

    /// Maximal residual magnitude of the set at a point.
    pub fn residuals(&self, x: &[S], p: &[S]) -> Vec<S> {
        self.constraints.iter().map(|c| c.evaluate(x, p)).collect()
    }

    pub fn satisfied_at(&self, x: &[S], p: &[S]) -> bool {
        let scale = 1.0f64.max(
            x.iter()
                .chain(p.iter())
                .map(|v| v.magnitude())
                .fold(0.0, f64::max),
        );
        self.residuals(x, p)
            .iter()
            .all(|r| r.is_negligible_scaled(scale))
    }

    /// The sub-span of constraints with zero coefficients on the given
    /// variable positions (both x and p coordinates of those variables).
    /// Used to project multiplier variables out of an extended slice.
    pub fn eliminate_positions(&self, positions: &[usize], reduced_slice: Slice) -> ConstraintSet<S> {
        let q = self.slice.dim();
        if self.constraints.is_empty() {
            return ConstraintSet::empty(reduced_slice);
        }
        // Rows of the restriction to the eliminated coordinates.
        let elim_cols: Vec<usize> = positions
            .iter()
            .flat_map(|&i| [i, q + i])
            .collect();
        let restricted = Mat::from_fn(self.constraints.len(), elim_cols.len(), |i, j| {
            let c = &self.constraints[i];
            let col = elim_cols[j];
            if col < q {
                c.gx[col].clone()
            } else {
                c.gp[col - q].clone()
            }
        });
        let (_, _, left) = rank_nullspace(&restricted);
        let keep: Vec<usize> = (0..q).filter(|i| !positions.contains(i)).collect();
        let mut out = ConstraintSet::empty(reduced_slice.clone());
        let full = self.full_rows();
        for w in left {
            let combo = Mat::from_rows(vec![w]).mul_mat(&full);
            let gx: Vec<S> = keep.iter().map(|&i| combo[(0, i)].clone()).collect();
            let gp: Vec<S> = keep.iter().map(|&i| combo[(0, q + i)].clone()).collect();
            let c0 = combo[(0, 2 * q)].clone();
            let tag = self.constraints.first().map(|c| c.tag).unwrap_or(ConstraintTag::Both);
            out.insert_reduced(AffineConstraint {
                slice: reduced_slice.clone(),
                gx,
                gp,
                c0,
                tag,
                provenance: Provenance::Secondary,
            });
        }
        out
    }
}

/// Ω = −B, the mixed second-derivative block with the sign fixed so the
/// lattice slab's two-form equals its adjacency matrix.
pub fn lagrangian_two_form<S: Scalar>(s: &QuadraticAction<S>) -> Mat<S> {
    s.b_blk.neg()
}

/// Post-Legendre transform: p = ∂S/∂x_next at (x_prev, x_next).
pub fn post_legendre<S: Scalar>(
    s: &QuadraticAction<S>,
    x_prev: &[S],
    x_next: &[S],
) -> PhasePoint<S> {
    PhasePoint::new(
        s.next.clone(),
        x_next.to_vec(),
        s.grad_next(x_prev, x_next),
        MomentumTag::Post,
    )
}

/// Pre-Legendre transform: p = −∂S/∂x_prev at (x_prev, x_next).
pub fn pre_legendre<S: Scalar>(
    s: &QuadraticAction<S>,
    x_prev: &[S],
    x_next: &[S],
) -> PhasePoint<S> {
    PhasePoint::new(
        s.prev.clone(),
        x_prev.to_vec(),
        vec_neg(&s.grad_prev(x_prev, x_next)),
        MomentumTag::Pre,
    )
}

/// One post-constraint per right-null vector R of B: eliminating x_prev from
/// the post-momentum map gives Rᵀp − RᵀC x − Rᵀc = 0 at the next slice.
pub fn post_constraints<S: Scalar>(s: &QuadraticAction<S>) -> ConstraintSet<S> {
    let (_, right, _) = rank_nullspace(&s.b_blk);
    let mut set = ConstraintSet::empty(s.next.clone());
    for r in right {
        let gx = vec_neg(&s.c_blk.mul_vec(&r));
        let c0 = -dot(&r, &s.c_lin);
        set.constraints.push(AffineConstraint {
            slice: s.next.clone(),
            gx,
            gp: r,
            c0,
            tag: ConstraintTag::Post,
            provenance: Provenance::Primary,
        });
    }
    set
}

/// One pre-constraint per left-null vector L of B: Lᵀp + LᵀA x + Lᵀa = 0 at
/// the prev slice (from the pre-momentum map p = −Ax − Bx_next − a).
pub fn pre_constraints<S: Scalar>(s: &QuadraticAction<S>) -> ConstraintSet<S> {
    let (_, _, left) = rank_nullspace(&s.b_blk);
    let mut set = ConstraintSet::empty(s.prev.clone());
    for l in left {
        let gx = s.a_blk.mul_vec(&l);
        let c0 = dot(&l, &s.a_lin);
        set.constraints.push(AffineConstraint {
            slice: s.prev.clone(),
            gx,
            gp: l,
            c0,
            tag: ConstraintTag::Pre,
            provenance: Provenance::Primary,
        });
    }
    set
}
