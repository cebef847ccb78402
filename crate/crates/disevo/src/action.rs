//! Labeled variable slices and quadratic action contributions
//! S(x_prev, x_next) = ½x_pᵀAx_p + x_pᵀBx_n + ½x_nᵀCx_n + aᵀx_p + cᵀx_n + s0,
//! stored in explicit block form so every derivative downstream is exact.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::linalg::{dot, vec_add, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum ActionError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("label {0:?} would appear on both sides of the composed action")]
    SharedLabel(String),
    #[error("middle slices do not match: {0}")]
    SliceMismatch(String),
    #[error("invalid role assignment: {0}")]
    InvalidRoles(String),
}

/// Ordered, labeled configuration variables at one time step. Q = 0 is legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slice {
    pub step_label: String,
    pub vars: Vec<String>,
}

impl Slice {
    pub fn new(step_label: impl Into<String>, vars: Vec<String>) -> Result<Self, ActionError> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if !seen.insert(v.clone()) {
                return Err(ActionError::DuplicateLabel(v.clone()));
            }
        }
        Ok(Slice {
            step_label: step_label.into(),
            vars,
        })
    }

    pub fn numbered(step_label: impl Into<String>, prefix: &str, q: usize) -> Self {
        let step_label = step_label.into();
        let vars = (0..q).map(|i| format!("{prefix}{}", i + 1)).collect();
        Slice { step_label, vars }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == label)
    }

    pub fn same_vars(&self, other: &Slice) -> bool {
        self.vars == other.vars
    }
}

/// One evolution-move contribution in block form.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticAction<S> {
    pub prev: Slice,
    pub next: Slice,
    /// ∂²S/∂x_prev² (symmetric).
    pub a_blk: Mat<S>,
    /// ∂²S/∂x_prev∂x_next.
    pub b_blk: Mat<S>,
    /// ∂²S/∂x_next² (symmetric).
    pub c_blk: Mat<S>,
    /// Linear coefficients on x_prev.
    pub a_lin: Vec<S>,
    /// Linear coefficients on x_next.
    pub c_lin: Vec<S>,
    pub s0: S,
}

#[allow(clippy::too_many_arguments)]
pub fn build_action<S: Scalar>(
    prev: Slice,
    next: Slice,
    a_blk: Mat<S>,
    b_blk: Mat<S>,
    c_blk: Mat<S>,
    a_lin: Vec<S>,
    c_lin: Vec<S>,
    s0: S,
) -> Result<QuadraticAction<S>, ActionError> {
    let (qp, qn) = (prev.dim(), next.dim());
    let check = |name: &str, got: (usize, usize), want: (usize, usize)| {
        if got == want {
            Ok(())
        } else {
            Err(ActionError::DimensionMismatch(format!(
                "{name} block is {}x{}, expected {}x{}",
                got.0, got.1, want.0, want.1
            )))
        }
    };
    check("A", (a_blk.nrows(), a_blk.ncols()), (qp, qp))?;
    check("B", (b_blk.nrows(), b_blk.ncols()), (qp, qn))?;
    check("C", (c_blk.nrows(), c_blk.ncols()), (qn, qn))?;
    if a_lin.len() != qp || c_lin.len() != qn {
        return Err(ActionError::DimensionMismatch(format!(
            "linear parts are ({}, {}), expected ({qp}, {qn})",
            a_lin.len(),
            c_lin.len()
        )));
    }
    for v in &prev.vars {
        if next.vars.contains(v) {
            return Err(ActionError::SharedLabel(v.clone()));
        }
    }
    let a_blk = if a_blk.is_symmetric() {
        a_blk
    } else {
        eprintln!("warning: A block not symmetric; symmetrizing");
        a_blk.symmetrize()
    };
    let c_blk = if c_blk.is_symmetric() {
        c_blk
    } else {
        eprintln!("warning: C block not symmetric; symmetrizing");
        c_blk.symmetrize()
    };
    Ok(QuadraticAction {
        prev,
        next,
        a_blk,
        b_blk,
        c_blk,
        a_lin,
        c_lin,
        s0,
    })
}

impl<S: Scalar> QuadraticAction<S> {
    pub fn zero(prev: Slice, next: Slice) -> Self {
        let (qp, qn) = (prev.dim(), next.dim());
        QuadraticAction {
            prev,
            next,
            a_blk: Mat::zeros(qp, qp),
            b_blk: Mat::zeros(qp, qn),
            c_blk: Mat::zeros(qn, qn),
            a_lin: vec![S::zero(); qp],
            c_lin: vec![S::zero(); qn],
            s0: S::zero(),
        }
    }

    pub fn evaluate(&self, x_prev: &[S], x_next: &[S]) -> S {
        assert_eq!(x_prev.len(), self.prev.dim(), "x_prev dimension");
        assert_eq!(x_next.len(), self.next.dim(), "x_next dimension");
        let half = S::from_ratio(1, 2);
        let quad_p = dot(x_prev, &self.a_blk.mul_vec(x_prev)) * half.clone();
        let cross = dot(x_prev, &self.b_blk.mul_vec(x_next));
        let quad_n = dot(x_next, &self.c_blk.mul_vec(x_next)) * half;
        quad_p + cross + quad_n + dot(&self.a_lin, x_prev) + dot(&self.c_lin, x_next)
            + self.s0.clone()
    }

    /// ∂S/∂x_prev = A x_prev + B x_next + a.
    pub fn grad_prev(&self, x_prev: &[S], x_next: &[S]) -> Vec<S> {
        vec_add(
            &vec_add(&self.a_blk.mul_vec(x_prev), &self.b_blk.mul_vec(x_next)),
            &self.a_lin,
        )
    }

    /// ∂S/∂x_next = Bᵀ x_prev + C x_next + c.
    pub fn grad_next(&self, x_prev: &[S], x_next: &[S]) -> Vec<S> {
        vec_add(
            &vec_add(
                &self.b_blk.transpose().mul_vec(x_prev),
                &self.c_blk.mul_vec(x_next),
            ),
            &self.c_lin,
        )
    }

    /// The action read as one quadratic form over the concatenated
    /// (prev, next) variables: S = ½zᵀGz + gᵀz + s0.
    pub fn as_joint_form(&self) -> (Vec<String>, Mat<S>, Vec<S>, S) {
        let qp = self.prev.dim();
        let qn = self.next.dim();
        let g = Mat::from_fn(qp + qn, qp + qn, |i, j| match (i < qp, j < qp) {
            (true, true) => self.a_blk[(i, j)].clone(),
            (true, false) => self.b_blk[(i, j - qp)].clone(),
            (false, true) => self.b_blk[(j, i - qp)].clone(),
            (false, false) => self.c_blk[(i - qp, j - qp)].clone(),
        });
        let mut lin = self.a_lin.clone();
        lin.extend(self.c_lin.iter().cloned());
        let mut vars = self.prev.vars.clone();
        vars.extend(self.next.vars.iter().cloned());
        (vars, g, lin, self.s0.clone())
    }

    /// The time-reversed contribution: swaps the two slices (A↔C, B→Bᵀ).
    pub fn reversed(&self) -> Self {
        QuadraticAction {
            prev: self.next.clone(),
            next: self.prev.clone(),
            a_blk: self.c_blk.clone(),
            b_blk: self.b_blk.transpose(),
            c_blk: self.a_blk.clone(),
            a_lin: self.c_lin.clone(),
            c_lin: self.a_lin.clone(),
            s0: self.s0.clone(),
        }
    }
}

/// Blockwise sum over the union of variables. A label shared by `s1.next`
/// and `s2.prev` (the common boundary) lands on the next side of the sum;
/// evaluation of the sum equals the sum of evaluations.
pub fn add_actions<S: Scalar>(
    s1: &QuadraticAction<S>,
    s2: &QuadraticAction<S>,
) -> Result<QuadraticAction<S>, ActionError> {
    let mut prev_vars: Vec<String> = s1.prev.vars.clone();
    for v in &s2.prev.vars {
        if !prev_vars.contains(v) && !s1.next.vars.contains(v) {
            prev_vars.push(v.clone());
        }
    }
    let mut next_vars: Vec<String> = s1.next.vars.clone();
    for v in &s2.next.vars {
        if !next_vars.contains(v) {
            next_vars.push(v.clone());
        }
    }
    for v in &prev_vars {
        if next_vars.contains(v) {
            return Err(ActionError::SharedLabel(v.clone()));
        }
    }
    let qp = prev_vars.len();
    let total = qp + next_vars.len();
    let index: BTreeMap<&str, usize> = prev_vars
        .iter()
        .map(|v| v.as_str())
        .chain(next_vars.iter().map(|v| v.as_str()))
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();

    let mut g_sum: Mat<S> = Mat::zeros(total, total);
    let mut lin_sum = vec![S::zero(); total];
    let mut s0_sum = S::zero();
    for part in [s1, s2] {
        let (vars, g, lin, s0) = part.as_joint_form();
        let map: Vec<usize> = vars.iter().map(|v| index[v.as_str()]).collect();
        for (i, &gi) in map.iter().enumerate() {
            for (j, &gj) in map.iter().enumerate() {
                g_sum[(gi, gj)] = g_sum[(gi, gj)].clone() + g[(i, j)].clone();
            }
            lin_sum[gi] = lin_sum[gi].clone() + lin[i].clone();
        }
        s0_sum = s0_sum + s0;
    }

    let prev = Slice::new(s1.prev.step_label.clone(), prev_vars)?;
    let next_label = if s2.next.dim() > 0 {
        s2.next.step_label.clone()
    } else {
        s1.next.step_label.clone()
    };
    let next = Slice::new(next_label, next_vars)?;
    let a_blk = Mat::from_fn(qp, qp, |i, j| g_sum[(i, j)].clone());
    let b_blk = Mat::from_fn(qp, total - qp, |i, j| g_sum[(i, qp + j)].clone());
    let c_blk = Mat::from_fn(total - qp, total - qp, |i, j| g_sum[(qp + i, qp + j)].clone());
    let a_lin = lin_sum[..qp].to_vec();
    let c_lin = lin_sum[qp..].to_vec();
    build_action(prev, next, a_blk, b_blk, c_blk, a_lin, c_lin, s0_sum)
}

/// Hessian of the composite action with respect to the shared middle slice:
/// H = C-block of `s_in` + A-block of `s_out` (aligned by label).
pub fn hessian_at<S: Scalar>(
    s_in: &QuadraticAction<S>,
    s_out: &QuadraticAction<S>,
) -> Result<Mat<S>, ActionError> {
    let mid = &s_in.next;
    let out_prev = &s_out.prev;
    if mid.dim() != out_prev.dim() {
        return Err(ActionError::SliceMismatch(format!(
            "middle dimensions {} vs {}",
            mid.dim(),
            out_prev.dim()
        )));
    }
    let perm: Option<Vec<usize>> = mid
        .vars
        .iter()
        .map(|v| out_prev.index_of(v))
        .collect();
    let Some(perm) = perm else {
        return Err(ActionError::SliceMismatch(
            "middle slices carry different labels".into(),
        ));
    };
    let aligned = Mat::from_fn(mid.dim(), mid.dim(), |i, j| {
        s_out.a_blk[(perm[i], perm[j])].clone()
    });
    Ok(s_in.c_blk.add(&aligned))
}

/// Variable roles for local moves: b untouched, e momentum-updated,
/// n new (next only), o old (prev only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Role {
    B,
    E,
    N,
    O,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleMap {
    pub roles: BTreeMap<String, Role>,
}

impl RoleMap {
    pub fn new(entries: Vec<(String, Role)>) -> Result<Self, ActionError> {
        let mut roles = BTreeMap::new();
        for (label, role) in entries {
            if roles.insert(label.clone(), role).is_some() {
                return Err(ActionError::DuplicateLabel(label));
            }
        }
        Ok(RoleMap { roles })
    }

    pub fn role_of(&self, label: &str) -> Option<Role> {
        self.roles.get(label).copied()
    }

    pub fn labels_with(&self, role: Role) -> Vec<String> {
        self.roles
            .iter()
            .filter(|(_, r)| **r == role)
            .map(|(l, _)| l.clone())
            .collect()
    }

    /// Checks the role partition against an action's slices: n only in next,
    /// o only in prev, b/e in both (here: anywhere the action touches).
    pub fn validate(&self, action: &QuadraticAction<impl Scalar>) -> Result<(), ActionError> {
        for (label, role) in &self.roles {
            let in_prev = action.prev.vars.contains(label);
            let in_next = action.next.vars.contains(label);
            let ok = match role {
                Role::N => in_next && !in_prev,
                Role::O => in_prev && !in_next,
                Role::B | Role::E => in_prev || in_next,
            };
            if !ok {
                return Err(ActionError::InvalidRoles(format!(
                    "label {label:?} with role {role:?} sits on the wrong side"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num_traits::Zero;

    fn ri(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rr(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    pub(crate) fn slice(label: &str, vars: &[&str]) -> Slice {
        Slice::new(label, vars.iter().map(|v| v.to_string()).collect()).unwrap()
    }

    #[test]
    fn zero_action_evaluates_to_zero() {
        let s: QuadraticAction<Rat> =
            QuadraticAction::zero(slice("0", &["u1", "u2"]), slice("1", &["v1", "v2", "v3"]));
        let x = vec![ri(1), ri(-2)];
        let y = vec![ri(3), ri(4), ri(5)];
        assert!(s.evaluate(&x, &y).is_negligible());
        assert!(s.grad_prev(&x, &y).iter().all(|v| v.is_negligible()));
        assert!(s.grad_next(&x, &y).iter().all(|v| v.is_negligible()));
    }

    #[test]
    fn build_rejects_non_square_a_block() {
        let err = build_action::<Rat>(
            slice("0", &["u1", "u2"]),
            slice("1", &["v1"]),
            Mat::zeros(2, 3),
            Mat::zeros(2, 1),
            Mat::zeros(1, 1),
            vec![Rat::zero(); 2],
            vec![Rat::zero(); 1],
            Rat::zero(),
        )
        .unwrap_err();
        assert!(matches!(err, ActionError::DimensionMismatch(_)));
    }

    /// ¼[(u−v)² + (v−w)² + (w−u)²] with u on the prev side.
    fn triangle_like() -> QuadraticAction<Rat> {
        build_action(
            slice("k", &["u"]),
            slice("k+1", &["v", "w"]),
            Mat::from_rows(vec![vec![ri(1)]]),
            Mat::from_rows(vec![vec![rr(-1, 2), rr(-1, 2)]]),
            Mat::from_rows(vec![vec![ri(1), rr(-1, 2)], vec![rr(-1, 2), ri(1)]]),
            vec![Rat::zero()],
            vec![Rat::zero(); 2],
            Rat::zero(),
        )
        .unwrap()
    }

    #[test]
    fn triangle_like_action_values() {
        let s = triangle_like();
        assert!(s.evaluate(&[ri(1)], &[ri(1), ri(1)]).is_negligible());
        assert_eq!(s.evaluate(&[ri(1)], &[ri(0), ri(0)]), rr(1, 2));
        assert_eq!(s.grad_prev(&[ri(1)], &[ri(0), ri(0)]), vec![ri(1)]);
        assert_eq!(
            s.grad_next(&[ri(1)], &[ri(0), ri(0)]),
            vec![rr(-1, 2), rr(-1, 2)]
        );
    }

    #[test]
    fn add_actions_is_additive_across_a_shared_boundary() {
        let s1 = triangle_like();
        // Second contribution over (v, w) -> (z): ½(v+w−z)² style coupling.
        let s2 = build_action(
            slice("k+1", &["v", "w"]),
            slice("k+2", &["z"]),
            Mat::from_rows(vec![vec![ri(1), ri(1)], vec![ri(1), ri(1)]]),
            Mat::from_rows(vec![vec![ri(-1)], vec![ri(-1)]]),
            Mat::from_rows(vec![vec![ri(1)]]),
            vec![ri(2), ri(0)],
            vec![ri(-1)],
            ri(7),
        )
        .unwrap();
        let sum = add_actions(&s1, &s2).unwrap();
        assert_eq!(sum.prev.vars, vec!["u"]);
        assert_eq!(sum.next.vars, vec!["v", "w", "z"]);
        let (u, v, w, z) = (ri(2), ri(-1), ri(3), ri(5));
        let expect = s1.evaluate(std::slice::from_ref(&u), &[v.clone(), w.clone()])
            + s2.evaluate(&[v.clone(), w.clone()], std::slice::from_ref(&z));
        assert_eq!(sum.evaluate(&[u], &[v, w, z]), expect);
    }

    #[test]
    fn add_actions_sums_shared_couplings() {
        // Two copies over the same slices double every block.
        let s = triangle_like();
        let sum = add_actions(&s, &s).unwrap();
        assert_eq!(sum.b_blk, s.b_blk.scale(&ri(2)));
        assert_eq!(sum.c_blk, s.c_blk.scale(&ri(2)));
    }

    #[test]
    fn add_zero_action_is_identity() {
        let s = triangle_like();
        let zero = QuadraticAction::zero(s.prev.clone(), s.next.clone());
        let sum = add_actions(&s, &zero).unwrap();
        assert_eq!(sum.a_blk, s.a_blk);
        assert_eq!(sum.b_blk, s.b_blk);
        assert_eq!(sum.c_blk, s.c_blk);
        assert_eq!(sum.a_lin, s.a_lin);
        assert_eq!(sum.c_lin, s.c_lin);
        assert_eq!(sum.s0, s.s0);
    }

    #[test]
    fn hessian_of_zero_actions_is_zero() {
        let mid = slice("1", &["m1", "m2"]);
        let s1: QuadraticAction<Rat> = QuadraticAction::zero(slice("0", &["u"]), mid.clone());
        let s2: QuadraticAction<Rat> = QuadraticAction::zero(mid, slice("2", &["z"]));
        let h = hessian_at(&s1, &s2).unwrap();
        assert_eq!(h, Mat::zeros(2, 2));
    }

    #[test]
    fn hessian_aligns_permuted_middle_labels() {
        let s1 = triangle_like();
        let s2 = build_action(
            slice("k+1", &["w", "v"]),
            slice("k+2", &["z"]),
            Mat::from_rows(vec![vec![ri(2), ri(1)], vec![ri(1), ri(4)]]),
            Mat::zeros(2, 1),
            Mat::zeros(1, 1),
            vec![Rat::zero(); 2],
            vec![Rat::zero()],
            Rat::zero(),
        )
        .unwrap();
        let h = hessian_at(&s1, &s2).unwrap();
        // s2's A block indexed (w,v) must land as (v,w) here.
        assert_eq!(h[(0, 0)], ri(1) + ri(4));
        assert_eq!(h[(1, 1)], ri(1) + ri(2));
        assert_eq!(h[(0, 1)], rr(-1, 2) + ri(1));
        assert!(h.is_symmetric());
    }

    #[test]
    fn role_map_validates_sides() {
        let s = triangle_like();
        let ok = RoleMap::new(vec![
            ("u".into(), Role::O),
            ("v".into(), Role::N),
            ("w".into(), Role::N),
        ])
        .unwrap();
        ok.validate(&s).unwrap();
        let bad = RoleMap::new(vec![("u".into(), Role::N)]).unwrap();
        assert!(bad.validate(&s).is_err());
    }
}
