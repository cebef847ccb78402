//! Momentum updating for local evolution moves of types I-IV on extended
//! phase spaces: configuration variables persist across the step while
//! momenta shift by action gradients. New variables enter with vanishing
//! momentum; old variables leave behind a vanishing momentum and their
//! pre-constraint.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::action::{QuadraticAction, Role, RoleMap, Slice};
use crate::evolution::EvolveError;
use crate::legendre::{
    AffineConstraint, ConstraintSet, ConstraintTag, MomentumTag, PhasePoint, Provenance,
};
use crate::linalg::{affine_solve, dot, rank_nullspace, vec_add, vec_scale, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum MoveError {
    #[error("move roles do not match its kind: {0}")]
    KindMismatch(String),
    #[error("label collision: {0:?} already on the slice")]
    LabelCollision(String),
    #[error("label {0:?} missing from the slice")]
    MissingLabel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    I,
    II,
    III,
    IV,
}

/// A local move: its kind, variable roles, and action contribution. The
/// action's prev slice holds the k-side variables (o, and e for type II);
/// the next slice holds the k+1-side variables (n, and e for I/III/IV).
#[derive(Debug, Clone)]
pub struct MoveSpec<S> {
    pub kind: MoveKind,
    pub roles: RoleMap,
    pub action: QuadraticAction<S>,
}

impl<S: Scalar> MoveSpec<S> {
    pub fn new(
        kind: MoveKind,
        roles: RoleMap,
        action: QuadraticAction<S>,
    ) -> Result<Self, MoveError> {
        roles
            .validate(&action)
            .map_err(|e| MoveError::KindMismatch(e.to_string()))?;
        let n = roles.labels_with(Role::N).len();
        let o = roles.labels_with(Role::O).len();
        let ok = match kind {
            MoveKind::I => n > 0 && o == 0,
            MoveKind::II => o > 0 && n == 0,
            MoveKind::III => n > 0 && n == o,
            MoveKind::IV => n == 0 && o == 0,
        };
        if !ok {
            return Err(MoveError::KindMismatch(format!(
                "kind {kind:?} with {n} new and {o} old variables"
            )));
        }
        Ok(MoveSpec {
            kind,
            roles,
            action,
        })
    }

    pub fn new_labels(&self) -> Vec<String> {
        // In action.next order so λ/value bookkeeping is deterministic.
        self.action
            .next
            .vars
            .iter()
            .filter(|v| self.roles.role_of(v) == Some(Role::N))
            .cloned()
            .collect()
    }

    pub fn old_labels(&self) -> Vec<String> {
        self.action
            .prev
            .vars
            .iter()
            .filter(|v| self.roles.role_of(v) == Some(Role::O))
            .cloned()
            .collect()
    }
}

/// Canonical data on the evolving (extended) slice, together with the active
/// post-constraint set and the labels currently held as formal extension
/// pairs (their momenta are constrained to zero).
#[derive(Debug, Clone)]
pub struct ExtendedState<S> {
    pub point: PhasePoint<S>,
    pub post: ConstraintSet<S>,
    pub extensions: Vec<String>,
}

impl<S: Scalar> ExtendedState<S> {
    pub fn fresh(slice: Slice, x: Vec<S>, p: Vec<S>) -> Self {
        let point = PhasePoint::new(slice.clone(), x, p, MomentumTag::Matched);
        ExtendedState {
            point,
            post: ConstraintSet::empty(slice),
            extensions: Vec::new(),
        }
    }
}

fn momentum_zero_constraint<S: Scalar>(slice: &Slice, label: &str) -> AffineConstraint<S> {
    let q = slice.dim();
    let idx = slice.index_of(label).expect("label on slice");
    let mut gp = vec![S::zero(); q];
    gp[idx] = S::one();
    AffineConstraint {
        slice: slice.clone(),
        gx: vec![S::zero(); q],
        gp,
        c0: S::zero(),
        tag: ConstraintTag::Both,
        provenance: Provenance::Extension,
    }
}

/// Adds formal canonical pairs (x = gauge 0, p = 0) with their p = 0
/// constraints for every listed label.
pub fn extend_phase_space<S: Scalar>(
    state: &ExtendedState<S>,
    new_labels: &[String],
    old_labels: &[String],
) -> Result<ExtendedState<S>, MoveError> {
    let mut vars = state.point.slice.vars.clone();
    let mut x = state.point.x.clone();
    let mut p = state.point.p.clone();
    let mut extensions = state.extensions.clone();
    for label in new_labels.iter().chain(old_labels) {
        if vars.contains(label) {
            return Err(MoveError::LabelCollision(label.clone()));
        }
        vars.push(label.clone());
        x.push(S::zero());
        p.push(S::zero());
        extensions.push(label.clone());
    }
    let slice = Slice {
        step_label: state.point.slice.step_label.clone(),
        vars,
    };
    let mut post = ConstraintSet::empty(slice.clone());
    for c in &state.post.constraints {
        post.insert_reduced(pad_constraint(c, &slice));
    }
    for label in new_labels.iter().chain(old_labels) {
        post.insert_reduced(momentum_zero_constraint(&slice, label));
    }
    Ok(ExtendedState {
        point: PhasePoint::new(slice, x, p, state.point.tag),
        post,
        extensions,
    })
}

/// Drops formal pairs again; only legal while x carries the gauge value and
/// p = 0 and no active constraint couples to the pair.
pub fn reduce_phase_space<S: Scalar>(
    state: &ExtendedState<S>,
    labels: &[String],
) -> Result<ExtendedState<S>, MoveError> {
    let positions: Vec<usize> = labels
        .iter()
        .map(|l| {
            state
                .point
                .slice
                .index_of(l)
                .ok_or_else(|| MoveError::MissingLabel(l.clone()))
        })
        .collect::<Result<_, _>>()?;
    let keep: Vec<usize> = (0..state.point.slice.dim())
        .filter(|i| !positions.contains(i))
        .collect();
    let slice = Slice {
        step_label: state.point.slice.step_label.clone(),
        vars: keep.iter().map(|&i| state.point.slice.vars[i].clone()).collect(),
    };
    let x = keep.iter().map(|&i| state.point.x[i].clone()).collect();
    let p = keep.iter().map(|&i| state.point.p[i].clone()).collect();
    let post = state.post.eliminate_positions(&positions, slice.clone());
    let extensions = state
        .extensions
        .iter()
        .filter(|l| !labels.contains(l))
        .cloned()
        .collect();
    Ok(ExtendedState {
        point: PhasePoint::new(slice, x, p, state.point.tag),
        post,
        extensions,
    })
}

fn pad_constraint<S: Scalar>(c: &AffineConstraint<S>, slice: &Slice) -> AffineConstraint<S> {
    let q = slice.dim();
    let mut gx = vec![S::zero(); q];
    let mut gp = vec![S::zero(); q];
    for (i, label) in c.slice.vars.iter().enumerate() {
        let j = slice.index_of(label).expect("padded slice covers source");
        gx[j] = c.gx[i].clone();
        gp[j] = c.gp[i].clone();
    }
    AffineConstraint {
        slice: slice.clone(),
        gx,
        gp,
        c0: c.c0.clone(),
        tag: c.tag,
        provenance: c.provenance,
    }
}

/// Free data for a move: values for a priori free new variables (type I) and
/// λ coefficients for the free directions left by the o-equations (type III).
#[derive(Debug, Clone)]
pub struct UpdateParams<S> {
    pub n_values: BTreeMap<String, S>,
    pub lambdas: Vec<S>,
    pub strict: bool,
}

impl<S> Default for UpdateParams<S> {
    fn default() -> Self {
        UpdateParams {
            n_values: BTreeMap::new(),
            lambdas: Vec::new(),
            strict: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MoveOutcome<S> {
    pub state: ExtendedState<S>,
    /// Pre-constraints the move imposes on the incoming data (types II/III).
    pub emitted_pre: ConstraintSet<S>,
    /// Post-constraints newly valid after the move.
    pub emitted_post: ConstraintSet<S>,
}

/// The joint quadratic form of the move action over its touched labels,
/// with the x_k = x_{k+1} identification built in.
fn joint_form<S: Scalar>(mv: &MoveSpec<S>) -> (Vec<String>, Mat<S>, Vec<S>) {
    let (vars, g, lin, _s0) = mv.action.as_joint_form();
    (vars, g, lin)
}

/// Applies the type-specific momentum update. Configuration variables keep
/// their values (new ones enter with the supplied or solved value), momenta
/// shift by the action gradient, removed variables stay as extension pairs
/// with p = 0.
pub fn momentum_update<S: Scalar>(
    mv: &MoveSpec<S>,
    state: &ExtendedState<S>,
    params: &UpdateParams<S>,
) -> Result<ExtendedState<S>, EvolveError> {
    momentum_update_full(mv, state, params).map(|o| o.state)
}

pub fn momentum_update_full<S: Scalar>(
    mv: &MoveSpec<S>,
    state: &ExtendedState<S>,
    params: &UpdateParams<S>,
) -> Result<MoveOutcome<S>, EvolveError> {
    let (labels, g, lin) = joint_form(mv);
    let new = mv.new_labels();
    let old = mv.old_labels();
    for l in labels.iter().filter(|l| !new.contains(l)) {
        if state.point.slice.index_of(l).is_none() {
            return Err(EvolveError::Action(crate::action::ActionError::SliceMismatch(
                format!("move touches {l:?} which is not on the slice"),
            )));
        }
    }

    // Indices of touched labels, split by role.
    let n_idx: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| new.contains(l))
        .map(|(i, _)| i)
        .collect();
    let o_idx: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| old.contains(l))
        .map(|(i, _)| i)
        .collect();
    let known_idx: Vec<usize> = (0..labels.len()).filter(|i| !n_idx.contains(i)).collect();

    // Known configuration values from the slice.
    let mut z = vec![S::zero(); labels.len()];
    for &i in &known_idx {
        let j = state.point.slice.index_of(&labels[i]).unwrap();
        z[i] = state.point.x[j].clone();
    }

    // Solve for the new values where the o-equations pin them down
    // (type III); a priori free values come from the caller.
    if !n_idx.is_empty() {
        if o_idx.is_empty() {
            for &i in &n_idx {
                match params.n_values.get(&labels[i]) {
                    Some(v) => z[i] = v.clone(),
                    None if params.strict => {
                        return Err(EvolveError::MissingParameter {
                            expected: n_idx.len(),
                            got: params.n_values.len(),
                        })
                    }
                    None => z[i] = S::zero(),
                }
            }
        } else {
            // o-rows of p + Gz + lin = 0 with the n-entries of z unknown:
            // M x_n = −p_o − (G_known z_known + lin)_o.
            let m = Mat::from_fn(o_idx.len(), n_idx.len(), |r, c| {
                g[(o_idx[r], n_idx[c])].clone()
            });
            let rhs: Vec<S> = o_idx
                .iter()
                .map(|&oi| {
                    let slice_j = state.point.slice.index_of(&labels[oi]).unwrap();
                    let mut acc = state.point.p[slice_j].clone() + lin[oi].clone();
                    for &ki in &known_idx {
                        acc = acc + g[(oi, ki)].clone() * z[ki].clone();
                    }
                    -acc
                })
                .collect();
            let sol = affine_solve(&m, &rhs).map_err(|inf| {
                EvolveError::OffConstraintSurface(vec![format!(
                    "old-variable equations unsolvable; certificate {:?}",
                    inf.certificate
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                )])
            })?;
            if params.strict && params.lambdas.len() != sol.null_basis.len() {
                return Err(EvolveError::MissingParameter {
                    expected: sol.null_basis.len(),
                    got: params.lambdas.len(),
                });
            }
            let mut xn = sol.particular;
            for (lam, dir) in params.lambdas.iter().zip(&sol.null_basis) {
                xn = vec_add(&xn, &vec_scale(dir, lam));
            }
            for (k, &i) in n_idx.iter().enumerate() {
                z[i] = xn[k].clone();
            }
        }
    }

    // Pre-constraint check for pure removals (type II): the o-momenta must
    // already match −∂S/∂x_o.
    if !o_idx.is_empty() && n_idx.is_empty() {
        let mut residuals = Vec::new();
        let full_grad = vec_add(&g.mul_vec(&z), &lin);
        for &oi in &o_idx {
            let slice_j = state.point.slice.index_of(&labels[oi]).unwrap();
            let grad = full_grad[oi].clone();
            let r = state.point.p[slice_j].clone() + grad;
            if !r.is_negligible_scaled(1.0f64.max(g.scale_estimate())) {
                residuals.push(r.to_string());
            }
        }
        if !residuals.is_empty() {
            return Err(EvolveError::OffConstraintSurface(residuals));
        }
    }

    // Extend the slice by the new labels (momentum enters as 0).
    let mut extended = state.clone();
    if !new.is_empty() {
        extended = extend_phase_space(&extended, &new, &[])
            .map_err(|e| EvolveError::OffConstraintSurface(vec![e.to_string()]))?;
        for (k, label) in new.iter().enumerate() {
            let j = extended.point.slice.index_of(label).unwrap();
            extended.point.x[j] = z[n_idx[k]].clone();
        }
    }

    // Universal extended update: p += ∂S/∂x on every touched label.
    let grad = vec_add(&g.mul_vec(&z), &lin);
    let slice = extended.point.slice.clone();
    let mut p_next = extended.point.p.clone();
    for (i, label) in labels.iter().enumerate() {
        let j = slice.index_of(label).unwrap();
        p_next[j] = p_next[j].clone() + grad[i].clone();
    }

    // Transport the active post set through the update map, then add the
    // move's own constraints.
    let mut post = transport_set(&extended.post, &labels, &g, &lin, &slice);
    let emitted_pre = emitted_pre_constraints(mv, &labels, &g, &lin, &state.point.slice);
    let emitted_post = emitted_post_constraints(mv, &labels, &g, &lin, &slice);
    for c in &emitted_post.constraints {
        post.insert_reduced(c.clone());
    }
    let mut extensions = extended.extensions.clone();
    for l in &old {
        if !extensions.contains(l) {
            extensions.push(l.clone());
        }
    }

    let point = PhasePoint::new(slice, extended.point.x.clone(), p_next, MomentumTag::Matched);
    Ok(MoveOutcome {
        state: ExtendedState {
            point,
            post,
            extensions,
        },
        emitted_pre,
        emitted_post,
    })
}

fn emitted_pre_constraints<S: Scalar>(
    mv: &MoveSpec<S>,
    labels: &[String],
    g: &Mat<S>,
    lin: &[S],
    slice_k: &Slice,
) -> ConstraintSet<S> {
    let mut set = ConstraintSet::empty(slice_k.clone());
    let old = mv.old_labels();
    let new = mv.new_labels();
    if old.is_empty() {
        return set;
    }
    let o_idx: Vec<usize> = labels.iter().enumerate().filter(|(_, l)| old.contains(l)).map(|(i, _)| i).collect();
    let n_idx: Vec<usize> = labels.iter().enumerate().filter(|(_, l)| new.contains(l)).map(|(i, _)| i).collect();
    // Contract the o-equations p_o + (Gz)_o + lin_o = 0 with the left-null
    // vectors of the o-n coupling so the unknown new values drop out. With
    // no new variables every o-equation survives.
    let m = Mat::from_fn(o_idx.len(), n_idx.len(), |r, c| g[(o_idx[r], n_idx[c])].clone());
    let contractions: Vec<Vec<S>> = if n_idx.is_empty() {
        (0..o_idx.len())
            .map(|r| {
                let mut e = vec![S::zero(); o_idx.len()];
                e[r] = S::one();
                e
            })
            .collect()
    } else {
        let (_, _, left) = rank_nullspace(&m);
        left
    };
    let q = slice_k.dim();
    for w in contractions {
        let mut gx = vec![S::zero(); q];
        let mut gp = vec![S::zero(); q];
        let mut c0 = S::zero();
        for (r, &oi) in o_idx.iter().enumerate() {
            let j = slice_k.index_of(&labels[oi]).expect("o label on slice");
            gp[j] = gp[j].clone() + w[r].clone();
            c0 = c0 + w[r].clone() * lin[oi].clone();
            for (i, label) in labels.iter().enumerate() {
                if n_idx.contains(&i) {
                    continue;
                }
                let sj = slice_k.index_of(label).expect("touched label on slice");
                gx[sj] = gx[sj].clone() + w[r].clone() * g[(oi, i)].clone();
            }
        }
        set.insert_reduced(AffineConstraint {
            slice: slice_k.clone(),
            gx,
            gp,
            c0,
            tag: ConstraintTag::Pre,
            provenance: Provenance::Primary,
        });
    }
    set
}

fn emitted_post_constraints<S: Scalar>(
    mv: &MoveSpec<S>,
    labels: &[String],
    g: &Mat<S>,
    lin: &[S],
    slice_k1: &Slice,
) -> ConstraintSet<S> {
    let mut set = ConstraintSet::empty(slice_k1.clone());
    let old = mv.old_labels();
    let new = mv.new_labels();
    let o_idx: Vec<usize> = labels.iter().enumerate().filter(|(_, l)| old.contains(l)).map(|(i, _)| i).collect();
    let n_idx: Vec<usize> = labels.iter().enumerate().filter(|(_, l)| new.contains(l)).map(|(i, _)| i).collect();
    let q = slice_k1.dim();
    // Removed variables leave p = 0 behind.
    for l in &old {
        set.insert_reduced(momentum_zero_constraint(slice_k1, l));
    }
    if n_idx.is_empty() {
        return set;
    }
    // n-equations p_n − (Gz)_n − lin_n = 0, contracted against the right-null
    // of the o-n coupling so the (gauge) old values drop out. With no old
    // variables every n-equation survives.
    let m = Mat::from_fn(o_idx.len(), n_idx.len(), |r, c| g[(o_idx[r], n_idx[c])].clone());
    let contractions: Vec<Vec<S>> = if o_idx.is_empty() {
        (0..n_idx.len())
            .map(|r| {
                let mut e = vec![S::zero(); n_idx.len()];
                e[r] = S::one();
                e
            })
            .collect()
    } else {
        let (_, right, _) = rank_nullspace(&m);
        right
    };
    for w in contractions {
        let mut gx = vec![S::zero(); q];
        let mut gp = vec![S::zero(); q];
        let mut c0 = S::zero();
        for (r, &ni) in n_idx.iter().enumerate() {
            let j = slice_k1.index_of(&labels[ni]).expect("n label on slice");
            gp[j] = gp[j].clone() + w[r].clone();
            c0 = c0 - w[r].clone() * lin[ni].clone();
            for (i, label) in labels.iter().enumerate() {
                if o_idx.contains(&i) {
                    continue;
                }
                let sj = slice_k1.index_of(label).expect("touched label on slice");
                gx[sj] = gx[sj].clone() - w[r].clone() * g[(ni, i)].clone();
            }
        }
        set.insert_reduced(AffineConstraint {
            slice: slice_k1.clone(),
            gx,
            gp,
            c0,
            tag: ConstraintTag::Post,
            provenance: Provenance::Primary,
        });
    }
    set
}

fn transport_set<S: Scalar>(
    post: &ConstraintSet<S>,
    labels: &[String],
    g: &Mat<S>,
    lin: &[S],
    target: &Slice,
) -> ConstraintSet<S> {
    let mut out = ConstraintSet::empty(target.clone());
    for c in &post.constraints {
        let padded = pad_constraint(c, target);
        // Substitute p_k = p_{k+1} − ∂S/∂x (x unchanged).
        let gp_act: Vec<S> = labels
            .iter()
            .map(|l| {
                target
                    .index_of(l)
                    .map(|j| padded.gp[j].clone())
                    .unwrap_or_else(S::zero)
            })
            .collect();
        let delta = g.mul_vec(&gp_act);
        let mut gx = padded.gx.clone();
        for (i, l) in labels.iter().enumerate() {
            if let Some(j) = target.index_of(l) {
                gx[j] = gx[j].clone() - delta[i].clone();
            }
        }
        let c0 = padded.c0.clone() - dot(&gp_act, lin);
        out.insert_reduced(AffineConstraint {
            slice: target.clone(),
            gx,
            gp: padded.gp,
            c0,
            tag: ConstraintTag::Post,
            provenance: padded.provenance,
        });
    }
    out
}

/// Exact affine substitution of the update map into a post-constraint set.
pub fn transport_constraints<S: Scalar>(
    mv: &MoveSpec<S>,
    post_set: &ConstraintSet<S>,
    target: &Slice,
) -> ConstraintSet<S> {
    let (labels, g, lin) = joint_form(mv);
    transport_set(post_set, &labels, &g, &lin, target)
}

/// Appendix-style extended canonical transformation: x_{k+1} = x_k and
/// p_{k+1} = p_k + ∂S/∂x for every variable, defined on the full extended
/// phase space (all touched labels must already sit on the slice).
pub fn extended_canonical_update<S: Scalar>(
    mv: &MoveSpec<S>,
    state: &ExtendedState<S>,
) -> Result<ExtendedState<S>, MoveError> {
    let (labels, g, lin) = joint_form(mv);
    let slice = state.point.slice.clone();
    let mut z = vec![S::zero(); labels.len()];
    for (i, l) in labels.iter().enumerate() {
        let j = slice
            .index_of(l)
            .ok_or_else(|| MoveError::MissingLabel(l.clone()))?;
        z[i] = state.point.x[j].clone();
    }
    let grad = vec_add(&g.mul_vec(&z), &lin);
    let mut p = state.point.p.clone();
    for (i, l) in labels.iter().enumerate() {
        let j = slice.index_of(l).unwrap();
        p[j] = p[j].clone() + grad[i].clone();
    }
    let post = transport_set(&state.post, &labels, &g, &lin, &slice);
    Ok(ExtendedState {
        point: PhasePoint::new(slice, state.point.x.clone(), p, MomentumTag::Matched),
        post,
        extensions: state.extensions.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::build_action;
    use crate::linalg::symplectic_pairing;
    use crate::scalar::Rat;

    fn ri(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn slice(label: &str, vars: &[&str]) -> Slice {
        Slice::new(label, vars.iter().map(|v| v.to_string()).collect()).unwrap()
    }

    #[test]
    fn extend_and_reduce_round_trip() {
        let s0 = ExtendedState::<Rat>::fresh(slice("k", &["a", "b"]), vec![ri(1), ri(2)], vec![ri(3), ri(4)]);
        let ext = extend_phase_space(&s0, &["c".into()], &[]).unwrap();
        assert_eq!(ext.point.slice.dim(), 3);
        assert_eq!(ext.post.len(), 1);
        let back = reduce_phase_space(&ext, &["c".into()]).unwrap();
        assert_eq!(back.point.slice.vars, s0.point.slice.vars);
        assert_eq!(back.point.x, s0.point.x);
        assert_eq!(back.point.p, s0.point.p);
        assert_eq!(back.post.len(), 0);
    }

    #[test]
    fn extend_zero_labels_is_identity() {
        let s0 = ExtendedState::<Rat>::fresh(slice("k", &["a"]), vec![ri(1)], vec![ri(0)]);
        let ext = extend_phase_space(&s0, &[], &[]).unwrap();
        assert_eq!(ext.point.slice.vars, s0.point.slice.vars);
        assert!(ext.post.is_empty());
    }

    #[test]
    fn extend_rejects_collisions() {
        let s0 = ExtendedState::<Rat>::fresh(slice("k", &["a"]), vec![ri(1)], vec![ri(0)]);
        assert!(matches!(
            extend_phase_space(&s0, &["a".into()], &[]),
            Err(MoveError::LabelCollision(_))
        ));
    }

    /// Type IV move with zero action: every map is the identity.
    #[test]
    fn type_iv_zero_action_is_identity() {
        let action: QuadraticAction<Rat> =
            QuadraticAction::zero(slice("k", &[]), slice("k+1", &["a", "b"]));
        let roles = RoleMap::new(vec![("a".into(), Role::E), ("b".into(), Role::E)]).unwrap();
        let mv = MoveSpec::new(MoveKind::IV, roles, action).unwrap();
        let s0 = ExtendedState::fresh(slice("k", &["a", "b"]), vec![ri(1), ri(2)], vec![ri(3), ri(4)]);
        let out = momentum_update(&mv, &s0, &UpdateParams::default()).unwrap();
        assert_eq!(out.point.x, s0.point.x);
        assert_eq!(out.point.p, s0.point.p);
        let ext = extended_canonical_update(&mv, &s0).unwrap();
        assert_eq!(ext.point.p, s0.point.p);
    }

    /// Type I: new variable enters with p_n = ∂S/∂x_n and emits its
    /// post-constraint; spectator momenta unchanged.
    #[test]
    fn type_i_emits_new_momentum_constraint() {
        // S = ½(v − e)² over e (updated) and v (new).
        let action = build_action(
            slice("k", &[]),
            slice("k+1", &["e", "v"]),
            Mat::zeros(0, 0),
            Mat::zeros(0, 2),
            Mat::from_rows(vec![vec![ri(1), ri(-1)], vec![ri(-1), ri(1)]]),
            vec![],
            vec![ri(0); 2],
            ri(0),
        )
        .unwrap();
        let roles = RoleMap::new(vec![("e".into(), Role::E), ("v".into(), Role::N)]).unwrap();
        let mv = MoveSpec::new(MoveKind::I, roles, action).unwrap();
        let s0 = ExtendedState::fresh(slice("k", &["e", "b"]), vec![ri(2), ri(9)], vec![ri(5), ri(7)]);
        let mut params = UpdateParams::default();
        params.n_values.insert("v".into(), ri(3));
        let out = momentum_update_full(&mv, &s0, &params).unwrap();
        let st = &out.state;
        let j_v = st.point.slice.index_of("v").unwrap();
        let j_e = st.point.slice.index_of("e").unwrap();
        let j_b = st.point.slice.index_of("b").unwrap();
        assert_eq!(st.point.x[j_v], ri(3));
        // p_v = ∂S/∂v = v − e = 1; p_e = 5 + (e − v) = 4; spectator b fixed.
        assert_eq!(st.point.p[j_v], ri(1));
        assert_eq!(st.point.p[j_e], ri(4));
        assert_eq!(st.point.p[j_b], ri(7));
        assert_eq!(out.emitted_post.len(), 1);
        assert!(out
            .emitted_post
            .satisfied_at(&st.point.x, &st.point.p));
        assert!(out.emitted_pre.is_empty());
    }

    /// Type II: removal checks the pre-constraint and leaves p = 0 behind.
    #[test]
    fn type_ii_checks_pre_constraint_and_zeroes_momentum() {
        // S = ½(o − e)² on the k side.
        let action = build_action(
            slice("k", &["o", "e"]),
            slice("k+1", &[]),
            Mat::from_rows(vec![vec![ri(1), ri(-1)], vec![ri(-1), ri(1)]]),
            Mat::zeros(2, 0),
            Mat::zeros(0, 0),
            vec![ri(0); 2],
            vec![],
            ri(0),
        )
        .unwrap();
        let roles = RoleMap::new(vec![("o".into(), Role::O), ("e".into(), Role::E)]).unwrap();
        let mv = MoveSpec::new(MoveKind::II, roles, action).unwrap();
        // On surface: p_o = −∂S/∂o = −(o − e) = −(4 − 1) = −3.
        let s0 = ExtendedState::fresh(slice("k", &["o", "e"]), vec![ri(4), ri(1)], vec![ri(-3), ri(2)]);
        let out = momentum_update_full(&mv, &s0, &UpdateParams::default()).unwrap();
        let st = &out.state;
        let j_o = st.point.slice.index_of("o").unwrap();
        let j_e = st.point.slice.index_of("e").unwrap();
        assert!(st.point.p[j_o].is_negligible());
        // p_e = 2 + ∂S/∂e = 2 + (e − o) = −1.
        assert_eq!(st.point.p[j_e], ri(-1));
        assert_eq!(out.emitted_pre.len(), 1);
        assert!(st.extensions.contains(&"o".to_string()));
        // Off surface: wrong p_o.
        let bad = ExtendedState::fresh(slice("k", &["o", "e"]), vec![ri(4), ri(1)], vec![ri(0), ri(2)]);
        assert!(matches!(
            momentum_update_full(&mv, &bad, &UpdateParams::default()),
            Err(EvolveError::OffConstraintSurface(_))
        ));
    }

    /// Type III with decoupled old/new pair (rank 0 coupling): one pre- and
    /// one post-constraint.
    fn square_like_move() -> MoveSpec<Rat> {
        // S = o² + n² + e² − o·e − n·e (o and n never couple directly).
        let action = build_action(
            slice("k", &["o"]),
            slice("k+1", &["e", "n"]),
            Mat::from_rows(vec![vec![ri(2)]]),
            Mat::from_rows(vec![vec![ri(-1), ri(0)]]),
            Mat::from_rows(vec![vec![ri(2), ri(-1)], vec![ri(-1), ri(2)]]),
            vec![ri(0)],
            vec![ri(0); 2],
            ri(0),
        )
        .unwrap();
        let roles = RoleMap::new(vec![
            ("o".into(), Role::O),
            ("e".into(), Role::E),
            ("n".into(), Role::N),
        ])
        .unwrap();
        MoveSpec::new(MoveKind::III, roles, action).unwrap()
    }

    #[test]
    fn type_iii_rank_rule_emits_kappa_pairs() {
        let mv = square_like_move();
        // Pre-constraint: p_o + 2o − e = 0; pick data satisfying it.
        let s0 = ExtendedState::fresh(slice("k", &["o", "e"]), vec![ri(1), ri(2)], vec![ri(0), ri(0)]);
        let params = UpdateParams {
            lambdas: vec![ri(5)], // the new value is a priori free here
            ..UpdateParams::default()
        };
        let out = momentum_update_full(&mv, &s0, &params).unwrap();
        assert_eq!(out.emitted_pre.len(), 1);
        assert_eq!(out.emitted_pre.constraints[0].gp, vec![ri(1), ri(0)]);
        // Post set: p_o = 0 plus the contracted n-equation.
        assert_eq!(out.emitted_post.len(), 2);
        assert!(out.emitted_post.satisfied_at(&out.state.point.x, &out.state.point.p));
        let j_n = out.state.point.slice.index_of("n").unwrap();
        assert_eq!(out.state.point.x[j_n], ri(5));
    }

    #[test]
    fn transport_keeps_untouched_constraints() {
        let mv = square_like_move();
        let sl = slice("k", &["o", "e", "spec"]);
        let mut set = ConstraintSet::empty(sl.clone());
        let mut gp = vec![ri(0); 3];
        gp[2] = ri(1);
        set.constraints.push(AffineConstraint {
            slice: sl.clone(),
            gx: vec![ri(0); 3],
            gp,
            c0: ri(-4),
            tag: ConstraintTag::Post,
            provenance: Provenance::Primary,
        });
        let out = transport_constraints(&mv, &set, &sl);
        assert_eq!(out.len(), 1);
        assert_eq!(out.constraints[0].gp, set.constraints[0].gp);
        assert_eq!(out.constraints[0].gx, set.constraints[0].gx);
        assert_eq!(out.constraints[0].c0, ri(-4));
    }

    #[test]
    fn extended_update_preserves_full_pairing() {
        let mv = square_like_move();
        let sl = slice("k", &["o", "e", "n"]);
        let s0 = ExtendedState::fresh(
            sl.clone(),
            vec![ri(1), ri(2), ri(3)],
            vec![ri(4), ri(5), ri(6)],
        );
        // Tangent pairs map as (δx, δp) → (δx, δp + H δx) with H the full
        // second-derivative matrix; check the pairing numerically through
        // the map applied to shifted points.
        let du = (vec![ri(1), ri(0), ri(2)], vec![ri(0), ri(1), ri(1)]);
        let dv = (vec![ri(0), ri(3), ri(1)], vec![ri(2), ri(0), ri(1)]);
        let before = symplectic_pairing((&du.0[..], &du.1[..]), (&dv.0[..], &dv.1[..])).unwrap();
        let push = |d: &(Vec<Rat>, Vec<Rat>)| {
            let shifted = ExtendedState::fresh(
                sl.clone(),
                crate::linalg::vec_add(&s0.point.x, &d.0),
                crate::linalg::vec_add(&s0.point.p, &d.1),
            );
            let base = extended_canonical_update(&mv, &s0).unwrap();
            let moved = extended_canonical_update(&mv, &shifted).unwrap();
            (
                crate::linalg::vec_sub(&moved.point.x, &base.point.x),
                crate::linalg::vec_sub(&moved.point.p, &base.point.p),
            )
        };
        let pu = push(&du);
        let pv = push(&dv);
        let after = symplectic_pairing((&pu.0[..], &pu.1[..]), (&pv.0[..], &pv.1[..])).unwrap();
        assert_eq!(before, after);
    }
}
