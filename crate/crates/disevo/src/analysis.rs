//! Dirac-style analysis of affine constraint systems: Poisson brackets,
//! first/second-class splitting, gauge modes, observable bases and
//! degree-of-freedom counting across a schedule. Brackets of affine
//! functions are constants, so "weakly zero" means exactly zero here.

use thiserror::Error;

use crate::action::{hessian_at, QuadraticAction, Slice};
use crate::evolution::{fold_effective, EvolveError, Schedule};
use crate::legendre::{lagrangian_two_form, AffineConstraint, ConstraintSet, ConstraintTag};
use crate::linalg::{dot, normalize_leading, rank_nullspace, vec_add, vec_is_zero, vec_scale, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("slice mismatch: {0}")]
    SliceMismatch(String),
    #[error("gauge-mode verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Evolve(#[from] EvolveError),
}

/// An affine phase-space function gx·x + gp·p + c0 whose bracket with every
/// constraint of its defining set vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineObservable<S> {
    pub slice: Slice,
    pub gx: Vec<S>,
    pub gp: Vec<S>,
    pub c0: S,
    pub tag: ConstraintTag,
}

impl<S: Scalar> AffineObservable<S> {
    pub fn evaluate(&self, x: &[S], p: &[S]) -> S {
        dot(&self.gx, x) + dot(&self.gp, p) + self.c0.clone()
    }
}

fn bracket_raw<S: Scalar>(gx_f: &[S], gp_f: &[S], gx_g: &[S], gp_g: &[S]) -> S {
    dot(gx_f, gp_g) - dot(gp_f, gx_g)
}

/// {f, g} = ∂f/∂x·∂g/∂p − ∂f/∂p·∂g/∂x; constant for affine arguments.
pub fn poisson_bracket<S: Scalar>(
    f: &AffineConstraint<S>,
    g: &AffineConstraint<S>,
) -> Result<S, AnalysisError> {
    if !f.slice.same_vars(&g.slice) {
        return Err(AnalysisError::SliceMismatch(format!(
            "{:?} vs {:?}",
            f.slice.vars, g.slice.vars
        )));
    }
    Ok(bracket_raw(&f.gx, &f.gp, &g.gx, &g.gp))
}

pub fn observable_bracket<S: Scalar>(
    f: &AffineObservable<S>,
    g: &AffineConstraint<S>,
) -> Result<S, AnalysisError> {
    if !f.slice.same_vars(&g.slice) {
        return Err(AnalysisError::SliceMismatch(format!(
            "{:?} vs {:?}",
            f.slice.vars, g.slice.vars
        )));
    }
    Ok(bracket_raw(&f.gx, &f.gp, &g.gx, &g.gp))
}

#[derive(Debug, Clone)]
pub struct ClassificationReport<S> {
    /// Basis of first-class constraint combinations (Dirac-matrix kernel).
    pub first_class: Vec<AffineConstraint<S>>,
    /// Canonically conjugate second-class pairs.
    pub second_class: Vec<(AffineConstraint<S>, AffineConstraint<S>)>,
    /// First-class combinations lying in both the pre- and the post-span.
    pub gauge_generators: Vec<AffineConstraint<S>>,
    pub dirac_matrix: Mat<S>,
}

impl<S> ClassificationReport<S> {
    pub fn second_class_count(&self) -> usize {
        2 * self.second_class.len()
    }
}

fn combine<S: Scalar>(
    set: &[AffineConstraint<S>],
    weights: &[S],
    tag: ConstraintTag,
) -> AffineConstraint<S> {
    let slice = set[0].slice.clone();
    let q = slice.dim();
    let mut gx = vec![S::zero(); q];
    let mut gp = vec![S::zero(); q];
    let mut c0 = S::zero();
    for (w, c) in weights.iter().zip(set) {
        gx = vec_add(&gx, &vec_scale(&c.gx, w));
        gp = vec_add(&gp, &vec_scale(&c.gp, w));
        c0 = c0 + w.clone() * c.c0.clone();
    }
    AffineConstraint {
        slice,
        gx,
        gp,
        c0,
        tag,
        provenance: set[0].provenance,
    }
}

fn span_rows<S: Scalar>(set: &ConstraintSet<S>, want_pre: bool) -> Vec<Vec<S>> {
    set.constraints
        .iter()
        .filter(|c| match c.tag {
            ConstraintTag::Both => true,
            ConstraintTag::Pre => want_pre,
            ConstraintTag::Post => !want_pre,
        })
        .map(|c| c.row())
        .collect()
}

fn in_span<S: Scalar>(rows: &[Vec<S>], cand: &[S]) -> bool {
    if rows.is_empty() {
        return vec_is_zero(cand, 1.0);
    }
    let base = Mat::from_rows(rows.to_vec());
    let (r0, _, _) = rank_nullspace(&base);
    let mut all = rows.to_vec();
    all.push(cand.to_vec());
    let (r1, _, _) = rank_nullspace(&Mat::from_rows(all));
    r0 == r1
}

/// Splits an irreducible constraint set into first- and second-class parts.
/// The split is done on combinations: the kernel of the Dirac matrix gives
/// the first-class basis, the rest pairs up symplectically. First-class
/// combinations lying in both the pre-span and the post-span generate gauge
/// transformations.
pub fn classify<S: Scalar>(set: &ConstraintSet<S>) -> ClassificationReport<S> {
    let cs = &set.constraints;
    let m = cs.len();
    let dirac = Mat::from_fn(m, m, |i, j| bracket_raw(&cs[i].gx, &cs[i].gp, &cs[j].gx, &cs[j].gp));
    let (rank, _, _) = rank_nullspace(&dirac);

    // Symplectic Gram-Schmidt: peel off conjugate pairs; whatever survives
    // commutes with everything and is the first-class basis.
    let mut work: Vec<AffineConstraint<S>> = cs.clone();
    let mut second_class = Vec::new();
    loop {
        let mut pair = None;
        'outer: for i in 0..work.len() {
            for j in i + 1..work.len() {
                let b = bracket_raw(&work[i].gx, &work[i].gp, &work[j].gx, &work[j].gp);
                if !b.is_negligible() {
                    pair = Some((i, j, b));
                    break 'outer;
                }
            }
        }
        let Some((i, j, s)) = pair else { break };
        let v = work.remove(j);
        let u = work.remove(i);
        for w in work.iter_mut() {
            let a = bracket_raw(&w.gx, &w.gp, &v.gx, &v.gp) / s.clone();
            let b = bracket_raw(&w.gx, &w.gp, &u.gx, &u.gp) / s.clone();
            let tag = w.tag;
            *w = combine(
                &[w.clone(), u.clone(), v.clone()],
                &[S::one(), -a, b],
                tag,
            );
        }
        second_class.push((u, v));
    }
    debug_assert_eq!(2 * second_class.len(), rank);
    debug_assert_eq!(work.len(), m - rank);

    let pre_rows = span_rows(set, true);
    let post_rows = span_rows(set, false);
    let mut first_class = Vec::new();
    let mut gauge_generators = Vec::new();
    for c in work {
        let row = c.row();
        let in_pre = in_span(&pre_rows, &row);
        let in_post = in_span(&post_rows, &row);
        let tag = match (in_pre, in_post) {
            (true, true) => ConstraintTag::Both,
            (true, false) => ConstraintTag::Pre,
            (false, true) => ConstraintTag::Post,
            (false, false) => c.tag,
        };
        let c = AffineConstraint { tag, ..c };
        if tag == ConstraintTag::Both {
            gauge_generators.push(c.clone());
        }
        first_class.push(c);
    }
    ClassificationReport {
        first_class,
        second_class,
        gauge_generators,
        dirac_matrix: dirac,
    }
}

/// Returns the p-gradient of each gauge generator and verifies the three
/// null-vector properties: kernel of the middle-slice Hessian, right-null of
/// the incoming two-form, left-null of the outgoing one. A failure here is
/// an internal inconsistency, not bad user data.
pub fn gauge_modes<S: Scalar>(
    s_in: &QuadraticAction<S>,
    s_out: &QuadraticAction<S>,
    report: &ClassificationReport<S>,
) -> Result<Vec<Vec<S>>, AnalysisError> {
    let h = hessian_at(s_in, s_out).map_err(|e| AnalysisError::SliceMismatch(e.to_string()))?;
    let omega_in = lagrangian_two_form(s_in);
    let omega_out = lagrangian_two_form(s_out);
    let scale = h.scale_estimate().max(1.0);
    let mut modes = Vec::new();
    for g in &report.gauge_generators {
        let v = g.gp.clone();
        if !vec_is_zero(&h.mul_vec(&v), scale) {
            return Err(AnalysisError::VerificationFailed(
                "gauge generator momentum gradient is not a Hessian null vector".into(),
            ));
        }
        if !vec_is_zero(&omega_in.mul_vec(&v), omega_in.scale_estimate().max(1.0)) {
            return Err(AnalysisError::VerificationFailed(
                "gauge mode is not a right-null vector of the incoming two-form".into(),
            ));
        }
        if !vec_is_zero(
            &omega_out.transpose().mul_vec(&v),
            omega_out.scale_estimate().max(1.0),
        ) {
            return Err(AnalysisError::VerificationFailed(
                "gauge mode is not a left-null vector of the outgoing two-form".into(),
            ));
        }
        modes.push(v);
    }
    Ok(modes)
}

/// N propagating phase-space directions from slice i to slice f:
/// 2Q_i − 2·#pre(i→f) and equally 2Q_f − 2·#post(i→f).
pub fn propagating_count<S: Scalar>(
    schedule: &Schedule<S>,
    i: usize,
    f: usize,
) -> Result<usize, AnalysisError> {
    let (from_front, from_back) = propagating_count_pair(schedule, i, f)?;
    assert_eq!(
        from_front, from_back,
        "pre/post counting mismatch across the effective move"
    );
    Ok(from_front)
}

/// Both counting formulas separately: (2Q_i − 2·#pre, 2Q_f − 2·#post).
pub fn propagating_count_pair<S: Scalar>(
    schedule: &Schedule<S>,
    i: usize,
    f: usize,
) -> Result<(usize, usize), AnalysisError> {
    assert!(i < f && f < schedule.n_slices(), "need i < f within the schedule");
    let eff = fold_effective(&schedule.moves[i..f])?;
    let n_pre = eff.pre_set().len();
    let n_post = eff.post_set().len();
    let from_front = 2 * schedule.slice(i).dim() - 2 * n_pre;
    let from_back = 2 * schedule.slice(f).dim() - 2 * n_post;
    Ok((from_front, from_back))
}

/// Combined pre/post constraint set at an interior slice n of the effective
/// moves i→n and n→f, re-expressed on the schedule's slice.
pub fn combined_constraints_at<S: Scalar>(
    schedule: &Schedule<S>,
    i: usize,
    n: usize,
    f: usize,
) -> Result<ConstraintSet<S>, AnalysisError> {
    assert!(i < n && n < f && f < schedule.n_slices(), "need i < n < f");
    let before = fold_effective(&schedule.moves[i..n])?;
    let after = fold_effective(&schedule.moves[n..f])?;
    let slice = schedule.slice(n).clone();
    let mut combined = ConstraintSet::empty(slice.clone());
    for c in before
        .post_set()
        .constraints
        .iter()
        .chain(after.pre_set().constraints.iter())
    {
        debug_assert!(c.slice.same_vars(&slice));
        combined.insert_reduced(AffineConstraint {
            slice: slice.clone(),
            ..c.clone()
        });
    }
    Ok(combined)
}

/// Dimension of the reduced phase space at slice n within the segment i→f:
/// 2Q_n − 2·#first-class − #second-class.
pub fn reduced_dimension<S: Scalar>(
    schedule: &Schedule<S>,
    i: usize,
    n: usize,
    f: usize,
) -> Result<usize, AnalysisError> {
    let combined = combined_constraints_at(schedule, i, n, f)?;
    let report = classify(&combined);
    Ok(2 * schedule.slice(n).dim() - 2 * report.first_class.len() - report.second_class_count())
}

/// A maximal independent family of affine functions commuting with every
/// constraint, taken modulo constants and modulo the constraints themselves.
/// For a first-class set of size m on Q variables this yields 2Q − 2m
/// observables.
pub fn observable_basis<S: Scalar>(set: &ConstraintSet<S>) -> Vec<AffineObservable<S>> {
    let q = set.slice.dim();
    let m = set.constraints.len();
    let tag = {
        let tags: Vec<ConstraintTag> = set.constraints.iter().map(|c| c.tag).collect();
        if tags.iter().all(|&t| t == ConstraintTag::Pre) && m > 0 {
            ConstraintTag::Pre
        } else if tags.iter().all(|&t| t == ConstraintTag::Post) && m > 0 {
            ConstraintTag::Post
        } else {
            ConstraintTag::Both
        }
    };
    // Commutation is linear in the observable gradient (gx | gp): each
    // constraint contributes the row (gp_i | −gx_i).
    let pairing = Mat::from_fn(m, 2 * q, |i, j| {
        let c = &set.constraints[i];
        if j < q {
            c.gp[j].clone()
        } else {
            -c.gx[j - q].clone()
        }
    });
    let (_, kernel, _) = rank_nullspace(&pairing);
    // Quotient by the constraint span: keep kernel vectors that enlarge the
    // span of the constraint gradient rows.
    let mut rows: Vec<Vec<S>> = set
        .constraints
        .iter()
        .map(|c| {
            let mut r = c.gx.clone();
            r.extend(c.gp.iter().cloned());
            r
        })
        .collect();
    let mut out = Vec::new();
    for mut v in kernel {
        if in_span(&rows, &v) {
            continue;
        }
        normalize_leading(&mut v);
        rows.push(v.clone());
        out.push(AffineObservable {
            slice: set.slice.clone(),
            gx: v[..q].to_vec(),
            gp: v[q..].to_vec(),
            c0: S::zero(),
            tag,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::{post_constraints, pre_constraints, Provenance};
    use crate::models::{cdt_slab_action_on, SlabSpec};
    use crate::scalar::Rat;

    fn ri(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rr(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn slice(label: &str, vars: &[&str]) -> Slice {
        Slice::new(label, vars.iter().map(|v| v.to_string()).collect()).unwrap()
    }

    fn constraint(
        slice: &Slice,
        gx: Vec<Rat>,
        gp: Vec<Rat>,
        tag: ConstraintTag,
    ) -> AffineConstraint<Rat> {
        AffineConstraint {
            slice: slice.clone(),
            gx,
            gp,
            c0: ri(0),
            tag,
            provenance: Provenance::Primary,
        }
    }

    #[test]
    fn canonical_bracket_is_kronecker() {
        let sl = slice("0", &["a", "b"]);
        for i in 0..2 {
            for j in 0..2 {
                let mut gx = vec![ri(0); 2];
                gx[i] = ri(1);
                let mut gp = vec![ri(0); 2];
                gp[j] = ri(1);
                let f = constraint(&sl, gx, vec![ri(0); 2], ConstraintTag::Pre);
                let g = constraint(&sl, vec![ri(0); 2], gp, ConstraintTag::Pre);
                let expect = if i == j { ri(1) } else { ri(0) };
                assert_eq!(poisson_bracket(&f, &g).unwrap(), expect);
            }
        }
    }

    /// Two slab moves 2→3 then 3→2 around a 3-vertex slice: the post- and
    /// pre-constraints there have bracket 10, equal to Lᵀ H R.
    fn example_b_schedule() -> Schedule<Rat> {
        let up = SlabSpec {
            q_prev: 2,
            q_next: 3,
            adjacency: vec![vec![1, 0, 0], vec![2, 1, 1]],
        };
        let down = SlabSpec {
            q_prev: 3,
            q_next: 2,
            adjacency: vec![vec![1, 2], vec![0, 1], vec![0, 1]],
        };
        let s1 = cdt_slab_action_on(
            &up,
            Slice::numbered("0", "a", 2),
            Slice::numbered("1", "m", 3),
        )
        .unwrap();
        let s2 = cdt_slab_action_on(
            &down,
            Slice::numbered("1", "m", 3),
            Slice::numbered("2", "z", 2),
        )
        .unwrap();
        Schedule::new(vec![s1, s2]).unwrap()
    }

    #[test]
    fn middle_slice_bracket_matches_hessian_contraction() {
        let sched = example_b_schedule();
        let post = post_constraints(&sched.moves[0]);
        let pre = pre_constraints(&sched.moves[1]);
        let b = poisson_bracket(&pre.constraints[0], &post.constraints[0]).unwrap();
        assert_eq!(b, ri(10));
        let h = hessian_at(&sched.moves[0], &sched.moves[1]).unwrap();
        assert_eq!(
            h,
            Mat::from_rows(vec![
                vec![ri(8), ri(-1), ri(-1)],
                vec![ri(-1), ri(4), ri(-1)],
                vec![ri(-1), ri(-1), ri(4)],
            ])
        );
        let l = &pre.constraints[0].gp;
        let r = &post.constraints[0].gp;
        assert_eq!(dot(l, &h.mul_vec(r)), ri(10));
    }

    #[test]
    fn second_class_pair_at_the_middle_slice() {
        let sched = example_b_schedule();
        let combined = combined_constraints_at(&sched, 0, 1, 2).unwrap();
        assert_eq!(combined.len(), 2);
        let report = classify(&combined);
        assert!(report.first_class.is_empty());
        assert_eq!(report.second_class.len(), 1);
        assert!(report.gauge_generators.is_empty());
        assert_eq!(reduced_dimension(&sched, 0, 1, 2).unwrap(), 4);
    }

    #[test]
    fn pre_set_is_first_class_among_itself() {
        let sched = example_b_schedule();
        let pre = pre_constraints(&sched.moves[1]);
        let report = classify(&pre);
        assert_eq!(report.first_class.len(), pre.len());
        assert!(report.second_class.is_empty());
    }

    #[test]
    fn extension_pair_is_a_gauge_generator() {
        let sl = slice("1", &["a", "b"]);
        let mut set = ConstraintSet::empty(sl.clone());
        set.insert_reduced(constraint(
            &sl,
            vec![ri(0); 2],
            vec![ri(0), ri(1)],
            ConstraintTag::Both,
        ));
        let report = classify(&set);
        assert_eq!(report.first_class.len(), 1);
        assert_eq!(report.gauge_generators.len(), 1);
        // Actions independent of b on both sides: all three checks pass.
        let s_in = crate::action::build_action(
            slice("0", &["u"]),
            sl.clone(),
            Mat::from_rows(vec![vec![ri(2)]]),
            Mat::from_rows(vec![vec![ri(1), ri(0)]]),
            Mat::from_rows(vec![vec![ri(2), ri(0)], vec![ri(0), ri(0)]]),
            vec![ri(0)],
            vec![ri(0); 2],
            ri(0),
        )
        .unwrap();
        let s_out = crate::action::build_action(
            sl,
            slice("2", &["z"]),
            Mat::from_rows(vec![vec![ri(2), ri(0)], vec![ri(0), ri(0)]]),
            Mat::from_rows(vec![vec![ri(1)], vec![ri(0)]]),
            Mat::from_rows(vec![vec![ri(2)]]),
            vec![ri(0); 2],
            vec![ri(0)],
            ri(0),
        )
        .unwrap();
        let modes = gauge_modes(&s_in, &s_out, &report).unwrap();
        assert_eq!(modes, vec![vec![ri(0), ri(1)]]);
    }

    #[test]
    fn classification_is_basis_invariant() {
        let sched = example_b_schedule();
        let combined = combined_constraints_at(&sched, 0, 1, 2).unwrap();
        // Recombine: C1' = C1 + 2 C2, C2' = C2.
        let c1 = &combined.constraints[0];
        let c2 = &combined.constraints[1];
        let mixed = AffineConstraint {
            gx: crate::linalg::vec_add(&c1.gx, &crate::linalg::vec_scale(&c2.gx, &ri(2))),
            gp: crate::linalg::vec_add(&c1.gp, &crate::linalg::vec_scale(&c2.gp, &ri(2))),
            c0: c1.c0.clone() + ri(2) * c2.c0.clone(),
            ..c1.clone()
        };
        let mut alt = ConstraintSet::empty(combined.slice.clone());
        alt.insert_reduced(mixed);
        alt.insert_reduced(c2.clone());
        let a = classify(&combined);
        let b = classify(&alt);
        assert_eq!(a.first_class.len(), b.first_class.len());
        assert_eq!(a.second_class.len(), b.second_class.len());
        assert_eq!(a.gauge_generators.len(), b.gauge_generators.len());
    }

    #[test]
    fn propagating_count_examples() {
        // Regular 3→3 slab: six directions, no constraints.
        let reg = SlabSpec {
            q_prev: 3,
            q_next: 3,
            adjacency: vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
        };
        let s = cdt_slab_action_on::<Rat>(
            &reg,
            Slice::numbered("0", "a", 3),
            Slice::numbered("1", "m", 3),
        )
        .unwrap();
        let sched = Schedule::new(vec![s]).unwrap();
        assert_eq!(propagating_count(&sched, 0, 1).unwrap(), 6);
        // Example B: two slabs, four directions end to end.
        let sched = example_b_schedule();
        assert_eq!(propagating_count(&sched, 0, 2).unwrap(), 4);
    }

    #[test]
    fn nothing_propagates_out_of_an_empty_slice() {
        let spec = SlabSpec {
            q_prev: 0,
            q_next: 3,
            adjacency: vec![],
        };
        let s = cdt_slab_action_on::<Rat>(
            &spec,
            Slice::new("0", vec![]).unwrap(),
            Slice::numbered("1", "m", 3),
        )
        .unwrap();
        let sched = Schedule::new(vec![s]).unwrap();
        assert_eq!(post_constraints(&sched.moves[0]).len(), 3);
        assert_eq!(propagating_count(&sched, 0, 1).unwrap(), 0);
    }

    #[test]
    fn observable_counts() {
        // No constraints on Q = 2: the four coordinate functions.
        let sl = slice("0", &["a", "b"]);
        let empty: ConstraintSet<Rat> = ConstraintSet::empty(sl);
        assert_eq!(observable_basis(&empty).len(), 4);
        // One pre-constraint on Q = 3: four observables commuting with it.
        let sched = example_b_schedule();
        let pre = pre_constraints(&sched.moves[1]);
        let obs = observable_basis(&pre);
        assert_eq!(obs.len(), 4);
        for o in &obs {
            assert_eq!(
                observable_bracket(o, &pre.constraints[0]).unwrap(),
                ri(0)
            );
        }
        // Totally constrained slice: p_i = 0 for all i leaves nothing.
        let sl = slice("1", &["a", "b"]);
        let mut all_p = ConstraintSet::empty(sl.clone());
        for i in 0..2 {
            let mut gp = vec![ri(0); 2];
            gp[i] = ri(1);
            all_p.insert_reduced(constraint(&sl, vec![ri(0); 2], gp, ConstraintTag::Post));
        }
        assert_eq!(observable_basis(&all_p).len(), 0);
    }

    #[test]
    fn empty_set_classifies_to_an_empty_report() {
        let sl = slice("0", &["a"]);
        let set: ConstraintSet<Rat> = ConstraintSet::empty(sl);
        let report = classify(&set);
        assert!(report.first_class.is_empty());
        assert!(report.second_class.is_empty());
        assert!(report.gauge_generators.is_empty());
        assert_eq!(report.dirac_matrix.nrows(), 0);
    }

    #[test]
    fn bracket_requires_matching_slices() {
        let f = constraint(&slice("0", &["a"]), vec![ri(1)], vec![ri(0)], ConstraintTag::Pre);
        let g = constraint(
            &slice("0", &["a", "b"]),
            vec![ri(0), ri(1)],
            vec![ri(0); 2],
            ConstraintTag::Pre,
        );
        assert!(matches!(
            poisson_bracket(&f, &g),
            Err(AnalysisError::SliceMismatch(_))
        ));
    }

    #[test]
    fn second_class_pair_check_example_b_uses_the_printed_constraints() {
        // Directly the printed pair: ⁻C = π₂−π₃+ (5/2)(φ₂−φ₃) and
        // ⁺C = π₂−π₃− (5/2)(φ₂−φ₃) give bracket 10.
        let sl = slice("1", &["m1", "m2", "m3"]);
        let pre = constraint(
            &sl,
            vec![ri(0), rr(5, 2), rr(-5, 2)],
            vec![ri(0), ri(1), ri(-1)],
            ConstraintTag::Pre,
        );
        let post = constraint(
            &sl,
            vec![ri(0), rr(-5, 2), rr(5, 2)],
            vec![ri(0), ri(1), ri(-1)],
            ConstraintTag::Post,
        );
        assert_eq!(poisson_bracket(&pre, &post).unwrap(), ri(10));
    }
}
