//! Concrete systems: the scalar field on triangulated lattices. Global
//! evolution acts through single-layer slabs described by an adjacency
//! matrix; local evolution acts through Pachner-style moves on a surface.
//! Scenario files bundle either into a runnable description.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{build_action, QuadraticAction, Role, RoleMap, Slice};
use crate::evolution::Schedule;
use crate::linalg::Mat;
use crate::local_moves::{MoveKind, MoveSpec};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("adjacency entries must be 0, 1 or 2")]
    InvalidAdjacency,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("schedule must contain at least one move")]
    EmptySchedule,
}

/// One single-layer slab between a slice with `q_prev` vertices and one with
/// `q_next`; `adjacency[i][j]` counts the edges (0, 1 or 2) between vertex i
/// below and vertex j above. Vertices are labeled cyclically within a slice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlabSpec {
    pub q_prev: usize,
    pub q_next: usize,
    pub adjacency: Vec<Vec<u8>>,
}

impl SlabSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.adjacency.len() != self.q_prev
            || self.adjacency.iter().any(|r| r.len() != self.q_next)
        {
            return Err(ModelError::Dimension(format!(
                "adjacency must be {} x {}",
                self.q_prev, self.q_next
            )));
        }
        if self.adjacency.iter().flatten().any(|&e| e > 2) {
            return Err(ModelError::InvalidAdjacency);
        }
        Ok(())
    }
}

/// The intra-slice boundary block: per vertex, degree-plus-one on the
/// diagonal and −½ couplings to the cyclic neighbors. With a single vertex
/// the neighbor term cancels; with two vertices both neighbors are the one
/// other vertex.
fn slice_block<S: Scalar>(q: usize, degree: &[i64]) -> Mat<S> {
    Mat::from_fn(q, q, |i, j| {
        if i == j {
            S::from_int(degree[i] + if q > 1 { 1 } else { 0 })
        } else if q == 2 {
            S::from_int(-1)
        } else if j == (i + 1) % q || i == (j + 1) % q {
            S::from_ratio(-1, 2)
        } else {
            S::zero()
        }
    })
}

pub fn cdt_slab_action_on<S: Scalar>(
    spec: &SlabSpec,
    prev: Slice,
    next: Slice,
) -> Result<QuadraticAction<S>, ModelError> {
    spec.validate()?;
    if prev.dim() != spec.q_prev || next.dim() != spec.q_next {
        return Err(ModelError::Dimension(format!(
            "slices {} x {} do not match spec {} x {}",
            prev.dim(),
            next.dim(),
            spec.q_prev,
            spec.q_next
        )));
    }
    let row_deg: Vec<i64> = spec
        .adjacency
        .iter()
        .map(|r| r.iter().map(|&e| e as i64).sum())
        .collect();
    let col_deg: Vec<i64> = (0..spec.q_next)
        .map(|j| spec.adjacency.iter().map(|r| r[j] as i64).sum())
        .collect();
    let a_blk = slice_block(spec.q_prev, &row_deg);
    let c_blk = slice_block(spec.q_next, &col_deg);
    let b_blk = Mat::from_fn(spec.q_prev, spec.q_next, |i, j| {
        S::from_int(-(spec.adjacency[i][j] as i64))
    });
    build_action(
        prev,
        next,
        a_blk,
        b_blk,
        c_blk,
        vec![S::zero(); spec.q_prev],
        vec![S::zero(); spec.q_next],
        S::zero(),
    )
    .map_err(|e| ModelError::Dimension(e.to_string()))
}

pub fn cdt_slab_action<S: Scalar>(spec: &SlabSpec) -> Result<QuadraticAction<S>, ModelError> {
    cdt_slab_action_on(
        spec,
        Slice::numbered("n", "u", spec.q_prev),
        Slice::numbered("n+1", "v", spec.q_next),
    )
}

/// Action of one equilateral triangle, ¼ Σ_edges (φ_s − φ_t)², over an
/// arbitrary split of its three vertices between the two slices.
pub fn triangle_action_on<S: Scalar>(
    prev: Slice,
    next: Slice,
) -> Result<QuadraticAction<S>, ModelError> {
    let (qp, qn) = (prev.dim(), next.dim());
    if qp + qn != 3 {
        return Err(ModelError::Dimension(format!(
            "triangle needs 3 vertices, got {}",
            qp + qn
        )));
    }
    let g = |i: usize, j: usize| {
        if i == j {
            S::one()
        } else {
            S::from_ratio(-1, 2)
        }
    };
    build_action(
        prev,
        next,
        Mat::from_fn(qp, qp, &g),
        Mat::from_fn(qp, qn, |i, j| g(i, qp + j)),
        Mat::from_fn(qn, qn, |i, j| g(qp + i, qp + j)),
        vec![S::zero(); qp],
        vec![S::zero(); qn],
        S::zero(),
    )
    .map_err(|e| ModelError::Dimension(e.to_string()))
}

pub fn triangle_action<S: Scalar>() -> QuadraticAction<S> {
    triangle_action_on(
        Slice::new("n", vec!["phi1".into()]).unwrap(),
        Slice::new("n+1", vec!["phi2".into(), "phi3".into()]).unwrap(),
    )
    .expect("static dimensions")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PachnerKind {
    #[serde(rename = "1-2")]
    OneTwo,
    #[serde(rename = "2-1")]
    TwoOne,
    #[serde(rename = "square")]
    Square,
    #[serde(rename = "2-2-3d")]
    TwoTwo3d,
}

fn fresh_label(surface: &Slice, avoid: &[String]) -> String {
    let mut n = 1;
    loop {
        let cand = format!("w{n}");
        if surface.index_of(&cand).is_none() && !avoid.contains(&cand) {
            return cand;
        }
        n += 1;
    }
}

fn check_position(surface: &Slice, position: &[String], arity: usize) -> Result<(), ModelError> {
    if position.len() != arity {
        return Err(ModelError::InvalidPosition(format!(
            "expected {arity} labels, got {}",
            position.len()
        )));
    }
    for (i, l) in position.iter().enumerate() {
        if surface.index_of(l).is_none() {
            return Err(ModelError::InvalidPosition(format!("{l:?} not on the surface")));
        }
        if position[..i].contains(l) {
            return Err(ModelError::InvalidPosition(format!("{l:?} repeated")));
        }
    }
    Ok(())
}

/// Builds the local move at `position` on `surface`. The 1-2 move glues a
/// triangle over the edge (a, b), introducing one vertex; the 2-1 move
/// removes the tip v* of the triangle (v*, a, b); the square move replaces
/// v* by a new vertex across the quadrilateral (a, v*, b, ·); the 3d 2-2
/// move glues a tetrahedron over four surface vertices, touching no vertex
/// count.
pub fn pachner_move<S: Scalar>(
    kind: PachnerKind,
    surface: &Slice,
    position: &[String],
) -> Result<MoveSpec<S>, ModelError> {
    pachner_move_with_fresh(kind, surface, position, &[])
}

/// Like `pachner_move`, but new labels also avoid `avoid`. Needed for runs
/// on an extended slice where removed variables linger as formal pairs and
/// their labels must not be reused.
pub fn pachner_move_with_fresh<S: Scalar>(
    kind: PachnerKind,
    surface: &Slice,
    position: &[String],
    avoid: &[String],
) -> Result<MoveSpec<S>, ModelError> {
    let label = &surface.step_label;
    let mv = match kind {
        PachnerKind::OneTwo => {
            check_position(surface, position, 2)?;
            let v = fresh_label(surface, avoid);
            let next = Slice::new(
                label.clone(),
                vec![position[0].clone(), position[1].clone(), v.clone()],
            )
            .unwrap();
            let action = triangle_action_on(Slice::new(label.clone(), vec![]).unwrap(), next)?;
            let roles = RoleMap::new(vec![
                (position[0].clone(), Role::E),
                (position[1].clone(), Role::E),
                (v, Role::N),
            ])
            .unwrap();
            MoveSpec::new(MoveKind::I, roles, action)
        }
        PachnerKind::TwoOne => {
            check_position(surface, position, 3)?;
            let prev = Slice::new(label.clone(), position.to_vec()).unwrap();
            let action = triangle_action_on(prev, Slice::new(label.clone(), vec![]).unwrap())?;
            let roles = RoleMap::new(vec![
                (position[0].clone(), Role::O),
                (position[1].clone(), Role::E),
                (position[2].clone(), Role::E),
            ])
            .unwrap();
            MoveSpec::new(MoveKind::II, roles, action)
        }
        PachnerKind::Square => {
            check_position(surface, position, 3)?;
            let v_star = position[0].clone();
            let (a, b) = (position[1].clone(), position[2].clone());
            let v = fresh_label(surface, avoid);
            // S over the 4-cycle (a, v*, b, v): Σ_i ((φ^i)² − φ^i φ^{i+1}).
            let prev = Slice::new(label.clone(), vec![v_star.clone()]).unwrap();
            let next = Slice::new(label.clone(), vec![a.clone(), b.clone(), v.clone()]).unwrap();
            let m1 = S::from_int(-1);
            let action = build_action(
                prev,
                next,
                Mat::from_rows(vec![vec![S::from_int(2)]]),
                Mat::from_rows(vec![vec![m1.clone(), m1.clone(), S::zero()]]),
                Mat::from_rows(vec![
                    vec![S::from_int(2), S::zero(), m1.clone()],
                    vec![S::zero(), S::from_int(2), m1.clone()],
                    vec![m1.clone(), m1, S::from_int(2)],
                ]),
                vec![S::zero()],
                vec![S::zero(); 3],
                S::zero(),
            )
            .map_err(|e| ModelError::Dimension(e.to_string()))?;
            let roles = RoleMap::new(vec![
                (v_star, Role::O),
                (a, Role::E),
                (b, Role::E),
                (v, Role::N),
            ])
            .unwrap();
            MoveSpec::new(MoveKind::III, roles, action)
        }
        PachnerKind::TwoTwo3d => {
            check_position(surface, position, 4)?;
            let next = Slice::new(label.clone(), position.to_vec()).unwrap();
            // One tetrahedron: ¼ Σ over its six edges.
            let action = build_action(
                Slice::new(label.clone(), vec![]).unwrap(),
                next,
                Mat::zeros(0, 0),
                Mat::zeros(0, 4),
                Mat::from_fn(4, 4, |i, j| {
                    if i == j {
                        S::from_ratio(3, 2)
                    } else {
                        S::from_ratio(-1, 2)
                    }
                }),
                vec![],
                vec![S::zero(); 4],
                S::zero(),
            )
            .map_err(|e| ModelError::Dimension(e.to_string()))?;
            let roles =
                RoleMap::new(position.iter().map(|l| (l.clone(), Role::E)).collect()).unwrap();
            MoveSpec::new(MoveKind::IV, roles, action)
        }
    };
    mv.map_err(|e| ModelError::InvalidPosition(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[derive(Default)]
pub enum ArithmeticMode {
    #[default]
    Exact,
    Float,
}


#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MoveEntry {
    pub kind: PachnerKind,
    pub position: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    PropagatingCount { i: usize, f: usize },
    ReducedDimension { i: usize, n: usize, f: usize },
    Slice { n: usize },
}

/// A runnable description: either a chain of slabs (global evolution) or a
/// surface with a run of local moves, plus the queries to answer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub mode: ArithmeticMode,
    #[serde(default)]
    pub slabs: Vec<SlabSpec>,
    #[serde(default)]
    pub surface: Vec<String>,
    #[serde(default)]
    pub moves: Vec<MoveEntry>,
    #[serde(default)]
    pub queries: Vec<Query>,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.slabs.is_empty() && self.moves.is_empty() {
            return Err(ModelError::EmptySchedule);
        }
        for s in &self.slabs {
            s.validate()?;
        }
        for w in self.slabs.windows(2) {
            if w[0].q_next != w[1].q_prev {
                return Err(ModelError::Dimension(format!(
                    "slab boundary {} vs {}",
                    w[0].q_next, w[1].q_prev
                )));
            }
        }
        if !self.moves.is_empty() {
            if self.surface.is_empty() {
                return Err(ModelError::Dimension(
                    "moves require an initial surface".into(),
                ));
            }
            // Dry run on the evolving surface so positions are checked in
            // the state they will actually be applied in; labels of removed
            // vertices stay reserved, matching execution on the extended
            // slice.
            let mut surface = Slice::new("0", self.surface.clone())
                .map_err(|e| ModelError::Parse(e.to_string()))?;
            let mut seen = self.surface.clone();
            for m in &self.moves {
                let mv = pachner_move_with_fresh::<f64>(m.kind, &surface, &m.position, &seen)?;
                seen.extend(mv.new_labels());
                surface = surface_after(&surface, &mv);
            }
        }
        Ok(())
    }
}

/// Vertex set after a move: new labels appended, old labels dropped.
pub fn surface_after<S: Scalar>(surface: &Slice, mv: &MoveSpec<S>) -> Slice {
    let old = mv.old_labels();
    let mut vars: Vec<String> = surface
        .vars
        .iter()
        .filter(|v| !old.contains(v))
        .cloned()
        .collect();
    vars.extend(mv.new_labels());
    Slice {
        step_label: surface.step_label.clone(),
        vars,
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ModelError::Parse(format!("{}: {e}", path.display())))?;
    let sc: Scenario =
        serde_json::from_str(&text).map_err(|e| ModelError::Parse(e.to_string()))?;
    sc.validate()?;
    Ok(sc)
}

/// Chains the scenario's slabs into a schedule; slice n gets variables
/// "s{n}v1", "s{n}v2", ...
pub fn scenario_schedule<S: Scalar>(sc: &Scenario) -> Result<Schedule<S>, ModelError> {
    if sc.slabs.is_empty() {
        return Err(ModelError::EmptySchedule);
    }
    let slice_at = |n: usize, q: usize| Slice::numbered(n.to_string(), &format!("s{n}v"), q);
    let mut moves = Vec::new();
    for (n, spec) in sc.slabs.iter().enumerate() {
        moves.push(cdt_slab_action_on(
            spec,
            slice_at(n, spec.q_prev),
            slice_at(n + 1, spec.q_next),
        )?);
    }
    Schedule::new(moves).map_err(|e| ModelError::Dimension(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::{lagrangian_two_form, post_constraints, pre_constraints};
    use crate::linalg::vec_add;
    use crate::scalar::Rat;

    fn ri(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn rr(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn triangle_action_values_and_gradient() {
        let s = triangle_action::<Rat>();
        assert_eq!(s.evaluate(&[ri(1)], &[ri(1), ri(1)]), ri(0));
        assert_eq!(s.evaluate(&[ri(1)], &[ri(0), ri(0)]), rr(1, 2));
        let gp = s.grad_prev(&[ri(1)], &[ri(0), ri(0)]);
        let gn = s.grad_next(&[ri(1)], &[ri(0), ri(0)]);
        assert_eq!(gp, vec![ri(1)]);
        assert_eq!(gn, vec![rr(-1, 2), rr(-1, 2)]);
    }

    fn slab_2_3() -> SlabSpec {
        SlabSpec {
            q_prev: 2,
            q_next: 3,
            adjacency: vec![vec![1, 0, 0], vec![2, 1, 1]],
        }
    }

    #[test]
    fn slab_2_3_blocks_and_post_constraint() {
        let s = cdt_slab_action::<Rat>(&slab_2_3()).unwrap();
        assert_eq!(
            s.a_blk,
            Mat::from_rows(vec![vec![ri(2), ri(-1)], vec![ri(-1), ri(5)]])
        );
        assert_eq!(
            s.c_blk,
            Mat::from_rows(vec![
                vec![ri(4), rr(-1, 2), rr(-1, 2)],
                vec![rr(-1, 2), ri(2), rr(-1, 2)],
                vec![rr(-1, 2), rr(-1, 2), ri(2)],
            ])
        );
        let post = post_constraints(&s);
        assert_eq!(post.len(), 1);
        let c = &post.constraints[0];
        assert_eq!(c.gp, vec![ri(0), ri(1), ri(-1)]);
        assert_eq!(c.gx, vec![ri(0), rr(-5, 2), rr(5, 2)]);
        assert!(pre_constraints(&s).is_empty());
    }

    #[test]
    fn transposed_slab_flips_to_a_pre_constraint() {
        let spec = SlabSpec {
            q_prev: 3,
            q_next: 2,
            adjacency: vec![vec![1, 2], vec![0, 1], vec![0, 1]],
        };
        let s = cdt_slab_action::<Rat>(&spec).unwrap();
        let pre = pre_constraints(&s);
        assert_eq!(pre.len(), 1);
        let c = &pre.constraints[0];
        assert_eq!(c.gp, vec![ri(0), ri(1), ri(-1)]);
        assert_eq!(c.gx, vec![ri(0), rr(5, 2), rr(-5, 2)]);
        assert!(post_constraints(&s).is_empty());
    }

    #[test]
    fn two_form_is_the_adjacency_matrix() {
        let s = cdt_slab_action::<Rat>(&slab_2_3()).unwrap();
        let omega = lagrangian_two_form(&s);
        assert_eq!(
            omega,
            Mat::from_rows(vec![vec![ri(1), ri(0), ri(0)], vec![ri(2), ri(1), ri(1)]])
        );
    }

    #[test]
    fn regular_slab_has_no_constraints() {
        let spec = SlabSpec {
            q_prev: 3,
            q_next: 3,
            adjacency: vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
        };
        let s = cdt_slab_action::<Rat>(&spec).unwrap();
        assert!(post_constraints(&s).is_empty());
        assert!(pre_constraints(&s).is_empty());
    }

    #[test]
    fn slab_rejects_bad_entries() {
        let spec = SlabSpec {
            q_prev: 1,
            q_next: 1,
            adjacency: vec![vec![3]],
        };
        assert!(matches!(
            cdt_slab_action::<Rat>(&spec),
            Err(ModelError::InvalidAdjacency)
        ));
    }

    /// The regular 3→3 slab equals the sum of its six triangles.
    #[test]
    fn slab_decomposes_into_triangles() {
        let spec = SlabSpec {
            q_prev: 3,
            q_next: 3,
            adjacency: vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
        };
        let slab = cdt_slab_action::<Rat>(&spec).unwrap();
        // Strip triangles: up-triangles (b_i, b_{i+1}, t_{i+1}) and
        // down-triangles (t_i, t_{i+1}, b_i), indices cyclic.
        let b = |i: usize| format!("u{}", i + 1);
        let t = |i: usize| format!("v{}", i + 1);
        let tris: Vec<(Vec<String>, Vec<String>)> = (0..3)
            .flat_map(|i| {
                vec![
                    (vec![b(i), b((i + 1) % 3)], vec![t((i + 1) % 3)]),
                    (vec![b(i)], vec![t(i), t((i + 1) % 3)]),
                ]
            })
            .collect();
        let (labels, g_slab, lin_slab, _) = slab.as_joint_form();
        let mut g_sum: Mat<Rat> = Mat::zeros(6, 6);
        let mut lin_sum = vec![ri(0); 6];
        for (pv, nv) in tris {
            let tri = triangle_action_on::<Rat>(
                Slice::new("n", pv).unwrap(),
                Slice::new("n+1", nv).unwrap(),
            )
            .unwrap();
            let (tl, tg, tlin, _) = tri.as_joint_form();
            let idx: Vec<usize> = tl
                .iter()
                .map(|l| labels.iter().position(|x| x == l).unwrap())
                .collect();
            for (r, &ir) in idx.iter().enumerate() {
                lin_sum[ir] = lin_sum[ir].clone() + tlin[r].clone();
                for (c, &ic) in idx.iter().enumerate() {
                    g_sum[(ir, ic)] = g_sum[(ir, ic)].clone() + tg[(r, c)].clone();
                }
            }
        }
        assert_eq!(g_sum, g_slab);
        assert_eq!(vec_add(&lin_sum, &vec![ri(0); 6]), lin_slab);
    }

    #[test]
    fn one_two_move_new_momentum() {
        let surface = Slice::new("k", vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let mv = pachner_move::<Rat>(
            PachnerKind::OneTwo,
            &surface,
            &["b".to_string(), "c".to_string()],
        )
        .unwrap();
        assert_eq!(mv.kind, MoveKind::I);
        assert_eq!(mv.new_labels(), vec!["w1".to_string()]);
        // π_v = φ_v − ½(φ_b + φ_c).
        let g = mv.action.grad_next(&[], &[ri(2), ri(4), ri(5)]);
        assert_eq!(g[2], ri(5) - rr(1, 2) * (ri(2) + ri(4)));
    }

    #[test]
    fn two_one_move_pre_constraint_sign() {
        let surface = Slice::new("k", vec!["vs".into(), "a".into(), "b".into()]).unwrap();
        let mv = pachner_move::<Rat>(
            PachnerKind::TwoOne,
            &surface,
            &["vs".to_string(), "a".to_string(), "b".to_string()],
        )
        .unwrap();
        assert_eq!(mv.kind, MoveKind::II);
        // π_{v*} = −∂S/∂φ_{v*} = −φ_{v*} + ½(φ_a + φ_b).
        let g = mv.action.grad_prev(&[ri(3), ri(2), ri(4)], &[]);
        assert_eq!(-g[0].clone(), -ri(3) + rr(1, 2) * (ri(2) + ri(4)));
    }

    #[test]
    fn square_move_is_type_iii_with_decoupled_corners() {
        let surface = Slice::new("k", vec!["vs".into(), "a".into(), "b".into()]).unwrap();
        let mv = pachner_move::<Rat>(
            PachnerKind::Square,
            &surface,
            &["vs".to_string(), "a".to_string(), "b".to_string()],
        )
        .unwrap();
        assert_eq!(mv.kind, MoveKind::III);
        // The old and new corners of the square never share an edge.
        let j = mv.action.next.index_of("w1").unwrap();
        assert_eq!(mv.action.b_blk[(0, j)], ri(0));
    }

    #[test]
    fn pachner_rejects_bad_positions() {
        let surface = Slice::new("k", vec!["a".into(), "b".into()]).unwrap();
        assert!(matches!(
            pachner_move::<Rat>(PachnerKind::OneTwo, &surface, &["a".to_string()]),
            Err(ModelError::InvalidPosition(_))
        ));
        assert!(matches!(
            pachner_move::<Rat>(
                PachnerKind::OneTwo,
                &surface,
                &["a".to_string(), "z".to_string()]
            ),
            Err(ModelError::InvalidPosition(_))
        ));
    }

    #[test]
    fn scenario_round_trip_and_validation() {
        let sc = Scenario {
            mode: ArithmeticMode::Exact,
            slabs: vec![slab_2_3()],
            surface: vec![],
            moves: vec![],
            queries: vec![Query::PropagatingCount { i: 0, f: 1 }],
        };
        sc.validate().unwrap();
        let text = serde_json::to_string(&sc).unwrap();
        let back: Scenario = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        let sched = scenario_schedule::<Rat>(&back).unwrap();
        assert_eq!(sched.n_slices(), 2);
        assert_eq!(sched.slice(1).vars, vec!["s1v1", "s1v2", "s1v3"]);
    }

    #[test]
    fn empty_scenario_is_rejected() {
        let sc = Scenario {
            mode: ArithmeticMode::Exact,
            slabs: vec![],
            surface: vec![],
            moves: vec![],
            queries: vec![],
        };
        assert!(matches!(sc.validate(), Err(ModelError::EmptySchedule)));
    }
}
