//! Gentleness checking and the validated [`GentleQuiver`] type.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::{ArrowId, Index, QuiverWithRelations, VertexId};
use crate::signs::{self, SignAssignment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    Disconnected,
    OutDegreeExceeded,
    InDegreeExceeded,
    NonRelationSuccessorNotUnique,
    RelationSuccessorNotUnique,
    NonRelationPredecessorNotUnique,
    RelationPredecessorNotUnique,
    InfiniteDimensional,
    DanglingRelation,
    BadRelationComposability,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GentlenessViolation {
    pub kind: ViolationKind,
    pub vertices: Vec<VertexId>,
    pub arrows: Vec<ArrowId>,
}

impl GentlenessViolation {
    pub fn new(kind: ViolationKind, vertices: Vec<VertexId>, arrows: Vec<ArrowId>) -> Self {
        GentlenessViolation { kind, vertices, arrows }
    }
}

impl fmt::Display for GentlenessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if !self.vertices.is_empty() {
            let v: Vec<&str> = self.vertices.iter().map(VertexId::as_str).collect();
            write!(f, " at vertices [{}]", v.join(", "))?;
        }
        if !self.arrows.is_empty() {
            let a: Vec<&str> = self.arrows.iter().map(ArrowId::as_str).collect();
            write!(f, " involving arrows [{}]", a.join(", "))?;
        }
        Ok(())
    }
}

/// A quiver with relations that satisfies the gentle conditions, together
/// with its canonical sign assignment.
#[derive(Clone, Debug)]
pub struct GentleQuiver {
    presentation: QuiverWithRelations,
    signs: SignAssignment,
    pub(crate) idx: Index,
    pub(crate) sigma: Vec<i8>,
    pub(crate) tau: Vec<i8>,
}

impl PartialEq for GentleQuiver {
    fn eq(&self, other: &Self) -> bool {
        self.presentation == other.presentation && self.signs == other.signs
    }
}

impl Eq for GentleQuiver {}

impl GentleQuiver {
    pub fn presentation(&self) -> &QuiverWithRelations {
        &self.presentation
    }

    pub fn signs(&self) -> &SignAssignment {
        &self.signs
    }

    pub fn into_presentation(self) -> QuiverWithRelations {
        self.presentation
    }

    pub fn num_vertices(&self) -> usize {
        self.idx.nv()
    }

    pub fn num_arrows(&self) -> usize {
        self.idx.na()
    }

    /// Re-signs the same presentation with another valid assignment.
    pub fn with_signs(&self, signs: SignAssignment) -> Result<GentleQuiver> {
        signs.check(&self.presentation)?;
        let (sigma, tau) = signs.to_vectors(&self.idx)?;
        Ok(GentleQuiver {
            presentation: self.presentation.clone(),
            signs,
            idx: self.idx.clone(),
            sigma,
            tau,
        })
    }

    /// The opposite quiver (all arrows reversed), revalidated.
    pub fn opposite(&self) -> Result<GentleQuiver> {
        validate_gentle(&self.presentation.opposite())
            .map_err(|v| crate::error::breach(format!("opposite of a gentle quiver is not gentle: {v:?}")))
    }

    pub fn arrow_kind(&self, a: &ArrowId) -> Result<ArrowKind> {
        let i = self.idx.arrow(a).ok_or_else(|| Error::UnknownArrow(a.clone()))?;
        Ok(if self.idx.is_bridge(i) {
            ArrowKind::Branch
        } else {
            ArrowKind::Cycle
        })
    }

    pub fn is_tree_type(&self) -> bool {
        self.num_vertices() == self.num_arrows() + 1
    }

    pub fn is_one_cycle(&self) -> bool {
        self.num_vertices() == self.num_arrows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrowKind {
    Branch,
    Cycle,
}

pub fn arrow_kind(g: &GentleQuiver, a: &ArrowId) -> Result<ArrowKind> {
    g.arrow_kind(a)
}

/// Checks connectivity, the local degree and uniqueness conditions, and
/// finite dimensionality. On success the canonical sign assignment is
/// attached; on failure every violated condition is reported.
pub fn validate_gentle(q: &QuiverWithRelations) -> Result<GentleQuiver, Vec<GentlenessViolation>> {
    let idx = q.index();
    let violations = collect_violations(&idx);
    if !violations.is_empty() {
        return Err(violations);
    }
    let (sigma, tau) = match signs::solve(&idx, |_| false) {
        Ok(st) => st,
        // Conditions (1)-(3) guarantee a solution; report rather than panic.
        Err(Error::SignInconsistency { arrows }) => {
            return Err(vec![GentlenessViolation::new(
                ViolationKind::NonRelationSuccessorNotUnique,
                vec![],
                arrows,
            )])
        }
        Err(_) => unreachable!("solve only fails with SignInconsistency"),
    };
    let signs = SignAssignment::from_vectors(&idx, &sigma, &tau);
    Ok(GentleQuiver {
        presentation: q.clone(),
        signs,
        idx,
        sigma,
        tau,
    })
}

/// Same as [`validate_gentle`] but folds violations into [`Error::NotGentle`].
pub fn gentle(q: &QuiverWithRelations) -> Result<GentleQuiver> {
    validate_gentle(q).map_err(Error::NotGentle)
}

fn collect_violations(idx: &Index) -> Vec<GentlenessViolation> {
    let mut out = Vec::new();
    let vid = |v: usize| idx.vertex_ids[v].clone();
    let aids = |xs: &[usize]| xs.iter().map(|&a| idx.arrow_ids[a].clone()).collect::<Vec<_>>();

    let (label, count) = idx.components(&[]);
    if count > 1 {
        let stray: Vec<VertexId> = (0..idx.nv()).filter(|&v| label[v] != label[0]).map(vid).collect();
        out.push(GentlenessViolation::new(ViolationKind::Disconnected, stray, vec![]));
    }

    for v in 0..idx.nv() {
        if idx.out[v].len() > 2 {
            out.push(GentlenessViolation::new(
                ViolationKind::OutDegreeExceeded,
                vec![vid(v)],
                aids(&idx.out[v]),
            ));
        }
        if idx.inc[v].len() > 2 {
            out.push(GentlenessViolation::new(
                ViolationKind::InDegreeExceeded,
                vec![vid(v)],
                aids(&idx.inc[v]),
            ));
        }
    }

    for a in 0..idx.na() {
        let (after_free, after_rel): (Vec<usize>, Vec<usize>) =
            idx.out[idx.tgt[a]].iter().partition(|&&b| !idx.is_rel(b, a));
        let (before_free, before_rel): (Vec<usize>, Vec<usize>) =
            idx.inc[idx.src[a]].iter().partition(|&&c| !idx.is_rel(a, c));
        let checks = [
            (after_free, ViolationKind::NonRelationSuccessorNotUnique),
            (after_rel, ViolationKind::RelationSuccessorNotUnique),
            (before_free, ViolationKind::NonRelationPredecessorNotUnique),
            (before_rel, ViolationKind::RelationPredecessorNotUnique),
        ];
        for (set, kind) in checks {
            if set.len() > 1 {
                let mut arrows = vec![idx.arrow_ids[a].clone()];
                arrows.extend(aids(&set));
                out.push(GentlenessViolation::new(kind, vec![], arrows));
            }
        }
    }

    if let Some(cycle) = relation_free_cycle(idx) {
        out.push(GentlenessViolation::new(
            ViolationKind::InfiniteDimensional,
            vec![],
            aids(&cycle),
        ));
    }
    out
}

/// Looks for a directed cycle in the graph on arrows with an edge `b -> a`
/// whenever `a` can follow `b` without a relation. Returns the arrows of one
/// such cycle.
fn relation_free_cycle(idx: &Index) -> Option<Vec<usize>> {
    let na = idx.na();
    let succ = |b: usize| {
        idx.out[idx.tgt[b]]
            .iter()
            .copied()
            .filter(move |&a| !idx.is_rel(a, b))
    };
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; na];
    let mut parent = vec![usize::MAX; na];
    for start in 0..na {
        if state[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, succ(start).collect())];
        state[start] = 1;
        while let Some((node, pending)) = stack.last_mut() {
            let node = *node;
            if let Some(next) = pending.pop() {
                match state[next] {
                    0 => {
                        state[next] = 1;
                        parent[next] = node;
                        stack.push((next, succ(next).collect()));
                    }
                    1 => {
                        let mut cycle = vec![next];
                        let mut cur = node;
                        while cur != next {
                            cycle.push(cur);
                            cur = parent[cur];
                        }
                        cycle.reverse();
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[node] = 2;
                stack.pop();
            }
        }
    }
    None
}
