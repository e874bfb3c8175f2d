//! Termination measures of the normalization phases, recomputable from a
//! quiver alone.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{breach, Result};
use crate::gentle::GentleQuiver;
use crate::quiver::{ArrowId, Relation};
use crate::structure::Structure;

/// A natural number or infinity; infinity sorts last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    Finite(u64),
    Infinite,
}

impl Bound {
    pub fn succ(self) -> Bound {
        match self {
            Bound::Finite(n) => Bound::Finite(n + 1),
            Bound::Infinite => Bound::Infinite,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Bound::Finite(n) => Some(n),
            Bound::Infinite => None,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(n) => write!(f, "{n}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(n) => s.serialize_u64(*n),
            Bound::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Bound::Finite(n)),
            Raw::S(s) if s == "inf" => Ok(Bound::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    /// branch relations, type A measure
    BranchRelationsA,
    /// branch relations, type Ã measure
    BranchRelationsAtilde,
    BranchArrowsAndTriangles,
    FreeRelations,
}

/// Measure values before one iteration of a phase; fields not used by the
/// phase are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSnapshot {
    pub phase: Phase,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Bound>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<Bound>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<Bound>,
    /// misordered pairs between the chosen free relation and its partner
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pairs: Option<u64>,
}

impl MeasureSnapshot {
    fn blank(phase: Phase) -> Self {
        MeasureSnapshot {
            phase,
            r: None,
            n: None,
            m: None,
            s: None,
            k: None,
            pairs: None,
        }
    }

    pub fn rn(phase: Phase, r: u64, n: Bound) -> Self {
        MeasureSnapshot {
            r: Some(r),
            n: Some(n),
            ..Self::blank(phase)
        }
    }

    pub fn rm(r: u64, m: Bound) -> Self {
        MeasureSnapshot {
            r: Some(r),
            m: Some(m),
            ..Self::blank(Phase::BranchArrowsAndTriangles)
        }
    }

    pub fn skp(s: u64, k: Bound, pairs: u64) -> Self {
        MeasureSnapshot {
            s: Some(s),
            k: Some(k),
            pairs: Some(pairs),
            ..Self::blank(Phase::FreeRelations)
        }
    }

    /// The lexicographically ordered measure tuple of the phase.
    pub fn key(&self) -> Vec<Bound> {
        let nat = |x: Option<u64>| Bound::Finite(x.unwrap_or(0));
        let ext = |x: Option<Bound>| x.unwrap_or(Bound::Finite(0));
        match self.phase {
            Phase::BranchRelationsA | Phase::BranchRelationsAtilde => vec![nat(self.r), ext(self.n)],
            Phase::BranchArrowsAndTriangles => vec![nat(self.r), ext(self.m)],
            Phase::FreeRelations => vec![nat(self.s), ext(self.k), nat(self.pairs)],
        }
    }

    /// True once the phase has nothing left to do.
    pub fn is_done(&self) -> bool {
        match self.phase {
            Phase::FreeRelations => self.s == Some(0),
            _ => self.r == Some(0),
        }
    }
}

fn rel_ids(g: &GentleQuiver, a: usize, b: usize) -> Relation {
    Relation {
        first: g.idx.arrow_ids[a].clone(),
        second: g.idx.arrow_ids[b].clone(),
    }
}

/// Branch relations `(a, b)` in index form, sorted.
pub(crate) fn branch_relation_indices(g: &GentleQuiver, st: &Structure) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = g
        .idx
        .rel
        .iter()
        .copied()
        .filter(|&(a, b)| st.bridge[a] || st.bridge[b])
        .collect();
    v.sort();
    v
}

/// Number of vertices in the component of the quiver minus `a` that
/// contains the target of `a`.
pub(crate) fn target_side(g: &GentleQuiver, a: usize) -> u64 {
    let (label, _) = g.idx.components(&[a]);
    let t = label[g.idx.tgt[a]];
    label.iter().filter(|&&l| l == t).count() as u64
}

/// Type A measure of each branch relation.
pub fn branch_relations_with_measure(g: &GentleQuiver) -> Result<Vec<(Relation, u64)>> {
    let st = Structure::new(g)?;
    Ok(branch_relation_indices(g, &st)
        .into_iter()
        .map(|(a, b)| (rel_ids(g, a, b), target_side(g, a)))
        .collect())
}

/// Type Ã measure of each branch relation; requires every orbit of the
/// cycle set to be a triangle.
pub fn branch_relations_with_measure_atilde(g: &GentleQuiver) -> Result<Vec<(Relation, Bound)>> {
    let view = AtildeView::new(g)?;
    branch_relation_indices(g, &view.st)
        .into_iter()
        .map(|(a, b)| Ok((rel_ids(g, a, b), view.n_arrow(g, a)?.min(view.n_arrow(g, b)?))))
        .collect()
}

/// Structural data used by the type Ã phases.
pub(crate) struct AtildeView {
    pub st: Structure,
    pub strongly_arrow: Vec<bool>,
    pub strongly_vertex: Vec<bool>,
    /// per orbit of the cycle set
    pub branch_triangle: Vec<bool>,
}

impl AtildeView {
    pub fn new(g: &GentleQuiver) -> Result<Self> {
        let st = Structure::new(g)?;
        if !st.all_triangles() {
            return Err(crate::error::Error::Precondition(
                "every orbit of the cycle set must be a triangle".into(),
            ));
        }
        let idx = &g.idx;
        let branch_triangle: Vec<bool> = (0..st.c_orbits.len())
            .map(|t| st.is_branch_triangle(idx, t))
            .collect();
        let strongly_arrow: Vec<bool> = (0..idx.na())
            .map(|a| {
                !st.bridge[a]
                    && match st.orbit_of[a] {
                        None => true,
                        Some(t) => !branch_triangle[t],
                    }
            })
            .collect();
        let mut strongly_vertex = vec![false; idx.nv()];
        for a in 0..idx.na() {
            if strongly_arrow[a] {
                strongly_vertex[idx.src[a]] = true;
                strongly_vertex[idx.tgt[a]] = true;
            }
        }
        Ok(AtildeView {
            st,
            strongly_arrow,
            strongly_vertex,
            branch_triangle,
        })
    }

    /// Size of the component of the quiver minus a branch arrow that avoids
    /// the strongly cycle vertices; infinite for cycle arrows.
    pub fn n_arrow(&self, g: &GentleQuiver, a: usize) -> Result<Bound> {
        if !self.st.bridge[a] {
            return Ok(Bound::Infinite);
        }
        let (label, _) = g.idx.components(&[a]);
        let sides = [label[g.idx.src[a]], label[g.idx.tgt[a]]];
        let free: Vec<usize> = sides
            .into_iter()
            .filter(|&c| !(0..g.idx.nv()).any(|v| label[v] == c && self.strongly_vertex[v]))
            .collect();
        match free[..] {
            [c] => Ok(Bound::Finite(label.iter().filter(|&&l| l == c).count() as u64)),
            _ => Err(breach(format!(
                "branch arrow `{}` does not separate off a strongly-cycle-free part",
                g.idx.arrow_ids[a]
            ))),
        }
    }

    /// Vertex lies on an arrow of a triangle satisfying `pred`.
    pub fn adjacent_triangle(&self, g: &GentleQuiver, v: usize, pred: impl Fn(usize) -> bool) -> bool {
        g.idx.incident(v).any(|a| self.st.orbit_of[a].is_some_and(&pred))
    }

    pub fn adjacent_cycle_triangle(&self, g: &GentleQuiver, v: usize) -> bool {
        self.adjacent_triangle(g, v, |t| !self.branch_triangle[t])
    }

    pub fn adjacent_branch_triangle(&self, g: &GentleQuiver, v: usize) -> bool {
        self.adjacent_triangle(g, v, |t| self.branch_triangle[t])
    }

    pub fn branch_arrow_count(&self) -> usize {
        self.st.bridge.iter().filter(|&&b| b).count()
    }

    pub fn branch_triangle_count(&self) -> usize {
        self.branch_triangle.iter().filter(|&&b| b).count()
    }

    /// Distance, walking backwards along strongly cycle arrows that carry a
    /// relation, to a vertex where that stops.
    pub fn m_prime(&self, g: &GentleQuiver) -> Vec<Bound> {
        let nv = g.idx.nv();
        let mut memo: Vec<Option<Bound>> = vec![None; nv];
        for v in 0..nv {
            if self.strongly_vertex[v] {
                let mut on_path = vec![false; nv];
                self.m_prime_at(g, v, &mut memo, &mut on_path);
            }
        }
        memo.into_iter().map(|b| b.unwrap_or(Bound::Infinite)).collect()
    }

    fn m_prime_at(&self, g: &GentleQuiver, x: usize, memo: &mut [Option<Bound>], on_path: &mut [bool]) -> Bound {
        if let Some(b) = memo[x] {
            return b;
        }
        if on_path[x] {
            return Bound::Infinite;
        }
        let idx = &g.idx;
        let preds: Vec<usize> = idx.inc[x]
            .iter()
            .copied()
            .filter(|&a| self.strongly_arrow[a])
            .filter(|&a| idx.rel.iter().any(|&(f, _)| f == a))
            .collect();
        let value = if self.adjacent_cycle_triangle(g, x) || preds.is_empty() {
            Bound::Finite(0)
        } else {
            on_path[x] = true;
            let best = preds
                .iter()
                .map(|&a| self.m_prime_at(g, idx.src[a], memo, on_path).succ())
                .min()
                .unwrap_or(Bound::Infinite);
            on_path[x] = false;
            best
        };
        memo[x] = Some(value);
        value
    }
}

/// Smallest arrow id touching a vertex; used to break ties between vertices.
pub(crate) fn smallest_incident(g: &GentleQuiver, v: usize) -> Option<&ArrowId> {
    g.idx.incident(v).map(|a| &g.idx.arrow_ids[a]).min()
}
