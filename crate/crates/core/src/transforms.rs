//! Quiver rewrites: reflections and coreflections at a vertex, completion of
//! isolated relations, triangles and models.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{breach, Error, Result};
use crate::gentle::{validate_gentle, GentleQuiver};
use crate::quiver::{Arrow, ArrowId, QuiverWithRelations, Relation, VertexId};
use crate::structure::Structure;
use crate::threads::build_thread_system;

/// One rewrite applied to a quiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "locus")]
pub enum RewriteStep {
    Reflect(VertexId),
    Coreflect(VertexId),
    Complete(Vec<Relation>),
    RemoveArrows(Vec<ArrowId>),
}

impl RewriteStep {
    pub fn is_reflection(&self) -> bool {
        matches!(self, RewriteStep::Reflect(_) | RewriteStep::Coreflect(_))
    }

    pub fn apply(&self, g: &GentleQuiver) -> Result<GentleQuiver> {
        match self {
            RewriteStep::Reflect(x) => reflect(g, x),
            RewriteStep::Coreflect(x) => coreflect(g, x),
            RewriteStep::Complete(rels) => match complete_relations(g, rels)? {
                Completion::Gentle { quiver, .. } => Ok(quiver),
                Completion::NotGentle { witness_orbit } => Err(Error::Precondition(format!(
                    "completion is not gentle; orbit {} lies in the completed set",
                    join(&witness_orbit)
                ))),
            },
            RewriteStep::RemoveArrows(ids) => {
                let set: BTreeSet<ArrowId> = ids.iter().cloned().collect();
                let q = g.presentation().remove_arrows(&set)?;
                crate::gentle::gentle(&q)
            }
        }
    }
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteStep::Reflect(x) => write!(f, "reflect at {x}"),
            RewriteStep::Coreflect(x) => write!(f, "coreflect at {x}"),
            RewriteStep::Complete(r) => write!(f, "complete {}", join(r)),
            RewriteStep::RemoveArrows(a) => write!(f, "remove {}", join(a)),
        }
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// A replayable chain of rewrites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteTrace {
    pub initial: GentleQuiver,
    pub steps: Vec<RewriteStep>,
    pub final_quiver: GentleQuiver,
}

impl RewriteTrace {
    pub fn empty(g: GentleQuiver) -> Self {
        RewriteTrace {
            initial: g.clone(),
            steps: Vec::new(),
            final_quiver: g,
        }
    }
}

/// Why a reflection at a vertex is not defined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReflectObstruction {
    Loop(ArrowId),
    /// an arrow leaving the vertex with no relation-free arrow into it
    NoContinuation(ArrowId),
}

impl fmt::Display for ReflectObstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReflectObstruction::Loop(a) => write!(f, "loop `{a}` at the vertex"),
            ReflectObstruction::NoContinuation(a) => {
                write!(f, "arrow `{a}` has no relation-free predecessor")
            }
        }
    }
}

/// Where loops block a reflection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LoopPolicy {
    /// only a loop at the reflected vertex
    #[default]
    AtVertex,
    /// any loop in the quiver
    Anywhere,
}

pub fn reflect_obstructions(g: &GentleQuiver, x: &VertexId) -> Result<Vec<ReflectObstruction>> {
    reflect_obstructions_with(g, x, LoopPolicy::AtVertex)
}

pub fn reflect_obstructions_with(
    g: &GentleQuiver,
    x: &VertexId,
    policy: LoopPolicy,
) -> Result<Vec<ReflectObstruction>> {
    let idx = &g.idx;
    let xv = idx.vertex(x).ok_or_else(|| Error::UnknownVertex(x.clone()))?;
    let mut out = Vec::new();
    for a in 0..idx.na() {
        let at_x = idx.src[a] == xv;
        let counts = match policy {
            LoopPolicy::AtVertex => at_x,
            LoopPolicy::Anywhere => true,
        };
        if counts && idx.src[a] == idx.tgt[a] {
            out.push(ReflectObstruction::Loop(idx.arrow_ids[a].clone()));
        }
    }
    for &a in &idx.out[xv] {
        if idx.src[a] == idx.tgt[a] {
            continue;
        }
        if !idx.inc[xv].iter().any(|&b| !idx.is_rel(a, b)) {
            out.push(ReflectObstruction::NoContinuation(idx.arrow_ids[a].clone()));
        }
    }
    Ok(out)
}

pub fn can_reflect(g: &GentleQuiver, x: &VertexId) -> Result<bool> {
    Ok(reflect_obstructions(g, x)?.is_empty())
}

pub fn can_coreflect(g: &GentleQuiver, x: &VertexId) -> Result<bool> {
    can_reflect(&g.opposite()?, x)
}

pub fn reflect(g: &GentleQuiver, x: &VertexId) -> Result<GentleQuiver> {
    reflect_with(g, x, LoopPolicy::AtVertex)
}

pub fn reflect_with(g: &GentleQuiver, x: &VertexId, policy: LoopPolicy) -> Result<GentleQuiver> {
    let obstructions = reflect_obstructions_with(g, x, policy)?;
    if !obstructions.is_empty() {
        return Err(Error::Precondition(format!(
            "cannot reflect at `{x}`: {}",
            join(&obstructions)
        )));
    }
    let q = reflected_presentation(g, x)?;
    validate_gentle(&q).map_err(|v| {
        breach(format!(
            "reflection at `{x}` produced a non-gentle quiver: {}",
            join(&v)
        ))
    })
}

/// The rewrite itself, on presentations; assumes the precondition holds.
fn reflected_presentation(g: &GentleQuiver, x: &VertexId) -> Result<QuiverWithRelations> {
    let idx = &g.idx;
    let xv = idx.vertex(x).ok_or_else(|| Error::UnknownVertex(x.clone()))?;
    let na = idx.na();
    // beta_a for arrows leaving x
    let mut partner = vec![None; na];
    for &a in &idx.out[xv] {
        partner[a] = idx.inc[xv].iter().copied().find(|&b| !idx.is_rel(a, b));
    }
    let mut src = vec![0; na];
    let mut tgt = vec![0; na];
    for a in 0..na {
        src[a] = if idx.tgt[a] == xv {
            xv
        } else if idx.src[a] == xv {
            idx.src[partner[a].ok_or_else(|| breach("reflection partner missing"))?]
        } else {
            idx.src[a]
        };
        tgt[a] = if idx.tgt[a] == xv {
            idx.src[a]
        } else if idx.inc[xv]
            .iter()
            .any(|&b| idx.src[b] == idx.tgt[a] && idx.is_rel(b, a))
        {
            xv
        } else {
            idx.tgt[a]
        };
    }
    let mut rels: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(a, b) in &idx.rel {
        if idx.tgt[a] != xv && idx.src[a] != xv {
            rels.insert((a, b));
        }
    }
    for &a in &idx.out[xv] {
        if let Some(b) = partner[a] {
            rels.insert((a, b));
        }
    }
    for &a in &idx.inc[xv] {
        for &c in &idx.inc[xv] {
            if c == a {
                continue;
            }
            for b in 0..na {
                if idx.tgt[b] == idx.src[c] && idx.is_rel(c, b) {
                    rels.insert((a, b));
                }
            }
        }
    }
    QuiverWithRelations::new(
        idx.vertex_ids.iter().cloned(),
        (0..na).map(|a| Arrow {
            id: idx.arrow_ids[a].clone(),
            source: idx.vertex_ids[src[a]].clone(),
            target: idx.vertex_ids[tgt[a]].clone(),
        }),
        rels.into_iter().map(|(a, b)| Relation {
            first: idx.arrow_ids[a].clone(),
            second: idx.arrow_ids[b].clone(),
        }),
    )
    .map_err(|e| breach(format!("reflection at `{x}` produced a malformed quiver: {e}")))
}

/// The dual rewrite: reflection in the opposite quiver, reversed back.
pub fn coreflect(g: &GentleQuiver, x: &VertexId) -> Result<GentleQuiver> {
    coreflect_with(g, x, LoopPolicy::AtVertex)
}

pub fn coreflect_with(g: &GentleQuiver, x: &VertexId, policy: LoopPolicy) -> Result<GentleQuiver> {
    let op = g.opposite()?;
    reflect_with(&op, x, policy)?.opposite()
}

/// Relations whose length-two antipath is maximal.
pub fn isolated_relations(g: &GentleQuiver) -> Result<BTreeSet<Relation>> {
    let ts = build_thread_system(g)?;
    Ok(ts
        .antipaths
        .iter()
        .filter(|t| t.len() == 2)
        .map(|t| Relation {
            first: t.arrows()[0].clone(),
            second: t.arrows()[1].clone(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Completion {
    Gentle {
        quiver: GentleQuiver,
        /// each completed relation with the arrow added for it
        added: Vec<(Relation, ArrowId)>,
    },
    /// A Phi-orbit of maximal antipaths made only of completed relations.
    NotGentle { witness_orbit: Vec<Relation> },
}

fn fresh_arrow_id(taken: &HashSet<ArrowId>, r: &Relation) -> ArrowId {
    let base = format!("g_{}_{}", r.first, r.second);
    let mut name = base.clone();
    let mut k = 2;
    loop {
        let id = ArrowId::new(name.clone()).expect("fresh ids are tokens");
        if !taken.contains(&id) {
            return id;
        }
        name = format!("{base}_{k}");
        k += 1;
    }
}

/// Closes each relation of `r0` into a triangle with a fresh arrow.
pub fn complete_relations(g: &GentleQuiver, r0: &[Relation]) -> Result<Completion> {
    let rset: BTreeSet<Relation> = r0.iter().cloned().collect();
    if rset.is_empty() {
        return Ok(Completion::Gentle {
            quiver: g.clone(),
            added: Vec::new(),
        });
    }
    let ts = build_thread_system(g)?;
    let as_relation = |j: usize| -> Option<Relation> {
        let t = &ts.antipaths[j];
        (t.len() == 2).then(|| Relation {
            first: t.arrows()[0].clone(),
            second: t.arrows()[1].clone(),
        })
    };
    let isolated: BTreeSet<Relation> = (0..ts.antipaths.len()).filter_map(as_relation).collect();
    if let Some(bad) = rset.iter().find(|r| !isolated.contains(r)) {
        return Err(Error::Precondition(format!("relation {bad} is not isolated")));
    }
    let witness = ts.antipath_orbits.iter().find(|o| {
        o.iter()
            .all(|&j| as_relation(j).is_some_and(|r| rset.contains(&r)))
    });

    let q = g.presentation();
    let mut taken: HashSet<ArrowId> = q.arrows().map(|a| a.id.clone()).collect();
    let mut arrows: Vec<Arrow> = q.arrows().cloned().collect();
    let mut relations: Vec<Relation> = q.relations().cloned().collect();
    let mut added = Vec::new();
    for r in &rset {
        let id = fresh_arrow_id(&taken, r);
        taken.insert(id.clone());
        let (a, b) = (q.arrow(&r.first).unwrap(), q.arrow(&r.second).unwrap());
        arrows.push(Arrow {
            id: id.clone(),
            source: a.target.clone(),
            target: b.source.clone(),
        });
        relations.push(Relation {
            first: id.clone(),
            second: r.first.clone(),
        });
        relations.push(Relation {
            first: r.second.clone(),
            second: id.clone(),
        });
        added.push((r.clone(), id));
    }
    let completed = QuiverWithRelations::new(q.vertices().cloned(), arrows, relations)?;
    match (validate_gentle(&completed), witness) {
        (Ok(quiver), None) => Ok(Completion::Gentle { quiver, added }),
        (Err(_), Some(o)) => Ok(Completion::NotGentle {
            witness_orbit: o.iter().filter_map(|&j| as_relation(j)).collect(),
        }),
        (Ok(_), Some(_)) => Err(breach(
            "completion is gentle although an orbit lies inside the completed set",
        )),
        (Err(v), None) => Err(breach(format!(
            "completion is not gentle but no orbit lies inside the completed set: {}",
            join(&v)
        ))),
    }
}

/// Orbits of the cycle set with three arrows, each in walking order
/// starting from its smallest arrow id.
pub fn triangles(g: &GentleQuiver) -> Result<Vec<[ArrowId; 3]>> {
    let st = Structure::new(g)?;
    Ok(st
        .triangles()
        .map(|(_, o)| {
            let ids = |i: usize| g.idx.arrow_ids[o[i % 3]].clone();
            let start = (0..3).min_by_key(|&i| o[i]).unwrap();
            [ids(start), ids(start + 1), ids(start + 2)]
        })
        .collect())
}

/// Removes the smallest arrow of every triangle.
pub fn model_of(g: &GentleQuiver) -> Result<(GentleQuiver, Vec<ArrowId>)> {
    let st = Structure::new(g)?;
    if !st.all_triangles() {
        return Err(Error::Precondition(
            "every orbit of the cycle set must be a triangle".into(),
        ));
    }
    let removed: Vec<ArrowId> = st
        .c_orbits
        .iter()
        .map(|o| g.idx.arrow_ids[*o.iter().min().unwrap()].clone())
        .collect();
    let model = remove_and_validate(g, &removed)?;
    Ok((model, removed))
}

fn remove_and_validate(g: &GentleQuiver, ids: &[ArrowId]) -> Result<GentleQuiver> {
    let set: BTreeSet<ArrowId> = ids.iter().cloned().collect();
    let q = g.presentation().remove_arrows(&set)?;
    validate_gentle(&q).map_err(|v| breach(format!("model is not gentle: {}", join(&v))))
}

/// For each triangle, the arrow whose removal leaves no bridge. Requires a
/// quiver without branch arrows and branch triangles.
pub(crate) fn outer_arrows(g: &GentleQuiver, st: &Structure) -> Result<BTreeMap<usize, usize>> {
    let idx = &g.idx;
    let mut out = BTreeMap::new();
    for (t, o) in st.triangles() {
        let cands: Vec<usize> = o
            .iter()
            .copied()
            .filter(|&gam| {
                let others: Vec<usize> = o.iter().copied().filter(|&a| a != gam).collect();
                idx.components(&others).1 > 1
            })
            .collect();
        if cands.len() != 1 {
            return Err(breach(format!(
                "triangle through `{}` has {} candidate outer arrows",
                idx.arrow_ids[o[0]],
                cands.len()
            )));
        }
        out.insert(t, cands[0]);
    }
    Ok(out)
}

/// Removes the outer arrow of every triangle; the result is an unoriented
/// cycle. Requires no branch arrows and no branch triangles.
pub fn standard_model(g: &GentleQuiver) -> Result<GentleQuiver> {
    let st = Structure::new(g)?;
    if !st.all_triangles() {
        return Err(Error::Precondition(
            "every orbit of the cycle set must be a triangle".into(),
        ));
    }
    if g.num_arrows() - st.c_orbits.len() != g.num_vertices() {
        return Err(Error::Precondition(
            "removing one arrow per triangle must leave a 1-cycle quiver".into(),
        ));
    }
    if st.bridge.iter().any(|&b| b) {
        return Err(Error::Precondition("quiver has branch arrows".into()));
    }
    if !st.branch_triangles(&g.idx).is_empty() {
        return Err(Error::Precondition("quiver has branch triangles".into()));
    }
    let outer = outer_arrows(g, &st)?;
    let ids: Vec<ArrowId> = outer.values().map(|&a| g.idx.arrow_ids[a].clone()).collect();
    let gamma = remove_and_validate(g, &ids)?;
    if gamma.idx.bridges().iter().any(|&b| b) || !gamma.is_one_cycle() {
        return Err(breach("standard model is not a cycle"));
    }
    Ok(gamma)
}
