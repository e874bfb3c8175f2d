use std::collections::BTreeMap;

use crate::classify::{classify, decompose_class_a_tilde, ClusterType};
use crate::error::{breach, Error, Result};
use crate::gentle::GentleQuiver;
use crate::invariant::aag_invariant;
use crate::quiver::VertexId;
use crate::structure::Structure;
use crate::transforms::{outer_arrows, RewriteStep};

use super::measures::{branch_relation_indices, smallest_incident, AtildeView, Bound, MeasureSnapshot, Phase};
use super::{generic_cap, NormalizationResult, Plan, Runner};

fn vid(g: &GentleQuiver, v: usize) -> VertexId {
    g.idx.vertex_ids[v].clone()
}

// ---------------------------------------------------------------- branch relations

/// `(measure, measure of the first arrow, relation)`
type RankedRelation = (Bound, Bound, (usize, usize));

/// Branch relations with their measure and the measure of the first arrow,
/// in selection order.
fn ranked_branch_relations(g: &GentleQuiver) -> Result<Vec<RankedRelation>> {
    let view = AtildeView::new(g)?;
    let mut v = Vec::new();
    for (a, b) in branch_relation_indices(g, &view.st) {
        let na = view.n_arrow(g, a)?;
        let nb = view.n_arrow(g, b)?;
        v.push((na.min(nb), na, (a, b)));
    }
    v.sort_by_key(|&(n, _, (a, b))| (n, a.min(b), a, b));
    Ok(v)
}

fn branch_relation_measure(g: &GentleQuiver) -> Result<MeasureSnapshot> {
    let v = ranked_branch_relations(g)?;
    let n = v.first().map_or(Bound::Infinite, |&(n, _, _)| n);
    Ok(MeasureSnapshot::rn(Phase::BranchRelationsAtilde, v.len() as u64, n))
}

fn branch_relation_plan(g: &GentleQuiver) -> Result<Plan> {
    let v = ranked_branch_relations(g)?;
    let &(n, na, (a, b)) = v.first().ok_or_else(|| breach("planning with no branch relation"))?;
    let at_target = vec![RewriteStep::Reflect(vid(g, g.idx.tgt[a]))];
    let at_source = vec![RewriteStep::Coreflect(vid(g, g.idx.src[b]))];
    Ok(if n == na {
        vec![at_target, at_source]
    } else {
        vec![at_source, at_target]
    })
}

// ---------------------------------------------------------------- branch arrows and triangles

struct Attachment {
    m: Bound,
    vertex: usize,
    /// measured on the opposite quiver, so the moves are coreflections
    dual: bool,
    branch_triangle: bool,
}

/// Branch count and the attachment vertices in selection order.
fn attachments(g: &GentleQuiver) -> Result<(u64, Vec<Attachment>)> {
    let view = AtildeView::new(g)?;
    if !branch_relation_indices(g, &view.st).is_empty() {
        return Err(Error::Precondition("quiver has branch relations".into()));
    }
    let opp = g.opposite()?;
    let m1 = view.m_prime(g);
    let m2 = AtildeView::new(&opp)?.m_prime(&opp);
    let idx = &g.idx;
    let mut out = Vec::new();
    for v in 0..idx.nv() {
        if !view.strongly_vertex[v] {
            continue;
        }
        let touches_bridge = idx.incident(v).any(|a| view.st.bridge[a]);
        let branch_triangle = view.adjacent_branch_triangle(g, v);
        if !touches_bridge && !branch_triangle {
            continue;
        }
        let bridge_in = idx.inc[v].iter().any(|&a| view.st.bridge[a]);
        let dual = !(branch_triangle || bridge_in);
        out.push(Attachment {
            m: if dual { m2[v] } else { m1[v] },
            vertex: v,
            dual,
            branch_triangle,
        });
    }
    out.sort_by(|a, b| (a.m, smallest_incident(g, a.vertex)).cmp(&(b.m, smallest_incident(g, b.vertex))));
    let r = (view.branch_arrow_count() + view.branch_triangle_count()) as u64;
    Ok((r, out))
}

fn branches_measure(g: &GentleQuiver) -> Result<MeasureSnapshot> {
    let (r, att) = attachments(g)?;
    if r > 0 && att.is_empty() {
        return Err(breach("branches present but no strongly cycle vertex touches them"));
    }
    Ok(MeasureSnapshot::rm(r, att.first().map_or(Bound::Infinite, |a| a.m)))
}

fn branches_plan(g: &GentleQuiver) -> Result<Plan> {
    let (_, att) = attachments(g)?;
    let a = att.first().ok_or_else(|| breach("planning with no branches"))?;
    let view = AtildeView::new(g)?;
    let idx = &g.idx;
    let x = a.vertex;
    // the relation through x between its two strongly cycle arrows
    let through = idx.inc[x].iter().copied().filter(|&q| view.strongly_arrow[q]).find_map(|q| {
        idx.out[x]
            .iter()
            .copied()
            .find(|&p| view.strongly_arrow[p] && idx.is_rel(p, q))
            .map(|p| (p, q))
    });
    let single = |dual: bool| {
        if dual {
            RewriteStep::Coreflect(vid(g, x))
        } else {
            RewriteStep::Reflect(vid(g, x))
        }
    };
    let double = |dual: bool| {
        through.map(|(p, q)| {
            if dual {
                vec![single(true), RewriteStep::Coreflect(vid(g, idx.tgt[p]))]
            } else {
                vec![single(false), RewriteStep::Reflect(vid(g, idx.src[q]))]
            }
        })
    };
    let mut plan = Vec::new();
    for dual in [a.dual, !a.dual] {
        let two = double(dual);
        let two_first = a.m > Bound::Finite(0) && !a.branch_triangle;
        if two_first {
            plan.extend(two.clone());
        }
        plan.push(vec![single(dual)]);
        if !two_first {
            plan.extend(two);
        }
    }
    Ok(plan)
}

// ---------------------------------------------------------------- free relations

/// The standard model as a closed walk: `arrows[j]` joins `verts[j]` and
/// `verts[j + 1]`, and the walk starts along the smallest arrow.
struct ModelWalk {
    verts: Vec<usize>,
    arrows: Vec<usize>,
    pos: BTreeMap<usize, usize>,
}

impl ModelWalk {
    fn new(g: &GentleQuiver, st: &Structure) -> Result<Self> {
        let idx = &g.idx;
        let outer: Vec<usize> = outer_arrows(g, st)?.into_values().collect();
        let in_model: Vec<bool> = (0..idx.na()).map(|a| !outer.contains(&a)).collect();
        let model_arrows_at = |v: usize| -> Vec<usize> {
            idx.incident(v).filter(|&a| in_model[a]).collect()
        };
        let len = in_model.iter().filter(|&&b| b).count();
        let first = (0..idx.na())
            .find(|&a| in_model[a])
            .ok_or_else(|| breach("standard model has no arrows"))?;
        let mut verts = vec![idx.src[first]];
        let mut arrows = vec![first];
        let mut cur = idx.tgt[first];
        while arrows.len() < len {
            let at = model_arrows_at(cur);
            let prev = *arrows.last().unwrap();
            let next = match at[..] {
                [a, b] => {
                    if a == prev {
                        b
                    } else {
                        a
                    }
                }
                _ => return Err(breach("standard model is not a cycle")),
            };
            verts.push(cur);
            arrows.push(next);
            cur = if idx.src[next] == cur { idx.tgt[next] } else { idx.src[next] };
        }
        if cur != verts[0] || (0..idx.nv()).any(|v| model_arrows_at(v).len() != 2) {
            return Err(breach("standard model is not a cycle"));
        }
        let pos = arrows.iter().enumerate().map(|(j, &a)| (a, j)).collect();
        Ok(ModelWalk { verts, arrows, pos })
    }

    fn len(&self) -> usize {
        self.arrows.len()
    }

    /// The arrow leaving walk position `j` in direction `forward`, and the
    /// position reached.
    fn step(&self, j: usize, forward: bool) -> (usize, usize) {
        let l = self.len();
        if forward {
            (self.arrows[j], (j + 1) % l)
        } else {
            let k = (j + l - 1) % l;
            (self.arrows[k], k)
        }
    }
}

/// A free relation together with the path to the nearest oppositely
/// oriented relation ahead of it.
struct FreeRelation {
    rel: (usize, usize),
    k: u64,
    pairs: u64,
    /// `x_0, ..., x_k`
    xs: Vec<usize>,
    /// `gamma_1, ..., gamma_k` with whether each runs along the walk
    gammas: Vec<(usize, bool)>,
    y: usize,
    alpha_p: usize,
    y_p: usize,
}

fn free_relation(g: &GentleQuiver, st: &Structure, w: &ModelWalk, (a, b): (usize, usize)) -> Result<FreeRelation> {
    let idx = &g.idx;
    let pa = *w.pos.get(&a).ok_or_else(|| breach("free relation leaves the standard model"))?;
    let forward = idx.src[a] == w.verts[pa];
    let (mut j, y) = if forward {
        ((pa + 1) % w.len(), w.verts[pa])
    } else {
        (pa, w.verts[(pa + 1) % w.len()])
    };
    let (behind, _) = w.step(if forward { pa } else { (pa + 1) % w.len() }, !forward);
    if behind != b {
        return Err(breach("free relation is not a walk segment of the standard model"));
    }
    let mut xs = vec![w.verts[j]];
    let mut gammas = Vec::new();
    for _ in 0..w.len() {
        let (a1, j1) = w.step(j, forward);
        let (a2, _) = w.step(j1, forward);
        if idx.tgt[a1] == w.verts[j] && idx.src[a1] == w.verts[j1] && idx.is_rel(a1, a2) {
            let along_c = |&(gam, along): &(usize, bool)| along && !st.in_c[gam];
            let blocking = |&(gam, along): &(usize, bool)| !along || st.in_c[gam];
            let mut pairs = 0;
            for i in 0..gammas.len() {
                for jj in 0..i {
                    if along_c(&gammas[i]) && blocking(&gammas[jj]) {
                        pairs += 1;
                    }
                }
            }
            return Ok(FreeRelation {
                rel: (a, b),
                k: gammas.len() as u64,
                pairs,
                xs,
                gammas,
                y,
                alpha_p: a1,
                y_p: w.verts[j1],
            });
        }
        gammas.push((a1, idx.src[a1] == w.verts[j]));
        xs.push(w.verts[j1]);
        j = j1;
    }
    Err(breach("no oppositely oriented relation in the standard model"))
}

fn free_relations(g: &GentleQuiver) -> Result<(Structure, Vec<FreeRelation>)> {
    let view = AtildeView::new(g)?;
    if view.branch_arrow_count() > 0 || view.branch_triangle_count() > 0 {
        return Err(Error::Precondition("quiver has branch arrows or branch triangles".into()));
    }
    let st = view.st;
    let w = ModelWalk::new(g, &st)?;
    let mut rels: Vec<(usize, usize)> = g
        .idx
        .rel
        .iter()
        .copied()
        .filter(|&(a, b)| !st.in_c[a] && !st.in_c[b])
        .collect();
    rels.sort();
    let mut out = rels
        .into_iter()
        .map(|r| free_relation(g, &st, &w, r))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|f| (f.k, f.pairs, f.rel.0.min(f.rel.1), f.rel));
    Ok((st, out))
}

fn free_measure(g: &GentleQuiver) -> Result<MeasureSnapshot> {
    let (_, frees) = free_relations(g)?;
    Ok(match frees.first() {
        Some(f) => MeasureSnapshot::skp(frees.len() as u64, Bound::Finite(f.k), f.pairs),
        None => MeasureSnapshot::skp(0, Bound::Infinite, 0),
    })
}

fn free_plan(g: &GentleQuiver) -> Result<Plan> {
    let (st, frees) = free_relations(g)?;
    let f = frees.first().ok_or_else(|| breach("planning with no free relation"))?;
    let r = |v: usize| RewriteStep::Reflect(vid(g, v));
    let c = |v: usize| RewriteStep::Coreflect(vid(g, v));
    let both = |v: usize| vec![vec![r(v)], vec![c(v)]];
    let k = f.gammas.len();
    let ordered_prefix = |&(gam, along): &(usize, bool)| along && !st.in_c[gam];
    if f.pairs > 0 {
        let mut plan = Vec::new();
        for i in 1..k {
            let (prev, next) = (f.gammas[i - 1], f.gammas[i]);
            if ordered_prefix(&next) && !ordered_prefix(&prev) {
                plan.extend(both(f.xs[i]));
            }
        }
        return Ok(plan);
    }
    let l = f.gammas.iter().take_while(|gm| ordered_prefix(gm)).count();
    Ok(if l > 0 {
        both(f.xs[0])
    } else if l < k {
        let mut p = both(f.xs[k]);
        if st.in_c[f.alpha_p] {
            p.reverse();
        }
        p
    } else if st.in_c[f.alpha_p] {
        vec![vec![r(f.xs[0]), r(f.y_p)]]
    } else {
        vec![vec![r(f.xs[0]), r(f.y), r(f.y_p)]]
    })
}

// ---------------------------------------------------------------- pipelines

fn require_class(g: &GentleQuiver) -> Result<()> {
    if decompose_class_a_tilde(&aag_invariant(g)?).is_none() {
        return Err(Error::Precondition("quiver is not in class Ã".into()));
    }
    Ok(())
}

/// Removes branch arrows and branch triangles from a quiver in class Ã
/// without branch relations.
pub fn eliminate_branch_arrows_and_triangles(g: &GentleQuiver) -> Result<NormalizationResult> {
    require_class(g)?;
    let mut run = Runner::new(g)?;
    run.phase(generic_cap(g), branches_measure, branches_plan)?;
    Ok(run.finish())
}

/// Removes free relations from a quiver in class Ã without branch arrows
/// and branch triangles.
pub fn eliminate_free_relations(g: &GentleQuiver) -> Result<NormalizationResult> {
    require_class(g)?;
    let mut run = Runner::new(g)?;
    run.phase(generic_cap(g), free_measure, free_plan)?;
    Ok(run.finish())
}

/// Takes a quiver in class Ã to a cluster tilted quiver of type Ã.
pub fn normalize_a_tilde(g: &GentleQuiver) -> Result<NormalizationResult> {
    require_class(g)?;
    let mut run = Runner::new(g)?;
    let cap = generic_cap(g);
    run.phase(cap, branch_relation_measure, branch_relation_plan)?;
    run.phase(cap, branches_measure, branches_plan)?;
    run.phase(cap, free_measure, free_plan)?;
    let result = run.finish();
    if classify(&result.final_quiver)?.cluster_tilted != Some(ClusterType::TypeAtilde) {
        return Err(breach("type Ã normalization ended outside the cluster tilted quivers"));
    }
    Ok(result)
}
