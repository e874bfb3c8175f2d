use crate::classify::{classify, decompose_class_a, ClusterType};
use crate::error::{breach, Error, Result};
use crate::gentle::GentleQuiver;
use crate::invariant::aag_invariant;
use crate::structure::Structure;
use crate::transforms::RewriteStep;

use super::measures::{branch_relation_indices, target_side, Bound, MeasureSnapshot, Phase};
use super::{NormalizationResult, Plan, Runner};

/// Branch relations with their measure, in selection order.
fn ranked(g: &GentleQuiver) -> Result<Vec<(u64, (usize, usize))>> {
    let st = Structure::new(g)?;
    let mut v: Vec<(u64, (usize, usize))> = branch_relation_indices(g, &st)
        .into_iter()
        .map(|(a, b)| (target_side(g, a), (a, b)))
        .collect();
    // arrow indices follow id order, so the smaller index is the smaller id
    v.sort_by_key(|&(n, (a, b))| (n, a.min(b), a, b));
    Ok(v)
}

fn measure(g: &GentleQuiver) -> Result<MeasureSnapshot> {
    let v = ranked(g)?;
    let n = v.first().map_or(Bound::Infinite, |&(n, _)| Bound::Finite(n));
    Ok(MeasureSnapshot::rn(Phase::BranchRelationsA, v.len() as u64, n))
}

fn plan(g: &GentleQuiver) -> Result<Plan> {
    let v = ranked(g)?;
    let &(_, (a, _)) = v.first().ok_or_else(|| breach("planning with no branch relation"))?;
    let x = g.idx.vertex_ids[g.idx.tgt[a]].clone();
    Ok(vec![vec![RewriteStep::Reflect(x)]])
}

/// Removes every branch relation of a quiver in class A by reflections.
/// The result is a cluster tilted quiver of type A.
pub fn normalize_a(g: &GentleQuiver) -> Result<NormalizationResult> {
    if decompose_class_a(&aag_invariant(g)?).is_none() {
        return Err(Error::Precondition("quiver is not in class A".into()));
    }
    let mut run = Runner::new(g)?;
    let ranked0 = ranked(g)?;
    let r = ranked0.len();
    let max_n = ranked0.iter().map(|&(n, _)| n as usize).max().unwrap_or(0);
    let cap = g.num_vertices() * (r + 1) * (max_n + 1);
    run.phase(cap, measure, plan)?;
    let result = run.finish();
    if classify(&result.final_quiver)?.cluster_tilted != Some(ClusterType::TypeA) {
        return Err(breach("type A normalization ended outside the cluster tilted quivers"));
    }
    Ok(result)
}
