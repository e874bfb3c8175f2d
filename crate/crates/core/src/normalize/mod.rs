//! Normalization pipelines: chains of reflections and coreflections taking a
//! quiver in class A or Ã to a cluster tilted quiver with the same invariant.

pub mod measures;
mod type_a;
mod type_a_tilde;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{breach, Error, Result};
use crate::gentle::GentleQuiver;
use crate::invariant::{aag_invariant, AagInvariant};
use crate::transforms::{RewriteStep, RewriteTrace};

pub use measures::{
    branch_relations_with_measure, branch_relations_with_measure_atilde, Bound, MeasureSnapshot, Phase,
};
pub use type_a::normalize_a;
pub use type_a_tilde::{eliminate_branch_arrows_and_triangles, eliminate_free_relations, normalize_a_tilde};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationResult {
    pub final_quiver: GentleQuiver,
    pub trace: RewriteTrace,
    /// one snapshot per iteration, plus a final one per phase
    pub measure_log: Vec<MeasureSnapshot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceCheck {
    Precondition,
    Gentleness,
    InvariantChanged,
    FinalMismatch,
}

/// First failing check when replaying a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceFailure {
    /// index of the failing step; `steps.len()` for the final comparison
    pub step: usize,
    pub check: TraceCheck,
    pub detail: String,
}

impl fmt::Display for TraceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {:?} check failed: {}", self.step, self.check, self.detail)
    }
}

/// Replays a trace from its initial quiver, checking each step's
/// precondition, gentleness of the result, invariance of the thread
/// invariant across (co)reflections, and the recorded final quiver.
pub fn verify_trace(trace: &RewriteTrace) -> Result<(), TraceFailure> {
    let fail = |step, check, detail: String| TraceFailure { step, check, detail };
    let mut g = trace.initial.clone();
    let mut f = aag_invariant(&g).map_err(|e| fail(0, TraceCheck::Gentleness, e.to_string()))?;
    for (i, step) in trace.steps.iter().enumerate() {
        g = step.apply(&g).map_err(|e| match e {
            Error::Precondition(_) | Error::UnknownVertex(_) | Error::UnknownArrow(_) => {
                fail(i, TraceCheck::Precondition, e.to_string())
            }
            _ => fail(i, TraceCheck::Gentleness, e.to_string()),
        })?;
        let next = aag_invariant(&g).map_err(|e| fail(i, TraceCheck::Gentleness, e.to_string()))?;
        if step.is_reflection() && next != f {
            return Err(fail(i, TraceCheck::InvariantChanged, format!("{f} became {next}")));
        }
        f = next;
    }
    if g.presentation() != trace.final_quiver.presentation() {
        return Err(fail(
            trace.steps.len(),
            TraceCheck::FinalMismatch,
            "replayed quiver differs from the recorded final quiver".into(),
        ));
    }
    Ok(())
}

/// Longest move sequence tried by the fallback search.
const SEARCH_DEPTH: usize = 3;

/// Candidate moves for one iteration, in order of preference.
pub(crate) type Plan = Vec<Vec<RewriteStep>>;

/// Accumulates the steps and measures of a pipeline run.
pub(crate) struct Runner {
    initial: GentleQuiver,
    pub current: GentleQuiver,
    steps: Vec<RewriteStep>,
    log: Vec<MeasureSnapshot>,
    f: AagInvariant,
}

impl Runner {
    pub fn new(g: &GentleQuiver) -> Result<Self> {
        if g.presentation().has_loops() {
            return Err(Error::Precondition("normalization does not accept loops".into()));
        }
        Ok(Runner {
            initial: g.clone(),
            current: g.clone(),
            steps: Vec::new(),
            log: Vec::new(),
            f: aag_invariant(g)?,
        })
    }

    /// Applies a whole sequence; `None` when some step is not applicable.
    fn try_sequence(&self, seq: &[RewriteStep]) -> Result<Option<GentleQuiver>> {
        let mut g = self.current.clone();
        for step in seq {
            g = match step.apply(&g) {
                Ok(next) => next,
                Err(Error::Precondition(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            if step.is_reflection() && aag_invariant(&g)? != self.f {
                return Err(breach(format!("{step} changed the thread invariant")));
            }
        }
        Ok(Some(g))
    }

    /// Iterates one phase until its measure reports completion. Each
    /// iteration takes the first planned move whose result has a strictly
    /// smaller measure.
    pub fn phase(
        &mut self,
        cap: usize,
        measure: impl Fn(&GentleQuiver) -> Result<MeasureSnapshot>,
        plan: impl Fn(&GentleQuiver) -> Result<Plan>,
    ) -> Result<()> {
        let mut iterations = 0;
        loop {
            let snap = measure(&self.current)?;
            let phase = snap.phase;
            let done = snap.is_done();
            let key = snap.key();
            self.log.push(snap);
            if done {
                return Ok(());
            }
            iterations += 1;
            if iterations > cap {
                return Err(Error::CapExceeded {
                    phase: format!("{phase:?}"),
                    cap,
                });
            }
            let mut accepted = None;
            for seq in plan(&self.current)? {
                let Some(next) = self.try_sequence(&seq)? else { continue };
                match measure(&next) {
                    Ok(m) if m.key() < key => {
                        accepted = Some((seq, next));
                        break;
                    }
                    Ok(_) | Err(Error::Precondition(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            if accepted.is_none() {
                accepted = match self.search(&key, &measure)? {
                    Some((seq, _)) => self.try_sequence(&seq)?.map(|next| (seq, next)),
                    None => None,
                };
            }
            let Some((seq, next)) = accepted else {
                return Err(breach(format!("{phase:?}: no planned move decreases the measure {key:?}")));
            };
            self.steps.extend(seq);
            self.current = next;
        }
    }

    /// Fallback when no planned move works: breadth first over sequences
    /// of at most `SEARCH_DEPTH` (co)reflections, in vertex order, for the
    /// first one whose result has a smaller measure.
    fn search(
        &self,
        key: &[Bound],
        measure: &impl Fn(&GentleQuiver) -> Result<MeasureSnapshot>,
    ) -> Result<Option<(Vec<RewriteStep>, GentleQuiver)>> {
        let moves: Vec<RewriteStep> = self
            .current
            .presentation()
            .vertices()
            .flat_map(|v| [RewriteStep::Reflect(v.clone()), RewriteStep::Coreflect(v.clone())])
            .collect();
        let mut seen = HashSet::from([self.current.presentation().clone()]);
        let mut frontier = vec![(Vec::new(), self.current.clone())];
        for _ in 0..SEARCH_DEPTH {
            let mut next_frontier = Vec::new();
            for (seq, g) in &frontier {
                for step in &moves {
                    let h = match step.apply(g) {
                        Ok(h) => h,
                        Err(Error::Precondition(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    if !seen.insert(h.presentation().clone()) {
                        continue;
                    }
                    let mut seq = seq.clone();
                    seq.push(step.clone());
                    match measure(&h) {
                        Ok(m) if m.key().as_slice() < key => return Ok(Some((seq, h))),
                        Ok(_) | Err(Error::Precondition(_)) => {}
                        Err(e) => return Err(e),
                    }
                    next_frontier.push((seq, h));
                }
            }
            frontier = next_frontier;
        }
        Ok(None)
    }

    pub fn finish(self) -> NormalizationResult {
        NormalizationResult {
            final_quiver: self.current.clone(),
            trace: RewriteTrace {
                initial: self.initial,
                steps: self.steps,
                final_quiver: self.current,
            },
            measure_log: self.log,
        }
    }
}

/// Cap shared by the phases without a sharper bound.
pub(crate) fn generic_cap(g: &GentleQuiver) -> usize {
    (g.num_vertices() + g.num_arrows() + 1).pow(3)
}
