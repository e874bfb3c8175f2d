//! Membership in the derived classes of type A and Ã, cluster-tiltedness,
//! Gorenstein dimension and derived equivalence of pairs.

use serde::{Deserialize, Serialize};

use crate::error::{breach, Result};
use crate::gentle::GentleQuiver;
use crate::invariant::{aag_invariant, invariant_of_system, AagInvariant};
use crate::structure::Structure;
use crate::threads::{build_thread_system, ThreadSystem};

/// `f = m*[0,3] + [p+m+2, p]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassDecompositionA {
    pub m: u64,
    pub p: u64,
}

/// `f = (m1+m2)*[0,3] + [p+m1, p] + [q+m2, q]`, with the summand of larger
/// `(p+m1, p)` listed first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassDecompositionAtilde {
    pub m1: u64,
    pub m2: u64,
    pub p: u64,
    pub q: u64,
}

impl ClassDecompositionA {
    pub fn to_invariant(self) -> AagInvariant {
        AagInvariant::point(0, 3).scaled(self.m) + AagInvariant::point(self.p + self.m + 2, self.p)
    }
}

impl ClassDecompositionAtilde {
    pub fn to_invariant(self) -> AagInvariant {
        AagInvariant::point(0, 3).scaled(self.m1 + self.m2)
            + AagInvariant::point(self.p + self.m1, self.p)
            + AagInvariant::point(self.q + self.m2, self.q)
    }
}

/// Removes `f(0,3)` copies of `[0,3]` and returns the count and the rest.
fn strip_triangles(f: &AagInvariant) -> (u64, AagInvariant) {
    let m = f.eval(0, 3);
    let mut rest = f.clone();
    rest.remove_point(0, 3, m);
    (m, rest)
}

pub fn decompose_class_a(f: &AagInvariant) -> Option<ClassDecompositionA> {
    let (m, rest) = strip_triangles(f);
    match rest.points()[..] {
        [(a, b)] if a == b + m + 2 => Some(ClassDecompositionA { m, p: b }),
        _ => None,
    }
}

pub fn decompose_class_a_tilde(f: &AagInvariant) -> Option<ClassDecompositionAtilde> {
    let (m, rest) = strip_triangles(f);
    let [(c, d), (a, b)] = rest.points()[..] else {
        return None;
    };
    if a < b || c < d || a == 0 || c == 0 || (a - b) + (c - d) != m {
        return None;
    }
    Some(ClassDecompositionAtilde {
        m1: a - b,
        m2: c - d,
        p: b,
        q: d,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GorensteinDimension {
    Exact(u64),
    /// no maximal antipaths: the dimension is 0 or 1
    AtMostOne,
}

impl GorensteinDimension {
    pub fn at_most_one(self) -> bool {
        !matches!(self, GorensteinDimension::Exact(n) if n > 1)
    }
}

impl std::fmt::Display for GorensteinDimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GorensteinDimension::Exact(n) => write!(f, "{n}"),
            GorensteinDimension::AtMostOne => f.write_str("<= 1"),
        }
    }
}

pub fn gorenstein_dimension(g: &GentleQuiver) -> Result<GorensteinDimension> {
    Ok(gorenstein_of_system(&build_thread_system(g)?))
}

fn gorenstein_of_system(ts: &ThreadSystem) -> GorensteinDimension {
    match ts.max_antipath_len() {
        Some(n) => GorensteinDimension::Exact(n as u64),
        None => GorensteinDimension::AtMostOne,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClusterType {
    TypeA,
    TypeAtilde,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    pub gentle: bool,
    pub tree_type: bool,
    pub one_cycle: bool,
    /// only decided for 1-cycle quivers
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub type_atilde: Option<bool>,
    pub class_a: Option<ClassDecompositionA>,
    pub class_atilde: Option<ClassDecompositionAtilde>,
    pub cluster_tilted: Option<ClusterType>,
    pub gorenstein: GorensteinDimension,
}

impl Classification {
    pub fn in_class(&self) -> bool {
        self.class_a.is_some() || self.class_atilde.is_some()
    }
}

/// Relations with at least one branch arrow.
pub(crate) fn branch_relation_count(g: &GentleQuiver, st: &Structure) -> usize {
    g.idx
        .rel
        .iter()
        .filter(|&&(a, b)| st.bridge[a] || st.bridge[b])
        .count()
}

/// Relations lying inside a triangle of the cycle set.
fn relations_in_triangles(g: &GentleQuiver, st: &Structure) -> bool {
    g.idx.rel.iter().all(|&(a, b)| {
        matches!((st.orbit_of[a], st.orbit_of[b]), (Some(x), Some(y)) if x == y && st.c_orbits[x].len() == 3)
    })
}

pub fn classify(g: &GentleQuiver) -> Result<Classification> {
    let ts = build_thread_system(g)?;
    let f = invariant_of_system(&ts);
    let gorenstein = gorenstein_of_system(&ts);
    let class_a = decompose_class_a(&f);
    let class_atilde = decompose_class_a_tilde(&f);
    if class_a.is_some() && class_atilde.is_some() {
        return Err(breach(format!("invariant {f} decomposes in both classes")));
    }
    let one_cycle = g.is_one_cycle();
    let type_atilde = one_cycle.then(|| {
        let pts = f.points();
        pts.len() == 2 && pts.iter().all(|&(p, q)| p == q)
    });

    let mut cluster_tilted = None;
    if class_a.is_some() || class_atilde.is_some() {
        let st = Structure::new(g)?;
        let by_dimension = gorenstein.at_most_one();
        let by_shape = if class_a.is_some() {
            branch_relation_count(g, &st) == 0
        } else {
            relations_in_triangles(g, &st)
        };
        if by_dimension != by_shape {
            return Err(breach(format!(
                "cluster-tilted routes disagree: Gorenstein dimension says {by_dimension}, shape says {by_shape}"
            )));
        }
        if by_shape {
            cluster_tilted = Some(if class_a.is_some() {
                ClusterType::TypeA
            } else {
                ClusterType::TypeAtilde
            });
        }
    }
    Ok(Classification {
        gentle: true,
        tree_type: g.is_tree_type(),
        one_cycle,
        type_atilde,
        class_a,
        class_atilde,
        cluster_tilted,
        gorenstein,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquivalenceVerdict {
    EquivalentInClass,
    NotEquivalent,
    /// equal invariants, but at least one quiver lies outside both classes
    InconclusiveEqualInvariant,
}

pub fn derived_equivalent(g1: &GentleQuiver, g2: &GentleQuiver) -> Result<EquivalenceVerdict> {
    let (f1, f2) = (aag_invariant(g1)?, aag_invariant(g2)?);
    if f1 != f2 {
        return Ok(EquivalenceVerdict::NotEquivalent);
    }
    let in_class = decompose_class_a(&f1).is_some() || decompose_class_a_tilde(&f1).is_some();
    Ok(if in_class {
        EquivalenceVerdict::EquivalentInClass
    } else {
        EquivalenceVerdict::InconclusiveEqualInvariant
    })
}
