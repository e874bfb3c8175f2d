//! Quivers with monomial relations of length two.
//!
//! Paths are written right to left: a relation `(first, second)` requires
//! `source(first) == target(second)` and stands for the walk "traverse
//! `second`, then `first`".

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gentle::{GentlenessViolation, ViolationKind};

fn is_token(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

macro_rules! token_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self> {
                let name = name.into();
                if is_token(&name) {
                    Ok(Self(name))
                } else {
                    Err(Error::InvalidToken(name))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;
            fn try_from(s: String) -> Result<Self> {
                Self::new(s)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = Error;
            fn try_from(s: &str) -> Result<Self> {
                Self::new(s)
            }
        }

        impl From<$name> for String {
            fn from(v: $name) -> String {
                v.0
            }
        }
    };
}

token_newtype!(
    /// Name of a vertex.
    VertexId
);
token_newtype!(
    /// Name of an arrow.
    ArrowId
);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: ArrowId,
    pub source: VertexId,
    pub target: VertexId,
}

impl Arrow {
    pub fn new(id: &str, source: &str, target: &str) -> Result<Self> {
        Ok(Arrow {
            id: ArrowId::new(id)?,
            source: VertexId::new(source)?,
            target: VertexId::new(target)?,
        })
    }

    pub fn is_loop(&self) -> bool {
        self.source == self.target
    }
}

/// A zero relation `(first, second)`: the composite "`second` then `first`".
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub first: ArrowId,
    pub second: ArrowId,
}

impl Relation {
    pub fn new(first: &str, second: &str) -> Result<Self> {
        Ok(Relation {
            first: ArrowId::new(first)?,
            second: ArrowId::new(second)?,
        })
    }

    pub fn arrows(&self) -> [&ArrowId; 2] {
        [&self.first, &self.second]
    }

    pub fn mentions(&self, a: &ArrowId) -> bool {
        &self.first == a || &self.second == a
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// A finite quiver together with a set of length-two zero relations.
///
/// Construction checks referential integrity only (declared vertices,
/// unique ids, composable relations); gentleness is checked separately by
/// [`crate::validate_gentle`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuiverWithRelations {
    vertices: BTreeSet<VertexId>,
    arrows: BTreeMap<ArrowId, Arrow>,
    relations: BTreeSet<Relation>,
}

impl QuiverWithRelations {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        arrows: impl IntoIterator<Item = Arrow>,
        relations: impl IntoIterator<Item = Relation>,
    ) -> Result<Self> {
        let mut vset = BTreeSet::new();
        for v in vertices {
            if !vset.insert(v.clone()) {
                return Err(Error::DuplicateVertex(v));
            }
        }
        if vset.is_empty() {
            return Err(Error::NoVertices);
        }
        let mut amap = BTreeMap::new();
        for a in arrows {
            for v in [&a.source, &a.target] {
                if !vset.contains(v) {
                    return Err(Error::UndeclaredVertex {
                        arrow: a.id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
            if amap.contains_key(&a.id) {
                return Err(Error::DuplicateArrow(a.id));
            }
            amap.insert(a.id.clone(), a);
        }
        let mut rset = BTreeSet::new();
        for r in relations {
            let (Some(first), Some(second)) = (amap.get(&r.first), amap.get(&r.second)) else {
                let missing: Vec<ArrowId> = r
                    .arrows()
                    .into_iter()
                    .filter(|a| !amap.contains_key(*a))
                    .cloned()
                    .collect();
                return Err(Error::MalformedRelation(GentlenessViolation::new(
                    ViolationKind::DanglingRelation,
                    vec![],
                    missing,
                )));
            };
            if first.source != second.target {
                return Err(Error::MalformedRelation(GentlenessViolation::new(
                    ViolationKind::BadRelationComposability,
                    vec![first.source.clone(), second.target.clone()],
                    vec![r.first.clone(), r.second.clone()],
                )));
            }
            if !rset.insert(r.clone()) {
                return Err(Error::DuplicateRelation(r));
            }
        }
        Ok(QuiverWithRelations {
            vertices: vset,
            arrows: amap,
            relations: rset,
        })
    }

    /// Convenience constructor from string literals; panics on malformed input.
    /// Intended for fixtures and tests.
    pub fn from_strs(vertices: &[&str], arrows: &[(&str, &str, &str)], relations: &[(&str, &str)]) -> Self {
        Self::try_from_strs(vertices, arrows, relations).expect("malformed quiver literal")
    }

    pub fn try_from_strs(
        vertices: &[&str],
        arrows: &[(&str, &str, &str)],
        relations: &[(&str, &str)],
    ) -> Result<Self> {
        let vs = vertices.iter().map(|v| VertexId::new(*v)).collect::<Result<Vec<_>>>()?;
        let arr = arrows
            .iter()
            .map(|(id, s, t)| Arrow::new(id, s, t))
            .collect::<Result<Vec<_>>>()?;
        let rels = relations
            .iter()
            .map(|(a, b)| Relation::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vs, arr, rels)
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &VertexId> + '_ {
        self.vertices.iter()
    }

    pub fn arrows(&self) -> impl ExactSizeIterator<Item = &Arrow> + '_ {
        self.arrows.values()
    }

    pub fn relations(&self) -> impl ExactSizeIterator<Item = &Relation> + '_ {
        self.relations.iter()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn arrow(&self, id: &ArrowId) -> Option<&Arrow> {
        self.arrows.get(id)
    }

    pub fn has_relation(&self, first: &ArrowId, second: &ArrowId) -> bool {
        // BTreeSet lookup needs an owned key; relations are small.
        self.relations
            .iter()
            .any(|r| &r.first == first && &r.second == second)
    }

    pub fn contains_relation(&self, r: &Relation) -> bool {
        self.relations.contains(r)
    }

    pub fn has_loops(&self) -> bool {
        self.arrows.values().any(Arrow::is_loop)
    }

    /// Deletes the given arrows and every relation mentioning one of them.
    /// The vertex set is kept.
    pub fn remove_arrows(&self, ids: &BTreeSet<ArrowId>) -> Result<Self> {
        if let Some(unknown) = ids.iter().find(|id| !self.arrows.contains_key(*id)) {
            return Err(Error::UnknownArrow(unknown.clone()));
        }
        Ok(QuiverWithRelations {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .filter(|(id, _)| !ids.contains(*id))
                .map(|(id, a)| (id.clone(), a.clone()))
                .collect(),
            relations: self
                .relations
                .iter()
                .filter(|r| !ids.contains(&r.first) && !ids.contains(&r.second))
                .cloned()
                .collect(),
        })
    }

    /// Reverses every arrow; `(first, second)` becomes `(second, first)`.
    pub fn opposite(&self) -> Self {
        QuiverWithRelations {
            vertices: self.vertices.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|(id, a)| {
                    (
                        id.clone(),
                        Arrow {
                            id: id.clone(),
                            source: a.target.clone(),
                            target: a.source.clone(),
                        },
                    )
                })
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|r| Relation {
                    first: r.second.clone(),
                    second: r.first.clone(),
                })
                .collect(),
        }
    }

    /// Same quiver with the given arrow ids renamed; ids not in the map are kept.
    pub fn rename_arrows(&self, map: &BTreeMap<ArrowId, ArrowId>) -> Result<Self> {
        let rn = |a: &ArrowId| map.get(a).cloned().unwrap_or_else(|| a.clone());
        Self::new(
            self.vertices.iter().cloned(),
            self.arrows.values().map(|a| Arrow {
                id: rn(&a.id),
                source: a.source.clone(),
                target: a.target.clone(),
            }),
            self.relations.iter().map(|r| Relation {
                first: rn(&r.first),
                second: rn(&r.second),
            }),
        )
    }

    pub fn rename_vertices(&self, map: &BTreeMap<VertexId, VertexId>) -> Result<Self> {
        let rn = |v: &VertexId| map.get(v).cloned().unwrap_or_else(|| v.clone());
        Self::new(
            self.vertices.iter().map(rn),
            self.arrows.values().map(|a| Arrow {
                id: a.id.clone(),
                source: rn(&a.source),
                target: rn(&a.target),
            }),
            self.relations.iter().cloned(),
        )
    }

    pub(crate) fn index(&self) -> Index {
        Index::new(self)
    }

    pub fn is_connected(&self) -> bool {
        let idx = self.index();
        idx.components(&[]).1 == 1
    }

    /// True iff removing the arrow disconnects the underlying undirected graph.
    pub fn is_branch_arrow(&self, id: &ArrowId) -> Result<bool> {
        let idx = self.index();
        let a = idx.arrow(id).ok_or_else(|| Error::UnknownArrow(id.clone()))?;
        Ok(idx.is_bridge(a))
    }
}

/// Integer-indexed adjacency view of a quiver. Vertices and arrows are
/// numbered in their sorted id order.
#[derive(Clone, Debug)]
pub(crate) struct Index {
    pub vertex_ids: Vec<VertexId>,
    pub arrow_ids: Vec<ArrowId>,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
    pub rel: HashSet<(usize, usize)>,
    vertex_pos: HashMap<VertexId, usize>,
    arrow_pos: HashMap<ArrowId, usize>,
}

impl Index {
    fn new(q: &QuiverWithRelations) -> Self {
        let vertex_ids: Vec<VertexId> = q.vertices.iter().cloned().collect();
        let vertex_pos: HashMap<VertexId, usize> = vertex_ids
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let arrow_ids: Vec<ArrowId> = q.arrows.keys().cloned().collect();
        let arrow_pos: HashMap<ArrowId, usize> = arrow_ids
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let nv = vertex_ids.len();
        let mut src = Vec::with_capacity(arrow_ids.len());
        let mut tgt = Vec::with_capacity(arrow_ids.len());
        let mut out = vec![Vec::new(); nv];
        let mut inc = vec![Vec::new(); nv];
        for (i, a) in q.arrows.values().enumerate() {
            let s = vertex_pos[&a.source];
            let t = vertex_pos[&a.target];
            src.push(s);
            tgt.push(t);
            out[s].push(i);
            inc[t].push(i);
        }
        let rel = q
            .relations
            .iter()
            .map(|r| (arrow_pos[&r.first], arrow_pos[&r.second]))
            .collect();
        Index {
            vertex_ids,
            arrow_ids,
            src,
            tgt,
            out,
            inc,
            rel,
            vertex_pos,
            arrow_pos,
        }
    }

    pub fn nv(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn na(&self) -> usize {
        self.arrow_ids.len()
    }

    pub fn vertex(&self, v: &VertexId) -> Option<usize> {
        self.vertex_pos.get(v).copied()
    }

    pub fn arrow(&self, a: &ArrowId) -> Option<usize> {
        self.arrow_pos.get(a).copied()
    }

    pub fn is_rel(&self, first: usize, second: usize) -> bool {
        self.rel.contains(&(first, second))
    }

    /// Connected components of the underlying graph with the `removed`
    /// arrows deleted. Returns the component label of each vertex and the
    /// number of components.
    pub fn components(&self, removed: &[usize]) -> (Vec<usize>, usize) {
        let nv = self.nv();
        let mut dead = vec![false; self.na()];
        for &a in removed {
            dead[a] = true;
        }
        let mut label = vec![usize::MAX; nv];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..nv {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &a in self.out[v].iter().chain(self.inc[v].iter()) {
                    if dead[a] {
                        continue;
                    }
                    let w = if self.src[a] == v { self.tgt[a] } else { self.src[a] };
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_bridge(&self, a: usize) -> bool {
        let (label, _) = self.components(&[a]);
        label[self.src[a]] != label[self.tgt[a]]
    }

    pub fn bridges(&self) -> Vec<bool> {
        (0..self.na()).map(|a| self.is_bridge(a)).collect()
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out[v].iter().chain(self.inc[v].iter()).copied()
    }
}
