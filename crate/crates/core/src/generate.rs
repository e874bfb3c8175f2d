//! Seeded random instances: gentle trees, 1-cycle quivers, arbitrary gentle
//! quivers, and their completions landing in class A or Ã.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{decompose_class_a, decompose_class_a_tilde};
use crate::dsl::QuiverDocument;
use crate::error::{Error, Result};
use crate::gentle::{validate_gentle, GentleQuiver};
use crate::invariant::aag_invariant;
use crate::quiver::{Arrow, QuiverWithRelations, Relation};
use crate::transforms::{complete_relations, isolated_relations, Completion};

/// Candidates tried before giving up on a seed.
pub const REJECTION_BUDGET: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceClass {
    A,
    Atilde,
}

impl FromStr for InstanceClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(InstanceClass::A),
            "Atilde" | "atilde" | "A~" => Ok(InstanceClass::Atilde),
            _ => Err(Error::Precondition(format!("unknown class `{s}`; expected A or Atilde"))),
        }
    }
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InstanceClass::A => "A",
            InstanceClass::Atilde => "Atilde",
        })
    }
}

/// Arrows as `(source, target)` vertex numbers.
type Skeleton = Vec<(usize, usize)>;

fn vertex_name(v: usize) -> String {
    format!("{}", v + 1)
}

fn arrow_name(a: usize) -> String {
    format!("a{}", a + 1)
}

struct Degrees {
    out: Vec<usize>,
    inc: Vec<usize>,
}

impl Degrees {
    fn new(n: usize) -> Self {
        Degrees {
            out: vec![0; n],
            inc: vec![0; n],
        }
    }

    fn fits(&self, s: usize, t: usize) -> bool {
        self.out[s] < 2 && self.inc[t] < 2
    }

    fn add(&mut self, s: usize, t: usize) {
        self.out[s] += 1;
        self.inc[t] += 1;
    }
}

/// Attaches vertices `first..n` one at a time to random earlier vertices.
fn grow_tree(rng: &mut impl Rng, arrows: &mut Skeleton, deg: &mut Degrees, first: usize, n: usize) {
    for k in first..n {
        let mut options = Vec::new();
        for u in 0..k {
            if deg.fits(u, k) {
                options.push((u, k));
            }
            if deg.fits(k, u) {
                options.push((k, u));
            }
        }
        let &(s, t) = options.choose(rng).expect("a tree always has a free slot");
        deg.add(s, t);
        arrows.push((s, t));
    }
}

fn random_tree(rng: &mut impl Rng, n: usize) -> Skeleton {
    let mut arrows = Vec::new();
    let mut deg = Degrees::new(n);
    grow_tree(rng, &mut arrows, &mut deg, 1, n);
    arrows
}

/// A cycle through vertices `0..len` with random orientations, then trees.
fn random_one_cycle(rng: &mut impl Rng, n: usize, len: usize) -> Skeleton {
    let mut arrows = Vec::new();
    let mut deg = Degrees::new(n);
    for i in 0..len {
        let (u, w) = (i, (i + 1) % len);
        let (s, t) = if rng.gen_bool(0.5) { (u, w) } else { (w, u) };
        deg.add(s, t);
        arrows.push((s, t));
    }
    grow_tree(rng, &mut arrows, &mut deg, len, n);
    arrows
}

/// Chooses relations vertex by vertex so that the local gentle conditions
/// hold: at each vertex, relations and non-relations pair in-arrows with
/// out-arrows injectively.
fn random_relations(rng: &mut impl Rng, n: usize, arrows: &Skeleton) -> Vec<(usize, usize)> {
    let mut rels = Vec::new();
    for v in 0..n {
        let ins: Vec<usize> = (0..arrows.len()).filter(|&a| arrows[a].1 == v).collect();
        let outs: Vec<usize> = (0..arrows.len()).filter(|&a| arrows[a].0 == v).collect();
        match (ins.len(), outs.len()) {
            (2, 2) => {
                let flip = rng.gen_bool(0.5) as usize;
                rels.push((outs[0], ins[flip]));
                rels.push((outs[1], ins[1 - flip]));
            }
            (1, 2) => rels.push((outs[rng.gen_range(0..2)], ins[0])),
            (2, 1) => rels.push((outs[0], ins[rng.gen_range(0..2)])),
            (1, 1) if rng.gen_bool(0.5) => rels.push((outs[0], ins[0])),
            _ => {}
        }
    }
    rels
}

fn build(n: usize, arrows: &Skeleton, rels: &[(usize, usize)]) -> QuiverWithRelations {
    QuiverWithRelations::new(
        (0..n).map(|v| crate::quiver::VertexId::new(vertex_name(v)).expect("numeric names")),
        arrows.iter().enumerate().map(|(i, &(s, t))| {
            Arrow::new(&arrow_name(i), &vertex_name(s), &vertex_name(t)).expect("generated names")
        }),
        rels.iter()
            .map(|&(a, b)| Relation::new(&arrow_name(a), &arrow_name(b)).expect("generated names")),
    )
    .expect("generated quivers are well formed")
}

/// Completes a random `fraction` of the isolated relations.
fn complete_fraction(rng: &mut impl Rng, g: &GentleQuiver, fraction: f64) -> Result<Option<GentleQuiver>> {
    let mut iso: Vec<Relation> = isolated_relations(g)?.into_iter().collect();
    iso.shuffle(rng);
    let k = (fraction * iso.len() as f64).round() as usize;
    iso.truncate(k.min(iso.len()));
    Ok(match complete_relations(g, &iso)? {
        Completion::Gentle { quiver, .. } => Some(quiver),
        Completion::NotGentle { .. } => None,
    })
}

/// A random gentle quiver on `n` vertices: a tree plus `extra` arrows placed
/// wherever the degree bounds allow (loops included), with random relations.
pub fn random_gentle_quiver(n: usize, extra: usize, seed: u64) -> Result<GentleQuiver> {
    if n == 0 {
        return Err(Error::Precondition("need at least one vertex".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_BUDGET {
        let mut arrows = Vec::new();
        let mut deg = Degrees::new(n);
        grow_tree(&mut rng, &mut arrows, &mut deg, 1, n);
        for _ in 0..extra {
            let free: Vec<(usize, usize)> = (0..n)
                .flat_map(|s| (0..n).map(move |t| (s, t)))
                .filter(|&(s, t)| deg.fits(s, t))
                .collect();
            let Some(&(s, t)) = free.choose(&mut rng) else {
                break;
            };
            deg.add(s, t);
            arrows.push((s, t));
        }
        let rels = random_relations(&mut rng, n, &arrows);
        if let Ok(g) = validate_gentle(&build(n, &arrows, &rels)) {
            return Ok(g);
        }
    }
    Err(Error::RejectionBudgetExhausted {
        attempts: REJECTION_BUDGET,
    })
}

/// A random gentle quiver of tree type on `n` vertices.
pub fn random_gentle_tree(n: usize, seed: u64) -> Result<GentleQuiver> {
    if n == 0 {
        return Err(Error::Precondition("need at least one vertex".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrows = random_tree(&mut rng, n);
    let rels = random_relations(&mut rng, n, &arrows);
    validate_gentle(&build(n, &arrows, &rels))
        .map_err(|v| crate::error::breach(format!("random tree is not gentle: {v:?}")))
}

/// A random finite-dimensional 1-cycle gentle quiver on `n >= 2` vertices.
pub fn random_one_cycle_quiver(n: usize, seed: u64) -> Result<GentleQuiver> {
    if n < 2 {
        return Err(Error::Precondition("a 1-cycle instance needs at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_BUDGET {
        if let Some(g) = one_cycle_candidate(&mut rng, n) {
            return Ok(g);
        }
    }
    Err(Error::RejectionBudgetExhausted {
        attempts: REJECTION_BUDGET,
    })
}

fn one_cycle_candidate(rng: &mut impl Rng, n: usize) -> Option<GentleQuiver> {
    let len = rng.gen_range(2..=n);
    let arrows = random_one_cycle(rng, n, len);
    let rels = random_relations(rng, n, &arrows);
    validate_gentle(&build(n, &arrows, &rels)).ok()
}

/// A random instance in class A or Ã, following the completion construction:
/// a random tree (resp. 1-cycle quiver) with a random `fraction` of its
/// isolated relations completed. Ã candidates whose invariant leaves the
/// class, or whose completion is not gentle, are rejected.
pub fn generate_random_instance(class: InstanceClass, vertices: usize, fraction: f64, seed: u64) -> Result<QuiverDocument> {
    if vertices < 2 {
        return Err(Error::Precondition("need at least two vertices".into()));
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Precondition(format!("fraction {fraction} is outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..REJECTION_BUDGET {
        let base = match class {
            InstanceClass::A => {
                let arrows = random_tree(&mut rng, vertices);
                let rels = random_relations(&mut rng, vertices, &arrows);
                validate_gentle(&build(vertices, &arrows, &rels)).ok()
            }
            InstanceClass::Atilde => one_cycle_candidate(&mut rng, vertices),
        };
        let Some(base) = base else { continue };
        let Some(done) = complete_fraction(&mut rng, &base, fraction)? else {
            continue;
        };
        let f = aag_invariant(&done)?;
        let ok = match class {
            InstanceClass::A => decompose_class_a(&f).is_some(),
            InstanceClass::Atilde => decompose_class_a_tilde(&f).is_some(),
        };
        if ok {
            let name = format!("random_{}_{}", class.to_string().to_lowercase(), seed);
            return Ok(QuiverDocument::new(name, done.into_presentation()));
        }
        if class == InstanceClass::A {
            return Err(crate::error::breach(format!(
                "completion of a gentle tree left class A: {f}"
            )));
        }
    }
    Err(Error::RejectionBudgetExhausted {
        attempts: REJECTION_BUDGET,
    })
}
