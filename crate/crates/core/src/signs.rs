//! Sign functions `sigma`, `tau` on arrows.
//!
//! Each arrow carries two boolean variables. Every local condition of a
//! gentle quiver becomes a parity constraint between two variables, so a
//! consistent assignment is a two-colouring of a union-find forest with
//! parity-labelled edges.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Neg;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::{ArrowId, Index, QuiverWithRelations};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Sign, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_value(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be +1 or -1, got {v}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignAssignment {
    pub sigma: BTreeMap<ArrowId, Sign>,
    pub tau: BTreeMap<ArrowId, Sign>,
}

impl SignAssignment {
    pub fn sigma(&self, a: &ArrowId) -> Option<Sign> {
        self.sigma.get(a).copied()
    }

    pub fn tau(&self, a: &ArrowId) -> Option<Sign> {
        self.tau.get(a).copied()
    }

    /// Checks the three defining conditions against `q`, returning the
    /// arrows of the first violated one.
    pub fn check(&self, q: &QuiverWithRelations) -> Result<()> {
        let idx = q.index();
        let (sigma, tau) = self.to_vectors(&idx)?;
        match first_violation(&idx, &sigma, &tau) {
            None => Ok(()),
            Some(arrows) => Err(Error::SignInconsistency { arrows }),
        }
    }

    pub(crate) fn to_vectors(&self, idx: &Index) -> Result<(Vec<i8>, Vec<i8>)> {
        let mut sigma = Vec::with_capacity(idx.na());
        let mut tau = Vec::with_capacity(idx.na());
        for a in &idx.arrow_ids {
            let (Some(s), Some(t)) = (self.sigma.get(a), self.tau.get(a)) else {
                return Err(Error::UnknownArrow(a.clone()));
            };
            sigma.push(s.value());
            tau.push(t.value());
        }
        if self.sigma.len() != idx.na() || self.tau.len() != idx.na() {
            return Err(Error::Precondition(
                "sign assignment mentions arrows outside the quiver".into(),
            ));
        }
        Ok((sigma, tau))
    }

    pub(crate) fn from_vectors(idx: &Index, sigma: &[i8], tau: &[i8]) -> Self {
        let conv = |v: &[i8]| {
            idx.arrow_ids
                .iter()
                .zip(v)
                .map(|(a, &s)| (a.clone(), Sign::from_value(s).expect("sign is +-1")))
                .collect()
        };
        SignAssignment {
            sigma: conv(sigma),
            tau: conv(tau),
        }
    }
}

fn first_violation(idx: &Index, sigma: &[i8], tau: &[i8]) -> Option<Vec<ArrowId>> {
    let ids = |a: usize, b: usize| vec![idx.arrow_ids[a].clone(), idx.arrow_ids[b].clone()];
    for v in 0..idx.nv() {
        for (i, &a) in idx.out[v].iter().enumerate() {
            for &b in &idx.out[v][i + 1..] {
                if sigma[a] == sigma[b] {
                    return Some(ids(a, b));
                }
            }
        }
        for (i, &a) in idx.inc[v].iter().enumerate() {
            for &b in &idx.inc[v][i + 1..] {
                if tau[a] == tau[b] {
                    return Some(ids(a, b));
                }
            }
        }
        for &a in &idx.out[v] {
            for &b in &idx.inc[v] {
                if idx.is_rel(a, b) != (sigma[a] == tau[b]) {
                    return Some(ids(a, b));
                }
            }
        }
    }
    None
}

/// Union-find over variables with the parity of each variable relative to
/// its root.
struct ParityForest {
    parent: Vec<usize>,
    parity: Vec<u8>,
}

impl ParityForest {
    fn new(n: usize) -> Self {
        ParityForest {
            parent: (0..n).collect(),
            parity: vec![0; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, u8) {
        if self.parent[x] == x {
            return (x, 0);
        }
        let p = self.parent[x];
        let (root, pp) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= pp;
        (root, self.parity[x])
    }

    /// Records `value(a) xor value(b) == parity`; false on contradiction.
    fn union(&mut self, a: usize, b: usize, parity: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == parity;
        }
        // Attach the larger-numbered root below the smaller one.
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        self.parity[hi] = pa ^ pb ^ parity;
        true
    }
}

fn sigma_var(a: usize) -> usize {
    2 * a
}

fn tau_var(a: usize) -> usize {
    2 * a + 1
}

/// Canonical sign assignment: every constraint component is seeded by giving
/// its smallest variable the value +1, where variables are ordered by arrow
/// id and, for one arrow, `sigma` before `tau`.
pub fn compute_sign_assignment(q: &QuiverWithRelations) -> Result<SignAssignment> {
    let idx = q.index();
    let (sigma, tau) = solve(&idx, |_| false)?;
    Ok(SignAssignment::from_vectors(&idx, &sigma, &tau))
}

/// Like [`compute_sign_assignment`], but the seed of the component whose
/// smallest variable has number `k` is negated whenever `flip(k)` is true.
/// Every valid assignment arises this way.
pub fn compute_sign_assignment_with(
    q: &QuiverWithRelations,
    flip: impl Fn(usize) -> bool,
) -> Result<SignAssignment> {
    let idx = q.index();
    let (sigma, tau) = solve(&idx, flip)?;
    Ok(SignAssignment::from_vectors(&idx, &sigma, &tau))
}

pub(crate) fn solve(idx: &Index, flip: impl Fn(usize) -> bool) -> Result<(Vec<i8>, Vec<i8>)> {
    let na = idx.na();
    let mut forest = ParityForest::new(2 * na);
    let fail = |a: usize, b: usize| Error::SignInconsistency {
        arrows: vec![idx.arrow_ids[a].clone(), idx.arrow_ids[b].clone()],
    };
    for v in 0..idx.nv() {
        for (i, &a) in idx.out[v].iter().enumerate() {
            for &b in &idx.out[v][i + 1..] {
                if !forest.union(sigma_var(a), sigma_var(b), 1) {
                    return Err(fail(a, b));
                }
            }
        }
        for (i, &a) in idx.inc[v].iter().enumerate() {
            for &b in &idx.inc[v][i + 1..] {
                if !forest.union(tau_var(a), tau_var(b), 1) {
                    return Err(fail(a, b));
                }
            }
        }
        for &a in &idx.out[v] {
            for &b in &idx.inc[v] {
                let parity = if idx.is_rel(a, b) { 0 } else { 1 };
                if !forest.union(sigma_var(a), tau_var(b), parity) {
                    return Err(fail(a, b));
                }
            }
        }
    }
    // Roots are the smallest variable of their component by construction of
    // `union`, so the root is the seed.
    let value = |forest: &mut ParityForest, var: usize| -> i8 {
        let (root, p) = forest.find(var);
        let seed: i8 = if flip(root) { -1 } else { 1 };
        if p == 0 {
            seed
        } else {
            -seed
        }
    };
    let mut sigma = Vec::with_capacity(na);
    let mut tau = Vec::with_capacity(na);
    for a in 0..na {
        sigma.push(value(&mut forest, sigma_var(a)));
        tau.push(value(&mut forest, tau_var(a)));
    }
    debug_assert!(first_violation(idx, &sigma, &tau).is_none());
    Ok((sigma, tau))
}
