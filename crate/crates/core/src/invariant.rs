//! The derived-equivalence invariant `f: N x N -> N` of a gentle quiver.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gentle::GentleQuiver;
use crate::threads::{build_thread_system, OrbitStats, ThreadSystem};

/// A finitely supported function `N^2 -> N`, stored as a multiset of points.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AagInvariant {
    support: BTreeMap<(u64, u64), u64>,
}

impl AagInvariant {
    pub fn new() -> Self {
        Self::default()
    }

    /// The characteristic function `[p, q]`.
    pub fn point(p: u64, q: u64) -> Self {
        let mut f = Self::new();
        f.add_point(p, q, 1);
        f
    }

    pub fn from_points(points: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut f = Self::new();
        for (p, q) in points {
            f.add_point(p, q, 1);
        }
        f
    }

    pub fn add_point(&mut self, p: u64, q: u64, mult: u64) {
        if mult > 0 {
            *self.support.entry((p, q)).or_insert(0) += mult;
        }
    }

    /// Removes `mult` copies of `(p, q)`; false (and unchanged) if fewer exist.
    pub fn remove_point(&mut self, p: u64, q: u64, mult: u64) -> bool {
        match self.support.get_mut(&(p, q)) {
            Some(m) if *m >= mult => {
                *m -= mult;
                if *m == 0 {
                    self.support.remove(&(p, q));
                }
                true
            }
            _ => mult == 0,
        }
    }

    pub fn eval(&self, p: u64, q: u64) -> u64 {
        self.support.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn scaled(&self, k: u64) -> Self {
        AagInvariant {
            support: if k == 0 {
                BTreeMap::new()
            } else {
                self.support.iter().map(|(&pq, &m)| (pq, m * k)).collect()
            },
        }
    }

    /// `(p, q, multiplicity)` sorted by `(p, q)`.
    pub fn entries(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        self.support.iter().map(|(&(p, q), &m)| (p, q, m))
    }

    /// Each point repeated by its multiplicity, sorted.
    pub fn points(&self) -> Vec<(u64, u64)> {
        self.entries()
            .flat_map(|(p, q, m)| std::iter::repeat_n((p, q), m as usize))
            .collect()
    }

    /// Total multiplicity.
    pub fn size(&self) -> u64 {
        self.support.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn p_sum(&self) -> u64 {
        self.entries().map(|(p, _, m)| p * m).sum()
    }

    pub fn q_sum(&self) -> u64 {
        self.entries().map(|(_, q, m)| q * m).sum()
    }
}

impl Add for &AagInvariant {
    type Output = AagInvariant;
    fn add(self, rhs: &AagInvariant) -> AagInvariant {
        let mut out = self.clone();
        for (p, q, m) in rhs.entries() {
            out.add_point(p, q, m);
        }
        out
    }
}

impl Add for AagInvariant {
    type Output = AagInvariant;
    fn add(self, rhs: AagInvariant) -> AagInvariant {
        &self + &rhs
    }
}

impl FromIterator<OrbitStats> for AagInvariant {
    fn from_iter<I: IntoIterator<Item = OrbitStats>>(iter: I) -> Self {
        AagInvariant::from_points(iter.into_iter().map(|o| (o.p, o.q)))
    }
}

impl fmt::Display for AagInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .entries()
            .map(|(p, q, m)| {
                if m == 1 {
                    format!("[{p}, {q}]")
                } else {
                    format!("{m}*[{p}, {q}]")
                }
            })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    p: u64,
    q: u64,
    mult: u64,
}

impl Serialize for AagInvariant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries().map(|(p, q, mult)| Entry { p, q, mult }))
    }
}

impl<'de> Deserialize<'de> for AagInvariant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<Entry>::deserialize(d)?;
        let mut f = AagInvariant::new();
        for e in entries {
            f.add_point(e.p, e.q, e.mult);
        }
        Ok(f)
    }
}

pub fn aag_invariant(g: &GentleQuiver) -> Result<AagInvariant> {
    Ok(invariant_of_system(&build_thread_system(g)?))
}

pub fn invariant_of_system(ts: &ThreadSystem) -> AagInvariant {
    ts.orbit_stats().into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SumReport {
    pub p_sum: u64,
    pub q_sum: u64,
    pub expected_p: i64,
    pub expected_q: u64,
    pub ok: bool,
}

/// Compares the orbit sums with `2|V| - |A|` and `|A|`.
pub fn check_sum_identities(g: &GentleQuiver) -> Result<SumReport> {
    let f = aag_invariant(g)?;
    Ok(sum_report(g, &f))
}

pub fn sum_report(g: &GentleQuiver, f: &AagInvariant) -> SumReport {
    let expected_p = 2 * g.num_vertices() as i64 - g.num_arrows() as i64;
    let expected_q = g.num_arrows() as u64;
    let (p_sum, q_sum) = (f.p_sum(), f.q_sum());
    SumReport {
        p_sum,
        q_sum,
        expected_p,
        expected_q,
        ok: p_sum as i64 == expected_p && q_sum == expected_q,
    }
}
