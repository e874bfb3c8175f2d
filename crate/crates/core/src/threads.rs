//! Maximal paths and antipaths (permitted and forbidden threads) and the
//! permutations built from them.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{breach, Result};
use crate::gentle::GentleQuiver;
use crate::quiver::{ArrowId, VertexId};
use crate::signs::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThreadKind {
    Path,
    Antipath,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThreadBody {
    Trivial { vertex: VertexId, eps: Sign },
    /// Arrows listed from target to source: `[a1, ..., an]` with
    /// `source(a_i) == target(a_{i+1})`.
    NonTrivial(Vec<ArrowId>),
}

/// A maximal path or antipath. Trivial threads are identified by
/// `(kind, vertex, eps)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Thread {
    pub kind: ThreadKind,
    pub body: ThreadBody,
    pub source: VertexId,
    pub target: VertexId,
    pub sigma: Sign,
    pub tau: Sign,
}

impl Thread {
    pub fn len(&self) -> usize {
        match &self.body {
            ThreadBody::Trivial { .. } => 0,
            ThreadBody::NonTrivial(a) => a.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn arrows(&self) -> &[ArrowId] {
        match &self.body {
            ThreadBody::Trivial { .. } => &[],
            ThreadBody::NonTrivial(a) => a,
        }
    }
}

impl fmt::Display for Thread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prime = match self.kind {
            ThreadKind::Path => "",
            ThreadKind::Antipath => "'",
        };
        match &self.body {
            ThreadBody::Trivial { vertex, eps } => write!(f, "1{prime}[{vertex},{eps}]"),
            ThreadBody::NonTrivial(arrows) => {
                let a: Vec<&str> = arrows.iter().map(ArrowId::as_str).collect();
                write!(f, "({}){prime}", a.join(","))
            }
        }
    }
}

/// Index-level thread used by the algorithms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawThread {
    /// target-to-source listing; empty for trivial threads
    pub arrows: Vec<usize>,
    pub source: usize,
    pub target: usize,
    pub sigma: i8,
    pub tau: i8,
}

impl RawThread {
    fn trivial(v: usize, sigma: i8, tau: i8) -> Self {
        RawThread {
            arrows: Vec::new(),
            source: v,
            target: v,
            sigma,
            tau,
        }
    }

    fn from_walk(g: &GentleQuiver, walk: &[usize]) -> Self {
        // `walk` is in traversal order (source to target).
        let first = walk[0];
        let last = *walk.last().expect("nonempty walk");
        RawThread {
            arrows: walk.iter().rev().copied().collect(),
            source: g.idx.src[first],
            target: g.idx.tgt[last],
            sigma: g.sigma[first],
            tau: g.tau[last],
        }
    }

    fn to_thread(&self, g: &GentleQuiver, kind: ThreadKind) -> Thread {
        let sign = |v: i8| Sign::from_value(v).expect("sign");
        let body = if self.arrows.is_empty() {
            let eps = self.sigma;
            ThreadBody::Trivial {
                vertex: g.idx.vertex_ids[self.source].clone(),
                eps: sign(eps),
            }
        } else {
            ThreadBody::NonTrivial(self.arrows.iter().map(|&a| g.idx.arrow_ids[a].clone()).collect())
        };
        Thread {
            kind,
            body,
            source: g.idx.vertex_ids[self.source].clone(),
            target: g.idx.vertex_ids[self.target].clone(),
            sigma: sign(self.sigma),
            tau: sign(self.tau),
        }
    }
}

/// Successor/predecessor maps on arrows for paths and antipaths.
pub(crate) struct Continuations {
    pub path_next: Vec<Option<usize>>,
    pub path_prev: Vec<Option<usize>>,
    pub anti_next: Vec<Option<usize>>,
    pub anti_prev: Vec<Option<usize>>,
}

impl Continuations {
    pub fn new(g: &GentleQuiver) -> Self {
        let idx = &g.idx;
        let na = idx.na();
        let find_out = |v: usize, sign: i8| idx.out[v].iter().copied().find(|&a| g.sigma[a] == sign);
        let find_in = |v: usize, sign: i8| idx.inc[v].iter().copied().find(|&a| g.tau[a] == sign);
        let mut c = Continuations {
            path_next: vec![None; na],
            path_prev: vec![None; na],
            anti_next: vec![None; na],
            anti_prev: vec![None; na],
        };
        for a in 0..na {
            c.path_next[a] = find_out(idx.tgt[a], -g.tau[a]);
            c.path_prev[a] = find_in(idx.src[a], -g.sigma[a]);
            c.anti_next[a] = find_out(idx.tgt[a], g.tau[a]);
            c.anti_prev[a] = find_in(idx.src[a], g.sigma[a]);
        }
        c
    }
}

pub(crate) struct RawThreads {
    pub paths: Vec<RawThread>,
    pub antipaths: Vec<RawThread>,
    /// arrows lying on no maximal antipath
    pub in_cycle_set: Vec<bool>,
    pub cont: Continuations,
}

pub(crate) fn raw_threads(g: &GentleQuiver) -> Result<RawThreads> {
    let idx = &g.idx;
    let na = idx.na();
    let cont = Continuations::new(g);

    let follow = |start: usize, next: &[Option<usize>]| -> Result<Vec<usize>> {
        let mut walk = vec![start];
        let mut cur = start;
        while let Some(n) = next[cur] {
            if walk.len() > na {
                return Err(breach("thread walk does not terminate"));
            }
            walk.push(n);
            cur = n;
        }
        Ok(walk)
    };

    let mut paths = Vec::new();
    for a in 0..na {
        if cont.path_prev[a].is_none() {
            paths.push(RawThread::from_walk(g, &follow(a, &cont.path_next)?));
        }
    }
    let mut antipaths = Vec::new();
    let mut covered = vec![false; na];
    for a in 0..na {
        if cont.anti_prev[a].is_none() {
            let walk = follow(a, &cont.anti_next)?;
            for &b in &walk {
                covered[b] = true;
            }
            antipaths.push(RawThread::from_walk(g, &walk));
        }
    }
    for v in 0..idx.nv() {
        for eps in [1i8, -1] {
            let no_out = |s: i8| !idx.out[v].iter().any(|&a| g.sigma[a] == s);
            let no_in = |t: i8| !idx.inc[v].iter().any(|&a| g.tau[a] == t);
            // trivial path: sigma = eps, tau = -eps
            if no_out(eps) && no_in(-eps) {
                paths.push(RawThread::trivial(v, eps, -eps));
            }
            // trivial antipath: sigma = tau = eps
            if no_out(eps) && no_in(eps) {
                antipaths.push(RawThread::trivial(v, eps, eps));
            }
        }
    }
    let in_cycle_set = covered.iter().map(|c| !c).collect();
    Ok(RawThreads {
        paths,
        antipaths,
        in_cycle_set,
        cont,
    })
}

/// Maximal paths `M` and maximal antipaths `N`, each sorted.
pub fn enumerate_threads(g: &GentleQuiver) -> Result<(Vec<Thread>, Vec<Thread>)> {
    let raw = raw_threads(g)?;
    let mut m: Vec<Thread> = raw.paths.iter().map(|t| t.to_thread(g, ThreadKind::Path)).collect();
    let mut n: Vec<Thread> = raw
        .antipaths
        .iter()
        .map(|t| t.to_thread(g, ThreadKind::Antipath))
        .collect();
    m.sort();
    n.sort();
    Ok((m, n))
}

/// All bijections and orbit decompositions derived from the threads.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreadSystem {
    /// maximal paths, sorted
    pub paths: Vec<Thread>,
    /// maximal antipaths, sorted
    pub antipaths: Vec<Thread>,
    /// `phi[i]`: index in `antipaths` of the image of `paths[i]`
    pub phi: Vec<usize>,
    /// `psi[j]`: index in `paths` of the image of `antipaths[j]`
    pub psi: Vec<usize>,
    /// `big_phi = phi . psi` on `antipaths`
    pub big_phi: Vec<usize>,
    /// arrows on no maximal antipath, sorted
    pub cycle_arrows: Vec<ArrowId>,
    /// `big_psi[i]`: index in `cycle_arrows` of the image of `cycle_arrows[i]`
    pub big_psi: Vec<usize>,
    /// orbits of `big_phi`, each listed along the permutation from its smallest member
    pub antipath_orbits: Vec<Vec<usize>>,
    /// orbits of `big_psi`, same convention
    pub cycle_orbits: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OrbitStats {
    pub p: u64,
    pub q: u64,
}

impl ThreadSystem {
    pub fn antipath_orbit_stats(&self) -> Vec<OrbitStats> {
        self.antipath_orbits
            .iter()
            .map(|o| OrbitStats {
                p: o.len() as u64,
                q: o.iter().map(|&i| self.antipaths[i].len() as u64).sum(),
            })
            .collect()
    }

    pub fn cycle_orbit_stats(&self) -> Vec<OrbitStats> {
        self.cycle_orbits
            .iter()
            .map(|o| OrbitStats { p: 0, q: o.len() as u64 })
            .collect()
    }

    pub fn orbit_stats(&self) -> Vec<OrbitStats> {
        let mut v = self.antipath_orbit_stats();
        v.extend(self.cycle_orbit_stats());
        v
    }

    pub fn max_antipath_len(&self) -> Option<usize> {
        self.antipaths.iter().map(Thread::len).max()
    }
}

fn orbits_of(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut orbits = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            orbit.push(cur);
            cur = perm[cur];
        }
        orbits.push(orbit);
    }
    orbits
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut hit = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || hit[p] {
            return false;
        }
        hit[p] = true;
    }
    true
}

pub fn build_thread_system(g: &GentleQuiver) -> Result<ThreadSystem> {
    let raw = raw_threads(g)?;
    let mut paths: Vec<(Thread, RawThread)> = raw
        .paths
        .iter()
        .map(|t| (t.to_thread(g, ThreadKind::Path), t.clone()))
        .collect();
    let mut antipaths: Vec<(Thread, RawThread)> = raw
        .antipaths
        .iter()
        .map(|t| (t.to_thread(g, ThreadKind::Antipath), t.clone()))
        .collect();
    paths.sort_by(|a, b| a.0.cmp(&b.0));
    antipaths.sort_by(|a, b| a.0.cmp(&b.0));
    if paths.len() != antipaths.len() {
        return Err(breach(format!(
            "|M| = {} differs from |N| = {}",
            paths.len(),
            antipaths.len()
        )));
    }

    // N keyed by (target, tau), M keyed by (source, sigma).
    let mut n_by_end: HashMap<(usize, i8), usize> = HashMap::new();
    for (j, (_, r)) in antipaths.iter().enumerate() {
        if n_by_end.insert((r.target, r.tau), j).is_some() {
            return Err(breach("two maximal antipaths share (target, tau)"));
        }
    }
    let mut m_by_start: HashMap<(usize, i8), usize> = HashMap::new();
    for (i, (_, r)) in paths.iter().enumerate() {
        if m_by_start.insert((r.source, r.sigma), i).is_some() {
            return Err(breach("two maximal paths share (source, sigma)"));
        }
    }
    let phi = paths
        .iter()
        .map(|(_, r)| {
            n_by_end
                .get(&(r.target, -r.tau))
                .copied()
                .ok_or_else(|| breach("phi undefined on a maximal path"))
        })
        .collect::<Result<Vec<_>>>()?;
    let psi = antipaths
        .iter()
        .map(|(_, r)| {
            m_by_start
                .get(&(r.source, -r.sigma))
                .copied()
                .ok_or_else(|| breach("psi undefined on a maximal antipath"))
        })
        .collect::<Result<Vec<_>>>()?;
    if !is_permutation(&phi) || !is_permutation(&psi) {
        return Err(breach("phi or psi is not bijective"));
    }
    let big_phi: Vec<usize> = psi.iter().map(|&i| phi[i]).collect();

    let cycle_idx: Vec<usize> = (0..g.idx.na()).filter(|&a| raw.in_cycle_set[a]).collect();
    let pos: HashMap<usize, usize> = cycle_idx.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let big_psi = cycle_idx
        .iter()
        .map(|&a| {
            raw.cont.anti_prev[a]
                .and_then(|b| pos.get(&b).copied())
                .ok_or_else(|| breach("cycle set not closed under Psi"))
        })
        .collect::<Result<Vec<_>>>()?;
    if !is_permutation(&big_psi) {
        return Err(breach("Psi is not bijective"));
    }

    let paths_t: Vec<Thread> = paths.into_iter().map(|(t, _)| t).collect();
    let antipaths_t: Vec<Thread> = antipaths.into_iter().map(|(t, _)| t).collect();
    let mut antipath_orbits = orbits_of(&big_phi);
    antipath_orbits.sort_by_key(|o| {
        (
            o.len(),
            o.iter().map(|&i| antipaths_t[i].len()).sum::<usize>(),
            o[0],
        )
    });
    let mut cycle_orbits = orbits_of(&big_psi);
    cycle_orbits.sort_by_key(|o| (o.len(), o[0]));

    Ok(ThreadSystem {
        paths: paths_t,
        antipaths: antipaths_t,
        phi,
        psi,
        big_phi,
        cycle_arrows: cycle_idx.iter().map(|&a| g.idx.arrow_ids[a].clone()).collect(),
        big_psi,
        antipath_orbits,
        cycle_orbits,
    })
}
