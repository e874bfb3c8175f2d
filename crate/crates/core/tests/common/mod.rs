//! Independent reference computations used by the integration tests: sign
//! functions by search, threads by exhaustive walk enumeration, the
//! invariant from the resulting orbits, and small-quiver enumeration.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use gentle_core::*;

/// Plain index view of a quiver.
pub struct Plain {
    pub vertices: Vec<VertexId>,
    pub ids: Vec<ArrowId>,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub rel: HashSet<(usize, usize)>,
}

impl Plain {
    pub fn new(q: &QuiverWithRelations) -> Plain {
        let vertices: Vec<VertexId> = q.vertices().cloned().collect();
        let vpos = |v: &VertexId| vertices.iter().position(|w| w == v).unwrap();
        let arrows: Vec<&Arrow> = q.arrows().collect();
        let ids: Vec<ArrowId> = arrows.iter().map(|a| a.id.clone()).collect();
        let apos = |a: &ArrowId| ids.iter().position(|b| b == a).unwrap();
        Plain {
            src: arrows.iter().map(|a| vpos(&a.source)).collect(),
            tgt: arrows.iter().map(|a| vpos(&a.target)).collect(),
            rel: q.relations().map(|r| (apos(&r.first), apos(&r.second))).collect(),
            vertices,
            ids,
        }
    }

    pub fn na(&self) -> usize {
        self.ids.len()
    }

    /// `(var, var, equal)` sign constraints; variable `2a` is sigma of
    /// arrow `a`, `2a + 1` its tau.
    fn constraints(&self) -> Vec<(usize, usize, bool)> {
        let n = self.na();
        let mut c = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a < b && self.src[a] == self.src[b] {
                    c.push((2 * a, 2 * b, false));
                }
                if a < b && self.tgt[a] == self.tgt[b] {
                    c.push((2 * a + 1, 2 * b + 1, false));
                }
                if self.src[a] == self.tgt[b] {
                    c.push((2 * a, 2 * b + 1, self.rel.contains(&(a, b))));
                }
            }
        }
        c
    }
}

#[derive(Clone, Debug)]
pub struct Signs {
    pub sigma: Vec<i8>,
    pub tau: Vec<i8>,
}

impl Signs {
    pub fn to_assignment(&self, p: &Plain) -> SignAssignment {
        let sign = |v: i8| if v > 0 { Sign::Plus } else { Sign::Minus };
        SignAssignment {
            sigma: p.ids.iter().cloned().zip(self.sigma.iter().map(|&v| sign(v))).collect(),
            tau: p.ids.iter().cloned().zip(self.tau.iter().map(|&v| sign(v))).collect(),
        }
    }
}

fn split(vals: &[i8]) -> Signs {
    Signs {
        sigma: vals.iter().step_by(2).copied().collect(),
        tau: vals.iter().skip(1).step_by(2).copied().collect(),
    }
}

/// Every valid sign assignment, by trying all of them. Small quivers only.
pub fn all_sign_assignments(p: &Plain) -> Vec<Signs> {
    let nvars = 2 * p.na();
    assert!(nvars <= 16, "brute force over {nvars} sign variables");
    let cons = p.constraints();
    (0u32..1 << nvars)
        .filter_map(|mask| {
            let vals: Vec<i8> = (0..nvars).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            cons.iter()
                .all(|&(x, y, eq)| (vals[x] == vals[y]) == eq)
                .then(|| split(&vals))
        })
        .collect()
}

/// One valid sign assignment by breadth-first two-colouring of the
/// constraint graph; `None` when the constraints are inconsistent.
pub fn search_signs(p: &Plain) -> Option<Signs> {
    let nvars = 2 * p.na();
    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nvars];
    for (x, y, eq) in p.constraints() {
        adj[x].push((y, eq));
        adj[y].push((x, eq));
    }
    let mut vals = vec![0i8; nvars];
    for root in 0..nvars {
        if vals[root] != 0 {
            continue;
        }
        vals[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(y, eq) in &adj[x] {
                let want = if eq { vals[x] } else { -vals[x] };
                if vals[y] == 0 {
                    vals[y] = want;
                    queue.push_back(y);
                } else if vals[y] != want {
                    return None;
                }
            }
        }
    }
    Some(split(&vals))
}

/// A thread in reference form: arrows from target to source, or a trivial
/// thread at a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
struct RefThread {
    arrows: Vec<usize>,
    vertex: usize,
    source: usize,
    target: usize,
    sigma: i8,
    tau: i8,
}

pub struct Oracle {
    paths: Vec<RefThread>,
    antipaths: Vec<RefThread>,
    cycle_set: Vec<usize>,
    signs: Signs,
}

/// Walks with no repeated arrow, listed target to source, in which
/// consecutive arrows compose and `related` decides each junction.
fn walks(p: &Plain, related: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..p.na()).map(|a| vec![a]).collect();
    while let Some(w) = stack.pop() {
        let last = *w.last().unwrap();
        for b in 0..p.na() {
            if p.tgt[b] == p.src[last] && !w.contains(&b) && p.rel.contains(&(last, b)) == related {
                let mut longer = w.clone();
                longer.push(b);
                stack.push(longer);
            }
        }
        out.push(w);
    }
    out
}

impl Oracle {
    pub fn new(p: &Plain, signs: Signs) -> Oracle {
        let (s, t) = (&signs.sigma, &signs.tau);
        let nontrivial = |w: Vec<usize>| RefThread {
            target: p.tgt[w[0]],
            source: p.src[*w.last().unwrap()],
            tau: t[w[0]],
            sigma: s[*w.last().unwrap()],
            vertex: usize::MAX,
            arrows: w,
        };
        let trivial = |x: usize, sigma: i8, tau: i8| RefThread {
            arrows: Vec::new(),
            vertex: x,
            source: x,
            target: x,
            sigma,
            tau,
        };
        // maximality: `sign` is the sign an extension must carry, as a
        // multiple of the thread's own end sign
        let maximal = |w: &RefThread, ext: i8| {
            !(0..p.na()).any(|a| p.src[a] == w.target && s[a] == ext * w.tau)
                && !(0..p.na()).any(|b| p.tgt[b] == w.source && t[b] == ext * w.sigma)
        };
        let mut paths: Vec<RefThread> = walks(p, false).into_iter().map(nontrivial).collect();
        let mut antipaths: Vec<RefThread> = walks(p, true).into_iter().map(nontrivial).collect();
        for x in 0..p.vertices.len() {
            for eps in [1i8, -1] {
                paths.push(trivial(x, eps, -eps));
                antipaths.push(trivial(x, eps, eps));
            }
        }
        paths.retain(|w| maximal(w, -1));
        antipaths.retain(|w| maximal(w, 1));
        let covered: BTreeSet<usize> = antipaths.iter().flat_map(|w| w.arrows.iter().copied()).collect();
        let cycle_set = (0..p.na()).filter(|a| !covered.contains(a)).collect();
        Oracle {
            paths,
            antipaths,
            cycle_set,
            signs,
        }
    }

    fn unique(candidates: Vec<usize>, what: &str) -> usize {
        assert_eq!(candidates.len(), 1, "{what} is not a bijection");
        candidates[0]
    }

    /// `phi`: the maximal antipath ending where a maximal path ends, with
    /// opposite tau.
    fn phi(&self, m: usize) -> usize {
        let w = &self.paths[m];
        Self::unique(
            (0..self.antipaths.len())
                .filter(|&n| self.antipaths[n].target == w.target && self.antipaths[n].tau == -w.tau)
                .collect(),
            "phi",
        )
    }

    /// `psi`: the maximal path starting where a maximal antipath starts,
    /// with opposite sigma.
    fn psi(&self, n: usize) -> usize {
        let w = &self.antipaths[n];
        Self::unique(
            (0..self.paths.len())
                .filter(|&m| self.paths[m].source == w.source && self.paths[m].sigma == -w.sigma)
                .collect(),
            "psi",
        )
    }

    /// Orbits of maximal antipaths under `phi . psi`, as index lists.
    pub fn antipath_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.antipaths.len()];
        let mut out = Vec::new();
        for start in 0..self.antipaths.len() {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                orbit.push(cur);
                cur = self.phi(self.psi(cur));
            }
            assert_eq!(cur, start, "Phi is not a permutation");
            out.push(orbit);
        }
        out
    }

    /// Orbits of the cycle set under `Psi`.
    pub fn cycle_orbits(&self, p: &Plain) -> Vec<Vec<usize>> {
        let (s, t) = (&self.signs.sigma, &self.signs.tau);
        let next = |a: usize| {
            Self::unique(
                self.cycle_set
                    .iter()
                    .copied()
                    .filter(|&b| p.tgt[b] == p.src[a] && t[b] == s[a])
                    .collect(),
                "Psi",
            )
        };
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &self.cycle_set {
            if seen.contains(&start) {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = start;
            while seen.insert(cur) {
                orbit.push(cur);
                cur = next(cur);
            }
            out.push(orbit);
        }
        out
    }

    pub fn invariant(&self, p: &Plain) -> AagInvariant {
        let mut f = AagInvariant::new();
        for orbit in self.antipath_orbits() {
            let q: usize = orbit.iter().map(|&n| self.antipaths[n].arrows.len()).sum();
            f.add_point(orbit.len() as u64, q as u64, 1);
        }
        for orbit in self.cycle_orbits(p) {
            f.add_point(0, orbit.len() as u64, 1);
        }
        f
    }

    /// Right-hand side of the completion formula for a set of isolated
    /// relations.
    pub fn completion_prediction(&self, p: &Plain, r0: &BTreeSet<(usize, usize)>) -> AagInvariant {
        let mut f = AagInvariant::new();
        f.add_point(0, 3, r0.len() as u64);
        for orbit in self.antipath_orbits() {
            let q: usize = orbit.iter().map(|&n| self.antipaths[n].arrows.len()).sum();
            let m = orbit
                .iter()
                .filter(|&&n| match self.antipaths[n].arrows[..] {
                    [a, b] => r0.contains(&(a, b)),
                    _ => false,
                })
                .count();
            f.add_point((orbit.len() - m) as u64, (q - 2 * m) as u64, 1);
        }
        for orbit in self.cycle_orbits(p) {
            f.add_point(0, orbit.len() as u64, 1);
        }
        f
    }

    /// Threads in library form, sorted, for direct comparison.
    pub fn threads(&self, p: &Plain) -> (Vec<Thread>, Vec<Thread>) {
        let sign = |v: i8| if v > 0 { Sign::Plus } else { Sign::Minus };
        let convert = |kind: ThreadKind, w: &RefThread| Thread {
            kind,
            body: if w.arrows.is_empty() {
                ThreadBody::Trivial {
                    vertex: p.vertices[w.vertex].clone(),
                    eps: sign(w.sigma),
                }
            } else {
                ThreadBody::NonTrivial(w.arrows.iter().map(|&a| p.ids[a].clone()).collect())
            },
            source: p.vertices[w.source].clone(),
            target: p.vertices[w.target].clone(),
            sigma: sign(w.sigma),
            tau: sign(w.tau),
        };
        let mut paths: Vec<Thread> = self.paths.iter().map(|w| convert(ThreadKind::Path, w)).collect();
        let mut antipaths: Vec<Thread> = self.antipaths.iter().map(|w| convert(ThreadKind::Antipath, w)).collect();
        paths.sort();
        antipaths.sort();
        (paths, antipaths)
    }

    /// Whether some orbit consists only of relations from `r0`, which is
    /// exactly when completing `r0` fails to be gentle.
    pub fn completion_blocked(&self, r0: &BTreeSet<(usize, usize)>) -> bool {
        self.antipath_orbits().iter().any(|o| {
            o.iter().all(|&n| match self.antipaths[n].arrows[..] {
                [a, b] => r0.contains(&(a, b)),
                _ => false,
            })
        })
    }

    /// Length of the longest maximal antipath, `None` when there is none.
    pub fn longest_antipath(&self) -> Option<usize> {
        self.antipaths.iter().map(|w| w.arrows.len()).max()
    }

    /// Whether every relation lies inside a triangle of the cycle set.
    pub fn relations_in_triangles(&self, p: &Plain) -> bool {
        let triangles: Vec<Vec<usize>> = self.cycle_orbits(p).into_iter().filter(|o| o.len() == 3).collect();
        p.rel
            .iter()
            .all(|&(a, b)| triangles.iter().any(|t| t.contains(&a) && t.contains(&b)))
    }

    /// Isolated relations: maximal antipaths of length two.
    pub fn isolated(&self) -> BTreeSet<(usize, usize)> {
        self.antipaths
            .iter()
            .filter_map(|w| match w.arrows[..] {
                [a, b] => Some((a, b)),
                _ => None,
            })
            .collect()
    }
}

/// Reference invariant of a quiver, with signs found by search.
pub fn oracle_invariant(q: &QuiverWithRelations) -> AagInvariant {
    let p = Plain::new(q);
    let signs = search_signs(&p).expect("gentle quivers admit sign functions");
    Oracle::new(&p, signs).invariant(&p)
}

/// The gentle conditions checked directly from their definitions.
pub fn oracle_is_gentle(p: &Plain) -> bool {
    let n = p.na();
    let nv = p.vertices.len();
    for v in 0..nv {
        if (0..n).filter(|&a| p.src[a] == v).count() > 2 || (0..n).filter(|&a| p.tgt[a] == v).count() > 2 {
            return false;
        }
    }
    for a in 0..n {
        let after: Vec<usize> = (0..n).filter(|&b| p.src[b] == p.tgt[a]).collect();
        let before: Vec<usize> = (0..n).filter(|&b| p.tgt[b] == p.src[a]).collect();
        if after.iter().filter(|&&b| p.rel.contains(&(b, a))).count() > 1
            || after.iter().filter(|&&b| !p.rel.contains(&(b, a))).count() > 1
            || before.iter().filter(|&&b| p.rel.contains(&(a, b))).count() > 1
            || before.iter().filter(|&&b| !p.rel.contains(&(a, b))).count() > 1
        {
            return false;
        }
    }
    // finite dimension: the relation-free successor graph is acyclic
    let succ = |a: usize| (0..n).find(|&b| p.src[b] == p.tgt[a] && !p.rel.contains(&(b, a)));
    for a in 0..n {
        let mut cur = a;
        for _ in 0..=n {
            match succ(cur) {
                Some(b) => cur = b,
                None => break,
            }
        }
        if succ(cur).is_some() {
            return false;
        }
    }
    // connected
    let mut comp: Vec<usize> = (0..nv).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for a in 0..n {
        let (x, y) = (find(&mut comp, p.src[a]), find(&mut comp, p.tgt[a]));
        comp[x] = y;
    }
    (0..nv).all(|v| find(&mut comp, v) == find(&mut comp, 0))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn multisets(items: usize, size: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for i in from..items {
        cur.push(i);
        multisets(items, size, i, cur, out);
        cur.pop();
    }
}

/// Every gentle quiver with at most `max_v` vertices and `max_a` arrows,
/// with underlying quivers taken up to relabelling of vertices. Vertices are
/// named `0`, `1`, ... and arrows `a0`, `a1`, ... in endpoint order.
pub fn exhaustive_gentle(max_v: usize, max_a: usize) -> Vec<QuiverWithRelations> {
    exhaustive_quivers(max_v, max_a)
        .into_iter()
        .filter(|q| oracle_is_gentle(&Plain::new(q)))
        .collect()
}

/// Like [`exhaustive_gentle`] but keeping every relation set on underlying
/// quivers whose vertex degrees are at most two.
pub fn exhaustive_quivers(max_v: usize, max_a: usize) -> Vec<QuiverWithRelations> {
    let mut out = Vec::new();
    for nv in 1..=max_v {
        let perms = permutations(nv);
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|s| (0..nv).map(move |t| (s, t))).collect();
        for na in nv - 1..=max_a {
            let mut shapes = Vec::new();
            multisets(pairs.len(), na, 0, &mut Vec::new(), &mut shapes);
            let mut seen = HashSet::new();
            for shape in shapes {
                let arrows: Vec<(usize, usize)> = shape.iter().map(|&i| pairs[i]).collect();
                let canon = perms
                    .iter()
                    .map(|pi| {
                        let mut v: Vec<(usize, usize)> = arrows.iter().map(|&(s, t)| (pi[s], pi[t])).collect();
                        v.sort();
                        v
                    })
                    .min()
                    .unwrap();
                let degree_ok = (0..nv).all(|v| {
                    arrows.iter().filter(|a| a.0 == v).count() <= 2 && arrows.iter().filter(|a| a.1 == v).count() <= 2
                });
                if !degree_ok || canon != arrows || !seen.insert(canon) {
                    continue;
                }
                out.extend(relation_sets(nv, &arrows));
            }
        }
    }
    out
}

fn relation_sets(nv: usize, arrows: &[(usize, usize)]) -> Vec<QuiverWithRelations> {
    let vname = |v: usize| v.to_string();
    let vertices: Vec<String> = (0..nv).map(vname).collect();
    let arrow_rows: Vec<(String, String, String)> = arrows
        .iter()
        .enumerate()
        .map(|(i, &(s, t))| (format!("a{i}"), vname(s), vname(t)))
        .collect();
    let composable: Vec<(usize, usize)> = (0..arrows.len())
        .flat_map(|a| (0..arrows.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| arrows[a].0 == arrows[b].1)
        .collect();
    let build = |rels: &[(usize, usize)]| {
        let v: Vec<&str> = vertices.iter().map(String::as_str).collect();
        let a: Vec<(&str, &str, &str)> = arrow_rows
            .iter()
            .map(|(i, s, t)| (i.as_str(), s.as_str(), t.as_str()))
            .collect();
        let names: Vec<(String, String)> = rels.iter().map(|&(x, y)| (format!("a{x}"), format!("a{y}"))).collect();
        let r: Vec<(&str, &str)> = names.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
        QuiverWithRelations::from_strs(&v, &a, &r)
    };
    // out-degree at most two bounds this by twice the arrow count
    assert!(composable.len() <= 2 * arrows.len());
    let mut out = Vec::new();
    for mask in 0u32..1 << composable.len() {
        let rels: Vec<(usize, usize)> = (0..composable.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| composable[i])
            .collect();
        out.push(build(&rels));
    }
    out
}

/// Arrow-index relations of a quiver as id pairs.
pub fn relation_ids(p: &Plain, r: &BTreeSet<(usize, usize)>) -> Vec<Relation> {
    r.iter()
        .map(|&(a, b)| Relation {
            first: p.ids[a].clone(),
            second: p.ids[b].clone(),
        })
        .collect()
}

/// Counts of `(p, q)` points, for readable failure messages.
pub fn points(f: &AagInvariant) -> BTreeMap<(u64, u64), u64> {
    f.entries().map(|(p, q, m)| ((p, q), m)).collect()
}

/// New `(source, target)` of every arrow, and the new relations.
pub type Reflected = (Vec<(usize, usize)>, BTreeSet<(usize, usize)>);

/// Endpoints and relations after reflecting at vertex `x`, straight from
/// the case formulas; `None` when the reflection is undefined there.
pub fn oracle_reflect(p: &Plain, x: usize) -> Option<Reflected> {
    let n = p.na();
    if (0..n).any(|a| p.src[a] == x && p.tgt[a] == x) {
        return None;
    }
    let mut beta = vec![None; n];
    for a in (0..n).filter(|&a| p.src[a] == x) {
        beta[a] = Some((0..n).find(|&b| p.tgt[b] == x && !p.rel.contains(&(a, b)))?);
    }
    let ends = (0..n)
        .map(|a| {
            let s = if p.tgt[a] == x {
                x
            } else if p.src[a] == x {
                p.src[beta[a].unwrap()]
            } else {
                p.src[a]
            };
            let t = if p.tgt[a] == x {
                p.src[a]
            } else if (0..n).any(|b| p.tgt[b] == x && p.src[b] == p.tgt[a] && p.rel.contains(&(b, a))) {
                x
            } else {
                p.tgt[a]
            };
            (s, t)
        })
        .collect();
    let mut rels: BTreeSet<(usize, usize)> = p
        .rel
        .iter()
        .copied()
        .filter(|&(a, _)| p.tgt[a] != x && p.src[a] != x)
        .collect();
    rels.extend((0..n).filter_map(|a| beta[a].map(|b| (a, b))));
    for a in (0..n).filter(|&a| p.tgt[a] == x) {
        for b in 0..n {
            if (0..n).any(|c| c != a && p.tgt[c] == x && p.src[c] == p.tgt[b] && p.rel.contains(&(c, b))) {
                rels.insert((a, b));
            }
        }
    }
    Some((ends, rels))
}
