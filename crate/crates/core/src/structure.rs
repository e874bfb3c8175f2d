//! Structural facts shared by the rewrites, the classifier and the
//! normalization pipelines: the cycle set, its orbits, and bridges.

use crate::error::Result;
use crate::gentle::GentleQuiver;
use crate::quiver::Index;
use crate::threads::raw_threads;

#[derive(Clone, Debug)]
pub(crate) struct Structure {
    /// arrow lies in the cycle set (on no maximal antipath)
    pub in_c: Vec<bool>,
    /// orbits of the cycle set, each in walking order: `(o[i+1], o[i])` is a relation
    pub c_orbits: Vec<Vec<usize>>,
    /// index into `c_orbits` for arrows of the cycle set
    pub orbit_of: Vec<Option<usize>>,
    /// removing the arrow disconnects the underlying graph
    pub bridge: Vec<bool>,
}

impl Structure {
    pub fn new(g: &GentleQuiver) -> Result<Self> {
        let raw = raw_threads(g)?;
        let na = g.idx.na();
        let in_c = raw.in_cycle_set;
        let mut orbit_of = vec![None; na];
        let mut c_orbits = Vec::new();
        for start in 0..na {
            if !in_c[start] || orbit_of[start].is_some() {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = start;
            loop {
                orbit_of[cur] = Some(c_orbits.len());
                orbit.push(cur);
                match raw.cont.anti_next[cur] {
                    Some(n) if n != start => cur = n,
                    _ => break,
                }
            }
            c_orbits.push(orbit);
        }
        Ok(Structure {
            in_c,
            c_orbits,
            orbit_of,
            bridge: g.idx.bridges(),
        })
    }

    /// True when every orbit of the cycle set has exactly three arrows.
    pub fn all_triangles(&self) -> bool {
        self.c_orbits.iter().all(|o| o.len() == 3)
    }

    pub fn triangles(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> + '_ {
        self.c_orbits.iter().enumerate().filter(|(_, o)| o.len() == 3)
    }

    /// A triangle is a branch triangle when removing any two of its arrows
    /// disconnects the quiver.
    pub fn is_branch_triangle(&self, idx: &Index, orbit: usize) -> bool {
        let o = &self.c_orbits[orbit];
        o.len() == 3 && (0..3).all(|skip| {
            let pair: Vec<usize> = (0..3).filter(|&i| i != skip).map(|i| o[i]).collect();
            idx.components(&pair).1 > 1
        })
    }

    pub fn branch_triangles(&self, idx: &Index) -> Vec<usize> {
        self.triangles()
            .map(|(t, _)| t)
            .filter(|&t| self.is_branch_triangle(idx, t))
            .collect()
    }
}
