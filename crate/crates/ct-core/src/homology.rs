//! Descending frequency-level filtration of concurrence complexes and
//! dimension-1 persistent homology over Z/2.
//!
//! A simplex on a set of columns is present at frequency level `f` when at
//! least `f` rows carry a 1 in every one of those columns. Levels descend:
//! the level-(f+1) complex is contained in the level-f complex. Classes are
//! therefore born at high levels and die at lower ones; a class alive in the
//! level-1 complex gets death 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::gf2::{BitVec, Gf2Span};
use crate::matrix::BinaryMatrix;

/// Support counts of every vertex, edge, and triangle with support >= 1.
/// Simplices above dimension 2 are never needed for dimension-1 homology.
#[derive(Debug, Clone)]
pub struct ConcurrenceFiltration {
    pub vertex_support: Vec<u32>,
    pub edge_support: BTreeMap<(usize, usize), u32>,
    pub triangle_support: BTreeMap<(usize, usize, usize), u32>,
    pub max_level: u32,
    pub col_labels: Vec<String>,
}

/// One persistent dimension-1 class. `death` is the highest level at which
/// the class is no longer present (0 when the class is still alive at level
/// 1); the class is alive at levels `death+1 ..= birth`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistentClass {
    pub birth: u32,
    pub death: u32,
    /// Z/2 cycle at the birth level, as vertex-index edge pairs.
    pub representative: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub classes: Vec<PersistentClass>,
}

/// Three-vertex cycle representing a persistent class over a range of
/// frequency levels; its vertex triple exhibits mutual exclusivity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortCycle {
    pub vertices: (usize, usize, usize),
    /// Inclusive level range `(lo, hi)` at which the triple represents the
    /// class.
    pub valid_levels: (u32, u32),
}

/// How lifespans are reported. `Difference` is birth − death, the standard
/// persistence convention. `Inclusive` reads the death coordinate as the
/// last level alive and counts both endpoints: birth − death + 1 for dying
/// classes, birth for classes alive at level 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LifespanConvention {
    Difference,
    Inclusive,
}

impl Default for LifespanConvention {
    fn default() -> Self {
        Self::Difference
    }
}

impl LifespanConvention {
    pub fn lifespan(self, birth: u32, death: u32) -> u32 {
        match self {
            Self::Difference => birth - death,
            Self::Inclusive => {
                if death == 0 {
                    birth
                } else {
                    birth - death + 1
                }
            }
        }
    }
}

impl std::str::FromStr for LifespanConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "difference" => Ok(Self::Difference),
            "inclusive" => Ok(Self::Inclusive),
            other => Err(format!("unknown lifespan convention {other:?}")),
        }
    }
}

impl PersistentClass {
    pub fn lifespan(&self, convention: LifespanConvention) -> u32 {
        convention.lifespan(self.birth, self.death)
    }
}

impl PersistenceDiagram {
    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Multiset of (birth, death) pairs with multiplicities, sorted by birth
    /// descending then death ascending.
    pub fn multiplicities(&self) -> Vec<((u32, u32), usize)> {
        let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for c in &self.classes {
            *counts.entry((c.birth, c.death)).or_default() += 1;
        }
        let mut out: Vec<_> = counts.into_iter().collect();
        out.sort_by(|a, b| b.0 .0.cmp(&a.0 .0).then(a.0 .1.cmp(&b.0 .1)));
        out
    }
}

/// Computes exact support counts for every vertex, pair, and triple that
/// appears in at least one row. Triples are enumerated row-wise, so only
/// O(sum over rows of C(k,3)) work is done for sparse data.
pub fn build_filtration(b: &BinaryMatrix) -> ConcurrenceFiltration {
    let d = b.n_cols();
    let mut vertex_support = vec![0u32; d];
    let mut edge_support: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut triangle_support: BTreeMap<(usize, usize, usize), u32> = BTreeMap::new();

    for r in 0..b.n_rows() {
        let ones: Vec<usize> = b.row(r).iter().enumerate().filter(|(_, &v)| v == 1).map(|(j, _)| j).collect();
        for &i in &ones {
            vertex_support[i] += 1;
        }
        for a in 0..ones.len() {
            for bb in a + 1..ones.len() {
                *edge_support.entry((ones[a], ones[bb])).or_default() += 1;
                for c in bb + 1..ones.len() {
                    *triangle_support.entry((ones[a], ones[bb], ones[c])).or_default() += 1;
                }
            }
        }
    }

    let max_level = vertex_support.iter().copied().max().unwrap_or(0);
    ConcurrenceFiltration {
        vertex_support,
        edge_support,
        triangle_support,
        max_level,
        col_labels: b.col_labels.clone(),
    }
}

impl ConcurrenceFiltration {
    pub fn edge_level(&self, i: usize, j: usize) -> u32 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edge_support.get(&key).copied().unwrap_or(0)
    }

    pub fn triangle_level(&self, i: usize, j: usize, k: usize) -> u32 {
        let mut v = [i, j, k];
        v.sort_unstable();
        self.triangle_support.get(&(v[0], v[1], v[2])).copied().unwrap_or(0)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Dimension-1 persistence of the descending filtration via boundary-matrix
/// reduction over Z/2.
///
/// Internally the filtration is reindexed ascending (entry index
/// `max_level + 1 − f`); edges that close a loop in the union-find forest
/// create classes, triangles kill them through standard left-to-right column
/// reduction of the edge/triangle boundary matrix. Zero-persistence pairs
/// (birth equal to death in level units) are dropped.
pub fn persistent_homology(f: &ConcurrenceFiltration) -> PersistenceDiagram {
    let max_level = f.max_level;
    if max_level == 0 {
        return PersistenceDiagram { classes: Vec::new() };
    }
    let entry = |support: u32| max_level + 1 - support;

    // Edges ordered by (entry level, lex vertices); the index in this vector
    // is the row index of the dimension-2 boundary matrix.
    let mut edges: Vec<((usize, usize), u32)> =
        f.edge_support.iter().map(|(&e, &s)| (e, s)).collect();
    edges.sort_by_key(|&((i, j), s)| (entry(s), i, j));
    let edge_index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(idx, &(e, _))| (e, idx)).collect();

    let mut triangles: Vec<((usize, usize, usize), u32)> =
        f.triangle_support.iter().map(|(&t, &s)| (t, s)).collect();
    triangles.sort_by_key(|&((i, j, k), s)| (entry(s), i, j, k));

    // Pass 1: union-find over vertices in edge order marks creator edges
    // and records the spanning forest used for essential representatives.
    let n_vertices = f.vertex_support.len();
    let mut uf = UnionFind::new(n_vertices);
    let mut creator = vec![false; edges.len()];
    // forest adjacency: vertex -> (neighbor, inserting edge index)
    let mut forest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_vertices];
    for (idx, &((i, j), _)) in edges.iter().enumerate() {
        if uf.union(i, j) {
            forest[i].push((j, idx));
            forest[j].push((i, idx));
        } else {
            creator[idx] = true;
        }
    }

    // Pass 2: reduce triangle boundaries. A column whose pivot survives
    // pairs its pivot edge (birth) with the triangle (death).
    let mut pivot_col: HashMap<usize, BitVec> = HashMap::new();
    let mut paired = vec![false; edges.len()];
    let mut classes = Vec::new();
    for &((i, j, k), tri_support) in &triangles {
        let mut col = BitVec::from_indices(
            edges.len(),
            [
                edge_index[&(i, j)],
                edge_index[&(i, k)],
                edge_index[&(j, k)],
            ],
        );
        loop {
            match col.highest_bit() {
                None => break,
                Some(p) => match pivot_col.get(&p) {
                    Some(other) => col.xor_assign(other),
                    None => {
                        paired[p] = true;
                        let birth = edges[p].1;
                        if birth > tri_support {
                            classes.push(PersistentClass {
                                birth,
                                death: tri_support,
                                representative: representative_edges(&col, &edges),
                            });
                        }
                        pivot_col.insert(p, col);
                        break;
                    }
                },
            }
        }
    }

    // Unpaired creator edges are essential: alive down to level 1. Their
    // representative is the edge plus the forest path between its endpoints
    // through edges inserted earlier.
    for (idx, &((i, j), support)) in edges.iter().enumerate() {
        if creator[idx] && !paired[idx] {
            let mut rep = forest_path(&forest, i, j, idx);
            rep.push(if i < j { (i, j) } else { (j, i) });
            rep.sort_unstable();
            classes.push(PersistentClass { birth: support, death: 0, representative: rep });
        }
    }

    classes.sort_by(|a, b| {
        b.birth
            .cmp(&a.birth)
            .then(a.death.cmp(&b.death))
            .then(a.representative.cmp(&b.representative))
    });
    PersistenceDiagram { classes }
}

fn representative_edges(col: &BitVec, edges: &[((usize, usize), u32)]) -> Vec<(usize, usize)> {
    let mut rep: Vec<(usize, usize)> = col.ones().map(|idx| edges[idx].0).collect();
    rep.sort_unstable();
    rep
}

/// BFS path between `from` and `to` through forest edges with index < `limit`.
fn forest_path(
    forest: &[Vec<(usize, usize)>],
    from: usize,
    to: usize,
    limit: usize,
) -> Vec<(usize, usize)> {
    let mut prev: HashMap<usize, usize> = HashMap::new();
    let mut queue = std::collections::VecDeque::new();
    prev.insert(from, from);
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, eidx) in &forest[v] {
            if eidx < limit && !prev.contains_key(&w) {
                prev.insert(w, v);
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while prev[&cur] != cur {
        let p = prev[&cur];
        path.push(if p < cur { (p, cur) } else { (cur, p) });
        cur = p;
    }
    path
}

/// All classes achieving the maximum lifespan, ordered by birth descending
/// then representative lexicographically.
pub fn max_lifespan_classes(
    diag: &PersistenceDiagram,
    convention: LifespanConvention,
) -> Vec<PersistentClass> {
    let max = match diag.classes.iter().map(|c| c.lifespan(convention)).max() {
        Some(m) => m,
        None => return Vec::new(),
    };
    diag.classes
        .iter()
        .filter(|c| c.lifespan(convention) == max)
        .cloned()
        .collect()
}

/// Finds every three-vertex cycle representing `cls` within its lifespan.
///
/// A triple qualifies when its three edges are present and its triangle
/// absent throughout the level range, and the triple's cycle differs from
/// the class representative by a boundary at the strictest such level.
/// (Boundary spaces only grow as the level drops, so homology at the top of
/// the range implies it at every lower level.)
pub fn localize_short_cycles(
    f: &ConcurrenceFiltration,
    cls: &PersistentClass,
) -> Vec<ShortCycle> {
    let lo = cls.death + 1;
    if cls.birth < lo {
        return Vec::new();
    }

    // Edge index space shared by candidate cycles, representatives, and
    // triangle boundaries.
    let edges: Vec<(usize, usize)> = f.edge_support.keys().copied().collect();
    let edge_index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    // Adjacency restricted to edges alive at level `lo`.
    let d = f.vertex_support.len();
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); d];
    for (&(i, j), &s) in &f.edge_support {
        if s >= lo {
            nbrs[i].insert(j);
            nbrs[j].insert(i);
        }
    }

    let rep_vec = BitVec::from_indices(
        edges.len(),
        cls.representative.iter().map(|e| edge_index[e]),
    );

    let mut spans: HashMap<u32, Gf2Span> = HashMap::new();
    let mut out = Vec::new();
    for i in 0..d {
        for &j in nbrs[i].range(i + 1..) {
            for &k in nbrs[j].range(j + 1..) {
                if !nbrs[i].contains(&k) {
                    continue;
                }
                if f.triangle_level(i, j, k) >= lo {
                    continue;
                }
                let min_edge = f
                    .edge_level(i, j)
                    .min(f.edge_level(i, k))
                    .min(f.edge_level(j, k));
                let hi = min_edge.min(cls.birth);
                debug_assert!(hi >= lo);

                let span = spans.entry(hi).or_insert_with(|| {
                    let mut s = Gf2Span::new();
                    for (&(a, b, c), &ts) in &f.triangle_support {
                        if ts >= hi {
                            s.insert(BitVec::from_indices(
                                edges.len(),
                                [
                                    edge_index[&(a, b)],
                                    edge_index[&(a, c)],
                                    edge_index[&(b, c)],
                                ],
                            ));
                        }
                    }
                    s
                });
                let mut diff = BitVec::from_indices(
                    edges.len(),
                    [
                        edge_index[&(i, j)],
                        edge_index[&(i, k)],
                        edge_index[&(j, k)],
                    ],
                );
                diff.xor_assign(&rep_vec);
                if span.contains(&diff) {
                    out.push(ShortCycle { vertices: (i, j, k), valid_levels: (lo, hi) });
                }
            }
        }
    }
    out
}
