//! Brute-force dimension-1 persistence oracle.
//!
//! Independent of the production reduction path: supports are recounted
//! directly from the matrix, cycle and boundary spaces are built by plain
//! Gaussian elimination over Z/2 at every frequency level, and the diagram
//! is recovered from persistent Betti numbers of the inclusion maps across
//! consecutive levels. Only valid for d <= 6 (edge sets fit in a u32 mask).

use std::collections::BTreeMap;

use ct_core::matrix::BinaryMatrix;

/// Global edge index for the pair (i, j), i < j, over d columns.
fn edge_idx(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

fn support_of(b: &BinaryMatrix, cols: &[usize]) -> u32 {
    (0..b.n_rows())
        .filter(|&r| cols.iter().all(|&c| b.get(r, c) == 1))
        .count() as u32
}

/// Rank of a set of GF(2) vectors given as bit masks. `pivots[b]` holds a
/// vector whose highest set bit is `b`.
fn rank(vectors: &[u32]) -> usize {
    let mut pivots = [0u32; 32];
    let mut r = 0;
    for &v in vectors {
        let mut v = v;
        while v != 0 {
            let top = (31 - v.leading_zeros()) as usize;
            if pivots[top] == 0 {
                pivots[top] = v;
                r += 1;
                break;
            }
            v ^= pivots[top];
        }
    }
    r
}

/// Basis of the cycle space Z1 of the complex with the given edges, as edge
/// masks: kernel of the vertex-boundary map by elimination with tracked
/// edge combinations.
fn cycle_basis(d: usize, edges: &[(usize, usize)]) -> Vec<u32> {
    let mut pivots = [(0u32, 0u32); 32]; // vertex mask -> (mask, edge combination)
    let mut basis = Vec::new();
    for &(i, j) in edges {
        let mut v: u32 = (1 << i) | (1 << j);
        let mut combo: u32 = 1 << edge_idx(d, i, j);
        loop {
            if v == 0 {
                basis.push(combo);
                break;
            }
            let top = (31 - v.leading_zeros()) as usize;
            if pivots[top].0 == 0 {
                pivots[top] = (v, combo);
                break;
            }
            v ^= pivots[top].0;
            combo ^= pivots[top].1;
        }
    }
    basis
}

/// Boundaries of the complex's triangles, as edge masks.
fn boundary_vectors(d: usize, triangles: &[(usize, usize, usize)]) -> Vec<u32> {
    triangles
        .iter()
        .map(|&(i, j, k)| {
            (1u32 << edge_idx(d, i, j)) | (1 << edge_idx(d, i, k)) | (1 << edge_idx(d, j, k))
        })
        .collect()
}

/// Dimension-1 persistence diagram in frequency-level units, as a multiset
/// of (birth, death) pairs with multiplicities. Death 0 means alive at
/// level 1.
pub fn oracle_diagram(b: &BinaryMatrix) -> BTreeMap<(u32, u32), usize> {
    let d = b.n_cols();
    assert!(d <= 6, "oracle edge masks only cover d <= 6");
    let max_level = (0..d).map(|j| support_of(b, &[j])).max().unwrap_or(0);
    let levels = max_level as usize;
    let mut out = BTreeMap::new();
    if levels == 0 {
        return out;
    }

    // ascending index a = 1..=levels corresponds to frequency level
    // f = max_level + 1 - a
    let mut z_bases: Vec<Vec<u32>> = Vec::with_capacity(levels + 1);
    let mut b_vectors: Vec<Vec<u32>> = Vec::with_capacity(levels + 1);
    z_bases.push(Vec::new()); // a = 0: empty complex
    b_vectors.push(Vec::new());
    for a in 1..=levels {
        let f = max_level + 1 - a as u32;
        let mut edges = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                if support_of(b, &[i, j]) >= f {
                    edges.push((i, j));
                }
            }
        }
        let mut triangles = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    if support_of(b, &[i, j, k]) >= f {
                        triangles.push((i, j, k));
                    }
                }
            }
        }
        z_bases.push(cycle_basis(d, &edges));
        b_vectors.push(boundary_vectors(d, &triangles));
    }

    // beta[i][j] = rank of H1(K_i) -> H1(K_j), 0 <= i <= j <= levels
    let beta = |i: usize, j: usize| -> usize {
        if i == 0 {
            return 0;
        }
        let mut joint: Vec<u32> = z_bases[i].clone();
        joint.extend_from_slice(&b_vectors[j]);
        rank(&joint) - rank(&b_vectors[j])
    };

    for birth in 1..=levels {
        for death in birth + 1..=levels {
            let mult = (beta(birth, death - 1) as i64 - beta(birth, death) as i64)
                - (beta(birth - 1, death - 1) as i64 - beta(birth - 1, death) as i64);
            assert!(mult >= 0, "negative multiplicity");
            if mult > 0 {
                let birth_f = max_level + 1 - birth as u32;
                let death_f = max_level + 1 - death as u32;
                *out.entry((birth_f, death_f)).or_default() += mult as usize;
            }
        }
        let essential =
            beta(birth, levels) as i64 - beta(birth - 1, levels) as i64;
        assert!(essential >= 0);
        if essential > 0 {
            let birth_f = max_level + 1 - birth as u32;
            *out.entry((birth_f, 0)).or_default() += essential as usize;
        }
    }
    out
}

/// Deterministic pseudo-random binary matrix generator for oracle sweeps.
/// xorshift-based so it shares nothing with the production RNG.
pub struct MatrixGen {
    state: u64,
}

impl MatrixGen {
    pub fn new(seed: u64) -> Self {
        Self { state: seed.max(1) }
    }

    fn next(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }

    /// Random N x d matrix with N in 3..=max_n, d in 2..=max_d and density
    /// between `density_lo` and `density_hi`.
    pub fn matrix(&mut self, max_n: usize, max_d: usize, density_lo: f64, density_hi: f64) -> BinaryMatrix {
        let n = 3 + (self.next() as usize) % (max_n - 2);
        let d = 2 + (self.next() as usize) % (max_d - 1);
        let density = density_lo + (self.next() as f64 / u64::MAX as f64) * (density_hi - density_lo);
        let threshold = (density * u64::MAX as f64) as u64;
        let bits: Vec<u8> = (0..n * d).map(|_| u8::from(self.next() < threshold)).collect();
        BinaryMatrix::new(
            bits,
            (0..n).map(|i| format!("r{i}")).collect(),
            (0..d).map(|j| format!("c{j}")).collect(),
        )
        .unwrap()
    }
}
