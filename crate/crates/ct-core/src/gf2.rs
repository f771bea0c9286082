//! Small dense GF(2) linear algebra on bit-packed vectors.

/// Dense bit vector over GF(2), packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the highest set bit, if any.
    pub fn highest_bit(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Row space maintained in echelon form, keyed by highest set bit. Supports
/// incremental insertion and membership queries.
#[derive(Debug, Clone, Default)]
pub struct Gf2Span {
    // pivot bit -> reduced row with that pivot
    rows: std::collections::BTreeMap<usize, BitVec>,
}

impl Gf2Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the span; returns the residue.
    pub fn reduce(&self, mut v: BitVec) -> BitVec {
        while let Some(p) = v.highest_bit() {
            match self.rows.get(&p) {
                Some(row) => v.xor_assign(row),
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }

    /// Inserts `v`; returns false when `v` was already in the span.
    pub fn insert(&mut self, v: BitVec) -> bool {
        let r = self.reduce(v);
        match r.highest_bit() {
            Some(p) => {
                self.rows.insert(p, r);
                true
            }
            None => false,
        }
    }
}
