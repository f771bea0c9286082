//! Score-matrix ingestion, dichotomization, Gram-matrix statistics, and row
//! resampling.

use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{CtError, Result};

/// Raw integer score matrix with scores in 0..=4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredMatrix {
    values: Vec<u8>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

/// 0/1 matrix; rows are samples, columns are variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    bits: Vec<u8>,
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
}

/// Gram matrix C = DᵀD of a binary matrix, together with its diagonal `s`
/// (the column sums).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcurrenceCounts {
    pub c: Vec<Vec<u32>>,
    pub s: Vec<u32>,
}

impl ScoredMatrix {
    pub fn new(values: Vec<u8>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let n = row_labels.len();
        let d = col_labels.len();
        if n == 0 || d == 0 {
            return Err(CtError::Shape("matrix must have at least one row and one column".into()));
        }
        if values.len() != n * d {
            return Err(CtError::Shape(format!(
                "expected {} values for a {}x{} matrix, got {}",
                n * d,
                n,
                d,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v > 4) {
            return Err(CtError::Value {
                line: 0,
                message: format!("score {v} outside 0..=4"),
            });
        }
        check_unique_labels(&col_labels)?;
        Ok(Self { values, row_labels, col_labels })
    }

    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.values[i * self.n_cols() + j]
    }
}

fn check_unique_labels(labels: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(CtError::Value {
                line: 1,
                message: format!("duplicate column label {l:?}"),
            });
        }
    }
    Ok(())
}

impl BinaryMatrix {
    pub fn new(bits: Vec<u8>, row_labels: Vec<String>, col_labels: Vec<String>) -> Result<Self> {
        let n = row_labels.len();
        let d = col_labels.len();
        if n == 0 || d == 0 {
            return Err(CtError::Shape("matrix must have at least one row and one column".into()));
        }
        if bits.len() != n * d {
            return Err(CtError::Shape(format!(
                "expected {} bits for a {}x{} matrix, got {}",
                n * d,
                n,
                d,
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(CtError::Value {
                line: 0,
                message: "binary matrix entries must be 0 or 1".into(),
            });
        }
        check_unique_labels(&col_labels)?;
        Ok(Self { bits, row_labels, col_labels })
    }

    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.bits[i * self.n_cols() + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        let d = self.n_cols();
        &self.bits[i * d..(i + 1) * d]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        let d = self.n_cols();
        self.bits[i * d + j] = v;
    }

    /// Writes the matrix in the same tabular format `load_scored_matrix`
    /// reads: header row of column labels, leading row-label column.
    pub fn write_tabular<W: Write>(&self, mut out: W, delimiter: char) -> Result<()> {
        let mut header = String::from("id");
        for l in &self.col_labels {
            header.push(delimiter);
            header.push_str(l);
        }
        writeln!(out, "{header}")?;
        for i in 0..self.n_rows() {
            let mut line = self.row_labels[i].clone();
            for &b in self.row(i) {
                line.push(delimiter);
                line.push(if b == 1 { '1' } else { '0' });
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Parses a CSV/TSV score matrix: header row of column labels, first column
/// row labels, remaining cells integers in 0..=4. The delimiter is detected
/// from the header line (tab wins over comma).
pub fn load_scored_matrix<R: BufRead>(reader: R) -> Result<ScoredMatrix> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => {
            return Err(CtError::Parse { line: 1, message: "empty input".into() });
        }
    };
    let delim = if header.contains('\t') { '\t' } else { ',' };
    let col_labels: Vec<String> = header
        .split(delim)
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    if col_labels.is_empty() {
        return Err(CtError::Parse {
            line: 1,
            message: "header has no column labels".into(),
        });
    }
    let d = col_labels.len();

    let mut row_labels = Vec::new();
    let mut values = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(delim).collect();
        if fields.len() != d + 1 {
            return Err(CtError::Parse {
                line: line_no,
                message: format!("expected {} fields, found {}", d + 1, fields.len()),
            });
        }
        row_labels.push(fields[0].trim().to_string());
        for f in &fields[1..] {
            let f = f.trim();
            let v: i64 = f.parse().map_err(|_| CtError::Value {
                line: line_no,
                message: format!("non-integer score {f:?}"),
            })?;
            if !(0..=4).contains(&v) {
                return Err(CtError::Value {
                    line: line_no,
                    message: format!("score {v} outside 0..=4"),
                });
            }
            values.push(v as u8);
        }
    }
    if row_labels.is_empty() {
        return Err(CtError::Parse { line: 2, message: "no data rows".into() });
    }
    ScoredMatrix::new(values, row_labels, col_labels)
}

/// Converts scores to presence/absence: an entry becomes 1 iff its score is
/// positive.
pub fn dichotomize(m: &ScoredMatrix) -> BinaryMatrix {
    let bits = (0..m.n_rows())
        .flat_map(|i| (0..m.n_cols()).map(move |j| u8::from(m.get(i, j) > 0)))
        .collect();
    BinaryMatrix {
        bits,
        row_labels: m.row_labels.clone(),
        col_labels: m.col_labels.clone(),
    }
}

/// C = DᵀD: C[i][j] counts the rows where columns i and j are both 1; the
/// diagonal holds the column sums.
pub fn concurrence_matrix(b: &BinaryMatrix) -> ConcurrenceCounts {
    let d = b.n_cols();
    let mut c = vec![vec![0u32; d]; d];
    for r in 0..b.n_rows() {
        let row = b.row(r);
        for i in 0..d {
            if row[i] == 1 {
                for j in i..d {
                    if row[j] == 1 {
                        c[i][j] += 1;
                    }
                }
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            c[i][j] = c[j][i];
        }
    }
    let s = (0..d).map(|i| c[i][i]).collect();
    ConcurrenceCounts { c, s }
}

/// Per-column counts of rows with a 1, sorted by count descending and label
/// ascending on ties.
pub fn mutation_counts(b: &BinaryMatrix) -> Vec<(String, u32)> {
    let d = b.n_cols();
    let mut counts = vec![0u32; d];
    for i in 0..b.n_rows() {
        for (j, &bit) in b.row(i).iter().enumerate() {
            counts[j] += u32::from(bit);
        }
    }
    let mut out: Vec<(String, u32)> = b
        .col_labels
        .iter()
        .cloned()
        .zip(counts)
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Draws N rows uniformly with replacement (the nonparametric bootstrap).
/// Row labels record the source row index as `r<idx>`.
pub fn resample_rows<R: Rng>(b: &BinaryMatrix, rng: &mut R) -> BinaryMatrix {
    let n = b.n_rows();
    let d = b.n_cols();
    let mut bits = Vec::with_capacity(n * d);
    let mut row_labels = Vec::with_capacity(n);
    for _ in 0..n {
        let src = rng.gen_range(0..n);
        bits.extend_from_slice(b.row(src));
        row_labels.push(format!("r{src}"));
    }
    BinaryMatrix {
        bits,
        row_labels,
        col_labels: b.col_labels.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn load(text: &str) -> Result<ScoredMatrix> {
        load_scored_matrix(std::io::Cursor::new(text))
    }

    #[test]
    fn loads_small_csv() {
        let m = load("id,a,b\nr1,0,3\nr2,1,0\n").unwrap();
        assert_eq!(m.n_rows(), 2);
        assert_eq!(m.n_cols(), 2);
        assert_eq!(m.get(0, 0), 0);
        assert_eq!(m.get(0, 1), 3);
        assert_eq!(m.get(1, 0), 1);
        assert_eq!(m.col_labels, vec!["a", "b"]);
    }

    #[test]
    fn loads_tsv() {
        let m = load("id\ta\tb\nr1\t2\t0\n").unwrap();
        assert_eq!(m.get(0, 0), 2);
    }

    #[test]
    fn rejects_out_of_range_score() {
        let err = load("id,a,b\nr1,5,0\n").unwrap_err();
        match err {
            CtError::Value { line, .. } => assert_eq!(line, 2),
            other => panic!("expected value error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_short_row_with_line_number() {
        let err = load("id,a,b\nr1,1,0\nr2,1\n").unwrap_err();
        match err {
            CtError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_column_labels() {
        assert!(load("id,a,a\nr1,1,0\n").is_err());
    }

    #[test]
    fn rejects_empty_after_header() {
        let err = load("id,a,b\n").unwrap_err();
        assert!(err.to_string().contains("no data rows"));
    }

    #[test]
    fn dichotomize_examples() {
        let m = load("id,a,b\nr1,0,3\nr2,1,0\n").unwrap();
        let b = dichotomize(&m);
        assert_eq!(b.bits(), &[0, 1, 1, 0]);

        let z = load("id,a,b\nr1,0,0\n").unwrap();
        assert_eq!(dichotomize(&z).bits(), &[0, 0]);

        let s = load("id,a,b\nr1,4,4\nr2,4,4\n").unwrap();
        assert_eq!(dichotomize(&s).bits(), &[1, 1, 1, 1]);
    }

    #[test]
    fn concurrence_identity() {
        let b = BinaryMatrix::new(
            vec![1, 0, 0, 1],
            vec!["r1".into(), "r2".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let cc = concurrence_matrix(&b);
        assert_eq!(cc.c, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn concurrence_hand_count() {
        // rows: {1,1}, {1,0}, {0,1}
        let b = BinaryMatrix::new(
            vec![1, 1, 1, 0, 0, 1],
            vec!["r1".into(), "r2".into(), "r3".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let cc = concurrence_matrix(&b);
        assert_eq!(cc.c, vec![vec![2, 1], vec![1, 2]]);
        assert_eq!(cc.s, vec![2, 2]);
    }

    #[test]
    fn concurrence_all_ones() {
        let b = BinaryMatrix::new(
            vec![1; 6],
            vec!["r1".into(), "r2".into(), "r3".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert_eq!(concurrence_matrix(&b).c, vec![vec![3, 3], vec![3, 3]]);
    }

    #[test]
    fn mutation_counts_sorted() {
        let b = BinaryMatrix::new(
            vec![0, 1, 1, 0, 1, 0],
            vec!["r1".into(), "r2".into(), "r3".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert_eq!(mutation_counts(&b), vec![("a".into(), 2), ("b".into(), 1)]);
    }

    #[test]
    fn mutation_counts_tie_breaks_by_label() {
        let b = BinaryMatrix::new(
            vec![1, 1],
            vec!["r1".into()],
            vec!["z".into(), "a".into()],
        )
        .unwrap();
        assert_eq!(mutation_counts(&b), vec![("a".into(), 1), ("z".into(), 1)]);
    }

    #[test]
    fn resample_single_row_is_identity() {
        let b = BinaryMatrix::new(vec![1, 0], vec!["r1".into()], vec!["a".into(), "b".into()])
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = resample_rows(&b, &mut rng);
        assert_eq!(r.bits(), b.bits());
    }

    #[test]
    fn resample_deterministic_under_seed() {
        let b = BinaryMatrix::new(
            vec![1, 0, 0, 1, 1, 1],
            vec!["r1".into(), "r2".into(), "r3".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let a = resample_rows(&b, &mut ChaCha8Rng::seed_from_u64(42));
        let c = resample_rows(&b, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, c);
    }

    #[test]
    fn resample_slot_frequencies() {
        let b = BinaryMatrix::new(
            vec![1, 0, 0, 1],
            vec!["r1".into(), "r2".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trials = 10_000;
        let mut first_row_hits = [0u32; 2];
        for _ in 0..trials {
            let r = resample_rows(&b, &mut rng);
            for slot in 0..2 {
                if r.row(slot) == b.row(0) {
                    first_row_hits[slot] += 1;
                }
            }
        }
        for hits in first_row_hits {
            let freq = f64::from(hits) / f64::from(trials);
            assert!((freq - 0.5).abs() <= 0.02, "slot frequency {freq}");
        }
    }

    #[test]
    fn resample_rows_are_source_rows() {
        let b = BinaryMatrix::new(
            vec![1, 0, 0, 1, 1, 1],
            vec!["r1".into(), "r2".into(), "r3".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let r = resample_rows(&b, &mut ChaCha8Rng::seed_from_u64(3));
        for i in 0..r.n_rows() {
            assert!((0..b.n_rows()).any(|s| b.row(s) == r.row(i)));
        }
    }

    #[test]
    fn tabular_round_trip() {
        let b = BinaryMatrix::new(
            vec![1, 0, 0, 1],
            vec!["r1".into(), "r2".into()],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let mut buf = Vec::new();
        b.write_tabular(&mut buf, ',').unwrap();
        let loaded = load_scored_matrix(std::io::Cursor::new(buf)).unwrap();
        let again = dichotomize(&loaded);
        assert_eq!(again.bits(), b.bits());
        assert_eq!(again.row_labels, b.row_labels);
    }
}
