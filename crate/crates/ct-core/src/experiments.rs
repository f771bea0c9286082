//! Study orchestration: batch synthetic generation with homology summaries,
//! observed-data comparison, and the bootstrap short-cycle-membership study.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CtError, Result};
use crate::homology::{
    build_filtration, localize_short_cycles, max_lifespan_classes, persistent_homology,
    LifespanConvention, PersistenceDiagram,
};
use crate::matrix::{resample_rows, BinaryMatrix};
use crate::null_model::{bootstrap_cutoff, Synthesizer};
use crate::seeds::derive_seed;

/// Seed stream index reserved for the bootstrap cutoff so it never collides
/// with per-run seeds.
const CUTOFF_SEED_INDEX: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub n_synthetic: usize,
    pub n_bootstrap: usize,
    pub n_cutoff_resamples: usize,
    pub master_seed: u64,
    pub max_flip_attempts: u64,
    pub lifespan_convention: LifespanConvention,
    pub tracked_vertices: Vec<String>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            n_synthetic: 500,
            n_bootstrap: 500,
            n_cutoff_resamples: 2000,
            master_seed: 0,
            max_flip_attempts: 50_000,
            lifespan_convention: LifespanConvention::Difference,
            tracked_vertices: Vec::new(),
        }
    }
}

impl StudyConfig {
    pub fn validate(&self, col_labels: &[String]) -> Result<()> {
        if self.n_synthetic == 0 || self.n_bootstrap == 0 || self.n_cutoff_resamples == 0 {
            return Err(CtError::Contract("study counts must be at least 1".into()));
        }
        if self.max_flip_attempts == 0 {
            return Err(CtError::Contract("max_flip_attempts must be at least 1".into()));
        }
        for v in &self.tracked_vertices {
            if !col_labels.contains(v) {
                return Err(CtError::Contract(format!(
                    "tracked vertex {v:?} is not a column label"
                )));
            }
        }
        Ok(())
    }
}

/// min, q1, median, mean, q3, max with quartiles by linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SixNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl SixNumberSummary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Some(Self {
            min: sorted[0],
            q1: quantile(&sorted, 0.25),
            median: quantile(&sorted, 0.5),
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            q3: quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
        })
    }

    /// Plain-text table with the customary summary headers.
    pub fn render(&self) -> String {
        let headers = ["Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max."];
        let values = [self.min, self.q1, self.median, self.mean, self.q3, self.max];
        let cells: Vec<String> = values.iter().map(|v| format!("{v:.2}")).collect();
        let widths: Vec<usize> = headers
            .iter()
            .zip(&cells)
            .map(|(h, c)| h.len().max(c.len()))
            .collect();
        let header_line: Vec<String> = headers
            .iter()
            .zip(&widths)
            .map(|(h, w)| format!("{h:>w$}"))
            .collect();
        let value_line: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        format!("{}\n{}\n", header_line.join("  "), value_line.join("  "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RunOutcome {
    Ok {
        /// Lifespan of the maximal class(es).
        lifespan: u32,
        /// Maximum birth among tied maximal classes.
        birth: u32,
        /// Union of short-cycle vertices over the tied maximal classes.
        short_cycle_vertices: BTreeSet<String>,
        n_max_classes: usize,
        /// Empty diagram: no dimension-1 class at all.
        empty_diagram: bool,
        threshold: Option<f64>,
        delta_final: Option<f64>,
        flip_attempts: Option<u64>,
        successful_flips: Option<u64>,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: usize,
    pub seed: u64,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: StudyConfig,
    pub m2_cutoff: f64,
    pub lifespan_summary: Option<SixNumberSummary>,
    pub birth_summary: Option<SixNumberSummary>,
    pub observed_lifespan: u32,
    pub observed_birth: u32,
    pub frac_lifespan_exceeds_observed: f64,
    pub frac_birth_exceeds_observed: f64,
    /// Proportion of runs (among those whose maximal class had at least one
    /// short cycle) where the label appears in a short cycle of a maximal
    /// class.
    pub vertex_membership: BTreeMap<String, f64>,
    pub n_without_short_cycle: usize,
    pub n_failed: usize,
    pub per_run_records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub config: StudyConfig,
    /// Proportion of resamples where the label appears in a short cycle of a
    /// maximal class.
    pub vertex_membership: BTreeMap<String, f64>,
    pub n_without_short_cycle: usize,
    pub per_resample_records: Vec<RunRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub observed_lifespan: u32,
    pub observed_birth: u32,
    pub frac_lifespan_exceeds_observed: f64,
    pub frac_birth_exceeds_observed: f64,
}

/// Max-lifespan statistics of one diagram: (lifespan, max birth among ties,
/// union of short-cycle vertex labels, tie count, had-short-cycle flag).
fn diagram_stats(
    b_labels: &[String],
    filtration: &crate::homology::ConcurrenceFiltration,
    diag: &PersistenceDiagram,
    convention: LifespanConvention,
) -> Option<(u32, u32, BTreeSet<String>, usize, bool)> {
    let maximal = max_lifespan_classes(diag, convention);
    if maximal.is_empty() {
        return None;
    }
    let lifespan = maximal[0].lifespan(convention);
    let birth = maximal.iter().map(|c| c.birth).max().unwrap();
    let mut vertices = BTreeSet::new();
    let mut any_cycle = false;
    for cls in &maximal {
        for sc in localize_short_cycles(filtration, cls) {
            any_cycle = true;
            let (i, j, k) = sc.vertices;
            vertices.insert(b_labels[i].clone());
            vertices.insert(b_labels[j].clone());
            vertices.insert(b_labels[k].clone());
        }
    }
    Some((lifespan, birth, vertices, maximal.len(), any_cycle))
}

fn membership_proportions(
    records: &[RunRecord],
    tracked: &[String],
    denominator: usize,
) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for t in tracked {
        counts.entry(t.clone()).or_default();
    }
    for r in records {
        if let RunOutcome::Ok { short_cycle_vertices, .. } = &r.outcome {
            for v in short_cycle_vertices {
                *counts.entry(v.clone()).or_default() += 1;
            }
        }
    }
    counts
        .into_iter()
        .map(|(k, v)| {
            let p = if denominator == 0 { 0.0 } else { v as f64 / denominator as f64 };
            (k, p)
        })
        .collect()
}

/// Generates `n_synthetic` null datasets, computes each one's dimension-1
/// diagram and maximal classes, and aggregates lifespan/birth summaries,
/// observed-exceedance fractions, and short-cycle vertex membership.
///
/// Per-run seeds derive deterministically from the master seed, so the
/// report is bit-identical regardless of thread count. Individual synthesis
/// failures are recorded and tolerated up to 10% of runs.
pub fn run_simulation_study(b: &BinaryMatrix, cfg: &StudyConfig) -> Result<SimulationReport> {
    cfg.validate(&b.col_labels)?;
    let synthesizer = Synthesizer::new(b)?;
    let mut cutoff_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.master_seed, CUTOFF_SEED_INDEX));
    let m2 = bootstrap_cutoff(b, cfg.n_cutoff_resamples, &mut cutoff_rng)?;

    let convention = cfg.lifespan_convention;
    let records: Vec<RunRecord> = (0..cfg.n_synthetic)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(cfg.master_seed, run as u64);
            let outcome = match synthesizer.synthesize(seed, m2, cfg.max_flip_attempts) {
                Ok(rec) => {
                    let filtration = build_filtration(&rec.matrix);
                    let diag = persistent_homology(&filtration);
                    match diagram_stats(&rec.matrix.col_labels, &filtration, &diag, convention) {
                        Some((lifespan, birth, vertices, ties, any_cycle)) => RunOutcome::Ok {
                            lifespan,
                            birth,
                            short_cycle_vertices: if any_cycle { vertices } else { BTreeSet::new() },
                            n_max_classes: ties,
                            empty_diagram: false,
                            threshold: Some(rec.threshold),
                            delta_final: Some(rec.delta_final),
                            flip_attempts: Some(rec.flip_attempts),
                            successful_flips: Some(rec.successful_flips),
                        },
                        None => RunOutcome::Ok {
                            lifespan: 0,
                            birth: 0,
                            short_cycle_vertices: BTreeSet::new(),
                            n_max_classes: 0,
                            empty_diagram: true,
                            threshold: Some(rec.threshold),
                            delta_final: Some(rec.delta_final),
                            flip_attempts: Some(rec.flip_attempts),
                            successful_flips: Some(rec.successful_flips),
                        },
                    }
                }
                Err(e) => RunOutcome::Failed { error: e.to_string() },
            };
            RunRecord { run_index: run, seed, outcome }
        })
        .collect();

    let n_failed = records
        .iter()
        .filter(|r| matches!(r.outcome, RunOutcome::Failed { .. }))
        .count();
    if n_failed * 10 > cfg.n_synthetic {
        return Err(CtError::Numeric(format!(
            "{n_failed} of {} syntheses failed (more than 10%)",
            cfg.n_synthetic
        )));
    }

    let lifespans: Vec<f64> = records
        .iter()
        .filter_map(|r| match &r.outcome {
            RunOutcome::Ok { lifespan, empty_diagram: false, .. } => Some(f64::from(*lifespan)),
            _ => None,
        })
        .collect();
    let births: Vec<f64> = records
        .iter()
        .filter_map(|r| match &r.outcome {
            RunOutcome::Ok { birth, empty_diagram: false, .. } => Some(f64::from(*birth)),
            _ => None,
        })
        .collect();

    let n_with_cycle = records
        .iter()
        .filter(|r| matches!(&r.outcome, RunOutcome::Ok { short_cycle_vertices, empty_diagram: false, .. } if !short_cycle_vertices.is_empty()))
        .count();
    let n_ok = records
        .iter()
        .filter(|r| matches!(&r.outcome, RunOutcome::Ok { empty_diagram: false, .. }))
        .count();

    // observed statistics from the source matrix
    let observed_filtration = build_filtration(b);
    let observed_diag = persistent_homology(&observed_filtration);
    let (observed_lifespan, observed_birth) =
        match diagram_stats(&b.col_labels, &observed_filtration, &observed_diag, convention) {
            Some((l, bi, _, _, _)) => (l, bi),
            None => (0, 0),
        };

    let mut report = SimulationReport {
        config: cfg.clone(),
        m2_cutoff: m2,
        lifespan_summary: SixNumberSummary::of(&lifespans),
        birth_summary: SixNumberSummary::of(&births),
        observed_lifespan,
        observed_birth,
        frac_lifespan_exceeds_observed: 0.0,
        frac_birth_exceeds_observed: 0.0,
        vertex_membership: membership_proportions(&records, &cfg.tracked_vertices, n_with_cycle),
        n_without_short_cycle: n_ok - n_with_cycle,
        n_failed,
        per_run_records: records,
    };
    let cmp = compare_observed(&report, &observed_diag, convention);
    report.frac_lifespan_exceeds_observed = cmp.frac_lifespan_exceeds_observed;
    report.frac_birth_exceeds_observed = cmp.frac_birth_exceeds_observed;
    Ok(report)
}

/// Fraction of runs whose maximum lifespan (and birth of the maximal class)
/// strictly exceeds the observed values; ties count as non-exceedance.
pub fn compare_observed(
    report: &SimulationReport,
    observed: &PersistenceDiagram,
    convention: LifespanConvention,
) -> ComparisonSummary {
    let maximal = max_lifespan_classes(observed, convention);
    let observed_lifespan = maximal.first().map(|c| c.lifespan(convention)).unwrap_or(0);
    let observed_birth = maximal.iter().map(|c| c.birth).max().unwrap_or(0);

    let mut n = 0usize;
    let mut life_exceeds = 0usize;
    let mut birth_exceeds = 0usize;
    for r in &report.per_run_records {
        if let RunOutcome::Ok { lifespan, birth, empty_diagram: false, .. } = &r.outcome {
            n += 1;
            if *lifespan > observed_lifespan {
                life_exceeds += 1;
            }
            if *birth > observed_birth {
                birth_exceeds += 1;
            }
        }
    }
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    ComparisonSummary {
        observed_lifespan,
        observed_birth,
        frac_lifespan_exceeds_observed: frac(life_exceeds),
        frac_birth_exceeds_observed: frac(birth_exceeds),
    }
}

/// Resamples rows of the data `n_bootstrap` times and records short-cycle
/// vertex membership of each resample's maximal classes. Proportions are
/// over all resamples.
pub fn run_bootstrap_study(b: &BinaryMatrix, cfg: &StudyConfig) -> Result<BootstrapReport> {
    cfg.validate(&b.col_labels)?;
    let convention = cfg.lifespan_convention;
    let records: Vec<RunRecord> = (0..cfg.n_bootstrap)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(cfg.master_seed, run as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let resampled = resample_rows(b, &mut rng);
            let filtration = build_filtration(&resampled);
            let diag = persistent_homology(&filtration);
            let outcome =
                match diagram_stats(&resampled.col_labels, &filtration, &diag, convention) {
                    Some((lifespan, birth, vertices, ties, any_cycle)) => RunOutcome::Ok {
                        lifespan,
                        birth,
                        short_cycle_vertices: if any_cycle { vertices } else { BTreeSet::new() },
                        n_max_classes: ties,
                        empty_diagram: false,
                        threshold: None,
                        delta_final: None,
                        flip_attempts: None,
                        successful_flips: None,
                    },
                    None => RunOutcome::Ok {
                        lifespan: 0,
                        birth: 0,
                        short_cycle_vertices: BTreeSet::new(),
                        n_max_classes: 0,
                        empty_diagram: true,
                        threshold: None,
                        delta_final: None,
                        flip_attempts: None,
                        successful_flips: None,
                    },
                };
            RunRecord { run_index: run, seed, outcome }
        })
        .collect();

    let n_with_cycle = records
        .iter()
        .filter(|r| matches!(&r.outcome, RunOutcome::Ok { short_cycle_vertices, .. } if !short_cycle_vertices.is_empty()))
        .count();
    Ok(BootstrapReport {
        config: cfg.clone(),
        vertex_membership: membership_proportions(&records, &cfg.tracked_vertices, cfg.n_bootstrap),
        n_without_short_cycle: cfg.n_bootstrap - n_with_cycle,
        per_resample_records: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::PersistentClass;

    fn report_with_lifespans(pairs: &[(u32, u32)]) -> SimulationReport {
        let per_run_records = pairs
            .iter()
            .enumerate()
            .map(|(i, &(lifespan, birth))| RunRecord {
                run_index: i,
                seed: i as u64,
                outcome: RunOutcome::Ok {
                    lifespan,
                    birth,
                    short_cycle_vertices: BTreeSet::new(),
                    n_max_classes: 1,
                    empty_diagram: false,
                    threshold: None,
                    delta_final: None,
                    flip_attempts: None,
                    successful_flips: None,
                },
            })
            .collect();
        SimulationReport {
            config: StudyConfig::default(),
            m2_cutoff: 0.0,
            lifespan_summary: None,
            birth_summary: None,
            observed_lifespan: 0,
            observed_birth: 0,
            frac_lifespan_exceeds_observed: 0.0,
            frac_birth_exceeds_observed: 0.0,
            vertex_membership: BTreeMap::new(),
            n_without_short_cycle: 0,
            n_failed: 0,
            per_run_records,
        }
    }

    fn diagram(birth: u32, death: u32) -> PersistenceDiagram {
        PersistenceDiagram {
            classes: vec![PersistentClass { birth, death, representative: vec![] }],
        }
    }

    #[test]
    fn exceedance_one_third() {
        let report = report_with_lifespans(&[(3, 3), (5, 5), (7, 7)]);
        let cmp = compare_observed(&report, &diagram(5, 0), LifespanConvention::Difference);
        assert_eq!(cmp.observed_lifespan, 5);
        assert!((cmp.frac_lifespan_exceeds_observed - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn exceedance_degenerate_fractions() {
        let low = report_with_lifespans(&[(1, 1), (2, 2)]);
        let cmp = compare_observed(&low, &diagram(9, 0), LifespanConvention::Difference);
        assert_eq!(cmp.frac_lifespan_exceeds_observed, 0.0);

        let high = report_with_lifespans(&[(10, 10), (12, 12)]);
        let cmp = compare_observed(&high, &diagram(5, 0), LifespanConvention::Difference);
        assert_eq!(cmp.frac_lifespan_exceeds_observed, 1.0);
    }

    #[test]
    fn six_number_summary_matches_quartile_interpolation() {
        let s = SixNumberSummary::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.min, 1.0);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.q3, 3.25);
        assert_eq!(s.max, 4.0);
    }

    #[test]
    fn six_number_summary_single_value() {
        let s = SixNumberSummary::of(&[7.0]).unwrap();
        assert_eq!(s.min, 7.0);
        assert_eq!(s.q1, 7.0);
        assert_eq!(s.max, 7.0);
    }

    #[test]
    fn summary_render_has_expected_headers() {
        let s = SixNumberSummary::of(&[5.0, 12.0, 14.0, 17.0, 25.0]).unwrap();
        let text = s.render();
        for header in ["Min.", "1st Qu.", "Median", "Mean", "3rd Qu.", "Max."] {
            assert!(text.contains(header), "missing {header} in:\n{text}");
        }
    }

    #[test]
    fn config_rejects_unknown_tracked_vertex() {
        let cfg = StudyConfig {
            tracked_vertices: vec!["nope".into()],
            ..StudyConfig::default()
        };
        assert!(cfg.validate(&["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn config_rejects_zero_counts() {
        let cfg = StudyConfig { n_synthetic: 0, ..StudyConfig::default() };
        assert!(cfg.validate(&[]).is_err());
    }

    #[test]
    fn bootstrap_study_deterministic_on_toy_matrix() {
        let b = BinaryMatrix::new(
            vec![1, 1, 0, 0, 1, 1],
            vec!["r0".into(), "r1".into()],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let cfg = StudyConfig {
            n_bootstrap: 10,
            master_seed: 99,
            tracked_vertices: vec!["a".into()],
            ..StudyConfig::default()
        };
        let r1 = run_bootstrap_study(&b, &cfg).unwrap();
        let r2 = run_bootstrap_study(&b, &cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.per_resample_records.len(), 10);
    }
}
