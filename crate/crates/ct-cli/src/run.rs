//! Subcommand implementations.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use ct_core::diagram_json::{diagram_json, DiagramJson};
use ct_core::experiments::{
    compare_observed, run_bootstrap_study, run_simulation_study, BootstrapReport,
    ComparisonSummary, SimulationReport, StudyConfig,
};
use ct_core::homology::{build_filtration, persistent_homology, LifespanConvention};
use ct_core::matrix::{dichotomize, load_scored_matrix, mutation_counts, BinaryMatrix};
use ct_core::sunflower::{render_svg, sunflower_plot_data};
use ct_core::CtError;
use serde::{Deserialize, Serialize};

use crate::args::{AnalyzeArgs, CompareArgs, FileConfig, InputArgs, PlotArgs, StudyArgs};

pub enum RunError {
    Usage(String),
    IoOrParse(String),
    Numeric(String),
}

impl From<CtError> for RunError {
    fn from(e: CtError) -> Self {
        match e {
            CtError::Io(_) | CtError::Parse { .. } | CtError::Value { .. } => {
                RunError::IoOrParse(e.to_string())
            }
            CtError::Contract(_) | CtError::Shape(_) => RunError::Usage(e.to_string()),
            _ => RunError::Numeric(e.to_string()),
        }
    }
}

type RunResult = Result<(), RunError>;

fn load_binary(path: &Path) -> Result<BinaryMatrix, RunError> {
    let file = File::open(path)
        .map_err(|e| RunError::IoOrParse(format!("cannot open {}: {e}", path.display())))?;
    let scored = load_scored_matrix(BufReader::new(file))?;
    Ok(dichotomize(&scored))
}

/// Writes to the output path, or stdout when none was given.
fn emit(output: Option<&PathBuf>, content: &str) -> RunResult {
    match output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| RunError::IoOrParse(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(content.as_bytes())
                .map_err(|e| RunError::IoOrParse(e.to_string()))?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn config_header(command: &str, input: &Path, pairs: &[(&str, String)]) -> String {
    let mut s = format!("# ct {command}\n# input = {}\n", input.display());
    for (k, v) in pairs {
        s.push_str(&format!("# {k} = {v}\n"));
    }
    s
}

fn convention_name(c: LifespanConvention) -> &'static str {
    match c {
        LifespanConvention::Difference => "difference",
        LifespanConvention::Inclusive => "inclusive",
    }
}

pub fn cmd_counts(args: &InputArgs) -> RunResult {
    let b = load_binary(&args.input)?;
    let counts = mutation_counts(&b);
    let mut out = config_header("counts", &args.input, &[]);
    for (label, count) in counts {
        out.push_str(&format!("{label}\t{count}\n"));
    }
    emit(args.output.as_ref(), &out)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub command: String,
    pub input: String,
    pub lifespan_convention: LifespanConvention,
    pub diagram: DiagramJson,
}

pub fn cmd_analyze(args: &AnalyzeArgs, localize_only: bool) -> RunResult {
    let file_cfg = FileConfig::load(args.config.as_ref()).map_err(RunError::Usage)?;
    let convention = args
        .lifespan_convention
        .or(file_cfg.lifespan_convention)
        .unwrap_or_default();
    let b = load_binary(&args.io.input)?;
    let filtration = build_filtration(&b);

    if filtration.max_level == 0 {
        println!("empty filtration: the input contains no mutations");
        let json = AnalyzeOutput {
            command: if localize_only { "localize" } else { "analyze" }.into(),
            input: args.io.input.display().to_string(),
            lifespan_convention: convention,
            diagram: DiagramJson {
                dimension: 1,
                lifespan_convention: convention,
                classes: Vec::new(),
            },
        };
        if let Some(path) = &args.io.output {
            emit(Some(path), &pretty(&json)?)?;
        }
        return Ok(());
    }

    let diag = persistent_homology(&filtration);
    let json_diag = diagram_json(&filtration, &diag, convention);

    let max_lifespan = json_diag.classes.iter().map(|c| c.lifespan).max().unwrap_or(0);
    let mut summary = String::new();
    if !localize_only {
        summary.push_str(&format!(
            "{} dimension-1 class(es); maximum lifespan {max_lifespan} ({})\n",
            json_diag.classes.len(),
            convention_name(convention),
        ));
    }
    for cls in &json_diag.classes {
        if cls.lifespan != max_lifespan {
            continue;
        }
        summary.push_str(&format!(
            "class birth {} death {} lifespan {}\n",
            cls.birth, cls.death, cls.lifespan
        ));
        if cls.short_cycles.is_empty() {
            summary.push_str("  no short-cycle representative\n");
        }
        for sc in &cls.short_cycles {
            summary.push_str(&format!(
                "  short cycle: {}, {}, {} (levels {}..{})\n",
                sc.vertices.0, sc.vertices.1, sc.vertices.2, sc.level_range.0, sc.level_range.1
            ));
        }
    }
    print!("{summary}");

    if let Some(path) = &args.io.output {
        let json = AnalyzeOutput {
            command: if localize_only { "localize" } else { "analyze" }.into(),
            input: args.io.input.display().to_string(),
            lifespan_convention: convention,
            diagram: json_diag,
        };
        emit(Some(path), &pretty(&json)?)?;
    }
    Ok(())
}

fn pretty<T: Serialize>(value: &T) -> Result<String, RunError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| RunError::Numeric(format!("serialization failed: {e}")))
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            if n == 0 {
                return Err(RunError::Usage("--jobs must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| RunError::Numeric(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub command: String,
    pub input: String,
    pub report: SimulationReport,
}

fn study_header(command: &str, args: &StudyArgs, cfg: &StudyConfig) -> String {
    config_header(
        command,
        &args.io.input,
        &[
            ("seed", cfg.master_seed.to_string()),
            ("n_synthetic", cfg.n_synthetic.to_string()),
            ("n_bootstrap", cfg.n_bootstrap.to_string()),
            ("n_cutoff_resamples", cfg.n_cutoff_resamples.to_string()),
            ("max_flip_attempts", cfg.max_flip_attempts.to_string()),
            (
                "lifespan_convention",
                convention_name(cfg.lifespan_convention).to_string(),
            ),
            ("track", format!("{:?}", cfg.tracked_vertices)),
        ],
    )
}

fn write_ndjson(path: &PathBuf, records: &[ct_core::experiments::RunRecord]) -> RunResult {
    let file = File::create(path)
        .map_err(|e| RunError::IoOrParse(format!("cannot write {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| RunError::Numeric(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| RunError::IoOrParse(e.to_string()))?;
    }
    Ok(())
}

fn membership_lines(membership: &std::collections::BTreeMap<String, f64>) -> String {
    let mut s = String::new();
    for (label, p) in membership {
        s.push_str(&format!("{label}\t{p:.3}\n"));
    }
    s
}

pub fn cmd_simulate(args: &StudyArgs) -> RunResult {
    let file_cfg = FileConfig::load(args.config.as_ref()).map_err(RunError::Usage)?;
    let cfg = args.resolve(&file_cfg);
    let b = load_binary(&args.io.input)?;
    let report = in_pool(args.jobs(&file_cfg), || run_simulation_study(&b, &cfg))??;

    let mut text = study_header("simulate", args, &cfg);
    text.push_str(&format!("m2 cutoff: {:.6}\n", report.m2_cutoff));
    if let Some(s) = &report.lifespan_summary {
        text.push_str("\nmaximum lifespans over synthetic datasets:\n");
        text.push_str(&s.render());
    }
    if let Some(s) = &report.birth_summary {
        text.push_str("\nbirth levels of maximum-lifespan classes:\n");
        text.push_str(&s.render());
    }
    text.push_str(&format!(
        "\nobserved lifespan {} exceeded in {:.1}% of runs\nobserved birth {} exceeded in {:.1}% of runs\n",
        report.observed_lifespan,
        100.0 * report.frac_lifespan_exceeds_observed,
        report.observed_birth,
        100.0 * report.frac_birth_exceeds_observed,
    ));
    text.push_str(&format!(
        "\nshort-cycle vertex membership ({} run(s) without a short cycle, {} failed):\n",
        report.n_without_short_cycle, report.n_failed
    ));
    text.push_str(&membership_lines(&report.vertex_membership));
    print!("{text}");

    if let Some(path) = &args.ndjson {
        write_ndjson(path, &report.per_run_records)?;
    }
    if let Some(path) = &args.io.output {
        let out = SimulateOutput {
            command: "simulate".into(),
            input: args.io.input.display().to_string(),
            report,
        };
        emit(Some(path), &pretty(&out)?)?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BootstrapOutput {
    pub command: String,
    pub input: String,
    pub report: BootstrapReport,
}

pub fn cmd_bootstrap(args: &StudyArgs) -> RunResult {
    let file_cfg = FileConfig::load(args.config.as_ref()).map_err(RunError::Usage)?;
    let cfg = args.resolve(&file_cfg);
    let b = load_binary(&args.io.input)?;
    let report = in_pool(args.jobs(&file_cfg), || run_bootstrap_study(&b, &cfg))??;

    let mut text = study_header("bootstrap", args, &cfg);
    text.push_str(&format!(
        "short-cycle vertex membership over {} resamples ({} without a short cycle):\n",
        cfg.n_bootstrap, report.n_without_short_cycle
    ));
    text.push_str(&membership_lines(&report.vertex_membership));
    print!("{text}");

    if let Some(path) = &args.ndjson {
        write_ndjson(path, &report.per_resample_records)?;
    }
    if let Some(path) = &args.io.output {
        let out = BootstrapOutput {
            command: "bootstrap".into(),
            input: args.io.input.display().to_string(),
            report,
        };
        emit(Some(path), &pretty(&out)?)?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CompareOutput {
    pub command: String,
    pub input: String,
    pub comparison: ComparisonSummary,
}

pub fn cmd_compare(args: &CompareArgs) -> RunResult {
    let file_cfg = FileConfig::load(args.config.as_ref()).map_err(RunError::Usage)?;
    let convention = args
        .lifespan_convention
        .or(file_cfg.lifespan_convention)
        .unwrap_or_default();
    let b = load_binary(&args.io.input)?;
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| RunError::IoOrParse(format!("cannot read {}: {e}", args.report.display())))?;
    let report: SimulationReport = match serde_json::from_str::<SimulateOutput>(&text) {
        Ok(wrapper) => wrapper.report,
        Err(_) => serde_json::from_str(&text)
            .map_err(|e| RunError::IoOrParse(format!("bad report {}: {e}", args.report.display())))?,
    };

    let diag = persistent_homology(&build_filtration(&b));
    let comparison = compare_observed(&report, &diag, convention);
    let mut out = config_header(
        "compare",
        &args.io.input,
        &[
            ("report", args.report.display().to_string()),
            ("lifespan_convention", convention_name(convention).to_string()),
        ],
    );
    out.push_str(&format!(
        "observed lifespan {}: exceeded in {:.1}% of runs\nobserved birth {}: exceeded in {:.1}% of runs\n",
        comparison.observed_lifespan,
        100.0 * comparison.frac_lifespan_exceeds_observed,
        comparison.observed_birth,
        100.0 * comparison.frac_birth_exceeds_observed,
    ));
    print!("{out}");
    if let Some(path) = &args.io.output {
        let json = CompareOutput {
            command: "compare".into(),
            input: args.io.input.display().to_string(),
            comparison,
        };
        emit(Some(path), &pretty(&json)?)?;
    }
    Ok(())
}

pub fn cmd_plot(args: &PlotArgs) -> RunResult {
    let file_cfg = FileConfig::load(args.config.as_ref()).map_err(RunError::Usage)?;
    let disk_threshold = args.disk_threshold(&file_cfg);
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| RunError::IoOrParse(format!("cannot read {}: {e}", args.input.display())))?;
    let diagram: DiagramJson = match serde_json::from_str::<AnalyzeOutput>(&text) {
        Ok(wrapper) => wrapper.diagram,
        Err(_) => serde_json::from_str(&text)
            .map_err(|e| RunError::IoOrParse(format!("bad diagram {}: {e}", args.input.display())))?,
    };
    let plot = sunflower_plot_data(&diagram.to_diagram(), disk_threshold);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<!-- ct plot; disk_threshold = {disk_threshold} -->\n"
    ));
    svg.push_str(&render_svg(&plot));
    emit(args.output.as_ref(), &svg)
}
