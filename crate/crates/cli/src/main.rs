//! `qturn` — the quarter-turn index of a planar fixed point.
//!
//! Subcommands: `word` (symbolic analysis), `verify` (full pipeline, one
//! word or a sweep), `render` (SVG phase portrait / fate-grid CSV).
//!
//! Exit codes: 0 all checks pass, 1 assertion failure, 2 usage error,
//! 3 numeric non-convergence.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use qturn_core::config::Config;
use qturn_core::model::build_model;
use qturn_core::pipeline::{verify_sweep, verify_word};
use qturn_core::report::IndexReport;
use qturn_core::word::{
    detect_petals, ip_cyclic, is_conservative_word, module_lower_bound, sector_types,
    symbolic_index, CyclicWord,
};

#[derive(Parser)]
#[command(
    name = "qturn",
    version,
    about = "Quarter-turn index toolkit: cyclic-word algebra, glued sector models, numeric verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symbolic analysis of a cyclic word (no geometry)
    Word {
        /// Word over U,R,D,L or ↑,→,↓,← (counterclockwise reading)
        word: String,
        /// Emit JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Run the verification pipeline and emit the JSON report
    Verify {
        /// Word to verify (omit when using --sweep)
        word: Option<String>,
        /// Verify every allowed word with this many sectors
        #[arg(long)]
        sweep: Option<usize>,
        /// Include index-1 words below the validity regime (flagged, not failed)
        #[arg(long)]
        include_index_one: bool,
        /// Working radius for winding and recovery
        #[arg(long)]
        radius: Option<f64>,
        /// Samples per candidate curve
        #[arg(long)]
        samples: Option<usize>,
        /// Worker threads (default: QTURN_JOBS or all cores)
        #[arg(long)]
        jobs: Option<usize>,
        /// Seed for the star-shaped candidate curves
        #[arg(long)]
        seed: Option<u64>,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON config file (a previous report also works: its embedded
        /// config is used)
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Render the model: SVG phase portrait, optionally a fate-grid CSV
    Render {
        word: String,
        /// Output SVG path
        #[arg(long)]
        out: PathBuf,
        /// Also write an n-by-n fate grid CSV next to the SVG
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

const EXIT_PASS: u8 = 0;
const EXIT_ASSERT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NONCONVERGENT: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Word { word, json } => cmd_word(&word, json),
        Command::Verify {
            word,
            sweep,
            include_index_one,
            radius,
            samples,
            jobs,
            seed,
            out,
            config,
        } => {
            let cfg = load_config(
                config.as_deref(),
                radius,
                samples,
                seed,
                jobs,
                out.as_deref(),
            )?;
            setup_jobs(&cfg)?;
            match (word, sweep) {
                (Some(w), None) => cmd_verify(&w, &cfg),
                (None, Some(d)) => cmd_sweep(d, include_index_one, &cfg),
                (Some(_), Some(_)) => Err("give either a word or --sweep, not both".into()),
                (None, None) => Err("give a word or --sweep <d>".into()),
            }
        }
        Command::Render {
            word,
            out,
            grid,
            seed,
            samples,
            radius,
            jobs,
            config,
        } => {
            let cfg = load_config(config.as_deref(), radius, samples, seed, jobs, Some(&out))?;
            setup_jobs(&cfg)?;
            cmd_render(&word, &out, grid, &cfg)
        }
    }
}

/// Load a config file (or the config embedded in a report), then apply the
/// command-line overrides.
fn load_config(
    path: Option<&Path>,
    radius: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: Option<&Path>,
) -> Result<Config, String> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| format!("bad JSON in config: {e}"))?;
            let config_value = value.get("config").cloned().unwrap_or(value);
            serde_json::from_value(config_value).map_err(|e| format!("bad config: {e}"))?
        }
        None => Config::default(),
    };
    if let Some(r) = radius {
        if r <= 0.0 {
            return Err("--radius must be positive".into());
        }
        cfg.recovery_radius = r;
        cfg.winding.radius = r;
    }
    if let Some(s) = samples {
        cfg.curves.samples = s;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(j) = jobs {
        cfg.jobs = Some(j);
    } else if cfg.jobs.is_none() {
        // env override for the default jobs only
        if let Ok(env_jobs) = std::env::var("QTURN_JOBS") {
            cfg.jobs = Some(
                env_jobs
                    .parse()
                    .map_err(|_| format!("bad QTURN_JOBS value {env_jobs:?}"))?,
            );
        }
    }
    // the output path is per-invocation, never inherited from a reused config
    cfg.out = out.map(|o| o.display().to_string());
    cfg.validate()?;
    Ok(cfg)
}

fn setup_jobs(cfg: &Config) -> Result<(), String> {
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            return Err("--jobs must be at least 1".into());
        }
        // ignore the error if a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    Ok(())
}

fn parse_word(input: &str) -> Result<CyclicWord, String> {
    CyclicWord::parse(input).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct WordSummary {
    word: String,
    arrows: String,
    allowed: bool,
    d: usize,
    ip_c: Option<String>,
    ip_c_quarters: Option<i64>,
    symbolic_index: Option<i64>,
    sector_types: Option<String>,
    petals: Vec<PetalSummary>,
    conservative: Option<bool>,
    module_lower_bound: Option<u32>,
}

#[derive(Serialize)]
struct PetalSummary {
    position: usize,
    kind: String,
    pattern: String,
}

fn word_summary(word: &CyclicWord) -> WordSummary {
    let allowed = word.is_allowed();
    let mut summary = WordSummary {
        word: word.ascii(),
        arrows: word.arrows(),
        allowed,
        d: word.half_len(),
        ip_c: None,
        ip_c_quarters: None,
        symbolic_index: None,
        sector_types: None,
        petals: Vec::new(),
        conservative: None,
        module_lower_bound: None,
    };
    if allowed {
        let ip = ip_cyclic(word).expect("allowed");
        let idx = symbolic_index(word).expect("allowed");
        summary.ip_c = Some(ip.to_string());
        summary.ip_c_quarters = Some(ip.quarters());
        summary.symbolic_index = Some(idx);
        summary.sector_types = Some(
            sector_types(word)
                .expect("allowed")
                .iter()
                .map(|t| t.short())
                .collect(),
        );
        summary.petals = detect_petals(word)
            .expect("allowed")
            .iter()
            .map(|p| PetalSummary {
                position: p.position,
                kind: format!("{:?}", p.kind),
                pattern: p.kind.pattern().to_string(),
            })
            .collect();
        summary.conservative = Some(is_conservative_word(word).expect("allowed"));
        summary.module_lower_bound = Some(module_lower_bound(idx));
    }
    summary
}

fn cmd_word(input: &str, json: bool) -> Result<u8, String> {
    let word = parse_word(input)?;
    let summary = word_summary(&word);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("serializable")
        );
    } else {
        println!("word:          {}  ({})", summary.word, summary.arrows);
        println!("allowed:       {}", summary.allowed);
        println!("d:             {}", summary.d);
        if summary.allowed {
            println!(
                "IP_c:          {} ({} quarter turns)",
                summary.ip_c.as_deref().unwrap_or("-"),
                summary.ip_c_quarters.unwrap_or(0)
            );
            println!("index:         {}", summary.symbolic_index.unwrap());
            println!(
                "sectors:       {}",
                summary.sector_types.as_deref().unwrap_or("-")
            );
            if summary.petals.is_empty() {
                println!("petals:        none");
            } else {
                let list: Vec<String> = summary
                    .petals
                    .iter()
                    .map(|p| format!("({}) {} @ {}", p.pattern, p.kind, p.position))
                    .collect();
                println!("petals:        {}", list.join("; "));
            }
            println!("conservative:  {}", summary.conservative.unwrap());
            println!("module >=      {}", summary.module_lower_bound.unwrap());
        } else {
            println!("not allowed: letters must alternate horizontal/vertical");
        }
    }
    Ok(if summary.allowed { EXIT_PASS } else { EXIT_ASSERT })
}

fn report_exit(passed: bool, nonconvergent: bool) -> u8 {
    if passed {
        EXIT_PASS
    } else if nonconvergent {
        EXIT_NONCONVERGENT
    } else {
        EXIT_ASSERT
    }
}

fn emit(out: Option<&str>, json: String) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, json).map_err(|e| format!("cannot write {path}: {e}"))?;
            Ok(())
        }
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn cmd_verify(input: &str, cfg: &Config) -> Result<u8, String> {
    let word = parse_word(input)?;
    let report = verify_word(&word, cfg);
    let json = serde_json::to_string_pretty(&report).expect("serializable");
    emit(cfg.out.as_deref(), json)?;
    if cfg.out.is_some() {
        let failed: Vec<&str> = report
            .failed_required()
            .iter()
            .map(|c| c.name.as_str())
            .collect();
        eprintln!(
            "{}: {} (wrote {})",
            report.word_in,
            if report.passed {
                "pass".to_string()
            } else {
                format!("FAIL [{}]", failed.join(", "))
            },
            cfg.out.as_deref().unwrap_or("-")
        );
    }
    Ok(report_exit(report.passed, report.nonconvergent))
}

#[derive(Serialize)]
struct SweepReport {
    format_version: String,
    sweep_d: usize,
    include_index_one: bool,
    total: usize,
    passed: usize,
    failed: Vec<String>,
    outside_theory: usize,
    reports: Vec<IndexReport>,
}

fn cmd_sweep(d: usize, include_index_one: bool, cfg: &Config) -> Result<u8, String> {
    if d < 2 {
        return Err("sweep needs d >= 2 (d = 1 words are not realizable)".into());
    }
    let reports = verify_sweep(d, include_index_one, cfg);
    let summary = SweepReport {
        format_version: qturn_core::report::FORMAT_VERSION.to_string(),
        sweep_d: d,
        include_index_one,
        total: reports.len(),
        passed: reports.iter().filter(|r| r.passed).count(),
        failed: reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.word_in.clone())
            .collect(),
        outside_theory: reports
            .iter()
            .filter(|r| r.validity.outside_theory)
            .count(),
        reports,
    };
    let json = serde_json::to_string_pretty(&summary).expect("serializable");
    emit(cfg.out.as_deref(), json)?;
    eprintln!(
        "sweep d={d}: {}/{} passed ({} outside theory)",
        summary.passed, summary.total, summary.outside_theory
    );
    let nonconvergent = summary.reports.iter().any(|r| r.nonconvergent);
    Ok(report_exit(summary.failed.is_empty(), nonconvergent))
}

fn cmd_render(
    input: &str,
    out: &Path,
    grid: Option<usize>,
    cfg: &Config,
) -> Result<u8, String> {
    let word = parse_word(input)?;
    if !word.is_allowed() {
        return Err(format!("word {} is not allowed", word.ascii()));
    }
    let model = build_model(&word).map_err(|e| e.to_string())?;
    let svg = render::render_svg(&model, cfg, cfg.seed)?;
    std::fs::write(out, svg).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
    eprintln!("wrote {}", out.display());
    if let Some(n) = grid {
        if n == 0 {
            return Err("--grid must be at least 1".into());
        }
        let csv = render::render_grid_csv(&model, n, cfg);
        let csv_path = out.with_extension("csv");
        std::fs::write(&csv_path, csv)
            .map_err(|e| format!("cannot write {}: {e}", csv_path.display()))?;
        eprintln!("wrote {}", csv_path.display());
    }
    Ok(EXIT_PASS)
}
