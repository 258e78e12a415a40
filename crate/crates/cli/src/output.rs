//! Result persistence: the run directory layout, the event-estimate CSV
//! contract, summary.json, and the digest manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;
use secperc_core::estimators::CurvePoint;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact column contract for event-estimate rows.
pub const EVENT_CSV_HEADER: &str =
    "event,model,lambda,lambda_e,alpha,param,trials,successes,p_hat,ci_lo,ci_hi,seed";

#[derive(Debug, Clone, Serialize)]
pub struct CsvRow {
    pub event: String,
    pub model: String,
    pub lambda: f64,
    pub lambda_e: f64,
    pub alpha: f64,
    pub param: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
}

impl CsvRow {
    fn render(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.event,
            self.model,
            self.lambda,
            self.lambda_e,
            self.alpha,
            self.param,
            self.trials,
            self.successes,
            self.p_hat,
            self.ci_lo,
            self.ci_hi,
            self.seed
        )
    }
}

pub fn render_event_csv(rows: &[CsvRow], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{EVENT_CSV_HEADER}");
    for row in rows {
        let _ = writeln!(out, "{}", row.render());
    }
    out
}

pub fn render_curve_csv(points: &[CurvePoint], comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "# window_halfwidth,ratio,trials,successes,p_hat,ci_lo,ci_hi");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.window_halfwidth, p.ratio, p.trials, p.successes, p.p_hat, p.ci_low, p.ci_high
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    tool_version: &'a str,
    config: &'a ExperimentConfig,
    results: &'a serde_json::Value,
}

#[derive(Debug, Serialize)]
struct OutputDigest {
    file: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool_version: &'a str,
    timestamp: String,
    config_echo: &'a ExperimentConfig,
    outputs: Vec<OutputDigest>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// A run's files before persistence: event rows, an optional curve CSV,
/// the summary payload, and any extra artifacts written verbatim.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub rows: Vec<CsvRow>,
    pub curve: Option<Vec<CurvePoint>>,
    pub results: serde_json::Value,
    pub comments: Vec<String>,
    /// (path, contents) pairs written outside the run directory.
    pub extra_files: Vec<(PathBuf, String)>,
}

/// Write the run directory `<output_dir>/<subcommand>-<seed>/` with
/// summary.json, data.csv when rows or a curve exist, any extra files at
/// their explicit paths, and a manifest digesting everything.
pub fn persist(
    config: &ExperimentConfig,
    subcommand: &str,
    output: &RunOutput,
) -> Result<PathBuf, CliError> {
    let dir = config.output_dir.join(format!("{subcommand}-{}", config.seed));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut digests: Vec<OutputDigest> = Vec::new();

    for (path, contents) in &output.extra_files {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| {
                    CliError::Io(format!("cannot create {}: {e}", parent.display()))
                })?;
            }
        }
        write_file(path, contents)?;
        digests.push(OutputDigest {
            file: path.display().to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
    }

    let csv = if !output.rows.is_empty() {
        Some(render_event_csv(&output.rows, &output.comments))
    } else {
        output
            .curve
            .as_ref()
            .map(|points| render_curve_csv(points, &output.comments))
    };
    if let Some(csv) = csv {
        let path = dir.join("data.csv");
        write_file(&path, &csv)?;
        digests.push(OutputDigest {
            file: "data.csv".to_string(),
            sha256: sha256_hex(csv.as_bytes()),
        });
    }

    let summary = serde_json::to_string_pretty(&Summary {
        tool_version: TOOL_VERSION,
        config,
        results: &output.results,
    })
    .expect("summary serialization cannot fail");
    let path = dir.join("summary.json");
    write_file(&path, &summary)?;
    digests.push(OutputDigest {
        file: "summary.json".to_string(),
        sha256: sha256_hex(summary.as_bytes()),
    });

    let manifest = serde_json::to_string_pretty(&Manifest {
        tool_version: TOOL_VERSION,
        timestamp: chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        config_echo: config,
        outputs: digests,
    })
    .expect("manifest serialization cannot fail");
    write_file(&dir.join("manifest.json"), &manifest)?;
    Ok(dir)
}
