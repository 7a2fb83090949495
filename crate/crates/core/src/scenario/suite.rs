use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Suite, SUITE_SCHEMA};
use super::{exit_code, run_scenario, RunOptions, ScenarioError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteRow {
    pub path: String,
    pub code: i32,
    /// Verdict, first failing check or error message.
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub rows: Vec<SuiteRow>,
    /// Largest row code; 0 for an empty suite.
    pub code: i32,
}

impl SuiteOutcome {
    /// Fixed-width summary table.
    pub fn table(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.path.len())
            .max()
            .unwrap_or(8)
            .max(8);
        let mut s = format!("{:<width$}  code  summary\n", "scenario");
        for r in &self.rows {
            s.push_str(&format!(
                "{:<width$}  {:>4}  {}\n",
                r.path, r.code, r.summary
            ));
        }
        s
    }
}

pub fn load_suite(path: &Path) -> Result<(Suite, PathBuf), ScenarioError> {
    let origin = path.display().to_string();
    let cfg = |message: String| ScenarioError::Config {
        origin: origin.clone(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| cfg(format!("cannot read: {e}")))?;
    let suite: Suite = serde_json::from_str(&text).map_err(|e| cfg(e.to_string()))?;
    if suite.schema != SUITE_SCHEMA {
        return Err(cfg(format!(
            "field `schema`: expected \"{SUITE_SCHEMA}\", got \"{}\"",
            suite.schema
        )));
    }
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((suite, base))
}

/// Runs every scenario of a suite concurrently, each writing into its own
/// subdirectory of `opts.out_dir` named after the scenario file.
pub fn run_suite(path: &Path, opts: &RunOptions) -> Result<SuiteOutcome, ScenarioError> {
    let (suite, base) = load_suite(path)?;
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = suite
            .scenarios
            .iter()
            .map(|rel| {
                let file = base.join(rel);
                let stem = Path::new(rel)
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| rel.clone());
                let opts = RunOptions {
                    out_dir: opts.out_dir.join(stem),
                    ..opts.clone()
                };
                scope.spawn(move || {
                    let outcome = run_scenario(&file, &opts);
                    let summary = match &outcome {
                        Ok(r) => match r.first_failure() {
                            None => "pass".to_string(),
                            Some(c) => format!(
                                "fail: {} = {:e} (limit {} {:e})",
                                c.name, c.value, c.relation, c.limit
                            ),
                        },
                        Err(e) => e.to_string(),
                    };
                    SuiteRow {
                        path: rel.clone(),
                        code: exit_code(&outcome),
                        summary,
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect::<Vec<_>>()
    });
    let code = rows.iter().map(|r| r.code).max().unwrap_or(0);
    Ok(SuiteOutcome { rows, code })
}
