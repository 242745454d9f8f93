//! Rendering of sweep results: per-(regime, rate) tables and charts,
//! raw per-seed CSV, trajectory CSVs, data-efficiency summary, and a
//! markdown overview.
//!
//! Layout under the output directory:
//!
//! ```text
//! <out>/
//!   raw_results.csv
//!   data_efficiency.csv
//!   summary.md
//!   <regime>/<rate>/table.csv
//!   <regime>/<rate>/curve.svg
//!   <regime>/<rate>/trajectory_<count>.csv   (unknown regime)
//! ```
//!
//! CSV files use `.` decimals, a header row, and LF line endings; float
//! fields round-trip exactly through Rust's shortest representation.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::metrics::data_efficiency;
use crate::sweep::svg::{write_line_chart, Series};
use crate::sweep::{CellMetrics, CellResult, MeanRow, Regime, SweepOutcome};

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Render every artifact for a sweep outcome. `effective_config` is an
/// opaque pretty-printed configuration echo stored alongside the results.
pub fn render_report(
    outcome: &SweepOutcome,
    output_dir: &Path,
    effective_config: Option<&str>,
) -> Result<()> {
    if outcome.cells.is_empty() {
        return Err(Error::argument("no sweep cells to report"));
    }
    std::fs::create_dir_all(output_dir)?;

    write_raw_results(&output_dir.join("raw_results.csv"), &outcome.cells)?;

    let mean_rows = outcome.mean_rows();
    let mut group_keys: Vec<(Regime, usize)> =
        mean_rows.iter().map(|r| (r.regime, r.rate)).collect();
    group_keys.dedup();

    for &(regime, rate) in &group_keys {
        let rows: Vec<&MeanRow> = mean_rows
            .iter()
            .filter(|r| r.regime == regime && r.rate == rate)
            .collect();
        let dir = output_dir.join(regime.to_string()).join(rate.to_string());
        write_table(&dir.join("table.csv"), regime, &rows)?;
        write_curve(&dir.join("curve.svg"), regime, rate, &rows)?;
    }

    for traj in &outcome.trajectories {
        let dir = output_dir
            .join(Regime::UnknownRl.to_string())
            .join(traj.rate.to_string());
        let path = dir.join(format!("trajectory_{}.csv", traj.train_count));
        let mut text = String::new();
        if !path.exists() {
            text.push_str("seed,iteration,R_ohm,L_henry\n");
        } else {
            text.push_str(&std::fs::read_to_string(&path)?);
        }
        for p in &traj.points {
            let _ = writeln!(
                text,
                "{},{},{},{}",
                traj.seed, p.iteration, p.resistance, p.inductance
            );
        }
        write_file(&path, &text)?;
    }

    write_data_efficiency(&output_dir.join("data_efficiency.csv"), &mean_rows)?;
    write_summary(
        &output_dir.join("summary.md"),
        &mean_rows,
        outcome,
        effective_config,
    )?;
    if let Some(cfg) = effective_config {
        write_file(&output_dir.join("effective_config.json"), cfg)?;
    }
    Ok(())
}

const RAW_HEADER: &str =
    "regime,rate,train_count,seed,status,mse_data,mse_phy,improvement_pct,lambda_star,R_ohm,L_henry";

fn write_raw_results(path: &Path, cells: &[CellResult]) -> Result<()> {
    let mut text = String::from(RAW_HEADER);
    text.push('\n');
    for cell in cells {
        let (status, m) = match &cell.outcome {
            Ok(m) => ("ok".to_string(), Some(m)),
            Err(e) => (format!("error: {}", e.replace([',', '\n'], ";")), None),
        };
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{},{}",
            cell.regime,
            cell.rate,
            cell.train_count,
            cell.seed,
            status,
            fmt_opt(m.map(|m| m.mse_data)),
            fmt_opt(m.map(|m| m.mse_phy)),
            fmt_opt(m.map(|m| m.improvement_pct)),
            fmt_opt(m.map(|m| m.lambda_star)),
            fmt_opt(m.and_then(|m| m.r_ohm)),
            fmt_opt(m.and_then(|m| m.l_henry)),
        );
    }
    write_file(path, &text)
}

/// Parse a `raw_results.csv` back into cell results.
pub fn load_raw_results(path: &Path) -> Result<Vec<CellResult>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RAW_HEADER => {}
        other => {
            return Err(Error::structure(format!(
                "unexpected raw results header: {other:?}"
            )))
        }
    }
    let mut cells = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(Error::structure(format!(
                "raw results line {} has {} fields",
                idx + 2,
                f.len()
            )));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| Error::structure(format!("bad number {s:?}: {e}")))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        let outcome = if f[4] == "ok" {
            Ok(CellMetrics {
                mse_data: num(f[5])?,
                mse_phy: num(f[6])?,
                improvement_pct: num(f[7])?,
                lambda_star: num(f[8])?,
                r_ohm: opt(f[9])?,
                l_henry: opt(f[10])?,
            })
        } else {
            Err(f[4].trim_start_matches("error: ").to_string())
        };
        cells.push(CellResult {
            regime: f[0].parse()?,
            rate: f[1]
                .parse()
                .map_err(|e| Error::structure(format!("bad rate: {e}")))?,
            train_count: f[2]
                .parse()
                .map_err(|e| Error::structure(format!("bad train_count: {e}")))?,
            seed: f[3]
                .parse()
                .map_err(|e| Error::structure(format!("bad seed: {e}")))?,
            outcome,
        });
    }
    Ok(cells)
}

fn write_table(path: &Path, regime: Regime, rows: &[&MeanRow]) -> Result<()> {
    let mut text = String::from("TrainEv,mse_data,mse_phy,improvement_pct,lambda_star");
    if regime == Regime::UnknownRl {
        text.push_str(",R_ohm,L_mH");
    }
    text.push('\n');
    for r in rows {
        let _ = write!(
            text,
            "{},{},{},{},{}",
            r.train_count, r.mse_data, r.mse_phy, r.improvement_pct, r.lambda_star
        );
        if regime == Regime::UnknownRl {
            let _ = write!(
                text,
                ",{},{}",
                fmt_opt(r.r_ohm),
                fmt_opt(r.l_henry.map(|l| l * 1e3))
            );
        }
        text.push('\n');
    }
    write_file(path, &text)
}

fn write_curve(path: &Path, regime: Regime, rate: usize, rows: &[&MeanRow]) -> Result<()> {
    let data: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.train_count as f64, r.mse_data))
        .collect();
    let phy: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.train_count as f64, r.mse_phy))
        .collect();
    write_line_chart(
        path,
        &format!("Test MSE vs training events ({regime}, {rate} samples/cycle)"),
        "training events",
        "test MSE (A^2)",
        &[
            Series {
                name: "data-only",
                points: data,
            },
            Series {
                name: "physics-informed",
                points: phy,
            },
        ],
    )
}

fn write_data_efficiency(path: &Path, mean_rows: &[MeanRow]) -> Result<()> {
    let mut text = String::from(
        "regime,rate,train_count,mse_phy,equivalent_count,ratio,lower_bound,median_ratio\n",
    );
    let mut group_keys: Vec<(Regime, usize)> =
        mean_rows.iter().map(|r| (r.regime, r.rate)).collect();
    group_keys.dedup();
    for (regime, rate) in group_keys {
        let rows: Vec<&MeanRow> = mean_rows
            .iter()
            .filter(|r| r.regime == regime && r.rate == rate)
            .collect();
        let counts: Vec<usize> = rows.iter().map(|r| r.train_count).collect();
        let curve_data: Vec<f64> = rows.iter().map(|r| r.mse_data).collect();
        let curve_phy: Vec<f64> = rows.iter().map(|r| r.mse_phy).collect();
        let eff = data_efficiency(&counts, &curve_data, &curve_phy)?;
        for p in &eff.points {
            let _ = writeln!(
                text,
                "{},{},{},{},{},{},{},{}",
                regime,
                rate,
                p.count,
                p.mse_phy,
                p.equivalent_count,
                p.ratio,
                p.lower_bound,
                eff.median_ratio
            );
        }
    }
    write_file(path, &text)
}

fn write_summary(
    path: &Path,
    mean_rows: &[MeanRow],
    outcome: &SweepOutcome,
    effective_config: Option<&str>,
) -> Result<()> {
    let mut md = String::from("# Sweep summary\n");
    let failed: Vec<&CellResult> = outcome.cells.iter().filter(|c| c.outcome.is_err()).collect();
    let _ = writeln!(
        md,
        "\n{} cells, {} failed. Rows below are means over seeds; \
         per-seed values are in `raw_results.csv`.\n",
        outcome.cells.len(),
        failed.len()
    );

    let mut group_keys: Vec<(Regime, usize)> =
        mean_rows.iter().map(|r| (r.regime, r.rate)).collect();
    group_keys.dedup();
    for (regime, rate) in &group_keys {
        let _ = writeln!(md, "## {regime}, {rate} samples/cycle\n");
        let unknown = *regime == Regime::UnknownRl;
        if unknown {
            md.push_str("| TrainEv | data-only MSE | physics MSE | improvement % | lambda* | R (ohm) | L (mH) |\n");
            md.push_str("|---|---|---|---|---|---|---|\n");
        } else {
            md.push_str("| TrainEv | data-only MSE | physics MSE | improvement % | lambda* |\n");
            md.push_str("|---|---|---|---|---|\n");
        }
        for r in mean_rows
            .iter()
            .filter(|r| r.regime == *regime && r.rate == *rate)
        {
            if unknown {
                let _ = writeln!(
                    md,
                    "| {} | {:.4} | {:.4} | {:+.2} | {} | {} | {} |",
                    r.train_count,
                    r.mse_data,
                    r.mse_phy,
                    r.improvement_pct,
                    r.lambda_star,
                    r.r_ohm.map(|v| format!("{v:.3}")).unwrap_or_default(),
                    r.l_henry.map(|v| format!("{:.3}", v * 1e3)).unwrap_or_default(),
                );
            } else {
                let _ = writeln!(
                    md,
                    "| {} | {:.4} | {:.4} | {:+.2} | {} |",
                    r.train_count, r.mse_data, r.mse_phy, r.improvement_pct, r.lambda_star
                );
            }
        }
        md.push('\n');
    }

    md.push_str("## Data efficiency\n\n");
    md.push_str(
        "For each training-set size, the equivalent count is the smallest \
         (linearly interpolated) number of events at which the data-only \
         curve reaches the physics-informed MSE, clamped to the swept \
         range; the ratio is equivalent/actual and the table reports the \
         median over sizes.\n\n",
    );
    md.push_str("| regime | rate | median ratio |\n|---|---|---|\n");
    for (regime, rate) in &group_keys {
        let rows: Vec<&MeanRow> = mean_rows
            .iter()
            .filter(|r| r.regime == *regime && r.rate == *rate)
            .collect();
        let counts: Vec<usize> = rows.iter().map(|r| r.train_count).collect();
        let curve_data: Vec<f64> = rows.iter().map(|r| r.mse_data).collect();
        let curve_phy: Vec<f64> = rows.iter().map(|r| r.mse_phy).collect();
        let eff = data_efficiency(&counts, &curve_data, &curve_phy)?;
        let _ = writeln!(md, "| {regime} | {rate} | {:.2} |", eff.median_ratio);
    }

    if !failed.is_empty() {
        md.push_str("\n## Failed cells\n\n");
        for c in failed {
            let _ = writeln!(
                md,
                "- {} rate {} count {} seed {}: {}",
                c.regime,
                c.rate,
                c.train_count,
                c.seed,
                c.outcome.as_ref().unwrap_err()
            );
        }
    }

    if effective_config.is_some() {
        md.push_str("\nThe exact configuration used is echoed in `effective_config.json`.\n");
    }
    write_file(path, &md)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{CellMetrics, SweepOutcome, TrajectoryRecord};
    use crate::training::TrajectoryPoint;

    fn sample_outcome() -> SweepOutcome {
        let mk = |regime, rate, count, seed, base: f64| CellResult {
            regime,
            rate,
            train_count: count,
            seed,
            outcome: Ok(CellMetrics {
                mse_data: base,
                mse_phy: base * 0.5,
                improvement_pct: 50.0,
                lambda_star: 0.1,
                r_ohm: (regime == Regime::UnknownRl).then_some(9.5),
                l_henry: (regime == Regime::UnknownRl).then_some(2.1e-4),
            }),
        };
        SweepOutcome {
            cells: vec![
                mk(Regime::KnownRl, 128, 3, 1, 20.0),
                mk(Regime::KnownRl, 128, 5, 1, 15.0),
                mk(Regime::UnknownRl, 128, 3, 1, 20.0),
                mk(Regime::UnknownRl, 128, 5, 1, 15.0),
            ],
            trajectories: vec![TrajectoryRecord {
                rate: 128,
                train_count: 3,
                seed: 1,
                points: vec![
                    TrajectoryPoint {
                        iteration: 0,
                        resistance: 5.0,
                        inductance: 1e-3,
                    },
                    TrajectoryPoint {
                        iteration: 100,
                        resistance: 7.0,
                        inductance: 5e-4,
                    },
                ],
            }],
        }
    }

    #[test]
    fn report_writes_expected_tree() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("results");
        render_report(&sample_outcome(), &out, Some("{}\n")).unwrap();
        for file in [
            "raw_results.csv",
            "data_efficiency.csv",
            "summary.md",
            "effective_config.json",
            "known_rl/128/table.csv",
            "known_rl/128/curve.svg",
            "unknown_rl/128/table.csv",
            "unknown_rl/128/curve.svg",
            "unknown_rl/128/trajectory_3.csv",
        ] {
            assert!(out.join(file).exists(), "missing {file}");
        }
        let known = std::fs::read_to_string(out.join("known_rl/128/table.csv")).unwrap();
        assert!(known.starts_with("TrainEv,mse_data,mse_phy,improvement_pct,lambda_star\n"));
        assert!(!known.contains("R_ohm"));
        let unknown = std::fs::read_to_string(out.join("unknown_rl/128/table.csv")).unwrap();
        assert!(unknown.contains("R_ohm,L_mH"));
        assert!(unknown.contains("0.21")); // millihenries
    }

    #[test]
    fn raw_results_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("results");
        let mut outcome = sample_outcome();
        outcome.cells[1].outcome = Err("training diverged".to_string());
        render_report(&outcome, &out, None).unwrap();
        let loaded = load_raw_results(&out.join("raw_results.csv")).unwrap();
        assert_eq!(loaded, outcome.cells);
    }

    #[test]
    fn empty_outcome_is_an_argument_error_without_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("results");
        let err = render_report(&SweepOutcome::default(), &out, None).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
        assert!(!out.exists());
    }
}
