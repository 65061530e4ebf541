use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use bell_core::chsh::{
    chsh_quantum, correlator_table, optimize_settings_with, werner_threshold_with, ChshResult,
    CorrelatorTable, MeasurementSettings, OptimizerConfig, CLASSICAL_BOUND, TSIRELSON_BOUND,
};
use bell_core::lhv::{
    classical_bound_exhaustive, lhv_correlators_exact, sample_lhv_experiment,
    sample_quantum_for_state, EstimatedTable, TrialRecord,
};
use bell_core::states::werner;
use bell_core::trial_log::write_trial_log;
use bell_core::chsh_value;
use serde_json::{json, Value};

use crate::config::{Job, RunConfig};
use crate::report::{columns, Cell, Report, Table};
use crate::CliError;

const ENTRIES: [&str; 4] = ["e11", "e12", "e21", "e22"];

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    match &config.job {
        Job::Chsh { state, settings } => {
            let result = chsh_quantum(&state.rho, &settings.settings)?;
            Ok(chsh_report(
                config.command,
                json!({ "state": state.label, "settings": settings.label,
                        "directions": settings_json(&settings.settings) }),
                &result,
                json!({ "classical_bound": CLASSICAL_BOUND, "tsirelson_bound": TSIRELSON_BOUND }),
            ))
        }
        Job::Optimize { state, optimizer } => {
            let opt = optimize_settings_with(&state.rho, optimizer)?;
            let mut report = chsh_report(
                config.command,
                json!({ "state": state.label, "grid_theta": optimizer.grid_theta,
                        "grid_phi": optimizer.grid_phi, "seed": optimizer.seed }),
                &opt.result,
                serde_json::to_value(&opt.diagnostics).expect("serializable"),
            );
            report.results["settings"] = settings_json(&opt.result.settings);
            let polar = opt.result.settings.to_polar();
            for (name, a) in ["a1", "a2", "b1", "b2"].iter().zip(polar) {
                report.table.header.push(format!("{name}_theta"));
                report.table.header.push(format!("{name}_phi"));
                report.table.rows[0].push(a.theta().into());
                report.table.rows[0].push(a.phi().into());
                report.text.push((format!("{name} (theta, phi)"), format!("{:.9} {:.9}", a.theta(), a.phi()).into()));
            }
            report.text.push(("grid best |S|".into(), opt.diagnostics.grid_best.into()));
            report.text.push(("simplex evaluations".into(), (opt.diagnostics.evaluations as u64).into()));
            Ok(report)
        }
        Job::WernerSweep {
            visibilities,
            optimizer,
        } => werner_sweep(config.command, visibilities, optimizer),
        Job::LhvExhaustive => {
            let bound = classical_bound_exhaustive();
            let mut table = Table {
                header: columns(&["pattern", "response", "s"]),
                rows: Vec::new(),
            };
            for p in &bound.patterns {
                table
                    .rows
                    .push(vec![(p.pattern as u64).into(), p.response.clone().into(), p.s_value.into()]);
            }
            Ok(Report {
                command: config.command,
                inputs: json!({ "exhaustive": true }),
                results: json!({ "classical_max": bound.max_abs_s }),
                diagnostics: json!({ "patterns": bound.patterns }),
                table,
                text: vec![
                    ("deterministic patterns".into(), (bound.patterns.len() as u64).into()),
                    ("classical max |S|".into(), bound.max_abs_s.into()),
                ],
            })
        }
        Job::Lhv { model, trials, log } => {
            let exact = lhv_correlators_exact(&model.model);
            let mut inputs = json!({ "model": model.label,
                "weights": model.model.states().iter().map(|s| json!({
                    "label": s.label, "weight": s.weight })).collect::<Vec<_>>() });
            let mut results = json!({ "exact": table_json(&exact) });
            let mut table = estimate_table_header();
            let mut text = table_text("exact", &exact);
            push_exact_rows(&mut table, &exact);
            let mut diagnostics = json!({ "classical_bound": CLASSICAL_BOUND });
            if let Some(n) = trials {
                let seed = config.sampling_seed();
                let exp = sample_lhv_experiment(&model.model, *n, seed)?;
                inputs["trials"] = json!(n);
                inputs["seed"] = json!(seed);
                add_estimate(&mut results, &mut table, &mut text, &exp.estimate);
                diagnostics["trial_log"] = json!(log.as_ref().map(|p| p.display().to_string()));
                if let Some(path) = log {
                    write_log(path, &exp.trials)?;
                }
            }
            Ok(Report {
                command: config.command,
                inputs,
                results,
                diagnostics,
                table,
                text,
            })
        }
        Job::Sample {
            state,
            settings,
            trials,
            log,
        } => {
            let seed = config.sampling_seed();
            let exact = correlator_table(&state.rho, &settings.settings)?;
            let exp = sample_quantum_for_state(&state.rho, &settings.settings, *trials, seed)?;
            let mut results = json!({ "exact": table_json(&exact) });
            let mut table = estimate_table_header();
            push_exact_rows(&mut table, &exact);
            let mut text = table_text("exact", &exact);
            add_estimate(&mut results, &mut table, &mut text, &exp.estimate);
            if let Some(path) = log {
                write_log(path, &exp.trials)?;
            }
            Ok(Report {
                command: config.command,
                inputs: json!({ "state": state.label, "settings": settings.label,
                    "directions": settings_json(&settings.settings), "trials": trials, "seed": seed }),
                results,
                diagnostics: json!({
                    "trial_log": log.as_ref().map(|p| p.display().to_string()),
                    "deviation_from_exact_in_std_errors":
                        (exp.estimate.s_value - chsh_value(&exact)) / exp.estimate.s_std_error,
                }),
                table,
                text,
            })
        }
    }
}

fn write_log(path: &Path, trials: &[TrialRecord]) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_trial_log(BufWriter::new(file), trials).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn settings_json(s: &MeasurementSettings) -> Value {
    let polar = s.to_polar();
    let dirs = [s.a1, s.a2, s.b1, s.b2];
    let mut out = serde_json::Map::new();
    for ((name, a), d) in ["a1", "a2", "b1", "b2"].iter().zip(polar).zip(dirs) {
        out.insert(
            name.to_string(),
            json!({ "theta": a.theta(), "phi": a.phi(), "vector": d.to_array() }),
        );
    }
    Value::Object(out)
}

fn table_json(t: &CorrelatorTable) -> Value {
    let s = chsh_value(t);
    json!({ "e11": t.e11, "e12": t.e12, "e21": t.e21, "e22": t.e22, "s": s, "abs_s": s.abs() })
}

fn table_text(prefix: &str, t: &CorrelatorTable) -> Vec<(String, Cell)> {
    let mut v: Vec<(String, Cell)> = ENTRIES
        .iter()
        .zip(t.to_array())
        .map(|(k, e)| (format!("{prefix} {k}"), e.into()))
        .collect();
    v.push((format!("{prefix} S"), chsh_value(t).into()));
    v
}

fn chsh_report(command: &'static str, inputs: Value, r: &ChshResult, diagnostics: Value) -> Report {
    let t = &r.table;
    let mut results = table_json(t);
    results["violates_classical"] = json!(r.violates_classical);
    results["within_tsirelson"] = json!(r.within_tsirelson);
    let mut text: Vec<(String, Cell)> = ENTRIES
        .iter()
        .zip(t.to_array())
        .map(|(k, e)| (k.to_string(), e.into()))
        .collect();
    text.extend([
        ("S".to_string(), r.s_value.into()),
        ("|S|".to_string(), r.s_value.abs().into()),
        ("violates classical bound".to_string(), r.violates_classical.into()),
        ("within Tsirelson bound".to_string(), r.within_tsirelson.into()),
    ]);
    Report {
        command,
        inputs,
        results,
        diagnostics,
        table: Table {
            header: columns(&["e11", "e12", "e21", "e22", "s", "abs_s", "violates_classical", "within_tsirelson"]),
            rows: vec![vec![
                t.e11.into(),
                t.e12.into(),
                t.e21.into(),
                t.e22.into(),
                r.s_value.into(),
                r.s_value.abs().into(),
                r.violates_classical.into(),
                r.within_tsirelson.into(),
            ]],
        },
        text,
    }
}

fn estimate_table_header() -> Table {
    Table {
        header: columns(&["source", "entry", "value", "std_error", "count"]),
        rows: Vec::new(),
    }
}

fn push_exact_rows(table: &mut Table, t: &CorrelatorTable) {
    for (k, e) in ENTRIES.iter().zip(t.to_array()) {
        table
            .rows
            .push(vec!["exact".into(), (*k).into(), e.into(), 0.0.into(), Cell::Str(String::new())]);
    }
    table
        .rows
        .push(vec!["exact".into(), "s".into(), chsh_value(t).into(), 0.0.into(), Cell::Str(String::new())]);
}

fn add_estimate(results: &mut Value, table: &mut Table, text: &mut Vec<(String, Cell)>, est: &EstimatedTable) {
    let t = est.table;
    results["sampled"] = json!({
        "e11": t.e11, "e12": t.e12, "e21": t.e21, "e22": t.e22,
        "counts": est.counts, "std_errors": est.std_errors,
        "s": est.s_value, "abs_s": est.s_value.abs(), "s_std_error": est.s_std_error,
    });
    for (i, k) in ENTRIES.iter().enumerate() {
        table.rows.push(vec![
            "sampled".into(),
            (*k).into(),
            t.to_array()[i].into(),
            est.std_errors[i].into(),
            est.counts[i].into(),
        ]);
        text.push((format!("sampled {k}"), format!(
            "{} ± {} (n = {})",
            crate::report::format_sig(t.to_array()[i], 9),
            crate::report::format_sig(est.std_errors[i], 9),
            est.counts[i]
        )
        .into()));
    }
    let total: u64 = est.counts.iter().sum();
    table
        .rows
        .push(vec!["sampled".into(), "s".into(), est.s_value.into(), est.s_std_error.into(), total.into()]);
    text.push(("sampled S".into(), est.s_value.into()));
    text.push(("sampled S std error".into(), est.s_std_error.into()));
}

fn werner_sweep(command: &'static str, visibilities: &[f64], optimizer: &OptimizerConfig) -> Result<Report, CliError> {
    let mut rows = Vec::with_capacity(visibilities.len());
    let mut json_rows = Vec::with_capacity(visibilities.len());
    let mut text = Vec::new();
    for &p in visibilities {
        let rho = werner(p).map_err(|e| CliError::Usage(e.to_string()))?;
        let r = optimize_settings_with(&rho, optimizer)?.result;
        let max_s = r.s_value.abs();
        rows.push(vec![Cell::from("sweep"), p.into(), max_s.into(), r.violates_classical.into()]);
        json_rows.push(json!({ "p": p, "max_s": max_s, "violates": r.violates_classical }));
        text.push((
            format!("p = {}", crate::report::format_sig(p, 9)),
            format!(
                "max |S| = {}{}",
                crate::report::format_sig(max_s, 9),
                if r.violates_classical { "  (violates)" } else { "" }
            )
            .into(),
        ));
    }
    let threshold = werner_threshold_with(optimizer)?;
    let at_threshold = optimize_settings_with(&werner(threshold.critical_p)?, optimizer)?.result;
    rows.push(vec![
        Cell::from("threshold"),
        threshold.critical_p.into(),
        at_threshold.s_value.abs().into(),
        at_threshold.violates_classical.into(),
    ]);
    text.push(("threshold p*".into(), threshold.critical_p.into()));
    Ok(Report {
        command,
        inputs: json!({ "visibilities": visibilities, "grid_theta": optimizer.grid_theta,
                        "grid_phi": optimizer.grid_phi, "seed": optimizer.seed }),
        results: json!({ "rows": json_rows, "threshold": threshold.critical_p }),
        diagnostics: json!({ "bisection": threshold }),
        table: Table {
            header: columns(&["kind", "p", "max_s", "violates"]),
            rows,
        },
        text,
    })
}
