//! Deterministic report rendering: CSV tables and the JSON run manifest.
//!
//! All numbers are written in shortest round-trip form and infinities as the
//! literal token `inf`, so identical seeds and configs produce identical
//! bytes.

use crate::dynamics::FoundEquilibrium;
use crate::efficiency::StudyReport;
use crate::ladder::PoaBound;

fn fmt(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:?}")
    }
}

fn fmt_round(v: f64, digits: i32) -> String {
    let scale = 10f64.powi(digits);
    fmt((v * scale).round() / scale)
}

/// Equilibria table: one row per equilibrium with payoffs, welfare and gap.
pub fn equilibria_csv(equilibria: &[FoundEquilibrium]) -> String {
    let mut out = String::from("index,welfare,max_gap,payoffs,x\n");
    for (i, eq) in equilibria.iter().enumerate() {
        let payoffs = eq
            .payoffs
            .iter()
            .map(|&p| fmt_round(p, 4))
            .collect::<Vec<_>>()
            .join(";");
        let x = eq
            .profile
            .x
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| fmt_round(v, 4))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(&format!(
            "{i},{},{},{payoffs},{x}\n",
            fmt(eq.welfare),
            fmt(eq.max_gap)
        ));
    }
    out
}

/// Study table in the shape of the random-graph experiments: one row per
/// configuration.
pub fn study_csv(rows: &[(String, StudyReport)]) -> String {
    let mut out = String::from("config,instances,ael,poa\n");
    for (label, study) in rows {
        out.push_str(&format!(
            "{label},{},{},{}\n",
            study.per_instance.len(),
            fmt(study.ael),
            fmt(study.poa)
        ));
    }
    out
}

/// Ladder sweep table: efficiency-loss data per agent count for external
/// plotting.
pub fn ladder_sweep_csv(rows: &[(usize, PoaBound, f64)]) -> String {
    let mut out = String::from("agents,worst_bound,vacuous,empirical_ael\n");
    for (f, bound, ael) in rows {
        out.push_str(&format!(
            "{f},{},{},{}\n",
            fmt(bound.ratio),
            u8::from(bound.vacuous),
            fmt(*ael)
        ));
    }
    out
}

/// JSON manifest of a run: command, seed and configuration knobs, plus the
/// crate version. No timestamps, to keep reruns byte-identical.
pub fn run_manifest(command: &str, seed: Option<u64>, config: &[(&str, String)]) -> String {
    let mut body = String::from("{\n");
    body.push_str(&format!("  \"command\": {:?},\n", command));
    match seed {
        Some(s) => body.push_str(&format!("  \"seed\": {s},\n")),
        None => body.push_str("  \"seed\": null,\n"),
    }
    body.push_str("  \"config\": {\n");
    for (i, (k, v)) in config.iter().enumerate() {
        let comma = if i + 1 == config.len() { "" } else { "," };
        body.push_str(&format!("    {:?}: {:?}{comma}\n", k, v));
    }
    body.push_str("  },\n");
    body.push_str(&format!(
        "  \"version\": {:?}\n",
        env!("CARGO_PKG_VERSION")
    ));
    body.push_str("}\n");
    body
}
