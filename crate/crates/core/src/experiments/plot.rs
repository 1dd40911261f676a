use super::ExperimentError;
use std::path::Path;

const REQUIRED: [&str; 6] = ["point", "HOL_mm", "HOL_ms", "HOL_sm", "HOL_ss", "HOL_total"];

/// Sweep-variable columns understood by the plot script, with axis labels.
const X_COLUMNS: [(&str, &str); 5] = [
    ("user_height_m", "user height h_u (m)"),
    ("lambda_s_per_km2", "small-cell intensity (BS/km²)"),
    ("lambda_m_per_km2", "macro intensity (BS/km²)"),
    ("bias_sm_db", "small-to-macro bias (dB)"),
    ("bias_ms_db", "macro-to-small bias (dB)"),
];

/// Plotting script (matplotlib) for a sweep CSV with the given header.
///
/// Draws one curve per handover type against the sweep variable, one line
/// style per bias family, with simulated points and CIs when present.
pub fn plot_script_source(header: &[String], csv_name: &str) -> Result<String, ExperimentError> {
    let has = |c: &str| header.iter().any(|h| h == c);
    // Simulator-only sweeps carry `<name>_mc` columns instead.
    let mut missing: Vec<String> = REQUIRED
        .iter()
        .filter(|c| !has(c) && !has(&format!("{c}_mc")))
        .map(|c| c.to_string())
        .collect();
    let x = X_COLUMNS.iter().find(|(c, _)| header.get(1).is_some_and(|h| h == c));
    if x.is_none() {
        missing.push("sweep variable (user_height_m, lambda_s_per_km2, lambda_m_per_km2, bias_sm_db or bias_ms_db)".into());
    }
    if !missing.is_empty() {
        return Err(ExperimentError::MissingColumns(missing));
    }
    let (x_col, x_label) = x.expect("checked above");
    let family = if has("bias_sm_db") && *x_col != "bias_sm_db" { "bias_sm_db" } else { "" };
    let out_name = Path::new(csv_name).with_extension("png");
    let out_name = out_name.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep.png".into());
    Ok(format!(
        r#"#!/usr/bin/env python3
"""Handover rates per unit length from {csv_name}."""
import csv
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, "{csv_name}")
OUT = sys.argv[2] if len(sys.argv) > 2 else os.path.join(HERE, "{out_name}")
X = "{x_col}"
FAMILY = "{family}"
SERIES = ["HOL_mm", "HOL_ms", "HOL_sm", "HOL_ss", "HOL_total"]
COLORS = {{"HOL_mm": "C0", "HOL_ms": "C1", "HOL_sm": "C2", "HOL_ss": "C3", "HOL_total": "k"}}
STYLES = ["-", "--", ":", "-."]


def num(v):
    return float(v) if v not in ("", "NaN", "nan") else float("nan")


with open(CSV, newline="") as fh:
    rows = [r for r in csv.DictReader(fh) if not r.get("error")]
if not rows:
    sys.exit("no rows to plot")

families = {{}}
for r in rows:
    families.setdefault(r[FAMILY] if FAMILY else "", []).append(r)

fig, ax = plt.subplots(figsize=(7, 4.5))
for i, (fam, group) in enumerate(sorted(families.items(), key=lambda kv: num(kv[0]) if kv[0] else 0.0)):
    group.sort(key=lambda r: num(r[X]))
    xs = [num(r[X]) for r in group]
    style = STYLES[i % len(STYLES)]
    suffix = " ({{}} dB)".format(fam) if FAMILY and len(families) > 1 else ""
    for s in SERIES:
        if s in group[0]:
            ax.plot(xs, [num(r[s]) for r in group], style, color=COLORS[s], label=s + suffix)
        if s + "_mc" in group[0]:
            ax.errorbar(xs, [num(r[s + "_mc"]) for r in group], yerr=[num(r[s + "_ci"]) for r in group],
                        fmt="o", ms=3, color=COLORS[s], capsize=2)
    if "HOL_total_flat" in group[0]:
        ax.plot(xs, [num(r["HOL_total_flat"]) for r in group], style, color="0.6",
                label="HOL_total, equal heights" + suffix)

ax.set_xlabel("{x_label}")
ax.set_ylabel("handovers per km")
ax.grid(True, alpha=0.3)
ax.legend(fontsize=7, ncol=2)
fig.tight_layout()
fig.savefig(OUT, dpi=150)
print("wrote", OUT)
"#
    ))
}

/// Reads the header of `csv_path` and writes a plotting script to `script_path`.
pub fn emit_plot_script(csv_path: &Path, script_path: &Path) -> Result<(), ExperimentError> {
    let mut reader = csv::Reader::from_path(csv_path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.iter().all(|h| h.is_empty()) || reader.records().next().is_none() {
        return Err(ExperimentError::EmptyCsv);
    }
    let name = csv_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let script = plot_script_source(&header, &name)?;
    std::fs::write(script_path, script)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(cols: &str) -> Vec<String> {
        cols.split(',').map(str::to_string).collect()
    }

    #[test]
    fn height_sweep_script() {
        let h = header("point,user_height_m,bias_sm_db,A_m,A_s,HOL_mm,HOL_ms,HOL_sm,HOL_ss,HOL_total,HOL_total_flat,error");
        let s = plot_script_source(&h, "fig3.csv").unwrap();
        assert!(s.contains("X = \"user_height_m\""));
        assert!(s.contains("fig3.png"));
    }

    #[test]
    fn intensity_sweep_groups_by_bias() {
        let h = header("point,lambda_s_per_km2,bias_sm_db,HOL_mm,HOL_ms,HOL_sm,HOL_ss,HOL_total");
        let s = plot_script_source(&h, "fig4.csv").unwrap();
        assert!(s.contains("FAMILY = \"bias_sm_db\""));
    }

    #[test]
    fn simulated_columns_suffice() {
        let h = header("point,user_height_m,HOL_mm_mc,HOL_ms_mc,HOL_sm_mc,HOL_ss_mc,HOL_total_mc");
        assert!(plot_script_source(&h, "mc.csv").is_ok());
    }

    #[test]
    fn missing_columns_are_named() {
        let h = header("point,user_height_m,HOL_mm,HOL_total");
        match plot_script_source(&h, "x.csv") {
            Err(ExperimentError::MissingColumns(m)) => assert_eq!(m, vec!["HOL_ms", "HOL_sm", "HOL_ss"]),
            other => panic!("{other:?}"),
        }
    }
}
