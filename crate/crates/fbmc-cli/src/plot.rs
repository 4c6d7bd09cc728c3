//! Generates standalone matplotlib scripts for preset CSV files. The scripts are never run here.

use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::presets::{columns, PRESETS};

struct PlotSpec {
    x: &'static str,
    y: &'static str,
    series: &'static [&'static str],
    /// Dashed benchmark column and the columns that split it into lines.
    reference: Option<(&'static str, &'static [&'static str])>,
    log2_x: bool,
}

fn spec_for(preset: &str) -> PlotSpec {
    match preset {
        "fig3" => PlotSpec {
            x: "Lg_prime",
            y: "sir_db",
            series: &["D1", "channel"],
            reference: Some(("highrate_sir_db", &["channel"])),
            log2_x: false,
        },
        "fig4" => PlotSpec {
            x: "N_r",
            y: "sinr_db",
            series: &["channel", "criterion", "gamma_db"],
            reference: Some(("theory_sinr_db", &["channel", "gamma_db"])),
            log2_x: true,
        },
        "fig6" => PlotSpec {
            x: "N_r",
            y: "sinr_db",
            series: &["criterion", "scheme"],
            reference: None,
            log2_x: true,
        },
        "fig7" | "fig8" => PlotSpec {
            x: "gamma_db",
            y: "sinr_db",
            series: &["N_r", "criterion", "scheme"],
            reference: Some(("sir_upper_bound_db", &["N_r"])),
            log2_x: false,
        },
        "mse" => PlotSpec {
            x: "gamma_db",
            y: "mse_db",
            series: &["N_r", "criterion", "scheme", "csi"],
            reference: None,
            log2_x: false,
        },
        _ => unreachable!("only preset names reach here"),
    }
}

fn py_list(items: &[&str]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| format!("{s:?}")).collect();
    format!("[{}]", quoted.join(", "))
}

/// Preset whose column set equals `header`.
fn detect(header: &[String]) -> Option<&'static str> {
    PRESETS
        .iter()
        .copied()
        .find(|p| columns(p).is_some_and(|c| c.len() == header.len() && c.iter().zip(header).all(|(a, b)| a == b)))
}

fn header_error(path: &Path, found: &[String]) -> CliError {
    let expected: Vec<String> = PRESETS
        .iter()
        .filter(|&&p| p != "fig8")
        .map(|p| {
            format!(
                "{}: {}",
                if *p == "fig7" { "fig7/fig8" } else { p },
                columns(p).unwrap().join(",")
            )
        })
        .collect();
    CliError::config(
        "csv header",
        format!(
            "{} has header [{}]; expected the columns of one preset: {}",
            path.display(),
            found.join(","),
            expected.join("; ")
        ),
    )
}

/// Python script that plots `csv_path`, choosing axes and series from its header.
pub fn emit_plot_script(csv_path: &Path) -> CliResult<String> {
    let mut reader = csv::Reader::from_path(csv_path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::io(csv_path, e),
        other => CliError::config("csv header", format!("{}: {other:?}", csv_path.display())),
    })?;
    let header: Vec<String> = match reader.headers() {
        Ok(h) => h.iter().map(str::to_string).collect(),
        Err(_) => Vec::new(),
    };
    let preset = detect(&header).ok_or_else(|| header_error(csv_path, &header))?;
    let spec = spec_for(preset);
    let file_name = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| format!("{preset}.csv"));
    let reference = match spec.reference {
        Some((col, by)) => format!("({col:?}, {})", py_list(by)),
        None => "None".into(),
    };
    Ok(format!(
        r#"#!/usr/bin/env python3
"""{y} versus {x} from {file_name}. Usage: python3 {stem}.py [CSV]; writes a PNG next to the CSV."""
import csv
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name({file_name:?})
X = {x:?}
Y = {y:?}
SERIES = {series}
REFERENCE = {reference}
LOGX = {logx}


def grouped(rows, keys):
    groups = {{}}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    for key in groups:
        groups[key].sort(key=lambda r: float(r[X]))
    return groups


def label(keys, values):
    return ", ".join(f"{{k}}={{v}}" for k, v in zip(keys, values))


with open(CSV, newline="") as f:
    rows = list(csv.DictReader(f))

fig, ax = plt.subplots(figsize=(7, 5))
for key, rs in grouped(rows, SERIES).items():
    ax.plot([float(r[X]) for r in rs], [float(r[Y]) for r in rs], marker="o", label=label(SERIES, key))
if REFERENCE is not None:
    col, keys = REFERENCE
    for key, rs in grouped(rows, keys).items():
        xs, ys = [], []
        for r in rs:
            v = float(r[col])
            if math.isfinite(v) and (not xs or xs[-1] != float(r[X])):
                xs.append(float(r[X]))
                ys.append(v)
        ax.plot(xs, ys, linestyle="--", color="black", linewidth=1, label=label(keys, key) + f" {{col}}")
if LOGX:
    ax.set_xscale("log", base=2)
ax.set_xlabel(X)
ax.set_ylabel(Y)
ax.set_title(CSV.stem)
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize="x-small")
fig.tight_layout()
out = CSV.with_suffix(".png")
fig.savefig(out, dpi=150)
print(out)
"#,
        x = spec.x,
        y = spec.y,
        stem = csv_path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| preset.into()),
        series = py_list(spec.series),
        logx = if spec.log2_x { "True" } else { "False" },
    ))
}
