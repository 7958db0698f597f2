//! Matplotlib scripts that render sweep and phase CSV files.

use std::fmt::Write;
use std::str::FromStr;

use super::SweepRow;
use crate::error::{Error, Result};
use crate::pathstruct::PhaseRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean size against r, one curve per (language, n).
    SizeVsR,
    /// Mean size against n on a log y-axis, one curve per (language, r).
    LogSizeVsN,
    /// As above with both axes logarithmic.
    LogLogSizeVsN,
    /// Easy-hard fraction and mean DFA size against r.
    PhaseFractionVsR,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] =
        [PlotKind::SizeVsR, PlotKind::LogSizeVsN, PlotKind::LogLogSizeVsN, PlotKind::PhaseFractionVsR];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::SizeVsR => "size-vs-r",
            PlotKind::LogSizeVsN => "log-size-vs-n",
            PlotKind::LogLogSizeVsN => "loglog-size-vs-n",
            PlotKind::PhaseFractionVsR => "phase-fraction-vs-r",
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Plot(format!("unknown plot kind `{s}`")))
    }
}

pub enum PlotData<'a> {
    Sweep(&'a [SweepRow]),
    Phase(&'a [PhaseRow]),
}

const PRELUDE: &str = r##"import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(line for line in f if not line.startswith("#")))


"##;

fn python_str(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A self-contained script that reads `csv_path` and writes `<kind>.png`.
/// The series to draw are taken from `data`.
pub fn emit_plots(data: PlotData<'_>, kind: PlotKind, csv_path: &str) -> Result<String> {
    let mut s = String::from("#!/usr/bin/env python3\n");
    s.push_str(PRELUDE);
    writeln!(s, "rows = load({})", python_str(csv_path)).unwrap();
    match (data, kind) {
        (PlotData::Sweep([]), _) | (PlotData::Phase([]), _) => return Err(Error::Plot("no rows to plot".into())),
        (PlotData::Sweep(rows), PlotKind::SizeVsR) => {
            let mut series: Vec<(String, usize)> = rows.iter().map(|r| (r.language.to_string(), r.n)).collect();
            series.sort();
            series.dedup();
            s.push_str("SERIES = [\n");
            for (lang, n) in &series {
                writeln!(s, "    ({}, {n}),", python_str(lang)).unwrap();
            }
            s.push_str(
                r#"]

fig, ax = plt.subplots()
for lang, n in SERIES:
    pts = sorted(
        (float(d["r"]), float(d["mean_nodes"]))
        for d in rows
        if d["language"] == lang and int(d["n"]) == n and d["mean_nodes"]
    )
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"{lang} n={n}")
ax.set_xlabel("r = m/n")
ax.set_ylabel("mean size")
ax.legend()
"#,
            );
        }
        (PlotData::Sweep(rows), PlotKind::LogSizeVsN | PlotKind::LogLogSizeVsN) => {
            let mut series: Vec<(String, f64)> = rows.iter().map(|r| (r.language.to_string(), r.r)).collect();
            series.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
            series.dedup();
            s.push_str("SERIES = [\n");
            for (lang, r) in &series {
                writeln!(s, "    ({}, {r:?}),", python_str(lang)).unwrap();
            }
            s.push_str(
                r#"]

fig, ax = plt.subplots()
for lang, r in SERIES:
    pts = sorted(
        (int(d["n"]), float(d["mean_nodes"]))
        for d in rows
        if d["language"] == lang and abs(float(d["r"]) - r) < 1e-9 and d["mean_nodes"]
    )
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"{lang} r={r}")
ax.set_xlabel("n")
ax.set_ylabel("mean size")
ax.set_yscale("log")
"#,
            );
            if kind == PlotKind::LogLogSizeVsN {
                s.push_str("ax.set_xscale(\"log\")\n");
            }
            s.push_str("ax.legend()\n");
        }
        (PlotData::Phase(_), PlotKind::PhaseFractionVsR) => {
            s.push_str(
                r#"
pts = sorted((float(d["r"]), float(d["fraction"]), float(d["mean_dfa_states"])) for d in rows)
fig, ax = plt.subplots()
ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", color="tab:blue")
ax.set_xlabel("r = m/n")
ax.set_ylabel("easy-hard fraction", color="tab:blue")
ax.set_ylim(-0.05, 1.05)
size = ax.twinx()
size.plot([p[0] for p in pts], [p[2] for p in pts], marker="s", color="tab:red")
size.set_ylabel("mean DFA states", color="tab:red")
"#,
            );
        }
        (PlotData::Sweep(_), PlotKind::PhaseFractionVsR) => {
            return Err(Error::Plot("phase-fraction-vs-r needs phase rows".into()));
        }
        (PlotData::Phase(_), k) => return Err(Error::Plot(format!("{} needs sweep rows", k.name()))),
    }
    writeln!(s, "fig.tight_layout()\nfig.savefig({}, dpi=150)", python_str(&format!("{}.png", kind.name()))).unwrap();
    Ok(s)
}
