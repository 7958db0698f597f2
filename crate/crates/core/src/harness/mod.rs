//! Ratio sweeps: generate instances on a grid of clause/variable ratios,
//! compile each in the requested languages and aggregate the sizes.

mod analysis;
mod plot;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{Budget, DEFAULT_NODE_CAP};
use crate::cnf::{clause_count, derive_seed, generate_instance, ratio_grid, CnfFormula, GenParams};
use crate::dfa::LevelDfa;
use crate::dnnf::{compile_with, DnnfNode, DnnfOptions};
use crate::error::{Error, Result};
use crate::obdd::{NodeRef, ObddManager, VarOrder};
use crate::table;

pub use analysis::{
    detect_peak, fit_growth, growth_from_rows, peak_from_rows, GrowthFit, Peak, ThresholdTable,
};
pub use plot::{emit_plots, PlotData, PlotKind};

pub const SWEEP_SCHEMA: &str = "kclab-sweep/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Obdd,
    Dfa,
    Dnnf,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::Obdd, Language::Dfa, Language::Dnnf];

    pub fn name(self) -> &'static str {
        match self {
            Language::Obdd => "obdd",
            Language::Dfa => "dfa",
            Language::Dnnf => "dnnf",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Language::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown language `{s}` (obdd, dfa, dnnf)")))
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub k: usize,
    pub ns: Vec<usize>,
    pub r_grid: Vec<f64>,
    pub instances_per_point: usize,
    pub languages: Vec<Language>,
    pub seed: u64,
    pub node_cap: usize,
    pub time_cap: Option<Duration>,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// Record wall-clock compile times. Off by default so that output is
    /// a pure function of the configuration.
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            k: 3,
            ns: vec![20],
            r_grid: ratio_grid(0.2, 4.2, 0.2),
            instances_per_point: 200,
            languages: vec![Language::Dnnf],
            seed: 1,
            node_cap: DEFAULT_NODE_CAP,
            time_cap: None,
            jobs: None,
            timing: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.r_grid.is_empty() {
            return bad("r grid is empty".into());
        }
        if let Some(r) = self.r_grid.iter().find(|r| !r.is_finite() || **r < 0.0) {
            return bad(format!("bad ratio {r}"));
        }
        if self.instances_per_point == 0 {
            return bad("instances_per_point must be at least 1".into());
        }
        if self.ns.is_empty() || self.languages.is_empty() {
            return bad("need at least one n and one language".into());
        }
        if let Some(n) = self.ns.iter().find(|&&n| self.k == 0 || n < self.k || n >= 128) {
            return bad(format!("n = {n} incompatible with k = {} (need k ≤ n < 128)", self.k));
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub n: usize,
    pub r: f64,
    pub m: usize,
    pub language: Language,
    pub instances_completed: usize,
    pub blowups: usize,
    pub unsat_count: usize,
    /// Statistics over completed instances; empty when none completed.
    pub mean_nodes: Option<f64>,
    pub median_nodes: Option<f64>,
    pub stddev_nodes: Option<f64>,
    pub mean_edges: Option<f64>,
    pub mean_compile_ms: Option<f64>,
}

/// Size of one compilation. Nodes are OBDD nodes (terminals included),
/// DFA states or d-DNNF nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub nodes: usize,
    pub edges: usize,
    pub unsat: bool,
    pub ms: f64,
}

/// Compiles one formula in every requested language. `None` marks a blowup.
/// OBDD and DFA share one OBDD build.
pub fn measure(
    formula: &CnfFormula,
    languages: &[Language],
    node_cap: usize,
    time_cap: Option<Duration>,
) -> Result<Vec<Option<Measurement>>> {
    let ms = |t: Instant| t.elapsed().as_secs_f64() * 1e3;
    let n = formula.num_vars();

    // Some(None) when the shared OBDD blew up
    let obdd = if languages.iter().any(|&l| l != Language::Dnnf) {
        let t = Instant::now();
        let mut m = ObddManager::with_budget(VarOrder::natural(n), Budget::new(node_cap, time_cap));
        match m.compile(formula) {
            Ok(f) => Some(Some((m, f, ms(t)))),
            Err(e) if e.is_blowup() => Some(None),
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let mut out = Vec::with_capacity(languages.len());
    for &lang in languages {
        let t = Instant::now();
        let m = match lang {
            Language::Obdd => obdd.as_ref().unwrap().as_ref().map(|(m, f, t_obdd)| {
                let s = m.node_count(*f);
                Measurement { nodes: s.nodes, edges: s.edges, unsat: *f == NodeRef::FALSE, ms: *t_obdd }
            }),
            Language::Dfa => match obdd.as_ref().unwrap() {
                None => None,
                Some((m, f, t_obdd)) => match LevelDfa::from_obdd_budgeted(m, *f, &mut Budget::new(node_cap, time_cap)) {
                    Ok(d) => Some(Measurement {
                        nodes: d.state_count(),
                        edges: d.transition_count(),
                        unsat: d.is_empty_language(),
                        ms: t_obdd + ms(t),
                    }),
                    Err(e) if e.is_blowup() => None,
                    Err(e) => return Err(e),
                },
            },
            Language::Dnnf => {
                let opts = DnnfOptions { budget: Budget::new(node_cap, time_cap), ..Default::default() };
                match compile_with(formula, opts) {
                    Ok(d) => {
                        let s = d.node_count();
                        Some(Measurement {
                            nodes: s.nodes,
                            edges: s.edges,
                            unsat: *d.node(d.root()) == DnnfNode::False,
                            ms: ms(t),
                        })
                    }
                    Err(e) if e.is_blowup() => None,
                    Err(e) => return Err(e),
                }
            }
        };
        out.push(m);
    }
    Ok(out)
}

/// Mean, median and sample standard deviation (0 for a single value).
fn summarize(values: &mut [f64]) -> (f64, f64, f64) {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    let median = if values.len() % 2 == 1 { values[mid] } else { (values[mid - 1] + values[mid]) / 2.0 };
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0)
    } else {
        0.0
    };
    (mean, median, var.sqrt())
}

/// Seed of instance `j` at size `n`. Independent of `r`: instances at
/// successive ratios share their clause prefix.
pub fn instance_seed(master: u64, k: usize, n: usize, j: usize) -> u64 {
    derive_seed(master, &[k as u64, n as u64, j as u64])
}

/// Runs the sweep on a pool of `cfg.jobs` workers. Rows come out sorted by
/// `(n, r, language)` and do not depend on the number of workers.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Error::InvalidParams(e.to_string()))?;

    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut rs = cfg.r_grid.clone();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let mut langs = cfg.languages.clone();
    langs.sort_unstable();
    langs.dedup();

    let points: Vec<(usize, f64)> = ns.iter().flat_map(|&n| rs.iter().map(move |&r| (n, r))).collect();
    let items: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.instances_per_point).map(move |j| (p, j)))
        .collect();
    let results: Vec<Vec<Option<Measurement>>> = pool.install(|| {
        items
            .par_iter()
            .map(|&(p, j)| {
                let (n, r) = points[p];
                let params = GenParams::from_ratio(cfg.k, n, r, instance_seed(cfg.seed, cfg.k, n, j));
                measure(&generate_instance(&params)?, &langs, cfg.node_cap, cfg.time_cap)
            })
            .collect::<Result<_>>()
    })?;

    let mut rows = Vec::with_capacity(points.len() * langs.len());
    for (p, chunk) in results.chunks(cfg.instances_per_point).enumerate() {
        let (n, r) = points[p];
        for (li, &language) in langs.iter().enumerate() {
            let done: Vec<Measurement> = chunk.iter().filter_map(|m| m[li]).collect();
            let mut row = SweepRow {
                k: cfg.k,
                n,
                r,
                m: clause_count(r, n),
                language,
                instances_completed: done.len(),
                blowups: chunk.len() - done.len(),
                unsat_count: done.iter().filter(|m| m.unsat).count(),
                mean_nodes: None,
                median_nodes: None,
                stddev_nodes: None,
                mean_edges: None,
                mean_compile_ms: None,
            };
            if !done.is_empty() {
                let mut nodes: Vec<f64> = done.iter().map(|m| m.nodes as f64).collect();
                let (mean, median, sd) = summarize(&mut nodes);
                row.mean_nodes = Some(mean);
                row.median_nodes = Some(median);
                row.stddev_nodes = Some(sd);
                row.mean_edges = Some(done.iter().map(|m| m.edges as f64).sum::<f64>() / done.len() as f64);
                if cfg.timing {
                    row.mean_compile_ms = Some(done.iter().map(|m| m.ms).sum::<f64>() / done.len() as f64);
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    table::write_tagged(out, SWEEP_SCHEMA, rows)
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    table::read_tagged(input, SWEEP_SCHEMA)
}
