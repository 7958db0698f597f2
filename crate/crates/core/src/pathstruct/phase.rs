//! Sweep of the multi-interchangeable-path transition over the clause ratio.
//!
//! Each instance is compiled to a DFA and probed with random clauses drawn
//! like instance clauses. An instance is easy-hard when more than `threshold`
//! probes have a multi-interchangeable path.

use std::io::{Read, Write};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::has_multi_interchangeable_path;
use crate::budget::{Budget, DEFAULT_NODE_CAP};
use crate::cnf::{derive_seed, generate_clause, generate_instance, ratio_grid, Clause, GenParams};
use crate::dfa::{compile_cnf_to_dfa, LevelDfa};
use crate::error::{Error, Result};
use crate::obdd::VarOrder;
use crate::table;

pub const PHASE_SCHEMA: &str = "kclab-phase/1";

// Coordinate separating probe seeds from instance seeds.
const PROBE_STREAM: u64 = 0x70_72_6f_62_65;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLabel {
    EasyHard,
    HardEasy,
}

impl PhaseLabel {
    pub fn from_count(count: usize, threshold: usize) -> Self {
        if count > threshold {
            PhaseLabel::EasyHard
        } else {
            PhaseLabel::HardEasy
        }
    }
}

#[derive(Debug, Clone)]
pub struct PhaseExperimentConfig {
    pub k: usize,
    pub n: usize,
    pub r_grid: Vec<f64>,
    pub instances_per_r: usize,
    pub probe_clauses: usize,
    pub threshold: usize,
    pub seed: u64,
    pub node_cap: usize,
    pub time_cap: Option<Duration>,
}

impl Default for PhaseExperimentConfig {
    fn default() -> Self {
        PhaseExperimentConfig {
            k: 3,
            n: 18,
            r_grid: ratio_grid(0.2, 4.2, 0.2),
            instances_per_r: 100,
            probe_clauses: 100,
            threshold: 50,
            seed: 1,
            node_cap: DEFAULT_NODE_CAP,
            time_cap: None,
        }
    }
}

impl PhaseExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.k == 0 || self.k > self.n {
            return bad("need 1 ≤ k ≤ n");
        }
        if self.r_grid.is_empty() || self.r_grid.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return bad("r grid must be nonempty and nonnegative");
        }
        if self.instances_per_r == 0 {
            return bad("instances_per_r must be at least 1");
        }
        if self.threshold == 0 || self.threshold >= self.probe_clauses {
            return bad("need 0 < threshold < probe_clauses");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub r: f64,
    /// Instances that compiled within the caps.
    pub instances: usize,
    pub easy_hard_count: usize,
    /// `easy_hard_count / instances`; NaN when nothing compiled.
    pub fraction: f64,
    pub mean_dfa_states: f64,
    /// Instances dropped for exceeding a cap.
    #[serde(skip)]
    pub skipped: usize,
}

/// Number of probes with a multi-interchangeable path in `dfa`.
pub fn count_multi_probes(dfa: &LevelDfa, probes: &[Clause]) -> usize {
    probes.iter().filter(|c| has_multi_interchangeable_path(dfa, c)).count()
}

enum Outcome {
    Skipped,
    Done { states: usize, label: PhaseLabel },
}

fn run_instance(cfg: &PhaseExperimentConfig, r: f64, j: usize) -> Result<Outcome> {
    let (k, n) = (cfg.k as u64, cfg.n as u64);
    let formula = generate_instance(&GenParams::from_ratio(cfg.k, cfg.n, r, derive_seed(cfg.seed, &[k, n, j as u64])))?;
    let budget = Budget::new(cfg.node_cap, cfg.time_cap);
    let dfa = match compile_cnf_to_dfa(&formula, &VarOrder::natural(cfg.n), budget) {
        Ok(d) => d,
        Err(e) if e.is_blowup() => return Ok(Outcome::Skipped),
        Err(e) => return Err(e),
    };
    let probes = generate_clause(cfg.k, cfg.n, cfg.probe_clauses, derive_seed(cfg.seed, &[PROBE_STREAM, k, n, j as u64]))?;
    let count = count_multi_probes(&dfa, &probes);
    Ok(Outcome::Done { states: dfa.state_count(), label: PhaseLabel::from_count(count, cfg.threshold) })
}

/// Runs the experiment on the current rayon pool. Instance `j` uses the same
/// seed at every ratio, and so do its probes.
pub fn phase_experiment(cfg: &PhaseExperimentConfig) -> Result<Vec<PhaseRow>> {
    cfg.validate()?;
    let items: Vec<(usize, usize)> = (0..cfg.r_grid.len())
        .flat_map(|ri| (0..cfg.instances_per_r).map(move |j| (ri, j)))
        .collect();
    let outcomes = items
        .par_iter()
        .map(|&(ri, j)| run_instance(cfg, cfg.r_grid[ri], j))
        .collect::<Result<Vec<_>>>()?;
    Ok(cfg
        .r_grid
        .iter()
        .zip(outcomes.chunks(cfg.instances_per_r))
        .map(|(&r, chunk)| {
            let mut row = PhaseRow { r, instances: 0, easy_hard_count: 0, fraction: 0.0, mean_dfa_states: 0.0, skipped: 0 };
            let mut states = 0usize;
            for o in chunk {
                match o {
                    Outcome::Skipped => row.skipped += 1,
                    Outcome::Done { states: s, label } => {
                        row.instances += 1;
                        states += s;
                        row.easy_hard_count += (*label == PhaseLabel::EasyHard) as usize;
                    }
                }
            }
            row.fraction = row.easy_hard_count as f64 / row.instances as f64;
            row.mean_dfa_states = states as f64 / row.instances as f64;
            row
        })
        .collect())
}

pub fn write_phase_csv<W: Write>(out: W, rows: &[PhaseRow]) -> Result<()> {
    table::write_tagged(out, PHASE_SCHEMA, rows)
}

pub fn read_phase_csv<R: Read>(input: R) -> Result<Vec<PhaseRow>> {
    table::read_tagged(input, PHASE_SCHEMA)
}
