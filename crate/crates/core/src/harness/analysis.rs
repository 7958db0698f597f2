//! Peak detection and growth fits over sweep rows.

use std::collections::BTreeMap;

use super::{Language, SweepRow};
use crate::cnf::ratio_grid;
use crate::error::{Error, Result};

/// Satisfiability thresholds `r_p` per clause length. Only the k = 3 value
/// is a property of the experiments; the others are the commonly cited
/// asymptotic estimates and serve to bound ratio grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdTable {
    r_p: BTreeMap<usize, f64>,
}

impl Default for ThresholdTable {
    fn default() -> Self {
        ThresholdTable { r_p: [(3, 4.3), (4, 9.93), (5, 21.12), (6, 43.37)].into_iter().collect() }
    }
}

impl ThresholdTable {
    pub fn get(&self, k: usize) -> Option<f64> {
        self.r_p.get(&k).copied()
    }

    pub fn set(&mut self, k: usize, r_p: f64) {
        self.r_p.insert(k, r_p);
    }

    /// `step, 2·step, …` up to `r_p(k)`.
    pub fn grid(&self, k: usize, step: f64) -> Option<Vec<f64>> {
        self.get(k).map(|r_p| ratio_grid(step, r_p, step))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Peak {
    /// The smoothed curve has an interior maximum at `smoothed_r`;
    /// `raw_r` is the unsmoothed argmax.
    At { raw_r: f64, smoothed_r: f64 },
    /// The smoothed maximum sits at an end of the grid.
    NoPeak,
}

impl Peak {
    /// The smoothed peak location.
    pub fn r_c(self) -> Option<f64> {
        match self {
            Peak::At { smoothed_r, .. } => Some(smoothed_r),
            Peak::NoPeak => None,
        }
    }
}

fn argmax(ys: &[f64]) -> usize {
    ys.iter()
        .enumerate()
        .fold(0, |best, (i, y)| if *y > ys[best] { i } else { best })
}

/// Locates the maximum of `(r, mean size)` points after a 3-point moving
/// average (two points at the ends). Needs at least 5 points.
pub fn detect_peak(points: &[(f64, f64)]) -> Result<Peak> {
    if points.len() < 5 {
        return Err(Error::InvalidParams(format!("peak detection needs ≥ 5 points, got {}", points.len())));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let smooth: Vec<f64> = (0..ys.len())
        .map(|i| {
            let w = &ys[i.saturating_sub(1)..(i + 2).min(ys.len())];
            w.iter().sum::<f64>() / w.len() as f64
        })
        .collect();
    let s = argmax(&smooth);
    if s == 0 || s == ys.len() - 1 {
        return Ok(Peak::NoPeak);
    }
    Ok(Peak::At { raw_r: pts[argmax(&ys)].0, smoothed_r: pts[s].0 })
}

/// [`detect_peak`] over the rows of one `(k, n, language)` series.
pub fn peak_from_rows(rows: &[SweepRow], k: usize, n: usize, language: Language) -> Result<Peak> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.k == k && r.n == n && r.language == language)
        .filter_map(|r| r.mean_nodes.map(|m| (r.r, m)))
        .collect();
    detect_peak(&pts)
}

/// Least-squares fits of `ln(size)` against `n` and against `ln(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub semilog_slope: f64,
    pub semilog_r2: f64,
    pub loglog_slope: f64,
    pub loglog_r2: f64,
}

/// Slope and coefficient of determination of `y ~ a + b·x`. A constant `y`
/// is fitted exactly.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    if syy == 0.0 {
        return (slope, 1.0);
    }
    (slope, sxy * sxy / (sxx * syy))
}

/// Fits `(n, mean size)` points. Needs at least 4 distinct `n` and positive sizes.
pub fn fit_growth(points: &[(usize, f64)]) -> Result<GrowthFit> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::Fit(format!("need ≥ 4 distinct n, got {}", distinct.len())));
    }
    if distinct[0] == 0 || points.iter().any(|p| p.1 <= 0.0 || !p.1.is_finite()) {
        return Err(Error::Fit("sizes and n must be positive".into()));
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let ns: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let log_ns: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (semilog_slope, semilog_r2) = least_squares(&ns, &ys);
    let (loglog_slope, loglog_r2) = least_squares(&log_ns, &ys);
    Ok(GrowthFit { semilog_slope, semilog_r2, loglog_slope, loglog_r2 })
}

/// [`fit_growth`] over the rows of one `(k, r, language)` series.
pub fn growth_from_rows(rows: &[SweepRow], k: usize, r: f64, language: Language) -> Result<GrowthFit> {
    let pts: Vec<(usize, f64)> = rows
        .iter()
        .filter(|row| row.k == k && (row.r - r).abs() < 1e-9 && row.language == language)
        .filter_map(|row| row.mean_nodes.map(|m| (row.n, m)))
        .collect();
    fit_growth(&pts)
}
