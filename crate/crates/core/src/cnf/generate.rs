//! The fixed-clause-length random k-SAT model.
//!
//! Each of the `m` clauses is drawn independently: `k` distinct variables are
//! picked by a partial Fisher–Yates shuffle and each is negated by one fair
//! coin flip. The stream comes from ChaCha8 seeded with `seed_from_u64`, so an
//! instance is fully identified by `(k, n, m, seed)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Clause, CnfFormula, Lit, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl GenParams {
    pub fn new(k: usize, n: usize, m: usize, seed: u64) -> Self {
        GenParams { k, n, m, seed }
    }

    /// `m = round(r·n)`.
    pub fn from_ratio(k: usize, n: usize, r: f64, seed: u64) -> Self {
        GenParams { k, n, m: clause_count(r, n), seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidParams(format!(
                "clause length k = {} must satisfy 1 <= k <= n = {}",
                self.k, self.n
            )));
        }
        Ok(())
    }
}

/// Number of clauses for ratio `r` at `n` variables.
pub fn clause_count(r: f64, n: usize) -> usize {
    // 1e-9 guards against grids like 0.1*3*25 landing just under .5
    (r * n as f64 + 1e-9).round().max(0.0) as usize
}

/// Points `start, start + step, …` up to `stop` inclusive, rounded to six
/// decimals so that the grid prints cleanly. Empty if `step ≤ 0` or `stop < start`.
pub fn ratio_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if step <= 0.0 || stop < start || !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Vec::new();
    }
    let steps = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=steps)
        .map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6)
        .collect()
}

/// Mixes a master seed with a stream of coordinates (splitmix64 finalizer
/// applied per word). Order-independent across threads since it depends only
/// on the coordinates.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    coords.iter().fold(mix(master), |acc, &c| mix(acc ^ mix(c)))
}

/// One random clause of length `k` over `1..=pool.len()`. `pool` is scratch
/// space holding a permutation of the variables; any permutation works.
fn draw_clause<R: Rng>(rng: &mut R, pool: &mut [u32], k: usize) -> Clause {
    let (chosen, _) = pool.partial_shuffle(rng, k);
    let lits = chosen
        .iter()
        .map(|&v| Lit { var: Var::new(v), negated: rng.gen::<bool>() })
        .collect();
    Clause::new(lits).expect("partial shuffle yields distinct variables")
}

/// Draws a random instance. Pure in `params`.
pub fn generate_instance(params: &GenParams) -> Result<CnfFormula> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pool: Vec<u32> = (1..=params.n as u32).collect();
    let clauses = (0..params.m)
        .map(|_| draw_clause(&mut rng, &mut pool, params.k))
        .collect();
    CnfFormula::new(params.n, clauses)
}

/// Draws `count` clauses with the same distribution as [`generate_instance`].
/// Used for probe clauses.
pub fn generate_clause(k: usize, n: usize, count: usize, seed: u64) -> Result<Vec<Clause>> {
    Ok(generate_instance(&GenParams::new(k, n, count, seed))?.clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = ratio_grid(0.2, 4.2, 0.2);
        assert_eq!(g.len(), 21);
        assert_eq!(g[2], 0.6);
        assert_eq!(*g.last().unwrap(), 4.2);
        assert_eq!(ratio_grid(0.0, 0.0, 0.2), vec![0.0]);
        assert!(ratio_grid(1.0, 0.0, 0.2).is_empty());
        assert!(ratio_grid(0.0, 1.0, 0.0).is_empty());
    }

    #[test]
    fn zero_clauses() {
        let f = generate_instance(&GenParams::new(3, 20, 0, 7)).unwrap();
        assert_eq!(f.num_clauses(), 0);
        assert_eq!(f.num_vars(), 20);
    }

    #[test]
    fn threshold_region_instance() {
        let p = GenParams::from_ratio(3, 20, 4.3, 11);
        assert_eq!(p.m, 86);
        let f = generate_instance(&p).unwrap();
        assert_eq!(f.num_clauses(), 86);
        for c in f.clauses() {
            assert_eq!(c.len(), 3);
            let mut vs: Vec<_> = c.lits().iter().map(|l| l.var).collect();
            vs.sort();
            vs.dedup();
            assert_eq!(vs.len(), 3);
        }
    }

    #[test]
    fn rejects_k_above_n() {
        assert!(matches!(
            generate_instance(&GenParams::new(4, 3, 1, 0)),
            Err(Error::InvalidParams(_))
        ));
        assert!(generate_instance(&GenParams::new(0, 3, 1, 0)).is_err());
    }

    #[test]
    fn same_seed_same_formula() {
        let p = GenParams::new(3, 12, 40, 99);
        assert_eq!(generate_instance(&p).unwrap(), generate_instance(&p).unwrap());
        let q = GenParams { seed: 100, ..p };
        assert_ne!(generate_instance(&p).unwrap(), generate_instance(&q).unwrap());
    }

    #[test]
    fn ratio_rounding() {
        assert_eq!(clause_count(0.0, 20), 0);
        assert_eq!(clause_count(1.8, 20), 36);
        assert_eq!(clause_count(0.1, 25), 3);
        assert_eq!(clause_count(0.1, 12), 1);
    }

    #[test]
    fn derived_seeds_differ_per_coordinate() {
        let a = derive_seed(1, &[0, 0]);
        assert_ne!(a, derive_seed(1, &[0, 1]));
        assert_ne!(a, derive_seed(1, &[1, 0]));
        assert_ne!(a, derive_seed(2, &[0, 0]));
        assert_eq!(a, derive_seed(1, &[0, 0]));
    }

    #[test]
    fn negation_and_selection_frequencies() {
        // Frequency-count oracle over a large sample.
        let (k, n, m) = (3usize, 20usize, 20_000usize);
        let f = generate_instance(&GenParams::new(k, n, m, 2024)).unwrap();
        let lits: Vec<Lit> = f.clauses().iter().flat_map(|c| c.lits().iter().copied()).collect();
        let first = &lits[..10_000];
        let neg = first.iter().filter(|l| l.negated).count() as f64 / first.len() as f64;
        assert!((0.48..=0.52).contains(&neg), "negated fraction {neg}");

        // Each variable appears in a clause with probability k/n.
        let p = k as f64 / n as f64;
        let sigma = (m as f64 * p * (1.0 - p)).sqrt();
        let mut hits = vec![0usize; n];
        for l in &lits {
            hits[l.var.pos()] += 1;
        }
        for (v, &h) in hits.iter().enumerate() {
            let dev = (h as f64 - m as f64 * p).abs();
            assert!(dev <= 3.0 * sigma, "x{} selected {h} times, expected {}", v + 1, m as f64 * p);
        }
    }
}
