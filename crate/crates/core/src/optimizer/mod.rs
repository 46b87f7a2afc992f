//! Dimension maximization over the `L`-symbol probability simplex.
//!
//! The objective is the midpoint estimate `h(p) / chi_k(p)` built from a
//! [`ChiPolynomial`]; the optimum is re-certified with
//! [`dimension_bracket_with`] before it is returned.

mod moran;
mod record;
mod simplex;
mod sweep;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{dimension_bracket_with, BracketOptions, ChiPolynomial, ProbVector, ValueBracket};
use crate::system::BranchedSystem;

pub use moran::{moran_root, moran_weights};
pub use record::{write_csv, write_json, MaximizerRecord};
pub use simplex::project;
pub use sweep::{sweep_l, SweepOptions, SweepReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximizerResult {
    pub p_opt: ProbVector,
    /// Certified bracket at `p_opt`.
    pub dim: ValueBracket,
    #[serde(rename = "L")]
    pub l: usize,
    pub depth: usize,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Midpoint objective at `p_opt`.
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizeOptions {
    pub max_iters: usize,
    /// Convergence threshold on the KKT residual.
    pub tol: f64,
    /// Number of random starts besides the uniform vector.
    pub seeds: usize,
    pub seed: u64,
    pub bracket: BracketOptions,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self { max_iters: 5000, tol: 1e-7, seeds: 5, seed: 0x5eed, bracket: BracketOptions::default() }
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;

/// Midpoint objective `h(p) / chi_k(p)` and its gradient on a fixed symbol set.
pub struct Objective {
    poly: ChiPolynomial,
}

impl Objective {
    pub fn new(system: &BranchedSystem, l: usize, depth: usize, opts: &BracketOptions) -> Result<Self> {
        let symbols: Vec<usize> = (1..=l).collect();
        Ok(Self { poly: ChiPolynomial::build(system, &symbols, depth, opts)? })
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        let chi = self.poly.eval(p).mid;
        if chi <= 0.0 {
            return f64::NEG_INFINITY;
        }
        entropy_of(p) / chi
    }

    /// Gradient in the ambient coordinates. Zero weights get the gradient at
    /// `1e-300`, which pushes them back into the interior.
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let chi = self.poly.eval(p).mid;
        let h = entropy_of(p);
        let dchi = self.poly.mid_gradient(p);
        p.iter()
            .zip(dchi)
            .map(|(&pi, dc)| {
                let dh = -pi.max(1e-300).ln() - 1.0;
                (dh * chi - h * dc) / (chi * chi)
            })
            .collect()
    }

    /// `||proj(p + g) - p||_inf`.
    pub fn kkt_residual(&self, p: &[f64]) -> f64 {
        let g = self.gradient(p);
        let moved: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + b).collect();
        project(&moved).iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

fn entropy_of(p: &[f64]) -> f64 {
    p.iter().filter(|&&w| w > 0.0).fold(0.0, |acc, &w| acc - w * w.ln())
}

struct Ascent {
    p: Vec<f64>,
    value: f64,
    iterations: usize,
    kkt: f64,
}

fn ascend(obj: &Objective, start: Vec<f64>, opts: &MaximizeOptions) -> Ascent {
    let mut p = start;
    let mut value = obj.value(&p);
    let mut step = 1.0;
    let mut kkt = obj.kkt_residual(&p);
    let mut iterations = 0;
    while iterations < opts.max_iters && kkt >= opts.tol {
        iterations += 1;
        let g = obj.gradient(&p);
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let q = project(&trial);
            let gain: f64 = g.iter().zip(q.iter().zip(&p)).map(|(gi, (qi, pi))| gi * (qi - pi)).sum();
            let v = obj.value(&q);
            if v >= value + ARMIJO * gain && v.is_finite() {
                accepted = q != p;
                p = q;
                value = v;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        step *= 2.0;
        kkt = obj.kkt_residual(&p);
    }
    Ascent { p, value, iterations, kkt }
}

fn dirichlet_start(l: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let e: Vec<f64> = (0..l).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// True when `a` should replace `b`: larger value, or a tie broken towards
/// the lexicographically larger vector.
fn better(a: (f64, &[f64]), b: (f64, &[f64])) -> bool {
    if (a.0 - b.0).abs() > 1e-12 * a.0.abs().max(1.0) {
        return a.0 > b.0;
    }
    a.1.iter().zip(b.1).find(|(x, y)| x != y).is_some_and(|(x, y)| x > y)
}

fn single_symbol(depth: usize) -> MaximizerResult {
    MaximizerResult {
        p_opt: ProbVector::point_mass(1),
        dim: ValueBracket::point(0.0, depth),
        l: 1,
        depth,
        kkt_residual: 0.0,
        iterations: 0,
        converged: true,
        objective: 0.0,
    }
}

fn certify(system: &BranchedSystem, obj: &Objective, p: Vec<f64>, depth: usize, iterations: usize, converged: bool, bracket: &BracketOptions) -> Result<MaximizerResult> {
    let l = p.len();
    let objective = obj.value(&p);
    let kkt_residual = obj.kkt_residual(&p);
    let p_opt = ProbVector::new(p)?;
    let dim = dimension_bracket_with(system, &p_opt, depth, bracket)?;
    Ok(MaximizerResult { p_opt, dim, l, depth, kkt_residual, iterations, converged, objective })
}

/// Projected gradient ascent from the uniform vector and `opts.seeds`
/// Dirichlet(1) starts; returns the best end point.
pub fn maximize_dimension(system: &BranchedSystem, l: usize, depth: usize, opts: &MaximizeOptions) -> Result<MaximizerResult> {
    if l == 0 || depth == 0 {
        return Err(Error::param("L and depth must be positive"));
    }
    if l > system.branch_count() {
        return Err(Error::InvalidSymbol { symbol: l, branches: system.branch_count() });
    }
    if l == 1 {
        system.branch(1)?;
        return Ok(single_symbol(depth));
    }
    let obj = Objective::new(system, l, depth, &opts.bracket)?;
    let mut starts = vec![vec![1.0 / l as f64; l]];
    for i in 0..opts.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
        starts.push(dirichlet_start(l, &mut rng));
    }
    let runs: Vec<Ascent> = starts.into_par_iter().map(|s| ascend(&obj, s, opts)).collect();
    let mut best = &runs[0];
    for run in &runs[1..] {
        if better((run.value, &run.p), (best.value, &best.p)) {
            best = run;
        }
    }
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let converged = best.kkt < opts.tol;
    certify(system, &obj, best.p.clone(), depth, iterations, converged, &opts.bracket)
}

/// Largest number of grid points [`grid_oracle`] will evaluate.
pub const GRID_BUDGET: usize = 2_000_000;

/// Brute-force maximum of the midpoint objective over the simplex grid
/// with spacing `resolution`, for `L <= 3`.
pub fn grid_oracle(system: &BranchedSystem, l: usize, resolution: f64, depth: usize, bracket: &BracketOptions) -> Result<MaximizerResult> {
    if !(1..=3).contains(&l) {
        return Err(Error::param(format!("grid oracle supports L in 1..=3, got {l}")));
    }
    if !(resolution > 0.0 && resolution <= 1.0) || depth == 0 {
        return Err(Error::param("resolution must lie in (0, 1] and depth be positive"));
    }
    if l == 1 {
        system.branch(1)?;
        return Ok(single_symbol(depth));
    }
    let n = (1.0 / resolution).round() as usize;
    let points = if l == 2 { n + 1 } else { (n + 1) * (n + 2) / 2 };
    if points > GRID_BUDGET {
        return Err(Error::Budget { required: points as u128, budget: GRID_BUDGET as u128 });
    }
    let obj = Objective::new(system, l, depth, bracket)?;
    let nf = n as f64;
    let best = (0..=n)
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(f64, Vec<f64>)> = None;
            let inner = if l == 2 { 0..=0 } else { 0..=(n - i) };
            for j in inner {
                let p = if l == 2 {
                    vec![i as f64 / nf, (n - i) as f64 / nf]
                } else {
                    vec![i as f64 / nf, j as f64 / nf, (n - i - j) as f64 / nf]
                };
                let v = obj.value(&p);
                if best.as_ref().is_none_or(|(bv, bp)| better((v, &p), (*bv, bp))) {
                    best = Some((v, p));
                }
            }
            best.expect("nonempty row")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|a, b| if better((b.0, &b.1), (a.0, &a.1)) { b } else { a })
        .expect("nonempty grid");
    certify(system, &obj, best.1, depth, points, true, bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::catalog;

    #[test]
    fn luroth_two_symbols_hits_moran_root() {
        let l = catalog::luroth();
        let r = maximize_dimension(&l, 2, 1, &MaximizeOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.dim.midpoint() - 0.6009668516).abs() < 1e-6);
        assert!((r.p_opt.get(1) - 0.6593119559).abs() < 1e-5);
    }

    #[test]
    fn single_symbol_is_zero() {
        let g = catalog::gauss();
        let r = maximize_dimension(&g, 1, 5, &MaximizeOptions::default()).unwrap();
        assert_eq!((r.dim.lo, r.dim.hi), (0.0, 0.0));
        assert_eq!(r.p_opt.weights(), &[1.0]);
        let r = grid_oracle(&g, 1, 0.1, 3, &BracketOptions::default()).unwrap();
        assert_eq!(r.dim.hi, 0.0);
    }

    #[test]
    fn grid_oracle_luroth() {
        let l = catalog::luroth();
        let r = grid_oracle(&l, 2, 1.0 / 400.0, 1, &BracketOptions::default()).unwrap();
        assert!((r.dim.midpoint() - 0.6009668516).abs() < 1e-3);
        assert!((r.p_opt.get(1) - 0.66).abs() < 0.01);
        assert!(grid_oracle(&l, 4, 0.1, 1, &BracketOptions::default()).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let g = catalog::gauss();
        let obj = Objective::new(&g, 3, 3, &BracketOptions::default()).unwrap();
        let p = [0.5, 0.3, 0.2];
        let grad = obj.gradient(&p);
        for i in 0..3 {
            let h = 1e-6;
            let mut a = p;
            let mut b = p;
            a[i] += h;
            b[i] -= h;
            let fd = (obj.value(&a) - obj.value(&b)) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-6 * grad[i].abs().max(1.0), "{i}: {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn tie_break_prefers_larger_first_weight() {
        assert!(better((1.0, &[0.6, 0.4]), (1.0, &[0.4, 0.6])));
        assert!(!better((1.0, &[0.4, 0.6]), (1.0, &[0.6, 0.4])));
        assert!(better((1.1, &[0.4, 0.6]), (1.0, &[0.6, 0.4])));
    }
}
