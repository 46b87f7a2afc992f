use serde::{Deserialize, Serialize};

use super::{maximize_dimension, MaximizeOptions, MaximizerResult};
use crate::error::{Error, Result};
use crate::measures::decay_check;
use crate::system::BranchedSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Words allowed per depth: the depth for `L` is the largest `k <= max_depth` with `L^k <= budget`.
    pub budget: u128,
    pub max_depth: usize,
    /// Exponent for the fitted decay constants.
    pub alpha: f64,
    pub maximize: MaximizeOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { budget: 1_000_000, max_depth: 8, alpha: 0.75, maximize: MaximizeOptions::default() }
    }
}

impl SweepOptions {
    pub fn depth_for(&self, l: usize) -> usize {
        let mut k = self.max_depth.max(1);
        while k > 1 && (l as u128).saturating_pow(k as u32) > self.budget {
            k -= 1;
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub results: Vec<MaximizerResult>,
    pub alpha: f64,
    /// `max_i p_i tau_i^alpha` for each maximizer.
    pub decay_constants: Vec<f64>,
    /// `trend[i][j]` is the weight of symbol `i + 1` in the maximizer for `L = j + 1`.
    pub trend: Vec<Vec<f64>>,
}

impl SweepReport {
    /// Ratio between the largest and smallest decay constants over `L` in `range`.
    pub fn decay_spread(&self, range: std::ops::RangeInclusive<usize>) -> f64 {
        let cs: Vec<f64> = self.results.iter().zip(&self.decay_constants).filter(|(r, _)| range.contains(&r.l)).map(|(_, &c)| c).collect();
        let max = cs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = cs.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// True when each dimension midpoint is at least the previous one minus
    /// twice the wider of the two brackets.
    pub fn nondecreasing_within_brackets(&self) -> bool {
        self.results.windows(2).all(|w| {
            let slack = 2.0 * w[0].dim.width().max(w[1].dim.width());
            w[1].dim.midpoint() >= w[0].dim.midpoint() - slack
        })
    }
}

/// Maximizers for `L = 1..=l_max` at budgeted depths.
pub fn sweep_l(system: &BranchedSystem, l_max: usize, opts: &SweepOptions) -> Result<SweepReport> {
    if l_max == 0 {
        return Err(Error::param("L_max must be positive"));
    }
    let mut results = Vec::with_capacity(l_max);
    let mut decay_constants = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let r = maximize_dimension(system, l, opts.depth_for(l), &opts.maximize)?;
        decay_constants.push(decay_check(system, &r.p_opt, 1.0, opts.alpha)?.fitted_c);
        results.push(r);
    }
    let trend = (1..=l_max).map(|i| results.iter().map(|r| r.p_opt.get(i)).collect()).collect();
    Ok(SweepReport { results, alpha: opts.alpha, decay_constants, trend })
}
