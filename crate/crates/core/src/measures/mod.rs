//! Bernoulli measures on the branch alphabet: entropy, certified Lyapunov
//! and dimension brackets from cylinder sums, and the mass-transfer and
//! truncation operations used to compare vectors.

mod lyapunov;
mod prob;
mod transfer;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use lyapunov::{
    dimension_bracket, dimension_bracket_with, lyapunov_bracket, lyapunov_bracket_with, lyapunov_estimate,
    BracketOptions, ChiPolynomial, CylinderRule, DEFAULT_BUDGET,
};
pub use prob::ProbVector;
pub use transfer::{
    decay_check, entropy, entropy_bounds, entropy_shift_derivative, mass_transfer, transfer_improves, transfer_improves_with,
    truncate_renormalize, DecayCheck,
};

/// Closed interval `[lo, hi]` enclosing an unknown real, with the cylinder
/// depth used to produce it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueBracket {
    pub lo: f64,
    pub hi: f64,
    pub depth: usize,
}

impl ValueBracket {
    pub fn new(lo: f64, hi: f64, depth: usize) -> Self {
        debug_assert!(lo <= hi, "bracket [{lo}, {hi}]");
        Self { lo, hi, depth }
    }

    pub fn point(x: f64, depth: usize) -> Self {
        Self { lo: x, hi: x, depth }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &ValueBracket) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl fmt::Display for ValueBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6}, {:.6}]", self.lo, self.hi)
    }
}

/// Default cylinder depth for a vector with the given support size: 8, or
/// the largest depth keeping `support^depth` within `budget`.
pub fn default_depth(support: usize, budget: u128) -> usize {
    let mut depth = 8;
    while depth > 1 && (support as u128).saturating_pow(depth as u32) > budget {
        depth -= 1;
    }
    depth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_depths() {
        assert_eq!(default_depth(1, 1_000_000), 8);
        assert_eq!(default_depth(3, 1_000_000), 8);
        assert_eq!(default_depth(6, 1_000_000), 7);
        assert_eq!(default_depth(100, 1_000_000), 3);
        assert_eq!(default_depth(5000, 1_000_000), 1);
    }

    #[test]
    fn bracket_helpers() {
        let a = ValueBracket::new(1.0, 2.0, 3);
        let b = ValueBracket::new(1.5, 4.0, 4);
        assert!(a.intersects(&b) && a.contains(1.5) && !a.contains(2.5));
        assert_eq!(a.midpoint(), 1.5);
    }
}
