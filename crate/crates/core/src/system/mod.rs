//! Countable branched interval systems.

mod analysis;
mod branch;
pub mod catalog;
mod cylinder;
pub mod file;
mod validate;

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use analysis::{S0Estimate, DEFAULT_KT_GRID};
pub use branch::{Branch, BranchMap, ExactMap, Monotonicity, Orientation};
pub use catalog::{build_catalog, CatalogName, CatalogParams};
pub use cylinder::EXACT_WORD_LIMIT;
pub(crate) use cylinder::suffix_endpoints;
pub use validate::{Condition, ConditionCheck, ValidationReport};

/// Open interval `(lo, hi)` inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 || lo >= hi {
            return Err(Error::param(format!("({lo}, {hi}) is not an interval inside [0,1]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    /// Closure membership with slack `tol`.
    pub fn contains_closed(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    pub fn contains_interval(&self, other: &Interval, tol: f64) -> bool {
        self.lo - tol <= other.lo && other.hi <= self.hi + tol
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Finite nonempty word over branch indices (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::param("empty word"));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s == 0) {
            return Err(Error::InvalidSymbol { symbol: s, branches: 0 });
        }
        Ok(Self(symbols))
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Word followed by `symbol`.
    pub fn extended(&self, symbol: usize) -> Word {
        let mut s = self.0.clone();
        s.push(symbol);
        Word(s)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Rotation starting at position `k`.
    pub fn rotated(&self, k: usize) -> Word {
        let n = self.0.len();
        Word((0..n).map(|i| self.0[(i + k) % n]).collect())
    }
}

impl TryFrom<Vec<usize>> for Word {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Word::new(v)
    }
}

impl From<Word> for Vec<usize> {
    fn from(w: Word) -> Self {
        w.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Asymptotic description of the branches beyond the explicit prefix:
/// `tau_n >= tau_coeff * n^exponent` and `sup |T_n'| <= sup_coeff * (n+1)^exponent`.
///
/// By the mean value theorem `1/sup|T_n'| <= |I_n| <= 1/tau_n`, so the
/// lengths decay like `n^-exponent` and `s_0 = 1/exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDescriptor {
    pub exponent: f64,
    pub tau_coeff: f64,
    pub sup_coeff: f64,
}

/// Expansion constants: `|(T^iterate)'| >= factor` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub iterate: usize,
    pub factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Family {
    Gauss,
    Luroth,
}

#[derive(Debug, Clone)]
enum BranchStore {
    Explicit(Vec<Branch>),
    Family { family: Family, prefix: usize },
}

/// A countable branched system: explicit prefix of branches plus an optional
/// tail descriptor. Immutable once built.
#[derive(Debug, Clone)]
pub struct BranchedSystem {
    name: String,
    store: BranchStore,
    orientation: Orientation,
    expansion: Expansion,
    tail: Option<TailDescriptor>,
}

/// Default number of explicitly generated branches for countable families.
pub const DEFAULT_PREFIX: usize = 10_000;

impl BranchedSystem {
    pub(crate) fn family(name: &str, family: Family, prefix: usize, expansion: Expansion, tail: TailDescriptor) -> Self {
        let orientation = match family {
            Family::Gauss => Orientation::Reversing,
            Family::Luroth => Orientation::Preserving,
        };
        Self {
            name: name.to_string(),
            store: BranchStore::Family { family, prefix },
            orientation,
            expansion,
            tail: Some(tail),
        }
    }

    /// System from an explicit branch list, checking that all branches share
    /// one orientation and that the domains tile `(0,1)` without gaps or
    /// overlaps (beyond what the tail descriptor accounts for).
    pub fn from_branches(name: &str, branches: Vec<Branch>, tail: Option<TailDescriptor>) -> Result<Self> {
        let sys = Self::from_branches_unchecked(name, branches, tail)?;
        if let Some(o) = sys.mixed_orientation() {
            return Err(Error::param(format!("branch {o} has a different orientation from branch 1")));
        }
        sys.check_partition()?;
        Ok(sys)
    }

    /// Like [`from_branches`](Self::from_branches) but skips the partition and
    /// orientation checks, so that [`validate`](Self::validate) can report them.
    pub fn from_branches_unchecked(name: &str, branches: Vec<Branch>, tail: Option<TailDescriptor>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::param("a system needs at least one branch"));
        }
        let branches: Vec<Branch> = branches.into_iter().enumerate().map(|(i, b)| b.with_index(i + 1)).collect();
        let orientation = branches[0].orientation();
        let mut sys = Self {
            name: name.to_string(),
            store: BranchStore::Explicit(branches),
            orientation,
            expansion: Expansion { iterate: 1, factor: 1.0 },
            tail,
        };
        sys.expansion = validate::estimate_expansion(&sys, 64).unwrap_or(Expansion { iterate: 1, factor: 1.0 });
        Ok(sys)
    }

    pub(crate) fn with_expansion(mut self, expansion: Expansion) -> Self {
        self.expansion = expansion;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn expansion(&self) -> Expansion {
        self.expansion
    }

    pub fn tail(&self) -> Option<&TailDescriptor> {
        self.tail.as_ref()
    }

    /// Number of explicitly represented branches.
    pub fn branch_count(&self) -> usize {
        match &self.store {
            BranchStore::Explicit(b) => b.len(),
            BranchStore::Family { prefix, .. } => *prefix,
        }
    }

    /// True when the family is countably infinite (a tail follows the prefix).
    pub fn is_countable(&self) -> bool {
        self.tail.is_some()
    }

    /// All branches are affine (piecewise-linear system).
    pub fn is_affine(&self) -> bool {
        match &self.store {
            BranchStore::Explicit(b) => b.iter().all(|br| matches!(br.map(), BranchMap::Affine { .. })),
            BranchStore::Family { family, .. } => *family == Family::Luroth,
        }
    }

    pub fn branch(&self, n: usize) -> Result<Branch> {
        let count = self.branch_count();
        if n == 0 || n > count {
            return Err(Error::InvalidSymbol { symbol: n, branches: count });
        }
        match &self.store {
            BranchStore::Explicit(b) => Ok(b[n - 1].clone()),
            BranchStore::Family { family, .. } => Ok(catalog::family_branch(*family, n)),
        }
    }

    pub fn check_word(&self, word: &Word) -> Result<()> {
        let count = self.branch_count();
        match word.symbols().iter().find(|&&s| s > count) {
            Some(&s) => Err(Error::InvalidSymbol { symbol: s, branches: count }),
            None => Ok(()),
        }
    }

    /// Branches for the given symbols, in order (duplicates allowed).
    pub fn branches_for(&self, symbols: &[usize]) -> Result<Vec<Branch>> {
        symbols.iter().map(|&s| self.branch(s)).collect()
    }

    /// Index of the branch whose domain contains `x`, if it is in the prefix.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x > 0.0 && x < 1.0) {
            return None;
        }
        match &self.store {
            BranchStore::Family { prefix, .. } => {
                let mut n = (1.0 / x).floor() as usize;
                // fix up rounding at branch boundaries
                while n > 1 && x > 1.0 / n as f64 {
                    n -= 1;
                }
                while x <= 1.0 / (n as f64 + 1.0) {
                    n += 1;
                }
                (n >= 1 && n <= *prefix).then_some(n)
            }
            BranchStore::Explicit(b) => b.iter().position(|br| br.domain().contains(x)).map(|i| i + 1),
        }
    }

    /// Applies `T` to `x` (the branch containing `x`).
    pub fn apply(&self, x: f64) -> Option<f64> {
        let n = self.locate(x)?;
        self.branch(n).ok().map(|b| b.forward(x))
    }

    fn mixed_orientation(&self) -> Option<usize> {
        match &self.store {
            BranchStore::Explicit(b) => b.iter().find(|br| br.orientation() != self.orientation).map(|br| br.index()),
            BranchStore::Family { .. } => None,
        }
    }

    /// Domains sorted by left endpoint, with branch indices.
    pub(crate) fn sorted_domains(&self) -> Vec<(usize, Interval)> {
        let mut v: Vec<(usize, Interval)> = (1..=self.branch_count())
            .map(|n| (n, self.branch(n).expect("index in range").domain()))
            .collect();
        v.sort_by(|a, b| a.1.lo.total_cmp(&b.1.lo));
        v
    }

    /// Partition check; returns a witness point for the first defect.
    pub fn check_partition(&self) -> Result<()> {
        validate::partition_defect(self).map_or(Ok(()), Err)
    }

    /// Exact endpoints of a cylinder, when all branches involved are rational.
    pub fn cylinder_exact(&self, word: &Word) -> Result<Option<(BigRational, BigRational)>> {
        cylinder::exact(self, word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_invariants() {
        assert!(Interval::new(0.2, 0.1).is_err());
        assert!(Interval::new(0.2, 0.2).is_err());
        assert!(Interval::new(-0.1, 0.5).is_err());
        assert!(Interval::new(0.5, 1.5).is_err());
        let i = Interval::new(0.25, 0.5).unwrap();
        assert_eq!(i.midpoint(), 0.375);
        assert!(i.contains(0.3) && !i.contains(0.5));
    }

    #[test]
    fn word_rules() {
        assert!(Word::new(vec![]).is_err());
        assert!(Word::new(vec![1, 0]).is_err());
        let w = Word::new(vec![3, 1, 2]).unwrap();
        assert_eq!(w.rotated(1).symbols(), &[1, 2, 3]);
        assert_eq!(w.reversed().symbols(), &[2, 1, 3]);
        assert_eq!(w.to_string(), "(3,1,2)");
    }

    #[test]
    fn gauss_locate() {
        let g = catalog::gauss();
        assert_eq!(g.locate(0.7), Some(1));
        assert_eq!(g.locate(0.4), Some(2));
        assert_eq!(g.locate(0.3), Some(3));
        assert_eq!(g.locate(0.0), None);
        assert!((g.apply(0.4).unwrap() - 0.5).abs() < 1e-15);
    }
}
