//! Cylinder-sum brackets for the Lyapunov exponent `chi = int log|T'| dmu_p`
//! and the dimension `h / chi`.
//!
//! Both rules enumerate the depth-`k` words `w` over the support of `p`, each
//! with Bernoulli weight `m_p([w]) = prod p_{w_j}`, and bound `log|T'|` on a
//! cylinder by its endpoint values (the derivative is monotone on each
//! branch and `T^i` is monotone on each cylinder):
//!
//! * [`CylinderRule::Orbit`]: `chi = (1/k) int log|(T^k)'|`, and along the
//!   orbit of `I_w` the `i`-th factor lives on the suffix cylinder
//!   `I_{w_i..w_k}`.
//! * [`CylinderRule::Coarse`]: `chi = sum_w int_{I_w} log|T'|`, bounded by
//!   the extremes of `log|T'_{w_1}|` on `I_w`.
//! * [`CylinderRule::Combined`]: the intersection of the two brackets.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{entropy_bounds, ProbVector, ValueBracket};
use crate::error::{Error, Result};
use crate::numeric::OutwardSum;
use crate::system::{Branch, BranchedSystem};

/// Default cap on the number of depth-`k` words enumerated.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylinderRule {
    /// Intersection of the orbit and coarse brackets; the midpoint
    /// estimate is the coarse one.
    #[default]
    Combined,
    /// Endpoint extremes along the orbit of each depth-`k` cylinder.
    Orbit,
    /// Per-cylinder extremes of `log|T'|` on the depth-`k` cylinders.
    Coarse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketOptions {
    pub rule: CylinderRule,
    /// Maximum number of depth-`k` words.
    pub budget: u128,
}

impl Default for BracketOptions {
    fn default() -> Self {
        Self { rule: CylinderRule::Combined, budget: DEFAULT_BUDGET }
    }
}

impl BracketOptions {
    pub fn with_rule(rule: CylinderRule) -> Self {
        Self { rule, ..Self::default() }
    }

    pub fn coarse() -> Self {
        Self::with_rule(CylinderRule::Coarse)
    }
}

fn check_budget(symbols: usize, depth: usize, budget: u128) -> Result<()> {
    if depth == 0 {
        return Err(Error::param("depth must be positive"));
    }
    let required = (symbols as u128).saturating_pow(depth as u32);
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(())
}

/// Calls `f` on every index word of length `depth` over `0..n` whose first
/// letter is `first`, in lexicographic order.
fn for_each_word_from(first: usize, n: usize, depth: usize, mut f: impl FnMut(&[usize])) {
    let mut word = vec![0usize; depth];
    word[0] = first;
    loop {
        f(&word);
        let mut k = depth;
        loop {
            if k == 1 {
                return;
            }
            k -= 1;
            word[k] += 1;
            if word[k] < n {
                break;
            }
            word[k] = 0;
        }
    }
}

/// Per-word integrand bounds. Orbit values are sums over the `k` factors,
/// not yet divided by `k`.
#[derive(Debug, Clone, Copy, Default)]
struct WordTerms {
    orbit: (f64, f64),
    coarse: (f64, f64),
    orbit_mid: f64,
    coarse_mid: f64,
}

struct WordScratch<'a> {
    chosen: Vec<&'a Branch>,
    suffix: Vec<(f64, f64)>,
}

impl<'a> WordScratch<'a> {
    fn new(depth: usize) -> Self {
        Self { chosen: Vec::with_capacity(depth), suffix: Vec::with_capacity(depth) }
    }

    fn terms(&mut self, branches: &'a [Branch], word: &[usize]) -> WordTerms {
        self.chosen.clear();
        self.chosen.extend(word.iter().map(|&i| &branches[i]));
        crate::system::suffix_endpoints(&self.chosen, &mut self.suffix);
        let mut acc = OutwardSum::new();
        let mut out = WordTerms::default();
        for (i, (b, &(a, c))) in self.chosen.iter().zip(&self.suffix).enumerate() {
            let la = b.derivative(a).abs().ln();
            let lc = b.derivative(c).abs().ln();
            let mid = b.derivative(0.5 * (a + c)).abs().ln();
            acc.add(la.min(lc), la.max(lc));
            out.orbit_mid += mid;
            if i == 0 {
                out.coarse = (la.min(lc), la.max(lc));
                out.coarse_mid = mid;
            }
        }
        out.orbit = (acc.lo, acc.hi);
        out
    }
}

/// Running sums for one batch of words.
#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    orbit: OutwardSum,
    coarse: OutwardSum,
    orbit_mid: f64,
    coarse_mid: f64,
}

impl Sums {
    fn add(&mut self, m: f64, t: &WordTerms) {
        self.orbit.add_weighted(m, t.orbit.0, t.orbit.1);
        self.coarse.add_weighted(m, t.coarse.0, t.coarse.1);
        self.orbit_mid += m * t.orbit_mid;
        self.coarse_mid += m * t.coarse_mid;
    }

    fn merge(&mut self, o: &Sums) {
        self.orbit.add(o.orbit.lo, o.orbit.hi);
        self.coarse.add(o.coarse.lo, o.coarse.hi);
        self.orbit_mid += o.orbit_mid;
        self.coarse_mid += o.coarse_mid;
    }

    /// `(lo, hi, mid)` under `rule` at depth `k`.
    fn finish(&self, rule: CylinderRule, k: usize) -> (f64, f64, f64) {
        let kf = k as f64;
        let orbit = if k == 1 {
            (self.orbit.lo, self.orbit.hi)
        } else {
            ((self.orbit.lo / kf).next_down(), (self.orbit.hi / kf).next_up())
        };
        let coarse = (self.coarse.lo, self.coarse.hi);
        match rule {
            CylinderRule::Orbit => (orbit.0, orbit.1, self.orbit_mid / kf),
            CylinderRule::Coarse => (coarse.0, coarse.1, self.coarse_mid),
            CylinderRule::Combined => {
                let lo = orbit.0.max(coarse.0);
                let hi = orbit.1.min(coarse.1);
                (lo.min(hi), hi.max(lo), self.coarse_mid)
            }
        }
    }
}

/// Support symbols, their branches and weights, after validity checks.
fn prepare(system: &BranchedSystem, p: &ProbVector) -> Result<(Vec<Branch>, Vec<f64>)> {
    let support = p.support();
    let branches = system.branches_for(&support)?;
    let weights = support.iter().map(|&s| p.get(s)).collect();
    Ok((branches, weights))
}

/// Sums over all depth-`depth` words, split by first letter and merged in
/// order so the result does not depend on the thread count.
fn cylinder_sums(system: &BranchedSystem, p: &ProbVector, depth: usize, budget: u128) -> Result<Sums> {
    let (branches, weights) = prepare(system, p)?;
    let n = branches.len();
    check_budget(n, depth, budget)?;
    let partials: Vec<Sums> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut scratch = WordScratch::new(depth);
            let mut acc = Sums::default();
            for_each_word_from(first, n, depth, |word| {
                let m: f64 = word.iter().map(|&i| weights[i]).product();
                acc.add(m, &scratch.terms(&branches, word));
            });
            acc
        })
        .collect();
    let mut total = Sums::default();
    for part in &partials {
        total.merge(part);
    }
    Ok(total)
}

pub fn lyapunov_bracket(system: &BranchedSystem, p: &ProbVector, depth: usize) -> Result<ValueBracket> {
    lyapunov_bracket_with(system, p, depth, &BracketOptions::default())
}

/// Certified bracket on `chi(mu_p)` at cylinder depth `depth`.
pub fn lyapunov_bracket_with(system: &BranchedSystem, p: &ProbVector, depth: usize, opts: &BracketOptions) -> Result<ValueBracket> {
    let (lo, hi, _) = cylinder_sums(system, p, depth, opts.budget)?.finish(opts.rule, depth);
    Ok(ValueBracket::new(lo, hi, depth))
}

/// Uncertified estimate of `chi` evaluating `log|T'|` at cylinder midpoints.
pub fn lyapunov_estimate(system: &BranchedSystem, p: &ProbVector, depth: usize, opts: &BracketOptions) -> Result<f64> {
    Ok(cylinder_sums(system, p, depth, opts.budget)?.finish(opts.rule, depth).2)
}

pub fn dimension_bracket(system: &BranchedSystem, p: &ProbVector, depth: usize) -> Result<ValueBracket> {
    dimension_bracket_with(system, p, depth, &BracketOptions::default())
}

/// Certified bracket on `dim mu_p = h / chi`. The entropy of a Bernoulli
/// measure is exact, so only `chi` is bracketed.
pub fn dimension_bracket_with(system: &BranchedSystem, p: &ProbVector, depth: usize, opts: &BracketOptions) -> Result<ValueBracket> {
    if p.support().len() == 1 {
        system.branch(p.support()[0])?;
        if depth == 0 {
            return Err(Error::param("depth must be positive"));
        }
        return Ok(ValueBracket::point(0.0, depth));
    }
    let chi = lyapunov_bracket_with(system, p, depth, opts)?;
    if chi.lo <= 0.0 {
        return Err(Error::Indeterminate { lo: chi.lo, hi: chi.hi });
    }
    let (h_lo, h_hi) = entropy_bounds(p);
    Ok(ValueBracket::new((h_lo / chi.hi).next_down().max(0.0), (h_hi / chi.lo).next_up(), depth))
}

#[derive(Debug, Clone)]
struct Monomial {
    counts: Vec<u8>,
    sums: Sums,
}

/// The depth-`k` cylinder sums as polynomials in the weights of a fixed
/// symbol list: `sum_c coeff_c prod_i p_i^{c_i}` over count vectors `c`.
///
/// The per-word integrand does not depend on `p`, so one enumeration serves
/// every evaluation during optimization.
#[derive(Debug, Clone)]
pub struct ChiPolynomial {
    symbols: Vec<usize>,
    depth: usize,
    rule: CylinderRule,
    monomials: Vec<Monomial>,
}

/// Values of the three cylinder sums at one weight vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiValues {
    pub lo: f64,
    pub hi: f64,
    pub mid: f64,
}

impl Monomial {
    fn terms(&self) -> WordTerms {
        let s = &self.sums;
        WordTerms { orbit: (s.orbit.lo, s.orbit.hi), coarse: (s.coarse.lo, s.coarse.hi), orbit_mid: s.orbit_mid, coarse_mid: s.coarse_mid }
    }

    fn mid(&self, rule: CylinderRule, depth: usize) -> f64 {
        match rule {
            CylinderRule::Orbit => self.sums.orbit_mid / depth as f64,
            _ => self.sums.coarse_mid,
        }
    }
}

impl ChiPolynomial {
    pub fn build(system: &BranchedSystem, symbols: &[usize], depth: usize, opts: &BracketOptions) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::param("no symbols"));
        }
        if depth > u8::MAX as usize {
            return Err(Error::param("depth above 255"));
        }
        let branches = system.branches_for(symbols)?;
        let n = branches.len();
        check_budget(n, depth, opts.budget)?;
        let parts: Vec<BTreeMap<Vec<u8>, Sums>> = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut scratch = WordScratch::new(depth);
                let mut map: BTreeMap<Vec<u8>, Sums> = BTreeMap::new();
                let mut counts = vec![0u8; n];
                for_each_word_from(first, n, depth, |word| {
                    counts.iter_mut().for_each(|c| *c = 0);
                    word.iter().for_each(|&i| counts[i] += 1);
                    let t = scratch.terms(&branches, word);
                    map.entry(counts.clone()).or_default().add(1.0, &t);
                });
                map
            })
            .collect();
        let mut merged: BTreeMap<Vec<u8>, Sums> = BTreeMap::new();
        for part in parts {
            for (k, v) in part {
                merged.entry(k).or_default().merge(&v);
            }
        }
        let monomials = merged.into_iter().map(|(counts, sums)| Monomial { counts, sums }).collect();
        Ok(Self { symbols: symbols.to_vec(), depth, rule: opts.rule, monomials })
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rule(&self) -> CylinderRule {
        self.rule
    }

    pub fn monomial_count(&self) -> usize {
        self.monomials.len()
    }

    fn powers(&self, weights: &[f64]) -> Vec<Vec<f64>> {
        weights
            .iter()
            .map(|&w| {
                let mut v = Vec::with_capacity(self.depth + 1);
                let mut acc = 1.0;
                for _ in 0..=self.depth {
                    v.push(acc);
                    acc *= w;
                }
                v
            })
            .collect()
    }

    /// Evaluates the sums at `weights` (aligned with [`symbols`](Self::symbols)).
    pub fn eval(&self, weights: &[f64]) -> ChiValues {
        assert_eq!(weights.len(), self.symbols.len());
        let pw = self.powers(weights);
        let mut total = Sums::default();
        for m in &self.monomials {
            let prod: f64 = m.counts.iter().enumerate().map(|(i, &c)| pw[i][c as usize]).product();
            total.add(prod, &m.terms());
        }
        let (lo, hi, mid) = total.finish(self.rule, self.depth);
        ChiValues { lo, hi, mid }
    }

    /// Gradient of the midpoint sum, using `d m_p([w]) / d p_i = count_i(w) p_i^{count_i - 1} prod_{j != i} p_j^{count_j}`.
    pub fn mid_gradient(&self, weights: &[f64]) -> Vec<f64> {
        assert_eq!(weights.len(), self.symbols.len());
        let pw = self.powers(weights);
        let mut grad = vec![0.0; weights.len()];
        for m in &self.monomials {
            for (i, &ci) in m.counts.iter().enumerate() {
                if ci == 0 {
                    continue;
                }
                let rest: f64 = m
                    .counts
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, &c)| pw[j][c as usize])
                    .product();
                grad[i] += m.mid(self.rule, self.depth) * ci as f64 * pw[i][ci as usize - 1] * rest;
            }
        }
        grad
    }
}
