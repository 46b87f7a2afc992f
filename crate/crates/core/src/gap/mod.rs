//! Periodic orbits, cycle derivatives and dimension-gap certificates.
//!
//! A word `(a_1, ..., a_n)` names the periodic orbit with `T^{i-1} x` in
//! `I_{a_i}`. Its point is the fixed point of `phi_{a_1} o ... o phi_{a_n}`
//! where `phi_a` is the inverse of branch `a`. Two words with the same symbol
//! multiset but different `|(T^n)'|` at their periodic points witness that
//! `log|T'|` is not cohomologous to a function of the first symbol, which
//! rules out dimension one for every Bernoulli measure.

mod gauss;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Branch, BranchedSystem, Word};

pub use gauss::{bernoulli_factorization_test, gauss_cylinder_measure, FactorizationReport, PairComparison};

/// Stop once successive iterates differ by less than this.
pub const STEP_TOL: f64 = 1e-13;
pub const MAX_ITERATIONS: usize = 200;
/// Default cap on the number of words examined by [`certificate_search`].
pub const SEARCH_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub word: Word,
    pub point: f64,
    /// `log|(T^n)'(point)|`.
    pub cycle_log_derivative: f64,
    /// `|T^n(point) - point|`, evaluated forward.
    pub residual: f64,
    /// `orbit[i] = T^i(point)`.
    pub orbit: Vec<f64>,
    /// Successive step sizes of the inverse iteration.
    pub steps: Vec<f64>,
}

impl PeriodicOrbit {
    pub fn derivative(&self) -> f64 {
        self.cycle_log_derivative.exp()
    }
}

/// Sum with the terms sorted first, so equal multisets of terms give
/// bitwise equal sums.
fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

fn pull_back(branches: &[Branch], x: f64, orbit: &mut [f64]) -> f64 {
    let mut z = x;
    for (i, b) in branches.iter().enumerate().rev() {
        z = b.inverse(z);
        orbit[i] = z;
    }
    z
}

pub fn periodic_point(system: &BranchedSystem, word: &Word) -> Result<PeriodicOrbit> {
    let branches = system.branches_for(word.symbols())?;
    let n = branches.len();
    let mut orbit = vec![0.0; n];
    let mut x = system.cylinder_interval(word)?.midpoint();
    let mut steps = Vec::new();
    loop {
        let y = pull_back(&branches, x, &mut orbit);
        let step = (y - x).abs();
        steps.push(step);
        x = y;
        if step < STEP_TOL {
            break;
        }
        let growing = steps.len() > 3 && step > steps[steps.len() - 4];
        if steps.len() >= MAX_ITERATIONS || !step.is_finite() || growing {
            return Err(Error::NonContraction { word: word.symbols().to_vec() });
        }
    }
    // one more pass so the recorded orbit starts at the returned point
    pull_back(&branches, x, &mut orbit);
    orbit[0] = x;
    let cycle_log_derivative = sorted_sum(branches.iter().zip(&orbit).map(|(b, &z)| b.derivative(z).abs().ln()).collect());
    let end = branches.iter().fold(x, |z, b| b.forward(z));
    Ok(PeriodicOrbit { word: word.clone(), point: x, cycle_log_derivative, residual: (end - x).abs(), orbit, steps })
}

/// `|(T^n)''|` at the orbit's point by the chain rule.
fn second_derivative(system: &BranchedSystem, orbit: &PeriodicOrbit) -> Result<f64> {
    let branches = system.branches_for(orbit.word.symbols())?;
    let d: Vec<f64> = branches.iter().zip(&orbit.orbit).map(|(b, &z)| b.derivative(z)).collect();
    let mut total = 0.0;
    let mut prefix = 1.0;
    for (i, (b, &z)) in branches.iter().zip(&orbit.orbit).enumerate() {
        let rest: f64 = d.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).product();
        total += b.second_derivative(z) * prefix * prefix * rest;
        prefix *= d[i];
    }
    Ok(total.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub orbit_a: PeriodicOrbit,
    pub orbit_b: PeriodicOrbit,
    /// `|D_a - D_b| / max(D_a, D_b)` for `D = |(T^n)'|`.
    pub derivative_gap: f64,
    /// Relative error bound on the gap.
    pub error_bound: f64,
    pub valid: bool,
}

impl GapCertificate {
    pub fn new(system: &BranchedSystem, orbit_a: PeriodicOrbit, orbit_b: PeriodicOrbit) -> Result<Self> {
        let mut ma = orbit_a.word.symbols().to_vec();
        let mut mb = orbit_b.word.symbols().to_vec();
        ma.sort_unstable();
        mb.sort_unstable();
        if ma != mb {
            return Err(Error::param(format!("{} and {} have different symbol multisets", orbit_a.word, orbit_b.word)));
        }
        let (da, db) = (orbit_a.derivative(), orbit_b.derivative());
        let scale = da.max(db);
        let derivative_gap = (da - db).abs() / scale;
        let propagated = f64::EPSILON * (da + db)
            + second_derivative(system, &orbit_a)? * orbit_a.residual
            + second_derivative(system, &orbit_b)? * orbit_b.residual;
        let error_bound = 10.0 * propagated / scale;
        Ok(Self { orbit_a, orbit_b, derivative_gap, error_bound, valid: derivative_gap > error_bound })
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::json!({
            "words": [self.orbit_a.word.symbols(), self.orbit_b.word.symbols()],
            "points": [self.orbit_a.point, self.orbit_b.point],
            "derivatives": [self.orbit_a.derivative(), self.orbit_b.derivative()],
            "residuals": [self.orbit_a.residual, self.orbit_b.residual],
            "gap": self.derivative_gap,
            "error_bound": self.error_bound,
            "valid": self.valid,
        });
        serde_json::to_string_pretty(&v).expect("plain values serialize")
    }
}

impl fmt::Display for GapCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in [&self.orbit_a, &self.orbit_b] {
            writeln!(f, "word {:<12} point {:.10}  |(T^n)'| {:.7}  residual {:.1e}", o.word.to_string(), o.point, o.derivative(), o.residual)?;
        }
        writeln!(f, "relative gap {:.4e}  error bound {:.4e}", self.derivative_gap, self.error_bound)?;
        write!(f, "certificate {}", if self.valid { "valid" } else { "invalid" })
    }
}

/// Lexicographically largest rotation.
pub fn canonical_rotation(word: &Word) -> Word {
    (0..word.len()).map(|k| word.rotated(k)).max().expect("words are nonempty")
}

/// True when the word is not a power of a shorter word.
pub fn is_primitive(word: &Word) -> bool {
    let s = word.symbols();
    let n = s.len();
    (1..n).filter(|d| n % d == 0).all(|d| (0..n).any(|i| s[i] != s[i % d]))
}

/// Primitive words of length `2..=max_len` over `1..=max_symbol`, one per
/// rotation class, grouped by sorted symbol multiset.
fn candidate_groups(max_symbol: usize, max_len: usize) -> BTreeMap<Vec<usize>, Vec<Word>> {
    let mut groups: BTreeMap<Vec<usize>, Vec<Word>> = BTreeMap::new();
    for len in 2..=max_len {
        let mut s = vec![1usize; len];
        'words: loop {
            let w = Word::new(s.clone()).expect("symbols are positive");
            if is_primitive(&w) && canonical_rotation(&w) == w {
                let mut key = s.clone();
                key.sort_unstable();
                groups.entry(key).or_default().push(w);
            }
            let mut k = len;
            loop {
                if k == 0 {
                    break 'words;
                }
                k -= 1;
                s[k] += 1;
                if s[k] <= max_symbol {
                    break;
                }
                s[k] = 1;
            }
        }
    }
    groups.retain(|_, ws| ws.len() > 1);
    groups
}

pub fn certificate_search(system: &BranchedSystem, max_symbol: usize, max_len: usize, tol: f64) -> Result<Option<GapCertificate>> {
    certificate_search_with(system, max_symbol, max_len, tol, SEARCH_BUDGET)
}

/// Best certificate among same-multiset word pairs whose relative gap
/// exceeds both `tol` and its error bound. Ties go to the lexicographically
/// first pair, with the larger word as `orbit_a`.
pub fn certificate_search_with(system: &BranchedSystem, max_symbol: usize, max_len: usize, tol: f64, budget: u128) -> Result<Option<GapCertificate>> {
    if max_symbol == 0 || max_len == 0 {
        return Err(Error::param("max_symbol and max_len must be positive"));
    }
    if max_symbol > system.branch_count() {
        return Err(Error::InvalidSymbol { symbol: max_symbol, branches: system.branch_count() });
    }
    let required: u128 = (1..=max_len as u32).map(|k| (max_symbol as u128).saturating_pow(k)).fold(0u128, |a, b| a.saturating_add(b));
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    let groups = candidate_groups(max_symbol, max_len);
    let words: Vec<Word> = groups.values().flatten().cloned().collect();
    let orbits: Vec<PeriodicOrbit> = words.par_iter().map(|w| periodic_point(system, w)).collect::<Result<_>>()?;
    let by_word: BTreeMap<&Word, &PeriodicOrbit> = words.iter().zip(&orbits).collect();
    let mut best: Option<GapCertificate> = None;
    for ws in groups.values() {
        let mut ws = ws.clone();
        ws.sort_by(|a, b| b.cmp(a));
        for i in 0..ws.len() {
            for j in i + 1..ws.len() {
                let cert = GapCertificate::new(system, by_word[&ws[i]].clone(), by_word[&ws[j]].clone())?;
                if !cert.valid || cert.derivative_gap <= tol {
                    continue;
                }
                if best.as_ref().is_none_or(|b| cert.derivative_gap > b.derivative_gap) {
                    best = Some(cert);
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::catalog;

    fn w(s: &[usize]) -> Word {
        Word::new(s.to_vec()).unwrap()
    }

    #[test]
    fn gauss_golden_fixed_point() {
        let o = periodic_point(&catalog::gauss(), &w(&[1])).unwrap();
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        assert!((o.point - phi).abs() < 1e-12);
        assert!((o.derivative() - 1.0 / (phi * phi)).abs() < 1e-10);
        assert!(o.residual < 1e-12);
    }

    #[test]
    fn tangent_example_orbits() {
        let t = catalog::example_tangent(4).unwrap();
        let a = periodic_point(&t, &w(&[3, 2, 1])).unwrap();
        let b = periodic_point(&t, &w(&[3, 1, 2])).unwrap();
        assert!((a.point - 0.8168901475).abs() < 1e-8, "{}", a.point);
        assert!((b.point - 0.7887302110).abs() < 1e-8, "{}", b.point);
        assert!((a.derivative() - 72.0359014).abs() < 1e-5);
        assert!((b.derivative() - 72.0120122).abs() < 1e-5);
    }

    #[test]
    fn rotations_and_primitivity() {
        assert_eq!(canonical_rotation(&w(&[1, 2, 3])), w(&[3, 1, 2]));
        assert_eq!(canonical_rotation(&w(&[1, 3, 2])), w(&[3, 2, 1]));
        assert!(!is_primitive(&w(&[1, 2, 1, 2])));
        assert!(is_primitive(&w(&[1, 1, 2])));
        let g = candidate_groups(3, 3);
        assert_eq!(g.get(&vec![1, 2, 3]).unwrap(), &vec![w(&[3, 1, 2]), w(&[3, 2, 1])]);
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn affine_systems_have_no_certificate() {
        assert!(certificate_search(&catalog::luroth(), 3, 4, 1e-6).unwrap().is_none());
    }

    #[test]
    fn tangent_certificate() {
        let t = catalog::example_tangent(4).unwrap();
        let c = certificate_search(&t, 3, 3, 1e-6).unwrap().unwrap();
        assert_eq!((c.orbit_a.word.clone(), c.orbit_b.word.clone()), (w(&[3, 2, 1]), w(&[3, 1, 2])));
        assert!((c.derivative_gap - 3.316e-4).abs() < 1e-6, "{}", c.derivative_gap);
        assert!(c.valid && c.error_bound < 1e-9);
        assert!(c.to_json().contains("\"valid\": true"));
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(certificate_search_with(&catalog::gauss(), 10, 7, 1e-6, 1000), Err(Error::Budget { .. })));
    }
}
