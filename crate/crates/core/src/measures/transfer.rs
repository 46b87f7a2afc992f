//! Entropy and the operations that move mass between symbols.

use super::{dimension_bracket_with, BracketOptions, ProbVector};
use crate::error::{Error, Result};
use crate::numeric::OutwardSum;
use crate::system::BranchedSystem;

/// `-sum p_i log p_i` with `0 log 0 = 0`.
pub fn entropy(p: &ProbVector) -> f64 {
    p.weights().iter().filter(|&&w| w > 0.0).fold(0.0, |acc, &w| acc - w * w.ln())
}

/// Entropy rounded outward term by term.
pub fn entropy_bounds(p: &ProbVector) -> (f64, f64) {
    let mut acc = OutwardSum::new();
    for &w in p.weights().iter().filter(|&&w| w > 0.0) {
        let t = -w * w.ln();
        acc.add(t.next_down(), t.next_up());
    }
    (acc.lo.max(0.0), acc.hi)
}

/// Restricts `p` to symbols `1..=l` and renormalizes.
pub fn truncate_renormalize(p: &ProbVector, l: usize) -> Result<ProbVector> {
    if l == 0 {
        return Err(Error::param("L must be positive"));
    }
    let prefix: Vec<f64> = (1..=l).map(|i| p.get(i)).collect();
    let mass: f64 = prefix.iter().sum();
    if mass <= 0.0 {
        return Err(Error::ZeroMass(l));
    }
    if p.max_symbol() <= l {
        return Ok(p.clone());
    }
    Ok(ProbVector::from_raw(prefix.into_iter().map(|w| w / mass).collect()))
}

/// Moves `eps` of mass from symbol `n` to symbol 1.
pub fn mass_transfer(p: &ProbVector, eps: f64, n: usize) -> Result<ProbVector> {
    if n < 2 {
        return Err(Error::param(format!("transfer source must be at least 2, got {n}")));
    }
    let (p1, pn) = (p.get(1), p.get(n));
    let max = pn.min(1.0 - p1);
    if !(eps >= 0.0) || eps > max + 1e-15 {
        return Err(Error::param(format!("eps = {eps} outside [0, {max}]")));
    }
    let mut w = p.weights().to_vec();
    if w.len() < n {
        w.resize(n, 0.0);
    }
    w[0] = (p1 + eps).min(1.0);
    w[n - 1] = (pn - eps).max(0.0);
    Ok(ProbVector::from_raw(w))
}

/// `d/d eps (h(p) - h(p_{eps,n})) = log((p_1 + eps) / (p_n - eps))`.
pub fn entropy_shift_derivative(p: &ProbVector, eps: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param(format!("transfer source must be at least 2, got {n}")));
    }
    let (a, b) = (p.get(1) + eps, p.get(n) - eps);
    if eps < 0.0 || b <= 0.0 || a <= 0.0 || a >= 1.0 {
        return Err(Error::param(format!("derivative undefined at eps = {eps}, n = {n}")));
    }
    Ok((a / b).ln())
}

/// Outcome of a `(C, alpha)` decay check `p_i <= C / tau_i^alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    pub holds: bool,
    pub first_violation: Option<usize>,
    /// Smallest `C` for which the check holds: `max_i p_i tau_i^alpha`.
    pub fitted_c: f64,
}

pub fn decay_check(system: &BranchedSystem, p: &ProbVector, c: f64, alpha: f64) -> Result<DecayCheck> {
    if !(c > 0.0) {
        return Err(Error::param(format!("C must be positive, got {c}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut first_violation = None;
    let mut fitted_c: f64 = 0.0;
    for i in p.support() {
        let scaled = p.get(i) * system.tau(i)?.powf(alpha);
        fitted_c = fitted_c.max(scaled);
        if first_violation.is_none() && scaled > c {
            first_violation = Some(i);
        }
    }
    Ok(DecayCheck { holds: first_violation.is_none(), first_violation, fitted_c })
}

pub fn transfer_improves(system: &BranchedSystem, p: &ProbVector, n: usize, eps: f64, depth: usize) -> Result<bool> {
    transfer_improves_with(system, p, n, eps, depth, &BracketOptions::default())
}

/// True when moving `eps` from `n` to 1 gives a certified strict increase
/// in dimension at the given depth.
pub fn transfer_improves_with(
    system: &BranchedSystem,
    p: &ProbVector,
    n: usize,
    eps: f64,
    depth: usize,
    opts: &BracketOptions,
) -> Result<bool> {
    let q = mass_transfer(p, eps, n)?;
    if eps == 0.0 {
        return Ok(false);
    }
    let before = dimension_bracket_with(system, p, depth, opts)?;
    let after = dimension_bracket_with(system, &q, depth, opts)?;
    Ok(after.lo > before.hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::catalog;

    fn pv(w: &[f64]) -> ProbVector {
        ProbVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert!((entropy(&ProbVector::uniform(3)) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(&pv(&[1.0, 0.0, 0.0])).to_bits(), 0f64.to_bits());
        let (lo, hi) = entropy_bounds(&ProbVector::uniform(2));
        assert!(lo <= 2f64.ln() && 2f64.ln() <= hi && hi - lo < 1e-15);
    }

    #[test]
    fn truncation() {
        let t = truncate_renormalize(&pv(&[0.5, 0.25, 0.125, 0.125]), 2).unwrap();
        assert!((t.get(1) - 2.0 / 3.0).abs() < 1e-15 && (t.get(2) - 1.0 / 3.0).abs() < 1e-15);
        let u = ProbVector::uniform(3);
        assert_eq!(truncate_renormalize(&u, 3).unwrap(), u);
        assert_eq!(truncate_renormalize(&pv(&[0.0, 1.0]), 1), Err(Error::ZeroMass(1)));
    }

    #[test]
    fn transfer() {
        let q = mass_transfer(&pv(&[0.5, 0.3, 0.2]), 0.1, 3).unwrap();
        for (a, b) in q.weights().iter().zip([0.6, 0.3, 0.1]) {
            assert!((a - b).abs() < 1e-15);
        }
        let h = pv(&[0.5, 0.5]);
        assert_eq!(mass_transfer(&h, 0.0, 2).unwrap(), h);
        assert!(mass_transfer(&h, 0.6, 2).is_err());
        assert!(mass_transfer(&h, 0.1, 1).is_err());
        assert_eq!(mass_transfer(&h, 0.0, 4).unwrap().get(4), 0.0);
    }

    #[test]
    fn shift_derivative() {
        let d = entropy_shift_derivative(&pv(&[0.5, 0.3, 0.2]), 0.1, 3).unwrap();
        assert!((d - 6f64.ln()).abs() < 1e-12);
        assert_eq!(entropy_shift_derivative(&pv(&[0.5, 0.5]), 0.0, 2).unwrap(), 0.0);
        assert!(entropy_shift_derivative(&pv(&[0.2, 0.8]), 0.3, 2).unwrap().abs() < 1e-15);
        assert!(entropy_shift_derivative(&pv(&[0.5, 0.5]), 0.5, 2).is_err());
    }

    #[test]
    fn decay() {
        let g = catalog::gauss();
        let raw: Vec<f64> = (1..=50).map(|n| 1.0 / (n * (n + 1)) as f64).collect();
        let p = ProbVector::normalized(raw, 0.1).unwrap();
        assert!(decay_check(&g, &p, 1.0, 0.6).unwrap().holds);
        let d = decay_check(&g, &ProbVector::point_mass(10), 1.0, 0.6).unwrap();
        assert_eq!((d.holds, d.first_violation), (false, Some(10)));
        assert!(decay_check(&g, &ProbVector::point_mass(1), 1.0, 0.6).unwrap().holds);
        assert!(decay_check(&g, &p, 0.0, 0.6).is_err());
    }

    #[test]
    fn identity_transfer_never_improves() {
        let g = catalog::gauss();
        assert!(!transfer_improves(&g, &ProbVector::uniform(3), 2, 0.0, 3).unwrap());
    }
}
