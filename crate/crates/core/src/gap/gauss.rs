//! Closed-form Gauss measure of cylinders and the Bernoulli factorization test.

use std::f64::consts::LN_2;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numeric::ln_rational;
use crate::system::{catalog, Word};

/// `mu_G(I_w) = log((1 + hi) / (1 + lo)) / log 2`, with exact rational
/// endpoints for words up to the exact-composition limit.
pub fn gauss_cylinder_measure(word: &Word) -> Result<f64> {
    let g = catalog::gauss();
    if let Some((lo, hi)) = g.cylinder_exact(word)? {
        let one = BigRational::one();
        return Ok(ln_rational(&((&one + hi) / (&one + lo))) / LN_2);
    }
    let iv = g.cylinder_interval(word)?;
    Ok(((1.0 + iv.hi) / (1.0 + iv.lo)).ln() / LN_2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub a: usize,
    pub b: usize,
    /// `mu(I_ab)`.
    pub joint: f64,
    /// `mu(I_a) mu(I_b)`.
    pub product: f64,
    pub factorization_gap: f64,
    /// `mu(I_ba)`.
    pub reversed: f64,
    pub reversal_gap: f64,
    pub witness: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub tol: f64,
    pub pairs: Vec<PairComparison>,
}

impl FactorizationReport {
    /// True when some pair fails to factor, so the measure is not Bernoulli.
    pub fn not_bernoulli(&self) -> bool {
        self.pairs.iter().any(|p| p.witness)
    }
}

/// Compares `mu(I_ab)` with `mu(I_a) mu(I_b)` for each pair; a gap above
/// `tol` is a witness. `mu(I_ba)` is reported alongside.
pub fn bernoulli_factorization_test<F>(measure: F, pairs: &[(usize, usize)], tol: f64) -> Result<FactorizationReport>
where
    F: Fn(&Word) -> Result<f64>,
{
    let pairs = pairs
        .iter()
        .map(|&(a, b)| {
            let joint = measure(&Word::new(vec![a, b])?)?;
            let reversed = measure(&Word::new(vec![b, a])?)?;
            let product = measure(&Word::new(vec![a])?)? * measure(&Word::new(vec![b])?)?;
            let factorization_gap = (joint - product).abs();
            Ok(PairComparison {
                a,
                b,
                joint,
                product,
                factorization_gap,
                reversed,
                reversal_gap: (joint - reversed).abs(),
                witness: factorization_gap > tol,
            })
        })
        .collect::<Result<_>>()?;
    Ok(FactorizationReport { tol, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &[usize]) -> Word {
        Word::new(s.to_vec()).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert!((gauss_cylinder_measure(&w(&[1])).unwrap() - (4f64 / 3.0).ln() / LN_2).abs() < 1e-15);
        assert!((gauss_cylinder_measure(&w(&[1, 2])).unwrap() - (21f64 / 20.0).ln() / LN_2).abs() < 1e-15);
        let long = w(&[1; 14]);
        let m = gauss_cylinder_measure(&long).unwrap();
        assert!(m > 0.0 && m < 1e-5);
    }

    #[test]
    fn gauss_is_not_bernoulli() {
        let r = bernoulli_factorization_test(gauss_cylinder_measure, &[(1, 2)], 1e-5).unwrap();
        let c = &r.pairs[0];
        assert!(r.not_bernoulli());
        let closed = (4f64 / 3.0).ln() * (9f64 / 8.0).ln() / (LN_2 * LN_2) - (21f64 / 20.0).ln() / LN_2;
        assert!((c.factorization_gap - closed).abs() < 1e-15, "{}", c.factorization_gap);
        assert!(c.reversal_gap < 1e-12);
    }

    #[test]
    fn bernoulli_factors() {
        let p = [0.7, 0.3];
        let m = |w: &Word| Ok(w.symbols().iter().map(|&s| p[s - 1]).product());
        assert!(!bernoulli_factorization_test(m, &[(1, 2)], 1e-12).unwrap().not_bernoulli());
    }
}
