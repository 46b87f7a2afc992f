use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the weight sum for a constructed vector.
pub const SUM_TOL: f64 = 1e-12;
/// Tolerance on the weight sum accepted (and renormalized) by the parser.
pub const PARSE_SUM_TOL: f64 = 1e-9;

/// Finitely supported probability vector; `weights[i]` belongs to branch `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector {
    weights: Vec<f64>,
}

impl ProbVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::param(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { weights })
    }

    /// Divides by the sum, accepting sums within `tol` of 1.
    pub fn normalized(weights: Vec<f64>, tol: f64) -> Result<Self> {
        check_weights(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::param(format!("weights sum to {sum}, more than {tol} away from 1")));
        }
        Ok(Self { weights: weights.into_iter().map(|w| w / sum).collect() })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self { weights: vec![1.0 / n as f64; n] }
    }

    /// All mass on branch `symbol` (1-based).
    pub fn point_mass(symbol: usize) -> Self {
        assert!(symbol > 0);
        let mut weights = vec![0.0; symbol];
        weights[symbol - 1] = 1.0;
        Self { weights }
    }

    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Weight of branch `symbol` (1-based); 0 beyond the stored prefix.
    pub fn get(&self, symbol: usize) -> f64 {
        symbol.checked_sub(1).and_then(|i| self.weights.get(i)).copied().unwrap_or(0.0)
    }

    /// Branch indices with positive weight, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(i, _)| i + 1).collect()
    }

    pub fn max_symbol(&self) -> usize {
        self.support().last().copied().unwrap_or(0)
    }

    /// Parses a comma list or one weight per line; entries may be fractions
    /// like `1/3`. Sums within 1e-9 of 1 are renormalized.
    pub fn parse(text: &str) -> Result<Self> {
        let weights = text
            .split(|c: char| c == ',' || c == '\n' || c == ';')
            .map(str::trim)
            .filter(|t| !t.is_empty() && !t.starts_with('#'))
            .map(parse_number)
            .collect::<Result<Vec<f64>>>()?;
        if weights.is_empty() {
            return Err(Error::Parse("empty probability vector".into()));
        }
        Self::normalized(weights, PARSE_SUM_TOL).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// One weight per line.
    pub fn to_text(&self) -> String {
        self.weights.iter().map(|w| format!("{w}\n")).collect()
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::param("empty probability vector"));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::param(format!("weight {w} is not a nonnegative number")));
    }
    Ok(())
}

fn parse_number(t: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("cannot read '{t}' as a weight"));
    match t.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| bad())?;
            let d: f64 = den.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            Ok(n / d)
        }
        None => t.parse().map_err(|_| bad()),
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVector::new(v)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.weights
    }
}

impl fmt::Display for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(|w| format!("{w:.6}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rules() {
        assert!(ProbVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::new(vec![1.5, -0.5]).is_err());
        assert!(ProbVector::new(vec![]).is_err());
        assert!(ProbVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn parse_forms() {
        let p = ProbVector::parse("1/3, 1/3, 1/3").unwrap();
        assert_eq!(p.len(), 3);
        assert!((p.get(2) - 1.0 / 3.0).abs() < 1e-16);
        let q = ProbVector::parse("0.25\n0.75\n").unwrap();
        assert_eq!(q.weights(), &[0.25, 0.75]);
        let r = ProbVector::parse("0.5,0.5000000001").unwrap();
        assert!((r.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(ProbVector::parse("0.5,0.6").is_err());
        assert!(ProbVector::parse("a,b").is_err());
        assert!(ProbVector::parse("1/0").is_err());
        assert!(ProbVector::parse("").is_err());
    }

    #[test]
    fn support_and_get() {
        let p = ProbVector::new(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        assert_eq!(p.support(), vec![2, 4]);
        assert_eq!(p.get(9), 0.0);
        assert_eq!(p.get(0), 0.0);
        assert_eq!(p.max_symbol(), 4);
        assert_eq!(ProbVector::point_mass(3).support(), vec![3]);
    }

    #[test]
    fn text_round_trip() {
        let p = ProbVector::new(vec![0.125, 0.375, 0.5]).unwrap();
        assert_eq!(ProbVector::parse(&p.to_text()).unwrap(), p);
    }
}
