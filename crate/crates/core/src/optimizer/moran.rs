use crate::error::{Error, Result};
use crate::numeric::bisect;

/// The `s` in `[0, 1]` with `sum l_i^s = 1`, to `1e-12`.
///
/// For an affine system restricted to branches with these lengths the
/// maximal Bernoulli dimension is `s`, attained at `p_i = l_i^s`.
pub fn moran_root(lengths: &[f64]) -> Result<f64> {
    if lengths.is_empty() {
        return Err(Error::param("no lengths"));
    }
    if let Some(&l) = lengths.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::param(format!("length {l} outside (0, 1]")));
    }
    let total: f64 = lengths.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::param(format!("lengths sum to {total} > 1")));
    }
    if lengths.len() == 1 {
        return Ok(0.0);
    }
    if (total - 1.0).abs() <= 1e-12 {
        return Ok(1.0);
    }
    bisect(|s| lengths.iter().map(|l| l.powf(s)).sum::<f64>() - 1.0, 0.0, 1.0, 1e-12)
}

/// Weights `l_i^s` at the Moran root.
pub fn moran_weights(lengths: &[f64]) -> Result<Vec<f64>> {
    let s = moran_root(lengths)?;
    let w: Vec<f64> = lengths.iter().map(|l| l.powf(s)).collect();
    let sum: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / sum).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert!((moran_root(&[0.5, 1.0 / 6.0]).unwrap() - 0.6009668516).abs() < 1e-9);
        assert_eq!(moran_root(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(moran_root(&[0.5]).unwrap(), 0.0);
        assert!(moran_root(&[0.7, 0.5]).is_err());
        assert!(moran_root(&[]).is_err());
        let w = moran_weights(&[0.5, 1.0 / 6.0]).unwrap();
        assert!((w[0] - 0.6593119559).abs() < 1e-8);
    }
}
