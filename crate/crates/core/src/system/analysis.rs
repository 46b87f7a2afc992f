//! Derivative extremes per branch, the preimage sum `K_T(s)` and the critical
//! exponent `s_0`.

use serde::Serialize;

use super::{BranchedSystem, Interval};
use crate::error::{Error, Result};
use crate::measures::ValueBracket;
use crate::numeric::{rational_to_f64, OutwardSum};

pub const DEFAULT_KT_GRID: usize = 1000;

/// Partial sums above this are treated as divergent.
const OVERFLOW_THRESHOLD: f64 = 1e250;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum S0Method {
    /// Finitely many branches: every `sum |I_n|^s` converges.
    Finite,
    /// Power-law fit of `log |I_n|` against `log n` over the prefix.
    PowerLawFit,
    /// Exponent taken from the tail descriptor.
    TailDescriptor,
}

/// Enclosure of `s_0 = inf { s : sum |I_n|^s < inf }` with fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S0Estimate {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub method: S0Method,
    /// Fitted slope of `log |I_n|` against `log n`.
    pub slope: Option<f64>,
    pub rms_residual: f64,
    /// Disagreement between fits on the two halves of the window.
    pub drift: f64,
}

impl S0Estimate {
    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s <= self.hi
    }

    pub fn interval(&self) -> Result<Interval> {
        Interval::new(self.lo.max(0.0), self.hi.min(1.0))
    }
}

impl BranchedSystem {
    /// `tau_n = inf |T'|` over `I_n`, the smaller endpoint limit.
    pub fn tau(&self, n: usize) -> Result<f64> {
        let (a, b) = self.branch(n)?.endpoint_abs_derivatives();
        Ok(a.min(b))
    }

    /// `sup |T'|` over `I_n`, the larger endpoint limit.
    pub fn sup_deriv(&self, n: usize) -> Result<f64> {
        let (a, b) = self.branch(n)?.endpoint_abs_derivatives();
        Ok(a.max(b))
    }

    /// Bracket on `K_T(s) = sup_x sum_{T y = x} |T'(y)|^{-s}`.
    ///
    /// The lower end is the best grid value; the upper end bounds every cell
    /// between grid points using that each term is monotone in `x`. The
    /// branches past the prefix contribute integral bounds from the tail
    /// descriptor.
    pub fn k_t(&self, s: f64, grid_size: usize) -> Result<ValueBracket> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::param(format!("s = {s} outside (0,1)")));
        }
        if grid_size == 0 {
            return Err(Error::param("grid_size must be positive"));
        }
        let n_branches = self.branch_count();
        let (tail_lo, tail_hi) = match self.tail {
            None => (0.0, 0.0),
            Some(t) => {
                let q = t.exponent * s;
                if q <= 1.0 {
                    return Err(Error::Divergence { s });
                }
                let n = n_branches as f64;
                let hi = t.tau_coeff.powf(-s) * n.powf(1.0 - q) / (q - 1.0);
                let lo = t.sup_coeff.powf(-s) * (n + 2.0).powf(1.0 - q) / (q - 1.0);
                (lo.next_down(), hi.next_up())
            }
        };

        let xs: Vec<f64> = (0..=grid_size).map(|i| i as f64 / grid_size as f64).collect();
        let mut at_points = vec![OutwardSum::new(); xs.len()];
        let mut cells = vec![OutwardSum::new(); grid_size];
        let mut terms = vec![0.0; xs.len()];
        for n in 1..=n_branches {
            let b = self.branch(n)?;
            for (t, &x) in terms.iter_mut().zip(&xs) {
                *t = b.derivative(b.inverse(x)).abs().powf(-s);
            }
            for (acc, &t) in at_points.iter_mut().zip(&terms) {
                acc.add(t, t);
            }
            for (i, acc) in cells.iter_mut().enumerate() {
                let m = terms[i].max(terms[i + 1]);
                acc.add(m, m);
            }
        }
        let lo = at_points.iter().map(|a| a.lo).fold(f64::NEG_INFINITY, f64::max) + tail_lo;
        let hi = cells.iter().map(|a| a.hi).fold(f64::NEG_INFINITY, f64::max) + tail_hi;
        if !hi.is_finite() || hi > OVERFLOW_THRESHOLD {
            return Err(Error::Divergence { s });
        }
        Ok(ValueBracket::new(lo.next_down(), hi.next_up(), 1))
    }

    /// Enclosure of `s_0` of width at most `tol`.
    pub fn s0_estimate(&self, tol: f64) -> Result<S0Estimate> {
        if !(tol > 0.0) {
            return Err(Error::param("tolerance must be positive"));
        }
        let Some(tail) = self.tail else {
            return Ok(S0Estimate {
                lo: 0.0,
                hi: tol.min(1.0),
                estimate: 0.0,
                method: S0Method::Finite,
                slope: None,
                rms_residual: 0.0,
                drift: 0.0,
            });
        };
        let from_tail = 1.0 / tail.exponent;
        let n = self.branch_count();
        if n < 100 {
            return Ok(S0Estimate {
                lo: from_tail - tol / 2.0,
                hi: from_tail + tol / 2.0,
                estimate: from_tail,
                method: S0Method::TailDescriptor,
                slope: None,
                rms_residual: 0.0,
                drift: 0.0,
            });
        }

        // upper half of the prefix, at most ~2000 log-spaced indices
        let start = n / 2;
        let count = (n - start + 1).min(2000);
        let mut idx: Vec<usize> = (0..count)
            .map(|i| {
                let f = i as f64 / (count - 1).max(1) as f64;
                ((start as f64).ln() + f * ((n as f64).ln() - (start as f64).ln())).exp().round() as usize
            })
            .map(|k| k.clamp(start, n))
            .collect();
        idx.dedup();
        let mut points = Vec::with_capacity(idx.len());
        for &k in &idx {
            let b = self.branch(k)?;
            let len = match b.exact_domain() {
                Some((lo, hi)) => rational_to_f64(&(hi - lo)),
                None => b.domain().width(),
            };
            points.push(((k as f64).ln(), len.ln()));
        }
        let (slope, rms) = fit_line(&points);
        let half = points.len() / 2;
        let (s1, _) = fit_line(&points[..half]);
        let (s2, _) = fit_line(&points[half..]);
        if !(slope < 0.0) {
            return Err(Error::Inconclusive(format!("lengths do not decay (slope {slope})")));
        }
        let estimate = -1.0 / slope;
        let drift = (-1.0 / s1 + 1.0 / s2).abs();
        if rms > 0.05 {
            return Err(Error::Inconclusive(format!(
                "tail is not a power law: rms residual {rms:.3e}, slope {slope:.4}, drift {drift:.3e}"
            )));
        }
        let half_width = (2.0 * drift + 10.0 * rms).max(tol / 4.0);
        let mut lo = estimate - half_width;
        let mut hi = estimate + half_width;
        lo = lo.min(from_tail);
        hi = hi.max(from_tail);
        if hi - lo > tol {
            return Err(Error::Inconclusive(format!(
                "s0 enclosure [{lo:.5}, {hi:.5}] wider than {tol}: fit estimate {estimate:.5}, \
                 tail descriptor {from_tail:.5}, rms residual {rms:.3e}, drift {drift:.3e}"
            )));
        }
        Ok(S0Estimate { lo, hi, estimate, method: S0Method::PowerLawFit, slope: Some(slope), rms_residual: rms, drift })
    }
}

/// Least-squares line through `(x, y)`; returns (slope, rms residual).
fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rss: f64 = points.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::catalog;
    use crate::system::Orientation;

    #[test]
    fn tau_and_sup() {
        let g = catalog::gauss();
        assert_eq!(g.tau(2).unwrap(), 4.0);
        assert_eq!(g.tau(1).unwrap(), 1.0);
        assert_eq!(g.sup_deriv(1).unwrap(), 4.0);
        assert_eq!(g.sup_deriv(2).unwrap(), 9.0);
        let l = catalog::luroth();
        assert_eq!(l.tau(3).unwrap(), 12.0);
        assert_eq!(l.sup_deriv(1).unwrap(), 2.0);
        for n in 1..=50 {
            assert_eq!(g.tau(n).unwrap(), (n * n) as f64);
        }
        assert!(g.tau(0).is_err());
    }

    #[test]
    fn kt_diverges_below_half_for_gauss() {
        let g = catalog::gauss();
        assert_eq!(g.k_t(0.4, 100), Err(Error::Divergence { s: 0.4 }));
        assert_eq!(g.k_t(0.5, 100), Err(Error::Divergence { s: 0.5 }));
        assert!(g.k_t(1.2, 100).is_err());
    }

    #[test]
    fn kt_finite_system() {
        // two branches of slope 2: K_T(s) = 2 * 2^-s for every x
        let a = catalog::affine(&[0.5, 0.5], Orientation::Preserving).unwrap();
        let k = a.k_t(0.5, 10).unwrap();
        let exact = 2.0 * 2f64.powf(-0.5);
        assert!(k.lo <= exact && exact <= k.hi && k.width() < 1e-12);
    }

    #[test]
    fn s0_for_finite_and_gauss() {
        let a = catalog::affine(&[0.5, 0.5], Orientation::Preserving).unwrap();
        assert!(a.s0_estimate(0.02).unwrap().contains(0.0));
        let g = catalog::gauss();
        let e = g.s0_estimate(0.02).unwrap();
        assert!(e.contains(0.5) && e.hi - e.lo <= 0.02, "{e:?}");
        assert_eq!(e.method, S0Method::PowerLawFit);
        let short = catalog::gauss_with_prefix(50).unwrap().s0_estimate(0.02).unwrap();
        assert_eq!(short.method, S0Method::TailDescriptor);
    }

    #[test]
    fn line_fit() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let (slope, rms) = fit_line(&pts);
        assert!((slope + 2.0).abs() < 1e-12 && rms < 1e-12);
    }
}
