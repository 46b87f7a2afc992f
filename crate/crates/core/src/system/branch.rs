use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Interval;
use crate::error::{Error, Result};
use crate::numeric::{self, rational_to_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// Monotonicity of the signed derivative `T'` on a branch domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
}

/// Floating-point form of a branch map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchMap {
    /// `T(x) = (x - lo) / len`, or `(lo + len - x) / len` when reversing.
    Affine { lo: f64, len: f64, slope: f64, reversing: bool },
    /// `T(x) = (a x + b) / (c x + d)`.
    Mobius { a: f64, b: f64, c: f64, d: f64 },
    /// `T(x) = slope * x + tan(x - shift) + offset`.
    Tangent { slope: f64, shift: f64, offset: f64 },
}

/// Exact rational form, available for affine and Mobius branches.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactMap {
    Affine { lo: BigRational, len: BigRational, reversing: bool },
    Mobius { a: BigRational, b: BigRational, c: BigRational, d: BigRational },
}

impl ExactMap {
    /// Exact inverse branch `phi(y)`.
    pub fn inverse(&self, y: &BigRational) -> BigRational {
        match self {
            ExactMap::Affine { lo, len, reversing } => {
                if *reversing {
                    lo + len * (BigRational::one() - y)
                } else {
                    lo + len * y
                }
            }
            ExactMap::Mobius { a, b, c, d } => (d * y - b) / (a - c * y),
        }
    }

    /// Exact `|T'(x)|`.
    pub fn abs_derivative(&self, x: &BigRational) -> BigRational {
        match self {
            ExactMap::Affine { len, .. } => len.recip(),
            ExactMap::Mobius { a, b, c, d } => {
                let det = a * d - b * c;
                let den = c * x + d;
                (det / (&den * &den)).abs()
            }
        }
    }

    fn to_float(&self) -> BranchMap {
        match self {
            ExactMap::Affine { lo, len, reversing } => BranchMap::Affine {
                lo: rational_to_f64(lo),
                len: rational_to_f64(len),
                slope: rational_to_f64(&len.recip()),
                reversing: *reversing,
            },
            ExactMap::Mobius { a, b, c, d } => BranchMap::Mobius {
                a: rational_to_f64(a),
                b: rational_to_f64(b),
                c: rational_to_f64(c),
                d: rational_to_f64(d),
            },
        }
    }
}

/// One branch `T_n: I_n -> (0,1)` of a branched system.
#[derive(Debug, Clone)]
pub struct Branch {
    index: usize,
    domain: Interval,
    map: BranchMap,
    exact: Option<Arc<ExactMap>>,
    exact_domain: Option<Arc<(BigRational, BigRational)>>,
}

impl Branch {
    /// Branch from an exact map; the domain is `phi((0,1))`, computed exactly.
    pub fn from_exact(index: usize, exact: ExactMap) -> Result<Self> {
        if let ExactMap::Affine { len, .. } = &exact {
            if !len.is_positive() {
                return Err(Error::param(format!("branch {index}: nonpositive length")));
            }
        }
        if let ExactMap::Mobius { a, b, c, d } = &exact {
            if (a * d - b * c).is_zero() {
                return Err(Error::param(format!("branch {index}: degenerate Mobius map")));
            }
            // the pole -d/c must stay off [0,1] in the image variable
            let at0 = a.clone();
            let at1 = a - c;
            if at0.is_zero() || at1.is_zero() || at0.is_positive() != at1.is_positive() {
                return Err(Error::param(format!(
                    "branch {index}: inverse Mobius map has a pole on [0,1]"
                )));
            }
        }
        let e0 = exact.inverse(&BigRational::zero());
        let e1 = exact.inverse(&BigRational::one());
        let (lo, hi) = if e0 < e1 { (e0, e1) } else { (e1, e0) };
        let domain = Interval::new(rational_to_f64(&lo), rational_to_f64(&hi))
            .map_err(|e| Error::param(format!("branch {index}: {e}")))?;
        Ok(Self {
            index,
            domain,
            map: exact.to_float(),
            exact: Some(Arc::new(exact)),
            exact_domain: Some(Arc::new((lo, hi))),
        })
    }

    /// Branch `T(x) = slope x + tan(x - shift) + offset` on `domain`.
    pub fn tangent(index: usize, domain: Interval, slope: f64, shift: f64, offset: f64) -> Result<Self> {
        let b = Self {
            index,
            domain,
            map: BranchMap::Tangent { slope, shift, offset },
            exact: None,
            exact_domain: None,
        };
        let (y0, y1) = (b.forward(domain.lo), b.forward(domain.hi));
        let (m0, m1) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
        if m0.abs() > 1e-9 || (m1 - 1.0).abs() > 1e-9 {
            return Err(Error::param(format!(
                "tangent branch {index} maps its domain onto ({m0}, {m1}), not (0,1)"
            )));
        }
        Ok(b)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub(crate) fn with_index(mut self, index: usize) -> Self {
        self.index = index;
        self
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn map(&self) -> &BranchMap {
        &self.map
    }

    pub fn exact(&self) -> Option<&ExactMap> {
        self.exact.as_deref()
    }

    pub fn exact_domain(&self) -> Option<(&BigRational, &BigRational)> {
        self.exact_domain.as_deref().map(|(a, b)| (a, b))
    }

    pub fn forward(&self, x: f64) -> f64 {
        match self.map {
            BranchMap::Affine { lo, len, reversing, .. } => {
                if reversing {
                    (lo + len - x) / len
                } else {
                    (x - lo) / len
                }
            }
            BranchMap::Mobius { a, b, c, d } => (a * x + b) / (c * x + d),
            BranchMap::Tangent { slope, shift, offset } => slope * x + (x - shift).tan() + offset,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self.map {
            BranchMap::Affine { slope, reversing, .. } => {
                if reversing {
                    -slope
                } else {
                    slope
                }
            }
            BranchMap::Mobius { a, b, c, d } => {
                let den = c * x + d;
                (a * d - b * c) / (den * den)
            }
            BranchMap::Tangent { slope, shift, .. } => {
                let cs = (x - shift).cos();
                slope + 1.0 / (cs * cs)
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self.map {
            BranchMap::Affine { .. } => 0.0,
            BranchMap::Mobius { a, b, c, d } => {
                let den = c * x + d;
                -2.0 * c * (a * d - b * c) / (den * den * den)
            }
            BranchMap::Tangent { shift, .. } => {
                let u = x - shift;
                let cs = u.cos();
                2.0 * u.tan() / (cs * cs)
            }
        }
    }

    /// Inverse branch `phi_n: (0,1) -> I_n`, extended to the closure.
    pub fn inverse(&self, y: f64) -> f64 {
        match self.map {
            BranchMap::Affine { lo, len, reversing, .. } => {
                if reversing {
                    lo + len * (1.0 - y)
                } else {
                    lo + len * y
                }
            }
            BranchMap::Mobius { a, b, c, d } => (d * y - b) / (a - c * y),
            BranchMap::Tangent { .. } => {
                let (lo, hi) = (self.domain.lo, self.domain.hi);
                let y = y.clamp(0.0, 1.0);
                let preserving = self.orientation() == Orientation::Preserving;
                if y == 0.0 {
                    return if preserving { lo } else { hi };
                }
                if y == 1.0 {
                    return if preserving { hi } else { lo };
                }
                numeric::solve_monotone(|x| self.forward(x), |x| self.derivative(x), lo, hi, y, 1e-12)
                    .unwrap_or_else(|_| {
                        // f64 endpoint images can miss (0,1) by an ulp; bisect on the clamped target
                        numeric::bisect(
                            |x| (self.forward(x) - y) * if preserving { 1.0 } else { -1.0 },
                            lo,
                            hi,
                            1e-15,
                        )
                        .unwrap_or(if preserving { lo } else { hi })
                    })
            }
        }
    }

    pub fn orientation(&self) -> Orientation {
        let positive = match self.map {
            BranchMap::Affine { reversing, .. } => !reversing,
            BranchMap::Mobius { a, b, c, d } => a * d - b * c > 0.0,
            BranchMap::Tangent { .. } => self.derivative(self.domain.midpoint()) > 0.0,
        };
        if positive {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }

    /// Monotonicity of the signed derivative on the domain.
    pub fn derivative_monotone(&self) -> Monotonicity {
        let s = match self.map {
            BranchMap::Affine { .. } => 0.0,
            _ => self.second_derivative(self.domain.midpoint()),
        };
        if s > 0.0 {
            Monotonicity::Increasing
        } else if s < 0.0 {
            Monotonicity::Decreasing
        } else {
            Monotonicity::Constant
        }
    }

    /// `|T'|` at the two closure endpoints of the domain, exact when possible.
    pub fn endpoint_abs_derivatives(&self) -> (f64, f64) {
        match (self.exact(), self.exact_domain()) {
            (Some(map), Some((lo, hi))) => (
                rational_to_f64(&map.abs_derivative(lo)),
                rational_to_f64(&map.abs_derivative(hi)),
            ),
            _ => (self.derivative(self.domain.lo).abs(), self.derivative(self.domain.hi).abs()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{rational, rational_int};

    fn gauss_branch(n: i64) -> Branch {
        Branch::from_exact(
            n as usize,
            ExactMap::Mobius { a: rational_int(-n), b: rational_int(1), c: rational_int(1), d: rational_int(0) },
        )
        .unwrap()
    }

    #[test]
    fn gauss_branch_domain_and_maps() {
        let b = gauss_branch(3);
        assert_eq!(b.domain().lo, 0.25);
        assert!((b.domain().hi - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(b.orientation(), Orientation::Reversing);
        assert_eq!(b.derivative_monotone(), Monotonicity::Increasing);
        for &x in &[0.26, 0.3, 0.33] {
            assert!((b.inverse(b.forward(x)) - x).abs() < 1e-14);
            assert!((b.derivative(x) + 1.0 / (x * x)).abs() < 1e-9);
        }
        assert_eq!(b.endpoint_abs_derivatives(), (16.0, 9.0));
    }

    #[test]
    fn affine_exact_branch() {
        let b = Branch::from_exact(
            2,
            ExactMap::Affine { lo: rational(1, 3), len: rational(1, 6), reversing: false },
        )
        .unwrap();
        assert_eq!(b.derivative(0.4), 6.0);
        assert!((b.forward(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(b.endpoint_abs_derivatives(), (6.0, 6.0));
    }

    #[test]
    fn degenerate_maps_rejected() {
        let zero = ExactMap::Affine { lo: rational(0, 1), len: rational(0, 1), reversing: false };
        assert!(Branch::from_exact(1, zero).is_err());
        let pole = ExactMap::Mobius { a: rational_int(1), b: rational_int(0), c: rational_int(2), d: rational_int(1) };
        assert!(Branch::from_exact(1, pole).is_err());
    }

    #[test]
    fn tangent_inverse_round_trip() {
        let b_hi = numeric::solve_monotone(|x| 8.0 * x + (x - 0.75).tan(), |x| 8.0 + 1.0 / (x - 0.75).cos().powi(2), 0.75, 1.0, 7.0, 1e-14).unwrap();
        let b = Branch::tangent(3, Interval::new(0.75, b_hi).unwrap(), 8.0, 0.75, -6.0).unwrap();
        for i in 1..20 {
            let x = 0.75 + (b_hi - 0.75) * i as f64 / 20.0;
            assert!((b.inverse(b.forward(x)) - x).abs() < 1e-12);
        }
        assert_eq!(b.derivative_monotone(), Monotonicity::Increasing);
        assert_eq!(b.orientation(), Orientation::Preserving);
    }
}
