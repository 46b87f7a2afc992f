//! Small numerical kernels shared across modules: outward-rounded
//! accumulation, a safeguarded Newton/bisection solver and exact-rational
//! conversions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Running `[lo, hi]` sum that moves `lo` down and `hi` up by one ulp per
/// accumulation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutwardSum {
    pub lo: f64,
    pub hi: f64,
}

impl Default for OutwardSum {
    fn default() -> Self {
        Self::new()
    }
}

impl OutwardSum {
    pub const fn new() -> Self {
        Self { lo: 0.0, hi: 0.0 }
    }

    pub fn add(&mut self, lo: f64, hi: f64) {
        self.lo = (self.lo + lo).next_down();
        self.hi = (self.hi + hi).next_up();
    }

    /// Adds `weight * [lo, hi]` for a nonnegative weight.
    pub fn add_weighted(&mut self, weight: f64, lo: f64, hi: f64) {
        debug_assert!(weight >= 0.0);
        self.add((weight * lo).next_down(), (weight * hi).next_up());
    }
}

/// Solves `f(x) = target` for `x` in `[lo, hi]` where `f` is strictly
/// monotone, using Newton steps guarded by bisection.
///
/// Iterates until the residual is below `tol` and the step has collapsed to a
/// few ulps, or until the bracket cannot shrink further.
pub fn solve_monotone<F, D>(f: F, df: D, lo: f64, hi: f64, target: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let g = |x: f64| f(x) - target;
    let (mut a, mut b) = (lo, hi);
    let (ga, gb) = (g(a), g(b));
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::RootSolve(format!(
            "no sign change on [{lo}, {hi}] for target {target}"
        )));
    }
    // orient so that g(a) < 0 < g(b)
    let increasing = ga < 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if (gx < 0.0) == increasing {
            a = x;
        } else {
            b = x;
        }
        let d = df(x);
        let newton = x - gx / d;
        let (left, right) = if a < b { (a, b) } else { (b, a) };
        let next = if d.is_finite() && d != 0.0 && newton > left && newton < right {
            newton
        } else {
            0.5 * (a + b)
        };
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) || (right - left) <= 2.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    let res = g(x).abs();
    if res > tol {
        return Err(Error::RootSolve(format!(
            "residual {res:e} above tolerance {tol:e} at x = {x}"
        )));
    }
    Ok(x)
}

/// Bisection for a continuous `f` with a sign change on `[lo, hi]`, to an
/// absolute bracket width of `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::RootSolve(format!("no sign change on [{lo}, {hi}]")));
    }
    let lo_negative = flo < 0.0;
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Nearest `f64` to a big rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational value of a finite `f64`.
pub fn f64_to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::param(format!("non-finite value {x}")))
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `ln(r)` for a positive rational, accurate also when `r` is close to 1.
pub fn ln_rational(r: &BigRational) -> f64 {
    debug_assert!(r.is_positive());
    let delta = r - BigRational::one();
    if delta.abs() < rational(1, 4) {
        rational_to_f64(&delta).ln_1p()
    } else if delta.is_zero() {
        0.0
    } else {
        // split numerator and denominator to avoid overflow of huge integers
        ln_bigint(r.numer()) - ln_bigint(r.denom())
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_bisection_solves_cubic() {
        let x = solve_monotone(|x| x * x * x, |x| 3.0 * x * x, 0.0, 2.0, 2.0, 1e-12).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn decreasing_map_is_handled() {
        let x = solve_monotone(|x| 1.0 / x, |x| -1.0 / (x * x), 0.2, 1.0, 3.0, 1e-12).unwrap();
        assert!((x - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        assert!(solve_monotone(|x| x, |_| 1.0, 0.0, 1.0, 5.0, 1e-12).is_err());
        assert!(bisect(|x| x + 1.0, 0.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn outward_sum_brackets_exact_value() {
        let mut s = OutwardSum::new();
        for _ in 0..10 {
            s.add(0.1, 0.1);
        }
        assert!(s.lo < 1.0 && s.hi > 1.0);
        assert!(s.hi - s.lo < 1e-14);
    }

    #[test]
    fn ln_of_rationals() {
        assert!((ln_rational(&rational(21, 20)) - (21.0f64 / 20.0).ln()).abs() < 1e-16);
        assert!((ln_rational(&rational(9, 1)) - 9f64.ln()).abs() < 1e-15);
        let huge = BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2000usize);
        assert!((ln_rational(&huge) - 3f64.ln()).abs() < 1e-12);
    }
}
