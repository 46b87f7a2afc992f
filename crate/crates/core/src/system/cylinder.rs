use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Branch, BranchedSystem, Interval, Word};
use crate::error::Result;
use crate::numeric::rational_to_f64;

/// Longest word for which cylinder endpoints are composed in exact rationals.
pub const EXACT_WORD_LIMIT: usize = 12;

pub(crate) fn exact(sys: &BranchedSystem, word: &Word) -> Result<Option<(BigRational, BigRational)>> {
    sys.check_word(word)?;
    if word.len() > EXACT_WORD_LIMIT {
        return Ok(None);
    }
    let branches = sys.branches_for(word.symbols())?;
    if branches.iter().any(|b| b.exact().is_none()) {
        return Ok(None);
    }
    let (mut y0, mut y1) = (BigRational::zero(), BigRational::one());
    for b in branches.iter().rev() {
        let map = b.exact().expect("checked above");
        y0 = map.inverse(&y0);
        y1 = map.inverse(&y1);
    }
    Ok(Some(if y0 < y1 { (y0, y1) } else { (y1, y0) }))
}

/// Closure endpoints of `phi_{b_1} o ... o phi_{b_k}((0,1))` in floating point.
pub(crate) fn float_endpoints(branches: &[&Branch]) -> (f64, f64) {
    let (mut y0, mut y1) = (0.0, 1.0);
    for b in branches.iter().rev() {
        y0 = b.inverse(y0);
        y1 = b.inverse(y1);
    }
    if y0 < y1 {
        (y0, y1)
    } else {
        (y1, y0)
    }
}

/// Floating endpoints of every suffix cylinder `I_{w_i..w_k}`, `i = 1..=k`,
/// written into `out[i-1]`.
pub(crate) fn suffix_endpoints(branches: &[&Branch], out: &mut Vec<(f64, f64)>) {
    out.clear();
    out.resize(branches.len(), (0.0, 0.0));
    let (mut y0, mut y1) = (0.0, 1.0);
    for (i, b) in branches.iter().enumerate().rev() {
        y0 = b.inverse(y0);
        y1 = b.inverse(y1);
        out[i] = if y0 < y1 { (y0, y1) } else { (y1, y0) };
    }
}

impl BranchedSystem {
    /// The cylinder `I_{a_1..a_n} = phi_{a_1} o ... o phi_{a_n}((0,1))`.
    ///
    /// Endpoints are exact rationals rounded to nearest when every branch is
    /// affine or Mobius and the word has at most [`EXACT_WORD_LIMIT`] symbols.
    pub fn cylinder_interval(&self, word: &Word) -> Result<Interval> {
        let (lo, hi) = match self.cylinder_exact(word)? {
            Some((lo, hi)) => {
                let (mut a, mut b) = (rational_to_f64(&lo), rational_to_f64(&hi));
                if a >= b {
                    // collapsed below f64 resolution
                    a = a.next_down().max(0.0);
                    b = b.next_up().min(1.0);
                }
                (a, b)
            }
            None => {
                let branches = self.branches_for(word.symbols())?;
                float_endpoints(&branches.iter().collect::<Vec<_>>())
            }
        };
        let (lo, hi) = if lo < hi { (lo, hi) } else { (lo.next_down().max(0.0), hi.next_up().min(1.0)) };
        Interval::new(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;
    use crate::system::catalog;

    fn w(s: &[usize]) -> Word {
        Word::new(s.to_vec()).unwrap()
    }

    #[test]
    fn gauss_cylinders() {
        let g = catalog::gauss();
        let (lo, hi) = g.cylinder_exact(&w(&[1, 2])).unwrap().unwrap();
        assert_eq!((lo, hi), (rational(2, 3), rational(3, 4)));
        let i = g.cylinder_interval(&w(&[1])).unwrap();
        assert_eq!((i.lo, i.hi), (0.5, 1.0));
    }

    #[test]
    fn tangent_cylinder_is_float() {
        let t = catalog::example_tangent(4).unwrap();
        assert!(t.cylinder_exact(&w(&[3])).unwrap().is_none());
        let i = t.cylinder_interval(&w(&[3])).unwrap();
        assert_eq!(i.lo, 0.75);
        assert!((i.hi - 0.86106).abs() < 1e-4);
    }

    #[test]
    fn invalid_symbol() {
        let t = catalog::example_tangent(4).unwrap();
        assert!(t.cylinder_interval(&w(&[8])).is_err());
    }

    #[test]
    fn long_words_fall_back_to_float() {
        let g = catalog::gauss();
        let word = w(&[1; 14]);
        assert!(g.cylinder_exact(&word).unwrap().is_none());
        let i = g.cylinder_interval(&word).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(i.contains_closed(golden, 1e-12));
    }
}
