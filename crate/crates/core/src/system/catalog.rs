//! Built-in systems: the Gauss map, the Luroth map, finite affine systems and
//! the tangent example with an affine tail.

use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Branch, BranchedSystem, Expansion, ExactMap, Family, Interval, Orientation, TailDescriptor, DEFAULT_PREFIX};
use crate::error::{Error, Result};
use crate::numeric::{self, f64_to_rational, rational, rational_int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogName {
    Gauss,
    Luroth,
    Affine,
    ExampleTangent,
}

impl FromStr for CatalogName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "gauss" => Ok(Self::Gauss),
            "luroth" | "lueroth" => Ok(Self::Luroth),
            "affine" => Ok(Self::Affine),
            "example_tangent" | "tangent" => Ok(Self::ExampleTangent),
            other => Err(Error::param(format!("unknown catalog system '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CatalogParams {
    /// Branch lengths for `affine`, laid out left to right from 0.
    pub lengths: Option<Vec<f64>>,
    /// Orientation for `affine` (default preserving).
    pub orientation: Option<Orientation>,
    /// Number of affine tail branches on `(b, 1)` for `example_tangent`.
    pub tail_branches: Option<usize>,
    /// Explicit prefix length for the countable families.
    pub prefix: Option<usize>,
}

pub fn build_catalog(name: CatalogName, params: &CatalogParams) -> Result<BranchedSystem> {
    let prefix = params.prefix.unwrap_or(DEFAULT_PREFIX);
    match name {
        CatalogName::Gauss => gauss_with_prefix(prefix),
        CatalogName::Luroth => luroth_with_prefix(prefix),
        CatalogName::Affine => {
            let lengths = params
                .lengths
                .as_ref()
                .ok_or_else(|| Error::param("affine system needs 'lengths'"))?;
            affine(lengths, params.orientation.unwrap_or(Orientation::Preserving))
        }
        CatalogName::ExampleTangent => example_tangent(params.tail_branches.unwrap_or(DEFAULT_TAIL_BRANCHES)),
    }
}

/// Gauss map `T(x) = 1/x mod 1` with the default prefix.
pub fn gauss() -> BranchedSystem {
    gauss_with_prefix(DEFAULT_PREFIX).expect("default prefix is valid")
}

pub fn gauss_with_prefix(prefix: usize) -> Result<BranchedSystem> {
    check_prefix(prefix)?;
    Ok(BranchedSystem::family(
        "gauss",
        Family::Gauss,
        prefix,
        Expansion { iterate: 2, factor: 4.0 },
        TailDescriptor { exponent: 2.0, tau_coeff: 1.0, sup_coeff: 1.0 },
    ))
}

/// Luroth map: `I_n = (1/(n+1), 1/n)`, `T_n(x) = n(n+1)x - n`.
pub fn luroth() -> BranchedSystem {
    luroth_with_prefix(DEFAULT_PREFIX).expect("default prefix is valid")
}

pub fn luroth_with_prefix(prefix: usize) -> Result<BranchedSystem> {
    check_prefix(prefix)?;
    Ok(BranchedSystem::family(
        "luroth",
        Family::Luroth,
        prefix,
        Expansion { iterate: 1, factor: 2.0 },
        TailDescriptor { exponent: 2.0, tau_coeff: 1.0, sup_coeff: 1.0 },
    ))
}

fn check_prefix(prefix: usize) -> Result<()> {
    if prefix == 0 || prefix > 1_000_000 {
        return Err(Error::param(format!("prefix {prefix} outside 1..=1000000")));
    }
    Ok(())
}

pub(crate) fn family_branch(family: Family, n: usize) -> Branch {
    let k = n as i64;
    let exact = match family {
        Family::Gauss => ExactMap::Mobius { a: rational_int(-k), b: rational_int(1), c: rational_int(1), d: rational_int(0) },
        Family::Luroth => ExactMap::Affine { lo: rational(1, k + 1), len: rational(1, k * (k + 1)), reversing: false },
    };
    Branch::from_exact(n, exact).expect("family branches are well formed")
}

/// Finite affine system with the given lengths laid out from 0.
pub fn affine(lengths: &[f64], orientation: Orientation) -> Result<BranchedSystem> {
    if lengths.is_empty() {
        return Err(Error::param("affine system needs at least one length"));
    }
    if let Some(l) = lengths.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::param(format!("affine length {l} outside (0,1]")));
    }
    let total: f64 = lengths.iter().sum();
    if total > 1.0 + 1e-12 {
        return Err(Error::param(format!("affine lengths sum to {total} > 1")));
    }
    let mut lo = BigRational::zero();
    let mut branches = Vec::with_capacity(lengths.len());
    for (i, &l) in lengths.iter().enumerate() {
        let len = f64_to_rational(l)?;
        let mut next = &lo + &len;
        if next > BigRational::one() {
            // absorb the rounding slack of the last length
            next = BigRational::one();
        }
        let len = &next - &lo;
        branches.push(Branch::from_exact(
            i + 1,
            ExactMap::Affine { lo: lo.clone(), len, reversing: orientation == Orientation::Reversing },
        )?);
        lo = next;
    }
    let max_len = lengths.iter().cloned().fold(0.0, f64::max);
    let sys = BranchedSystem::from_branches_unchecked("affine", branches, None)?;
    Ok(sys.with_expansion(Expansion { iterate: 1, factor: 1.0 / max_len }))
}

pub const DEFAULT_TAIL_BRANCHES: usize = 4;

/// Right endpoint `b` of the third branch: `8b + tan(b - 3/4) = 7`.
pub fn example_tangent_b() -> f64 {
    numeric::solve_monotone(
        |x| 8.0 * x + (x - 0.75).tan(),
        |x| 8.0 + 1.0 / (x - 0.75).cos().powi(2),
        0.75,
        1.0,
        7.0,
        1e-13,
    )
    .expect("monotone on [3/4, 1]")
}

/// `T_1 = 2x` on `(0,1/2)`, `T_2 = 4x - 2` on `(1/2,3/4)`,
/// `T_3 = 8x + tan(x - 3/4) - 6` on `(3/4, b)`, then `tail_branches`
/// orientation-preserving affine branches on `(b,1)` with lengths halving.
pub fn example_tangent(tail_branches: usize) -> Result<BranchedSystem> {
    if tail_branches == 0 || tail_branches > 60 {
        return Err(Error::param(format!("tail_branches {tail_branches} outside 1..=60")));
    }
    let b = example_tangent_b();
    let mut branches = vec![
        Branch::from_exact(1, ExactMap::Affine { lo: rational(0, 1), len: rational(1, 2), reversing: false })?,
        Branch::from_exact(2, ExactMap::Affine { lo: rational(1, 2), len: rational(1, 4), reversing: false })?,
        Branch::tangent(3, Interval::new(0.75, b)?, 8.0, 0.75, -6.0)?,
    ];
    let b_exact = f64_to_rational(b)?;
    let rest = BigRational::one() - &b_exact;
    // geometric weights 1, 1/2, ..., 2^(1-k) normalized to the remaining length
    let total: BigRational = (0..tail_branches).map(|j| rational(1, 1i64 << j)).sum();
    let mut lo = b_exact;
    for j in 0..tail_branches {
        let len = &rest * rational(1, 1i64 << j) / &total;
        let next = &lo + &len;
        branches.push(Branch::from_exact(4 + j, ExactMap::Affine { lo: lo.clone(), len, reversing: false })?);
        lo = next;
    }
    let sys = BranchedSystem::from_branches("example_tangent", branches, None)?;
    Ok(sys.with_expansion(Expansion { iterate: 1, factor: 2.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_first_domain() {
        let g = gauss();
        let d = g.branch(1).unwrap().domain();
        assert_eq!((d.lo, d.hi), (0.5, 1.0));
    }

    #[test]
    fn tangent_example_third_domain() {
        let t = example_tangent(4).unwrap();
        let d = t.branch(3).unwrap().domain();
        assert_eq!(d.lo, 0.75);
        assert!((d.hi - 0.86108).abs() < 1e-4, "{}", d.hi);
        assert_eq!(t.branch_count(), 7);
        assert!((t.branch(7).unwrap().domain().hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn luroth_slopes() {
        let l = luroth();
        for &x in &[0.34, 0.4, 0.49] {
            assert_eq!(l.branch(2).unwrap().derivative(x), 6.0);
        }
    }

    #[test]
    fn invalid_params() {
        assert!(affine(&[0.5, -0.1], Orientation::Preserving).is_err());
        assert!(affine(&[0.7, 0.7], Orientation::Preserving).is_err());
        assert!(affine(&[], Orientation::Preserving).is_err());
        assert!(example_tangent(0).is_err());
        assert!(gauss_with_prefix(0).is_err());
        assert!("unknown".parse::<CatalogName>().is_err());
        assert!(build_catalog(CatalogName::Affine, &CatalogParams::default()).is_err());
    }

    #[test]
    fn names_parse() {
        assert_eq!("example_tangent".parse::<CatalogName>().unwrap(), CatalogName::ExampleTangent);
        assert_eq!("Luroth".parse::<CatalogName>().unwrap(), CatalogName::Luroth);
    }
}
