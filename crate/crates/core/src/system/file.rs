//! System-definition files (TOML).
//!
//! Either a catalog reference
//!
//! ```toml
//! catalog = "example_tangent"
//! [params]
//! tail_branches = 4
//! ```
//!
//! or an explicit branch list
//!
//! ```toml
//! name = "two-branch"
//! [[branches]]
//! lo = 0.0
//! hi = 0.5
//! kind = "affine"
//! [[branches]]
//! lo = 0.5
//! hi = 1.0
//! kind = "moebius"
//! coeffs = [2.0, -1.0, 0.0, 1.0]   # (a x + b) / (c x + d)
//! ```
//!
//! Affine `coeffs` are `[slope, intercept]` and may be omitted (derived from
//! the endpoints and `orientation`); tangent `coeffs` are
//! `[slope, shift, offset]` for `slope x + tan(x - shift) + offset`.

use std::path::Path;

use serde::Deserialize;

use super::{build_catalog, Branch, BranchedSystem, CatalogName, CatalogParams, ExactMap, Interval, Orientation, TailDescriptor};
use crate::error::{Error, Result};
use crate::numeric::{f64_to_rational, rational_to_f64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Affine,
    #[serde(alias = "mobius")]
    Moebius,
    Tangent,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub lo: f64,
    pub hi: f64,
    pub kind: BranchKind,
    #[serde(default)]
    pub coeffs: Option<Vec<f64>>,
    #[serde(default)]
    pub orientation: Option<Orientation>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub name: Option<String>,
    pub catalog: Option<CatalogName>,
    #[serde(default)]
    pub params: CatalogParams,
    pub branches: Option<Vec<BranchSpec>>,
    pub tail: Option<TailDescriptor>,
}

const MATCH_TOL: f64 = 1e-9;

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Builds the system; with `checked` the partition invariant is enforced.
    pub fn build(&self, checked: bool) -> Result<BranchedSystem> {
        match (&self.catalog, &self.branches) {
            (Some(_), Some(_)) => Err(Error::Parse("give either 'catalog' or 'branches', not both".into())),
            (None, None) => Err(Error::Parse("system file needs 'catalog' or 'branches'".into())),
            (Some(name), None) => build_catalog(*name, &self.params),
            (None, Some(specs)) => {
                let branches = specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| build_branch(i + 1, s))
                    .collect::<Result<Vec<_>>>()?;
                let name = self.name.as_deref().unwrap_or("file");
                if checked {
                    BranchedSystem::from_branches(name, branches, self.tail)
                } else {
                    BranchedSystem::from_branches_unchecked(name, branches, self.tail)
                }
            }
        }
    }
}

/// Loads and validates a system file; partition defects are errors.
pub fn load_system_file(path: impl AsRef<Path>) -> Result<BranchedSystem> {
    SystemFile::read(path)?.build(true)
}

/// Loads a system file without the partition check (for reporting).
pub fn load_system_file_unchecked(path: impl AsRef<Path>) -> Result<BranchedSystem> {
    SystemFile::read(path)?.build(false)
}

fn coeffs<'a>(spec: &'a BranchSpec, n: usize, index: usize) -> Result<&'a [f64]> {
    match &spec.coeffs {
        Some(c) if c.len() == n => Ok(c),
        Some(c) => Err(Error::Parse(format!("branch {index}: expected {n} coeffs, got {}", c.len()))),
        None => Err(Error::Parse(format!("branch {index}: missing coeffs"))),
    }
}

fn build_branch(index: usize, spec: &BranchSpec) -> Result<Branch> {
    let domain = Interval::new(spec.lo, spec.hi).map_err(|e| Error::Parse(format!("branch {index}: {e}")))?;
    let branch = match spec.kind {
        BranchKind::Affine => {
            let reversing = match (&spec.coeffs, spec.orientation) {
                (Some(_), _) => {
                    let c = coeffs(spec, 2, index)?;
                    let (y0, y1) = (c[0] * spec.lo + c[1], c[0] * spec.hi + c[1]);
                    let ok = if c[0] > 0.0 {
                        y0.abs() < MATCH_TOL && (y1 - 1.0).abs() < MATCH_TOL
                    } else {
                        (y0 - 1.0).abs() < MATCH_TOL && y1.abs() < MATCH_TOL
                    };
                    if !ok {
                        return Err(Error::Parse(format!("branch {index}: affine map does not send ({}, {}) onto (0,1)", spec.lo, spec.hi)));
                    }
                    c[0] < 0.0
                }
                (None, o) => o == Some(Orientation::Reversing),
            };
            let lo = f64_to_rational(spec.lo)?;
            let len = f64_to_rational(spec.hi)? - &lo;
            Branch::from_exact(index, ExactMap::Affine { lo, len, reversing })?
        }
        BranchKind::Moebius => {
            let c = coeffs(spec, 4, index)?;
            let exact = ExactMap::Mobius {
                a: f64_to_rational(c[0])?,
                b: f64_to_rational(c[1])?,
                c: f64_to_rational(c[2])?,
                d: f64_to_rational(c[3])?,
            };
            let b = Branch::from_exact(index, exact)?;
            let (lo, hi) = b.exact_domain().map(|(l, h)| (rational_to_f64(l), rational_to_f64(h))).expect("exact branch");
            if (lo - spec.lo).abs() > MATCH_TOL || (hi - spec.hi).abs() > MATCH_TOL {
                return Err(Error::Parse(format!(
                    "branch {index}: Mobius map has domain ({lo}, {hi}), file says ({}, {})",
                    spec.lo, spec.hi
                )));
            }
            b
        }
        BranchKind::Tangent => {
            let c = coeffs(spec, 3, index)?;
            Branch::tangent(index, domain, c[0], c[1], c[2]).map_err(|e| Error::Parse(e.to_string()))?
        }
    };
    Ok(branch)
}
