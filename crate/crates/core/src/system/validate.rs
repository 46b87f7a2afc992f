//! Numerical spot checks of the standing hypotheses on a branched system:
//! partition, monotone derivative, the orientation-reversing condition,
//! uniform expansion of an iterate, the Renyi condition and summability.

use std::fmt;

use serde::Serialize;

use super::{Branch, BranchedSystem, Expansion, S0Estimate};
use crate::error::Error;

const ENDPOINT_TOL: f64 = 1e-12;
const MAX_ITERATE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Partition,
    BranchMaps,
    MonotoneDerivative,
    OrientationReversing,
    UniformExpansion,
    Renyi,
    Summability,
}

impl Condition {
    pub fn label(&self) -> &'static str {
        match self {
            Condition::Partition => "partition",
            Condition::BranchMaps => "branch bijections",
            Condition::MonotoneDerivative => "(1) monotone derivative",
            Condition::OrientationReversing => "(2) orientation reversing",
            Condition::UniformExpansion => "(3) uniformly expanding iterate",
            Condition::Renyi => "(4) Renyi condition",
            Condition::Summability => "(5) summability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub system: String,
    pub samples: usize,
    pub checks: Vec<ConditionCheck>,
    pub s0: Option<S0Estimate>,
    pub expansion: Option<Expansion>,
    pub kappa: Option<f64>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, condition: Condition) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.condition == condition)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system: {} ({} samples per branch)", self.system, self.samples)?;
        for c in &self.checks {
            write!(f, "  [{}] {:<32} {}", if c.passed { "pass" } else { "FAIL" }, c.condition.label(), c.detail)?;
            if let Some(w) = c.witness {
                write!(f, " (witness x = {w})")?;
            }
            writeln!(f)?;
        }
        if let Some(s0) = &self.s0 {
            writeln!(f, "  s0 in [{:.6}, {:.6}] (estimate {:.6})", s0.lo, s0.hi, s0.estimate)?;
        }
        Ok(())
    }
}

impl BranchedSystem {
    /// Spot-checks the standing hypotheses on `samples` points per branch.
    /// Failures are report entries, never errors.
    pub fn validate(&self, samples: usize) -> ValidationReport {
        let samples = samples.max(3);
        let indices = checked_indices(self.branch_count());
        let branches: Vec<Branch> = indices.iter().filter_map(|&n| self.branch(n).ok()).collect();
        let mut checks = Vec::new();

        checks.push(match partition_defect(self) {
            None => ConditionCheck {
                condition: Condition::Partition,
                passed: true,
                detail: format!("{} domains tile (0,1){}", self.branch_count(), if self.is_countable() { " up to the tail" } else { "" }),
                witness: None,
            },
            Some(Error::Partition { witness, reason }) => {
                ConditionCheck { condition: Condition::Partition, passed: false, detail: reason, witness: Some(witness) }
            }
            Some(other) => ConditionCheck { condition: Condition::Partition, passed: false, detail: other.to_string(), witness: None },
        });
        checks.push(check_branch_maps(self, &branches, samples));
        let (monotone, direction) = check_monotone_derivative(&branches, samples);
        checks.push(monotone);
        checks.push(check_orientation_reversing(self, &branches, samples, direction));

        let expansion = estimate_expansion(self, 4000);
        checks.push(match expansion {
            Some(e) => ConditionCheck {
                condition: Condition::UniformExpansion,
                passed: true,
                detail: format!("|(T^{})'| >= {:.6} on sampled cylinders", e.iterate, e.factor),
                witness: None,
            },
            None => ConditionCheck {
                condition: Condition::UniformExpansion,
                passed: false,
                detail: format!("no iterate l <= {MAX_ITERATE} with sampled inf |(T^l)'| > 1"),
                witness: None,
            },
        });

        let (renyi, kappa) = check_renyi(self, &branches, samples);
        checks.push(renyi);

        let s0 = self.s0_estimate(0.02);
        checks.push(match &s0 {
            Ok(e) => ConditionCheck {
                condition: Condition::Summability,
                passed: e.hi < 1.0,
                detail: format!("s0 in [{:.4}, {:.4}]", e.lo, e.hi),
                witness: None,
            },
            Err(err) => ConditionCheck { condition: Condition::Summability, passed: false, detail: err.to_string(), witness: None },
        });

        ValidationReport {
            system: self.name().to_string(),
            samples,
            checks,
            s0: s0.ok(),
            expansion,
            kappa,
        }
    }
}

/// Branch indices checked: the first 200 plus a log-spaced set to the end.
fn checked_indices(count: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=count.min(200)).collect();
    if count > 200 {
        for i in 0..=40 {
            let f = i as f64 / 40.0;
            let k = (200f64.ln() + f * ((count as f64).ln() - 200f64.ln())).exp().round() as usize;
            v.push(k.clamp(201, count));
        }
        v.sort_unstable();
        v.dedup();
    }
    v
}

fn sample_points(b: &Branch, samples: usize) -> Vec<f64> {
    let d = b.domain();
    (0..samples).map(|j| d.lo + d.width() * j as f64 / (samples - 1) as f64).collect()
}

/// First partition defect, if any.
pub(crate) fn partition_defect(sys: &BranchedSystem) -> Option<Error> {
    let doms = sys.sorted_domains();
    let countable = sys.is_countable();
    let first = doms.first()?.1;
    let last = doms.last()?.1;
    // a countable family may leave the accumulation end uncovered
    let left_open = countable && first.lo > ENDPOINT_TOL && (last.hi - 1.0).abs() <= ENDPOINT_TOL;
    let right_open = countable && !left_open && first.lo.abs() <= ENDPOINT_TOL;
    if first.lo > ENDPOINT_TOL && !left_open {
        return Some(Error::Partition { witness: first.lo / 2.0, reason: format!("(0, {}) is not covered", first.lo) });
    }
    if last.hi < 1.0 - ENDPOINT_TOL && !right_open {
        return Some(Error::Partition {
            witness: (last.hi + 1.0) / 2.0,
            reason: format!("({}, 1) is not covered", last.hi),
        });
    }
    for pair in doms.windows(2) {
        let ((i, a), (j, b)) = (pair[0], pair[1]);
        if b.lo < a.hi - ENDPOINT_TOL {
            return Some(Error::Partition {
                witness: (b.lo + a.hi.min(b.hi)) / 2.0,
                reason: format!("domains of branches {i} and {j} overlap"),
            });
        }
        if b.lo > a.hi + ENDPOINT_TOL {
            return Some(Error::Partition {
                witness: (a.hi + b.lo) / 2.0,
                reason: format!("gap between branches {i} and {j}"),
            });
        }
    }
    None
}

fn check_branch_maps(sys: &BranchedSystem, branches: &[Branch], samples: usize) -> ConditionCheck {
    let fail = |detail: String, witness: Option<f64>| ConditionCheck {
        condition: Condition::BranchMaps,
        passed: false,
        detail,
        witness,
    };
    for b in branches {
        if b.orientation() != sys.orientation() {
            return fail(format!("branch {} has a different orientation", b.index()), Some(b.domain().midpoint()));
        }
        let d = b.domain();
        let (y0, y1) = (b.forward(d.lo), b.forward(d.hi));
        let (m0, m1) = (y0.min(y1), y0.max(y1));
        if m0.abs() > 1e-9 || (m1 - 1.0).abs() > 1e-9 {
            return fail(format!("branch {} maps its domain onto ({m0}, {m1})", b.index()), Some(d.lo));
        }
        let xs = sample_points(b, samples);
        let ys: Vec<f64> = xs.iter().map(|&x| b.forward(x)).collect();
        let increasing = y1 > y0;
        for (k, w) in ys.windows(2).enumerate() {
            if (w[1] > w[0]) != increasing && w[1] != w[0] {
                return fail(format!("branch {} is not monotone", b.index()), Some(xs[k + 1]));
            }
        }
        for &x in &xs[1..xs.len() - 1] {
            let back = b.inverse(b.forward(x));
            if (back - x).abs() > 1e-10 {
                return fail(format!("branch {}: inverse(forward(x)) misses x by {:.2e}", b.index(), (back - x).abs()), Some(x));
            }
        }
    }
    ConditionCheck {
        condition: Condition::BranchMaps,
        passed: true,
        detail: format!("{} branches checked", branches.len()),
        witness: None,
    }
}

/// Direction of the signed derivative: +1 increasing, -1 decreasing, 0 constant.
fn check_monotone_derivative(branches: &[Branch], samples: usize) -> (ConditionCheck, i8) {
    let mut pts: Vec<(f64, f64)> = branches
        .iter()
        .flat_map(|b| sample_points(b, samples).into_iter().map(move |x| (x, b.derivative(x))))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tol = |a: f64, b: f64| 1e-9 * a.abs().max(b.abs()).max(1.0);
    let mut direction = 0i8;
    for w in pts.windows(2) {
        let (d0, d1) = (w[0].1, w[1].1);
        let step = if d1 > d0 + tol(d0, d1) {
            1
        } else if d1 < d0 - tol(d0, d1) {
            -1
        } else {
            0
        };
        if step != 0 {
            if direction == 0 {
                direction = step;
            } else if step != direction {
                return (
                    ConditionCheck {
                        condition: Condition::MonotoneDerivative,
                        passed: false,
                        detail: "T' changes monotonicity".into(),
                        witness: Some(w[1].0),
                    },
                    direction,
                );
            }
        }
    }
    let label = match direction {
        1 => "increasing",
        -1 => "decreasing",
        _ => "constant",
    };
    (
        ConditionCheck { condition: Condition::MonotoneDerivative, passed: true, detail: format!("T' is {label}"), witness: None },
        direction,
    )
}

fn check_orientation_reversing(sys: &BranchedSystem, branches: &[Branch], samples: usize, direction: i8) -> ConditionCheck {
    if sys.orientation() == super::Orientation::Preserving {
        return ConditionCheck {
            condition: Condition::OrientationReversing,
            passed: true,
            detail: "not applicable (orientation preserving)".into(),
            witness: None,
        };
    }
    for b in branches {
        let vals: Vec<(f64, f64)> = sample_points(b, samples)
            .into_iter()
            .filter_map(|x| {
                let y = b.forward(x);
                let n = sys.locate(y)?;
                let inner = sys.branch(n).ok()?;
                Some((x, inner.derivative(y) * b.derivative(x)))
            })
            .collect();
        let mut seen = 0i8;
        for w in vals.windows(2) {
            let (a, c) = (w[0].1, w[1].1);
            let t = 1e-9 * a.abs().max(c.abs());
            let step = if c > a + t {
                1
            } else if c < a - t {
                -1
            } else {
                0
            };
            let bad = match direction {
                0 => step != 0 && seen != 0 && step != seen,
                d => step != 0 && step != d,
            };
            if bad {
                return ConditionCheck {
                    condition: Condition::OrientationReversing,
                    passed: false,
                    detail: format!("(T^2)' not monotone in the direction of T' on branch {}", b.index()),
                    witness: Some(w[1].0),
                };
            }
            if step != 0 {
                seen = step;
            }
        }
    }
    ConditionCheck {
        condition: Condition::OrientationReversing,
        passed: true,
        detail: "(T^2)' monotone on each sampled branch".into(),
        witness: None,
    }
}

fn check_renyi(sys: &BranchedSystem, branches: &[Branch], samples: usize) -> (ConditionCheck, Option<f64>) {
    let per_branch: Vec<(usize, f64)> = branches
        .iter()
        .map(|b| {
            let xs = sample_points(b, samples);
            let sup2 = xs.iter().map(|&x| b.second_derivative(x).abs()).fold(0.0, f64::max);
            let inf1 = xs.iter().map(|&x| b.derivative(x).abs()).fold(f64::INFINITY, f64::min);
            (b.index(), sup2 / (inf1 * inf1))
        })
        .collect();
    let kappa = per_branch.iter().map(|p| p.1).fold(0.0, f64::max);
    if !kappa.is_finite() {
        return (
            ConditionCheck { condition: Condition::Renyi, passed: false, detail: "kappa estimate is infinite".into(), witness: None },
            None,
        );
    }
    if sys.is_countable() && per_branch.len() > 4 {
        let mid = per_branch.len() / 2;
        let head = per_branch[..mid].iter().map(|p| p.1).fold(0.0, f64::max);
        let tail = per_branch[mid..].iter().map(|p| p.1).fold(0.0, f64::max);
        if tail > head * (1.0 + 1e-9) + 1e-300 {
            let worst = per_branch[mid..].iter().max_by(|a, b| a.1.total_cmp(&b.1)).expect("nonempty");
            return (
                ConditionCheck {
                    condition: Condition::Renyi,
                    passed: false,
                    detail: format!("distortion ratio grows along the tail (branch {}: {:.4e})", worst.0, worst.1),
                    witness: None,
                },
                Some(kappa),
            );
        }
    }
    (
        ConditionCheck { condition: Condition::Renyi, passed: true, detail: format!("kappa ~ {kappa:.6}"), witness: None },
        Some(kappa),
    )
}

/// Smallest iterate `l <= 4` whose sampled `inf |(T^l)'|` exceeds 1, using
/// words over at most `word_budget^(1/l)` leading symbols.
pub(crate) fn estimate_expansion(sys: &BranchedSystem, word_budget: usize) -> Option<Expansion> {
    for l in 1..=MAX_ITERATE {
        let m = ((word_budget as f64).powf(1.0 / l as f64).floor() as usize).clamp(2, 64).min(sys.branch_count());
        let branches: Vec<Branch> = (1..=m).filter_map(|n| sys.branch(n).ok()).collect();
        let mut word = vec![0usize; l];
        let mut min_deriv = f64::INFINITY;
        loop {
            let bs: Vec<&Branch> = word.iter().map(|&i| &branches[i]).collect();
            let (lo, hi) = super::cylinder::float_endpoints(&bs);
            for j in 0..=4 {
                let mut x = lo + (hi - lo) * j as f64 / 4.0;
                let mut d = 1.0;
                for b in &bs {
                    d *= b.derivative(x).abs();
                    x = b.forward(x).clamp(0.0, 1.0);
                }
                min_deriv = min_deriv.min(d);
            }
            // odometer
            let mut k = l;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                word[k] += 1;
                if word[k] < m {
                    break;
                }
                word[k] = 0;
            }
            if word.iter().all(|&i| i == 0) {
                break;
            }
        }
        if min_deriv > 1.0 + 1e-9 {
            return Some(Expansion { iterate: l, factor: min_deriv });
        }
    }
    None
}
