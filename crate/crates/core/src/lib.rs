//! Dimensions of Bernoulli pushforward measures for countable branched
//! interval maps.
//!
//! A [`BranchedSystem`] is a countable family of expanding bijections
//! `T_n: I_n -> (0,1)` on a partition of the unit interval (the Gauss map is
//! the model case). For a probability vector `p` on the branch alphabet the
//! pushforward of the Bernoulli measure has dimension `h / chi`, entropy over
//! Lyapunov exponent. This crate computes
//!
//! * certified brackets for `chi` and the dimension from cylinder sums
//!   ([`measures`]),
//! * dimension-maximizing vectors on `L` symbols ([`optimizer`]),
//! * numerical dimension-gap certificates built from periodic orbits with
//!   permuted itineraries ([`gap`]).
//!
//! ```
//! use branchdim::{catalog, measures, ProbVector};
//!
//! let gauss = catalog::gauss();
//! let p = ProbVector::uniform(3);
//! let dim = measures::dimension_bracket(&gauss, &p, 4).unwrap();
//! assert!(dim.lo > 0.5 && dim.hi < 1.0);
//! ```

pub mod error;
pub mod gap;
pub mod measures;
pub mod numeric;
pub mod optimizer;
pub mod system;

pub use error::{Error, Result};
pub use gap::{GapCertificate, PeriodicOrbit};
pub use measures::{CylinderRule, ProbVector, ValueBracket};
pub use optimizer::MaximizerResult;
pub use system::{catalog, BranchedSystem, Interval, Word};
