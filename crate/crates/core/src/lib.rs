//! Exact-arithmetic tools for finite, fiber-preserving group actions on
//! orientable Seifert fibered 3-manifolds with elliptic geometry.
//!
//! Everything is computed over the integers and exact rationals; there is no
//! floating point anywhere in the crate. The main pieces are:
//!
//! - [`invariants`] — normalized Seifert invariants, Euler class, base
//!   orbifold data and the elliptic geometry verdict;
//! - [`lattice`] — 2×2 integer matrix algebra for filling maps, homology
//!   maps and the projected-filling solve;
//! - [`s2_atlas`] — the 21 finite group actions on the 2-sphere, their orbit
//!   data and the obstruction rule, plus an arithmetic auditor;
//! - [`classify`] — orientation-reversal exclusion predicates and the
//!   admissible group-family bound for elliptic manifolds;
//! - [`quotient`] — quotient orbifold data of a concrete action: exceptional
//!   core orders, projection matrices, projected filling slopes and the
//!   assembled quotient descriptor;
//! - [`oracle`] — an independent brute-force verifier that enumerates finite
//!   rotation groups and recomputes core orders by direct counting.
//!
//! ```
//! use sfq_core::classify::{admissible_family, FamilyOutcome};
//! use sfq_core::invariants::{geometry_verdict, parse_invariants};
//!
//! let m = parse_invariants("(0,o1|(3,2),(1,5))")?.normalize()?;
//! assert!(geometry_verdict(&m).elliptic);
//! let FamilyOutcome::Bounded(family) = admissible_family(&m)? else {
//!     unreachable!("one critical fiber has a bound");
//! };
//! assert_eq!(family.expr.to_string(), "Dih(Z_m x Z_n)");
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod classify;
pub mod invariants;
pub mod lattice;
pub mod oracle;
pub mod quotient;
pub mod s2_atlas;

/// Exact rational scalar used throughout the crate.
pub type Rat = num_rational::Rational64;

pub use classify::{FamilyOutcome, GroupFamily, ReversalVerdict};
pub use invariants::{GeometryVerdict, SeifertInvariants};
pub use lattice::{FillingSlope, Mat2};
pub use quotient::{QuotientDescriptor, QuotientPiece, RotationPair, TorusActionSpec};
pub use s2_atlas::{GroupExpr, S2ActionRow};
