//! Orientation-reversal exclusion and the admissible group-family dispatch
//! for elliptic Seifert manifolds.
//!
//! Two predicates rule out orientation-reversing fiber-preserving actions:
//! a critical fiber of order greater than two, and a nonzero Euler class.
//! Every elliptic manifold has nonzero Euler class, so all fiber-preserving
//! actions on them preserve orientation; the dispatch then bounds the
//! possible acting groups by a symbolic family per base shape. Families are
//! upper bounds ("isomorphic to a subgroup of"), never existence claims.

use crate::invariants::{geometry_verdict, EllipticBaseLabel, SeifertInvariants};
use crate::s2_atlas::{GroupExpr, Param};
use num_traits::Zero;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Why an orientation-reversing action is impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReversalReason {
    CriticalFiberOrderGreaterThanTwo,
    NonzeroEulerClass,
}

impl fmt::Display for ReversalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReversalReason::CriticalFiberOrderGreaterThanTwo => {
                write!(f, "critical fiber of order greater than two")
            }
            ReversalReason::NonzeroEulerClass => write!(f, "nonzero Euler class"),
        }
    }
}

/// Verdict of the orientation-reversal exclusion predicates.
///
/// `excluded = false` means "not ruled out by these predicates", never that
/// an orientation-reversing action exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReversalVerdict {
    pub excluded: bool,
    pub reasons: Vec<ReversalReason>,
    pub note: String,
}

/// Dispatch rule identifiers; they double as citation tags in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleTag {
    NoCriticalFibers,
    OneCriticalFiber,
    TwoDistinctCriticalFibers,
    TwoEqualCriticalFibersDeferred,
    ThreeCriticalFibersAllDistinct,
    ThreeCriticalFibersTwoEqual,
    ThreeCriticalFibersAllEqual,
    ProjectiveBase,
}

impl RuleTag {
    /// Sphere-action table rows the rule consults, with a pinned parameter
    /// where the rule fixes one.
    pub fn consulted_rows(&self) -> &'static [(u8, Option<u64>)] {
        match self {
            // Any sphere action can be induced; the parity caveat carries
            // the even-b restriction instead of one row.
            RuleTag::NoCriticalFibers => &[],
            RuleTag::OneCriticalFiber => &[(11, None)],
            RuleTag::TwoDistinctCriticalFibers => &[(11, None)],
            RuleTag::TwoEqualCriticalFibersDeferred => &[(12, None), (13, None), (17, None), (18, None)],
            RuleTag::ThreeCriticalFibersAllDistinct => &[(1, None)],
            RuleTag::ThreeCriticalFibersTwoEqual => &[(11, Some(2))],
            RuleTag::ThreeCriticalFibersAllEqual => &[(13, Some(1))],
            // Consulted on the double cover, where the obstruction term is
            // doubled and therefore always even.
            RuleTag::ProjectiveBase => &[(3, None), (4, None)],
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            RuleTag::NoCriticalFibers => "no-critical-fibers",
            RuleTag::OneCriticalFiber => "one-critical-fiber",
            RuleTag::TwoDistinctCriticalFibers => "two-distinct-critical-fibers",
            RuleTag::TwoEqualCriticalFibersDeferred => "two-equal-critical-fibers-deferred",
            RuleTag::ThreeCriticalFibersAllDistinct => "three-critical-fibers-all-distinct",
            RuleTag::ThreeCriticalFibersTwoEqual => "three-critical-fibers-two-equal",
            RuleTag::ThreeCriticalFibersAllEqual => "three-critical-fibers-all-equal",
            RuleTag::ProjectiveBase => "projective-base",
        };
        write!(f, "{tag}")
    }
}

/// Symbolic family bounding the acting group from above: every admissible
/// group is isomorphic to a subgroup of `expr`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupFamily {
    pub expr: GroupExpr,
    pub rule: RuleTag,
    pub caveats: Vec<String>,
}

/// Outcome of the family dispatch: a bound, or a deferred case where the
/// applicable classification lives elsewhere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FamilyOutcome {
    Bounded(GroupFamily),
    Deferred { rule: RuleTag, caveats: Vec<String> },
}

impl FamilyOutcome {
    pub fn rule(&self) -> RuleTag {
        match self {
            FamilyOutcome::Bounded(f) => f.rule,
            FamilyOutcome::Deferred { rule, .. } => *rule,
        }
    }

    pub fn caveats(&self) -> &[String] {
        match self {
            FamilyOutcome::Bounded(f) => &f.caveats,
            FamilyOutcome::Deferred { caveats, .. } => caveats,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("invariants must be normalized first")]
    NotNormalized,
    #[error("the reversal predicates apply to orientable base spaces only")]
    NonOrientableBase,
    #[error("not an elliptic manifold: the family dispatch does not apply")]
    NotElliptic,
}

/// Exclusion predicates for orientation-reversing fiber-preserving actions
/// on manifolds over an orientable base.
pub fn reversal_excluded(m: &SeifertInvariants) -> Result<ReversalVerdict, ClassifyError> {
    if !m.base_orientable {
        return Err(ClassifyError::NonOrientableBase);
    }
    if !m.is_normalized() {
        return Err(ClassifyError::NotNormalized);
    }
    let mut reasons = Vec::new();
    if m.pairs.iter().any(|&(q, _)| q > 2) {
        reasons.push(ReversalReason::CriticalFiberOrderGreaterThanTwo);
    }
    if !m.euler_class().is_zero() {
        reasons.push(ReversalReason::NonzeroEulerClass);
    }
    let excluded = !reasons.is_empty();
    let note = if excluded {
        "every finite fiber-preserving action on this manifold is orientation-preserving"
            .to_string()
    } else {
        "not ruled out by these predicates; existence of an orientation-reversing action \
         is a separate question"
            .to_string()
    };
    Ok(ReversalVerdict {
        excluded,
        reasons,
        note,
    })
}

fn z_free(sym: char) -> GroupExpr {
    GroupExpr::cyclic(Param::Free(sym))
}

fn z_fixed(k: u64) -> GroupExpr {
    GroupExpr::cyclic(Param::fixed(k))
}

/// The admissible group-family bound of an elliptic manifold.
///
/// Dispatch is total over the elliptic base shapes; every input reaches
/// exactly one rule. Deferred outcomes mark the lens-space cases whose
/// classification lives in the dedicated lens-space literature.
pub fn admissible_family(m: &SeifertInvariants) -> Result<FamilyOutcome, ClassifyError> {
    if !m.is_normalized() {
        return Err(ClassifyError::NotNormalized);
    }
    let verdict = geometry_verdict(m);
    if !verdict.elliptic {
        return Err(ClassifyError::NotElliptic);
    }
    let label = verdict.base_label.expect("elliptic implies labeled base");

    let outcome = match label {
        EllipticBaseLabel::Sphere => FamilyOutcome::Bounded(GroupFamily {
            expr: GroupExpr::semidirect_minus_z2(GroupExpr::product(
                z_free('m'),
                GroupExpr::AnySphereRotationGroup,
            )),
            rule: RuleTag::NoCriticalFibers,
            caveats: vec![
                "H ranges over the finite orientation-preserving sphere rotation groups"
                    .to_string(),
                "bound valid for even obstruction terms only; odd terms defer to the \
                 lens-space classification"
                    .to_string(),
            ],
        }),
        EllipticBaseLabel::SphereQ(_) => FamilyOutcome::Bounded(GroupFamily {
            expr: GroupExpr::dihedral(GroupExpr::product(z_free('m'), z_free('n'))),
            rule: RuleTag::OneCriticalFiber,
            caveats: vec![],
        }),
        EllipticBaseLabel::SphereQQ(..) => {
            let mut pairs = m.pairs.clone();
            pairs.sort_unstable();
            if pairs[0] == pairs[1] {
                let mut caveats = vec![
                    "two equal critical fillings: odd obstruction terms defer to the \
                     lens-space classification"
                        .to_string(),
                ];
                if m.b % 2 == 0 {
                    caveats.push(
                        "the even-obstruction branch is recorded upstream as a trivial \
                         circle bundle, yet this input has nonzero Euler class; no family \
                         is bound"
                            .to_string(),
                    );
                }
                FamilyOutcome::Deferred {
                    rule: RuleTag::TwoEqualCriticalFibersDeferred,
                    caveats,
                }
            } else {
                FamilyOutcome::Bounded(GroupFamily {
                    expr: GroupExpr::dihedral(GroupExpr::product(z_free('m'), z_free('n'))),
                    rule: RuleTag::TwoDistinctCriticalFibers,
                    caveats: vec![],
                })
            }
        }
        EllipticBaseLabel::SphereTwoTwoQ(q) => {
            if q == 2 {
                FamilyOutcome::Bounded(GroupFamily {
                    expr: GroupExpr::semidirect_minus_z2(GroupExpr::product(
                        z_free('m'),
                        GroupExpr::dihedral(z_fixed(3)),
                    )),
                    rule: RuleTag::ThreeCriticalFibersAllEqual,
                    caveats: vec![],
                })
            } else {
                FamilyOutcome::Bounded(GroupFamily {
                    expr: GroupExpr::dihedral(GroupExpr::product(z_free('m'), z_fixed(2))),
                    rule: RuleTag::ThreeCriticalFibersTwoEqual,
                    caveats: vec![],
                })
            }
        }
        EllipticBaseLabel::Sphere233 => {
            let mut threes: Vec<i64> = m
                .pairs
                .iter()
                .filter(|&&(q, _)| q == 3)
                .map(|&(_, p)| p)
                .collect();
            threes.sort_unstable();
            if threes[0] == threes[1] {
                FamilyOutcome::Bounded(GroupFamily {
                    expr: GroupExpr::dihedral(GroupExpr::product(z_free('m'), z_fixed(2))),
                    rule: RuleTag::ThreeCriticalFibersTwoEqual,
                    caveats: vec![
                        "an alternative dispatch reading states the all-equal-fillings \
                         bound (Z_m x Dih(Z_3)) o- Z_2 here; the two-equal-fillings rule \
                         applies since exactly two fillings coincide"
                            .to_string(),
                    ],
                })
            } else {
                FamilyOutcome::Bounded(GroupFamily {
                    expr: GroupExpr::dihedral(z_free('m')),
                    rule: RuleTag::ThreeCriticalFibersAllDistinct,
                    caveats: vec![],
                })
            }
        }
        EllipticBaseLabel::Sphere234 | EllipticBaseLabel::Sphere235 => {
            FamilyOutcome::Bounded(GroupFamily {
                expr: GroupExpr::dihedral(z_free('m')),
                rule: RuleTag::ThreeCriticalFibersAllDistinct,
                caveats: vec![
                    "an alternative dispatch reading cites the all-equal-fillings rule \
                     here; the three-distinct-fillings bound applies since all three \
                     fillings differ"
                        .to_string(),
                ],
            })
        }
        EllipticBaseLabel::Projective(q) => {
            let mut caveats = vec![];
            if q.is_none() {
                caveats.push(
                    "no critical fiber over the projective base; treated by the \
                     projective-base rule with a trivial filling"
                        .to_string(),
                );
            }
            FamilyOutcome::Bounded(GroupFamily {
                expr: GroupExpr::product(z_fixed(2), GroupExpr::dihedral(z_free('n'))),
                rule: RuleTag::ProjectiveBase,
                caveats,
            })
        }
    };
    Ok(outcome)
}
