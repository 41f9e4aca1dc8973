//! The 21 finite group actions on the 2-sphere: group, branching data,
//! orbit numbers of non-regular points, the LCM column and the
//! obstruction-condition rule, encoded exactly as published.
//!
//! Several printed entries are arithmetically suspect (see
//! [`recompute_lcm_index`]); the table is encoded verbatim and a separate
//! auditor recomputes the derived columns from first principles, reporting
//! both readings instead of silently correcting either.

use crate::invariants::UnderlyingSurface;
use num_integer::Integer;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// An integer table entry: concrete, linear in the table parameter `n`, or
/// a free symbol (used by group-family bounds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Fixed(u64),
    /// `coeff * n + offset`.
    N { coeff: u64, offset: u64 },
    /// A free symbolic parameter such as `m`.
    Free(char),
}

impl Param {
    pub const fn fixed(v: u64) -> Param {
        Param::Fixed(v)
    }

    pub const fn linear(coeff: u64, offset: u64) -> Param {
        Param::N { coeff, offset }
    }

    pub fn value(&self) -> Option<u64> {
        match self {
            Param::Fixed(v) => Some(*v),
            _ => None,
        }
    }

    pub fn instantiate(&self, n: u64) -> Param {
        match self {
            Param::N { coeff, offset } => Param::Fixed(coeff * n + offset),
            other => *other,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self, Param::Fixed(_))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Fixed(v) => write!(f, "{v}"),
            Param::N { coeff: 1, offset: 0 } => write!(f, "n"),
            Param::N { coeff, offset: 0 } => write!(f, "{coeff}n"),
            Param::N { coeff: 1, offset } => write!(f, "n+{offset}"),
            Param::N { coeff, offset } => write!(f, "{coeff}n+{offset}"),
            Param::Free(c) => write!(f, "{c}"),
        }
    }
}

impl Serialize for Param {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Param::Fixed(v) => serializer.serialize_u64(*v),
            other => serializer.collect_str(other),
        }
    }
}

/// Symbolic group expression over cyclic groups, dihedralization, direct
/// products, the anti-commuting semidirect extension by `Z_2`, and the three
/// exceptional rotation groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupExpr {
    Trivial,
    Cyclic(Param),
    /// `Dih(H) = H x| Z_2` with the involution inverting `H`.
    Dihedral(Box<GroupExpr>),
    Product(Box<GroupExpr>, Box<GroupExpr>),
    /// `H o- Z_2`: the `Z_2` generator anti-commutes with every element.
    SemidirectMinusZ2(Box<GroupExpr>),
    /// `A_4`, the tetrahedral rotation group.
    Tetrahedral,
    /// `S_4`, the octahedral rotation group.
    Octahedral,
    /// `A_5`, the icosahedral rotation group.
    Icosahedral,
    /// Placeholder for an arbitrary finite orientation-preserving sphere
    /// rotation group, used by the no-critical-fiber family bound.
    AnySphereRotationGroup,
}

impl GroupExpr {
    pub fn cyclic(p: Param) -> GroupExpr {
        GroupExpr::Cyclic(p)
    }

    pub fn dihedral(h: GroupExpr) -> GroupExpr {
        GroupExpr::Dihedral(Box::new(h))
    }

    pub fn product(a: GroupExpr, b: GroupExpr) -> GroupExpr {
        GroupExpr::Product(Box::new(a), Box::new(b))
    }

    pub fn semidirect_minus_z2(h: GroupExpr) -> GroupExpr {
        GroupExpr::SemidirectMinusZ2(Box::new(h))
    }

    pub fn instantiate(&self, n: u64) -> GroupExpr {
        match self {
            GroupExpr::Cyclic(p) => GroupExpr::Cyclic(p.instantiate(n)),
            GroupExpr::Dihedral(h) => GroupExpr::dihedral(h.instantiate(n)),
            GroupExpr::Product(a, b) => GroupExpr::product(a.instantiate(n), b.instantiate(n)),
            GroupExpr::SemidirectMinusZ2(h) => GroupExpr::semidirect_minus_z2(h.instantiate(n)),
            other => other.clone(),
        }
    }

    /// Group order; `None` while any parameter is symbolic.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupExpr::Trivial => Some(1),
            GroupExpr::Cyclic(p) => p.value(),
            GroupExpr::Dihedral(h) => h.order().map(|o| 2 * o),
            GroupExpr::Product(a, b) => Some(a.order()? * b.order()?),
            GroupExpr::SemidirectMinusZ2(h) => h.order().map(|o| 2 * o),
            GroupExpr::Tetrahedral => Some(12),
            GroupExpr::Octahedral => Some(24),
            GroupExpr::Icosahedral => Some(60),
            GroupExpr::AnySphereRotationGroup => None,
        }
    }
}

impl fmt::Display for GroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn subscript(p: &Param) -> String {
            let text = p.to_string();
            if text.len() > 1 {
                format!("{{{text}}}")
            } else {
                text
            }
        }
        match self {
            GroupExpr::Trivial => write!(f, "Trivial"),
            GroupExpr::Cyclic(p) => write!(f, "Z_{}", subscript(p)),
            GroupExpr::Dihedral(h) => write!(f, "Dih({h})"),
            GroupExpr::Product(a, b) => write!(f, "{a} x {b}"),
            GroupExpr::SemidirectMinusZ2(h) => match h.as_ref() {
                GroupExpr::Product(..) | GroupExpr::SemidirectMinusZ2(..) => {
                    write!(f, "({h}) o- Z_2")
                }
                _ => write!(f, "{h} o- Z_2"),
            },
            GroupExpr::Tetrahedral => write!(f, "A_4"),
            GroupExpr::Octahedral => write!(f, "S_4"),
            GroupExpr::Icosahedral => write!(f, "A_5"),
            GroupExpr::AnySphereRotationGroup => write!(f, "H"),
        }
    }
}

impl Serialize for GroupExpr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Branching data of the quotient orbifold: cone orders, plus corner
/// reflector orders for disc quotients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchData {
    pub cones: Vec<Param>,
    /// `Some` exactly for disc quotients, whose data reads `(cones; corners)`.
    pub corners: Option<Vec<Param>>,
}

impl fmt::Display for BranchData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |ps: &[Param]| {
            ps.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match &self.corners {
            None => write!(f, "({})", join(&self.cones)),
            Some(corners) => write!(f, "({};{})", join(&self.cones), join(corners)),
        }
    }
}

/// Obstruction-condition rule from the final table column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OcRule {
    /// Satisfied for every obstruction term.
    AllB,
    /// Satisfied exactly for even obstruction terms.
    BEven,
}

impl fmt::Display for OcRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OcRule::AllB => write!(f, "all b"),
            OcRule::BEven => write!(f, "b even"),
        }
    }
}

/// One row of the sphere-action table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct S2ActionRow {
    pub number: u8,
    pub underlying: UnderlyingSurface,
    pub group: GroupExpr,
    pub branch_data: BranchData,
    /// Symbolic generator names, quotient-surface conventions: rotations
    /// about coordinate axes or exceptional-symmetry lines, and reflections
    /// in coordinate planes.
    pub generators: Vec<&'static str>,
    /// Orbit numbers of non-regular points ("-" rows encode as empty).
    pub orbit_numbers: Vec<Param>,
    /// Printed LCM column, encoded verbatim.
    pub lcm: Param,
    /// Printed `|G|/LCM` column, always 1 or 2.
    pub index_over_lcm: u8,
    pub oc_rule: OcRule,
}

impl S2ActionRow {
    pub fn is_symbolic(&self) -> bool {
        self.group.order().is_none()
            || self.lcm.is_symbolic()
            || self.orbit_numbers.iter().any(Param::is_symbolic)
    }

    fn instantiate(&self, n: u64) -> S2ActionRow {
        S2ActionRow {
            number: self.number,
            underlying: self.underlying,
            group: self.group.instantiate(n),
            branch_data: BranchData {
                cones: self
                    .branch_data
                    .cones
                    .iter()
                    .map(|p| p.instantiate(n))
                    .collect(),
                corners: self
                    .branch_data
                    .corners
                    .as_ref()
                    .map(|cs| cs.iter().map(|p| p.instantiate(n)).collect()),
            },
            generators: self.generators.clone(),
            orbit_numbers: self.orbit_numbers.iter().map(|p| p.instantiate(n)).collect(),
            lcm: self.lcm.instantiate(n),
            index_over_lcm: self.index_over_lcm,
            oc_rule: self.oc_rule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("table parameter n must be >= 1")]
    InvalidParameter,
    #[error("row {number} is symbolic; instantiate n first")]
    SymbolicRow { number: u8 },
}

fn fx(v: u64) -> Param {
    Param::fixed(v)
}

fn n_times(c: u64) -> Param {
    Param::linear(c, 0)
}

fn n_lin(c: u64, o: u64) -> Param {
    Param::linear(c, o)
}

/// The table with `n` left symbolic.
pub fn symbolic_rows() -> Vec<S2ActionRow> {
    use GroupExpr as G;
    use UnderlyingSurface::{Disc, ProjectivePlane, Sphere};

    let z = |p: Param| G::cyclic(p);
    let dih = |p: Param| G::dihedral(G::cyclic(p));
    let row = |number: u8,
               underlying: UnderlyingSurface,
               group: G,
               cones: Vec<Param>,
               corners: Option<Vec<Param>>,
               generators: Vec<&'static str>,
               orbit_numbers: Vec<Param>,
               lcm: Param,
               index_over_lcm: u8,
               oc_rule: OcRule| S2ActionRow {
        number,
        underlying,
        group,
        branch_data: BranchData { cones, corners },
        generators,
        orbit_numbers,
        lcm,
        index_over_lcm,
        oc_rule,
    };

    vec![
        row(1, Sphere, G::Trivial, vec![], None, vec!["id"], vec![fx(1)], fx(1), 1, OcRule::AllB),
        row(
            2,
            Sphere,
            z(n_times(1)),
            vec![n_times(1), n_times(1)],
            None,
            vec!["rot_n^z"],
            vec![fx(1), fx(1)],
            n_times(1),
            1,
            OcRule::AllB,
        ),
        row(
            3,
            Sphere,
            dih(n_times(2)),
            vec![fx(2), fx(2), n_times(2)],
            None,
            vec!["rot_2n^z", "rot_2^y"],
            vec![fx(2), n_times(2), n_times(2)],
            n_times(2),
            2,
            OcRule::BEven,
        ),
        row(
            4,
            Sphere,
            dih(n_lin(2, 1)),
            vec![fx(2), fx(2), n_lin(2, 1)],
            None,
            vec!["rot_2n+1^z", "rot_2^y"],
            vec![fx(2), n_lin(2, 1), n_lin(2, 1)],
            n_lin(4, 2),
            1,
            OcRule::AllB,
        ),
        row(
            5,
            Sphere,
            G::Tetrahedral,
            vec![fx(2), fx(3), fx(3)],
            None,
            vec!["rot_2^z", "rot_3^L1"],
            vec![fx(4), fx(4), fx(6)],
            fx(6),
            2,
            OcRule::BEven,
        ),
        row(
            6,
            Sphere,
            G::Octahedral,
            vec![fx(2), fx(3), fx(4)],
            None,
            vec!["rot_2^z", "rot_3^L2"],
            vec![fx(6), fx(8), fx(12)],
            fx(12),
            2,
            OcRule::BEven,
        ),
        row(
            7,
            Sphere,
            G::Icosahedral,
            vec![fx(2), fx(3), fx(5)],
            None,
            vec!["rot_2^z", "rot_3^L3"],
            vec![fx(6), fx(10), fx(15)],
            fx(30),
            1,
            OcRule::AllB,
        ),
        row(
            8,
            Disc,
            z(fx(2)),
            vec![],
            Some(vec![]),
            vec!["ref^xy"],
            vec![fx(1)],
            fx(2),
            1,
            OcRule::AllB,
        ),
        row(
            9,
            Disc,
            G::product(z(n_times(2)), z(fx(2))),
            vec![n_times(2)],
            Some(vec![]),
            vec!["rot_2n^z", "ref^xy"],
            vec![fx(2), n_times(1)],
            n_times(2),
            2,
            OcRule::BEven,
        ),
        row(
            10,
            Disc,
            z(n_lin(4, 2)),
            vec![n_lin(2, 1)],
            Some(vec![]),
            vec!["rot_2n+1^z o ref^xy"],
            vec![fx(2), n_lin(2, 1)],
            n_lin(4, 2),
            1,
            OcRule::AllB,
        ),
        row(
            11,
            Disc,
            dih(n_times(1)),
            vec![],
            Some(vec![n_times(1), n_times(1)]),
            vec!["rot_n^z", "ref^yz"],
            vec![fx(1), fx(1)],
            n_times(2),
            1,
            OcRule::AllB,
        ),
        row(
            12,
            Disc,
            G::semidirect_minus_z2(dih(n_times(2))),
            vec![],
            Some(vec![fx(2), fx(2), n_times(2)]),
            vec!["rot_2n^z", "rot_2^y", "ref^yz"],
            vec![fx(2), n_times(2), n_times(2)],
            n_times(4),
            2,
            OcRule::BEven,
        ),
        row(
            13,
            Disc,
            G::semidirect_minus_z2(dih(n_lin(2, 1))),
            vec![],
            Some(vec![fx(2), fx(2), n_lin(2, 1)]),
            vec!["rot_2n+1^z", "rot_2^y", "ref^yz"],
            vec![fx(2), n_lin(2, 1), n_lin(2, 1)],
            n_lin(8, 4),
            1,
            OcRule::AllB,
        ),
        row(
            14,
            Disc,
            G::semidirect_minus_z2(G::Tetrahedral),
            vec![],
            Some(vec![fx(2), fx(3), fx(3)]),
            vec!["rot_2^z", "rot_3^L1", "ref^yz"],
            vec![fx(4), fx(4), fx(6)],
            fx(12),
            2,
            OcRule::BEven,
        ),
        row(
            15,
            Disc,
            G::product(G::Octahedral, z(fx(2))),
            vec![],
            Some(vec![fx(2), fx(3), fx(4)]),
            vec!["rot_2^z", "rot_3^L2", "ref^xy"],
            vec![fx(6), fx(8), fx(12)],
            fx(24),
            2,
            OcRule::BEven,
        ),
        row(
            16,
            Disc,
            G::product(G::Icosahedral, z(fx(2))),
            vec![],
            Some(vec![fx(2), fx(3), fx(5)]),
            vec!["rot_2^z", "rot_3^L3", "ref^xy"],
            vec![fx(6), fx(10), fx(15)],
            fx(60),
            2,
            OcRule::BEven,
        ),
        row(
            17,
            Disc,
            G::semidirect_minus_z2(dih(n_times(2))),
            vec![fx(2)],
            Some(vec![n_times(2)]),
            vec!["rot_2n^z", "rot_2^y", "ref^xz"],
            vec![fx(2), n_times(4)],
            n_times(4),
            2,
            OcRule::BEven,
        ),
        row(
            18,
            Disc,
            G::semidirect_minus_z2(dih(n_lin(2, 1))),
            vec![fx(2)],
            Some(vec![n_lin(2, 1)]),
            vec!["rot_2n+1^z", "rot_2^y", "ref^xz"],
            vec![fx(2), n_lin(4, 2)],
            n_lin(4, 2),
            2,
            OcRule::BEven,
        ),
        row(
            19,
            Disc,
            G::product(G::Tetrahedral, z(fx(2))),
            vec![fx(3)],
            Some(vec![fx(2)]),
            vec!["rot_2^z", "rot_3^L1", "ref^xy"],
            vec![fx(6), fx(8)],
            fx(12),
            2,
            OcRule::BEven,
        ),
        row(
            20,
            ProjectivePlane,
            z(fx(2)),
            vec![],
            None,
            vec!["rot_2^z o ref^xy"],
            vec![],
            fx(1),
            2,
            OcRule::BEven,
        ),
        row(
            21,
            ProjectivePlane,
            z(n_times(2)),
            vec![n_times(1)],
            None,
            vec!["rot_2n^z o ref^xy"],
            vec![fx(2)],
            n_times(1),
            2,
            OcRule::BEven,
        ),
    ]
}

/// All 21 rows, with parameterized entries instantiated at `n` when given.
pub fn atlas_rows(n: Option<u64>) -> Result<Vec<S2ActionRow>, AtlasError> {
    match n {
        Some(0) => Err(AtlasError::InvalidParameter),
        Some(n) => Ok(symbolic_rows().iter().map(|r| r.instantiate(n)).collect()),
        None => Ok(symbolic_rows()),
    }
}

/// Fetch one instantiated row by number.
pub fn row(number: u8, n: u64) -> Result<S2ActionRow, AtlasError> {
    atlas_rows(Some(n))?
        .into_iter()
        .find(|r| r.number == number)
        .ok_or(AtlasError::SymbolicRow { number })
}

/// First-principles recomputation of the derived columns of one row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowAudit {
    pub number: u8,
    pub group_order: u64,
    pub stored_lcm: u64,
    pub stored_index: u8,
    /// Least common multiple of the encoded orbit numbers (1 when empty).
    pub recomputed_lcm: u64,
    /// `group_order / recomputed_lcm` when the division is exact.
    pub recomputed_index: Option<u64>,
    /// Printed LCM column equals the recomputed lcm of the orbit numbers.
    pub lcm_matches: bool,
    /// `group_order == stored_lcm * stored_index`.
    pub stored_product_matches_order: bool,
    /// Printed rule agrees with the printed index (`all b` iff index 1).
    pub oc_consistent: bool,
}

impl RowAudit {
    /// No anomaly in any of the audited relations.
    pub fn is_clean(&self) -> bool {
        self.lcm_matches && self.stored_product_matches_order && self.oc_consistent
    }
}

/// Recompute the LCM and index columns of a concrete row and compare them
/// with the encoded values. Mismatches are reported, never corrected.
pub fn recompute_lcm_index(row: &S2ActionRow) -> Result<RowAudit, AtlasError> {
    if row.is_symbolic() {
        return Err(AtlasError::SymbolicRow { number: row.number });
    }
    let group_order = row.group.order().expect("concrete row");
    let stored_lcm = row.lcm.value().expect("concrete row");
    let recomputed_lcm = row
        .orbit_numbers
        .iter()
        .map(|p| p.value().expect("concrete row"))
        .fold(1u64, |acc, v| acc.lcm(&v));
    let recomputed_index = (recomputed_lcm != 0 && group_order.is_multiple_of(recomputed_lcm))
        .then(|| group_order / recomputed_lcm);
    Ok(RowAudit {
        number: row.number,
        group_order,
        stored_lcm,
        stored_index: row.index_over_lcm,
        recomputed_lcm,
        recomputed_index,
        lcm_matches: recomputed_lcm == stored_lcm,
        stored_product_matches_order: group_order == stored_lcm * u64::from(row.index_over_lcm),
        oc_consistent: (row.oc_rule == OcRule::AllB) == (row.index_over_lcm == 1),
    })
}

/// Audit every row at a concrete parameter value.
pub fn audit_rows(n: u64) -> Result<Vec<RowAudit>, AtlasError> {
    atlas_rows(Some(n))?
        .iter()
        .map(recompute_lcm_index)
        .collect()
}

/// The encoded obstruction rule of a row: satisfied for every `b` when the
/// printed index is 1, and exactly for even `b` when it is 2.
pub fn obstruction_satisfied(row: &S2ActionRow, b: i64) -> bool {
    match row.oc_rule {
        OcRule::AllB => true,
        OcRule::BEven => b % 2 == 0,
    }
}
