//! The quotient pipeline: induced stabilizer actions on filling tori,
//! exceptional core orders, projection matrices, projected filling slopes,
//! and assembly of the full quotient orbifold descriptor.
//!
//! The stabilizer of a boundary torus acts by rotation pairs `(alpha, beta)`
//! in `(Q/Z)^2`: `(u, v) -> (e^{2 pi i alpha} u, e^{2 pi i beta} v)`. A
//! filling matrix `d` conjugates the stabilizer action into the solid torus;
//! the quotient of the solid torus is a solid torus or Conway ball with an
//! exceptional core whose order is given by a closed gcd/lcm formula (and is
//! independently checked against [`crate::oracle`]). Projection matrices for
//! the torus and solid-torus quotients then determine the projected filling
//! by the conjugation solve in [`crate::lattice`].

use crate::invariants::SeifertInvariants;
use crate::lattice::{self, FillingSlope, Mat2};
use crate::Rat;
use num_integer::Integer;
use num_traits::Zero;
use serde::ser::SerializeSeq;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// An element of the torus rotation group: two exact rationals mod 1,
/// stored fully reduced in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RotationPair {
    alpha: Rat,
    beta: Rat,
}

impl RotationPair {
    pub fn new(alpha: Rat, beta: Rat) -> Self {
        RotationPair {
            alpha: mod_one(alpha),
            beta: mod_one(beta),
        }
    }

    pub fn identity() -> Self {
        RotationPair::new(Rat::zero(), Rat::zero())
    }

    /// First-coordinate rotation (turns), in `[0, 1)`.
    pub fn alpha(&self) -> Rat {
        self.alpha
    }

    /// Second-coordinate rotation (turns), in `[0, 1)`.
    pub fn beta(&self) -> Rat {
        self.beta
    }

    /// `(a1, a2, b1, b2)` with `alpha = a1/a2`, `beta = b1/b2` fully
    /// reduced, denominators >= 1.
    pub fn parts(&self) -> (i64, i64, i64, i64) {
        (
            *self.alpha.numer(),
            *self.alpha.denom(),
            *self.beta.numer(),
            *self.beta.denom(),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    /// The same rotation read in the opposite framing of the torus: the
    /// second coordinate reverses. Boundary tori framed with the opposite
    /// orientation see the ambient action this way.
    pub fn opposite_framing(&self) -> Self {
        RotationPair::new(self.alpha, -self.beta)
    }
}

fn mod_one(r: Rat) -> Rat {
    Rat::new(r.numer().rem_euclid(*r.denom()), *r.denom())
}

impl fmt::Display for RotationPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.alpha, self.beta)
    }
}

impl Serialize for RotationPair {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(2))?;
        seq.serialize_element(&self.alpha.to_string())?;
        seq.serialize_element(&self.beta.to_string())?;
        seq.end()
    }
}

/// The action of a boundary-torus stabilizer: one rotation generator for the
/// cyclic case, two for the bicyclic case, plus the fiber-reversing
/// involution `(u, v) -> (u^{-1}, v^{-1})` when present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusActionSpec {
    pub generators: Vec<RotationPair>,
    pub fiber_reversing: bool,
}

impl TorusActionSpec {
    pub fn rotation(generators: Vec<RotationPair>) -> Self {
        TorusActionSpec {
            generators,
            fiber_reversing: false,
        }
    }

    pub fn reversing(generators: Vec<RotationPair>) -> Self {
        TorusActionSpec {
            generators,
            fiber_reversing: true,
        }
    }
}

/// Kind of a quotient piece filling a quotient boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// `V(k)`: solid torus with exceptional core of order `k`.
    SolidTorus,
    /// `B(k)`: ball whose exceptional set is two order-2 arcs joined by an
    /// order-`k` arc.
    ConwayBall,
}

/// A quotient piece: solid torus `V(k)` or Conway ball `B(k)` together with
/// the projected filling map and its slope column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientPiece {
    pub kind: PieceKind,
    pub core_order: u64,
    /// The projected filling map `D'`.
    pub filling: Mat2,
    /// Slope column `(p', q')` of `D'`, canonicalized.
    pub slope: FillingSlope,
}

impl fmt::Display for QuotientPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            PieceKind::SolidTorus => "V",
            PieceKind::ConwayBall => "B",
        };
        write!(f, "{tag}({}) slope {}", self.core_order, self.slope)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error(transparent)]
    Lattice(#[from] lattice::LatticeError),
    #[error("filling matrix must be unimodular, found determinant {det}")]
    NonUnimodularFilling { det: i64 },
    #[error("projection formulas support at most two rotation generators, found {found}")]
    TooManyGenerators { found: usize },
    #[error("invalid projection choice l = {given}: the projection would not be a quotient map")]
    InvalidLChoice { given: i64 },
    #[error("no valid projection twist exists for the given generators")]
    NoValidProjection,
    #[error("boundary class constraint violated: weighted l-sum is {sum}, expected 0")]
    ConstraintViolation { sum: i64 },
    #[error("forced l = {forced} for boundary class {class} violates its projection condition")]
    ForcedLInvalid { class: usize, forced: i64 },
    #[error("invalid action description: {0}")]
    InvalidAction(String),
    #[error("arithmetic overflow in projection data")]
    Overflow,
}

fn checked_lcm(a: i64, b: i64) -> Result<i64, QuotientError> {
    let g = a.gcd(&b);
    if g == 0 {
        return Ok(0);
    }
    (a / g).checked_mul(b).ok_or(QuotientError::Overflow)
}

/// Transform ambient rotation pairs into the solid-torus coordinates of a
/// filling: each rotation vector maps to `d^{-1}` times itself, mod 1.
pub fn induced_action_on_filling(
    ambient: &[RotationPair],
    d: &Mat2,
) -> Result<Vec<RotationPair>, QuotientError> {
    let det = d.det();
    if det != 1 && det != -1 {
        return Err(QuotientError::NonUnimodularFilling {
            det: i64::try_from(det).unwrap_or(i64::MAX),
        });
    }
    // For |det| = 1 the inverse is integral: adj(d) / det.
    let adj = d.adjugate();
    let sign = det as i64;
    let inv = Mat2::new([
        [adj.entry(0, 0) * sign, adj.entry(0, 1) * sign],
        [adj.entry(1, 0) * sign, adj.entry(1, 1) * sign],
    ]);
    Ok(ambient
        .iter()
        .map(|g| {
            let (x, y) = inv.apply((g.alpha(), g.beta()));
            RotationPair::new(x, y)
        })
        .collect())
}

/// Exceptional core order of the quotient of a solid torus under a single
/// rotation generator: `k = b2 / gcd(a2, b2)`.
pub fn core_order_cyclic(g: &RotationPair) -> u64 {
    let (_, a2, _, b2) = g.parts();
    (b2 / a2.gcd(&b2)) as u64
}

/// Least non-negative residue `z` with `a1 * z = -1 (mod a2)`, taking
/// `z = 0` when `a2 = 1`. This is the canonical choice of the conjugation
/// residue appearing in the bicyclic core-order formula.
pub fn conjugation_residue(g: &RotationPair) -> i64 {
    let (a1, a2, _, _) = g.parts();
    if a2 == 1 {
        return 0;
    }
    // alpha is reduced, so a1 is invertible mod a2.
    let gcd = a1.extended_gcd(&a2);
    debug_assert_eq!(gcd.gcd, 1);
    (-gcd.x).rem_euclid(a2)
}

/// Exceptional core order of the quotient of a solid torus under two
/// rotation generators `g1 = (a1/a2, b1/b2)` and `g2 = (c1/c2, d1/d2)`:
///
/// ```text
/// k = b2 d2 gcd(a2,c2) / gcd(d2 gcd(a2,c2) gcd(a2,b2), a2 b1 c1 d2 z + b2 c2 d1)
/// ```
///
/// with `z` the canonical conjugation residue of `g1`.
pub fn core_order_bicyclic(g1: &RotationPair, g2: &RotationPair) -> u64 {
    let (_, a2, b1, b2) = g1.parts();
    let (c1, c2, d1, d2) = g2.parts();
    let z = conjugation_residue(g1);
    let num = i128::from(b2) * i128::from(d2) * i128::from(a2.gcd(&c2));
    let lhs = i128::from(d2) * i128::from(a2.gcd(&c2)) * i128::from(a2.gcd(&b2));
    let rhs = i128::from(a2) * i128::from(b1) * i128::from(c1) * i128::from(d2) * i128::from(z)
        + i128::from(b2) * i128::from(c2) * i128::from(d1);
    let den = lhs.gcd(&rhs);
    (num / den) as u64
}

/// Closed-form core order for a spec with zero, one or two generators.
pub fn core_order_formula(spec: &TorusActionSpec) -> Result<u64, QuotientError> {
    match spec.generators.as_slice() {
        [] => Ok(1),
        [g] => Ok(core_order_cyclic(g)),
        [g1, g2] => Ok(core_order_bicyclic(g1, g2)),
        more => Err(QuotientError::TooManyGenerators { found: more.len() }),
    }
}

/// Rotation data of a spec reduced to the quantities the projection
/// formulas use. For the empty spec everything degenerates to the identity.
struct ProjectionData {
    /// Fiber-direction degree of the torus projection (`b2` or `lcm(b2,d2)`).
    t: i64,
    /// Meridian degree of the boundary projection (`a2` or `lcm(a2,c2)`).
    l_den: i64,
    /// Group order `m * l` as seen by the projections.
    order: i64,
}

fn projection_data(spec: &TorusActionSpec) -> Result<ProjectionData, QuotientError> {
    match spec.generators.as_slice() {
        [] => Ok(ProjectionData {
            t: 1,
            l_den: 1,
            order: 1,
        }),
        [g] => {
            let (_, a2, _, b2) = g.parts();
            Ok(ProjectionData {
                t: b2,
                l_den: a2,
                order: checked_lcm(a2, b2)?,
            })
        }
        [g1, g2] => {
            let (_, a2, _, b2) = g1.parts();
            let (_, c2, _, d2) = g2.parts();
            let m = checked_lcm(a2, b2)?;
            let l = checked_lcm(c2, d2)?;
            Ok(ProjectionData {
                t: checked_lcm(b2, d2)?,
                l_den: checked_lcm(a2, c2)?,
                order: m.checked_mul(l).ok_or(QuotientError::Overflow)?,
            })
        }
        more => Err(QuotientError::TooManyGenerators { found: more.len() }),
    }
}

fn is_integral(r: Rat) -> bool {
    *r.denom() == 1
}

/// Whether `l` makes the torus projection `(u,v) -> (u^r v^l, v^t)`
/// equivariant for every generator: `alpha * r + beta * l` integral.
fn l_is_valid(spec: &TorusActionSpec, r: i64, l: i64) -> bool {
    spec.generators.iter().all(|g| {
        is_integral(g.alpha() * Rat::from_integer(r) + g.beta() * Rat::from_integer(l))
    })
}

/// Projection of a boundary torus of the fibered piece to its quotient:
/// the matrix `[[r, l], [0, t]]` of `(u, v) -> (u^r v^l, v^t)`.
///
/// In the cyclic case `r = lcm(a2,b2)/b2`, `t = b2`, and the default `l` is
/// the least non-negative integer making the map equivariant. In the
/// bicyclic case `r = m*l_group/lcm(b2,d2)`, `t = lcm(b2,d2)`, and the
/// default `l` is the smallest positive multiple of `lcm(b2,d2)`, which is
/// `lcm(b2,d2)` itself. An explicit `l_choice` overrides the default and is
/// validated against the equivariance condition.
pub fn torus_projection_matrix(
    spec: &TorusActionSpec,
    l_choice: Option<i64>,
) -> Result<Mat2, QuotientError> {
    let data = projection_data(spec)?;
    let r = data.order / data.t;
    let l = match l_choice {
        Some(l) => {
            if !l_is_valid(spec, r, l) {
                return Err(QuotientError::InvalidLChoice { given: l });
            }
            l
        }
        None => default_l(spec, r, data.t)?,
    };
    Ok(Mat2::new([[r, l], [0, data.t]]))
}

fn default_l(spec: &TorusActionSpec, r: i64, t: i64) -> Result<i64, QuotientError> {
    match spec.generators.len() {
        0 => Ok(0),
        1 => (0..t)
            .find(|&l| l_is_valid(spec, r, l))
            .ok_or(QuotientError::NoValidProjection),
        _ => {
            // Smallest positive multiple of t, falling back to a scan for
            // generator pairs outside the direct-product hypothesis.
            if l_is_valid(spec, r, t) {
                Ok(t)
            } else {
                (1..=t)
                    .find(|&l| l_is_valid(spec, r, l))
                    .ok_or(QuotientError::NoValidProjection)
            }
        }
    }
}

/// Whether `z` makes the boundary projection `(u,v) -> (u^L, u^z v^R)`
/// equivariant for every generator: `alpha * z + beta * R` integral.
fn z_is_valid(spec: &TorusActionSpec, big_r: i64, z: i64) -> bool {
    spec.generators.iter().all(|g| {
        is_integral(g.alpha() * Rat::from_integer(z) + g.beta() * Rat::from_integer(big_r))
    })
}

/// Least non-negative twist `z` for which the boundary projection of the
/// spec is a genuine quotient map.
pub fn default_boundary_twist(spec: &TorusActionSpec) -> Result<i64, QuotientError> {
    let data = projection_data(spec)?;
    let big_r = data.order / data.l_den;
    (0..data.l_den.max(1))
        .find(|&z| z_is_valid(spec, big_r, z))
        .ok_or(QuotientError::NoValidProjection)
}

/// Projection of the boundary of a filling solid torus to its quotient:
/// the matrix `[[L, 0], [z, R]]` of `(u, v) -> (u^L, u^z v^R)` with
/// `L = a2` (cyclic) or `lcm(a2, c2)` (bicyclic) and `R = order / L`.
///
/// The twist `z` defaults to the least non-negative value for which the map
/// is a quotient map of the action; the slope of any projected filling is
/// independent of this choice. An explicit `z_choice` is accepted verbatim
/// (off-lattice values surface later as non-integral solves).
pub fn boundary_projection_matrix(
    spec: &TorusActionSpec,
    z_choice: Option<i64>,
) -> Result<Mat2, QuotientError> {
    let data = projection_data(spec)?;
    let big_r = data.order / data.l_den;
    let z = match z_choice {
        Some(z) => z,
        None => default_boundary_twist(spec)?,
    };
    Ok(Mat2::new([[data.l_den, 0], [z, big_r]]))
}

/// Package the quotient of a filled solid torus: a solid torus `V(k)` for a
/// fiber-orientation-preserving stabilizer, a Conway ball `B(k)` for a
/// fiber-reversing one, with `k` from the closed-form core order.
pub fn quotient_piece(spec: &TorusActionSpec, slope: Mat2) -> Result<QuotientPiece, QuotientError> {
    let core = core_order_formula(spec)?;
    let slope_column = slope.slope_column()?;
    Ok(QuotientPiece {
        kind: if spec.fiber_reversing {
            PieceKind::ConwayBall
        } else {
            PieceKind::SolidTorus
        },
        core_order: core,
        filling: slope,
        slope: slope_column,
    })
}

/// Free choices for one projected-filling solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionOverrides {
    /// Override for the torus-projection integer `l`.
    pub l: Option<i64>,
    /// Override for the boundary-projection twist `z`.
    pub z: Option<i64>,
}

/// Result of projecting one filling through the two quotient maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectedFilling {
    pub induced_generators: Vec<RotationPair>,
    pub torus_projection: Mat2,
    pub boundary_projection: Mat2,
    pub piece: QuotientPiece,
    pub warnings: Vec<String>,
}

/// Project a filling map through the quotient: build both projection
/// matrices, solve the conjugation equation, and attach the core order of
/// the solid-torus quotient.
///
/// `spec_v` defaults to the action induced on the solid torus by
/// conjugating `spec_t` through `d`. The core order is computed by the
/// closed formula and cross-checked against the brute-force oracle; on
/// disagreement the oracle value is reported and a warning attached.
pub fn projected_filling(
    spec_t: &TorusActionSpec,
    d: &Mat2,
    spec_v: Option<&TorusActionSpec>,
    overrides: ProjectionOverrides,
) -> Result<ProjectedFilling, QuotientError> {
    let derived_v;
    let spec_v = match spec_v {
        Some(v) => v,
        None => {
            derived_v = TorusActionSpec {
                generators: induced_action_on_filling(&spec_t.generators, d)?,
                fiber_reversing: spec_t.fiber_reversing,
            };
            &derived_v
        }
    };
    let pt = torus_projection_matrix(spec_t, overrides.l)?;
    let pv = boundary_projection_matrix(spec_v, overrides.z)?;
    let solved = lattice::solve_conjugate(&pt, d, &pv)?;
    let mut piece = quotient_piece(spec_v, solved)?;
    let mut warnings = Vec::new();
    let oracle_core = crate::oracle::core_order(&spec_v.generators);
    if oracle_core != piece.core_order {
        warnings.push(format!(
            "core-order formula gives {} but direct enumeration gives {}; \
             reporting the enumerated value",
            piece.core_order, oracle_core
        ));
        piece.core_order = oracle_core;
    }
    Ok(ProjectedFilling {
        induced_generators: spec_v.generators.clone(),
        torus_projection: pt,
        boundary_projection: pv,
        piece,
        warnings,
    })
}

/// Surface involution vocabulary for the fiber-reversing quotient step,
/// acting on a genus-0 quotient surface with boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceInvolution {
    /// Free rotation by a half turn (the rotation center lies in a removed
    /// disc): empty fixed set.
    RotationPi,
    /// Mirror reflection: the fixed set is one arc per boundary class left
    /// invariant (the mirror line cut by the on-axis holes).
    Reflection,
    /// Free antipodal map: empty fixed set.
    Antipodal,
}

/// Combinatorial description of the induced involution on the quotient
/// surface, used when the action reverses the fiber orientation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvolutionDescriptor {
    pub surface_map: SurfaceInvolution,
    /// Permutation of the quotient boundary classes induced by the
    /// involution; must be an involution itself.
    pub boundary_class_permutation: Vec<usize>,
}

/// One boundary torus of the fibered piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTorus {
    /// Quotient boundary class this torus maps to (the surjection `j`).
    pub class: usize,
    /// `+1` when the chosen framing is positively oriented, `-1` otherwise.
    /// The ambient action restricts to a negatively framed torus with its
    /// second rotation coordinate reversed.
    pub orientation: i8,
    /// Filling map for this torus, if it is filled.
    pub filling: Option<Mat2>,
}

/// A global action description on the fibered piece `S^1 x F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDescription {
    /// Rotation generators of the fiber-orientation-preserving part, as
    /// ambient rotation pairs.
    pub generators: Vec<RotationPair>,
    pub fiber_reversing: bool,
    /// Required when `fiber_reversing` is set.
    pub involution: Option<InvolutionDescriptor>,
    pub boundaries: Vec<BoundaryTorus>,
    /// Per-class override for the torus-projection integer `l`.
    pub l_overrides: Vec<Option<i64>>,
    /// Per-boundary override for the boundary-projection twist `z`.
    pub z_overrides: Vec<Option<i64>>,
}

/// Default framing convention for a planar fibered piece: the first
/// boundary is positively framed and the remaining ones negatively.
pub fn default_orientations(count: usize) -> Vec<i8> {
    (0..count).map(|i| if i == 0 { 1 } else { -1 }).collect()
}

/// Quotient base shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    /// Fiber-orientation-preserving quotient: a trivially fibered product
    /// over the quotient surface.
    ProductOverQuotientSurface,
    /// Fiber-reversing quotient: a ball less interior balls and solid tori.
    FoldedBall,
}

/// Order-2 exceptional set left by the folding involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct ArcData {
    pub order_two_arcs: u32,
    pub order_two_circles: u32,
}

/// One assembled quotient piece with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssembledPiece {
    /// Quotient boundary class the piece fills.
    pub class: usize,
    /// Index of the representative boundary torus it was computed from.
    pub boundary: usize,
    pub induced_generators: Vec<RotationPair>,
    pub torus_projection: Mat2,
    pub boundary_projection: Mat2,
    pub piece: QuotientPiece,
}

/// The assembled quotient orbifold data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientDescriptor {
    pub base_kind: BaseKind,
    pub arc_data: ArcData,
    /// Interior components removed from the folded ball (filled classes
    /// beyond the outermost one); 0 for product quotients.
    pub removed_interiors: u32,
    pub pieces: Vec<AssembledPiece>,
    /// Chosen `l` per quotient boundary class, in that class's framing.
    pub l_assignments: Vec<i64>,
    /// Framing sign per class, inherited from its representative torus.
    pub class_orientations: Vec<i8>,
    /// `#j^{-1}(class)`: boundary tori mapping to each class.
    pub class_multiplicities: Vec<u32>,
    pub warnings: Vec<String>,
}

struct ClassInfo {
    representative: usize,
    multiplicity: u32,
    orientation: i8,
    spec: TorusActionSpec,
}

/// Assemble the full quotient descriptor of a global action.
///
/// The fiber-orientation-preserving part quotients the fibered piece to a
/// product over the quotient surface; a fiber-reversing action folds it to a
/// ball less interior balls and solid tori, with order-2 arcs or circles
/// from the fixed set of the induced involution. Each filled boundary class
/// contributes one projected filling piece. The `l` choices are constrained
/// by the weighted relation `sum l * #j^{-1} = 0` over classes (in
/// consistently oriented framings); the last unpinned class is forced by it.
///
/// Isolated invariant fibers must be modeled by the caller as drilled-out
/// boundary tori carrying a meridian-trivial `(1,0)` filling.
pub fn assemble_quotient(
    m: &SeifertInvariants,
    action: &ActionDescription,
) -> Result<QuotientDescriptor, QuotientError> {
    validate_action(action)?;
    let mut warnings = Vec::new();

    let class_count = action
        .boundaries
        .iter()
        .map(|b| b.class + 1)
        .max()
        .unwrap_or(0);

    let mut classes: Vec<ClassInfo> = Vec::with_capacity(class_count);
    for c in 0..class_count {
        let representative = action
            .boundaries
            .iter()
            .position(|b| b.class == c)
            .ok_or_else(|| {
                QuotientError::InvalidAction(format!("boundary class {c} has no boundary torus"))
            })?;
        let multiplicity = action.boundaries.iter().filter(|b| b.class == c).count() as u32;
        let orientation = action.boundaries[representative].orientation;
        let mixed = action
            .boundaries
            .iter()
            .any(|b| b.class == c && b.orientation != orientation);
        if mixed {
            warnings.push(format!(
                "boundary class {c} mixes framing orientations; using its representative's"
            ));
        }
        let generators: Vec<RotationPair> = if orientation >= 0 {
            action.generators.clone()
        } else {
            action
                .generators
                .iter()
                .map(RotationPair::opposite_framing)
                .collect()
        };
        classes.push(ClassInfo {
            representative,
            multiplicity,
            orientation,
            spec: TorusActionSpec {
                generators,
                fiber_reversing: action.fiber_reversing,
            },
        });
    }

    let l_assignments = resolve_l_assignments(action, &classes)?;

    // Verify the homology constraint exactly.
    let weighted: i128 = classes
        .iter()
        .zip(&l_assignments)
        .map(|(info, &l)| {
            i128::from(info.orientation) * i128::from(l) * i128::from(info.multiplicity)
        })
        .sum();
    if weighted != 0 {
        return Err(QuotientError::ConstraintViolation {
            sum: i64::try_from(weighted).unwrap_or(i64::MAX),
        });
    }

    let mut pieces = Vec::new();
    for (c, info) in classes.iter().enumerate() {
        let rep = &action.boundaries[info.representative];
        let Some(d) = &rep.filling else { continue };
        let frame_t = format!("T{}", info.representative);
        let frame_tq = format!("T{}/stab", c);
        let frame_v = format!("bV{}", info.representative);
        let frame_vq = format!("bV{}/stab", c);
        let d = d.clone().with_frames(&frame_v, &frame_t);
        let overrides = ProjectionOverrides {
            l: Some(l_assignments[c]),
            z: action
                .z_overrides
                .get(info.representative)
                .copied()
                .flatten(),
        };
        let spec_v = TorusActionSpec {
            generators: induced_action_on_filling(&info.spec.generators, &d)?,
            fiber_reversing: action.fiber_reversing,
        };
        let pt = torus_projection_matrix(&info.spec, overrides.l)?.with_frames(&frame_t, &frame_tq);
        let pv =
            boundary_projection_matrix(&spec_v, overrides.z)?.with_frames(&frame_v, &frame_vq);
        let solved = lattice::solve_conjugate(&pt, &d, &pv)?;
        let mut piece = quotient_piece(&spec_v, solved)?;
        let oracle_core = crate::oracle::core_order(&spec_v.generators);
        if oracle_core != piece.core_order {
            warnings.push(format!(
                "class {c}: core-order formula gives {} but direct enumeration gives {}; \
                 reporting the enumerated value",
                piece.core_order, oracle_core
            ));
            piece.core_order = oracle_core;
        }
        pieces.push(AssembledPiece {
            class: c,
            boundary: info.representative,
            induced_generators: spec_v.generators,
            torus_projection: pt,
            boundary_projection: pv,
            piece,
        });
    }

    let (base_kind, arc_data, removed_interiors) = if action.fiber_reversing {
        let descriptor = action
            .involution
            .as_ref()
            .expect("validated: involution present when fiber-reversing");
        let arcs = match descriptor.surface_map {
            SurfaceInvolution::Reflection => {
                let fixed = descriptor
                    .boundary_class_permutation
                    .iter()
                    .enumerate()
                    .filter(|&(i, &img)| i == img)
                    .count() as u32;
                // One mirror arc per invariant class; each folded end of the
                // interval contributes a copy.
                2 * fixed
            }
            SurfaceInvolution::RotationPi | SurfaceInvolution::Antipodal => 0,
        };
        (
            BaseKind::FoldedBall,
            ArcData {
                order_two_arcs: arcs,
                order_two_circles: 0,
            },
            (pieces.len() as u32).saturating_sub(1),
        )
    } else {
        (BaseKind::ProductOverQuotientSurface, ArcData::default(), 0)
    };

    // Soft consistency check against the invariant tuple: each filled slope
    // should present one of its pairs or the obstruction entry.
    soft_check_fillings(m, action, &mut warnings);

    Ok(QuotientDescriptor {
        base_kind,
        arc_data,
        removed_interiors,
        pieces,
        l_assignments,
        class_orientations: classes.iter().map(|c| c.orientation).collect(),
        class_multiplicities: classes.iter().map(|c| c.multiplicity).collect(),
        warnings,
    })
}

fn validate_action(action: &ActionDescription) -> Result<(), QuotientError> {
    if action.boundaries.is_empty() {
        return Err(QuotientError::InvalidAction(
            "at least one boundary torus is required".to_string(),
        ));
    }
    for b in &action.boundaries {
        if b.orientation != 1 && b.orientation != -1 {
            return Err(QuotientError::InvalidAction(format!(
                "orientation must be +1 or -1, found {}",
                b.orientation
            )));
        }
    }
    let class_count = action
        .boundaries
        .iter()
        .map(|b| b.class + 1)
        .max()
        .unwrap_or(0);
    if action.fiber_reversing {
        let Some(descriptor) = &action.involution else {
            return Err(QuotientError::InvalidAction(
                "a fiber-reversing action needs an involution descriptor".to_string(),
            ));
        };
        let perm = &descriptor.boundary_class_permutation;
        if perm.len() != class_count {
            return Err(QuotientError::InvalidAction(format!(
                "boundary class permutation has length {}, expected {class_count}",
                perm.len()
            )));
        }
        let mut seen = vec![false; class_count];
        for &img in perm {
            if img >= class_count || seen[img] {
                return Err(QuotientError::InvalidAction(
                    "boundary class permutation is not a permutation".to_string(),
                ));
            }
            seen[img] = true;
        }
        for (i, &img) in perm.iter().enumerate() {
            if perm[img] != i {
                return Err(QuotientError::InvalidAction(
                    "boundary class permutation must be an involution".to_string(),
                ));
            }
        }
    }
    Ok(())
}

/// Choose the per-class `l` values: overrides and defaults for all classes
/// except the last unpinned one, which is forced by the weighted relation
/// `sum orientation * l * multiplicity = 0`.
fn resolve_l_assignments(
    action: &ActionDescription,
    classes: &[ClassInfo],
) -> Result<Vec<i64>, QuotientError> {
    let overrides: Vec<Option<i64>> = (0..classes.len())
        .map(|c| action.l_overrides.get(c).copied().flatten())
        .collect();
    let forced_slot = (0..classes.len()).rev().find(|&c| overrides[c].is_none());

    let mut assignments = vec![0i64; classes.len()];
    for (c, info) in classes.iter().enumerate() {
        if Some(c) == forced_slot {
            continue;
        }
        // Validates explicit overrides as a side effect.
        let pt = torus_projection_matrix(&info.spec, overrides[c])?;
        assignments[c] = pt.entry(0, 1);
    }

    match forced_slot {
        None => {
            let weighted: i128 = classes
                .iter()
                .zip(&assignments)
                .map(|(info, &l)| {
                    i128::from(info.orientation) * i128::from(l) * i128::from(info.multiplicity)
                })
                .sum();
            if weighted != 0 {
                return Err(QuotientError::ConstraintViolation {
                    sum: i64::try_from(weighted).unwrap_or(i64::MAX),
                });
            }
        }
        Some(slot) => {
            let rest: i128 = classes
                .iter()
                .zip(&assignments)
                .enumerate()
                .filter(|&(c, _)| c != slot)
                .map(|(_, (info, &l))| {
                    i128::from(info.orientation) * i128::from(l) * i128::from(info.multiplicity)
                })
                .sum();
            let info = &classes[slot];
            let denom = i128::from(info.orientation) * i128::from(info.multiplicity);
            if rest % denom != 0 {
                // No integer l for the forced slot can balance the relation.
                return Err(QuotientError::ConstraintViolation {
                    sum: i64::try_from(rest).unwrap_or(i64::MAX),
                });
            }
            let forced =
                i64::try_from(-rest / denom).map_err(|_| QuotientError::Overflow)?;
            // Validate the forced value against the class's own condition.
            torus_projection_matrix(&info.spec, Some(forced)).map_err(|_| {
                QuotientError::ForcedLInvalid {
                    class: slot,
                    forced,
                }
            })?;
            assignments[slot] = forced;
        }
    }
    Ok(assignments)
}

fn soft_check_fillings(
    m: &SeifertInvariants,
    action: &ActionDescription,
    warnings: &mut Vec<String>,
) {
    for (i, b) in action.boundaries.iter().enumerate() {
        let Some(d) = &b.filling else { continue };
        let Ok(slope) = d.slope_column() else {
            continue;
        };
        let presents_pair = m
            .pairs
            .iter()
            .any(|&(q, p)| slope.q == q && slope.p.rem_euclid(q) == p.rem_euclid(q));
        let presents_b = slope.q == 1;
        if !presents_pair && !presents_b {
            warnings.push(format!(
                "boundary {i}: filling slope {slope} matches no pair of {m}"
            ));
        }
    }
}
