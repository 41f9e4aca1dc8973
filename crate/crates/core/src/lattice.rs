//! Exact 2×2 integer matrix algebra for filling maps, homology maps and the
//! conjugation solve that projects a filling through two quotient maps.
//!
//! Matrices act on column vectors, meridian in the first coordinate and
//! fiber/longitude in the second. Every matrix may carry advisory frame
//! labels naming its source and target bases; composing maps with
//! incompatible labels is an error, never a silent recomputation.

use crate::Rat;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// A 2×2 integer matrix with optional frame labels.
///
/// Serializes as the row-major array `[[a11,a12],[a21,a22]]`; frame labels
/// are advisory metadata: they are checked by [`compose`], never serialized,
/// and do not take part in equality.
#[derive(Debug, Clone)]
pub struct Mat2 {
    entries: [[i64; 2]; 2],
    source_frame: Option<String>,
    target_frame: Option<String>,
}

impl PartialEq for Mat2 {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Eq for Mat2 {}

/// A filling slope `(p, q)`: the slope column of a filling matrix, reduced
/// and canonicalized so that `q > 0` (or `p > 0` when `q = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillingSlope {
    pub p: i64,
    pub q: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("frame mismatch: cannot compose map from '{inner}' after map into '{outer}'")]
    FrameMismatch { outer: String, inner: String },
    #[error("singular matrix (determinant 0)")]
    SingularMatrix,
    #[error("entry overflow in exact matrix arithmetic")]
    Overflow,
    #[error("non-integral solution: projection data is inconsistent")]
    NonIntegralSolution,
    #[error("non-unimodular solution (determinant {det})")]
    NonUnimodularSolution { det: i64 },
    #[error("filling matrix must be unimodular, found determinant {det}")]
    NonUnimodularFilling { det: i64 },
    #[error("zero column cannot be a filling slope")]
    ZeroSlope,
}

fn narrow(v: i128) -> Result<i64, LatticeError> {
    i64::try_from(v).map_err(|_| LatticeError::Overflow)
}

impl Mat2 {
    pub fn new(entries: [[i64; 2]; 2]) -> Self {
        Mat2 {
            entries,
            source_frame: None,
            target_frame: None,
        }
    }

    pub fn identity() -> Self {
        Mat2::new([[1, 0], [0, 1]])
    }

    /// Attach advisory frame labels: the matrix maps `source` to `target`.
    pub fn with_frames(mut self, source: &str, target: &str) -> Self {
        self.source_frame = Some(source.to_string());
        self.target_frame = Some(target.to_string());
        self
    }

    pub fn entries(&self) -> [[i64; 2]; 2] {
        self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.entries[row][col]
    }

    pub fn source_frame(&self) -> Option<&str> {
        self.source_frame.as_deref()
    }

    pub fn target_frame(&self) -> Option<&str> {
        self.target_frame.as_deref()
    }

    pub fn det(&self) -> i128 {
        let [[a, b], [c, d]] = self.entries;
        i128::from(a) * i128::from(d) - i128::from(b) * i128::from(c)
    }

    /// Adjugate matrix, so that `self * adj = det * I`.
    pub fn adjugate(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.entries;
        Mat2::new([[d, -b], [-c, a]])
    }

    /// Second column `(p, q)`, canonicalized as a [`FillingSlope`].
    pub fn slope_column(&self) -> Result<FillingSlope, LatticeError> {
        FillingSlope::from_column(self.entries[0][1], self.entries[1][1])
    }

    /// Apply to a rational column vector.
    pub fn apply(&self, v: (Rat, Rat)) -> (Rat, Rat) {
        let [[a, b], [c, d]] = self.entries;
        (
            Rat::from_integer(a) * v.0 + Rat::from_integer(b) * v.1,
            Rat::from_integer(c) * v.0 + Rat::from_integer(d) * v.1,
        )
    }

    fn mul_entries(&self, rhs: &Mat2) -> Result<[[i64; 2]; 2], LatticeError> {
        let a = &self.entries;
        let b = &rhs.entries;
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let v = i128::from(a[i][0]) * i128::from(b[0][j])
                    + i128::from(a[i][1]) * i128::from(b[1][j]);
                *cell = narrow(v)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.entries;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(Mat2::new(<[[i64; 2]; 2]>::deserialize(deserializer)?))
    }
}

fn frames_compatible(outer_source: Option<&str>, inner_target: Option<&str>) -> bool {
    match (outer_source, inner_target) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    }
}

/// Matrix product `a * b`, the composite "apply `b`, then `a`".
///
/// Requires `b`'s target frame to match `a`'s source frame when both are
/// labeled; the result maps `b`'s source to `a`'s target.
pub fn compose(a: &Mat2, b: &Mat2) -> Result<Mat2, LatticeError> {
    if !frames_compatible(a.source_frame(), b.target_frame()) {
        return Err(LatticeError::FrameMismatch {
            outer: a.source_frame().unwrap_or("?").to_string(),
            inner: b.target_frame().unwrap_or("?").to_string(),
        });
    }
    Ok(Mat2 {
        entries: a.mul_entries(b)?,
        source_frame: b.source_frame.clone(),
        target_frame: a.target_frame.clone(),
    })
}

/// Exact rational inverse of an integer matrix.
pub fn invert_rational(a: &Mat2) -> Result<[[Rat; 2]; 2], LatticeError> {
    let det = a.det();
    if det == 0 {
        return Err(LatticeError::SingularMatrix);
    }
    let det = narrow(det)?;
    let adj = a.adjugate().entries();
    Ok([
        [Rat::new(adj[0][0], det), Rat::new(adj[0][1], det)],
        [Rat::new(adj[1][0], det), Rat::new(adj[1][1], det)],
    ])
}

/// Solve `pT * d = D' * pV` for the projected filling map `D'`.
///
/// `pT` is the projection of the boundary torus, `d` the filling map, `pV`
/// the projection of the solid-torus boundary. The solution
/// `D' = pT * d * pV^{-1}` must be integral with `|det D'| = 1`; anything
/// else signals inconsistent projection data. The slope of the projected
/// filling is the second column of the result.
pub fn solve_conjugate(pt: &Mat2, d: &Mat2, pv: &Mat2) -> Result<Mat2, LatticeError> {
    let (num, den) = solve_conjugate_parts(pt, d, pv)?;
    let mut out = [[0i64; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if num[i][j] % den != 0 {
                return Err(LatticeError::NonIntegralSolution);
            }
            *cell = narrow(num[i][j] / den)?;
        }
    }
    let solved = Mat2 {
        entries: out,
        source_frame: pv.target_frame.clone(),
        target_frame: pt.target_frame.clone(),
    };
    let det = solved.det();
    if det != 1 && det != -1 {
        return Err(LatticeError::NonUnimodularSolution {
            det: narrow(det).unwrap_or(i64::MAX),
        });
    }
    debug_assert_eq!(
        compose(&solved, pv).unwrap().entries(),
        compose(pt, d).unwrap().entries(),
        "re-multiplication check failed"
    );
    Ok(solved)
}

/// Rational variant of [`solve_conjugate`]: returns `pT * d * pV^{-1}` as a
/// rational matrix without integrality or unimodularity checks. Used to
/// study how the solution varies over projection choices.
pub fn solve_conjugate_rational(
    pt: &Mat2,
    d: &Mat2,
    pv: &Mat2,
) -> Result<[[Rat; 2]; 2], LatticeError> {
    let (num, den) = solve_conjugate_parts(pt, d, pv)?;
    let den = narrow(den)?;
    let mut out = [[Rat::from_integer(0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = Rat::new(narrow(num[i][j])?, den);
        }
    }
    Ok(out)
}

/// Shared numerator/denominator computation for the conjugation solves:
/// numerators `pT * d * adj(pV)` and denominator `det(pV)`.
fn solve_conjugate_parts(
    pt: &Mat2,
    d: &Mat2,
    pv: &Mat2,
) -> Result<([[i128; 2]; 2], i128), LatticeError> {
    let den = pv.det();
    if den == 0 {
        return Err(LatticeError::SingularMatrix);
    }
    let left = compose(pt, d)?;
    if !frames_compatible(left.source_frame(), pv.source_frame()) {
        return Err(LatticeError::FrameMismatch {
            outer: left.source_frame().unwrap_or("?").to_string(),
            inner: pv.source_frame().unwrap_or("?").to_string(),
        });
    }
    let l = left.entries();
    let adj = pv.adjugate().entries();
    let mut num = [[0i128; 2]; 2];
    for (i, row) in num.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = i128::from(l[i][0]) * i128::from(adj[0][j])
                + i128::from(l[i][1]) * i128::from(adj[1][j]);
        }
    }
    Ok((num, den))
}

impl FillingSlope {
    /// Reduce and canonicalize a slope column: divide out the gcd, then
    /// orient so that `q > 0`, or `p > 0` when `q = 0`. `(p,q)` and
    /// `(-p,-q)` denote the same filling.
    pub fn from_column(p: i64, q: i64) -> Result<FillingSlope, LatticeError> {
        if p == 0 && q == 0 {
            return Err(LatticeError::ZeroSlope);
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(FillingSlope { p, q })
    }
}

impl fmt::Display for FillingSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Lens space parameters `L(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LensSpace {
    pub p: i64,
    pub q: i64,
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.p, self.q)
    }
}

/// The lens space obtained from two symmetric `(b,1)` fillings of the
/// product of a circle and an annulus.
///
/// Computes the gluing word `[[-1,b],[0,1]] * [[1,0],[0,-1]] * [[-1,b],[0,1]]`
/// (which evaluates to `[[1,-2b],[0,-1]]`) and reads off the resulting lens
/// space `L(2b, 1)` from its slope column. `b = 0` gives `L(0,1)`, the
/// product of a sphere and a circle.
pub fn lens_from_trivial_fillings(b: i64) -> Result<(Mat2, LensSpace), LatticeError> {
    let filling = Mat2::new([[-1, b], [0, 1]]);
    let reverse = Mat2::new([[1, 0], [0, -1]]);
    let product = compose(&compose(&filling, &reverse)?, &filling)?;
    let slope = product.slope_column()?;
    Ok((
        product,
        LensSpace {
            p: slope.p,
            q: slope.q,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compose_identity_is_neutral() {
        let m = Mat2::new([[3, 5], [1, 2]]);
        assert_eq!(compose(&Mat2::identity(), &m).unwrap(), m);
        assert_eq!(compose(&m, &Mat2::identity()).unwrap(), m);
    }

    #[test]
    fn compose_involution_squares_to_identity() {
        let m = Mat2::new([[-1, 5], [0, 1]]);
        assert_eq!(compose(&m, &m).unwrap(), Mat2::identity());
    }

    #[test]
    fn compose_projection_with_filling() {
        let pt = Mat2::new([[6, 12], [0, 12]]);
        let d = Mat2::new([[-1, 2], [-1, 3]]);
        assert_eq!(
            compose(&pt, &d).unwrap(),
            Mat2::new([[-18, 48], [-12, 36]])
        );
    }

    #[test]
    fn compose_checks_frames() {
        let a = Mat2::new([[1, 0], [0, 1]]).with_frames("t", "t_quot");
        let b = Mat2::new([[1, 0], [0, 1]]).with_frames("v", "t");
        let ab = compose(&a, &b).unwrap();
        assert_eq!(ab.source_frame(), Some("v"));
        assert_eq!(ab.target_frame(), Some("t_quot"));
        assert!(matches!(
            compose(&b, &a),
            Err(LatticeError::FrameMismatch { .. })
        ));
    }

    #[test]
    fn invert_rational_examples() {
        let id = invert_rational(&Mat2::identity()).unwrap();
        assert_eq!(id[0][0], Rat::from_integer(1));
        assert_eq!(id[0][1], Rat::from_integer(0));
        assert_eq!(id[1][1], Rat::from_integer(1));

        let inv = invert_rational(&Mat2::new([[6, 0], [6, 12]])).unwrap();
        assert_eq!(inv[0][0], Rat::new(12, 72));
        assert_eq!(inv[0][1], Rat::from_integer(0));
        assert_eq!(inv[1][0], Rat::new(-6, 72));
        assert_eq!(inv[1][1], Rat::new(6, 72));

        assert!(matches!(
            invert_rational(&Mat2::new([[0, 0], [0, 0]])),
            Err(LatticeError::SingularMatrix)
        ));
    }

    #[test]
    fn solve_conjugate_first_boundary() {
        let pt = Mat2::new([[6, 12], [0, 12]]);
        let d = Mat2::new([[-1, 2], [-1, 3]]);
        let pv = Mat2::new([[6, 0], [6, 12]]);
        let solved = solve_conjugate(&pt, &d, &pv).unwrap();
        assert_eq!(solved, Mat2::new([[-7, 4], [-5, 3]]));
        assert_eq!(solved.slope_column().unwrap(), FillingSlope { p: 4, q: 3 });
    }

    #[test]
    fn solve_conjugate_second_boundary() {
        let pt = Mat2::new([[6, 12], [0, 12]]);
        let d = Mat2::new([[-1, 5], [0, 1]]);
        let pv = Mat2::new([[12, 0], [6, 6]]);
        let solved = solve_conjugate(&pt, &d, &pv).unwrap();
        assert_eq!(solved, Mat2::new([[-4, 7], [-1, 2]]));
        assert_eq!(solved.slope_column().unwrap(), FillingSlope { p: 7, q: 2 });
    }

    #[test]
    fn solve_conjugate_trivial_projections() {
        let m = Mat2::new([[2, 5], [1, 3]]);
        assert_eq!(
            solve_conjugate(&Mat2::identity(), &m, &Mat2::identity()).unwrap(),
            m
        );
    }

    #[test]
    fn solve_conjugate_rejects_non_integral() {
        let pt = Mat2::new([[6, 12], [0, 12]]);
        let d = Mat2::new([[-1, 2], [-1, 3]]);
        // An off-lattice projection choice: z = 1 is not a quotient map for
        // the relevant action, and the solve detects it.
        let pv = Mat2::new([[6, 0], [1, 12]]);
        assert!(matches!(
            solve_conjugate(&pt, &d, &pv),
            Err(LatticeError::NonIntegralSolution)
        ));
    }

    #[test]
    fn solve_conjugate_rejects_non_unimodular() {
        // Determinants 4, 1, 2: the solution is integral with determinant 2.
        let pt = Mat2::new([[2, 0], [0, 2]]);
        let pv = Mat2::new([[1, 0], [0, 2]]);
        assert!(matches!(
            solve_conjugate(&pt, &Mat2::identity(), &pv),
            Err(LatticeError::NonUnimodularSolution { det: 2 })
        ));
    }

    #[test]
    fn lens_from_trivial_fillings_examples() {
        let (product, lens) = lens_from_trivial_fillings(5).unwrap();
        assert_eq!(product, Mat2::new([[1, -10], [0, -1]]));
        assert_eq!(lens, LensSpace { p: 10, q: 1 });

        let (product, lens) = lens_from_trivial_fillings(0).unwrap();
        assert_eq!(product, Mat2::new([[1, 0], [0, -1]]));
        assert_eq!(lens, LensSpace { p: 0, q: 1 });

        let (product, lens) = lens_from_trivial_fillings(1).unwrap();
        assert_eq!(product, Mat2::new([[1, -2], [0, -1]]));
        assert_eq!(lens, LensSpace { p: 2, q: 1 });
    }

    #[test]
    fn slope_canonicalization() {
        assert_eq!(
            FillingSlope::from_column(-4, -3).unwrap(),
            FillingSlope { p: 4, q: 3 }
        );
        assert_eq!(
            FillingSlope::from_column(-1, 0).unwrap(),
            FillingSlope { p: 1, q: 0 }
        );
        assert_eq!(
            FillingSlope::from_column(2, 4).unwrap(),
            FillingSlope { p: 1, q: 2 }
        );
        assert!(FillingSlope::from_column(0, 0).is_err());
    }

    #[test]
    fn mat2_serializes_row_major() {
        let m = Mat2::new([[-18, 48], [-12, 36]]);
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            "[[-18,48],[-12,36]]"
        );
        let back: Mat2 = serde_json::from_str("[[-18,48],[-12,36]]").unwrap();
        assert_eq!(back, m);
    }

    fn small_mat() -> impl Strategy<Value = Mat2> {
        proptest::array::uniform2(proptest::array::uniform2(-9i64..=9))
            .prop_map(Mat2::new)
    }

    proptest! {
        #[test]
        fn det_is_multiplicative(a in small_mat(), b in small_mat()) {
            let ab = compose(&a, &b).unwrap();
            prop_assert_eq!(ab.det(), a.det() * b.det());
        }

        #[test]
        fn solve_satisfies_remultiplication(pt in small_mat(), d in small_mat(), pv in small_mat()) {
            if pv.det() != 0 {
                if let Ok(solved) = solve_conjugate(&pt, &d, &pv) {
                    prop_assert_eq!(
                        compose(&solved, &pv).unwrap(),
                        compose(&pt, &d).unwrap()
                    );
                    // |det D'| agrees with |det pT| * |det d| / |det pV|.
                    prop_assert_eq!(
                        solved.det().unsigned_abs() * pv.det().unsigned_abs(),
                        pt.det().unsigned_abs() * d.det().unsigned_abs()
                    );
                }
            }
        }
    }
}
