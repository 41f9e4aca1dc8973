//! Seifert invariant data model: parsing, normalization, Euler class and
//! base orbifold geometry.
//!
//! An orientable Seifert fibered manifold is presented as
//! `(g, o1|n2 | (q1,p1), ..., (qn,pn), (1,b))`: genus `g` of the base
//! surface, orientability marker, one `(q,p)` pair per exceptional fiber and
//! the obstruction term `b`. The normalized form has `q >= 2` and
//! `0 < p < q` for every pair, with all integral parts folded into `b`.

use crate::Rat;
use num_traits::Zero;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// A Seifert invariant tuple, possibly unnormalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeifertInvariants {
    /// Genus of the base surface (non-negative).
    pub genus: u32,
    /// `true` for an orientable base (`o1`), `false` for `n2`.
    pub base_orientable: bool,
    /// Ordered `(q, p)` pairs. Normalized form requires `q >= 2`, `0 < p < q`.
    pub pairs: Vec<(i64, i64)>,
    /// Obstruction term, the `(1, b)` entry.
    pub b: i64,
}

/// Base orbifold of a Seifert fibration: underlying surface plus cone orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseOrbifold {
    pub underlying: UnderlyingSurface,
    /// Cone point orders, sorted ascending (a multiset).
    pub cone_orders: Vec<u64>,
}

/// Underlying surface of a base orbifold within scope for the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnderlyingSurface {
    Sphere,
    Disc,
    ProjectivePlane,
}

impl fmt::Display for UnderlyingSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnderlyingSurface::Sphere => write!(f, "S2"),
            UnderlyingSurface::Disc => write!(f, "D"),
            UnderlyingSurface::ProjectivePlane => write!(f, "P2"),
        }
    }
}

/// The eight positive-curvature base shapes reachable by elliptic manifolds,
/// plus the bare projective plane (no cone point), which is positively curved
/// but listed nowhere in the dispatch table; see [`crate::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticBaseLabel {
    /// `S2` with no cone points.
    Sphere,
    /// `S2(q)`.
    SphereQ(u64),
    /// `S2(q1,q2)`, orders sorted.
    SphereQQ(u64, u64),
    /// `S2(2,2,q)`.
    SphereTwoTwoQ(u64),
    /// `S2(2,3,3)`.
    Sphere233,
    /// `S2(2,3,4)`.
    Sphere234,
    /// `S2(2,3,5)`.
    Sphere235,
    /// `P2(q)`; `None` is the bare projective plane.
    Projective(Option<u64>),
}

impl fmt::Display for EllipticBaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EllipticBaseLabel::Sphere => write!(f, "S2"),
            EllipticBaseLabel::SphereQ(q) => write!(f, "S2({q})"),
            EllipticBaseLabel::SphereQQ(a, b) => write!(f, "S2({a},{b})"),
            EllipticBaseLabel::SphereTwoTwoQ(q) => write!(f, "S2(2,2,{q})"),
            EllipticBaseLabel::Sphere233 => write!(f, "S2(2,3,3)"),
            EllipticBaseLabel::Sphere234 => write!(f, "S2(2,3,4)"),
            EllipticBaseLabel::Sphere235 => write!(f, "S2(2,3,5)"),
            EllipticBaseLabel::Projective(Some(q)) => write!(f, "P2({q})"),
            EllipticBaseLabel::Projective(None) => write!(f, "P2"),
        }
    }
}

/// Geometry classification of a Seifert invariant tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometryVerdict {
    /// Orbifold Euler characteristic of the base.
    pub chi_orb: Rat,
    /// Euler class `e = -(b + sum p_i/q_i)`.
    pub euler_class: Rat,
    /// Elliptic iff `chi_orb > 0` and `e != 0`.
    pub elliptic: bool,
    /// Base shape; present exactly when the manifold is positively curved
    /// over a supported base surface.
    pub base_label: Option<EllipticBaseLabel>,
}

/// Parse failure, with the byte offset into the input where it occurred.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    /// `p` is a multiple of `q` with `q >= 2`: no exceptional fiber with
    /// `0 < p < q` presents this pair, so the tuple is not a Seifert
    /// invariant presentation.
    #[error("pair ({q},{p}) is degenerate: p is a multiple of q >= 2")]
    DegeneratePair { q: i64, p: i64 },
    #[error("pair ({q},{p}) has non-positive multiplicity")]
    NonPositiveMultiplicity { q: i64, p: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("out-of-scope geometry: genus {genus}, orientable base: {orientable}")]
    OutOfScopeGeometry { genus: u32, orientable: bool },
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(found) if found == c => {
                self.pos += 1;
                Ok(())
            }
            Some(found) => Err(self.error(format!(
                "expected '{}', found '{}'",
                c as char, found as char
            ))),
            None => Err(self.error(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.bytes.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .map(|b| b.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error("expected an integer".to_string()));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse::<i64>().map_err(|_| ParseError {
            pos: start,
            message: format!("integer '{text}' out of range"),
        })
    }

    /// Try to consume a literal tag; nothing is consumed on mismatch.
    fn eat_tag(&mut self, tag: &str) -> bool {
        self.skip_ws();
        if self.bytes[self.pos..].starts_with(tag.as_bytes()) {
            self.pos += tag.len();
            true
        } else {
            false
        }
    }

    fn error(&mut self, message: String) -> ParseError {
        self.skip_ws();
        ParseError {
            pos: self.pos,
            message,
        }
    }
}

/// Parse the invariant grammar
/// `( g , o1|n2 | (q,p), ..., (1,b) )`, whitespace-insensitive.
///
/// The trailing `(1,b)` pair is optional and defaults to `b = 0`. The tuple
/// is returned raw (unnormalized); only `q >= 1` is enforced here.
pub fn parse_invariants(text: &str) -> Result<SeifertInvariants, ParseError> {
    let mut cur = Cursor::new(text);
    cur.expect(b'(')?;
    let genus_pos = {
        cur.skip_ws();
        cur.pos
    };
    let genus_raw = cur.integer()?;
    let genus = u32::try_from(genus_raw).map_err(|_| ParseError {
        pos: genus_pos,
        message: format!("genus must be non-negative, found {genus_raw}"),
    })?;
    cur.expect(b',')?;
    let base_orientable = if cur.eat_tag("o1") {
        true
    } else if cur.eat_tag("n2") {
        false
    } else {
        return Err(cur.error("expected base marker 'o1' or 'n2'".to_string()));
    };
    if !base_orientable && genus == 0 {
        return Err(ParseError {
            pos: genus_pos,
            message: "a non-orientable base needs genus >= 1 (cross-cap count)".to_string(),
        });
    }
    cur.expect(b'|')?;

    let mut pairs: Vec<(i64, i64)> = Vec::new();
    let mut after_comma = false;
    loop {
        match cur.peek() {
            Some(b')') if !after_comma => break,
            Some(b'(') => {}
            Some(other) => {
                return Err(
                    cur.error(format!("expected '(' or ')', found '{}'", other as char))
                )
            }
            None => return Err(cur.error("unbalanced parenthesis".to_string())),
        }
        cur.expect(b'(')?;
        let q_pos = {
            cur.skip_ws();
            cur.pos
        };
        let q = cur.integer()?;
        if q < 1 {
            return Err(ParseError {
                pos: q_pos,
                message: format!("fiber multiplicity q must be >= 1, found {q}"),
            });
        }
        cur.expect(b',')?;
        let p = cur.integer()?;
        cur.expect(b')')?;
        pairs.push((q, p));
        if cur.peek() == Some(b',') {
            cur.expect(b',')?;
            after_comma = true;
        } else {
            break;
        }
    }
    cur.expect(b')')?;
    if cur.peek().is_some() {
        return Err(cur.error("trailing input after closing parenthesis".to_string()));
    }

    // A final (1, c) entry is the obstruction term.
    let b = match pairs.last() {
        Some(&(1, c)) => {
            pairs.pop();
            c
        }
        _ => 0,
    };

    Ok(SeifertInvariants {
        genus,
        base_orientable,
        pairs,
        b,
    })
}

impl fmt::Display for SeifertInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{}|",
            self.genus,
            if self.base_orientable { "o1" } else { "n2" }
        )?;
        for (q, p) in &self.pairs {
            write!(f, "({q},{p}),")?;
        }
        write!(f, "(1,{}))", self.b)
    }
}

impl SeifertInvariants {
    /// True when every pair satisfies `q >= 2` and `0 < p < q`.
    pub fn is_normalized(&self) -> bool {
        self.pairs.iter().all(|&(q, p)| q >= 2 && 0 < p && p < q)
    }

    /// Reduce every pair to `0 < p < q`, folding integral parts and `(1, c)`
    /// pairs into the obstruction term. The presented manifold is unchanged.
    pub fn normalize(&self) -> Result<SeifertInvariants, NormalizeError> {
        let mut b = self.b;
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for &(q, p) in &self.pairs {
            if q < 1 {
                return Err(NormalizeError::NonPositiveMultiplicity { q, p });
            }
            if q == 1 {
                b += p;
                continue;
            }
            let r = p.rem_euclid(q);
            if r == 0 {
                return Err(NormalizeError::DegeneratePair { q, p });
            }
            b += (p - r) / q;
            pairs.push((q, r));
        }
        Ok(SeifertInvariants {
            genus: self.genus,
            base_orientable: self.base_orientable,
            pairs,
            b,
        })
    }

    /// Euler class `e = -(b + sum p_i/q_i)`, exact. Also meaningful on
    /// unnormalized tuples; normalization preserves the value.
    pub fn euler_class(&self) -> Rat {
        let mut sum = Rat::from_integer(self.b);
        for &(q, p) in &self.pairs {
            sum += Rat::new(p, q);
        }
        -sum
    }

    /// Cone orders `{q_i}`, sorted ascending. Pairs with `q = 1` mark no
    /// cone point and are skipped, so the result agrees with the normalized
    /// form.
    pub fn cone_orders(&self) -> Vec<u64> {
        let mut cones: Vec<u64> = self
            .pairs
            .iter()
            .filter(|&&(q, _)| q >= 2)
            .map(|&(q, _)| q as u64)
            .collect();
        cones.sort_unstable();
        cones
    }

    /// Orbifold Euler characteristic of the base,
    /// `chi(underlying) - sum (1 - 1/q_i)`, for any genus.
    pub fn chi_orb(&self) -> Rat {
        let surface_chi = if self.base_orientable {
            2 - 2 * i64::from(self.genus)
        } else {
            2 - i64::from(self.genus)
        };
        let mut chi = Rat::from_integer(surface_chi);
        for &(q, _) in &self.pairs {
            chi -= Rat::from_integer(1) - Rat::new(1, q);
        }
        chi
    }
}

/// Base orbifold and its exact Euler characteristic.
///
/// Supported underlying surfaces are the sphere (`g = 0`, orientable) and
/// the projective plane (`g = 1`, non-orientable); other genera are reported
/// as out-of-scope geometry.
pub fn base_orbifold(m: &SeifertInvariants) -> Result<(BaseOrbifold, Rat), GeometryError> {
    let underlying = match (m.base_orientable, m.genus) {
        (true, 0) => UnderlyingSurface::Sphere,
        (false, 1) => UnderlyingSurface::ProjectivePlane,
        _ => {
            return Err(GeometryError::OutOfScopeGeometry {
                genus: m.genus,
                orientable: m.base_orientable,
            })
        }
    };
    Ok((
        BaseOrbifold {
            underlying,
            cone_orders: m.cone_orders(),
        },
        m.chi_orb(),
    ))
}

fn elliptic_base_label(
    underlying: UnderlyingSurface,
    cones: &[u64],
) -> Option<EllipticBaseLabel> {
    match underlying {
        UnderlyingSurface::Sphere => match cones {
            [] => Some(EllipticBaseLabel::Sphere),
            [q] => Some(EllipticBaseLabel::SphereQ(*q)),
            [a, b] => Some(EllipticBaseLabel::SphereQQ(*a, *b)),
            [2, 2, q] => Some(EllipticBaseLabel::SphereTwoTwoQ(*q)),
            [2, 3, 3] => Some(EllipticBaseLabel::Sphere233),
            [2, 3, 4] => Some(EllipticBaseLabel::Sphere234),
            [2, 3, 5] => Some(EllipticBaseLabel::Sphere235),
            _ => None,
        },
        UnderlyingSurface::ProjectivePlane => match cones {
            [] => Some(EllipticBaseLabel::Projective(None)),
            [q] => Some(EllipticBaseLabel::Projective(Some(*q))),
            _ => None,
        },
        UnderlyingSurface::Disc => None,
    }
}

/// Geometry verdict: exact `chi_orb` and Euler class, ellipticity
/// (`chi_orb > 0` and `e != 0`), and the base shape when positively curved.
///
/// Total over all inputs: unsupported genera are never positively curved, so
/// they simply come out non-elliptic with no base label.
pub fn geometry_verdict(m: &SeifertInvariants) -> GeometryVerdict {
    let chi = m.chi_orb();
    let e = m.euler_class();
    let base_label = if chi > Rat::zero() {
        base_orbifold(m)
            .ok()
            .and_then(|(base, _)| elliptic_base_label(base.underlying, &base.cone_orders))
    } else {
        None
    };
    GeometryVerdict {
        chi_orb: chi,
        euler_class: e,
        elliptic: chi > Rat::zero() && !e.is_zero() && base_label.is_some(),
        base_label,
    }
}
