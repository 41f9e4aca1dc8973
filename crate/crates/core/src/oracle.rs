//! Independent brute-force verifier for the core-order formulas.
//!
//! A finite subgroup of the rotation group of the torus is generated by
//! rational rotation pairs; everything here works on the lattice
//! `(1/N)Z x (1/N)Z` mod 1, with `N` the least common multiple of all
//! generator denominators. The group is materialized by breadth-first
//! closure under addition, and the exceptional core order of the quotient
//! solid torus is recomputed by direct counting: the number of distinct
//! second coordinates among elements whose first coordinate is trivial.
//!
//! No part of this module shares code with the closed-form core-order
//! formulas in [`crate::quotient`]; it exists to check them.

use crate::quotient::RotationPair;
use num_integer::Integer;
use serde::Serialize;
use std::collections::{HashSet, VecDeque};
use std::fmt;

/// A finite rotation group on the torus: a set of rotation pairs closed
/// under componentwise addition mod 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationGroup {
    elements: Vec<RotationPair>,
}

impl RotationGroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// Elements in a deterministic sorted order.
    pub fn elements(&self) -> &[RotationPair] {
        &self.elements
    }

    pub fn contains(&self, g: &RotationPair) -> bool {
        self.elements.binary_search(g).is_ok()
    }
}

/// Least common multiple of all generator denominators.
fn common_denominator(generators: &[RotationPair]) -> i64 {
    let mut n: i64 = 1;
    for g in generators {
        n = n.lcm(&g.alpha().denom().abs());
        n = n.lcm(&g.beta().denom().abs());
    }
    n
}

/// Numerators of a rotation pair over the common denominator `n`.
fn scaled(g: &RotationPair, n: i64) -> (i64, i64) {
    (
        g.alpha().numer() * (n / g.alpha().denom()),
        g.beta().numer() * (n / g.beta().denom()),
    )
}

/// Closure of the generators under addition mod 1, computed exactly on the
/// common-denominator lattice by breadth-first search.
pub fn generate(generators: &[RotationPair]) -> RotationGroup {
    let n = common_denominator(generators);
    let gens: Vec<(i64, i64)> = generators.iter().map(|g| scaled(g, n)).collect();
    let mut seen: HashSet<(i64, i64)> = HashSet::new();
    let mut queue: VecDeque<(i64, i64)> = VecDeque::new();
    seen.insert((0, 0));
    queue.push_back((0, 0));
    while let Some((x, y)) = queue.pop_front() {
        for &(gx, gy) in &gens {
            let next = ((x + gx) % n, (y + gy) % n);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let mut elements: Vec<RotationPair> = seen
        .into_iter()
        .map(|(x, y)| RotationPair::new(crate::Rat::new(x, n), crate::Rat::new(y, n)))
        .collect();
    elements.sort();
    RotationGroup { elements }
}

/// Exceptional core order of the quotient solid torus: the number of
/// distinct second coordinates among group elements whose first coordinate
/// is 0 mod 1. These are exactly the elements fixing the core pointwise and
/// rotating the transverse disc.
pub fn core_order(generators: &[RotationPair]) -> u64 {
    match generators.len() {
        0 => 1,
        1 | 2 => core_order_scan(generators),
        _ => {
            let group = generate(generators);
            let mut seconds: Vec<crate::Rat> = group
                .elements()
                .iter()
                .filter(|g| *g.alpha().numer() == 0)
                .map(|g| g.beta())
                .collect();
            seconds.sort();
            seconds.dedup();
            seconds.len() as u64
        }
    }
}

/// Combination scan for one or two generators: every group element is
/// `s*g1 + t*g2` with `s, t` below the generator orders, so the core count
/// needs no set materialization. Agrees with the breadth-first closure by
/// construction (and by test).
fn core_order_scan(generators: &[RotationPair]) -> u64 {
    let n = common_denominator(generators);
    let gens: Vec<(i64, i64)> = generators.iter().map(|g| scaled(g, n)).collect();
    let order_mod = |v: (i64, i64)| -> i64 {
        let ox = n / n.gcd(&v.0);
        let oy = n / n.gcd(&v.1);
        ox.lcm(&oy)
    };
    let (g1, ord1) = (gens[0], order_mod(gens[0]));
    let (g2, ord2) = gens
        .get(1)
        .map(|&g| (g, order_mod(g)))
        .unwrap_or(((0, 0), 1));

    let mut seen = vec![false; n as usize];
    let mut count = 0u64;
    let mut xs = 0i64;
    let mut ys = 0i64;
    for _ in 0..ord1 {
        let mut x = xs;
        let mut y = ys;
        for _ in 0..ord2 {
            if x == 0 && !seen[y as usize] {
                seen[y as usize] = true;
                count += 1;
            }
            x += g2.0;
            if x >= n {
                x -= n;
            }
            y += g2.1;
            if y >= n {
                y -= n;
            }
        }
        xs += g1.0;
        if xs >= n {
            xs -= n;
        }
        ys += g1.1;
        if ys >= n {
            ys -= n;
        }
    }
    count
}

/// Which closed-form core-order formula a sweep checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreOrderFormula {
    /// Single generator: `k = b2 / gcd(a2, b2)`.
    Cyclic,
    /// Two generators, with the canonical conjugation residue.
    Bicyclic,
}

impl fmt::Display for CoreOrderFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreOrderFormula::Cyclic => write!(f, "cyclic"),
            CoreOrderFormula::Bicyclic => write!(f, "bicyclic"),
        }
    }
}

/// One formula-vs-oracle disagreement, with everything needed to recheck it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub generators: Vec<RotationPair>,
    pub formula_value: u64,
    pub oracle_value: u64,
}

/// Result of an exhaustive formula-vs-oracle sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub formula: CoreOrderFormula,
    pub max_denominator: u64,
    pub cases: u64,
    pub discrepancies: Vec<Discrepancy>,
}

/// All reduced rationals `p/q` with `0 <= p < q <= max_denominator`.
pub fn reduced_rotations(max_denominator: u64) -> Vec<crate::Rat> {
    let mut out = Vec::new();
    for q in 1..=max_denominator as i64 {
        for p in 0..q {
            if p.gcd(&q) == 1 {
                out.push(crate::Rat::new(p, q));
            }
        }
    }
    out
}

/// Exhaustively compare a core-order formula against the brute-force count
/// over every reduced rotation pair (or ordered pair of rotation pairs) with
/// denominators up to the bound. Every disagreement is reported with its
/// full inputs.
pub fn sweep(formula: CoreOrderFormula, max_denominator: u64) -> SweepReport {
    let values = reduced_rotations(max_denominator);
    let mut cases = 0u64;
    let mut discrepancies = Vec::new();
    match formula {
        CoreOrderFormula::Cyclic => {
            for &alpha in &values {
                for &beta in &values {
                    let g = RotationPair::new(alpha, beta);
                    cases += 1;
                    let formula_value = crate::quotient::core_order_cyclic(&g);
                    let oracle_value = core_order(&[g]);
                    if formula_value != oracle_value {
                        discrepancies.push(Discrepancy {
                            generators: vec![g],
                            formula_value,
                            oracle_value,
                        });
                    }
                }
            }
        }
        CoreOrderFormula::Bicyclic => {
            let pairs: Vec<RotationPair> = values
                .iter()
                .flat_map(|&a| values.iter().map(move |&b| RotationPair::new(a, b)))
                .collect();
            for g1 in &pairs {
                for g2 in &pairs {
                    cases += 1;
                    let formula_value = crate::quotient::core_order_bicyclic(g1, g2);
                    let oracle_value = core_order(&[*g1, *g2]);
                    if formula_value != oracle_value {
                        discrepancies.push(Discrepancy {
                            generators: vec![*g1, *g2],
                            formula_value,
                            oracle_value,
                        });
                    }
                }
            }
        }
    }
    SweepReport {
        formula,
        max_denominator,
        cases,
        discrepancies,
    }
}
