//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! and enforcing its runtime budget. Run with
//! `cargo test -p sfq-core --test acceptance`.

use num_integer::Integer;
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sfq_core::classify::{admissible_family, reversal_excluded, FamilyOutcome, RuleTag};
use sfq_core::invariants::{parse_invariants, EllipticBaseLabel, SeifertInvariants};
use sfq_core::lattice::{
    compose, lens_from_trivial_fillings, solve_conjugate, solve_conjugate_rational, Mat2,
};
use sfq_core::oracle::{self, CoreOrderFormula};
use sfq_core::quotient::{
    assemble_quotient, core_order_bicyclic, projected_filling, ActionDescription, BoundaryTorus,
    InvolutionDescriptor, PieceKind, ProjectionOverrides, RotationPair, SurfaceInvolution,
    TorusActionSpec,
};
use sfq_core::s2_atlas::{self, OcRule};
use sfq_core::Rat;
use std::time::{Duration, Instant};

fn rp(a: (i64, i64), b: (i64, i64)) -> RotationPair {
    RotationPair::new(Rat::new(a.0, a.1), Rat::new(b.0, b.1))
}

fn budget(name: &str, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed < limit,
        "{name} exceeded its runtime budget: {elapsed:?} >= {limit:?}"
    );
    println!("[PASS] {name} ({elapsed:?})");
}

/// The worked quotient pipeline input: the dihedral Z6 x Z12 action on the
/// lens space (0,o1|(3,2),(1,5)), with its two boundary fillings.
fn lens_quotient_action(l: Option<i64>, z: Option<i64>) -> ActionDescription {
    ActionDescription {
        generators: vec![rp((1, 6), (1, 3)), rp((0, 1), (1, 12))],
        fiber_reversing: true,
        involution: Some(InvolutionDescriptor {
            surface_map: SurfaceInvolution::Reflection,
            boundary_class_permutation: vec![0, 1],
        }),
        boundaries: vec![
            BoundaryTorus {
                class: 0,
                orientation: 1,
                filling: Some(Mat2::new([[-1, 2], [-1, 3]])),
            },
            BoundaryTorus {
                class: 1,
                orientation: -1,
                filling: Some(Mat2::new([[-1, 5], [0, 1]])),
            },
        ],
        l_overrides: vec![l, None],
        z_overrides: vec![z, z],
    }
}

/// Criterion 1: with the worked overrides (z = 6 on both boundary
/// projections, l = 12 on the torus projection) the pipeline reproduces
/// both projected fillings exactly and the second core order k = 6.
#[test]
fn acceptance_01_worked_quotient_regression() {
    let start = Instant::now();
    let m = parse_invariants("(0,o1|(3,2),(1,5))").unwrap();
    let descriptor = assemble_quotient(&m, &lens_quotient_action(Some(12), Some(6))).unwrap();

    assert_eq!(descriptor.pieces.len(), 2);
    let first = &descriptor.pieces[0];
    assert_eq!(first.torus_projection, Mat2::new([[6, 12], [0, 12]]));
    assert_eq!(first.boundary_projection, Mat2::new([[6, 0], [6, 12]]));
    assert_eq!(first.piece.filling, Mat2::new([[-7, 4], [-5, 3]]));
    assert_eq!((first.piece.slope.p, first.piece.slope.q), (4, 3));
    assert_eq!(first.piece.kind, PieceKind::ConwayBall);

    let second = &descriptor.pieces[1];
    assert_eq!(second.torus_projection, Mat2::new([[6, 12], [0, 12]]));
    assert_eq!(second.boundary_projection, Mat2::new([[12, 0], [6, 6]]));
    assert_eq!(second.piece.filling, Mat2::new([[-4, 7], [-1, 2]]));
    assert_eq!((second.piece.slope.p, second.piece.slope.q), (7, 2));
    assert_eq!(second.piece.core_order, 6);
    assert_eq!(second.piece.kind, PieceKind::ConwayBall);

    budget("criterion 1: worked quotient regression", start, Duration::from_secs(1));
}

/// Criterion 2: for both worked solves, varying the boundary twist z over
/// {0, ..., order-1} changes the first column of the solution but never the
/// slope column (p', q'). Verified exhaustively on the rational solve.
#[test]
fn acceptance_02_slope_invariance_under_twist() {
    let start = Instant::now();
    let order = 72i64;
    let cases = [
        // (torus projection, filling, boundary L, boundary R, expected slope)
        (Mat2::new([[6, 12], [0, 12]]), Mat2::new([[-1, 2], [-1, 3]]), 6, 12, (4, 3)),
        (Mat2::new([[6, 12], [0, 12]]), Mat2::new([[-1, 5], [0, 1]]), 12, 6, (7, 2)),
    ];
    for (pt, d, l_den, r, expected_slope) in cases {
        let mut first_columns = std::collections::BTreeSet::new();
        for z in 0..order {
            let pv = Mat2::new([[l_den, 0], [z, r]]);
            let solved = solve_conjugate_rational(&pt, &d, &pv).unwrap();
            let slope = (solved[0][1], solved[1][1]);
            assert_eq!(
                slope,
                (
                    Rat::from_integer(expected_slope.0),
                    Rat::from_integer(expected_slope.1)
                ),
                "slope moved at z={z}"
            );
            first_columns.insert((solved[0][0], solved[1][0]));
        }
        assert!(
            first_columns.len() > 1,
            "the twist must move the non-slope column"
        );
    }
    budget("criterion 2: slope invariance under the twist", start, Duration::from_secs(1));
}

/// Criterion 3: the single-generator core-order formula equals the
/// brute-force count for every reduced rotation pair with denominators
/// up to 12. Zero tolerance.
#[test]
fn acceptance_03_cyclic_core_order_oracle_equivalence() {
    let start = Instant::now();
    let report = oracle::sweep(CoreOrderFormula::Cyclic, 12);
    assert_eq!(report.cases, 2116);
    assert!(
        report.discrepancies.is_empty(),
        "formula/oracle disagreements: {:?}",
        report.discrepancies
    );
    budget("criterion 3: cyclic core-order oracle equivalence", start, Duration::from_secs(10));
}

/// Criterion 4: the two-generator core-order formula (reduced inputs,
/// canonical conjugation residue) against the brute-force count, exhaustive
/// over denominators <= 8 plus 1000 seeded random cases with denominators
/// <= 24. The discrepancy report is written out as an artifact, and the
/// worked first-boundary generators are pinned to the enumerated value 12
/// against the published worked value 4.
#[test]
fn acceptance_04_bicyclic_core_order_oracle_equivalence() {
    let start = Instant::now();
    let report = oracle::sweep(CoreOrderFormula::Bicyclic, 8);
    assert_eq!(report.cases, 234_256);
    assert!(
        report.discrepancies.is_empty(),
        "exhaustive formula/oracle disagreements: {:?}",
        report.discrepancies
    );

    let mut rng = StdRng::seed_from_u64(0x5f3e_1d2c);
    let random_rational = |rng: &mut StdRng| loop {
        let den = rng.gen_range(1..=24i64);
        let num = rng.gen_range(0..den);
        if num.gcd(&den) == 1 {
            return Rat::new(num, den);
        }
    };
    let mut random_disagreements = Vec::new();
    for _ in 0..1000 {
        let g1 = RotationPair::new(random_rational(&mut rng), random_rational(&mut rng));
        let g2 = RotationPair::new(random_rational(&mut rng), random_rational(&mut rng));
        let formula = core_order_bicyclic(&g1, &g2);
        let oracle_value = oracle::core_order(&[g1, g2]);
        if formula != oracle_value {
            random_disagreements.push((g1, g2, formula, oracle_value));
        }
    }
    assert!(
        random_disagreements.is_empty(),
        "random formula/oracle disagreements: {random_disagreements:?}"
    );

    // The worked first-boundary case: enumeration adjudicates 12, not the
    // published worked value 4.
    let worked = [rp((1, 6), (1, 6)), rp((1, 6), (1, 4))];
    let oracle_value = oracle::core_order(&worked);
    let formula_value = core_order_bicyclic(&worked[0], &worked[1]);
    assert_eq!(oracle_value, 12);
    assert_eq!(formula_value, 12);
    let published_worked_value = 4u64;
    assert_ne!(oracle_value, published_worked_value);

    let artifact = serde_json::json!({
        "schema": 1,
        "exhaustive": {
            "formula": "bicyclic",
            "max_denominator": 8,
            "cases": report.cases,
            "discrepancies": report.discrepancies,
        },
        "random": {
            "max_denominator": 24,
            "cases": 1000,
            "seed": "0x5f3e1d2c",
            "discrepancies": random_disagreements.len(),
        },
        "worked_case_check": {
            "generators": worked,
            "formula_value": formula_value,
            "enumerated_value": oracle_value,
            "published_worked_value": published_worked_value,
            "note": "the published worked computation plugs unreduced inputs into the \
                      two-generator formula and reports 4; reduced inputs and direct \
                      enumeration both give 12, and the enumerated value is reported",
        },
    });
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("bicyclic_core_order_report.json");
    std::fs::write(&path, serde_json::to_string_pretty(&artifact).unwrap()).unwrap();
    println!("discrepancy report artifact: {}", path.display());

    budget("criterion 4: bicyclic core-order oracle equivalence", start, Duration::from_secs(60));
}

/// Criterion 5: the two-trivial-fillings lens computation returns L(2b,1)
/// for b in {-5,...,5}, with the gluing word equal to [[1,-2b],[0,-1]]
/// entrywise.
#[test]
fn acceptance_05_trivial_filling_lens_spaces() {
    let start = Instant::now();
    for b in -5..=5i64 {
        let (product, lens) = lens_from_trivial_fillings(b).unwrap();
        assert_eq!(product, Mat2::new([[1, -2 * b], [0, -1]]), "b = {b}");
        assert_eq!((lens.p, lens.q), (2 * b, 1), "b = {b}");
    }
    budget("criterion 5: trivial-filling lens spaces", start, Duration::from_secs(1));
}

/// Criterion 6: the sphere-action table audit at n in {1,2,3}. Rows whose
/// printed data is internally consistent must satisfy |G| = lcm * index;
/// the known anomalies (most prominently the octahedral row's printed LCM
/// 12 against orbit numbers (6,8,12)) are reported with both readings and
/// expected explicitly.
#[test]
fn acceptance_06_sphere_action_table_audit() {
    let start = Instant::now();
    let expected_lcm_mismatches: [(u64, &[u8]); 3] = [
        (1, &[5, 6, 8, 11, 12, 13, 16, 19, 21]),
        (2, &[2, 5, 6, 8, 9, 11, 12, 13, 16, 19]),
        (3, &[2, 5, 6, 8, 11, 12, 13, 16, 19, 21]),
    ];
    for (n, expected) in expected_lcm_mismatches {
        let audits = s2_atlas::audit_rows(n).unwrap();
        let lcm_mismatches: Vec<u8> = audits
            .iter()
            .filter(|a| !a.lcm_matches)
            .map(|a| a.number)
            .collect();
        assert_eq!(lcm_mismatches, expected, "lcm mismatches at n={n}");

        for audit in &audits {
            // The only printed lcm*index that misses the group order is the
            // icosahedral row (60 vs 30*1); everything else is consistent.
            assert_eq!(
                audit.stored_product_matches_order,
                audit.number != 7,
                "row {} at n={n}",
                audit.number
            );
            assert!(audit.oc_consistent, "row {} at n={n}", audit.number);
        }

        // The octahedral anomaly, both readings: printed (12, 2) against
        // recomputed (24, 1) - the recomputed reading would flip the rule.
        let row6 = &audits[5];
        assert_eq!((row6.stored_lcm, row6.stored_index), (12, 2));
        assert_eq!((row6.recomputed_lcm, row6.recomputed_index), (24, Some(1)));
        let row = s2_atlas::row(6, n).unwrap();
        assert_eq!(row.oc_rule, OcRule::BEven);
    }
    budget("criterion 6: sphere-action table audit", start, Duration::from_secs(1));
}

/// Strategy for random normalized elliptic invariants with cone orders <= 9.
fn elliptic_invariants(include_projective: bool) -> BoxedStrategy<SeifertInvariants> {
    let b = -6i64..=6;
    let pair = |q: i64| (Just(q), 1..q);
    let sphere = (1i64..=6, any::<bool>())
        .prop_map(|(b, neg)| make(0, true, vec![], if neg { -b } else { b }));
    let sphere_q = (2i64..=9, b.clone())
        .prop_flat_map(move |(q, b)| pair(q).prop_map(move |p| make(0, true, vec![p], b)));
    let sphere_qq = (2i64..=9, 2i64..=9, b.clone())
        .prop_flat_map(move |(q1, q2, b)| {
            (pair(q1), pair(q2)).prop_map(move |(p1, p2)| make(0, true, vec![p1, p2], b))
        })
        .prop_filter("nonzero euler class", |m| {
            !num_traits::Zero::is_zero(&m.euler_class())
        });
    let sphere_22q = (2i64..=9, b.clone()).prop_flat_map(move |(q, b)| {
        pair(q).prop_map(move |p| make(0, true, vec![(2, 1), (2, 1), p], b))
    });
    let sphere_233 = (1i64..=2, 1i64..=2, b.clone())
        .prop_map(|(p1, p2, b)| make(0, true, vec![(2, 1), (3, p1), (3, p2)], b));
    let sphere_234 = (1i64..=2, prop::sample::select(vec![1i64, 3]), b.clone())
        .prop_map(|(p1, p2, b)| make(0, true, vec![(2, 1), (3, p1), (4, p2)], b));
    let sphere_235 = (1i64..=2, 1i64..=4, b.clone())
        .prop_map(|(p1, p2, b)| make(0, true, vec![(2, 1), (3, p1), (5, p2)], b));
    let projective = (2i64..=9, b)
        .prop_flat_map(move |(q, b)| pair(q).prop_map(move |p| make(1, false, vec![p], b)));

    fn make(genus: u32, orientable: bool, pairs: Vec<(i64, i64)>, b: i64) -> SeifertInvariants {
        SeifertInvariants {
            genus,
            base_orientable: orientable,
            pairs,
            b,
        }
    }

    if include_projective {
        prop_oneof![
            sphere,
            sphere_q,
            sphere_qq,
            sphere_22q,
            sphere_233,
            sphere_234,
            sphere_235,
            projective
        ]
        .boxed()
    } else {
        prop_oneof![
            sphere,
            sphere_q,
            sphere_qq,
            sphere_22q,
            sphere_233,
            sphere_234,
            sphere_235
        ]
        .boxed()
    }
}

/// The rule each elliptic base label must dispatch to, recomputed
/// independently of the dispatch implementation.
fn expected_rule(m: &SeifertInvariants) -> RuleTag {
    let label = sfq_core::invariants::geometry_verdict(m)
        .base_label
        .expect("elliptic input");
    match label {
        EllipticBaseLabel::Sphere => RuleTag::NoCriticalFibers,
        EllipticBaseLabel::SphereQ(_) => RuleTag::OneCriticalFiber,
        EllipticBaseLabel::SphereQQ(..) => {
            let mut pairs = m.pairs.clone();
            pairs.sort_unstable();
            if pairs[0] == pairs[1] {
                RuleTag::TwoEqualCriticalFibersDeferred
            } else {
                RuleTag::TwoDistinctCriticalFibers
            }
        }
        EllipticBaseLabel::SphereTwoTwoQ(2) => RuleTag::ThreeCriticalFibersAllEqual,
        EllipticBaseLabel::SphereTwoTwoQ(_) => RuleTag::ThreeCriticalFibersTwoEqual,
        EllipticBaseLabel::Sphere233 => {
            let mut ps: Vec<i64> = m
                .pairs
                .iter()
                .filter(|&&(q, _)| q == 3)
                .map(|&(_, p)| p)
                .collect();
            ps.sort_unstable();
            if ps[0] == ps[1] {
                RuleTag::ThreeCriticalFibersTwoEqual
            } else {
                RuleTag::ThreeCriticalFibersAllDistinct
            }
        }
        EllipticBaseLabel::Sphere234 | EllipticBaseLabel::Sphere235 => {
            RuleTag::ThreeCriticalFibersAllDistinct
        }
        EllipticBaseLabel::Projective(_) => RuleTag::ProjectiveBase,
    }
}

/// Criterion 7: each of the eight elliptic base shapes dispatches to its
/// stated family (with the alternative-reading caveats attached on the
/// triple-fiber shapes), and 200 random normalized elliptic invariants
/// dispatch totally, each to exactly the rule its base shape demands.
#[test]
fn acceptance_07_family_dispatch() {
    let start = Instant::now();
    let fixtures: [(&str, RuleTag, Option<&str>); 9] = [
        ("(0,o1|(1,3))", RuleTag::NoCriticalFibers, Some("(Z_m x H) o- Z_2")),
        ("(0,o1|(3,2),(1,5))", RuleTag::OneCriticalFiber, Some("Dih(Z_m x Z_n)")),
        ("(0,o1|(3,1),(3,2),(1,1))", RuleTag::TwoDistinctCriticalFibers, Some("Dih(Z_m x Z_n)")),
        ("(0,o1|(3,1),(3,1),(1,1))", RuleTag::TwoEqualCriticalFibersDeferred, None),
        ("(0,o1|(2,1),(2,1),(5,2),(1,1))", RuleTag::ThreeCriticalFibersTwoEqual, Some("Dih(Z_m x Z_2)")),
        ("(0,o1|(2,1),(2,1),(2,1),(1,1))", RuleTag::ThreeCriticalFibersAllEqual, Some("(Z_m x Dih(Z_3)) o- Z_2")),
        ("(0,o1|(2,1),(3,1),(3,2),(1,1))", RuleTag::ThreeCriticalFibersAllDistinct, Some("Dih(Z_m)")),
        ("(0,o1|(2,1),(3,1),(5,4),(1,-1))", RuleTag::ThreeCriticalFibersAllDistinct, Some("Dih(Z_m)")),
        ("(1,n2|(3,1),(1,1))", RuleTag::ProjectiveBase, Some("Z_2 x Dih(Z_n)")),
    ];
    for (input, rule, expr) in fixtures {
        let m = parse_invariants(input).unwrap().normalize().unwrap();
        let outcome = admissible_family(&m).unwrap();
        assert_eq!(outcome.rule(), rule, "{input}");
        match (expr, &outcome) {
            (Some(expected), FamilyOutcome::Bounded(family)) => {
                assert_eq!(family.expr.to_string(), expected, "{input}");
            }
            (None, FamilyOutcome::Deferred { .. }) => {}
            _ => panic!("unexpected outcome shape for {input}: {outcome:?}"),
        }
    }
    // The triple-fiber shapes with an alternative prose reading carry it.
    for input in ["(0,o1|(2,1),(3,1),(3,1),(1,1))", "(0,o1|(2,1),(3,1),(5,4),(1,-1))"] {
        let m = parse_invariants(input).unwrap().normalize().unwrap();
        let outcome = admissible_family(&m).unwrap();
        assert!(
            outcome.caveats().iter().any(|c| c.contains("alternative")),
            "{input} should carry the alternative-reading caveat"
        );
    }

    let mut runner = TestRunner::new(ProptestConfig {
        cases: 200,
        ..ProptestConfig::default()
    });
    runner
        .run(&elliptic_invariants(true), |m| {
            prop_assert!(m.is_normalized());
            prop_assert!(sfq_core::invariants::geometry_verdict(&m).elliptic);
            let outcome = admissible_family(&m).map_err(|e| {
                proptest::test_runner::TestCaseError::fail(format!("dispatch failed: {e}"))
            })?;
            prop_assert_eq!(outcome.rule(), expected_rule(&m));
            Ok(())
        })
        .unwrap();
    budget("criterion 7: family dispatch totality", start, Duration::from_secs(1));
}

/// Criterion 8: every generated elliptic manifold over an orientable base is
/// excluded from orientation-reversing actions, with the nonzero Euler class
/// among the reasons.
#[test]
fn acceptance_08_reversal_exclusion_on_elliptic() {
    let start = Instant::now();
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 200,
        ..ProptestConfig::default()
    });
    runner
        .run(&elliptic_invariants(false), |m| {
            let verdict = reversal_excluded(&m).map_err(|e| {
                proptest::test_runner::TestCaseError::fail(format!("predicate failed: {e}"))
            })?;
            prop_assert!(verdict.excluded);
            prop_assert!(verdict
                .reasons
                .contains(&sfq_core::classify::ReversalReason::NonzeroEulerClass));
            Ok(())
        })
        .unwrap();
    budget("criterion 8: reversal exclusion on elliptic inputs", start, Duration::from_secs(1));
}

fn raw_invariants() -> impl Strategy<Value = SeifertInvariants> {
    (
        0u32..3,
        any::<bool>(),
        prop::collection::vec((1i64..9, -20i64..20), 0..5),
        -10i64..10,
    )
        .prop_map(|(genus, base_orientable, pairs, b)| SeifertInvariants {
            // There is no non-orientable surface of genus 0.
            genus: if base_orientable { genus } else { genus.max(1) },
            base_orientable,
            pairs,
            b,
        })
}

/// Criterion 9a: normalization is idempotent.
#[test]
fn acceptance_09a_normalize_idempotent() {
    let start = Instant::now();
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 512,
        ..ProptestConfig::default()
    });
    runner
        .run(&raw_invariants(), |m| {
            if let Ok(n) = m.normalize() {
                prop_assert!(n.is_normalized());
                prop_assert_eq!(n.normalize().unwrap(), n);
            }
            Ok(())
        })
        .unwrap();
    budget("criterion 9a: normalize idempotence", start, Duration::from_secs(10));
}

/// Criterion 9b: the Euler class is invariant under normalization and
/// matches the raw-tuple formula.
#[test]
fn acceptance_09b_euler_class_normalization_invariant() {
    let start = Instant::now();
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 512,
        ..ProptestConfig::default()
    });
    runner
        .run(&raw_invariants(), |m| {
            if let Ok(n) = m.normalize() {
                let mut raw = Rat::from_integer(m.b);
                for &(q, p) in &m.pairs {
                    raw += Rat::new(p, q);
                }
                prop_assert_eq!(n.euler_class(), -raw);
            }
            Ok(())
        })
        .unwrap();
    budget("criterion 9b: euler class invariance", start, Duration::from_secs(10));
}

fn unimodular_matrix() -> impl Strategy<Value = Mat2> {
    (
        prop::collection::vec((any::<bool>(), 1i64..=3), 0..6),
        any::<bool>(),
    )
        .prop_map(|(moves, flip)| {
            let mut m = Mat2::identity();
            for (left, k) in moves {
                let shear = if left {
                    Mat2::new([[1, k], [0, 1]])
                } else {
                    Mat2::new([[1, 0], [k, 1]])
                };
                m = compose(&m, &shear).unwrap();
            }
            if flip {
                m = compose(&m, &Mat2::new([[1, 0], [0, -1]])).unwrap();
            }
            m
        })
}

fn small_rotation() -> impl Strategy<Value = RotationPair> {
    ((1i64..=6), (0i64..6), (1i64..=6), (0i64..6))
        .prop_map(|(ad, an, bd, bn)| rp((an, ad), (bn, bd)))
}

/// Whether the generators genuinely produce the direct-product group the
/// projection formulas presume: group order equals the product of the
/// generator orders.
fn independent_generators(generators: &[RotationPair]) -> bool {
    let product: u64 = generators
        .iter()
        .map(|g| {
            let (_, a2, _, b2) = g.parts();
            a2.lcm(&b2) as u64
        })
        .product();
    oracle::generate(generators).order() == product
}

/// Criterion 9c: every pipeline solve satisfies the re-multiplication
/// identity `pT * d = D' * pV` exactly and is unimodular.
#[test]
fn acceptance_09c_solve_remultiplication() {
    let start = Instant::now();
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 512,
        ..ProptestConfig::default()
    });
    let strategy = (
        prop::collection::vec(small_rotation(), 1..=2),
        unimodular_matrix(),
        any::<bool>(),
    );
    runner
        .run(&strategy, |(generators, d, reversing)| {
            let spec = TorusActionSpec {
                generators,
                fiber_reversing: reversing,
            };
            let result = match projected_filling(&spec, &d, None, ProjectionOverrides::default()) {
                Ok(result) => result,
                // Generator pairs outside the direct-product hypothesis of
                // the projection formulas signal themselves as inconsistent
                // projection data; anything else is a genuine failure.
                Err(e) if !independent_generators(&spec.generators) => {
                    let _ = e;
                    return Err(proptest::test_runner::TestCaseError::reject(
                        "dependent generator pair",
                    ));
                }
                Err(e) => {
                    return Err(proptest::test_runner::TestCaseError::fail(format!(
                        "pipeline failed on {spec:?} with {d}: {e}"
                    )))
                }
            };
            let pt = &result.torus_projection;
            let pv = &result.boundary_projection;
            let solved = &result.piece.filling;
            prop_assert_eq!(
                compose(solved, pv).unwrap().entries(),
                compose(pt, &d).unwrap().entries()
            );
            prop_assert_eq!(solved.det().abs(), 1);
            // Determinant bookkeeping: |det D'| = |det pT| |det d| / |det pV|.
            prop_assert_eq!(pt.det().abs() * d.det().abs(), solved.det().abs() * pv.det().abs());
            Ok(())
        })
        .unwrap();
    budget("criterion 9c: solve re-multiplication", start, Duration::from_secs(10));
}

/// Criterion 9d: every assembled quotient satisfies the weighted relation
/// `sum orientation * l * multiplicity = 0` exactly, recomputed from the
/// descriptor.
#[test]
fn acceptance_09d_assembled_l_relation() {
    let start = Instant::now();
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 512,
        ..ProptestConfig::default()
    });
    let strategy = (
        prop::collection::vec(small_rotation(), 0..=2),
        prop::collection::vec((unimodular_matrix(), any::<bool>()), 1..=4),
        any::<bool>(),
        1usize..=3,
    );
    runner
        .run(&strategy, |(generators, boundary_data, reversing, class_count)| {
            let count = boundary_data.len();
            let class_count = class_count.min(count);
            let boundaries: Vec<BoundaryTorus> = boundary_data
                .iter()
                .enumerate()
                .map(|(i, (d, filled))| BoundaryTorus {
                    class: i % class_count,
                    orientation: if i == 0 { 1 } else { -1 },
                    filling: filled.then(|| d.clone()),
                })
                .collect();
            let action = ActionDescription {
                generators,
                fiber_reversing: reversing,
                involution: reversing.then(|| InvolutionDescriptor {
                    surface_map: SurfaceInvolution::Reflection,
                    boundary_class_permutation: (0..class_count).collect(),
                }),
                boundaries,
                l_overrides: vec![],
                z_overrides: vec![],
            };
            let m = parse_invariants("(0,o1|(1,0))").unwrap();
            match assemble_quotient(&m, &action) {
                Ok(descriptor) => {
                    let weighted: i64 = descriptor
                        .l_assignments
                        .iter()
                        .zip(&descriptor.class_orientations)
                        .zip(&descriptor.class_multiplicities)
                        .map(|((&l, &sign), &mult)| i64::from(sign) * l * i64::from(mult))
                        .sum();
                    prop_assert_eq!(weighted, 0);
                    // Reversing actions yield Conway balls everywhere,
                    // orientation-preserving ones solid tori.
                    for piece in &descriptor.pieces {
                        prop_assert_eq!(
                            piece.piece.kind,
                            if reversing {
                                PieceKind::ConwayBall
                            } else {
                                PieceKind::SolidTorus
                            }
                        );
                    }
                }
                // A forced last l can genuinely be unrealizable for the
                // class's projection condition, and dependent generator
                // pairs fall outside the projection formulas; both are
                // clean errors, not broken descriptors.
                Err(e) => {
                    prop_assert!(
                        matches!(
                            e,
                            sfq_core::quotient::QuotientError::ForcedLInvalid { .. }
                                | sfq_core::quotient::QuotientError::ConstraintViolation { .. }
                        ) || !independent_generators(&action.generators),
                        "unexpected assembly error: {e}"
                    );
                }
            }
            Ok(())
        })
        .unwrap();
    budget("criterion 9d: assembled l-relation", start, Duration::from_secs(10));
}

/// Companion check to criterion 1: the defaults (least valid twist, default
/// l, forced final l) reproduce the same slopes and core orders without any
/// overrides, and the solve frames chain up.
#[test]
fn acceptance_01b_defaults_reproduce_worked_slopes() {
    let start = Instant::now();
    let m = parse_invariants("(0,o1|(3,2),(1,5))").unwrap();
    let descriptor = assemble_quotient(&m, &lens_quotient_action(None, None)).unwrap();
    assert_eq!(descriptor.l_assignments, vec![12, 12]);
    let slopes: Vec<(i64, i64)> = descriptor
        .pieces
        .iter()
        .map(|p| (p.piece.slope.p, p.piece.slope.q))
        .collect();
    assert_eq!(slopes, vec![(4, 3), (7, 2)]);
    assert_eq!(descriptor.pieces[0].piece.core_order, 12);
    assert_eq!(descriptor.pieces[1].piece.core_order, 6);
    assert_eq!(descriptor.arc_data.order_two_arcs, 4);
    assert_eq!(descriptor.removed_interiors, 1);
    budget("criterion 1 companion: default choices", start, Duration::from_secs(1));
}

/// Companion check to criterion 2: the integral solve accepts exactly the
/// twists that are quotient maps, and the full solve agrees with the
/// rational solve there.
#[test]
fn acceptance_02b_integral_solve_on_valid_twists() {
    let start = Instant::now();
    let pt = Mat2::new([[6, 12], [0, 12]]);
    let d = Mat2::new([[-1, 2], [-1, 3]]);
    for z in 0..72 {
        let pv = Mat2::new([[6, 0], [z, 12]]);
        let solved = solve_conjugate(&pt, &d, &pv);
        if z % 6 == 0 {
            let solved = solved.unwrap();
            assert_eq!(solved.slope_column().unwrap().p, 4);
            assert_eq!(solved.slope_column().unwrap().q, 3);
        } else {
            assert!(solved.is_err(), "z = {z} is not a quotient twist");
        }
    }
    budget("criterion 2 companion: integral solve domain", start, Duration::from_secs(1));
}
