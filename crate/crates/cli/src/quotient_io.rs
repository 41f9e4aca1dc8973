//! JSON request schema and output rendering for the `quotient` subcommand.

use crate::QuotientArgs;
use serde::Deserialize;
use serde_json::json;
use sfq_core::invariants::parse_invariants;
use sfq_core::lattice::Mat2;
use sfq_core::quotient::{
    assemble_quotient, default_orientations, ActionDescription, BaseKind, BoundaryTorus,
    InvolutionDescriptor, PieceKind, QuotientDescriptor, RotationPair, SurfaceInvolution,
};
use sfq_core::Rat;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientRequest {
    /// Invariant tuple of the filled manifold, for the report echo and the
    /// slope cross-check.
    invariants: String,
    /// Rotation-pair generators as `["p/q", "p/q"]` strings.
    #[serde(default)]
    generators: Vec<[String; 2]>,
    #[serde(default)]
    fiber_reversing: bool,
    #[serde(default)]
    involution: Option<InvolutionInput>,
    /// One entry per boundary torus; `null` leaves a boundary unfilled.
    fillings: Vec<Option<[[i64; 2]; 2]>>,
    /// Framing signs per boundary; defaults to `+1` for the first boundary
    /// and `-1` for the rest.
    #[serde(default)]
    orientations: Option<Vec<i8>>,
    /// Quotient boundary class per boundary torus; defaults to the identity
    /// assignment (all boundaries in distinct classes).
    #[serde(default)]
    classes: Option<Vec<usize>>,
    #[serde(default)]
    overrides: OverridesInput,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvolutionInput {
    /// `"rotation_pi"`, `"reflection"` or `"antipodal"`.
    surface_map_type: String,
    /// Defaults to the identity permutation of the classes.
    #[serde(default)]
    boundary_permutation: Option<Vec<usize>>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct OverridesInput {
    #[serde(default)]
    l: Vec<Option<i64>>,
    #[serde(default)]
    z: Vec<Option<i64>>,
}

fn parse_rotation(parts: &[String; 2]) -> Result<RotationPair, String> {
    let alpha = Rat::from_str(parts[0].trim())
        .map_err(|e| format!("bad rotation component '{}': {e}", parts[0]))?;
    let beta = Rat::from_str(parts[1].trim())
        .map_err(|e| format!("bad rotation component '{}': {e}", parts[1]))?;
    Ok(RotationPair::new(alpha, beta))
}

/// Parse a comma-separated override list; `-` (or an empty slot) leaves the
/// corresponding entry free.
fn parse_override_list(text: &str) -> Result<Vec<Option<i64>>, String> {
    text.split(',')
        .map(|cell| {
            let cell = cell.trim();
            if cell.is_empty() || cell == "-" {
                Ok(None)
            } else {
                cell.parse::<i64>()
                    .map(Some)
                    .map_err(|e| format!("bad override entry '{cell}': {e}"))
            }
        })
        .collect()
}

pub fn run(args: QuotientArgs) -> Result<ExitCode, String> {
    let text = crate::read_input(args.input)?;
    let request: QuotientRequest =
        serde_json::from_str(&text).map_err(|e| format!("bad request JSON: {e}"))?;

    let raw = parse_invariants(request.invariants.trim()).map_err(|e| e.to_string())?;
    let m = raw.normalize().map_err(|e| e.to_string())?;

    let generators: Vec<RotationPair> = request
        .generators
        .iter()
        .map(parse_rotation)
        .collect::<Result<_, _>>()?;

    let count = request.fillings.len();
    let orientations = match &request.orientations {
        Some(signs) if signs.len() == count => signs.clone(),
        Some(signs) => {
            return Err(format!(
                "orientations has {} entries for {count} boundaries",
                signs.len()
            ))
        }
        None => default_orientations(count),
    };
    let classes = match &request.classes {
        Some(classes) if classes.len() == count => classes.clone(),
        Some(classes) => {
            return Err(format!(
                "classes has {} entries for {count} boundaries",
                classes.len()
            ))
        }
        None => (0..count).collect(),
    };
    let class_count = classes.iter().map(|c| c + 1).max().unwrap_or(0);

    let boundaries: Vec<BoundaryTorus> = request
        .fillings
        .iter()
        .zip(&orientations)
        .zip(&classes)
        .map(|((filling, &orientation), &class)| BoundaryTorus {
            class,
            orientation,
            filling: filling.map(Mat2::new),
        })
        .collect();

    let involution = match &request.involution {
        None => None,
        Some(input) => {
            let surface_map = match input.surface_map_type.as_str() {
                "rotation_pi" => SurfaceInvolution::RotationPi,
                "reflection" => SurfaceInvolution::Reflection,
                "antipodal" => SurfaceInvolution::Antipodal,
                other => {
                    return Err(format!(
                        "unknown surface_map_type '{other}' \
                         (expected rotation_pi, reflection or antipodal)"
                    ))
                }
            };
            Some(InvolutionDescriptor {
                surface_map,
                boundary_class_permutation: input
                    .boundary_permutation
                    .clone()
                    .unwrap_or_else(|| (0..class_count).collect()),
            })
        }
    };

    let mut l_overrides = request.overrides.l.clone();
    if let Some(list) = &args.l {
        l_overrides = parse_override_list(list)?;
    }
    let mut z_overrides = request.overrides.z.clone();
    if let Some(list) = &args.z {
        z_overrides = parse_override_list(list)?;
    }

    let action = ActionDescription {
        generators,
        fiber_reversing: request.fiber_reversing,
        involution,
        boundaries,
        l_overrides,
        z_overrides,
    };

    let descriptor = assemble_quotient(&m, &action).map_err(|e| e.to_string())?;

    if args.json {
        let report = json!({
            "schema": 1,
            "invariants": m.to_string(),
            "fiber_reversing": request.fiber_reversing,
            "descriptor": descriptor,
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    } else {
        print_narrative(&m.to_string(), &descriptor);
    }
    Ok(ExitCode::SUCCESS)
}

fn print_narrative(invariants: &str, descriptor: &QuotientDescriptor) {
    println!("quotient of {invariants}");
    match descriptor.base_kind {
        BaseKind::ProductOverQuotientSurface => {
            println!("base piece: trivially fibered product over the quotient surface");
        }
        BaseKind::FoldedBall => {
            println!(
                "base piece: folded ball; order-2 arcs: {}, order-2 circles: {}, \
                 removed interior components: {}",
                descriptor.arc_data.order_two_arcs,
                descriptor.arc_data.order_two_circles,
                descriptor.removed_interiors
            );
        }
    }
    for piece in &descriptor.pieces {
        println!(
            "boundary class {} (from torus {}, framing {:+}):",
            piece.class, piece.boundary, descriptor.class_orientations[piece.class]
        );
        let induced: Vec<String> = piece
            .induced_generators
            .iter()
            .map(|g| g.to_string())
            .collect();
        println!("  induced action on the filling torus: {}", induced.join(" "));
        println!("  torus projection    {}", piece.torus_projection);
        println!("  boundary projection {}", piece.boundary_projection);
        println!(
            "  projected filling   {}  slope {}",
            piece.piece.filling, piece.piece.slope
        );
        let kind = match piece.piece.kind {
            PieceKind::SolidTorus => "V",
            PieceKind::ConwayBall => "B",
        };
        println!("  piece: {kind}({})", piece.piece.core_order);
    }
    let l_list: Vec<String> = descriptor.l_assignments.iter().map(i64::to_string).collect();
    println!("l assignment per class: [{}]", l_list.join(", "));
    for warning in &descriptor.warnings {
        println!("warning: {warning}");
    }
}
