//! `sfq`: exact classification of finite fiber-preserving group actions on
//! elliptic Seifert fibered 3-manifolds, and quotient orbifold computation.
//!
//! Subcommands: `analyze`, `classify`, `atlas`, `quotient`, `oracle-check`,
//! `selftest`. Output is deterministic; `--json` switches every subcommand
//! to a versioned JSON report (`"schema": 1`).

mod quotient_io;
mod selftest;

use clap::{Parser, Subcommand, ValueEnum};
use sfq_core::classify::{admissible_family, reversal_excluded, ClassifyError, FamilyOutcome};
use sfq_core::invariants::{geometry_verdict, parse_invariants, SeifertInvariants};
use sfq_core::lattice::lens_from_trivial_fillings;
use sfq_core::oracle::{sweep, CoreOrderFormula};
use sfq_core::s2_atlas::{atlas_rows, S2ActionRow};
use serde_json::json;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sfq",
    version,
    about = "Exact classification of finite fiber-preserving actions on elliptic Seifert fibered spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Geometry of an invariant tuple: normalization, Euler class, base
    /// orbifold and the elliptic verdict.
    Analyze(InvariantArgs),
    /// Geometry plus reversal exclusion and the admissible group family.
    Classify(InvariantArgs),
    /// Dump the sphere-action table, symbolic or instantiated.
    Atlas(AtlasArgs),
    /// Quotient orbifold of a described action (JSON input).
    Quotient(QuotientArgs),
    /// Compare a core-order formula against brute-force enumeration.
    OracleCheck(OracleArgs),
    /// Run the built-in cross-checks and regressions.
    Selftest(SelftestArgs),
}

#[derive(clap::Args)]
struct InvariantArgs {
    /// Invariant tuple, e.g. "(0,o1|(3,2),(1,5))"; read from stdin if absent.
    invariants: Option<String>,
    /// Emit a JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct AtlasArgs {
    /// Instantiate the table parameter n (>= 1).
    #[arg(long, value_name = "k")]
    instantiate_n: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct QuotientArgs {
    /// Request JSON; read from stdin if absent.
    input: Option<String>,
    /// Per-class torus-projection overrides, comma-separated; "-" skips a
    /// slot (e.g. "12,-"). Takes precedence over the request's overrides.
    #[arg(long, value_name = "list", allow_hyphen_values = true)]
    l: Option<String>,
    /// Per-boundary twist overrides, same syntax as --l.
    #[arg(long, value_name = "list", allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormulaArg {
    Cyclic,
    Bicyclic,
}

#[derive(clap::Args)]
struct OracleArgs {
    /// Which core-order formula to sweep.
    #[arg(long, value_enum)]
    formula: FormulaArg,
    /// Largest rotation denominator in the exhaustive grid.
    #[arg(long, default_value_t = 6, value_name = "n")]
    max_denominator: u64,
    #[arg(long)]
    json: bool,
}

#[derive(clap::Args)]
struct SelftestArgs {
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_invariant_report(args, false),
        Command::Classify(args) => run_invariant_report(args, true),
        Command::Atlas(args) => run_atlas(args),
        Command::Quotient(args) => quotient_io::run(args),
        Command::OracleCheck(args) => run_oracle_check(args),
        Command::Selftest(args) => selftest::run(args.json),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn read_input(arg: Option<String>) -> Result<String, String> {
    match arg {
        Some(text) => Ok(text),
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|e| format!("failed to read stdin: {e}"))?;
            Ok(buffer)
        }
    }
}

fn parse_and_normalize(text: &str) -> Result<(SeifertInvariants, SeifertInvariants), String> {
    let raw = parse_invariants(text.trim()).map_err(|e| e.to_string())?;
    let normalized = raw.normalize().map_err(|e| e.to_string())?;
    Ok((raw, normalized))
}

fn run_invariant_report(args: InvariantArgs, classify: bool) -> Result<ExitCode, String> {
    let text = read_input(args.invariants)?;
    let (raw, m) = parse_and_normalize(&text)?;
    let verdict = geometry_verdict(&m);
    let out_of_scope = sfq_core::invariants::base_orbifold(&m).err();
    let mut citations: Vec<String> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    // Manifolds over the bare sphere are lens spaces L(b,1); report them.
    let lens = (m.base_orientable && m.genus == 0 && m.pairs.is_empty()).then(|| {
        if m.b % 2 == 0 {
            citations.push("rule:two-trivial-fillings-lens".to_string());
            let (_, lens) = lens_from_trivial_fillings(m.b / 2).expect("small product");
            lens
        } else {
            sfq_core::lattice::LensSpace { p: m.b, q: 1 }
        }
    });

    let reversal = if classify && m.base_orientable {
        match reversal_excluded(&m) {
            Ok(v) => Some(v),
            Err(e) => return Err(e.to_string()),
        }
    } else {
        None
    };

    let family = if classify {
        match admissible_family(&m) {
            Ok(outcome) => {
                citations.push(format!("rule:{}", outcome.rule()));
                for &(row, n) in outcome.rule().consulted_rows() {
                    match n {
                        Some(n) => citations.push(format!("table-row:{row} (n={n})")),
                        None => citations.push(format!("table-row:{row}")),
                    }
                }
                warnings.extend(outcome.caveats().iter().cloned());
                Some(outcome)
            }
            Err(ClassifyError::NotElliptic) => None,
            Err(e) => return Err(e.to_string()),
        }
    } else {
        None
    };

    if args.json {
        let geometry = json!({
            "chi_orb": verdict.chi_orb.to_string(),
            "euler_class": verdict.euler_class.to_string(),
            "elliptic": verdict.elliptic,
            "base_label": verdict.base_label.map(|l| l.to_string()),
            "out_of_scope_geometry": out_of_scope.as_ref().map(|e| e.to_string()),
        });
        let mut report = json!({
            "schema": 1,
            "input": text.trim(),
            "raw": raw.to_string(),
            "normalized": m.to_string(),
            "geometry": geometry,
        });
        let object = report.as_object_mut().expect("object");
        if let Some(lens) = lens {
            object.insert("lens".to_string(), json!({ "p": lens.p, "q": lens.q }));
        }
        if classify {
            object.insert(
                "reversal".to_string(),
                match &reversal {
                    Some(v) => serde_json::to_value(v).expect("serializable"),
                    None => json!({
                        "applicable": false,
                        "note": "the reversal predicates apply to orientable base spaces only",
                    }),
                },
            );
            object.insert(
                "family".to_string(),
                match &family {
                    Some(outcome) => serde_json::to_value(outcome).expect("serializable"),
                    None => serde_json::Value::Null,
                },
            );
            object.insert("citations".to_string(), json!(citations));
        }
        object.insert("warnings".to_string(), json!(warnings));
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        return Ok(ExitCode::SUCCESS);
    }

    println!("input:      {}", text.trim());
    println!("normalized: {m}");
    println!("euler class e = {}", verdict.euler_class);
    println!("chi_orb       = {}", verdict.chi_orb);
    match (verdict.base_label, &out_of_scope) {
        (Some(label), _) => println!("base orbifold: {label}"),
        (None, Some(e)) => println!("base orbifold: {e}"),
        (None, None) => println!("base orbifold: not positively curved"),
    }
    if let Some(lens) = lens {
        if lens.p == 0 {
            println!("manifold: L(0,1) = S2 x S1");
        } else {
            println!("manifold: lens space {lens}");
        }
    }
    println!(
        "elliptic: {}",
        if verdict.elliptic { "yes" } else { "no" }
    );
    if let Some(v) = &reversal {
        if v.excluded {
            let reasons: Vec<String> = v.reasons.iter().map(|r| r.to_string()).collect();
            println!("orientation-reversing actions: excluded ({})", reasons.join("; "));
        } else {
            println!("orientation-reversing actions: {}", v.note);
        }
    } else if classify {
        println!("orientation-reversing actions: predicates apply to orientable bases only");
    }
    if classify {
        match &family {
            Some(FamilyOutcome::Bounded(f)) => {
                println!("admissible groups: subgroups of {}", f.expr);
                println!("rule: {}", f.rule);
                for caveat in &f.caveats {
                    println!("  caveat: {caveat}");
                }
            }
            Some(FamilyOutcome::Deferred { rule, caveats }) => {
                println!("admissible groups: deferred (no family bound here)");
                println!("rule: {rule}");
                for caveat in caveats {
                    println!("  caveat: {caveat}");
                }
            }
            None => println!("admissible groups: not elliptic, dispatch does not apply"),
        }
        if !citations.is_empty() {
            println!("citations: {}", citations.join(", "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn param_cell(p: &sfq_core::s2_atlas::Param) -> String {
    p.to_string()
}

fn run_atlas(args: AtlasArgs) -> Result<ExitCode, String> {
    let rows = atlas_rows(args.instantiate_n).map_err(|e| e.to_string())?;
    if args.json {
        let report = json!({
            "schema": 1,
            "instantiated_n": args.instantiate_n,
            "rows": rows,
        });
        println!("{}", serde_json::to_string_pretty(&report).expect("json"));
        return Ok(ExitCode::SUCCESS);
    }
    let header = [
        "no", "space", "group", "data", "orbit numbers", "lcm", "|G|/lcm", "oc",
    ];
    let mut table: Vec<[String; 8]> = Vec::new();
    for row in &rows {
        table.push(format_atlas_row(row));
    }
    let mut widths = header.map(str::len);
    for row in &table {
        for (w, cell) in widths.iter_mut().zip(row.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let print_row = |cells: &[String; 8]| {
        let line: Vec<String> = cells
            .iter()
            .zip(widths.iter())
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        println!("{}", line.join("  ").trim_end());
    };
    print_row(&header.map(str::to_string));
    for row in &table {
        print_row(row);
    }
    Ok(ExitCode::SUCCESS)
}

fn format_atlas_row(row: &S2ActionRow) -> [String; 8] {
    let orbit = if row.orbit_numbers.is_empty() {
        "-".to_string()
    } else {
        row.orbit_numbers
            .iter()
            .map(param_cell)
            .collect::<Vec<_>>()
            .join(",")
    };
    [
        row.number.to_string(),
        row.underlying.to_string(),
        row.group.to_string(),
        row.branch_data.to_string(),
        orbit,
        param_cell(&row.lcm),
        row.index_over_lcm.to_string(),
        row.oc_rule.to_string(),
    ]
}

fn run_oracle_check(args: OracleArgs) -> Result<ExitCode, String> {
    if args.max_denominator == 0 {
        return Err("max denominator must be >= 1".to_string());
    }
    let formula = match args.formula {
        FormulaArg::Cyclic => CoreOrderFormula::Cyclic,
        FormulaArg::Bicyclic => CoreOrderFormula::Bicyclic,
    };
    let report = sweep(formula, args.max_denominator);
    if args.json {
        let value = json!({
            "schema": 1,
            "report": report,
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("json"));
    } else {
        println!(
            "formula {} against brute-force enumeration, denominators <= {}",
            report.formula, report.max_denominator
        );
        println!(
            "{} cases, {} discrepancies",
            report.cases,
            report.discrepancies.len()
        );
        for d in &report.discrepancies {
            let generators: Vec<String> = d.generators.iter().map(|g| g.to_string()).collect();
            println!(
                "  generators {}: formula {} enumeration {}",
                generators.join(" "),
                d.formula_value,
                d.oracle_value
            );
        }
    }
    if report.discrepancies.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
