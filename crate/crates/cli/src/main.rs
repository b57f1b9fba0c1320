//! `bmpa`: weight functions, perturbation classes, and Connes fusion on
//! serialized fusion systems.

use bmpa_cli::{doc, report};

use std::io::Read;
use std::process::ExitCode;

use bmpa_core::compose::{compose, validate_bicategory3, verify_tpc_closure, Bicategory3};
use bmpa_core::examples::{
    cyclic_subgroup, make_double_coset, make_free_monoid_fusion, make_group_fusion,
    make_integer_fusion, make_tl_path, GroupTable,
};
use bmpa_core::fusion::validate;
use bmpa_core::graph::{graph_from_system, pf_dimensions, Side};
use bmpa_core::perturb::{modulus_of, perturb_report, scalar_perturb, spherical_report};
use bmpa_core::weights::{is_tpc, solve_weight_space, SectorScope, TpcVerdict, WeightFunction};
use bmpa_core::{cable, Error, DEFAULT_TOLERANCE, PF_TOLERANCE};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bmpa", disable_help_subcommand = true)]
#[command(about = "computational algebra on bimodule fusion systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system document against the structural rules.
    Validate { file: String },
    /// Solve the weight space and print its integer basis.
    Weights {
        file: String,
        /// Restrict to the even sector of one algebra label.
        #[arg(long = "even-only", value_name = "ALGEBRA")]
        even_only: Option<String>,
    },
    /// Decide the trivial perturbation class.
    Tpc { file: String },
    /// Perron-Frobenius dimensions from the principal graph.
    Dims {
        file: String,
        /// Include the derived principal graph pair in the output.
        #[arg(long)]
        graph: bool,
    },
    /// Perturb the document's dimension data.
    Perturb {
        file: String,
        #[command(flatten)]
        by: PerturbBy,
    },
    /// Locate the spherical lowest-index member of the perturbation class.
    Spherical { file: String },
    /// Fuse a three-label bicategory over its middle algebra.
    Fuse {
        file: String,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Re-generate the system from the k-th power of its generator.
    Cable {
        file: String,
        #[arg(short)]
        k: u32,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Emit a generated example as a system document.
    Example {
        #[command(subcommand)]
        kind: ExampleKind,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PerturbBy {
    /// Weight document to perturb by.
    #[arg(long)]
    weight: Option<String>,
    /// Scalar perturbation parameter.
    #[arg(long, allow_negative_numbers = true)]
    scalar: Option<f64>,
}

#[derive(Subcommand)]
enum ExampleKind {
    /// Integers in a symmetric truncation window.
    Integer {
        #[arg(long)]
        range: u32,
        #[arg(short)]
        out: Option<String>,
    },
    /// Cyclic group of order n.
    Zn {
        #[arg(long)]
        n: usize,
        #[arg(short)]
        out: Option<String>,
    },
    /// Symmetric group on three points.
    S3 {
        #[arg(short)]
        out: Option<String>,
    },
    /// Free monoid words up to a maximum length.
    Free {
        #[arg(long)]
        len: u32,
        #[arg(short)]
        out: Option<String>,
    },
    /// Temperley-Lieb path fixture A_n.
    Tl {
        #[arg(long)]
        n: usize,
        #[arg(short)]
        out: Option<String>,
    },
    /// Double cosets of two subgroups as a three-label bicategory.
    Dc {
        /// Group: `s3` or `z<n>`.
        #[arg(long)]
        group: String,
        /// Subgroup H: an element generating it, or `all`.
        #[arg(long)]
        h: String,
        /// Subgroup K: an element generating it, or `all`.
        #[arg(long)]
        k: String,
        #[arg(short)]
        out: Option<String>,
    },
}

struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Fail {
        Fail { code: 1, message: message.into() }
    }
    fn data(message: impl Into<String>) -> Fail {
        Fail { code: 2, message: message.into() }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::TheoremViolation(_) => 5,
            _ => 2,
        };
        Fail { code, message: e.to_string() }
    }
}

fn read_input(path: &str) -> Result<String, Fail> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Fail::data(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| Fail::data(format!("{path}: {e}")))
    }
}

fn load(path: &str) -> Result<doc::Parsed, Fail> {
    doc::parse_system(&read_input(path)?).map_err(Fail::data)
}

/// Parse and insist on a structurally valid system.
fn load_valid(path: &str) -> Result<doc::Parsed, Fail> {
    let parsed = load(path)?;
    let rep = validate(&parsed.system);
    if !rep.is_valid() {
        let mut lines = vec!["invalid system:".to_string()];
        for v in &rep.violations {
            lines.push(format!("  [{}] {}", v.code, v.message));
        }
        return Err(Fail::data(lines.join("\n")));
    }
    Ok(parsed)
}

fn emit(value: &Value) {
    print!("{}", report::render(value));
}

fn write_out(out: Option<&str>, value: &Value) -> Result<(), Fail> {
    match out {
        None | Some("-") => {
            emit(value);
            Ok(())
        }
        Some(path) => std::fs::write(path, report::render(value))
            .map_err(|e| Fail::data(format!("{path}: {e}"))),
    }
}

fn tpc_value(sys: &bmpa_core::FusionSystem, v: &TpcVerdict) -> Value {
    let _ = sys;
    let dims: Value = v
        .even_dimensions
        .iter()
        .map(|(l, d)| json!([l, d]))
        .collect::<Vec<_>>()
        .into();
    let witness = match &v.witness {
        None => Value::Null,
        Some(w) => Value::Object(
            w.iter()
                .map(|(id, e)| (id.clone(), report::big(e)))
                .collect(),
        ),
    };
    report::object(vec![
        ("tpc", json!(v.tpc)),
        ("provisional", json!(v.provisional)),
        ("even_dimensions", dims),
        ("witness", witness),
    ])
}

fn tpc_exit(v: &TpcVerdict) -> u8 {
    if v.tpc {
        0
    } else if v.provisional {
        4
    } else {
        3
    }
}

fn modulus_value(m: &bmpa_core::Modulus<f64>) -> Value {
    report::object(vec![
        ("minus", report::float(m.minus)),
        ("plus", report::float(m.plus)),
    ])
}

fn weight_values(w: &WeightFunction) -> Value {
    Value::Object(
        w.values
            .iter()
            .map(|(id, v)| (id.clone(), report::float(*v)))
            .collect(),
    )
}

fn dims_value(d: &bmpa_core::Dims) -> Value {
    d.constituents()
        .iter()
        .map(|c| {
            report::object(vec![
                ("id", json!(c.id)),
                ("left", report::float(c.dim_left)),
                ("right", report::float(c.dim_right)),
                ("mult", json!(c.mult)),
            ])
        })
        .collect::<Vec<_>>()
        .into()
}

fn perturbation_value(r: &bmpa_core::perturb::PerturbationReport<f64>) -> Value {
    report::object(vec![
        ("perturbed", dims_value(&r.perturbed)),
        ("modulus", modulus_value(&r.modulus)),
        ("index", report::float(r.index)),
        ("spherical", json!(r.spherical)),
        (
            "sphericalizing",
            r.sphericalizing
                .as_ref()
                .map(weight_values)
                .unwrap_or(Value::Null),
        ),
        ("min_index", report::float(r.min_index)),
    ])
}

fn require_dims(parsed: &doc::Parsed) -> Result<&bmpa_core::Dims, Fail> {
    parsed
        .dims
        .as_ref()
        .ok_or_else(|| Fail::data("document carries no dims data"))
}

fn group_by_name(name: &str) -> Result<GroupTable, Fail> {
    if name == "s3" {
        return Ok(GroupTable::symmetric3());
    }
    if let Some(rest) = name.strip_prefix('z') {
        let n: usize = rest
            .parse()
            .map_err(|_| Fail::usage(format!("bad group `{name}`")))?;
        if n == 0 {
            return Err(Fail::usage("group order must be positive"));
        }
        return Ok(GroupTable::cyclic(n));
    }
    Err(Fail::usage(format!("unknown group `{name}` (use s3 or z<n>)")))
}

fn subgroup_by_spec(table: &GroupTable, spec: &str) -> Result<Vec<usize>, Fail> {
    if spec == "all" {
        return Ok((0..table.order()).collect());
    }
    let g = table
        .names
        .iter()
        .position(|n| n == spec)
        .ok_or_else(|| Fail::usage(format!("`{spec}` is not a group element")))?;
    Ok(cyclic_subgroup(table, g)?)
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.command {
        Command::Validate { file } => {
            let parsed = load(&file)?;
            let rep = validate(&parsed.system);
            let violations: Value = rep
                .violations
                .iter()
                .map(|v| {
                    report::object(vec![
                        ("code", json!(v.code)),
                        ("message", json!(v.message)),
                    ])
                })
                .collect::<Vec<_>>()
                .into();
            let verdict = report::object(vec![
                ("valid", json!(rep.is_valid())),
                ("violations", violations),
            ]);
            emit(&report::result_document("validate", verdict, json!({})));
            Ok(if rep.is_valid() { 0 } else { 2 })
        }
        Command::Weights { file, even_only } => {
            let parsed = load_valid(&file)?;
            let sys = &parsed.system;
            let scope = match &even_only {
                None => SectorScope::Full,
                Some(l) => {
                    if sys.algebra_index(l).is_none() {
                        return Err(Fail::usage(format!("unknown algebra label `{l}`")));
                    }
                    SectorScope::EvenOnly(l.clone())
                }
            };
            let basis = solve_weight_space(sys, &scope)?;
            let variables: Value = basis
                .variables
                .iter()
                .map(|&i| json!(sys.object(i).id))
                .collect::<Vec<_>>()
                .into();
            let vectors: Value = basis
                .basis
                .iter()
                .map(|row| row.iter().map(report::big).collect::<Vec<_>>().into())
                .collect::<Vec<Value>>()
                .into();
            let skipped: Value = basis
                .skipped
                .iter()
                .map(|&(a, b)| json!([sys.object(a).id, sys.object(b).id]))
                .collect::<Vec<_>>()
                .into();
            let verdict = report::object(vec![
                (
                    "scope",
                    match &even_only {
                        None => json!("full"),
                        Some(l) => json!({ "even_only": l }),
                    },
                ),
                ("dimension", json!(basis.dimension)),
                ("variables", variables),
                ("basis", vectors),
            ]);
            let diagnostics = report::object(vec![("skipped_pairs", skipped)]);
            emit(&report::result_document("weights", verdict, diagnostics));
            Ok(0)
        }
        Command::Tpc { file } => {
            let parsed = load_valid(&file)?;
            let v = is_tpc(&parsed.system)?;
            let diagnostics = if v.provisional {
                json!({"note": "ambiguous truncation: unknown entries could still shrink the kernel"})
            } else {
                json!({})
            };
            emit(&report::result_document(
                "tpc",
                tpc_value(&parsed.system, &v),
                diagnostics,
            ));
            Ok(tpc_exit(&v))
        }
        Command::Dims { file, graph } => {
            let parsed = load_valid(&file)?;
            let pair = graph_from_system(&parsed.system)?;
            let side_value = |side: Side| -> Result<Value, Fail> {
                let d = pf_dimensions::<f64>(&pair, side, PF_TOLERANCE)?;
                let values: Value = d
                    .values
                    .iter()
                    .map(|(n, v)| json!([n, report::float(*v)]))
                    .collect::<Vec<_>>()
                    .into();
                Ok(report::object(vec![
                    ("norm", report::float(d.norm)),
                    ("index", report::float(d.norm * d.norm)),
                    ("values", values),
                ]))
            };
            let plus = side_value(Side::Plus)?;
            let minus = if pair.even_minus.is_empty() {
                Value::Null
            } else {
                side_value(Side::Minus)?
            };
            let modulus = match &parsed.dims {
                None => Value::Null,
                Some(d) => {
                    let m = modulus_of(d);
                    report::object(vec![
                        ("minus", report::float(m.minus)),
                        ("plus", report::float(m.plus)),
                        ("index", report::float(m.index())),
                        ("spherical", json!(m.is_spherical(DEFAULT_TOLERANCE))),
                    ])
                }
            };
            let mut fields = vec![
                ("pf_plus", plus),
                ("pf_minus", minus),
                ("modulus", modulus),
            ];
            if graph {
                fields.push((
                    "graph",
                    report::object(vec![
                        ("even_plus", json!(pair.even_plus)),
                        ("odd", json!(pair.odd)),
                        ("even_minus", json!(pair.even_minus)),
                        ("edges_plus", json!(pair.edges_plus)),
                        ("edges_minus", json!(pair.edges_minus)),
                        ("base", json!(pair.base)),
                        ("base_minus", json!(pair.base_minus)),
                    ]),
                ));
            }
            emit(&report::result_document(
                "dims",
                report::object(fields),
                json!({}),
            ));
            Ok(0)
        }
        Command::Perturb { file, by } => {
            let parsed = load_valid(&file)?;
            let dims = require_dims(&parsed)?;
            if let Some(lambda) = by.scalar {
                let before = modulus_of(dims);
                let after = scalar_perturb(before, lambda)?;
                let verdict = report::object(vec![
                    ("scalar", report::float(lambda)),
                    ("modulus", modulus_value(&after)),
                    ("index", report::float(after.index())),
                    (
                        "spherical",
                        json!(after.is_spherical(DEFAULT_TOLERANCE)),
                    ),
                ]);
                emit(&report::result_document("perturb", verdict, json!({})));
                return Ok(0);
            }
            let wfile = by.weight.expect("clap enforces the group");
            let values = doc::parse_weights(&read_input(&wfile)?).map_err(Fail::data)?;
            // Any positive assignment perturbs dimension data; the weight
            // function law only matters for class membership questions.
            let w = WeightFunction::from_values(values);
            let rep = perturb_report(dims, &w, DEFAULT_TOLERANCE)?;
            emit(&report::result_document(
                "perturb",
                perturbation_value(&rep),
                json!({}),
            ));
            Ok(0)
        }
        Command::Spherical { file } => {
            let parsed = load_valid(&file)?;
            let dims = require_dims(&parsed)?;
            let before = modulus_of(dims);
            let rep = spherical_report(dims, Some(&parsed.system), DEFAULT_TOLERANCE)?;
            let verdict = report::object(vec![
                ("input_modulus", modulus_value(&before)),
                ("input_index", report::float(before.index())),
                (
                    "input_spherical",
                    json!(before.is_spherical(DEFAULT_TOLERANCE)
                        && bmpa_core::perturb::is_spherical(dims, DEFAULT_TOLERANCE)),
                ),
                ("report", perturbation_value(&rep)),
            ]);
            emit(&report::result_document("spherical", verdict, json!({})));
            Ok(0)
        }
        Command::Fuse { file, depth } => {
            let parsed = load_valid(&file)?;
            let (gen_ab, gen_bc) = match (&parsed.document.gen_ab, &parsed.document.gen_bc) {
                (Some(a), Some(b)) => (a.clone(), b.clone()),
                _ => return Err(Fail::data("document lacks gen_ab/gen_bc bridge generators")),
            };
            let b3 = Bicategory3 {
                system: parsed.system.clone(),
                gen_ab,
                gen_bc,
            };
            validate_bicategory3(&b3)?;
            let composite = compose(&b3, depth)?;
            let rep = verify_tpc_closure(&b3, depth)?;
            let verdict = report::object(vec![
                (
                    "composite",
                    report::canonical(&doc::from_core(&composite, None, None, None)),
                ),
                (
                    "theorem",
                    report::object(vec![
                        ("pass", json!(rep.pass)),
                        ("hypothesis", json!(rep.hypothesis)),
                        ("vacuous", json!(rep.vacuous)),
                        ("provisional", json!(rep.provisional)),
                        ("factor_ab", tpc_value(&b3.system, &rep.factor_ab)),
                        ("factor_bc", tpc_value(&b3.system, &rep.factor_bc)),
                        ("composite", tpc_value(&composite, &rep.composite)),
                    ]),
                ),
            ]);
            emit(&report::result_document("fuse", verdict, json!({})));
            Ok(if rep.provisional { 4 } else { 0 })
        }
        Command::Cable { file, k, depth } => {
            let parsed = load_valid(&file)?;
            let cabled = cable(&parsed.system, k, depth)?;
            let v = is_tpc(&cabled)?;
            let verdict = report::object(vec![
                (
                    "system",
                    report::canonical(&doc::from_core(&cabled, None, None, None)),
                ),
                ("tpc", tpc_value(&cabled, &v)),
            ]);
            emit(&report::result_document("cable", verdict, json!({})));
            Ok(tpc_exit(&v))
        }
        Command::Example { kind } => {
            let (value, out) = example_document(kind)?;
            write_out(out.as_deref(), &value)?;
            Ok(0)
        }
    }
}

fn example_document(kind: ExampleKind) -> Result<(Value, Option<String>), Fail> {
    let meta = |v: Value| Some(v);
    match kind {
        ExampleKind::Integer { range, out } => {
            if range == 0 {
                return Err(Fail::usage("--range must be at least 1"));
            }
            let sys = make_integer_fusion(range)?;
            let d = doc::from_core(
                &sys,
                None,
                None,
                meta(json!({"example": {"kind": "integer", "range": range}})),
            );
            Ok((report::canonical(&d), out))
        }
        ExampleKind::Zn { n, out } => {
            if n == 0 {
                return Err(Fail::usage("--n must be at least 1"));
            }
            let sys = make_group_fusion(&GroupTable::cyclic(n))?;
            let d = doc::from_core(
                &sys,
                None,
                None,
                meta(json!({"example": {"kind": "zn", "n": n}})),
            );
            Ok((report::canonical(&d), out))
        }
        ExampleKind::S3 { out } => {
            let sys = make_group_fusion(&GroupTable::symmetric3())?;
            let d = doc::from_core(&sys, None, None, meta(json!({"example": {"kind": "s3"}})));
            Ok((report::canonical(&d), out))
        }
        ExampleKind::Free { len, out } => {
            if len == 0 || len > 8 {
                return Err(Fail::usage("--len must be between 1 and 8"));
            }
            let sys = make_free_monoid_fusion(len)?;
            let d = doc::from_core(
                &sys,
                None,
                None,
                meta(json!({"example": {"kind": "free", "len": len}})),
            );
            Ok((report::canonical(&d), out))
        }
        ExampleKind::Tl { n, out } => {
            if n < 2 {
                return Err(Fail::usage("--n must be at least 2"));
            }
            let (_, sys, dims) = make_tl_path(n)?;
            let d = doc::from_core(
                &sys,
                Some(&dims),
                None,
                meta(json!({"example": {"kind": "tl", "n": n}})),
            );
            Ok((report::canonical(&d), out))
        }
        ExampleKind::Dc { group, h, k, out } => {
            let table = group_by_name(&group)?;
            let hs = subgroup_by_spec(&table, &h)?;
            let ks = subgroup_by_spec(&table, &k)?;
            let b3 = make_double_coset(&table, &hs, &ks)?;
            let d = doc::from_core(
                &b3.system,
                None,
                Some((&b3.gen_ab, &b3.gen_bc)),
                meta(json!({"example": {"kind": "dc", "group": group, "h": h, "k": k}})),
            );
            Ok((report::canonical(&d), out))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let benign = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return ExitCode::from(if benign { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
