use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use newton_core::certifier::{
    certify_non_representability, check_qk_with, explore_double_simplex, CertifyOptions, CheckMode,
};
use newton_core::json::{self, SCHEMA_VERSION};
use newton_core::linalg::Rat;
use newton_core::subdivision::{subdivide_conv, subdivide_sum, verify_subdivision};
use newton_core::tropical::{compile_with_trees, eval_network, eval_pair, sample_pk, synthesize_network, SampleParams};
use newton_core::volume::normalized_volume;
use newton_core::{Caps, Error, LatticePolytope};
use serde_json::{json, Map, Value};

use crate::{Cli, Command, Format, OpArg};

pub const THREADS_ENV: &str = "NEWTON_DEPTH_THREADS";

enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Core(Error::CapExceeded { .. }) => 3,
            Failure::Core(
                Error::GenericityFailure { .. } | Error::InexactDivision { .. },
            ) => 1,
            Failure::Core(_) => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Input(m) => ("input", m.clone()),
            Failure::Core(e) => (
                match e {
                    Error::CapExceeded { .. } => "caps-exceeded",
                    Error::BiasPresent(_) => "bias-present",
                    Error::Schema(_) => "schema",
                    Error::Precondition(_) => "precondition",
                    Error::GenericityFailure { .. } | Error::InexactDivision { .. } => "verification",
                    _ => "input",
                },
                e.to_string(),
            ),
        };
        json!({ "schema_version": SCHEMA_VERSION, "error": kind, "message": message })
    }
}

/// A finished command: its artifact, a one-line summary, and whether every
/// verification it performed passed.
struct Outcome {
    artifact: Value,
    summary: String,
    ok: bool,
}

fn ok(artifact: Value, summary: String) -> Result<Outcome, Failure> {
    Ok(Outcome {
        artifact,
        summary,
        ok: true,
    })
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(json::parse(&text)?)
}

fn read_polytope(path: &Path) -> Result<LatticePolytope, Failure> {
    Ok(json::polytope_from_json(&read_json(path)?)?)
}

fn with_schema(v: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), SCHEMA_VERSION.into());
    if let Value::Object(o) = v {
        for (k, x) in o {
            if k != "schema_version" {
                m.insert(k, x);
            }
        }
    }
    Value::Object(m)
}

fn parse_point(s: &str) -> Result<Vec<Rat>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rat>()
                .map_err(|_| Failure::Input(format!("not a rational number: {t:?}")))
        })
        .collect()
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Compile { network } => {
            let net = json::network_from_json(&read_json(network)?)?;
            let outs = compile_with_trees(&net)?;
            let summary = outs
                .iter()
                .enumerate()
                .map(|(i, o)| {
                    format!(
                        "output {i}: pos {} vertices (dim {}), neg {} vertices (dim {})",
                        o.pair.pos.num_vertices(),
                        o.pair.pos.dim(),
                        o.pair.neg.num_vertices(),
                        o.pair.neg.dim()
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            ok(json::compiled_to_json(&net, &outs), summary)
        }
        Command::Eval { input, point } => {
            let v = read_json(input)?;
            let x = parse_point(point)?;
            if v.get("input_dim").is_some() {
                let net = json::network_from_json(&v)?;
                let y = eval_network(&net, &x)?;
                let summary = y.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
                let values: Vec<Value> = y.iter().map(json::rat_to_json).collect();
                ok(json!({ "schema_version": SCHEMA_VERSION, "values": values }), summary)
            } else if v.get("pos").is_some() {
                let pair = json::pair_from_json(&v)?;
                let y = eval_pair(&pair, &x)?;
                ok(
                    json!({ "schema_version": SCHEMA_VERSION, "value": json::rat_to_json(&y) }),
                    y.to_string(),
                )
            } else {
                Err(Failure::Core(Error::Schema(
                    "expected a network (\"input_dim\") or a pair (\"pos\", \"neg\")".into(),
                )))
            }
        }
        Command::Volume { polytope } => {
            let p = read_polytope(polytope)?;
            let v = normalized_volume(&p);
            ok(
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "ambient": p.ambient(),
                    "dim": p.dim(),
                    "volume": json::int_to_json(&v),
                }),
                format!("dim {} volume {v}", p.dim()),
            )
        }
        Command::Faces { polytope, min_dim } => {
            let p = read_polytope(polytope)?;
            let faces = p.faces_of_dim_at_least(*min_dim)?;
            let list: Vec<Value> = faces
                .iter()
                .map(|f| {
                    json!({
                        "dim": f.dim,
                        "volume": json::int_to_json(&normalized_volume(&f.polytope)),
                        "direction": f.direction.iter().map(json::rat_to_json).collect::<Vec<_>>(),
                        "vertices": json::polytope_to_json(&f.polytope)["vertices"].clone(),
                    })
                })
                .collect();
            ok(
                json!({ "schema_version": SCHEMA_VERSION, "min_dim": min_dim, "faces": list }),
                format!("{} faces of dimension >= {min_dim}", faces.len()),
            )
        }
        Command::Msum { a, b } | Command::Chull { a, b } => {
            let (p, q) = (read_polytope(a)?, read_polytope(b)?);
            let r = if matches!(cli.command, Command::Msum { .. }) {
                p.minkowski_sum(&q)?
            } else {
                p.conv_union(&q)?
            };
            ok(
                with_schema(json::polytope_to_json(&r)),
                format!("{} vertices, dim {}", r.num_vertices(), r.dim()),
            )
        }
        Command::Subdivide { op, a, b, seed } => {
            let (p, q) = (read_polytope(a)?, read_polytope(b)?);
            let s = match op {
                OpArg::Sum => subdivide_sum(&p, &q, *seed)?,
                OpArg::Conv => subdivide_conv(&p, &q, *seed)?,
            };
            let audit = verify_subdivision(&s);
            let mut v = json::subdivision_to_json(&s);
            v["audit"] = json::audit_to_json(&audit);
            Ok(Outcome {
                summary: format!(
                    "{} cells, audit {}",
                    s.cells.len(),
                    if audit.passed() { "passed" } else { "FAILED" }
                ),
                ok: audit.passed(),
                artifact: v,
            })
        }
        Command::SamplePk {
            k,
            n,
            seed,
            coord_range,
            fanout,
        } => {
            let params = SampleParams {
                coord_range: *coord_range,
                max_fanout: *fanout,
            };
            let (tree, p) = sample_pk(*k, *n, &params, *seed)?;
            ok(
                json!({
                    "schema_version": SCHEMA_VERSION,
                    "k": k,
                    "n": n,
                    "seed": seed,
                    "tree": json::tree_to_json(&tree),
                    "polytope": json::polytope_to_json(&p),
                }),
                format!("depth {} tree, {} vertices, dim {}", tree.depth(), p.num_vertices(), p.dim()),
            )
        }
        Command::Synthesize { g_tree, h_tree } => {
            let load = |path: &Path| -> Result<_, Failure> {
                let v = read_json(path)?;
                let t = v.get("tree").unwrap_or(&v);
                Ok(json::tree_from_json(t)?)
            };
            let net = synthesize_network(&load(g_tree)?, &load(h_tree)?)?;
            let widths = net.widths();
            ok(
                with_schema(json::network_to_json(&net)),
                format!("{} hidden layers, widths {widths:?}", net.hidden_layers()),
            )
        }
        Command::CheckQk {
            polytope,
            k,
            short_circuit,
        } => {
            let p = read_polytope(polytope)?;
            let mode = if *short_circuit {
                CheckMode::ShortCircuit
            } else {
                CheckMode::Full
            };
            let c = check_qk_with(&p, *k, mode)?;
            ok(
                json::parity_certificate_to_json(&c),
                format!(
                    "{} of Q_{k} ({} faces checked)",
                    if c.member { "member" } else { "non-member" },
                    c.entries.len()
                ),
            )
        }
        Command::Certify {
            k,
            seed,
            trials,
            eval_points,
            explore_double,
        } => {
            if *k > 2 {
                return Err(Failure::Input(format!("certify supports k <= 2 at desk scale, got {k}")));
            }
            if *explore_double {
                let c = explore_double_simplex(*k)?;
                let mut v = json::parity_certificate_to_json(&c);
                v["note"] = "exploratory parity ledger of 2 * simplex; no representability claim".into();
                return ok(
                    v,
                    format!("2*simplex at level {k}: {} faces, all even: {}", c.entries.len(), c.member),
                );
            }
            let mut options = CertifyOptions::for_level(*k, *seed);
            if let Some(t) = trials {
                options.trials = *t;
            }
            options.eval_points = *eval_points;
            let c = certify_non_representability(*k, &options)?;
            Ok(Outcome {
                artifact: json::certificate_to_json(&c),
                summary: match &c.failure {
                    None => c.statement(),
                    Some(f) => format!("certificate FAILED: {f}"),
                },
                ok: c.passed(),
            })
        }
    }
}

fn emit(cli: &Cli, out: &Outcome) -> Result<(), Failure> {
    let text = json::to_string(&out.artifact);
    match &cli.out {
        Some(path) => fs::write(path, &text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None if cli.format == Format::Json => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Input(format!("stdout: {e}")))?;
        }
        None => {}
    }
    if cli.format == Format::Summary {
        println!("{}", out.summary);
    }
    Ok(())
}

pub fn run(cli: &Cli) -> ExitCode {
    Caps::install(Caps {
        max_ambient: cli.max_dim,
        max_vertices: cli.max_vertices,
    });
    let result = configure_threads().and_then(|()| dispatch(cli)).and_then(|o| {
        emit(cli, &o)?;
        Ok(o.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprint!("{}", json::to_string(&f.to_json()));
            ExitCode::from(f.exit_code())
        }
    }
}
