use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use k3lat_core::arith::{fmt_q, parse_q, Q};
use k3lat_core::atlas::{self, NamedLatticeId};
use k3lat_core::compare::compare_classes;
use k3lat_core::discriminant::discriminant_form;
use k3lat_core::enumerate::{root_type, uniqueness_criterion};
use k3lat_core::lattice::Lattice;
use k3lat_core::poly::Poly;
use k3lat_core::verify::{self, CheckReport, Status, Suite};
use k3lat_core::{k3, order3, specialize, weierstrass};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "k3lat", version, about = "Exact lattice computations for K3 surfaces with symplectic automorphisms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Named lattices of the atlas.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// NS and T of X and of the quotient Y for extra algebraic classes in T_X.
    QuotientNs {
        /// JSON file: a list of vectors of 12 rational strings (t coordinates).
        #[arg(long)]
        extras: PathBuf,
    },
    /// The self map gamma of T_X.
    Gamma {
        #[arg(long)]
        print_matrix: bool,
    },
    /// Run a specialization chain.
    Specialize {
        /// A chain file, or one of the built-in chains "order2" and "order3".
        #[arg(long)]
        chain: String,
    },
    /// Fibres of y^2 = x(x^2 + a x + b) and of its quotient by the 2-torsion section.
    Weierstrass {
        /// Coefficients of a from the constant term up, e.g. "1,0,-1/2".
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Also report the quotient surface (-2a, a^2 - 4b).
        #[arg(long)]
        quotient: bool,
    },
    /// Order-3 checks.
    Order3 {
        /// One of the order3 check ids; all of them when omitted.
        #[arg(long)]
        check: Option<String>,
        #[arg(long)]
        stable: bool,
    },
    /// Run registered checks and print one JSON report per line.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        check: Option<String>,
        /// k=v,... passed to a single check.
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Zero the runtimes so that repeated runs are byte-identical.
        #[arg(long)]
        stable: bool,
        /// Print the manifest (id, suite, anchor, operation) instead of running.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Invariants and glue of a named lattice, e.g. "Lambda_d:6", "A3", "<-4>".
    Info {
        name: String,
        /// Emit the lattice file format instead.
        #[arg(long)]
        json: bool,
    },
    /// All names the atlas understands.
    List,
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Lattice { cmd: LatticeCmd::Info { name, json } } => lattice_info(&name, json),
        Cmd::Lattice { cmd: LatticeCmd::List } => {
            for n in LATTICE_NAMES {
                println!("{n}");
            }
            Ok(0)
        }
        Cmd::QuotientNs { extras } => quotient_ns(&extras),
        Cmd::Gamma { print_matrix } => gamma(print_matrix),
        Cmd::Specialize { chain } => specialize_chain(&chain),
        Cmd::Weierstrass { a, b, quotient } => weierstrass_cmd(&a, &b, quotient),
        Cmd::Order3 { check, stable } => {
            let ids = match check {
                Some(c) if verify::spec(&c).is_some_and(|s| s.suite == Suite::Order3) => vec![c],
                Some(c) => bail!("unknown order-3 check {c:?}; known: {:?}", verify::ids(Some(Suite::Order3))),
                None => verify::ids(Some(Suite::Order3)).into_iter().map(String::from).collect(),
            };
            let reports = ids.iter().map(|id| verify::verify(id, &Default::default())).collect::<Result<Vec<_>, _>>()?;
            emit(&reports, None, stable)
        }
        Cmd::Verify { suite, check, params, out, stable, list } => {
            if list {
                for c in verify::MANIFEST {
                    println!("{}\t{:?}\t{}\t{}", c.id, c.suite, c.anchor, c.operation);
                }
                return Ok(0);
            }
            let reports = match check {
                Some(id) => {
                    let p = verify::parse_params(params.as_deref().unwrap_or(""))?;
                    vec![verify::verify(&id, &p)?]
                }
                None => {
                    if params.is_some() {
                        bail!("--params needs --check");
                    }
                    verify::verify_all(Suite::parse(&suite)?)
                }
            };
            emit(&reports, out.as_deref(), stable)
        }
    }
}

fn emit(reports: &[CheckReport], out: Option<&Path>, stable: bool) -> Result<i32> {
    let mut text = String::new();
    for r in reports {
        text.push_str(&verify::to_json_line(r, stable));
        text.push('\n');
    }
    match out {
        Some(p) => std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    for r in reports {
        eprintln!("{:<22} {:?}", r.check_id, r.status);
    }
    Ok(if reports.iter().any(|r| r.status == Status::Fail) { 1 } else { 0 })
}

fn report(check: &str, ok: bool, details: Value) -> i32 {
    let status = if ok { "pass" } else { "fail" };
    let text = serde_json::to_string_pretty(&json!({ "check": check, "status": status, "details": details })).unwrap();
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = writeln!(std::io::stdout(), "{text}");
    i32::from(!ok)
}

const LATTICE_NAMES: [&str; 23] = [
    "U", "U:<n>", "<n>", "A_n:<n>", "D_n:<n>", "E6", "E6(2)", "E8", "E8(2)", "N", "M", "K12tilde", "K12",
    "LambdaK3", "Lambda_d:<d>", "Lambda_d_a:<d>", "Lambda_d_b:<d>", "Prime_2d_E82:<2d>", "Prime_2d_N:<2d>", "UN",
    "UM", "T_X_std", "T_X3_std",
];

fn gram_rows(l: &Lattice) -> Vec<Vec<String>> {
    l.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

fn lattice_info(name: &str, as_json: bool) -> Result<i32> {
    let id = NamedLatticeId::parse(name)?;
    let l = atlas::make(&id)?;
    if as_json {
        let gram: Vec<Vec<i64>> =
            l.gram().to_rows().iter().map(|r| r.iter().map(|x| x.to_string().parse().unwrap()).collect()).collect();
        let mut v = json!({ "name": id.to_string(), "gram": gram, "even": l.is_even() });
        if let Some(lb) = l.labels() {
            v["labels"] = json!(lb);
        }
        println!("{}", serde_json::to_string(&v)?);
        return Ok(0);
    }
    let inv = l.invariants();
    let mut details = json!({
        "name": id.to_string(),
        "rank": l.rank(),
        "det": inv.det.to_string(),
        "signature": inv.signature,
        "even": inv.even,
        "gram": gram_rows(&l),
    });
    if let Some(lb) = l.labels() {
        details["labels"] = json!(lb);
    }
    if !inv.degenerate && inv.even {
        let f = discriminant_form(&l)?;
        details["discriminant_group"] = json!(f.invariant_factors.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        details["discriminant_q"] = json!(f.q.iter().map(fmt_q).collect::<Vec<_>>());
        if l.is_indefinite() {
            details["uniqueness_criterion"] = json!(uniqueness_criterion(&l));
        }
    }
    if l.definiteness().is_some() && l.rank() <= 16 {
        details["root_type"] = json!(root_type(&l)?.to_string());
    }
    if let Ok(g) = atlas::glue_description(&id) {
        details["glue"] = json!({ "base": g.base.name, "glue": g.glue_text, "note": g.note });
    }
    Ok(report("lattice-info", true, details))
}

fn read_json(p: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing {}", p.display()))
}

fn rational_vector(v: &Value, dim: usize) -> Result<Vec<Q>> {
    let arr = v.as_array().context("expected an array of rational strings")?;
    if arr.len() != dim {
        bail!("expected {dim} coordinates, got {}", arr.len());
    }
    arr.iter()
        .map(|x| {
            let s = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => bail!("bad coordinate {x}"),
            };
            parse_q(&s).with_context(|| format!("bad rational {s:?}"))
        })
        .collect()
}

/// A class given as an expression in t1..t12 or as a coordinate array.
fn t_class(v: &Value) -> Result<Vec<Q>> {
    match v {
        Value::String(e) => Ok(k3::t_symbols().eval(e)?),
        _ => rational_vector(v, 12),
    }
}

fn quotient_ns(path: &Path) -> Result<i32> {
    let v = read_json(path)?;
    let list = v.as_array().context("extras file must be a JSON list")?;
    let extras = list.iter().map(t_class).collect::<Result<Vec<_>>>()?;
    let r = k3::quotient_ns(&extras)?;
    let cmp = compare_classes(&r.ns_x, &r.ns_y)?;
    let inv = |l: &Lattice| json!({ "rank": l.rank(), "det": l.det().to_string(), "signature": l.signature(), "gram": gram_rows(l) });
    let fx = discriminant_form(&r.ns_x)?;
    let fy = discriminant_form(&r.ns_y)?;
    let details = json!({
        "ns_x": inv(&r.ns_x),
        "ns_y": inv(&r.ns_y),
        "t_x": inv(&r.t_x),
        "t_y": inv(&r.t_y),
        "ns_x_index": fmt_q(&r.ns_x_index),
        "discriminant_ns_x": fx.invariant_factors.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "discriminant_ns_y": fy.invariant_factors.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "routes_agree": r.routes_agree,
        "ns_x_vs_ns_y": cmp,
    });
    Ok(report("quotient-ns", r.routes_agree, details))
}

fn gamma(print_matrix: bool) -> Result<i32> {
    let theta = k3::gamma_on_theta()?;
    let plus = k3::gamma_plus()?;
    let mut details = json!({ "fibre_dictionary": theta.steps, "gamma_plus": plus });
    if print_matrix {
        let m = k3::gamma_matrix()?;
        let rows: Vec<String> = m
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| format!("{:>3}", fmt_q(x))).collect::<Vec<_>>().join(" "))
            .collect();
        eprintln!("gamma on Gamma = (-W1, V1, ..., -W5, V5, p1, p2), columns are images:");
        for r in &rows {
            eprintln!("{r}");
        }
        details["matrix"] = json!(m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>());
    }
    Ok(report("gamma", true, details))
}

/// Chain file: {"frame": "order2" | "order3", "steps": [[class, ...], ...]} where a class is an
/// expression in the T_X labels or an array of rational strings.
fn specialize_chain(chain: &str) -> Result<i32> {
    let (frame, steps) = match chain {
        "order2" => ("order2".to_string(), specialize::five_steps()),
        "order3" => ("order3".to_string(), order3::three_steps(false)),
        _ => {
            let v = read_json(Path::new(chain))?;
            let frame = v.get("frame").and_then(Value::as_str).unwrap_or("order2").to_string();
            let (syms, dim) = match frame.as_str() {
                "order2" => (k3::t_symbols(), 12),
                "order3" => (order3::t3_symbols(), 8),
                f => bail!("unknown frame {f:?}"),
            };
            let steps = v
                .get("steps")
                .and_then(Value::as_array)
                .context("chain file needs a \"steps\" list")?
                .iter()
                .map(|step| {
                    step.as_array()
                        .context("each step is a list of classes")?
                        .iter()
                        .map(|c| match c {
                            Value::String(e) => Ok(syms.eval(e)?),
                            _ => rational_vector(c, dim),
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            (frame, steps)
        }
    };
    let (reps, _) = if frame == "order3" { order3::specialize3(&steps)? } else { specialize::specialize(&steps)? };
    Ok(report("specialize", true, json!({ "frame": frame, "steps": reps })))
}

fn weierstrass_cmd(a: &str, b: &str, quotient: bool) -> Result<i32> {
    let (a, b) = (Poly::parse(a)?, Poly::parse(b)?);
    let f = weierstrass::discriminant_multiplicities(&a, &b)?;
    let mut details = json!({
        "a": a.to_string(),
        "b": b.to_string(),
        "fibres": f.label(),
        "euler": f.euler(),
        "sites": f.sites,
        "possible_type_III": f.shared_root,
    });
    if quotient {
        let (qa, qb) = weierstrass::quotient_weierstrass(&a, &b)?;
        let g = weierstrass::discriminant_multiplicities(&qa, &qb)?;
        details["quotient"] = json!({
            "a": qa.to_string(),
            "b": qb.to_string(),
            "fibres": g.label(),
            "sites": g.sites,
            "fibres_exchange": weierstrass::fibers_exchange(&f, &g),
        });
    }
    Ok(report("weierstrass", f.euler() == 24, details))
}
