use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use gwlab::etale::{rost_norm, transfer, EtaleAlgebra, GwOverAlgebra};
use gwlab::expr::{parse_field, parse_gr, parse_gw};
use gwlab::forms::TriBool;
use gwlab::gw::GwElem;
use gwlab::localsymbols::{hilbert, Place};
use gwlab::suites::run_suite;
use gwlab::{expmod, laurent, FieldTower};

/// Exact computation in Grothendieck-Witt rings.
#[derive(Parser)]
#[command(name = "gwlab", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Base field, e.g. `Q`, `F7`, `Q[sqrt 2][sqrt -3]`.
    /// Defaults to `Q`; suites that run over several fields use all of them unless this is given.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Number of Laurent variables t1..tm.
    #[arg(long, global = true, default_value_t = 0)]
    vars: usize,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rank, discriminant, Hasse symbols, signatures, torsion and unit tests.
    Invariants {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Decide whether two expressions are equal in GW.
    Isometric {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Evaluate an expression (in the group-ring model when --vars > 0).
    Eval {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Rost norm N_{A/k}; one --expr per component, or one for all of them.
    Norm {
        #[arg(long)]
        algebra: String,
        #[arg(long = "expr", required = true, allow_hyphen_values = true)]
        exprs: Vec<String>,
    },
    /// Scharlau transfer tr_{A/k}.
    Transfer {
        #[arg(long)]
        algebra: String,
        #[arg(long = "expr", required = true, allow_hyphen_values = true)]
        exprs: Vec<String>,
    },
    /// x^y for a unit x.
    Exp {
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        exponent: String,
    },
    /// The logarithm of an element of F2.
    Log {
        #[arg(long, allow_hyphen_values = true)]
        expr: String,
        /// Use log_(m) with this many variables instead of the stable value.
        #[arg(long)]
        m: Option<usize>,
    },
    /// x^y with y in the group-ring model.
    Grexp {
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        #[arg(long, allow_hyphen_values = true)]
        exponent: String,
    },
    /// The Hilbert symbol (a, b)_v over Q; v is a prime or `inf`.
    Hilbert {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        v: String,
    },
    /// Run a named property suite.
    Check {
        suite: String,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn tri(t: TriBool) -> serde_json::Value {
    match t.known() {
        Some(b) => json!(b),
        None => json!(null),
    }
}

fn over_algebra(k: &FieldTower, algebra: &str, exprs: &[String]) -> Result<GwOverAlgebra> {
    let a = EtaleAlgebra::parse(k, algebra)?;
    let n = a.components().len();
    if exprs.len() != 1 && exprs.len() != n {
        bail!("{} expressions given for {} components", exprs.len(), n);
    }
    let parts = a
        .components()
        .iter()
        .enumerate()
        .map(|(i, c)| parse_gw(c, &exprs[if exprs.len() == 1 { 0 } else { i }]))
        .collect::<gwlab::Result<Vec<_>>>()?;
    Ok(GwOverAlgebra::new(&a, parts)?)
}

fn print_gw(x: &GwElem, as_json: bool) {
    if as_json {
        println!("{}", json!({ "value": x.to_string(), "dim": x.dim() }));
    } else {
        println!("{x}");
    }
}

fn run(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    let fname = g.field.as_deref().unwrap_or("Q");
    let k = parse_field(fname).with_context(|| format!("field `{fname}`"))?;
    match &cli.cmd {
        Cmd::Invariants { expr } => {
            let x = parse_gw(&k, expr)?;
            let inv = x.invariants();
            if g.json {
                let mut v = inv.to_json(&k);
                v["torsion"] = tri(x.is_torsion());
                v["unit"] = tri(x.is_unit());
                println!("{v}");
            } else {
                println!("dim      {}", inv.dim);
                println!("disc     {}", inv.disc.display(&k));
                for (p, s) in &inv.hasse {
                    println!("hasse    {p}: {s}");
                }
                for (e, s) in &inv.signatures {
                    println!("sig      {e}: {s}");
                }
                println!("torsion  {}", x.is_torsion());
                println!("unit     {}", x.is_unit());
            }
        }
        Cmd::Isometric { a, b } => {
            let v = parse_gw(&k, a)?.equals(&parse_gw(&k, b)?)?;
            if g.json {
                println!("{}", json!({ "equal": tri(v) }));
            } else {
                println!("{v}");
            }
        }
        Cmd::Eval { expr } => {
            if g.vars > 0 {
                let x = parse_gr(&k, g.vars, expr)?;
                if g.json {
                    println!("{}", json!({ "value": x.to_string(), "vars": g.vars }));
                } else {
                    println!("{x}");
                }
            } else {
                print_gw(&parse_gw(&k, expr)?, g.json);
            }
        }
        Cmd::Norm { algebra, exprs } => print_gw(&rost_norm(&over_algebra(&k, algebra, exprs)?), g.json),
        Cmd::Transfer { algebra, exprs } => print_gw(&transfer(&over_algebra(&k, algebra, exprs)?), g.json),
        Cmd::Exp { base, exponent } => {
            print_gw(&expmod::exp(&parse_gw(&k, base)?, &parse_gw(&k, exponent)?)?, g.json);
        }
        Cmd::Log { expr, m } => {
            let x = parse_gw(&k, expr)?;
            let y = match m {
                Some(m) => laurent::log_m(&x, *m)?,
                None => laurent::log(&x)?,
            };
            print_gw(&y, g.json);
        }
        Cmd::Grexp { base, exponent } => {
            let vars = g.vars.max(1);
            let x = laurent::gr_exp(&parse_gw(&k, base)?, &parse_gr(&k, vars, exponent)?)?;
            if g.json {
                println!("{}", json!({ "value": x.to_string(), "vars": vars }));
            } else {
                println!("{x}");
            }
        }
        Cmd::Hilbert { a, b, v } => {
            let q = FieldTower::rationals();
            let ra = gwlab::FieldElem::parse(&q, a)?.as_rational().context("a must be rational")?;
            let rb = gwlab::FieldElem::parse(&q, b)?.as_rational().context("b must be rational")?;
            let place: Place = v.parse()?;
            let s = hilbert(&ra, &rb, &place)?;
            if g.json {
                println!("{}", json!({ "a": a, "b": b, "place": place.to_string(), "symbol": s }));
            } else {
                println!("{s}");
            }
        }
        Cmd::Check { suite, out } => {
            let field = g.field.as_ref().map(|_| &k);
            let report = run_suite(suite, g.samples, g.seed, field)?;
            let text = report.to_json();
            if let Some(path) = out {
                std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            if g.json {
                println!("{text}");
            } else {
                for p in &report.parts {
                    println!("{}", p.summary());
                }
                println!("{}", report.summary());
                for (s, c) in report.failures().iter().take(20) {
                    println!("  {s}: {} on {} -> {:?}", c.check, c.input, c.status);
                }
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
