//! `epsilon`: command-line front end for the proof pipeline.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use num_bigint::BigUint;

use epsilon_core::document::{
    parse_certificate, parse_formula_doc, parse_proof, print_certificate, print_formula_doc, print_proof,
};
use epsilon_core::elimination::{hyperexp_with, Engine, Expansion, DEFAULT_MAX_BITS};
use epsilon_core::embedding::{embed_proof, eps_translate};
use epsilon_core::herbrand::{herbrand_to_pc_traced, second_epsilon};
use epsilon_core::kernel::{check, is_tautology, metrics, Proof};
use epsilon_core::lowerbound::{build_ek_proof, canonical_sequent, check_lower_bound, make_ek, tower};
use epsilon_core::Name;

use report::{write_atomic, RunReport};

/// Environment variable: bit ceiling for exact evaluation of `2_y^x`.
pub const MAX_BITS_ENV: &str = "EPSILON_MAX_BITS";

#[derive(Parser)]
#[command(name = "epsilon", version, about = "ε-calculus proofs: checking, elimination, Herbrand extraction")]
struct Cli {
    /// Print the run report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a proof and print its metrics.
    Check { proof: PathBuf },
    /// ε-translate a formula.
    Translate {
        formula: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a PC_ε proof into the ε-calculus.
    Embed {
        proof: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Eliminate critical formulas and write a Herbrand certificate.
    Eliminate {
        #[arg(long)]
        proof: PathBuf,
        /// Matrix of the expansion (its parameters given by --params).
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Comma-separated parameters of the matrix (default: all its free
        /// variables, sorted).
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Turn a PC_ε proof of a prenex ε-free formula into a PC proof.
    SecondEps {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild a PC proof of a prenex goal from a Herbrand certificate of
    /// its Herbrand normal form.
    Reconstruct {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        goal: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify the Herbrand-complexity lower bound for `E_k`.
    Lowerbound {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        depth: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Short proof, lower bound and a checked Herbrand expansion of `E_k`.
    DemoEk {
        k: usize,
        /// Numeral bound for the lower-bound search (default `2_k^1`).
        #[arg(long)]
        depth: Option<u64>,
        /// Write the short proof here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the Herbrand certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

fn max_bits() -> Result<u64> {
    match std::env::var(MAX_BITS_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{MAX_BITS_ENV}={v:?} is not a number")),
        Err(_) => Ok(DEFAULT_MAX_BITS),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_proof(path: &Path) -> Result<Proof> {
    parse_proof(&read(path)?).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn load_formula(path: &Path) -> Result<epsilon_core::Expr> {
    parse_formula_doc(&read(path)?).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Checks `p`, recording the verdict and printing violations to stderr.
fn checked(rep: &mut RunReport, key: &str, p: &Proof) -> bool {
    let r = check(p);
    for v in &r.violations {
        eprintln!("{key}: {v}");
    }
    rep.verdict(key, r.is_ok());
    r.is_ok()
}

fn run(cli: &Cli) -> Result<RunReport> {
    let bits = max_bits()?;
    let mut rep = RunReport::default();
    match &cli.cmd {
        Cmd::Check { proof } => {
            rep.command = "check".into();
            rep.input("proof", path_str(proof));
            let p = load_proof(proof)?;
            rep.value("calculus", p.calculus.tag());
            rep.metrics_before = Some(metrics(&p));
            checked(&mut rep, "checks", &p);
        }
        Cmd::Translate { formula, out } => {
            rep.command = "translate".into();
            rep.input("formula", path_str(formula));
            let f = load_formula(formula)?;
            let t = eps_translate(&f);
            let text = print_formula_doc(&t);
            rep.value("translation", text.trim_end());
            match out {
                Some(o) => {
                    write_atomic(o, &text)?;
                    rep.output("formula", path_str(o));
                }
                None if !cli.json => print!("{text}"),
                None => {}
            }
            rep.verdict("eps_free_quantifiers", !t.has_quantifier());
        }
        Cmd::Embed { proof, out } => {
            rep.command = "embed".into();
            rep.input("proof", path_str(proof));
            let p = load_proof(proof)?;
            rep.metrics_before = Some(metrics(&p));
            let q = embed_proof(&p)?;
            rep.metrics_after = Some(metrics(&q));
            if checked(&mut rep, "output_checks", &q) {
                write_atomic(out, &print_proof(&q))?;
                rep.output("proof", path_str(out));
            }
        }
        Cmd::Eliminate {
            proof,
            matrix,
            params,
            trace,
            cert,
        } => {
            rep.command = "eliminate".into();
            rep.input("proof", path_str(proof));
            let mut p = load_proof(proof)?;
            rep.metrics_before = Some(metrics(&p));
            if p.calculus.allows_quantifiers() {
                p = embed_proof(&p)?;
                rep.value("embedded", true);
            }
            let m = match matrix {
                Some(path) => {
                    rep.input("matrix", path_str(path));
                    let m = load_formula(path)?;
                    let ps: Vec<Name> = match params {
                        Some(s) => s.split(',').map(|x| Name::from(x.trim())).collect(),
                        None => m.free_vars().into_iter().collect(),
                    };
                    Some((m, ps))
                }
                None => None,
            };
            let mut eng = Engine::new();
            eng.max_bits = bits;
            let hd = eng.extract_herbrand(&p, m.as_ref().map(|(m, ps)| (m, ps.as_slice())))?;
            rep.metrics_after = Some(metrics(&hd.proof));
            rep.value("length", hd.length());
            rep.value("cc", hd.cc);
            rep.value("bound", hd.bound.to_string());
            rep.value("rounds", hd.trace.rounds.len());
            let violations = hd.trace.rounds.iter().filter_map(|r| r.violated_bound()).count();
            rep.verdict("round_bounds", violations == 0);
            rep.verdict("within_bound", hd.within_bound());
            if let Some(t) = hd.tautology {
                rep.verdict("tautology", t);
            }
            checked(&mut rep, "output_checks", &hd.proof);
            if let Some(t) = trace {
                write_atomic(t, &serde_json::to_string_pretty(&hd.trace)?)?;
                rep.trace = Some(path_str(t));
            }
            if let Some(c) = cert {
                write_atomic(c, &print_certificate(&hd.certificate()))?;
                rep.certificate = Some(path_str(c));
            }
        }
        Cmd::SecondEps { proof, out } => {
            rep.command = "second-eps".into();
            rep.input("proof", path_str(proof));
            let p = load_proof(proof)?;
            rep.metrics_before = Some(metrics(&p));
            let q = second_epsilon(&p)?;
            rep.metrics_after = Some(metrics(&q));
            let same_end = match (p.end(), q.end()) {
                (Some(a), Some(b)) => epsilon_core::syntax::alpha_eq(a, b),
                _ => false,
            };
            rep.verdict("same_end_formula", same_end);
            if checked(&mut rep, "output_checks", &q) {
                write_atomic(out, &print_proof(&q))?;
                rep.output("proof", path_str(out));
            }
        }
        Cmd::Reconstruct { cert, goal, out } => {
            rep.command = "reconstruct".into();
            rep.input("certificate", path_str(cert));
            rep.input("goal", path_str(goal));
            let c = parse_certificate(&read(cert)?).map_err(|e| anyhow!("{}:{e}", cert.display()))?;
            let a = load_formula(goal)?;
            let exp = Expansion {
                matrix: c.matrix,
                params: c.params,
                rows: c.rows,
            };
            rep.value("length", exp.length());
            let r = herbrand_to_pc_traced(&exp, &a)?;
            rep.value("fresh_variables", r.replaced.len());
            rep.metrics_after = Some(metrics(&r.proof));
            if checked(&mut rep, "output_checks", &r.proof) {
                write_atomic(out, &print_proof(&r.proof))?;
                rep.output("proof", path_str(out));
            }
        }
        Cmd::Lowerbound { k, depth, out } => {
            rep.command = "lowerbound".into();
            rep.input("k", k.to_string());
            rep.input("depth", depth.to_string());
            let c = check_lower_bound(*k, *depth)?;
            rep.value("bound", c.bound);
            rep.value("target", c.target);
            rep.verdict("witness_valid", c.witness_valid);
            rep.verdict("certified", c.certified);
            if let Some(o) = out {
                write_atomic(o, &serde_json::to_string_pretty(&c)?)?;
                rep.certificate = Some(path_str(o));
            }
        }
        Cmd::DemoEk { k, depth, out, cert } => demo_ek(&mut rep, *k, *depth, out.as_deref(), cert.as_deref(), bits)?,
    }
    Ok(rep)
}

fn demo_ek(
    rep: &mut RunReport,
    k: usize,
    depth: Option<u64>,
    out: Option<&Path>,
    cert: Option<&Path>,
    bits: u64,
) -> Result<()> {
    rep.command = "demo-ek".into();
    rep.input("k", k.to_string());
    let target = tower(k).ok_or_else(|| anyhow!("2_{k}^1 does not fit in 64 bits"))?;
    let depth = depth.unwrap_or(target);

    let p = build_ek_proof(k)?;
    let m = metrics(&p);
    let cc = m.cc as u64;
    rep.metrics_before = Some(m);
    checked(rep, "short_proof_checks", &p);
    if let Some(o) = out {
        write_atomic(o, &print_proof(&p))?;
        rep.output("proof", path_str(o));
    }
    let upper = hyperexp_with(2 * cc, BigUint::from(3 * cc), bits);
    rep.value("upper_bound", upper.to_string());

    // The canonical Herbrand sequent, read as an expansion of E_k's matrix.
    let seq = canonical_sequent(k).ok_or_else(|| anyhow!("k = {k} is out of range"))?;
    let exp = seq.expansion(k);
    let len = exp.length();
    rep.value("herbrand_length", len);
    rep.verdict("expansion_tautology", is_tautology(&exp.disjunction())?);
    rep.verdict("length_within_upper_bound", upper.at_least(&BigUint::from(len)));
    if let Some(c) = cert {
        let hc = epsilon_core::document::HerbrandCertificate {
            matrix: exp.matrix.clone(),
            params: exp.params.clone(),
            rows: exp.rows.clone(),
            cc: Some(cc as usize),
            bound: Some(upper.to_string()),
            tautology: Some(true),
        };
        write_atomic(c, &print_certificate(&hc))?;
        rep.certificate = Some(path_str(c));
    }
    let r = herbrand_to_pc_traced(&exp, &make_ek(k))?;
    rep.metrics_after = Some(metrics(&r.proof));
    checked(rep, "reconstruction_checks", &r.proof);

    let lb = check_lower_bound(k, depth)?;
    rep.value("lower_bound", lb.bound);
    rep.verdict("lower_bound_certified", lb.certified);
    rep.verdict("lower_bound_below_length", lb.bound <= len as u64);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // deep formulas recurse deeply
    let worker = std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(move || {
            let start = Instant::now();
            let res = run(&cli);
            (cli.json, start, res)
        })
        .expect("spawn worker");
    let (json, start, res) = worker.join().expect("worker panicked");
    match res {
        Ok(mut rep) => {
            rep.wall_ms = start.elapsed().as_millis() as u64;
            if json {
                println!("{}", rep.to_json());
            } else {
                print!("{}", rep.to_text());
            }
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
