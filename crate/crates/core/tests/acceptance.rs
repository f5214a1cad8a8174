//! End-to-end acceptance suite: one line per criterion, then a hard failure
//! if any criterion failed.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use epsilon_core::elimination::Engine;
use epsilon_core::embedding::{embed_proof, eps_translate};
use epsilon_core::herbrand::{second_epsilon, second_epsilon_pipeline, Prenex};
use epsilon_core::kernel::{check, compile_witness, is_tautology, metrics, Calculus, Proof};
use epsilon_core::lowerbound::{build_ek_proof, check_lower_bound, tower};
use epsilon_core::parser::parse_expr;
use epsilon_core::syntax::{alpha_eq, degree, rank};
use epsilon_core::Expr;
use rand::Rng;

type Outcome = Result<String, String>;

fn e(s: &str) -> Expr {
    parse_expr(s).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden_translations() -> Outcome {
    let start = Instant::now();
    let e1 = e("eps y. ~Q(y)");
    let e2 = e("eps x. (P(x) | Q(eps y. ~Q(y)))");
    let got = eps_translate(&e("exists x. (P(x) | forall y. Q(y))"));
    let want = Expr::or(Expr::pred("P", vec![e2]), Expr::pred("Q", vec![e1]));
    ensure(alpha_eq(&got, &want), || format!("first example gave {got}"))?;

    let e3 = e("eps x. A(x, eps z. A(x, z))");
    let e4 = e("eps y. A(eps x. A(x, eps z. A(x, z)), y)");
    let got = eps_translate(&e("exists x. exists y. A(x, y)"));
    let want = Expr::pred("A", vec![e3, e4]);
    ensure(alpha_eq(&got, &want), || format!("second example gave {got}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("both examples α-equal, {t:?}"))
}

fn rank_degree_table() -> Outcome {
    let e1 = e("eps y. ~Q(y)");
    let e2 = e("eps x. (P(x) | Q(eps y. ~Q(y)))");
    let e3 = e("eps x. A(x, eps z. A(x, z))");
    let e4 = e("eps y. A(eps x. A(x, eps z. A(x, z)), y)");
    let table = [
        ("e1", &e1, 1, 1),
        ("e2", &e2, 2, 1),
        ("e3", &e3, 1, 2),
        ("e4", &e4, 2, 1),
    ];
    for (n, t, deg, rk) in table {
        let (d, r) = (degree(t).unwrap(), rank(t).unwrap());
        ensure((d, r) == (deg, rk), || format!("{n}: deg {d}, rk {r}; expected deg {deg}, rk {rk}"))?;
    }
    Ok("deg/rk of e1..e4 = (1,1) (2,1) (1,2) (2,1)".into())
}

fn embedding_audit() -> Outcome {
    let mut rng = common::rng(0x5eed_0003);
    let n = 150;
    let mut max_ratio = 0.0f64;
    let mut with_quant = 0;
    for i in 0..n {
        let steps = rng.gen_range(4..=30);
        let p = common::random_pc_eps_proof(&mut rng, steps);
        ensure(p.size() <= 30 && check(&p).is_ok(), || format!("proof {i}: generator out of spec"))?;
        if p.steps.iter().any(|s| s.just.is_quantifier_axiom()) {
            with_quant += 1;
        }
        let q = embed_proof(&p).map_err(|err| format!("proof {i}: {err}"))?;
        let rep = check(&q);
        ensure(rep.is_ok(), || format!("proof {i}: output fails check: {:?}", rep.violations))?;
        ensure(q.size() <= 3 * p.size(), || format!("proof {i}: size {} > 3·{}", q.size(), p.size()))?;
        let (ci, co) = (metrics(&p).cc, metrics(&q).cc);
        ensure(co <= ci, || format!("proof {i}: cc {co} > {ci}"))?;
        max_ratio = max_ratio.max(q.size() as f64 / p.size() as f64);
    }
    Ok(format!("{n} proofs ({with_quant} with quantifier axioms), max size ratio {max_ratio:.2}, 0 violations"))
}

fn ec_corpus() -> Vec<common::EcCase> {
    let mut rng = common::rng(0x5eed_0004);
    (0..120).map(|_| common::random_ec_eps_case(&mut rng)).collect()
}

fn elimination_audit(corpus: &[common::EcCase]) -> Outcome {
    let mut rounds = 0;
    let mut by_rank: BTreeMap<usize, usize> = BTreeMap::new();
    let mut by_terms: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, c) in corpus.iter().enumerate() {
        let m = metrics(&c.proof);
        let terms: usize = m.order.values().sum();
        ensure((1..=4).contains(&terms) && m.rank <= 2, || {
            format!("case {i}: {terms} critical terms at rank {}", m.rank)
        })?;
        *by_rank.entry(m.rank).or_default() += 1;
        *by_terms.entry(terms).or_default() += 1;
        let hd = Engine::new()
            .extract_herbrand(&c.proof, None)
            .map_err(|err| format!("case {i}: {err}"))?;
        for r in &hd.trace.rounds {
            rounds += 1;
            let n1 = r.width + 1;
            ensure(r.order_after + 1 == r.order_before, || format!("case {i}: order {r:?}"))?;
            ensure(r.rank_after <= r.rank_before, || format!("case {i}: rank {r:?}"))?;
            ensure(r.rank_after < r.rank_before || r.degree_after <= r.degree_before, || {
                format!("case {i}: degree {r:?}")
            })?;
            ensure(r.cc_after <= r.cc_before * n1, || format!("case {i}: cc {r:?}"))?;
            ensure(
                r.rank_after < r.rank_before || r.width_after <= r.width_before * r.width_before,
                || format!("case {i}: width {r:?}"),
            )?;
        }
    }
    Ok(format!(
        "{} proofs, {rounds} rounds, proofs by rank {by_rank:?}, by critical terms {by_terms:?}, 0 violations",
        corpus.len()
    ))
}

fn herbrand_soundness(corpus: &[common::EcCase]) -> Outcome {
    let mut max_len = 0;
    for (i, c) in corpus.iter().enumerate() {
        let hd = Engine::new()
            .extract_herbrand(&c.proof, None)
            .map_err(|err| format!("case {i}: {err}"))?;
        let d = hd.expansion.disjunction();
        ensure(!d.has_eps() && !d.has_quantifier(), || format!("case {i}: {d}"))?;
        ensure(is_tautology(&d).unwrap(), || format!("case {i}: not a tautology: {d}"))?;
        ensure(hd.within_bound(), || format!("case {i}: length {} above {}", hd.length(), hd.bound))?;
        ensure(check(&hd.proof).is_ok(), || format!("case {i}: extracted proof fails check"))?;
        max_len = max_len.max(hd.length());
    }
    Ok(format!("{} extractions, max length {max_len}, 0 failures", corpus.len()))
}

/// Exhaustive truth tables, independent of the library's checker.
fn truth_table(f: &Expr) -> bool {
    fn atoms(f: &Expr, out: &mut Vec<Expr>) {
        match f {
            Expr::Pred(..) => {
                if !out.contains(f) {
                    out.push(f.clone())
                }
            }
            Expr::Not(a) => atoms(a, out),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Imp(a, b) => {
                atoms(a, out);
                atoms(b, out);
            }
            _ => panic!("not propositional: {f}"),
        }
    }
    fn eval(f: &Expr, atoms: &[Expr], v: u32) -> bool {
        match f {
            Expr::Pred(..) => v >> atoms.iter().position(|a| a == f).unwrap() & 1 == 1,
            Expr::Not(a) => !eval(a, atoms, v),
            Expr::And(a, b) => eval(a, atoms, v) && eval(b, atoms, v),
            Expr::Or(a, b) => eval(a, atoms, v) || eval(b, atoms, v),
            Expr::Imp(a, b) => !eval(a, atoms, v) || eval(b, atoms, v),
            _ => unreachable!(),
        }
    }
    let mut xs = Vec::new();
    atoms(f, &mut xs);
    assert!(xs.len() <= 12);
    (0..1u32 << xs.len()).all(|v| eval(f, &xs, v))
}

fn random_prop<R: Rng>(rng: &mut R, atoms: &[Expr], depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return atoms[rng.gen_range(0..atoms.len())].clone();
    }
    let (a, b) = (random_prop(rng, atoms, depth - 1), random_prop(rng, atoms, depth - 1));
    match rng.gen_range(0..4) {
        0 => Expr::not(a),
        1 => Expr::and(a, b),
        2 => Expr::or(a, b),
        _ => Expr::imp(a, b),
    }
}

fn tautology_oracle() -> Outcome {
    let mut rng = common::rng(0x5eed_0006);
    let all: Vec<Expr> = ["P", "Q", "S"]
        .iter()
        .flat_map(|p| ["a", "b", "c", "d"].map(|x| Expr::pred(p, vec![Expr::free(x)])))
        .collect();
    let (mut taut, mut total) = (0, 0);
    for i in 0..1000 {
        let k = rng.gen_range(1..=all.len());
        let atoms = &all[..k];
        let depth = rng.gen_range(1..6);
        let f = random_prop(&mut rng, atoms, depth);
        // bias half of the corpus towards valid formulas
        let f = match i % 4 {
            0 => Expr::imp(f.clone(), Expr::or(f, random_prop(&mut rng, atoms, 2))),
            1 => Expr::or(f.clone(), Expr::not(f)),
            _ => f,
        };
        let (lib, oracle) = (is_tautology(&f).unwrap(), truth_table(&f));
        ensure(lib == oracle, || format!("formula {i}: library {lib}, truth table {oracle}: {f}"))?;
        taut += oracle as usize;
        total += 1;
    }
    Ok(format!("{total} formulas ({taut} tautologies), 0 disagreements"))
}

fn lower_bounds() -> Outcome {
    let mut notes = Vec::new();
    for k in 0..=2 {
        let start = Instant::now();
        let target = tower(k).unwrap();
        let c = check_lower_bound(k, target).map_err(|err| format!("k = {k}: {err}"))?;
        let t = start.elapsed();
        ensure(c.certified && c.bound == target, || format!("k = {k}: bound {}", c.bound))?;
        ensure(c.required.iter().all(|r| r.necessary), || format!("k = {k}: an instance is not necessary"))?;
        ensure(t < Duration::from_secs(60), || format!("k = {k}: {t:?}"))?;
        notes.push(format!("HC(E{k}) ≥ {} [{t:?}]", c.bound));
    }
    // stretch target, budget: numerals up to 16, 60 s
    let start = Instant::now();
    match check_lower_bound(3, 16) {
        Ok(c) if c.certified && start.elapsed() < Duration::from_secs(60) => {
            notes.push(format!("stretch HC(E3) ≥ {} [{:?}]", c.bound, start.elapsed()))
        }
        other => notes.push(format!("stretch HC(E3) not reached: {:?}", other.map(|c| c.bound))),
    }
    Ok(notes.join(", "))
}

fn linear_cc() -> Outcome {
    let mut cc = Vec::new();
    let mut t6 = Duration::ZERO;
    for k in 0..=6 {
        let start = Instant::now();
        let p = build_ek_proof(k).map_err(|err| format!("k = {k}: {err}"))?;
        let rep = check(&p);
        ensure(rep.is_ok(), || format!("k = {k}: {:?}", rep.violations.first()))?;
        t6 = start.elapsed();
        cc.push(metrics(&p).cc);
    }
    let diffs: Vec<usize> = cc.windows(2).map(|w| w[1] - w[0]).collect();
    ensure(diffs.iter().all(|&d| d == diffs[0]), || format!("cc {cc:?}"))?;
    ensure(t6 < Duration::from_secs(60), || format!("k = 6 took {t6:?}"))?;
    Ok(format!("cc = {}·k + {} for k = 0..6 ({cc:?}), k = 6 in {t6:?}", diffs[0], cc[0]))
}

fn second_epsilon_round_trip() -> Outcome {
    let mut cases: Vec<Proof> = common::second_eps_theorems()
        .iter()
        .map(|(g, rows)| common::second_eps_proof(g, rows).1)
        .collect();
    cases.extend(common::second_eps_eps_proofs());
    let mut eae = 0;
    for (i, p) in cases.iter().enumerate() {
        let a = p.end().unwrap().clone();
        let shape: String = Prenex::split(&a)
            .unwrap()
            .prefix
            .iter()
            .map(|(univ, _)| if *univ { 'A' } else { 'E' })
            .collect();
        if shape.contains("EAE") {
            eae += 1;
        }
        for (how, out) in [("second_epsilon", second_epsilon(p)), ("pipeline", second_epsilon_pipeline(p))] {
            let q = out.map_err(|err| format!("theorem {i} ({a}) via {how}: {err}"))?;
            ensure(q.calculus == Calculus::Pc && check(&q).is_ok(), || format!("theorem {i} via {how}: bad output"))?;
            ensure(alpha_eq(q.end().unwrap(), &a), || format!("theorem {i} via {how}: end formula changed"))?;
        }
    }
    ensure(cases.len() >= 20 && eae > 0, || format!("{} theorems, {eae} ∃∀∃", cases.len()))?;
    Ok(format!("{} theorems ({eae} with an ∃∀∃ block), pipeline and entry point both check", cases.len()))
}

fn witness_characterization(corpus: &[common::EcCase]) -> Outcome {
    for (i, c) in corpus.iter().enumerate() {
        let p = compile_witness(&c.critical, &c.goal).map_err(|a| format!("case {i}: falsified by {a:?}"))?;
        ensure(check(&p).is_ok(), || format!("case {i}: compiled proof fails check"))?;
        ensure(alpha_eq(p.end().unwrap(), &c.goal), || format!("case {i}: wrong end formula"))?;
    }
    Ok(format!("{} goals compiled from their own critical formulas", corpus.len()))
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

#[test]
fn acceptance() {
    let corpus = ec_corpus();
    let criteria: Vec<Criterion> = vec![
        ("golden translations", Box::new(golden_translations)),
        ("rank/degree table", Box::new(rank_degree_table)),
        ("embedding audit", Box::new(embedding_audit)),
        ("elimination recurrence audit", Box::new(|| elimination_audit(&corpus))),
        ("Herbrand soundness", Box::new(|| herbrand_soundness(&corpus))),
        ("tautology oracle equivalence", Box::new(tautology_oracle)),
        ("lower bound at desk scale", Box::new(lower_bounds)),
        ("linear cc of short proofs", Box::new(linear_cc)),
        ("second ε-theorem round trip", Box::new(second_epsilon_round_trip)),
        ("witness characterization", Box::new(|| witness_characterization(&corpus))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(d) => println!("[PASS] {:>2}. {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {d}", i + 1);
            }
        }
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
