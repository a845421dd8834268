//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fail.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use quasitruth_core::{
    classify_sentence, count_a_normal, enumerate_expansions, find_a_normal, is_a_normal, is_true, parse_formula,
    parse_kb, pragmatic_truth, AuditMode, CountVerdict, Domain, ExistenceVerdict, Fill, Formula, KnowledgeBase,
    PartialRelation, PartialStructure, SearchBudget, Sentence, Signature, Term, TotalStructure, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_quasitruth"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn cli_json(args: &[&str]) -> Result<(i32, Value), String> {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out) = cli(&all);
    let v = serde_json::from_str(&out).map_err(|e| format!("bad JSON {out:?}: {e}"))?;
    Ok((code, v))
}

fn load(name: &str) -> KnowledgeBase {
    parse_kb(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn sentence(kb: &KnowledgeBase, text: &str) -> Sentence {
    Sentence::new(parse_formula(text, kb.signature()).into_result().unwrap()).unwrap()
}

fn brute_count(kb: &KnowledgeBase) -> usize {
    enumerate_expansions(kb.structure())
        .unwrap()
        .filter(|b| is_a_normal(kb, b).unwrap())
        .count()
}

fn family_f() -> Check {
    let path = data("family-f.kb.json");
    let (code, v) = cli_json(&["expand", path.to_str().unwrap()])?;
    ensure!(code == 0, "exit {code}");
    ensure!(
        v["evidence"]["undetermined_cells"] == 1,
        "k = {}",
        v["evidence"]["undetermined_cells"]
    );
    ensure!(
        v["evidence"]["expansions"] == "2",
        "expansions = {}",
        v["evidence"]["expansions"]
    );
    let kb = load("family-f.kb.json");
    let married = sentence(&kb, "Married(joseph, mary)");
    let all: Vec<_> = enumerate_expansions(kb.structure()).unwrap().collect();
    ensure!(all.len() == 2, "{} expansions", all.len());
    ensure!(
        all.iter().all(|b| is_true(b, married.formula()).unwrap()),
        "Married(joseph, mary) false somewhere"
    );
    Ok(())
}

fn scenario_g() -> Check {
    let path = data("g.kb.json");
    let (code, v) = cli_json(&["classify", path.to_str().unwrap(), "Father(joseph, peter)"])?;
    ensure!(code == 0 && v["verdict"] == "QUASI-TRUE", "got {v}");
    let father = &v["evidence"]["relations"]["Father"];
    ensure!(
        *father == serde_json::json!([["Joseph", "John"], ["Joseph", "Peter"]]),
        "witness Father = {father}"
    );
    let (_, e) = cli_json(&["expand", path.to_str().unwrap()])?;
    ensure!(e["evidence"]["a_normal"] == "1", "count {}", e["evidence"]["a_normal"]);
    let brute = brute_count(&load("g.kb.json"));
    ensure!(brute == 1, "brute-force count {brute}");
    Ok(())
}

fn scenario_g_prime() -> Check {
    for (file, label, exit) in [
        ("g-prime-bare.kb.json", "QUASI-TRUE", 0),
        ("g-prime.kb.json", "PRAGMATIC-NONSENSE", 5),
    ] {
        let path = data(file);
        for s in ["Father(joseph, peter)", "~Father(joseph, peter)"] {
            let (code, v) = cli_json(&["classify", path.to_str().unwrap(), s])?;
            ensure!(code == exit && v["verdict"] == label, "{file} {s}: {v}");
            if exit == 5 {
                let missing = &v["evidence"]["audit"]["missing"];
                ensure!(*missing == serde_json::json!(["alpha"]), "missing = {missing}");
            }
        }
    }
    Ok(())
}

fn scenario_g_double_prime() -> Check {
    let path = data("g-double-prime.kb.json");
    let p = path.to_str().unwrap();
    let (code, v) = cli_json(&["classify", p, "Father(joseph, peter)"])?;
    ensure!(code == 1 && v["verdict"] == "QUASI-FALSE", "Father: {v}");
    let (code, v) = cli_json(&["classify", p, "~Father(joseph, peter)"])?;
    ensure!(code == 0 && v["verdict"] == "QUASI-TRUE", "~Father: {v}");
    let (code, v) = cli_json(&["audit", p, "--mode", "strict"])?;
    ensure!(code == 5 && v["verdict"] == "NOT-WELL-BUILT", "strict audit: {v}");
    ensure!(
        v["evidence"]["strict_extras"] == serde_json::json!(["~Father(joseph, peter)"]),
        "extras {}",
        v["evidence"]["strict_extras"]
    );
    let (code, _) = cli_json(&["audit", p])?;
    ensure!(code == 0, "literal audit exit {code}");
    Ok(())
}

fn formal_nonsense() -> Check {
    let path = data("g.kb.json");
    for cmd in ["parse", "classify"] {
        let (code, v) = cli_json(&[cmd, path.to_str().unwrap(), "joseph ="])?;
        ensure!(code == 3 && v["verdict"] == "FORMAL-NONSENSE", "{cmd}: {v}");
        ensure!(
            v["evidence"]["position"] == 8,
            "{cmd} position {}",
            v["evidence"]["position"]
        );
    }
    Ok(())
}

struct Corpus {
    kb: KnowledgeBase,
    probe: Sentence,
    extra: Sentence,
}

fn random_formula(rng: &mut ChaCha8Rng, sig: &Signature, depth: usize, bound: &mut Vec<&'static str>) -> Formula {
    let consts: Vec<&str> = sig.constants().collect();
    let term = |rng: &mut ChaCha8Rng, bound: &[&'static str]| {
        let i = rng.random_range(0..bound.len() + consts.len());
        if i < bound.len() {
            Term::var(bound[i])
        } else {
            Term::constant(consts[i - bound.len()])
        }
    };
    if depth == 0 || rng.random_bool(0.3) {
        let preds: Vec<_> = sig.predicates().collect();
        let (name, arity) = preds[rng.random_range(0..preds.len())];
        return Formula::atom(name, (0..arity).map(|_| term(rng, bound)).collect());
    }
    let d = depth - 1;
    let sub = |rng: &mut ChaCha8Rng, bound: &mut Vec<&'static str>| random_formula(rng, sig, d, bound);
    match rng.random_range(0..7) {
        0 => Formula::not(sub(rng, bound)),
        1 => Formula::and(sub(rng, bound), sub(rng, bound)),
        2 => Formula::or(sub(rng, bound), sub(rng, bound)),
        3 => Formula::implies(sub(rng, bound), sub(rng, bound)),
        4 => Formula::iff(sub(rng, bound), sub(rng, bound)),
        q => {
            let v = ["x", "y"][rng.random_range(0..2)];
            bound.push(v);
            let body = sub(rng, bound);
            bound.pop();
            if q == 5 {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
    }
}

fn random_sentence(rng: &mut ChaCha8Rng, sig: &Signature) -> Sentence {
    let depth = rng.random_range(0..=4);
    Sentence::new(random_formula(rng, sig, depth, &mut Vec::new())).unwrap()
}

/// |D| <= 4, at most two predicates of arity <= 2, at most 12 open cells.
fn corpus() -> Vec<Corpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|_| {
            let n = rng.random_range(1..=4);
            let elements: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
            let mut preds = vec![("R", rng.random_range(0..=2))];
            if rng.random_bool(0.5) {
                preds.push(("S", rng.random_range(0..=2)));
            }
            let sig = Arc::new(Signature::new(preds.iter().map(|&(p, a)| (p.to_string(), a)), ["c"], false).unwrap());
            let domain = Domain::new(elements.clone()).unwrap();
            let mut open = 0;
            let relations: Vec<_> = preds
                .iter()
                .map(|&(p, arity)| {
                    let (mut yes, mut no, mut unk) = (Vec::new(), Vec::new(), Vec::new());
                    for r in 0..domain.tuple_count(arity).unwrap() {
                        let t: Vec<String> = domain.tuple_names(r, arity).into_iter().map(String::from).collect();
                        if open < 12 && rng.random_bool(0.6) {
                            open += 1;
                            unk.push(t);
                        } else if rng.random_bool(0.5) {
                            yes.push(t);
                        } else {
                            no.push(t);
                        }
                    }
                    let rel = PartialRelation::new(&domain, arity, &yes, &no, &unk, Fill::Explicit).unwrap();
                    (p, rel)
                })
                .collect();
            let c = elements[rng.random_range(0..n)].clone();
            let s = PartialStructure::new(sig.clone(), Arc::new(domain), relations, [("c", c)]).unwrap();
            let primary = (0..rng.random_range(0..=3))
                .map(|_| random_sentence(&mut rng, &sig))
                .collect();
            Corpus {
                kb: KnowledgeBase::new(s, primary, Vec::new()).unwrap(),
                probe: random_sentence(&mut rng, &sig),
                extra: random_sentence(&mut rng, &sig),
            }
        })
        .collect()
}

fn exact(kb: &KnowledgeBase) -> Result<usize, String> {
    match count_a_normal(kb, SearchBudget::unlimited()).verdict {
        CountVerdict::Exact(n) => Ok(usize::try_from(n).unwrap()),
        CountVerdict::Undetermined { .. } => Err("undetermined with unlimited budget".into()),
    }
}

fn oracle_equivalence(corpus: &[Corpus]) -> Check {
    for (i, c) in corpus.iter().enumerate() {
        let naive: Vec<TotalStructure> = enumerate_expansions(c.kb.structure())
            .unwrap()
            .filter(|b| c.kb.primary().iter().all(|p| is_true(b, p.formula()).unwrap()))
            .collect();
        let counted = exact(&c.kb)?;
        ensure!(
            counted == naive.len(),
            "instance {i}: count {counted} vs naive {}",
            naive.len()
        );
        let found = find_a_normal(&c.kb, None, SearchBudget::unlimited()).unwrap().verdict;
        match (&found, naive.first()) {
            (ExistenceVerdict::Exists(w), Some(first)) => ensure!(w == first, "instance {i}: witness order"),
            (ExistenceVerdict::NotExists, None) => {}
            _ => return Err(format!("instance {i}: existence {found:?} vs naive {}", naive.len())),
        }
        let with_probe: Vec<&Sentence> = c.kb.primary().iter().chain([&c.probe]).collect();
        let naive_probe = naive.iter().any(|b| is_true(b, c.probe.formula()).unwrap());
        let found = find_a_normal(&c.kb, Some(&c.probe), SearchBudget::unlimited())
            .unwrap()
            .verdict;
        ensure!(
            matches!(found, ExistenceVerdict::Exists(_)) == naive_probe,
            "instance {i}: constrained search with {} sentences",
            with_probe.len()
        );
    }
    Ok(())
}

fn laws(corpus: &[Corpus]) -> Check {
    let budget = SearchBudget::unlimited();
    for (i, c) in corpus.iter().enumerate() {
        let kb = &c.kb;
        let count = exact(kb)?;
        // (a) quasi-false exactly when not quasi-true, and quasi-true matches a naive witness.
        let v = pragmatic_truth(kb, &c.probe, budget).verdict;
        ensure!(v.is_quasi_true() != v.is_quasi_false(), "instance {i}: (a) verdict {v}");
        let naive = enumerate_expansions(kb.structure())
            .unwrap()
            .any(|b| is_a_normal(kb, &b).unwrap() && is_true(&b, c.probe.formula()).unwrap());
        ensure!(
            v.is_quasi_true() == naive,
            "instance {i}: (a) quasi-true {} vs naive {naive}",
            v.is_quasi_true()
        );
        // (b) members of the primary set are quasi-true once any A-normal structure exists.
        if count > 0 {
            for p in kb.primary() {
                let v = classify_sentence(kb, p, AuditMode::Literal, budget).verdict;
                ensure!(
                    matches!(v, Verdict::QuasiTrue { .. } | Verdict::True),
                    "instance {i}: (b) {p} is {v}"
                );
            }
        }
        // (c) a larger primary set admits fewer A-normal structures.
        let mut bigger = kb.primary().to_vec();
        bigger.push(c.extra.clone());
        let big = kb.with_primary(bigger).unwrap();
        let big_count = exact(&big)?;
        ensure!(big_count <= count, "instance {i}: (c) {big_count} > {count}");
        if let ExistenceVerdict::Exists(w) = find_a_normal(&big, None, budget).unwrap().verdict {
            ensure!(
                is_a_normal(kb, &w).unwrap(),
                "instance {i}: (c) witness not A-normal for the smaller set"
            );
        }
        // (d) on a total structure satisfying the primary set, quasi-truth is truth.
        let total = enumerate_expansions(kb.structure()).unwrap().last().unwrap();
        let primary: Vec<Sentence> = kb
            .primary()
            .iter()
            .filter(|p| is_true(&total, p.formula()).unwrap())
            .cloned()
            .collect();
        let tkb = KnowledgeBase::new(total.clone().into_partial(), primary, Vec::new()).unwrap();
        let truth = is_true(&total, c.probe.formula()).unwrap();
        let quasi = pragmatic_truth(&tkb, &c.probe, budget).verdict.is_quasi_true();
        let classified = classify_sentence(&tkb, &c.probe, AuditMode::Literal, budget).verdict;
        ensure!(quasi == truth, "instance {i}: (d) quasi {quasi} vs true {truth}");
        let expected = if truth { Verdict::True } else { Verdict::False };
        ensure!(classified == expected, "instance {i}: (d) classify gave {classified}");
    }
    Ok(())
}

fn partition_enforcement() -> Check {
    let base: Value = serde_json::from_str(&std::fs::read_to_string(data("family-f.kb.json")).unwrap()).unwrap();
    type Edit = Box<dyn Fn(&mut Value)>;
    let cases: Vec<(&str, Edit, &str, [&str; 2])> = vec![
        (
            "overlap",
            Box::new(|v| v["relations"]["Father"]["known_out"] = serde_json::json!([["Joseph", "John"]])),
            "Father",
            ["Joseph", "John"],
        ),
        (
            "overlap with unknown",
            Box::new(|v| {
                v["relations"]["Married"]["unknown"] = serde_json::json!([["Mary", "Joseph"]]);
            }),
            "Married",
            ["Mary", "Joseph"],
        ),
        (
            "uncovered",
            Box::new(|v| {
                v["relations"]["Married"].as_object_mut().unwrap().remove("default");
            }),
            "Married",
            ["Joseph", "Joseph"],
        ),
    ];
    let dir = tempfile::tempdir().unwrap();
    for (what, edit, pred, tuple) in cases {
        let mut v = base.clone();
        edit(&mut v);
        let text = v.to_string();
        let err = parse_kb(&text).err().ok_or(format!("{what}: accepted"))?;
        let named = err.offending_cell().ok_or(format!("{what}: no cell named in {err}"))?;
        ensure!(named.0 == pred && named.1 == tuple, "{what}: named {named:?}");
        let path = dir.path().join("bad.kb.json");
        std::fs::write(&path, &text).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_quasitruth"))
            .args(["expand", path.to_str().unwrap()])
            .output()
            .unwrap();
        let stderr = String::from_utf8_lossy(&out.stderr);
        ensure!(out.status.code() == Some(2), "{what}: exit {:?}", out.status.code());
        let shown = format!("<{}>", tuple.join(", "));
        ensure!(
            stderr.contains(pred) && stderr.contains(&shown),
            "{what}: stderr {stderr}"
        );
    }
    Ok(())
}

fn determinism() -> Check {
    for (file, s) in [
        ("g.kb.json", "Father(joseph, peter)"),
        ("g-prime.kb.json", "Father(joseph, peter)"),
        ("all-p-12.kb.json", "forall x. P(x)"),
    ] {
        let path = data(file);
        let runs: Vec<(i32, String)> = (0..5)
            .map(|_| cli(&["classify", path.to_str().unwrap(), s, "--json"]))
            .collect();
        ensure!(runs.windows(2).all(|w| w[0] == w[1]), "{file}: outputs differ");
    }
    Ok(())
}

fn budget_semantics() -> Check {
    let path = data("all-p-12.kb.json");
    let p = path.to_str().unwrap();
    let kb = load("all-p-12.kb.json");
    ensure!(kb.structure().undetermined_cells().len() == 12, "k != 12");
    let last = enumerate_expansions(kb.structure()).unwrap().last().unwrap();
    let normals: Vec<_> = enumerate_expansions(kb.structure())
        .unwrap()
        .filter(|b| is_a_normal(&kb, b).unwrap())
        .collect();
    ensure!(
        normals == vec![last],
        "the unique A-normal structure is not last in canonical order"
    );

    let (code, v) = cli_json(&["classify", p, "forall x. P(x)", "--budget", "1"])?;
    ensure!(code == 4 && v["verdict"] == "FORMAL-NONSENSE", "budget 1: {v}");
    ensure!(
        v["evidence"]["kind"] == "undeterminable",
        "budget 1 evidence {}",
        v["evidence"]
    );
    let (code, v) = cli_json(&["classify", p, "forall x. P(x)", "--budget", "100000"])?;
    ensure!(code == 0 && v["verdict"] == "QUASI-TRUE", "large budget: {v}");
    let (code, v) = cli_json(&["classify", p, "exists x. ~P(x)", "--budget", "100000"])?;
    ensure!(
        code == 1 && v["verdict"] == "QUASI-FALSE",
        "large budget, negation: {v}"
    );
    Ok(())
}

fn main() {
    let corpus = corpus();
    let ks: Vec<usize> = corpus
        .iter()
        .map(|c| c.kb.structure().undetermined_cells().len())
        .collect();
    let satisfiable = corpus.iter().filter(|c| exact(&c.kb).is_ok_and(|n| n > 0)).count();
    println!(
        "corpus: {} instances, k from {} to {}, {} with at least one A-normal structure",
        corpus.len(),
        ks.iter().min().unwrap(),
        ks.iter().max().unwrap(),
        satisfiable
    );
    let results: Vec<(&str, Check)> = vec![
        ("1 family-F expansions", family_f()),
        ("2 scenario G quasi-true with witness", scenario_g()),
        (
            "3 scenario G' both quasi-true / nonsense with full pool",
            scenario_g_prime(),
        ),
        ("4 scenario G'' quasi-false and strict audit", scenario_g_double_prime()),
        ("5 formal nonsense position", formal_nonsense()),
        ("6 pruned search equals naive enumeration", oracle_equivalence(&corpus)),
        ("7 definitional laws (a)-(d)", laws(&corpus)),
        ("8 partition enforcement", partition_enforcement()),
        ("9 byte-stable JSON", determinism()),
        ("10 budget semantics", budget_semantics()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
