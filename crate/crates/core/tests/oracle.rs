//! Library results checked against a naive evaluator and enumerator that
//! live entirely in this file.

use std::collections::HashMap;
use std::sync::Arc;

use quasitruth_core::{
    count_a_normal, enumerate_expansions, find_a_normal, is_a_normal, is_true, pragmatic_truth, CellState,
    CountVerdict, Domain, ExistenceVerdict, Fill, Formula, KnowledgeBase, PartialRelation, PartialStructure,
    SearchBudget, Sentence, Signature, Term, TotalStructure, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const VARS: [&str; 3] = ["x", "y", "z"];

struct Instance {
    elements: Vec<String>,
    preds: Vec<(String, usize)>,
    consts: Vec<(String, usize)>,
    equality: bool,
    known: HashMap<(usize, Vec<usize>), bool>,
    unknown: Vec<(usize, Vec<usize>)>,
}

fn tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    out
}

fn random_instance(rng: &mut ChaCha8Rng, max_unknown: usize) -> Instance {
    let n = rng.random_range(1..=3);
    let elements: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
    let mut preds = Vec::new();
    for (name, arity) in [("q", 0), ("P", 1), ("R", 2)] {
        if rng.random_bool(0.7) {
            preds.push((name.to_string(), arity));
        }
    }
    if preds.is_empty() {
        preds.push(("P".to_string(), 1));
    }
    let consts = (0..rng.random_range(1..=2))
        .map(|i| (["a", "b"][i].to_string(), rng.random_range(0..n)))
        .collect();
    let mut known = HashMap::new();
    let mut unknown = Vec::new();
    for (p, (_, arity)) in preds.iter().enumerate() {
        for t in tuples(n, *arity) {
            if unknown.len() < max_unknown && rng.random_bool(0.5) {
                unknown.push((p, t));
            } else {
                known.insert((p, t), rng.random_bool(0.5));
            }
        }
    }
    Instance {
        elements,
        preds,
        consts,
        equality: rng.random_bool(0.5),
        known,
        unknown,
    }
}

fn random_sentence(rng: &mut ChaCha8Rng, inst: &Instance, depth: usize) -> Sentence {
    Sentence::new(random_formula(rng, inst, depth, &mut Vec::new())).expect("closed by construction")
}

fn random_formula(rng: &mut ChaCha8Rng, inst: &Instance, depth: usize, bound: &mut Vec<&'static str>) -> Formula {
    let term = |rng: &mut ChaCha8Rng, bound: &[&'static str]| {
        let pick = rng.random_range(0..bound.len() + inst.consts.len());
        if pick < bound.len() {
            Term::var(bound[pick])
        } else {
            Term::constant(inst.consts[pick - bound.len()].0.clone())
        }
    };
    if depth == 0 || rng.random_bool(0.3) {
        if inst.equality && rng.random_bool(0.2) {
            return Formula::equals(term(rng, bound), term(rng, bound));
        }
        let (name, arity) = &inst.preds[rng.random_range(0..inst.preds.len())];
        let args = (0..*arity).map(|_| term(rng, bound)).collect();
        return Formula::atom(name.clone(), args);
    }
    let d = depth - 1;
    match rng.random_range(0..7) {
        0 => Formula::not(random_formula(rng, inst, d, bound)),
        1 => Formula::and(random_formula(rng, inst, d, bound), random_formula(rng, inst, d, bound)),
        2 => Formula::or(random_formula(rng, inst, d, bound), random_formula(rng, inst, d, bound)),
        3 => Formula::implies(random_formula(rng, inst, d, bound), random_formula(rng, inst, d, bound)),
        4 => Formula::iff(random_formula(rng, inst, d, bound), random_formula(rng, inst, d, bound)),
        q => {
            let v = VARS[rng.random_range(0..VARS.len())];
            bound.push(v);
            let body = random_formula(rng, inst, d, bound);
            bound.pop();
            if q == 5 {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            }
        }
    }
}

fn build(inst: &Instance, primary: Vec<Sentence>) -> KnowledgeBase {
    let sig = Signature::new(
        inst.preds.iter().cloned(),
        inst.consts.iter().map(|(c, _)| c.clone()),
        inst.equality,
    )
    .unwrap();
    let domain = Domain::new(inst.elements.clone()).unwrap();
    let names = |t: &[usize]| t.iter().map(|&e| inst.elements[e].clone()).collect::<Vec<_>>();
    let relations = inst
        .preds
        .iter()
        .enumerate()
        .map(|(p, (name, arity))| {
            let (mut yes, mut no, mut open) = (Vec::new(), Vec::new(), Vec::new());
            for t in tuples(inst.elements.len(), *arity) {
                match inst.known.get(&(p, t.clone())) {
                    Some(true) => yes.push(names(&t)),
                    Some(false) => no.push(names(&t)),
                    None => open.push(names(&t)),
                }
            }
            let rel = PartialRelation::new(&domain, *arity, &yes, &no, &open, Fill::Explicit).unwrap();
            (name.clone(), rel)
        })
        .collect::<Vec<_>>();
    let constants = inst
        .consts
        .iter()
        .map(|(c, e)| (c.clone(), inst.elements[*e].clone()))
        .collect::<Vec<_>>();
    let s = PartialStructure::new(Arc::new(sig), Arc::new(domain), relations, constants).unwrap();
    KnowledgeBase::new(s, primary, Vec::new()).unwrap()
}

/// A total interpretation as seen by the oracle.
type Model<'a> = dyn Fn(usize, &[usize]) -> bool + 'a;

fn holds(inst: &Instance, model: &Model, f: &Formula, env: &mut Vec<(String, usize)>) -> bool {
    let value = |t: &Term, env: &Vec<(String, usize)>| match t {
        Term::Variable(v) => env.iter().rev().find(|(n, _)| n == v).expect("bound").1,
        Term::Constant(c) => inst.consts.iter().find(|(n, _)| n == c).unwrap().1,
    };
    match f {
        Formula::Atom(p, args) => {
            let idx = inst.preds.iter().position(|(n, _)| n == p).unwrap();
            let t: Vec<usize> = args.iter().map(|a| value(a, env)).collect();
            model(idx, &t)
        }
        Formula::Equals(a, b) => value(a, env) == value(b, env),
        Formula::Not(a) => !holds(inst, model, a, env),
        Formula::And(a, b) => holds(inst, model, a, env) && holds(inst, model, b, env),
        Formula::Or(a, b) => holds(inst, model, a, env) || holds(inst, model, b, env),
        Formula::Implies(a, b) => !holds(inst, model, a, env) || holds(inst, model, b, env),
        Formula::Iff(a, b) => holds(inst, model, a, env) == holds(inst, model, b, env),
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let universal = matches!(f, Formula::ForAll(..));
            let mut results = (0..inst.elements.len()).map(|e| {
                env.push((v.clone(), e));
                let r = holds(inst, model, body, env);
                env.pop();
                r
            });
            if universal {
                results.all(|r| r)
            } else {
                results.any(|r| r)
            }
        }
    }
}

/// Every total expansion as a map from unknown cells to values.
fn oracle_expansions(inst: &Instance) -> Vec<HashMap<(usize, Vec<usize>), bool>> {
    (0..1u32 << inst.unknown.len())
        .map(|bits| {
            inst.unknown
                .iter()
                .enumerate()
                .map(|(i, c)| (c.clone(), bits >> i & 1 == 1))
                .collect()
        })
        .collect()
}

fn oracle_true(inst: &Instance, extra: &HashMap<(usize, Vec<usize>), bool>, f: &Formula) -> bool {
    let model = |p: usize, t: &[usize]| {
        let key = (p, t.to_vec());
        inst.known.get(&key).or_else(|| extra.get(&key)).copied().unwrap()
    };
    holds(inst, &model, f, &mut Vec::new())
}

fn from_library(inst: &Instance, b: &TotalStructure, f: &Formula) -> bool {
    let model = |p: usize, t: &[usize]| {
        let names: Vec<&str> = t.iter().map(|&e| inst.elements[e].as_str()).collect();
        b.holds(&inst.preds[p].0, &names).unwrap()
    };
    holds(inst, &model, f, &mut Vec::new())
}

fn a_normal_oracle(inst: &Instance, sentences: &[&Sentence]) -> usize {
    oracle_expansions(inst)
        .iter()
        .filter(|x| sentences.iter().all(|s| oracle_true(inst, x, s.formula())))
        .count()
}

fn unlimited() -> SearchBudget {
    SearchBudget::unlimited()
}

#[test]
fn tarski_evaluation_matches_naive_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let inst = random_instance(&mut rng, 4);
        let kb = build(&inst, Vec::new());
        let sentences: Vec<Sentence> = (0..6).map(|_| random_sentence(&mut rng, &inst, 4)).collect();
        for b in enumerate_expansions(kb.structure()).unwrap() {
            for s in &sentences {
                let lib = is_true(&b, s.formula()).unwrap();
                assert_eq!(lib, from_library(&inst, &b, s.formula()), "{s}");
                assert_eq!(is_true(&b, s.negated().formula()).unwrap(), !lib, "bivalence for {s}");
            }
        }
    }
}

#[test]
fn expansions_are_exactly_the_completions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 6);
        let kb = build(&inst, Vec::new());
        let all: Vec<TotalStructure> = enumerate_expansions(kb.structure()).unwrap().collect();
        assert_eq!(all.len(), 1 << inst.unknown.len());
        let mut seen = std::collections::HashSet::new();
        for b in &all {
            assert!(kb.structure().is_expanded_by(b));
            for ((p, t), v) in &inst.known {
                let names: Vec<&str> = t.iter().map(|&e| inst.elements[e].as_str()).collect();
                assert_eq!(b.holds(&inst.preds[*p].0, &names), Some(*v));
            }
            let key: Vec<bool> = inst
                .unknown
                .iter()
                .map(|(p, t)| {
                    let names: Vec<&str> = t.iter().map(|&e| inst.elements[e].as_str()).collect();
                    b.holds(&inst.preds[*p].0, &names).unwrap()
                })
                .collect();
            assert!(seen.insert(key), "duplicate expansion");
        }
    }
}

#[test]
fn search_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 10);
        let primary: Vec<Sentence> = (0..rng.random_range(0..=3))
            .map(|_| random_sentence(&mut rng, &inst, 4))
            .collect();
        let kb = build(&inst, primary.clone());
        let refs: Vec<&Sentence> = primary.iter().collect();
        let expected = a_normal_oracle(&inst, &refs);

        let counted = count_a_normal(&kb, unlimited()).verdict;
        assert_eq!(counted, CountVerdict::Exact(expected.into()));

        let first = enumerate_expansions(kb.structure())
            .unwrap()
            .find(|b| is_a_normal(&kb, b).unwrap());
        match find_a_normal(&kb, None, unlimited()).unwrap().verdict {
            ExistenceVerdict::Exists(w) => {
                assert_eq!(Some(&w), first.as_ref(), "witness is first in canonical order");
                assert!(primary.iter().all(|s| from_library(&inst, &w, s.formula())));
            }
            ExistenceVerdict::NotExists => assert_eq!(expected, 0),
            ExistenceVerdict::Undetermined { .. } => panic!("unlimited budget"),
        }

        let s = random_sentence(&mut rng, &inst, 3);
        let mut with_s = refs.clone();
        with_s.push(&s);
        let quasi = a_normal_oracle(&inst, &with_s) > 0;
        match pragmatic_truth(&kb, &s, unlimited()).verdict {
            Verdict::QuasiTrue { witness } => {
                assert!(quasi, "{s}");
                assert!(is_a_normal(&kb, &witness).unwrap());
                assert!(from_library(&inst, &witness, s.formula()));
            }
            Verdict::QuasiFalse { no_a_normal } => {
                assert!(!quasi, "{s}");
                assert_eq!(no_a_normal, expected == 0);
            }
            other => panic!("unexpected {other}"),
        }
    }
}

#[test]
fn more_primary_sentences_never_admit_more_structures() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..120 {
        let inst = random_instance(&mut rng, 8);
        let small: Vec<Sentence> = (0..rng.random_range(0..=2))
            .map(|_| random_sentence(&mut rng, &inst, 3))
            .collect();
        let mut large = small.clone();
        large.push(random_sentence(&mut rng, &inst, 3));
        let kb_small = build(&inst, small);
        let kb_large = build(&inst, large);
        let count = |kb: &KnowledgeBase| match count_a_normal(kb, unlimited()).verdict {
            CountVerdict::Exact(n) => n,
            CountVerdict::Undetermined { .. } => unreachable!(),
        };
        assert!(count(&kb_large) <= count(&kb_small));
        for b in enumerate_expansions(kb_large.structure()).unwrap() {
            if is_a_normal(&kb_large, &b).unwrap() {
                assert!(is_a_normal(&kb_small, &b).unwrap());
            }
        }
    }
}

#[test]
fn budget_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let inst = random_instance(&mut rng, 8);
        let primary = vec![random_sentence(&mut rng, &inst, 3)];
        let kb = build(&inst, primary);
        let full = count_a_normal(&kb, unlimited());
        let just = count_a_normal(&kb, SearchBudget::new(full.visited).unwrap());
        assert_eq!(just.verdict, full.verdict);
        assert_eq!(just.visited, full.visited);
        if full.visited > 1 {
            let short = count_a_normal(&kb, SearchBudget::new(full.visited - 1).unwrap());
            assert!(matches!(short.verdict, CountVerdict::Undetermined { .. }));
        }
    }
}

#[test]
fn undetermined_cells_follow_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 5);
        let kb = build(&inst, Vec::new());
        let total: usize = inst
            .preds
            .iter()
            .map(|(name, _)| kb.structure().relation(name).unwrap().count(CellState::Undetermined))
            .sum();
        assert_eq!(total, inst.unknown.len());
    }
}
