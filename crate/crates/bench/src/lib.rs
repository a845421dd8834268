//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use quasitruth_core::{
    CellState, Domain, Formula, KnowledgeBase, PartialRelation, PartialStructure, Sentence, Signature, Term,
};

/// Unary `P` over `n` undetermined elements, with "everything is P" as the
/// only primary sentence. The unique A-normal structure is the last
/// expansion, so an unpruned search visits all 2^n leaves.
pub fn all_p(n: usize) -> KnowledgeBase {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let d = Domain::new(names).unwrap();
    let sig = Signature::new([("P", 1)], Vec::<String>::new(), false).unwrap();
    let p = PartialRelation::uniform(&d, 1, CellState::Undetermined).unwrap();
    let s = PartialStructure::new(Arc::new(sig), Arc::new(d), [("P", p)], Vec::<(String, String)>::new()).unwrap();
    let everything = Formula::forall("x", Formula::atom("P", vec![Term::var("x")]));
    KnowledgeBase::new(s, vec![Sentence::new(everything).unwrap()], Vec::new()).unwrap()
}

/// Binary `R` over `n` elements with every pair undetermined and one ground
/// primary sentence per element, so pruning applies early.
pub fn ground_chain(n: usize) -> KnowledgeBase {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let consts: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let d = Domain::new(names.clone()).unwrap();
    let sig = Signature::new([("R", 2)], consts.clone(), false).unwrap();
    let r = PartialRelation::uniform(&d, 2, CellState::Undetermined).unwrap();
    let s = PartialStructure::new(
        Arc::new(sig),
        Arc::new(d),
        [("R", r)],
        consts.iter().cloned().zip(names),
    )
    .unwrap();
    let primary = (0..n)
        .map(|i| {
            let next = (i + 1) % n;
            let f = Formula::atom("R", vec![Term::constant(&consts[i]), Term::constant(&consts[next])]);
            Sentence::new(f).unwrap()
        })
        .collect();
    KnowledgeBase::new(s, primary, Vec::new()).unwrap()
}
