//! Seeded (student, proposal, model) triples derived from known programs.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepwise_core::syntax::{parse, print_module, SourceModule};

use crate::edits::{apply_script, ALL_EDITS, REMOVALS};

#[derive(Debug, Clone)]
pub struct Triple {
    pub student: String,
    pub llm: String,
    pub model: String,
}

/// Model solutions of the shipped course plus the golden-case models.
pub fn base_programs() -> Vec<SourceModule> {
    let mut out: Vec<SourceModule> = Vec::new();
    let sources = crate::load_course()
        .into_iter()
        .map(|t| t.model_solution)
        .chain(crate::golden::cases().into_iter().map(|c| c.model.to_string()));
    for src in sources {
        let m = parse(&src).expect("base program parses");
        if !out.iter().any(|o| o.structurally_eq(&m)) {
            out.push(m);
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` triples: the student program is the model with some code removed,
/// the proposal is the model with arbitrary edits on top.
pub fn generate_triples(n: usize, seed: u64) -> Vec<Triple> {
    let bases = base_programs();
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let model = bases.choose(&mut rng).expect("bases").clone();
        let mut student = model.clone();
        let removals = rng.random_range(1..=3);
        apply_script(&mut student, REMOVALS, removals, &mut rng);
        if student.structurally_eq(&model) {
            continue;
        }
        let mut llm = model.clone();
        let noise = rng.random_range(0..=4);
        apply_script(&mut llm, ALL_EDITS, noise, &mut rng);
        out.push(Triple { student: print_module(&student), llm: print_module(&llm), model: print_module(&model) });
    }
    out
}

/// `n` pairs of programs where the second is the first after a random edit
/// script.
pub fn generate_edit_pairs(n: usize, seed: u64) -> Vec<(SourceModule, SourceModule)> {
    let bases = base_programs();
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let mut before = bases.choose(&mut rng).expect("bases").clone();
            let warmup = rng.random_range(0..=2);
            apply_script(&mut before, ALL_EDITS, warmup, &mut rng);
            let mut after = before.clone();
            let len = rng.random_range(1..=5);
            apply_script(&mut after, ALL_EDITS, len, &mut rng);
            (before, after)
        })
        .collect()
}
