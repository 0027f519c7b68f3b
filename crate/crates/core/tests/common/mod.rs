#![allow(dead_code)]

use laminar_secretary::instances::{generate, GeneratorKind, GeneratorSpec, WeightDistribution};
use laminar_secretary::{ElementId, LaminarMatroid};

/// Random laminar instance with `n` elements; the seed also varies depth
/// and weight distribution.
pub fn random_instance(n: usize, seed: u64) -> LaminarMatroid {
    let weights = match seed % 3 {
        0 => WeightDistribution::Uniform,
        1 => WeightDistribution::Exponential,
        _ => WeightDistribution::Pareto(1.5),
    };
    let spec = GeneratorSpec {
        kind: GeneratorKind::RandomLaminar,
        n,
        capacities: Vec::new(),
        depth: 1 + (seed % 4) as u32,
        seed,
        weights,
    };
    generate(&spec).expect("random laminar instances are feasible")
}

/// Ids selected by `mask` over `ids`.
pub fn subset(ids: &[ElementId], mask: u32) -> Vec<ElementId> {
    (0..ids.len()).filter(|b| mask >> b & 1 == 1).map(|b| ids[b]).collect()
}

/// Bitmasks of every independent subset of the ground set.
pub fn independent_masks(m: &LaminarMatroid) -> Vec<u32> {
    let ids = m.element_ids();
    (0u32..1 << ids.len())
        .filter(|&mask| m.is_independent(&subset(&ids, mask)).unwrap())
        .collect()
}
