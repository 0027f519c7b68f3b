use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::SimError;
use crate::matroid::{ElementId, LaminarMatroid};

use super::greedy::{full_opt_mask, run_indices};
use super::{sample_schedule, AlgorithmSpec};

/// Trials per reduction block. Blocks are summed in index order, so the
/// floating-point result does not depend on how blocks were scheduled.
const BLOCK: u64 = 512;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompetitiveEstimate {
    pub algorithm: AlgorithmSpec,
    pub trials: u64,
    pub base_seed: u64,
    pub opt_weight: f64,
    pub selection_counts: BTreeMap<ElementId, u64>,
    pub per_element_frequency: BTreeMap<ElementId, f64>,
    pub std_error_per_element: BTreeMap<ElementId, f64>,
    pub min_frequency: f64,
    /// Mean selected weight over the optimum's weight.
    pub utility_ratio: f64,
    pub utility_std_error: f64,
}

#[derive(Clone, Debug, Default)]
struct Block {
    counts: Vec<u64>,
    weight_sum: f64,
    weight_sq_sum: f64,
}

/// Run `trials` independent simulations, trial `i` using the schedule
/// sampled from seed `base_seed + i`, and aggregate the results.
///
/// The estimate is identical for every `workers` value.
pub fn monte_carlo(
    matroid: &LaminarMatroid,
    spec: &AlgorithmSpec,
    trials: u64,
    base_seed: u64,
    workers: usize,
) -> Result<CompetitiveEstimate, SimError> {
    if trials == 0 {
        return Err(SimError::InvalidParameter("trials must be >= 1".into()));
    }
    if workers == 0 {
        return Err(SimError::InvalidParameter("workers must be >= 1".into()));
    }
    if matroid.is_empty() {
        return Err(SimError::InvalidParameter("matroid has no elements".into()));
    }
    let opt_mask = full_opt_mask(matroid);
    let opt_idx: Vec<usize> = (0..matroid.len()).filter(|&i| opt_mask[i]).collect();
    let slot: Vec<Option<usize>> = {
        let mut s = vec![None; matroid.len()];
        for (k, &i) in opt_idx.iter().enumerate() {
            s[i] = Some(k);
        }
        s
    };
    let opt_weight: f64 = opt_idx.iter().map(|&i| matroid.weight_at(i)).sum();

    let run_block = |b: u64| -> Block {
        let mut block = Block { counts: vec![0; opt_idx.len()], ..Block::default() };
        let end = ((b + 1) * BLOCK).min(trials);
        for i in b * BLOCK..end {
            let schedule = sample_schedule(matroid, base_seed.wrapping_add(i));
            let selected = run_indices(matroid, &schedule, spec, &opt_mask, None);
            let mut w = 0.0;
            for &e in &selected {
                w += matroid.weight_at(e);
                if let Some(k) = slot[e] {
                    block.counts[k] += 1;
                }
            }
            block.weight_sum += w;
            block.weight_sq_sum += w * w;
        }
        block
    };

    let n_blocks = trials.div_ceil(BLOCK);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    let blocks: Vec<Block> = pool.install(|| (0..n_blocks).into_par_iter().map(run_block).collect());

    let mut counts = vec![0u64; opt_idx.len()];
    let (mut wsum, mut wsq) = (0.0, 0.0);
    for b in &blocks {
        for (c, x) in counts.iter_mut().zip(&b.counts) {
            *c += x;
        }
        wsum += b.weight_sum;
        wsq += b.weight_sq_sum;
    }

    let n = trials as f64;
    let mut selection_counts = BTreeMap::new();
    let mut per_element_frequency = BTreeMap::new();
    let mut std_error_per_element = BTreeMap::new();
    for (k, &i) in opt_idx.iter().enumerate() {
        let id = matroid.elements()[i].id;
        let p = counts[k] as f64 / n;
        selection_counts.insert(id, counts[k]);
        per_element_frequency.insert(id, p);
        std_error_per_element.insert(id, (p * (1.0 - p) / n).sqrt());
    }
    let min_frequency = per_element_frequency.values().copied().fold(f64::INFINITY, f64::min);
    let mean = wsum / n;
    let var = (wsq / n - mean * mean).max(0.0);
    Ok(CompetitiveEstimate {
        algorithm: *spec,
        trials,
        base_seed,
        opt_weight,
        selection_counts,
        per_element_frequency,
        std_error_per_element,
        min_frequency,
        utility_ratio: mean / opt_weight,
        utility_std_error: (var / n).sqrt() / opt_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::Element;

    fn uniform(n: u32, r: u32) -> LaminarMatroid {
        let elems = (0..n).map(|i| Element { id: ElementId(i), weight: 1.0 + i as f64 }).collect();
        LaminarMatroid::uniform(elems, r).unwrap()
    }

    #[test]
    fn single_trial_frequencies_are_binary() {
        let m = uniform(10, 3);
        let est = monte_carlo(&m, &AlgorithmSpec::paper(0.5).unwrap(), 1, 9, 1).unwrap();
        assert!(est.per_element_frequency.values().all(|&p| p == 0.0 || p == 1.0));
        assert_eq!(est.per_element_frequency.len(), 3);
    }

    #[test]
    fn workers_do_not_change_the_estimate() {
        let m = uniform(12, 3);
        let spec = AlgorithmSpec::paper(0.6).unwrap();
        let a = monte_carlo(&m, &spec, 3000, 5, 1).unwrap();
        let b = monte_carlo(&m, &spec, 3000, 5, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn utility_ratio_at_most_one() {
        let m = uniform(8, 2);
        let est = monte_carlo(&m, &AlgorithmSpec::mtw(0.3).unwrap(), 2000, 0, 2).unwrap();
        assert!(est.utility_ratio <= 1.0 && est.utility_ratio > 0.0);
        let min = est.per_element_frequency.values().copied().fold(1.0, f64::min);
        assert_eq!(est.min_frequency, min);
    }

    #[test]
    fn bad_parameters() {
        let m = uniform(3, 1);
        let spec = AlgorithmSpec::paper(0.5).unwrap();
        assert!(monte_carlo(&m, &spec, 0, 0, 1).is_err());
        assert!(monte_carlo(&m, &spec, 10, 0, 0).is_err());
    }
}
