//! Instance generators and the `.laminst.json` document format.

mod format;

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

pub use format::{parse_instance, read_instance, to_document_string, write_instance, FILE_EXTENSION};

use crate::error::InstanceError;
use crate::matroid::{Element, ElementId, LaminarMatroid, SetId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Uniform,
    Partition,
    Chain,
    RandomLaminar,
}

impl FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "partition" => Ok(Self::Partition),
            "chain" => Ok(Self::Chain),
            "random_laminar" | "random-laminar" => Ok(Self::RandomLaminar),
            _ => Err(format!("unknown generator `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightDistribution {
    /// Uniform on (0, 1).
    Uniform,
    /// Exponential with rate 1.
    Exponential,
    /// Pareto with scale 1 and the given shape.
    Pareto(f64),
}

impl FromStr for WeightDistribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "exponential" | "exp" => Ok(Self::Exponential),
            _ => {
                let shape = s
                    .strip_prefix("pareto:")
                    .or_else(|| s.strip_prefix("pareto="))
                    .ok_or_else(|| format!("unknown weight distribution `{s}`"))?;
                match shape.parse::<f64>() {
                    Ok(a) if a > 0.0 && a.is_finite() => Ok(Self::Pareto(a)),
                    _ => Err(format!("pareto shape must be a positive number, got `{shape}`")),
                }
            }
        }
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Exponential => f.write_str("exponential"),
            Self::Pareto(a) => write!(f, "pareto:{a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    /// Rank for `uniform`; per-block capacities for `partition`; capacities
    /// from innermost to outermost for `chain`. Ignored by `random_laminar`.
    pub capacities: Vec<u32>,
    /// Maximum nesting depth for `random_laminar`.
    pub depth: u32,
    pub seed: u64,
    pub weights: WeightDistribution,
}

impl GeneratorSpec {
    pub fn uniform(n: usize, rank: u32, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::Uniform,
            n,
            capacities: vec![rank],
            depth: 1,
            seed,
            weights: WeightDistribution::Uniform,
        }
    }

    pub fn random_laminar(n: usize, depth: u32, seed: u64) -> Self {
        Self {
            kind: GeneratorKind::RandomLaminar,
            n,
            capacities: Vec::new(),
            depth,
            seed,
            weights: WeightDistribution::Uniform,
        }
    }
}

/// `n` pairwise distinct positive weights drawn from `dist`.
pub fn sample_weights(n: usize, dist: WeightDistribution, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let w = match dist {
            WeightDistribution::Uniform => rng.sample(Open01),
            WeightDistribution::Exponential => Exp1.sample(rng),
            WeightDistribution::Pareto(a) => {
                let u: f64 = rng.sample(Open01);
                u.powf(-1.0 / a)
            }
        };
        if w > 0.0 && w.is_finite() {
            break w;
        }
    };
    let mut weights: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
    loop {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]));
        let clashes: Vec<usize> =
            order.windows(2).filter(|w| weights[w[0]] == weights[w[1]]).map(|w| w[1]).collect();
        if clashes.is_empty() {
            return weights;
        }
        for i in clashes {
            weights[i] = draw(&mut rng);
        }
    }
}

/// Build the instance described by `spec`. Pure in `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<LaminarMatroid, InstanceError> {
    if spec.n == 0 {
        return Err(InstanceError::Infeasible("n must be >= 1".into()));
    }
    if spec.n > u32::MAX as usize {
        return Err(InstanceError::Infeasible("n too large".into()));
    }
    if spec.capacities.contains(&0) {
        return Err(InstanceError::Infeasible("capacities must be >= 1".into()));
    }
    let n = spec.n;
    let elements: Vec<Element> = sample_weights(n, spec.weights, spec.seed)
        .into_iter()
        .enumerate()
        .map(|(i, weight)| Element { id: ElementId(i as u32), weight })
        .collect();
    let ids: Vec<ElementId> = elements.iter().map(|e| e.id).collect();

    let sets: Vec<(SetId, u32, Vec<ElementId>)> = match spec.kind {
        GeneratorKind::Uniform => {
            let [r] = spec.capacities[..] else {
                return Err(InstanceError::Infeasible("uniform needs exactly one capacity (the rank)".into()));
            };
            vec![(SetId(0), r, ids)]
        }
        GeneratorKind::Partition => {
            let m = spec.capacities.len();
            if m == 0 || m > n {
                return Err(InstanceError::Infeasible(format!(
                    "partition needs between 1 and n = {n} capacities, got {m}"
                )));
            }
            let mut start = 0;
            (0..m)
                .map(|k| {
                    let size = n / m + usize::from(k < n % m);
                    let block = ids[start..start + size].to_vec();
                    start += size;
                    (SetId(k as u32), spec.capacities[k], block)
                })
                .collect()
        }
        GeneratorKind::Chain => {
            let caps = &spec.capacities;
            let k = caps.len();
            if k == 0 {
                return Err(InstanceError::Infeasible("chain needs at least one capacity".into()));
            }
            if caps.windows(2).any(|w| w[0] >= w[1]) {
                return Err(InstanceError::Infeasible("chain capacities must be strictly increasing".into()));
            }
            // Set j holds the first size_j elements; sizes strictly increase
            // and every set is large enough to be binding.
            let mut sizes = Vec::with_capacity(k);
            let mut prev = 0usize;
            for (j, &c) in caps.iter().enumerate() {
                let even = (n * (j + 1)).div_ceil(k);
                let size = even.max(c as usize + 1).max(prev + 1);
                sizes.push(size);
                prev = size;
            }
            if prev > n {
                return Err(InstanceError::Infeasible(format!(
                    "capacities {caps:?} need more than n = {n} elements to nest strictly"
                )));
            }
            sizes
                .iter()
                .zip(caps)
                .enumerate()
                .map(|(j, (&size, &c))| (SetId(j as u32), c, ids[..size].to_vec()))
                .collect()
        }
        GeneratorKind::RandomLaminar => {
            if spec.depth == 0 {
                return Err(InstanceError::Infeasible("depth must be >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.rotate_left(17) ^ 0xa076_1d64_78bd_642f);
            let mut shuffled = ids;
            shuffled.shuffle(&mut rng);
            let mut out = Vec::new();
            for group in split(&shuffled, &mut rng) {
                grow(group, 1, spec.depth, &mut rng, &mut out);
            }
            out
        }
    };

    let m = LaminarMatroid::from_sets(elements, sets)?;
    Ok(match spec.kind {
        GeneratorKind::RandomLaminar => m.normalize(),
        _ => m,
    })
}

/// Cut `items` into one to three contiguous, non-empty groups.
fn split<'a>(items: &'a [ElementId], rng: &mut ChaCha8Rng) -> Vec<&'a [ElementId]> {
    let parts = rng.random_range(1..=3usize).min(items.len());
    let mut cuts: Vec<usize> = (1..items.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(items.len())) {
        out.push(&items[start..c]);
        start = c;
    }
    out
}

fn grow(
    members: &[ElementId],
    level: u32,
    depth: u32,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<(SetId, u32, Vec<ElementId>)>,
) {
    if members.len() < 2 {
        return;
    }
    let capacity = rng.random_range(1..members.len() as u32);
    out.push((SetId(out.len() as u32), capacity, members.to_vec()));
    if level >= depth {
        return;
    }
    for group in split(members, rng) {
        if group.len() < members.len() {
            grow(group, level + 1, depth, rng, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::validate;

    #[test]
    fn uniform_instance() {
        let m = generate(&GeneratorSpec::uniform(5, 2, 1)).unwrap();
        assert_eq!(m.nodes().len(), 1);
        assert_eq!(m.nodes()[0].members.len(), 5);
        assert_eq!(m.nodes()[0].capacity, 2);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn chain_survives_normalize() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::Chain,
            n: 12,
            capacities: vec![1, 2, 3],
            depth: 1,
            seed: 4,
            weights: WeightDistribution::Exponential,
        };
        let m = generate(&spec).unwrap();
        assert_eq!(m.nodes().len(), 3);
        assert_eq!(m.normalize(), m);
    }

    #[test]
    fn partition_blocks_are_disjoint() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::Partition,
            n: 10,
            capacities: vec![1, 2, 1],
            depth: 1,
            seed: 3,
            weights: WeightDistribution::Pareto(2.0),
        };
        let m = generate(&spec).unwrap();
        assert_eq!(m.roots().len(), 3);
        let sizes: Vec<usize> = m.nodes().iter().map(|n| n.members.len()).collect();
        assert_eq!(sizes, vec![4, 3, 3]);
        assert_eq!(m.rank(), 4);
    }

    #[test]
    fn infeasible_specs() {
        let mut spec = GeneratorSpec::uniform(3, 1, 0);
        spec.kind = GeneratorKind::Partition;
        spec.capacities = vec![1, 1, 1, 1];
        assert!(generate(&spec).is_err());
        spec.kind = GeneratorKind::Chain;
        spec.capacities = vec![2, 1];
        assert!(generate(&spec).is_err());
        spec.capacities = vec![1, 2, 3];
        assert!(generate(&spec).is_err());
        assert!(generate(&GeneratorSpec::uniform(0, 1, 0)).is_err());
        assert!(generate(&GeneratorSpec::random_laminar(5, 0, 0)).is_err());
    }

    #[test]
    fn random_laminar_is_valid_and_normalized() {
        for seed in 0..200 {
            let m = generate(&GeneratorSpec::random_laminar(1 + (seed as usize % 15), 3, seed)).unwrap();
            assert!(validate(&m.to_spec()).is_empty());
            assert_eq!(m.normalize(), m, "seed {seed}");
        }
    }

    #[test]
    fn generation_is_pure() {
        let spec = GeneratorSpec::random_laminar(12, 4, 99);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn weight_distribution_parsing() {
        assert_eq!("pareto:1.5".parse::<WeightDistribution>().unwrap(), WeightDistribution::Pareto(1.5));
        assert!("pareto:-1".parse::<WeightDistribution>().is_err());
        assert!("gauss".parse::<WeightDistribution>().is_err());
        let w = sample_weights(1000, WeightDistribution::Pareto(3.0), 1);
        assert!(w.iter().all(|&x| x >= 1.0));
    }
}
