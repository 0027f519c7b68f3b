use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::SimError;
use crate::matroid::{ElementId, LaminarMatroid};

/// Arrival times of every ground-set element, indexed like the matroid's
/// elements (ascending id).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrivalSchedule {
    times: Vec<f64>,
    seed: Option<u64>,
}

impl ArrivalSchedule {
    /// Wrap explicit times; they must be distinct and lie in (0, 1).
    pub fn from_times(times: Vec<f64>) -> Result<Self, SimError> {
        if let Some(t) = times.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(SimError::InvalidSchedule(format!("time {t} outside (0, 1)")));
        }
        let mut sorted = times.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(SimError::InvalidSchedule("arrival times must be distinct".into()));
        }
        Ok(Self { times, seed: None })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time_of(&self, matroid: &LaminarMatroid, id: ElementId) -> Option<f64> {
        matroid.index_of(id).and_then(|i| self.times.get(i).copied())
    }

    /// Element indices in order of arrival.
    pub fn arrival_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.times.len()).collect();
        order.sort_by(|&a, &b| self.times[a].total_cmp(&self.times[b]));
        order
    }
}

/// Independent uniform arrival times in (0, 1) for every element, drawn from
/// a ChaCha8 stream keyed by `seed`.
pub fn sample_schedule(matroid: &LaminarMatroid, seed: u64) -> ArrivalSchedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times: Vec<f64> = (0..matroid.len()).map(|_| rng.sample(Open01)).collect();
    // Collisions at f64 resolution are astronomically rare; redraw them.
    loop {
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let clashes: Vec<usize> =
            order.windows(2).filter(|w| times[w[0]] == times[w[1]]).map(|w| w[1]).collect();
        if clashes.is_empty() {
            break;
        }
        for i in clashes {
            times[i] = rng.sample(Open01);
        }
    }
    ArrivalSchedule { times, seed: Some(seed) }
}
