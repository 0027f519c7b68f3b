//! Arrival times of *qualified* elements of a family set.
//!
//! An element of a set `B` qualifies when, at its arrival, it belongs to the
//! optimum of the sub-matroid on the elements of `B` that have arrived so
//! far. Looking back from a time `t`, the log-gaps `ln(t / t_{-1})` and
//! `ln(t / t_{-c})` between `t` and the last, respectively c-th last,
//! qualified arrival follow Exp(c) and Gamma(c, c) for a set of capacity `c`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bound::gamma_cdf;
use crate::error::{MatroidError, SimError};
use crate::instances::{sample_weights, WeightDistribution};
use crate::matroid::{Element, ElementId, LaminarMatroid, SetId};

use super::greedy::OptTracker;
use super::ks::{ks_critical_95, ks_statistic};
use super::{sample_schedule, ArrivalSchedule};

/// Arrival times of qualified elements of set `node` strictly before `t`,
/// latest first.
pub fn qualified_times(
    matroid: &LaminarMatroid,
    schedule: &ArrivalSchedule,
    node: SetId,
    t: f64,
) -> Result<Vec<f64>, SimError> {
    if schedule.len() != matroid.len() {
        return Err(SimError::ScheduleMismatch { expected: matroid.len(), got: schedule.len() });
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(SimError::InvalidParameter(format!("t must lie in (0, 1], got {t}")));
    }
    let set = matroid.node(node).ok_or(MatroidError::UnknownSet(node))?;
    let sub = matroid.restrict(&set.members)?;
    let times: Vec<f64> = sub
        .elements()
        .iter()
        .map(|e| schedule.time_of(matroid, e.id).expect("member of the ground set"))
        .collect();
    let mut order: Vec<usize> = (0..times.len()).filter(|&i| times[i] < t).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let mut opt = OptTracker::new(&sub);
    let mut out: Vec<f64> = order.into_iter().filter(|&i| opt.insert(i)).map(|i| times[i]).collect();
    out.reverse();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaTestConfig {
    pub capacity: u32,
    pub n_elements: u32,
    pub t: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaTestReport {
    pub config: LemmaTestConfig,
    /// KS distance of `ln(t / t_{-1})` from Exp(rate = capacity).
    pub ks_exp: f64,
    /// KS distance of `ln(t / t_{-c})` from Gamma(shape = rate = capacity).
    pub ks_gamma: f64,
    pub effective_trials: u64,
    pub discarded: u64,
    pub discard_rate: f64,
    pub critical_value_95: f64,
    pub pass_exp: bool,
    pub pass_gamma: bool,
}

/// Mixed into the seed for element weights so they are drawn from a stream
/// unrelated to any arrival schedule.
const WEIGHT_STREAM: u64 = 0x5851_f42d_4c95_7f2d;

/// Empirical check of the qualified-arrival distributions on a single set
/// of capacity `c` over `n_elements` elements.
///
/// Trial `i` samples its schedule from seed `seed + i`. Trials in which
/// fewer than `c` elements qualify before `t` are discarded and counted.
pub fn lemma_distribution_test(cfg: &LemmaTestConfig) -> Result<LemmaTestReport, SimError> {
    let c = cfg.capacity;
    if c == 0 {
        return Err(SimError::InvalidParameter("capacity must be >= 1".into()));
    }
    if cfg.n_elements < c {
        return Err(SimError::InvalidParameter(format!(
            "need at least {c} elements, got {}",
            cfg.n_elements
        )));
    }
    if !(cfg.t > 0.0 && cfg.t <= 1.0) {
        return Err(SimError::InvalidParameter(format!("t must lie in (0, 1], got {}", cfg.t)));
    }
    if cfg.trials == 0 {
        return Err(SimError::InvalidParameter("trials must be >= 1".into()));
    }

    let weights = sample_weights(cfg.n_elements as usize, WeightDistribution::Uniform, cfg.seed ^ WEIGHT_STREAM);
    let elements: Vec<Element> = weights
        .into_iter()
        .enumerate()
        .map(|(i, weight)| Element { id: ElementId(i as u32), weight })
        .collect();
    let matroid = LaminarMatroid::uniform(elements, c)?;
    let set = matroid.nodes()[0].id;

    let samples: Vec<Option<(f64, f64)>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let schedule = sample_schedule(&matroid, cfg.seed.wrapping_add(i));
            let q = qualified_times(&matroid, &schedule, set, cfg.t).expect("valid by construction");
            (q.len() >= c as usize).then(|| ((cfg.t / q[0]).ln(), (cfg.t / q[c as usize - 1]).ln()))
        })
        .collect();

    let (mut last, mut cth): (Vec<f64>, Vec<f64>) = samples.iter().flatten().copied().unzip();
    let effective = last.len();
    let discarded = cfg.trials - effective as u64;
    if effective == 0 {
        return Err(SimError::InvalidParameter(
            "every trial was discarded; increase n_elements or t".into(),
        ));
    }
    let rate = f64::from(c);
    let ks_exp = ks_statistic(&mut last, |x| 1.0 - (-rate * x).exp());
    let ks_gamma = ks_statistic(&mut cth, |x| gamma_cdf(x.max(0.0), c).expect("x >= 0"));
    let critical = ks_critical_95(effective);
    Ok(LemmaTestReport {
        config: *cfg,
        ks_exp,
        ks_gamma,
        effective_trials: effective as u64,
        discarded,
        discard_rate: discarded as f64 / cfg.trials as f64,
        critical_value_95: critical,
        pass_exp: ks_exp < critical,
        pass_gamma: ks_gamma < critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elems(weights: &[f64]) -> Vec<Element> {
        weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Element { id: ElementId(i as u32), weight: w })
            .collect()
    }

    #[test]
    fn nothing_before_t() {
        let m = LaminarMatroid::uniform(elems(&[1.0, 2.0]), 1).unwrap();
        let s = ArrivalSchedule::from_times(vec![0.6, 0.8]).unwrap();
        assert!(qualified_times(&m, &s, SetId(0), 0.5).unwrap().is_empty());
    }

    #[test]
    fn roomy_set_qualifies_everything() {
        let m = LaminarMatroid::from_sets(
            elems(&[3.0, 1.0, 2.0, 9.0]),
            [(SetId(3), 5, vec![ElementId(0), ElementId(1), ElementId(2)])],
        )
        .unwrap();
        let s = ArrivalSchedule::from_times(vec![0.1, 0.3, 0.2, 0.05]).unwrap();
        assert_eq!(qualified_times(&m, &s, SetId(3), 1.0).unwrap(), vec![0.3, 0.2, 0.1]);
    }

    #[test]
    fn records_only_running_maxima_for_capacity_one() {
        // weights by arrival: 2, 1, 5, 3, 8
        let m = LaminarMatroid::uniform(elems(&[2.0, 1.0, 5.0, 3.0, 8.0]), 1).unwrap();
        let s = ArrivalSchedule::from_times(vec![0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        assert_eq!(qualified_times(&m, &s, SetId(0), 1.0).unwrap(), vec![0.5, 0.3, 0.1]);
        assert_eq!(qualified_times(&m, &s, SetId(0), 0.5).unwrap(), vec![0.3, 0.1]);
    }

    #[test]
    fn unknown_set() {
        let m = LaminarMatroid::uniform(elems(&[1.0]), 1).unwrap();
        let s = ArrivalSchedule::from_times(vec![0.5]).unwrap();
        assert!(qualified_times(&m, &s, SetId(7), 1.0).is_err());
        assert!(qualified_times(&m, &s, SetId(0), 0.0).is_err());
    }

    #[test]
    fn degenerate_configs() {
        let base = LemmaTestConfig { capacity: 1, n_elements: 10, t: 1.0, trials: 10, seed: 0 };
        assert!(lemma_distribution_test(&LemmaTestConfig { capacity: 0, ..base }).is_err());
        assert!(lemma_distribution_test(&LemmaTestConfig { n_elements: 0, ..base }).is_err());
        assert!(lemma_distribution_test(&LemmaTestConfig { t: 1.5, ..base }).is_err());
        assert!(lemma_distribution_test(&LemmaTestConfig { trials: 0, ..base }).is_err());
    }

    #[test]
    fn capacity_one_exp_equals_gamma() {
        let cfg = LemmaTestConfig { capacity: 1, n_elements: 40, t: 0.8, trials: 5000, seed: 11 };
        let r = lemma_distribution_test(&cfg).unwrap();
        assert!((r.ks_exp - r.ks_gamma).abs() < 1e-12);
    }
}
