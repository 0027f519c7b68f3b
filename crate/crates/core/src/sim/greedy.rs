use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::matroid::{ElementId, IndependenceTracker, IndependentSet, LaminarMatroid};

use super::ArrivalSchedule;

/// Which membership test gates a post-threshold arrival.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    /// Accept `e` only if it lies in the optimum of everything arrived so far.
    PaperGreedy,
    /// Accept `e` only if it lies in the optimum of the pre-threshold sample
    /// plus `e` itself.
    MtwGreedy,
}

impl FromStr for AlgorithmKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" | "paper_greedy" | "greedy" => Ok(Self::PaperGreedy),
            "mtw" | "mtw_greedy" => Ok(Self::MtwGreedy),
            _ => Err(format!("unknown algorithm `{s}` (expected `paper` or `mtw`)")),
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PaperGreedy => "paper_greedy",
            Self::MtwGreedy => "mtw_greedy",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    pub t0: f64,
}

impl AlgorithmSpec {
    pub fn new(kind: AlgorithmKind, t0: f64) -> Result<Self, SimError> {
        if !(t0 > 0.0 && t0 < 1.0) {
            return Err(SimError::InvalidParameter(format!("t0 must lie in (0, 1), got {t0}")));
        }
        Ok(Self { kind, t0 })
    }

    pub fn paper(t0: f64) -> Result<Self, SimError> {
        Self::new(AlgorithmKind::PaperGreedy, t0)
    }

    pub fn mtw(t0: f64) -> Result<Self, SimError> {
        Self::new(AlgorithmKind::MtwGreedy, t0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub selected: IndependentSet,
    /// Offline optimum over the full ground set.
    pub opt: IndependentSet,
    pub schedule_seed: Option<u64>,
}

/// One arrival as seen by the online rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub element: ElementId,
    pub time: f64,
    /// Arrived strictly after the threshold.
    pub cond1: bool,
    /// Passed the optimum-membership test.
    pub cond2: bool,
    /// Fits alongside the elements already selected.
    pub cond3: bool,
    pub selected: bool,
}

/// Maximum-weight independent set of a growing ground set.
///
/// Each insertion changes the optimum by at most one swap: if the newcomer
/// does not fit, the fundamental circuit it closes lies inside the innermost
/// saturated set on its chain, and the lightest element of that circuit
/// leaves.
#[derive(Clone, Debug)]
pub(crate) struct OptTracker<'m> {
    counts: IndependenceTracker<'m>,
    in_opt: Vec<bool>,
    members: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Insertion {
    Rejected,
    Added,
    Swapped(usize),
}

impl<'m> OptTracker<'m> {
    pub(crate) fn new(matroid: &'m LaminarMatroid) -> Self {
        Self {
            counts: IndependenceTracker::new(matroid),
            in_opt: vec![false; matroid.len()],
            members: Vec::new(),
        }
    }

    fn evaluate(&self, index: usize) -> Insertion {
        let matroid = self.counts.matroid();
        let Some(tight) = self.counts.innermost_tight(index) else {
            return Insertion::Added;
        };
        let lightest = self
            .members
            .iter()
            .copied()
            .filter(|&f| matroid.chain(f).contains(&tight))
            .min_by(|&a, &b| matroid.weight_at(a).total_cmp(&matroid.weight_at(b)));
        match lightest {
            Some(f) if matroid.weight_at(f) < matroid.weight_at(index) => Insertion::Swapped(f),
            _ => Insertion::Rejected,
        }
    }

    /// Whether `index` would belong to the optimum after being added.
    pub(crate) fn would_enter(&self, index: usize) -> bool {
        self.evaluate(index) != Insertion::Rejected
    }

    /// Add `index` to the ground set; reports whether it joined the optimum.
    pub(crate) fn insert(&mut self, index: usize) -> bool {
        match self.evaluate(index) {
            Insertion::Rejected => false,
            Insertion::Added => {
                self.admit(index);
                true
            }
            Insertion::Swapped(out) => {
                self.counts.remove(out);
                self.in_opt[out] = false;
                self.members.retain(|&m| m != out);
                self.admit(index);
                true
            }
        }
    }

    fn admit(&mut self, index: usize) {
        self.counts.insert(index);
        self.in_opt[index] = true;
        self.members.push(index);
    }

    pub(crate) fn contains(&self, index: usize) -> bool {
        self.in_opt[index]
    }
}

fn check_schedule(matroid: &LaminarMatroid, schedule: &ArrivalSchedule) -> Result<(), SimError> {
    if schedule.len() != matroid.len() {
        return Err(SimError::ScheduleMismatch { expected: matroid.len(), got: schedule.len() });
    }
    Ok(())
}

/// Run the online rule over one arrival schedule.
pub fn run(
    matroid: &LaminarMatroid,
    schedule: &ArrivalSchedule,
    spec: &AlgorithmSpec,
) -> Result<RunOutcome, SimError> {
    check_schedule(matroid, schedule)?;
    let opt = full_opt_mask(matroid);
    let selected = run_indices(matroid, schedule, spec, &opt, None);
    Ok(RunOutcome {
        selected: matroid.ids_of(&selected),
        opt: opt_set(matroid, &opt),
        schedule_seed: schedule.seed(),
    })
}

/// Like [`run`], also returning one [`TraceRecord`] per arrival.
pub fn run_traced(
    matroid: &LaminarMatroid,
    schedule: &ArrivalSchedule,
    spec: &AlgorithmSpec,
) -> Result<(RunOutcome, Vec<TraceRecord>), SimError> {
    check_schedule(matroid, schedule)?;
    let opt = full_opt_mask(matroid);
    let mut trace = Vec::with_capacity(matroid.len());
    let selected = run_indices(matroid, schedule, spec, &opt, Some(&mut trace));
    let outcome = RunOutcome {
        selected: matroid.ids_of(&selected),
        opt: opt_set(matroid, &opt),
        schedule_seed: schedule.seed(),
    };
    Ok((outcome, trace))
}

pub(crate) fn full_opt_mask(matroid: &LaminarMatroid) -> Vec<bool> {
    let mut mask = vec![false; matroid.len()];
    for i in matroid.offline_opt_mask(&vec![true; matroid.len()]) {
        mask[i] = true;
    }
    mask
}

fn opt_set(matroid: &LaminarMatroid, mask: &[bool]) -> IndependentSet {
    let idx: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    matroid.ids_of(&idx)
}

/// Core loop; returns selected element indices in selection order.
pub(crate) fn run_indices(
    matroid: &LaminarMatroid,
    schedule: &ArrivalSchedule,
    spec: &AlgorithmSpec,
    full_opt: &[bool],
    mut trace: Option<&mut Vec<TraceRecord>>,
) -> Vec<usize> {
    let times = schedule.times();
    let order = schedule.arrival_order();
    let mut current = OptTracker::new(matroid);
    let mut alg = IndependenceTracker::new(matroid);
    let mut selected = Vec::new();

    // The pre-threshold optimum, needed only by the MTW rule.
    let sample = match spec.kind {
        AlgorithmKind::MtwGreedy => {
            let mut s = OptTracker::new(matroid);
            for &i in order.iter().take_while(|&&i| times[i] <= spec.t0) {
                s.insert(i);
            }
            Some(s)
        }
        AlgorithmKind::PaperGreedy => None,
    };

    for &i in &order {
        let t = times[i];
        let entered = current.insert(i);
        debug_assert!(!full_opt[i] || entered, "optimal element failed the membership test");

        let cond1 = t > spec.t0;
        let cond2 = match &sample {
            None => entered,
            Some(s) if cond1 => s.would_enter(i),
            Some(s) => s.contains(i),
        };
        let cond3 = alg.can_insert(i);
        let take = cond1 && cond2 && cond3;
        if take {
            alg.insert(i);
            selected.push(i);
        }
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(TraceRecord {
                element: matroid.elements()[i].id,
                time: t,
                cond1,
                cond2,
                cond3,
                selected: take,
            });
        }
    }
    selected
}

/// Reference implementation that recomputes every optimum from scratch
/// with [`LaminarMatroid::offline_opt`] and checks independence of the whole
/// selected set at each arrival.
pub fn run_reference(
    matroid: &LaminarMatroid,
    schedule: &ArrivalSchedule,
    spec: &AlgorithmSpec,
) -> Result<RunOutcome, SimError> {
    check_schedule(matroid, schedule)?;
    let times = schedule.times();
    let ids = matroid.element_ids();
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));

    let before_t0: Vec<ElementId> =
        order.iter().filter(|&&i| times[i] <= spec.t0).map(|&i| ids[i]).collect();
    let mut arrived: Vec<ElementId> = Vec::new();
    let mut selected: Vec<ElementId> = Vec::new();
    for &i in &order {
        let e = ids[i];
        arrived.push(e);
        if times[i] <= spec.t0 {
            continue;
        }
        let in_opt = match spec.kind {
            AlgorithmKind::PaperGreedy => matroid.offline_opt(&arrived)?.contains(e),
            AlgorithmKind::MtwGreedy => {
                let mut pool = before_t0.clone();
                pool.push(e);
                matroid.offline_opt(&pool)?.contains(e)
            }
        };
        if !in_opt {
            continue;
        }
        let mut candidate = selected.clone();
        candidate.push(e);
        if matroid.is_independent(&candidate)? {
            selected = candidate;
        }
    }
    Ok(RunOutcome {
        selected: IndependentSet::from_ids(selected),
        opt: matroid.offline_opt(&ids)?,
        schedule_seed: schedule.seed(),
    })
}
