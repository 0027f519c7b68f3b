use super::LaminarMatroid;

/// Largest candidate set [`LaminarMatroid::brute_force_opt`] will enumerate.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Incremental independence oracle.
///
/// Keeps one counter per family set; inserting or removing an element
/// touches only the sets on its chain, so each update is O(depth).
#[derive(Clone, Debug)]
pub struct IndependenceTracker<'m> {
    matroid: &'m LaminarMatroid,
    counts: Vec<u32>,
}

impl<'m> IndependenceTracker<'m> {
    pub fn new(matroid: &'m LaminarMatroid) -> Self {
        Self { matroid, counts: vec![0; matroid.nodes.len()] }
    }

    pub fn matroid(&self) -> &'m LaminarMatroid {
        self.matroid
    }

    /// Whether adding the element at `index` keeps the tracked set independent.
    pub fn can_insert(&self, index: usize) -> bool {
        self.innermost_tight(index).is_none()
    }

    /// Innermost set on the element's chain that is already at capacity.
    pub fn innermost_tight(&self, index: usize) -> Option<usize> {
        self.matroid
            .chain(index)
            .iter()
            .copied()
            .find(|&k| self.counts[k] >= self.matroid.nodes[k].capacity)
    }

    pub fn insert(&mut self, index: usize) {
        for &k in self.matroid.chain(index) {
            self.counts[k] += 1;
        }
    }

    pub fn remove(&mut self, index: usize) {
        for &k in self.matroid.chain(index) {
            debug_assert!(self.counts[k] > 0);
            self.counts[k] -= 1;
        }
    }

    /// Insert if independence is preserved; reports whether it was.
    pub fn try_insert(&mut self, index: usize) -> bool {
        let ok = self.can_insert(index);
        if ok {
            self.insert(index);
        }
        ok
    }

    pub fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }
}

/// Exhaustive search over all subsets of `candidates` (element indices).
pub(super) fn brute_force(matroid: &LaminarMatroid, candidates: &[usize]) -> Vec<usize> {
    let n = candidates.len();
    let mut best_mask = 0u32;
    let mut best_weight = 0.0;
    for mask in 1u32..(1u32 << n) {
        let chosen: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| candidates[b]).collect();
        if !matroid.is_independent_indices(&chosen) {
            continue;
        }
        let w: f64 = chosen.iter().map(|&i| matroid.weight_at(i)).sum();
        if w > best_weight {
            best_weight = w;
            best_mask = mask;
        }
    }
    (0..n).filter(|b| best_mask >> b & 1 == 1).map(|b| candidates[b]).collect()
}
