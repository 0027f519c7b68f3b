//! Laminar matroids: representation, validation, and structural operations.
//!
//! A laminar matroid is a ground set of weighted elements together with a
//! laminar family of member sets, each carrying a capacity. A subset of
//! elements is independent when it holds at most `capacity` elements of
//! every set in the family.
//!
//! Instances are described by an [`InstanceSpec`] (the same shape as the
//! on-disk document) and turned into a [`LaminarMatroid`] only after
//! [`validate`] reports no violations. Once built, a matroid is immutable.

mod oracle;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use oracle::{IndependenceTracker, BRUTE_FORCE_LIMIT};
pub use validate::{validate, Violation};

use crate::error::MatroidError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetId(pub u32);

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B{}", self.0)
    }
}

/// A ground-set element with a strictly positive weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub id: ElementId,
    pub weight: f64,
}

/// One capacity-constrained set as declared in an instance description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSpec {
    pub id: SetId,
    pub capacity: u32,
    pub parent: Option<SetId>,
    pub members: Vec<ElementId>,
}

/// Unvalidated description of a laminar matroid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub elements: Vec<Element>,
    pub sets: Vec<SetSpec>,
}

impl InstanceSpec {
    /// Fill in every `parent` field with the smallest strict superset in the
    /// family. Has no effect on families that are not laminar.
    pub fn infer_parents(&mut self) {
        let sorted: Vec<Vec<ElementId>> = self
            .sets
            .iter()
            .map(|s| {
                let mut m = s.members.clone();
                m.sort_unstable();
                m.dedup();
                m
            })
            .collect();
        let parents: Vec<Option<SetId>> = (0..self.sets.len())
            .map(|i| {
                validate::smallest_strict_superset(&sorted, i).map(|j| self.sets[j].id)
            })
            .collect();
        for (set, parent) in self.sets.iter_mut().zip(parents) {
            set.parent = parent;
        }
    }
}

/// A node of the laminar forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarNode {
    pub id: SetId,
    pub capacity: u32,
    /// Sorted member ids.
    pub members: Vec<ElementId>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl LaminarNode {
    pub fn contains(&self, id: ElementId) -> bool {
        self.members.binary_search(&id).is_ok()
    }
}

/// A validated, immutable laminar matroid.
///
/// Elements are stored sorted by id; the position of an element in that
/// order is its *index*, which the hot paths of the crate use instead of
/// ids.
#[derive(Clone, Debug, PartialEq)]
pub struct LaminarMatroid {
    elements: Vec<Element>,
    nodes: Vec<LaminarNode>,
    roots: Vec<usize>,
    /// For each element index, the nodes containing it, innermost first.
    chains: Vec<Vec<usize>>,
    /// Element indices by descending weight, ties broken by ascending id.
    by_weight: Vec<usize>,
}

impl LaminarMatroid {
    /// Validate `spec` and build the matroid.
    pub fn new(spec: InstanceSpec) -> Result<Self, MatroidError> {
        let violations = validate(&spec);
        if !violations.is_empty() {
            return Err(MatroidError::Invalid(violations));
        }
        Ok(Self::from_valid(spec))
    }

    /// Build from elements and `(id, capacity, members)` triples, inferring
    /// the forest structure from containment.
    pub fn from_sets<I>(elements: Vec<Element>, sets: I) -> Result<Self, MatroidError>
    where
        I: IntoIterator<Item = (SetId, u32, Vec<ElementId>)>,
    {
        let mut spec = InstanceSpec {
            elements,
            sets: sets
                .into_iter()
                .map(|(id, capacity, members)| SetSpec { id, capacity, parent: None, members })
                .collect(),
        };
        spec.infer_parents();
        Self::new(spec)
    }

    /// The r-uniform matroid: a single set holding every element.
    pub fn uniform(elements: Vec<Element>, rank: u32) -> Result<Self, MatroidError> {
        let members = elements.iter().map(|e| e.id).collect();
        Self::from_sets(elements, [(SetId(0), rank, members)])
    }

    fn from_valid(spec: InstanceSpec) -> Self {
        let mut elements = spec.elements;
        elements.sort_by_key(|e| e.id);

        let pos_of_set: BTreeMap<SetId, usize> =
            spec.sets.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        let mut nodes: Vec<LaminarNode> = spec
            .sets
            .iter()
            .map(|s| {
                let mut members = s.members.clone();
                members.sort_unstable();
                LaminarNode {
                    id: s.id,
                    capacity: s.capacity,
                    members,
                    parent: s.parent.map(|p| pos_of_set[&p]),
                    children: Vec::new(),
                }
            })
            .collect();
        let mut roots = Vec::new();
        for i in 0..nodes.len() {
            match nodes[i].parent {
                Some(p) => nodes[p].children.push(i),
                None => roots.push(i),
            }
        }

        let index_of = |id: ElementId| elements.binary_search_by_key(&id, |e| e.id).unwrap();
        let mut chains = vec![Vec::new(); elements.len()];
        for (k, node) in nodes.iter().enumerate() {
            for &m in &node.members {
                chains[index_of(m)].push(k);
            }
        }
        // Nested sets along a chain are ordered by size; innermost first.
        for chain in &mut chains {
            chain.sort_by_key(|&k| nodes[k].members.len());
        }

        let mut by_weight: Vec<usize> = (0..elements.len()).collect();
        by_weight.sort_by(|&a, &b| {
            elements[b]
                .weight
                .total_cmp(&elements[a].weight)
                .then(elements[a].id.cmp(&elements[b].id))
        });

        Self { elements, nodes, roots, chains, by_weight }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements sorted by id.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element_ids(&self) -> Vec<ElementId> {
        self.elements.iter().map(|e| e.id).collect()
    }

    pub fn nodes(&self) -> &[LaminarNode] {
        &self.nodes
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn node(&self, id: SetId) -> Option<&LaminarNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn index_of(&self, id: ElementId) -> Option<usize> {
        self.elements.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn weight(&self, id: ElementId) -> Option<f64> {
        self.index_of(id).map(|i| self.elements[i].weight)
    }

    pub(crate) fn weight_at(&self, index: usize) -> f64 {
        self.elements[index].weight
    }

    pub(crate) fn chain(&self, index: usize) -> &[usize] {
        &self.chains[index]
    }

    pub(crate) fn indices_of(&self, ids: &[ElementId]) -> Result<Vec<usize>, MatroidError> {
        let mut out = ids
            .iter()
            .map(|&id| self.index_of(id).ok_or(MatroidError::UnknownElement(id)))
            .collect::<Result<Vec<_>, _>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Export back to the declarative form, parents filled in.
    pub fn to_spec(&self) -> InstanceSpec {
        InstanceSpec {
            elements: self.elements.clone(),
            sets: self
                .nodes
                .iter()
                .map(|n| SetSpec {
                    id: n.id,
                    capacity: n.capacity,
                    parent: n.parent.map(|p| self.nodes[p].id),
                    members: n.members.clone(),
                })
                .collect(),
        }
    }

    /// Equivalent matroid with vacuous sets removed and capacities strictly
    /// increasing along every chain of nested sets.
    ///
    /// A set is dropped if `capacity >= |members|`, or if some ancestor has a
    /// capacity no larger than its own (the ancestor's constraint implies it).
    pub fn normalize(&self) -> LaminarMatroid {
        let keep: Vec<bool> = (0..self.nodes.len())
            .map(|k| {
                let node = &self.nodes[k];
                if node.capacity as usize >= node.members.len() {
                    return false;
                }
                let mut up = node.parent;
                while let Some(p) = up {
                    let anc = &self.nodes[p];
                    if (anc.capacity as usize) < anc.members.len() && anc.capacity <= node.capacity {
                        return false;
                    }
                    up = anc.parent;
                }
                true
            })
            .collect();
        let sets = self
            .nodes
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(n, _)| (n.id, n.capacity, n.members.clone()));
        LaminarMatroid::from_sets(self.elements.clone(), sets)
            .expect("a sub-family of a laminar family is laminar")
    }

    /// The sub-matroid on `subset`: every member set is intersected with it.
    ///
    /// Sets that become empty are dropped. Nested sets that collapse onto the
    /// same members are merged, keeping the smaller capacity and the id of
    /// the innermost of them.
    pub fn restrict(&self, subset: &[ElementId]) -> Result<LaminarMatroid, MatroidError> {
        let idx = self.indices_of(subset)?;
        let kept: Vec<Element> = idx.iter().map(|&i| self.elements[i]).collect();
        let mut inside = vec![false; self.elements.len()];
        for &i in &idx {
            inside[i] = true;
        }

        // members -> (capacity, id, size of the original set)
        let mut merged: BTreeMap<Vec<ElementId>, (u32, SetId, usize)> = BTreeMap::new();
        for node in &self.nodes {
            let members: Vec<ElementId> = node
                .members
                .iter()
                .copied()
                .filter(|&m| inside[self.index_of(m).unwrap()])
                .collect();
            if members.is_empty() {
                continue;
            }
            let entry = merged.entry(members).or_insert((node.capacity, node.id, node.members.len()));
            entry.0 = entry.0.min(node.capacity);
            if node.members.len() < entry.2 {
                entry.1 = node.id;
                entry.2 = node.members.len();
            }
        }
        let sets = merged.into_iter().map(|(members, (cap, id, _))| (id, cap, members));
        LaminarMatroid::from_sets(kept, sets)
    }

    /// Whether `set` respects every capacity. Duplicate ids count once.
    pub fn is_independent(&self, set: &[ElementId]) -> Result<bool, MatroidError> {
        let idx = self.indices_of(set)?;
        Ok(self.is_independent_indices(&idx))
    }

    pub(crate) fn is_independent_indices(&self, idx: &[usize]) -> bool {
        let mut tracker = IndependenceTracker::new(self);
        idx.iter().all(|&i| tracker.try_insert(i))
    }

    /// Maximum-weight independent subset of `available`, by the greedy rule:
    /// scan by descending weight and keep whatever still fits.
    pub fn offline_opt(&self, available: &[ElementId]) -> Result<IndependentSet, MatroidError> {
        let idx = self.indices_of(available)?;
        let mut mask = vec![false; self.elements.len()];
        for i in idx {
            mask[i] = true;
        }
        Ok(self.ids_of(&self.offline_opt_mask(&mask)))
    }

    pub(crate) fn offline_opt_mask(&self, available: &[bool]) -> Vec<usize> {
        let mut tracker = IndependenceTracker::new(self);
        self.by_weight
            .iter()
            .copied()
            .filter(|&i| available[i] && tracker.try_insert(i))
            .collect()
    }

    /// Exhaustive maximum-weight independent subset; test oracle only.
    pub fn brute_force_opt(&self, available: &[ElementId]) -> Result<IndependentSet, MatroidError> {
        let idx = self.indices_of(available)?;
        if idx.len() > BRUTE_FORCE_LIMIT {
            return Err(MatroidError::TooLarge { size: idx.len(), limit: BRUTE_FORCE_LIMIT });
        }
        let best = oracle::brute_force(self, &idx);
        Ok(self.ids_of(&best))
    }

    /// Size of a maximum-cardinality independent set.
    pub fn rank(&self) -> usize {
        let mut tracker = IndependenceTracker::new(self);
        (0..self.elements.len()).filter(|&i| tracker.try_insert(i)).count()
    }

    pub(crate) fn ids_of(&self, idx: &[usize]) -> IndependentSet {
        IndependentSet::from_ids(idx.iter().map(|&i| self.elements[i].id))
    }
}

/// A set of element ids, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndependentSet {
    elements: Vec<ElementId>,
}

impl IndependentSet {
    pub fn from_ids<I: IntoIterator<Item = ElementId>>(ids: I) -> Self {
        let mut elements: Vec<ElementId> = ids.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Self { elements }
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.elements.binary_search(&id).is_ok()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.elements.iter().copied()
    }

    pub fn as_slice(&self) -> &[ElementId] {
        &self.elements
    }

    pub fn is_subset(&self, other: &IndependentSet) -> bool {
        self.iter().all(|e| other.contains(e))
    }

    /// Total weight; ids unknown to `matroid` contribute nothing.
    pub fn weight(&self, matroid: &LaminarMatroid) -> f64 {
        self.iter().filter_map(|e| matroid.weight(e)).sum()
    }
}
