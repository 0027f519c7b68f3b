use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{ElementId, InstanceSpec, SetId};

/// A single broken invariant of an [`InstanceSpec`].
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Violation {
    #[error("element id {0} appears more than once")]
    DuplicateElement(ElementId),
    #[error("element {id} has weight {weight}; weights must be finite and > 0")]
    BadWeight { id: ElementId, weight: f64 },
    #[error("elements {first} and {second} share weight {weight}")]
    DuplicateWeight { first: ElementId, second: ElementId, weight: f64 },
    #[error("set id {0} appears more than once")]
    DuplicateSet(SetId),
    #[error("set {0} has capacity 0")]
    ZeroCapacity(SetId),
    #[error("set {set} references unknown element {element}")]
    UnknownMember { set: SetId, element: ElementId },
    #[error("set {set} lists element {element} more than once")]
    RepeatedMember { set: SetId, element: ElementId },
    #[error("sets {first} and {second} overlap without nesting")]
    Overlap { first: SetId, second: SetId },
    #[error("sets {first} and {second} have identical members")]
    IdenticalSets { first: SetId, second: SetId },
    #[error("set {set} names unknown parent {parent}")]
    UnknownParent { set: SetId, parent: SetId },
    #[error("set {set} declares parent {declared:?} but its smallest enclosing set is {actual:?}")]
    ParentMismatch { set: SetId, declared: Option<SetId>, actual: Option<SetId> },
}

/// Check every structural invariant of a laminar matroid description.
///
/// Returns an empty list when the description is valid.
pub fn validate(spec: &InstanceSpec) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = BTreeSet::new();
    for e in &spec.elements {
        if !seen.insert(e.id) {
            out.push(Violation::DuplicateElement(e.id));
        }
        if !(e.weight.is_finite() && e.weight > 0.0) {
            out.push(Violation::BadWeight { id: e.id, weight: e.weight });
        }
    }
    let mut by_weight: Vec<_> = spec.elements.iter().filter(|e| e.weight.is_finite()).collect();
    by_weight.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.id.cmp(&b.id)));
    for w in by_weight.windows(2) {
        if w[0].weight == w[1].weight {
            out.push(Violation::DuplicateWeight {
                first: w[0].id,
                second: w[1].id,
                weight: w[0].weight,
            });
        }
    }

    let mut set_ids = BTreeSet::new();
    let mut members: Vec<Vec<ElementId>> = Vec::with_capacity(spec.sets.len());
    for set in &spec.sets {
        if !set_ids.insert(set.id) {
            out.push(Violation::DuplicateSet(set.id));
        }
        if set.capacity == 0 {
            out.push(Violation::ZeroCapacity(set.id));
        }
        let mut m = set.members.clone();
        m.sort_unstable();
        for w in m.windows(2) {
            if w[0] == w[1] {
                out.push(Violation::RepeatedMember { set: set.id, element: w[0] });
            }
        }
        m.dedup();
        for &e in &m {
            if !seen.contains(&e) {
                out.push(Violation::UnknownMember { set: set.id, element: e });
            }
        }
        members.push(m);
    }

    let mut laminar = true;
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            match relation(&members[i], &members[j]) {
                Relation::Equal => {
                    laminar = false;
                    out.push(Violation::IdenticalSets {
                        first: spec.sets[i].id,
                        second: spec.sets[j].id,
                    });
                }
                Relation::Crossing => {
                    laminar = false;
                    out.push(Violation::Overlap { first: spec.sets[i].id, second: spec.sets[j].id });
                }
                _ => {}
            }
        }
    }

    let position: BTreeMap<SetId, usize> =
        spec.sets.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
    for (i, set) in spec.sets.iter().enumerate() {
        if let Some(p) = set.parent {
            if !position.contains_key(&p) {
                out.push(Violation::UnknownParent { set: set.id, parent: p });
                continue;
            }
        }
        if laminar {
            let actual = smallest_strict_superset(&members, i).map(|j| spec.sets[j].id);
            if actual != set.parent {
                out.push(Violation::ParentMismatch { set: set.id, declared: set.parent, actual });
            }
        }
    }

    out
}

#[derive(Debug, PartialEq, Eq)]
enum Relation {
    Disjoint,
    Equal,
    Nested,
    Crossing,
}

/// Relation between two sorted, deduplicated member lists.
fn relation(a: &[ElementId], b: &[ElementId]) -> Relation {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    if common == 0 {
        Relation::Disjoint
    } else if common == a.len() && common == b.len() {
        Relation::Equal
    } else if common == a.len() || common == b.len() {
        Relation::Nested
    } else {
        Relation::Crossing
    }
}

fn is_strict_subset(a: &[ElementId], b: &[ElementId]) -> bool {
    a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Index of the smallest set strictly containing `members[i]`, if any.
/// Empty sets have no parent.
pub(super) fn smallest_strict_superset(members: &[Vec<ElementId>], i: usize) -> Option<usize> {
    if members[i].is_empty() {
        return None;
    }
    (0..members.len())
        .filter(|&j| j != i && is_strict_subset(&members[i], &members[j]))
        .min_by_key(|&j| members[j].len())
}
