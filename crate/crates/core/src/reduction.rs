//! Supervisor reduction by control congruence.
//!
//! Two supervisor states may share a cell when their enable/disable
//! decisions never contradict each other and their marking agrees wherever
//! the plant marking does. Cells must also be closed under transitions: if
//! two states share a cell, so do their successors under each common event.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::automata::{lang_equal, meet, selfloop, EventId, Generator, StateId};
use crate::error::{Error, Result};
use crate::synthesis::{control_data, ControlData};

/// `(x, x')` is in the control consistency relation.
pub fn control_consistent(cd: &ControlData, x: StateId, x2: StateId) -> bool {
    cd.enabled[x].is_disjoint(&cd.disabled[x2])
        && cd.enabled[x2].is_disjoint(&cd.disabled[x])
        && marking_consistent(cd, x, x2)
}

pub(crate) fn marking_consistent(cd: &ControlData, x: StateId, x2: StateId) -> bool {
    cd.plant_marked[x] != cd.plant_marked[x2] || cd.marked[x] == cd.marked[x2]
}

/// Which consistency relation certified a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    /// The global relation over all events.
    Global,
    /// Consistency restricted to the named agent's controllable events.
    Agent(String),
}

/// A partition of supervisor states into cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatePartition {
    cell_of: Vec<usize>,
    cells: Vec<BTreeSet<StateId>>,
    relation: Relation,
    ecc_witness: Option<(StateId, StateId)>,
}

impl StatePartition {
    /// Every state in its own cell.
    pub fn identity(n: usize, relation: Relation) -> Self {
        StatePartition {
            cell_of: (0..n).collect(),
            cells: (0..n).map(|x| BTreeSet::from([x])).collect(),
            relation,
            ecc_witness: None,
        }
    }

    /// Build from arbitrary cell labels; cells are renumbered by their least
    /// member.
    pub fn from_labels(labels: &[usize], relation: Relation) -> Self {
        let mut by_label: BTreeMap<usize, BTreeSet<StateId>> = BTreeMap::new();
        for (x, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().insert(x);
        }
        let mut cells: Vec<BTreeSet<StateId>> = by_label.into_values().collect();
        cells.sort_by_key(|c| *c.first().unwrap());
        let mut cell_of = vec![0; labels.len()];
        for (i, c) in cells.iter().enumerate() {
            for &x in c {
                cell_of[x] = i;
            }
        }
        StatePartition {
            cell_of,
            cells,
            relation,
            ecc_witness: None,
        }
    }

    pub fn cell_of(&self, x: StateId) -> usize {
        self.cell_of[x]
    }

    pub fn cells(&self) -> &[BTreeSet<StateId>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn state_count(&self) -> usize {
        self.cell_of.len()
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn ecc_witness(&self) -> Option<(StateId, StateId)> {
        self.ecc_witness
    }

    pub fn set_ecc_witness(&mut self, pair: (StateId, StateId)) {
        self.ecc_witness = Some(pair);
    }

    /// Every pair inside each cell satisfies `consistent`.
    pub fn cells_consistent(&self, consistent: impl Fn(StateId, StateId) -> bool) -> bool {
        self.cells
            .iter()
            .all(|c| c.iter().all(|&x| c.range(x..).all(|&y| consistent(x, y))))
    }

    /// Successors of each cell under each event fall in a single cell.
    pub fn is_closed_under(&self, sup: &Generator) -> bool {
        self.cells.iter().all(|c| {
            let mut target: BTreeMap<EventId, usize> = BTreeMap::new();
            c.iter().all(|&x| {
                sup.outgoing(x)
                    .all(|(e, d)| *target.entry(e).or_insert(self.cell_of[d]) == self.cell_of[d])
            })
        })
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Try to merge the cells of `x` and `x2`, propagating the merge to
/// successor cells under every event. Returns `None`, leaving `p`
/// untouched, when some forced merge would put an inconsistent pair in one
/// cell.
pub fn merge_closure(
    p: &StatePartition,
    sup: &Generator,
    x: StateId,
    x2: StateId,
    consistent: &dyn Fn(StateId, StateId) -> bool,
) -> Option<StatePartition> {
    let n = p.state_count();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut members: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for c in &p.cells {
        let root = *c.first().unwrap();
        for &y in c {
            parent[y] = root;
            members[root].push(y);
        }
    }
    let mut pending = VecDeque::from([(x, x2)]);
    while let Some((a, b)) = pending.pop_front() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        for &u in &members[ra] {
            for &v in &members[rb] {
                if !consistent(u, v) {
                    return None;
                }
            }
        }
        // successors that must now share a cell
        let mut first_succ: BTreeMap<EventId, StateId> = BTreeMap::new();
        for &u in &members[ra] {
            for (e, d) in sup.outgoing(u) {
                first_succ.entry(e).or_insert(d);
            }
        }
        for &v in &members[rb] {
            for (e, d) in sup.outgoing(v) {
                if let Some(&d0) = first_succ.get(&e) {
                    pending.push_back((d0, d));
                }
            }
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[gone] = keep;
        let moved = std::mem::take(&mut members[gone]);
        members[keep].extend(moved);
    }
    let labels: Vec<usize> = (0..n).map(|y| find(&mut parent, y)).collect();
    let mut out = StatePartition::from_labels(&labels, p.relation.clone());
    out.ecc_witness = p.ecc_witness;
    Some(out)
}

/// Row-major `n × n` table of a pair predicate.
pub(crate) fn pair_table(n: usize, f: impl Fn(StateId, StateId) -> bool) -> Vec<bool> {
    (0..n * n).map(|k| f(k / n, k % n)).collect()
}

/// Greedy congruence search: every pair `(i, j)`, `i < j`, in ascending
/// order is offered to [`merge_closure`].
pub fn greedy_partition(
    sup: &Generator,
    start: StatePartition,
    consistent: &dyn Fn(StateId, StateId) -> bool,
) -> StatePartition {
    let n = sup.state_count();
    let mut p = start;
    for i in 0..n {
        for j in i + 1..n {
            if p.cell_of(i) == p.cell_of(j) {
                continue;
            }
            if let Some(merged) = merge_closure(&p, sup, i, j, consistent) {
                p = merged;
            }
        }
    }
    p
}

/// Quotient generator of `sup` by `p`. A cell is marked iff it contains a
/// marked state; `σ` leads from cell `i` to cell `j` iff every member of
/// `i` with `σ` defined moves into `j`.
pub fn induce(sup: &Generator, p: &StatePartition) -> Result<Generator> {
    let Some(x0) = sup.initial() else {
        return Ok(sup.clone());
    };
    let mut out = Generator::new(sup.name(), p.len(), p.cell_of(x0), sup.alphabet().clone())?;
    for (i, cell) in p.cells().iter().enumerate() {
        let mut targets: BTreeMap<EventId, usize> = BTreeMap::new();
        for &x in cell {
            if sup.is_marked(x) {
                out.set_marked(i)?;
            }
            for (e, d) in sup.outgoing(x) {
                let j = p.cell_of(d);
                if *targets.entry(e).or_insert(j) != j {
                    return Err(Error::NondeterministicInduction { cell: i, event: e });
                }
            }
        }
        for (e, j) in targets {
            out.add_transition(i, e, j)?;
        }
    }
    Ok(out)
}

/// Interpret `g` over the plant alphabet: every plant event outside `g`'s
/// own alphabet is self-looped at every state. Events inside the alphabet
/// keep their meaning, so an alphabet event that labels no transition stays
/// disabled everywhere.
pub fn lift(plant: &Generator, g: &Generator) -> Result<Generator> {
    selfloop(g, &plant.alphabet().without(g.alphabet().events()))
}

/// Check `L(G) ∩ L(R) = L(SUP)` and `L_m(G) ∩ L_m(R) = L_m(SUP)`.
pub fn control_equivalent(plant: &Generator, sup: &Generator, reduced: &Generator) -> Result<bool> {
    let joint = meet(plant, &lift(plant, reduced)?)?;
    Ok(lang_equal(&joint, sup).is_equal())
}

/// Reduce `sup` by greedy control congruence and verify the result is
/// control equivalent to `sup` with respect to `plant`.
pub fn supreduce(plant: &Generator, sup: &Generator) -> Result<Generator> {
    let cd = control_data(plant, sup)?;
    let table = pair_table(sup.state_count(), |a, b| control_consistent(&cd, a, b));
    let consistent = |a: StateId, b: StateId| table[a * sup.state_count() + b];
    let p = greedy_partition(
        sup,
        StatePartition::identity(sup.state_count(), Relation::Global),
        &consistent,
    );
    let reduced = induce(sup, &p)?.with_name(format!("R{}", sup.name()));
    if !control_equivalent(plant, sup, &reduced)? {
        return Err(Error::Construction(
            "reduced supervisor is not control equivalent to the supervisor".into(),
        ));
    }
    Ok(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{canonicalize, event_set, Alphabet};

    fn gen(n: usize, marked: &[StateId], trans: &[(StateId, u32, StateId)]) -> Generator {
        let mut g = Generator::new(
            "g",
            n,
            0,
            Alphabet::with_default_controllability(event_set(trans.iter().map(|t| t.1))),
        )
        .unwrap();
        for &(s, e, d) in trans {
            g.add_transition(s, EventId(e), d).unwrap();
        }
        for &m in marked {
            g.set_marked(m).unwrap();
        }
        g
    }

    #[test]
    fn identity_partition_induces_same_generator() {
        let g = gen(3, &[0], &[(0, 1, 1), (1, 2, 2), (2, 3, 0)]);
        let p = StatePartition::identity(3, Relation::Global);
        assert_eq!(canonicalize(&induce(&g, &p).unwrap()), canonicalize(&g));
    }

    #[test]
    fn single_cell_with_selfloops() {
        let g = gen(2, &[0, 1], &[(0, 1, 1), (1, 1, 0)]);
        let p = StatePartition::from_labels(&[0, 0], Relation::Global);
        let r = induce(&g, &p).unwrap();
        assert_eq!(r.state_count(), 1);
        assert_eq!(r.successor(0, EventId(1)), Some(0));
    }

    #[test]
    fn nondeterministic_induction_detected() {
        let g = gen(3, &[0], &[(0, 1, 1), (1, 1, 2)]);
        let p = StatePartition::from_labels(&[0, 0, 1], Relation::Global);
        assert!(matches!(
            induce(&g, &p),
            Err(Error::NondeterministicInduction { .. })
        ));
    }

    #[test]
    fn merge_with_self_is_noop() {
        let g = gen(2, &[0], &[(0, 1, 1), (1, 2, 0)]);
        let p = StatePartition::identity(2, Relation::Global);
        assert_eq!(merge_closure(&p, &g, 1, 1, &|_, _| true).unwrap(), p);
    }

    #[test]
    fn merge_propagates_to_successors() {
        // 0 -1-> 2, 1 -1-> 3: merging 0,1 forces 2,3
        let g = gen(4, &[0], &[(0, 1, 2), (1, 1, 3), (2, 2, 0), (3, 2, 1)]);
        let p = StatePartition::identity(4, Relation::Global);
        let m = merge_closure(&p, &g, 0, 1, &|_, _| true).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.cell_of(2), m.cell_of(3));
        assert!(m.is_closed_under(&g));
        // forbid 2,3 together: whole merge fails
        let forbid = |a: StateId, b: StateId| !(a.min(b) == 2 && a.max(b) == 3);
        assert!(merge_closure(&p, &g, 0, 1, &forbid).is_none());
    }

    #[test]
    fn reduction_of_pairwise_inconsistent_sup() {
        // plant allows 1 and 3 everywhere; sup alternates them
        let plant = gen(1, &[0], &[(0, 1, 0), (0, 3, 0)]);
        let sup = gen(2, &[0, 1], &[(0, 1, 1), (1, 3, 0)]);
        let r = supreduce(&plant, &sup).unwrap();
        assert_eq!(r.state_count(), 2);
        assert!(control_equivalent(&plant, &sup, &r).unwrap());
    }
}
