//! Supremal controllable sublanguage synthesis and per-state control data.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use crate::automata::{
    closed_equal, meet, ops_product, project, selfloop, Composition, Equivalence, EventId,
    Generator, StateId,
};
use crate::error::{Error, Result};

/// Compute the recognizer of `supC(L_m(plant) ∩ L_m(spec))`.
///
/// Starts from the trimmed meet and repeatedly deletes states at which an
/// uncontrollable event defined in the paired plant state is missing, until
/// nothing changes. The surviving states keep the breadth-first order of the
/// meet.
pub fn supcon(plant: &Generator, spec: &Generator) -> Result<Generator> {
    for &e in spec.alphabet().events() {
        if !plant.alphabet().contains(e) {
            return Err(Error::AlphabetMismatch(e));
        }
    }
    let name = format!("SUP({},{})", plant.name(), spec.name());
    let product = ops_product(&[plant, spec], Composition::Meet, name)?;
    let candidate = &product.generator;
    let plant_of: Vec<StateId> = product.tuples.iter().map(|t| t[0]).collect();
    let uncontrollable: Vec<EventId> = plant.alphabet().uncontrollable().collect();

    let mut keep = vec![true; candidate.state_count()];
    loop {
        let trimmed = trim_flags(candidate, &keep);
        let mut changed = trimmed != keep;
        keep = trimmed;
        for x in 0..candidate.state_count() {
            if !keep[x] {
                continue;
            }
            let q = plant_of[x];
            let bad = uncontrollable.iter().any(|&e| {
                plant.successor(q, e).is_some()
                    && !candidate.successor(x, e).is_some_and(|d| keep[d])
            });
            if bad {
                keep[x] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(candidate.restrict(&keep))
}

/// Reachable-and-coreachable flags of the subgraph induced by `keep`.
fn trim_flags(g: &Generator, keep: &[bool]) -> Vec<bool> {
    let Some(init) = g.initial() else {
        return Vec::new();
    };
    let sub = g.restrict(keep);
    if sub.is_empty() {
        return vec![false; g.state_count()];
    }
    let reach = sub.reachable();
    let coreach = sub.coreachable();
    let mut out = vec![false; g.state_count()];
    let mut k = 0;
    for (x, &kept) in keep.iter().enumerate() {
        if kept {
            out[x] = reach[k] && coreach[k];
            k += 1;
        }
    }
    debug_assert!(keep[init]);
    out
}

/// Enablement, disablement and marking information for each supervisor
/// state, computed against the plant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlData {
    /// `E(x)`: events defined at `x` in the supervisor.
    pub enabled: Vec<BTreeSet<EventId>>,
    /// `D(x)`: events undefined at `x` but defined at some paired plant state.
    pub disabled: Vec<BTreeSet<EventId>>,
    /// `M(x)`: `x` is marked in the supervisor.
    pub marked: Vec<bool>,
    /// `T(x)`: some paired plant state is marked.
    pub plant_marked: Vec<bool>,
    /// Plant states reached in tandem with each supervisor state.
    pub plant_pairs: Vec<BTreeSet<StateId>>,
}

impl ControlData {
    pub fn state_count(&self) -> usize {
        self.enabled.len()
    }
}

/// Compute control data by synchronized forward reachability of
/// `(supervisor state, plant state)` pairs.
pub fn control_data(plant: &Generator, sup: &Generator) -> Result<ControlData> {
    let n = sup.state_count();
    let mut plant_pairs = vec![BTreeSet::new(); n];
    if let (Some(x0), Some(q0)) = (sup.initial(), plant.initial()) {
        let mut queue = VecDeque::from([(x0, q0)]);
        plant_pairs[x0].insert(q0);
        while let Some((x, q)) = queue.pop_front() {
            for (e, dx) in sup.outgoing(x) {
                let dq = plant.successor(q, e).ok_or(Error::ContainmentViolation {
                    sup_state: x,
                    plant_state: q,
                    event: e,
                })?;
                if plant_pairs[dx].insert(dq) {
                    queue.push_back((dx, dq));
                }
            }
        }
    }
    let enabled: Vec<BTreeSet<EventId>> = (0..n).map(|x| sup.enabled(x)).collect();
    let disabled = (0..n)
        .map(|x| {
            plant_pairs[x]
                .iter()
                .flat_map(|&q| plant.outgoing(q).map(|(e, _)| e))
                .filter(|e| !enabled[x].contains(e))
                .collect()
        })
        .collect();
    let plant_marked = plant_pairs
        .iter()
        .map(|qs| qs.iter().any(|&q| plant.is_marked(q)))
        .collect();
    Ok(ControlData {
        enabled,
        disabled,
        marked: (0..n).map(|x| sup.is_marked(x)).collect(),
        plant_marked,
        plant_pairs,
    })
}

/// Text table of the states where disabling occurs.
pub fn condat_table(name: &str, cd: &ControlData) -> String {
    let mut out = format!("# condat {name}\n");
    for (x, d) in cd.disabled.iter().enumerate() {
        if d.is_empty() {
            continue;
        }
        let events: Vec<String> = d.iter().map(ToString::to_string).collect();
        writeln!(out, "{x}\t{}", events.join(",")).unwrap();
    }
    out
}

/// True iff every uncontrollable event defined at a plant state paired with a
/// supervisor state is also defined in the supervisor there.
pub fn is_controllable(plant: &Generator, sup: &Generator) -> Result<bool> {
    let cd = control_data(plant, sup)?;
    Ok(cd
        .disabled
        .iter()
        .all(|d| d.iter().all(|&e| plant.alphabet().is_controllable(e))))
}

/// Normality of `L(k)` with respect to `L(plant)` and the projection onto
/// `observable`: `P⁻¹P(L(k)) ∩ L(plant) = L(k)`.
pub fn check_normal(
    plant: &Generator,
    k: &Generator,
    observable: &BTreeSet<EventId>,
) -> Result<Equivalence> {
    let seen = project(k, observable);
    let hidden: BTreeSet<EventId> = plant
        .alphabet()
        .events()
        .iter()
        .copied()
        .filter(|e| !observable.contains(e))
        .collect();
    let inverse = selfloop(&seen, &plant.alphabet().restrict(&hidden))?;
    Ok(closed_equal(&meet(plant, &inverse)?, k))
}
