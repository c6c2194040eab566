//! Supervisor localization with event reduction.
//!
//! Each agent gets a local controller obtained as a quotient of the
//! monolithic supervisor under control consistency restricted to the
//! agent's own controllable events. The cover is seeded by merging a pair
//! of exclusively control consistent (ECC) states: a pair that agrees on
//! the agent's events but clashes on some other agent's event `σ`, and
//! whose tandem plant states never coincide after `σ`. Merging such a pair
//! forces `σ` into a self-loop, and events self-looped at every state of a
//! controller can be dropped from its alphabet.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt::Write;

use crate::automata::{
    closed_equal, lang_equal, marked_equal, meet_all, Alphabet, Equivalence, EventId, Generator,
    StateId, StringTrace,
};
use crate::error::{Error, Result};
use crate::reduction::{
    control_consistent, greedy_partition, induce, lift, marking_consistent, merge_closure,
    pair_table, Relation, StatePartition,
};
use crate::synthesis::{control_data, ControlData};

/// A component agent and the events it owns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSpec {
    pub name: String,
    pub events: BTreeSet<EventId>,
    /// The agent's events that are controllable in the plant.
    pub controllable: BTreeSet<EventId>,
}

impl AgentSpec {
    pub fn new(name: impl Into<String>, events: BTreeSet<EventId>, plant: &Alphabet) -> Self {
        let controllable = events
            .iter()
            .copied()
            .filter(|&e| plant.is_controllable(e))
            .collect();
        AgentSpec {
            name: name.into(),
            events,
            controllable,
        }
    }
}

/// Agents must own pairwise disjoint event sets covering the plant alphabet.
pub fn check_agents(plant: &Alphabet, agents: &[AgentSpec]) -> Result<()> {
    let mut owner: BTreeMap<EventId, &str> = BTreeMap::new();
    for a in agents {
        for &e in &a.events {
            if !plant.contains(e) {
                return Err(Error::AgentConfig(format!(
                    "agent {} owns event {e}, which is not in the plant alphabet",
                    a.name
                )));
            }
            if let Some(other) = owner.insert(e, &a.name) {
                return Err(Error::AgentConfig(format!(
                    "event {e} is owned by both {other} and {}",
                    a.name
                )));
            }
        }
    }
    if let Some(e) = plant.events().iter().find(|e| !owner.contains_key(e)) {
        return Err(Error::AgentConfig(format!(
            "event {e} is owned by no agent"
        )));
    }
    Ok(())
}

/// `D^k(x) = D(x) ∩ Σ_c^k`.
pub fn disabled_k(cd: &ControlData, x: StateId, agent: &AgentSpec) -> BTreeSet<EventId> {
    cd.disabled[x]
        .intersection(&agent.controllable)
        .copied()
        .collect()
}

/// Control consistency restricted to the agent's controllable events.
pub fn control_consistent_k(cd: &ControlData, x: StateId, x2: StateId, agent: &AgentSpec) -> bool {
    let clash = |a: StateId, b: StateId| {
        cd.enabled[a]
            .iter()
            .any(|e| agent.controllable.contains(e) && cd.disabled[b].contains(e))
    };
    !clash(x, x2) && !clash(x2, x) && marking_consistent(cd, x, x2)
}

/// Events on which `x` and `x2` violate global control consistency.
pub fn violating_events(cd: &ControlData, x: StateId, x2: StateId) -> BTreeSet<EventId> {
    let a = cd.enabled[x].intersection(&cd.disabled[x2]);
    let b = cd.enabled[x2].intersection(&cd.disabled[x]);
    a.chain(b).copied().collect()
}

/// Exclusive control consistency of `(x, x2)` for `agent`: consistent for
/// the agent but not globally, and for every violating event `σ` and every
/// pair of tandem plant states where `σ` is defined at both, the plant
/// successors differ.
pub fn is_ecc(
    plant: &Generator,
    cd: &ControlData,
    x: StateId,
    x2: StateId,
    agent: &AgentSpec,
) -> bool {
    if control_consistent(cd, x, x2) || !control_consistent_k(cd, x, x2, agent) {
        return false;
    }
    violating_events(cd, x, x2).into_iter().all(|e| {
        cd.plant_pairs[x].iter().all(|&q| {
            let Some(dq) = plant.successor(q, e) else {
                return true;
            };
            cd.plant_pairs[x2]
                .iter()
                .all(|&q2| plant.successor(q2, e) != Some(dq))
        })
    })
}

/// Events self-looped at every state where they occur (and occurring
/// somewhere), and `loc` with those events removed from its transitions
/// and alphabet.
pub fn strip_selflooped(loc: &Generator) -> (BTreeSet<EventId>, Generator) {
    strip_selflooped_with_authority(loc, &BTreeSet::new())
}

/// As [`strip_selflooped`], but an event in `authority` (one the generator
/// may disable) is only removed when it is self-looped at every state:
/// where such an event is undefined it is disabled, and erasing it would
/// lift the disablement.
pub fn strip_selflooped_with_authority(
    loc: &Generator,
    authority: &BTreeSet<EventId>,
) -> (BTreeSet<EventId>, Generator) {
    let mut events = loc.used_events();
    for (s, e, d) in loc.transitions() {
        if s != d {
            events.remove(&e);
        }
    }
    events.retain(|e| {
        !authority.contains(e) || (0..loc.state_count()).all(|s| loc.successor(s, *e).is_some())
    });
    let mut stripped = Generator::new(
        loc.name(),
        loc.state_count(),
        loc.initial().unwrap_or(0),
        loc.alphabet().without(&events),
    )
    .expect("same shape as a valid generator");
    for (s, e, d) in loc.transitions() {
        if !events.contains(&e) {
            stripped
                .add_transition(s, e, d)
                .expect("subset of a deterministic generator");
        }
    }
    for &m in loc.marked() {
        stripped.set_marked(m).expect("valid state");
    }
    (events, stripped)
}

/// Merge every state with its `event` successor, making `event` a self-loop
/// of the quotient wherever it is defined. All-or-nothing.
fn erase_event(
    p: &StatePartition,
    sup: &Generator,
    event: EventId,
    consistent: &dyn Fn(StateId, StateId) -> bool,
) -> Option<StatePartition> {
    let mut p = p.clone();
    for x in 0..sup.state_count() {
        if let Some(d) = sup.successor(x, event) {
            if p.cell_of(x) != p.cell_of(d) {
                p = merge_closure(&p, sup, x, d, consistent)?;
            }
        }
    }
    Some(p)
}

/// Seed partition for an ECC pair: the pair merged, and each event on which
/// the pair violates global consistency erased.
fn ecc_seed(
    sup: &Generator,
    cd: &ControlData,
    x: StateId,
    x2: StateId,
    relation: Relation,
    consistent: &dyn Fn(StateId, StateId) -> bool,
) -> Option<StatePartition> {
    let identity = StatePartition::identity(sup.state_count(), relation);
    let mut p = merge_closure(&identity, sup, x, x2, consistent)?;
    for e in violating_events(cd, x, x2) {
        p = erase_event(&p, sup, e, consistent)?;
    }
    p.set_ecc_witness((x, x2));
    Some(p)
}

/// Self-loop every event outside `authority` wherever it is undefined, so
/// that the controller only ever blocks events it owns. In closed loop with
/// the other controllers this changes nothing: such an event is undefined
/// at a reached cell only where the supervisor disables it, and then the
/// agent owning it still does.
pub fn complete_outside_authority(g: &Generator, authority: &BTreeSet<EventId>) -> Generator {
    let mut out = g.clone();
    let free: Vec<EventId> = g
        .alphabet()
        .events()
        .iter()
        .copied()
        .filter(|e| !authority.contains(e))
        .collect();
    for s in 0..g.state_count() {
        for &e in &free {
            if g.successor(s, e).is_none() {
                out.add_transition(s, e, s).expect("event undefined at s");
            }
        }
    }
    out
}

/// A local controller for one agent.
#[derive(Debug, Clone)]
pub struct LocalController {
    pub agent: AgentSpec,
    /// The induced controller over the full alphabet, completed with
    /// self-loops on events the agent does not own.
    pub generator: Generator,
    pub selflooped_everywhere: BTreeSet<EventId>,
    /// `generator` without its everywhere-self-looped events.
    pub stripped: Generator,
    pub partition: StatePartition,
    /// Whether the cover was seeded with an ECC pair.
    pub ecc_used: bool,
    pub ecc_witness: Option<(StateId, StateId)>,
}

impl LocalController {
    /// Number of distinct events labelling transitions of the stripped form.
    pub fn event_count(&self) -> usize {
        self.stripped.used_events().len()
    }
}

struct Candidate {
    partition: StatePartition,
    generator: Generator,
    selflooped: BTreeSet<EventId>,
    stripped: Generator,
}

impl Candidate {
    fn build(sup: &Generator, partition: StatePartition, agent: &AgentSpec) -> Result<Self> {
        let induced = induce(sup, &partition)?.with_name(agent.name.clone());
        let generator = complete_outside_authority(&induced, &agent.controllable);
        let (selflooped, stripped) =
            strip_selflooped_with_authority(&generator, &agent.controllable);
        Ok(Candidate {
            partition,
            generator,
            selflooped,
            stripped,
        })
    }

    fn score(&self) -> (usize, usize) {
        (
            self.generator.state_count(),
            self.stripped.used_events().len(),
        )
    }
}

/// Build the local controller for `agent`.
///
/// Every ECC pair whose seed partition closes is grown greedily into a full
/// congruence; the seed giving the fewest controller states, then the
/// fewest remaining events, wins, with ties going to the lexicographically
/// smallest pair. Without a viable ECC pair the plain greedy congruence is
/// used and `ecc_used` is false.
pub fn localize_agent(
    plant: &Generator,
    sup: &Generator,
    cd: &ControlData,
    agent: &AgentSpec,
) -> Result<LocalController> {
    let n = sup.state_count();
    let relation = Relation::Agent(agent.name.clone());
    let table = pair_table(n, |a, b| control_consistent_k(cd, a, b, agent));
    let consistent = |a: StateId, b: StateId| table[a * n + b];

    let mut best: Option<Candidate> = None;
    let mut tried: HashSet<Vec<usize>> = HashSet::new();
    'search: for x in 0..n {
        for x2 in x + 1..n {
            if !is_ecc(plant, cd, x, x2, agent) {
                continue;
            }
            let Some(seed) = ecc_seed(sup, cd, x, x2, relation.clone(), &consistent) else {
                continue;
            };
            let labels: Vec<usize> = (0..n).map(|y| seed.cell_of(y)).collect();
            if !tried.insert(labels) {
                continue;
            }
            let candidate = Candidate::build(sup, greedy_partition(sup, seed, &consistent), agent)?;
            if best.as_ref().is_none_or(|b| candidate.score() < b.score()) {
                best = Some(candidate);
                if best.as_ref().unwrap().generator.state_count() <= 1 {
                    break 'search;
                }
            }
        }
    }
    let ecc_used = best.is_some();
    let chosen = match best {
        Some(c) => c,
        None => Candidate::build(
            sup,
            greedy_partition(sup, StatePartition::identity(n, relation), &consistent),
            agent,
        )?,
    };
    Ok(LocalController {
        agent: agent.clone(),
        ecc_witness: chosen.partition.ecc_witness(),
        generator: chosen.generator,
        selflooped_everywhere: chosen.selflooped,
        stripped: chosen.stripped,
        partition: chosen.partition,
        ecc_used,
    })
}

/// One local controller per agent.
#[derive(Debug, Clone)]
pub struct LocalControllerSet {
    pub controllers: Vec<LocalController>,
}

impl LocalControllerSet {
    pub fn get(&self, agent: &str) -> Option<&LocalController> {
        self.controllers.iter().find(|c| c.agent.name == agent)
    }
}

pub fn localize_all(
    plant: &Generator,
    sup: &Generator,
    agents: &[AgentSpec],
) -> Result<LocalControllerSet> {
    check_agents(plant.alphabet(), agents)?;
    let cd = control_data(plant, sup)?;
    let controllers = agents
        .iter()
        .map(|a| localize_agent(plant, sup, &cd, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalControllerSet { controllers })
}

/// Verdicts of the joint control-equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// `L(G) ∩ L(LOC) = L(SUP)`.
    pub closed_ok: bool,
    /// `L_m(G) ∩ L_m(LOC) = L_m(SUP)`.
    pub marked_ok: bool,
    pub counterexample: Option<StringTrace>,
    /// Events used by each stripped controller, by agent name.
    pub per_controller_event_counts: BTreeMap<String, usize>,
    pub rsup_event_count: Option<usize>,
    pub event_reduction_ok: Option<bool>,
}

impl EquivalenceReport {
    pub fn equivalent(&self) -> bool {
        self.closed_ok && self.marked_ok
    }
}

/// Events labelling transitions of `rsup` after its own everywhere-self-looped
/// events are removed. `rsup` may disable any controllable event.
pub fn rsup_event_count(rsup: &Generator) -> usize {
    strip_selflooped_with_authority(rsup, rsup.alphabet().controllable())
        .1
        .used_events()
        .len()
}

/// Check that the plant under the joint action of `controllers` behaves
/// exactly as under `sup`. Each controller is interpreted over the plant
/// alphabet by self-looping the plant events outside its own alphabet.
pub fn check_joint_equivalence(
    plant: &Generator,
    sup: &Generator,
    controllers: &[&Generator],
) -> Result<(Equivalence, Equivalence)> {
    let lifted = controllers
        .iter()
        .map(|c| lift(plant, c))
        .collect::<Result<Vec<_>>>()?;
    let mut all: Vec<&Generator> = vec![plant];
    all.extend(lifted.iter());
    let joint = meet_all(&all)?;
    Ok((closed_equal(&joint, sup), marked_equal(&joint, sup)))
}

/// Verify `LOC` against `SUP` using the stripped controllers, and compare
/// event counts against `rsup` when given.
pub fn verify_control_equivalence(
    plant: &Generator,
    sup: &Generator,
    locs: &LocalControllerSet,
    rsup: Option<&Generator>,
) -> Result<EquivalenceReport> {
    let stripped: Vec<&Generator> = locs.controllers.iter().map(|c| &c.stripped).collect();
    let (closed, marked) = check_joint_equivalence(plant, sup, &stripped)?;
    let counterexample = closed.counterexample().or(marked.counterexample()).cloned();
    let per_controller_event_counts: BTreeMap<String, usize> = locs
        .controllers
        .iter()
        .map(|c| (c.agent.name.clone(), c.event_count()))
        .collect();
    let rsup_count = rsup.map(rsup_event_count);
    let event_reduction_ok =
        rsup_count.map(|r| per_controller_event_counts.values().all(|&k| k < r));
    Ok(EquivalenceReport {
        closed_ok: closed.is_equal(),
        marked_ok: marked.is_equal(),
        counterexample,
        per_controller_event_counts,
        rsup_event_count: rsup_count,
        event_reduction_ok,
    })
}

/// Local control authority: in the joint run of the plant and `loc`, every
/// event the plant can execute but `loc` blocks is controllable by `agent`.
/// Returns the first violating `(trace, event)` if any.
pub fn authority_violation(
    plant: &Generator,
    loc: &Generator,
    agent: &AgentSpec,
) -> Option<(StringTrace, EventId)> {
    let lifted = lift(plant, loc).ok()?;
    let (q0, z0) = (plant.initial()?, lifted.initial()?);
    let mut seen = HashSet::from([(q0, z0)]);
    let mut queue = VecDeque::from([((q0, z0), Vec::new())]);
    while let Some(((q, z), path)) = queue.pop_front() {
        for (e, dq) in plant.outgoing(q) {
            let mut next_path = path.clone();
            next_path.push(e);
            match lifted.successor(z, e) {
                Some(dz) => {
                    if seen.insert((dq, dz)) {
                        queue.push_back(((dq, dz), next_path));
                    }
                }
                None if !agent.controllable.contains(&e) => {
                    return Some((StringTrace(path), e));
                }
                None => {}
            }
        }
    }
    None
}

/// Per-agent table of state and event counts against the reduced
/// supervisor.
pub fn event_reduction_report(locs: &LocalControllerSet, rsup: &Generator) -> String {
    let rsup_states = rsup.state_count();
    let rsup_events = rsup_event_count(rsup);
    let mut out = String::from(
        "agent\tloc_states\trsup_states\tloc_events\trsup_events\tselflooped\tecc\tlocalizable\tevent_reduced\n",
    );
    let mut all_localizable = true;
    let mut all_reduced = true;
    for c in &locs.controllers {
        let events = c.event_count();
        let localizable = c.generator.state_count() < rsup_states;
        let reduced = events < rsup_events;
        all_localizable &= localizable;
        all_reduced &= reduced;
        let looped: Vec<String> = c
            .selflooped_everywhere
            .iter()
            .map(ToString::to_string)
            .collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.agent.name,
            c.generator.state_count(),
            rsup_states,
            events,
            rsup_events,
            if looped.is_empty() {
                "-".to_string()
            } else {
                looped.join(",")
            },
            match c.ecc_witness {
                Some((a, b)) => format!("({a},{b})"),
                None => "none".to_string(),
            },
            yes_no(localizable),
            yes_no(reduced),
        )
        .unwrap();
    }
    writeln!(
        out,
        "# localizable by state count: {}",
        yes_no(all_localizable)
    )
    .unwrap();
    writeln!(
        out,
        "# event reduction for every agent: {}",
        yes_no(all_reduced)
    )
    .unwrap();
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Single-controller convenience: `sup` itself acting as the only
/// controller is always control equivalent to `sup`.
pub fn self_equivalent(plant: &Generator, sup: &Generator) -> Result<bool> {
    let lifted = lift(plant, sup)?;
    let joint = meet_all(&[plant, &lifted])?;
    Ok(lang_equal(&joint, sup).is_equal())
}
