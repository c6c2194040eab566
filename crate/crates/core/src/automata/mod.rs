//! Deterministic finite-state generators and the language-level operations
//! built on them.
//!
//! States are dense indices `0..n`. A generator with `n == 0` is the empty
//! generator: its closed and marked languages are both empty. Transition
//! functions are partial; an undefined `(state, event)` pair means the event
//! cannot occur there.

mod equivalence;
mod ops;

pub use equivalence::{closed_equal, isomorphism, lang_equal, marked_equal, Equivalence};
pub use ops::{
    canonicalize, is_nonblocking, meet, meet_all, project, renumber, selfloop, sync, trim,
};
pub(crate) use ops::{product as ops_product, Composition};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Dense state index.
pub type StateId = usize;

/// An event label. Ids are arbitrary non-negative integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

impl EventId {
    /// The default convention: odd ids are controllable.
    pub fn default_controllable(self) -> bool {
        self.0 % 2 == 1
    }
}

impl From<u32> for EventId {
    fn from(id: u32) -> Self {
        EventId(id)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Collect plain integers into an event set.
pub fn event_set<I: IntoIterator<Item = u32>>(ids: I) -> BTreeSet<EventId> {
    ids.into_iter().map(EventId).collect()
}

/// An event set partitioned into controllable and uncontrollable events.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    events: BTreeSet<EventId>,
    controllable: BTreeSet<EventId>,
}

impl Alphabet {
    pub fn new(events: BTreeSet<EventId>, controllable: BTreeSet<EventId>) -> Result<Self> {
        if let Some(&e) = controllable.iter().find(|e| !events.contains(e)) {
            return Err(Error::UnknownEvent(e));
        }
        Ok(Alphabet {
            events,
            controllable,
        })
    }

    /// Alphabet where odd event ids are controllable.
    pub fn with_default_controllability<I: IntoIterator<Item = EventId>>(events: I) -> Self {
        let events: BTreeSet<EventId> = events.into_iter().collect();
        let controllable = events
            .iter()
            .copied()
            .filter(|e| e.default_controllable())
            .collect();
        Alphabet {
            events,
            controllable,
        }
    }

    pub fn events(&self) -> &BTreeSet<EventId> {
        &self.events
    }

    pub fn controllable(&self) -> &BTreeSet<EventId> {
        &self.controllable
    }

    pub fn uncontrollable(&self) -> impl Iterator<Item = EventId> + '_ {
        self.events.difference(&self.controllable).copied()
    }

    pub fn contains(&self, event: EventId) -> bool {
        self.events.contains(&event)
    }

    pub fn is_controllable(&self, event: EventId) -> bool {
        self.controllable.contains(&event)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Add an event, failing if it is already present with the other
    /// controllability status.
    pub fn insert(&mut self, event: EventId, controllable: bool) -> Result<()> {
        if self.events.contains(&event) {
            if self.controllable.contains(&event) != controllable {
                return Err(Error::ConflictingControllability(event));
            }
            return Ok(());
        }
        self.events.insert(event);
        if controllable {
            self.controllable.insert(event);
        }
        Ok(())
    }

    pub fn union(&self, other: &Alphabet) -> Result<Alphabet> {
        let mut out = self.clone();
        for &e in &other.events {
            out.insert(e, other.is_controllable(e))?;
        }
        Ok(out)
    }

    /// The sub-alphabet on `keep`, preserving controllability.
    pub fn restrict(&self, keep: &BTreeSet<EventId>) -> Alphabet {
        Alphabet {
            events: self.events.intersection(keep).copied().collect(),
            controllable: self.controllable.intersection(keep).copied().collect(),
        }
    }

    /// This alphabet with `drop` removed.
    pub fn without(&self, drop: &BTreeSet<EventId>) -> Alphabet {
        Alphabet {
            events: self.events.difference(drop).copied().collect(),
            controllable: self.controllable.difference(drop).copied().collect(),
        }
    }
}

/// A finite event sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StringTrace(pub Vec<EventId>);

impl StringTrace {
    pub fn empty() -> Self {
        StringTrace(Vec::new())
    }

    pub fn events(&self) -> &[EventId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<EventId> {
        self.0.last().copied()
    }
}

impl From<Vec<u32>> for StringTrace {
    fn from(ids: Vec<u32>) -> Self {
        StringTrace(ids.into_iter().map(EventId).collect())
    }
}

impl fmt::Display for StringTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// A deterministic finite-state generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    name: String,
    initial: StateId,
    marked: BTreeSet<StateId>,
    alphabet: Alphabet,
    transitions: Vec<BTreeMap<EventId, StateId>>,
}

impl Generator {
    /// A generator with `state_count` states and no transitions. With
    /// `state_count == 0` the initial state is ignored.
    pub fn new(
        name: impl Into<String>,
        state_count: usize,
        initial: StateId,
        alphabet: Alphabet,
    ) -> Result<Self> {
        if state_count > 0 && initial >= state_count {
            return Err(Error::StateOutOfRange {
                state: initial,
                count: state_count,
            });
        }
        Ok(Generator {
            name: name.into(),
            initial: if state_count == 0 { 0 } else { initial },
            marked: BTreeSet::new(),
            alphabet,
            transitions: vec![BTreeMap::new(); state_count],
        })
    }

    /// The empty generator (no states, empty languages).
    pub fn empty(name: impl Into<String>, alphabet: Alphabet) -> Self {
        Generator {
            name: name.into(),
            initial: 0,
            marked: BTreeSet::new(),
            alphabet,
            transitions: Vec::new(),
        }
    }

    fn check_state(&self, state: StateId) -> Result<()> {
        if state >= self.state_count() {
            return Err(Error::StateOutOfRange {
                state,
                count: self.state_count(),
            });
        }
        Ok(())
    }

    pub fn add_transition(&mut self, src: StateId, event: EventId, dst: StateId) -> Result<()> {
        self.check_state(src)?;
        self.check_state(dst)?;
        if !self.alphabet.contains(event) {
            return Err(Error::UnknownEvent(event));
        }
        if self.transitions[src].contains_key(&event) {
            return Err(Error::Nondeterministic { state: src, event });
        }
        self.transitions[src].insert(event, dst);
        Ok(())
    }

    pub fn set_marked(&mut self, state: StateId) -> Result<()> {
        self.check_state(state)?;
        self.marked.insert(state);
        Ok(())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// `None` for the empty generator.
    pub fn initial(&self) -> Option<StateId> {
        (!self.is_empty()).then_some(self.initial)
    }

    pub fn marked(&self) -> &BTreeSet<StateId> {
        &self.marked
    }

    pub fn is_marked(&self, state: StateId) -> bool {
        self.marked.contains(&state)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn successor(&self, state: StateId, event: EventId) -> Option<StateId> {
        self.transitions.get(state)?.get(&event).copied()
    }

    /// Outgoing transitions of `state` in ascending event order.
    pub fn outgoing(&self, state: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
        self.transitions[state].iter().map(|(&e, &d)| (e, d))
    }

    pub fn enabled(&self, state: StateId) -> BTreeSet<EventId> {
        self.transitions[state].keys().copied().collect()
    }

    /// All transitions `(src, event, dst)` in ascending `(src, event)` order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.transitions
            .iter()
            .enumerate()
            .flat_map(|(s, m)| m.iter().map(move |(&e, &d)| (s, e, d)))
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(BTreeMap::len).sum()
    }

    /// Events labelling at least one transition.
    pub fn used_events(&self) -> BTreeSet<EventId> {
        self.transitions
            .iter()
            .flat_map(|m| m.keys().copied())
            .collect()
    }

    /// State reached from the initial state by `trace`, if defined.
    pub fn run(&self, trace: &[EventId]) -> Option<StateId> {
        let mut s = self.initial()?;
        for &e in trace {
            s = self.successor(s, e)?;
        }
        Some(s)
    }

    pub fn accepts_closed(&self, trace: &[EventId]) -> bool {
        self.run(trace).is_some()
    }

    pub fn accepts_marked(&self, trace: &[EventId]) -> bool {
        self.run(trace).is_some_and(|s| self.is_marked(s))
    }

    /// Reachability flags from the initial state.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let Some(init) = self.initial() else {
            return seen;
        };
        let mut stack = vec![init];
        seen[init] = true;
        while let Some(s) = stack.pop() {
            for (_, d) in self.outgoing(s) {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        seen
    }

    /// Flags for states from which some marked state can be reached.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.state_count();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (s, _, d) in self.transitions() {
            preds[d].push(s);
        }
        let mut seen = vec![false; n];
        let mut stack: Vec<StateId> = self.marked.iter().copied().collect();
        for &m in &stack {
            seen[m] = true;
        }
        while let Some(s) = stack.pop() {
            for &p in &preds[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Keep the states flagged in `keep`, renumbered in their original order.
    /// Returns the empty generator if the initial state is dropped.
    pub fn restrict(&self, keep: &[bool]) -> Generator {
        let Some(init) = self.initial() else {
            return self.clone();
        };
        if !keep[init] {
            return Generator::empty(self.name.clone(), self.alphabet.clone());
        }
        let mut index = vec![usize::MAX; self.state_count()];
        let mut next = 0;
        for (s, &k) in keep.iter().enumerate() {
            if k {
                index[s] = next;
                next += 1;
            }
        }
        let mut transitions = vec![BTreeMap::new(); next];
        for (s, e, d) in self.transitions() {
            if keep[s] && keep[d] {
                transitions[index[s]].insert(e, index[d]);
            }
        }
        Generator {
            name: self.name.clone(),
            initial: index[init],
            marked: self
                .marked
                .iter()
                .filter(|&&m| keep[m])
                .map(|&m| index[m])
                .collect(),
            alphabet: self.alphabet.clone(),
            transitions,
        }
    }

    pub(crate) fn from_parts(
        name: String,
        initial: StateId,
        marked: BTreeSet<StateId>,
        alphabet: Alphabet,
        transitions: Vec<BTreeMap<EventId, StateId>>,
    ) -> Generator {
        Generator {
            name,
            initial,
            marked,
            alphabet,
            transitions,
        }
    }

    pub(crate) fn set_alphabet(&mut self, alphabet: Alphabet) {
        self.alphabet = alphabet;
    }

    pub(crate) fn transitions_mut(&mut self) -> &mut Vec<BTreeMap<EventId, StateId>> {
        &mut self.transitions
    }
}
