use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{Alphabet, EventId, Generator, StateId};
use crate::error::{Error, Result};

/// How events outside a component's alphabet are treated by [`product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Composition {
    /// Private events interleave (synchronous product).
    Sync,
    /// Every event must be defined in every component (meet).
    Meet,
}

/// A reachable product together with the component state tuple of each
/// product state.
pub(crate) struct Product {
    pub generator: Generator,
    pub tuples: Vec<Vec<StateId>>,
}

pub(crate) fn product(gens: &[&Generator], mode: Composition, name: String) -> Result<Product> {
    let mut alphabet = Alphabet::default();
    for g in gens {
        alphabet = alphabet.union(g.alphabet())?;
    }
    if gens.is_empty() || gens.iter().any(|g| g.is_empty()) {
        return Ok(Product {
            generator: Generator::empty(name, alphabet),
            tuples: Vec::new(),
        });
    }
    let events: Vec<EventId> = alphabet.events().iter().copied().collect();
    let init: Vec<StateId> = gens.iter().map(|g| g.initial).collect();
    let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut tuples = vec![init.clone()];
    index.insert(init, 0);
    let mut transitions: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
    let mut next = 0;
    while next < tuples.len() {
        let current = tuples[next].clone();
        'events: for &e in &events {
            let mut target = Vec::with_capacity(gens.len());
            for (g, &s) in gens.iter().zip(&current) {
                match g.successor(s, e) {
                    Some(d) => target.push(d),
                    None if mode == Composition::Sync && !g.alphabet().contains(e) => {
                        target.push(s)
                    }
                    None => continue 'events,
                }
            }
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = tuples.len();
                    index.insert(target.clone(), id);
                    tuples.push(target);
                    transitions.push(BTreeMap::new());
                    id
                }
            };
            transitions[next].insert(e, id);
        }
        next += 1;
    }
    let marked = tuples
        .iter()
        .enumerate()
        .filter(|(_, t)| gens.iter().zip(t.iter()).all(|(g, &s)| g.is_marked(s)))
        .map(|(i, _)| i)
        .collect();
    Ok(Product {
        generator: Generator::from_parts(name, 0, marked, alphabet, transitions),
        tuples,
    })
}

fn joined_name(gens: &[&Generator], sep: &str) -> String {
    gens.iter().map(|g| g.name()).collect::<Vec<_>>().join(sep)
}

/// Synchronous product. Shared events fire only when every generator
/// containing them can fire; private events interleave. Only reachable
/// product states are kept, numbered breadth-first.
pub fn sync(gens: &[&Generator]) -> Result<Generator> {
    Ok(product(gens, Composition::Sync, joined_name(gens, "||"))?.generator)
}

/// Product in which an event fires only if both generators define it.
pub fn meet(g1: &Generator, g2: &Generator) -> Result<Generator> {
    meet_all(&[g1, g2])
}

/// N-ary [`meet`].
pub fn meet_all(gens: &[&Generator]) -> Result<Generator> {
    Ok(product(gens, Composition::Meet, joined_name(gens, "&"))?.generator)
}

/// Restrict to states that are both reachable and coreachable.
pub fn trim(g: &Generator) -> Generator {
    let reach = g.reachable();
    let coreach = g.coreachable();
    let keep: Vec<bool> = reach.iter().zip(&coreach).map(|(&r, &c)| r && c).collect();
    g.restrict(&keep)
}

pub fn is_nonblocking(g: &Generator) -> bool {
    let coreach = g.coreachable();
    g.reachable().iter().zip(&coreach).all(|(&r, &c)| !r || c)
}

/// Add every event of `events` as a self-loop at every state. Events already
/// present only as self-loops are accepted; any other existing transition on
/// one of them is a collision.
pub fn selfloop(g: &Generator, events: &Alphabet) -> Result<Generator> {
    for (s, e, d) in g.transitions() {
        if events.contains(e) && s != d {
            return Err(Error::SelfloopCollision {
                state: s,
                event: e,
                target: d,
            });
        }
    }
    let alphabet = g.alphabet().union(events)?;
    let mut out = g.clone();
    out.set_alphabet(alphabet);
    for (s, map) in out.transitions_mut().iter_mut().enumerate() {
        for &e in events.events() {
            map.insert(e, s);
        }
    }
    Ok(out)
}

/// Natural projection onto `keep` via subset construction. A subset state is
/// marked iff it contains a marked state.
pub fn project(g: &Generator, keep: &BTreeSet<EventId>) -> Generator {
    let alphabet = g.alphabet().restrict(keep);
    let name = format!("P({})", g.name());
    let Some(init) = g.initial() else {
        return Generator::empty(name, alphabet);
    };
    let closure = |seed: BTreeSet<StateId>| -> BTreeSet<StateId> {
        let mut set = seed;
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for (e, d) in g.outgoing(s) {
                if !alphabet.contains(e) && set.insert(d) {
                    stack.push(d);
                }
            }
        }
        set
    };
    let start = closure(BTreeSet::from([init]));
    let mut index: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
    let mut subsets = vec![start.clone()];
    index.insert(start, 0);
    let mut transitions: Vec<BTreeMap<EventId, StateId>> = vec![BTreeMap::new()];
    let mut next = 0;
    while next < subsets.len() {
        let current = subsets[next].clone();
        for &e in alphabet.events() {
            let step: BTreeSet<StateId> =
                current.iter().filter_map(|&s| g.successor(s, e)).collect();
            if step.is_empty() {
                continue;
            }
            let target = closure(step);
            let id = match index.get(&target) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    index.insert(target.clone(), id);
                    subsets.push(target);
                    transitions.push(BTreeMap::new());
                    id
                }
            };
            transitions[next].insert(e, id);
        }
        next += 1;
    }
    let marked = subsets
        .iter()
        .enumerate()
        .filter(|(_, set)| set.iter().any(|&s| g.is_marked(s)))
        .map(|(i, _)| i)
        .collect();
    Generator::from_parts(name, 0, marked, alphabet, transitions)
}

/// Renumber states so that `order[k]` becomes state `k`. `order` must be a
/// permutation of the state indices.
pub fn renumber(g: &Generator, order: &[StateId]) -> Generator {
    let mut new_of = vec![usize::MAX; g.state_count()];
    for (k, &old) in order.iter().enumerate() {
        new_of[old] = k;
    }
    let mut transitions = vec![BTreeMap::new(); g.state_count()];
    for (s, e, d) in g.transitions() {
        transitions[new_of[s]].insert(e, new_of[d]);
    }
    Generator::from_parts(
        g.name().to_string(),
        if g.is_empty() { 0 } else { new_of[g.initial] },
        g.marked().iter().map(|&m| new_of[m]).collect(),
        g.alphabet().clone(),
        transitions,
    )
}

/// Breadth-first renumbering from the initial state, exploring events in
/// ascending order. Unreachable states follow in their original order.
pub fn canonicalize(g: &Generator) -> Generator {
    let Some(init) = g.initial() else {
        return g.clone();
    };
    let mut seen = vec![false; g.state_count()];
    let mut order = Vec::with_capacity(g.state_count());
    let mut queue = VecDeque::from([init]);
    seen[init] = true;
    while let Some(s) = queue.pop_front() {
        order.push(s);
        for (_, d) in g.outgoing(s) {
            if !seen[d] {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    order.extend((0..g.state_count()).filter(|&s| !seen[s]));
    renumber(g, &order)
}
