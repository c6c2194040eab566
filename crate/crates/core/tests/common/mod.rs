//! Random small plants and specifications shared by the property and
//! acceptance suites.

#![allow(dead_code)]

use desloc::automata::{event_set, sync, Alphabet};
use desloc::localization::AgentSpec;
use desloc::{EventId, Generator};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random deterministic generator over `events` with state 0 initial.
pub fn random_generator(
    rng: &mut impl Rng,
    name: &str,
    states: usize,
    events: &[u32],
    density: f64,
) -> Generator {
    let alphabet = Alphabet::with_default_controllability(event_set(events.iter().copied()));
    let mut g = Generator::new(name, states, 0, alphabet).unwrap();
    for s in 0..states {
        for &e in events {
            if rng.gen_bool(density) {
                let d = rng.gen_range(0..states);
                g.add_transition(s, EventId(e), d).unwrap();
            }
        }
    }
    g.set_marked(0).unwrap();
    for s in 1..states {
        if rng.gen_bool(0.3) {
            g.set_marked(s).unwrap();
        }
    }
    g
}

/// A sparse component that can always return to its initial state: a
/// random cycle through all states plus the odd extra transition. Sparse
/// components keep bounded languages small enough to enumerate.
pub fn random_component(rng: &mut impl Rng, name: &str, events: &[u32]) -> Generator {
    let states = rng.gen_range(1..=4);
    let alphabet = Alphabet::with_default_controllability(event_set(events.iter().copied()));
    let mut g = Generator::new(name, states, 0, alphabet).unwrap();
    let mut order: Vec<usize> = (1..states).collect();
    order.shuffle(rng);
    order.insert(0, 0);
    order.push(0);
    for w in order.windows(2) {
        g.add_transition(w[0], EventId(*events.choose(rng).unwrap()), w[1])
            .unwrap();
    }
    for s in 0..states {
        let free: Vec<u32> = events
            .iter()
            .copied()
            .filter(|&e| g.successor(s, EventId(e)).is_none())
            .collect();
        if let Some(&e) = free.choose(rng) {
            if rng.gen_bool(0.3) {
                g.add_transition(s, EventId(e), rng.gen_range(0..states))
                    .unwrap();
            }
        }
    }
    g.set_marked(0).unwrap();
    for s in 1..states {
        if rng.gen_bool(0.3) {
            g.set_marked(s).unwrap();
        }
    }
    g
}

/// Specification over `events` that defines uncontrollable events more
/// often than controllable ones, so that synthesis is rarely empty.
pub fn random_spec(rng: &mut impl Rng, states: usize, events: &[u32]) -> Generator {
    let alphabet = Alphabet::with_default_controllability(event_set(events.iter().copied()));
    let mut g = Generator::new("S", states, 0, alphabet).unwrap();
    for s in 0..states {
        for &e in events {
            let p = if EventId(e).default_controllable() {
                0.35
            } else {
                0.75
            };
            if rng.gen_bool(p) {
                g.add_transition(s, EventId(e), rng.gen_range(0..states))
                    .unwrap();
            }
        }
    }
    g.set_marked(0).unwrap();
    for s in 1..states {
        if rng.gen_bool(0.4) {
            g.set_marked(s).unwrap();
        }
    }
    g
}

pub struct Instance {
    pub components: Vec<Generator>,
    pub plant: Generator,
    pub spec: Generator,
    pub agents: Vec<AgentSpec>,
}

/// 2 or 3 agents with 2 or 3 events each, at most 4 states per agent, and a
/// specification with at most 5 states over the plant alphabet.
pub fn random_instance(rng: &mut impl Rng) -> Instance {
    let n_agents = rng.gen_range(2..=3);
    let mut next = 1u32;
    let mut components = Vec::new();
    for k in 0..n_agents {
        let n_events = rng.gen_range(2..=3);
        let events: Vec<u32> = (next..next + n_events).collect();
        next += n_events;
        components.push(random_component(rng, &format!("A{k}"), &events));
    }
    let refs: Vec<&Generator> = components.iter().collect();
    let plant = sync(&refs).unwrap().with_name("G");

    let all: Vec<u32> = (1..next).collect();
    let spec_states = rng.gen_range(1..=5);
    let spec = random_spec(rng, spec_states, &all);

    let agents = components
        .iter()
        .map(|c| AgentSpec::new(c.name(), c.alphabet().events().clone(), plant.alphabet()))
        .collect();
    Instance {
        components,
        plant,
        spec,
        agents,
    }
}

/// Table 1: disabled events at each state of the transfer-line supervisor.
/// States not listed disable nothing.
pub const TABLE_1: [(usize, &[u32]); 24] = [
    (0, &[3, 5]),
    (1, &[3, 5]),
    (2, &[5]),
    (3, &[5]),
    (4, &[5]),
    (5, &[5]),
    (6, &[5]),
    (7, &[3]),
    (8, &[5]),
    (9, &[5]),
    (10, &[3]),
    (11, &[3]),
    (12, &[1, 5]),
    (13, &[5]),
    (14, &[3]),
    (15, &[3]),
    (16, &[1, 5]),
    (17, &[3]),
    (19, &[1, 3]),
    (22, &[1]),
    (24, &[3]),
    (25, &[1]),
    (26, &[3]),
    (27, &[1, 3]),
];

/// `g` with one random transition deleted or one state's marking flipped.
pub fn perturb(rng: &mut impl Rng, g: &Generator) -> Generator {
    let Some(init) = g.initial() else {
        return g.clone();
    };
    let transitions: Vec<_> = g.transitions().collect();
    let drop = if transitions.is_empty() || rng.gen_bool(0.5) {
        None
    } else {
        Some(rng.gen_range(0..transitions.len()))
    };
    let flip = drop.is_none().then(|| rng.gen_range(0..g.state_count()));
    let mut out = Generator::new(g.name(), g.state_count(), init, g.alphabet().clone()).unwrap();
    for (i, &(s, e, d)) in transitions.iter().enumerate() {
        if drop != Some(i) {
            out.add_transition(s, e, d).unwrap();
        }
    }
    for s in 0..g.state_count() {
        if g.is_marked(s) != (flip == Some(s)) {
            out.set_marked(s).unwrap();
        }
    }
    out
}
