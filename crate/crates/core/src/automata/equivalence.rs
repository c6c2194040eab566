use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{EventId, Generator, StateId, StringTrace};

/// Outcome of a language comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Equal,
    /// A shortest string in the symmetric difference.
    Differ(StringTrace),
}

impl Equivalence {
    pub fn is_equal(&self) -> bool {
        matches!(self, Equivalence::Equal)
    }

    pub fn counterexample(&self) -> Option<&StringTrace> {
        match self {
            Equivalence::Equal => None,
            Equivalence::Differ(t) => Some(t),
        }
    }
}

type Pair = (Option<StateId>, Option<StateId>);

/// Breadth-first search over the pair product of `a` and `b`, completed with
/// an implicit dead state on both sides. Returns the first (shortest, then
/// lexicographically least) string leading to a pair satisfying `target`.
fn search(a: &Generator, b: &Generator, target: impl Fn(Pair) -> bool) -> Option<StringTrace> {
    let start = (a.initial(), b.initial());
    if start == (None, None) {
        return None;
    }
    let mut parent: HashMap<Pair, (Pair, EventId)> = HashMap::new();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let rebuild = |mut p: Pair, parent: &HashMap<Pair, (Pair, EventId)>| {
        let mut events = Vec::new();
        while let Some(&(prev, e)) = parent.get(&p) {
            events.push(e);
            p = prev;
        }
        events.reverse();
        StringTrace(events)
    };
    while let Some(pair) = queue.pop_front() {
        if target(pair) {
            return Some(rebuild(pair, &parent));
        }
        let mut events: BTreeSet<EventId> = BTreeSet::new();
        if let Some(x) = pair.0 {
            events.extend(a.outgoing(x).map(|(e, _)| e));
        }
        if let Some(y) = pair.1 {
            events.extend(b.outgoing(y).map(|(e, _)| e));
        }
        for e in events {
            let next = (
                pair.0.and_then(|x| a.successor(x, e)),
                pair.1.and_then(|y| b.successor(y, e)),
            );
            if seen.insert(next) {
                parent.insert(next, (pair, e));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Compare closed languages `L(a)` and `L(b)`.
pub fn closed_equal(a: &Generator, b: &Generator) -> Equivalence {
    match search(a, b, |p| p.0.is_some() != p.1.is_some()) {
        Some(t) => Equivalence::Differ(t),
        None => Equivalence::Equal,
    }
}

/// Compare marked languages `L_m(a)` and `L_m(b)`.
pub fn marked_equal(a: &Generator, b: &Generator) -> Equivalence {
    let marked =
        |p: Pair| p.0.is_some_and(|x| a.is_marked(x)) != p.1.is_some_and(|y| b.is_marked(y));
    match search(a, b, marked) {
        Some(t) => Equivalence::Differ(t),
        None => Equivalence::Equal,
    }
}

/// `L(a) = L(b)` and `L_m(a) = L_m(b)`. A closed-language witness is
/// preferred when both differ.
pub fn lang_equal(a: &Generator, b: &Generator) -> Equivalence {
    match closed_equal(a, b) {
        Equivalence::Equal => marked_equal(a, b),
        differ => differ,
    }
}

/// State correspondence forced by synchronized traversal from the initial
/// states: `Some(map)` with `map[x] = y` for every reachable `x` of `a` iff
/// the reachable parts of `a` and `b` are isomorphic (same transition
/// structure and marking). Unreachable states of `a` map to `usize::MAX`.
pub fn isomorphism(a: &Generator, b: &Generator) -> Option<Vec<StateId>> {
    let mut map = vec![usize::MAX; a.state_count()];
    let (x0, y0) = match (a.initial(), b.initial()) {
        (None, None) => return Some(map),
        (Some(x), Some(y)) => (x, y),
        _ => return None,
    };
    let mut back = vec![usize::MAX; b.state_count()];
    map[x0] = y0;
    back[y0] = x0;
    let mut queue = VecDeque::from([(x0, y0)]);
    while let Some((x, y)) = queue.pop_front() {
        if a.is_marked(x) != b.is_marked(y) || a.enabled(x) != b.enabled(y) {
            return None;
        }
        for (e, dx) in a.outgoing(x) {
            let dy = b.successor(y, e)?;
            match (map[dx], back[dy]) {
                (usize::MAX, usize::MAX) => {
                    map[dx] = dy;
                    back[dy] = dx;
                    queue.push_back((dx, dy));
                }
                (m, k) if m == dy && k == dx => {}
                _ => return None,
            }
        }
    }
    Some(map)
}
