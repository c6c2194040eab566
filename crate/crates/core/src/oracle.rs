//! Brute-force bounded-language enumeration.
//!
//! Everything here works on explicit string sets obtained by replaying
//! transitions, without going through the product, projection or
//! equivalence code it is meant to check.

use std::collections::BTreeSet;

use crate::automata::{Equivalence, EventId, Generator, StateId, StringTrace};
use crate::error::{Error, Result};

/// Default cap on the number of strings an enumeration may produce.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Closed and marked strings of length at most `max_len`, in shortlex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedLanguage {
    pub max_len: usize,
    pub closed: Vec<StringTrace>,
    pub marked: Vec<StringTrace>,
}

impl BoundedLanguage {
    pub fn contains_closed(&self, s: &StringTrace) -> bool {
        self.closed.binary_search_by(|t| shortlex(t, s)).is_ok()
    }

    pub fn contains_marked(&self, s: &StringTrace) -> bool {
        self.marked.binary_search_by(|t| shortlex(t, s)).is_ok()
    }
}

fn shortlex(a: &StringTrace, b: &StringTrace) -> std::cmp::Ordering {
    a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0))
}

pub fn enumerate_language(g: &Generator, max_len: usize) -> Result<BoundedLanguage> {
    enumerate_joint(&[g], max_len, DEFAULT_BUDGET)
}

/// Strings over the union of the alphabets accepted by every component,
/// where each component ignores events outside its own alphabet. With a
/// plant among the components, this is the closed loop of the plant under
/// the other components acting as controllers.
pub fn enumerate_joint(
    components: &[&Generator],
    max_len: usize,
    budget: usize,
) -> Result<BoundedLanguage> {
    let events: BTreeSet<EventId> = components
        .iter()
        .flat_map(|g| g.alphabet().events().iter().copied())
        .collect();
    let mut lang = BoundedLanguage {
        max_len,
        closed: Vec::new(),
        marked: Vec::new(),
    };
    let Some(start) = components
        .iter()
        .map(|g| g.initial())
        .collect::<Option<Vec<StateId>>>()
    else {
        return Ok(lang);
    };
    let is_marked =
        |states: &[StateId]| components.iter().zip(states).all(|(g, &s)| g.is_marked(s));

    let mut layer = vec![(Vec::new(), start)];
    for len in 0..=max_len {
        let mut next = Vec::new();
        for (string, states) in &layer {
            let trace = StringTrace(string.clone());
            if is_marked(states) {
                lang.marked.push(trace.clone());
            }
            lang.closed.push(trace);
            if lang.closed.len() > budget {
                return Err(Error::BudgetExceeded { budget });
            }
            if len == max_len {
                continue;
            }
            for &e in &events {
                let moved: Option<Vec<StateId>> = components
                    .iter()
                    .zip(states)
                    .map(|(g, &s)| {
                        if g.alphabet().contains(e) {
                            g.successor(s, e)
                        } else {
                            Some(s)
                        }
                    })
                    .collect();
                if let Some(moved) = moved {
                    let mut longer = string.clone();
                    longer.push(e);
                    next.push((longer, moved));
                }
            }
        }
        layer = next;
    }
    debug_assert!(lang.closed.iter().all(
        |s| s.0.is_empty() || lang.contains_closed(&StringTrace(s.0[..s.0.len() - 1].to_vec()))
    ));
    Ok(lang)
}

/// Shortlex-least string in exactly one of two sorted sets.
fn first_difference(a: &[StringTrace], b: &[StringTrace]) -> Option<StringTrace> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match shortlex(&a[i], &b[j]) {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => return Some(a[i].clone()),
            std::cmp::Ordering::Greater => return Some(b[j].clone()),
        }
    }
    a.get(i).or(b.get(j)).cloned()
}

/// Compare two bounded languages; the witness is the shortest differing
/// string, preferring a closed-language difference on ties.
pub fn compare(a: &BoundedLanguage, b: &BoundedLanguage) -> Equivalence {
    let closed = first_difference(&a.closed, &b.closed);
    let marked = first_difference(&a.marked, &b.marked);
    let witness = match (closed, marked) {
        (Some(c), Some(m)) => Some(if shortlex(&m, &c).is_lt() { m } else { c }),
        (c, m) => c.or(m),
    };
    match witness {
        Some(w) => Equivalence::Differ(w),
        None => Equivalence::Equal,
    }
}

/// Components acting jointly: a string belongs to the side when every
/// component accepts it, each ignoring events outside its own alphabet.
struct Side<'a> {
    components: &'a [&'a Generator],
    offset: usize,
}

const OUT: u32 = u32::MAX;

impl Side<'_> {
    fn in_language(&self, row: &[u32]) -> bool {
        self.components.is_empty() || row[self.offset] != OUT
    }

    fn is_marked(&self, row: &[u32]) -> bool {
        self.in_language(row)
            && self
                .components
                .iter()
                .enumerate()
                .all(|(i, g)| g.is_marked(row[self.offset + i] as StateId))
    }

    fn start(&self, row: &mut [u32]) {
        let init: Option<Vec<StateId>> = self.components.iter().map(|g| g.initial()).collect();
        for i in 0..self.components.len() {
            row[self.offset + i] = init.as_ref().map_or(OUT, |states| states[i] as u32);
        }
    }

    fn step(&self, from: &[u32], e: EventId, to: &mut [u32]) {
        let mut alive = self.in_language(from);
        for (i, g) in self.components.iter().enumerate() {
            let k = self.offset + i;
            to[k] = OUT;
            if !alive {
                continue;
            }
            let s = from[k] as StateId;
            let next = if g.alphabet().contains(e) {
                g.successor(s, e)
            } else {
                Some(s)
            };
            match next {
                Some(d) => to[k] = d as u32,
                None => alive = false,
            }
        }
        if !alive {
            for i in 0..self.components.len() {
                to[self.offset + i] = OUT;
            }
        }
    }
}

/// Walk the union of the string trees of two joint languages in shortlex
/// order and report the first string on which closed or marked membership
/// differs.
pub fn compare_joint(
    left: &[&Generator],
    right: &[&Generator],
    max_len: usize,
    budget: usize,
) -> Result<Equivalence> {
    let sides = [
        Side {
            components: left,
            offset: 0,
        },
        Side {
            components: right,
            offset: left.len(),
        },
    ];
    let width = left.len() + right.len();
    let events: BTreeSet<EventId> = left
        .iter()
        .chain(right)
        .flat_map(|g| g.alphabet().events().iter().copied())
        .collect();

    // parents[len][i] = (index in layer len - 1, event) of the i-th string
    let mut parents: Vec<Vec<(u32, EventId)>> = vec![vec![(0, EventId(0))]];
    let mut layer = vec![OUT; width];
    for side in &sides {
        side.start(&mut layer);
    }
    let mut total = 0usize;
    for len in 0..=max_len {
        let count = layer.len() / width.max(1);
        total += count;
        if total > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        for i in 0..count {
            let row = &layer[i * width..(i + 1) * width];
            let [l, r] = &sides;
            if l.in_language(row) != r.in_language(row) || l.is_marked(row) != r.is_marked(row) {
                return Ok(Equivalence::Differ(witness(&parents, len, i)));
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::new();
        let mut next_parents = Vec::new();
        let mut to = vec![OUT; width];
        for i in 0..count {
            let row = &layer[i * width..(i + 1) * width];
            if !sides.iter().any(|s| s.in_language(row)) {
                continue;
            }
            for &e in &events {
                for side in &sides {
                    side.step(row, e, &mut to);
                }
                if sides.iter().any(|s| s.in_language(&to)) {
                    next.extend_from_slice(&to);
                    next_parents.push((i as u32, e));
                }
            }
        }
        if next_parents.is_empty() {
            break;
        }
        layer = next;
        parents.push(next_parents);
    }
    Ok(Equivalence::Equal)
}

fn witness(parents: &[Vec<(u32, EventId)>], len: usize, mut i: usize) -> StringTrace {
    let mut out = Vec::with_capacity(len);
    for l in (1..=len).rev() {
        let (p, e) = parents[l][i];
        out.push(e);
        i = p as usize;
    }
    out.reverse();
    StringTrace(out)
}

pub fn oracle_equal(g1: &Generator, g2: &Generator, max_len: usize) -> Result<Equivalence> {
    compare_joint(&[g1], &[g2], max_len, DEFAULT_BUDGET)
}

/// Bounded check that `plant` under `controllers` has the same closed and
/// marked behaviour as `sup`.
pub fn oracle_control_equal(
    plant: &Generator,
    sup: &Generator,
    controllers: &[&Generator],
    max_len: usize,
) -> Result<Equivalence> {
    let mut components = vec![plant];
    components.extend_from_slice(controllers);
    compare_joint(&components, &[sup], max_len, DEFAULT_BUDGET)
}

/// `states` extended by everything reachable through unobservable events.
fn unobservable_closure(
    g: &Generator,
    states: &BTreeSet<StateId>,
    observable: &BTreeSet<EventId>,
) -> BTreeSet<StateId> {
    let mut out = states.clone();
    let mut stack: Vec<StateId> = states.iter().copied().collect();
    while let Some(s) = stack.pop() {
        for (e, d) in g.outgoing(s) {
            if !observable.contains(&e) && out.insert(d) {
                stack.push(d);
            }
        }
    }
    out
}

/// Bounded normality check by direct simulation: every plant string up to
/// `max_len` is in `L(k)` iff some string of `L(k)`, of any length, has the
/// same observable projection, and every string of `L(k)` up to `max_len` is
/// a plant string. Returns an offending string.
pub fn oracle_normal(
    plant: &Generator,
    k: &Generator,
    observable: &BTreeSet<EventId>,
    max_len: usize,
) -> Result<Option<StringTrace>> {
    let lang = enumerate_language(plant, max_len)?;
    let Some(k0) = k.initial() else {
        return Ok(None);
    };
    let observable_k: BTreeSet<EventId> = observable
        .intersection(k.alphabet().events())
        .copied()
        .collect();
    for s in &lang.closed {
        let in_k = k.run(&s.0).is_some() && s.0.iter().all(|e| k.alphabet().contains(*e));
        let mut look = unobservable_closure(k, &BTreeSet::from([k0]), &observable_k);
        for &e in s.0.iter().filter(|e| observable.contains(e)) {
            if !k.alphabet().contains(e) {
                look.clear();
                break;
            }
            let moved = look.iter().filter_map(|&q| k.successor(q, e)).collect();
            look = unobservable_closure(k, &moved, &observable_k);
        }
        if in_k != !look.is_empty() {
            return Ok(Some(s.clone()));
        }
    }
    let k_lang = enumerate_language(k, max_len)?;
    Ok(k_lang.closed.into_iter().find(|s| !lang.contains_closed(s)))
}

/// Bounded supremality check against every sub-automaton of `candidate`
/// (typically the meet of plant and specification) that is trim and
/// controllable up to `max_len`: none may contain a string of length at most
/// `max_len` missing from `L(sup)`. `candidate` must have at most 16 states.
/// Returns the first such string.
pub fn oracle_supremal(
    plant: &Generator,
    candidate: &Generator,
    sup: &Generator,
    max_len: usize,
) -> Result<Option<StringTrace>> {
    let n = candidate.state_count();
    assert!(n <= 16, "subset enumeration is limited to 16 states");
    let Some(init) = candidate.initial() else {
        return Ok(None);
    };
    let plant_lang = enumerate_language(plant, max_len)?;
    let sup_lang = enumerate_language(sup, max_len)?;
    let uncontrollable: Vec<EventId> = plant.alphabet().uncontrollable().collect();
    for mask in 0u32..(1 << n) {
        if mask & (1 << init) == 0 {
            continue;
        }
        let keep: Vec<bool> = (0..n).map(|x| mask & (1 << x) != 0).collect();
        let sub = candidate.restrict(&keep);
        if sub
            .reachable()
            .iter()
            .chain(sub.coreachable().iter())
            .any(|r| !r)
        {
            continue;
        }
        let lang = enumerate_language(&sub, max_len)?;
        let controllable = lang.closed.iter().filter(|s| s.0.len() < max_len).all(|s| {
            uncontrollable.iter().all(|&u| {
                let mut longer = s.0.clone();
                longer.push(u);
                let longer = StringTrace(longer);
                !plant_lang.contains_closed(&longer) || lang.contains_closed(&longer)
            })
        });
        if !controllable {
            continue;
        }
        if let Some(s) = lang.closed.iter().find(|s| !sup_lang.contains_closed(s)) {
            return Ok(Some(s.clone()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{event_set, lang_equal, Alphabet};

    fn gen(
        n: usize,
        marked: &[StateId],
        trans: &[(StateId, u32, StateId)],
        events: &[u32],
    ) -> Generator {
        let mut g = Generator::new(
            "g",
            n,
            0,
            Alphabet::with_default_controllability(event_set(events.iter().copied())),
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

    fn strings(v: &[StringTrace]) -> Vec<String> {
        v.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn two_state_cycle() {
        let g = gen(2, &[0], &[(0, 1, 1), (1, 2, 0)], &[1, 2]);
        let l = enumerate_language(&g, 3).unwrap();
        assert_eq!(strings(&l.closed), ["ε", "1", "1,2", "1,2,1"]);
        assert_eq!(strings(&l.marked), ["ε", "1,2"]);
    }

    #[test]
    fn empty_generator_has_empty_language() {
        let g = Generator::empty("E", Alphabet::with_default_controllability(event_set([1])));
        let l = enumerate_language(&g, 4).unwrap();
        assert!(l.closed.is_empty() && l.marked.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let g = gen(1, &[0], &[(0, 1, 0), (0, 2, 0)], &[1, 2]);
        assert_eq!(
            enumerate_joint(&[&g], 10, 100),
            Err(Error::BudgetExceeded { budget: 100 })
        );
    }

    #[test]
    fn witness_at_difference_depth() {
        let a = gen(3, &[0], &[(0, 1, 1), (1, 1, 2)], &[1, 2]);
        let b = gen(3, &[0], &[(0, 1, 1), (1, 1, 2), (2, 2, 0)], &[1, 2]);
        assert!(oracle_equal(&a, &a, 6).unwrap().is_equal());
        assert!(oracle_equal(&a, &b, 2).unwrap().is_equal());
        let w = oracle_equal(&a, &b, 5).unwrap();
        assert_eq!(w.counterexample().unwrap().to_string(), "1,1,2");
        assert_eq!(w, lang_equal(&a, &b));
    }

    #[test]
    fn streaming_matches_sets() {
        let a = gen(
            3,
            &[0, 2],
            &[(0, 1, 1), (1, 2, 2), (2, 1, 0), (0, 2, 0)],
            &[1, 2],
        );
        let b = gen(2, &[0], &[(0, 1, 1), (1, 2, 0), (0, 2, 0)], &[1, 2]);
        for n in 0..6 {
            let sets = compare(
                &enumerate_language(&a, n).unwrap(),
                &enumerate_language(&b, n).unwrap(),
            );
            assert_eq!(oracle_equal(&a, &b, n).unwrap(), sets, "max_len {n}");
        }
    }

    #[test]
    fn marked_only_difference() {
        let a = gen(2, &[0], &[(0, 1, 1)], &[1]);
        let b = gen(2, &[0, 1], &[(0, 1, 1)], &[1]);
        let w = oracle_equal(&a, &b, 3).unwrap();
        assert_eq!(w.counterexample().unwrap().to_string(), "1");
    }

    #[test]
    fn joint_ignores_foreign_events() {
        let plant = gen(1, &[0], &[(0, 1, 0), (0, 2, 0)], &[1, 2]);
        // only restricts 1: at most one occurrence
        let c = gen(2, &[0, 1], &[(0, 1, 1)], &[1]);
        let l = enumerate_joint(&[&plant, &c], 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(strings(&l.closed), ["ε", "1", "2", "1,2", "2,1", "2,2"]);
    }

    #[test]
    fn normality_by_simulation() {
        // plant: 1 then 2 (unobservable 1); K allows only 1
        let plant = gen(3, &[0, 1, 2], &[(0, 1, 1), (1, 2, 2)], &[1, 2]);
        let k = gen(2, &[0, 1], &[(0, 1, 1)], &[1, 2]);
        let all = event_set([1, 2]);
        assert_eq!(oracle_normal(&plant, &k, &all, 4).unwrap(), None);
        // with 1 hidden, ε and 1 look alike and both are in K
        assert_eq!(oracle_normal(&plant, &k, &event_set([2]), 4).unwrap(), None);
        let k2 = gen(1, &[0], &[], &[1, 2]);
        let w = oracle_normal(&plant, &k2, &event_set([2]), 4).unwrap();
        assert_eq!(w.unwrap().to_string(), "1");
    }

    #[test]
    fn supremality_on_small_example() {
        let p = gen(
            3,
            &[0, 1, 2],
            &[(0, 1, 1), (1, 2, 2), (0, 3, 0)],
            &[1, 2, 3],
        );
        let spec = gen(2, &[0, 1], &[(0, 1, 1), (0, 3, 0)], &[1, 2, 3]);
        let meet = crate::automata::meet(&p, &spec).unwrap();
        let sup = crate::synthesis::supcon(&p, &spec).unwrap();
        assert_eq!(oracle_supremal(&p, &meet, &sup, 6).unwrap(), None);
        let too_small = gen(1, &[0], &[], &[1, 2, 3]);
        assert!(oracle_supremal(&p, &meet, &too_small, 6).unwrap().is_some());
    }
}
