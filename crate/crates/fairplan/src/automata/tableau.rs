//! LTL to nondeterministic Büchi automaton by the standard tableau
//! construction: states are sets of pending obligations, a step picks a
//! branch of the local expansion consistent with the input letter, and
//! until-promises are discharged through a round-robin counter that
//! degeneralizes the per-until acceptance sets into a single Büchi set.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{Alphabet, AutomataError, Nbw};
use crate::logic::{Dialect, Formula, NnfArena, NnfId, NnfNode};

/// One fully expanded branch of a tableau state.
#[derive(Debug, Clone)]
struct Branch {
    /// literal constraints on the current letter: (prop index, polarity)
    lits: Vec<(u32, bool)>,
    /// obligations deferred to the next position
    next: BTreeSet<NnfId>,
    /// until nodes that this branch defers (demanded but not fulfilled now)
    deferred: BTreeSet<NnfId>,
}

fn expand(arena: &NnfArena, state: &BTreeSet<NnfId>) -> Vec<Branch> {
    let mut out = Vec::new();
    let mut work = Branch {
        lits: Vec::new(),
        next: BTreeSet::new(),
        deferred: BTreeSet::new(),
    };
    let pending: Vec<NnfId> = state.iter().copied().collect();
    expand_rec(arena, &pending, 0, &mut work, &mut out);
    out
}

fn expand_rec(
    arena: &NnfArena,
    pending: &[NnfId],
    at: usize,
    work: &mut Branch,
    out: &mut Vec<Branch>,
) {
    if at == pending.len() {
        out.push(work.clone());
        return;
    }
    let id = pending[at];
    match *arena.node(id) {
        NnfNode::True => expand_rec(arena, pending, at + 1, work, out),
        NnfNode::False => {}
        NnfNode::Lit(p, positive) => {
            // contradictory literal constraints kill the branch
            if work.lits.iter().any(|&(q, pol)| q == p && pol != positive) {
                return;
            }
            let added = if work.lits.contains(&(p, positive)) {
                false
            } else {
                work.lits.push((p, positive));
                true
            };
            expand_rec(arena, pending, at + 1, work, out);
            if added {
                work.lits.pop();
            }
        }
        NnfNode::And(a, b) => {
            let rest: Vec<NnfId> = [a, b]
                .into_iter()
                .chain(pending[at + 1..].iter().copied())
                .collect();
            expand_rec(arena, &rest, 0, work, out);
        }
        NnfNode::Or(a, b) => {
            for child in [a, b] {
                let rest: Vec<NnfId> = std::iter::once(child)
                    .chain(pending[at + 1..].iter().copied())
                    .collect();
                expand_rec(arena, &rest, 0, work, out);
            }
        }
        NnfNode::Next(g, _) => {
            let added = work.next.insert(g);
            expand_rec(arena, pending, at + 1, work, out);
            if added {
                work.next.remove(&g);
            }
        }
        NnfNode::Until(a, b) => {
            // fulfill now
            {
                let rest: Vec<NnfId> = std::iter::once(b)
                    .chain(pending[at + 1..].iter().copied())
                    .collect();
                expand_rec(arena, &rest, 0, work, out);
            }
            // or defer: a now, the until again next
            {
                let next_added = work.next.insert(id);
                let def_added = work.deferred.insert(id);
                let rest: Vec<NnfId> = std::iter::once(a)
                    .chain(pending[at + 1..].iter().copied())
                    .collect();
                expand_rec(arena, &rest, 0, work, out);
                if next_added {
                    work.next.remove(&id);
                }
                if def_added {
                    work.deferred.remove(&id);
                }
            }
        }
        NnfNode::Release(a, b) => {
            // release resolved now: a and b both hold
            {
                let rest: Vec<NnfId> = [a, b]
                    .into_iter()
                    .chain(pending[at + 1..].iter().copied())
                    .collect();
                expand_rec(arena, &rest, 0, work, out);
            }
            // or b holds and the release carries over
            {
                let next_added = work.next.insert(id);
                let rest: Vec<NnfId> = std::iter::once(b)
                    .chain(pending[at + 1..].iter().copied())
                    .collect();
                expand_rec(arena, &rest, 0, work, out);
                if next_added {
                    work.next.remove(&id);
                }
            }
        }
    }
}

/// Compiles an LTL formula over the given alphabet into an NBW accepting
/// exactly the infinite words that satisfy it.
pub fn ltl_to_nbw(
    f: &Formula,
    alphabet: Arc<Alphabet>,
    max_states: usize,
) -> Result<Nbw, AutomataError> {
    let mut arena = NnfArena::new();
    let root = arena.from_formula(f, Dialect::Ltl);

    // collect until nodes in the closure for degeneralization
    let mut untils: Vec<NnfId> = Vec::new();
    {
        let mut seen = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            match *arena.node(id) {
                NnfNode::Until(a, b) => {
                    untils.push(id);
                    stack.push(a);
                    stack.push(b);
                }
                NnfNode::Release(a, b) | NnfNode::And(a, b) | NnfNode::Or(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
                NnfNode::Next(g, _) => stack.push(g),
                _ => {}
            }
        }
        untils.sort_unstable();
    }
    let k_max = untils.len();

    // tableau states: (obligation set, counter); counter == k_max marks
    // acceptance and behaves like counter 0 for outgoing transitions
    type ObSet = BTreeSet<NnfId>;
    let mut expansions: HashMap<ObSet, Vec<Branch>> = HashMap::new();
    let mut index: HashMap<(ObSet, usize), usize> = HashMap::new();
    let mut states: Vec<(ObSet, usize)> = Vec::new();
    let mut trans: Vec<Vec<Vec<usize>>> = Vec::new();

    let init_set: ObSet = [root].into_iter().collect();
    index.insert((init_set.clone(), 0), 0);
    states.push((init_set, 0));
    trans.push(vec![Vec::new(); alphabet.len()]);

    let mut at = 0usize;
    while at < states.len() {
        let (obs, counter) = states[at].clone();
        let counter_eff = if counter == k_max { 0 } else { counter };
        if !expansions.contains_key(&obs) {
            expansions.insert(obs.clone(), expand(&arena, &obs));
        }
        let branches = expansions.get(&obs).unwrap().clone();
        for li in 0..alphabet.len() {
            let letter = alphabet.letter(li);
            let mut targets: BTreeSet<usize> = BTreeSet::new();
            for br in &branches {
                let ok = br.lits.iter().all(|&(p, positive)| {
                    letter.contains(arena.prop_name(p)) == positive
                });
                if !ok {
                    continue;
                }
                // advance the round-robin counter over fulfilled untils
                let mut c = counter_eff;
                while c < k_max && !br.deferred.contains(&untils[c]) {
                    c += 1;
                }
                let key = (br.next.clone(), c);
                let target = match index.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = states.len();
                        if t >= max_states {
                            return Err(AutomataError::StateCapacity(max_states));
                        }
                        index.insert(key.clone(), t);
                        states.push(key);
                        trans.push(vec![Vec::new(); alphabet.len()]);
                        t
                    }
                };
                targets.insert(target);
            }
            trans[at][li] = targets.into_iter().collect();
        }
        at += 1;
    }

    let accepting = states.iter().map(|(_, c)| *c == k_max).collect();
    Ok(Nbw {
        alphabet,
        init: 0,
        trans,
        accepting,
    })
}
