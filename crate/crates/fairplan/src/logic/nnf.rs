//! Negation normal form with hash-consed nodes, and residual progression
//! over letters. Shared by the LTLf lasso evaluator and the automata layer.
//!
//! Residual states are disjunctions of clauses whose literals are closure
//! node ids, so the state space is finite and progression terminates. The
//! dual of strong next (needed when pushing negation through `X` under
//! finite-trace semantics) is represented by a weak-next node that only
//! differs from strong next at the end of a trace.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{Dialect, Formula, Letter};

pub(crate) type NnfId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum NnfNode {
    True,
    False,
    /// Positive or negative literal over an interned proposition.
    Lit(u32, bool),
    And(NnfId, NnfId),
    Or(NnfId, NnfId),
    /// `strong = false` is weak next: true at the last trace position.
    Next(NnfId, bool),
    Until(NnfId, NnfId),
    Release(NnfId, NnfId),
}

#[derive(Default)]
pub(crate) struct NnfArena {
    nodes: Vec<NnfNode>,
    map: HashMap<NnfNode, NnfId>,
    props: Vec<String>,
    prop_map: HashMap<String, u32>,
}

impl NnfArena {
    pub fn new() -> NnfArena {
        NnfArena::default()
    }

    pub fn node(&self, id: NnfId) -> &NnfNode {
        &self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn prop_name(&self, p: u32) -> &str {
        &self.props[p as usize]
    }

    pub fn intern(&mut self, n: NnfNode) -> NnfId {
        if let Some(&id) = self.map.get(&n) {
            return id;
        }
        let id = self.nodes.len() as NnfId;
        self.nodes.push(n.clone());
        self.map.insert(n, id);
        id
    }

    fn prop(&mut self, name: &str) -> u32 {
        if let Some(&p) = self.prop_map.get(name) {
            return p;
        }
        let p = self.props.len() as u32;
        self.props.push(name.to_string());
        self.prop_map.insert(name.to_string(), p);
        p
    }

    /// Converts a formula into the arena, pushing negations down to
    /// literals. Under LTLf, negated strong next becomes weak next; under
    /// LTL next is self-dual.
    pub fn from_formula(&mut self, f: &Formula, dialect: Dialect) -> NnfId {
        self.walk(f, true, dialect)
    }

    fn walk(&mut self, f: &Formula, positive: bool, d: Dialect) -> NnfId {
        match f {
            Formula::True => self.intern(if positive { NnfNode::True } else { NnfNode::False }),
            Formula::False => self.intern(if positive { NnfNode::False } else { NnfNode::True }),
            Formula::Atom(a) => {
                let p = self.prop(a);
                self.intern(NnfNode::Lit(p, positive))
            }
            Formula::Not(g) => self.walk(g, !positive, d),
            Formula::And(a, b) => {
                let x = self.walk(a, positive, d);
                let y = self.walk(b, positive, d);
                self.intern(if positive {
                    NnfNode::And(x, y)
                } else {
                    NnfNode::Or(x, y)
                })
            }
            Formula::Or(a, b) => {
                let x = self.walk(a, positive, d);
                let y = self.walk(b, positive, d);
                self.intern(if positive {
                    NnfNode::Or(x, y)
                } else {
                    NnfNode::And(x, y)
                })
            }
            Formula::Implies(a, b) => {
                let x = self.walk(a, !positive, d);
                let y = self.walk(b, positive, d);
                self.intern(if positive {
                    NnfNode::Or(x, y)
                } else {
                    NnfNode::And(x, y)
                })
            }
            Formula::Next(g) => {
                let x = self.walk(g, positive, d);
                let strong = positive || d == Dialect::Ltl;
                self.intern(NnfNode::Next(x, strong))
            }
            Formula::Until(a, b) => {
                let x = self.walk(a, positive, d);
                let y = self.walk(b, positive, d);
                self.intern(if positive {
                    NnfNode::Until(x, y)
                } else {
                    NnfNode::Release(x, y)
                })
            }
            Formula::Release(a, b) => {
                let x = self.walk(a, positive, d);
                let y = self.walk(b, positive, d);
                self.intern(if positive {
                    NnfNode::Release(x, y)
                } else {
                    NnfNode::Until(x, y)
                })
            }
            Formula::Eventually(g) => {
                let x = self.walk(g, positive, d);
                if positive {
                    let t = self.intern(NnfNode::True);
                    self.intern(NnfNode::Until(t, x))
                } else {
                    let f = self.intern(NnfNode::False);
                    self.intern(NnfNode::Release(f, x))
                }
            }
            Formula::Always(g) => {
                let x = self.walk(g, positive, d);
                if positive {
                    let f = self.intern(NnfNode::False);
                    self.intern(NnfNode::Release(f, x))
                } else {
                    let t = self.intern(NnfNode::True);
                    self.intern(NnfNode::Until(t, x))
                }
            }
        }
    }
}

/// A residual: set of clauses, each a set of closure node ids (conjunction),
/// the whole a disjunction. Kept as an antichain under clause inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct Dnf(BTreeSet<BTreeSet<NnfId>>);

impl Dnf {
    fn fals() -> Dnf {
        Dnf(BTreeSet::new())
    }

    fn tru() -> Dnf {
        let mut s = BTreeSet::new();
        s.insert(BTreeSet::new());
        Dnf(s)
    }

    fn unit(id: NnfId) -> Dnf {
        let mut c = BTreeSet::new();
        c.insert(id);
        let mut s = BTreeSet::new();
        s.insert(c);
        Dnf(s)
    }

    fn is_true(&self) -> bool {
        self.0.contains(&BTreeSet::new())
    }

    fn minimize(mut clauses: BTreeSet<BTreeSet<NnfId>>) -> Dnf {
        if clauses.contains(&BTreeSet::new()) {
            return Dnf::tru();
        }
        let all: Vec<BTreeSet<NnfId>> = clauses.iter().cloned().collect();
        clauses.retain(|c| !all.iter().any(|o| o != c && o.is_subset(c)));
        Dnf(clauses)
    }

    fn or(&self, other: &Dnf) -> Dnf {
        let mut clauses = self.0.clone();
        clauses.extend(other.0.iter().cloned());
        Dnf::minimize(clauses)
    }

    fn and(&self, other: &Dnf) -> Dnf {
        let mut clauses = BTreeSet::new();
        for a in &self.0 {
            for b in &other.0 {
                let mut c = a.clone();
                c.extend(b.iter().copied());
                clauses.insert(c);
            }
        }
        Dnf::minimize(clauses)
    }
}

/// Interned progression state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct ProgState(pub u32);

/// Letter-by-letter residual progression with full memoization. States are
/// interned so equality is id equality.
pub(crate) struct Progression {
    arena: NnfArena,
    states: Vec<Arc<Dnf>>,
    state_map: HashMap<Dnf, u32>,
    letter_ids: HashMap<Letter, u32>,
    prog_memo: HashMap<(NnfId, u32), Arc<Dnf>>,
    last_memo: HashMap<(NnfId, u32), bool>,
    step_memo: HashMap<(u32, u32), (ProgState, bool)>,
}

impl Progression {
    pub fn new(arena: NnfArena) -> Progression {
        Progression {
            arena,
            states: Vec::new(),
            state_map: HashMap::new(),
            letter_ids: HashMap::new(),
            prog_memo: HashMap::new(),
            last_memo: HashMap::new(),
            step_memo: HashMap::new(),
        }
    }

    pub fn arena(&self) -> &NnfArena {
        &self.arena
    }

    /// Number of distinct residual states created so far.
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    fn intern_state(&mut self, d: Dnf) -> ProgState {
        if let Some(&id) = self.state_map.get(&d) {
            return ProgState(id);
        }
        let id = self.states.len() as u32;
        self.states.push(Arc::new(d.clone()));
        self.state_map.insert(d, id);
        ProgState(id)
    }

    fn letter_id(&mut self, letter: &Letter) -> u32 {
        if let Some(&id) = self.letter_ids.get(letter) {
            return id;
        }
        let id = self.letter_ids.len() as u32;
        self.letter_ids.insert(letter.clone(), id);
        id
    }

    pub fn initial(&mut self, root: NnfId) -> ProgState {
        self.intern_state(Dnf::unit(root))
    }

    pub fn state_fingerprint(&self, s: &ProgState) -> u64 {
        s.0 as u64
    }

    /// Consumes one letter: returns the successor residual and whether the
    /// word read so far (ending with this letter) is accepted.
    pub fn step(&mut self, s: &ProgState, letter: &Letter) -> (ProgState, bool) {
        let lid = self.letter_id(letter);
        if let Some(&r) = self.step_memo.get(&(s.0, lid)) {
            return r;
        }
        let dnf = self.states[s.0 as usize].clone();
        let mut accepted = false;
        let mut next = Dnf::fals();
        for clause in &dnf.0 {
            let mut clause_last = true;
            let mut clause_next = Dnf::tru();
            for &id in clause {
                if clause_last && !self.last_eval(id, letter, lid) {
                    clause_last = false;
                }
                if !clause_next.0.is_empty() {
                    let p = self.prog(id, letter, lid);
                    clause_next = clause_next.and(&p);
                }
            }
            if clause_last {
                accepted = true;
            }
            next = next.or(&clause_next);
            if accepted && next.is_true() {
                break;
            }
        }
        let ns = self.intern_state(next);
        self.step_memo.insert((s.0, lid), (ns, accepted));
        (ns, accepted)
    }

    fn prog(&mut self, id: NnfId, letter: &Letter, lid: u32) -> Arc<Dnf> {
        if let Some(d) = self.prog_memo.get(&(id, lid)) {
            return d.clone();
        }
        let d = match self.arena.node(id).clone() {
            NnfNode::True => Dnf::tru(),
            NnfNode::False => Dnf::fals(),
            NnfNode::Lit(p, positive) => {
                if letter.contains(self.arena.prop_name(p)) == positive {
                    Dnf::tru()
                } else {
                    Dnf::fals()
                }
            }
            NnfNode::And(a, b) => {
                let x = self.prog(a, letter, lid);
                let y = self.prog(b, letter, lid);
                x.and(&y)
            }
            NnfNode::Or(a, b) => {
                let x = self.prog(a, letter, lid);
                let y = self.prog(b, letter, lid);
                x.or(&y)
            }
            NnfNode::Next(g, _) => Dnf::unit(g),
            NnfNode::Until(a, b) => {
                let pb = self.prog(b, letter, lid);
                let pa = self.prog(a, letter, lid);
                pb.or(&pa.and(&Dnf::unit(id)))
            }
            NnfNode::Release(a, b) => {
                let pb = self.prog(b, letter, lid);
                let pa = self.prog(a, letter, lid);
                pb.and(&pa.or(&Dnf::unit(id)))
            }
        };
        let d = Arc::new(d);
        self.prog_memo.insert((id, lid), d.clone());
        d
    }

    /// Truth of a closure node on the one-letter trace consisting of
    /// `letter` alone.
    fn last_eval(&mut self, id: NnfId, letter: &Letter, lid: u32) -> bool {
        if let Some(&b) = self.last_memo.get(&(id, lid)) {
            return b;
        }
        let v = match self.arena.node(id).clone() {
            NnfNode::True => true,
            NnfNode::False => false,
            NnfNode::Lit(p, positive) => letter.contains(self.arena.prop_name(p)) == positive,
            NnfNode::And(a, b) => {
                self.last_eval(a, letter, lid) && self.last_eval(b, letter, lid)
            }
            NnfNode::Or(a, b) => self.last_eval(a, letter, lid) || self.last_eval(b, letter, lid),
            NnfNode::Next(_, strong) => !strong,
            NnfNode::Until(_, b) => self.last_eval(b, letter, lid),
            NnfNode::Release(_, b) => self.last_eval(b, letter, lid),
        };
        self.last_memo.insert((id, lid), v);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{letter, parse_formula};

    #[test]
    fn progression_accepts_exact_prefixes() {
        // l & X X l accepted exactly at the length-3 prefix
        let f = parse_formula("l & X X l").unwrap();
        let mut arena = NnfArena::new();
        let root = arena.from_formula(&f, Dialect::Ltlf);
        let mut prog = Progression::new(arena);
        let s0 = prog.initial(root);
        let (s1, a1) = prog.step(&s0, &letter(&["l"]));
        assert!(!a1);
        let (s2, a2) = prog.step(&s1, &letter(&["m"]));
        assert!(!a2);
        let (_, a3) = prog.step(&s2, &letter(&["l"]));
        assert!(a3);
    }

    #[test]
    fn weak_next_from_negated_strong_next() {
        // !(X l) on a one-letter trace is true: there is no next position
        let f = parse_formula("!(X l)").unwrap();
        let mut arena = NnfArena::new();
        let root = arena.from_formula(&f, Dialect::Ltlf);
        let mut prog = Progression::new(arena);
        let s0 = prog.initial(root);
        let (_, accepted) = prog.step(&s0, &letter(&["l"]));
        assert!(accepted);
    }

    #[test]
    fn dnf_or_and_absorption() {
        let a = Dnf::unit(1);
        let b = Dnf::unit(2);
        let ab = a.and(&b);
        // a | (a & b) minimizes to a
        assert_eq!(a.or(&ab), a);
        assert!(Dnf::tru().is_true());
        assert_eq!(Dnf::fals().and(&a), Dnf::fals());
        assert_eq!(Dnf::tru().and(&a), a);
    }
}
