//! Exact satisfaction checking: finite traces by dynamic programming over
//! positions and subformulas, lassos by fixpoint evaluation around the loop
//! (LTL) or residual progression with cycle detection (LTLf prefix
//! semantics).

use std::collections::HashMap;

use super::nnf::{NnfArena, Progression};
use super::{Dialect, Formula, Lasso, Letter};

/// Formula compiled to a flat arena with structural sharing; node ids are
/// topologically ordered (children before parents).
pub(crate) struct Compiled {
    pub nodes: Vec<Node>,
    pub root: u32,
    pub props: Vec<String>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    True,
    False,
    Atom(u32),
    Not(u32),
    And(u32, u32),
    Or(u32, u32),
    Implies(u32, u32),
    Next(u32),
    Until(u32, u32),
    Release(u32, u32),
    Eventually(u32),
    Always(u32),
}

impl Compiled {
    pub fn compile(f: &Formula) -> Compiled {
        let mut c = Compiled {
            nodes: Vec::new(),
            root: 0,
            props: Vec::new(),
        };
        let mut node_map: HashMap<Node, u32> = HashMap::new();
        let mut prop_map: HashMap<String, u32> = HashMap::new();
        // Memo keyed by pointer-shared subtrees to avoid re-walking DAGs.
        let mut seen: HashMap<*const Formula, u32> = HashMap::new();
        c.root = c.walk(f, &mut node_map, &mut prop_map, &mut seen);
        c
    }

    fn intern(&mut self, n: Node, map: &mut HashMap<Node, u32>) -> u32 {
        if let Some(&id) = map.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n.clone());
        map.insert(n, id);
        id
    }

    fn walk(
        &mut self,
        f: &Formula,
        map: &mut HashMap<Node, u32>,
        props: &mut HashMap<String, u32>,
        seen: &mut HashMap<*const Formula, u32>,
    ) -> u32 {
        let key = f as *const Formula;
        if let Some(&id) = seen.get(&key) {
            return id;
        }
        let id = match f {
            Formula::True => self.intern(Node::True, map),
            Formula::False => self.intern(Node::False, map),
            Formula::Atom(a) => {
                let p = if let Some(&p) = props.get(a.as_ref()) {
                    p
                } else {
                    let p = self.props.len() as u32;
                    self.props.push(a.to_string());
                    props.insert(a.to_string(), p);
                    p
                };
                self.intern(Node::Atom(p), map)
            }
            Formula::Not(g) => {
                let g = self.walk(g, map, props, seen);
                self.intern(Node::Not(g), map)
            }
            Formula::Next(g) => {
                let g = self.walk(g, map, props, seen);
                self.intern(Node::Next(g), map)
            }
            Formula::Eventually(g) => {
                let g = self.walk(g, map, props, seen);
                self.intern(Node::Eventually(g), map)
            }
            Formula::Always(g) => {
                let g = self.walk(g, map, props, seen);
                self.intern(Node::Always(g), map)
            }
            Formula::And(a, b) => {
                let a = self.walk(a, map, props, seen);
                let b = self.walk(b, map, props, seen);
                self.intern(Node::And(a, b), map)
            }
            Formula::Or(a, b) => {
                let a = self.walk(a, map, props, seen);
                let b = self.walk(b, map, props, seen);
                self.intern(Node::Or(a, b), map)
            }
            Formula::Implies(a, b) => {
                let a = self.walk(a, map, props, seen);
                let b = self.walk(b, map, props, seen);
                self.intern(Node::Implies(a, b), map)
            }
            Formula::Until(a, b) => {
                let a = self.walk(a, map, props, seen);
                let b = self.walk(b, map, props, seen);
                self.intern(Node::Until(a, b), map)
            }
            Formula::Release(a, b) => {
                let a = self.walk(a, map, props, seen);
                let b = self.walk(b, map, props, seen);
                self.intern(Node::Release(a, b), map)
            }
        };
        seen.insert(key, id);
        id
    }

    /// prop-presence bitmap per position for a sequence of letters.
    fn prop_table(&self, letters: &[&Letter]) -> Vec<Vec<bool>> {
        letters
            .iter()
            .map(|letter| {
                self.props
                    .iter()
                    .map(|p| letter.contains(p.as_str()))
                    .collect()
            })
            .collect()
    }
}

/// Finite-trace satisfaction at position 0. `X` is strong: `X f` is false at
/// the last position. Total on all inputs; an empty trace never satisfies
/// anything except `true`-rooted Boolean tautologies evaluated vacuously —
/// callers maintain the nonempty-trace invariant.
pub fn eval_ltlf_finite(trace: &[Letter], f: &Formula) -> bool {
    assert!(!trace.is_empty(), "finite traces have length >= 1");
    let c = Compiled::compile(f);
    let refs: Vec<&Letter> = trace.iter().collect();
    let table = c.prop_table(&refs);
    let n = trace.len();
    let num = c.nodes.len();
    // vals[j * num + id]
    let mut vals = vec![false; n * num];
    for j in (0..n).rev() {
        for (id, node) in c.nodes.iter().enumerate() {
            let v = match node {
                Node::True => true,
                Node::False => false,
                Node::Atom(p) => table[j][*p as usize],
                Node::Not(g) => !vals[j * num + *g as usize],
                Node::And(a, b) => vals[j * num + *a as usize] && vals[j * num + *b as usize],
                Node::Or(a, b) => vals[j * num + *a as usize] || vals[j * num + *b as usize],
                Node::Implies(a, b) => !vals[j * num + *a as usize] || vals[j * num + *b as usize],
                Node::Next(g) => j + 1 < n && vals[(j + 1) * num + *g as usize],
                Node::Until(a, b) => {
                    vals[j * num + *b as usize]
                        || (vals[j * num + *a as usize] && j + 1 < n && vals[(j + 1) * num + id])
                }
                Node::Release(a, b) => {
                    // dual of until on finite traces: b holds up to and
                    // including the first a, or through the end of the trace
                    vals[j * num + *b as usize]
                        && (vals[j * num + *a as usize]
                            || j + 1 == n
                            || vals[(j + 1) * num + id])
                }
                Node::Eventually(g) => {
                    vals[j * num + *g as usize] || (j + 1 < n && vals[(j + 1) * num + id])
                }
                Node::Always(g) => {
                    vals[j * num + *g as usize] && (j + 1 == n || vals[(j + 1) * num + id])
                }
            };
            vals[j * num + id] = v;
        }
    }
    vals[c.root as usize]
}

/// Exact satisfaction of `prefix . cycle^ω` against `f`.
///
/// For LTL this evaluates subformulas over the lasso shape, solving until as
/// a least fixpoint (and always/release as greatest fixpoints) around the
/// loop. For LTLf it decides whether some finite prefix of the infinite word
/// satisfies `f`, by progressing residual formulas letter by letter until a
/// prefix is accepted or the (loop position, residual) state repeats, which
/// is conclusive.
pub fn eval_ltl_lasso(w: &Lasso, f: &Formula, dialect: Dialect) -> bool {
    match dialect {
        Dialect::Ltl => eval_ltl_lasso_infinite(w, f),
        Dialect::Ltlf => eval_ltlf_lasso_prefix(w, f),
    }
}

fn eval_ltl_lasso_infinite(w: &Lasso, f: &Formula) -> bool {
    let c = Compiled::compile(f);
    let n = w.span();
    let p = w.prefix.len();
    let succ = |j: usize| -> usize {
        if j + 1 < n {
            j + 1
        } else {
            p
        }
    };
    let refs: Vec<&Letter> = (0..n).map(|i| w.letter_at(i)).collect();
    let table = c.prop_table(&refs);
    let num = c.nodes.len();
    let mut vals = vec![false; n * num];
    // Children-first node order lets each temporal node run its own loop
    // fixpoint with child values already final.
    for (id, node) in c.nodes.iter().enumerate() {
        match node {
            Node::True => (0..n).for_each(|j| vals[j * num + id] = true),
            Node::False => {}
            Node::Atom(pr) => (0..n).for_each(|j| vals[j * num + id] = table[j][*pr as usize]),
            Node::Not(g) => {
                (0..n).for_each(|j| vals[j * num + id] = !vals[j * num + *g as usize])
            }
            Node::And(a, b) => (0..n).for_each(|j| {
                vals[j * num + id] = vals[j * num + *a as usize] && vals[j * num + *b as usize]
            }),
            Node::Or(a, b) => (0..n).for_each(|j| {
                vals[j * num + id] = vals[j * num + *a as usize] || vals[j * num + *b as usize]
            }),
            Node::Implies(a, b) => (0..n).for_each(|j| {
                vals[j * num + id] = !vals[j * num + *a as usize] || vals[j * num + *b as usize]
            }),
            Node::Next(g) => {
                (0..n).for_each(|j| vals[j * num + id] = vals[succ(j) * num + *g as usize])
            }
            Node::Until(a, b) => {
                // least fixpoint: start false, propagate backwards until stable
                loop {
                    let mut changed = false;
                    for j in (0..n).rev() {
                        let v = vals[j * num + *b as usize]
                            || (vals[j * num + *a as usize] && vals[succ(j) * num + id]);
                        if v != vals[j * num + id] {
                            vals[j * num + id] = v;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
            Node::Eventually(g) => loop {
                let mut changed = false;
                for j in (0..n).rev() {
                    let v = vals[j * num + *g as usize] || vals[succ(j) * num + id];
                    if v != vals[j * num + id] {
                        vals[j * num + id] = v;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            },
            Node::Release(a, b) => {
                // greatest fixpoint: start true, shrink until stable
                let (a, b) = (*a as usize, *b as usize);
                (0..n).for_each(|j| vals[j * num + id] = true);
                loop {
                    let mut changed = false;
                    for j in (0..n).rev() {
                        let v = vals[j * num + b] && (vals[j * num + a] || vals[succ(j) * num + id]);
                        if v != vals[j * num + id] {
                            vals[j * num + id] = v;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
            Node::Always(g) => {
                let g = *g as usize;
                (0..n).for_each(|j| vals[j * num + id] = true);
                loop {
                    let mut changed = false;
                    for j in (0..n).rev() {
                        let v = vals[j * num + g] && vals[succ(j) * num + id];
                        if v != vals[j * num + id] {
                            vals[j * num + id] = v;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
        }
    }
    vals[c.root as usize]
}

fn eval_ltlf_lasso_prefix(w: &Lasso, f: &Formula) -> bool {
    let mut arena = NnfArena::new();
    let root = arena.from_formula(f, Dialect::Ltlf);
    let mut prog = Progression::new(arena);
    let mut state = prog.initial(root);

    // Walk the prefix; a prefix of length k satisfies f iff the transition
    // consuming letter k-1 reports acceptance.
    for letter in &w.prefix {
        let (next, accepted) = prog.step(&state, letter);
        if accepted {
            return true;
        }
        state = next;
    }
    // Walk the cycle until (position in cycle, residual) repeats.
    let mut seen: HashMap<(usize, u64), ()> = HashMap::new();
    let mut pos = 0usize;
    loop {
        let key = (pos, prog.state_fingerprint(&state));
        if seen.contains_key(&key) {
            return false;
        }
        seen.insert(key, ());
        let (next, accepted) = prog.step(&state, &w.cycle[pos]);
        if accepted {
            return true;
        }
        state = next;
        pos = (pos + 1) % w.cycle.len();
    }
}
