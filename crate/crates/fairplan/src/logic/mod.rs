//! Formula representation, parsing and exact LTL/LTLf semantics over finite
//! traces and lassos, plus materialization of the state-action fairness
//! assumption of a domain as an LTL formula.

mod eval;
mod nnf;
mod parser;

pub(crate) use nnf::{NnfArena, NnfId, NnfNode, ProgState, Progression};
pub use parser::parse_formula;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A trace letter: the set of propositions (fluents and action variables)
/// holding at one position.
pub type Letter = BTreeSet<String>;

/// Builds a letter from string slices.
pub fn letter(props: &[&str]) -> Letter {
    props.iter().map(|p| p.to_string()).collect()
}

/// Interpretation dialect for a formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    /// Infinite-trace semantics.
    Ltl,
    /// Finite-trace semantics; over infinite traces a formula holds iff some
    /// finite prefix satisfies it.
    Ltlf,
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dialect::Ltl => write!(f, "ltl"),
            Dialect::Ltlf => write!(f, "ltlf"),
        }
    }
}

/// Abstract syntax tree of an LTL/LTLf formula.
///
/// Children are reference-counted so that builders can share common
/// subformulas; structural equality is used everywhere, sharing only affects
/// memory and [`Formula::dag_size`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Next(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
    /// Dual of until; not produced by the parser, only by normalization
    /// internals and negation pushing.
    Release(Arc<Formula>, Arc<Formula>),
    Eventually(Arc<Formula>),
    Always(Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Arc::from(name))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Arc::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Arc::new(a), Arc::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Formula::Release(Arc::new(a), Arc::new(b))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Arc::new(f))
    }

    pub fn always(f: Formula) -> Formula {
        Formula::Always(Arc::new(f))
    }

    /// `X^k f`.
    pub fn next_n(k: usize, f: Formula) -> Formula {
        let mut out = f;
        for _ in 0..k {
            out = Formula::next(out);
        }
        out
    }

    /// Conjunction of a list; empty list is `true`.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list; empty list is `false`.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Rewrites derived operators (`F`, `G`, `->`, `|`, `R`) into the core
    /// grammar of atoms, `!`, `&`, `X` and `U`. Satisfaction is unchanged on
    /// both finite traces and lassos.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(a.clone()),
            Formula::Not(f) => Formula::not(f.normalize()),
            Formula::And(a, b) => Formula::and(a.normalize(), b.normalize()),
            Formula::Or(a, b) => {
                Formula::not(Formula::and(
                    Formula::not(a.normalize()),
                    Formula::not(b.normalize()),
                ))
            }
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.normalize(), Formula::not(b.normalize())))
            }
            Formula::Next(f) => Formula::next(f.normalize()),
            Formula::Until(a, b) => Formula::until(a.normalize(), b.normalize()),
            Formula::Release(a, b) => Formula::not(Formula::until(
                Formula::not(a.normalize()),
                Formula::not(b.normalize()),
            )),
            Formula::Eventually(f) => Formula::until(Formula::True, f.normalize()),
            Formula::Always(f) => Formula::not(Formula::until(
                Formula::True,
                Formula::not(f.normalize()),
            )),
        }
    }

    /// All atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                out.insert(a.to_string());
            }
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                f.collect_atoms(out)
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of AST nodes, counting shared subtrees once per occurrence.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Next(f) | Formula::Eventually(f) | Formula::Always(f) => {
                1 + f.node_count()
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Number of structurally distinct subformulas.
    pub fn dag_size(&self) -> usize {
        let mut seen: std::collections::HashSet<&Formula> = std::collections::HashSet::new();
        fn walk<'a>(f: &'a Formula, seen: &mut std::collections::HashSet<&'a Formula>) {
            if !seen.insert(f) {
                return;
            }
            match f {
                Formula::True | Formula::False | Formula::Atom(_) => {}
                Formula::Not(g)
                | Formula::Next(g)
                | Formula::Eventually(g)
                | Formula::Always(g) => walk(g, seen),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Until(a, b)
                | Formula::Release(a, b) => {
                    walk(a, seen);
                    walk(b, seen);
                }
            }
        }
        walk(self, &mut seen);
        seen.len()
    }

    /// True when the formula is a Boolean combination of atoms (no temporal
    /// operators).
    pub fn is_boolean(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_boolean(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_boolean() && b.is_boolean()
            }
            Formula::Next(_)
            | Formula::Until(..)
            | Formula::Release(..)
            | Formula::Eventually(_)
            | Formula::Always(_) => false,
        }
    }

    /// Evaluates a Boolean (non-temporal) formula against a single letter.
    /// Temporal nodes evaluate as on the one-letter trace.
    pub fn eval_boolean(&self, letter: &Letter) -> bool {
        eval::eval_ltlf_finite(std::slice::from_ref(letter), self)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Fully parenthesized except for atoms and constants; round-trips
        // through the parser.
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(a) => write!(f, "{}", a),
            Formula::Not(g) => write!(f, "!({})", g),
            Formula::And(a, b) => write!(f, "({} & {})", a, b),
            Formula::Or(a, b) => write!(f, "({} | {})", a, b),
            Formula::Implies(a, b) => write!(f, "({} -> {})", a, b),
            Formula::Next(g) => write!(f, "X ({})", g),
            Formula::Until(a, b) => write!(f, "({} U {})", a, b),
            Formula::Release(a, b) => write!(f, "!((!({}) U !({})))", a, b),
            Formula::Eventually(g) => write!(f, "F ({})", g),
            Formula::Always(g) => write!(f, "G ({})", g),
        }
    }
}

/// An ultimately periodic infinite word `prefix . cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    /// New lasso; panics if the cycle is empty (a lasso denotes an infinite
    /// word).
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Lasso {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    /// Letter at absolute position `i` of the denoted infinite word.
    pub fn letter_at(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Total number of distinct positions (prefix plus one cycle unrolling).
    pub fn span(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// The same infinite word with the cycle unrolled `k` extra times into
    /// the prefix. Useful for checking representation independence.
    pub fn unroll(&self, k: usize) -> Lasso {
        let mut prefix = self.prefix.clone();
        for _ in 0..k {
            prefix.extend(self.cycle.iter().cloned());
        }
        Lasso::new(prefix, self.cycle.clone())
    }
}

pub use eval::{eval_ltl_lasso, eval_ltlf_finite};

/// Errors from the logic layer.
#[derive(Debug, thiserror::Error)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// Materializes the state-action fairness assumption of a domain: one
/// conjunct `G F (s & a) -> G F (s & a & X s')` per transition, where the
/// state and action literals are complete conjunctions of positive and
/// negative propositions over the domain's declared fluents and action
/// variables. An empty transition relation yields `true`.
pub fn emit_fairness_formula(domain: &crate::domain::Domain) -> Formula {
    let state_lit = |state: &Letter| -> Formula {
        Formula::conj(domain.fluents.iter().map(|p| {
            if state.contains(p) {
                Formula::atom(p)
            } else {
                Formula::not(Formula::atom(p))
            }
        }))
    };
    let action_lit = |act: &Letter| -> Formula {
        Formula::conj(domain.action_vars.iter().map(|p| {
            if act.contains(p) {
                Formula::atom(p)
            } else {
                Formula::not(Formula::atom(p))
            }
        }))
    };

    Formula::conj(domain.transitions().map(|(s, a, s2)| {
        let premise = Formula::always(Formula::eventually(Formula::and(
            state_lit(s),
            action_lit(a),
        )));
        let conclusion = Formula::always(Formula::eventually(Formula::and(
            Formula::and(state_lit(s), action_lit(a)),
            Formula::next(state_lit(s2)),
        )));
        Formula::implies(premise, conclusion)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn psi1() -> Formula {
        parse_formula("F (l & X X l)").unwrap()
    }

    #[test]
    fn normalization_removes_derived_operators() {
        let f = parse_formula("F (a -> G b) | c").unwrap();
        let n = f.normalize();
        fn core_only(f: &Formula) -> bool {
            match f {
                Formula::True | Formula::False | Formula::Atom(_) => true,
                Formula::Not(g) | Formula::Next(g) => core_only(g),
                Formula::And(a, b) | Formula::Until(a, b) => core_only(a) && core_only(b),
                _ => false,
            }
        }
        assert!(core_only(&n));
    }

    #[test]
    fn atoms_and_counts() {
        let f = psi1();
        assert_eq!(f.atoms().into_iter().collect::<Vec<_>>(), vec!["l"]);
        assert!(f.node_count() >= 5);
        assert!(f.dag_size() <= f.node_count());
    }

    #[test]
    fn lasso_indexing_wraps() {
        let w = Lasso::new(vec![letter(&["a"])], vec![letter(&["b"]), letter(&["c"])]);
        assert!(w.letter_at(0).contains("a"));
        assert!(w.letter_at(1).contains("b"));
        assert!(w.letter_at(2).contains("c"));
        assert!(w.letter_at(3).contains("b"));
        assert_eq!(w.span(), 3);
    }
}
