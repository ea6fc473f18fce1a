//! Explicit-state FOND domain model: states and actions as proposition
//! sets, traces and lassos, state-action fairness checking, policies, and
//! the synchronous product with a deterministic Rabin automaton.

mod io;
mod policy;
mod product;

pub use io::DomainDoc;
pub use policy::{
    run_policy, AlternatingSelector, FixedSelector, PolicyMachine, ScriptedSelector,
    SuccessorSelector,
};
pub use product::{product, product_domain, RabinGame};

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{Lasso, Letter};

/// Errors from domain construction and trace validation.
#[derive(Debug, thiserror::Error)]
pub enum DomainError {
    #[error("proposition '{0}' declared both as fluent and action variable")]
    NonDisjoint(String),
    #[error("unknown proposition '{0}'")]
    UnknownProp(String),
    #[error("initial state is not in the state list")]
    BadInit,
    #[error("transition endpoint not in declared states/actions: {0}")]
    DanglingTransition(String),
    #[error("state {{{0}}} has no applicable action")]
    NoApplicableAction(String),
    #[error("duplicate state or action entry: {{{0}}}")]
    Duplicate(String),
    #[error("letter at position {0} is not a (state, action) letter of the domain")]
    BadLetter(usize),
    #[error("trace step at position {0} does not follow the transition relation")]
    BadStep(usize),
    #[error("trace is not anchored at the initial state")]
    NotAnchored,
    #[error("policy selects inapplicable or unknown action at memory {0}")]
    BadPolicyAction(usize),
    #[error("policy has no entry for memory {mem} and a reachable state")]
    PolicyIncomplete { mem: usize },
    #[error("selector returned a non-successor state")]
    BadSelection,
    #[error("automaton alphabet is missing a realizable domain letter")]
    AlphabetGap,
    #[error("malformed document: {0}")]
    Document(String),
}

/// A fully observable nondeterministic planning domain with explicit states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    /// Declared fluents, sorted.
    pub fluents: Vec<String>,
    /// Declared action variables, sorted, disjoint from the fluents.
    pub action_vars: Vec<String>,
    states: Vec<Letter>,
    actions: Vec<Letter>,
    init: usize,
    /// succ[s][a] = sorted successor state ids; empty means inapplicable.
    succ: Vec<Vec<Vec<usize>>>,
}

impl Domain {
    /// Builds and validates a domain from explicit parts. Every state must
    /// have at least one applicable action.
    pub fn new(
        fluents: Vec<String>,
        action_vars: Vec<String>,
        states: Vec<Letter>,
        actions: Vec<Letter>,
        init: Letter,
        transitions: Vec<(Letter, Letter, Vec<Letter>)>,
    ) -> Result<Domain, DomainError> {
        let mut fluents = fluents;
        let mut action_vars = action_vars;
        fluents.sort();
        fluents.dedup();
        action_vars.sort();
        action_vars.dedup();
        for a in &action_vars {
            if fluents.binary_search(a).is_ok() {
                return Err(DomainError::NonDisjoint(a.clone()));
            }
        }
        let fluent_set: BTreeSet<&str> = fluents.iter().map(|s| s.as_str()).collect();
        let avar_set: BTreeSet<&str> = action_vars.iter().map(|s| s.as_str()).collect();

        let mut states = states;
        states.sort();
        let mut actions = actions;
        actions.sort();
        for w in states.windows(2) {
            if w[0] == w[1] {
                return Err(DomainError::Duplicate(join(&w[0])));
            }
        }
        for w in actions.windows(2) {
            if w[0] == w[1] {
                return Err(DomainError::Duplicate(join(&w[0])));
            }
        }
        for s in &states {
            for p in s {
                if !fluent_set.contains(p.as_str()) {
                    return Err(DomainError::UnknownProp(p.clone()));
                }
            }
        }
        for a in &actions {
            for p in a {
                if !avar_set.contains(p.as_str()) {
                    return Err(DomainError::UnknownProp(p.clone()));
                }
            }
        }
        let state_idx: BTreeMap<&Letter, usize> =
            states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let action_idx: BTreeMap<&Letter, usize> =
            actions.iter().enumerate().map(|(i, a)| (a, i)).collect();
        let init = *state_idx.get(&init).ok_or(DomainError::BadInit)?;

        let mut succ = vec![vec![Vec::new(); actions.len()]; states.len()];
        for (from, act, outs) in &transitions {
            let s = *state_idx
                .get(from)
                .ok_or_else(|| DomainError::DanglingTransition(join(from)))?;
            let a = *action_idx
                .get(act)
                .ok_or_else(|| DomainError::DanglingTransition(join(act)))?;
            for out in outs {
                let t = *state_idx
                    .get(out)
                    .ok_or_else(|| DomainError::DanglingTransition(join(out)))?;
                succ[s][a].push(t);
            }
        }
        for row in &mut succ {
            for outs in row.iter_mut() {
                outs.sort_unstable();
                outs.dedup();
            }
        }
        let d = Domain {
            fluents,
            action_vars,
            states,
            actions,
            init,
            succ,
        };
        for s in 0..d.states.len() {
            if d.applicable(s).next().is_none() {
                return Err(DomainError::NoApplicableAction(join(&d.states[s])));
            }
        }
        Ok(d)
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn states(&self) -> &[Letter] {
        &self.states
    }

    pub fn actions(&self) -> &[Letter] {
        &self.actions
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn state(&self, s: usize) -> &Letter {
        &self.states[s]
    }

    pub fn action(&self, a: usize) -> &Letter {
        &self.actions[a]
    }

    /// Sorted successor ids of `(s, a)`; empty when inapplicable.
    pub fn successors(&self, s: usize, a: usize) -> &[usize] {
        &self.succ[s][a]
    }

    /// Ids of actions applicable in `s`, ascending.
    pub fn applicable(&self, s: usize) -> impl Iterator<Item = usize> + '_ {
        self.succ[s]
            .iter()
            .enumerate()
            .filter(|(_, outs)| !outs.is_empty())
            .map(|(a, _)| a)
    }

    /// Iterates transition triples `(s, a, s')` by ascending index.
    pub fn transitions(&self) -> impl Iterator<Item = (&Letter, &Letter, &Letter)> + '_ {
        self.transition_ids()
            .map(move |(s, a, t)| (&self.states[s], &self.actions[a], &self.states[t]))
    }

    /// Same as [`Domain::transitions`] but over indices.
    pub fn transition_ids(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.states.len()).flat_map(move |s| {
            (0..self.actions.len())
                .flat_map(move |a| self.succ[s][a].iter().map(move |&t| (s, a, t)))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.transition_ids().count()
    }

    /// The trace letter `s ∪ a`.
    pub fn letter_of(&self, s: usize, a: usize) -> Letter {
        let mut l = self.states[s].clone();
        l.extend(self.actions[a].iter().cloned());
        l
    }

    /// All distinct realizable trace letters, sorted. This is the trace
    /// alphabet used when compiling goal automata for this domain.
    pub fn realizable_letters(&self) -> Vec<Letter> {
        let mut set = BTreeSet::new();
        for s in 0..self.states.len() {
            for a in self.applicable(s) {
                set.insert(self.letter_of(s, a));
            }
        }
        set.into_iter().collect()
    }

    /// Decodes a trace letter into `(state id, action id)`.
    pub fn decode_letter(&self, letter: &Letter) -> Option<(usize, usize)> {
        let mut state = Letter::new();
        let mut action = Letter::new();
        for p in letter {
            if self.fluents.binary_search(p).is_ok() {
                state.insert(p.clone());
            } else if self.action_vars.binary_search(p).is_ok() {
                action.insert(p.clone());
            } else {
                return None;
            }
        }
        let s = self.states.binary_search(&state).ok()?;
        let a = self.actions.binary_search(&action).ok()?;
        Some((s, a))
    }

    /// Restricts to the states reachable from the initial state.
    pub fn restrict_to_reachable(&self) -> Domain {
        let mut seen = vec![false; self.states.len()];
        let mut stack = vec![self.init];
        seen[self.init] = true;
        while let Some(s) = stack.pop() {
            for a in self.applicable(s) {
                for &t in self.successors(s, a) {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        let states: Vec<Letter> = self
            .states
            .iter()
            .enumerate()
            .filter(|(i, _)| seen[*i])
            .map(|(_, s)| s.clone())
            .collect();
        let transitions: Vec<(Letter, Letter, Vec<Letter>)> = self
            .transition_ids()
            .filter(|(s, _, t)| seen[*s] && seen[*t])
            .map(|(s, a, t)| {
                (
                    self.states[s].clone(),
                    self.actions[a].clone(),
                    vec![self.states[t].clone()],
                )
            })
            .collect();
        Domain::new(
            self.fluents.clone(),
            self.action_vars.clone(),
            states,
            self.actions.clone(),
            self.states[self.init].clone(),
            transitions,
        )
        .expect("reachable restriction preserves validity")
    }

    /// The three-state counterexample domain: states {l}, {m}, {r}, one
    /// action {a}, transitions l→m, m→l, m→r, r→m.
    pub fn example_d1() -> Domain {
        let f = |names: &[&str]| -> Letter { names.iter().map(|s| s.to_string()).collect() };
        Domain::new(
            vec!["l".into(), "m".into(), "r".into()],
            vec!["a".into()],
            vec![f(&["l"]), f(&["m"]), f(&["r"])],
            vec![f(&["a"])],
            f(&["l"]),
            vec![
                (f(&["l"]), f(&["a"]), vec![f(&["m"])]),
                (f(&["m"]), f(&["a"]), vec![f(&["l"]), f(&["r"])]),
                (f(&["r"]), f(&["a"]), vec![f(&["m"])]),
            ],
        )
        .expect("d1 is well-formed")
    }

    /// The unique memoryless policy of a domain in which every state has
    /// exactly one applicable action; `None` otherwise.
    pub fn unique_policy(&self) -> Option<PolicyMachine> {
        let mut steps = Vec::new();
        for s in 0..self.states.len() {
            let apps: Vec<usize> = self.applicable(s).collect();
            if apps.len() != 1 {
                return None;
            }
            steps.push((
                0usize,
                self.states[s].clone(),
                self.actions[apps[0]].clone(),
                0usize,
            ));
        }
        Some(PolicyMachine::new(1, 0, steps))
    }

    /// Enumerates every domain lasso with prefix length at most
    /// `max_prefix` and cycle length at most `max_cycle`.
    pub fn enumerate_lassos(&self, max_prefix: usize, max_cycle: usize) -> Vec<Lasso> {
        let mut out = Vec::new();
        let mut prefix: Vec<(usize, usize)> = Vec::new();
        self.enum_prefix(self.init, max_prefix, max_cycle, &mut prefix, &mut out);
        out
    }

    fn enum_prefix(
        &self,
        at: usize,
        prefix_budget: usize,
        max_cycle: usize,
        prefix: &mut Vec<(usize, usize)>,
        out: &mut Vec<Lasso>,
    ) {
        let mut cycle: Vec<(usize, usize)> = Vec::new();
        self.enum_cycle(at, at, max_cycle, &mut cycle, prefix, out);
        if prefix_budget == 0 {
            return;
        }
        for a in self.applicable(at) {
            for &t in self.successors(at, a) {
                prefix.push((at, a));
                self.enum_prefix(t, prefix_budget - 1, max_cycle, prefix, out);
                prefix.pop();
            }
        }
    }

    fn enum_cycle(
        &self,
        anchor: usize,
        at: usize,
        budget: usize,
        cycle: &mut Vec<(usize, usize)>,
        prefix: &[(usize, usize)],
        out: &mut Vec<Lasso>,
    ) {
        if budget == 0 {
            return;
        }
        for a in self.applicable(at) {
            for &t in self.successors(at, a) {
                cycle.push((at, a));
                if t == anchor {
                    let u = prefix.iter().map(|&(s, a)| self.letter_of(s, a)).collect();
                    let v = cycle.iter().map(|&(s, a)| self.letter_of(s, a)).collect();
                    out.push(Lasso::new(u, v));
                }
                self.enum_cycle(anchor, t, budget - 1, cycle, prefix, out);
                cycle.pop();
            }
        }
    }
}

fn join(l: &Letter) -> String {
    l.iter().cloned().collect::<Vec<_>>().join(",")
}

/// A lasso validated as a trace of a specific domain, with each letter
/// decoded to its `(state, action)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainLasso {
    lasso: Lasso,
    prefix_sa: Vec<(usize, usize)>,
    cycle_sa: Vec<(usize, usize)>,
}

impl DomainLasso {
    /// Validates anchoring at the initial state, transition consistency of
    /// every consecutive pair including the loop closure, and letter shape.
    pub fn validate(domain: &Domain, lasso: &Lasso) -> Result<DomainLasso, DomainError> {
        let span = lasso.span();
        let mut sa = Vec::with_capacity(span);
        for i in 0..span {
            let letter = lasso.letter_at(i);
            let pair = domain
                .decode_letter(letter)
                .ok_or(DomainError::BadLetter(i))?;
            sa.push(pair);
        }
        if sa[0].0 != domain.init() {
            return Err(DomainError::NotAnchored);
        }
        for (i, &(s, a)) in sa.iter().enumerate() {
            let next = if i + 1 < span {
                sa[i + 1].0
            } else {
                sa[lasso.prefix.len()].0
            };
            if !domain.successors(s, a).contains(&next) {
                return Err(DomainError::BadStep(i));
            }
        }
        let prefix_sa = sa[..lasso.prefix.len()].to_vec();
        let cycle_sa = sa[lasso.prefix.len()..].to_vec();
        Ok(DomainLasso {
            lasso: lasso.clone(),
            prefix_sa,
            cycle_sa,
        })
    }

    pub fn lasso(&self) -> &Lasso {
        &self.lasso
    }

    pub fn prefix_pairs(&self) -> &[(usize, usize)] {
        &self.prefix_sa
    }

    pub fn cycle_pairs(&self) -> &[(usize, usize)] {
        &self.cycle_sa
    }
}

/// True iff the lasso is a state-action fair trace of the domain: every
/// transition `(s,a,s')` whose `(s,a)` occurs in the loop also has its step
/// `(s,a,s')` in the loop. Only the loop matters; the prefix cannot affect
/// what happens infinitely often.
pub fn is_state_action_fair(w: &DomainLasso, domain: &Domain) -> bool {
    let n = w.cycle_sa.len();
    let mut sa_inf: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut step_inf: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    for i in 0..n {
        let (s, a) = w.cycle_sa[i];
        let (s2, _) = w.cycle_sa[(i + 1) % n];
        sa_inf.insert((s, a));
        step_inf.insert((s, a, s2));
    }
    for (s, a, t) in domain.transition_ids() {
        if sa_inf.contains(&(s, a)) && !step_inf.contains(&(s, a, t)) {
            return false;
        }
    }
    true
}

/// Seeded random small domain for property suites: distinct singleton-coded
/// states, every state given at least one applicable action.
pub fn random_domain<R: rand::Rng>(
    rng: &mut R,
    max_states: usize,
    max_actions: usize,
    max_outcomes: usize,
) -> Domain {
    let ns = rng.gen_range(2..=max_states.max(2));
    let na = rng.gen_range(1..=max_actions.max(1));
    let fluents: Vec<String> = (0..ns).map(|i| format!("p{}", i)).collect();
    let avars: Vec<String> = (0..na).map(|i| format!("x{}", i)).collect();
    let states: Vec<Letter> = (0..ns)
        .map(|i| [fluents[i].clone()].into_iter().collect())
        .collect();
    let actions: Vec<Letter> = (0..na)
        .map(|i| [avars[i].clone()].into_iter().collect())
        .collect();
    let mut transitions = Vec::new();
    for s in 0..ns {
        let napp = rng.gen_range(1..=na);
        let mut acts: Vec<usize> = (0..na).collect();
        for i in (1..acts.len()).rev() {
            acts.swap(i, rng.gen_range(0..=i));
        }
        for &a in acts.iter().take(napp) {
            let nouts = rng.gen_range(1..=max_outcomes.max(1));
            let mut outs = BTreeSet::new();
            for _ in 0..nouts {
                outs.insert(rng.gen_range(0..ns));
            }
            transitions.push((
                states[s].clone(),
                actions[a].clone(),
                outs.iter().map(|&t| states[t].clone()).collect(),
            ));
        }
    }
    Domain::new(
        fluents,
        avars,
        states.clone(),
        actions,
        states[0].clone(),
        transitions,
    )
    .expect("random domain construction is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::letter;

    fn tau1() -> Lasso {
        Lasso::new(
            vec![],
            vec![
                letter(&["l", "a"]),
                letter(&["m", "a"]),
                letter(&["r", "a"]),
                letter(&["m", "a"]),
            ],
        )
    }

    #[test]
    fn d1_shape() {
        let d = Domain::example_d1();
        assert_eq!(d.state_count(), 3);
        assert_eq!(d.transition_count(), 4);
        assert_eq!(d.realizable_letters().len(), 3);
    }

    #[test]
    fn tau1_is_a_fair_trace_of_d1() {
        let d = Domain::example_d1();
        let w = DomainLasso::validate(&d, &tau1()).unwrap();
        assert!(is_state_action_fair(&w, &d));
    }

    #[test]
    fn lm_cycle_is_unfair_in_d1() {
        // (l m)^ω takes (m,a) forever but never realizes m→r
        let d = Domain::example_d1();
        let w = Lasso::new(vec![], vec![letter(&["l", "a"]), letter(&["m", "a"])]);
        let w = DomainLasso::validate(&d, &w).unwrap();
        assert!(!is_state_action_fair(&w, &d));
    }

    #[test]
    fn deterministic_domains_are_always_fair() {
        let f = |names: &[&str]| -> Letter { names.iter().map(|s| s.to_string()).collect() };
        let d = Domain::new(
            vec!["p".into(), "q".into()],
            vec!["go".into()],
            vec![f(&["p"]), f(&["q"])],
            vec![f(&["go"])],
            f(&["p"]),
            vec![
                (f(&["p"]), f(&["go"]), vec![f(&["q"])]),
                (f(&["q"]), f(&["go"]), vec![f(&["p"])]),
            ],
        )
        .unwrap();
        for w in d.enumerate_lassos(3, 4) {
            let w = DomainLasso::validate(&d, &w).unwrap();
            assert!(is_state_action_fair(&w, &d));
        }
    }

    #[test]
    fn validation_rejects_bad_traces() {
        let d = Domain::example_d1();
        // not anchored at l
        let w = Lasso::new(vec![], vec![letter(&["m", "a"]), letter(&["l", "a"])]);
        assert!(matches!(
            DomainLasso::validate(&d, &w),
            Err(DomainError::NotAnchored)
        ));
        // l -> r is not a transition
        let w = Lasso::new(
            vec![letter(&["l", "a"])],
            vec![
                letter(&["r", "a"]),
                letter(&["m", "a"]),
                letter(&["l", "a"]),
                letter(&["m", "a"]),
            ],
        );
        assert!(matches!(
            DomainLasso::validate(&d, &w),
            Err(DomainError::BadStep(_))
        ));
    }

    #[test]
    fn fairness_formula_agrees_with_checker_on_d1() {
        use crate::logic::{emit_fairness_formula, eval_ltl_lasso, Dialect};
        let d = Domain::example_d1();
        let phi = emit_fairness_formula(&d);
        for w in d.enumerate_lassos(3, 5) {
            let dl = DomainLasso::validate(&d, &w).unwrap();
            assert_eq!(
                eval_ltl_lasso(&w, &phi, Dialect::Ltl),
                is_state_action_fair(&dl, &d),
                "fairness mismatch on {:?}",
                w
            );
        }
    }

    #[test]
    fn fairness_formula_shape() {
        use crate::logic::{emit_fairness_formula, Formula};
        let d = Domain::example_d1();
        let phi = emit_fairness_formula(&d);
        fn count_conjuncts(f: &Formula) -> usize {
            match f {
                Formula::And(a, b) => count_conjuncts(a) + count_conjuncts(b),
                _ => 1,
            }
        }
        // one implication conjunct per transition
        assert_eq!(count_conjuncts(&phi), 4);
    }

    #[test]
    fn random_domains_are_valid_and_enumerable() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d = random_domain(&mut rng, 4, 2, 2);
            for s in 0..d.state_count() {
                assert!(d.applicable(s).next().is_some());
            }
            for w in d.enumerate_lassos(2, 3) {
                DomainLasso::validate(&d, &w).unwrap();
            }
        }
    }
}
