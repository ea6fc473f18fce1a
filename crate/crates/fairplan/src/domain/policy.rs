//! Finite-state policies (Mealy-style over domain states) and the driver
//! that runs a policy against an environment-choice selector until the
//! joint configuration repeats, producing a lasso.

use std::collections::{BTreeMap, HashMap};
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::{Domain, DomainError, DomainLasso};
use crate::logic::{Lasso, Letter};

pub const POLICY_FORMAT: &str = "fairplan.policy/1";

/// Finite-state representation of a policy: on reading a domain state it
/// outputs an action and updates its memory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyMachine {
    memory: usize,
    init: usize,
    steps: BTreeMap<(usize, Letter), (Letter, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolicyDoc {
    format: String,
    memory: usize,
    init: usize,
    step: Vec<PolicyStepDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolicyStepDoc {
    mem: usize,
    state: Vec<String>,
    act: Vec<String>,
    next_mem: usize,
}

impl PolicyMachine {
    /// Builds from (memory, state, action, next_memory) rows. Later rows for
    /// the same (memory, state) key overwrite earlier ones.
    pub fn new(memory: usize, init: usize, rows: Vec<(usize, Letter, Letter, usize)>) -> Self {
        let mut steps = BTreeMap::new();
        for (m, s, a, n) in rows {
            steps.insert((m, s), (a, n));
        }
        PolicyMachine {
            memory,
            init,
            steps,
        }
    }

    pub fn memory_size(&self) -> usize {
        self.memory
    }

    pub fn initial_memory(&self) -> usize {
        self.init
    }

    /// Output action and next memory for (memory, state), if defined.
    pub fn step(&self, mem: usize, state: &Letter) -> Option<&(Letter, usize)> {
        self.steps.get(&(mem, state.clone()))
    }

    /// Checks the policy against a domain: every defined output must be an
    /// applicable action of the read state.
    pub fn validate(&self, domain: &Domain) -> Result<(), DomainError> {
        for ((mem, state), (act, next)) in &self.steps {
            if *next >= self.memory || *mem >= self.memory {
                return Err(DomainError::BadPolicyAction(*mem));
            }
            let s = domain
                .states()
                .binary_search(state)
                .map_err(|_| DomainError::BadPolicyAction(*mem))?;
            let a = domain
                .actions()
                .binary_search(act)
                .map_err(|_| DomainError::BadPolicyAction(*mem))?;
            if domain.successors(s, a).is_empty() {
                return Err(DomainError::BadPolicyAction(*mem));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let doc = PolicyDoc {
            format: POLICY_FORMAT.to_string(),
            memory: self.memory,
            init: self.init,
            step: self
                .steps
                .iter()
                .map(|((m, s), (a, n))| PolicyStepDoc {
                    mem: *m,
                    state: s.iter().cloned().collect(),
                    act: a.iter().cloned().collect(),
                    next_mem: *n,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("policy serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<PolicyMachine, DomainError> {
        let doc: PolicyDoc =
            serde_json::from_str(text).map_err(|e| DomainError::Document(e.to_string()))?;
        if doc.format != POLICY_FORMAT {
            return Err(DomainError::Document(format!(
                "unsupported format '{}', expected '{}'",
                doc.format, POLICY_FORMAT
            )));
        }
        Ok(PolicyMachine::new(
            doc.memory,
            doc.init,
            doc.step
                .into_iter()
                .map(|s| {
                    (
                        s.mem,
                        s.state.into_iter().collect(),
                        s.act.into_iter().collect(),
                        s.next_mem,
                    )
                })
                .collect(),
        ))
    }
}

/// Resolves the environment's choice among nondeterministic outcomes.
/// Selectors carry internal state; the driver uses `fingerprint` to detect
/// when the joint (state, memory, selector) configuration repeats.
pub trait SuccessorSelector {
    /// Picks one of `outcomes` (successor state ids of `(s, a)`), returning
    /// the chosen state id.
    fn select(&mut self, s: usize, a: usize, outcomes: &[usize]) -> usize;
    /// Stable digest of the selector's internal state.
    fn fingerprint(&self) -> u64;
}

/// Always picks the outcome at a fixed rank (clamped to the available ones).
#[derive(Debug, Clone)]
pub struct FixedSelector(pub usize);

impl SuccessorSelector for FixedSelector {
    fn select(&mut self, _s: usize, _a: usize, outcomes: &[usize]) -> usize {
        outcomes[self.0.min(outcomes.len() - 1)]
    }
    fn fingerprint(&self) -> u64 {
        self.0 as u64
    }
}

/// Round-robin over the outcomes of each (state, action) pair separately.
#[derive(Debug, Clone, Default)]
pub struct AlternatingSelector {
    counters: BTreeMap<(usize, usize), usize>,
}

impl SuccessorSelector for AlternatingSelector {
    fn select(&mut self, s: usize, a: usize, outcomes: &[usize]) -> usize {
        let c = self.counters.entry((s, a)).or_insert(0);
        let pick = outcomes[*c % outcomes.len()];
        *c = (*c + 1) % outcomes.len();
        pick
    }
    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.counters.hash(&mut h);
        h.finish()
    }
}

/// Cycles through a fixed script of outcome ranks, consuming one entry per
/// genuinely nondeterministic choice; deterministic steps do not advance.
#[derive(Debug, Clone)]
pub struct ScriptedSelector {
    script: Vec<usize>,
    at: usize,
}

impl ScriptedSelector {
    pub fn new(script: Vec<usize>) -> Self {
        assert!(!script.is_empty());
        ScriptedSelector { script, at: 0 }
    }
}

impl SuccessorSelector for ScriptedSelector {
    fn select(&mut self, _s: usize, _a: usize, outcomes: &[usize]) -> usize {
        if outcomes.len() == 1 {
            return outcomes[0];
        }
        let pick = outcomes[self.script[self.at] % outcomes.len()];
        self.at = (self.at + 1) % self.script.len();
        pick
    }
    fn fingerprint(&self) -> u64 {
        self.at as u64
    }
}

/// Runs the policy from the initial state, resolving nondeterminism through
/// the selector, until the (domain state, memory, selector) configuration
/// repeats; returns the resulting lasso trace.
pub fn run_policy(
    domain: &Domain,
    policy: &PolicyMachine,
    selector: &mut dyn SuccessorSelector,
) -> Result<DomainLasso, DomainError> {
    policy.validate(domain)?;
    let mut letters: Vec<Letter> = Vec::new();
    let mut seen: HashMap<(usize, usize, u64), usize> = HashMap::new();
    let mut s = domain.init();
    let mut mem = policy.initial_memory();
    loop {
        let key = (s, mem, selector.fingerprint());
        if let Some(&at) = seen.get(&key) {
            let cycle = letters.split_off(at);
            let lasso = Lasso::new(letters, cycle);
            return DomainLasso::validate(domain, &lasso);
        }
        seen.insert(key, letters.len());
        let (act, next_mem) = policy
            .step(mem, domain.state(s))
            .ok_or(DomainError::PolicyIncomplete { mem })?
            .clone();
        let a = domain
            .actions()
            .binary_search(&act)
            .map_err(|_| DomainError::BadPolicyAction(mem))?;
        let outcomes = domain.successors(s, a);
        if outcomes.is_empty() {
            return Err(DomainError::BadPolicyAction(mem));
        }
        let t = selector.select(s, a, outcomes);
        if !outcomes.contains(&t) {
            return Err(DomainError::BadSelection);
        }
        letters.push(domain.letter_of(s, a));
        s = t;
        mem = next_mem;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::letter;

    #[test]
    fn alternating_selector_reproduces_tau1() {
        // environment alternates m→r then m→l starting with r
        let d = Domain::example_d1();
        let p = d.unique_policy().unwrap();
        // outcomes of (m,a) sorted: [l, m? no: l, r] — ranks: 0=l, 1=r
        let mut sel = ScriptedSelector::new(vec![1, 0]);
        let w = run_policy(&d, &p, &mut sel).unwrap();
        // expected: l m r m repeating (up to rotation of the cycle)
        let expect: Vec<Letter> = vec![
            letter(&["l", "a"]),
            letter(&["m", "a"]),
            letter(&["r", "a"]),
            letter(&["m", "a"]),
        ];
        let got = w.lasso();
        assert_eq!(got.cycle.len(), 4);
        let rotations: Vec<Vec<Letter>> = (0..4)
            .map(|k| (0..4).map(|i| expect[(i + k) % 4].clone()).collect())
            .collect();
        assert!(
            rotations.contains(&got.cycle),
            "cycle {:?} is not a rotation of τ₁",
            got.cycle
        );
    }

    #[test]
    fn fixed_selector_yields_lm_cycle() {
        let d = Domain::example_d1();
        let p = d.unique_policy().unwrap();
        let mut sel = FixedSelector(0); // always m→l (lowest sorted outcome)
        let w = run_policy(&d, &p, &mut sel).unwrap();
        assert_eq!(w.lasso().cycle.len(), 2);
        assert!(!super::super::is_state_action_fair(&w, &d));
    }

    #[test]
    fn deterministic_domain_ignores_selector() {
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
        let p = d.unique_policy().unwrap();
        let a = run_policy(&d, &p, &mut FixedSelector(0)).unwrap();
        let b = run_policy(&d, &p, &mut FixedSelector(1)).unwrap();
        assert_eq!(a.lasso(), b.lasso());
    }

    #[test]
    fn policy_files_round_trip() {
        let d = Domain::example_d1();
        let p = d.unique_policy().unwrap();
        let json = p.to_json();
        let p2 = PolicyMachine::from_json(&json).unwrap();
        assert_eq!(p, p2);
        assert_eq!(json, p2.to_json());
    }

    #[test]
    fn incomplete_policy_is_reported() {
        let d = Domain::example_d1();
        let p = PolicyMachine::new(1, 0, vec![]);
        assert!(matches!(
            run_policy(&d, &p, &mut FixedSelector(0)),
            Err(DomainError::PolicyIncomplete { .. })
        ));
    }
}
