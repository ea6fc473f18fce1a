//! End-to-end planning pipelines: goal compilation, game construction per
//! fairness assumption, solving, policy extraction, and policy verification.
//!
//! The state-action-fair pipeline follows the sound reduction: solve the
//! Rabin game over the product of the domain with the union of the
//! domain's unfair-trace DRW and the goal DRW. The diagnostic naive mode
//! reproduces the published unsound reduction: product the domain with the
//! goal automaton first, then solve the state-action-fair problem on that
//! product with the lifted acceptance condition.

use std::collections::BTreeSet;

use crate::automata::{drw_union, unfair_drw, AutomataError, Drw, RabinPair};
use crate::domain::{product, product_domain, Domain, DomainError, DomainLasso, PolicyMachine};
use crate::games::{self, Winner};
use crate::logic::{Dialect, Formula, Lasso, Letter, LogicError};
use crate::par;
use crate::stochastic::{self, SolveOutcome, StochasticError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fairness {
    None,
    Stochastic,
    StateAction,
}

impl std::fmt::Display for Fairness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Fairness::None => write!(f, "none"),
            Fairness::Stochastic => write!(f, "stochastic"),
            Fairness::StateAction => write!(f, "state-action"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sound,
    NaiveProduct,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error("naive-product mode requires state-action fairness")]
    NaiveNeedsStateAction,
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// state budget for automata constructions
    pub max_states: usize,
    /// sound shortcut for the state-action pipeline: an almost-sure UNSAT
    /// answer implies state-action UNSAT, and an agent win with the goal
    /// pairs alone implies a win with the full pair set
    pub prescreen: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_states: crate::automata::DEFAULT_MAX_STATES,
            prescreen: false,
        }
    }
}

/// Builds the goal DRW over the domain's realizable alphabet.
pub fn goal_automaton(
    domain: &Domain,
    goal: &Formula,
    dialect: Dialect,
    max_states: usize,
) -> Result<Drw, AutomataError> {
    stochastic::goal_drw(domain, goal, dialect, max_states)
}

/// Solves ⟨domain, goal⟩ under the given fairness assumption.
pub fn solve(
    domain: &Domain,
    goal: &Formula,
    dialect: Dialect,
    fairness: Fairness,
    mode: Mode,
    opts: SolveOptions,
) -> Result<SolveOutcome, PipelineError> {
    if mode == Mode::NaiveProduct && fairness != Fairness::StateAction {
        return Err(PipelineError::NaiveNeedsStateAction);
    }
    match (fairness, mode) {
        (Fairness::Stochastic, _) => {
            Ok(stochastic::almost_sure_solve(domain, goal, dialect, opts.max_states)?)
        }
        (Fairness::None, _) => solve_no_fairness(domain, goal, dialect, opts),
        (Fairness::StateAction, Mode::Sound) => solve_state_action(domain, goal, dialect, opts),
        (Fairness::StateAction, Mode::NaiveProduct) => {
            solve_naive_product(domain, goal, dialect, opts)
        }
    }
}

fn solve_no_fairness(
    domain: &Domain,
    goal: &Formula,
    dialect: Dialect,
    opts: SolveOptions,
) -> Result<SolveOutcome, PipelineError> {
    let m = goal_automaton(domain, goal, dialect, opts.max_states)?;
    let game = product(domain, &m)?;
    let cert = games::solve_rabin(&game);
    match cert.winner {
        Winner::Agent => {
            let policy = games::extract_policy(&game, &cert, domain, &m)
                .map_err(|e| PipelineError::Internal(e.to_string()))?;
            Ok(SolveOutcome::Sat(policy))
        }
        Winner::Environment => Ok(SolveOutcome::Unsat),
    }
}

fn solve_state_action(
    domain: &Domain,
    goal: &Formula,
    dialect: Dialect,
    opts: SolveOptions,
) -> Result<SolveOutcome, PipelineError> {
    if opts.prescreen {
        // a finite-state policy solving the state-action-fair problem also
        // enforces the goal almost surely, so almost-sure UNSAT is
        // conclusive here
        let asm = stochastic::almost_sure_solve(domain, goal, dialect, opts.max_states)?;
        if !asm.is_sat() {
            return Ok(SolveOutcome::Unsat);
        }
    }
    let unfair = unfair_drw(domain);
    let goal_m = goal_automaton(domain, goal, dialect, opts.max_states)?;
    let union = drw_union(&unfair, &goal_m)?;
    let game = product(domain, &union)?;
    let goal_pair_range = unfair.index()..union.index();

    if opts.prescreen {
        // winning with the goal pairs alone is monotone-sound for the full
        // pair set
        let mut restricted = game.clone();
        restricted.pairs = game.pairs[goal_pair_range.clone()].to_vec();
        let cert = games::solve_rabin(&restricted);
        if cert.winner == Winner::Agent {
            let policy = games::extract_policy(&restricted, &cert, domain, &union)
                .map_err(|e| PipelineError::Internal(e.to_string()))?;
            return Ok(SolveOutcome::Sat(policy));
        }
    }

    let cert = games::solve_rabin(&game);
    match cert.winner {
        Winner::Agent => {
            let policy = games::extract_policy(&game, &cert, domain, &union)
                .map_err(|e| PipelineError::Internal(e.to_string()))?;
            Ok(SolveOutcome::Sat(policy))
        }
        Winner::Environment => Ok(SolveOutcome::Unsat),
    }
}

/// The published reduction under test: build D' = D × A_goal as a domain,
/// then solve the state-action-fair planning problem ⟨D', Acc⟩ where Acc
/// lifts the goal automaton's acceptance onto the product states. Complete
/// but unsound for state-action fairness.
fn solve_naive_product(
    domain: &Domain,
    goal: &Formula,
    dialect: Dialect,
    opts: SolveOptions,
) -> Result<SolveOutcome, PipelineError> {
    let a_goal = goal_automaton(domain, goal, dialect, opts.max_states)?;
    let pd = product_domain(domain, &a_goal)?;
    let dprime = &pd.domain;

    // automaton state encoded in each product state
    let q_of_state = |letter: &Letter| -> Option<usize> {
        pd.aut_fluents.iter().position(|f| letter.contains(f))
    };

    let unfair = unfair_drw(dprime);
    let mut game = product(dprime, &unfair)?;
    // lift Acc onto the game: for each goal pair, collect agent vertices by
    // the automaton component of their product-domain state
    for pair in &a_goal.pairs {
        let mut inf = BTreeSet::new();
        let mut fin = BTreeSet::new();
        for (i, &(dstate, _)) in game.agent.iter().enumerate() {
            if let Some(q) = q_of_state(dprime.state(dstate)) {
                if pair.inf.contains(&q) {
                    inf.insert(i);
                }
                if pair.fin.contains(&q) {
                    fin.insert(i);
                }
            }
        }
        game.pairs.push(RabinPair { inf, fin });
    }

    let acc_range = unfair.index()..game.pairs.len();
    if opts.prescreen {
        let mut restricted = game.clone();
        restricted.pairs = game.pairs[acc_range].to_vec();
        let cert = games::solve_rabin(&restricted);
        if cert.winner == Winner::Agent {
            let policy = games::extract_policy(&restricted, &cert, dprime, &unfair)
                .map_err(|e| PipelineError::Internal(e.to_string()))?;
            return Ok(SolveOutcome::Sat(policy));
        }
    }
    let cert = games::solve_rabin(&game);
    match cert.winner {
        Winner::Agent => {
            let policy = games::extract_policy(&game, &cert, dprime, &unfair)
                .map_err(|e| PipelineError::Internal(e.to_string()))?;
            Ok(SolveOutcome::Sat(policy))
        }
        Winner::Environment => Ok(SolveOutcome::Unsat),
    }
}

/// Verification verdict; `Pass` is scoped by the bound that was searched.
#[derive(Debug, Clone)]
pub enum VerifyOutcome {
    Pass { bound: usize },
    Fail { witness: Lasso },
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, VerifyOutcome::Pass { .. })
    }
}

/// Audits a policy against a goal. For stochastic fairness the check is the
/// exact bottom-SCC analysis; for the other assumptions it is a bounded
/// exhaustive search over policy-compatible lassos with prefix and cycle
/// lengths up to `bound`, filtered to state-action-fair lassos when that is
/// the assumption. The first counterexample in canonical order is returned.
pub fn verify_policy(
    domain: &Domain,
    policy: &PolicyMachine,
    goal: &Formula,
    dialect: Dialect,
    fairness: Fairness,
    bound: usize,
) -> Result<VerifyOutcome, PipelineError> {
    verify_policy_inner(domain, policy, goal, dialect, fairness, bound, false)
}

/// Sequential twin of [`verify_policy`]; the benches compare the two.
pub fn verify_policy_seq(
    domain: &Domain,
    policy: &PolicyMachine,
    goal: &Formula,
    dialect: Dialect,
    fairness: Fairness,
    bound: usize,
) -> Result<VerifyOutcome, PipelineError> {
    verify_policy_inner(domain, policy, goal, dialect, fairness, bound, true)
}

fn verify_policy_inner(
    domain: &Domain,
    policy: &PolicyMachine,
    goal: &Formula,
    dialect: Dialect,
    fairness: Fairness,
    bound: usize,
    sequential: bool,
) -> Result<VerifyOutcome, PipelineError> {
    policy.validate(domain)?;
    if fairness == Fairness::Stochastic {
        let audit = stochastic::almost_sure_audit(
            domain,
            policy,
            goal,
            dialect,
            crate::automata::DEFAULT_MAX_STATES,
        )?;
        return Ok(match audit {
            Ok(()) => VerifyOutcome::Pass { bound: usize::MAX },
            Err(witness) => VerifyOutcome::Fail { witness },
        });
    }

    // enumerate policy-compatible prefixes in the (state, memory) graph;
    // each prefix is an independent work item that enumerates its anchored
    // cycles
    let mut prefixes: Vec<(Vec<(usize, usize, usize)>, (usize, usize))> = Vec::new();
    // entries: (steps of (state, action, memory-at-step), end node)
    collect_prefixes(
        domain,
        policy,
        domain.init(),
        policy.initial_memory(),
        bound,
        &mut Vec::new(),
        &mut prefixes,
    )?;

    let check = |item: &(Vec<(usize, usize, usize)>, (usize, usize))| -> Option<Lasso> {
        let (prefix_steps, (s_end, m_end)) = item;
        let mut cycles: Vec<Vec<(usize, usize, usize)>> = Vec::new();
        collect_cycles(
            domain,
            policy,
            (*s_end, *m_end),
            (*s_end, *m_end),
            bound,
            &mut Vec::new(),
            &mut cycles,
        );
        for cycle in cycles {
            let u: Vec<Letter> = prefix_steps
                .iter()
                .map(|&(s, a, _)| domain.letter_of(s, a))
                .collect();
            let v: Vec<Letter> = cycle
                .iter()
                .map(|&(s, a, _)| domain.letter_of(s, a))
                .collect();
            let w = Lasso::new(u, v);
            let dl = match DomainLasso::validate(domain, &w) {
                Ok(dl) => dl,
                Err(_) => continue,
            };
            if fairness == Fairness::StateAction
                && !crate::domain::is_state_action_fair(&dl, domain)
            {
                continue;
            }
            if !crate::logic::eval_ltl_lasso(&w, goal, dialect) {
                return Some(w);
            }
        }
        None
    };

    let witness = if sequential {
        par::find_map_seq(&prefixes, check)
    } else {
        par::find_map(&prefixes, check)
    };
    Ok(match witness {
        Some(w) => VerifyOutcome::Fail { witness: w },
        None => VerifyOutcome::Pass { bound },
    })
}

fn collect_prefixes(
    domain: &Domain,
    policy: &PolicyMachine,
    s: usize,
    mem: usize,
    budget: usize,
    steps: &mut Vec<(usize, usize, usize)>,
    out: &mut Vec<(Vec<(usize, usize, usize)>, (usize, usize))>,
) -> Result<(), PipelineError> {
    out.push((steps.clone(), (s, mem)));
    if budget == 0 {
        return Ok(());
    }
    let (act, m2) = match policy.step(mem, domain.state(s)) {
        Some(x) => x.clone(),
        None => return Ok(()), // policy silent here; no further prefixes
    };
    let a = domain
        .actions()
        .binary_search(&act)
        .map_err(|_| PipelineError::Domain(DomainError::BadPolicyAction(mem)))?;
    for &s2 in domain.successors(s, a) {
        steps.push((s, a, mem));
        collect_prefixes(domain, policy, s2, m2, budget - 1, steps, out)?;
        steps.pop();
    }
    Ok(())
}

fn collect_cycles(
    domain: &Domain,
    policy: &PolicyMachine,
    anchor: (usize, usize),
    at: (usize, usize),
    budget: usize,
    steps: &mut Vec<(usize, usize, usize)>,
    out: &mut Vec<Vec<(usize, usize, usize)>>,
) {
    if budget == 0 {
        return;
    }
    let (s, mem) = at;
    let (act, m2) = match policy.step(mem, domain.state(s)) {
        Some(x) => x.clone(),
        None => return,
    };
    let a = match domain.actions().binary_search(&act) {
        Ok(a) => a,
        Err(_) => return,
    };
    for &s2 in domain.successors(s, a) {
        steps.push((s, a, mem));
        if (s2, m2) == anchor {
            out.push(steps.clone());
        }
        collect_cycles(domain, policy, anchor, (s2, m2), budget - 1, steps, out);
        steps.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn d1() -> Domain {
        Domain::example_d1()
    }

    fn psi1() -> Formula {
        parse_formula("F (l & X X l)").unwrap()
    }

    fn psi2() -> Formula {
        parse_formula("!l | F (l & X X !r) | F (l & X X X X !l)").unwrap()
    }

    #[test]
    fn psi1_state_action_unsat_stochastic_sat() {
        let opts = SolveOptions::default();
        let sa = solve(
            &d1(),
            &psi1(),
            Dialect::Ltlf,
            Fairness::StateAction,
            Mode::Sound,
            opts,
        )
        .unwrap();
        assert!(!sa.is_sat());
        let st = solve(
            &d1(),
            &psi1(),
            Dialect::Ltlf,
            Fairness::Stochastic,
            Mode::Sound,
            opts,
        )
        .unwrap();
        assert!(st.is_sat());
    }

    #[test]
    fn psi2_sound_unsat_naive_sat() {
        let opts = SolveOptions::default();
        let sound = solve(
            &d1(),
            &psi2(),
            Dialect::Ltl,
            Fairness::StateAction,
            Mode::Sound,
            opts,
        )
        .unwrap();
        assert!(!sound.is_sat(), "sound mode must reject ψ₂ on D₁");
        let naive = solve(
            &d1(),
            &psi2(),
            Dialect::Ltl,
            Fairness::StateAction,
            Mode::NaiveProduct,
            opts,
        )
        .unwrap();
        assert!(naive.is_sat(), "naive product mode must accept ψ₂ on D₁");
    }

    #[test]
    fn verify_fails_psi1_with_tau1_up_to_rotation() {
        let policy = d1().unique_policy().unwrap();
        let out = verify_policy(
            &d1(),
            &policy,
            &psi1(),
            Dialect::Ltlf,
            Fairness::StateAction,
            8,
        )
        .unwrap();
        match out {
            VerifyOutcome::Fail { witness } => {
                // witness denotes τ₁ up to rotation: cycle of length 4 with
                // letters {l,a},{m,a},{r,a},{m,a}
                let mut states: Vec<String> = witness
                    .cycle
                    .iter()
                    .map(|l| {
                        l.iter()
                            .find(|p| ["l", "m", "r"].contains(&p.as_str()))
                            .unwrap()
                            .clone()
                    })
                    .collect();
                assert_eq!(witness.cycle.len() % 4, 0);
                states.sort();
                assert_eq!(states.iter().filter(|s| *s == "m").count() * 2, states.len());
            }
            VerifyOutcome::Pass { .. } => panic!("expected failure with witness"),
        }
    }

    #[test]
    fn verify_passes_trivial_goal() {
        let policy = d1().unique_policy().unwrap();
        for fairness in [Fairness::None, Fairness::StateAction, Fairness::Stochastic] {
            let out = verify_policy(
                &d1(),
                &policy,
                &Formula::True,
                Dialect::Ltlf,
                fairness,
                6,
            )
            .unwrap();
            assert!(out.passed());
        }
    }

    #[test]
    fn no_fairness_reachability_on_d1_is_unsat_but_fair_is_sat() {
        // F r without fairness: the environment can loop l-m forever
        let goal = parse_formula("F r").unwrap();
        let opts = SolveOptions::default();
        let none = solve(&d1(), &goal, Dialect::Ltlf, Fairness::None, Mode::Sound, opts).unwrap();
        assert!(!none.is_sat());
        let sa = solve(
            &d1(),
            &goal,
            Dialect::Ltlf,
            Fairness::StateAction,
            Mode::Sound,
            opts,
        )
        .unwrap();
        assert!(sa.is_sat());
        // the extracted policy survives verification
        let policy = sa.policy().unwrap();
        let v = verify_policy(&d1(), policy, &goal, Dialect::Ltlf, Fairness::StateAction, 8)
            .unwrap();
        assert!(v.passed());
    }

    #[test]
    fn prescreen_agrees_with_exact_on_d1_cases() {
        for (goal, dialect) in [
            (psi1(), Dialect::Ltlf),
            (psi2(), Dialect::Ltl),
            (parse_formula("F r").unwrap(), Dialect::Ltlf),
            (parse_formula("G !m").unwrap(), Dialect::Ltl),
        ] {
            let exact = solve(
                &d1(),
                &goal,
                dialect,
                Fairness::StateAction,
                Mode::Sound,
                SolveOptions::default(),
            )
            .unwrap();
            let screened = solve(
                &d1(),
                &goal,
                dialect,
                Fairness::StateAction,
                Mode::Sound,
                SolveOptions {
                    prescreen: true,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(exact.is_sat(), screened.is_sat(), "goal {}", goal);
        }
    }

    #[test]
    fn naive_mode_requires_state_action() {
        let err = solve(
            &d1(),
            &psi1(),
            Dialect::Ltlf,
            Fairness::Stochastic,
            Mode::NaiveProduct,
            SolveOptions::default(),
        );
        assert!(matches!(err, Err(PipelineError::NaiveNeedsStateAction)));
    }
}
