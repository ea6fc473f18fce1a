//! Synchronous product of a domain with a deterministic Rabin automaton,
//! yielding a two-tier Rabin game: agent vertices pick actions, environment
//! vertices resolve the nondeterministic outcome, and the automaton advances
//! on the emitted (state ∪ action) letter.

use std::collections::HashMap;

use super::{Domain, DomainError};
use crate::automata::{Drw, RabinPair};
use crate::logic::Letter;

/// Explicit two-player arena with a Rabin winning condition over agent
/// vertices. Agent vertices are product states `(domain state, automaton
/// state)`; environment vertices additionally carry the committed action.
#[derive(Debug, Clone)]
pub struct RabinGame {
    /// agent vertices: (domain state id, automaton state id)
    pub agent: Vec<(usize, usize)>,
    /// environment vertices: (domain state id, automaton state id, action id)
    pub env: Vec<(usize, usize, usize)>,
    /// initial agent vertex index
    pub init: usize,
    /// per agent vertex: (action id, env vertex index), ascending by action
    pub agent_edges: Vec<Vec<(usize, usize)>>,
    /// per env vertex: successor agent vertex indices
    pub env_edges: Vec<Vec<usize>>,
    /// Rabin pairs over agent vertex indices
    pub pairs: Vec<RabinPair>,
}

impl RabinGame {
    pub fn agent_vertex_count(&self) -> usize {
        self.agent.len()
    }

    pub fn env_vertex_count(&self) -> usize {
        self.env.len()
    }
}

/// Builds the reachable part of the product game `domain × drw`. The
/// automaton must cover every realizable letter of the domain.
pub fn product(domain: &Domain, drw: &Drw) -> Result<RabinGame, DomainError> {
    let mut agent: Vec<(usize, usize)> = Vec::new();
    let mut agent_idx: HashMap<(usize, usize), usize> = HashMap::new();
    let mut env: Vec<(usize, usize, usize)> = Vec::new();
    let mut agent_edges: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut env_edges: Vec<Vec<usize>> = Vec::new();

    let init = (domain.init(), drw.init);
    agent_idx.insert(init, 0);
    agent.push(init);
    agent_edges.push(Vec::new());

    let mut at = 0usize;
    while at < agent.len() {
        let (d, q) = agent[at];
        let mut edges = Vec::new();
        for a in domain.applicable(d) {
            let letter = domain.letter_of(d, a);
            let q2 = drw.step(q, &letter).ok_or(DomainError::AlphabetGap)?;
            let e = env.len();
            env.push((d, q, a));
            let mut outs = Vec::new();
            for &d2 in domain.successors(d, a) {
                let key = (d2, q2);
                let t = match agent_idx.get(&key) {
                    Some(&t) => t,
                    None => {
                        let t = agent.len();
                        agent_idx.insert(key, t);
                        agent.push(key);
                        agent_edges.push(Vec::new());
                        t
                    }
                };
                outs.push(t);
            }
            env_edges.push(outs);
            edges.push((a, e));
        }
        agent_edges[at] = edges;
        at += 1;
    }

    let pairs = drw
        .pairs
        .iter()
        .map(|p| RabinPair {
            inf: agent
                .iter()
                .enumerate()
                .filter(|(_, &(_, q))| p.inf.contains(&q))
                .map(|(i, _)| i)
                .collect(),
            fin: agent
                .iter()
                .enumerate()
                .filter(|(_, &(_, q))| p.fin.contains(&q))
                .map(|(i, _)| i)
                .collect(),
        })
        .collect();

    Ok(RabinGame {
        agent,
        env,
        init: 0,
        agent_edges,
        env_edges,
        pairs,
    })
}

/// The product of a domain and a deterministic automaton as a domain again
/// (the construction behind the published unsound reduction): states are
/// pairs `(d, q)` encoded with one fresh fluent per automaton state.
pub struct ProductDomain {
    pub domain: Domain,
    /// fluent name marking automaton state q
    pub aut_fluents: Vec<String>,
}

pub fn product_domain(domain: &Domain, drw: &Drw) -> Result<ProductDomain, DomainError> {
    let aut_fluents: Vec<String> = (0..drw.size())
        .map(|q| {
            let mut name = format!("q{}", q);
            while domain.fluents.binary_search(&name).is_ok()
                || domain.action_vars.binary_search(&name).is_ok()
            {
                name.push('_');
            }
            name
        })
        .collect();

    let encode = |d: usize, q: usize| -> Letter {
        let mut s = domain.state(d).clone();
        s.insert(aut_fluents[q].clone());
        s
    };

    // reachable exploration
    let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
    let mut queue = vec![(domain.init(), drw.init)];
    seen.insert((domain.init(), drw.init), ());
    let mut states: Vec<Letter> = Vec::new();
    let mut transitions: Vec<(Letter, Letter, Vec<Letter>)> = Vec::new();
    while let Some((d, q)) = queue.pop() {
        states.push(encode(d, q));
        for a in domain.applicable(d) {
            let letter = domain.letter_of(d, a);
            let q2 = drw.step(q, &letter).ok_or(DomainError::AlphabetGap)?;
            let outs: Vec<Letter> = domain
                .successors(d, a)
                .iter()
                .map(|&d2| encode(d2, q2))
                .collect();
            for &d2 in domain.successors(d, a) {
                if seen.insert((d2, q2), ()).is_none() {
                    queue.push((d2, q2));
                }
            }
            transitions.push((encode(d, q), domain.action(a).clone(), outs));
        }
    }

    let mut fluents = domain.fluents.clone();
    fluents.extend(aut_fluents.iter().cloned());
    let product = Domain::new(
        fluents,
        domain.action_vars.clone(),
        states,
        domain.actions().to_vec(),
        encode(domain.init(), drw.init),
        transitions,
    )?;
    Ok(ProductDomain {
        domain: product,
        aut_fluents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{drw_run_lasso, unfair_drw};
    use crate::domain::{run_policy, ScriptedSelector};
    use crate::games::{brute_force_rabin, solve_rabin, Winner};

    #[test]
    fn product_size_bound_and_projection() {
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        let g = product(&d, &m).unwrap();
        assert!(g.agent.len() <= d.state_count() * m.size());
        assert_eq!(g.pairs.len(), m.index());
        // every agent vertex has an outgoing edge, every env vertex too
        assert!(g.agent_edges.iter().all(|e| !e.is_empty()));
        assert!(g.env_edges.iter().all(|e| !e.is_empty()));
    }

    #[test]
    fn unfair_product_of_d1_is_environment_win() {
        // the condition is "the play is state-action unfair"; the
        // environment can play fair (alternate m's outcomes), so the agent
        // cannot win
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        let g = product(&d, &m).unwrap();
        let cert = solve_rabin(&g);
        let brute = brute_force_rabin(&g);
        match brute {
            Ok(b) => assert_eq!(cert.winner, b.winner),
            Err(_) => {}
        }
        assert_eq!(cert.winner, Winner::Environment);
    }

    #[test]
    fn product_play_projects_to_domain_trace() {
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        let g = product(&d, &m).unwrap();
        // walk a few plays through the game and check the domain components
        // form a trace and the automaton components follow the run
        let mut v = g.init;
        let mut steps = 0;
        let mut q_expect = m.init;
        while steps < 20 {
            let (dstate, q) = g.agent[v];
            assert_eq!(q, q_expect);
            let (a, e) = g.agent_edges[v][0];
            let letter = d.letter_of(dstate, a);
            q_expect = m.step(q, &letter).unwrap();
            v = g.env_edges[e][steps % g.env_edges[e].len()];
            steps += 1;
        }
    }

    #[test]
    fn product_domain_encodes_automaton_state() {
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        let pd = product_domain(&d, &m).unwrap();
        assert!(pd.domain.state_count() <= d.state_count() * m.size());
        // the product domain still has one policy shape per action
        let p = pd.domain.unique_policy().unwrap();
        let mut sel = ScriptedSelector::new(vec![0]);
        let w = run_policy(&pd.domain, &p, &mut sel).unwrap();
        assert!(w.lasso().cycle.len() >= 1);
    }

    #[test]
    fn tau1_stays_rejected_by_unfair_drw_through_product_alphabet() {
        use crate::logic::{letter, Lasso};
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        let tau1 = Lasso::new(
            vec![],
            vec![
                letter(&["l", "a"]),
                letter(&["m", "a"]),
                letter(&["r", "a"]),
                letter(&["m", "a"]),
            ],
        );
        assert!(!drw_run_lasso(&m, &tau1).unwrap());
    }
}
