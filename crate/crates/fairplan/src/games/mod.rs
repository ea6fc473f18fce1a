//! Rabin game solving with strategy extraction, plus an independent
//! brute-force oracle for small games and a cycle audit for certificates.

mod solver;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::automata::Drw;
use crate::domain::{Domain, PolicyMachine, RabinGame};
use solver::{Arena, Solver, VSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Agent,
    Environment,
}

/// Outcome of solving a Rabin game. When the agent wins, `strategy` maps
/// every agent vertex of the winning region to the index of a chosen edge
/// in `RabinGame::agent_edges`; following it never leaves the region.
#[derive(Debug, Clone)]
pub struct WinningCertificate {
    pub winner: Winner,
    pub strategy: BTreeMap<usize, usize>,
    pub region: BTreeSet<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum GamesError {
    #[error("brute force guard exceeded: {0}")]
    BruteForceGuard(String),
    #[error("certificate is environment-winning; no policy to extract")]
    EnvironmentWins,
    #[error("game vertex bookkeeping is inconsistent")]
    Inconsistent,
}

/// Unified arena over agent + environment vertices, restricted to the part
/// reachable from the initial vertex.
fn build_arena(game: &RabinGame) -> (Arena, VSet) {
    let a = game.agent.len();
    let n = a + game.env.len();
    let mut succs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, edges) in game.agent_edges.iter().enumerate() {
        succs[v] = edges.iter().map(|&(_, e)| a + e).collect();
    }
    for (e, outs) in game.env_edges.iter().enumerate() {
        succs[a + e] = outs.clone();
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, out) in succs.iter().enumerate() {
        for &w in out {
            preds[w].push(v);
        }
    }
    let pairs = game
        .pairs
        .iter()
        .map(|p| {
            let mut inf = VSet::empty(n);
            let mut fin = VSet::empty(n);
            for &v in &p.inf {
                inf.insert(v);
            }
            for &v in &p.fin {
                fin.insert(v);
            }
            (inf, fin)
        })
        .collect();
    let arena = Arena {
        agent_count: a,
        succs,
        preds,
        pairs,
    };
    // reachable restriction: the winner at the initial vertex only depends
    // on this part
    let mut reach = VSet::empty(n);
    let mut stack = vec![game.init];
    reach.insert(game.init);
    while let Some(v) = stack.pop() {
        for &w in &arena.succs[v] {
            if !reach.contains(w) {
                reach.insert(w);
                stack.push(w);
            }
        }
    }
    (arena, reach)
}

/// Decides the Rabin game and, when the agent wins, extracts a memoryless
/// winning strategy over the (reachable) winning region.
pub fn solve_rabin(game: &RabinGame) -> WinningCertificate {
    let (arena, reach) = build_arena(game);
    let pair_ids: Vec<u16> = (0..arena.pairs.len() as u16).collect();
    let mut solver = Solver::new(&arena);
    let win = solver.win0(&reach, &pair_ids);

    let region: BTreeSet<usize> = win.iter().filter(|&v| arena.is_agent(v)).collect();
    if !win.contains(game.init) {
        return WinningCertificate {
            winner: Winner::Environment,
            strategy: BTreeMap::new(),
            region,
        };
    }

    let strategy = extract_strategy(game, &arena, &win, &pair_ids);
    WinningCertificate {
        winner: Winner::Agent,
        strategy,
        region,
    }
}

/// Greedy memoryless strategy extraction: fix one agent vertex at a time to
/// its lowest-index edge that preserves the whole winning region. Memoryless
/// determinacy for the Rabin player guarantees the greedy step never dead
/// ends.
fn extract_strategy(
    game: &RabinGame,
    arena: &Arena,
    win: &VSet,
    pair_ids: &[u16],
) -> BTreeMap<usize, usize> {
    let a = game.agent.len();
    let mut succs = arena.succs.clone();
    let mut strategy: BTreeMap<usize, usize> = BTreeMap::new();
    let agent_wins: Vec<usize> = win.iter().filter(|&v| v < a).collect();
    for &v in &agent_wins {
        let candidates: Vec<usize> = (0..game.agent_edges[v].len()).collect();
        if candidates.len() == 1 {
            strategy.insert(v, 0);
            continue;
        }
        let mut chosen = None;
        for c in candidates {
            let target = a + game.agent_edges[v][c].1;
            if !win.contains(target) {
                continue;
            }
            let saved = std::mem::replace(&mut succs[v], vec![target]);
            let trial = rebuild_and_solve(arena, &succs, win, pair_ids);
            if trial {
                chosen = Some(c);
                break;
            }
            succs[v] = saved;
        }
        let c = chosen.expect("memoryless winning choice exists at every winning vertex");
        strategy.insert(v, c);
    }
    strategy
}

fn rebuild_and_solve(
    arena: &Arena,
    succs: &[Vec<usize>],
    win: &VSet,
    pair_ids: &[u16],
) -> bool {
    let n = succs.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, out) in succs.iter().enumerate() {
        for &w in out {
            preds[w].push(v);
        }
    }
    let trial_arena = Arena {
        agent_count: arena.agent_count,
        succs: succs.to_vec(),
        preds,
        pairs: arena.pairs.clone(),
    };
    let mut solver = Solver::new(&trial_arena);
    let w2 = solver.win0(win, pair_ids);
    // region must be preserved in the restricted game
    win.iter().all(|v| w2.contains(v))
}

/// Exhaustive oracle: enumerates all memoryless agent strategies and checks
/// that every reachable cycle of each restricted graph satisfies some Rabin
/// pair. Correct because the Rabin player needs no memory. Guarded to small
/// games.
pub fn brute_force_rabin(game: &RabinGame) -> Result<WinningCertificate, GamesError> {
    if game.agent.len() > 12 {
        return Err(GamesError::BruteForceGuard(format!(
            "{} agent vertices (max 12)",
            game.agent.len()
        )));
    }
    if game.pairs.len() > 12 {
        return Err(GamesError::BruteForceGuard(format!(
            "{} pairs (max 12)",
            game.pairs.len()
        )));
    }
    let choices: Vec<usize> = game.agent_edges.iter().map(|e| e.len().max(1)).collect();
    let total: usize = choices.iter().try_fold(1usize, |acc, &c| {
        acc.checked_mul(c).filter(|&t| t <= 4_000_000)
    })
    .ok_or_else(|| GamesError::BruteForceGuard("strategy space too large".into()))?;

    let mut assignment = vec![0usize; game.agent.len()];
    for idx in 0..total {
        let mut k = idx;
        for (v, &c) in choices.iter().enumerate() {
            assignment[v] = k % c;
            k /= c;
        }
        if strategy_wins(game, &assignment) {
            let strategy: BTreeMap<usize, usize> =
                assignment.iter().copied().enumerate().collect();
            // winning region under brute force: all vertices from which this
            // strategy wins; report the reachable agent vertices under it
            let region = reachable_agents(game, &assignment);
            return Ok(WinningCertificate {
                winner: Winner::Agent,
                strategy,
                region,
            });
        }
    }
    Ok(WinningCertificate {
        winner: Winner::Environment,
        strategy: BTreeMap::new(),
        region: BTreeSet::new(),
    })
}

fn reachable_agents(game: &RabinGame, assignment: &[usize]) -> BTreeSet<usize> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![game.init];
    seen.insert(game.init);
    while let Some(v) = stack.pop() {
        if game.agent_edges[v].is_empty() {
            continue;
        }
        let (_, e) = game.agent_edges[v][assignment[v]];
        for &w in &game.env_edges[e] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// Does this memoryless strategy win from the initial vertex? Checked by
/// the absence of a reachable bad cycle: a cycle whose agent-vertex set
/// satisfies no pair. Profiles over pairs turn the check into SCC analysis.
fn strategy_wins(game: &RabinGame, assignment: &[usize]) -> bool {
    // restricted graph over agent vertices: v -> successors via chosen edge
    let n = game.agent.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        if game.agent_edges[v].is_empty() {
            continue;
        }
        let (_, e) = game.agent_edges[v][assignment[v]];
        succ[v] = game.env_edges[e].clone();
    }
    let reach = {
        let mut seen = vec![false; n];
        let mut stack = vec![game.init];
        seen[game.init] = true;
        while let Some(v) = stack.pop() {
            for &w in &succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };

    let d = game.pairs.len();
    // profile = set of pairs to violate via a fin-hit; others must have
    // their inf-set avoided entirely
    for profile in 0..(1usize << d) {
        let mut banned: BTreeSet<usize> = BTreeSet::new();
        for (j, p) in game.pairs.iter().enumerate() {
            if profile & (1 << j) == 0 {
                banned.extend(p.inf.iter().copied());
            }
        }
        let allowed: Vec<bool> = (0..n).map(|v| reach[v] && !banned.contains(&v)).collect();
        // SCCs of the restricted graph
        let comps = scc_ids(&succ, &allowed);
        let ncomp = comps.iter().filter_map(|&c| c).max().map(|m| m + 1).unwrap_or(0);
        if ncomp == 0 {
            continue;
        }
        let mut size = vec![0usize; ncomp];
        let mut selfloop = vec![false; ncomp];
        for v in 0..n {
            if let Some(c) = comps[v] {
                size[c] += 1;
                if succ[v].contains(&v) {
                    selfloop[c] = true;
                }
            }
        }
        for c in 0..ncomp {
            if size[c] < 2 && !selfloop[c] {
                continue;
            }
            // cycle exists inside component c; it can tour all its vertices
            let ok = (0..d).all(|j| {
                if profile & (1 << j) == 0 {
                    true
                } else {
                    // needs a fin-hit inside the component
                    game.pairs[j]
                        .fin
                        .iter()
                        .any(|&v| v < n && comps[v] == Some(c))
                }
            });
            if ok {
                // bad cycle: satisfies no pair (inf avoided or fin hit)
                return false;
            }
        }
    }
    true
}

fn scc_ids(succ: &[Vec<usize>], allowed: &[bool]) -> Vec<Option<usize>> {
    let n = succ.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut comp: Vec<Option<usize>> = vec![None; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut ncomp = 0usize;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if !allowed[root] || index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei == 0 {
                index[v] = next;
                low[v] = next;
                next += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            let mut advanced = false;
            while *ei < succ[v].len() {
                let w = succ[v][*ei];
                *ei += 1;
                if !allowed[w] {
                    continue;
                }
                if index[w] == UNSEEN {
                    call.push((w, 0));
                    advanced = true;
                    break;
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            }
            if advanced {
                continue;
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = Some(ncomp);
                    if w == v {
                        break;
                    }
                }
                ncomp += 1;
            }
            call.pop();
            if let Some(&mut (u, _)) = call.last_mut() {
                low[u] = low[u].min(low[v]);
            }
        }
    }
    comp
}

/// Audits an agent certificate: in the strategy-restricted graph, every
/// cycle reachable from the initial vertex must satisfy some Rabin pair.
pub fn audit_certificate(game: &RabinGame, cert: &WinningCertificate) -> bool {
    if cert.winner != Winner::Agent {
        return false;
    }
    let assignment: Vec<usize> = (0..game.agent.len())
        .map(|v| cert.strategy.get(&v).copied().unwrap_or(0))
        .collect();
    strategy_wins(game, &assignment)
}

/// Turns an agent certificate for `product(domain, drw)` into a policy
/// machine: memory is the automaton state, updated by the automaton on the
/// observed letters, and the output at (q, s) is the certificate's choice
/// at the corresponding game vertex. Only the (memory, state) combinations
/// reachable under the policy are materialized.
pub fn extract_policy(
    game: &RabinGame,
    cert: &WinningCertificate,
    domain: &Domain,
    drw: &Drw,
) -> Result<PolicyMachine, GamesError> {
    if cert.winner != Winner::Agent {
        return Err(GamesError::EnvironmentWins);
    }
    let vertex_of: HashMap<(usize, usize), usize> = game
        .agent
        .iter()
        .enumerate()
        .map(|(i, &dq)| (dq, i))
        .collect();

    // memory values are automaton states, renumbered densely in BFS order
    let mut mem_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut order: Vec<usize> = Vec::new();
    let mut rows: Vec<(usize, crate::logic::Letter, crate::logic::Letter, usize)> = Vec::new();
    let intern = |q: usize, mem_id: &mut BTreeMap<usize, usize>, order: &mut Vec<usize>| {
        *mem_id.entry(q).or_insert_with(|| {
            order.push(q);
            order.len() - 1
        })
    };

    let (d0, q0) = game.agent[game.init];
    let _ = intern(q0, &mut mem_id, &mut order);
    let mut queue: Vec<(usize, usize)> = vec![(d0, q0)];
    let mut seen: BTreeSet<(usize, usize)> = [(d0, q0)].into();
    // also cover combinations off the main path: any (reached q, any s) the
    // run could observe is produced by the BFS itself
    while let Some((s, q)) = queue.pop() {
        let action = match vertex_of.get(&(s, q)) {
            Some(&v) if cert.strategy.contains_key(&v) => {
                game.agent_edges[v][cert.strategy[&v]].0
            }
            _ => domain
                .applicable(s)
                .next()
                .ok_or(GamesError::Inconsistent)?,
        };
        let letter = domain.letter_of(s, action);
        let q2 = drw.step(q, &letter).ok_or(GamesError::Inconsistent)?;
        let m = intern(q, &mut mem_id, &mut order);
        let m2 = intern(q2, &mut mem_id, &mut order);
        rows.push((
            m,
            domain.state(s).clone(),
            domain.action(action).clone(),
            m2,
        ));
        for &s2 in domain.successors(s, action) {
            if seen.insert((s2, q2)) {
                queue.push((s2, q2));
            }
        }
    }
    Ok(PolicyMachine::new(order.len(), 0, rows))
}

/// Seeded random small game for differential suites.
pub fn random_game<R: rand::Rng>(
    rng: &mut R,
    max_agents: usize,
    max_actions: usize,
    max_env_choices: usize,
    max_pairs: usize,
) -> RabinGame {
    let na = rng.gen_range(1..=max_agents.max(1));
    let mut agent_edges: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut env_edges: Vec<Vec<usize>> = Vec::new();
    let mut env = Vec::new();
    for v in 0..na {
        let nact = rng.gen_range(1..=max_actions.max(1));
        let mut edges = Vec::new();
        for a in 0..nact {
            let e = env_edges.len();
            let nch = rng.gen_range(1..=max_env_choices.max(1));
            let outs: BTreeSet<usize> = (0..nch).map(|_| rng.gen_range(0..na)).collect();
            env_edges.push(outs.into_iter().collect());
            env.push((v, 0, a));
            edges.push((a, e));
        }
        agent_edges.push(edges);
    }
    let npairs = rng.gen_range(0..=max_pairs);
    let pairs = (0..npairs)
        .map(|_| {
            let pick = |rng: &mut R| -> BTreeSet<usize> {
                (0..na).filter(|_| rng.gen_bool(0.4)).collect()
            };
            crate::automata::RabinPair {
                inf: pick(rng),
                fin: pick(rng),
            }
        })
        .collect();
    RabinGame {
        agent: (0..na).map(|v| (v, 0)).collect(),
        env,
        init: 0,
        agent_edges,
        env_edges,
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::RabinPair;
    use rand::SeedableRng;

    fn tiny_game(pairs: Vec<RabinPair>) -> RabinGame {
        // one agent vertex, one action through one env vertex, self loop
        RabinGame {
            agent: vec![(0, 0)],
            env: vec![(0, 0, 0)],
            init: 0,
            agent_edges: vec![vec![(0, 0)]],
            env_edges: vec![vec![0]],
            pairs,
        }
    }

    #[test]
    fn self_loop_with_inf_pair_is_agent_win() {
        let g = tiny_game(vec![RabinPair {
            inf: [0].into(),
            fin: BTreeSet::new(),
        }]);
        let cert = solve_rabin(&g);
        assert_eq!(cert.winner, Winner::Agent);
        assert!(audit_certificate(&g, &cert));
        let brute = brute_force_rabin(&g).unwrap();
        assert_eq!(brute.winner, Winner::Agent);
    }

    #[test]
    fn fin_cancelling_inf_is_environment_win() {
        let g = tiny_game(vec![RabinPair {
            inf: [0].into(),
            fin: [0].into(),
        }]);
        assert_eq!(solve_rabin(&g).winner, Winner::Environment);
        assert_eq!(brute_force_rabin(&g).unwrap().winner, Winner::Environment);
    }

    #[test]
    fn empty_pair_list_is_environment_win() {
        let g = tiny_game(vec![]);
        assert_eq!(solve_rabin(&g).winner, Winner::Environment);
        assert_eq!(brute_force_rabin(&g).unwrap().winner, Winner::Environment);
    }

    #[test]
    fn solver_agrees_with_brute_force_on_random_games() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(606);
        for i in 0..300 {
            let g = random_game(&mut rng, 5, 2, 2, 2);
            let fast = solve_rabin(&g);
            let brute = brute_force_rabin(&g).unwrap();
            assert_eq!(fast.winner, brute.winner, "disagreement on game {}: {:?}", i, g);
            if fast.winner == Winner::Agent {
                assert!(audit_certificate(&g, &fast), "bad certificate on game {}", i);
            }
        }
    }

    #[test]
    fn adding_pairs_never_shrinks_the_region() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(707);
        for _ in 0..60 {
            let mut g = random_game(&mut rng, 5, 2, 2, 2);
            let before = solve_rabin(&g).region;
            let extra = random_game(&mut rng, g.agent.len(), 1, 1, 1).pairs;
            g.pairs.extend(extra);
            let after = solve_rabin(&g).region;
            assert!(before.is_subset(&after));
        }
    }

    #[test]
    fn strategy_stays_in_region() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(808);
        for _ in 0..100 {
            let g = random_game(&mut rng, 6, 2, 2, 2);
            let cert = solve_rabin(&g);
            if cert.winner != Winner::Agent {
                continue;
            }
            // following the strategy from init never reaches an agent vertex
            // outside the region
            let mut stack = vec![g.init];
            let mut seen: BTreeSet<usize> = [g.init].into();
            while let Some(v) = stack.pop() {
                assert!(cert.region.contains(&v), "strategy left the region");
                let c = cert.strategy[&v];
                let (_, e) = g.agent_edges[v][c];
                for &w in &g.env_edges[e] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
    }
}
