//! Exact Rabin game solving by recursive pair elimination.
//!
//! `win0(S, P)` peels one pair at a time: for a pair `(I, F)` it forms the
//! subgame avoiding the environment's attractor to `F` and asks for the
//! region where the agent wins `Inf I ∨ Rabin(P \ {j})`. That inner
//! condition is computed through the environment's complement with a
//! layered fixpoint (`win_inf_or_rest`), which recurses into `win0` with one
//! pair fewer, so the recursion is well founded on (pairs, vertices). Memo
//! tables on (vertex set, pair set) collapse repeated subgames, and pairs
//! that cannot be satisfied by any cycle of the current subgame are pruned
//! before branching.

use std::collections::HashMap;

/// Compact vertex set over a fixed universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct VSet {
    words: Vec<u64>,
    n: usize,
}

impl VSet {
    pub fn empty(n: usize) -> VSet {
        VSet {
            words: vec![0; n.div_ceil(64)],
            n,
        }
    }

    pub fn full(n: usize) -> VSet {
        let mut s = VSet::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1u64 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1u64 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words[v / 64] & (1u64 << (v % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.contains(v))
    }

    pub fn union(&self, other: &VSet) -> VSet {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        VSet { words, n: self.n }
    }

    pub fn minus(&self, other: &VSet) -> VSet {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & !b)
            .collect();
        VSet { words, n: self.n }
    }

    pub fn intersect(&self, other: &VSet) -> VSet {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        VSet { words, n: self.n }
    }
}

/// Flattened two-player graph: vertices 0..agent_count are the agent's,
/// the rest the environment's.
pub(crate) struct Arena {
    pub agent_count: usize,
    pub succs: Vec<Vec<usize>>,
    pub preds: Vec<Vec<usize>>,
    /// pairs as (inf, fin) vertex sets (agent vertices only by construction,
    /// but the solver does not rely on that)
    pub pairs: Vec<(VSet, VSet)>,
}

impl Arena {
    pub fn n(&self) -> usize {
        self.succs.len()
    }

    pub fn is_agent(&self, v: usize) -> bool {
        v < self.agent_count
    }
}

pub(crate) struct Solver<'a> {
    pub arena: &'a Arena,
    memo: HashMap<(VSet, Vec<u16>), VSet>,
}

impl<'a> Solver<'a> {
    pub fn new(arena: &'a Arena) -> Solver<'a> {
        Solver {
            arena,
            memo: HashMap::new(),
        }
    }

    /// Attractor of `player` (0 = agent) to `target` within subgame `s`.
    /// When `strategy` is given, records for each attracted agent vertex a
    /// lowest-index witnessing edge (only meaningful for player 0).
    pub fn attractor(
        &self,
        player: u8,
        s: &VSet,
        target: &VSet,
        mut strategy: Option<&mut HashMap<usize, usize>>,
    ) -> VSet {
        let n = self.arena.n();
        let mut attr = target.intersect(s);
        // counts of remaining out-edges (within s) for the opposing player
        let mut counts = vec![0usize; n];
        for v in s.iter() {
            counts[v] = self.arena.succs[v].iter().filter(|&&w| s.contains(w)).count();
        }
        let mut queue: Vec<usize> = attr.iter().collect();
        while let Some(v) = queue.pop() {
            for &u in &self.arena.preds[v] {
                if !s.contains(u) || attr.contains(u) {
                    continue;
                }
                let u_is_player = (player == 0) == self.arena.is_agent(u);
                if u_is_player {
                    attr.insert(u);
                    if let Some(strat) = strategy.as_deref_mut() {
                        if self.arena.is_agent(u) {
                            // lowest-index successor already in the attractor
                            let pick = self.arena.succs[u]
                                .iter()
                                .position(|&w| s.contains(w) && attr.contains(w))
                                .expect("witnessing edge exists");
                            strat.entry(u).or_insert(pick);
                        }
                    }
                    queue.push(u);
                } else {
                    counts[u] -= 1;
                    if counts[u] == 0 {
                        attr.insert(u);
                        queue.push(u);
                    }
                }
            }
        }
        attr
    }

    /// Strongly connected components of the subgraph induced by `s`
    /// (iterative Tarjan). Returns (component id per vertex, count).
    fn sccs(&self, s: &VSet) -> (Vec<usize>, usize) {
        const UNSEEN: usize = usize::MAX;
        let n = self.arena.n();
        let mut index = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut comp = vec![UNSEEN; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        let mut next_index = 0usize;
        let mut comps = 0usize;
        let mut call: Vec<(usize, usize)> = Vec::new();

        for root in s.iter() {
            if index[root] != UNSEEN {
                continue;
            }
            call.push((root, 0));
            while let Some(&mut (v, ref mut ei)) = call.last_mut() {
                if *ei == 0 {
                    index[v] = next_index;
                    low[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                }
                let succs = &self.arena.succs[v];
                let mut advanced = false;
                while *ei < succs.len() {
                    let w = succs[*ei];
                    *ei += 1;
                    if !s.contains(w) {
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
                // v done
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = comps;
                        if w == v {
                            break;
                        }
                    }
                    comps += 1;
                }
                call.pop();
                if let Some(&mut (u, _)) = call.last_mut() {
                    low[u] = low[u].min(low[v]);
                }
            }
        }
        (comp, comps)
    }

    /// Can some cycle inside `s` avoiding `fin` hit `inf`? Cheap necessary
    /// condition for a pair to contribute anywhere in the subgame.
    fn pair_cycle_possible(&self, s: &VSet, inf: &VSet, fin: &VSet) -> bool {
        let restricted = s.minus(fin);
        let hits = inf.intersect(&restricted);
        if hits.is_empty() {
            return false;
        }
        let (comp, count) = self.sccs(&restricted);
        // a component supports a cycle if it has >= 2 vertices or a self-loop
        let mut sizes = vec![0usize; count];
        for v in restricted.iter() {
            sizes[comp[v]] += 1;
        }
        for v in hits.iter() {
            let c = comp[v];
            if sizes[c] >= 2 {
                return true;
            }
            if self.arena.succs[v].iter().any(|&w| w == v && restricted.contains(w)) {
                return true;
            }
        }
        false
    }

    fn prune_pairs(&self, s: &VSet, pairs: &[u16]) -> Vec<u16> {
        pairs
            .iter()
            .copied()
            .filter(|&j| {
                let (inf, fin) = &self.arena.pairs[j as usize];
                self.pair_cycle_possible(s, inf, fin)
            })
            .collect()
    }

    /// Agent's winning region for the Rabin condition over `pairs` in the
    /// both-closed subgame `s`.
    pub fn win0(&mut self, s: &VSet, pairs: &[u16]) -> VSet {
        if s.is_empty() {
            return VSet::empty(self.arena.n());
        }
        let pairs = self.prune_pairs(s, pairs);
        if pairs.is_empty() {
            return VSet::empty(self.arena.n());
        }
        let key = (s.clone(), pairs.clone());
        if let Some(w) = self.memo.get(&key) {
            return w.clone();
        }
        let mut result = VSet::empty(self.arena.n());
        for (pos, &j) in pairs.iter().enumerate() {
            let (inf, fin) = self.arena.pairs[j as usize].clone();
            let d = s.minus(&self.attractor(1, s, &fin, None));
            if d.is_empty() {
                continue;
            }
            let rest: Vec<u16> = pairs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != pos)
                .map(|(_, &p)| p)
                .collect();
            let u = self.win_inf_or_rest(&d, &inf.intersect(&d), &rest);
            if !u.is_empty() {
                let a = self.attractor(0, s, &u, None);
                let remaining = self.win0(&s.minus(&a), &pairs);
                result = a.union(&remaining);
                break;
            }
        }
        self.memo.insert(key, result.clone());
        result
    }

    /// Agent's winning region for `Inf(inf) ∨ Rabin(pairs)` in subgame `h`,
    /// computed through the environment's layered complement: the
    /// environment wins iff it can force finitely many `inf`-visits while
    /// satisfying the dual Streett condition, built up layer by layer.
    fn win_inf_or_rest(&mut self, h: &VSet, inf: &VSet, pairs: &[u16]) -> VSet {
        let mut t = VSet::empty(self.arena.n());
        loop {
            let a = self.attractor(1, h, &t, None);
            let b = h.minus(&a);
            let y0 = self.attractor(0, &b, &inf.intersect(&b), None);
            let rabin = self.win0(&b.minus(&y0), pairs);
            let y = y0.union(&rabin);
            let x = h.minus(&y);
            if x == t {
                return h.minus(&t);
            }
            t = x;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// a0 -> e0 -> {a1, a2}; a1 -> e1 -> a0; a2 -> e2 -> a0
    fn diamond(pairs: Vec<(Vec<usize>, Vec<usize>)>) -> Arena {
        let succs = vec![
            vec![3],    // a0
            vec![4],    // a1
            vec![5],    // a2
            vec![1, 2], // e0
            vec![0],    // e1
            vec![0],    // e2
        ];
        build(3, succs, pairs)
    }

    fn build(
        agent_count: usize,
        succs: Vec<Vec<usize>>,
        pairs: Vec<(Vec<usize>, Vec<usize>)>,
    ) -> Arena {
        let n = succs.len();
        let mut preds = vec![Vec::new(); n];
        for (v, out) in succs.iter().enumerate() {
            for &w in out {
                preds[w].push(v);
            }
        }
        let pairs = pairs
            .into_iter()
            .map(|(i, f)| {
                let mut iv = VSet::empty(n);
                let mut fv = VSet::empty(n);
                for v in i {
                    iv.insert(v);
                }
                for v in f {
                    fv.insert(v);
                }
                (iv, fv)
            })
            .collect();
        Arena {
            agent_count,
            succs,
            preds,
            pairs,
        }
    }

    #[test]
    fn environment_resolved_disjunction_is_won_by_agent() {
        // pairs: ({a1}, {}) and ({a2}, {}): whichever branch the environment
        // favors infinitely often satisfies a pair
        let arena = diamond(vec![(vec![1], vec![]), (vec![2], vec![])]);
        let mut solver = Solver::new(&arena);
        let full = VSet::full(arena.n());
        let w = solver.win0(&full, &[0, 1]);
        assert_eq!(w.count(), arena.n());
    }

    #[test]
    fn environment_can_dodge_a_single_buchi_pair() {
        // only ({a1}, {}) counts; the environment picks a2 forever
        let arena = diamond(vec![(vec![1], vec![])]);
        let mut solver = Solver::new(&arena);
        let full = VSet::full(arena.n());
        let w = solver.win0(&full, &[0]);
        assert!(w.is_empty());
    }

    #[test]
    fn fin_set_poisons_the_only_cycle() {
        // ({a0}, {a1}) with env steering through a1 at will: env alternates?
        // env can pick a1 infinitely often, visiting fin infinitely often;
        // pair ({a0}, {a1}) fails then. But agent has no choices, so winner
        // is decided by env's options: env picks a1 forever -> a0 still
        // visited infinitely often... so inf(play) = {a0,e0,a1,e1} hits fin.
        let arena = diamond(vec![(vec![0], vec![1])]);
        let mut solver = Solver::new(&arena);
        let full = VSet::full(arena.n());
        let w = solver.win0(&full, &[0]);
        assert!(w.is_empty(), "environment loops through a1 to spoil the pair");
    }

    #[test]
    fn pair_with_unpoisoned_route_wins() {
        // ({a0}, {a1}): env could avoid a1 but a0 recurs on every cycle;
        // env must pick a branch; both return to a0. If env picks a1 io the
        // pair fails, if env eventually sticks to a2 the pair holds. Env
        // controls it -> env wins by choosing a1 io. Adding pair ({a1}, {})
        // closes the dodge: a1 io now satisfies the second pair.
        let arena = diamond(vec![(vec![0], vec![1]), (vec![1], vec![])]);
        let mut solver = Solver::new(&arena);
        let full = VSet::full(arena.n());
        let w = solver.win0(&full, &[0, 1]);
        assert_eq!(w.count(), arena.n());
    }

    #[test]
    fn vset_ops() {
        let mut a = VSet::empty(130);
        a.insert(0);
        a.insert(127);
        a.insert(129);
        let mut b = VSet::empty(130);
        b.insert(127);
        assert_eq!(a.intersect(&b).count(), 1);
        assert_eq!(a.minus(&b).count(), 2);
        assert_eq!(a.union(&b).count(), 3);
        assert!(a.contains(129));
        a.remove(129);
        assert!(!a.contains(129));
    }
}
