//! Safra's determinization of a nondeterministic Büchi automaton into a
//! deterministic Rabin automaton.
//!
//! States are Safra trees: ordered trees of nodes carrying disjoint-sibling
//! labels (sets of NBW states), with per-transition marking when a node's
//! children cover it. Node names come from a fixed pool of size 2·|A| with
//! the smallest free name allocated first and children ordered by creation,
//! so the construction is deterministic. One Rabin pair per node name:
//! visit trees where the node is marked infinitely often, trees where the
//! node is absent finitely often.

use std::collections::{BTreeSet, HashMap};

use super::{AutomataError, Drw, Nbw, RabinPair};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct SNode {
    name: u32,
    label: BTreeSet<usize>,
    marked: bool,
    children: Vec<SNode>,
}

type Tree = Option<SNode>;

fn used_names(t: &Tree, out: &mut BTreeSet<u32>) {
    if let Some(n) = t {
        used_names_node(n, out);
    }
}

fn used_names_node(n: &SNode, out: &mut BTreeSet<u32>) {
    out.insert(n.name);
    for c in &n.children {
        used_names_node(c, out);
    }
}

fn clear_marks(n: &mut SNode) {
    n.marked = false;
    for c in &mut n.children {
        clear_marks(c);
    }
}

/// Step 2: every node spawns a youngest child holding its accepting states,
/// names allocated smallest-free in preorder over the pre-existing nodes.
fn branch_accepting(n: &mut SNode, accepting: &[bool], used: &mut BTreeSet<u32>, pool: u32) {
    let inter: BTreeSet<usize> = n
        .label
        .iter()
        .copied()
        .filter(|&q| accepting[q])
        .collect();
    let new_child = if inter.is_empty() {
        None
    } else {
        let mut name = 0u32;
        while used.contains(&name) {
            name += 1;
        }
        assert!(name < pool, "safra name pool exhausted");
        used.insert(name);
        Some(SNode {
            name,
            label: inter,
            marked: false,
            children: Vec::new(),
        })
    };
    for c in &mut n.children {
        branch_accepting(c, accepting, used, pool);
    }
    if let Some(ch) = new_child {
        n.children.push(ch);
    }
}

/// Step 3: subset transition on every label.
fn powerset(n: &mut SNode, nbw: &Nbw, li: usize) {
    let mut next = BTreeSet::new();
    for &q in &n.label {
        next.extend(nbw.trans[q][li].iter().copied());
    }
    n.label = next;
    for c in &mut n.children {
        powerset(c, nbw, li);
    }
}

fn remove_states(n: &mut SNode, gone: &BTreeSet<usize>) {
    n.label.retain(|q| !gone.contains(q));
    for c in &mut n.children {
        remove_states(c, gone);
    }
}

/// Step 4: among siblings, a state survives only in the oldest subtree.
fn horizontal_merge(n: &mut SNode) {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for c in &mut n.children {
        remove_states(c, &seen);
        seen.extend(c.label.iter().copied());
        horizontal_merge(c);
    }
}

/// Step 5: drop empty nodes (whole subtree dies with its root).
fn drop_empty(n: SNode) -> Option<SNode> {
    if n.label.is_empty() {
        return None;
    }
    let children = n.children.into_iter().filter_map(drop_empty).collect();
    Some(SNode { children, ..n })
}

/// Step 6: a node whose children cover its label drops all descendants and
/// is marked.
fn vertical_merge(n: &mut SNode) {
    for c in &mut n.children {
        vertical_merge(c);
    }
    let union: BTreeSet<usize> = n
        .children
        .iter()
        .flat_map(|c| c.label.iter().copied())
        .collect();
    if !n.label.is_empty() && union == n.label {
        n.children.clear();
        n.marked = true;
    }
}

fn step(tree: &Tree, nbw: &Nbw, li: usize, pool: u32) -> Tree {
    let mut t = tree.clone()?;
    clear_marks(&mut t);
    let mut used = BTreeSet::new();
    used_names_node(&t, &mut used);
    branch_accepting(&mut t, &nbw.accepting, &mut used, pool);
    powerset(&mut t, nbw, li);
    horizontal_merge(&mut t);
    let mut t = drop_empty(t)?;
    vertical_merge(&mut t);
    Some(t)
}

fn collect_presence(t: &Tree, present: &mut BTreeSet<u32>, marked: &mut BTreeSet<u32>) {
    fn walk(n: &SNode, present: &mut BTreeSet<u32>, marked: &mut BTreeSet<u32>) {
        present.insert(n.name);
        if n.marked {
            marked.insert(n.name);
        }
        for c in &n.children {
            walk(c, present, marked);
        }
    }
    if let Some(n) = t {
        walk(n, present, marked);
    }
}

/// Determinizes `nbw` into a language-equivalent DRW. `max_states` bounds
/// the number of Safra trees explored; exceeding it is a capacity error.
/// Rabin pairs whose `inf` side is empty are pruned, which cannot change
/// the language.
pub fn nbw_to_drw_safra(nbw: &Nbw, max_states: usize) -> Result<Drw, AutomataError> {
    let pool = 2 * nbw.size().max(1) as u32;
    let init_tree: Tree = Some(SNode {
        name: 0,
        label: [nbw.init].into(),
        marked: false,
        children: Vec::new(),
    });

    let mut index: HashMap<Tree, usize> = HashMap::new();
    let mut states: Vec<Tree> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();
    index.insert(init_tree.clone(), 0);
    states.push(init_tree);
    trans.push(vec![usize::MAX; nbw.alphabet.len()]);

    let mut at = 0usize;
    while at < states.len() {
        for li in 0..nbw.alphabet.len() {
            let next = step(&states[at], nbw, li, pool);
            let target = match index.get(&next) {
                Some(&t) => t,
                None => {
                    let t = states.len();
                    if t >= max_states {
                        return Err(AutomataError::StateCapacity(max_states));
                    }
                    index.insert(next.clone(), t);
                    states.push(next);
                    trans.push(vec![usize::MAX; nbw.alphabet.len()]);
                    t
                }
            };
            trans[at][li] = target;
        }
        at += 1;
    }

    // presence/marking tables per state, then one pair per name
    let mut pairs = Vec::new();
    for name in 0..pool {
        let mut inf = BTreeSet::new();
        let mut fin = BTreeSet::new();
        for (i, t) in states.iter().enumerate() {
            let mut present = BTreeSet::new();
            let mut marked = BTreeSet::new();
            collect_presence(t, &mut present, &mut marked);
            if marked.contains(&name) {
                inf.insert(i);
            }
            if !present.contains(&name) {
                fin.insert(i);
            }
        }
        if !inf.is_empty() {
            pairs.push(RabinPair { inf, fin });
        }
    }

    Ok(Drw {
        alphabet: nbw.alphabet.clone(),
        init: 0,
        trans,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{drw_run_lasso, ltl_to_nbw, Alphabet};
    use crate::logic::{eval_ltl_lasso, letter, parse_formula, Dialect, Lasso, Letter};
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn pq_alphabet() -> Arc<Alphabet> {
        Alphabet::power_set(&["p".to_string(), "q".to_string()]).unwrap()
    }

    fn random_lasso<R: Rng>(rng: &mut R, alphabet: &Alphabet) -> Lasso {
        let pick = |rng: &mut R| -> Letter {
            alphabet.letter(rng.gen_range(0..alphabet.len())).clone()
        };
        let pl = rng.gen_range(0..3);
        let cl = rng.gen_range(1..5);
        Lasso::new(
            (0..pl).map(|_| pick(rng)).collect(),
            (0..cl).map(|_| pick(rng)).collect(),
        )
    }

    #[test]
    fn deterministic_buchi_with_accepting_sink() {
        // two states, 'p' moves to an accepting absorbing sink
        let alphabet = pq_alphabet();
        let p_letters: Vec<usize> = (0..alphabet.len())
            .filter(|&i| alphabet.letter(i).contains("p"))
            .collect();
        let mut trans = vec![vec![Vec::new(); alphabet.len()]; 2];
        for li in 0..alphabet.len() {
            trans[0][li] = if p_letters.contains(&li) {
                vec![1]
            } else {
                vec![0]
            };
            trans[1][li] = vec![1];
        }
        let nbw = Nbw {
            alphabet: alphabet.clone(),
            init: 0,
            trans,
            accepting: vec![false, true],
        };
        let drw = nbw_to_drw_safra(&nbw, 10_000).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(404);
        for _ in 0..100 {
            let w = random_lasso(&mut rng, &alphabet);
            assert_eq!(
                drw_run_lasso(&drw, &w).unwrap(),
                nbw.accepts_lasso(&w).unwrap(),
                "mismatch on {:?}",
                w
            );
        }
    }

    #[test]
    fn empty_language_nbw_rejects_everything() {
        let alphabet = pq_alphabet();
        let trans = vec![vec![vec![0usize]; alphabet.len()]];
        let nbw = Nbw {
            alphabet: alphabet.clone(),
            init: 0,
            trans,
            accepting: vec![false],
        };
        let drw = nbw_to_drw_safra(&nbw, 1000).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(405);
        for _ in 0..50 {
            let w = random_lasso(&mut rng, &alphabet);
            assert!(!drw_run_lasso(&drw, &w).unwrap());
        }
    }

    #[test]
    fn psi2_pipeline_through_safra() {
        let psi2 = parse_formula("!l | F (l & X X !r) | F (l & X X X X !l)").unwrap();
        let alphabet = Alphabet::power_set(&[
            "l".to_string(),
            "m".to_string(),
            "r".to_string(),
            "a".to_string(),
        ])
        .unwrap();
        let nbw = ltl_to_nbw(&psi2, alphabet, 100_000).unwrap();
        let drw = nbw_to_drw_safra(&nbw, 1_000_000).unwrap();
        let tau1 = Lasso::new(
            vec![],
            vec![
                letter(&["l", "a"]),
                letter(&["m", "a"]),
                letter(&["r", "a"]),
                letter(&["m", "a"]),
            ],
        );
        let lm = Lasso::new(vec![], vec![letter(&["l", "a"]), letter(&["m", "a"])]);
        assert!(!drw_run_lasso(&drw, &tau1).unwrap());
        assert!(drw_run_lasso(&drw, &lm).unwrap());
    }

    #[test]
    fn safra_matches_nbw_on_random_formulas() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(505);
        let alphabet = pq_alphabet();
        let formulas = [
            "G F p",
            "F G p",
            "p U q",
            "G (p -> F q)",
            "F (p & X q)",
            "(G F p) -> (G F q)",
        ];
        for text in formulas {
            let f = parse_formula(text).unwrap();
            let nbw = ltl_to_nbw(&f, alphabet.clone(), 100_000).unwrap();
            let drw = nbw_to_drw_safra(&nbw, 1_000_000).unwrap();
            for _ in 0..60 {
                let w = random_lasso(&mut rng, &alphabet);
                assert_eq!(
                    drw_run_lasso(&drw, &w).unwrap(),
                    eval_ltl_lasso(&w, &f, Dialect::Ltl),
                    "mismatch for {} on {:?}",
                    text,
                    w
                );
            }
        }
    }
}
