//! LTLf to DFW by memoized formula progression, and the wrapper that turns
//! a DFW into a DRW accepting the infinite words with an accepted prefix.

use std::collections::HashMap;
use std::sync::Arc;

use super::{Alphabet, AutomataError, Dfw, Drw, RabinPair};
use crate::logic::{Dialect, Formula, NnfArena, Progression};

/// Compiles an LTLf formula into a deterministic, total DFW over the given
/// alphabet that accepts exactly the finite traces satisfying it.
///
/// States are pairs of a residual (the obligation on the rest of the trace)
/// and a flag recording whether the word read so far was accepted; the flag
/// makes acceptance a state property. Exceeding `max_states` returns a
/// capacity error.
pub fn ltlf_to_dfw(
    f: &Formula,
    alphabet: Arc<Alphabet>,
    max_states: usize,
) -> Result<Dfw, AutomataError> {
    let mut arena = NnfArena::new();
    let root = arena.from_formula(f, Dialect::Ltlf);
    let mut prog = Progression::new(arena);
    let init = prog.initial(root);

    let mut index: HashMap<(u32, bool), usize> = HashMap::new();
    let mut states: Vec<(crate::logic::ProgState, bool)> = Vec::new();
    let mut trans: Vec<Vec<usize>> = Vec::new();

    let key = |s: &crate::logic::ProgState, f: bool| (s.0, f);
    index.insert(key(&init, false), 0);
    states.push((init, false));
    trans.push(vec![usize::MAX; alphabet.len()]);

    let mut at = 0usize;
    while at < states.len() {
        let (state, _) = states[at];
        for li in 0..alphabet.len() {
            let letter = alphabet.letter(li).clone();
            let (next, accepted) = prog.step(&state, &letter);
            let k = key(&next, accepted);
            let target = match index.get(&k) {
                Some(&t) => t,
                None => {
                    let t = states.len();
                    if t >= max_states {
                        return Err(AutomataError::StateCapacity(max_states));
                    }
                    index.insert(k, t);
                    states.push((next, accepted));
                    trans.push(vec![usize::MAX; alphabet.len()]);
                    t
                }
            };
            trans[at][li] = target;
        }
        at += 1;
    }

    let accepting = states.iter().map(|&(_, f)| f).collect();
    Ok(Dfw {
        alphabet,
        init: 0,
        trans,
        accepting,
    })
}

/// DRW over infinite words accepting exactly the words with some accepted
/// (nonempty) prefix: transitions into accepting DFW states are redirected
/// to a fresh absorbing sink, and the single Rabin pair is
/// (inf = {sink}, fin = ∅). The input DFW is left reusable.
pub fn dfw_to_drw(a: &Dfw) -> Drw {
    let n = a.size();
    let sink = n;
    let nl = a.alphabet.len();
    let mut trans = Vec::with_capacity(n + 1);
    for q in 0..n {
        let row = (0..nl)
            .map(|li| {
                let t = a.trans[q][li];
                if a.accepting[t] {
                    sink
                } else {
                    t
                }
            })
            .collect();
        trans.push(row);
    }
    trans.push(vec![sink; nl]);
    Drw {
        alphabet: a.alphabet.clone(),
        // runs start before any letter; a nonempty accepted prefix always
        // passes through the sink redirection, so an accepting initial
        // state needs no special case
        init: a.init,
        trans,
        pairs: vec![RabinPair {
            inf: [sink].into(),
            fin: Default::default(),
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::drw_run_lasso;
    use crate::logic::{
        eval_ltl_lasso, eval_ltlf_finite, letter, parse_formula, Lasso, Letter,
    };
    use rand::{Rng, SeedableRng};

    fn d1_alphabet() -> Arc<Alphabet> {
        Alphabet::power_set(&[
            "l".to_string(),
            "m".to_string(),
            "r".to_string(),
            "a".to_string(),
        ])
        .unwrap()
    }

    #[test]
    fn true_yields_one_residual_class_all_accepting_after_first_letter() {
        let alphabet = Alphabet::power_set(&["p".to_string()]).unwrap();
        let dfw = ltlf_to_dfw(&Formula::True, alphabet, 100).unwrap();
        // every nonempty word is accepted
        assert!(dfw.accepts(&[letter(&[])]).unwrap());
        assert!(dfw.accepts(&[letter(&["p"]), letter(&[])]).unwrap());
        assert!(!dfw.accepts(&[]).unwrap());
    }

    #[test]
    fn next_next_example_words() {
        let f = parse_formula("l & X X l").unwrap();
        let dfw = ltlf_to_dfw(&f, d1_alphabet(), 10_000).unwrap();
        assert!(dfw
            .accepts(&[letter(&["l", "a"]), letter(&["m", "a"]), letter(&["l", "a"])])
            .unwrap());
        assert!(!dfw
            .accepts(&[letter(&["l", "a"]), letter(&["m", "a"]), letter(&["r", "a"])])
            .unwrap());
    }

    fn random_formula<R: Rng>(rng: &mut R, atoms: &[&str], depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.3) {
            return match rng.gen_range(0..=atoms.len()) {
                0 => {
                    if rng.gen_bool(0.5) {
                        Formula::True
                    } else {
                        Formula::False
                    }
                }
                i => Formula::atom(atoms[i - 1]),
            };
        }
        match rng.gen_range(0..7) {
            0 => Formula::not(random_formula(rng, atoms, depth - 1)),
            1 => Formula::next(random_formula(rng, atoms, depth - 1)),
            2 => Formula::eventually(random_formula(rng, atoms, depth - 1)),
            3 => Formula::always(random_formula(rng, atoms, depth - 1)),
            4 => Formula::and(
                random_formula(rng, atoms, depth - 1),
                random_formula(rng, atoms, depth - 1),
            ),
            5 => Formula::or(
                random_formula(rng, atoms, depth - 1),
                random_formula(rng, atoms, depth - 1),
            ),
            _ => Formula::until(
                random_formula(rng, atoms, depth - 1),
                random_formula(rng, atoms, depth - 1),
            ),
        }
    }

    #[test]
    fn dfw_agrees_with_finite_evaluation_on_random_samples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        let atoms = ["p", "q"];
        let alphabet = Alphabet::power_set(&["p".to_string(), "q".to_string()]).unwrap();
        for _ in 0..200 {
            let f = random_formula(&mut rng, &atoms, 3);
            let dfw = ltlf_to_dfw(&f, alphabet.clone(), 100_000).unwrap();
            for _ in 0..5 {
                let len = rng.gen_range(1..=6);
                let word: Vec<Letter> = (0..len)
                    .map(|_| alphabet.letter(rng.gen_range(0..alphabet.len())).clone())
                    .collect();
                assert_eq!(
                    dfw.accepts(&word).unwrap(),
                    eval_ltlf_finite(&word, &f),
                    "mismatch for {} on {:?}",
                    f,
                    word
                );
            }
        }
    }

    #[test]
    fn drw_wrapper_has_index_one_and_matches_prefix_semantics() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(202);
        let atoms = ["p", "q"];
        let alphabet = Alphabet::power_set(&["p".to_string(), "q".to_string()]).unwrap();
        for _ in 0..100 {
            let f = random_formula(&mut rng, &atoms, 3);
            let dfw = ltlf_to_dfw(&f, alphabet.clone(), 100_000).unwrap();
            let drw = dfw_to_drw(&dfw);
            assert_eq!(drw.index(), 1);
            assert!(drw.size() <= dfw.size() + 1);
            for _ in 0..5 {
                let pl = rng.gen_range(0..3);
                let cl = rng.gen_range(1..4);
                let pick = |rng: &mut rand_chacha::ChaCha8Rng| {
                    alphabet.letter(rng.gen_range(0..alphabet.len())).clone()
                };
                let w = Lasso::new(
                    (0..pl).map(|_| pick(&mut rng)).collect(),
                    (0..cl).map(|_| pick(&mut rng)).collect(),
                );
                assert_eq!(
                    drw_run_lasso(&drw, &w).unwrap(),
                    eval_ltl_lasso(&w, &f, Dialect::Ltlf),
                    "mismatch for {} on {:?}",
                    f,
                    w
                );
            }
        }
    }

    #[test]
    fn psi1_drw_rejects_tau1() {
        let f = parse_formula("F (l & X X l)").unwrap();
        let dfw = ltlf_to_dfw(&f, d1_alphabet(), 100_000).unwrap();
        let drw = dfw_to_drw(&dfw);
        let tau1 = Lasso::new(
            vec![],
            vec![
                letter(&["l", "a"]),
                letter(&["m", "a"]),
                letter(&["r", "a"]),
                letter(&["m", "a"]),
            ],
        );
        assert!(!drw_run_lasso(&drw, &tau1).unwrap());
    }

    #[test]
    fn state_budget_is_enforced() {
        let f = parse_formula("F (p & X (q & X (p & X q)))").unwrap();
        let alphabet = Alphabet::power_set(&["p".to_string(), "q".to_string()]).unwrap();
        assert!(matches!(
            ltlf_to_dfw(&f, alphabet, 2),
            Err(AutomataError::StateCapacity(2))
        ));
    }
}
