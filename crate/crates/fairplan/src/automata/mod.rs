//! Word-automata layer: deterministic finite-word automata (DFW),
//! nondeterministic Büchi automata (NBW) and deterministic Rabin automata
//! (DRW), with the translations between logic and automata, the DRW union
//! product, the unfair-trace DRW of a domain, and lasso acceptance.

mod ltlf;
mod safra;
mod tableau;

pub use ltlf::{dfw_to_drw, ltlf_to_dfw};
pub use safra::nbw_to_drw_safra;
pub use tableau::ltl_to_nbw;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::logic::{Lasso, Letter};

/// Default cap on automaton state construction.
pub const DEFAULT_MAX_STATES: usize = 1_000_000;
/// Cap on explicit alphabet size (letters).
pub const MAX_LETTERS: usize = 1 << 20;

#[derive(Debug, thiserror::Error)]
pub enum AutomataError {
    #[error("alphabet would need {0} letters, over the {MAX_LETTERS} cap")]
    AlphabetCapacity(usize),
    #[error("state budget of {0} exhausted during construction")]
    StateCapacity(usize),
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("letter at position {0} is outside the automaton alphabet")]
    UnknownLetter(usize),
    #[error("malformed document: {0}")]
    Document(String),
}

/// Explicit finite alphabet: a set of letters, each a proposition set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Vec<Letter>,
    index: HashMap<Letter, usize>,
    props: Vec<String>,
}

impl Alphabet {
    /// Alphabet from an explicit letter list (deduplicated, sorted).
    pub fn from_letters(letters: Vec<Letter>) -> Arc<Alphabet> {
        let set: BTreeSet<Letter> = letters.into_iter().collect();
        let letters: Vec<Letter> = set.into_iter().collect();
        let mut props: BTreeSet<String> = BTreeSet::new();
        for l in &letters {
            props.extend(l.iter().cloned());
        }
        let index = letters
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Arc::new(Alphabet {
            letters,
            index,
            props: props.into_iter().collect(),
        })
    }

    /// The full powerset alphabet over the given propositions; refuses
    /// alphabets over the letter cap.
    pub fn power_set(props: &[String]) -> Result<Arc<Alphabet>, AutomataError> {
        let mut props: Vec<String> = props.to_vec();
        props.sort();
        props.dedup();
        if props.len() >= 20 {
            return Err(AutomataError::AlphabetCapacity(
                2usize.saturating_pow(props.len() as u32),
            ));
        }
        let n = props.len();
        let mut letters = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let mut l = Letter::new();
            for (i, p) in props.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    l.insert(p.clone());
                }
            }
            letters.push(l);
        }
        Ok(Alphabet::from_letters(letters))
    }

    /// The realizable trace alphabet of a domain.
    pub fn of_domain(domain: &Domain) -> Arc<Alphabet> {
        Alphabet::from_letters(domain.realizable_letters())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letter(&self, i: usize) -> &Letter {
        &self.letters[i]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn index_of(&self, l: &Letter) -> Option<usize> {
        self.index.get(l).copied()
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }
}

/// Deterministic finite-word automaton with a total transition function.
#[derive(Debug, Clone)]
pub struct Dfw {
    pub alphabet: Arc<Alphabet>,
    pub init: usize,
    /// trans[state][letter] = successor
    pub trans: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl Dfw {
    pub fn size(&self) -> usize {
        self.trans.len()
    }

    /// Runs the automaton on a finite word; true iff the last state is
    /// accepting. Words must be nonempty.
    pub fn accepts(&self, word: &[Letter]) -> Result<bool, AutomataError> {
        let mut q = self.init;
        for (i, l) in word.iter().enumerate() {
            let li = self
                .alphabet
                .index_of(l)
                .ok_or(AutomataError::UnknownLetter(i))?;
            q = self.trans[q][li];
        }
        Ok(!word.is_empty() && self.accepting[q])
    }
}

/// Nondeterministic Büchi word automaton.
#[derive(Debug, Clone)]
pub struct Nbw {
    pub alphabet: Arc<Alphabet>,
    pub init: usize,
    /// trans[state][letter] = successor set (possibly empty)
    pub trans: Vec<Vec<Vec<usize>>>,
    pub accepting: Vec<bool>,
}

impl Nbw {
    pub fn size(&self) -> usize {
        self.trans.len()
    }

    /// Exact lasso acceptance by searching for an accepting cycle in the
    /// product of the automaton with the lasso shape.
    pub fn accepts_lasso(&self, w: &Lasso) -> Result<bool, AutomataError> {
        let span = w.span();
        let p = w.prefix.len();
        let mut letter_ids = Vec::with_capacity(span);
        for i in 0..span {
            letter_ids.push(
                self.alphabet
                    .index_of(w.letter_at(i))
                    .ok_or(AutomataError::UnknownLetter(i))?,
            );
        }
        // product nodes: (position, state); positions 0..span with wrap to p
        let n = self.size();
        let node = |pos: usize, q: usize| pos * n + q;
        let succ_pos = |pos: usize| if pos + 1 < span { pos + 1 } else { p };
        let mut reach = vec![false; span * n];
        let mut stack = vec![node(0, self.init)];
        reach[node(0, self.init)] = true;
        while let Some(v) = stack.pop() {
            let (pos, q) = (v / n, v % n);
            for &q2 in &self.trans[q][letter_ids[pos]] {
                let w2 = node(succ_pos(pos), q2);
                if !reach[w2] {
                    reach[w2] = true;
                    stack.push(w2);
                }
            }
        }
        // accepting iff some reachable accepting product node lies on a cycle
        for pos in p..span {
            for q in 0..n {
                if !self.accepting[q] || !reach[node(pos, q)] {
                    continue;
                }
                // BFS from (pos, q) back to itself
                let mut seen = vec![false; span * n];
                let mut stack = vec![node(pos, q)];
                let mut found = false;
                while let Some(v) = stack.pop() {
                    let (vp, vq) = (v / n, v % n);
                    for &q2 in &self.trans[vq][letter_ids[vp]] {
                        let w2 = node(succ_pos(vp), q2);
                        if w2 == node(pos, q) {
                            found = true;
                            break;
                        }
                        if !seen[w2] {
                            seen[w2] = true;
                            stack.push(w2);
                        }
                    }
                    if found {
                        break;
                    }
                }
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// One Rabin pair: visit some state of `inf` infinitely often while visiting
/// every state of `fin` only finitely often.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RabinPair {
    pub inf: BTreeSet<usize>,
    pub fin: BTreeSet<usize>,
}

/// Deterministic Rabin word automaton with a total transition function.
#[derive(Debug, Clone)]
pub struct Drw {
    pub alphabet: Arc<Alphabet>,
    pub init: usize,
    pub trans: Vec<Vec<usize>>,
    pub pairs: Vec<RabinPair>,
}

impl Drw {
    pub fn size(&self) -> usize {
        self.trans.len()
    }

    pub fn index(&self) -> usize {
        self.pairs.len()
    }

    pub fn step(&self, q: usize, letter: &Letter) -> Option<usize> {
        self.alphabet.index_of(letter).map(|li| self.trans[q][li])
    }
}

/// Runs the DRW on `prefix . cycle^ω`: the deterministic run eventually
/// enters a cycle of states; accept iff the set of states visited infinitely
/// often satisfies some Rabin pair.
pub fn drw_run_lasso(m: &Drw, w: &Lasso) -> Result<bool, AutomataError> {
    let mut q = m.init;
    for (i, l) in w.prefix.iter().enumerate() {
        let li = m
            .alphabet
            .index_of(l)
            .ok_or(AutomataError::UnknownLetter(i))?;
        q = m.trans[q][li];
    }
    let cycle_ids: Vec<usize> = w
        .cycle
        .iter()
        .enumerate()
        .map(|(i, l)| {
            m.alphabet
                .index_of(l)
                .ok_or(AutomataError::UnknownLetter(w.prefix.len() + i))
        })
        .collect::<Result<_, _>>()?;
    // iterate the cycle until (position mod |cycle|, state) repeats
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut visited: Vec<usize> = Vec::new();
    let mut pos = 0usize;
    loop {
        if let Some(&at) = seen.get(&(pos, q)) {
            let inf: BTreeSet<usize> = visited[at..].iter().copied().collect();
            return Ok(m.pairs.iter().any(|pair| {
                pair.inf.iter().any(|s| inf.contains(s))
                    && !pair.fin.iter().any(|s| inf.contains(s))
            }));
        }
        seen.insert((pos, q), visited.len());
        visited.push(q);
        q = m.trans[q][cycle_ids[pos]];
        pos = (pos + 1) % cycle_ids.len();
    }
}

/// Product DRW accepting `L(m1) ∪ L(m2)`. The state set is the full
/// cartesian product (size is exactly the product of sizes) and the index
/// is the sum of the indices: pairs of `m1` lifted on the left, then pairs
/// of `m2` lifted on the right.
pub fn drw_union(m1: &Drw, m2: &Drw) -> Result<Drw, AutomataError> {
    if m1.alphabet.letters() != m2.alphabet.letters() {
        return Err(AutomataError::AlphabetMismatch);
    }
    let (n1, n2) = (m1.size(), m2.size());
    let id = |q1: usize, q2: usize| q1 * n2 + q2;
    let nl = m1.alphabet.len();
    let mut trans = vec![vec![0usize; nl]; n1 * n2];
    for q1 in 0..n1 {
        for q2 in 0..n2 {
            for li in 0..nl {
                trans[id(q1, q2)][li] = id(m1.trans[q1][li], m2.trans[q2][li]);
            }
        }
    }
    let mut pairs = Vec::with_capacity(m1.index() + m2.index());
    for p in &m1.pairs {
        pairs.push(RabinPair {
            inf: p
                .inf
                .iter()
                .flat_map(|&q1| (0..n2).map(move |q2| id(q1, q2)))
                .collect(),
            fin: p
                .fin
                .iter()
                .flat_map(|&q1| (0..n2).map(move |q2| id(q1, q2)))
                .collect(),
        });
    }
    for p in &m2.pairs {
        pairs.push(RabinPair {
            inf: p
                .inf
                .iter()
                .flat_map(|&q2| (0..n1).map(move |q1| id(q1, q2)))
                .collect(),
            fin: p
                .fin
                .iter()
                .flat_map(|&q2| (0..n1).map(move |q1| id(q1, q2)))
                .collect(),
        });
    }
    Ok(Drw {
        alphabet: m1.alphabet.clone(),
        init: id(m1.init, m2.init),
        trans,
        pairs,
    })
}

/// DRW over the domain's trace alphabet accepting exactly the infinite
/// traces of the domain that are not state-action fair.
///
/// States record the last (state, action) read and the last transition
/// triple taken, plus an initial state and a rejecting sink for words that
/// leave the domain's trace language. One Rabin pair per transition
/// `(s,a,s')`: `inf` holds the states whose last (state, action) is `(s,a)`,
/// `fin` those whose last triple is `(s,a,s')`.
pub fn unfair_drw(domain: &Domain) -> Drw {
    let alphabet = Alphabet::of_domain(domain);
    // decoded (state, action) per letter
    let decoded: Vec<(usize, usize)> = alphabet
        .letters()
        .iter()
        .map(|l| domain.decode_letter(l).expect("realizable letters decode"))
        .collect();

    // tracker states: 0 = initial, 1 = sink, then (sa, triple?) interned
    #[derive(Clone, PartialEq, Eq, Hash)]
    struct Track {
        sa: (usize, usize),
        triple: Option<(usize, usize, usize)>,
    }
    let mut states: Vec<Option<Track>> = vec![None, None];
    let mut index: HashMap<Track, usize> = HashMap::new();
    let mut trans: Vec<Vec<usize>> = vec![vec![1; alphabet.len()]; 2];

    let intern = |t: Track,
                      states: &mut Vec<Option<Track>>,
                      trans: &mut Vec<Vec<usize>>,
                      index: &mut HashMap<Track, usize>|
     -> usize {
        if let Some(&i) = index.get(&t) {
            return i;
        }
        let i = states.len();
        states.push(Some(t.clone()));
        trans.push(vec![1; alphabet.len()]);
        index.insert(t, i);
        i
    };

    // breadth-first over tracker states
    let mut queue: Vec<usize> = vec![0];
    let mut filled = vec![false; 2];
    // sink self-loops
    trans[1] = vec![1; alphabet.len()];
    filled[1] = true;
    while let Some(q) = queue.pop() {
        if filled[q] {
            continue;
        }
        while filled.len() < states.len() {
            filled.push(false);
        }
        filled[q] = true;
        for (li, &(s2, a2)) in decoded.iter().enumerate() {
            let target = match &states[q] {
                None if q == 0 => {
                    // first letter must start at the initial state
                    if s2 == domain.init() {
                        let t = Track {
                            sa: (s2, a2),
                            triple: None,
                        };
                        intern(t, &mut states, &mut trans, &mut index)
                    } else {
                        1
                    }
                }
                None => 1, // sink
                Some(track) => {
                    let (s, a) = track.sa;
                    if domain.successors(s, a).contains(&s2) {
                        let t = Track {
                            sa: (s2, a2),
                            triple: Some((s, a, s2)),
                        };
                        intern(t, &mut states, &mut trans, &mut index)
                    } else {
                        1
                    }
                }
            };
            trans[q][li] = target;
            while filled.len() < states.len() {
                filled.push(false);
            }
            if !filled[target] {
                queue.push(target);
            }
        }
    }

    let pairs = domain
        .transition_ids()
        .map(|(s, a, t)| RabinPair {
            inf: states
                .iter()
                .enumerate()
                .filter(|(_, st)| matches!(st, Some(tr) if tr.sa == (s, a)))
                .map(|(i, _)| i)
                .collect(),
            fin: states
                .iter()
                .enumerate()
                .filter(|(_, st)| matches!(st, Some(tr) if tr.triple == Some((s, a, t))))
                .map(|(i, _)| i)
                .collect(),
        })
        .collect();

    Drw {
        alphabet,
        init: 0,
        trans,
        pairs,
    }
}

/// Random DRW for structural-law tests: arbitrary total transitions and
/// random pairs over the given alphabet.
pub fn random_drw<R: rand::Rng>(
    rng: &mut R,
    alphabet: Arc<Alphabet>,
    max_states: usize,
    max_pairs: usize,
) -> Drw {
    let n = rng.gen_range(1..=max_states.max(1));
    let nl = alphabet.len();
    let trans = (0..n)
        .map(|_| (0..nl).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let np = rng.gen_range(0..=max_pairs);
    let pairs = (0..np)
        .map(|_| {
            let pick = |rng: &mut R| -> BTreeSet<usize> {
                (0..n).filter(|_| rng.gen_bool(0.3)).collect()
            };
            RabinPair {
                inf: pick(rng),
                fin: pick(rng),
            }
        })
        .collect();
    Drw {
        alphabet,
        init: 0,
        trans,
        pairs,
    }
}

// ---------------------------------------------------------------------------
// dump format

pub const AUTOMATON_FORMAT: &str = "fairplan.automaton/1";

#[derive(Debug, Serialize, Deserialize)]
pub struct AutomatonDoc {
    pub format: String,
    pub kind: String,
    pub props: Vec<String>,
    pub letters: Vec<Vec<String>>,
    pub states: usize,
    pub initial: usize,
    pub transitions: Vec<(usize, usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<PairDoc>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PairDoc {
    pub inf: Vec<usize>,
    pub fin: Vec<usize>,
}

fn alphabet_doc(a: &Alphabet) -> (Vec<String>, Vec<Vec<String>>) {
    (
        a.props().to_vec(),
        a.letters()
            .iter()
            .map(|l| l.iter().cloned().collect())
            .collect(),
    )
}

impl Dfw {
    pub fn to_doc(&self) -> AutomatonDoc {
        let (props, letters) = alphabet_doc(&self.alphabet);
        AutomatonDoc {
            format: AUTOMATON_FORMAT.into(),
            kind: "dfw".into(),
            props,
            letters,
            states: self.size(),
            initial: self.init,
            transitions: (0..self.size())
                .flat_map(|q| {
                    let row = &self.trans[q];
                    row.iter().enumerate().map(move |(li, &t)| (q, li, t))
                })
                .collect(),
            accepting: Some(
                self.accepting
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect(),
            ),
            pairs: None,
        }
    }
}

impl Nbw {
    pub fn to_doc(&self) -> AutomatonDoc {
        let (props, letters) = alphabet_doc(&self.alphabet);
        AutomatonDoc {
            format: AUTOMATON_FORMAT.into(),
            kind: "nbw".into(),
            props,
            letters,
            states: self.size(),
            initial: self.init,
            transitions: (0..self.size())
                .flat_map(|q| {
                    let row = &self.trans[q];
                    row.iter().enumerate().flat_map(move |(li, succs)| {
                        succs.iter().map(move |&t| (q, li, t))
                    })
                })
                .collect(),
            accepting: Some(
                self.accepting
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| i)
                    .collect(),
            ),
            pairs: None,
        }
    }
}

impl Drw {
    pub fn to_doc(&self) -> AutomatonDoc {
        let (props, letters) = alphabet_doc(&self.alphabet);
        AutomatonDoc {
            format: AUTOMATON_FORMAT.into(),
            kind: "drw".into(),
            props,
            letters,
            states: self.size(),
            initial: self.init,
            transitions: (0..self.size())
                .flat_map(|q| {
                    let row = &self.trans[q];
                    row.iter().enumerate().map(move |(li, &t)| (q, li, t))
                })
                .collect(),
            accepting: None,
            pairs: Some(
                self.pairs
                    .iter()
                    .map(|p| PairDoc {
                        inf: p.inf.iter().copied().collect(),
                        fin: p.fin.iter().copied().collect(),
                    })
                    .collect(),
            ),
        }
    }
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

    fn single_state_drw(pairs: Vec<RabinPair>) -> Drw {
        let alphabet = Alphabet::from_letters(vec![letter(&[]), letter(&["p"])]);
        Drw {
            init: 0,
            trans: vec![vec![0, 0]],
            pairs,
            alphabet,
        }
    }

    #[test]
    fn single_state_pair_accepts_everything() {
        let m = single_state_drw(vec![RabinPair {
            inf: [0].into(),
            fin: BTreeSet::new(),
        }]);
        let w = Lasso::new(vec![letter(&["p"])], vec![letter(&[])]);
        assert!(drw_run_lasso(&m, &w).unwrap());
    }

    #[test]
    fn fin_cancels_inf() {
        let m = single_state_drw(vec![RabinPair {
            inf: [0].into(),
            fin: [0].into(),
        }]);
        let w = Lasso::new(vec![], vec![letter(&["p"])]);
        assert!(!drw_run_lasso(&m, &w).unwrap());
    }

    #[test]
    fn unknown_letter_is_an_error() {
        let m = single_state_drw(vec![]);
        let w = Lasso::new(vec![], vec![letter(&["zz"])]);
        assert!(matches!(
            drw_run_lasso(&m, &w),
            Err(AutomataError::UnknownLetter(0))
        ));
    }

    #[test]
    fn unfair_drw_of_d1_has_four_pairs_and_rejects_tau1() {
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        assert_eq!(m.index(), d.transition_count());
        assert!(!drw_run_lasso(&m, &tau1()).unwrap());
    }

    #[test]
    fn unfair_drw_accepts_the_lm_cycle() {
        // (m,a) recurs but m→r is never taken
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        let w = Lasso::new(vec![], vec![letter(&["l", "a"]), letter(&["m", "a"])]);
        assert!(drw_run_lasso(&m, &w).unwrap());
    }

    #[test]
    fn unfair_drw_matches_fairness_checker_exhaustively() {
        use crate::domain::{is_state_action_fair, DomainLasso};
        let d = Domain::example_d1();
        let m = unfair_drw(&d);
        for w in d.enumerate_lassos(4, 6) {
            let dl = DomainLasso::validate(&d, &w).unwrap();
            assert_eq!(
                drw_run_lasso(&m, &w).unwrap(),
                !is_state_action_fair(&dl, &d),
                "mismatch on {:?}",
                w
            );
        }
    }

    #[test]
    fn union_size_and_index_law() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let alphabet = Alphabet::from_letters(vec![letter(&[]), letter(&["p"]), letter(&["q"])]);
        for _ in 0..30 {
            let m1 = random_drw(&mut rng, alphabet.clone(), 4, 2);
            let m2 = random_drw(&mut rng, alphabet.clone(), 5, 3);
            let u = drw_union(&m1, &m2).unwrap();
            assert_eq!(u.size(), m1.size() * m2.size());
            assert_eq!(u.index(), m1.index() + m2.index());
        }
    }

    #[test]
    fn union_language_is_the_union() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let alphabet = Alphabet::from_letters(vec![letter(&[]), letter(&["p"])]);
        let random_lasso = |rng: &mut rand_chacha::ChaCha8Rng| -> Lasso {
            let letters = [letter(&[]), letter(&["p"])];
            let pl = rng.gen_range(0..3);
            let cl = rng.gen_range(1..4);
            Lasso::new(
                (0..pl).map(|_| letters[rng.gen_range(0..2)].clone()).collect(),
                (0..cl).map(|_| letters[rng.gen_range(0..2)].clone()).collect(),
            )
        };
        for _ in 0..20 {
            let m1 = random_drw(&mut rng, alphabet.clone(), 4, 2);
            let m2 = random_drw(&mut rng, alphabet.clone(), 4, 2);
            let u = drw_union(&m1, &m2).unwrap();
            for _ in 0..10 {
                let w = random_lasso(&mut rng);
                let lhs = drw_run_lasso(&u, &w).unwrap();
                let rhs =
                    drw_run_lasso(&m1, &w).unwrap() || drw_run_lasso(&m2, &w).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn union_rejects_alphabet_mismatch() {
        let a1 = Alphabet::from_letters(vec![letter(&[])]);
        let a2 = Alphabet::from_letters(vec![letter(&["p"])]);
        let m1 = Drw {
            alphabet: a1,
            init: 0,
            trans: vec![vec![0]],
            pairs: vec![],
        };
        let m2 = Drw {
            alphabet: a2,
            init: 0,
            trans: vec![vec![0]],
            pairs: vec![],
        };
        assert!(matches!(
            drw_union(&m1, &m2),
            Err(AutomataError::AlphabetMismatch)
        ));
    }

    #[test]
    fn powerset_alphabet_has_capacity_guard() {
        let props: Vec<String> = (0..21).map(|i| format!("p{}", i)).collect();
        assert!(matches!(
            Alphabet::power_set(&props),
            Err(AutomataError::AlphabetCapacity(_))
        ));
        let small = Alphabet::power_set(&props[..3]).unwrap();
        assert_eq!(small.len(), 8);
    }
}
