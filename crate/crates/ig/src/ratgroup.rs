//! Rational subsets of free groups, carried by finite automata over the
//! symmetric generator alphabet. Benois saturation makes membership and
//! intersection-emptiness decidable by restricting attention to reduced
//! words.

use thiserror::Error;

/// (generator index, inverted)
pub type NfaLetter = (usize, bool);

pub fn invert_letter(l: NfaLetter) -> NfaLetter {
    (l.0, !l.1)
}

/// Free reduction of a letter word.
pub fn reduce_letters(word: &[NfaLetter]) -> Vec<NfaLetter> {
    let mut out: Vec<NfaLetter> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last().is_some_and(|&p| p == invert_letter(l)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatError {
    #[error("rational subsets live over different generator alphabets ({0} vs {1})")]
    BackendMismatch(usize, usize),
}

/// Finite automaton over the symmetric alphabet of a free group of the
/// given rank; edges may carry ε.
#[derive(Debug, Clone)]
pub struct GroupNfa {
    pub gens: usize,
    pub states: usize,
    pub edges: Vec<(usize, Option<NfaLetter>, usize)>,
    pub initials: Vec<usize>,
    pub finals: Vec<usize>,
}

impl GroupNfa {
    pub fn new(gens: usize) -> Self {
        GroupNfa {
            gens,
            states: 0,
            edges: Vec::new(),
            initials: Vec::new(),
            finals: Vec::new(),
        }
    }

    pub fn add_state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    pub fn add_edge(&mut self, from: usize, label: Option<NfaLetter>, to: usize) {
        self.edges.push((from, label, to));
    }

    /// Chain of edges spelling `word` from `from` to `to` (an ε edge when
    /// the word is empty).
    pub fn add_word_edge(&mut self, from: usize, word: &[NfaLetter], to: usize) {
        if word.is_empty() {
            self.add_edge(from, None, to);
            return;
        }
        let mut at = from;
        for (k, &l) in word.iter().enumerate() {
            let next = if k + 1 == word.len() {
                to
            } else {
                self.add_state()
            };
            self.add_edge(at, Some(l), next);
            at = next;
        }
    }

    /// Automaton accepting exactly the given word.
    pub fn from_word(gens: usize, word: &[NfaLetter]) -> Self {
        let mut nfa = GroupNfa::new(gens);
        let s = nfa.add_state();
        let t = nfa.add_state();
        nfa.add_word_edge(s, word, t);
        nfa.initials.push(s);
        nfa.finals.push(t);
        nfa
    }

    /// Accepts exactly the inverses of the accepted group elements.
    pub fn inverse(&self) -> Self {
        GroupNfa {
            gens: self.gens,
            states: self.states,
            edges: self
                .edges
                .iter()
                .map(|&(f, l, t)| (t, l.map(invert_letter), f))
                .collect(),
            initials: self.finals.clone(),
            finals: self.initials.clone(),
        }
    }

    /// Concatenation (product of the two subsets).
    pub fn concat(&self, other: &GroupNfa) -> Result<Self, RatError> {
        if self.gens != other.gens {
            return Err(RatError::BackendMismatch(self.gens, other.gens));
        }
        let offset = self.states;
        let mut edges = self.edges.clone();
        edges.extend(
            other
                .edges
                .iter()
                .map(|&(f, l, t)| (f + offset, l, t + offset)),
        );
        for &f in &self.finals {
            for &i in &other.initials {
                edges.push((f, None, i + offset));
            }
        }
        Ok(GroupNfa {
            gens: self.gens,
            states: self.states + other.states,
            edges,
            initials: self.initials.clone(),
            finals: other.finals.iter().map(|&s| s + offset).collect(),
        })
    }

    /// Left and right translates by a fixed word.
    pub fn left_mul(&self, word: &[NfaLetter]) -> Self {
        GroupNfa::from_word(self.gens, word)
            .concat(self)
            .expect("same alphabet")
    }

    pub fn right_mul(&self, word: &[NfaLetter]) -> Self {
        self.concat(&GroupNfa::from_word(self.gens, word))
            .expect("same alphabet")
    }

    fn eps_closure_from(&self, seeds: &[usize], eps: &[Vec<usize>]) -> Vec<bool> {
        let mut seen = vec![false; self.states];
        let mut stack: Vec<usize> = seeds.to_vec();
        for &s in seeds {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &eps[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn eps_adjacency(&self) -> Vec<Vec<usize>> {
        let mut eps: Vec<Vec<usize>> = vec![Vec::new(); self.states];
        for &(f, l, t) in &self.edges {
            if l.is_none() {
                eps[f].push(t);
            }
        }
        eps
    }

    /// Does the automaton accept any word at all? (Every accepted word
    /// names a group element, so this is emptiness of the subset.)
    pub fn is_empty_subset(&self) -> bool {
        let mut seen = vec![false; self.states];
        let mut stack = self.initials.clone();
        for &s in &self.initials {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            if self.finals.contains(&s) {
                return false;
            }
            for &(f, _, t) in &self.edges {
                if f == s && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        true
    }
}

/// Benois saturation: repeatedly add an ε edge p -> q whenever
/// p --x--> r ~ε~> s --x^-1--> q. Afterwards a reduced word is accepted iff
/// it is the reduced form of some accepted word.
pub fn benois_saturate(nfa: &GroupNfa) -> GroupNfa {
    let mut out = nfa.clone();
    if out.states == 0 {
        return out;
    }
    loop {
        let eps = out.eps_adjacency();
        let reach: Vec<Vec<bool>> = (0..out.states)
            .map(|s| out.eps_closure_from(&[s], &eps))
            .collect();
        let letter_edges: Vec<(usize, NfaLetter, usize)> = out
            .edges
            .iter()
            .filter_map(|&(f, l, t)| l.map(|l| (f, l, t)))
            .collect();
        let mut new_edges = Vec::new();
        for &(p, x, r) in &letter_edges {
            for &(s, y, q) in &letter_edges {
                if y == invert_letter(x) && reach[r][s] && !reach[p][q] {
                    new_edges.push((p, None, q));
                }
            }
        }
        new_edges.sort_unstable();
        new_edges.dedup();
        if new_edges.is_empty() {
            return out;
        }
        out.edges.extend(new_edges);
    }
}

/// Membership of a group element (given by any spelling) in the subset
/// carried by `nfa`. Saturates and simulates on the reduced word.
pub fn rat_member(nfa: &GroupNfa, word: &[NfaLetter]) -> bool {
    let sat = benois_saturate(nfa);
    member_in_saturated(&sat, &reduce_letters(word))
}

/// Simulation of a saturated automaton on a reduced word.
pub fn member_in_saturated(sat: &GroupNfa, reduced: &[NfaLetter]) -> bool {
    if sat.states == 0 {
        return false;
    }
    let eps = sat.eps_adjacency();
    let mut current = sat.eps_closure_from(&sat.initials, &eps);
    for &l in reduced {
        let mut next_seeds = Vec::new();
        for &(f, lab, t) in &sat.edges {
            if lab == Some(l) && current[f] {
                next_seeds.push(t);
            }
        }
        if next_seeds.is_empty() {
            return false;
        }
        current = sat.eps_closure_from(&next_seeds, &eps);
    }
    sat.finals.iter().any(|&f| current[f])
}

/// Do two rational subsets of the same free group intersect? Both automata
/// are saturated and the product is searched along reduced words.
pub fn rat_intersect_nonempty(a: &GroupNfa, b: &GroupNfa) -> Result<bool, RatError> {
    if a.gens != b.gens {
        return Err(RatError::BackendMismatch(a.gens, b.gens));
    }
    let sa = benois_saturate(a);
    let sb = benois_saturate(b);
    if sa.states == 0 || sb.states == 0 {
        return Ok(false);
    }
    let eps_a = sa.eps_adjacency();
    let eps_b = sb.eps_adjacency();
    let step = |nfa: &GroupNfa, eps: &[Vec<usize>], from: &[bool], l: NfaLetter| -> Vec<bool> {
        let seeds: Vec<usize> = nfa
            .edges
            .iter()
            .filter_map(|&(f, lab, t)| (lab == Some(l) && from[f]).then_some(t))
            .collect();
        nfa.eps_closure_from(&seeds, eps)
    };
    let accept =
        |va: &[bool], vb: &[bool]| sa.finals.iter().any(|&f| va[f]) && sb.finals.iter().any(|&f| vb[f]);
    let start_a = sa.eps_closure_from(&sa.initials, &eps_a);
    let start_b = sb.eps_closure_from(&sb.initials, &eps_b);
    if accept(&start_a, &start_b) {
        return Ok(true);
    }
    let letters: Vec<NfaLetter> = (0..a.gens)
        .flat_map(|g| [(g, false), (g, true)])
        .collect();
    let mut visited = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((start_a, start_b, None::<NfaLetter>));
    while let Some((va, vb, last)) = queue.pop_front() {
        for &l in &letters {
            if last == Some(invert_letter(l)) {
                continue; // stay on reduced words
            }
            let na = step(&sa, &eps_a, &va, l);
            if na.iter().all(|&x| !x) {
                continue;
            }
            let nb = step(&sb, &eps_b, &vb, l);
            if nb.iter().all(|&x| !x) {
                continue;
            }
            if accept(&na, &nb) {
                return Ok(true);
            }
            let key = (na.clone(), nb.clone(), l);
            if visited.insert(key) {
                queue.push_back((na, nb, Some(l)));
            }
        }
    }
    Ok(false)
}
