//! Contact automata of ordered pairs of regular D-classes. States are
//! (column of the first class, row of the second); a letter joins two states
//! when its partial actions interchange the inner coordinates of two
//! adjacent factors, and the transition carries the pair of group-word
//! multipliers picked up by the factors.

use crate::biorder::ElemId;
use crate::rees::{ClassActions, ReesTriple, Side};
use crate::subgroup::{free_reduce, invert_word, GroupWord};

/// State of a contact automaton: (column index in D1, row index in D2).
pub type ContactState = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactTransition {
    pub from: ContactState,
    pub letter: ElemId,
    pub to: ContactState,
    /// Right multiplier on the first factor's group word.
    pub label1: GroupWord,
    /// Left multiplier on the second factor's group word; along a path these
    /// compose in reverse.
    pub label2: GroupWord,
}

#[derive(Debug, Clone)]
pub struct ContactAutomaton {
    pub class1: usize,
    pub class2: usize,
    /// Number of columns of the first class.
    pub cols1: usize,
    /// Number of rows of the second class.
    pub rows2: usize,
    pub transitions: Vec<ContactTransition>,
    by_from: Vec<Vec<usize>>,
}

impl ContactAutomaton {
    /// Assemble an automaton from explicit transitions (used by loaders and
    /// tests; `build_contact` is the usual route).
    pub fn from_transitions(
        class1: usize,
        class2: usize,
        cols1: usize,
        rows2: usize,
        transitions: Vec<ContactTransition>,
    ) -> Self {
        let mut by_from = vec![Vec::new(); cols1 * rows2];
        for (k, t) in transitions.iter().enumerate() {
            by_from[t.from.0 * rows2 + t.from.1].push(k);
        }
        ContactAutomaton {
            class1,
            class2,
            cols1,
            rows2,
            transitions,
            by_from,
        }
    }

    pub fn state_count(&self) -> usize {
        self.cols1 * self.rows2
    }

    pub fn state_id(&self, s: ContactState) -> usize {
        s.0 * self.rows2 + s.1
    }

    pub fn transitions_from(&self, s: ContactState) -> impl Iterator<Item = &ContactTransition> {
        self.by_from[self.state_id(s)]
            .iter()
            .map(|&k| &self.transitions[k])
    }
}

/// Build the contact automaton of an ordered pair of classes. A transition
/// ((λ,i), e, (μ,j)) exists iff λ = μ·τ_e in D1 and σ_e·i = j in D2, or
/// λ·τ_e = μ and i = σ_e·j; its label is the pair of multipliers through the
/// canonical fixed points.
pub fn build_contact(
    letters: usize,
    class1: usize,
    class2: usize,
    ca1: &ClassActions,
    ca2: &ClassActions,
) -> ContactAutomaton {
    let cols1 = ca1.grid.col_count();
    let rows2 = ca2.grid.row_count();
    let mut transitions: Vec<ContactTransition> = Vec::new();
    for e in 0..letters {
        let a1 = &ca1.acts[e];
        let a2 = &ca2.acts[e];
        // λ = μ·τ_e, j = σ_e·i
        for mu in 0..cols1 {
            let Some(lam) = a1.tau[mu] else { continue };
            for i in 0..rows2 {
                let Some(j) = a2.sigma[i] else { continue };
                let (_, omega1) = ca1.right_omega(e, mu).expect("tau defined at mu");
                let (_, omega2) = ca2.left_omega(e, i).expect("sigma defined at i");
                transitions.push(ContactTransition {
                    from: (lam, i),
                    letter: e,
                    to: (mu, j),
                    label1: invert_word(&omega1),
                    label2: omega2,
                });
            }
        }
        // μ = λ·τ_e, i = σ_e·j
        for lam in 0..cols1 {
            let Some(mu) = a1.tau[lam] else { continue };
            for j in 0..rows2 {
                let Some(i) = a2.sigma[j] else { continue };
                let (_, omega1) = ca1.right_omega(e, lam).expect("tau defined at lam");
                let (_, omega2) = ca2.left_omega(e, j).expect("sigma defined at j");
                transitions.push(ContactTransition {
                    from: (lam, i),
                    letter: e,
                    to: (mu, j),
                    label1: omega1,
                    label2: invert_word(&omega2),
                });
            }
        }
    }
    // the two clauses overlap (e.g. on letters acting as the identity);
    // their labels agree, so keep the first occurrence of each transition
    transitions.sort_by_key(|t| (t.from, t.letter, t.to));
    transitions.dedup_by(|a, b| {
        let same = a.from == b.from && a.letter == b.letter && a.to == b.to;
        debug_assert!(!same || (a.label1 == b.label1 && a.label2 == b.label2));
        same
    });
    let mut by_from = vec![Vec::new(); cols1 * rows2];
    for (k, t) in transitions.iter().enumerate() {
        by_from[t.from.0 * rows2 + t.from.1].push(k);
    }
    ContactAutomaton {
        class1,
        class2,
        cols1,
        rows2,
        transitions,
        by_from,
    }
}

/// A rational subset of G1 x G2 (second coordinate composing in reverse):
/// the labels of all paths between two states of a contact automaton. The
/// empty path contributes (1, 1) when the endpoints coincide.
#[derive(Debug, Clone, Copy)]
pub struct RhoSubset<'a> {
    pub automaton: &'a ContactAutomaton,
    pub from: ContactState,
    pub to: ContactState,
}

impl<'a> RhoSubset<'a> {
    pub fn new(automaton: &'a ContactAutomaton, from: ContactState, to: ContactState) -> Self {
        assert!(from.0 < automaton.cols1 && from.1 < automaton.rows2);
        assert!(to.0 < automaton.cols1 && to.1 < automaton.rows2);
        RhoSubset {
            automaton,
            from,
            to,
        }
    }
}

/// Direction of one interchange move between adjacent factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveDir {
    /// The letter leaves the first factor and enters the second:
    /// r_k = s_k ē and s_{k+1} = ē r_{k+1}.
    ShiftRight,
    /// The letter leaves the second factor and enters the first:
    /// s_k = r_k ē and r_{k+1} = ē s_{k+1}.
    ShiftLeft,
}

/// One legal interchange move on an adjacent pair of coordinatised factors,
/// resolved deterministically (least admissible preimage). `None` when the
/// required action or preimage does not exist.
pub fn interchange_move(
    ca1: &ClassActions,
    ca2: &ClassActions,
    t1: &ReesTriple,
    t2: &ReesTriple,
    e: ElemId,
    dir: MoveDir,
) -> Option<(ReesTriple, ReesTriple)> {
    match dir {
        MoveDir::ShiftRight => {
            // choose the least μ with μ·τ_e = t1.col, undo the multiplier
            let a1 = &ca1.acts[e];
            let mu = (0..ca1.grid.col_count()).find(|&m| a1.tau[m] == Some(t1.col))?;
            let (_, omega1) = ca1.right_omega(e, mu).expect("tau defined at mu");
            let mut word = t1.word.clone();
            word.extend(invert_word(&omega1));
            let s1 = ReesTriple {
                class: t1.class,
                row: t1.row,
                word: free_reduce(&word),
                col: mu,
            };
            let s2 = ca2.act(t2, e, Side::Left)?;
            Some((s1, s2))
        }
        MoveDir::ShiftLeft => {
            let s1 = ca1.act(t1, e, Side::Right)?;
            let a2 = &ca2.acts[e];
            let j = (0..ca2.grid.row_count()).find(|&j| a2.sigma[j] == Some(t2.row))?;
            let (_, omega2) = ca2.left_omega(e, j).expect("sigma defined at j");
            let mut word = invert_word(&omega2);
            word.extend(t2.word.iter().copied());
            let s2 = ReesTriple {
                class: t2.class,
                row: j,
                word: free_reduce(&word),
                col: t2.col,
            };
            Some((s1, s2))
        }
    }
}
