//! The end-to-end word problem: compare fingerprints, coordinatise the
//! factors, then settle the remaining constraint problem over rational
//! subsets of products of adjacent maximal subgroups. Decidable whenever
//! every class in the fingerprint is finite or trivial, or free on a
//! maximal class; anything else is exported as a constraint instance.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Analysis;
use crate::biorder::ElemId;
use crate::contact::RhoSubset;
use crate::ratgroup::{
    benois_saturate, member_in_saturated, rat_intersect_nonempty, reduce_letters, GroupNfa,
    NfaLetter,
};
use crate::rees::{coordinatize, ReesTriple};
use crate::subgroup::{FiniteGroup, FLetter, GroupBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    /// The D-fingerprints differ.
    Fingerprint,
    /// First row or last column of the coordinatised sequences differ.
    Endpoints,
    /// Single regular factor with distinct group parts.
    Group,
    /// The constraint system over the contact automata is unsatisfiable.
    Csp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Equal,
    NotEqual(Reason),
    Unsupported(Box<CspInstance>),
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Equal => 0,
            Verdict::NotEqual(_) => 1,
            Verdict::Unsupported(_) => 2,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("words must be non-empty")]
    EmptyWord,
    #[error("not reducible to a constraint instance: words already differ by {0:?}")]
    NotApplicable(Reason),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Decide equality of two words in the free idempotent generated semigroup.
pub fn decide(an: &Analysis, u: &[ElemId], v: &[ElemId]) -> Result<Verdict, SolveError> {
    Ok(decide_report(an, u, v)?.verdict)
}

/// A decision together with the evidence gathered along the way.
#[derive(Debug, Clone)]
pub struct DecisionReport {
    pub verdict: Verdict,
    /// Shared fingerprint, when the comparison got that far.
    pub fingerprint: Option<Vec<usize>>,
    pub left: Option<Vec<ReesTriple>>,
    pub right: Option<Vec<ReesTriple>>,
    /// Satisfying assignment of the interior finite variables
    /// (position -> element index), when an existential search succeeded.
    pub assignment: Option<Vec<(usize, usize)>>,
    /// One entry per adjacent factor pair, when the constraint stage ran.
    pub conditions: Option<Vec<ConditionReport>>,
}

/// The contact-automaton side of one condition: which automaton, the path
/// endpoints, how the groups were handled, and (for a pair of finite views
/// under a satisfying assignment) a witness path of letters.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub classes: (usize, usize),
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub kind: &'static str,
    pub witness_path: Option<Vec<ElemId>>,
}

pub fn decide_report(
    an: &Analysis,
    u: &[ElemId],
    v: &[ElemId],
) -> Result<DecisionReport, SolveError> {
    let (left, right) = match coordinatised_pair(an, u, v)? {
        Ok(pair) => pair,
        Err(reason) => {
            return Ok(DecisionReport {
                verdict: Verdict::NotEqual(reason),
                fingerprint: None,
                left: None,
                right: None,
                assignment: None,
                conditions: None,
            })
        }
    };
    let (verdict, assignment) = decide_inner(an, &left, &right)?;
    let conditions = if left.len() >= 2
        && !matches!(verdict, Verdict::Unsupported(_))
    {
        Some(condition_reports(an, &left, &right, assignment.as_deref())?)
    } else {
        None
    };
    Ok(DecisionReport {
        verdict,
        fingerprint: Some(left.iter().map(|t| t.class).collect()),
        left: Some(left),
        right: Some(right),
        assignment,
        conditions,
    })
}

/// Summaries of the per-condition automata, with witness paths for the
/// finite-finite conditions of a satisfied instance.
fn condition_reports(
    an: &Analysis,
    left: &[ReesTriple],
    right: &[ReesTriple],
    assignment: Option<&[(usize, usize)]>,
) -> Result<Vec<ConditionReport>, SolveError> {
    let m = left.len();
    let effs: Vec<Eff> = left
        .iter()
        .map(|t| Eff::of(an, t.class))
        .collect::<Result<_, _>>()?;
    let a_vals: Vec<Val> = left
        .iter()
        .zip(&effs)
        .map(|(t, e)| value_of(an, t.class, e, &t.word))
        .collect();
    let b_vals: Vec<Val> = right
        .iter()
        .zip(&effs)
        .map(|(t, e)| value_of(an, t.class, e, &t.word))
        .collect();
    let xi: HashMap<usize, usize> = assignment
        .unwrap_or(&[])
        .iter()
        .copied()
        .collect();
    let mut out = Vec::with_capacity(m - 1);
    for k in 0..m - 1 {
        let automaton = an.contact(left[k].class, left[k + 1].class);
        let from = (left[k].col, left[k + 1].row);
        let to = (right[k].col, right[k + 1].row);
        let kind = match (&effs[k], &effs[k + 1]) {
            (Eff::Fin(_), Eff::Fin(_)) => "finite-pair",
            (Eff::Free { .. }, Eff::Fin(_)) => "free-slice-second",
            (Eff::Fin(_), Eff::Free { .. }) => "finite-slice-first",
            (Eff::Free { .. }, Eff::Free { .. }) => "trivial-loop",
        };
        // under a satisfying assignment, a finite-finite condition has a
        // concrete target pair a path must realize
        let witness_path = match (&effs[k], &effs[k + 1], assignment) {
            (Eff::Fin(g1), Eff::Fin(g2), Some(_)) => {
                let fst = match (&a_vals[k], &b_vals[k]) {
                    (Val::Fin(a), Val::Fin(b)) => {
                        if k == 0 {
                            g1.mul(g1.inv(*a), *b)
                        } else {
                            g1.mul(g1.mul(g1.inv(*a), g1.inv(xi[&k])), *b)
                        }
                    }
                    _ => unreachable!(),
                };
                let snd = match (&a_vals[k + 1], &b_vals[k + 1]) {
                    (Val::Fin(a), Val::Fin(b)) => {
                        if k + 1 == m - 1 {
                            g2.mul(*b, g2.inv(*a))
                        } else {
                            xi[&(k + 1)]
                        }
                    }
                    _ => unreachable!(),
                };
                let rho = Rho {
                    subset: RhoSubset::new(&automaton, from, to),
                    class1: left[k].class,
                    class2: left[k + 1].class,
                };
                find_pair_path(&rho, g1, g2, (fst, snd))
            }
            _ => None,
        };
        out.push(ConditionReport {
            classes: (left[k].class, left[k + 1].class),
            from,
            to,
            kind,
            witness_path,
        });
    }
    Ok(out)
}

/// Shortest path of letters realizing a specific label pair over two finite
/// views, if one exists.
fn find_pair_path(
    rho: &Rho,
    g1: &FiniteGroup,
    g2: &FiniteGroup,
    target: (usize, usize),
) -> Option<Vec<ElemId>> {
    let a = rho.subset.automaton;
    let mut parent: HashMap<((usize, usize), usize, usize), Option<(((usize, usize), usize, usize), ElemId)>> =
        HashMap::new();
    let start = (rho.subset.from, 0usize, 0usize);
    parent.insert(start, None);
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(cfg @ (s, x1, x2)) = queue.pop_front() {
        if s == rho.subset.to && (x1, x2) == target {
            let mut path = Vec::new();
            let mut cur = cfg;
            while let Some(Some((prev, letter))) = parent.get(&cur) {
                path.push(*letter);
                cur = *prev;
            }
            path.reverse();
            return Some(path);
        }
        for t in a.transitions_from(s) {
            let next = (
                t.to,
                g1.mul(x1, g1.eval(&t.label1)),
                g2.mul(g2.eval(&t.label2), x2),
            );
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some((cfg, t.letter)));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Steps 1-2 of the pipeline: fingerprints and coordinatisation. The outer
/// error is a hard failure, the inner Err is a fingerprint mismatch.
#[allow(clippy::type_complexity)]
fn coordinatised_pair(
    an: &Analysis,
    u: &[ElemId],
    v: &[ElemId],
) -> Result<Result<(Vec<ReesTriple>, Vec<ReesTriple>), Reason>, SolveError> {
    if u.is_empty() || v.is_empty() {
        return Err(SolveError::EmptyWord);
    }
    let ops = an.ops();
    let fu = ops.minimal_r_factorisation(u);
    let fv = ops.minimal_r_factorisation(v);
    if fu.classes != fv.classes {
        return Ok(Err(Reason::Fingerprint));
    }
    let coord = |w: &[ElemId], f: &crate::green::Fingerprint| -> Result<Vec<ReesTriple>, SolveError> {
        (0..f.factor_count())
            .map(|k| {
                coordinatize(&ops, an, f.factor(w, k))
                    .map_err(|_| SolveError::Internal("factor lost regularity".into()))
            })
            .collect()
    };
    Ok(Ok((coord(u, &fu)?, coord(v, &fv)?)))
}

/// Decide equality of two irreducible sequences of coordinatised regular
/// elements sharing a fingerprint.
pub fn decide_coordinatised(
    an: &Analysis,
    left: &[ReesTriple],
    right: &[ReesTriple],
) -> Result<Verdict, SolveError> {
    Ok(decide_inner(an, left, right)?.0)
}

#[allow(clippy::type_complexity)]
fn decide_inner(
    an: &Analysis,
    left: &[ReesTriple],
    right: &[ReesTriple],
) -> Result<(Verdict, Option<Vec<(usize, usize)>>), SolveError> {
    let m = left.len();
    if m == 0 || right.len() != m {
        return Err(SolveError::EmptyWord);
    }
    debug_assert!(left.iter().zip(right).all(|(a, b)| a.class == b.class));
    // any class without a usable backend blocks every route
    if left.iter().any(|t| an.classes[t.class].backend.is_unknown()) {
        let inst = build_instance(an, left, right);
        return Ok((Verdict::Unsupported(Box::new(inst)), None));
    }
    if left[0].row != right[0].row || left[m - 1].col != right[m - 1].col {
        return Ok((Verdict::NotEqual(Reason::Endpoints), None));
    }
    if m == 1 {
        let eq = an
            .triples_equal(&left[0], &right[0])
            .map_err(|e| SolveError::Internal(e.to_string()))?;
        return Ok((
            if eq {
                Verdict::Equal
            } else {
                Verdict::NotEqual(Reason::Group)
            },
            None,
        ));
    }
    // a nontrivially free class below some other regular class would force
    // constraints this solver cannot justify; hand the instance back instead
    let freeness_ok = left
        .iter()
        .all(|t| !an.classes[t.class].backend.is_nontrivial_free() || an.classes[t.class].maximal);
    if !freeness_ok {
        let inst = build_instance(an, left, right);
        return Ok((Verdict::Unsupported(Box::new(inst)), None));
    }
    Ok(match solve_p(an, left, right)? {
        Some(assignment) => (Verdict::Equal, Some(assignment)),
        None => (Verdict::NotEqual(Reason::Csp), None),
    })
}

/// Effective view of a class group: finite table (includes trivially free
/// classes) or a nontrivial free group on the basis cells.
enum Eff {
    Fin(FiniteGroup),
    Free {
        rank: usize,
        letter_of_cell: HashMap<usize, usize>,
    },
}

impl Eff {
    fn of(an: &Analysis, class: usize) -> Result<Eff, SolveError> {
        let c = &an.classes[class];
        match &c.backend {
            GroupBackend::Finite(g) => Ok(Eff::Fin(g.clone())),
            GroupBackend::Free { basis } if basis.is_empty() => {
                Ok(Eff::Fin(FiniteGroup::trivial(c.presentation.tree.len())))
            }
            GroupBackend::Free { basis } => Ok(Eff::Free {
                rank: basis.len(),
                letter_of_cell: basis.iter().enumerate().map(|(k, &c)| (c, k)).collect(),
            }),
            GroupBackend::Unknown => Err(SolveError::Internal(
                "unknown backend reached the solver".into(),
            )),
        }
    }

    fn is_free(&self) -> bool {
        matches!(self, Eff::Free { .. })
    }
}

/// A group element under an effective view.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Val {
    Fin(usize),
    Free(Vec<NfaLetter>),
}

impl Val {
    fn is_identity(&self) -> bool {
        match self {
            Val::Fin(e) => *e == 0,
            Val::Free(w) => w.is_empty(),
        }
    }
}

fn to_letters(an: &Analysis, class: usize, eff: &Eff, word: &[FLetter]) -> Vec<NfaLetter> {
    let Eff::Free { letter_of_cell, .. } = eff else {
        panic!("letters requested for a finite class");
    };
    let pres = &an.classes[class].presentation;
    let raw: Vec<NfaLetter> = word
        .iter()
        .filter(|l| !pres.tree[l.cell])
        .map(|l| (letter_of_cell[&l.cell], l.inv))
        .collect();
    reduce_letters(&raw)
}

fn value_of(an: &Analysis, class: usize, eff: &Eff, word: &[FLetter]) -> Val {
    match eff {
        Eff::Fin(g) => Val::Fin(g.eval(word)),
        Eff::Free { .. } => Val::Free(to_letters(an, class, eff, word)),
    }
}

/// Constraint imposed on one existential variable.
enum Constraint {
    Eq(Vec<NfaLetter>),
    Member(GroupNfa),
}

/// The pair subset carried by paths between two states of a contact
/// automaton, together with the classes at its two coordinates.
struct Rho<'a> {
    subset: RhoSubset<'a>,
    class1: usize,
    class2: usize,
}

/// Check that a contact automaton between free maximal classes admits only
/// trivially-labelled loops at the source state, then report whether the
/// subset is {(1,1)} (true) or empty (false).
fn free_free_rho(an: &Analysis, rho: &Rho) -> Result<bool, SolveError> {
    for t in rho.subset.automaton.transitions_from(rho.subset.from) {
        if t.to != rho.subset.from {
            return Err(SolveError::Internal(format!(
                "free-free contact state {:?} has an outgoing transition to {:?}",
                rho.subset.from, t.to
            )));
        }
        let l1 = an
            .canon(&ReesTriple {
                class: rho.class1,
                row: 0,
                word: t.label1.clone(),
                col: 0,
            })
            .map_err(|e| SolveError::Internal(e.to_string()))?;
        let l2 = an
            .canon(&ReesTriple {
                class: rho.class2,
                row: 0,
                word: t.label2.clone(),
                col: 0,
            })
            .map_err(|e| SolveError::Internal(e.to_string()))?;
        if !l1.value.is_identity() || !l2.value.is_identity() {
            return Err(SolveError::Internal(format!(
                "free-free loop at {:?} carries a nontrivial label",
                rho.subset.from
            )));
        }
    }
    Ok(rho.subset.from == rho.subset.to)
}

/// Explicit pair set of a contact-path subset over two finite views.
fn pairs_explicit(
    rho: &Rho,
    g1: &FiniteGroup,
    g2: &FiniteGroup,
) -> std::collections::HashSet<(usize, usize)> {
    let a = rho.subset.automaton;
    let mut seen = std::collections::HashSet::new();
    let mut out = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    let start = (rho.subset.from, 0usize, 0usize);
    seen.insert(start);
    queue.push_back(start);
    while let Some((s, x1, x2)) = queue.pop_front() {
        if s == rho.subset.to {
            out.insert((x1, x2));
        }
        for t in a.transitions_from(s) {
            let y1 = g1.mul(x1, g1.eval(&t.label1));
            let y2 = g2.mul(g2.eval(&t.label2), x2);
            let next = (t.to, y1, y2);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    out
}

/// Slice at a fixed second coordinate: the rational set of first
/// coordinates pairing with `target` in the finite second group. The second
/// coordinate of a path composes in reverse, which a left-multiplication
/// accumulator tracks exactly.
fn slice_second(an: &Analysis, rho: &Rho, g2: &FiniteGroup, target: usize, eff1: &Eff) -> GroupNfa {
    let Eff::Free { rank, .. } = eff1 else {
        panic!("slice into a finite first coordinate")
    };
    let a = rho.subset.automaton;
    let base = a.state_count() * g2.order;
    let mut nfa = GroupNfa::new(*rank);
    for _ in 0..base {
        nfa.add_state();
    }
    let node = |s: (usize, usize), x: usize| a.state_id(s) * g2.order + x;
    for t in &a.transitions {
        let l2 = g2.eval(&t.label2);
        for x in 0..g2.order {
            let word = to_letters(an, rho.class1, eff1, &t.label1);
            nfa.add_word_edge(node(t.from, x), &word, node(t.to, g2.mul(l2, x)));
        }
    }
    nfa.initials.push(node(rho.subset.from, 0));
    nfa.finals.push(node(rho.subset.to, target));
    nfa
}

/// Slice at a fixed first coordinate, walking paths in reverse so that the
/// second coordinates read off left-to-right.
fn slice_first(an: &Analysis, rho: &Rho, g1: &FiniteGroup, target: usize, eff2: &Eff) -> GroupNfa {
    let Eff::Free { rank, .. } = eff2 else {
        panic!("slice into a finite second coordinate")
    };
    let a = rho.subset.automaton;
    let base = a.state_count() * g1.order;
    let mut nfa = GroupNfa::new(*rank);
    for _ in 0..base {
        nfa.add_state();
    }
    let node = |s: (usize, usize), x: usize| a.state_id(s) * g1.order + x;
    for t in &a.transitions {
        let l1 = g1.eval(&t.label1);
        for x in 0..g1.order {
            let word = to_letters(an, rho.class2, eff2, &t.label2);
            nfa.add_word_edge(node(t.to, x), &word, node(t.from, g1.mul(l1, x)));
        }
    }
    nfa.initials.push(node(rho.subset.to, 0));
    nfa.finals.push(node(rho.subset.from, target));
    nfa
}

/// Membership of a fully determined pair in a contact-path subset.
fn pair_in_rho(
    an: &Analysis,
    rho: &Rho,
    effs: (&Eff, &Eff),
    v1: &Val,
    v2: &Val,
) -> Result<bool, SolveError> {
    match (effs.0, effs.1) {
        (Eff::Fin(g1), Eff::Fin(g2)) => {
            let (Val::Fin(x1), Val::Fin(x2)) = (v1, v2) else {
                return Err(SolveError::Internal("value/view mismatch".into()));
            };
            Ok(pairs_explicit(rho, g1, g2).contains(&(*x1, *x2)))
        }
        (Eff::Free { .. }, Eff::Fin(g2)) => {
            let (Val::Free(w1), Val::Fin(x2)) = (v1, v2) else {
                return Err(SolveError::Internal("value/view mismatch".into()));
            };
            let nfa = slice_second(an, rho, g2, *x2, effs.0);
            let sat = benois_saturate(&nfa);
            Ok(member_in_saturated(&sat, w1))
        }
        (Eff::Fin(g1), Eff::Free { .. }) => {
            let (Val::Fin(x1), Val::Free(w2)) = (v1, v2) else {
                return Err(SolveError::Internal("value/view mismatch".into()));
            };
            let nfa = slice_first(an, rho, g1, *x1, effs.1);
            let sat = benois_saturate(&nfa);
            Ok(member_in_saturated(&sat, w2))
        }
        (Eff::Free { .. }, Eff::Free { .. }) => {
            Ok(free_free_rho(an, rho)? && v1.is_identity() && v2.is_identity())
        }
    }
}

/// The existential constraint problem over the fingerprint's contact
/// automata: search an assignment of the interior finite variables whose
/// induced conditions all hold, settling the free variables by rational
/// membership and intersection.
fn solve_p(
    an: &Analysis,
    left: &[ReesTriple],
    right: &[ReesTriple],
) -> Result<Option<Vec<(usize, usize)>>, SolveError> {
    let m = left.len();
    let effs: Vec<Eff> = left
        .iter()
        .map(|t| Eff::of(an, t.class))
        .collect::<Result<_, _>>()?;
    let a_vals: Vec<Val> = left
        .iter()
        .zip(&effs)
        .map(|(t, e)| value_of(an, t.class, e, &t.word))
        .collect();
    let b_vals: Vec<Val> = right
        .iter()
        .zip(&effs)
        .map(|(t, e)| value_of(an, t.class, e, &t.word))
        .collect();
    let automata: Vec<_> = (0..m - 1)
        .map(|k| an.contact(left[k].class, left[k + 1].class))
        .collect();
    let rhos: Vec<Rho> = (0..m - 1)
        .map(|k| Rho {
            subset: RhoSubset::new(
                &automata[k],
                (left[k].col, left[k + 1].row),
                (right[k].col, right[k + 1].row),
            ),
            class1: left[k].class,
            class2: left[k + 1].class,
        })
        .collect();

    // interior finite positions get enumerated; interior free positions are
    // the existential variables handled per assignment
    let interior: Vec<usize> = (1..m.saturating_sub(1)).collect();
    let fin_positions: Vec<usize> = interior
        .iter()
        .copied()
        .filter(|&p| !effs[p].is_free())
        .collect();
    let orders: Vec<usize> = fin_positions
        .iter()
        .map(|&p| match &effs[p] {
            Eff::Fin(g) => g.order,
            Eff::Free { .. } => unreachable!(),
        })
        .collect();

    let mut assignment = vec![0usize; fin_positions.len()];
    loop {
        let xi: HashMap<usize, usize> = fin_positions
            .iter()
            .copied()
            .zip(assignment.iter().copied())
            .collect();
        if check_assignment(an, &effs, &a_vals, &b_vals, &rhos, &xi)? {
            let mut found: Vec<(usize, usize)> = xi.into_iter().collect();
            found.sort_unstable();
            return Ok(Some(found));
        }
        // odometer
        let mut k = 0;
        loop {
            if k == assignment.len() {
                return Ok(None);
            }
            assignment[k] += 1;
            if assignment[k] < orders[k] {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn check_assignment(
    an: &Analysis,
    effs: &[Eff],
    a_vals: &[Val],
    b_vals: &[Val],
    rhos: &[Rho],
    xi: &HashMap<usize, usize>,
) -> Result<bool, SolveError> {
    let m = effs.len();
    let mut constraints: HashMap<usize, Vec<Constraint>> = HashMap::new();

    // expression in the first coordinate of condition k
    let first_expr = |k: usize| -> Option<Val> {
        if k == 0 {
            Some(match (&effs[0], &a_vals[0], &b_vals[0]) {
                (Eff::Fin(g), Val::Fin(a), Val::Fin(b)) => Val::Fin(g.mul(g.inv(*a), *b)),
                (Eff::Free { .. }, Val::Free(a), Val::Free(b)) => {
                    let mut w: Vec<NfaLetter> =
                        a.iter().rev().map(|&l| crate::ratgroup::invert_letter(l)).collect();
                    w.extend(b.iter().copied());
                    Val::Free(reduce_letters(&w))
                }
                _ => unreachable!(),
            })
        } else {
            match (&effs[k], &a_vals[k], &b_vals[k]) {
                (Eff::Fin(g), Val::Fin(a), Val::Fin(b)) => {
                    let x = xi[&k];
                    Some(Val::Fin(g.mul(g.mul(g.inv(*a), g.inv(x)), *b)))
                }
                (Eff::Free { .. }, _, _) => None, // variable in the first slot
                _ => unreachable!(),
            }
        }
    };
    let second_expr = |k: usize| -> Option<Val> {
        let pos = k + 1;
        if pos == m - 1 {
            Some(match (&effs[pos], &a_vals[pos], &b_vals[pos]) {
                (Eff::Fin(g), Val::Fin(a), Val::Fin(b)) => Val::Fin(g.mul(*b, g.inv(*a))),
                (Eff::Free { .. }, Val::Free(a), Val::Free(b)) => {
                    let mut w = b.clone();
                    w.extend(a.iter().rev().map(|&l| crate::ratgroup::invert_letter(l)));
                    Val::Free(reduce_letters(&w))
                }
                _ => unreachable!(),
            })
        } else if effs[pos].is_free() {
            None
        } else {
            Some(Val::Fin(xi[&pos]))
        }
    };

    for (k, rho) in rhos.iter().enumerate() {
        let fst = first_expr(k);
        let snd = second_expr(k);
        match (fst, snd) {
            (Some(v1), Some(v2)) => {
                if !pair_in_rho(an, rho, (&effs[k], &effs[k + 1]), &v1, &v2)? {
                    return Ok(false);
                }
            }
            (Some(v1), None) => {
                // variable x_{k+1} in the second coordinate
                match &effs[k] {
                    Eff::Free { .. } => {
                        // free-free adjacency: subset is {(1,1)} or empty
                        if !free_free_rho(an, rho)? || !v1.is_identity() {
                            return Ok(false);
                        }
                        constraints
                            .entry(k + 1)
                            .or_default()
                            .push(Constraint::Eq(Vec::new()));
                    }
                    Eff::Fin(g1) => {
                        let Val::Fin(x1) = v1 else { unreachable!() };
                        let nfa = slice_first(an, rho, g1, x1, &effs[k + 1]);
                        constraints
                            .entry(k + 1)
                            .or_default()
                            .push(Constraint::Member(nfa));
                    }
                }
            }
            (None, Some(v2)) => {
                // variable x_k in the first coordinate:
                // a_k^-1 x_k^-1 b_k paired with v2
                let (Val::Free(a), Val::Free(b)) = (&a_vals[k], &b_vals[k]) else {
                    unreachable!()
                };
                match &effs[k + 1] {
                    Eff::Free { .. } => {
                        if !free_free_rho(an, rho)? || !v2.is_identity() {
                            return Ok(false);
                        }
                        // a^-1 x^-1 b = 1 forces x = b a^-1
                        let mut w = b.clone();
                        w.extend(a.iter().rev().map(|&l| crate::ratgroup::invert_letter(l)));
                        constraints
                            .entry(k)
                            .or_default()
                            .push(Constraint::Eq(reduce_letters(&w)));
                    }
                    Eff::Fin(g2) => {
                        let Val::Fin(x2) = v2 else { unreachable!() };
                        let slice = slice_second(an, rho, g2, x2, &effs[k]);
                        // x ∈ b · S^-1 · a^-1
                        let inv_a: Vec<NfaLetter> = a
                            .iter()
                            .rev()
                            .map(|&l| crate::ratgroup::invert_letter(l))
                            .collect();
                        let nfa = slice.inverse().left_mul(b).right_mul(&inv_a);
                        constraints
                            .entry(k)
                            .or_default()
                            .push(Constraint::Member(nfa));
                    }
                }
            }
            (None, None) => {
                // adjacent free positions: both variables pinned
                if !free_free_rho(an, rho)? {
                    return Ok(false);
                }
                let (Val::Free(a), Val::Free(b)) = (&a_vals[k], &b_vals[k]) else {
                    unreachable!()
                };
                let mut w = b.clone();
                w.extend(a.iter().rev().map(|&l| crate::ratgroup::invert_letter(l)));
                constraints
                    .entry(k)
                    .or_default()
                    .push(Constraint::Eq(reduce_letters(&w)));
                constraints
                    .entry(k + 1)
                    .or_default()
                    .push(Constraint::Eq(Vec::new()));
            }
        }
    }

    // settle each free variable's collected constraints
    for (_pos, cs) in constraints {
        let eqs: Vec<&Vec<NfaLetter>> = cs
            .iter()
            .filter_map(|c| match c {
                Constraint::Eq(w) => Some(w),
                _ => None,
            })
            .collect();
        let members: Vec<&GroupNfa> = cs
            .iter()
            .filter_map(|c| match c {
                Constraint::Member(n) => Some(n),
                _ => None,
            })
            .collect();
        if let Some(first) = eqs.first() {
            if eqs.iter().any(|w| *w != *first) {
                return Ok(false);
            }
            for nfa in &members {
                let sat = benois_saturate(nfa);
                if !member_in_saturated(&sat, first) {
                    return Ok(false);
                }
            }
        } else {
            match members.len() {
                0 => {}
                1 => {
                    if members[0].is_empty_subset() {
                        return Ok(false);
                    }
                }
                2 => {
                    if !rat_intersect_nonempty(members[0], members[1])
                        .map_err(|e| SolveError::Internal(e.to_string()))?
                    {
                        return Ok(false);
                    }
                }
                n => {
                    return Err(SolveError::Internal(format!(
                        "{n} membership constraints on one variable"
                    )))
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// constraint instance export

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LetterDoc {
    pub cell: usize,
    pub inv: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleDoc {
    pub class: usize,
    pub row: usize,
    pub word: Vec<LetterDoc>,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDoc {
    pub row: usize,
    pub col: usize,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDoc {
    pub class: usize,
    pub kind: String,
    pub order: Option<usize>,
    pub cells: Vec<CellDoc>,
    pub tree: Vec<bool>,
    pub squares: Vec<(usize, usize, usize, usize)>,
    pub basis: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: (usize, usize),
    pub letter: String,
    pub to: (usize, usize),
    pub label1: Vec<LetterDoc>,
    pub label2: Vec<LetterDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub classes: (usize, usize),
    pub from: (usize, usize),
    pub to: (usize, usize),
    pub transitions: Vec<TransitionDoc>,
}

/// Self-contained description of the constraint problem equivalent to one
/// word-problem query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CspInstance {
    pub version: u32,
    pub fingerprint: Vec<usize>,
    pub groups: Vec<GroupDoc>,
    pub left: Vec<TripleDoc>,
    pub right: Vec<TripleDoc>,
    pub constraints: Vec<ConstraintDoc>,
}

impl CspInstance {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

fn letters_doc(word: &[FLetter]) -> Vec<LetterDoc> {
    word.iter()
        .map(|l| LetterDoc {
            cell: l.cell,
            inv: l.inv,
        })
        .collect()
}

fn triple_doc(t: &ReesTriple) -> TripleDoc {
    TripleDoc {
        class: t.class,
        row: t.row,
        word: letters_doc(&t.word),
        col: t.col,
    }
}

fn build_instance(an: &Analysis, left: &[ReesTriple], right: &[ReesTriple]) -> CspInstance {
    let m = left.len();
    let groups = left
        .iter()
        .map(|t| {
            let c = &an.classes[t.class];
            let grid = c.grid();
            let (kind, order) = match &c.backend {
                GroupBackend::Free { .. } => ("free".to_string(), None),
                GroupBackend::Finite(g) => ("finite".to_string(), Some(g.order)),
                GroupBackend::Unknown => ("unknown".to_string(), None),
            };
            GroupDoc {
                class: t.class,
                kind,
                order,
                cells: grid
                    .cells
                    .iter()
                    .map(|&(i, l)| CellDoc {
                        row: i,
                        col: l,
                        name: an.set.name(grid.cell(i, l).unwrap()).to_string(),
                    })
                    .collect(),
                tree: c.presentation.tree.clone(),
                squares: c.presentation.squares.clone(),
                basis: c.presentation.basis.clone(),
            }
        })
        .collect();
    let constraints = (0..m.saturating_sub(1))
        .map(|k| {
            let a = an.contact(left[k].class, left[k + 1].class);
            ConstraintDoc {
                classes: (left[k].class, left[k + 1].class),
                from: (left[k].col, left[k + 1].row),
                to: (right[k].col, right[k + 1].row),
                transitions: a
                    .transitions
                    .iter()
                    .map(|t| TransitionDoc {
                        from: t.from,
                        letter: an.set.name(t.letter).to_string(),
                        to: t.to,
                        label1: letters_doc(&t.label1),
                        label2: letters_doc(&t.label2),
                    })
                    .collect(),
            }
        })
        .collect();
    CspInstance {
        version: 1,
        fingerprint: left.iter().map(|t| t.class).collect(),
        groups,
        left: left.iter().map(triple_doc).collect(),
        right: right.iter().map(triple_doc).collect(),
        constraints,
    }
}

/// Export the constraint instance for a pair of words that got past the
/// fingerprint comparison.
pub fn export_csp(an: &Analysis, u: &[ElemId], v: &[ElemId]) -> Result<CspInstance, SolveError> {
    match coordinatised_pair(an, u, v)? {
        Ok((left, right)) => Ok(build_instance(an, &left, &right)),
        Err(reason) => Err(SolveError::NotApplicable(reason)),
    }
}

/// Convenience wrapper: the rewrite oracle composed with decide, used
/// heavily in tests.
pub fn decide_against_rewrite(
    an: &Analysis,
    w: &[ElemId],
    steps: usize,
    seed: u64,
) -> Result<Verdict, SolveError> {
    let ops = an.ops();
    let w2 = ops.random_rewrite(w, steps, seed);
    decide(an, w, &w2)
}
