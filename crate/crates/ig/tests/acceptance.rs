//! Acceptance suite: one test per criterion, each with its independent
//! oracle (combinatorial counts, Euler characteristics, bounded path
//! enumeration, the realizing semigroup, and the rewrite closure). Every
//! tolerance and runtime budget is pinned here.

use std::time::{Duration, Instant};

use ig::analysis::Analysis;
use ig::biorder::{BiorderedSet, ElemId};
use ig::gen;
use ig::ratgroup::{
    rat_intersect_nonempty, rat_member, reduce_letters, GroupNfa, NfaLetter,
};
use ig::rees::{coordinatize, coordinatize_at, ReesTriple, Side};
use ig::solver::{decide, Verdict};
use ig::subgroup::{free_reduce, GroupBackend};
use ig::fountain;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn analysis_tn(n: usize) -> Analysis {
    let table = gen::full_transformation_table(n).unwrap();
    Analysis::new(BiorderedSet::from_cayley_table(&table).unwrap())
}

fn analysis_band(m: usize, n: usize) -> Analysis {
    let table = gen::rect_band_table(m, n).unwrap();
    Analysis::new(BiorderedSet::from_cayley_table(&table).unwrap())
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Independent count of rank-r idempotents of T_n: choose the image, then
/// retract every point outside it anywhere into it.
fn idempotents_of_rank(n: usize, r: usize) -> usize {
    binom(n, r) * r.pow((n - r) as u32)
}

/// Class ids of a chain ordered bottom-up; panics unless the order is total.
fn chain_bottom_up(an: &Analysis) -> Vec<usize> {
    let m = an.class_count();
    for a in 0..m {
        for b in 0..m {
            assert!(
                an.green.class_leq(a, b) || an.green.class_leq(b, a),
                "classes D{a} and D{b} are incomparable"
            );
        }
    }
    let mut ids: Vec<usize> = (0..m).collect();
    ids.sort_by_key(|&d| (0..m).filter(|&e| an.green.class_leq(e, d)).count());
    ids
}

fn random_word(rng: &mut ChaCha8Rng, an: &Analysis, max_len: usize) -> Vec<ElemId> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| rng.gen_range(0..an.set.len())).collect()
}

#[test]
fn acceptance_01_tn_class_structure() {
    let start = Instant::now();
    for n in 2..=5 {
        let an = analysis_tn(n);
        assert_eq!(an.class_count(), n, "E(T_{n}) must have {n} classes");
        let chain = chain_bottom_up(&an);
        for (r, &d) in chain.iter().enumerate() {
            let expected = idempotents_of_rank(n, r + 1);
            assert_eq!(
                an.green.dclasses[d].len(),
                expected,
                "rank-{} class of E(T_{n})",
                r + 1
            );
        }
        if n == 4 {
            let counts: Vec<usize> = chain
                .iter()
                .rev()
                .map(|&d| an.green.dclasses[d].len())
                .collect();
            assert_eq!(counts, vec![1, 12, 24, 4]);
            assert_eq!(an.set.len(), 41);
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "structure took {elapsed:?}"
    );
    println!("[PASS] E(T_n) chains and idempotent counts, n = 2..5 in {elapsed:?}");
}

#[test]
fn acceptance_02_low_rank_groups_are_symmetric() {
    let start = Instant::now();
    for n in 3..=5 {
        let an = analysis_tn(n);
        let chain = chain_bottom_up(&an);
        for r in 1..=n - 2 {
            let d = chain[r - 1];
            let factorial: usize = (1..=r).product();
            match &an.classes[d].backend {
                GroupBackend::Finite(g) => assert_eq!(
                    g.order, factorial,
                    "rank-{r} class of E(T_{n}) has order {} group",
                    g.order
                ),
                GroupBackend::Free { basis } if basis.is_empty() => {
                    assert_eq!(factorial, 1, "rank-{r} of E(T_{n}) must be trivial")
                }
                other => panic!("rank-{r} class of E(T_{n}): unexpected backend {other:?}"),
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(120),
        "classification took {elapsed:?}"
    );
    println!("[PASS] rank-r classes of E(T_n) are finite of order r! (r <= n-2) in {elapsed:?}");
}

#[test]
fn acceptance_03_top_rank_class_is_free_of_graph_rank() {
    for n in 3..=5 {
        let an = analysis_tn(n);
        let chain = chain_bottom_up(&an);
        let d = chain[n - 2]; // rank n-1
        let c = &an.classes[d];
        assert!(c.presentation.squares.is_empty(), "no singular squares");
        // independent Euler-characteristic oracle
        let grid = c.grid();
        let vertices = grid.row_count() + grid.col_count();
        let edges = grid.cells.len();
        let cycle_rank = edges + 1 - vertices; // the incidence graph is connected
        match &c.backend {
            GroupBackend::Free { basis } => assert_eq!(basis.len(), cycle_rank),
            other => panic!("expected free, got {other:?}"),
        }
        if n == 3 {
            assert_eq!(cycle_rank, 1);
        }
        if n == 4 {
            assert_eq!(cycle_rank, 3);
        }
        let binom_formula = binom(n, 2) - 1;
        if binom_formula != cycle_rank {
            println!(
                "note: rank-{} class of E(T_{n}): incidence-graph rank {} \
                 (a C(n,2)-1 count would give {})",
                n - 1,
                cycle_rank,
                binom_formula
            );
        }
    }
    println!("[PASS] rank-(n-1) classes of E(T_n) are free of the incidence-graph rank");
}

#[test]
fn acceptance_04_rect_bands_free_rank_and_word_problem() {
    for m in 1..=4usize {
        for n in 1..=4usize {
            let an = analysis_band(m, n);
            assert_eq!(an.class_count(), 1);
            match &an.classes[0].backend {
                GroupBackend::Free { basis } => {
                    assert_eq!(basis.len(), (m - 1) * (n - 1), "{m}x{n} band")
                }
                other => panic!("band backend {other:?}"),
            }
        }
    }
    // 200 random pairs on the 4x4 band: the decision must coincide with
    // direct comparison of the canonical triples (every band word is one
    // regular factor)
    let an = analysis_band(4, 4);
    let ops = an.ops();
    let mut rng = ChaCha8Rng::seed_from_u64(4040);
    for _ in 0..200 {
        let u = random_word(&mut rng, &an, 8);
        let v = random_word(&mut rng, &an, 8);
        let verdict = decide(&an, &u, &v).unwrap();
        let tu = coordinatize(&ops, &an, &u).unwrap();
        let tv = coordinatize(&ops, &an, &v).unwrap();
        let same = an.triples_equal(&tu, &tv).unwrap();
        assert_eq!(verdict == Verdict::Equal, same, "u = {u:?}, v = {v:?}");
    }
    println!("[PASS] rectangular bands: free rank (m-1)(n-1); 200 decisions match triples");
}

#[test]
fn acceptance_05_rewrite_completeness_and_image_soundness() {
    let start = Instant::now();
    // 500 rewrite pairs split across E(T_4) and the 3x3 band
    let t4 = analysis_tn(4);
    let band = analysis_band(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(555);
    for (an, count) in [(&t4, 250usize), (&band, 250usize)] {
        let ops = an.ops();
        for k in 0..count {
            let w = random_word(&mut rng, an, 6);
            let steps = rng.gen_range(1..=50);
            let w2 = ops.random_rewrite(&w, steps, k as u64);
            assert_eq!(
                decide(an, &w, &w2).unwrap(),
                Verdict::Equal,
                "rewrite of {w:?} by {steps} steps"
            );
        }
    }
    // 500 pairs with distinct images in T_4 must come out NotEqual
    let table = gen::full_transformation_table(4).unwrap();
    let oracle = gen::SemigroupGreen::new(&table);
    let mut checked = 0;
    while checked < 500 {
        let u = random_word(&mut rng, &t4, 6);
        let v = random_word(&mut rng, &t4, 6);
        let iu = oracle.eval(
            &u.iter()
                .map(|&e| oracle.index_of(t4.set.name(e)))
                .collect::<Vec<_>>(),
        );
        let iv = oracle.eval(
            &v.iter()
                .map(|&e| oracle.index_of(t4.set.name(e)))
                .collect::<Vec<_>>(),
        );
        if iu == iv {
            continue;
        }
        checked += 1;
        assert!(
            matches!(decide(&t4, &u, &v).unwrap(), Verdict::NotEqual(_)),
            "distinct images but equal verdict: {u:?} vs {v:?}"
        );
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "rewrite suite took {elapsed:?}"
    );
    println!("[PASS] 500 rewrite pairs decide Equal; 500 distinct-image pairs decide NotEqual in {elapsed:?}");
}

#[test]
fn acceptance_06_coordinatisation_invariants() {
    let sets = gen::sample_biorders();
    let analyses: Vec<Analysis> = sets.into_iter().map(Analysis::new).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut regular_seen = 0usize;
    while regular_seen < 1000 {
        let an = &analyses[rng.gen_range(0..analyses.len())];
        let ops = an.ops();
        let w = random_word(&mut rng, an, 6);
        let Some(reg) = ops.regularity_and_seeds(&w) else {
            continue;
        };
        regular_seen += 1;
        let base = coordinatize_at(&ops, an, &w, reg.seed.position).unwrap();
        let canon = an.canon(&base);
        for &p in &reg.seed_positions {
            let t = coordinatize_at(&ops, an, &w, p).unwrap();
            assert_eq!((t.row, t.col), (base.row, base.col), "seed {p} of {w:?}");
            if let (Ok(a), Ok(b)) = (&canon, &an.canon(&t)) {
                assert_eq!(a, b, "seed {p} of {w:?} changes the group part");
            }
        }
        // exact act/coordinatize consistency on every one-letter extension
        for e in 0..an.set.len() {
            let mut we = w.clone();
            we.push(e);
            let direct = coordinatize(&ops, an, &we).ok().filter(|t| t.class == base.class);
            let stepped = an.classes[base.class].actions.act(&base, e, Side::Right);
            match (direct, stepped) {
                (Some(d), Some(s)) => {
                    assert_eq!((d.row, d.col), (s.row, s.col));
                    if let (Ok(a), Ok(b)) = (an.canon(&d), an.canon(&s)) {
                        assert_eq!(a, b);
                    }
                }
                (None, Some(_)) => panic!("action defined but {we:?} leaves the class"),
                _ => {}
            }
        }
    }
    println!("[PASS] 1000 regular words: seed independence and act/coordinatize consistency");
}

/// Reduced values of words along paths of length <= max_depth.
fn bounded_values(
    nfa: &GroupNfa,
    max_depth: usize,
) -> std::collections::HashSet<Vec<NfaLetter>> {
    let mut out = std::collections::HashSet::new();
    let mut seen = std::collections::HashSet::new();
    let mut frontier: Vec<(usize, Vec<NfaLetter>)> = Vec::new();
    for &i in &nfa.initials {
        if seen.insert((i, Vec::new())) {
            frontier.push((i, Vec::new()));
        }
    }
    for _ in 0..=max_depth {
        let mut next = Vec::new();
        for (s, word) in &frontier {
            if nfa.finals.contains(s) {
                out.insert(word.clone());
            }
            for &(f, l, t) in &nfa.edges {
                if f != *s {
                    continue;
                }
                let w = match l {
                    None => word.clone(),
                    Some(l) => {
                        let mut w = word.clone();
                        w.push(l);
                        reduce_letters(&w)
                    }
                };
                if seen.insert((t, w.clone())) {
                    next.push((t, w));
                }
            }
        }
        frontier = next;
    }
    for (s, w) in seen {
        if nfa.finals.contains(&s) {
            out.insert(w);
        }
    }
    out
}

/// Fixpoint closure over (state, reduced value) with capped value length:
/// the set of subset elements witnessed without wandering past the cap.
fn closure_values(nfa: &GroupNfa, cap: usize) -> std::collections::HashSet<Vec<NfaLetter>> {
    let mut out = std::collections::HashSet::new();
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    for &i in &nfa.initials {
        if seen.insert((i, Vec::new())) {
            queue.push_back((i, Vec::new()));
        }
    }
    while let Some((s, word)) = queue.pop_front() {
        if nfa.finals.contains(&s) {
            out.insert(word.clone());
        }
        for &(f, l, t) in &nfa.edges {
            if f != s {
                continue;
            }
            let w = match l {
                None => word.clone(),
                Some(l) => {
                    let mut w = word.clone();
                    w.push(l);
                    reduce_letters(&w)
                }
            };
            if w.len() > cap {
                continue;
            }
            if seen.insert((t, w.clone())) {
                queue.push_back((t, w));
            }
        }
    }
    out
}

fn random_nfa(rng: &mut ChaCha8Rng) -> GroupNfa {
    let mut nfa = GroupNfa::new(2);
    let states = rng.gen_range(2..=6);
    for _ in 0..states {
        nfa.add_state();
    }
    for _ in 0..rng.gen_range(2..=7) {
        let f = rng.gen_range(0..states);
        let t = rng.gen_range(0..states);
        nfa.add_edge(f, Some((rng.gen_range(0..2), rng.gen_bool(0.5))), t);
    }
    nfa.initials.push(0);
    nfa.finals.push(rng.gen_range(0..states));
    nfa
}

#[test]
fn acceptance_07_benois_membership_and_intersection() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let letters = [(0, false), (0, true), (1, false), (1, true)];
    let mut shorts: Vec<Vec<NfaLetter>> = vec![vec![]];
    for _ in 0..3 {
        let mut next = Vec::new();
        for w in &shorts {
            for &l in &letters {
                let mut w2 = w.clone();
                w2.push(l);
                next.push(reduce_letters(&w2));
            }
        }
        shorts.extend(next);
        shorts.sort();
        shorts.dedup();
    }
    for round in 0..200 {
        let a = random_nfa(&mut rng);
        // membership: everything the path oracle finds is a member, and
        // membership of short words matches the closure oracle exactly
        for v in bounded_values(&a, 10) {
            if v.len() <= 6 {
                assert!(rat_member(&a, &v), "round {round}: missing {v:?}");
            }
        }
        let closure_a = closure_values(&a, 11);
        for w in &shorts {
            assert_eq!(
                rat_member(&a, w),
                closure_a.contains(w),
                "round {round}: membership of {w:?}"
            );
        }
        // intersection against a second automaton
        let b = random_nfa(&mut rng);
        let closure_b = closure_values(&b, 11);
        let oracle = closure_a.intersection(&closure_b).next().is_some();
        assert_eq!(
            rat_intersect_nonempty(&a, &b).unwrap(),
            oracle,
            "round {round}: intersection"
        );
    }
    println!("[PASS] 200 random automata: membership and intersection match enumeration");
}

#[test]
fn acceptance_08_contact_transitions_satisfy_the_interchange_law() {
    for an in [analysis_band(2, 2), analysis_tn(3)] {
        for d1 in 0..an.class_count() {
            for d2 in 0..an.class_count() {
                let a = an.contact(d1, d2);
                let ca1 = &an.classes[d1].actions;
                let ca2 = &an.classes[d2].actions;
                for t in a.transitions.iter() {
                    let (lam, i) = t.from;
                    let (mu, j) = t.to;
                    let e = t.letter;
                    let case_i =
                        ca1.acts[e].tau[mu] == Some(lam) && ca2.acts[e].sigma[i] == Some(j);
                    let case_ii =
                        ca1.acts[e].tau[lam] == Some(mu) && ca2.acts[e].sigma[j] == Some(i);
                    assert!(case_i || case_ii, "transition without a defining clause");
                    for k0 in 0..ca1.grid.row_count() {
                        for nu in 0..ca2.grid.col_count() {
                            let r1 = ReesTriple {
                                class: d1,
                                row: k0,
                                word: vec![],
                                col: lam,
                            };
                            let r2 = ReesTriple {
                                class: d2,
                                row: i,
                                word: vec![],
                                col: nu,
                            };
                            let s1 = ReesTriple {
                                class: d1,
                                row: k0,
                                word: free_reduce(&t.label1),
                                col: mu,
                            };
                            let s2 = ReesTriple {
                                class: d2,
                                row: j,
                                word: free_reduce(&t.label2),
                                col: nu,
                            };
                            if case_i {
                                let back = ca1.act(&s1, e, Side::Right).unwrap();
                                assert!(an.triples_equal(&back, &r1).unwrap());
                                let fwd = ca2.act(&r2, e, Side::Left).unwrap();
                                assert!(an.triples_equal(&fwd, &s2).unwrap());
                            }
                            if case_ii {
                                let fwd = ca1.act(&r1, e, Side::Right).unwrap();
                                assert!(an.triples_equal(&fwd, &s1).unwrap());
                                let back = ca2.act(&s2, e, Side::Left).unwrap();
                                assert!(an.triples_equal(&back, &r2).unwrap());
                            }
                        }
                    }
                }
            }
        }
    }
    println!("[PASS] every contact transition verified by direct triple computation");
}

#[test]
fn acceptance_09_fountain_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    // witness law and the stabiliser implication, exhaustively for small E
    for an in gen::sample_biorders().into_iter().map(Analysis::new) {
        let ops = an.ops();
        let exhaustive = an.set.len() <= 12;
        for _ in 0..20 {
            let w = random_word(&mut rng, &an, 5);
            let wit = fountain::tilde_witnesses(&ops, &an, &w);
            let mut rw = vec![wit.r];
            rw.extend(&w);
            assert_eq!(decide(&an, &rw, &w).unwrap(), Verdict::Equal);
            let mut wl = w.clone();
            wl.push(wit.l);
            assert_eq!(decide(&an, &wl, &w).unwrap(), Verdict::Equal);
            let fs: Vec<ElemId> = if exhaustive {
                (0..an.set.len()).collect()
            } else {
                (0..8).map(|_| rng.gen_range(0..an.set.len())).collect()
            };
            for f in fs {
                let mut fw = vec![f];
                fw.extend(&w);
                if decide(&an, &fw, &w).unwrap() == Verdict::Equal {
                    assert_eq!(
                        an.set.product(f, wit.r),
                        Some(wit.r),
                        "{} stabilises {:?} but not its witness",
                        an.set.name(f),
                        w
                    );
                }
            }
        }
    }
    // witness-level congruence on 200 sampled (z, w1, w2)
    let analyses: Vec<Analysis> = gen::sample_biorders().into_iter().map(Analysis::new).collect();
    for round in 0..200u64 {
        let an = &analyses[(round as usize) % analyses.len()];
        let ops = an.ops();
        let w1 = random_word(&mut rng, an, 4);
        let w2 = ops.random_rewrite(&w1, 8, round);
        assert!(fountain::tilde_r_equivalent(&ops, an, &w1, &w2));
        assert!(fountain::tilde_l_equivalent(&ops, an, &w1, &w2));
        let z = random_word(&mut rng, an, 3);
        let mut zw1 = z.clone();
        zw1.extend(&w1);
        let mut zw2 = z.clone();
        zw2.extend(&w2);
        assert!(
            fountain::tilde_r_equivalent(&ops, an, &zw1, &zw2),
            "z = {z:?}, w1 = {w1:?}, w2 = {w2:?}"
        );
        let mut w1z = w1.clone();
        w1z.extend(&z);
        let mut w2z = w2.clone();
        w2z.extend(&z);
        assert!(fountain::tilde_l_equivalent(&ops, an, &w1z, &w2z));
    }
    println!("[PASS] fountain witnesses: identity law, stabiliser implication, congruence");
}

#[test]
fn acceptance_10_fingerprint_necessity_and_interchange_invariance() {
    // decide(u, v) = Equal forces equal fingerprints, and applying a legal
    // interchange move to a coordinatised sequence never changes a verdict
    use ig::contact::{interchange_move, MoveDir};
    use ig::solver::decide_coordinatised;
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let analyses: Vec<Analysis> = gen::sample_biorders().into_iter().map(Analysis::new).collect();
    let mut moves_checked = 0usize;
    for round in 0..600u64 {
        let an = &analyses[(round as usize) % analyses.len()];
        let ops = an.ops();
        let u = random_word(&mut rng, an, 5);
        let v = ops.random_rewrite(&u, rng.gen_range(0..12), round);
        if decide(an, &u, &v).unwrap() == Verdict::Equal {
            assert_eq!(ops.d_fingerprint(&u), ops.d_fingerprint(&v));
        }
        // interchange invariance on the left sequence
        let fu = ops.minimal_r_factorisation(&u);
        let fv = ops.minimal_r_factorisation(&v);
        if fu.classes != fv.classes || fu.factor_count() < 2 {
            continue;
        }
        let left: Vec<ReesTriple> = (0..fu.factor_count())
            .map(|k| coordinatize(&ops, an, fu.factor(&u, k)).unwrap())
            .collect();
        let right: Vec<ReesTriple> = (0..fv.factor_count())
            .map(|k| coordinatize(&ops, an, fv.factor(&v, k)).unwrap())
            .collect();
        let before = decide_coordinatised(an, &left, &right).unwrap();
        for k in 0..left.len() - 1 {
            let ca1 = &an.classes[left[k].class].actions;
            let ca2 = &an.classes[left[k + 1].class].actions;
            for e in 0..an.set.len() {
                for dir in [MoveDir::ShiftRight, MoveDir::ShiftLeft] {
                    let Some((s1, s2)) =
                        interchange_move(ca1, ca2, &left[k], &left[k + 1], e, dir)
                    else {
                        continue;
                    };
                    let mut moved = left.clone();
                    moved[k] = s1;
                    moved[k + 1] = s2;
                    let after = decide_coordinatised(an, &moved, &right).unwrap();
                    assert_eq!(before, after, "interchange changed the verdict");
                    moves_checked += 1;
                }
            }
        }
    }
    assert!(moves_checked >= 50, "only {moves_checked} moves exercised");
    println!("[PASS] fingerprint necessity and interchange invariance ({moves_checked} moves)");
}
