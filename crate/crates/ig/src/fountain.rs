//! Reduced forms and the idempotent witnesses that place every element of
//! the free idempotent generated semigroup in a tilde-R and tilde-L class
//! with an idempotent.

use crate::biorder::{ElemId, Word};
use crate::green::WordOps;
use crate::rees::{idempotent_normal_form, ClassProvider};

/// Rewrite a word so that every factor of its minimal r-factorisation is
/// spelled over the idempotents of its own class; then every letter of
/// every factor is a seed of that factor, and the value is unchanged.
pub fn reduced_form(
    ops: &WordOps,
    classes: &(impl ClassProvider + ?Sized),
    w: &[ElemId],
) -> Word {
    let fp = ops.minimal_r_factorisation(w);
    let mut out = Vec::with_capacity(w.len());
    for k in 0..fp.factor_count() {
        let nf = idempotent_normal_form(ops, classes, fp.factor(w, k))
            .expect("factors of an r-factorisation are regular");
        out.extend(nf);
    }
    out
}

/// The pair of idempotent witnesses of a word: the first letter of the
/// first factor of its reduced form (tilde-R) and the last letter of the
/// last factor (tilde-L).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TildeWitnesses {
    pub r: ElemId,
    pub l: ElemId,
}

pub fn tilde_witnesses(
    ops: &WordOps,
    classes: &(impl ClassProvider + ?Sized),
    w: &[ElemId],
) -> TildeWitnesses {
    let rf = reduced_form(ops, classes, w);
    TildeWitnesses {
        r: rf[0],
        l: *rf.last().unwrap(),
    }
}

/// Two words are tilde-R related iff their witnesses share an R-class in E.
pub fn tilde_r_equivalent(
    ops: &WordOps,
    classes: &(impl ClassProvider + ?Sized),
    w1: &[ElemId],
    w2: &[ElemId],
) -> bool {
    let a = tilde_witnesses(ops, classes, w1).r;
    let b = tilde_witnesses(ops, classes, w2).r;
    ops.green.r_related(a, b)
}

pub fn tilde_l_equivalent(
    ops: &WordOps,
    classes: &(impl ClassProvider + ?Sized),
    w1: &[ElemId],
    w2: &[ElemId],
) -> bool {
    let a = tilde_witnesses(ops, classes, w1).l;
    let b = tilde_witnesses(ops, classes, w2).l;
    ops.green.l_related(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Analysis;
    use crate::biorder::BiorderedSet;
    use crate::gen;
    use crate::solver::{decide, Verdict};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reduced_form_examples() {
        let chain = Analysis::new(
            BiorderedSet::from_cayley_table(&gen::semilattice_chain_table(2).unwrap()).unwrap(),
        );
        let a = chain.set.id_of("a1").unwrap();
        let b = chain.set.id_of("a2").unwrap();
        assert_eq!(reduced_form(&chain.ops(), &chain, &[a, b]), vec![b]);

        let fp = Analysis::new(gen::free_pair());
        assert_eq!(reduced_form(&fp.ops(), &fp, &[0, 1]), vec![0, 1]);

        let band = Analysis::new(
            BiorderedSet::from_cayley_table(&gen::rect_band_table(2, 2).unwrap()).unwrap(),
        );
        let e11 = band.set.id_of("e11").unwrap();
        let e22 = band.set.id_of("e22").unwrap();
        assert_eq!(
            reduced_form(&band.ops(), &band, &[e11, e22]),
            vec![e11, e22]
        );
    }

    #[test]
    fn witness_examples() {
        let fp = Analysis::new(gen::free_pair());
        assert_eq!(
            tilde_witnesses(&fp.ops(), &fp, &[0]),
            TildeWitnesses { r: 0, l: 0 }
        );
        assert_eq!(
            tilde_witnesses(&fp.ops(), &fp, &[0, 1]),
            TildeWitnesses { r: 0, l: 1 }
        );
        let band = Analysis::new(
            BiorderedSet::from_cayley_table(&gen::rect_band_table(2, 2).unwrap()).unwrap(),
        );
        let e11 = band.set.id_of("e11").unwrap();
        let e22 = band.set.id_of("e22").unwrap();
        let w = tilde_witnesses(&band.ops(), &band, &[e11, e22]);
        assert_eq!(w, TildeWitnesses { r: e11, l: e22 });
    }

    #[test]
    fn reduced_form_letters_are_all_seeds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for set in gen::sample_biorders() {
            let an = Analysis::new(set);
            let ops = an.ops();
            for _ in 0..20 {
                let len = rng.gen_range(1..=5);
                let w: Vec<ElemId> = (0..len).map(|_| rng.gen_range(0..an.set.len())).collect();
                let rf = reduced_form(&ops, &an, &w);
                let fp = ops.minimal_r_factorisation(&rf);
                for k in 0..fp.factor_count() {
                    let factor = fp.factor(&rf, k);
                    let reg = ops.regularity_and_seeds(factor).unwrap();
                    assert_eq!(
                        reg.seed_positions,
                        (0..factor.len()).collect::<Vec<_>>(),
                        "not every letter is a seed in {:?}",
                        factor
                    );
                }
                // value preserved
                assert_eq!(decide(&an, &w, &rf).unwrap(), Verdict::Equal);
            }
        }
    }

    #[test]
    fn witness_law_and_maximality() {
        // e_R · w = w, and any idempotent f with f·w = w satisfies f·e_R = e_R
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for set in gen::sample_biorders() {
            let an = Analysis::new(set);
            let ops = an.ops();
            for _ in 0..12 {
                let len = rng.gen_range(1..=4);
                let w: Vec<ElemId> = (0..len).map(|_| rng.gen_range(0..an.set.len())).collect();
                let wit = tilde_witnesses(&ops, &an, &w);
                let mut rw = vec![wit.r];
                rw.extend(&w);
                assert_eq!(decide(&an, &rw, &w).unwrap(), Verdict::Equal);
                let mut wl = w.clone();
                wl.push(wit.l);
                assert_eq!(decide(&an, &wl, &w).unwrap(), Verdict::Equal);
                for f in 0..an.set.len() {
                    let mut fw = vec![f];
                    fw.extend(&w);
                    if decide(&an, &fw, &w).unwrap() == Verdict::Equal {
                        assert_eq!(
                            an.set.product(f, wit.r),
                            Some(wit.r),
                            "f = {} stabilises w = {:?} but not its witness",
                            an.set.name(f),
                            w
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tilde_equivalences() {
        let fp = Analysis::new(gen::free_pair());
        let ops = fp.ops();
        assert!(!tilde_r_equivalent(&ops, &fp, &[0, 1], &[1, 0]));
        assert!(tilde_r_equivalent(&ops, &fp, &[0], &[0]));
        // ef and f share the right stabiliser witness f
        assert!(tilde_l_equivalent(&ops, &fp, &[0, 1], &[1]));
        assert!(!tilde_l_equivalent(&ops, &fp, &[0, 1], &[0]));

        // rewriting never changes the witnesses' classes
        let table = gen::full_transformation_table(3).unwrap();
        let an = Analysis::new(BiorderedSet::from_cayley_table(&table).unwrap());
        let aops = an.ops();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..20 {
            let len = rng.gen_range(1..=5);
            let w: Vec<ElemId> = (0..len).map(|_| rng.gen_range(0..an.set.len())).collect();
            let w2 = aops.random_rewrite(&w, 10, round);
            assert!(tilde_r_equivalent(&aops, &an, &w, &w2));
            assert!(tilde_l_equivalent(&aops, &an, &w, &w2));
        }
    }

    #[test]
    fn witness_level_congruence() {
        // tilde-R equivalence is preserved by common left multiplication
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for set in gen::sample_biorders() {
            let an = Analysis::new(set);
            let ops = an.ops();
            for _ in 0..15 {
                let len = rng.gen_range(1..=4);
                let w1: Vec<ElemId> = (0..len).map(|_| rng.gen_range(0..an.set.len())).collect();
                let w2 = ops.random_rewrite(&w1, 6, rng.gen());
                assert!(tilde_r_equivalent(&ops, &an, &w1, &w2));
                let zlen = rng.gen_range(1..=3);
                let z: Vec<ElemId> = (0..zlen).map(|_| rng.gen_range(0..an.set.len())).collect();
                let mut zw1 = z.clone();
                zw1.extend(&w1);
                let mut zw2 = z.clone();
                zw2.extend(&w2);
                assert!(
                    tilde_r_equivalent(&ops, &an, &zw1, &zw2),
                    "z = {:?}, w1 = {:?}, w2 = {:?}",
                    z,
                    w1,
                    w2
                );
            }
        }
    }
}
