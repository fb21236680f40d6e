//! Decision primitives for words over a biordered set: one-letter R/L
//! extension with class trackers, regularity and seeds, minimal
//! r-factorisations and the D-fingerprint, plus a seeded rewrite oracle over
//! the defining relations.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::biorder::{BiorderedSet, ElemId, GreenData, Word};

/// Context for the word-level computations: the biorder plus its Green data.
pub struct WordOps<'a> {
    pub set: &'a BiorderedSet,
    pub green: &'a GreenData,
}

/// A seed certificate for a regular word w = u e v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedInfo {
    /// 0-based index of the seed letter.
    pub position: usize,
    pub seed: ElemId,
    /// Idempotent R-related (in E) to the value of the whole word.
    pub left_tracker: ElemId,
    /// Idempotent L-related to the value of the whole word.
    pub right_tracker: ElemId,
}

/// Outcome of the regularity test on a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularity {
    /// Certificate at the leftmost seed.
    pub seed: SeedInfo,
    /// All seed positions, ascending.
    pub seed_positions: Vec<usize>,
}

/// A minimal r-factorisation: factor start indices and the D-class of each
/// factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fingerprint {
    /// Start index of each factor; `starts[0] == 0`.
    pub starts: Vec<usize>,
    /// D-class ids of the factors.
    pub classes: Vec<usize>,
}

impl Fingerprint {
    pub fn factor_count(&self) -> usize {
        self.starts.len()
    }

    /// The k-th factor of `w` under this factorisation.
    pub fn factor<'w>(&self, w: &'w [ElemId], k: usize) -> &'w [ElemId] {
        let end = self.starts.get(k + 1).copied().unwrap_or(w.len());
        &w[self.starts[k]..end]
    }
}

impl<'a> WordOps<'a> {
    pub fn new(set: &'a BiorderedSet, green: &'a GreenData) -> Self {
        WordOps { set, green }
    }

    /// One-letter kernel on the right: given the L-class tracker `h` of some
    /// element x (so x L h̄), decide whether x f̄ R x, and if so return the
    /// new L-class tracker of x f̄. The witness is the least g with g L h and
    /// f g = g; the tracker is then g * f.
    pub fn step_right(&self, h: ElemId, f: ElemId) -> Option<ElemId> {
        let class = &self.green.dclasses[self.green.dclass_of[h]];
        class
            .iter()
            .copied()
            .filter(|&g| self.green.l_related(g, h))
            .find(|&g| self.set.product(f, g) == Some(g))
            .map(|g| self.set.product(g, f).expect("basic pair"))
    }

    /// Dual kernel: given the R-class tracker `h` of x, decide whether
    /// f̄ x L x; on success return the new R-class tracker f * g.
    pub fn step_left(&self, h: ElemId, f: ElemId) -> Option<ElemId> {
        let class = &self.green.dclasses[self.green.dclass_of[h]];
        class
            .iter()
            .copied()
            .filter(|&g| self.green.r_related(g, h))
            .find(|&g| self.set.product(g, f) == Some(g))
            .map(|g| self.set.product(f, g).expect("basic pair"))
    }

    /// Decide whether ē v̄ R ē; on success return a tracker t with ē v̄ L t̄.
    pub fn extend_right(&self, e: ElemId, v: &[ElemId]) -> Option<ElemId> {
        v.iter().try_fold(e, |h, &f| self.step_right(h, f))
    }

    /// Decide whether ū ē L ē; on success return a tracker t with ū ē R t̄.
    pub fn extend_left(&self, e: ElemId, u: &[ElemId]) -> Option<ElemId> {
        u.iter().rev().try_fold(e, |h, &f| self.step_left(h, f))
    }

    /// Test regularity of the value of `w`; on success report the leftmost
    /// seed (with both class trackers) and every seed position.
    pub fn regularity_and_seeds(&self, w: &[ElemId]) -> Option<Regularity> {
        assert!(!w.is_empty(), "regularity of the empty word");
        let mut seed_positions = Vec::new();
        let mut leftmost = None;
        for (p, &e) in w.iter().enumerate() {
            let Some(left_tracker) = self.extend_left(e, &w[..p]) else {
                continue;
            };
            let Some(right_tracker) = self.extend_right(e, &w[p + 1..]) else {
                continue;
            };
            seed_positions.push(p);
            if leftmost.is_none() {
                leftmost = Some(SeedInfo {
                    position: p,
                    seed: e,
                    left_tracker,
                    right_tracker,
                });
            }
        }
        leftmost.map(|seed| Regularity {
            seed,
            seed_positions,
        })
    }

    /// Length of the longest prefix of `w` with regular value. Incremental:
    /// every position that passes the left test becomes a candidate seed
    /// whose right tracker is advanced letter by letter.
    pub fn longest_regular_prefix(&self, w: &[ElemId]) -> usize {
        let mut best = 0;
        let mut active: Vec<ElemId> = Vec::new(); // surviving right trackers
        for (q, &letter) in w.iter().enumerate() {
            let mut next = Vec::with_capacity(active.len() + 1);
            for &t in &active {
                if let Some(nt) = self.step_right(t, letter) {
                    next.push(nt);
                }
            }
            if self.extend_left(letter, &w[..q]).is_some() {
                next.push(letter);
            }
            next.dedup();
            active = next;
            if !active.is_empty() {
                best = q + 1;
            }
        }
        best
    }

    /// Greedy minimal r-factorisation: repeatedly split off the longest
    /// regular prefix. A regular product of two or more of the produced
    /// factors would be a longer regular prefix at the step where its first
    /// factor was chosen, so the result is minimal.
    pub fn minimal_r_factorisation(&self, w: &[ElemId]) -> Fingerprint {
        assert!(!w.is_empty(), "factorisation of the empty word");
        let mut starts = Vec::new();
        let mut classes = Vec::new();
        let mut pos = 0;
        while pos < w.len() {
            let len = self.longest_regular_prefix(&w[pos..]);
            debug_assert!(len >= 1, "single letters are regular");
            let reg = self
                .regularity_and_seeds(&w[pos..pos + len])
                .expect("prefix was tested regular");
            starts.push(pos);
            classes.push(self.green.dclass_of[reg.seed.seed]);
            pos += len;
        }
        Fingerprint { starts, classes }
    }

    /// The D-fingerprint of the value of `w`.
    pub fn d_fingerprint(&self, w: &[ElemId]) -> Vec<usize> {
        self.minimal_r_factorisation(w).classes
    }

    /// All minimal r-factorisations of `w` by exhaustive enumeration.
    /// Exponential; cross-check oracle for words of length <= 8 or so.
    pub fn enumerate_minimal_r_factorisations(&self, w: &[ElemId]) -> Vec<Fingerprint> {
        assert!(!w.is_empty());
        let n = w.len();
        let mut regular = vec![vec![false; n + 1]; n];
        for i in 0..n {
            for j in i + 1..=n {
                regular[i][j] = self.regularity_and_seeds(&w[i..j]).is_some();
            }
        }
        let mut out = Vec::new();
        let mut cuts = vec![0usize];
        self.enumerate_rec(w, &regular, &mut cuts, &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        w: &[ElemId],
        regular: &[Vec<bool>],
        cuts: &mut Vec<usize>,
        out: &mut Vec<Fingerprint>,
    ) {
        let pos = *cuts.last().unwrap();
        if pos == w.len() {
            let starts = cuts[..cuts.len() - 1].to_vec();
            // minimality: no product of >= 2 consecutive factors is regular
            for a in 0..starts.len() {
                for b in a + 1..starts.len() {
                    let end = starts.get(b + 1).copied().unwrap_or(w.len());
                    if regular[starts[a]][end] {
                        return;
                    }
                }
            }
            let classes = starts
                .iter()
                .enumerate()
                .map(|(k, &s)| {
                    let end = starts.get(k + 1).copied().unwrap_or(w.len());
                    let reg = self.regularity_and_seeds(&w[s..end]).unwrap();
                    self.green.dclass_of[reg.seed.seed]
                })
                .collect();
            out.push(Fingerprint { starts, classes });
            return;
        }
        for end in pos + 1..=w.len() {
            if regular[pos][end] {
                cuts.push(end);
                self.enumerate_rec(w, regular, cuts, out);
                cuts.pop();
            }
        }
    }

    /// Apply `steps` random legal rewrites to `w`: contractions ef -> e*f on
    /// basic pairs and expansions g -> ef with e*f = g. The value in the
    /// semigroup is preserved by construction.
    pub fn random_rewrite(&self, w: &[ElemId], steps: usize, seed: u64) -> Word {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut word = w.to_vec();
        let n = self.set.len();
        let mut expansions: Vec<Vec<(ElemId, ElemId)>> = vec![Vec::new(); n];
        for e in 0..n {
            for f in 0..n {
                if let Some(g) = self.set.product(e, f) {
                    expansions[g].push((e, f));
                }
            }
        }
        #[derive(Clone, Copy)]
        enum Move {
            Contract(usize),
            Expand(usize, ElemId, ElemId),
        }
        for _ in 0..steps {
            let mut moves = Vec::new();
            for p in 0..word.len() {
                if p + 1 < word.len() && self.set.product(word[p], word[p + 1]).is_some() {
                    moves.push(Move::Contract(p));
                }
                for &(e, f) in &expansions[word[p]] {
                    moves.push(Move::Expand(p, e, f));
                }
            }
            match moves.choose(&mut rng) {
                Some(&Move::Contract(p)) => {
                    let g = self.set.product(word[p], word[p + 1]).unwrap();
                    word.splice(p..p + 2, [g]);
                }
                Some(&Move::Expand(p, e, f)) => {
                    word.splice(p..p + 1, [e, f]);
                }
                None => {}
            }
        }
        word
    }
}
