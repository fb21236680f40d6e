//! Maximal subgroup of a regular D-class, presented on one generator per
//! idempotent cell of the grid: a spanning forest of the bipartite incidence
//! graph is collapsed to 1 and every singular square contributes a relation.
//! The group is free exactly when there are no squares; otherwise coset
//! enumeration tries to certify finiteness.

use std::collections::HashMap;

use thiserror::Error;

use crate::biorder::{BiorderedSet, DClassGrid, ElemId};

/// A letter in a group word: an idempotent cell of the grid, possibly
/// inverted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FLetter {
    pub cell: usize,
    pub inv: bool,
}

impl FLetter {
    pub fn new(cell: usize) -> Self {
        FLetter { cell, inv: false }
    }

    pub fn inverse(self) -> Self {
        FLetter {
            cell: self.cell,
            inv: !self.inv,
        }
    }
}

/// A word over the f-generators of one class.
pub type GroupWord = Vec<FLetter>;

/// Free reduction (cancellation of adjacent x x^-1 only; no relations).
pub fn free_reduce(word: &[FLetter]) -> GroupWord {
    let mut out: GroupWord = Vec::with_capacity(word.len());
    for &l in word {
        if out.last().is_some_and(|p| p.cell == l.cell && p.inv != l.inv) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn invert_word(word: &[FLetter]) -> GroupWord {
    word.iter().rev().map(|l| l.inverse()).collect()
}

/// A singular square: two rows, two columns, all four cells idempotent,
/// singularised by the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularSquare {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    pub witness: ElemId,
    pub kind: SquareKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareKind {
    /// Witness fixes the first column's cells from the left and moves both
    /// rows to the second column from the right.
    A,
    /// Witness fixes the first column's cells from the right and moves the
    /// first row to the second row from the left, in both columns.
    B,
}

/// Exhaustive search for singular squares in a grid. Conditions are
/// evaluated against the partial product table; an undefined product fails
/// the condition.
pub fn singular_squares(set: &BiorderedSet, grid: &DClassGrid) -> Vec<SingularSquare> {
    let mut out = Vec::new();
    for f in 0..set.len() {
        // kind A: f*e_{iλ}=e_{iλ}, f*e_{jλ}=e_{jλ}, e_{iλ}*f=e_{iμ}, e_{jλ}*f=e_{jμ}
        for lam in 0..grid.col_count() {
            let mut moved: Vec<(usize, usize)> = Vec::new(); // (row, target col)
            for i in 0..grid.row_count() {
                let Some(e) = grid.cell(i, lam) else { continue };
                if set.product(f, e) != Some(e) {
                    continue;
                }
                let Some(ef) = set.product(e, f) else { continue };
                let Some((ri, mu)) = grid.position_of(ef) else { continue };
                debug_assert_eq!(ri, i, "e * f stays R-related to e");
                if mu != lam {
                    moved.push((i, mu));
                }
            }
            for a in 0..moved.len() {
                for b in a + 1..moved.len() {
                    if moved[a].1 == moved[b].1 {
                        out.push(SingularSquare {
                            rows: (moved[a].0, moved[b].0),
                            cols: (lam, moved[a].1),
                            witness: f,
                            kind: SquareKind::A,
                        });
                    }
                }
            }
        }
        // kind B: e_{iλ}*f=e_{iλ}, e_{jλ}*f=e_{jλ}, f*e_{iλ}=e_{jλ}, f*e_{iμ}=e_{jμ}
        for lam in 0..grid.col_count() {
            for i in 0..grid.row_count() {
                let Some(ei) = grid.cell(i, lam) else { continue };
                if set.product(ei, f) != Some(ei) {
                    continue;
                }
                let Some(fei) = set.product(f, ei) else { continue };
                let Some((j, cl)) = grid.position_of(fei) else { continue };
                debug_assert_eq!(cl, lam, "f * e stays L-related to e");
                if j == i {
                    continue;
                }
                let Some(ej) = grid.cell(j, lam) else { continue };
                if set.product(ej, f) != Some(ej) {
                    continue;
                }
                for mu in 0..grid.col_count() {
                    if mu == lam {
                        continue;
                    }
                    let (Some(eimu), Some(_)) = (grid.cell(i, mu), grid.cell(j, mu)) else {
                        continue;
                    };
                    let Some(feimu) = set.product(f, eimu) else { continue };
                    if grid.position_of(feimu) == Some((j, mu)) {
                        out.push(SingularSquare {
                            rows: (i, j),
                            cols: (lam, mu),
                            witness: f,
                            kind: SquareKind::B,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Presentation of the maximal subgroup: one generator per idempotent cell,
/// the spanning forest collapsed, one relation per (deduplicated) square.
#[derive(Debug, Clone)]
pub struct Presentation {
    /// Per cell: does it lie on the spanning forest?
    pub tree: Vec<bool>,
    /// Canonicalised square relations (i < j, λ < μ), each standing for
    /// f_{iλ}^-1 f_{iμ} = f_{jλ}^-1 f_{jμ}.
    pub squares: Vec<(usize, usize, usize, usize)>,
    /// Cells off the forest, ascending: the free basis when no squares exist.
    pub basis: Vec<usize>,
    cell_by_pos: HashMap<(usize, usize), usize>,
}

/// Build the presentation: spanning forest by BFS from the least vertex of
/// each component (row vertices before column vertices), exploring cells in
/// row-major order.
pub fn presentation(set: &BiorderedSet, grid: &DClassGrid) -> Presentation {
    let rows = grid.row_count();
    let verts = rows + grid.col_count();
    let mut seen = vec![false; verts];
    let mut tree = vec![false; grid.cells.len()];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts];
    for (c, &(i, l)) in grid.cells.iter().enumerate() {
        adj[i].push(c);
        adj[rows + l].push(c);
    }
    for start in 0..verts {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &c in &adj[v] {
                let (i, l) = grid.cells[c];
                let other = if v == i { rows + l } else { i };
                if !seen[other] {
                    seen[other] = true;
                    tree[c] = true;
                    queue.push_back(other);
                }
            }
        }
    }

    let mut squares: Vec<(usize, usize, usize, usize)> = singular_squares(set, grid)
        .into_iter()
        .map(|s| {
            let (i, j) = if s.rows.0 <= s.rows.1 {
                s.rows
            } else {
                (s.rows.1, s.rows.0)
            };
            let (l, m) = if s.cols.0 <= s.cols.1 {
                s.cols
            } else {
                (s.cols.1, s.cols.0)
            };
            (i, j, l, m)
        })
        .collect();
    squares.sort_unstable();
    squares.dedup();

    let basis = (0..grid.cells.len()).filter(|&c| !tree[c]).collect();
    let cell_by_pos = grid
        .cells
        .iter()
        .enumerate()
        .map(|(c, &(i, l))| ((i, l), c))
        .collect();
    Presentation {
        tree,
        squares,
        basis,
        cell_by_pos,
    }
}

impl Presentation {
    pub fn cell_id(&self, i: usize, l: usize) -> Option<usize> {
        self.cell_by_pos.get(&(i, l)).copied()
    }

    /// Relators over the basis generators: each square relation with forest
    /// generators deleted and the result freely reduced; empty relators are
    /// dropped.
    pub fn basis_relators(&self) -> Vec<GroupWord> {
        let mut out = Vec::new();
        for &(i, j, l, m) in &self.squares {
            let letters = [(i, l, true), (i, m, false), (j, m, true), (j, l, false)];
            let mut rel: GroupWord = Vec::new();
            for (r, c, inv) in letters {
                let cell = self.cell_id(r, c).expect("square cells exist");
                if !self.tree[cell] {
                    rel.push(FLetter { cell, inv });
                }
            }
            let rel = free_reduce(&rel);
            if !rel.is_empty() {
                out.push(rel);
            }
        }
        out
    }
}

/// Backend answering group-word questions for one class.
#[derive(Debug, Clone)]
pub enum GroupBackend {
    /// Free group on the non-forest cells (possibly of rank 0).
    Free { basis: Vec<usize> },
    /// Finite group certified by coset enumeration.
    Finite(FiniteGroup),
    /// Enumeration did not close within the coset bound.
    Unknown,
}

impl GroupBackend {
    pub fn is_unknown(&self) -> bool {
        matches!(self, GroupBackend::Unknown)
    }

    /// A free group of rank zero is trivial, hence effectively finite.
    pub fn is_nontrivial_free(&self) -> bool {
        matches!(self, GroupBackend::Free { basis } if !basis.is_empty())
    }
}

/// A finite group as a multiplication table (identity 0), with the image of
/// every cell generator.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub order: usize,
    mul: Vec<usize>,
    inv: Vec<usize>,
    /// Image of each cell generator (forest cells map to 0).
    pub cell_image: Vec<usize>,
}

impl FiniteGroup {
    pub fn trivial(cells: usize) -> Self {
        FiniteGroup {
            order: 1,
            mul: vec![0],
            inv: vec![0],
            cell_image: vec![0; cells],
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn eval(&self, word: &[FLetter]) -> usize {
        word.iter().fold(0, |acc, l| {
            let g = self.cell_image[l.cell];
            self.mul(acc, if l.inv { self.inv(g) } else { g })
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("class has no usable group backend")]
    UnknownBackend,
}

/// Canonical form of a group element under some backend.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupValue {
    /// Freely reduced word over basis cells.
    Free(GroupWord),
    /// Element index in the finite table.
    Finite(usize),
}

impl GroupValue {
    pub fn is_identity(&self) -> bool {
        match self {
            GroupValue::Free(w) => w.is_empty(),
            GroupValue::Finite(e) => *e == 0,
        }
    }
}

/// Canonicalise a word over the class generators: forest generators are the
/// identity, so they are deleted; the rest is handled by the backend.
pub fn group_reduce(
    pres: &Presentation,
    backend: &GroupBackend,
    word: &[FLetter],
) -> Result<GroupValue, GroupError> {
    match backend {
        GroupBackend::Free { .. } => {
            let kept: GroupWord = word
                .iter()
                .copied()
                .filter(|l| !pres.tree[l.cell])
                .collect();
            Ok(GroupValue::Free(free_reduce(&kept)))
        }
        GroupBackend::Finite(g) => Ok(GroupValue::Finite(g.eval(word))),
        GroupBackend::Unknown => Err(GroupError::UnknownBackend),
    }
}

/// Classify the maximal subgroup of a grid: free when no squares exist,
/// otherwise certified finite by coset enumeration, otherwise unknown.
pub fn classify(pres: &Presentation, coset_bound: usize) -> GroupBackend {
    if pres.squares.is_empty() {
        return GroupBackend::Free {
            basis: pres.basis.clone(),
        };
    }
    let gens = pres.basis.len();
    let letter_of_cell: HashMap<usize, usize> = pres
        .basis
        .iter()
        .enumerate()
        .map(|(k, &c)| (c, k))
        .collect();
    let relators: Vec<Vec<(usize, bool)>> = pres
        .basis_relators()
        .iter()
        .map(|rel| {
            rel.iter()
                .map(|l| (letter_of_cell[&l.cell], l.inv))
                .collect()
        })
        .collect();
    match todd_coxeter(gens, &relators, coset_bound) {
        Some(cosets) => {
            let order = cosets.order;
            let mut cell_image = vec![0usize; pres.tree.len()];
            for (k, &c) in pres.basis.iter().enumerate() {
                cell_image[c] = cosets.act(0, k, false);
            }
            let mut mul = vec![0usize; order * order];
            let mut inv = vec![0usize; order];
            for a in 0..order {
                for b in 0..order {
                    let prod = cosets.rep_words[b]
                        .iter()
                        .fold(a, |acc, &(g, i)| cosets.act(acc, g, i));
                    mul[a * order + b] = prod;
                    if prod == 0 {
                        inv[a] = b;
                    }
                }
            }
            GroupBackend::Finite(FiniteGroup {
                order,
                mul,
                inv,
                cell_image,
            })
        }
        None => GroupBackend::Unknown,
    }
}

/// Result of a successful coset enumeration over the trivial subgroup.
pub struct CosetTable {
    pub order: usize,
    table: Vec<usize>, // order * 2gens; columns alternate g, g^-1
    gens: usize,
    /// A word reaching each coset from coset 0.
    rep_words: Vec<Vec<(usize, bool)>>,
}

impl CosetTable {
    pub fn act(&self, coset: usize, g: usize, inv: bool) -> usize {
        self.table[coset * 2 * self.gens + 2 * g + usize::from(inv)]
    }
}

struct Enumerator<'r> {
    cols: usize,
    table: Vec<Option<usize>>,
    parent: Vec<usize>,
    live: usize,
    relators: &'r [Vec<(usize, bool)>],
    bound: usize,
    mutations: u64,
}

impl<'r> Enumerator<'r> {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn get(&mut self, a: usize, c: usize) -> Option<usize> {
        self.table[a * self.cols + c].map(|t| self.find(t))
    }

    fn new_coset(&mut self) -> Option<usize> {
        let fresh = self.parent.len();
        if fresh >= self.bound {
            return None;
        }
        self.parent.push(fresh);
        self.table.extend(std::iter::repeat_n(None, self.cols));
        self.live += 1;
        self.mutations += 1;
        Some(fresh)
    }

    /// Record a*c = b, queueing a coincidence if it contradicts the table.
    fn deduce(&mut self, a: usize, c: usize, b: usize, queue: &mut Vec<(usize, usize)>) {
        let (a, b) = (self.find(a), self.find(b));
        match self.get(a, c) {
            None => {
                self.table[a * self.cols + c] = Some(b);
                self.mutations += 1;
            }
            Some(old) if old != b => queue.push((old, b)),
            Some(_) => {}
        }
    }

    fn process(&mut self, queue: &mut Vec<(usize, usize)>) {
        while let Some((x, y)) = queue.pop() {
            let (x, y) = (self.find(x), self.find(y));
            if x == y {
                continue;
            }
            let (keep, drop) = if x < y { (x, y) } else { (y, x) };
            self.parent[drop] = keep;
            self.live -= 1;
            self.mutations += 1;
            for c in 0..self.cols {
                if let Some(t) = self.table[drop * self.cols + c] {
                    let t = self.find(t);
                    match self.get(keep, c) {
                        None => self.table[keep * self.cols + c] = Some(t),
                        Some(old) if old != t => queue.push((old, t)),
                        Some(_) => {}
                    }
                }
            }
        }
    }

    /// Scan one relator as a loop at alpha, defining cosets to fill gaps.
    /// Returns false when the coset bound is hit.
    fn scan(&mut self, alpha: usize, rel: &[(usize, bool)]) -> bool {
        let col = |g: usize, inv: bool| 2 * g + usize::from(inv);
        let mut queue = Vec::new();
        let mut at = alpha;
        let mut idx = 0;
        loop {
            let a = self.find(at);
            if idx == rel.len() {
                let root = self.find(alpha);
                if a != root {
                    queue.push((a, root));
                    self.process(&mut queue);
                }
                return true;
            }
            let (g, inv) = rel[idx];
            match self.get(a, col(g, inv)) {
                Some(next) => {
                    at = next;
                    idx += 1;
                }
                None if idx + 1 == rel.len() => {
                    let root = self.find(alpha);
                    self.deduce(a, col(g, inv), root, &mut queue);
                    self.deduce(root, col(g, !inv), a, &mut queue);
                    self.process(&mut queue);
                    return true;
                }
                None => {
                    let Some(fresh) = self.new_coset() else {
                        return false;
                    };
                    self.table[a * self.cols + col(g, inv)] = Some(fresh);
                    self.table[fresh * self.cols + col(g, !inv)] = Some(a);
                    at = fresh;
                    idx += 1;
                }
            }
        }
    }
}

/// HLT coset enumeration over the trivial subgroup with deterministic
/// scheduling. Passes repeat until nothing changes, so the returned table
/// satisfies every relator at every live coset. Returns None if more than
/// `bound` cosets get defined.
pub fn todd_coxeter(
    gens: usize,
    relators: &[Vec<(usize, bool)>],
    bound: usize,
) -> Option<CosetTable> {
    let cols = 2 * gens;
    let mut en = Enumerator {
        cols: cols.max(1),
        table: vec![None; cols.max(1)],
        parent: vec![0],
        live: 1,
        relators,
        bound,
        mutations: 0,
    };
    loop {
        let before = en.mutations;
        let mut alpha = 0;
        while alpha < en.parent.len() {
            if en.find(alpha) != alpha {
                alpha += 1;
                continue;
            }
            for ri in 0..en.relators.len() {
                if en.find(alpha) != alpha {
                    break;
                }
                let rel = en.relators[ri].clone();
                if !en.scan(alpha, &rel) {
                    return None;
                }
            }
            if en.find(alpha) == alpha {
                // complete the row so generators outside every relator are
                // covered too; a free generator just runs into the bound
                for c in 0..cols {
                    if en.find(alpha) != alpha {
                        break;
                    }
                    if en.get(alpha, c).is_none() {
                        let fresh = en.new_coset()?;
                        en.table[alpha * en.cols + c] = Some(fresh);
                        en.table[fresh * en.cols + (c ^ 1)] = Some(alpha);
                    }
                }
            }
            alpha += 1;
        }
        if en.mutations == before {
            break;
        }
    }

    // compact live cosets; merging keeps the smaller index, so coset 0 stays 0
    let total = en.parent.len();
    let mut rename = HashMap::new();
    for x in 0..total {
        if en.find(x) == x {
            let id = rename.len();
            rename.insert(x, id);
        }
    }
    let live = en.live;
    debug_assert_eq!(rename.len(), live);
    let mut compact = vec![0usize; live * cols];
    for x in 0..total {
        if en.find(x) != x {
            continue;
        }
        let new = rename[&x];
        for c in 0..cols {
            let t = en.get(x, c).expect("closed table");
            compact[new * cols + c] = rename[&t];
        }
    }
    let mut rep_words: Vec<Option<Vec<(usize, bool)>>> = vec![None; live];
    rep_words[0] = Some(Vec::new());
    let mut bfs = std::collections::VecDeque::from([0usize]);
    while let Some(x) = bfs.pop_front() {
        for g in 0..gens {
            for inv in [false, true] {
                let y = compact[x * cols + 2 * g + usize::from(inv)];
                if rep_words[y].is_none() {
                    let mut w = rep_words[x].clone().unwrap();
                    w.push((g, inv));
                    rep_words[y] = Some(w);
                    bfs.push_back(y);
                }
            }
        }
    }
    Some(CosetTable {
        order: live,
        table: compact,
        gens,
        rep_words: rep_words
            .into_iter()
            .map(|w| w.expect("coset graph is connected"))
            .collect(),
    })
}
