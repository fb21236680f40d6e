//! Rees matrix coordinatisation of regular elements: per-letter partial
//! actions on the rows and columns of a class grid, the induced group-word
//! multipliers, the word-to-triple map, idempotent normal forms and
//! in-class multiplication.

use thiserror::Error;

use crate::biorder::{DClassGrid, ElemId, Word};
use crate::green::WordOps;
use crate::subgroup::{free_reduce, FLetter, GroupWord};

/// The idempotent partial maps induced by one letter on a class grid:
/// `tau` acts on columns from the right, `sigma` on rows from the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAction {
    pub tau: Vec<Option<usize>>,
    pub sigma: Vec<Option<usize>>,
    /// Fixed points (= image) of tau, ascending.
    pub tau_fix: Vec<usize>,
    /// Fixed points of sigma, ascending.
    pub sigma_fix: Vec<usize>,
}

impl PartialAction {
    pub fn is_empty(&self) -> bool {
        self.tau_fix.is_empty()
    }
}

/// Compute the action of letter `e` on the grid: a column extends iff the
/// one-letter kernel succeeds on its least idempotent, and the image column
/// is the tracker's column; dually for rows.
pub fn sigma_tau(ops: &WordOps, grid: &DClassGrid, e: ElemId) -> PartialAction {
    let tau: Vec<Option<usize>> = (0..grid.col_count())
        .map(|lam| {
            let rep = grid.least_in_col(lam);
            ops.step_right(rep, e)
                .map(|t| grid.position_of(t).expect("tracker stays in class").1)
        })
        .collect();
    let sigma: Vec<Option<usize>> = (0..grid.row_count())
        .map(|i| {
            let rep = grid.least_in_row(i);
            ops.step_left(rep, e)
                .map(|t| grid.position_of(t).expect("tracker stays in class").0)
        })
        .collect();
    let tau_fix = tau
        .iter()
        .enumerate()
        .filter_map(|(l, &img)| (img == Some(l)).then_some(l))
        .collect();
    let sigma_fix = sigma
        .iter()
        .enumerate()
        .filter_map(|(i, &img)| (img == Some(i)).then_some(i))
        .collect();
    let act = PartialAction {
        tau,
        sigma,
        tau_fix,
        sigma_fix,
    };
    // non-empty tau forces non-empty sigma and vice versa; both maps are
    // idempotent, so image = fixed points
    debug_assert_eq!(
        act.tau.iter().any(|t| t.is_some()),
        act.sigma.iter().any(|s| s.is_some())
    );
    debug_assert!(act.tau.iter().flatten().all(|&l| act.tau[l] == Some(l)));
    debug_assert!(act.sigma.iter().flatten().all(|&i| act.sigma[i] == Some(i)));
    act
}

/// Everything needed to act on one class: its grid plus the action of every
/// letter of E.
#[derive(Debug, Clone)]
pub struct ClassActions {
    pub grid: DClassGrid,
    /// Indexed by letter.
    pub acts: Vec<PartialAction>,
}

/// Access to the per-class action data, however it is stored.
pub trait ClassProvider {
    fn actions_of(&self, class: usize) -> &ClassActions;
}

impl ClassProvider for [ClassActions] {
    fn actions_of(&self, class: usize) -> &ClassActions {
        &self[class]
    }
}

impl ClassProvider for Vec<ClassActions> {
    fn actions_of(&self, class: usize) -> &ClassActions {
        &self[class]
    }
}

pub fn class_actions(ops: &WordOps, grid: DClassGrid) -> ClassActions {
    let acts = (0..ops.set.len())
        .map(|e| sigma_tau(ops, &grid, e))
        .collect();
    ClassActions { grid, acts }
}

/// A regular element in Rees coordinates: a row, a group word over the
/// class's cell generators, and a column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReesTriple {
    pub class: usize,
    pub row: usize,
    pub word: GroupWord,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("word does not represent a regular element")]
pub struct NotRegular;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("triples live in different D-classes ({0} vs {1})")]
pub struct ClassMismatch(pub usize, pub usize);

impl ClassActions {
    /// Least fixed point of sigma_e whose generator cells exist at both
    /// given columns. The canonical choice; the square relations make any
    /// admissible choice equal.
    fn omega_row(&self, e: ElemId, col_a: usize, col_b: usize) -> usize {
        self.acts[e]
            .sigma_fix
            .iter()
            .copied()
            .find(|&i| {
                self.grid.cell_id(i, col_a).is_some() && self.grid.cell_id(i, col_b).is_some()
            })
            .expect("some fixed row carries generators at both columns")
    }

    fn omega_col(&self, e: ElemId, row_a: usize, row_b: usize) -> usize {
        self.acts[e]
            .tau_fix
            .iter()
            .copied()
            .find(|&l| {
                self.grid.cell_id(row_a, l).is_some() && self.grid.cell_id(row_b, l).is_some()
            })
            .expect("some fixed column carries generators at both rows")
    }

    /// Right multiplier for the column move `col -> tau(col)` under `e`:
    /// f_{i0,col}^-1 f_{i0,col'}.
    pub fn right_omega(&self, e: ElemId, col: usize) -> Option<(usize, GroupWord)> {
        let col2 = self.acts[e].tau[col]?;
        let i0 = self.omega_row(e, col, col2);
        let w = vec![
            FLetter::new(self.grid.cell_id(i0, col).unwrap()).inverse(),
            FLetter::new(self.grid.cell_id(i0, col2).unwrap()),
        ];
        Some((col2, free_reduce(&w)))
    }

    /// Left multiplier for the row move `row -> sigma(row)` under `e`:
    /// f_{row',λ0} f_{row,λ0}^-1.
    pub fn left_omega(&self, e: ElemId, row: usize) -> Option<(usize, GroupWord)> {
        let row2 = self.acts[e].sigma[row]?;
        let l0 = self.omega_col(e, row, row2);
        let w = vec![
            FLetter::new(self.grid.cell_id(row2, l0).unwrap()),
            FLetter::new(self.grid.cell_id(row, l0).unwrap()).inverse(),
        ];
        Some((row2, free_reduce(&w)))
    }

    /// Act by the letter `e` on a triple of this class. `None` means the
    /// product leaves the D-class.
    pub fn act(&self, t: &ReesTriple, e: ElemId, side: Side) -> Option<ReesTriple> {
        match side {
            Side::Right => {
                let (col2, omega) = self.right_omega(e, t.col)?;
                let mut word = t.word.clone();
                word.extend(omega);
                Some(ReesTriple {
                    class: t.class,
                    row: t.row,
                    word: free_reduce(&word),
                    col: col2,
                })
            }
            Side::Left => {
                let (row2, omega) = self.left_omega(e, t.row)?;
                let mut word = omega;
                word.extend(t.word.iter().copied());
                Some(ReesTriple {
                    class: t.class,
                    row: row2,
                    word: free_reduce(&word),
                    col: t.col,
                })
            }
        }
    }
}

/// Coordinatise a regular word, folding the letter actions outward from the
/// leftmost seed.
pub fn coordinatize(
    ops: &WordOps,
    classes: &(impl ClassProvider + ?Sized),
    w: &[ElemId],
) -> Result<ReesTriple, NotRegular> {
    let reg = ops.regularity_and_seeds(w).ok_or(NotRegular)?;
    coordinatize_at(ops, classes, w, reg.seed.position)
}

/// Coordinatise relative to a chosen seed position (which must be a seed).
pub fn coordinatize_at(
    ops: &WordOps,
    classes: &(impl ClassProvider + ?Sized),
    w: &[ElemId],
    seed_pos: usize,
) -> Result<ReesTriple, NotRegular> {
    let e = w[seed_pos];
    let class = ops.green.dclass_of[e];
    let ca = classes.actions_of(class);
    let (row, col) = ca.grid.position_of(e).expect("seed is in its class");
    let mut t = ReesTriple {
        class,
        row,
        word: vec![FLetter::new(ca.grid.cell_id(row, col).unwrap())],
        col,
    };
    for &h in &w[seed_pos + 1..] {
        t = ca.act(&t, h, Side::Right).ok_or(NotRegular)?;
    }
    for &g in w[..seed_pos].iter().rev() {
        t = ca.act(&t, g, Side::Left).ok_or(NotRegular)?;
    }
    Ok(t)
}

/// Rewrite a regular word as a word over the idempotents of its own class,
/// with the same coordinates. Adjacent repeated letters are collapsed.
pub fn idempotent_normal_form(
    ops: &WordOps,
    classes: &(impl ClassProvider + ?Sized),
    w: &[ElemId],
) -> Result<Word, NotRegular> {
    let reg = ops.regularity_and_seeds(w).ok_or(NotRegular)?;
    let p = reg.seed.position;
    let e = w[p];
    let class = ops.green.dclass_of[e];
    let ca = classes.actions_of(class);
    let (mut row, mut col) = ca.grid.position_of(e).expect("seed is in its class");
    let seed_cell = ca.grid.cell(row, col).unwrap();

    let mut right_cells: Vec<ElemId> = Vec::new();
    for &h in &w[p + 1..] {
        let col2 = ca.acts[h].tau[col].ok_or(NotRegular)?;
        let j = ca.omega_row(h, col, col2);
        right_cells.push(ca.grid.cell(j, col2).unwrap());
        col = col2;
    }
    let mut left_cells: Vec<ElemId> = Vec::new();
    for &g in w[..p].iter().rev() {
        let row2 = ca.acts[g].sigma[row].ok_or(NotRegular)?;
        let l0 = ca.omega_col(g, row, row2);
        left_cells.push(ca.grid.cell(row2, l0).unwrap());
        row = row2;
    }
    left_cells.reverse();

    let mut out = left_cells;
    out.push(seed_cell);
    out.extend(right_cells);
    out.dedup();
    Ok(out)
}

/// Multiply two triples of the same class. `None` means the product leaves
/// the class (the sandwich entry is zero, so the product is not regular).
pub fn multiply_in_class(
    grid: &DClassGrid,
    t1: &ReesTriple,
    t2: &ReesTriple,
) -> Result<Option<ReesTriple>, ClassMismatch> {
    if t1.class != t2.class {
        return Err(ClassMismatch(t1.class, t2.class));
    }
    let Some(cell) = grid.cell_id(t2.row, t1.col) else {
        return Ok(None);
    };
    let mut word = t1.word.clone();
    word.push(FLetter::new(cell).inverse());
    word.extend(t2.word.iter().copied());
    Ok(Some(ReesTriple {
        class: t1.class,
        row: t1.row,
        word: free_reduce(&word),
        col: t2.col,
    }))
}
