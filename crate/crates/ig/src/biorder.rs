//! Finite biordered sets: the partial algebra of idempotents of a semigroup,
//! with products kept only on basic pairs, together with the Green structure
//! derived from it.

use std::collections::HashMap;

use thiserror::Error;

/// Index of an element in a [`BiorderedSet`] (input order).
pub type ElemId = usize;

/// A word over the elements of a biordered set.
pub type Word = Vec<ElemId>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("unknown element name `{0}`")]
    UnknownName(String),
    #[error("conflicting products given for ({0}, {1})")]
    ConflictingProduct(String, String),
    #[error("element `{0}` violates the idempotent law: its square is missing or differs")]
    MissingIdempotentLaw(String),
    #[error("product ({0}, {1}) is defined but ({1}, {0}) is not")]
    HalfDefinedPair(String, String),
    #[error("product defined on non-basic pair ({0}, {1}): neither value lies in the pair")]
    NonBasicProduct(String, String),
    #[error("product of ({0}, {1}) is `{2}`, which is not idempotent under the table")]
    NonIdempotentProduct(String, String, String),
    #[error("multiplication table is not associative: ({0} {1}) {2} != {0} ({1} {2})")]
    NonAssociative(String, String, String),
    #[error("malformed table: {0}")]
    BadTable(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown letter `{0}`")]
pub struct UnknownLetter(pub String);

/// A finite biordered set: named elements and a partial product table that is
/// defined exactly on basic pairs (and on every diagonal).
#[derive(Debug, Clone)]
pub struct BiorderedSet {
    names: Vec<String>,
    index: HashMap<String, ElemId>,
    product: Vec<Option<ElemId>>, // n*n, row-major
}

impl BiorderedSet {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, e: ElemId) -> &str {
        &self.names[e]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<ElemId> {
        self.index.get(name).copied()
    }

    /// The partial product `e * f`, defined iff `{e, f}` is a basic pair or `e == f`.
    pub fn product(&self, e: ElemId, f: ElemId) -> Option<ElemId> {
        self.product[e * self.names.len() + f]
    }

    /// `e <=_r f`, i.e. `f e = e`.
    pub fn le_r(&self, e: ElemId, f: ElemId) -> bool {
        self.product(f, e) == Some(e)
    }

    /// `e <=_l f`, i.e. `e f = e`.
    pub fn le_l(&self, e: ElemId, f: ElemId) -> bool {
        self.product(e, f) == Some(e)
    }

    /// The identity of the biorder, if present: an element above everything
    /// in both quasi-orders.
    pub fn identity(&self) -> Option<ElemId> {
        (0..self.len()).find(|&one| {
            (0..self.len()).all(|e| self.le_r(e, one) && self.le_l(e, one))
        })
    }

    /// Parse a whitespace-separated word of element names.
    pub fn parse_word(&self, input: &str) -> Result<Word, UnknownLetter> {
        input
            .split_whitespace()
            .map(|s| self.id_of(s).ok_or_else(|| UnknownLetter(s.to_string())))
            .collect()
    }

    pub fn word_to_string(&self, w: &[ElemId]) -> String {
        w.iter()
            .map(|&e| self.name(e))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Build a biordered set from a raw element list and a list of defined
    /// products, checking the sanity conditions a biorder table must satisfy.
    /// Element order in `elements` fixes all downstream tie-breaking.
    pub fn validate_and_build(
        elements: &[String],
        products: &[(String, String, String)],
    ) -> Result<Self, BuildError> {
        let mut index = HashMap::new();
        for (i, name) in elements.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(BuildError::DuplicateName(name.clone()));
            }
        }
        let n = elements.len();
        let mut product: Vec<Option<ElemId>> = vec![None; n * n];
        let look = |index: &HashMap<String, usize>, s: &String| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| BuildError::UnknownName(s.clone()))
        };
        for (a, b, c) in products {
            let (e, f, g) = (look(&index, a)?, look(&index, b)?, look(&index, c)?);
            let slot = &mut product[e * n + f];
            match slot {
                Some(old) if *old != g => {
                    return Err(BuildError::ConflictingProduct(a.clone(), b.clone()))
                }
                _ => *slot = Some(g),
            }
        }
        let set = BiorderedSet {
            names: elements.to_vec(),
            index,
            product,
        };
        set.check_sanity()?;
        Ok(set)
    }

    fn check_sanity(&self) -> Result<(), BuildError> {
        let n = self.len();
        // Off-diagonal checks first so that a bad product value is reported
        // against the pair that produced it.
        for e in 0..n {
            for f in 0..n {
                if e == f {
                    continue;
                }
                let Some(g) = self.product(e, f) else { continue };
                if self.product(f, e).is_none() {
                    return Err(BuildError::HalfDefinedPair(
                        self.names[e].clone(),
                        self.names[f].clone(),
                    ));
                }
                let fe = self.product(f, e).unwrap();
                if g != e && g != f && fe != e && fe != f {
                    return Err(BuildError::NonBasicProduct(
                        self.names[e].clone(),
                        self.names[f].clone(),
                    ));
                }
                if self.product(g, g) != Some(g) {
                    return Err(BuildError::NonIdempotentProduct(
                        self.names[e].clone(),
                        self.names[f].clone(),
                        self.names[g].clone(),
                    ));
                }
            }
        }
        for e in 0..n {
            if self.product(e, e) != Some(e) {
                return Err(BuildError::MissingIdempotentLaw(self.names[e].clone()));
            }
        }
        Ok(())
    }

    /// Extract the biordered set of idempotents from a full multiplication
    /// table. The table is checked for associativity first.
    pub fn from_cayley_table(table: &CayleyTable) -> Result<Self, BuildError> {
        table.check()?;
        table.check_associative()?;
        let idems: Vec<usize> = (0..table.len()).filter(|&x| table.mul(x, x) == x).collect();
        let pos: HashMap<usize, usize> = idems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = idems.len();
        let mut product = vec![None; n * n];
        for (i, &e) in idems.iter().enumerate() {
            for (j, &f) in idems.iter().enumerate() {
                let ef = table.mul(e, f);
                let fe = table.mul(f, e);
                if ef == e || ef == f || fe == e || fe == f {
                    // basic pair: both products are idempotent and retained
                    product[i * n + j] = Some(pos[&ef]);
                    product[j * n + i] = Some(pos[&fe]);
                }
            }
        }
        let names: Vec<String> = idems.iter().map(|&x| table.names[x].clone()).collect();
        let index = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(BiorderedSet {
            names,
            index,
            product,
        })
    }
}

/// A full multiplication table of a finite semigroup.
#[derive(Debug, Clone)]
pub struct CayleyTable {
    pub names: Vec<String>,
    pub table: Vec<usize>, // n*n, row-major
}

impl CayleyTable {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.names.len() + b]
    }

    fn check(&self) -> Result<(), BuildError> {
        let n = self.names.len();
        if self.table.len() != n * n {
            return Err(BuildError::BadTable(format!(
                "expected {} entries, got {}",
                n * n,
                self.table.len()
            )));
        }
        if let Some(&bad) = self.table.iter().find(|&&v| v >= n) {
            return Err(BuildError::BadTable(format!("entry {bad} out of range")));
        }
        let mut seen = HashMap::new();
        for (i, name) in self.names.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(BuildError::DuplicateName(name.clone()));
            }
        }
        Ok(())
    }

    /// Associativity via Light's test: find a generating set greedily, then
    /// check (xa)y = x(ay) for every generator a. Candidates are tried in
    /// decreasing order of right-ideal size, which keeps generating sets
    /// small for transformation-monoid style tables.
    fn check_associative(&self) -> Result<(), BuildError> {
        let n = self.len();
        if n == 0 {
            return Ok(());
        }
        let mut order: Vec<usize> = (0..n).collect();
        let ideal_size = |a: usize| {
            let mut seen = vec![false; n];
            seen[a] = true;
            let mut count = 1usize;
            for x in 0..n {
                let ax = self.mul(a, x);
                if !seen[ax] {
                    seen[ax] = true;
                    count += 1;
                }
            }
            count
        };
        let sizes: Vec<usize> = (0..n).map(ideal_size).collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(sizes[a]), a));

        let mut generated = vec![false; n];
        let mut members: Vec<usize> = Vec::new();
        let mut gens: Vec<usize> = Vec::new();
        for &cand in &order {
            if generated[cand] {
                continue;
            }
            gens.push(cand);
            // close under products with the existing members
            let mut frontier = vec![cand];
            generated[cand] = true;
            members.push(cand);
            while let Some(x) = frontier.pop() {
                for i in 0..members.len() {
                    let m = members[i];
                    for p in [self.mul(x, m), self.mul(m, x)] {
                        if !generated[p] {
                            generated[p] = true;
                            members.push(p);
                            frontier.push(p);
                        }
                    }
                }
            }
        }
        for &a in &gens {
            for x in 0..n {
                let xa = self.mul(x, a);
                for y in 0..n {
                    if self.mul(xa, y) != self.mul(x, self.mul(a, y)) {
                        return Err(BuildError::NonAssociative(
                            self.names[x].clone(),
                            self.names[a].clone(),
                            self.names[y].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Green structure of a biordered set: quasi-orders, R/L/D partitions, the
/// natural partial order, and the order on D-classes with maximality flags.
#[derive(Debug, Clone)]
pub struct GreenData {
    n: usize,
    le_r: Vec<bool>,
    le_l: Vec<bool>,
    /// D-class id of each element; classes numbered by least member.
    pub dclass_of: Vec<usize>,
    /// Members of each D-class, ascending.
    pub dclasses: Vec<Vec<ElemId>>,
    /// Reflexive-transitive closure of one-sided-below steps, on class ids.
    class_leq: Vec<bool>,
    pub maximal: Vec<bool>,
    pub identity: Option<ElemId>,
}

impl GreenData {
    pub fn le_r(&self, e: ElemId, f: ElemId) -> bool {
        self.le_r[e * self.n + f]
    }

    pub fn le_l(&self, e: ElemId, f: ElemId) -> bool {
        self.le_l[e * self.n + f]
    }

    /// The natural partial order on idempotents.
    pub fn natural_le(&self, e: ElemId, f: ElemId) -> bool {
        self.le_r(e, f) && self.le_l(e, f)
    }

    pub fn r_related(&self, e: ElemId, f: ElemId) -> bool {
        self.le_r(e, f) && self.le_r(f, e)
    }

    pub fn l_related(&self, e: ElemId, f: ElemId) -> bool {
        self.le_l(e, f) && self.le_l(f, e)
    }

    pub fn d_related(&self, e: ElemId, f: ElemId) -> bool {
        self.dclass_of[e] == self.dclass_of[f]
    }

    pub fn class_count(&self) -> usize {
        self.dclasses.len()
    }

    /// `a ⊑ b` in the order on D-classes (the J-order).
    pub fn class_leq(&self, a: usize, b: usize) -> bool {
        self.class_leq[a * self.dclasses.len() + b]
    }
}

/// Compute the full Green structure of a biordered set.
pub fn green_data(b: &BiorderedSet) -> GreenData {
    let n = b.len();
    let mut le_r = vec![false; n * n];
    let mut le_l = vec![false; n * n];
    for e in 0..n {
        for f in 0..n {
            le_r[e * n + f] = b.le_r(e, f);
            le_l[e * n + f] = b.le_l(e, f);
        }
    }

    // D = transitive closure of R ∪ L, via BFS over the union graph.
    let mut dclass_of = vec![usize::MAX; n];
    let mut dclasses: Vec<Vec<ElemId>> = Vec::new();
    for start in 0..n {
        if dclass_of[start] != usize::MAX {
            continue;
        }
        let id = dclasses.len();
        let mut members = vec![start];
        dclass_of[start] = id;
        let mut queue = vec![start];
        while let Some(e) = queue.pop() {
            for f in 0..n {
                if dclass_of[f] == usize::MAX
                    && ((le_r[e * n + f] && le_r[f * n + e])
                        || (le_l[e * n + f] && le_l[f * n + e]))
                {
                    dclass_of[f] = id;
                    members.push(f);
                    queue.push(f);
                }
            }
        }
        members.sort_unstable();
        dclasses.push(members);
    }

    // Class order: closure of {D_g ⊑ D_e whenever g <=_r e or g <=_l e}.
    let m = dclasses.len();
    let mut class_leq = vec![false; m * m];
    for a in 0..m {
        class_leq[a * m + a] = true;
    }
    for g in 0..n {
        for e in 0..n {
            if le_r[g * n + e] || le_l[g * n + e] {
                class_leq[dclass_of[g] * m + dclass_of[e]] = true;
            }
        }
    }
    for k in 0..m {
        for a in 0..m {
            if class_leq[a * m + k] {
                for c in 0..m {
                    if class_leq[k * m + c] {
                        class_leq[a * m + c] = true;
                    }
                }
            }
        }
    }
    debug_assert!(
        (0..m).all(|a| (0..m).all(|c| a == c || !(class_leq[a * m + c] && class_leq[c * m + a]))),
        "class order is not antisymmetric"
    );

    let identity = b.identity();
    let identity_class = identity.map(|one| dclass_of[one]);
    let maximal: Vec<bool> = (0..m)
        .map(|d| {
            if identity_class == Some(d) {
                return false;
            }
            (0..m).all(|d2| {
                d2 == d || Some(d2) == identity_class || !class_leq[d * m + d2]
            })
        })
        .collect();

    GreenData {
        n,
        le_r,
        le_l,
        dclass_of,
        dclasses,
        class_leq,
        maximal,
        identity,
    }
}

/// One regular D-class laid out on a grid: rows are R-classes, columns are
/// L-classes, and `cell_at[i][λ]` holds the idempotent in their intersection
/// when there is one.
#[derive(Debug, Clone)]
pub struct DClassGrid {
    pub class: usize,
    /// R-classes, each ascending; rows ordered by least member.
    pub rows: Vec<Vec<ElemId>>,
    /// L-classes, likewise.
    pub cols: Vec<Vec<ElemId>>,
    pub cell_at: Vec<Vec<Option<ElemId>>>,
    /// Idempotent cells (row, col) in row-major order.
    pub cells: Vec<(usize, usize)>,
    cell_index: HashMap<(usize, usize), usize>,
    position: HashMap<ElemId, (usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown D-class id {0}")]
pub struct UnknownClass(pub usize);

impl DClassGrid {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.cols.len()
    }

    pub fn cell(&self, i: usize, lam: usize) -> Option<ElemId> {
        self.cell_at[i][lam]
    }

    /// Index of the cell (i, λ) in `cells`, if it holds an idempotent.
    pub fn cell_id(&self, i: usize, lam: usize) -> Option<usize> {
        self.cell_index.get(&(i, lam)).copied()
    }

    /// Grid coordinates of a member of the class.
    pub fn position_of(&self, e: ElemId) -> Option<(usize, usize)> {
        self.position.get(&e).copied()
    }

    /// Least idempotent in column `lam`.
    pub fn least_in_col(&self, lam: usize) -> ElemId {
        self.cols[lam][0]
    }

    /// Least idempotent in row `i`.
    pub fn least_in_row(&self, i: usize) -> ElemId {
        self.rows[i][0]
    }
}

/// Lay a D-class of the biorder out as a grid.
pub fn dclass_grid(
    b: &BiorderedSet,
    green: &GreenData,
    class: usize,
) -> Result<DClassGrid, UnknownClass> {
    debug_assert_eq!(b.len(), green.dclass_of.len());
    let members = green
        .dclasses
        .get(class)
        .ok_or(UnknownClass(class))?
        .clone();
    let mut rows: Vec<Vec<ElemId>> = Vec::new();
    let mut cols: Vec<Vec<ElemId>> = Vec::new();
    let mut row_of: HashMap<ElemId, usize> = HashMap::new();
    let mut col_of: HashMap<ElemId, usize> = HashMap::new();
    for &e in &members {
        if !row_of.contains_key(&e) {
            let i = rows.len();
            let row: Vec<ElemId> = members
                .iter()
                .copied()
                .filter(|&f| green.r_related(e, f))
                .collect();
            for &f in &row {
                row_of.insert(f, i);
            }
            rows.push(row);
        }
        if !col_of.contains_key(&e) {
            let l = cols.len();
            let col: Vec<ElemId> = members
                .iter()
                .copied()
                .filter(|&f| green.l_related(e, f))
                .collect();
            for &f in &col {
                col_of.insert(f, l);
            }
            cols.push(col);
        }
    }
    let mut cell_at = vec![vec![None; cols.len()]; rows.len()];
    let mut position = HashMap::new();
    for &e in &members {
        let (i, l) = (row_of[&e], col_of[&e]);
        debug_assert!(cell_at[i][l].is_none(), "two idempotents in one H-class");
        cell_at[i][l] = Some(e);
        position.insert(e, (i, l));
    }
    let mut cells = Vec::new();
    let mut cell_index = HashMap::new();
    for (i, row) in cell_at.iter().enumerate() {
        for (l, cell) in row.iter().enumerate() {
            if cell.is_some() {
                cell_index.insert((i, l), cells.len());
                cells.push((i, l));
            }
        }
    }
    Ok(DClassGrid {
        class,
        rows,
        cols,
        cell_at,
        cells,
        cell_index,
        position,
    })
}
