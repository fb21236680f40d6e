//! Generators for the standard example biorders: full and partial
//! transformation monoids, rectangular bands, free idempotent pairs and
//! semilattice chains. Also a direct Green's-relations oracle for full
//! multiplication tables, used to cross-check the biorder computations.

use thiserror::Error;

use crate::biorder::{BiorderedSet, CayleyTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

const MAX_ELEMENTS: usize = 5000;

/// Full transformation monoid on n points. Maps compose left to right
/// (`x · fg = (x · f) · g`) and are named by their image tuples, e.g. the
/// identity on 3 points is `012`.
pub fn full_transformation_table(n: usize) -> Result<CayleyTable, GenError> {
    if n == 0 || n > 6 {
        return Err(GenError::SizeLimit(format!("tn needs 1 <= n <= 6, got {n}")));
    }
    let count = n.pow(n as u32);
    if count > MAX_ELEMENTS {
        return Err(GenError::SizeLimit(format!(
            "T_{n} has {count} elements, cap is {MAX_ELEMENTS}"
        )));
    }
    let maps: Vec<Vec<usize>> = (0..count).map(|code| decode(code, n, n)).collect();
    let names = maps
        .iter()
        .map(|f| f.iter().map(|&v| digit(v)).collect())
        .collect();
    let mut table = vec![0usize; count * count];
    for (a, f) in maps.iter().enumerate() {
        for (b, g) in maps.iter().enumerate() {
            let composed: Vec<usize> = f.iter().map(|&x| g[x]).collect();
            table[a * count + b] = encode(&composed, n);
        }
    }
    Ok(CayleyTable { names, table })
}

/// Partial transformation monoid on n points; `-` marks an undefined image.
pub fn partial_transformation_table(n: usize) -> Result<CayleyTable, GenError> {
    if n == 0 || n > 6 {
        return Err(GenError::SizeLimit(format!("ptn needs 1 <= n <= 6, got {n}")));
    }
    let base = n + 1; // value n encodes "undefined"
    let count = base.pow(n as u32);
    if count > MAX_ELEMENTS {
        return Err(GenError::SizeLimit(format!(
            "PT_{n} has {count} elements, cap is {MAX_ELEMENTS}"
        )));
    }
    let maps: Vec<Vec<usize>> = (0..count).map(|code| decode(code, n, base)).collect();
    let names = maps
        .iter()
        .map(|f| {
            f.iter()
                .map(|&v| if v == n { '-' } else { digit(v) })
                .collect()
        })
        .collect();
    let mut table = vec![0usize; count * count];
    for (a, f) in maps.iter().enumerate() {
        for (b, g) in maps.iter().enumerate() {
            let composed: Vec<usize> = f
                .iter()
                .map(|&x| if x == n { n } else { g[x] })
                .collect();
            table[a * count + b] = encode(&composed, base);
        }
    }
    Ok(CayleyTable { names, table })
}

/// m x n rectangular band: elements e{i}{λ} with e_{iλ} e_{jμ} = e_{iμ}.
pub fn rect_band_table(m: usize, n: usize) -> Result<CayleyTable, GenError> {
    if m == 0 || n == 0 || m > 9 || n > 9 {
        return Err(GenError::SizeLimit(format!(
            "rectband needs 1 <= m,n <= 9, got {m}x{n}"
        )));
    }
    let count = m * n;
    let names = (1..=m)
        .flat_map(|i| (1..=n).map(move |l| format!("e{i}{l}")))
        .collect();
    let mut table = vec![0usize; count * count];
    for i in 0..m {
        for l in 0..n {
            for j in 0..m {
                for u in 0..n {
                    table[(i * n + l) * count + (j * n + u)] = i * n + u;
                }
            }
        }
    }
    Ok(CayleyTable { names, table })
}

/// Chain semilattice a1 > a2 > ... > ak with meet as the product.
pub fn semilattice_chain_table(k: usize) -> Result<CayleyTable, GenError> {
    if k == 0 || k > 64 {
        return Err(GenError::SizeLimit(format!(
            "semilattice-chain needs 1 <= k <= 64, got {k}"
        )));
    }
    let names = (1..=k).map(|i| format!("a{i}")).collect();
    let mut table = vec![0usize; k * k];
    for a in 0..k {
        for b in 0..k {
            table[a * k + b] = a.max(b);
        }
    }
    Ok(CayleyTable { names, table })
}

/// Two idempotents with no relation between them: only the diagonal products
/// are defined.
pub fn free_pair() -> BiorderedSet {
    let elems = vec!["e".to_string(), "f".to_string()];
    let prods = vec![
        ("e".to_string(), "e".to_string(), "e".to_string()),
        ("f".to_string(), "f".to_string(), "f".to_string()),
    ];
    BiorderedSet::validate_and_build(&elems, &prods).expect("free pair is valid")
}

/// A small cross-section of biorders used repeatedly in tests.
pub fn sample_biorders() -> Vec<BiorderedSet> {
    let mut out = vec![free_pair()];
    for t in [
        semilattice_chain_table(2).unwrap(),
        rect_band_table(2, 2).unwrap(),
        rect_band_table(3, 3).unwrap(),
        full_transformation_table(3).unwrap(),
        full_transformation_table(4).unwrap(),
        partial_transformation_table(3).unwrap(),
    ] {
        out.push(BiorderedSet::from_cayley_table(&t).unwrap());
    }
    out
}

fn decode(code: usize, len: usize, base: usize) -> Vec<usize> {
    let mut out = vec![0usize; len];
    let mut c = code;
    for slot in out.iter_mut().rev() {
        *slot = c % base;
        c /= base;
    }
    out
}

fn encode(map: &[usize], base: usize) -> usize {
    map.iter().fold(0, |acc, &v| acc * base + v)
}

fn digit(v: usize) -> char {
    char::from_digit(v as u32, 10).expect("single digit")
}

/// Green's relations of a finite semigroup computed directly from its
/// multiplication table. Serves as the independent oracle for the relations
/// derived from the biorder.
pub struct SemigroupGreen<'a> {
    table: &'a CayleyTable,
    right: Vec<Vec<bool>>,
    left: Vec<Vec<bool>>,
    twosided: Vec<Vec<bool>>,
}

impl<'a> SemigroupGreen<'a> {
    pub fn new(table: &'a CayleyTable) -> Self {
        let n = table.len();
        let mut right = vec![vec![false; n]; n];
        let mut left = vec![vec![false; n]; n];
        let mut twosided = vec![vec![false; n]; n];
        for a in 0..n {
            right[a][a] = true;
            left[a][a] = true;
            twosided[a][a] = true;
            for x in 0..n {
                right[a][table.mul(a, x)] = true;
                left[a][table.mul(x, a)] = true;
                let ax = table.mul(a, x);
                twosided[a][ax] = true;
                twosided[a][table.mul(x, a)] = true;
                for y in 0..n {
                    twosided[a][table.mul(y, ax)] = true;
                }
            }
        }
        SemigroupGreen {
            table,
            right,
            left,
            twosided,
        }
    }

    pub fn index_of(&self, name: &str) -> usize {
        self.table
            .names
            .iter()
            .position(|s| s == name)
            .expect("element name")
    }

    pub fn r_related(&self, a: usize, b: usize) -> bool {
        self.right[a][b] && self.right[b][a]
    }

    pub fn l_related(&self, a: usize, b: usize) -> bool {
        self.left[a][b] && self.left[b][a]
    }

    /// D = J for finite semigroups.
    pub fn d_related(&self, a: usize, b: usize) -> bool {
        self.j_below(a, b) && self.j_below(b, a)
    }

    pub fn j_below(&self, a: usize, b: usize) -> bool {
        self.twosided[b][a]
    }

    /// Value of a word in the semigroup.
    pub fn eval(&self, word: &[usize]) -> usize {
        let mut it = word.iter();
        let first = *it.next().expect("nonempty word");
        it.fold(first, |acc, &x| self.table.mul(acc, x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t2_and_t4_sizes() {
        assert_eq!(full_transformation_table(2).unwrap().len(), 4);
        assert_eq!(full_transformation_table(4).unwrap().len(), 256);
    }

    #[test]
    fn t6_is_too_large() {
        assert!(matches!(
            full_transformation_table(6),
            Err(GenError::SizeLimit(_))
        ));
    }

    #[test]
    fn pt2_size() {
        // 3^2 partial maps on two points
        assert_eq!(partial_transformation_table(2).unwrap().len(), 9);
    }

    #[test]
    fn t4_idempotent_count() {
        let t = full_transformation_table(4).unwrap();
        let b = BiorderedSet::from_cayley_table(&t).unwrap();
        assert_eq!(b.len(), 41);
    }

    #[test]
    fn pt3_biorder_builds() {
        let t = partial_transformation_table(3).unwrap();
        let b = BiorderedSet::from_cayley_table(&t).unwrap();
        // idempotent partial maps: identity restricted to a subset, plus
        // arbitrary retraction outside: sum over image sets
        assert!(b.len() > 3);
    }

    #[test]
    fn band_law() {
        let t = rect_band_table(3, 2).unwrap();
        for a in 0..t.len() {
            assert_eq!(t.mul(a, a), a);
        }
    }

    #[test]
    fn oracle_on_t3_constants() {
        let t = full_transformation_table(3).unwrap();
        let g = SemigroupGreen::new(&t);
        let c0 = g.index_of("000");
        let c1 = g.index_of("111");
        assert!(g.r_related(c0, c1));
        assert!(!g.l_related(c0, c1));
        let id = g.index_of("012");
        assert!(g.j_below(c0, id) && !g.j_below(id, c0));
    }
}
