//! One-stop precomputation for a biordered set: Green structure, class
//! grids, per-letter actions, subgroup presentations and backends, plus a
//! cache of contact automata. Built once, then shared read-only.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::biorder::{dclass_grid, green_data, BiorderedSet, DClassGrid, GreenData};
use crate::contact::{build_contact, ContactAutomaton};
use crate::green::WordOps;
use crate::rees::{class_actions, ClassActions, ClassProvider, ReesTriple};
use crate::subgroup::{
    classify, group_reduce, presentation, GroupBackend, GroupError, GroupValue, Presentation,
};

/// Default coset bound for finiteness certification.
pub const DEFAULT_TC_BOUND: usize = 1_000_000;

/// Everything computed for one regular D-class.
#[derive(Debug, Clone)]
pub struct ClassStructure {
    pub actions: ClassActions,
    pub presentation: Presentation,
    pub backend: GroupBackend,
    pub maximal: bool,
}

impl ClassStructure {
    pub fn grid(&self) -> &DClassGrid {
        &self.actions.grid
    }
}

/// A fully canonicalised regular element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonTriple {
    pub class: usize,
    pub row: usize,
    pub col: usize,
    pub value: GroupValue,
}

pub struct Analysis {
    pub set: BiorderedSet,
    pub green: GreenData,
    pub classes: Vec<ClassStructure>,
    contact_cache: Mutex<HashMap<(usize, usize), Arc<ContactAutomaton>>>,
}

impl Analysis {
    pub fn new(set: BiorderedSet) -> Self {
        Self::with_bound(set, DEFAULT_TC_BOUND)
    }

    pub fn with_bound(set: BiorderedSet, tc_bound: usize) -> Self {
        let green = green_data(&set);
        let ops = WordOps::new(&set, &green);
        let classes: Vec<ClassStructure> = (0..green.class_count())
            .map(|d| {
                let grid = dclass_grid(&set, &green, d).expect("class exists");
                let pres = presentation(&set, &grid);
                let backend = classify(&pres, tc_bound);
                ClassStructure {
                    actions: class_actions(&ops, grid),
                    presentation: pres,
                    backend,
                    maximal: green.maximal[d],
                }
            })
            .collect();
        Analysis {
            set,
            green,
            classes,
            contact_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn ops(&self) -> WordOps<'_> {
        WordOps::new(&self.set, &self.green)
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// The contact automaton of an ordered pair of classes, built on first
    /// use and cached.
    pub fn contact(&self, d1: usize, d2: usize) -> Arc<ContactAutomaton> {
        let mut cache = self.contact_cache.lock().expect("cache lock");
        cache
            .entry((d1, d2))
            .or_insert_with(|| {
                Arc::new(build_contact(
                    self.set.len(),
                    d1,
                    d2,
                    &self.classes[d1].actions,
                    &self.classes[d2].actions,
                ))
            })
            .clone()
    }

    /// Canonicalise a triple through its class backend.
    pub fn canon(&self, t: &ReesTriple) -> Result<CanonTriple, GroupError> {
        let c = &self.classes[t.class];
        Ok(CanonTriple {
            class: t.class,
            row: t.row,
            col: t.col,
            value: group_reduce(&c.presentation, &c.backend, &t.word)?,
        })
    }

    /// Equality of two triples as elements (requires a usable backend).
    pub fn triples_equal(&self, a: &ReesTriple, b: &ReesTriple) -> Result<bool, GroupError> {
        if a.class != b.class {
            return Ok(false);
        }
        Ok(self.canon(a)? == self.canon(b)?)
    }

    /// Printable form of a group word: generators named by their cell's
    /// idempotent, e.g. `f(e12)^-1 f(e22)`.
    pub fn word_display(&self, class: usize, word: &[crate::subgroup::FLetter]) -> String {
        if word.is_empty() {
            return "1".to_string();
        }
        let grid = self.classes[class].grid();
        word.iter()
            .map(|l| {
                let (i, lam) = grid.cells[l.cell];
                let name = self.set.name(grid.cell(i, lam).unwrap());
                if l.inv {
                    format!("f({name})^-1")
                } else {
                    format!("f({name})")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl ClassProvider for Analysis {
    fn actions_of(&self, class: usize) -> &ClassActions {
        &self.classes[class].actions
    }
}
