//! Word problem for free idempotent generated semigroups over finite
//! biordered sets.
//!
//! Starting from a finite biordered set E (ingested from a raw partial table
//! or extracted from a full multiplication table), the crate computes the
//! Green structure of E, decides regularity of words, factors arbitrary
//! words into minimal runs of regular pieces, coordinatises the regular
//! pieces as Rees matrix triples over per-class maximal subgroups, and
//! reduces equality of two words to a constraint problem over rational
//! subsets of products of those subgroups. When every non-maximal class has
//! a finite subgroup (certified by coset enumeration) and the maximal ones
//! are free, the constraints are solved outright; anything else is exported
//! as a self-contained constraint instance.

pub mod analysis;
pub mod biorder;
pub mod contact;
pub mod fountain;
pub mod gen;
pub mod green;
pub mod io;
pub mod ratgroup;
pub mod rees;
pub mod solver;
pub mod subgroup;


pub use analysis::Analysis;
pub use biorder::{BiorderedSet, ElemId, Word};
pub use solver::{decide, Reason, Verdict};

