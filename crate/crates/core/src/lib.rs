//! Aperiodic flows on group-mapping semigroups.
//!
//! Semigroups are represented by row-monomial matrices over a finite group `G` acting on
//! `G x B`. On top of the structure theory (Green's relations, Rees coordinates, the
//! type-II subsemigroup and the Tilson congruence) the crate provides the set-partition and
//! Rhodes lattices, flow verification and the division a flow yields, a closure-operator
//! evaluator for well-formed formulae, and builders for small monoids and the
//! character-table families.

pub mod chartab;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod flow;
pub mod gm;
pub mod group;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod rees;
pub mod report;
pub mod semigroup;
pub mod smallmonoid;
pub mod typeii;

pub use error::{Error, Result};
pub use group::{Gid, GroupTable};
pub use matrix::RowMonomialMatrix;
pub use semigroup::{generate_semigroup, green_relations, ig_subsemigroup, is_aperiodic, Element, FinSemigroup, GreenData};
