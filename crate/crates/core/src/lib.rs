//! Finite virtual double categories and virtual equipments as data.
//!
//! The crate is organised bottom-up:
//!
//! * [`vdc`] holds the representation of a virtual double category: a vertical
//!   category, proarrows, and a cell store that is either tabulated (explicit
//!   cells and an explicit substitution table) or thin (at most one cell per
//!   frame, decided by an oracle).
//! * [`universal`] derives units, composites, restrictions, companions and
//!   conjoints by exhaustive search and certifies them against search bounds.
//! * [`enriched`] defines categories, functors, profunctors and profunctor
//!   morphisms enriched in a virtual equipment, their law checkers, and the
//!   materialisation of finite fragments of the equipment of enriched
//!   categories.
//! * [`embedding`] builds the canonical embedding of an equipment into its
//!   enriched categories and checks its properties.
//! * [`instances`] provides quantale-valued matrix equipments and small
//!   tabulated fixtures.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod bounds;
pub mod embedding;
pub mod enriched;
pub mod instances;
pub mod report;
pub mod universal;
pub mod vdc;

pub use bounds::SearchBounds;
pub use report::{Counterexample, Status, VerificationReport};
pub use vdc::{
    Cell, CellId, CellStore, Frame, ObjId, Path, ProarrowId, VArrowId, Vdc, VdcBuilder, VdcError,
};
