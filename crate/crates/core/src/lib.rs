//! Finite models of skew lattices, noncommutative frames, finite spaces and
//! sheaves, with the constructions relating them.

pub mod assembly;
pub mod bits;
pub mod catalog;
pub mod duality;
pub mod error;
pub mod generate;
pub mod io;
pub mod iso;
pub mod order;
pub mod sheaf;
pub mod skew;
pub mod topo;

pub use error::{CheckResult, Error, Result};
pub use order::{FiniteFrame, FiniteLattice, Point, TableMorphism};
pub use skew::FiniteSkewLattice;
pub use topo::FiniteSpace;
