//! Exact symbolic engine for quantum unipotent cells of finite type.
//!
//! The crate is organised bottom-up: [`scalars`] (the field `Q(q^{1/2})`),
//! [`rootdata`], [`uqminus`] (the negative half with its pairing),
//! [`pbw`], [`canonical`], [`highest_weight`], [`cells`] and [`qcluster`].

mod cache;
pub mod canonical;
pub mod cells;
pub mod engine;
pub mod error;
pub mod highest_weight;
pub mod invariants;
pub mod linalg;
pub mod pbw;
pub mod qcluster;
pub mod rootdata;
pub mod scalars;
pub mod uqminus;

pub use engine::Engine;
pub use error::{Error, Result};
pub use rootdata::{RootDatum, RootVector, Weight, WeylElt};
pub use scalars::{LaurentPoly, Scalar};
pub use uqminus::{Involution, NCElement, Side, Word};
pub use pbw::{BraidDirection, TriangularElement};
pub use canonical::CrystalLabel;
pub use qcluster::{CompatiblePair, QuantumSeed, TorusElement};
pub use cells::{CellElement, ClosedCellElement, LocalizedSubgroupElement, PeriodReport};
pub use highest_weight::{ModuleGenerator, ModuleVector};
