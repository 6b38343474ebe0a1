//! Exact computations with monodromic D-modules and monodromic mixed Hodge
//! modules over a point.
//!
//! Objects are kept as finite "core data": one nilpotent matrix per label
//! `α ∈ [-1, 0]` together with the maps `u = ∂_t: M^0 → M^{-1}` and
//! `w = t: M^{-1} → M^0`. Hodge data add a pair of filtrations on each
//! component. Everything is computed over the rationals without rounding.

pub mod blocks;
pub mod dmod;
pub mod error;
pub mod filtration;
pub mod format;
pub mod fourier;
pub mod generate;
pub mod gluing;
pub mod intertwine;
pub mod linalg;
pub mod mhm;
pub mod suite;

pub use blocks::{chako_construct, nilp_block, ChakoVariant, PsiMorphism};
pub use dmod::{cycles, dual, expand, CoreData, CoreMorphism, Cycles, WindowModule};
pub use error::{Error, Result};
pub use filtration::{FiltrationPair, IncreasingFiltration};
pub use format::{emit, parse, Document};
pub use fourier::fourier;
pub use generate::GeneratorConfig;
pub use gluing::{functor_f, functor_g, GluingDatum, PsiComponent, PsiDatum};
pub use linalg::{int, rat, InduceMode, Matrix, Rational, Subspace};
pub use mhm::MonodromicMhm;
pub use suite::{run_suite, SuiteName, SuiteReport};
