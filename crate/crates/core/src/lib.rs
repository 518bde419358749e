//! Translator from a pure Standard ML subset with contract annotations to
//! Coq/Gallina in the Equations style.

pub mod basis;
pub mod diag;
pub mod elab;
pub mod emit;
pub mod eval;
pub mod frontend;
pub mod gallina;
pub mod patterns;
pub mod pipeline;
pub mod shims;
pub mod surface;
pub mod translate;
pub mod types;
