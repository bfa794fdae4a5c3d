//! Theorem-level checks: structure relations of the induced objects,
//! Codazzi equations, classification, and the consequences of the contact
//! screen classes.

pub mod classify;
pub mod codazzi;
pub mod relations;
pub mod theorems;

pub use classify::{classify, Class, ClassEntry, ClassificationReport};
pub use codazzi::{check_codazzi, check_nonmetricity, CodazziResiduals, FormJet};
pub use relations::{check_induced_relations, check_structure_relations, check_uv_derivatives};
pub use theorems::{check_theorem_consequences, TheoremReport};
