//! Exact computation in Grothendieck–Witt rings of concrete fields.
//!
//! Fields are ℚ, odd prime fields, and towers of quadratic extensions over
//! them. On top of these the crate provides diagonal forms and their
//! invariants, the ring `GW(k)`, additive and multiplicative transfers along
//! étale algebras, the `GW(k)`-module structure on units, a group-ring model
//! for forms over `k(t₁,…,t_m)`, and the logarithm on `F₂ GW^×(k)`.

pub mod arith;
pub mod classes;
pub mod error;
pub mod etale;
pub mod expmod;
pub mod expr;
pub mod fields;
pub mod forms;
pub mod gw;
pub mod laurent;
pub mod localsymbols;
pub mod oracle;
pub mod presentation;
pub mod report;
pub mod sampling;
pub mod suites;

pub use error::{Error, Result};
pub use fields::{BaseField, FieldElem, FieldTower, RealEmbedding};

/// The guide's chapters, compiled as doctests so their snippets stay runnable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/forms.md")]
    mod forms {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/exponentiation.md")]
    mod exponentiation {}
    #[doc = include_str!("../../../book/src/logarithm.md")]
    mod logarithm {}
    #[doc = include_str!("../../../book/src/presentation.md")]
    mod presentation {}
    #[doc = include_str!("../../../book/src/suites.md")]
    mod suites {}
}
