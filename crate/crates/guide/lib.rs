//! The `book/` chapters, compiled as doc-tests.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/evaluating-z.md")]
pub mod evaluating_z {}

#[doc = include_str!("../../book/src/divisor-sums.md")]
pub mod divisor_sums {}

#[doc = include_str!("../../book/src/error-terms.md")]
pub mod error_terms {}

#[doc = include_str!("../../book/src/smoothing.md")]
pub mod smoothing {}

#[doc = include_str!("../../book/src/moments.md")]
pub mod moments {}

#[doc = include_str!("../../book/src/pipeline.md")]
pub mod pipeline {}
