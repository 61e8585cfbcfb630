//! The guide in `book/` compiled as doc-tests, one module per chapter, so
//! that `cargo test` runs every snippet.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}
#[doc = include_str!("../../../book/src/lengths.md")]
pub mod lengths {}
#[doc = include_str!("../../../book/src/fourier.md")]
pub mod fourier {}
#[doc = include_str!("../../../book/src/rapid-decay.md")]
pub mod rapid_decay {}
#[doc = include_str!("../../../book/src/dirac.md")]
pub mod dirac {}
#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
