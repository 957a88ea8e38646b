//! The guide's chapters, included as module docs so `cargo test` compiles
//! and runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}
#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}
#[doc = include_str!("../../../book/src/fitness.md")]
pub mod fitness {}
#[doc = include_str!("../../../book/src/engine.md")]
pub mod engine {}
#[doc = include_str!("../../../book/src/tempering.md")]
pub mod tempering {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
