//! The book under `book/src` and the top-level README, included file by
//! file so that `cargo test` runs every Rust listing as a doc-test.

#![doc = include_str!("../../../book/src/introduction.md")]

#[doc = include_str!("../../../book/src/transfer-matrices.md")]
pub mod transfer_matrices {}

#[doc = include_str!("../../../book/src/resonances.md")]
pub mod resonances {}

#[doc = include_str!("../../../book/src/common-resonances.md")]
pub mod common_resonances {}

#[doc = include_str!("../../../book/src/couplings.md")]
pub mod couplings {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
