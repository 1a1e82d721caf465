//! Compiles and runs the guide's code samples as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/pseudogroups.md")]
pub mod pseudogroups {}

#[doc = include_str!("../../../book/src/quantales.md")]
pub mod quantales {}

#[doc = include_str!("../../../book/src/modules.md")]
pub mod modules {}

#[doc = include_str!("../../../book/src/enlargements.md")]
pub mod enlargements {}

#[doc = include_str!("../../../book/src/invariants.md")]
pub mod invariants {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
