//! Each chapter of the guide is included as a module so that `cargo test`
//! runs its listings as doc-tests. mdbook itself cannot link against
//! workspace crates.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/algebras.md")]
pub mod algebras {}
#[doc = include_str!("../../../book/src/cohomology.md")]
pub mod cohomology {}
#[doc = include_str!("../../../book/src/rings.md")]
pub mod rings {}
#[doc = include_str!("../../../book/src/derivations.md")]
pub mod derivations {}
#[doc = include_str!("../../../book/src/rigidity.md")]
pub mod rigidity {}
#[doc = include_str!("../../../book/src/taylor.md")]
pub mod taylor {}
#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
