//! The chapters of the guide in `book/src`, compiled so that every Rust
//! listing runs as a doctest.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/grassmann.md")]
pub mod grassmann {}

#[doc = include_str!("../../book/src/potentials.md")]
pub mod potentials {}

#[doc = include_str!("../../book/src/kahler.md")]
pub mod kahler {}

#[doc = include_str!("../../book/src/bergman.md")]
pub mod bergman {}

#[doc = include_str!("../../book/src/reps.md")]
pub mod reps {}

#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../book/src/conventions.md")]
pub mod conventions {}
