//! Triangulated structures with identity translation on finitely generated free
//! modules over finite local rings whose maximal ideal squares to zero.

pub mod cli;
pub mod freemod;
pub mod json;
pub mod rings;
pub mod scalars;
pub mod structure;
pub mod triangulated;
