//! Text and JSON front end for `diffkap-core`: the polynomial grammar,
//! serialization, SVG rendering and the grid verification harness.

pub mod app;
pub mod json;
pub mod parse;
pub mod svg;
pub mod verify;
