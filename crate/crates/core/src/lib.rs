//! Complex volumes of boundary-parabolic representations of link complements,
//! computed from shadow-colorings of a diagram by a parabolic quandle.

pub mod cli;
pub mod coloring;
pub mod diagram;
pub mod fixtures;
pub mod potential;
pub mod quandle;
pub mod solution;
pub mod triangulation;
