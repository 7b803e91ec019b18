//! Command-line companion to `wayscout-core`: run configuration, text
//! file formats, SVG rendering, and the seeded experiment drivers.

pub mod commands;
pub mod config;
pub mod experiments;
pub mod formats;
pub mod svg;
