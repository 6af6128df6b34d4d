//! Compiles declarative chart specifications into tactile-accessible SVG.

pub mod braille;
pub mod model;
pub mod simplify;
pub mod ingest;
pub mod layout;
pub mod emit;
pub mod pipeline;
pub mod validate;
pub mod datagen;
pub mod model_client;
