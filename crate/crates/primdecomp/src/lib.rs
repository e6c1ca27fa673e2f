//! Decomposes arbitrary polygonal meshes into a bounded number of convex
//! primitives (boxes, spheres, capsules, cylinders, frustums, trapezoidal
//! prisms) that are guaranteed to enclose the input surface, via
//! quadric-driven bottom-up greedy merging. Includes one-way
//! Hausdorff/Chamfer evaluation, byte-cost accounting and JSON/OBJ export.

pub mod decomposer;
pub mod math;
pub mod mesh;
pub mod metrics;
pub mod primitives;
pub mod quadric;
pub mod schema;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("structural error: {0}")]
    Structure(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
