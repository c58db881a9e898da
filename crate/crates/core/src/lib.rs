//! Exact intersection rings of wonderful compactifications.

pub mod algebra;
pub mod blowup;
pub mod diagram;
pub mod duality;
pub mod engine;
pub mod error;
pub mod format;
pub mod linalg;
pub mod models;
pub mod nest;
pub mod oracle;
pub mod presentation;

pub use error::{Error, Result};
