pub mod ambient;
pub mod cli;
pub mod contact;
pub mod error;
pub mod expr;
pub mod fd;
pub mod field;
pub mod fixtures;
pub mod hypersurface;
pub mod identities;
pub mod poly;
pub mod report;

pub use error::{GeometryError, Result};
