pub mod error;
pub mod algebra;
pub mod chern;
pub mod cover;
pub mod examples;
pub mod gkm;
pub mod ingest;
pub mod lattice;
pub mod selftest;
pub mod sheaf;
pub mod tcw;

pub use error::{Error, Result};
