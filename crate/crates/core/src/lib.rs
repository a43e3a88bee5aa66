//! Parallel transport along superpaths for connections and superconnections,
//! with Grassmann-algebra numerics and flows of even and odd vector fields.

pub mod config;
pub mod error;
pub mod flows;
pub mod grassmann;
pub mod geometry;
pub mod superfield;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
