pub mod corpus;
pub mod error;
pub mod graph6;
pub mod hypomorphism;
pub mod io;
pub mod matrix;
pub mod presentation;
pub mod solid_angle;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
