pub mod bjorling;
pub mod continuation;
pub mod curves;
pub mod epitrochoid;
pub mod error;
pub mod exec;
pub mod meshio;
pub mod quadrature;
pub mod verify;
pub mod weierstrass;

pub use error::{Error, Result};
