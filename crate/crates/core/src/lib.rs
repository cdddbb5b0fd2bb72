pub mod algebra;
pub mod error;
pub mod formulas;
pub mod lattice;
pub mod relation;
pub mod search;
pub mod spigot;
pub mod verify;

pub use error::{Error, Result};
