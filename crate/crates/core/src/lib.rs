pub mod error;
pub mod frame;
pub mod front;
pub mod gauss;
pub mod grid;
pub mod holo;
pub mod invert;
pub mod io;

pub use error::{Error, Result};
