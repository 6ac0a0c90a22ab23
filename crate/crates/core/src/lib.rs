pub mod bench;
pub mod checker;
pub mod cli;
pub mod compiler;
pub mod dd;
pub mod error;
pub mod frontend;
pub mod gen;
pub mod lang;
pub mod mdp;
pub mod oracle;

pub use error::{Error, Result};
