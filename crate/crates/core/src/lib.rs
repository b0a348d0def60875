//! Rule language, structure engine, evaluator and solver for grid pencil
//! puzzles.

pub mod board;
pub mod corpus;
pub mod dsl;
pub mod error;
pub mod eval;
pub mod grid;
pub mod model;
pub mod problem;
pub mod render;
pub mod semantics;
pub mod solver;
pub mod structure;
pub mod value;

pub use error::{Error, EvalError, ParseElementError};
pub use value::Value;
