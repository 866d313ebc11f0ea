pub mod catalogue;
pub mod cyclotomic;
pub mod fusion;
pub mod groups;
pub mod io;
pub mod linalg;
pub mod pipeline;
pub mod solver;
pub mod verify;
