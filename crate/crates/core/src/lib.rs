pub mod algebra;
pub mod eig;
pub mod error;
pub mod functional;
pub mod matrix;
pub mod sampling;
pub mod anorm;
pub mod io;
pub mod verify;
pub mod center;
pub mod diagonal;
pub mod harness;
