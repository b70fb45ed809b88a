//! Coordinate twistor geometry: pure spinors, orthogonal complex structures,
//! the twistor embedding of R^{2n}, Clifford matrices on C^3, conformal lifts
//! and warped-product structures.

pub mod clifford6;
pub mod conformal;
pub mod elliptic;
pub mod energy;
pub mod error;
pub mod fd;
pub mod linalg;
pub mod meromorphic;
pub mod multi_index;
pub mod ocs;
pub mod pfaffian;
pub mod poly;
pub mod sample;
pub mod spinor;
pub mod twistor;
pub mod warped;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
