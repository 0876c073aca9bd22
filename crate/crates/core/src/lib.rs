pub mod arith;
pub mod detector;
pub mod duality;
pub mod lefschetz;
pub mod error;

pub use arith::{FieldScalar, FieldSpec};
pub use error::{Error, Result};
pub mod linalg;
pub mod modp;
pub mod pointsets;
pub mod poly;
pub mod reproduce;
