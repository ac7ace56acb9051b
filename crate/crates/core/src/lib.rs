pub mod config;
pub mod error;
pub mod power;
pub mod report;
pub mod scalar;
pub mod semigroup;
pub mod seq;
pub mod sparse;
pub mod szlenk;
pub mod xzero;

pub use error::{Error, Result};
pub use report::{Report, Status, ToReport};
pub use scalar::{parse_complex, parse_real, Scalar};
pub use seq::{Discrepancy, FinSeq, Window, WindowedSeq};
pub use xzero::LambdaParam;
