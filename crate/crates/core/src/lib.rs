pub mod cli;
pub mod error;
pub mod funcat;
pub mod liouville;
pub mod operator;
pub mod quad;
pub mod spectral;

pub use error::{Error, Result};

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/operator.md")]
    pub struct Operator;
    #[doc = include_str!("../../../book/src/supersolutions.md")]
    pub struct Supersolutions;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
