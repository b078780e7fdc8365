//! Counting Darmon and Campana points of bounded height on two
//! compactifications of the vector group over ℚ, with exact arithmetic
//! throughout the enumeration and rigorous truncation bounds on the Euler
//! products that make up the leading constants.

pub mod arith;
pub mod geometry;
pub mod orbifold;
pub mod enumerate;
pub mod localfactors;
pub mod constants;
pub mod fitting;
pub mod cli;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/models.md")]
    struct Models;
    #[doc = include_str!("../../../book/src/heights.md")]
    struct Heights;
    #[doc = include_str!("../../../book/src/enumeration.md")]
    struct Enumeration;
    #[doc = include_str!("../../../book/src/local-factors.md")]
    struct LocalFactors;
    #[doc = include_str!("../../../book/src/constants.md")]
    struct Constants;
    #[doc = include_str!("../../../book/src/fitting.md")]
    struct Fitting;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
