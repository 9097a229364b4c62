//! Exact arithmetic: rationals, sparse (Laurent) polynomials, truncated
//! power series in `q` and truncated infinite products.

mod poly;
mod product;
mod series;

pub use poly::{fmt_rational, int, poly_binomial, rat, Exponents, MultiPoly, Rational, VarContext};
pub use product::{
    finite_product, product_by_multiplication, truncated_infinite_product, unit_exponent,
    FactorFamily, ProductFactor,
};
pub use series::QSeries;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("operands live in different variable contexts")]
    ContextMismatch,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("negative exponent on non-Laurent variable {0:?}")]
    NegativeExponent(String),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("exact division failed: divisor does not divide dividend")]
    NotDivisible,
    #[error("factor family shift does not grow with n")]
    NonGrowingShift,
    #[error("{0}")]
    Precondition(String),
}
