//! Numerical laboratory for noncommutative polydomains: truncated Fock
//! models, defect maps, Berezin kernels, Beurling-type factorizations and
//! characteristic functions.
//!
//! The operator layer is generic over a real field `R` (`f32`, `f64`);
//! b-tables accept any ordered coefficient ring, including exact rationals.

pub mod berezin;
pub mod charfn;
pub mod coefficients;
pub mod defect;
pub mod ensemble;
pub mod error;
pub mod factorization;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod tuple;
pub mod words;

pub use error::{Error, Result};
pub use scalar::{CMat, CVec, Coeff, Real};
pub use words::{MultiWord, Word};

pub type Spec = coefficients::PolydomainSpec<f64>;
pub type ExactSpec = coefficients::PolydomainSpec<num_rational::BigRational>;
pub type Poly = coefficients::PositiveRegularPoly<f64>;
pub type BTable = coefficients::BTable<f64>;
pub type ExactBTable = coefficients::BTable<num_rational::BigRational>;
pub type Tuple = tuple::OperatorTuple<f64>;
pub type Model = fock::FockModel<f64>;
pub type Kernel = berezin::BerezinKernel<f64>;
pub type Series = berezin::FreeSeries<f64>;
pub type Matrix = CMat<f64>;
pub type CharFn = charfn::CharFunction<f64>;
pub type Factorization = factorization::BeurlingFactorization<f64>;
