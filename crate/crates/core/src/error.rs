use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus exponent must be at least 1")]
    ZeroExponent,
    #[error("{value} is not a unit modulo {p}^{k}")]
    NotUnit { value: String, p: u64, k: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative p-adic valuation {0} cannot be collapsed to a residue")]
    NegativeValuation(i64),
    #[error("mixed radicands: sqrt({0}) and sqrt({1})")]
    MixedRadicands(u32, u32),
    #[error("unsupported radicand {0}; only 5 and 6 are supported")]
    UnsupportedRadicand(u32),
    #[error("mismatched residue rings")]
    RingMismatch,
    #[error("malformed modulus {0:?}, expected \"p^K\"")]
    MalformedModulus(String),
    #[error("series {id}: observed term ratio {observed:.6e} exceeds bound {bound:.6e} at n = {n}")]
    TailBoundViolated {
        id: &'static str,
        n: usize,
        observed: f64,
        bound: f64,
    },
    #[error("series {id}: tail bound did not fall below target after {terms} terms")]
    NoConvergence { id: &'static str, terms: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
