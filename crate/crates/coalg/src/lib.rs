//! Exact computer algebra for coalgebras and bialgebras over commutative rings.
//!
//! The crate provides:
//!
//! * exact coefficient rings (integers, rationals, modular residues,
//!   polynomial rings, monomial quotients) with a regular-element oracle,
//! * sparse elements and tensors of concrete bialgebra families
//!   (primitive polynomial, q-infiltration, Frobenius quotient, monoid
//!   diagonal, tensor concatenation, tensor products, finite duals),
//! * the convolution calculus on `Hom(C, A)`: convolution powers,
//!   `(ηε − id)^{⊛n}`, binomial transforms and id-unipotence bounds,
//! * verifiers for grouplike independence statements in the symmetric
//!   algebra and over id-unipotents,
//! * trace monoids with Möbius functions, truncated Kleene stars and
//!   character series,
//! * the dual filtration with its shift action and character
//!   independence systems,
//! * a CLI (`coalg`) exposing the computations and verification suites
//!   over JSON instances.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod basis;
pub mod bialgebra;
pub mod convolution;
pub mod dual;
pub mod independence;
pub mod json;
pub mod linalg;
pub mod monoid;
pub mod scalar;
pub mod suites;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CoalgError {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(String, String),
    #[error("descriptor mismatch")]
    DescriptorMismatch,
    #[error("truncation exceeded: degree {degree} > limit {limit}")]
    TruncationExceeded { degree: i64, limit: i64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("source mismatch between linear maps")]
    SourceMismatch,
    #[error("length mismatch between input lists")]
    LengthMismatch,
    #[error("element #{0} is not grouplike")]
    NotGrouplike(usize),
    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),
    #[error("coefficient ring is not a field: {0}")]
    NotAField(String),
    #[error("bialgebra family is not commutative")]
    NotCommutativeFamily,
    #[error("series monoid mismatch")]
    MonoidMismatch,
    #[error("series is not proper (nonzero coefficient on the empty trace)")]
    NotProper,
    #[error("unknown letter: {0}")]
    UnknownLetter(String),
    #[error("multiplication table is not associative")]
    NotAssociative,
    #[error("multiplication table has no valid unit")]
    NotUnital,
    #[error("element is not in the augmentation ideal")]
    NotInAugmentationIdeal,
    #[error("coefficient ring is not an integral domain")]
    NotIntegralDomain,
    #[error("family carries no degree filtration")]
    NotGradedFamily,
    #[error("family is a coalgebra only; it has no multiplication")]
    NoMultiplication,
}

pub type Result<T> = std::result::Result<T, CoalgError>;
