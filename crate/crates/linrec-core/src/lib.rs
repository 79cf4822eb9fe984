//! Algorithmic core for computing terms of linearly recurrent sequences,
//! coefficients of rational power series, and polynomial modular exponentiation.
//!
//! The central primitive is the Graeffe step on a rational function `P(x)/Q(x)`:
//! `Q(x)Q(-x)` is even, so it can be written `V(x^2)`, and extracting the even
//! or odd part of `P(x)Q(-x)` halves the index of the coefficient being chased.
//! Iterating this gives an `O(M(d) log N)` kernel for the N-th coefficient that
//! needs only two size-`d` products per bit of `N`, plus variants that work
//! most-significant-bit first (producing a whole window of `d` coefficients),
//! entirely in the DFT domain, or as `x^N mod Gamma(x)` for a modulus `Gamma`.
//!
//! Every algorithm runs over an explicit ring context (prime fields, `Z/m`,
//! arbitrary-precision integers) and can be wrapped in a counting context that
//! tallies ring operations, so the constant factors of the kernels can be
//! measured against classical baselines (Fiduccia-style binary powering,
//! schoolbook division, naive unrolling) rather than only asymptotics.
//!
//! The crate is `no_std` (it needs `alloc` only); IO, the CLI, and file
//! formats live in the companion `linrec-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod apps;
pub mod kernel;
pub mod modexp;
pub mod ntt;
pub mod poly;
pub mod ring;
pub mod selftest;

pub use ring::{BigIntRing, CountingRing, ModRing, OpCounter, PrimeField, Ring};

use core::fmt;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An element had no multiplicative inverse in the active ring.
    NotInvertible,
    /// A modulus that must be prime failed the primality check.
    NotPrime(u64),
    /// A modulus outside the supported range (`2 <= m < 2^63`).
    InvalidModulus(u64),
    /// The field does not contain a root of unity of order `2^k`.
    NoRootOfOrder { k: u32, modulus: u64 },
    /// A DFT plan was used with a ring over a different modulus.
    ContextMismatch { plan_modulus: u64, ring_modulus: u64 },
    /// The requested transform exceeds the size the plan was built for.
    TransformTooLarge { need_k: u32, plan_k: u32 },
    /// An argument that must be a power of two was not.
    NotPowerOfTwo(u64),
    /// A spectrum of length one cannot be halved.
    HalveTooShort,
    /// Division by the zero polynomial.
    DivisionByZero,
    /// An index argument does not fit in the supported 63-bit range.
    IndexOutOfRange(u64),
    /// A degree or length precondition was violated; the text names it.
    DegreeBound(&'static str),
    /// An input was empty where a nonempty value is required; the text names it.
    EmptyInput(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotInvertible => write!(f, "element is not invertible in this ring"),
            Error::NotPrime(m) => write!(f, "{m} is not prime"),
            Error::InvalidModulus(m) => write!(f, "invalid modulus {m} (need 2 <= m < 2^63)"),
            Error::NoRootOfOrder { k, modulus } => {
                write!(f, "no root of unity of order 2^{k} modulo {modulus}")
            }
            Error::ContextMismatch { plan_modulus, ring_modulus } => write!(
                f,
                "DFT plan built for modulus {plan_modulus} used with ring modulus {ring_modulus}"
            ),
            Error::TransformTooLarge { need_k, plan_k } => {
                write!(f, "transform needs length 2^{need_k} but plan stops at 2^{plan_k}")
            }
            Error::NotPowerOfTwo(n) => write!(f, "{n} is not a power of two"),
            Error::HalveTooShort => write!(f, "cannot halve a length-1 spectrum"),
            Error::DivisionByZero => write!(f, "division by the zero polynomial"),
            Error::IndexOutOfRange(n) => write!(f, "index {n} does not fit in 63 bits"),
            Error::DegreeBound(what) => write!(f, "degree bound violated: {what}"),
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
