//! Fibonacci sequences modulo `m`.
//!
//! Computes Pisano periods `γ(m)`, the rank of apparition `α(m)`, the zero
//! count `υ(m)` and the lifting exponent `ε(p)`; classifies good numbers
//! (moduli with `P^{γ(m)/2} = -Id`); tests and scans for Wall-Sun-Sun primes;
//! and audits the underlying identities against brute-force oracles.
//!
//! Every fast path in this crate has a slower, independent route next to it
//! (`pisano_fast` / `pisano_direct`, `is_good_fast` / `is_good_direct`, ...).
//! The [`verify`] module drives both routes over ranges of moduli.

pub mod arith;
pub mod classify;
pub mod error;
pub mod fib;
pub mod pisano;
pub mod scan;
pub mod verify;
pub mod wss;

pub use arith::Factorization;
pub use classify::{GoodnessReport, Method, PrimeClass, PrimeEntry, PrimePattern};
pub use error::{Error, Result};
pub use fib::FibMatrix;
pub use pisano::{PisanoProfile, PrimePowerPeriod};
pub use scan::{ScanCheckpoint, ScanConfig, ScanOutcome, WssResultLine};
pub use wss::{PrimePowerSquareReport, SelfSquareRecord, TwoPowerValuation, WssRecord};
