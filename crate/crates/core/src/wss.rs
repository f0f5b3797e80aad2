//! Wall-Sun-Sun primes and self-square moduli.
//!
//! A prime `p` is Wall-Sun-Sun when `p^2 | u_{p - (p/5)}`, equivalently
//! `p^2 | u_{γ(p)}`. Both criteria are evaluated for every prime so the
//! equivalence is audited rather than assumed. A modulus `m` is self-square
//! when `m^2 | u_{γ(m)}`; below the scanned range only 6 and 12 qualify.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, factorize, is_prime, mul_mod_unchecked};
use crate::error::{Error, Result};
use crate::fib::{binomial_row_mod, fib_pair_mod_unchecked, fib_prefix_mod, fib_prev_mod};
use crate::pisano::{self, gamma_prime, gamma_prime_power};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WssRecord {
    pub p: u64,
    pub legendre5: i8,
    pub index: u64,
    pub residue_fib_index_mod_p2: u64,
    pub residue_fib_gamma_mod_p2: u64,
    pub is_wss: bool,
    pub criteria_agree: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfSquareRecord {
    pub m: u64,
    pub gamma: u64,
    pub residue_mod_m2: u64,
    pub divisible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPowerValuation {
    pub k: u32,
    /// 2-adic valuation of `u_{γ(2^k)}`, capped at `2k` (the residue is taken
    /// mod `2^{2k}`).
    pub v2: u32,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerSquareReport {
    pub m: u64,
    pub gamma: u64,
    pub residue_mod_m2: u64,
    pub ok: bool,
    /// `(p, k, u_{γ(p^k)} mod p^{2k})` for each prime power dividing `m`.
    pub prime_power_checks: Vec<(u64, u32, u64)>,
    pub prime_powers_ok: bool,
}

/// `(p / 5)`: 0 for `p = 5`, +1 for `p ≡ ±1 (mod 5)`, -1 for `p ≡ ±2 (mod 5)`.
pub fn legendre5(p: u64) -> Result<i8> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(match p % 5 {
        0 => 0,
        1 | 4 => 1,
        _ => -1,
    })
}

fn square(n: u64) -> Result<u64> {
    n.checked_mul(n)
        .ok_or_else(|| Error::Overflow(format!("{n}^2 exceeds u64")))
}

/// Evaluates both Wall-Sun-Sun criteria for `p`.
pub fn is_wss(p: u64) -> Result<WssRecord> {
    let l5 = legendre5(p)?;
    let p2 = square(p)?;
    let index = match l5 {
        1 => p - 1,
        -1 => p + 1,
        _ => p,
    };
    let by_index = fib_pair_mod_unchecked(index, p2).0;
    let gamma = gamma_prime(p)?;
    let by_gamma = fib_pair_mod_unchecked(gamma, p2).0;
    Ok(WssRecord {
        p,
        legendre5: l5,
        index,
        residue_fib_index_mod_p2: by_index,
        residue_fib_gamma_mod_p2: by_gamma,
        is_wss: by_index == 0,
        criteria_agree: (by_index == 0) == (by_gamma == 0),
    })
}

/// Checks `m^2 | u_{γ(m)}`.
pub fn self_square_test(m: u64) -> Result<SelfSquareRecord> {
    if m < 2 {
        return Err(Error::domain("self-square test needs m >= 2"));
    }
    let m2 = square(m)?;
    let gamma = pisano::pisano_fast(m)?;
    let residue = fib_pair_mod_unchecked(gamma, m2).0;
    Ok(SelfSquareRecord {
        m,
        gamma,
        residue_mod_m2: residue,
        divisible: residue == 0,
    })
}

/// All `m` in `[2, m_max]` with `m^2 | u_{γ(m)}`, ascending.
pub fn enumerate_self_square(m_max: u64) -> Result<Vec<SelfSquareRecord>> {
    if m_max < 2 {
        return Err(Error::domain("enumeration needs m_max >= 2"));
    }
    let records = (2..=m_max)
        .into_par_iter()
        .map(self_square_test)
        .collect::<Result<Vec<_>>>()?;
    Ok(records.into_iter().filter(|r| r.divisible).collect())
}

/// `u_{a*g} / u_g mod modulus`, via
/// `sum_{i=1}^{a} C(a, i) * u_i * u_g^{i-1} * u_{g-1}^{a-i}`.
pub fn cofactor_mod(a: u64, g: u64, modulus: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::domain("cofactor needs a >= 1"));
    }
    if modulus == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    let m = modulus;
    let ug = fib_pair_mod_unchecked(g, m).0;
    let ug_prev = if g == 0 { 1 % m } else { fib_prev_mod(g, m) };
    let binom = binomial_row_mod(a, m);
    let fibs = fib_prefix_mod(a, m);

    let mut prev_pows = vec![1 % m; a as usize];
    for j in 1..a as usize {
        prev_pows[j] = mul_mod_unchecked(prev_pows[j - 1], ug_prev, m);
    }
    let mut sum = 0u64;
    let mut ug_pow = 1 % m; // u_g^{i-1}
    for i in 1..=a as usize {
        let term = mul_mod_unchecked(
            mul_mod_unchecked(binom[i], fibs[i], m),
            mul_mod_unchecked(ug_pow, prev_pows[a as usize - i], m),
            m,
        );
        sum = add_mod(sum, term, m);
        ug_pow = mul_mod_unchecked(ug_pow, ug, m);
    }
    Ok(sum)
}

/// 2-adic behaviour of `u_{γ(2^k)}` for `1 <= k <= 30`.
pub fn two_power_valuation(k: u32) -> Result<TwoPowerValuation> {
    if k == 0 || k > 30 {
        return Err(Error::domain(format!("k = {k} outside [1, 30]")));
    }
    let gamma = gamma_prime_power(2, k)?.gamma_pe;
    let modulus = 1u64 << (2 * k);
    let residue = fib_pair_mod_unchecked(gamma, modulus).0;
    let (v2, ok) = if residue == 0 {
        (2 * k, false)
    } else {
        (residue.trailing_zeros(), true)
    };
    Ok(TwoPowerValuation { k, v2, ok })
}

/// Checks `m^2 ∤ u_{γ(m)}` for odd `m`, plus `p^{2k} ∤ u_{γ(p^k)}` for every
/// prime power `p^k` with `p^e || m` and `k <= e`.
pub fn prime_power_square_check(m: u64) -> Result<PrimePowerSquareReport> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::domain(format!("{m} is not an odd modulus >= 3")));
    }
    let rec = self_square_test(m)?;
    let mut checks = Vec::new();
    for &(p, e) in factorize(m)?.factors() {
        for k in 1..=e {
            let pk = p.pow(k);
            let gamma = gamma_prime_power(p, k)?.gamma_pe;
            let modulus = square(pk)?;
            checks.push((p, k, fib_pair_mod_unchecked(gamma, modulus).0));
        }
    }
    let prime_powers_ok = checks.iter().all(|&(_, _, r)| r != 0);
    Ok(PrimePowerSquareReport {
        m,
        gamma: rec.gamma,
        residue_mod_m2: rec.residue_mod_m2,
        ok: !rec.divisible,
        prime_power_checks: checks,
        prime_powers_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fib::{big_mod, fib_exact, fib_mod};
    use num_bigint::BigUint;

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre5(5).unwrap(), 0);
        assert_eq!(legendre5(11).unwrap(), 1);
        assert_eq!(legendre5(7).unwrap(), -1);
        assert!(legendre5(21).is_err());
        // against quadratic residues mod 5
        for p in crate::arith::primes_in_range(2, 500) {
            let r = p % 5;
            let want = if r == 0 {
                0
            } else if [1, 4].contains(&r) {
                1
            } else {
                -1
            };
            assert_eq!(legendre5(p).unwrap(), want);
        }
    }

    #[test]
    fn wss_examples() {
        let r = is_wss(11).unwrap();
        assert_eq!(r.index, 10);
        assert_eq!(r.residue_fib_index_mod_p2, 55);
        assert!(!r.is_wss && r.criteria_agree);
        let r = is_wss(5).unwrap();
        assert_eq!(r.residue_fib_index_mod_p2, 5);
        assert_ne!(r.residue_fib_gamma_mod_p2, 0);
        assert!(!r.is_wss && r.criteria_agree);
        assert!(is_wss(15).is_err());
    }

    #[test]
    fn self_square_examples() {
        assert!(self_square_test(6).unwrap().divisible);
        let r = self_square_test(12).unwrap();
        assert_eq!(r.gamma, 24);
        assert!(r.divisible);
        assert_eq!(46368 % 144, 0);
        assert!(!self_square_test(5).unwrap().divisible);
    }

    #[test]
    fn enumerate_examples() {
        let ms = |v: Vec<SelfSquareRecord>| v.iter().map(|r| r.m).collect::<Vec<_>>();
        assert_eq!(ms(enumerate_self_square(12).unwrap()), vec![6, 12]);
        assert!(enumerate_self_square(5).unwrap().is_empty());
        assert!(enumerate_self_square(1).is_err());
    }

    #[test]
    fn cofactor_examples() {
        assert_eq!(cofactor_mod(1, 12, 9).unwrap(), 1);
        assert_eq!(cofactor_mod(2, 12, 9).unwrap(), 7);
        assert_eq!(46368 / 144, 322);
        assert!(cofactor_mod(0, 12, 9).is_err());
    }

    #[test]
    fn cofactor_matches_exact_quotient() {
        for g in 1..40u64 {
            let ug = fib_exact(g).unwrap();
            for a in 1..30u64 {
                let q = fib_exact(a * g).unwrap() / &ug;
                for m in [7u64, 1000, 999_983] {
                    assert_eq!(cofactor_mod(a, g, m).unwrap(), big_mod(&q, m));
                }
            }
        }
    }

    #[test]
    fn cofactor_times_base_is_multiple() {
        for (a, g, m) in [
            (3u64, 20u64, 625u64),
            (17, 8, 81),
            (200, 24, 36),
            (5, 100, 10_007),
        ] {
            let lhs = mul_mod_unchecked(cofactor_mod(a, g, m).unwrap(), fib_mod(g, m).unwrap(), m);
            assert_eq!(lhs, fib_mod(a * g, m).unwrap());
        }
    }

    #[test]
    fn two_power_valuation_examples() {
        let r = two_power_valuation(1).unwrap();
        assert_eq!((r.v2, r.ok), (1, true));
        let r = two_power_valuation(2).unwrap();
        assert_eq!((r.v2, r.ok), (3, true));
        let r = two_power_valuation(5).unwrap();
        assert_eq!((r.v2, r.ok), (6, true));
        let u48 = fib_exact(48).unwrap();
        assert_eq!(u48.trailing_zeros(), Some(6));
        assert!(two_power_valuation(0).is_err());
    }

    #[test]
    fn two_power_valuation_matches_exact_for_small_k() {
        for k in 2..=14u32 {
            let g = 3u64 << (k - 1);
            let exact = fib_exact(g).unwrap();
            assert_eq!(
                Some(two_power_valuation(k).unwrap().v2 as u64),
                exact.trailing_zeros()
            );
        }
    }

    #[test]
    fn prime_power_square_examples() {
        let r = prime_power_square_check(25).unwrap();
        assert_eq!(r.gamma, 100);
        assert!(r.ok && r.prime_powers_ok);
        let r = prime_power_square_check(15).unwrap();
        assert_eq!(r.gamma, 40);
        assert!(r.ok);
        let u40 = fib_exact(40).unwrap();
        assert_ne!(&u40 % BigUint::from(225u32), BigUint::from(0u32));
        assert!(prime_power_square_check(5).unwrap().ok);
        assert!(prime_power_square_check(12).is_err());
    }
}
