//! Pisano periods `γ(m)`, rank of apparition `α(m)` and zero count `υ(m)`.
//!
//! Two routes to `γ(m)`:
//!
//! * [`pisano_direct`] walks residue pairs `(u_l, u_{l+1})` until it sees
//!   `(0, 1)` again. Additions only, `O(γ(m))`.
//! * [`pisano_fast`] factors `m`, computes `γ(p)` as the order of `P` inside
//!   `p - 1` or `2(p + 1)` (depending on `p mod 5`), lifts to `γ(p^e)` with the
//!   exponent `ε(p)`, and takes the lcm over prime powers.
//!
//! For `p = 2` the lifting rule is applied as `γ(2^e) = 3 * 2^(e-1)` directly.

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, lcm_all, two_adic_split, Factorization};
use crate::error::{Error, Result};
use crate::fib::fib_pair_mod_unchecked;

/// Largest `ε` searched before giving up and reporting an anomaly.
pub const EPSILON_BOUND: u32 = 8;

/// Invariants of the Fibonacci sequence modulo `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PisanoProfile {
    pub m: u64,
    pub gamma: u64,
    pub alpha: u64,
    pub upsilon: u64,
    pub prime_powers: Vec<PrimePowerPeriod>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePowerPeriod {
    pub p: u64,
    pub e: u32,
    pub gamma_p: u64,
    pub epsilon: u32,
    pub gamma_pe: u64,
}

fn is_identity_at(l: u64, m: u64) -> bool {
    fib_pair_mod_unchecked(l, m) == (0, 1 % m)
}

/// Least `l >= 1` with `(u_l, u_{l+1}) ≡ (0, 1) mod m`, by iteration.
pub fn pisano_direct(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if m == 1 {
        return Ok(1);
    }
    let cap = m.saturating_mul(6);
    let (mut a, mut b) = (1u64, 1u64);
    let mut l = 1u64;
    while !(a == 0 && b == 1) {
        let c = if a >= m - b { a - (m - b) } else { a + b };
        a = b;
        b = c;
        l += 1;
        if l > cap {
            return Err(Error::Internal(format!(
                "period of {m} exceeds 6m without closing"
            )));
        }
    }
    Ok(l)
}

/// Number of zeros among `u_0 .. u_{γ(m)-1}` mod `m`, counted directly.
pub fn zero_count_direct(m: u64) -> Result<u64> {
    let gamma = pisano_direct(m)?;
    let (mut a, mut b) = (0u64, 1 % m);
    let mut zeros = 0;
    for _ in 0..gamma {
        if a == 0 {
            zeros += 1;
        }
        let c = if a >= m - b { a - (m - b) } else { a + b };
        a = b;
        b = c;
    }
    Ok(zeros)
}

/// Least `z >= 1` with `u_z ≡ 0 mod m`, by linear scan.
pub fn alpha_direct(m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    if m == 1 {
        return Ok(1);
    }
    let cap = m.saturating_mul(6);
    let (mut a, mut b) = (1u64, 1u64);
    let mut z = 1u64;
    while a != 0 {
        let c = if a >= m - b { a - (m - b) } else { a + b };
        a = b;
        b = c;
        z += 1;
        if z > cap {
            return Err(Error::Internal(format!("no zero of u mod {m} within 6m")));
        }
    }
    Ok(z)
}

/// Smallest divisor `d` of `n` (given `pred(n)`) with `pred(d)`, where the
/// set of valid indices is closed under gcd (multiples of a single least one).
fn reduce_over_divisors(n: u64, f: &Factorization, pred: impl Fn(u64) -> bool) -> u64 {
    let mut d = n;
    for &(q, _) in f.factors() {
        while d.is_multiple_of(q) && pred(d / q) {
            d /= q;
        }
    }
    d
}

/// `γ(p)` for a prime `p`.
///
/// For `p ≡ ±1 (mod 5)` the period divides `p - 1`, for `p ≡ ±2 (mod 5)` it
/// divides `2(p + 1)`; the least divisor on which `P` is the identity is the
/// period.
pub fn gamma_prime(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    match p {
        2 => return Ok(3),
        5 => return Ok(20),
        _ => {}
    }
    let bound = match p % 5 {
        1 | 4 => p - 1,
        _ => (p + 1)
            .checked_mul(2)
            .ok_or_else(|| Error::Overflow(format!("2(p + 1) for p = {p}")))?,
    };
    if !is_identity_at(bound, p) {
        return Err(Error::Anomaly(format!(
            "P^{bound} is not the identity mod {p}"
        )));
    }
    let f = factorize(bound)?;
    Ok(reduce_over_divisors(bound, &f, |d| is_identity_at(d, p)))
}

/// `ε(p) = max{a : p^a | u_{γ(p)}}`.
pub fn epsilon(p: u64) -> Result<u32> {
    let gamma_p = gamma_prime(p)?;
    epsilon_with_period(p, gamma_p)
}

fn epsilon_with_period(p: u64, gamma_p: u64) -> Result<u32> {
    // p | u_{γ(p)} always; test p^(a+1) for a = 1, 2, ...
    let mut a = 1u32;
    loop {
        let modulus = p
            .checked_pow(a + 1)
            .ok_or_else(|| Error::Overflow(format!("{p}^{} needed to bound epsilon", a + 1)))?;
        if fib_pair_mod_unchecked(gamma_p, modulus).0 != 0 {
            return Ok(a);
        }
        a += 1;
        if a >= EPSILON_BOUND {
            return Err(Error::Anomaly(format!(
                "epsilon({p}) reaches the search bound {EPSILON_BOUND}"
            )));
        }
    }
}

/// `γ(p^e)` together with the data it was lifted from.
pub fn gamma_prime_power(p: u64, e: u32) -> Result<PrimePowerPeriod> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if e == 0 {
        return Err(Error::domain("exponent must be at least 1"));
    }
    p.checked_pow(e)
        .ok_or_else(|| Error::Resource(format!("{p}^{e} exceeds u64")))?;

    if p == 2 {
        let gamma_pe = 1u64
            .checked_shl(e - 1)
            .filter(|_| e <= 62)
            .map(|s| 3 * s)
            .ok_or_else(|| Error::Overflow(format!("γ(2^{e}) exceeds u64")))?;
        return Ok(PrimePowerPeriod {
            p,
            e,
            gamma_p: 3,
            epsilon: 1,
            gamma_pe,
        });
    }

    let gamma_p = gamma_prime(p)?;
    let eps = epsilon_with_period(p, gamma_p)?;
    let gamma_pe = if e <= eps {
        gamma_p
    } else {
        p.checked_pow(e - eps)
            .and_then(|lift| lift.checked_mul(gamma_p))
            .ok_or_else(|| Error::Overflow(format!("γ({p}^{e}) exceeds u64")))?
    };
    Ok(PrimePowerPeriod {
        p,
        e,
        gamma_p,
        epsilon: eps,
        gamma_pe,
    })
}

fn prime_power_periods(f: &Factorization) -> Result<Vec<PrimePowerPeriod>> {
    f.factors()
        .iter()
        .map(|&(p, e)| gamma_prime_power(p, e))
        .collect()
}

/// `γ(m)` as the lcm of the prime-power periods.
pub fn pisano_fast(m: u64) -> Result<u64> {
    let f = factorize(m)?;
    let periods = prime_power_periods(&f)?;
    lcm_all(&periods.iter().map(|pp| pp.gamma_pe).collect::<Vec<_>>())
}

fn alpha_with_period(m: u64, gamma: u64) -> Result<u64> {
    let f = factorize(gamma)?;
    Ok(reduce_over_divisors(gamma, &f, |d| {
        fib_pair_mod_unchecked(d, m).0 == 0
    }))
}

/// `α(m)`: the least divisor of `γ(m)` at which `u` vanishes mod `m`.
pub fn alpha(m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::domain("alpha needs m >= 2"));
    }
    alpha_with_period(m, pisano_fast(m)?)
}

/// `υ(m) = γ(m) / α(m)`.
pub fn upsilon(m: u64) -> Result<u64> {
    Ok(profile(m)?.upsilon)
}

pub fn profile(m: u64) -> Result<PisanoProfile> {
    if m < 2 {
        return Err(Error::domain("profile needs m >= 2"));
    }
    let f = factorize(m)?;
    let prime_powers = prime_power_periods(&f)?;
    let gamma = lcm_all(
        &prime_powers
            .iter()
            .map(|pp| pp.gamma_pe)
            .collect::<Vec<_>>(),
    )?;
    let alpha = alpha_with_period(m, gamma)?;
    let upsilon = gamma / alpha;
    if gamma % alpha != 0 || !matches!(upsilon, 1 | 2 | 4) {
        return Err(Error::Anomaly(format!(
            "m = {m}: γ = {gamma}, α = {alpha} gives υ outside {{1, 2, 4}}"
        )));
    }
    Ok(PisanoProfile {
        m,
        gamma,
        alpha,
        upsilon,
        prime_powers,
    })
}

/// 2-adic valuation of `γ(p)`.
pub fn gamma_two_adic(p: u64) -> Result<u32> {
    Ok(two_adic_split(gamma_prime(p)?)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent brute force: scan until the pair repeats, no early cap.
    fn brute_period(m: u64) -> u64 {
        let (mut a, mut b, mut l) = (1 % m, 1 % m, 1u64);
        while !(a == 0 && b == 1 % m) {
            (a, b) = (b, (a + b) % m);
            l += 1;
        }
        l
    }

    #[test]
    fn direct_examples() {
        assert_eq!(pisano_direct(1).unwrap(), 1);
        assert_eq!(pisano_direct(2).unwrap(), 3);
        assert_eq!(pisano_direct(5).unwrap(), 20);
        assert_eq!(pisano_direct(7).unwrap(), 16);
        assert_eq!(brute_period(7), 16);
        assert!(pisano_direct(0).is_err());
    }

    #[test]
    fn prime_power_examples() {
        assert_eq!(gamma_prime_power(2, 3).unwrap().gamma_pe, 12);
        assert_eq!(gamma_prime_power(5, 1).unwrap().gamma_pe, 20);
        let pp = gamma_prime_power(5, 2).unwrap();
        assert_eq!(pp.gamma_pe, 100);
        assert_eq!(pp.epsilon, 1);
        assert_eq!(brute_period(25), 100);
        assert!(matches!(gamma_prime_power(4, 1), Err(Error::Domain(_))));
        assert!(matches!(gamma_prime_power(3, 41), Err(Error::Resource(_))));
    }

    #[test]
    fn two_power_formula_matches_direct() {
        for k in 1..=20u32 {
            assert_eq!(
                gamma_prime_power(2, k).unwrap().gamma_pe,
                pisano_direct(1 << k).unwrap(),
                "k = {k}"
            );
        }
    }

    #[test]
    fn fast_examples() {
        assert_eq!(pisano_fast(10).unwrap(), 60);
        assert_eq!(pisano_direct(10).unwrap(), 60);
        assert_eq!(pisano_fast(6).unwrap(), 24);
        assert_eq!(pisano_fast(12).unwrap(), 24);
        assert!(pisano_fast(1).is_err());
    }

    #[test]
    fn fast_matches_brute_force() {
        for m in 2..=3000 {
            assert_eq!(pisano_fast(m).unwrap(), brute_period(m), "m = {m}");
        }
    }

    #[test]
    fn alpha_upsilon_examples() {
        assert_eq!(alpha(5).unwrap(), 5);
        assert_eq!(alpha(2).unwrap(), 3);
        assert_eq!(alpha(6).unwrap(), 12);
        assert_eq!(upsilon(5).unwrap(), 4);
        assert_eq!(upsilon(2).unwrap(), 1);
        assert_eq!(upsilon(8).unwrap(), 2);
        assert_eq!(zero_count_direct(5).unwrap(), 4);
        for m in 2..=2000 {
            assert_eq!(alpha(m).unwrap(), alpha_direct(m).unwrap(), "m = {m}");
            assert_eq!(
                upsilon(m).unwrap(),
                zero_count_direct(m).unwrap(),
                "m = {m}"
            );
        }
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(2).unwrap(), 1);
        assert_eq!(epsilon(5).unwrap(), 1);
        assert_eq!(epsilon(3).unwrap(), 1);
        assert!(epsilon(9).is_err());
    }

    #[test]
    fn gamma_prime_large() {
        // γ(p) for a large prime still divides p - 1 or 2(p + 1)
        let p = 1_000_000_007u64;
        let g = gamma_prime(p).unwrap();
        assert!(is_identity_at(g, p));
        assert!((p - 1).is_multiple_of(g) || (2 * (p + 1)).is_multiple_of(g));
    }

    #[test]
    fn odd_prime_periods_are_even() {
        for p in crate::arith::primes_in_range(3, 10_000) {
            assert_eq!(gamma_prime(p).unwrap() % 2, 0, "p = {p}");
        }
    }
}
