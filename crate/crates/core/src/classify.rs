//! Good numbers: moduli `m` with `P^{γ(m)/2} = -Id` over `Z/m`.
//!
//! [`is_good_direct`] evaluates the matrix. [`is_good_fast`] decides from the
//! prime factorization alone: an odd modulus is good iff every prime factor
//! `p_i` is good (`4 | γ(p_i)`) and the 2-adic valuations `k_i` of the
//! `γ(p_i)` all coincide.
//!
//! Even moduli are not all "never good": since `-Id = Id` over `Z/2`, a modulus
//! `2n` with `n` odd and good satisfies `P^{γ(2n)/2} = -Id` (6, 10, 14, ...).
//! Multiples of 4 are never good. The fast path uses that rule for even `m`,
//! and [`crate::verify`] keeps auditing the blanket "even is never good" claim,
//! which fails.

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, lcm_all, two_adic_split};
use crate::error::{Error, Result};
use crate::fib::matrix_pow_mod;
use crate::pisano::{self, gamma_prime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Fast,
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "fast" => Ok(Method::Fast),
            "both" => Ok(Method::Both),
            other => Err(Error::domain(format!("unknown method {other:?}"))),
        }
    }
}

/// Per-prime evidence inside a [`GoodnessReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeEntry {
    pub p: u64,
    pub e: u32,
    pub gamma_p: u64,
    /// 2-adic valuation of `γ(p)`.
    pub k: u32,
    pub good_prime: bool,
    pub upsilon_p: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessReport {
    pub m: u64,
    pub is_odd: bool,
    pub gamma: u64,
    pub prime_entries: Vec<PrimeEntry>,
    pub is_good: bool,
    pub upsilon_m: u64,
    pub method: Method,
}

/// Outcome of the `P1`/`P2` membership test for a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimeClass {
    /// `γ(p) | p - 1`
    P1,
    /// `γ(p) | 2(p + 1)`
    P2,
    Both,
    Neither,
}

impl PrimeClass {
    pub fn is_anomaly(self) -> bool {
        matches!(self, PrimeClass::Both | PrimeClass::Neither)
    }
}

/// Which `υ(p)` case holds for an odd prime, with its 2-adic signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimePattern {
    /// `υ(p) = 1` and `2 || γ(p)`
    V1Pattern,
    /// `υ(p) = 2` and `8 | γ(p)`
    V2Pattern,
    /// `υ(p) = 4` and `4 || γ(p)`
    V4Pattern,
}

fn check_modulus(m: u64) -> Result<()> {
    if m < 2 {
        Err(Error::domain(format!(
            "classification needs m >= 2, got {m}"
        )))
    } else {
        Ok(())
    }
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        Err(Error::domain(format!("{p} is not an odd prime")))
    } else {
        Ok(())
    }
}

/// Evaluates `P^{γ(m)/2}` and compares with `-Id`.
pub fn is_good_direct(m: u64) -> Result<bool> {
    check_modulus(m)?;
    let gamma = pisano::pisano_fast(m)?;
    if gamma % 2 == 1 {
        return Ok(false);
    }
    Ok(matrix_pow_mod(gamma / 2, m)?.is_negative_identity())
}

/// An odd prime is good iff `4 | γ(p)`.
pub fn is_good_prime(p: u64) -> Result<bool> {
    check_odd_prime(p)?;
    Ok(gamma_prime(p)? % 4 == 0)
}

fn prime_entries(m: u64) -> Result<Vec<PrimeEntry>> {
    factorize(m)?
        .factors()
        .iter()
        .map(|&(p, e)| {
            let gamma_p = gamma_prime(p)?;
            let (k, _) = two_adic_split(gamma_p)?;
            Ok(PrimeEntry {
                p,
                e,
                gamma_p,
                k,
                good_prime: p != 2 && gamma_p % 4 == 0,
                upsilon_p: pisano::upsilon(p)?,
            })
        })
        .collect()
}

fn fast_verdict(m: u64, entries: &[PrimeEntry]) -> bool {
    // Mod 4 the zeros of u sit only at multiples of γ(4) = 6, where P = Id,
    // so 4 | m is never good. For m = 2n with n odd, -Id = Id over Z/2 and
    // γ(m)/2 is an odd multiple of γ(n)/2, so m is good iff n is.
    let odd: &[PrimeEntry] = match m % 4 {
        0 => return false,
        2 if m == 2 => return false,
        2 => &entries[1..],
        _ => entries,
    };
    let k0 = odd[0].k;
    odd.iter().all(|e| e.good_prime && e.k == k0)
}

/// Classifies `m` by the selected method.
///
/// With [`Method::Both`] a disagreement between the two verdicts is an
/// [`Error::Anomaly`].
pub fn classify(m: u64, method: Method) -> Result<GoodnessReport> {
    check_modulus(m)?;
    let prof = pisano::profile(m)?;
    let entries = prime_entries(m)?;
    let is_good = match method {
        Method::Fast => fast_verdict(m, &entries),
        Method::Direct => is_good_direct(m)?,
        Method::Both => {
            let fast = fast_verdict(m, &entries);
            let direct = is_good_direct(m)?;
            if fast != direct {
                return Err(Error::Anomaly(format!(
                    "m = {m}: factor criterion says {fast}, matrix test says {direct}"
                )));
            }
            fast
        }
    };
    Ok(GoodnessReport {
        m,
        is_odd: m % 2 == 1,
        gamma: prof.gamma,
        prime_entries: entries,
        is_good,
        upsilon_m: prof.upsilon,
        method,
    })
}

/// Factor-based classification.
pub fn is_good_fast(m: u64) -> Result<GoodnessReport> {
    classify(m, Method::Fast)
}

/// `υ(m)` for odd `m >= 3` by two routes, which must agree: the case rule on
/// the `υ(p_i)` (common value if all equal, else 2) and `γ(m) / t` with `t` the
/// lcm of the `α(p_i^{e_i})`.
pub fn upsilon_odd_composite(m: u64) -> Result<u64> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::domain(format!("{m} is not an odd modulus >= 3")));
    }
    let prof = pisano::profile(m)?;

    let prime_upsilons = prof
        .prime_powers
        .iter()
        .map(|pp| pisano::upsilon(pp.p))
        .collect::<Result<Vec<_>>>()?;
    let by_cases = if prime_upsilons.iter().all(|&u| u == prime_upsilons[0]) {
        prime_upsilons[0]
    } else {
        2
    };

    let alphas = prof
        .prime_powers
        .iter()
        .map(|pp| pisano::alpha(pp.p.pow(pp.e)))
        .collect::<Result<Vec<_>>>()?;
    let t = lcm_all(&alphas)?;
    if prof.gamma % t != 0 {
        return Err(Error::Anomaly(format!(
            "m = {m}: t = {t} does not divide γ = {}",
            prof.gamma
        )));
    }
    let by_lcm = prof.gamma / t;

    if by_cases != by_lcm {
        return Err(Error::Anomaly(format!(
            "m = {m}: case rule gives υ = {by_cases}, lcm rule gives {by_lcm}"
        )));
    }
    Ok(by_cases)
}

/// Raw `P1`/`P2` membership of a prime `p != 5`.
pub fn p1_p2_class(p: u64) -> Result<PrimeClass> {
    if p == 5 {
        return Err(Error::domain("p = 5 is excluded from the P1/P2 split"));
    }
    let gamma = gamma_prime(p)?;
    let in_p1 = (p - 1).is_multiple_of(gamma);
    let in_p2 = (2 * (p + 1)).is_multiple_of(gamma);
    Ok(match (in_p1, in_p2) {
        (true, false) => PrimeClass::P1,
        (false, true) => PrimeClass::P2,
        (true, true) => PrimeClass::Both,
        (false, false) => PrimeClass::Neither,
    })
}

/// Matches `υ(p)` against the 2-adic shape of `γ(p)`.
pub fn prime_pattern(p: u64) -> Result<PrimePattern> {
    check_odd_prime(p)?;
    let gamma = gamma_prime(p)?;
    let (k, _) = two_adic_split(gamma)?;
    let ups = pisano::upsilon(p)?;
    let (pattern, holds) = match ups {
        1 => (PrimePattern::V1Pattern, k == 1),
        2 => (PrimePattern::V2Pattern, k >= 3),
        4 => (PrimePattern::V4Pattern, k == 2),
        other => {
            return Err(Error::Anomaly(format!("υ({p}) = {other}")));
        }
    };
    if !holds {
        return Err(Error::Anomaly(format!(
            "p = {p}: υ = {ups} but γ = {gamma} has 2-adic valuation {k}"
        )));
    }
    Ok(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pisano::zero_count_direct;

    #[test]
    fn direct_examples() {
        assert!(!is_good_direct(2).unwrap());
        assert!(is_good_direct(5).unwrap());
        assert!(!is_good_direct(11).unwrap());
        assert!(is_good_direct(1).is_err());
    }

    #[test]
    fn good_prime_examples() {
        assert!(is_good_prime(3).unwrap());
        assert!(!is_good_prime(11).unwrap());
        assert!(is_good_prime(5).unwrap());
        assert!(is_good_prime(2).is_err());
        assert!(is_good_prime(9).is_err());
    }

    #[test]
    fn fast_examples() {
        assert!(!is_good_fast(12).unwrap().is_good);
        let r = is_good_fast(21).unwrap();
        assert!(!r.is_good);
        assert_eq!(
            r.prime_entries.iter().map(|e| e.k).collect::<Vec<_>>(),
            vec![3, 4]
        );

        // an odd semiprime p*q with equal k >= 2, found by search
        let found = (9..10_000u64)
            .step_by(2)
            .find(|&m| {
                let f = factorize(m).unwrap();
                f.factors().len() == 2 && f.factors().iter().all(|&(_, e)| e == 1) && {
                    let r = is_good_fast(m).unwrap();
                    r.prime_entries[0].k >= 2 && r.is_good
                }
            })
            .expect("some good semiprime below 10^4");
        assert!(is_good_direct(found).unwrap());
        assert_eq!(classify(found, Method::Both).unwrap().method, Method::Both);
    }

    #[test]
    fn upsilon_composite_examples() {
        assert_eq!(upsilon_odd_composite(25).unwrap(), 4);
        assert_eq!(upsilon_odd_composite(33).unwrap(), 2);
        assert_eq!(zero_count_direct(33).unwrap(), 2);
        assert_eq!(upsilon_odd_composite(55).unwrap(), 2);
        assert_eq!(zero_count_direct(55).unwrap(), 2);
        assert!(upsilon_odd_composite(10).is_err());
    }

    #[test]
    fn class_examples() {
        assert_eq!(p1_p2_class(11).unwrap(), PrimeClass::P1);
        assert_eq!(p1_p2_class(3).unwrap(), PrimeClass::P2);
        assert_eq!(p1_p2_class(7).unwrap(), PrimeClass::P2);
        assert!(p1_p2_class(5).is_err());
    }

    #[test]
    fn prime_pattern_examples() {
        assert_eq!(prime_pattern(11).unwrap(), PrimePattern::V1Pattern);
        assert_eq!(prime_pattern(3).unwrap(), PrimePattern::V2Pattern);
        assert_eq!(prime_pattern(5).unwrap(), PrimePattern::V4Pattern);
        assert!(prime_pattern(2).is_err());
    }

    #[test]
    fn twice_an_odd_good_number_is_good() {
        // P^12 mod 6 = [[89, 144], [144, 233]] mod 6 = [[5, 0], [0, 5]]
        let mx = matrix_pow_mod(12, 6).unwrap();
        assert!(mx.is_negative_identity());
        assert!(is_good_direct(6).unwrap());
        assert!(is_good_direct(10).unwrap());
        assert!(is_good_fast(6).unwrap().is_good);
        assert!(!is_good_direct(12).unwrap());
        assert!(!is_good_fast(12).unwrap().is_good);
        assert!(!is_good_fast(2).unwrap().is_good);
        assert!(!is_good_direct(22).unwrap()); // 11 is not good
    }

    #[test]
    fn fast_equals_direct_for_even_moduli() {
        for m in (2..=2000u64).step_by(2) {
            assert_eq!(
                is_good_fast(m).unwrap().is_good,
                is_good_direct(m).unwrap(),
                "m = {m}"
            );
            if m % 4 == 0 {
                assert!(!is_good_direct(m).unwrap());
            }
        }
    }

    #[test]
    fn report_invariants() {
        for m in (3..=999u64).step_by(2) {
            let r = classify(m, Method::Both).unwrap();
            if r.is_good {
                let k0 = r.prime_entries[0].k;
                assert!(r.prime_entries.iter().all(|e| e.k == k0 && e.k >= 2));
                let u0 = r.prime_entries[0].upsilon_p;
                assert!(r.prime_entries.iter().all(|e| e.upsilon_p == u0));
            }
        }
    }

    #[test]
    fn method_parses() {
        assert_eq!("both".parse::<Method>().unwrap(), Method::Both);
        assert!("quick".parse::<Method>().is_err());
    }
}
