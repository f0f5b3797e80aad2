//! Fibonacci numbers, exact and modular.
//!
//! `u_0 = 0`, `u_1 = 1`, `u_{-1} = 1`. With `P = [[0, 1], [1, 1]]`,
//! `P^n = [[u_{n-1}, u_n], [u_n, u_{n+1}]]`; [`matrix_pow_mod`] computes that
//! matrix by binary powering and [`fib_pair_mod`] computes `(u_n, u_{n+1})`
//! by fast doubling. The two routes are independent and cross-checked in tests.
//!
//! The `*_rhs` functions evaluate the right-hand side of classical Fibonacci
//! identities so they can be compared against `fib_pair_mod`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{add_mod, mul_mod_unchecked, neg_mod, sub_mod};
use crate::error::{Error, Result};

/// Largest index accepted by [`fib_exact`].
pub const FIB_EXACT_CAP: u64 = 1_000_000;

/// `P^n` over `Z/m`, stored as its three distinct entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibMatrix {
    pub modulus: u64,
    pub index: u64,
    pub u_prev: u64,
    pub u_cur: u64,
    pub u_next: u64,
}

impl FibMatrix {
    /// `u_prev * u_next - u_cur^2 mod m`; equals `(-1)^index`.
    pub fn determinant(&self) -> u64 {
        let m = self.modulus;
        sub_mod(
            mul_mod_unchecked(self.u_prev, self.u_next, m),
            mul_mod_unchecked(self.u_cur, self.u_cur, m),
            m,
        )
    }

    pub fn is_identity(&self) -> bool {
        let one = 1 % self.modulus;
        self.u_prev == one && self.u_cur == 0 && self.u_next == one
    }

    pub fn is_negative_identity(&self) -> bool {
        let minus_one = neg_mod(1, self.modulus);
        self.u_prev == minus_one && self.u_cur == 0 && self.u_next == minus_one
    }
}

fn check_modulus(m: u64) -> Result<()> {
    if m == 0 {
        Err(Error::domain("modulus must be positive"))
    } else {
        Ok(())
    }
}

/// Exact `u_n`, for `n <= FIB_EXACT_CAP`.
pub fn fib_exact(n: u64) -> Result<BigUint> {
    fib_exact_capped(n, FIB_EXACT_CAP)
}

pub fn fib_exact_capped(n: u64, cap: u64) -> Result<BigUint> {
    if n > cap {
        return Err(Error::Resource(format!(
            "exact Fibonacci index {n} above cap {cap}"
        )));
    }
    Ok(fib_exact_pair(n).0)
}

/// `(u_n, u_{n+1})` over the integers, by fast doubling.
fn fib_exact_pair(n: u64) -> (BigUint, BigUint) {
    let mut a = BigUint::zero();
    let mut b = BigUint::one();
    for bit in (0..64 - n.leading_zeros()).rev() {
        // a = u_k, b = u_{k+1}  ->  u_{2k}, u_{2k+1}
        let two_b = &b << 1usize;
        let c = &a * (two_b - &a);
        let d = &a * &a + &b * &b;
        if (n >> bit) & 1 == 1 {
            b = &c + &d;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    (a, b)
}

/// Reduces an exact value into a residue.
pub fn big_mod(x: &BigUint, m: u64) -> u64 {
    let r = x % BigUint::from(m);
    r.iter_u64_digits().next().unwrap_or(0)
}

/// `P^n mod m` by binary powering of the symmetric Fibonacci matrix.
pub fn matrix_pow_mod(n: u64, m: u64) -> Result<FibMatrix> {
    check_modulus(m)?;
    // (a, b, c) stands for [[a, b], [b, c]]; powers of P commute, so products
    // stay symmetric.
    let mul = |x: (u64, u64, u64), y: (u64, u64, u64)| {
        let (a, b, c) = x;
        let (d, e, f) = y;
        (
            add_mod(mul_mod_unchecked(a, d, m), mul_mod_unchecked(b, e, m), m),
            add_mod(mul_mod_unchecked(a, e, m), mul_mod_unchecked(b, f, m), m),
            add_mod(mul_mod_unchecked(b, e, m), mul_mod_unchecked(c, f, m), m),
        )
    };
    let one = 1 % m;
    let mut acc = (one, 0, one);
    let mut base = (0, one, one);
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        k >>= 1;
    }
    Ok(FibMatrix {
        modulus: m,
        index: n,
        u_prev: acc.0,
        u_cur: acc.1,
        u_next: acc.2,
    })
}

/// `(u_n mod m, u_{n+1} mod m)` by fast doubling.
pub fn fib_pair_mod(n: u64, m: u64) -> Result<(u64, u64)> {
    check_modulus(m)?;
    Ok(fib_pair_mod_unchecked(n, m))
}

pub(crate) fn fib_pair_mod_unchecked(n: u64, m: u64) -> (u64, u64) {
    let mut a = 0u64;
    let mut b = 1 % m;
    for bit in (0..64 - n.leading_zeros()).rev() {
        let c = mul_mod_unchecked(a, sub_mod(add_mod(b, b, m), a, m), m);
        let d = add_mod(mul_mod_unchecked(a, a, m), mul_mod_unchecked(b, b, m), m);
        if (n >> bit) & 1 == 1 {
            a = d;
            b = add_mod(c, d, m);
        } else {
            a = c;
            b = d;
        }
    }
    (a, b)
}

/// `u_n mod m`.
pub fn fib_mod(n: u64, m: u64) -> Result<u64> {
    fib_pair_mod(n, m).map(|(u, _)| u)
}

/// `u_{n-1} mod m`, with `u_{-1} = 1`.
pub(crate) fn fib_prev_mod(n: u64, m: u64) -> u64 {
    let (u, v) = fib_pair_mod_unchecked(n, m);
    sub_mod(v, u, m)
}

/// `u_n * (u_{n-1} + u_{n+1}) mod m`, which equals `u_{2n} mod m`.
pub fn doubling_rhs(n: u64, m: u64) -> Result<u64> {
    check_modulus(m)?;
    if n == 0 {
        return Err(Error::domain("doubling identity needs n >= 1"));
    }
    let (u, v) = fib_pair_mod_unchecked(n, m);
    let prev = sub_mod(v, u, m);
    Ok(mul_mod_unchecked(u, add_mod(prev, v, m), m))
}

/// `(-1)^n * (u_a * u_{n+1} - u_{a+1} * u_n) mod m`, which equals `u_{a-n} mod m`.
pub fn subtraction_rhs(a: u64, n: u64, m: u64) -> Result<u64> {
    check_modulus(m)?;
    if a < n {
        return Err(Error::domain(format!(
            "subtraction identity needs first index >= second ({a} < {n})"
        )));
    }
    let (ua, ua1) = fib_pair_mod_unchecked(a, m);
    let (un, un1) = fib_pair_mod_unchecked(n, m);
    let diff = sub_mod(
        mul_mod_unchecked(ua, un1, m),
        mul_mod_unchecked(ua1, un, m),
        m,
    );
    Ok(if n % 2 == 1 { neg_mod(diff, m) } else { diff })
}

/// Binomial coefficients `C(n, 0..=n)` reduced mod `m`, computed exactly first.
pub(crate) fn binomial_row_mod(n: u64, m: u64) -> Vec<u64> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(big_mod(&c, m));
    for i in 1..=n {
        c = c * BigUint::from(n - i + 1) / BigUint::from(i);
        row.push(big_mod(&c, m));
    }
    row
}

/// Residues `u_0 .. u_n` mod `m` by plain iteration.
pub(crate) fn fib_prefix_mod(n: u64, m: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let (mut a, mut b) = (0u64, 1 % m);
    for _ in 0..=n {
        out.push(a);
        (a, b) = (b, add_mod(a, b, m));
    }
    out
}

/// `sum_{i=1}^{n} C(n, i) * u_i * u_k^i * u_{k-1}^{n-i} mod m`, which equals
/// `u_{k*n} mod m`.
pub fn binomial_expansion_rhs(k: u64, n: u64, m: u64) -> Result<u64> {
    check_modulus(m)?;
    if k == 0 || n == 0 {
        return Err(Error::domain("binomial expansion needs k, n >= 1"));
    }
    let (uk, uk1) = fib_pair_mod_unchecked(k, m);
    let uk_prev = sub_mod(uk1, uk, m);
    let binom = binomial_row_mod(n, m);
    let fibs = fib_prefix_mod(n, m);

    // powers of u_{k-1}, highest first so term i uses index n - i
    let mut prev_pows = vec![1 % m; n as usize + 1];
    for j in 1..=n as usize {
        prev_pows[j] = mul_mod_unchecked(prev_pows[j - 1], uk_prev, m);
    }
    let mut sum = 0u64;
    let mut uk_pow = 1 % m;
    for i in 1..=n as usize {
        uk_pow = mul_mod_unchecked(uk_pow, uk, m);
        let term = mul_mod_unchecked(
            mul_mod_unchecked(binom[i], fibs[i], m),
            mul_mod_unchecked(uk_pow, prev_pows[n as usize - i], m),
            m,
        );
        sum = add_mod(sum, term, m);
    }
    Ok(sum)
}
