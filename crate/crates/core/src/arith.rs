//! Integer and modular arithmetic on `u64`.
//!
//! Products are taken in `u128`, so any modulus below `2^64` is safe for
//! `mul_mod`. Primality is a deterministic Miller-Rabin over the first twelve
//! primes as witnesses, which is exact for every 64-bit input. Factorization
//! is trial division below [`TRIAL_DIVISION_LIMIT`] and Brent's variant of
//! Pollard rho above it; each emitted factor is re-checked with `is_prime`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial division bound used by [`factorize`].
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// `(a * b) mod m`.
pub fn mul_mod(a: u64, b: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    Ok(mul_mod_unchecked(a, b, m))
}

#[inline]
pub(crate) fn mul_mod_unchecked(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    let (a, b) = (a % m, b % m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

#[inline]
pub(crate) fn neg_mod(a: u64, m: u64) -> u64 {
    sub_mod(0, a, m)
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_unchecked(acc, base, m);
        }
        base = mul_mod_unchecked(base, base, m);
        exp >>= 1;
    }
    Ok(acc)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple, failing instead of wrapping on overflow.
pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Err(Error::domain("lcm of zero"));
    }
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::Overflow(format!("lcm({a}, {b}) exceeds u64")))
}

pub fn lcm_all(values: &[u64]) -> Result<u64> {
    let (first, rest) = values
        .split_first()
        .ok_or_else(|| Error::domain("lcm of an empty list"))?;
    if *first == 0 {
        return Err(Error::domain("lcm of zero"));
    }
    rest.iter().try_fold(*first, |acc, &v| lcm(acc, v))
}

/// Splits `n = 2^k * odd` with `odd` odd.
pub fn two_adic_split(n: u64) -> Result<(u32, u64)> {
    if n == 0 {
        return Err(Error::domain("2-adic split of zero"));
    }
    let k = n.trailing_zeros();
    Ok((k, n >> k))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (s, d) = (
        (n - 1).trailing_zeros(),
        (n - 1) >> (n - 1).trailing_zeros(),
    );
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n).expect("n >= 2");
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_unchecked(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of an integer `n >= 2`.
///
/// Primes are strictly increasing and every exponent is at least one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }

    /// Recomputes the product of `p^e`; `None` on overflow.
    pub fn product(&self) -> Option<u64> {
        self.factors
            .iter()
            .try_fold(1u64, |acc, &(p, e)| acc.checked_mul(p.checked_pow(e)?))
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::domain(format!("cannot factorize {n}")));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut rest = n;

    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };

    push(2, &mut rest);
    let mut d = 3u64;
    while d < TRIAL_DIVISION_LIMIT && d.saturating_mul(d) <= rest {
        push(d, &mut rest);
        d += 2;
    }

    if rest > 1 {
        let mut large = Vec::new();
        split_large(rest, &mut large)?;
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }

    let f = Factorization { n, factors };
    debug_assert_eq!(f.product(), Some(n));
    Ok(f)
}

fn split_large(n: u64, out: &mut Vec<u64>) -> Result<()> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    let d = pollard_brent(n)
        .ok_or_else(|| Error::Internal(format!("pollard rho found no factor of {n}")))?;
    split_large(d, out)?;
    split_large(n / d, out)
}

/// Finds a nontrivial factor of an odd composite `n`, trying increasing
/// polynomial constants `x^2 + c` from a fixed seed.
fn pollard_brent(n: u64) -> Option<u64> {
    if n.is_multiple_of(2) {
        return Some(2);
    }
    const BATCH: u64 = 128;
    for c in 1..64u64 {
        let f = |x: u64| add_mod(mul_mod_unchecked(x, x, n), c, n);
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys) = (y, y);
        let mut g = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod_unchecked(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
            if r > 1 << 26 {
                break;
            }
        }
        if g == n {
            // Batch overshot; replay one step at a time.
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g > 1 && g < n {
            return Some(g);
        }
    }
    None
}

/// Primes in `[lo, hi]` by a segmented sieve of Eratosthenes.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let root = isqrt(hi);
    let base = small_primes(root);

    let mut out = Vec::new();
    const SEGMENT: u64 = 1 << 18;
    let mut seg_lo = lo;
    loop {
        let seg_hi = seg_lo.saturating_add(SEGMENT - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        let mut composite = vec![false; len];
        for &p in &base {
            let p2 = p * p;
            if p2 > seg_hi {
                break;
            }
            let start = if p2 >= seg_lo {
                p2
            } else {
                seg_lo.div_ceil(p) * p
            };
            let mut j = start;
            while j <= seg_hi {
                composite[(j - seg_lo) as usize] = true;
                j = match j.checked_add(p) {
                    Some(next) => next,
                    None => break,
                };
            }
        }
        out.extend(
            composite
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| seg_lo + i as u64),
        );
        if seg_hi == hi {
            break;
        }
        seg_lo = seg_hi + 1;
    }
    out
}

fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}
