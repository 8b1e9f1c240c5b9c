//! Primality, factorization, and the integer classifications used by the
//! Giuga and Agoh scans: Carmichael numbers (Korselt), Giuga numbers, and
//! the per-prime-divisor form of the Giuga congruence.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{domain, Result};

/// Smallest-prime-factor table for `0..=bound`, built with a linear sieve.
/// Shared read-only between scan workers.
#[derive(Debug, Clone)]
pub struct FactorTable {
    spf: Vec<u32>,
}

impl FactorTable {
    pub fn new(bound: u64) -> Self {
        assert!(bound < u32::MAX as u64, "factor table bound too large");
        let len = bound as usize + 1;
        let mut spf = vec![0u32; len.max(2)];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let j = i * p as usize;
                if p > si || j >= len {
                    break;
                }
                spf[j] = p;
            }
        }
        spf.truncate(len);
        Self { spf }
    }

    pub fn bound(&self) -> u64 {
        self.spf.len() as u64 - 1
    }

    /// Smallest prime factor of `n >= 2`.
    #[inline]
    pub fn smallest_factor(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.smallest_factor(n) == n
    }

    pub fn factorize(&self, mut n: u64) -> Factorization {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.smallest_factor(n);
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Factorization(out)
    }
}

/// Prime factorization as `(prime, exponent)` pairs with strictly
/// increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> BigUint {
        self.0
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    /// A prime has a single factor with exponent one.
    pub fn is_prime(&self) -> bool {
        matches!(self.0.as_slice(), [(_, 1)])
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// The first twelve primes are a deterministic witness set for every n < 2^64.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality for unbounded input: Miller-Rabin below 2^64, trial division
/// above.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_even() {
        return false;
    }
    let root = n.sqrt();
    let mut d = BigUint::from(3u32);
    while d <= root {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2u32;
    }
    true
}

/// All primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let len = bound as usize + 1;
    let mut composite = vec![false; len];
    let mut out = Vec::new();
    for i in 2..len {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j < len {
            composite[j] = true;
            j += i;
        }
    }
    out
}

const TRIAL_BOUND: u64 = 1_000_000;

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_BOUND))
}

/// Complete factorization of `n >= 2`: trial division by the primes up to
/// 10^6, then Brent's variant of Pollard rho on whatever remains.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return Err(domain(format!("cannot factorize {n}")));
    }
    let mut rest = n;
    let mut found: Vec<u64> = Vec::new();
    for &p in trial_primes() {
        if p * p > rest {
            break;
        }
        while rest % p == 0 {
            found.push(p);
            rest /= p;
        }
    }
    if rest > 1 {
        split_into(rest, &mut found);
    }
    found.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in found {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(Factorization(out))
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_factor(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// A nontrivial factor of the odd composite `n` (Brent cycle detection).
fn rho_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let f = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    for c in 1.. {
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// `S_{n-1}(n) ≡ -1 (mod n)` decided by the per-prime-divisor criterion:
/// every prime `p | n` has `(p-1) | (n/p - 1)` and `p | (n/p - 1)`.
pub fn giuga_congruence_by_criterion(n: u64) -> Result<bool> {
    Ok(giuga_criterion_with(n, &factorize(n)?))
}

pub fn giuga_criterion_with(n: u64, f: &Factorization) -> bool {
    f.primes().all(|p| {
        let c = n / p - 1;
        c % (p - 1) == 0 && c % p == 0
    })
}

/// Composite `n` with `p | (n/p - 1)` for every prime `p | n`.
pub fn is_giuga_number(n: u64) -> Result<bool> {
    Ok(giuga_number_with(n, &factorize(n)?))
}

pub fn giuga_number_with(n: u64, f: &Factorization) -> bool {
    !f.is_prime() && f.primes().all(|p| (n / p - 1) % p == 0)
}

/// Korselt: composite, squarefree, and `(p-1) | (n-1)` for every `p | n`.
pub fn is_carmichael(n: u64) -> Result<bool> {
    Ok(carmichael_with(n, &factorize(n)?))
}

pub fn carmichael_with(n: u64, f: &Factorization) -> bool {
    !f.is_prime() && f.is_squarefree() && f.primes().all(|p| (n - 1) % (p - 1) == 0)
}

/// Euler's totient from the factorization.
pub fn euler_phi(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(domain("euler_phi(0) is undefined"));
    }
    if n == 1 {
        return Ok(1);
    }
    Ok(factorize(n)?
        .factors()
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1)))
}

/// Totients of `0..=bound` by sieve, for batch scans. Entry 0 is 0.
pub fn totient_sieve(bound: u64) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=bound).collect();
    for i in 2..=bound as usize {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= bound as usize {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}

/// Everything `classify` reports about one integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumberProfile {
    pub n: u64,
    pub factorization: Factorization,
    pub is_prime: bool,
    pub is_squarefree: bool,
    pub is_carmichael: bool,
    pub is_giuga_number: bool,
    pub giuga_congruence_holds: bool,
}

pub fn classify(n: u64) -> Result<NumberProfile> {
    let f = factorize(n)?;
    Ok(NumberProfile {
        n,
        is_prime: f.is_prime(),
        is_squarefree: f.is_squarefree(),
        is_carmichael: carmichael_with(n, &f),
        is_giuga_number: giuga_number_with(n, &f),
        giuga_congruence_holds: giuga_criterion_with(n, &f),
        factorization: f,
    })
}
