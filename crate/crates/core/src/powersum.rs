//! Power sums `S_k(n) = 1^k + 2^k + ... + (n-1)^k` by three independent
//! routes (exact, Faulhaber, modular), Pascal's identity, and harmonic
//! power sums `R_s(p) = Σ_{i=1}^{p-1} i^{-s}`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, mod_inv, Int, Rational, Residue};
use crate::bernoulli::BernoulliTable;
use crate::error::{domain, Result};
use crate::kernel::{power_sums_streaming, BigRing, Barrett64, ModRing, Mont128};
use crate::numtheory::is_prime;

/// One `S_k(n)` request, optionally reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSumQuery {
    pub k: u64,
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
}

impl PowerSumQuery {
    pub fn evaluate(&self) -> Result<Int> {
        match self.modulus {
            None => Ok(powersum_direct(self.k, self.n)),
            Some(m) => Ok(powersum_mod(self.k, self.n, &Int::from(m))?.value().clone()),
        }
    }
}

/// Exact `S_k(n)`.
pub fn powersum_direct(k: u64, n: u64) -> Int {
    let k = u32::try_from(k).expect("exponent too large for an exact sum");
    (1..n).map(|i| num_traits::pow(BigInt::from(i), k as usize)).sum()
}

/// `S_k(n) = (1/(k+1)) Σ_{i=0}^{k} C(k+1, i) n^{k+1-i} B_i`, with the final
/// division checked for exactness.
pub fn powersum_faulhaber(k: u64, n: u64, table: &BernoulliTable) -> Result<Int> {
    if k == 0 {
        return Err(domain("Faulhaber's formula is stated for k >= 1"));
    }
    if table.max_index() < k {
        return Err(domain(format!(
            "Bernoulli table reaches B_{}, Faulhaber at k = {k} needs B_{k}",
            table.max_index()
        )));
    }
    let nn = Int::from(n);
    let mut acc = Rational::zero();
    let mut npow = nn.clone();
    for i in (0..=k).rev() {
        let b = table.value(i)?;
        if !b.is_zero() {
            acc += Rational::from_integer(binomial(k + 1, i) * &npow) * b;
        }
        npow *= &nn;
    }
    let total = acc / Rational::from_integer(Int::from(k + 1));
    assert!(
        total.is_integer(),
        "Faulhaber sum for k={k}, n={n} is not an integer: {total}"
    );
    Ok(total.to_integer())
}

/// `S_k(n) mod modulus`, one modular exponentiation per term. This is the
/// reference the faster table-driven kernels are tested against.
pub fn powersum_mod(k: u64, n: u64, modulus: &Int) -> Result<Residue> {
    let m = Residue::new(0, modulus.clone())?.modulus().magnitude().clone();
    let value = powersum_mod_uint(k, n, &m);
    Residue::new(BigInt::from(value), modulus.clone())
}

pub(crate) fn powersum_mod_uint(k: u64, n: u64, m: &BigUint) -> BigUint {
    fn one<R: ModRing>(ring: &R, k: u64, n: u64) -> BigUint {
        ring.to_biguint(&power_sums_streaming(ring, n, k, 1)[0])
    }
    if let Some(small) = m.to_u64() {
        one(&Barrett64::new(small), k, n)
    } else if m.bit(0) && m.bits() < 127 {
        one(&Mont128::new(m.to_u128().unwrap()), k, n)
    } else {
        one(&BigRing::new(m.clone()), k, n)
    }
}

/// `Σ_{i=0}^{k-1} C(k, i) S_i(n+1) = (n+1)^k - 1`, evaluated exactly.
pub fn pascal_identity_check(k: u64, n: u64) -> bool {
    let lhs: Int = (0..k)
        .map(|i| binomial(k, i) * powersum_direct(i, n + 1))
        .sum();
    lhs == num_traits::pow(Int::from(n + 1), k as usize) - 1
}

fn check_harmonic_args(s: u64, p: u64, e: u32) -> Result<()> {
    if s == 0 {
        return Err(domain("harmonic power sums need s >= 1"));
    }
    if !is_prime(p) {
        return Err(domain(format!("{p} is not prime")));
    }
    if !(1..=4).contains(&e) {
        return Err(domain(format!("exponent e = {e} outside 1..=4")));
    }
    Ok(())
}

/// `R_s(p) mod p^e` from the per-term inverses.
pub fn harmonic_power_mod(s: u64, p: u64, e: u32) -> Result<Residue> {
    check_harmonic_args(s, p, e)?;
    let m = Int::from(p).pow(e);
    let v = harmonic_run(p, e, s, 1)?.pop().unwrap();
    Residue::new(v, m)
}

/// `[R_s(p), R_{s+1}(p), ..., R_{s+count-1}(p)] mod p^e` in one pass.
pub fn harmonic_run(p: u64, e: u32, s: u64, count: usize) -> Result<Vec<Int>> {
    check_harmonic_args(s, p, e)?;
    let m = Int::from(p).pow(e);
    if let Some(m64) = m.to_u64() {
        let ring = Barrett64::new(m64);
        let mut acc = vec![0u64; count];
        for i in 1..p {
            let inv = ring.from_u64(inverse_u64(i, m64));
            let mut t = ring.pow(&inv, s);
            for a in acc.iter_mut() {
                *a = ring.add(a, &t);
                t = ring.mul(&t, &inv);
            }
        }
        return Ok(acc.into_iter().map(Int::from).collect());
    }
    let mut acc = vec![Int::zero(); count];
    for i in 1..p {
        let inv = mod_inv(&Int::from(i), &m)?;
        let mut t = crate::arith::mod_pow(inv.value(), &Int::from(s), &m)?.value().clone();
        for a in acc.iter_mut() {
            *a = (&*a + &t) % &m;
            t = t * inv.value() % &m;
        }
    }
    Ok(acc)
}

/// Inverse of a unit `a` modulo `m`.
fn inverse_u64(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "{a} is not a unit mod {m}");
    t0.rem_euclid(m as i128) as u64
}

/// `R_s(p) mod p^e` as `S_{φ(p^e) - s}(p)`, by Euler's theorem. Requires
/// `s < φ(p^e)`.
pub fn harmonic_power_mod_euler(s: u64, p: u64, e: u32) -> Result<Residue> {
    check_harmonic_args(s, p, e)?;
    let phi = (p - 1) * p.pow(e - 1);
    if s >= phi {
        return Err(domain(format!("s = {s} is not below φ({p}^{e}) = {phi}")));
    }
    powersum_mod(phi - s, p, &Int::from(p).pow(e))
}

/// `S_{2k}(n+1)/n - B_{2k}` exactly.
pub fn chowla_difference(k2: u64, n: u64, table: &BernoulliTable) -> Result<Rational> {
    if n == 0 {
        return Err(domain("chowla_difference needs n >= 1"));
    }
    Ok(Rational::new(powersum_direct(k2, n + 1), Int::from(n)) - table.value(k2)?)
}

/// The Chowla difference has no prime of `n` in its denominator. This is
/// the form the mod-`n` consequences rely on; the difference is not an
/// integer in general (`2k = 2, n = 1` gives `5/6`).
pub fn chowla_integral_at_n(k2: u64, n: u64, table: &BernoulliTable) -> Result<bool> {
    let d = chowla_difference(k2, n, table)?;
    Ok(num_integer::Integer::gcd(d.denom(), &Int::from(n)) == Int::from(1))
}
