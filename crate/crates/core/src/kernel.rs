//! Modular arithmetic kernels for the power-sum inner loops.
//!
//! Three rings share one interface:
//!
//! * [`Barrett64`] for any modulus below 2^64, with double-width intermediates
//!   and Barrett reduction (a single widening multiply when the modulus is
//!   below 2^32).
//! * [`Mont128`] for odd moduli below 2^127, in Montgomery form.
//! * [`BigRing`] for everything else.
//!
//! [`power_sums`] evaluates `Σ_{i=1}^{n-1} i^e` for a run of consecutive
//! exponents in one pass, computing `i^e` only for prime `i` and filling in
//! composites from the smallest-prime-factor table.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::numtheory::FactorTable;

pub trait ModRing: Sync {
    type Elem: Clone + Send + Sync + PartialEq + std::fmt::Debug;

    fn modulus(&self) -> BigUint;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, x: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn to_biguint(&self, a: &Self::Elem) -> BigUint;

    fn pow(&self, base: &Self::Elem, mut exp: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut b = base.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            exp >>= 1;
            if exp > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
}

/// Modulus in `[2, 2^64)`.
#[derive(Debug, Clone, Copy)]
pub struct Barrett64 {
    m: u64,
    /// `floor(2^64 / m)` when `m < 2^32`, else `floor((2^128 - 1) / m)`.
    mu: u128,
    small: bool,
}

impl Barrett64 {
    pub fn new(m: u64) -> Self {
        assert!(m >= 2, "modulus must be at least 2");
        let small = m < (1 << 32);
        let mu = if small {
            (1u128 << 64) / m as u128
        } else {
            u128::MAX / m as u128
        };
        Self { m, mu, small }
    }

    pub fn modulus_u64(&self) -> u64 {
        self.m
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        if x < self.m {
            x
        } else {
            x % self.m
        }
    }

    #[inline]
    fn reduce_wide(&self, x: u128) -> u64 {
        if self.small {
            // x < m^2 < 2^64
            let x = x as u64;
            let q = ((x as u128 * self.mu) >> 64) as u64;
            let mut r = x - q * self.m;
            while r >= self.m {
                r -= self.m;
            }
            r
        } else {
            let q = mul_hi_128(x, self.mu);
            let mut r = x - q * self.m as u128;
            while r >= self.m as u128 {
                r -= self.m as u128;
            }
            r as u64
        }
    }
}

/// High 128 bits of the 256-bit product `a * b`.
#[inline]
fn mul_hi_128(a: u128, b: u128) -> u128 {
    mul_wide(a, b).0
}

/// Full 256-bit product as `(hi, lo)`.
#[inline]
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a1, a0) = ((a >> 64) as u64 as u128, a as u64 as u128);
    let (b1, b0) = ((b >> 64) as u64 as u128, b as u64 as u128);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 as u64 as u128) + (p10 as u64 as u128);
    let lo = (p00 as u64 as u128) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

impl ModRing for Barrett64 {
    type Elem = u64;

    fn modulus(&self) -> BigUint {
        BigUint::from(self.m)
    }
    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn from_u64(&self, x: u64) -> u64 {
        self.reduce(x)
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let (s, overflow) = a.overflowing_add(*b);
        if overflow || s >= self.m {
            s.wrapping_sub(self.m)
        } else {
            s
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        self.reduce_wide(*a as u128 * *b as u128)
    }
    fn to_biguint(&self, a: &u64) -> BigUint {
        BigUint::from(*a)
    }
}

/// Odd modulus in `[3, 2^127)`; elements are kept in Montgomery form.
#[derive(Debug, Clone, Copy)]
pub struct Mont128 {
    m: u128,
    /// `-m^{-1} mod 2^128`
    neg_inv: u128,
    /// `2^256 mod m`
    r2: u128,
}

impl Mont128 {
    pub fn new(m: u128) -> Self {
        assert!(m & 1 == 1 && m > 1 && m < (1u128 << 127), "need odd m < 2^127");
        let mut inv = m; // correct to 3 bits
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u128.wrapping_sub(m.wrapping_mul(inv)));
        }
        debug_assert_eq!(m.wrapping_mul(inv), 1);
        let r2 = (BigUint::one() << 256u32) % BigUint::from(m);
        Self {
            m,
            neg_inv: inv.wrapping_neg(),
            r2: r2.to_u128().expect("reduced below m"),
        }
    }

    #[inline]
    fn redc(&self, hi: u128, lo: u128) -> u128 {
        let u = lo.wrapping_mul(self.neg_inv);
        let (uh, ul) = mul_wide(u, self.m);
        let carry = lo.overflowing_add(ul).1 as u128;
        let mut t = hi + uh + carry;
        if t >= self.m {
            t -= self.m;
        }
        t
    }
}

impl ModRing for Mont128 {
    type Elem = u128;

    fn modulus(&self) -> BigUint {
        BigUint::from(self.m)
    }
    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        self.from_u64(1)
    }
    #[inline]
    fn from_u64(&self, x: u64) -> u128 {
        let x = x as u128 % self.m;
        let (hi, lo) = mul_wide(x, self.r2);
        self.redc(hi, lo)
    }
    #[inline]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }
    #[inline]
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        let (hi, lo) = mul_wide(*a, *b);
        self.redc(hi, lo)
    }
    fn to_biguint(&self, a: &u128) -> BigUint {
        BigUint::from(self.redc(0, *a))
    }
}

/// Arbitrary modulus `>= 2`.
#[derive(Debug, Clone)]
pub struct BigRing {
    m: BigUint,
}

impl BigRing {
    pub fn new(m: BigUint) -> Self {
        assert!(m >= BigUint::from(2u8), "modulus must be at least 2");
        Self { m }
    }
}

impl ModRing for BigRing {
    type Elem = BigUint;

    fn modulus(&self) -> BigUint {
        self.m.clone()
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn one(&self) -> BigUint {
        BigUint::one() % &self.m
    }
    fn from_u64(&self, x: u64) -> BigUint {
        BigUint::from(x) % &self.m
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.m {
            s - &self.m
        } else {
            s
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.m
    }
    fn to_biguint(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn pow(&self, base: &BigUint, exp: u64) -> BigUint {
        base.modpow(&BigUint::from(exp), &self.m)
    }
}

/// Largest `n` for which [`power_sums_mod`] builds a factor table instead of
/// exponentiating every term.
pub const TABLE_LIMIT: u64 = 1 << 24;

/// `[S_top(n), S_{top-1}(n), ..., S_{top-count+1}(n)]` in `ring`, where
/// `S_e(n) = Σ_{i=1}^{n-1} i^e`.
///
/// `table` must cover `n - 1`. Requires `1 <= count <= top + 1`.
pub fn power_sums<R: ModRing>(
    ring: &R,
    table: &FactorTable,
    n: u64,
    top: u64,
    count: usize,
) -> Vec<R::Elem> {
    assert!(count >= 1 && count as u64 <= top + 1, "bad exponent run");
    let mut acc = vec![ring.zero(); count];
    if n <= 2 {
        if n == 2 {
            // only i = 1
            acc.iter_mut().for_each(|a| *a = ring.one());
        }
        return acc;
    }
    assert!(table.bound() >= n - 1, "factor table too short");
    let base = top + 1 - count as u64;
    let last = count - 1;
    let mut vals: Vec<R::Elem> = Vec::with_capacity(n as usize);
    vals.push(ring.zero());
    vals.push(ring.one());
    for a in acc.iter_mut() {
        *a = ring.one();
    }
    for i in 2..n {
        let p = table.smallest_factor(i);
        let v = if p == i {
            ring.pow(&ring.from_u64(i), base)
        } else {
            ring.mul(&vals[p as usize], &vals[(i / p) as usize])
        };
        acc[last] = ring.add(&acc[last], &v);
        if last > 0 {
            let x = ring.from_u64(i);
            let mut t = v.clone();
            for j in (0..last).rev() {
                t = ring.mul(&t, &x);
                acc[j] = ring.add(&acc[j], &t);
            }
        }
        vals.push(v);
    }
    acc
}

/// Same as [`power_sums`] without a factor table: every term is
/// exponentiated directly. Used for very large `n`.
pub fn power_sums_streaming<R: ModRing>(ring: &R, n: u64, top: u64, count: usize) -> Vec<R::Elem> {
    assert!(count >= 1 && count as u64 <= top + 1, "bad exponent run");
    let base = top + 1 - count as u64;
    let mut acc = vec![ring.zero(); count];
    for i in 1..n {
        let x = ring.from_u64(i);
        let mut t = ring.pow(&x, base);
        acc[count - 1] = ring.add(&acc[count - 1], &t);
        for j in (0..count - 1).rev() {
            t = ring.mul(&t, &x);
            acc[j] = ring.add(&acc[j], &t);
        }
    }
    acc
}

/// Picks the fastest ring for `modulus` and returns the sums as integers.
/// Builds its own factor table when `table` is absent or too short.
pub fn power_sums_mod(
    table: Option<&FactorTable>,
    n: u64,
    top: u64,
    count: usize,
    modulus: &BigUint,
) -> Vec<BigUint> {
    fn run<R: ModRing>(ring: &R, table: Option<&FactorTable>, n: u64, top: u64, count: usize) -> Vec<BigUint> {
        let sums = match table {
            Some(t) if t.bound() + 1 >= n => power_sums(ring, t, n, top, count),
            _ if n <= TABLE_LIMIT => {
                let t = FactorTable::new(n.saturating_sub(1).max(1));
                power_sums(ring, &t, n, top, count)
            }
            _ => power_sums_streaming(ring, n, top, count),
        };
        sums.iter().map(|s| ring.to_biguint(s)).collect()
    }

    if let Some(m) = modulus.to_u64() {
        run(&Barrett64::new(m), table, n, top, count)
    } else if modulus.bit(0) && modulus.bits() < 127 {
        run(&Mont128::new(modulus.to_u128().unwrap()), table, n, top, count)
    } else {
        run(&BigRing::new(modulus.clone()), table, n, top, count)
    }
}
