//! Bernoulli numbers, exact and modular.
//!
//! Exact values come from the recurrence `Σ_{i=0}^{m} C(m+1, i) B_i = 0`
//! carried out over integers scaled by a common denominator. Modular values
//! avoid rationals altogether: `B_m mod p` through `S_m(p) / p`, and
//! `n B_m mod n^e` through a power sum at `n^{e+1}` (see
//! [`scaled_bernoulli_mod`]).

use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{binomial, mod_inv, Int, Rational, Residue};
use crate::error::{domain, Error, Result};
use crate::kernel::power_sums_mod;
use crate::numtheory::{is_prime, primes_up_to, FactorTable};

/// Largest index the shared exact table is allowed to reach unless a caller
/// asks for more.
pub const DEFAULT_CAP: u64 = 2000;

/// Exact `B_0..=B_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    pub fn new(max_index: u64) -> Self {
        Self {
            values: compute(max_index as usize),
        }
    }

    pub fn max_index(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn get(&self, index: u64) -> Option<&Rational> {
        self.values.get(index as usize)
    }

    /// Like [`get`](Self::get), but a missing index is a domain error.
    pub fn value(&self, index: u64) -> Result<&Rational> {
        self.get(index).ok_or_else(|| {
            domain(format!(
                "Bernoulli table reaches B_{}, B_{index} requested",
                self.max_index()
            ))
        })
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

pub fn bernoulli_table(max_index: u64) -> BernoulliTable {
    BernoulliTable::new(max_index)
}

fn compute(max: usize) -> Vec<Rational> {
    // Every denominator up to B_max divides the product of primes <= max + 1.
    let scale: BigInt = primes_up_to(max as u64 + 1)
        .into_iter()
        .fold(BigInt::from(2), |acc, p| if p == 2 { acc } else { acc * p });
    let mut scaled: Vec<BigInt> = Vec::with_capacity(max + 1);
    scaled.push(scale.clone());
    if max >= 1 {
        scaled.push(-(&scale / 2u32));
    }
    for m in 2..=max {
        if m % 2 == 1 {
            scaled.push(BigInt::zero());
            continue;
        }
        // Σ_{i<m} C(m+1, i) N_i, skipping the vanishing odd terms.
        let mut acc = BigInt::zero();
        let mut c = BigInt::one(); // C(m+1, i)
        for i in 0..m {
            if i == 1 || i % 2 == 0 {
                acc += &c * &scaled[i];
            }
            c = c * (m + 1 - i) / (i + 1);
        }
        let (q, r) = acc.div_rem(&BigInt::from(m + 1));
        assert!(r.is_zero(), "Bernoulli recurrence lost exactness at B_{m}");
        scaled.push(-q);
    }
    scaled
        .into_iter()
        .map(|num| Rational::new(num, scale.clone()))
        .collect()
}

static SHARED: RwLock<Option<Arc<BernoulliTable>>> = RwLock::new(None);

/// A table reaching at least `max_index`, built once and extended under a
/// single writer. Readers get an `Arc` they can hold without the lock.
pub fn shared_table(max_index: u64) -> Arc<BernoulliTable> {
    if let Some(t) = SHARED.read().unwrap().as_ref() {
        if t.max_index() >= max_index {
            return Arc::clone(t);
        }
    }
    let mut slot = SHARED.write().unwrap();
    if let Some(t) = slot.as_ref() {
        if t.max_index() >= max_index {
            return Arc::clone(t);
        }
    }
    let t = Arc::new(BernoulliTable::new(max_index));
    *slot = Some(Arc::clone(&t));
    t
}

/// `B_2k = A_2k - Σ_{(p-1) | 2k} 1/p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VscDecomposition {
    pub index: u64,
    #[serde(serialize_with = "crate::arith::serialize_decimal")]
    pub integer_part: Int,
    pub primes: Vec<u64>,
}

impl VscDecomposition {
    /// The denominator of `B_index`.
    pub fn denominator(&self) -> Int {
        self.primes.iter().map(|&p| Int::from(p)).product()
    }

    pub fn value(&self) -> Rational {
        self.primes.iter().fold(
            Rational::from_integer(self.integer_part.clone()),
            |acc, &p| acc - Rational::new(Int::one(), Int::from(p)),
        )
    }
}

/// Primes `p` with `(p - 1) | index`, ascending. `index` must be positive.
pub fn vsc_primes(index: u64) -> Vec<u64> {
    debug_assert!(index > 0);
    let mut out: Vec<u64> = Vec::new();
    let mut d = 1u64;
    while d * d <= index {
        if index % d == 0 {
            for e in [d, index / d] {
                if is_prime(e + 1) && !out.contains(&(e + 1)) {
                    out.push(e + 1);
                }
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

pub fn vsc_decompose(index: u64) -> Result<VscDecomposition> {
    if index < 2 || index % 2 == 1 {
        return Err(domain(format!(
            "von Staudt-Clausen needs an even index >= 2, got {index}"
        )));
    }
    let primes = vsc_primes(index);
    let b = shared_table(index).value(index)?.clone();
    let sum = primes
        .iter()
        .fold(b, |acc, &p| acc + Rational::new(Int::one(), Int::from(p)));
    if !sum.is_integer() {
        return Err(domain(format!("B_{index} + Σ 1/p = {sum} is not an integer")));
    }
    Ok(VscDecomposition {
        index,
        integer_part: sum.to_integer(),
        primes,
    })
}

/// Denominator of `B_k` in lowest terms.
pub fn bernoulli_denominator(k: u64) -> Int {
    match k {
        0 => Int::one(),
        1 => Int::from(2),
        _ if k % 2 == 1 => Int::one(),
        _ => vsc_primes(k).into_iter().map(Int::from).product(),
    }
}

/// `n B_{n-1} mod n`, from the von Staudt-Clausen decomposition:
/// `-Σ n/p` over primes `p | n` with `(p - 1) | (n - 1)`.
pub fn agoh_residue(n: u64) -> Result<Residue> {
    if n < 2 {
        return Err(domain(format!("agoh_residue needs n >= 2, got {n}")));
    }
    if n == 2 {
        // 2 B_1 = -1
        return Residue::new(-1, 2);
    }
    if n % 2 == 0 {
        return Residue::new(0, n);
    }
    Residue::new(-vsc_sum(n - 1, n), n)
}

/// `Σ n/p` over primes `p | n` with `(p - 1) | index`, so that
/// `n B_index ≡ -vsc_sum(index, n) (mod n)` for even positive `index`.
pub fn vsc_sum(index: u64, n: u64) -> Int {
    vsc_primes(index)
        .into_iter()
        .filter(|p| n % p == 0)
        .map(|p| Int::from(n / p))
        .sum()
}

/// `B_m mod p` as `S_m(p) / p mod p`. Needs `(p - 1) ∤ m`, which is what
/// makes `B_m` p-integral.
pub fn bernoulli_mod_prime(m: u64, p: u64) -> Result<Residue> {
    if !is_prime(p) {
        return Err(domain(format!("{p} is not prime")));
    }
    if p < 5 {
        return Err(domain(format!("bernoulli_mod_prime needs p >= 5, got {p}")));
    }
    if m % (p - 1) == 0 {
        return Err(Error::UndefinedResidue { index: m, prime: p });
    }
    if m == 1 {
        return rational_b1(p);
    }
    if m % 2 == 1 {
        return Residue::new(0, p);
    }
    let p2 = BigUint::from(p) * p;
    let s = power_sums_mod(None, p, m, 1, &p2).pop().unwrap();
    let (q, r) = s.div_rem(&BigUint::from(p));
    assert!(r.is_zero(), "S_{m}({p}) not divisible by {p}");
    Residue::new(BigInt::from(q), p)
}

fn rational_b1(modulus: impl Into<Int>) -> Result<Residue> {
    let m = modulus.into();
    let half = mod_inv(&Int::from(2), &m)?;
    Residue::new(-half.value(), m)
}

/// `p` divides the numerator of `B_{p-3}`.
pub fn is_wolstenholme_prime(p: u64) -> Result<bool> {
    if !is_prime(p) || p < 5 {
        return Err(domain(format!("{p} is not a prime >= 5")));
    }
    Ok(bernoulli_mod_prime(p - 3, p)?.is_zero())
}

/// `n B_m mod n^e` for `n >= 2`, `e >= 1`.
///
/// Faulhaber at `N = n^{e+1}` gives `S_m(N) = N B_m + Σ_{j>=1} C(m,j)
/// B_{m-j} N^{j+1} / (j+1)`, and every tail term is divisible by
/// `n^{2e}` locally at each prime of `n`. So `n B_m ≡ S_m(N) / n^e
/// (mod n^e)`. `S_m(N) mod n^{2e}` is assembled from `i = r + n q`:
///
/// `S_m(N) = Σ_j C(m,j) n^j T_j(n^e) Σ_{r<n} r^{m-j}` with
/// `T_j(x) = Σ_{q<x} q^j` (and `0^0 = 1`), where only `j < 2e` survive.
/// The inner sums are one kernel pass over `r < n`; `T_j` is evaluated
/// exactly with small Bernoulli numbers.
pub fn scaled_bernoulli_mod(m: u64, n: u64, e: u32, table: Option<&FactorTable>) -> Result<BigUint> {
    if n < 2 || e == 0 {
        return Err(domain(format!("scaled_bernoulli_mod needs n >= 2, e >= 1 (n={n}, e={e})")));
    }
    let ne = BigUint::from(n).pow(e);
    match m {
        0 => return Ok(BigUint::from(n) % &ne),
        1 => {
            // n B_1 = -n/2
            let v = if n % 2 == 0 {
                -Int::from(n / 2)
            } else {
                -Int::from(n) * mod_inv(&Int::from(2), &Int::from(ne.clone()))?.value()
            };
            return Ok(v.mod_floor(&Int::from(ne.clone())).to_biguint().unwrap());
        }
        _ if m % 2 == 1 => return Ok(BigUint::zero()),
        _ => {}
    }
    let terms = (2 * e as u64).min(m + 1);
    let n2e = &ne * &ne;
    let inner = power_sums_mod(table, n, m, terms as usize, &n2e);
    let small = shared_table(terms);
    let big_m = Int::from(n2e.clone());
    let mut s = Int::zero();
    let mut npow = Int::one();
    for j in 0..terms {
        let c = binomial(m, j);
        if c.is_zero() {
            break;
        }
        let mut r = Int::from(inner[j as usize].clone());
        if m == j {
            r += 1; // the r = 0 term of Σ r^0
        }
        let t = full_power_sum(j, &Int::from(ne.clone()), &small);
        s = (s + c * &npow * (t % &big_m) % &big_m * r) % &big_m;
        npow *= n;
    }
    let s = s.mod_floor(&big_m).to_biguint().unwrap();
    let (q, rem) = s.div_rem(&ne);
    assert!(rem.is_zero(), "n^e does not divide S_m(n^(e+1)) for m={m}, n={n}, e={e}");
    Ok(q % ne)
}

/// `Σ_{q=0}^{x-1} q^j` with `0^0 = 1`, exactly, by Faulhaber.
fn full_power_sum(j: u64, x: &Int, table: &BernoulliTable) -> Int {
    if j == 0 {
        return x.clone();
    }
    let mut acc = Rational::zero();
    let mut xp = x.clone();
    for i in (0..=j).rev() {
        // term C(j+1, i) B_i x^{j+1-i}
        let b = table.get(i).expect("small Bernoulli table");
        acc += Rational::from_integer(binomial(j + 1, i) * &xp) * b;
        xp *= x;
    }
    let acc = acc / Rational::from_integer(Int::from(j + 1));
    assert!(acc.is_integer());
    acc.to_integer()
}

/// `B_m mod n^e` via the exact table when `m <= cap`, else via
/// [`scaled_bernoulli_mod`] at one extra power of `n`. The second route
/// needs the reduced denominator of `B_m` coprime to `n`.
pub fn bernoulli_times_n_mod(m: u64, n: u64, e: u32, cap: u64) -> Result<Residue> {
    let modulus = Int::from(n).pow(e);
    if m <= cap {
        let b = shared_table(m).value(m)?.clone() * Rational::from_integer(Int::from(n));
        if b.denom().gcd(&Int::from(n)).is_one() {
            return crate::arith::rational_residue(&b, &modulus);
        }
        return Err(domain(format!("{n} B_{m} is not {n}-integral")));
    }
    let v = scaled_bernoulli_mod(m, n, e, None)?;
    Residue::new(BigInt::from(v), modulus)
}

/// Sign of `B_i` as -1, 0, or 1.
pub fn sign(b: &Rational) -> i32 {
    if b.is_zero() {
        0
    } else if b.is_positive() {
        1
    } else {
        -1
    }
}
