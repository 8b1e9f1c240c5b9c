//! The per-`n` tests behind each scan.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{mod_inv, Int};
use crate::bernoulli::{agoh_residue, bernoulli_mod_prime, scaled_bernoulli_mod};
use crate::congruences::{weighted_binomial_sum, CheckerId};
use crate::error::{Error, Result};
use crate::kernel::power_sums_mod;
use crate::numtheory::{factorize, giuga_criterion_with, is_prime, FactorTable, Factorization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredicateId {
    GiugaComposite,
    GiugaN3,
    AgohComposite,
    Conj29a,
    Conj29b,
    Wolstenholme,
    Conj211,
    Conj213,
    Conj214,
    HalfN2,
    Conj217,
    GlmHalf,
}

use PredicateId::*;

const CATALOG: &[(PredicateId, &str, &str)] = &[
    (GiugaComposite, "giuga-composite", "composite n with S_{n-1}(n) ≡ -1 (mod n), by the prime-divisor criterion"),
    (GiugaN3, "giuga-n3", "composite n with 2S_n(n) ≡ -n^2 (mod n^3)"),
    (AgohComposite, "agoh-composite", "composite n with nB_{n-1} ≡ -1 (mod n)"),
    (Conj29a, "conj2.9a", "n with S_n(n) ≡ (n^3/2)B_{n-1} (mod n^5)"),
    (Conj29b, "conj2.9b", "n with S_{n-1}(n) ≡ nB_{n-1} (mod n^4)"),
    (Wolstenholme, "wolstenholme", "n with S_{n-2}(n) ≡ 0 (mod n^3)"),
    (Conj211, "conj2.11", "n with S_{n-2}(n) ≡ 0 (mod n^4)"),
    (Conj213, "conj2.13", "n ≡ 3 (mod 4) with S_{(n-1)/2}(n) ≡ 0 (mod n^3), or prime n with B_{(n-3)/2} ≡ 0 (mod n)"),
    (Conj214, "conj2.14", "n ≡ 1 (mod 4), n >= 5, with S_{(n-1)/2}(n) ≡ 0 (mod n^3)"),
    (HalfN2, "half-n2", "composite n ≡ 1 (mod 4) with S_{(n-1)/2}(n) ≡ 0 (mod n^2)"),
    (Conj217, "conj2.17", "even n where Σ(1+n(k+1-i))C(2k+2,2i)S_{2i}(n) ≢ -1 (mod n^3) for some k <= kmax"),
    (GlmHalf, "glm-half", "odd prime n or n ≡ 3 (mod 4) where S_{(n-1)/2}(n) ≢ 0 (mod n)"),
];

impl PredicateId {
    fn entry(self) -> &'static (PredicateId, &'static str, &'static str) {
        CATALOG.iter().find(|e| e.0 == self).expect("catalog is complete")
    }

    pub fn token(self) -> &'static str {
        self.entry().1
    }

    pub fn description(self) -> &'static str {
        self.entry().2
    }

    /// Whether a hit is a violation of something expected to hold, rather
    /// than an instance of something expected never to happen.
    pub fn hits_are_violations(self) -> bool {
        matches!(self, Conj217 | GlmHalf)
    }
}

/// Every predicate, in catalog order.
pub fn predicate_catalog() -> Vec<PredicateId> {
    CATALOG.iter().map(|e| e.0).collect()
}

impl fmt::Display for PredicateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for PredicateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CATALOG
            .iter()
            .find(|e| e.1 == s)
            .map(|e| e.0)
            .ok_or_else(|| Error::UnknownPredicate(s.to_string()))
    }
}

impl Serialize for PredicateId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for PredicateId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Hit,
    Violation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Hit => "hit",
            Verdict::Violation => "violation",
        })
    }
}

/// One `n` at which a predicate fired, with the residues that decided it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hit {
    pub n: u64,
    pub verdict: Verdict,
    #[serde(with = "crate::arith::decimal")]
    pub lhs: Int,
    #[serde(with = "crate::arith::decimal")]
    pub rhs: Int,
    #[serde(with = "crate::arith::decimal")]
    pub modulus: Int,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Shared, read-only state for one scan.
pub(crate) struct Ctx {
    table: Option<FactorTable>,
    pub kmax: u64,
}

impl Ctx {
    pub fn new(hi: u64, kmax: u64) -> Self {
        let table = (hi <= crate::kernel::TABLE_LIMIT).then(|| FactorTable::new(hi.max(2)));
        Self { table, kmax }
    }

    fn is_prime(&self, n: u64) -> bool {
        match &self.table {
            Some(t) => t.is_prime(n),
            None => is_prime(n),
        }
    }

    fn factorize(&self, n: u64) -> Result<Factorization> {
        match &self.table {
            Some(t) => Ok(t.factorize(n)),
            None => factorize(n),
        }
    }

    /// `[S_top(n), ..., S_{top-count+1}(n)] mod m`.
    fn sums(&self, n: u64, top: u64, count: usize, m: &Int) -> Vec<Int> {
        power_sums_mod(self.table.as_ref(), n, top, count, m.magnitude())
            .into_iter()
            .map(BigInt::from)
            .collect()
    }

    fn sum(&self, k: u64, n: u64, m: &Int) -> Int {
        self.sums(n, k, 1, m).pop().unwrap()
    }

    /// `nB_m mod n^e`.
    fn scaled_bernoulli(&self, m: u64, n: u64, e: u32) -> Result<Int> {
        Ok(scaled_bernoulli_mod(m, n, e, self.table.as_ref())?.into())
    }
}

fn pw(n: u64, e: u32) -> Int {
    Int::from(n).pow(e)
}

fn hit(n: u64, lhs: Int, rhs: Int, modulus: Int) -> Hit {
    let lhs = lhs.mod_floor(&modulus);
    let rhs = rhs.mod_floor(&modulus);
    Hit { n, verdict: Verdict::Hit, lhs, rhs, modulus, detail: None }
}

/// Hit when `lhs ≡ rhs (mod m)`.
fn when_equal(n: u64, lhs: Int, rhs: Int, m: Int) -> Option<Hit> {
    ((&lhs - &rhs).mod_floor(&m).is_zero()).then(|| hit(n, lhs, rhs, m))
}

/// Violation when `lhs ≢ rhs (mod m)`.
fn when_unequal(n: u64, lhs: Int, rhs: Int, m: Int) -> Option<Hit> {
    (!(&lhs - &rhs).mod_floor(&m).is_zero()).then(|| Hit { verdict: Verdict::Violation, ..hit(n, lhs, rhs, m) })
}

impl PredicateId {
    /// Whether `n` is in the predicate's domain. Cheap: parity, residue
    /// class and primality only.
    pub(crate) fn applies(self, n: u64, ctx: &Ctx) -> bool {
        if n < 2 {
            return false;
        }
        match self {
            GiugaComposite | GiugaN3 | AgohComposite => !ctx.is_prime(n),
            Conj29a | Conj29b | Wolstenholme | Conj211 => true,
            Conj213 => n % 4 == 3,
            Conj214 => n % 4 == 1 && n >= 5,
            HalfN2 => n % 4 == 1 && !ctx.is_prime(n),
            Conj217 => n % 2 == 0,
            GlmHalf => n % 2 == 1 && n >= 3 && (n % 4 == 3 || ctx.is_prime(n)),
        }
    }

    /// Decides `n`, which must satisfy [`applies`](Self::applies).
    pub(crate) fn evaluate(self, n: u64, ctx: &Ctx) -> Result<Option<Hit>> {
        let nn = Int::from(n);
        Ok(match self {
            GiugaComposite => {
                if giuga_criterion_with(n, &ctx.factorize(n)?) {
                    // Rare enough to afford the direct sum as evidence.
                    Some(hit(n, ctx.sum(n - 1, n, &nn), &nn - 1u32, nn))
                } else {
                    None
                }
            }
            GiugaN3 => {
                let m = pw(n, 3);
                let lhs = 2u32 * ctx.sum(n, n, &m);
                when_equal(n, lhs, -(&nn * &nn), m)
            }
            AgohComposite => {
                let r = agoh_residue(n)?;
                when_equal(n, r.value().clone(), &nn - 1u32, nn)
            }
            Conj29a => {
                let m = pw(n, 5);
                let lhs = ctx.sum(n, n, &m);
                let rhs = if n == 2 {
                    // (8/2) B_1 = -2
                    Int::from(-2)
                } else if n % 2 == 0 {
                    Int::zero()
                } else {
                    // (n^3/2) B_{n-1} = (n^2/2) (n B_{n-1})
                    let nb = ctx.scaled_bernoulli(n - 1, n, 3)?;
                    &nn * &nn * nb * mod_inv(&Int::from(2), &m)?.value()
                };
                when_equal(n, lhs, rhs, m)
            }
            Conj29b => {
                let m = pw(n, 4);
                let lhs = ctx.sum(n - 1, n, &m);
                let rhs = if n % 2 == 0 && n > 2 {
                    Int::zero()
                } else {
                    ctx.scaled_bernoulli(n - 1, n, 4)?
                };
                when_equal(n, lhs, rhs, m)
            }
            Wolstenholme | Conj211 => {
                let m = pw(n, if self == Wolstenholme { 3 } else { 4 });
                let lhs = ctx.sum(n - 2, n, &m);
                when_equal(n, lhs, Int::zero(), m)
            }
            Conj213 => {
                let m = pw(n, 3);
                let lhs = ctx.sum((n - 1) / 2, n, &m);
                let power_side = lhs.is_zero();
                let bernoulli_side = ctx.is_prime(n) && n >= 7 && bernoulli_mod_prime((n - 3) / 2, n)?.is_zero();
                let side = match (power_side, bernoulli_side) {
                    (false, false) => return Ok(None),
                    (true, false) => "powersum",
                    (false, true) => "bernoulli",
                    (true, true) => "both",
                };
                Some(Hit { detail: Some(format!("side={side}")), ..hit(n, lhs, Int::zero(), m) })
            }
            Conj214 => {
                let m = pw(n, 3);
                when_equal(n, ctx.sum((n - 1) / 2, n, &m), Int::zero(), m)
            }
            HalfN2 => {
                let m = pw(n, 2);
                when_equal(n, ctx.sum((n - 1) / 2, n, &m), Int::zero(), m)
            }
            Conj217 => {
                let m = pw(n, 3);
                let run = ctx.sums(n, 2 * ctx.kmax, (2 * ctx.kmax + 1) as usize, &m);
                for k in 1..=ctx.kmax {
                    let s2i: Vec<Int> = (0..=k).map(|i| run[(2 * ctx.kmax - 2 * i) as usize].clone()).collect();
                    let lhs = weighted_binomial_sum(k, n, CheckerId::Eq215, &s2i)?;
                    if let Some(v) = when_unequal(n, lhs, -Int::one(), m.clone()) {
                        return Ok(Some(Hit { detail: Some(format!("k={k}")), ..v }));
                    }
                }
                None
            }
            GlmHalf => when_unequal(n, ctx.sum((n - 1) / 2, n, &nn), Int::zero(), nn),
        })
    }
}
