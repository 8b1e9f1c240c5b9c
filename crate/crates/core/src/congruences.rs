//! One checker per congruence. Each evaluates both sides as residues and
//! returns a [`CongruenceCheck`] recording whether its hypotheses apply and
//! whether the two sides agree.
//!
//! Checkers keep "not applicable" (a side condition is unmet) separate from
//! "fails" (hypotheses met, sides differ): only the latter is a
//! counterexample.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{binomial, mod_inv, rational_residue, Int, Rational, Residue};
use crate::bernoulli::{scaled_bernoulli_mod, shared_table, vsc_decompose, vsc_primes, vsc_sum, DEFAULT_CAP};
use crate::error::{domain, Error, Result};
use crate::exec::map_ordered;
use crate::kernel::power_sums_mod;
use crate::numtheory::is_prime;
use crate::powersum::{harmonic_run, powersum_direct};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckerId {
    Thm11,
    Eq15,
    Eq16,
    Eq21,
    Eq22,
    Eq23,
    Eq24,
    Eq25,
    Eq26,
    Eq27,
    Eq28,
    Eq29,
    Eq210,
    Eq211,
    Eq212,
    Eq213,
    Eq214,
    Rem27,
    Eq215,
    Eq216,
    Eq217,
    Eq219,
    Eq220,
    Eq221,
    Cor222,
    Eq34,
    Cor12,
}

/// A parameter a checker reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    K,
    N,
    P,
    S,
}

impl Param {
    pub fn flag(self) -> &'static str {
        match self {
            Param::K => "k",
            Param::N => "n",
            Param::P => "p",
            Param::S => "s",
        }
    }
}

use CheckerId::*;
use Param::{K, N, P, S};

const CATALOG: &[(CheckerId, &str, &[Param], &str)] = &[
    (Thm11, "thm1.1", &[K, N], "2S_{2k+1}(n) - (2k+1)nS_{2k}(n) is 0 or n^3/2 mod n^3"),
    (Eq15, "eq1.5", &[K, N], "2S_{2k+1}(n) ≡ (2k+1)nS_{2k}(n) (mod n^2)"),
    (Eq16, "eq1.6", &[K, N], "2S_{2k+1}(n) ≡ (2k+1)nS_{2k}(n) (mod n^3), n ≢ 2 (mod 4)"),
    (Eq21, "eq2.1", &[N], "odd n: 2S_n(n) ≡ n^2 S_{n-1}(n) (mod n^3)"),
    (Eq22, "eq2.2", &[N], "even n: 2S_{n+1}(n) - n(n+1)S_n(n) is 0 or n^3/2 mod n^3"),
    (Eq23, "eq2.3", &[N], "even n >= 6: 2S_{n-1}(n) ≡ n(n-1)S_{n-2}(n) (mod n^3)"),
    (Eq24, "eq2.4", &[N], "even n: S_{n-1}(n) is 0 or n/2 mod n"),
    (Eq25, "eq2.5", &[N], "S_{n-1}(n) ≡ -1 (mod n) for prime n"),
    (Eq26, "eq2.6", &[N], "2S_n(n) ≡ -n^2 (mod n^3) for prime n"),
    (Eq27, "eq2.7", &[K, P], "2S_{2k+1}(p) ≡ (2k+1)pS_{2k}(p) (mod p^4), (p-1) ∤ 2k-2"),
    (Eq28, "eq2.8", &[K, P], "S_{2k+1}(p) ≡ 0 (mod p^2), (p-1) ∤ 2k"),
    (Eq29, "eq2.9", &[K, P], "2R_{2k-1}(p) ≡ (1-2k)pR_{2k}(p) (mod p^4), (p-1) ∤ 2k+2"),
    (Eq210, "eq2.10", &[K, P], "S_{2k}(p) ≡ (p/3)(3B_{2k} + k(2k-1)p^2 B_{2k-2}) (mod p^3)"),
    (Eq211, "eq2.11", &[K, P], "S_{2k+1}(p) ≡ ((2k+1)/2)p^2 B_{2k} (mod p^4), (p-1) ∤ 2k-2"),
    (Eq212, "eq2.12", &[P], "S_{p-2}(p) ≡ ((p-2)p^2/2)B_{p-3} (mod p^4)"),
    (Eq213, "eq2.13", &[P], "p ≡ 3 (mod 4): S_{(p-1)/2}(p) ≡ -(p^2/4)B_{(p-3)/2} (mod p^3)"),
    (Eq214, "eq2.14", &[P], "p ≡ 1 (mod 4): S_{(p-1)/2}(p) ≡ pB_{(p-1)/2} (mod p^2)"),
    (Rem27, "rem2.7", &[P], "S_{p-1}(p) ≡ pB_{p-1} (mod p^3)"),
    (Eq215, "eq2.15", &[K, N], "2Σ(1+n(k+1-i))C(2k+2,2i)S_{2i}(n) ≡ -2 (mod n^3)"),
    (Eq216, "eq2.16", &[K, N], "2Σ(C(2k+2,2i)+n(k+1)C(2k+1,2i))S_{2i}(n) ≡ -2 (mod n^3)"),
    (Eq217, "eq2.17", &[K, N], "S_k(n) mod (n-1)n/2 (k odd) or mod n (k even)"),
    (Eq219, "eq2.19", &[K, N], "2S_{2k+1}(n) ≡ -(2k+1)nΣ n/p (mod n^2)"),
    (Eq220, "eq2.20", &[K, N], "S_{2k}(n) ≡ nB_{2k} (mod n)"),
    (Eq221, "eq2.21", &[K, N], "2S_{2k+1}(n) ≡ (2k+1)n^2 B_{2k} (mod n^2)"),
    (Cor222, "cor2.22", &[P, S], "S_{(p^s+1)/2}(p^s) mod p^{2s}"),
    (Eq34, "eq3.4", &[K, N], "2S_{2k+1}(n) - (2k+1)nS_{2k}(n) mod n^4 from the paired terms"),
    (Cor12, "cor1.2", &[K, N], "n^2 | 2S_k(n) for odd k iff no p | n divides D_{k-1}"),
];

impl CheckerId {
    fn entry(self) -> &'static (CheckerId, &'static str, &'static [Param], &'static str) {
        CATALOG.iter().find(|e| e.0 == self).expect("catalog is complete")
    }

    pub fn all() -> impl Iterator<Item = CheckerId> {
        CATALOG.iter().map(|e| e.0)
    }

    pub fn token(self) -> &'static str {
        self.entry().1
    }

    pub fn params(self) -> &'static [Param] {
        self.entry().2
    }

    pub fn description(self) -> &'static str {
        self.entry().3
    }
}

impl fmt::Display for CheckerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for CheckerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CATALOG
            .iter()
            .find(|e| e.1 == s)
            .map(|e| e.0)
            .ok_or_else(|| Error::UnknownChecker(s.to_string()))
    }
}

impl Serialize for CheckerId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
}

impl Params {
    pub fn kn(k: u64, n: u64) -> Self {
        Self { k: Some(k), n: Some(n), ..Self::default() }
    }

    pub fn kp(k: u64, p: u64) -> Self {
        Self { k: Some(k), p: Some(p), ..Self::default() }
    }

    fn get(&self, param: Param) -> Option<u64> {
        match param {
            K => self.k,
            N => self.n,
            P => self.p,
            S => self.s,
        }
    }

    fn need(&self, id: CheckerId, param: Param) -> Result<u64> {
        self.get(param)
            .ok_or_else(|| domain(format!("{id} needs a value for {}", param.flag())))
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [K, N, P, S]
            .iter()
            .filter_map(|&q| self.get(q).map(|v| format!("{}={v}", q.flag())))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// What the two sides are expected to do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Congruent,
    /// Used by the converse half of `cor1.2`, which predicts a non-zero
    /// residue.
    Incongruent,
}

impl Relation {
    fn test(self, equal: bool) -> bool {
        match self {
            Relation::Congruent => equal,
            Relation::Incongruent => !equal,
        }
    }
}

/// Branch of a multi-case congruence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    KEvenOrNOddOrZeroMod4,
    KOddTwoMod4,
    NOdd,
    NEven,
    ZeroMod4,
    TwoMod4,
    Prime,
    Composite,
    KOdd,
    KEven,
    OneMod4SOdd,
    SEven,
    Forward,
    Converse,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::KEvenOrNOddOrZeroMod4 => "k even or n odd or n ≡ 0 (mod 4)",
            CaseTag::KOddTwoMod4 => "k odd and n ≡ 2 (mod 4)",
            CaseTag::NOdd => "n odd",
            CaseTag::NEven => "n even",
            CaseTag::ZeroMod4 => "n ≡ 0 (mod 4)",
            CaseTag::TwoMod4 => "n ≡ 2 (mod 4)",
            CaseTag::Prime => "n prime",
            CaseTag::Composite => "n composite",
            CaseTag::KOdd => "k odd",
            CaseTag::KEven => "k even",
            CaseTag::OneMod4SOdd => "p ≡ 1 (mod 4) and s odd",
            CaseTag::SEven => "s even",
            CaseTag::Forward => "forward",
            CaseTag::Converse => "converse",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for CaseTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Verdict for one congruence at one parameter point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CongruenceCheck {
    pub checker: CheckerId,
    pub params: Params,
    #[serde(serialize_with = "crate::arith::serialize_decimal")]
    pub modulus: Int,
    pub lhs: Option<Residue>,
    pub rhs: Option<Residue>,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseTag>,
    pub applicable: bool,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CongruenceCheck {
    /// Hypotheses met and the sides disagree.
    pub fn fails(&self) -> bool {
        self.applicable && !self.holds
    }

    pub fn sides_equal(&self) -> Option<bool> {
        Some(self.lhs.as_ref()? == self.rhs.as_ref()?)
    }
}

/// Where Bernoulli-valued right-hand sides come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BernoulliRoute {
    /// Exact rationals from the shared table.
    Exact,
    /// The scaled power-sum engine, at the full modulus.
    Modular,
    /// Exact up to `cap`, modular above.
    Auto { cap: u64 },
}

impl Default for BernoulliRoute {
    fn default() -> Self {
        BernoulliRoute::Auto { cap: DEFAULT_CAP }
    }
}

impl BernoulliRoute {
    fn exact_for(self, index: u64) -> bool {
        match self {
            BernoulliRoute::Exact => true,
            BernoulliRoute::Modular => false,
            BernoulliRoute::Auto { cap } => index <= cap,
        }
    }
}

struct Draft {
    checker: CheckerId,
    params: Params,
    relation: Relation,
    case: Option<CaseTag>,
    blocked: Option<String>,
    note: Option<String>,
}

impl Draft {
    fn new(checker: CheckerId, params: Params) -> Self {
        Self {
            checker,
            params,
            relation: Relation::Congruent,
            case: None,
            blocked: None,
            note: None,
        }
    }

    fn case(mut self, case: CaseTag) -> Self {
        self.case = Some(case);
        self
    }

    fn relation(mut self, r: Relation) -> Self {
        self.relation = r;
        self
    }

    /// Marks the check not applicable unless `ok`.
    fn require(mut self, ok: bool, reason: impl Into<String>) -> Self {
        if !ok && self.blocked.is_none() {
            self.blocked = Some(reason.into());
        }
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn finish(self, modulus: Int, lhs: Int, rhs: Int) -> CongruenceCheck {
        if modulus < Int::from(2) {
            return self.degenerate(modulus);
        }
        let lhs = Residue::new(lhs, modulus.clone()).expect("modulus checked");
        let rhs = Residue::new(rhs, modulus.clone()).expect("modulus checked");
        let applicable = self.blocked.is_none();
        let holds = applicable && self.relation.test(lhs == rhs);
        let note = match (self.blocked, self.note) {
            (Some(b), Some(n)) => Some(format!("not applicable: {b}; {n}")),
            (Some(b), None) => Some(format!("not applicable: {b}")),
            (None, n) => n,
        };
        CongruenceCheck {
            checker: self.checker,
            params: self.params,
            modulus,
            lhs: Some(lhs),
            rhs: Some(rhs),
            relation: self.relation,
            case: self.case,
            applicable,
            holds,
            note,
        }
    }

    fn degenerate(self, modulus: Int) -> CongruenceCheck {
        CongruenceCheck {
            checker: self.checker,
            params: self.params,
            modulus: modulus.clone(),
            lhs: None,
            rhs: None,
            relation: self.relation,
            case: self.case,
            applicable: false,
            holds: false,
            note: Some(format!("not applicable: modulus {modulus} is below 2")),
        }
    }
}

fn pw(n: u64, e: u32) -> Int {
    Int::from(n).pow(e)
}

/// `[S_top(n), ..., S_{top-count+1}(n)] mod m`.
fn sums(n: u64, top: u64, count: usize, m: &Int) -> Vec<Int> {
    power_sums_mod(None, n, top, count, m.magnitude())
        .into_iter()
        .map(BigInt::from)
        .collect()
}

fn sum(k: u64, n: u64, m: &Int) -> Int {
    sums(n, k, 1, m).pop().unwrap()
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(domain(format!("{p} is not prime")))
    }
}

fn require_k(k: u64) -> Result<()> {
    if k == 0 {
        Err(domain("k must be at least 1"))
    } else {
        Ok(())
    }
}

/// `2S_{2k+1}(n) - (2k+1)nS_{2k}(n)` reduced mod `m`.
fn defect(k: u64, n: u64, m: &Int) -> Int {
    let s = sums(n, 2 * k + 1, 2, m);
    (Int::from(2) * &s[0] - Int::from(2 * k + 1) * n * &s[1]).mod_floor(m)
}

/// Theorem 1.1: the defect mod `n^3`, with its branch.
pub fn check_main(k: u64, n: u64) -> Result<CongruenceCheck> {
    require_k(k)?;
    let draft = Draft::new(Thm11, Params::kn(k, n));
    if n < 2 {
        return Ok(draft.degenerate(Int::from(n).pow(3)));
    }
    let m = pw(n, 3);
    let lhs = defect(k, n, &m);
    let half = &m / 2;
    let (case, rhs) = if k == 1 {
        if n % 2 == 1 {
            (CaseTag::NOdd, Int::zero())
        } else {
            (CaseTag::NEven, half)
        }
    } else if k % 2 == 0 || n % 2 == 1 || n % 4 == 0 {
        (CaseTag::KEvenOrNOddOrZeroMod4, Int::zero())
    } else {
        (CaseTag::KOddTwoMod4, half)
    };
    let mut draft = draft.case(case);
    if k == 1 {
        // 2S_3(n) - 3nS_2(n) = n^3 (1 - n) / 2 exactly.
        let exact = 2 * powersum_direct(3, n) - 3 * Int::from(n) * powersum_direct(2, n);
        let closed = pw(n, 3) * (Int::one() - n) / 2;
        if exact != closed {
            draft = draft
                .require(false, "exact k = 1 identity violated")
                .note(format!("2S_3 - 3nS_2 = {exact}, expected {closed}"));
        }
    }
    Ok(draft.finish(m, lhs, rhs))
}

/// Eq. (1.5) mod `n^2` and Eq. (1.6) mod `n^3`.
pub fn check_weak_forms(k: u64, n: u64) -> Result<(CongruenceCheck, CongruenceCheck)> {
    require_k(k)?;
    let params = Params::kn(k, n);
    let d15 = Draft::new(Eq15, params);
    let d16 = Draft::new(Eq16, params)
        .require(n % 4 != 2, "n ≡ 2 (mod 4)")
        .require(k >= 2 || n % 2 == 1, "k = 1 with even n is governed by the exact k = 1 identity");
    if n < 2 {
        return Ok((d15.degenerate(pw(n, 2)), d16.degenerate(pw(n, 3))));
    }
    let m3 = pw(n, 3);
    let m2 = pw(n, 2);
    let d = defect(k, n, &m3);
    Ok((d15.finish(m2, d.clone(), Int::zero()), d16.finish(m3, d, Int::zero())))
}

/// Corollary 2.1: `id` is one of `eq2.1`..`eq2.4`.
pub fn check_corollary_2_1(n: u64, id: CheckerId) -> Result<CongruenceCheck> {
    let draft = Draft::new(id, Params { n: Some(n), ..Params::default() });
    if n < 2 {
        return Ok(draft.degenerate(Int::from(n)));
    }
    let m = pw(n, 3);
    let nn = Int::from(n);
    let even = n % 2 == 0;
    let mod4 = if n % 4 == 0 { CaseTag::ZeroMod4 } else { CaseTag::TwoMod4 };
    Ok(match id {
        Eq21 => {
            let s = sums(n, n, 2, &m);
            draft
                .require(!even, "n is even")
                .finish(m, 2 * &s[0], &nn * &nn * &s[1])
        }
        Eq22 => {
            let s = sums(n, n + 1, 2, &m);
            let lhs = 2 * &s[0] - &nn * (n + 1) * &s[1];
            let rhs = if even && n % 4 == 2 { &m / 2 } else { Int::zero() };
            let draft = draft.require(even, "n is odd");
            let draft = if even { draft.case(mod4) } else { draft };
            draft.finish(m, lhs, rhs)
        }
        Eq23 => {
            let s = sums(n, n - 1, 2, &m);
            draft
                .require(even, "n is odd")
                .require(n >= 6, "n < 6 gives k = (n-2)/2 < 2")
                .finish(m, 2 * &s[0], &nn * (n - 1) * &s[1])
        }
        Eq24 => {
            let lhs = sum(n - 1, n, &nn);
            let rhs = if even && n % 4 == 2 { Int::from(n / 2) } else { Int::zero() };
            let draft = draft.require(even, "n is odd");
            let draft = if even { draft.case(mod4) } else { draft };
            draft.finish(nn, lhs, rhs)
        }
        other => return Err(domain(format!("{other} is not part of Corollary 2.1"))),
    })
}

/// Eq. (2.5) `S_{n-1}(n) ≡ -1 (mod n)` and Eq. (2.6) `2S_n(n) ≡ -n^2
/// (mod n^3)`. Both are theorems for prime `n`; for composite `n` they are
/// the conjectural direction and are reported as not applicable.
pub fn check_giuga_forms(n: u64) -> Result<(CongruenceCheck, CongruenceCheck)> {
    let params = Params { n: Some(n), ..Params::default() };
    let prime = is_prime(n);
    let case = if prime { CaseTag::Prime } else { CaseTag::Composite };
    let why = "n is composite (conjectural direction; see the giuga scans)";
    let d25 = Draft::new(Eq25, params).case(case).require(n >= 3, "n < 3").require(prime, why);
    let d26 = Draft::new(Eq26, params).case(case).require(n >= 3, "n < 3").require(prime, why);
    if n < 2 {
        return Ok((d25.degenerate(Int::from(n)), d26.degenerate(pw(n, 3))));
    }
    let nn = Int::from(n);
    let m3 = pw(n, 3);
    let s = sums(n, n, 2, &m3);
    let c25 = d25.finish(nn.clone(), s[1].clone(), nn.clone() - 1);
    let c26 = d26.finish(m3.clone(), 2 * &s[0], &m3 - &nn * &nn);
    Ok((c25, c26))
}

/// Proposition 2.5: Eq. (2.7) mod `p^4` and Eq. (2.8) mod `p^2`.
///
/// (2.8) is checked as `S_{2k+1}(p) ≡ 0 (mod p^2)`, which is what reducing
/// (2.7) mod `p^2` gives once `S_{2k}(p) ≡ 0 (mod p)`. Read with `S_{2k-1}`
/// and the `(p-1) ∤ 2k` gate it is false, e.g. `S_9(5) ≡ 15 (mod 25)`.
pub fn check_prime_supercongruence(k: u64, p: u64) -> Result<(CongruenceCheck, CongruenceCheck)> {
    require_k(k)?;
    require_prime(p)?;
    let params = Params::kp(k, p);
    let m4 = pw(p, 4);
    let m2 = pw(p, 2);
    let s = sums(p, 2 * k + 1, 2, &m4); // S_{2k+1}, S_{2k}
    let c27 = Draft::new(Eq27, params)
        .require(p >= 5, "p < 5")
        .require(k >= 2, "k < 2")
        .require((2 * k - 2) % (p - 1) != 0, "(p-1) | 2k-2")
        .finish(m4, 2 * &s[0], Int::from(2 * k + 1) * p * &s[1]);
    let c28 = Draft::new(Eq28, params)
        .require(p >= 5, "p < 5")
        .require(k >= 2, "k < 2")
        .require((2 * k) % (p - 1) != 0, "(p-1) | 2k")
        .finish(m2.clone(), s[0].mod_floor(&m2), Int::zero());
    Ok((c27, c28))
}

/// Corollary 2.6, Eq. (2.9): `2R_{2k-1}(p) ≡ (1-2k)pR_{2k}(p) (mod p^4)`.
pub fn check_harmonic_supercongruence(k: u64, p: u64) -> Result<CongruenceCheck> {
    require_k(k)?;
    require_prime(p)?;
    let m = pw(p, 4);
    let r = harmonic_run(p, 4, 2 * k - 1, 2)?;
    let bound = (p as u128).pow(4).saturating_sub((p as u128).pow(3) + 4) / 2;
    let lhs = 2 * &r[0];
    let rhs = (Int::one() - 2 * Int::from(k)) * p * &r[1];
    Ok(Draft::new(Eq29, Params::kp(k, p))
        .require(p >= 5, "p < 5")
        .require((k as u128) <= bound, "k > (p^4 - p^3 - 4)/2")
        .require((2 * k + 2) % (p - 1) != 0, "(p-1) | 2k+2")
        .finish(m, lhs, rhs))
}

/// `c p^a B_m mod p^e` for `a >= 1` and `c` prime to `p`.
fn bernoulli_term(route: BernoulliRoute, p: u64, e: u32, m: u64, c: &Rational, a: u32) -> Result<Int> {
    let modulus = pw(p, e);
    if route.exact_for(m) {
        let b = shared_table(m).value(m)?.clone();
        let v = c * Rational::from_integer(pw(p, a)) * b;
        return Ok(rational_residue(&v, &modulus)?.value().clone());
    }
    let x = Int::from(scaled_bernoulli_mod(m, p, e + 1 - a, None)?);
    let cden = mod_inv(c.denom(), &modulus)?;
    Ok((c.numer() * cden.value() * pw(p, a - 1) * x).mod_floor(&modulus))
}

/// `S_{p-1}(p)`'s right side `pB_{p-1} mod p^3` from the decomposition
/// `pB_{p-1} = pA - 1 - Σ_{q ≠ p} p/q`.
fn rem27_rhs_vsc(p: u64) -> Result<Int> {
    let m = pw(p, 3);
    let d = vsc_decompose(p - 1)?;
    let mut acc: Int = &d.integer_part * p - 1u32;
    for &q in d.primes.iter().filter(|&&q| q != p) {
        acc -= Int::from(p) * mod_inv(&Int::from(q), &m)?.value();
    }
    Ok(acc.mod_floor(&m))
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

/// The Bernoulli-valued family: `eq2.10`..`eq2.14` and `rem2.7`. `k` is
/// read by `eq2.10` and `eq2.11` only.
pub fn check_bernoulli_form(
    p: u64,
    which: CheckerId,
    k: Option<u64>,
    route: BernoulliRoute,
) -> Result<CongruenceCheck> {
    require_prime(p)?;
    let params = Params { k, p: Some(p), ..Params::default() };
    let need_k = || -> Result<u64> {
        let k = k.ok_or_else(|| domain(format!("{which} needs a value for k")))?;
        require_k(k)?;
        Ok(k)
    };
    let draft = Draft::new(which, params).require(p >= 5, "p < 5");
    if p < 5 {
        // Bernoulli sides are not p-integral for p = 2, 3 in general.
        let m = pw(p, 2);
        return Ok(draft.finish(m, Int::zero(), Int::zero()));
    }
    let route_note = |index: u64| {
        if route.exact_for(index) {
            "bernoulli side: exact"
        } else {
            "bernoulli side: modular"
        }
    };
    Ok(match which {
        Eq210 => {
            let k = need_k()?;
            let m = pw(p, 3);
            let lhs = sum(2 * k, p, &m);
            let t1 = bernoulli_term(route, p, 3, 2 * k, &Rational::one(), 1)?;
            let t2 = bernoulli_term(route, p, 3, 2 * k - 2, &ratio((k * (2 * k - 1)) as i64, 3), 3)?;
            draft
                .require(k >= 2, "k = 1 (the B_0 term does not match)")
                .note(route_note(2 * k))
                .finish(m, lhs, t1 + t2)
        }
        Eq211 => {
            let k = need_k()?;
            let m = pw(p, 4);
            let lhs = sum(2 * k + 1, p, &m);
            let rhs = bernoulli_term(route, p, 4, 2 * k, &ratio((2 * k + 1) as i64, 2), 2)?;
            draft
                .require(k >= 2, "k < 2")
                .require((2 * k - 2) % (p - 1) != 0, "(p-1) | 2k-2")
                .note(route_note(2 * k))
                .finish(m, lhs, rhs)
        }
        Eq212 => {
            let m = pw(p, 4);
            let lhs = sum(p - 2, p, &m);
            let rhs = bernoulli_term(route, p, 4, p - 3, &ratio(p as i64 - 2, 2), 2)?;
            draft
                .require(p >= 7, "p = 5 gives k = (p-3)/2 = 1")
                .note(route_note(p - 3))
                .finish(m, lhs, rhs)
        }
        Eq213 => {
            let m = pw(p, 3);
            let lhs = sum((p - 1) / 2, p, &m);
            let rhs = bernoulli_term(route, p, 3, (p - 3) / 2, &ratio(-1, 4), 2)?;
            draft
                .require(p % 4 == 3, "p ≢ 3 (mod 4)")
                .require(p >= 7, "p < 7")
                .note(route_note((p - 3) / 2))
                .finish(m, lhs, rhs)
        }
        Eq214 => {
            let m = pw(p, 2);
            let lhs = sum((p - 1) / 2, p, &m);
            let rhs = bernoulli_term(route, p, 2, (p - 1) / 2, &Rational::one(), 1)?;
            draft
                .require(p % 4 == 1, "p ≢ 1 (mod 4)")
                .note(route_note((p - 1) / 2))
                .finish(m, lhs, rhs)
        }
        Rem27 => {
            let m = pw(p, 3);
            let lhs = sum(p - 1, p, &m);
            let (rhs, how) = if route.exact_for(p - 1) {
                (rem27_rhs_vsc(p)?, "bernoulli side: von Staudt-Clausen")
            } else {
                let v = scaled_bernoulli_mod(p - 1, p, 3, None)?;
                (Int::from(v), "bernoulli side: modular")
            };
            draft.note(how).finish(m, lhs, rhs)
        }
        other => return Err(domain(format!("{other} is not a Bernoulli-form checker"))),
    })
}

/// Exact left-hand side of Eq. (2.15) or Eq. (2.16).
pub fn binomial_sum_lhs(k: u64, n: u64, which: CheckerId) -> Result<Int> {
    let s: Vec<Int> = (0..=k).map(|i| powersum_direct(2 * i, n)).collect();
    Ok(2 * weighted_binomial_sum(k, n, which, &s)?)
}

/// `Σ_{i=0}^{k} w_i S_{2i}(n)` with the Eq. (2.15) or (2.16) weights, from
/// precomputed `S_{2i}(n)`, `i = 0..=k` (exact or reduced).
pub(crate) fn weighted_binomial_sum(k: u64, n: u64, which: CheckerId, s2i: &[Int]) -> Result<Int> {
    let nn = Int::from(n);
    let mut acc = Int::zero();
    for i in 0..=k {
        let coeff = match which {
            Eq215 => (Int::one() + &nn * (k + 1 - i)) * binomial(2 * k + 2, 2 * i),
            Eq216 => binomial(2 * k + 2, 2 * i) + &nn * (k + 1) * binomial(2 * k + 1, 2 * i),
            other => return Err(domain(format!("{other} is not a binomial-sum checker"))),
        };
        acc += coeff * &s2i[i as usize];
    }
    Ok(acc)
}

/// `Σ_{i=0}^{k} w_i S_{2i}(n) mod m`, with the Eq. (2.15) or (2.16)
/// weights and without the leading factor 2.
pub fn binomial_sum_mod(k: u64, n: u64, which: CheckerId, m: &Int) -> Result<Int> {
    let run = sums(n, 2 * k, (2 * k + 1) as usize, m); // S_{2k}, ..., S_0
    let s2i: Vec<Int> = (0..=k).map(|i| run[(2 * k - 2 * i) as usize].clone()).collect();
    Ok(weighted_binomial_sum(k, n, which, &s2i)?.mod_floor(m))
}

/// Proposition 2.15: Eq. (2.15) or (2.16) mod `n^3`.
pub fn check_binomial_sum(k: u64, n: u64, which: CheckerId) -> Result<CongruenceCheck> {
    require_k(k)?;
    let draft = Draft::new(which, Params::kn(k, n));
    if n < 2 {
        return Ok(draft.degenerate(pw(n, 3)));
    }
    let m = pw(n, 3);
    let lhs = 2 * binomial_sum_mod(k, n, which, &m)?;
    Ok(draft.finish(m, lhs, Int::from(-2)))
}

/// Theorem 2.18, Eq. (2.17).
pub fn check_carlitz_von_staudt(k: u64, n: u64) -> Result<CongruenceCheck> {
    require_k(k)?;
    let draft = Draft::new(Eq217, Params::kn(k, n));
    if k % 2 == 1 {
        let m = Int::from(n.saturating_sub(1)) * n / 2;
        let draft = draft.case(CaseTag::KOdd);
        if m < Int::from(2) {
            return Ok(draft.degenerate(m));
        }
        let lhs = sum(k, n, &m);
        Ok(draft.finish(m, lhs, Int::zero()))
    } else {
        let m = Int::from(n);
        let draft = draft.case(CaseTag::KEven);
        if n < 2 {
            return Ok(draft.degenerate(m));
        }
        let lhs = sum(k, n, &m);
        Ok(draft.finish(m, lhs, -vsc_sum(k, n)))
    }
}

/// Theorem 2.21 Eq. (2.19), and Corollary 2.23 Eqs. (2.20), (2.21).
///
/// (2.20) reads `nB_{2k}` through von Staudt-Clausen; (2.21) takes
/// `nB_{2k} mod n` from the scaled power-sum engine instead, so the two
/// routes check each other.
pub fn check_odd_extension(k: u64, n: u64) -> Result<[CongruenceCheck; 3]> {
    require_k(k)?;
    let params = Params::kn(k, n);
    if n < 2 {
        return Ok([
            Draft::new(Eq219, params).degenerate(pw(n, 2)),
            Draft::new(Eq220, params).degenerate(Int::from(n)),
            Draft::new(Eq221, params).degenerate(pw(n, 2)),
        ]);
    }
    let m2 = pw(n, 2);
    let nn = Int::from(n);
    let s = sums(n, 2 * k + 1, 2, &m2);
    let v = vsc_sum(2 * k, n);
    let c219 = Draft::new(Eq219, params).finish(
        m2.clone(),
        2 * &s[0],
        -Int::from(2 * k + 1) * &nn * &v,
    );
    let c220 = Draft::new(Eq220, params).finish(nn.clone(), s[1].clone(), -v);
    let nb = Int::from(scaled_bernoulli_mod(2 * k, n, 1, None)?);
    let c221 = Draft::new(Eq221, params).finish(m2, 2 * &s[0], Int::from(2 * k + 1) * &nn * nb);
    Ok([c219, c220, c221])
}

/// Corollary 2.22: `S_{(p^s+1)/2}(p^s) mod p^{2s}` for an odd prime `p`.
pub fn check_prime_power_half(p: u64, s: u64) -> Result<CongruenceCheck> {
    require_prime(p)?;
    if p == 2 {
        return Err(domain("p must be odd"));
    }
    if s == 0 {
        return Err(domain("s must be at least 1"));
    }
    let s32 = u32::try_from(s).map_err(|_| domain("s too large"))?;
    let n = p
        .checked_pow(s32)
        .ok_or_else(|| domain(format!("{p}^{s} does not fit in 64 bits")))?;
    let m = pw(p, 2 * s32);
    let lhs = sum((n + 1) / 2, n, &m);
    let params = Params { p: Some(p), s: Some(s), ..Params::default() };
    let draft = Draft::new(Cor222, params);
    Ok(if p % 4 == 1 && s % 2 == 1 {
        draft.case(CaseTag::OneMod4SOdd).finish(m, lhs, Int::zero())
    } else if s % 2 == 0 {
        let rhs = -pw(p, 2 * s32 - 1) * mod_inv(&Int::from(4), &m)?.value();
        draft.case(CaseTag::SEven).finish(m, lhs, rhs)
    } else {
        draft
            .require(false, "p ≡ 3 (mod 4) with s odd")
            .finish(m, lhs, Int::zero())
    })
}

/// The defect mod `n^4` from pairing `i` with `n - i`: each pair
/// contributes `(k(1-4k^2)/3) n^3 i^{2k-2}`, summed over `i < n/2`, plus
/// the unpaired middle term `i = n/2` when `n` is even.
pub fn check_mod4_identity(k: u64, n: u64) -> Result<CongruenceCheck> {
    require_k(k)?;
    let draft = Draft::new(Eq34, Params::kn(k, n)).require(k >= 2, "k < 2");
    if n < 2 {
        return Ok(draft.degenerate(pw(n, 4)));
    }
    let m = pw(n, 4);
    let lhs = defect(k, n, &m);
    let num: Int = Int::from(k) * (Int::one() - Int::from(4 * k) * k);
    let (c, r) = num.div_rem(&Int::from(3));
    assert!(r.is_zero(), "k(1 - 4k^2)/3 is not integral for k = {k}");
    let half = sum(2 * k - 2, n.div_ceil(2), &Int::from(n));
    let mut rhs = c * pw(n, 3) * half;
    if n % 2 == 0 {
        let h = n / 2;
        let mid = 2 * sum_power(h, 2 * k + 1, &m) - Int::from(2 * k + 1) * n * sum_power(h, 2 * k, &m);
        rhs += mid;
    }
    Ok(draft.finish(m, lhs, rhs))
}

fn sum_power(base: u64, e: u64, m: &Int) -> Int {
    Int::from(base).modpow(&Int::from(e), m)
}

/// Corollary 1.2 for odd `k`: the forward direction when no prime of `n`
/// divides `D_{k-1}`, the converse (predicting `n^2 ∤ 2S_k(n)`) when some
/// does and `gcd(n, k) = 1`.
pub fn check_damianou_schumer_ext(k: u64, n: u64) -> Result<CongruenceCheck> {
    if k % 2 == 0 {
        return Err(domain(format!("k = {k} must be odd")));
    }
    let draft = Draft::new(Cor12, Params::kn(k, n));
    if n < 2 {
        return Ok(draft.degenerate(pw(n, 2)));
    }
    let m = pw(n, 2);
    let lhs = 2 * sum(k, n, &m);
    if k == 1 {
        return Ok(draft.require(false, "k = 1 lies outside k = 2j+1, j >= 1").finish(m, lhs, Int::zero()));
    }
    let blocking = vsc_primes(k - 1).into_iter().find(|q| n % q == 0);
    let draft = match blocking {
        None => draft.case(CaseTag::Forward),
        Some(q) => draft
            .case(CaseTag::Converse)
            .relation(Relation::Incongruent)
            .require(n.gcd(&k) == 1, format!("{q} | gcd(n, D_(k-1)) but gcd(n, k) > 1")),
    };
    Ok(draft.finish(m, lhs, Int::zero()))
}

/// Runs one checker at one parameter point.
pub fn check(id: CheckerId, params: &Params, route: BernoulliRoute) -> Result<CongruenceCheck> {
    let k = || params.need(id, K);
    let n = || params.need(id, N);
    let p = || params.need(id, P);
    Ok(match id {
        Thm11 => check_main(k()?, n()?)?,
        Eq15 => check_weak_forms(k()?, n()?)?.0,
        Eq16 => check_weak_forms(k()?, n()?)?.1,
        Eq21 | Eq22 | Eq23 | Eq24 => check_corollary_2_1(n()?, id)?,
        Eq25 => check_giuga_forms(n()?)?.0,
        Eq26 => check_giuga_forms(n()?)?.1,
        Eq27 => check_prime_supercongruence(k()?, p()?)?.0,
        Eq28 => check_prime_supercongruence(k()?, p()?)?.1,
        Eq29 => check_harmonic_supercongruence(k()?, p()?)?,
        Eq210 | Eq211 => check_bernoulli_form(p()?, id, Some(k()?), route)?,
        Eq212 | Eq213 | Eq214 | Rem27 => check_bernoulli_form(p()?, id, None, route)?,
        Eq215 | Eq216 => check_binomial_sum(k()?, n()?, id)?,
        Eq217 => check_carlitz_von_staudt(k()?, n()?)?,
        Eq219 => check_odd_extension(k()?, n()?)?[0].clone(),
        Eq220 => check_odd_extension(k()?, n()?)?[1].clone(),
        Eq221 => check_odd_extension(k()?, n()?)?[2].clone(),
        Cor222 => check_prime_power_half(p()?, params.need(id, S)?)?,
        Eq34 => check_mod4_identity(k()?, n()?)?,
        Cor12 => check_damianou_schumer_ext(k()?, n()?)?,
    })
}

/// Inclusive ranges for a sweep; only the parameters a checker reads are
/// consulted. Composite values in the `p` range are skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grid {
    pub k: Option<RangeInclusive<u64>>,
    pub n: Option<RangeInclusive<u64>>,
    pub p: Option<RangeInclusive<u64>>,
    pub s: Option<RangeInclusive<u64>>,
}

impl Grid {
    fn range(&self, id: CheckerId, q: Param) -> Result<Vec<u64>> {
        let r = match q {
            K => &self.k,
            N => &self.n,
            P => &self.p,
            S => &self.s,
        };
        let r = r
            .clone()
            .ok_or_else(|| domain(format!("{id} needs a value or range for {}", q.flag())))?;
        let mut v: Vec<u64> = r.collect();
        if q == P {
            v.retain(|&p| is_prime(p));
        }
        if q == K && id == Cor12 {
            v.retain(|&k| k % 2 == 1);
        }
        Ok(v)
    }

    /// Parameter points in lexicographic `(k, n, p, s)` order.
    pub fn points(&self, id: CheckerId) -> Result<Vec<Params>> {
        let mut out = vec![Params::default()];
        for &q in [K, N, P, S].iter().filter(|q| id.params().contains(q)) {
            let values = self.range(id, q)?;
            out = out
                .into_iter()
                .flat_map(|base| {
                    values.iter().map(move |&v| {
                        let mut p = base;
                        match q {
                            K => p.k = Some(v),
                            N => p.n = Some(v),
                            P => p.p = Some(v),
                            S => p.s = Some(v),
                        }
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

/// Evaluates `id` over every point of `grid`, in order.
pub fn sweep(id: CheckerId, grid: &Grid, jobs: usize, route: BernoulliRoute) -> Result<Vec<CongruenceCheck>> {
    let points = grid.points(id)?;
    if route != BernoulliRoute::Modular {
        // Build the shared table once, before the workers need it.
        let top = points
            .iter()
            .map(|q| bernoulli_index(id, q))
            .max()
            .unwrap_or(0);
        let cap = match route {
            BernoulliRoute::Auto { cap } => cap,
            _ => u64::MAX,
        };
        if top > 0 {
            shared_table(top.min(cap));
        }
    }
    map_ordered(&points, jobs, |q| check(id, q, route))
        .into_iter()
        .collect()
}

/// Largest Bernoulli index a point of `id` reads (0 if none).
fn bernoulli_index(id: CheckerId, q: &Params) -> u64 {
    let k = q.k.unwrap_or(0);
    let p = q.p.unwrap_or(0);
    match id {
        Eq210 | Eq211 => 2 * k,
        Eq212 => p.saturating_sub(3),
        Eq213 => p.saturating_sub(3) / 2,
        Eq214 => p.saturating_sub(1) / 2,
        Rem27 => p.saturating_sub(1),
        _ => 0,
    }
}

/// Totals over a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub checker: CheckerId,
    pub total: usize,
    pub applicable: usize,
    pub held: usize,
    pub not_applicable: usize,
    pub failures: Vec<CongruenceCheck>,
}

impl SweepSummary {
    pub fn new(checker: CheckerId, checks: &[CongruenceCheck]) -> Self {
        let applicable = checks.iter().filter(|c| c.applicable).count();
        Self {
            checker,
            total: checks.len(),
            applicable,
            held: checks.iter().filter(|c| c.holds).count(),
            not_applicable: checks.len() - applicable,
            failures: checks.iter().filter(|c| c.fails()).cloned().collect(),
        }
    }

    pub fn clean(&self) -> bool {
        self.failures.is_empty()
    }
}
