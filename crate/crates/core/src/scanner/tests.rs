use super::*;
use crate::arith::{Int, Rational};
use crate::bernoulli::is_wolstenholme_prime;
use crate::numtheory::{is_prime, primes_up_to};
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fs;

// Brute-force oracles: plain big-integer sums and Akiyama-Tanigawa
// Bernoulli numbers.

fn s(k: u64, n: u64) -> Int {
    (1..n).map(|i| Int::from(i).pow(k as u32)).sum()
}

fn at_bernoulli(max: usize) -> Vec<Rational> {
    let mut row: Vec<Rational> = Vec::new();
    let mut out = Vec::new();
    for m in 0..=max {
        row.push(Rational::new(Int::one(), Int::from(m as u64 + 1)));
        for j in (1..=m).rev() {
            row[j - 1] = Rational::from_integer(Int::from(j as u64)) * (&row[j - 1] - &row[j]);
        }
        out.push(row[0].clone());
    }
    out[1] = -out[1].clone();
    out
}

/// `q ≡ 0 (mod m)` for a rational whose denominator is prime to `m`.
fn vanishes(q: &Rational, m: &Int) -> bool {
    q.denom().gcd(m).is_one() && q.numer().mod_floor(m).is_zero()
}

fn pw(n: u64, e: u32) -> Int {
    Int::from(n).pow(e)
}

fn oracle(pred: PredicateId, n: u64, b: &[Rational], kmax: u64) -> bool {
    let nn = Int::from(n);
    let composite = !is_prime(n);
    let half = || s((n - 1) / 2, n);
    match pred {
        PredicateId::GiugaComposite => composite && (s(n - 1, n) + 1u32).mod_floor(&nn).is_zero(),
        PredicateId::GiugaN3 => composite && (2u32 * s(n, n) + &nn * &nn).mod_floor(&pw(n, 3)).is_zero(),
        PredicateId::AgohComposite => {
            composite && vanishes(&(Rational::from_integer(nn.clone()) * &b[(n - 1) as usize] + Rational::one()), &nn)
        }
        PredicateId::Conj29a => {
            let q = Rational::from_integer(s(n, n)) - Rational::new(pw(n, 3), Int::from(2)) * &b[(n - 1) as usize];
            vanishes(&q, &pw(n, 5))
        }
        PredicateId::Conj29b => {
            let q = Rational::from_integer(s(n - 1, n)) - Rational::from_integer(nn.clone()) * &b[(n - 1) as usize];
            vanishes(&q, &pw(n, 4))
        }
        PredicateId::Wolstenholme => s(n - 2, n).mod_floor(&pw(n, 3)).is_zero(),
        PredicateId::Conj211 => s(n - 2, n).mod_floor(&pw(n, 4)).is_zero(),
        PredicateId::Conj213 => {
            n % 4 == 3
                && (half().mod_floor(&pw(n, 3)).is_zero()
                    || (is_prime(n) && n >= 7 && b[((n - 3) / 2) as usize].numer().mod_floor(&nn).is_zero()))
        }
        PredicateId::Conj214 => n % 4 == 1 && n >= 5 && half().mod_floor(&pw(n, 3)).is_zero(),
        PredicateId::HalfN2 => n % 4 == 1 && composite && half().mod_floor(&pw(n, 2)).is_zero(),
        PredicateId::Conj217 => {
            n % 2 == 0
                && (1..=kmax).any(|k| {
                    let full = crate::congruences::binomial_sum_lhs(k, n, crate::congruences::CheckerId::Eq215).unwrap();
                    !(full / 2u32 + 1u32).mod_floor(&pw(n, 3)).is_zero()
                })
        }
        PredicateId::GlmHalf => {
            n % 2 == 1 && n >= 3 && (n % 4 == 3 || is_prime(n)) && !half().mod_floor(&nn).is_zero()
        }
    }
}

fn run(pred: PredicateId, lo: u64, hi: u64, jobs: usize) -> ScanReport {
    scan(pred, lo, hi, &ScanOptions::with_jobs(jobs)).unwrap()
}

#[test]
fn catalog_is_complete() {
    let all = predicate_catalog();
    assert_eq!(all.len(), 12);
    let tokens: Vec<&str> = all.iter().map(|p| p.token()).collect();
    assert_eq!(
        tokens,
        [
            "giuga-composite", "giuga-n3", "agoh-composite", "conj2.9a", "conj2.9b", "wolstenholme",
            "conj2.11", "conj2.13", "conj2.14", "half-n2", "conj2.17", "glm-half"
        ]
    );
    for p in all {
        assert_eq!(p.token().parse::<PredicateId>().unwrap(), p);
    }
    assert!(matches!("giuga".parse::<PredicateId>(), Err(Error::UnknownPredicate(_))));
}

#[test]
fn every_predicate_matches_brute_force() {
    let hi = 160;
    let b = at_bernoulli(hi as usize);
    for pred in predicate_catalog() {
        let kmax = 4;
        let opts = ScanOptions { kmax, ..ScanOptions::with_jobs(2) };
        let report = scan(pred, 2, hi, &opts).unwrap();
        let want: Vec<u64> = (2..=hi).filter(|&n| oracle(pred, n, &b, kmax)).collect();
        assert_eq!(report.hit_values(), want, "{pred}");
        assert_eq!(report.checked + report.skipped, hi - 1);
        for h in &report.hits {
            let expect = if pred.hits_are_violations() { Verdict::Violation } else { Verdict::Hit };
            assert_eq!(h.verdict, expect);
            assert!(h.lhs < h.modulus && h.rhs < h.modulus);
        }
    }
}

#[test]
fn known_hits() {
    assert_eq!(run(PredicateId::Wolstenholme, 16500, 17000, 2).hit_values(), [16843]);
    assert_eq!(run(PredicateId::HalfN2, 2, 4000, 2).hit_values(), [3737]);
    assert!(run(PredicateId::GiugaComposite, 2, 100_000, 2).hits.is_empty());
    // Every prime p >= 5 satisfies the mod-n^5 form, and so do 25 and 49.
    let a = run(PredicateId::Conj29a, 2, 60, 1).hit_values();
    let mut want: Vec<u64> = primes_up_to(60).into_iter().filter(|&p| p >= 5).collect();
    want.extend([25, 49]);
    want.sort();
    assert_eq!(a, want);
}

#[test]
fn wolstenholme_scan_agrees_with_bernoulli_route() {
    let report = run(PredicateId::Wolstenholme, 2, 3000, 1);
    for p in primes_up_to(3000).into_iter().filter(|&p| p >= 5).step_by(8).take(50) {
        assert_eq!(is_wolstenholme_prime(p).unwrap(), report.hit_values().contains(&p), "p={p}");
    }
}

#[test]
fn conj213_sides_agree() {
    let report = run(PredicateId::Conj213, 2, 3000, 2);
    for h in &report.hits {
        assert_eq!(h.detail.as_deref(), Some("side=both"), "n={}", h.n);
    }
}

#[test]
fn giuga_criterion_matches_direct_sum() {
    for n in 4..=2000u64 {
        if is_prime(n) {
            continue;
        }
        let direct = crate::powersum::powersum_mod(n - 1, n, &Int::from(n)).unwrap();
        let by_criterion = crate::numtheory::giuga_congruence_by_criterion(n).unwrap();
        assert_eq!(*direct.value() == Int::from(n - 1), by_criterion, "n={n}");
    }
}

#[test]
fn reports_do_not_depend_on_jobs() {
    for pred in [PredicateId::Wolstenholme, PredicateId::GlmHalf, PredicateId::Conj217] {
        let base = run(pred, 2, 1500, 1);
        for jobs in [4, 8] {
            let other = run(pred, 2, 1500, jobs);
            for f in [Format::Text, Format::Json, Format::Csv] {
                assert_eq!(render(&base, f), render(&other, f), "{pred} jobs={jobs}");
            }
        }
    }
}

#[test]
fn resume_at_every_block_matches_straight_run() {
    let (lo, hi) = (2u64, 2000u64);
    let straight = run(PredicateId::HalfN2, lo, hi, 1);
    let blocks = (hi - lo + 1).div_ceil(BLOCK);
    for stop in 1..blocks {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let first = ScanOptions {
            checkpoint: Some(path.clone()),
            stop_after_blocks: Some(stop),
            ..ScanOptions::with_jobs(2)
        };
        let partial = scan(PredicateId::HalfN2, lo, hi, &first).unwrap();
        assert!(!partial.complete);
        assert_eq!(partial.upto, lo - 1 + stop * BLOCK);
        let second = ScanOptions { checkpoint: Some(path.clone()), ..ScanOptions::with_jobs(3) };
        let resumed = scan(PredicateId::HalfN2, lo, hi, &second).unwrap();
        assert_eq!(render(&resumed, Format::Json), render(&straight, Format::Json), "stop={stop}");
        assert_eq!(read_records(&path).unwrap().len() as u64, blocks);
    }
}

#[test]
fn resume_after_torn_write() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.ckpt");
    let opts = ScanOptions { checkpoint: Some(path.clone()), stop_after_blocks: Some(2), ..ScanOptions::with_jobs(1) };
    scan(PredicateId::Wolstenholme, 2, 1500, &opts).unwrap();
    let mut text = fs::read_to_string(&path).unwrap();
    text.push_str("{\"scan\":\"wolsten");
    fs::write(&path, text).unwrap();
    let opts = ScanOptions { checkpoint: Some(path.clone()), ..ScanOptions::with_jobs(1) };
    let resumed = scan(PredicateId::Wolstenholme, 2, 1500, &opts).unwrap();
    assert_eq!(resumed, ScanReport { wall_time: resumed.wall_time, ..run(PredicateId::Wolstenholme, 2, 1500, 1) });
}

#[test]
fn mismatched_checkpoint_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.ckpt");
    let opts = ScanOptions { checkpoint: Some(path.clone()), stop_after_blocks: Some(1), ..ScanOptions::with_jobs(1) };
    scan(PredicateId::Wolstenholme, 2, 1500, &opts).unwrap();
    let opts = ScanOptions { checkpoint: Some(path.clone()), ..ScanOptions::with_jobs(1) };
    assert!(matches!(scan(PredicateId::Wolstenholme, 2, 1600, &opts), Err(Error::Checkpoint(_))));
    assert!(matches!(scan(PredicateId::Conj211, 2, 1500, &opts), Err(Error::Checkpoint(_))));
}

#[test]
fn bad_ranges() {
    let opts = ScanOptions::with_jobs(1);
    assert!(scan(PredicateId::Wolstenholme, 10, 9, &opts).is_err());
    assert!(scan(PredicateId::Wolstenholme, 1, 9, &opts).is_err());
    let r = scan(PredicateId::Wolstenholme, 9, 9, &opts).unwrap();
    assert_eq!((r.checked, r.skipped, r.upto), (1, 0, 9));
}

#[test]
fn renderings() {
    let empty = run(PredicateId::Conj214, 5, 300, 1);
    let json = render(&empty, Format::Json);
    assert!(json.contains("\"hits\": []"));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["predicate"], "conj2.14");
    assert!(v.get("wall_time").is_none());
    assert_eq!(render(&empty, Format::Csv), format!("{CSV_HEADER}\n"));

    let r = run(PredicateId::HalfN2, 3000, 4000, 1);
    let csv = render(&r, Format::Csv);
    let row = csv.lines().nth(1).unwrap();
    assert_eq!(row, format!("3737,half-n2,hit,0,0,{}", 3737u64 * 3737));
    let text = render(&r, Format::Text);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("hit n=3737 "));
    assert!(lines[1].starts_with("half-n2 [3000, 4000]: checked"));
    assert!(lines[1].ends_with("hits 1"));
}

#[test]
fn digest_ignores_kmax_except_for_conj217() {
    let a = config_digest(PredicateId::Wolstenholme, 2, 100, 3);
    let b = config_digest(PredicateId::Wolstenholme, 2, 100, 9);
    assert_eq!(a, b);
    assert_ne!(config_digest(PredicateId::Conj217, 2, 100, 3), config_digest(PredicateId::Conj217, 2, 100, 9));
    assert_eq!(a.len(), 64);
}
