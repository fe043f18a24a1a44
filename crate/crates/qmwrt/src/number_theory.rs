//! Scalar arithmetic: rationals, Jacobi symbols, Dedekind sums, Bernoulli
//! polynomials and the root-of-unity context `(r, s)`.

use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type Q = BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Inverse of `a` modulo `m`, if it exists; result in `[0, m)`.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a.rem_euclid(m)).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, k) in factorize(n) {
        let cur = ds.clone();
        let mut pk = 1;
        for _ in 0..k {
            pk *= p;
            ds.extend(cur.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn moebius(n: u64) -> i32 {
    assert!(n >= 1, "moebius needs n >= 1");
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> Result<i32> {
    if n <= 0 || n % 2 == 0 {
        return invalid(format!("jacobi symbol needs odd positive n, got {n}"));
    }
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let m8 = n % 8;
            if m8 == 3 || m8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// Smallest positive `s' ≡ s (mod r)` with `s' ≡ 1 (mod 4)`.
pub fn normalize_s(s: i64, r: i64) -> Result<i64> {
    if r <= 0 || r % 2 == 0 {
        return invalid(format!("r must be odd and positive, got {r}"));
    }
    if gcd(s, r) != 1 {
        return invalid(format!("gcd(s, r) = gcd({s}, {r}) must be 1"));
    }
    // r odd, so the two congruences have a unique solution mod 4r.
    let m = 4 * r;
    let t = (0..4)
        .map(|k| (s.rem_euclid(r) + k * r).rem_euclid(m))
        .find(|t| t % 4 == 1)
        .expect("r odd");
    Ok(if t == 0 { m } else { t })
}

/// Dedekind sum `s(q, p)` by the reciprocity recursion.
pub fn dedekind_sum(q: i64, p: i64) -> Result<Q> {
    if p <= 0 {
        return invalid(format!("dedekind sum needs p > 0, got {p}"));
    }
    if gcd(q, p) != 1 {
        return invalid(format!("dedekind sum needs gcd(q, p) = 1, got ({q}, {p})"));
    }
    let mut sign = Q::one();
    let mut acc = Q::zero();
    let (mut q, mut p) = (q.rem_euclid(p), p);
    while p > 1 {
        // s(q,p) = -1/4 + (p/q + q/p + 1/(pq))/12 - s(p mod q, q)
        let (qq, pp) = (BigInt::from(q), BigInt::from(p));
        let term = Q::new(BigInt::from(-1), BigInt::from(4))
            + (Q::new(pp.clone(), qq.clone())
                + Q::new(qq.clone(), pp.clone())
                + Q::new(BigInt::one(), &pp * &qq))
                / qi(12);
        acc += &sign * term;
        sign = -sign;
        let next = p.rem_euclid(q);
        p = q;
        q = next;
    }
    Ok(acc)
}

fn bernoulli_numbers(upto: usize) -> Vec<Q> {
    static CACHE: OnceLock<Mutex<Vec<Q>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Q::one()]));
    let mut b = cache.lock().expect("bernoulli cache poisoned");
    while b.len() <= upto {
        let m = b.len();
        // sum_{j<=m} C(m+1, j) B_j = 0
        let mut acc = Q::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            acc += Q::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        let bm = -acc / Q::from_integer(BigInt::from(m + 1));
        b.push(bm);
    }
    b[..=upto].to_vec()
}

/// Bernoulli polynomial `B_k(x)` (with `B_1 = x - 1/2`).
pub fn bernoulli_poly(k: usize, x: &Q) -> Q {
    let b = bernoulli_numbers(k);
    let mut acc = Q::zero();
    let mut binom = BigInt::one();
    for (j, bj) in b.iter().enumerate() {
        acc += Q::from_integer(binom.clone()) * bj * pow_q(x, (k - j) as u32);
        binom = binom * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    acc
}

pub fn pow_q(x: &Q, e: u32) -> Q {
    num_traits::pow(x.clone(), e as usize)
}

/// Floor of a rational.
pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn frac_q(x: &Q) -> Q {
    x - Q::from_integer(floor_q(x))
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A rational reduced to `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMod1(Q);

impl RationalMod1 {
    pub fn new(x: &Q) -> Self {
        RationalMod1(frac_q(x))
    }

    pub fn value(&self) -> &Q {
        &self.0
    }
}

impl std::ops::Add for &RationalMod1 {
    type Output = RationalMod1;
    fn add(self, o: &RationalMod1) -> RationalMod1 {
        RationalMod1::new(&(&self.0 + &o.0))
    }
}

impl std::ops::Neg for &RationalMod1 {
    type Output = RationalMod1;
    fn neg(self) -> RationalMod1 {
        RationalMod1::new(&-self.0.clone())
    }
}

impl fmt::Display for RationalMod1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The root of unity `ξ = e^{2πi s/r}` together with `ξ^{1/4} = e^{πi s/2r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootContext {
    pub r: i64,
    pub s: i64,
}

impl RootContext {
    /// Validates `r` odd, `s ≡ 1 (mod 4)` and `gcd(s, 4r) = 1`.
    pub fn new(r: i64, s: i64) -> Result<Self> {
        if r <= 0 || r % 2 == 0 {
            return invalid(format!("r must be odd and positive, got {r}"));
        }
        if s.rem_euclid(4) != 1 {
            return invalid(format!("s must be 1 mod 4, got {s}"));
        }
        if gcd(s, 4 * r) != 1 {
            return invalid(format!("gcd(s, 4r) must be 1, got s={s}, r={r}"));
        }
        Ok(RootContext { r, s })
    }

    /// Normalizes `s` first, see [`normalize_s`].
    pub fn normalized(r: i64, s: i64) -> Result<Self> {
        let s = normalize_s(s, r)?;
        RootContext::new(r, s)
    }

    /// Conductor of `ξ^{1/4}`.
    pub fn conductor(&self) -> u64 {
        4 * self.r as u64
    }

    /// The parameter `s/r` as a rational.
    pub fn alpha(&self) -> Q {
        q(self.s, self.r)
    }

    /// Context for `ξ̃ = e^{-2πi r/s}`, normalized; `None` when `s = 1`.
    pub fn dual(&self) -> Option<RootContext> {
        if self.s == 1 {
            return None;
        }
        RootContext::normalized(self.s, -self.r).ok()
    }
}

impl fmt::Display for RootContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(r={}, s={})", self.r, self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(7, 1).unwrap(), 1);
        assert_eq!(jacobi(3, 5).unwrap(), -1);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert_eq!(jacobi(5, 15).unwrap(), 0);
        assert!(jacobi(3, 4).is_err());
        assert!(jacobi(3, -5).is_err());
    }

    #[test]
    fn normalize_examples() {
        for r in [1, 3, 5, 9, 31] {
            assert_eq!(normalize_s(1, r).unwrap(), 1);
        }
        assert_eq!(normalize_s(3, 5).unwrap(), 13);
        assert_eq!(normalize_s(5, 9).unwrap(), 5);
        assert!(normalize_s(3, 9).is_err());
    }

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_sum(5, 1).unwrap(), qi(0));
        assert_eq!(dedekind_sum(1, 3).unwrap(), q(1, 18));
        assert_eq!(dedekind_sum(2, 3).unwrap(), q(-1, 18));
        assert_eq!(dedekind_sum(-1, 3).unwrap(), q(-1, 18));
        assert!(dedekind_sum(2, 4).is_err());
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli_poly(1, &q(1, 4)), q(-1, 4));
        assert_eq!(bernoulli_poly(0, &q(7, 3)), qi(1));
        assert_eq!(bernoulli_poly(3, &qi(0)), qi(0));
        assert_eq!(bernoulli_poly(2, &qi(0)), q(1, 6));
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(30), -1);
    }

    #[test]
    fn mod1_is_canonical() {
        let x = RationalMod1::new(&q(-1, 120));
        assert_eq!(x.value(), &q(119, 120));
        assert_eq!((&x + &RationalMod1::new(&q(1, 120))).value(), &qi(0));
        assert_eq!((-&x).value(), &q(1, 120));
    }

    #[test]
    fn root_context_validation() {
        assert!(RootContext::new(5, 1).is_ok());
        assert!(RootContext::new(4, 1).is_err());
        assert!(RootContext::new(5, 3).is_err());
        assert!(RootContext::new(5, 5).is_err());
        let c = RootContext::normalized(7, 5).unwrap();
        assert_eq!(c.s, 5);
        let d = RootContext::new(7, 5).unwrap().dual().unwrap();
        assert_eq!((d.r, (d.s + 7).rem_euclid(5)), (5, 0));
    }

    #[test]
    fn divisor_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(euler_phi(420), 96);
        assert_eq!(mod_inverse(3, 7), Some(5));
        assert_eq!(mod_inverse(2, 4), None);
    }
}
