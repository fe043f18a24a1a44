//! Exact arithmetic in cyclotomic fields.
//!
//! Elements live in the group algebra `ℚ[ℤ/D]`: a map from residues mod `D`
//! to rational coefficients, read as `Σ c_k ζ_D^k`. Root powers multiply by
//! adding indices. The field structure only enters through reduction modulo
//! the cyclotomic polynomial `Φ_D`, which is used for equality, integrality
//! and inversion.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::number_theory::{divisors, euler_phi, lcm, moebius, to_f64, Q};

/// Integer polynomial, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    pub coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c as f64)
    }
}

fn build_cyclotomic_poly(d: u64) -> IntPolynomial {
    // Π_{k | d} (x^k - 1)^{μ(d/k)}
    let mut num: Vec<i128> = vec![1];
    let mut dens = Vec::new();
    for k in divisors(d) {
        match moebius(d / k) {
            1 => {
                let k = k as usize;
                let mut out = vec![0i128; num.len() + k];
                for (i, &c) in num.iter().enumerate() {
                    out[i + k] += c;
                    out[i] -= c;
                }
                num = out;
            }
            -1 => dens.push(k as usize),
            _ => {}
        }
    }
    for k in dens {
        // num = quot * (x^k - 1): num[i] = quot[i-k] - quot[i]
        let n = num.len() - k;
        let mut quot = vec![0i128; n];
        for i in 0..n {
            let prev = if i >= k { quot[i - k] } else { 0 };
            quot[i] = prev - num[i];
        }
        debug_assert!((n..num.len()).all(|i| num[i] == if i >= k { quot[i - k] } else { 0 }));
        num = quot;
    }
    IntPolynomial {
        coeffs: num
            .into_iter()
            .map(|c| i64::try_from(c).expect("cyclotomic coefficient fits in i64"))
            .collect(),
    }
}

/// The `d`-th cyclotomic polynomial; cached.
pub fn cyclotomic_poly(d: u64) -> Arc<IntPolynomial> {
    assert!(d >= 1, "cyclotomic polynomial needs d >= 1");
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<IntPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("cache poisoned").get(&d) {
        return p.clone();
    }
    let p = Arc::new(build_cyclotomic_poly(d));
    cache
        .lock()
        .expect("cache poisoned")
        .insert(d, p.clone());
    p
}

/// Exact element of `ℚ(ζ_D)`.
#[derive(Clone, Debug)]
pub struct CycloNumber {
    conductor: u64,
    coeffs: BTreeMap<u64, Q>,
}

impl CycloNumber {
    pub fn zero() -> Self {
        CycloNumber {
            conductor: 1,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_rational(Q::one())
    }

    pub fn from_rational(c: Q) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        CycloNumber {
            conductor: 1,
            coeffs,
        }
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_rational(Q::from_integer(BigInt::from(c)))
    }

    /// `e^{2πik/D}`.
    pub fn root_power(d: u64, k: i64) -> Self {
        assert!(d >= 1, "conductor must be positive");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(k.rem_euclid(d as i64) as u64, Q::one());
        CycloNumber {
            conductor: d,
            coeffs,
        }
    }

    /// `e^{2πi x}` for rational `x`.
    pub fn exp_2pi_i(x: &Q) -> Self {
        let d = x.denom().to_u64().expect("denominator fits in u64");
        let k = x.numer().mod_floor(x.denom()).to_i64().expect("fits");
        Self::root_power(d, k)
    }

    /// Builds `Σ c_k ζ_D^k` from `(k, c_k)` pairs.
    pub fn from_terms(d: u64, terms: impl IntoIterator<Item = (i64, Q)>) -> Self {
        let mut x = CycloNumber {
            conductor: d,
            coeffs: BTreeMap::new(),
        };
        for (k, c) in terms {
            x.add_term(k, c);
        }
        x
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Q)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Adds `c ζ_D^k` in place.
    pub fn add_term(&mut self, k: i64, c: Q) {
        if c.is_zero() {
            return;
        }
        let k = k.rem_euclid(self.conductor as i64) as u64;
        let e = self.coeffs.entry(k).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    /// Re-expresses `self` with conductor `d`, a multiple of the current one.
    pub fn embed(&self, d: u64) -> Self {
        assert!(
            d.is_multiple_of(self.conductor),
            "cannot embed conductor {} into {}",
            self.conductor,
            d
        );
        let m = d / self.conductor;
        CycloNumber {
            conductor: d,
            coeffs: self.coeffs.iter().map(|(k, c)| (k * m, c.clone())).collect(),
        }
    }

    /// Lowers the conductor by the common divisor of all indices.
    pub fn compress(&self) -> Self {
        let g = self
            .coeffs
            .keys()
            .fold(self.conductor, |g, &k| g.gcd(&k));
        if g <= 1 {
            return self.clone();
        }
        CycloNumber {
            conductor: self.conductor / g,
            coeffs: self.coeffs.iter().map(|(k, c)| (k / g, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return CycloNumber {
                conductor: self.conductor,
                coeffs: BTreeMap::new(),
            };
        }
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Complex conjugate, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// The automorphism `ζ_D ↦ ζ_D^u` for `u` coprime to `D`.
    pub fn galois(&self, u: i64) -> Self {
        let d = self.conductor as i64;
        assert_eq!(u.gcd(&d), 1, "galois twist needs a unit");
        let mut out = CycloNumber {
            conductor: self.conductor,
            coeffs: BTreeMap::new(),
        };
        for (k, c) in &self.coeffs {
            out.add_term((*k as i64) * u, c.clone());
        }
        out
    }

    /// Multiplies by `ζ_D^k` where `D` is the current conductor.
    pub fn shift(&self, k: i64) -> Self {
        let d = self.conductor as i64;
        CycloNumber {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .map(|(i, c)| (((*i as i64) + k).rem_euclid(d) as u64, c.clone()))
                .collect(),
        }
    }

    /// Floating-point value. Redundant representations are first reduced
    /// to the power basis, whose coefficients are typically much smaller.
    pub fn eval_complex(&self) -> Complex64 {
        let w = std::f64::consts::TAU / self.conductor as f64;
        if self.coeffs.len() > euler_phi(self.conductor) as usize {
            return self
                .to_power_basis()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| {
                    acc + Complex64::from_polar(to_f64(c), w * k as f64)
                });
        }
        self.coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, (k, c)| {
            acc + Complex64::from_polar(to_f64(c), w * *k as f64)
        })
    }

    /// Least common denominator and integer numerators.
    fn integer_form(&self) -> (BigInt, Vec<(u64, BigInt)>) {
        let den = self
            .coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|(k, c)| (*k, c.numer() * (&den / c.denom())))
            .collect();
        (den, nums)
    }

    /// Coefficients in the power basis `1, ζ, …, ζ^{φ(D)-1}`.
    pub fn to_power_basis(&self) -> Vec<Q> {
        let d = self.conductor;
        let n = euler_phi(d) as usize;
        let (den, nums) = self.integer_form();
        let reduced = reduce_int(d, &nums);
        reduced
            .into_iter()
            .take(n)
            .map(|c| Q::new(c, den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        if self.coeffs.is_empty() {
            return true;
        }
        let (_, nums) = self.integer_form();
        reduce_int(self.conductor, &nums).iter().all(|c| c.is_zero())
    }

    /// True iff every power-basis coefficient is an integer, i.e. `x ∈ ℤ[ζ_D]`.
    pub fn is_integral(&self) -> bool {
        let (den, nums) = self.integer_form();
        if den.is_one() {
            return true;
        }
        reduce_int(self.conductor, &nums)
            .iter()
            .all(|c| c.is_multiple_of(&den))
    }

    /// Multiplicative inverse: solves `x·u = 1` in the power basis by
    /// fraction-free (Bareiss) elimination on the multiplication matrix of `x`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDivision);
        }
        let x = self.compress();
        let d = x.conductor;
        let n = euler_phi(d) as usize;
        let phi = cyclotomic_poly(d);
        let (den, nums) = x.integer_form();
        let mut col = reduce_int(d, &nums);
        col.resize(n, BigInt::zero());
        // m[i][j] = i-th power-basis coefficient of a·ζ^j; last column is 1.
        let mut m = vec![vec![BigInt::zero(); n + 1]; n];
        for j in 0..n {
            for (i, c) in col.iter().enumerate() {
                m[i][j] = c.clone();
            }
            let top = col.pop().expect("n ≥ 1");
            col.insert(0, BigInt::zero());
            for (i, c) in col.iter_mut().enumerate() {
                *c -= &top * phi.coeffs[i];
            }
        }
        m[0][n] = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let piv = (k..n).find(|&i| !m[i][k].is_zero()).ok_or(Error::ZeroDivision)?;
            m.swap(k, piv);
            let (head, tail) = m.split_at_mut(k + 1);
            let pivot_row = &head[k];
            for row in tail.iter_mut() {
                for j in k + 1..=n {
                    row[j] = (&row[j] * &pivot_row[k] - &row[k] * &pivot_row[j]) / &prev;
                }
                row[k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        // Integer back substitution: u = y/det with y_i exact.
        let det = prev;
        let mut y = vec![BigInt::zero(); n];
        for i in (0..n).rev() {
            let mut acc = &det * &m[i][n];
            for j in i + 1..n {
                if !m[i][j].is_zero() {
                    acc -= &m[i][j] * &y[j];
                }
            }
            y[i] = acc / &m[i][i];
        }
        let scale = Q::new(den, det);
        Ok(CycloNumber::from_terms(
            d,
            y.into_iter().enumerate().map(|(k, v)| (k as i64, Q::from_integer(v) * &scale)),
        ))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycloNumber::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// JSON-friendly form `(conductor, [(index, num, den)])`.
    pub fn to_exact_repr(&self) -> ExactRepr {
        ExactRepr {
            conductor: self.conductor,
            terms: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, c.numer().to_string(), c.denom().to_string()))
                .collect(),
        }
    }

    pub fn from_exact_repr(e: &ExactRepr) -> Result<Self> {
        let mut x = CycloNumber {
            conductor: e.conductor.max(1),
            coeffs: BTreeMap::new(),
        };
        for (k, n, d) in &e.terms {
            let n: BigInt = n
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad numerator {n}")))?;
            let d: BigInt = d
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad denominator {d}")))?;
            if d.is_zero() {
                return Err(Error::ZeroDivision);
            }
            x.add_term(*k as i64, Q::new(n, d));
        }
        Ok(x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExactRepr {
    pub conductor: u64,
    pub terms: Vec<(u64, String, String)>,
}

/// Dense reduction of `Σ n_k x^k` modulo `Φ_D`; returns `φ(D)` coefficients
/// (possibly followed by zeros).
fn reduce_int(d: u64, nums: &[(u64, BigInt)]) -> Vec<BigInt> {
    let phi = cyclotomic_poly(d);
    let small: Option<Vec<(u64, i128)>> = nums
        .iter()
        .map(|(k, c)| c.to_i128().map(|c| (*k, c)))
        .collect();
    if let Some(small) = small {
        if let Some(out) = reduce_i128(d, &small, &phi) {
            return out.into_iter().map(BigInt::from).collect();
        }
    }
    reduce_bigint(d, nums, &phi)
}

fn reduce_i128(d: u64, nums: &[(u64, i128)], phi: &IntPolynomial) -> Option<Vec<i128>> {
    let n = phi.degree();
    let mut a = vec![0i128; d as usize];
    for &(k, c) in nums {
        a[k as usize] = a[k as usize].checked_add(c)?;
    }
    let body: Vec<(usize, i128)> = phi.coeffs[..n]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c as i128))
        .collect();
    for k in (n..a.len()).rev() {
        let c = a[k];
        if c == 0 {
            continue;
        }
        a[k] = 0;
        let base = k - n;
        for &(j, pj) in &body {
            let t = c.checked_mul(pj)?;
            a[base + j] = a[base + j].checked_sub(t)?;
        }
    }
    a.truncate(n);
    Some(a)
}

fn reduce_bigint(d: u64, nums: &[(u64, BigInt)], phi: &IntPolynomial) -> Vec<BigInt> {
    let n = phi.degree();
    let mut a = vec![BigInt::zero(); d as usize];
    for (k, c) in nums {
        a[*k as usize] += c;
    }
    let body: Vec<(usize, BigInt)> = phi.coeffs[..n]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, BigInt::from(c)))
        .collect();
    for k in (n..a.len()).rev() {
        if a[k].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut a[k]);
        let base = k - n;
        for (j, pj) in &body {
            a[base + j] -= &c * pj;
        }
    }
    a.truncate(n);
    a
}

/// Dense integer accumulator over `ℤ/D` for large structured sums. Overflow
/// of the `i128` coefficients panics; callers size their inputs accordingly.
#[derive(Clone, Debug)]
pub struct IntAccumulator {
    conductor: u64,
    coeffs: Vec<i128>,
}

impl IntAccumulator {
    pub fn new(d: u64) -> Self {
        IntAccumulator {
            conductor: d,
            coeffs: vec![0; d as usize],
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    #[inline]
    pub fn add(&mut self, k: i64, c: i128) {
        let i = k.rem_euclid(self.conductor as i64) as usize;
        self.coeffs[i] = self.coeffs[i]
            .checked_add(c)
            .expect("cyclotomic accumulator overflow");
    }

    pub fn merge(&mut self, other: &IntAccumulator) {
        assert_eq!(self.conductor, other.conductor);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = a.checked_add(*b).expect("cyclotomic accumulator overflow");
        }
    }

    /// Nonzero `(index, coefficient)` pairs.
    pub fn sparse(&self) -> Vec<(i64, i128)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(k, c)| (k as i64, *c))
            .collect()
    }

    /// Product with another accumulator of the same conductor.
    pub fn mul(&self, other: &IntAccumulator) -> IntAccumulator {
        assert_eq!(self.conductor, other.conductor);
        let d = self.conductor as usize;
        let rhs = other.sparse();
        let mut out = IntAccumulator::new(self.conductor);
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for &(j, b) in &rhs {
                let k = (i + j as usize) % d;
                let t = a.checked_mul(b).expect("cyclotomic accumulator overflow");
                out.coeffs[k] = out.coeffs[k]
                    .checked_add(t)
                    .expect("cyclotomic accumulator overflow");
            }
        }
        out
    }

    /// Coefficients modulo `Φ_D`, or `None` on `i128` overflow.
    pub fn reduced(&self) -> Option<Vec<i128>> {
        let phi = cyclotomic_poly(self.conductor);
        let nums: Vec<(u64, i128)> = self.sparse().into_iter().map(|(k, c)| (k as u64, c)).collect();
        reduce_i128(self.conductor, &nums, &phi)
    }

    /// Product computed on reduced representatives; same value as [`mul`](Self::mul)
    /// in the field, usually much cheaper.
    pub fn mul_reduced(&self, other: &IntAccumulator) -> IntAccumulator {
        assert_eq!(self.conductor, other.conductor);
        let (a, b) = match (self.reduced(), other.reduced()) {
            (Some(a), Some(b)) => (a, b),
            _ => return self.mul(other),
        };
        let d = self.conductor as usize;
        let mut out = IntAccumulator::new(self.conductor);
        let bs: Vec<(usize, i128)> = b
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(j, c)| (j, *c))
            .collect();
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for &(j, y) in &bs {
                let t = x.checked_mul(y).expect("cyclotomic accumulator overflow");
                let k = (i + j) % d;
                out.coeffs[k] = out.coeffs[k]
                    .checked_add(t)
                    .expect("cyclotomic accumulator overflow");
            }
        }
        out
    }

    /// Multiplies by `±ζ_D^k` in place.
    pub fn rotate(&mut self, k: i64, negate: bool) {
        let d = self.conductor as i64;
        let k = k.rem_euclid(d) as usize;
        self.coeffs.rotate_right(k);
        if negate {
            for c in &mut self.coeffs {
                *c = -*c;
            }
        }
    }

    /// The value `Σ c_k ζ^k / den`.
    pub fn finish(&self, den: &BigInt) -> CycloNumber {
        let mut x = CycloNumber {
            conductor: self.conductor,
            coeffs: BTreeMap::new(),
        };
        for (k, c) in self.sparse() {
            x.coeffs
                .insert(k as u64, Q::new(BigInt::from(c), den.clone()));
        }
        x
    }
}

fn binary<F>(a: &CycloNumber, b: &CycloNumber, f: F) -> CycloNumber
where
    F: Fn(&mut Q, &Q),
{
    let d = lcm(a.conductor, b.conductor);
    let mut out = a.embed(d);
    let m = d / b.conductor;
    for (k, c) in &b.coeffs {
        let key = k * m;
        let e = out.coeffs.entry(key).or_insert_with(Q::zero);
        f(e, c);
        if e.is_zero() {
            out.coeffs.remove(&key);
        }
    }
    out
}

impl Add for &CycloNumber {
    type Output = CycloNumber;
    fn add(self, o: &CycloNumber) -> CycloNumber {
        binary(self, o, |e, c| *e += c)
    }
}

impl Sub for &CycloNumber {
    type Output = CycloNumber;
    fn sub(self, o: &CycloNumber) -> CycloNumber {
        binary(self, o, |e, c| *e -= c)
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Mul for &CycloNumber {
    type Output = CycloNumber;
    fn mul(self, o: &CycloNumber) -> CycloNumber {
        let d = lcm(self.conductor, o.conductor);
        let (ma, mb) = (d / self.conductor, d / o.conductor);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return CycloNumber {
                conductor: d,
                coeffs: BTreeMap::new(),
            };
        }
        let (da, na) = self.integer_form();
        let (db, nb) = o.integer_form();
        let sa: Option<Vec<(u64, i128)>> =
            na.iter().map(|(k, c)| c.to_i64().map(|c| (*k, c as i128))).collect();
        let sb: Option<Vec<(u64, i128)>> =
            nb.iter().map(|(k, c)| c.to_i64().map(|c| (*k, c as i128))).collect();
        let den = da * db;
        if let (Some(sa), Some(sb)) = (sa, sb) {
            // Products of i64 values fit in i128 with room for ~2^63 terms.
            let mut acc: HashMap<u64, i128> = HashMap::with_capacity(sa.len() * sb.len().min(64));
            for &(i, x) in &sa {
                for &(j, y) in &sb {
                    let k = (i * ma + j * mb) % d;
                    *acc.entry(k).or_insert(0) += x * y;
                }
            }
            let mut coeffs = BTreeMap::new();
            for (k, c) in acc {
                if c != 0 {
                    coeffs.insert(k, Q::new(BigInt::from(c), den.clone()));
                }
            }
            return CycloNumber {
                conductor: d,
                coeffs,
            };
        }
        let mut acc: HashMap<u64, BigInt> = HashMap::new();
        for (i, x) in &na {
            for (j, y) in &nb {
                let k = (i * ma + j * mb) % d;
                *acc.entry(k).or_insert_with(BigInt::zero) += x * y;
            }
        }
        let mut coeffs = BTreeMap::new();
        for (k, c) in acc {
            if !c.is_zero() {
                coeffs.insert(k, Q::new(c, den.clone()));
            }
        }
        CycloNumber {
            conductor: d,
            coeffs,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, o: CycloNumber) -> CycloNumber {
                (&self).$m(&o)
            }
        }
        impl $tr<&CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, o: &CycloNumber) -> CycloNumber {
                (&self).$m(o)
            }
        }
        impl $tr<CycloNumber> for &CycloNumber {
            type Output = CycloNumber;
            fn $m(self, o: CycloNumber) -> CycloNumber {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

impl AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, o: &CycloNumber) {
        if o.conductor == self.conductor || self.conductor.is_multiple_of(o.conductor) {
            let m = self.conductor / o.conductor;
            for (k, c) in &o.coeffs {
                self.add_term((k * m) as i64, c.clone());
            }
        } else {
            *self = &*self + o;
        }
    }
}

impl SubAssign<&CycloNumber> for CycloNumber {
    fn sub_assign(&mut self, o: &CycloNumber) {
        *self += &(-o);
    }
}

impl PartialEq for CycloNumber {
    fn eq(&self, o: &CycloNumber) -> bool {
        (self - o).is_zero()
    }
}

impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                if *k == 0 {
                    format!("{c}")
                } else {
                    format!("({c})·ζ{}^{k}", self.conductor)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `1/(ζ_D^a − ζ_D^{−a})` without Euclid, for `ζ_D^{2a} ≠ 1`.
///
/// With `y = ζ^{2a}` of order `m`, `1/(y − 1) = (1/m) Σ_{k<m} k y^k`, and
/// `1/(ζ^a − ζ^{−a}) = ζ^a/(y − 1)`.
pub fn inv_root_difference(d: u64, a: i64) -> Result<CycloNumber> {
    let two_a = (2 * a).rem_euclid(d as i64);
    if two_a == 0 {
        return Err(Error::ZeroDivision);
    }
    let m = d / (two_a as u64).gcd(&d);
    let inv_m = Q::new(BigInt::one(), BigInt::from(m));
    Ok(CycloNumber::from_terms(
        d,
        (1..m as i64).map(|k| (a + k * two_a, Q::from_integer(BigInt::from(k)) * &inv_m)),
    ))
}

/// `ζ_D^a − ζ_D^{−a}`.
pub fn root_difference(d: u64, a: i64) -> CycloNumber {
    CycloNumber::from_terms(d, [(a, Q::one()), (-a, -Q::one())])
}

/// Integer exact norm-free sanity check used in tests: `|x|²` numerically.
pub fn abs2(x: &CycloNumber) -> f64 {
    x.eval_complex().norm_sqr()
}

/// Rational value of `x` if it lies in `ℚ`.
pub fn as_rational(x: &CycloNumber) -> Option<Q> {
    let pb = x.compress().to_power_basis();
    if pb.iter().skip(1).all(|c| c.is_zero()) {
        Some(pb.first().cloned().unwrap_or_else(Q::zero))
    } else {
        None
    }
}

/// Largest absolute value among power-basis coefficients; a cheap size witness.
pub fn max_abs_coeff(pb: &[Q]) -> Q {
    pb.iter().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::{q, qi};

    fn z(d: u64, k: i64) -> CycloNumber {
        CycloNumber::root_power(d, k)
    }

    #[test]
    fn root_power_examples() {
        assert_eq!(z(7, 0), CycloNumber::one());
        let i = z(4, 1).eval_complex();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let r2 = (&z(8, 1) + &z(8, 7)).eval_complex();
        assert!((r2.re - 2f64.sqrt()).abs() < 1e-12 && r2.im.abs() < 1e-12);
    }

    #[test]
    fn ring_examples() {
        let x = &z(12, 5) + &CycloNumber::from_rational(q(1, 3));
        assert_eq!(&x + &CycloNumber::zero(), x);
        let w = z(3, 1);
        assert_eq!(&(&w * &w) * &w, CycloNumber::one());
        let s = (0..5).fold(CycloNumber::zero(), |acc, k| &acc + &z(5, k));
        assert!(s.is_zero());
        assert!(s.to_power_basis().iter().all(|c| c.is_zero()));
    }

    #[test]
    fn cyclotomic_poly_examples() {
        assert_eq!(cyclotomic_poly(1).coeffs, vec![-1, 1]);
        assert_eq!(cyclotomic_poly(12).coeffs, vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(7).coeffs, vec![1; 7]);
        assert_eq!(cyclotomic_poly(2).coeffs, vec![1, 1]);
    }

    #[test]
    fn power_basis_examples() {
        assert!(CycloNumber::zero().to_power_basis().iter().all(|c| c.is_zero()));
        assert_eq!(z(5, 4).to_power_basis(), vec![qi(-1); 4]);
        let x = CycloNumber::from_terms(15, [(3, qi(2)), (11, qi(-5)), (14, qi(7))]);
        assert!(x.to_power_basis().iter().all(crate::number_theory::is_integer));
    }

    #[test]
    fn integrality_examples() {
        assert!(z(9, 4).is_integral());
        assert!(!z(5, 1).scale(&q(1, 2)).is_integral());
        let one = CycloNumber::one();
        let u = (&one - &z(5, 2)) * (&one - &z(5, 1)).invert().unwrap();
        assert!(u.is_integral());
        // (1/2)(1 + 1) is integral despite the denominator.
        let h = CycloNumber::from_terms(5, [(0, q(1, 2)), (0, q(1, 2))]);
        assert!(h.is_integral());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(CycloNumber::one().invert().unwrap(), CycloNumber::one());
        assert_eq!(z(9, 2).invert().unwrap(), z(9, 7));
        let x = &CycloNumber::one() - &z(3, 1);
        let inv = x.invert().unwrap();
        let expected = (&CycloNumber::from_int(2) + &z(3, 1)).scale(&q(1, 3));
        assert_eq!(inv, expected);
        assert_eq!(&x * &inv, CycloNumber::one());
        assert_eq!(CycloNumber::zero().invert(), Err(Error::ZeroDivision));
        let s = (0..5).fold(CycloNumber::zero(), |acc, k| &acc + &z(5, k));
        assert_eq!(s.invert(), Err(Error::ZeroDivision));
    }

    #[test]
    fn root_difference_inverse() {
        for d in [12u64, 20, 28, 36, 60] {
            for a in 1..d as i64 {
                if (2 * a) % d as i64 == 0 {
                    continue;
                }
                let p = &root_difference(d, a) * &inv_root_difference(d, a).unwrap();
                assert_eq!(p, CycloNumber::one(), "d={d} a={a}");
            }
        }
    }

    #[test]
    fn compress_and_embed() {
        let x = CycloNumber::from_terms(60, [(12, qi(1)), (24, q(3, 2))]);
        let c = x.compress();
        assert_eq!(c.conductor(), 5);
        assert_eq!(c.embed(60), x);
        assert!((c.eval_complex() - x.eval_complex()).norm() < 1e-12);
    }

    #[test]
    fn exact_repr_round_trip() {
        let x = CycloNumber::from_terms(12, [(1, q(-3, 7)), (5, qi(2))]);
        let y = CycloNumber::from_exact_repr(&x.to_exact_repr()).unwrap();
        assert_eq!(x.to_exact_repr(), y.to_exact_repr());
    }
}
