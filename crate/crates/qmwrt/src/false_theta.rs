//! Periodic functions, false theta functions and their limits at rationals.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::cyclotomic::{CycloNumber, IntAccumulator};
use crate::error::{invalid, Result};
use crate::number_theory::{bernoulli_poly, q, qi, to_f64, RootContext, Q};
use crate::seifert::{even_first, rotation_numbers};

/// Odd, mean-zero integer function on `ℤ/2P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicFunction {
    half_period: i64,
    values: Vec<i64>,
}

impl PeriodicFunction {
    pub fn new(half_period: i64, values: Vec<i64>) -> Result<Self> {
        if half_period < 1 || values.len() as i64 != 2 * half_period {
            return invalid(format!(
                "table of length {} does not have period 2P = {}",
                values.len(),
                2 * half_period
            ));
        }
        let n = values.len();
        if (0..n).any(|l| values[(n - l) % n] != -values[l]) {
            return invalid("periodic function is not odd");
        }
        if values.iter().sum::<i64>() != 0 {
            return invalid("periodic function is not mean-zero");
        }
        Ok(PeriodicFunction {
            half_period,
            values,
        })
    }

    pub fn zero(half_period: i64) -> Self {
        PeriodicFunction {
            half_period,
            values: vec![0; 2 * half_period as usize],
        }
    }

    /// `P`; the period is `2P`.
    pub fn half_period(&self) -> i64 {
        self.half_period
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, l: i64) -> i64 {
        self.values[l.rem_euclid(2 * self.half_period) as usize]
    }

    /// Residues `l mod 2P` where the function is nonzero, with values.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(|(l, v)| (l as i64, *v))
            .collect()
    }

    pub fn scaled(&self, c: i64) -> Self {
        PeriodicFunction {
            half_period: self.half_period,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, o: &PeriodicFunction) -> Result<Self> {
        if self.half_period != o.half_period {
            return invalid("periods differ");
        }
        Ok(PeriodicFunction {
            half_period: self.half_period,
            values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// `φ^a_p`: value `−ε₁ε₂ε₃` at `l ≡ P(1 + Σ ε_j a_j/p_j) (mod 2P)`.
pub fn phi_basis(p: [i64; 3], a: [i64; 3]) -> Result<PeriodicFunction> {
    for j in 0..3 {
        if a[j] <= 0 || a[j] >= p[j] {
            return invalid(format!("rotation number a_{} = {} out of range", j + 1, a[j]));
        }
    }
    let big_p = p[0] * p[1] * p[2];
    let mut values = vec![0i64; 2 * big_p as usize];
    for mask in 0..8 {
        let eps: Vec<i64> = (0..3).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
        let l = big_p + (0..3).map(|j| eps[j] * a[j] * (big_p / p[j])).sum::<i64>();
        values[l.rem_euclid(2 * big_p) as usize] -= eps[0] * eps[1] * eps[2];
    }
    PeriodicFunction::new(big_p, values)
}

/// `ψ^{(a)}_{2P}`: `±1` at `l ≡ ±a (mod 2P)`.
pub fn psi_basis(big_p: i64, a: i64) -> Result<PeriodicFunction> {
    if a < 1 || a >= big_p {
        return invalid(format!("psi label {a} outside 1..{big_p}"));
    }
    let mut values = vec![0i64; 2 * big_p as usize];
    values[a as usize] += 1;
    values[(2 * big_p - a) as usize] -= 1;
    PeriodicFunction::new(big_p, values)
}

/// `ψ^{n_a(a) + n_b(b) + ⋯}` from `(label, multiplicity)` pairs.
pub fn psi_combination(big_p: i64, terms: &[(i64, i64)]) -> Result<PeriodicFunction> {
    let mut f = PeriodicFunction::zero(big_p);
    for &(a, n) in terms {
        f = f.add(&psi_basis(big_p, a)?.scaled(n))?;
    }
    Ok(f)
}

/// `(numerator, denominator)` of `α` in lowest terms with positive denominator.
fn lowest_terms(alpha: &Q) -> (i64, i64) {
    let a = alpha.numer().to_i64().expect("alpha numerator fits in i64");
    let c = alpha.denom().to_i64().expect("alpha denominator fits in i64");
    (a, c)
}

fn eichler_accumulator(f: &PeriodicFunction, alpha: &Q) -> (IntAccumulator, i64) {
    let big_p = f.half_period;
    let (a, c) = lowest_terms(alpha);
    let pc = big_p * c;
    let d = 4 * pc;
    let mut acc = IntAccumulator::new(d as u64);
    // Integer weights f(l)(Pc − l), exponents a·l² mod 4Pc.
    for l in 0..=2 * pc {
        let v = f.at(l);
        if v == 0 {
            continue;
        }
        let k = ((a as i128 * (l as i128 * l as i128)).rem_euclid(d as i128)) as i64;
        acc.add(k, v as i128 * (pc - l) as i128);
    }
    (acc, pc)
}

/// `½ Σ_{l=0}^{2Pc} f(l) e^{2πiα l²/4P}(1 − l/(Pc))` for `α = a/c` in lowest
/// terms, exactly, in conductor `4Pc`.
pub fn eichler_limit(f: &PeriodicFunction, alpha: &Q) -> CycloNumber {
    let (acc, pc) = eichler_accumulator(f, alpha);
    acc.finish(&BigInt::from(2 * pc))
}

/// Floating-point value of [`eichler_limit`] from the same integer buckets.
pub fn eichler_limit_f64(f: &PeriodicFunction, alpha: &Q) -> Complex64 {
    let (acc, pc) = eichler_accumulator(f, alpha);
    let w = TAU / acc.conductor() as f64;
    let sum = acc.sparse().into_iter().fold(Complex64::new(0.0, 0.0), |s, (k, c)| {
        s + Complex64::from_polar(c as f64, w * k as f64)
    });
    sum / (2 * pc) as f64
}

/// Exponent `x` with `T^a = e^{πix}`: `x = (P/2)(1 + Σ a_j/p_j)²`.
pub fn t_phase(p: [i64; 3], a: [i64; 3]) -> Q {
    let big_p = p[0] * p[1] * p[2];
    let mut t = qi(1);
    for j in 0..3 {
        t += q(a[j], p[j]);
    }
    q(big_p, 2) * &t * &t
}

/// Exponent `a²/2P` of the `ψ`-basis `T`-phase `e^{πi a²/2P}`.
pub fn psi_t_phase(big_p: i64, a: i64) -> Q {
    q(a * a, 2 * big_p)
}

/// Basis labels used by [`s_matrix_phi`], in row order.
pub fn phi_labels(p: [i64; 3]) -> ([i64; 3], Vec<[i64; 3]>) {
    let p = even_first(p);
    (p, rotation_numbers(p))
}

/// Sign exponent `P(1 + Σ(a_j+b_j)/p_j) + P Σ_{j≠k} a_j b_k/(p_j p_k)`; an integer.
pub fn s_sign_exponent(p: [i64; 3], a: [i64; 3], b: [i64; 3]) -> Q {
    let big_p = p[0] * p[1] * p[2];
    let mut x = qi(big_p);
    for j in 0..3 {
        x += q(big_p * (a[j] + b[j]), p[j]);
        for k in 0..3 {
            if j != k {
                x += q(big_p * a[j] * b[k], p[j] * p[k]);
            }
        }
    }
    x
}

/// `S^a_b(p)`, rows and columns in the order of [`phi_labels`].
pub fn s_matrix_phi(p: [i64; 3]) -> Vec<Vec<f64>> {
    let (p, labels) = phi_labels(p);
    let big_p = p[0] * p[1] * p[2];
    let pref = -8.0 / (2.0 * big_p as f64).sqrt();
    labels
        .iter()
        .map(|a| {
            labels
                .iter()
                .map(|b| {
                    let ex = s_sign_exponent(p, *a, *b).to_integer();
                    let sign = if ex.is_odd() { -1.0 } else { 1.0 };
                    let prod: f64 = (0..3)
                        .map(|j| {
                            let num = (big_p * a[j] * b[j]) % (2 * p[j] * p[j]);
                            (PI * num as f64 / (p[j] * p[j]) as f64).sin()
                        })
                        .product();
                    pref * sign * prod
                })
                .collect()
        })
        .collect()
}

/// `M^a_b = √(2/P) sin(abπ/P)` for `1 ≤ a, b < P`.
pub fn s_matrix_psi(big_p: i64) -> Vec<Vec<f64>> {
    let c = (2.0 / big_p as f64).sqrt();
    (1..big_p)
        .map(|a| {
            (1..big_p)
                .map(|b| c * (PI * ((a * b) % (2 * big_p)) as f64 / big_p as f64).sin())
                .collect()
        })
        .collect()
}

/// `L(−2k, f) = −(2P)^{2k}/(2k+1) Σ_{l=1}^{2P} f(l) B_{2k+1}(l/2P)`.
pub fn l_value(f: &PeriodicFunction, k: usize) -> Q {
    let two_p = 2 * f.half_period;
    let mut sum = Q::zero();
    for (l, v) in f.support() {
        let l = if l == 0 { two_p } else { l };
        sum += bernoulli_poly(2 * k + 1, &q(l, two_p)) * qi(v);
    }
    let scale = Q::from_integer(BigInt::from(two_p).pow(2 * k as u32)) / qi(2 * k as i64 + 1);
    -(scale * sum)
}

/// `Σ_{k=0}^{K} L(−2k, f)/k! (πis/2Pr)^k`.
pub fn trivial_series(f: &PeriodicFunction, order: usize, ctx: &RootContext) -> Complex64 {
    let x = Complex64::new(0.0, PI * ctx.s as f64 / (2 * f.half_period * ctx.r) as f64);
    let mut term = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..=order {
        if k > 0 {
            term = term * x / k as f64;
        }
        total += term * to_f64(&l_value(f, k));
    }
    total
}

/// `√(r/(is))` on the principal branch.
pub fn sqrt_r_over_is(ctx: &RootContext) -> Complex64 {
    Complex64::from_polar((ctx.r as f64 / ctx.s as f64).sqrt(), -FRAC_PI_4)
}

/// `Φ̃^a(s/r) + √(r/(is)) Σ_b S^a_b Φ̃^b(−r/s) − Σ_{k≤K} L(−2k)/k! (πis/2Pr)^k`.
pub fn s_transform_residual(
    p: [i64; 3],
    a: [i64; 3],
    ctx: &RootContext,
    order: usize,
) -> Result<Complex64> {
    let (p, labels) = phi_labels(p);
    let row = match labels.iter().position(|x| *x == a) {
        Some(i) => i,
        None => return invalid(format!("{a:?} is not a canonical rotation number for {p:?}")),
    };
    let s = s_matrix_phi(p);
    let f = phi_basis(p, a)?;
    let mut total = eichler_limit_f64(&f, &q(ctx.s, ctx.r));
    let dual = q(-ctx.r, ctx.s);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, b) in labels.iter().enumerate() {
        acc += eichler_limit_f64(&phi_basis(p, *b)?, &dual) * s[row][j];
    }
    total += sqrt_r_over_is(ctx) * acc;
    Ok(total - trivial_series(&f, order, ctx))
}

/// `Σ_{0≤l≤cutoff} l f(l) e^{2πiτ l²/4P}`; halve it for the `Φ` normalization.
pub fn theta_truncated(f: &PeriodicFunction, tau: Complex64, cutoff: i64) -> Result<Complex64> {
    if tau.im <= 0.0 {
        return invalid("theta series needs Im tau > 0");
    }
    if cutoff < 2 * f.half_period {
        return invalid("cutoff must be at least one period");
    }
    let scale = Complex64::new(0.0, TAU) * tau / (4 * f.half_period) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..=cutoff {
        let v = f.at(l);
        if v != 0 {
            total += (scale * (l * l) as f64).exp() * (l * v) as f64;
        }
    }
    Ok(total)
}
