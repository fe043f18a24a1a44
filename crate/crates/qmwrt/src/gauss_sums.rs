//! Quadratic Gauss sums: direct sums, closed forms, square completion,
//! reciprocity and the unknot normalization constants.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cyclotomic::CycloNumber;
use crate::error::{invalid, Error, Result};
use crate::matrix::{det, inverse, is_symmetric, signature, IntMatrix};
use crate::number_theory::{gcd, jacobi, mod_inverse, to_f64, RootContext, Q};

/// `G(s, r) = Σ_{n mod r} e^{2πi s n²/r}`.
pub fn gauss_brute(s: i64, r: i64) -> CycloNumber {
    assert!(r >= 1, "gauss sum needs r >= 1");
    let mut x = CycloNumber::from_terms(r as u64, []);
    for n in 0..r {
        x.add_term(s * ((n * n) % r), Q::from_integer(1.into()));
    }
    x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GaussPhase {
    One,
    I,
    /// `1 + i^s`
    OnePlusIPowS,
}

/// `G(s, r) = multiplier · phase · jacobi · √root`, or zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaussClosed {
    pub vanishes: bool,
    pub multiplier: i64,
    pub phase: GaussPhase,
    pub jacobi: i32,
    pub root: i64,
    pub s: i64,
}

impl GaussClosed {
    pub fn value(&self) -> Complex64 {
        if self.vanishes {
            return Complex64::zero();
        }
        let phase = match self.phase {
            GaussPhase::One => Complex64::new(1.0, 0.0),
            GaussPhase::I => Complex64::new(0.0, 1.0),
            GaussPhase::OnePlusIPowS => {
                Complex64::new(1.0, 0.0) + Complex64::new(0.0, 1.0).powi(self.s.rem_euclid(4) as i32)
            }
        };
        phase * (self.multiplier * self.jacobi as i64) as f64 * (self.root as f64).sqrt()
    }
}

/// Closed form of `G(s, r)` by `r mod 4`, after the reduction
/// `G(s, r) = g·G(s/g, r/g)`.
pub fn gauss_closed(s: i64, r: i64) -> Result<GaussClosed> {
    if r < 1 {
        return invalid(format!("gauss sum needs r >= 1, got {r}"));
    }
    let g = gcd(s, r).abs();
    let (s1, r1) = (s / g, r / g);
    let base = GaussClosed {
        vanishes: false,
        multiplier: g,
        phase: GaussPhase::One,
        jacobi: 1,
        root: r1,
        s: s1,
    };
    Ok(match r1 % 4 {
        0 => {
            // (r/s) and i^s only depend on s mod r here.
            let j = jacobi(r1, s1.rem_euclid(r1))?;
            GaussClosed {
                phase: GaussPhase::OnePlusIPowS,
                jacobi: j,
                ..base
            }
        }
        1 => GaussClosed {
            jacobi: jacobi(s1, r1)?,
            ..base
        },
        2 => GaussClosed {
            vanishes: true,
            jacobi: 0,
            ..base
        },
        _ => GaussClosed {
            phase: GaussPhase::I,
            jacobi: jacobi(s1, r1)?,
            ..base
        },
    })
}

/// `Σ_{n mod r} ξ^{P n² + 2A n}` with `ξ = e^{2πi s/r}`, `r` odd, `2A ∈ ℤ`,
/// by square completion (with the gcd reduction when `gcd(P, r) > 1`).
pub fn gauss_linear(p: i64, a: &Q, s: i64, r: i64) -> Result<CycloNumber> {
    if r < 1 || r % 2 == 0 {
        return invalid(format!("gauss_linear needs odd positive r, got {r}"));
    }
    let two_a = a * Q::from_integer(2.into());
    if !two_a.is_integer() {
        return invalid(format!("gauss_linear needs 2A integral, got A = {a}"));
    }
    let b = two_a.to_integer().to_i64().expect("small linear coefficient");
    let g = gcd(p, r).abs();
    if b % g != 0 {
        return Ok(CycloNumber::zero());
    }
    let (r1, p1, b1) = (r / g, p / g, b / g);
    // P1 k² + B1 k = P1 (k + B1·(2P1)^*)² − B1²·(4P1)^*   (mod r1)
    let shift = if r1 == 1 {
        0
    } else {
        let inv4p = mod_inverse((4 * p1).rem_euclid(r1), r1).expect("coprime after reduction");
        (-(b1 % r1) * (b1 % r1) % r1 * inv4p).rem_euclid(r1)
    };
    let gs = gauss_brute(s * p1, r1);
    let phase = CycloNumber::root_power(r1 as u64, s * shift);
    Ok((&phase * &gs).scale(&Q::from_integer(g.into())).embed(r as u64))
}

/// Direct summation of the same sum, used to cross-check [`gauss_linear`].
pub fn gauss_linear_direct(p: i64, a: &Q, s: i64, r: i64) -> Result<CycloNumber> {
    let two_a = a * Q::from_integer(2.into());
    if !two_a.is_integer() {
        return invalid(format!("gauss_linear needs 2A integral, got A = {a}"));
    }
    let b = two_a.to_integer().to_i64().expect("small linear coefficient");
    let mut x = CycloNumber::from_terms(r as u64, []);
    for n in 0..r {
        x.add_term(s * (p * n * n + b * n).rem_euclid(r), Q::from_integer(1.into()));
    }
    Ok(x)
}

/// `F(U^{±1}, ξ)` in two forms.
#[derive(Clone, Debug)]
pub struct UnknotNormalization {
    pub sign: i64,
    /// `Σ_{n=1}^{r-1} q^{σ(n²−1)/4}[n]²` in conductor `4r`.
    pub exact: CycloNumber,
    /// `∓(r/s)((1 ± i^s)/√2)√(2r) q^{∓3/4}/(q^{1/2} − q^{−1/2})`.
    pub closed: Complex64,
}

/// `q^{x}` for `q = ξ = e^{2πi s/r}` and `x ∈ ¼ℤ`, in conductor `4r`.
pub(crate) fn q_quarter(ctx: &RootContext, four_x: i64) -> CycloNumber {
    CycloNumber::root_power(4 * ctx.r as u64, ctx.s * four_x)
}

/// Quantum integer `[n] = (q^{n/2} − q^{−n/2})/(q^{1/2} − q^{−1/2})`, exact,
/// as the integral Laurent polynomial `Σ_{k<n} q^{(n−1)/2−k}`.
pub fn quantum_int(ctx: &RootContext, n: i64) -> CycloNumber {
    let d = 4 * ctx.r as u64;
    // [n + 2r] = [n] and [−n] = −[n]
    let mut m = n.rem_euclid(2 * ctx.r);
    let mut sign = 1;
    if m > ctx.r {
        m = 2 * ctx.r - m;
        sign = -1;
    }
    // q^{(m−1)/2 − k} = ζ_{4r}^{2s(m−1) − 4sk}
    CycloNumber::from_terms(
        d,
        (0..m).map(|k| (ctx.s * (2 * (m - 1) - 4 * k), Q::from_integer(sign.into()))),
    )
}

pub fn f_unknot(sign: i64, ctx: &RootContext) -> Result<UnknotNormalization> {
    if sign != 1 && sign != -1 {
        return invalid(format!("unknot framing must be ±1, got {sign}"));
    }
    let r = ctx.r;
    let mut exact = CycloNumber::zero();
    for n in 1..r {
        let qn = quantum_int(ctx, n);
        exact += &(&q_quarter(ctx, sign * (n * n - 1)) * &(&qn * &qn));
    }
    let jac = jacobi(r, ctx.s)? as f64;
    let i_s = Complex64::new(0.0, 1.0).powi(ctx.s.rem_euclid(4) as i32);
    let phase = (Complex64::new(1.0, 0.0) + i_s * sign as f64) / 2f64.sqrt();
    let qpow = |x: f64| Complex64::from_polar(1.0, TAU * ctx.s as f64 * x / r as f64);
    let closed = -(sign as f64) * jac * phase * (2.0 * r as f64).sqrt() * qpow(-0.75 * sign as f64)
        / (qpow(0.5) - qpow(-0.5));
    Ok(UnknotNormalization { sign, exact, closed })
}

/// Integer quadratic form with a rational linear shift.
#[derive(Clone, Debug)]
pub struct QuadraticFormZ {
    pub b: IntMatrix,
    pub psi: Vec<Q>,
}

impl QuadraticFormZ {
    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// Checks the divisibility hypotheses of the reciprocity theorem for modulus `r`.
    pub fn check_hypotheses(&self, r: i64) -> Result<()> {
        let n = self.dim();
        if !is_symmetric(&self.b) {
            return Err(Error::Hypothesis("B is not symmetric".into()));
        }
        if self.psi.len() != n {
            return Err(Error::Hypothesis("psi has the wrong length".into()));
        }
        if r < 1 {
            return Err(Error::Hypothesis("r must be positive".into()));
        }
        if det(&self.b).is_zero() {
            return Err(Error::Hypothesis("B is singular".into()));
        }
        if (0..n).any(|i| (r * self.b[i][i]) % 2 != 0) {
            return Err(Error::Hypothesis("(r/2)<x,Bx> is not integral".into()));
        }
        if self
            .psi
            .iter()
            .any(|p| !(p * Q::from_integer(r.into())).is_integer())
        {
            return Err(Error::Hypothesis("r<x,psi> is not integral".into()));
        }
        Ok(())
    }
}

fn tuples(n: usize, modulus: i64) -> impl Iterator<Item = Vec<i64>> {
    let total = (modulus as u64).pow(n as u32);
    (0..total).map(move |mut idx| {
        (0..n)
            .map(|_| {
                let v = (idx % modulus as u64) as i64;
                idx /= modulus as u64;
                v
            })
            .collect()
    })
}

/// Both sides of the Deloup–Turaev reciprocity formula, numerically.
pub fn reciprocity(form: &QuadraticFormZ, r: i64) -> Result<(Complex64, Complex64)> {
    form.check_hypotheses(r)?;
    let n = form.dim();
    let b = &form.b;
    let psi: Vec<f64> = form.psi.iter().map(to_f64).collect();
    let mut lhs = Complex64::zero();
    for x in tuples(n, r) {
        let mut quad = 0i64;
        for i in 0..n {
            for j in 0..n {
                quad += x[i] * b[i][j] * x[j];
            }
        }
        let lin: f64 = (0..n).map(|i| x[i] as f64 * psi[i]).sum();
        lhs += Complex64::from_polar(1.0, PI * quad as f64 / r as f64 + TAU * lin);
    }
    let d = det(b);
    let dabs = d.abs().to_i64().expect("small determinant");
    let binv = inverse(b).expect("nonsingular");
    // Coset representatives of Z^N / B Z^N: classes of B^{-1} y mod 1.
    let mut seen = std::collections::HashSet::new();
    let mut rhs_sum = Complex64::zero();
    for y in tuples(n, dabs) {
        let key: Vec<Q> = (0..n)
            .map(|i| {
                let v: Q = (0..n)
                    .map(|j| &binv[i][j] * Q::from_integer(y[j].into()))
                    .sum();
                crate::number_theory::frac_q(&v)
            })
            .collect();
        if !seen.insert(key) {
            continue;
        }
        let v: Vec<Q> = (0..n)
            .map(|i| Q::from_integer(y[i].into()) + &form.psi[i])
            .collect();
        let mut quad = Q::zero();
        for i in 0..n {
            for j in 0..n {
                quad += &v[i] * &binv[i][j] * &v[j];
            }
        }
        rhs_sum += Complex64::from_polar(1.0, -PI * r as f64 * to_f64(&quad));
    }
    debug_assert_eq!(seen.len() as i64, dabs);
    let sigma = signature(b) as f64;
    let pref = Complex64::from_polar(1.0, PI * sigma / 4.0) * (r as f64).powf(n as f64 / 2.0)
        / (dabs as f64).sqrt();
    Ok((lhs, pref * rhs_sum))
}

/// Closed and brute values of `Σ_{x ∈ (ℤ/r)^N} e^{2πi⟨x,Bx⟩/r}`.
#[derive(Clone, Debug, Serialize)]
pub struct HighRankGauss {
    pub jacobi: i32,
    pub i_power: usize,
    pub closed: (f64, f64),
    pub brute: (f64, f64),
}

pub fn gauss_high_rank(b: &IntMatrix, r: i64) -> Result<HighRankGauss> {
    if r < 1 || r % 2 == 0 {
        return invalid(format!("r must be odd and positive, got {r}"));
    }
    if !is_symmetric(b) {
        return invalid("B must be symmetric");
    }
    let d = det(b).to_i64().expect("small determinant");
    if d == 0 {
        return invalid("B must be nondegenerate");
    }
    if gcd(d, r) != 1 {
        return invalid(format!("gcd(det B, r) = gcd({d}, {r}) must be 1"));
    }
    let n = b.len();
    let j = jacobi(d, r)?;
    let i_power = if r % 4 == 3 { n } else { 0 };
    let closed = Complex64::new(0.0, 1.0).powi(i_power as i32)
        * j as f64
        * (r as f64).powf(n as f64 / 2.0);
    let mut brute = Complex64::zero();
    for x in tuples(n, r) {
        let mut quad = 0i64;
        for i in 0..n {
            for k in 0..n {
                quad += x[i] * b[i][k] * x[k];
            }
        }
        brute += Complex64::from_polar(1.0, TAU * quad.rem_euclid(r) as f64 / r as f64);
    }
    Ok(HighRankGauss {
        jacobi: j,
        i_power,
        closed: (closed.re, closed.im),
        brute: (brute.re, brute.im),
    })
}

/// `√H` as an exact element of `ℚ(ζ_{4H})` for odd positive `H`, from
/// `G(1, H) = √H` (`H ≡ 1 mod 4`) or `i√H` (`H ≡ 3 mod 4`).
pub fn sqrt_odd(h: i64) -> Result<CycloNumber> {
    if h < 1 || h % 2 == 0 {
        return invalid(format!("sqrt_odd needs odd positive H, got {h}"));
    }
    let g = gauss_brute(1, h);
    Ok(if h % 4 == 1 {
        g
    } else {
        &CycloNumber::root_power(4, -1) * &g
    })
}

/// `e^{πi k/4}` exactly.
pub fn eighth_root(k: i64) -> CycloNumber {
    CycloNumber::root_power(8, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::{q, qi};

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn brute_examples() {
        assert_eq!(gauss_brute(3, 1), CycloNumber::one());
        assert!(close(gauss_brute(1, 5).eval_complex(), Complex64::new(5f64.sqrt(), 0.0), 1e-12));
        assert!(gauss_brute(1, 2).is_zero());
    }

    #[test]
    fn closed_examples() {
        assert!(gauss_closed(1, 6).unwrap().vanishes);
        let c5 = gauss_closed(1, 5).unwrap();
        assert!(close(c5.value(), gauss_brute(1, 5).eval_complex(), 1e-12));
        let c3 = gauss_closed(1, 3).unwrap();
        assert_eq!(c3.phase, GaussPhase::I);
        assert!(close(c3.value(), Complex64::new(0.0, 3f64.sqrt()), 1e-12));
        assert!(close(c3.value(), gauss_brute(1, 3).eval_complex(), 1e-12));
        for (s, r) in [(1, 8), (3, 8), (5, 12), (6, 9), (3, 4)] {
            let c = gauss_closed(s, r).unwrap();
            assert!(close(c.value(), gauss_brute(s, r).eval_complex(), 1e-9), "s={s} r={r}");
        }
    }

    #[test]
    fn linear_examples() {
        assert_eq!(gauss_linear(3, &qi(0), 1, 7).unwrap(), gauss_brute(3, 7));
        assert_eq!(
            gauss_linear(1, &qi(1), 1, 5).unwrap(),
            gauss_linear_direct(1, &qi(1), 1, 5).unwrap()
        );
        assert!(gauss_linear(3, &q(1, 2), 1, 9).unwrap().is_zero());
        assert!(gauss_linear_direct(3, &q(1, 2), 1, 9).unwrap().is_zero());
        assert!(gauss_linear(3, &qi(1), 1, 8).is_err());
    }

    #[test]
    fn unknot_two_paths() {
        for (r, s) in [(5, 1), (7, 5), (9, 1), (11, 13)] {
            let ctx = RootContext::new(r, s).unwrap();
            let plus = f_unknot(1, &ctx).unwrap();
            let minus = f_unknot(-1, &ctx).unwrap();
            assert!(close(plus.exact.eval_complex(), plus.closed, 1e-10));
            assert!(close(minus.exact.eval_complex(), minus.closed, 1e-10));
            let ratio = plus.closed / minus.closed;
            assert!((ratio.norm() - 1.0).abs() < 1e-12);
            assert_eq!(&plus.exact * &plus.exact.invert().unwrap(), CycloNumber::one());
        }
    }

    #[test]
    fn reciprocity_examples() {
        let f = QuadraticFormZ { b: vec![vec![2]], psi: vec![qi(0)] };
        let (l, r) = reciprocity(&f, 3).unwrap();
        assert!(close(l, r, 1e-9));
        let f = QuadraticFormZ { b: vec![vec![1]], psi: vec![qi(0)] };
        assert!(reciprocity(&f, 1).is_err());
        let f = QuadraticFormZ { b: vec![vec![2]], psi: vec![qi(0)] };
        let (l, r) = reciprocity(&f, 1).unwrap();
        assert!(close(l, Complex64::new(1.0, 0.0), 1e-12) && close(l, r, 1e-9));
        let f = QuadraticFormZ { b: vec![vec![1, 2], vec![1, 1]], psi: vec![qi(0), qi(0)] };
        assert!(matches!(reciprocity(&f, 2), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn high_rank_examples() {
        let h = gauss_high_rank(&vec![vec![1]], 5).unwrap();
        assert!((h.closed.0 - 5f64.sqrt()).abs() < 1e-12);
        let h = gauss_high_rank(&vec![vec![1]], 3).unwrap();
        assert!((h.closed.1 - 3f64.sqrt()).abs() < 1e-12 && h.closed.0.abs() < 1e-12);
        let h = gauss_high_rank(&vec![vec![1, 0], vec![0, 2]], 5).unwrap();
        assert!((h.closed.0 - h.brute.0).abs() < 1e-9 && (h.closed.1 - h.brute.1).abs() < 1e-9);
        assert!(gauss_high_rank(&vec![vec![3]], 9).is_err());
    }

    #[test]
    fn exact_square_roots() {
        let s3 = sqrt_odd(3).unwrap();
        assert_eq!(s3.conductor(), 12);
        assert_eq!(&s3 * &s3, CycloNumber::from_int(3));
        assert!(close(s3.eval_complex(), Complex64::new(3f64.sqrt(), 0.0), 1e-12));
        let s5 = sqrt_odd(5).unwrap();
        assert_eq!(s5.conductor(), 5);
        assert!(close(s5.eval_complex(), Complex64::new(5f64.sqrt(), 0.0), 1e-12));
    }
}
