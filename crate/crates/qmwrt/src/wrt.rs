//! WRT invariants of Seifert manifolds at `ξ = e^{2πis/r}`: exact closed
//! forms, the lens space formula, and a colored-Jones surgery oracle.

use std::f64::consts::FRAC_PI_4;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cyclotomic::{inv_root_difference, CycloNumber, IntAccumulator};
use crate::error::{invalid, Error, Result};
use crate::gauss_sums::{f_unknot, quantum_int, sqrt_odd};
use crate::matrix::inertia;
use crate::number_theory::{gcd, jacobi, mod_inverse, q, qi, RootContext, Q};
use crate::seifert::{abelian_connections, FlatConnection, QhsFamily, SeifertData};

/// Which quantity a [`WrtValue`] holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `τ_M(ξ)`.
    Tau,
    /// `W_M(ξ) = √H (H/s)(ξ − 1)τ_M(ξ)`.
    W,
    /// `ξ^Δ (ξ − 1)τ_M(ξ)` with the recorded `Δ`.
    Prefactored(Q),
}

#[derive(Clone, Debug)]
pub struct WrtValue {
    pub exact: Option<CycloNumber>,
    pub numeric: Complex64,
    pub normalization: Normalization,
}

impl WrtValue {
    pub fn from_exact(x: CycloNumber, normalization: Normalization) -> Self {
        WrtValue {
            numeric: x.eval_complex(),
            exact: Some(x),
            normalization,
        }
    }

    pub fn from_numeric(z: Complex64, normalization: Normalization) -> Self {
        WrtValue {
            exact: None,
            numeric: z,
            normalization,
        }
    }
}

/// `ξ^x = e^{2πisx/r}`.
pub fn xi_pow(ctx: &RootContext, x: &Q) -> CycloNumber {
    CycloNumber::exp_2pi_i(&(x * q(ctx.s, ctx.r)))
}

/// `ξ̃^x = e^{−2πirx/s}`.
pub fn xi_tilde_pow(ctx: &RootContext, x: &Q) -> CycloNumber {
    CycloNumber::exp_2pi_i(&(x * q(-ctx.r, ctx.s)))
}

/// `1/(ξ − 1) = ξ^{−1/2}/(ξ^{1/2} − ξ^{−1/2})`, with `ξ^{1/2} = ζ_{4r}^{2s}`.
fn inv_xi_minus_one(ctx: &RootContext) -> CycloNumber {
    let d = 4 * ctx.r as u64;
    &CycloNumber::root_power(d, -2 * ctx.s) * &inv_root_difference(d, 2 * ctx.s).expect("r > 1")
}

fn xi_minus_one(ctx: &RootContext) -> CycloNumber {
    &xi_pow(ctx, &qi(1)) - &CycloNumber::one()
}

type Sparse = Vec<(i64, i128)>;

fn sparse_mul(a: &Sparse, b: &Sparse, d: i64) -> Sparse {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &(i, x) in a {
        for &(j, y) in b {
            out.push(((i + j).rem_euclid(d), x * y));
        }
    }
    out
}

/// `ζ^c − ζ^{−c}`.
fn difference(c: i64, d: i64) -> Sparse {
    vec![(c.rem_euclid(d), 1), ((-c).rem_euclid(d), -1)]
}

/// `r/(ζ_D^a − ζ_D^{−a})` where `ζ_D^{2a} = ξ^n` has order `r/gcd(n, r)`.
fn scaled_inverse(a: i64, n: i64, r: i64, d: i64) -> Sparse {
    let order = r / gcd(n, r);
    let mult = (r / order) as i128;
    (1..order)
        .map(|k| ((a + 2 * a * k).rem_euclid(d), mult * k as i128))
        .collect()
}

/// `Σ_{n mod 2Nr} ζ_{4Nr}^{s n²}`, the conjugate of `G = Σ ξ^{−n²/4N}`.
fn gauss_conj_acc(big_n: i64, ctx: &RootContext) -> IntAccumulator {
    let d = 4 * big_n * ctx.r;
    let mut acc = IntAccumulator::new(d as u64);
    for n in 0..2 * big_n * ctx.r {
        let k = (ctx.s as i128 * (n as i128 * n as i128)).rem_euclid(d as i128) as i64;
        acc.add(k, 1);
    }
    acc
}

/// `G = Σ_{n mod 2Pr} ξ^{−n²/4P}` exactly.
pub fn gauss_2pr(big_p: i64, ctx: &RootContext) -> CycloNumber {
    gauss_conj_acc(big_p, ctx).finish(&BigInt::one()).conj()
}

/// `|G|² = 2Pr·gcd(s, P)`.
pub fn gauss_2pr_norm(big_p: i64, ctx: &RootContext) -> i64 {
    2 * big_p * ctx.r * gcd(ctx.s, big_p)
}

/// `(Pr/s) e^{πi/4}/(2√(2Pr))`, the printed prefactor of the closed form.
pub fn closed_prefactor(big_p: i64, ctx: &RootContext) -> Result<Complex64> {
    let j = jacobi(big_p * ctx.r, ctx.s)? as f64;
    let n = (2 * big_p * ctx.r) as f64;
    Ok(Complex64::from_polar(j / (2.0 * n.sqrt()), FRAC_PI_4))
}

/// Least `k ≥ 0` with `gcd(s + 4rk, P) = 1`.
fn coprime_shift(ctx: &RootContext, big_p: i64) -> i64 {
    (0..)
        .find(|k| gcd(ctx.s + 4 * ctx.r * k, big_p) == 1)
        .expect("a coprime residue exists")
}

fn pairwise_coprime(p: &[i64]) -> bool {
    (0..p.len()).all(|i| (i + 1..p.len()).all(|j| gcd(p[i], p[j]) == 1))
}

/// `ξ^{φ/4−1/2}(ξ − 1)τ_M(ξ)` for Seifert data with `e ≠ 0`.
///
/// Pairwise coprime `p_j` use the single sum over `n mod 2Pr`; otherwise
/// integral framings `q_j = ±1` use a sum over the colors of the central
/// vertex. Both sums are taken at `s` prime to `P`, moving `s` by a multiple
/// of `4r` if needed. Data with `e < 0` are reduced to `e > 0` through
/// `v(M) = −conj(v(−M))`.
pub fn wrt_seifert_closed(d: &SeifertData, ctx: &RootContext) -> Result<WrtValue> {
    let inv = d.invariants()?;
    if inv.e.is_zero() {
        return Err(Error::Unsupported("e = 0 is not a rational homology sphere".into()));
    }
    if d.m() == 0 {
        return Err(Error::Unsupported(
            "no exceptional fibers; use the lens space formula".into(),
        ));
    }
    let delta = &inv.phi / qi(4) - q(1, 2);
    let big_p = d.big_p();
    if gcd(ctx.s, big_p) != 1 {
        // τ depends on s only mod 4r
        let k = coprime_shift(ctx, big_p);
        let lifted = RootContext::new(ctx.r, ctx.s + 4 * ctx.r * k)?;
        let v = wrt_seifert_closed(d, &lifted)?.exact.expect("closed form is exact");
        let x = &CycloNumber::exp_2pi_i(&(-&inv.phi * qi(k))) * &v;
        return Ok(WrtValue::from_exact(x, Normalization::Prefactored(delta)));
    }
    if inv.e.is_negative() {
        let v = wrt_seifert_closed(&d.reversed(), ctx)?;
        let x = -v.exact.expect("closed form is exact").conj();
        return Ok(WrtValue::from_exact(x, Normalization::Prefactored(delta)));
    }
    let p: Vec<i64> = d.fibers.iter().map(|f| f.p).collect();
    let x = if pairwise_coprime(&p) {
        single_sum(&p, inv.h, ctx)
    } else if d.integral_framings() {
        multi_sum(d, ctx)?
    } else {
        return Err(Error::Unsupported(format!(
            "{d}: fiber orders are not coprime and framings are not integral"
        )));
    };
    Ok(WrtValue::from_exact(x, Normalization::Prefactored(delta)))
}

/// `Ŵ/(2G)` with `Ŵ = Σ_{n mod 2Pr, r∤n} ξ^{−Hn²/4P} Π_j(ξ^{n/2p_j} − ξ^{−n/2p_j})
/// /(ξ^{n/2} − ξ^{−n/2})^{m−2}`.
fn single_sum(p: &[i64], h: i64, ctx: &RootContext) -> CycloNumber {
    let (r, s) = (ctx.r, ctx.s);
    let big_p: i64 = p.iter().product();
    let d = 4 * big_p * r;
    let k_exp = p.len() as i64 - 2;
    let n_max = 2 * big_p * r;
    let chunks: Vec<IntAccumulator> = (0..n_max)
        .into_par_iter()
        .fold(
            || IntAccumulator::new(d as u64),
            |mut acc, n| {
                if n % r == 0 {
                    return acc;
                }
                let e0 = ((-(s as i128) * h as i128 * (n as i128) * (n as i128)).rem_euclid(d as i128)) as i64;
                let mut terms: Sparse = vec![(e0, 1)];
                for &pj in p {
                    terms = sparse_mul(&terms, &difference(2 * s * n * (big_p / pj), d), d);
                }
                let a = (2 * s * big_p * n).rem_euclid(d);
                if k_exp < 0 {
                    for _ in 0..-k_exp {
                        terms = sparse_mul(&terms, &difference(a, d), d);
                    }
                } else {
                    let inv = scaled_inverse(a, n, r, d);
                    for _ in 0..k_exp {
                        terms = sparse_mul(&terms, &inv, d);
                    }
                }
                for (k, c) in terms {
                    acc.add(k, c);
                }
                acc
            },
        )
        .collect();
    let mut w = IntAccumulator::new(d as u64);
    for c in &chunks {
        w.merge(c);
    }
    // 1/(2G) = Ḡ/(2|G|²)
    let prod = w.mul_reduced(&gauss_conj_acc(big_p, ctx));
    let den = BigInt::from(2 * gauss_2pr_norm(big_p, ctx)) * BigInt::from(r).pow(k_exp.max(0) as u32);
    prod.finish(&den)
}

/// Central-color sum for integral framings `p'_j = p_j q_j`:
/// `−(−1)^{b₋} e^{πi(Σ sign p'_j − σ − 1)/4}/(2G) · Σ_{n₀ mod 2r, r∤n₀}
/// ξ^{bn₀²/4}/(ξ^{n₀/2} − ξ^{−n₀/2})^{m−2} Π_j Σ_{n_j mod |p'_j|} ξ^{−x²/4p'_j}(ξ^{x/2p'_j} − ξ^{−x/2p'_j})`
/// with `x = n₀ + 2rn_j`.
fn multi_sum(d: &SeifertData, ctx: &RootContext) -> Result<CycloNumber> {
    let (r, s) = (ctx.r, ctx.s);
    let fr = d.leg_framings()?;
    let big_p: i64 = d.fibers.iter().map(|f| f.p).product();
    let dd = {
        let base = 4 * big_p * r;
        if base % 8 == 0 {
            base
        } else {
            2 * base
        }
    };
    // ξ^x = ζ_dd^{s·x·u} with u = dd/r
    let u = dd / r;
    let b = d.b;
    let k_exp = fr.len() as i64 - 2;
    let mut acc = IntAccumulator::new(dd as u64);
    for n0 in 0..2 * r {
        if n0 % r == 0 {
            continue;
        }
        let mut terms: Sparse = vec![((s * b * n0 * n0 * (u / 4)).rem_euclid(dd), 1)];
        let a = s * n0 * (u / 2);
        if k_exp < 0 {
            for _ in 0..-k_exp {
                terms = sparse_mul(&terms, &difference(a, dd), dd);
            }
        } else {
            let inv = scaled_inverse(a, n0, r, dd);
            for _ in 0..k_exp {
                terms = sparse_mul(&terms, &inv, dd);
            }
        }
        for &pp in &fr {
            let ap = pp.abs();
            let mut leg: Sparse = Vec::new();
            for nj in 0..ap {
                let x = n0 + 2 * r * nj;
                // ξ^{−x²/4p'} and ξ^{±x/2p'}; u is a multiple of 4|p'|
                let e0 = (-(s as i128) * (x as i128) * (x as i128) * (u / (4 * pp)) as i128)
                    .rem_euclid(dd as i128) as i64;
                let c = s * x * (u / (2 * pp));
                leg.push(((e0 + c).rem_euclid(dd), 1));
                leg.push(((e0 - c).rem_euclid(dd), -1));
            }
            terms = compact(sparse_mul(&terms, &leg, dd));
        }
        for (k, c) in terms {
            acc.add(k, c);
        }
    }
    let m = surgery_inertia(d)?;
    let sig = m.0 as i64 - m.1 as i64;
    let sign_sum: i64 = fr.iter().map(|x| x.signum()).sum();
    let negate = m.1 % 2 == 0; // −(−1)^{b₋}
    acc.rotate((dd / 8) * s * (sign_sum - sig - 1), negate);
    let gbar = gauss_conj_acc(big_p, ctx);
    let gbar = if dd == 4 * big_p * r {
        gbar
    } else {
        embed_acc(&gbar, dd)
    };
    let prod = acc.mul_reduced(&gbar);
    let den = BigInt::from(2 * gauss_2pr_norm(big_p, ctx)) * BigInt::from(r).pow(k_exp.max(0) as u32);
    Ok(prod.finish(&den))
}

fn compact(v: Sparse) -> Sparse {
    let mut m = std::collections::HashMap::new();
    for (k, c) in v {
        *m.entry(k).or_insert(0i128) += c;
    }
    m.into_iter().filter(|(_, c)| *c != 0).collect()
}

fn embed_acc(a: &IntAccumulator, d: i64) -> IntAccumulator {
    let mult = d / a.conductor() as i64;
    let mut out = IntAccumulator::new(d as u64);
    for (k, c) in a.sparse() {
        out.add(k * mult, c);
    }
    out
}

/// `(b₊, b₋, b₀)` of the symmetric surgery matrix.
pub fn surgery_inertia(d: &SeifertData) -> Result<(usize, usize, usize)> {
    Ok(inertia(&d.surgery_matrix()?))
}

/// `ξ^{−Δ}/(ξ − 1)` applied to a prefactored value gives `τ`.
pub fn tau_from_prefactored(v: &CycloNumber, delta: &Q, ctx: &RootContext) -> CycloNumber {
    &(&xi_pow(ctx, &-delta) * v) * &inv_xi_minus_one(ctx)
}

/// `W = √H (H/s)(ξ − 1)τ`.
pub fn w_normalized(tau: &WrtValue, h: i64, ctx: &RootContext) -> Result<WrtValue> {
    if tau.normalization != Normalization::Tau {
        return invalid("w_normalized expects a tau value");
    }
    if gcd(ctx.s, h) != 1 {
        return Err(Error::Hypothesis(format!("gcd(s, H) = gcd({}, {h}) != 1", ctx.s)));
    }
    let j = jacobi(h, ctx.s)?;
    match &tau.exact {
        Some(t) if h % 2 == 1 => {
            let x = &(&sqrt_odd(h)? * &xi_minus_one(ctx)) * t;
            Ok(WrtValue::from_exact(x.scale(&qi(j as i64)), Normalization::W))
        }
        _ => {
            let xi = xi_minus_one(ctx).eval_complex();
            Ok(WrtValue::from_numeric(
                tau.numeric * xi * (h as f64).sqrt() * j as f64,
                Normalization::W,
            ))
        }
    }
}

/// `W_M(ξ)` from the closed form, for odd `|H|`.
pub fn w_closed(d: &SeifertData, ctx: &RootContext) -> Result<CycloNumber> {
    let v = wrt_seifert_closed(d, ctx)?;
    let h = d.invariants()?.h;
    if h % 2 == 0 {
        return Err(Error::Unsupported("even |H| has no exact square root here".into()));
    }
    let delta = match &v.normalization {
        Normalization::Prefactored(x) => x.clone(),
        _ => unreachable!(),
    };
    let j = jacobi(h, ctx.s)? as i64;
    let x = &xi_pow(ctx, &-delta) * &v.exact.expect("exact");
    Ok((&sqrt_odd(h)? * &x).scale(&qi(j)))
}

/// One label of the abelian decomposition.
#[derive(Clone, Debug)]
pub struct AbelianTerm {
    pub connection: FlatConnection,
    /// `W^{(a)}` as a function of its argument; evaluated at `ξ`.
    pub value: CycloNumber,
}

/// Closed form for `L(p,1)`:
/// `W = −ξ^{(5−p)/4} Σ_{a mod p} e^{2πi(r/s)(−s²a²/p)}(ξ^{−1/p}cos(4πsa/p) − 1)`,
/// together with the per-label terms after `a ↦ s*a`.
pub fn wrt_lens(p: i64, ctx: &RootContext) -> Result<(WrtValue, Vec<AbelianTerm>)> {
    if p < 1 || p % 2 == 0 {
        return invalid(format!("lens space L(p,1) needs odd p >= 1, got {p}"));
    }
    if gcd(ctx.s, p) != 1 {
        return Err(Error::Hypothesis(format!("gcd(s, p) = gcd({}, {p}) != 1", ctx.s)));
    }
    let (r, s) = (ctx.r, ctx.s);
    let xi_inv_p = xi_pow(ctx, &q(-1, p));
    let cos = |k: i64| -> CycloNumber {
        // cos(2πk/p)
        CycloNumber::from_terms(p as u64, [(k, q(1, 2)), (-k, q(1, 2))])
    };
    let mut sum = CycloNumber::zero();
    for a in 0..p {
        let phase = CycloNumber::root_power(p as u64, -(r * s % p) * a * a % p);
        let inner = &(&xi_inv_p * &cos(2 * s * a)) - &CycloNumber::one();
        sum += &(&phase * &inner);
    }
    let w = -(&xi_pow(ctx, &q(5 - p, 4)) * &sum);
    let conns = abelian_connections(QhsFamily::Lens(p), s)?;
    let terms = conns
        .into_iter()
        .enumerate()
        .map(|(a, c)| AbelianTerm {
            value: lens_label_term(p, a as i64, &|x: &Q| xi_pow(ctx, x)),
            connection: c,
        })
        .collect();
    Ok((WrtValue::from_exact(w, Normalization::W), terms))
}

/// `W^{(0)} = x^{(p−1)/4}(x^{−1/p} − 1)` and
/// `W^{(a)} = 2x^{(p−1)/4}(x^{−1/p}cos(4πa/p) − 1)` for a power map `x^·`.
pub fn lens_label_term(p: i64, a: i64, pow: &dyn Fn(&Q) -> CycloNumber) -> CycloNumber {
    let lead = pow(&q(p - 1, 4));
    let inv_p = pow(&q(-1, p));
    if a == 0 {
        return &lead * &(&inv_p - &CycloNumber::one());
    }
    let cos = CycloNumber::from_terms(p as u64, [(2 * a, q(1, 2)), (-2 * a, q(1, 2))]);
    (&lead * &(&(&inv_p * &cos) - &CycloNumber::one())).scale(&qi(2))
}

/// Prefactor `−ξ^{(3−p)/2}` with `W = −ξ^{(3−p)/2} Σ_a e^{2πi(r/s)CS[a]} W^{(a)}`.
pub fn lens_reconstruction_unit(p: i64, ctx: &RootContext) -> CycloNumber {
    -xi_pow(ctx, &q(3 - p, 2))
}

/// `s*` with `s·s* ≡ 1 (mod p)`.
pub fn s_star(s: i64, p: i64) -> Option<i64> {
    mod_inverse(s.rem_euclid(p), p)
}

/// Colored Jones polynomial of the Seifert surgery link at `q = ξ`:
/// `q^{b(n₀²−1)/4}/[n₀]^{m−1} Π_j q^{p'_j(n_j²−1)/4}[n₀n_j]`.
pub fn colored_jones_seifert_link(
    d: &SeifertData,
    colors: &[i64],
    ctx: &RootContext,
) -> Result<CycloNumber> {
    let fr = d.leg_framings()?;
    if colors.len() != fr.len() + 1 {
        return invalid(format!("need {} colors, got {}", fr.len() + 1, colors.len()));
    }
    let n0 = colors[0];
    let qq = |four_x: i64| CycloNumber::root_power(4 * ctx.r as u64, ctx.s * four_x);
    let mut j = qq(d.b * (n0 * n0 - 1));
    let qn0 = quantum_int(ctx, n0);
    let m = fr.len() as i64;
    j = &j * &qn0.pow(1 - m)?;
    for (pp, &nj) in fr.iter().zip(&colors[1..]) {
        j = &(&j * &qq(pp * (nj * nj - 1))) * &quantum_int(ctx, n0 * nj);
    }
    Ok(j)
}

/// Tuple limit from `QMWRT_MAX_COLORS`, default `10⁶`.
pub fn max_colors() -> u128 {
    std::env::var("QMWRT_MAX_COLORS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(1_000_000)
}

/// `F(L, ξ)` exactly, factoring the sum over leg colors.
fn surgery_sum_exact(d: &SeifertData, ctx: &RootContext) -> Result<CycloNumber> {
    let fr = d.leg_framings()?;
    let r = ctx.r;
    let m = fr.len() as i64;
    let qq = |four_x: i64| CycloNumber::root_power(4 * r as u64, ctx.s * four_x);
    let qint: Vec<CycloNumber> = (0..r * r).map(|n| quantum_int(ctx, n)).collect();
    let mut total = CycloNumber::zero();
    for n0 in 1..r {
        // [n₀]·[n₀]^{1−m} from the color weight and the Jones denominator
        let mut t = &qq(d.b * (n0 * n0 - 1)) * &qint[n0 as usize].pow(2 - m)?;
        for &pp in &fr {
            let mut leg = CycloNumber::zero();
            for nj in 1..r {
                let x = &(&qq(pp * (nj * nj - 1)) * &qint[(n0 * nj) as usize]) * &qint[nj as usize];
                leg += &x;
            }
            t = &t * &leg;
        }
        total += &t;
    }
    Ok(total)
}

/// `F(L, ξ)` as a floating-point sum over all `(r−1)^{m+1}` colorings.
fn surgery_sum_tuples(d: &SeifertData, ctx: &RootContext, limit: u128) -> Result<Complex64> {
    let fr = d.leg_framings()?;
    let r = ctx.r;
    let m = fr.len();
    let tuples = ((r - 1) as u128).pow(m as u32 + 1);
    if tuples > limit {
        return Err(Error::CostGuard { tuples, limit });
    }
    let qpow = |four_x: i64| Complex64::from_polar(1.0, std::f64::consts::TAU * ctx.s as f64 * four_x as f64 / (4 * r) as f64);
    let qint: Vec<Complex64> = (0..r * r).map(|n| quantum_int(ctx, n).eval_complex()).collect();
    let total = (1..r)
        .into_par_iter()
        .map(|n0| {
            let pre = qpow(d.b * (n0 * n0 - 1)) * qint[n0 as usize].powi(2 - m as i32);
            let mut sum = Complex64::new(0.0, 0.0);
            let mut idx = vec![1i64; m];
            loop {
                let mut t = pre;
                for (j, &nj) in idx.iter().enumerate() {
                    t *= qpow(fr[j] * (nj * nj - 1)) * qint[(n0 * nj) as usize] * qint[nj as usize];
                }
                sum += t;
                let mut k = 0;
                while k < m {
                    idx[k] += 1;
                    if idx[k] < r {
                        break;
                    }
                    idx[k] = 1;
                    k += 1;
                }
                if k == m {
                    break;
                }
            }
            sum
        })
        .reduce(|| Complex64::new(0.0, 0.0), |a, b| a + b);
    Ok(total)
}

/// `τ_M(ξ) = F(L)/(F(U⁺)^{b₊} F(U⁻)^{b₋})` by surgery on the Seifert link.
/// The exact value uses the factored color sum; the numeric value is the
/// plain sum over all colorings, guarded by `QMWRT_MAX_COLORS`.
pub fn wrt_brute_surgery(d: &SeifertData, ctx: &RootContext) -> Result<WrtValue> {
    wrt_brute_surgery_limited(d, ctx, max_colors())
}

pub fn wrt_brute_surgery_limited(d: &SeifertData, ctx: &RootContext, limit: u128) -> Result<WrtValue> {
    if ctx.r < 3 {
        return invalid("surgery oracle needs r >= 3");
    }
    let (bp, bm, b0) = surgery_inertia(d)?;
    if b0 > 0 {
        return Err(Error::Unsupported("degenerate linking matrix".into()));
    }
    let fp = f_unknot(1, ctx)?.exact;
    let fm = f_unknot(-1, ctx)?.exact;
    let norm = &fp.pow(bp as i64)? * &fm.pow(bm as i64)?;
    let norm_inv = norm.invert()?;
    let exact = &surgery_sum_exact(d, ctx)? * &norm_inv;
    let numeric = surgery_sum_tuples(d, ctx, limit)? / norm.eval_complex();
    Ok(WrtValue {
        exact: Some(exact),
        numeric,
        normalization: Normalization::Tau,
    })
}

/// `τ` of `L(p,1)` by surgery on the `p`-framed unknot.
pub fn lens_tau_surgery(p: i64, ctx: &RootContext) -> Result<CycloNumber> {
    let fp = f_unknot(1, ctx)?.exact;
    let qq = |four_x: i64| CycloNumber::root_power(4 * ctx.r as u64, ctx.s * four_x);
    let mut f = CycloNumber::zero();
    for n in 1..ctx.r {
        let qn = quantum_int(ctx, n);
        f += &(&qq(p * (n * n - 1)) * &(&qn * &qn));
    }
    Ok(&f * &fp.invert()?)
}

/// `|x − y|` of two complex values; convenience for reports.
pub fn distance(x: Complex64, y: Complex64) -> f64 {
    (x - y).norm()
}

/// Numeric `√H (H/s)`; `√H` positive.
pub fn sqrt_h_jacobi(h: i64, ctx: &RootContext) -> Result<f64> {
    Ok((h as f64).sqrt() * jacobi(h, ctx.s)? as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::false_theta::{eichler_limit, phi_basis};

    #[test]
    fn unknot_and_s3() {
        let ctx = RootContext::new(7, 1).unwrap();
        let d = SeifertData::lens(1).unwrap();
        let tau = wrt_brute_surgery(&d, &ctx).unwrap();
        assert!(tau.exact.unwrap() == CycloNumber::one());
        assert!((tau.numeric - 1.0).norm() < 1e-12);
        let (w, _) = wrt_lens(1, &ctx).unwrap();
        assert!(w.exact.unwrap() == xi_minus_one(&ctx));
    }

    #[test]
    fn closed_matches_surgery_poincare() {
        let d = SeifertData::new(1, &[(2, 1), (3, 1), (5, 1)]).unwrap();
        for (r, s) in [(5, 1), (7, 5), (3, 1)] {
            let ctx = RootContext::new(r, s).unwrap();
            let v = wrt_seifert_closed(&d, &ctx).unwrap();
            let delta = match &v.normalization {
                Normalization::Prefactored(x) => x.clone(),
                _ => unreachable!(),
            };
            let tau = tau_from_prefactored(v.exact.as_ref().unwrap(), &delta, &ctx);
            let brute = wrt_brute_surgery(&d, &ctx).unwrap();
            assert!(tau == brute.exact.clone().unwrap(), "r={r} s={s}");
            assert!((tau.eval_complex() - brute.numeric).norm() < 1e-9);
        }
    }

    #[test]
    fn brieskorn_237_at_7() {
        let d = SeifertData::brieskorn(&[2, 3, 7]).unwrap();
        let ctx = RootContext::new(7, 1).unwrap();
        let v = wrt_seifert_closed(&d, &ctx).unwrap().exact.unwrap();
        let f = phi_basis([2, 3, 7], [1, 1, 1]).unwrap();
        let rhs = eichler_limit(&f, &q(1, 7)).scale(&q(1, 2));
        assert!(v == rhs);
    }

    #[test]
    fn lens_against_surgery() {
        for p in [3, 5, 7] {
            for (r, s) in [(5, 1), (11, 13), (9, 1)] {
                let ctx = RootContext::new(r, s).unwrap();
                if gcd(s, p) != 1 {
                    continue;
                }
                let (w, terms) = wrt_lens(p, &ctx).unwrap();
                let tau = lens_tau_surgery(p, &ctx).unwrap();
                let h = p;
                let wb = (&(&sqrt_odd(h).unwrap() * &xi_minus_one(&ctx)) * &tau)
                    .scale(&qi(jacobi(h, s).unwrap() as i64));
                assert!(w.exact.clone().unwrap() == wb, "p={p} r={r} s={s}");
                let mut rec = CycloNumber::zero();
                for t in &terms {
                    rec += &(&CycloNumber::exp_2pi_i(&(&t.connection.cs_lift * q(r, s))) * &t.value);
                }
                assert!(&lens_reconstruction_unit(p, &ctx) * &rec == w.exact.unwrap());
            }
        }
    }

    fn tau_closed(d: &SeifertData, ctx: &RootContext) -> CycloNumber {
        let v = wrt_seifert_closed(d, ctx).unwrap();
        let Normalization::Prefactored(delta) = v.normalization.clone() else {
            unreachable!()
        };
        tau_from_prefactored(v.exact.as_ref().unwrap(), &delta, ctx)
    }

    #[test]
    fn closed_matches_surgery_other_presentations() {
        let cases = [
            SeifertData::new(1, &[(2, 1), (3, 1), (3, 1)]).unwrap(),
            SeifertData::new(-1, &[(2, -1), (3, -1), (9, -1)]).unwrap(),
            SeifertData::new(-1, &[(2, -1), (3, -1), (5, -1)]).unwrap(),
            SeifertData::brieskorn(&[2, 3, 7]).unwrap(),
            SeifertData::new(0, &[(2, 1), (5, 1), (5, -1), (3, 1)]).unwrap(),
            SeifertData::new(2, &[(2, 1), (3, 1), (5, 1), (7, 1)]).unwrap(),
            SeifertData::new(1, &[(3, 1), (5, 1)]).unwrap(),
            SeifertData::new(1, &[(3, 1), (3, 1), (3, 1), (3, 1)]).unwrap(),
            SeifertData::new(1, &[(3, 1), (3, 1)]).unwrap(),
            SeifertData::new(-2, &[(2, 1), (3, -1), (3, 1), (3, 1), (5, -1)]).unwrap(),
        ];
        for d in &cases {
            for (r, s) in [(3, 1), (5, 1), (7, 5), (9, 5), (3, 5), (5, 9)] {
                let ctx = RootContext::new(r, s).unwrap();
                let brute = wrt_brute_surgery(d, &ctx).unwrap();
                let tau = tau_closed(d, &ctx);
                assert!(tau == brute.exact.clone().unwrap(), "{d} r={r} s={s}");
                let ex = brute.exact.unwrap().eval_complex();
                assert!((ex - brute.numeric).norm() < 1e-8 * ex.norm().max(1.0), "{d} r={r} s={s} {ex} {}", brute.numeric);
            }
        }
    }

    #[test]
    fn closed_when_s_shares_factor_with_p() {
        let d = SeifertData::new(1, &[(2, 1), (3, 1), (5, 1)]).unwrap();
        for (r, s) in [(7, 5), (7, 25), (7, 45), (11, 45)] {
            let ctx = RootContext::new(r, s).unwrap();
            assert!(tau_closed(&d, &ctx) == wrt_brute_surgery(&d, &ctx).unwrap().exact.unwrap());
            let g = gauss_2pr(30, &ctx);
            let n = &g * &g.conj();
            assert!(n == CycloNumber::from_int(gauss_2pr_norm(30, &ctx)));
        }
    }

    #[test]
    fn cost_guard() {
        let d = SeifertData::new(1, &[(2, 1), (3, 1), (5, 1)]).unwrap();
        let ctx = RootContext::new(5, 1).unwrap();
        let e = wrt_brute_surgery_limited(&d, &ctx, 10).unwrap_err();
        assert!(matches!(e, Error::CostGuard { .. }));
    }
}
