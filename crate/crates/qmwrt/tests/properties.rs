//! Property tests over the public API, each against an independent oracle.

use std::collections::HashSet;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use qmwrt::cyclotomic::{cyclotomic_poly, CycloNumber};
use qmwrt::false_theta::{
    eichler_limit, l_value, phi_basis, psi_basis, t_phase, PeriodicFunction,
};
use qmwrt::gauss_sums::{gauss_brute, gauss_linear};
use qmwrt::matrix::det;
use qmwrt::number_theory::{
    dedekind_sum, euler_phi, gcd, jacobi, moebius, normalize_s, q, qi, RationalMod1, RootContext, Q,
};
use qmwrt::seifert::{
    count_nonabelian, even_first, nonabelian_connections, rotation_cs_lift, rotation_numbers,
    SeifertData,
};
use qmwrt::wrt::{closed_prefactor, gauss_2pr, tau_from_prefactored, wrt_brute_surgery, wrt_seifert_closed, Normalization};

fn odd(lo: i64, hi: i64) -> impl Strategy<Value = i64> {
    (lo / 2..=(hi - 1) / 2).prop_map(|k| 2 * k + 1)
}

fn pow_mod(mut b: i64, mut e: i64, m: i64) -> i64 {
    let mut acc = 1i64;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn is_prime(n: i64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// `((x))`: sawtooth, zero on integers.
fn sawtooth(x: &Q) -> Q {
    if x.is_integer() {
        Q::zero()
    } else {
        x - x.floor() - q(1, 2)
    }
}

fn dedekind_direct(h: i64, k: i64) -> Q {
    (1..k).map(|i| sawtooth(&q(i, k)) * sawtooth(&q(h * i, k))).sum()
}

mod number_theory {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn jacobi_multiplicative(a in -500i64..500, b in -500i64..500, n in odd(1, 999)) {
            let lhs = jacobi(a, n).unwrap() * jacobi(b, n).unwrap();
            prop_assert_eq!(lhs, jacobi(a * b, n).unwrap());
        }

        #[test]
        fn jacobi_is_euler_criterion_at_primes(a in -1000i64..1000, p in odd(3, 997).prop_filter("prime", |p| is_prime(*p))) {
            let e = pow_mod(a, (p - 1) / 2, p);
            let want = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
            prop_assert_eq!(jacobi(a, p).unwrap(), want);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn dedekind_reciprocity((h, k) in (1i64..300, 1i64..300).prop_filter("coprime", |(h, k)| gcd(*h, *k) == 1)) {
            let lhs = dedekind_sum(h, k).unwrap() + dedekind_sum(k, h).unwrap();
            let rhs = q(-1, 4) + (q(k, h) + q(h, k) + q(1, h * k)) / qi(12);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn dedekind_matches_direct_sum((h, k) in (-400i64..400, 1i64..400).prop_filter("coprime", |(h, k)| gcd(*h, *k) == 1)) {
            prop_assert_eq!(dedekind_sum(h, k).unwrap(), dedekind_direct(h, k));
        }

        #[test]
        fn normalize_s_conditions(s in -2000i64..2000, r in odd(1, 501)) {
            match normalize_s(s, r) {
                Ok(t) => {
                    prop_assert!(t > 0);
                    prop_assert_eq!(t.rem_euclid(4), 1);
                    prop_assert_eq!((t - s).rem_euclid(r), 0);
                    prop_assert_eq!(gcd(t, 4 * r), 1);
                    prop_assert!(t <= 4 * r);
                }
                Err(_) => prop_assert!(gcd(s, r) != 1),
            }
        }

        #[test]
        fn mod1_stays_canonical(a in -1000i64..1000, b in 1i64..200, c in -1000i64..1000, d in 1i64..200) {
            let x = RationalMod1::new(&q(a, b));
            let y = RationalMod1::new(&q(c, d));
            for z in [&x + &y, -&x, x.clone()] {
                prop_assert!(!z.value().is_negative() && z.value() < &qi(1));
                prop_assert!(z.value().denom().is_positive());
            }
            prop_assert!(((&x + &y).value() - q(a, b) - q(c, d)).is_integer());
        }
    }

    #[test]
    fn moebius_divisor_sums() {
        for n in 1..=1000u64 {
            let sum: i32 = (1..=n).filter(|d| n % d == 0).map(moebius).sum();
            assert_eq!(sum, (n == 1) as i32, "n = {n}");
        }
    }
}

mod cyclotomic {
    use super::*;

    fn element(d: u64) -> impl Strategy<Value = CycloNumber> {
        prop::collection::vec((0..d as i64, -6i64..=6, 1i64..=4), 1..7)
            .prop_map(move |ts| CycloNumber::from_terms(d, ts.into_iter().map(|(k, n, m)| (k, q(n, m)))))
    }

    fn triple() -> impl Strategy<Value = (CycloNumber, CycloNumber, CycloNumber)> {
        prop_oneof![Just(12u64), Just(60u64), Just(420u64)].prop_flat_map(|d| (element(d), element(d), element(d)))
    }

    /// A vanishing sum `Σ_j ζ_D^{k + jD/p}` for a prime `p | D`.
    fn zero_sum(d: u64, k: i64, p: u64) -> CycloNumber {
        CycloNumber::from_terms(d, (0..p as i64).map(|j| (k + j * (d / p) as i64, qi(1))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn field_axioms((x, y, z) in triple()) {
            prop_assert!(&(&x * &y) * &z == &x * &(&y * &z));
            prop_assert!(&(&x + &y) + &z == &x + &(&y + &z));
            prop_assert!(&x * &(&y + &z) == &(&x * &y) + &(&x * &z));
            prop_assert!(&x * &y == &y * &x);
            if !x.is_zero() {
                prop_assert!(&x * &x.invert().unwrap() == CycloNumber::one());
            }
        }

        #[test]
        fn power_basis_linear_and_idempotent((x, y, _) in triple(), c in -5i64..5) {
            let d = x.conductor();
            let px = x.to_power_basis();
            let back = CycloNumber::from_terms(d, px.iter().enumerate().map(|(k, c)| (k as i64, c.clone())));
            prop_assert_eq!(back.to_power_basis(), px.clone());
            let py = y.to_power_basis();
            let sum: Vec<Q> = px.iter().zip(&py).map(|(a, b)| a + b).collect();
            prop_assert_eq!((&x + &y).to_power_basis(), sum);
            let scaled: Vec<Q> = px.iter().map(|a| a * qi(c)).collect();
            prop_assert_eq!(x.scale(&qi(c)).to_power_basis(), scaled);
        }

        #[test]
        fn equality_agrees_with_numerics((x, y, _) in triple(), k in 0i64..420, pick in 0usize..3, same in any::<bool>()) {
            let d = x.conductor();
            let primes: Vec<u64> = [2u64, 3, 5, 7].into_iter().filter(|p| d % p == 0).collect();
            let other = if same { &x + &zero_sum(d, k, primes[pick % primes.len()]) } else { y };
            let numeric = (x.eval_complex() - other.eval_complex()).norm() < 1e-9;
            prop_assert_eq!(x == other, numeric);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn integer_coefficients_are_integral(d in 1u64..200, ts in prop::collection::vec((0i64..400, -20i64..20), 0..10)) {
            let x = CycloNumber::from_terms(d, ts.into_iter().map(|(k, c)| (k, qi(c))));
            prop_assert!(x.is_integral());
        }
    }

    /// Remainder of `num` modulo the monic `den`.
    fn poly_rem(mut num: Vec<i64>, den: &[i64]) -> Vec<i64> {
        let m = den.len() - 1;
        assert_eq!(den[m], 1);
        while num.len() > m {
            let c = num.pop().unwrap();
            let shift = num.len() - m;
            for (i, &b) in den[..m].iter().enumerate() {
                num[shift + i] -= c * b;
            }
        }
        num
    }

    #[test]
    fn cyclotomic_polynomials() {
        for d in 1..=200u64 {
            let p = cyclotomic_poly(d);
            assert_eq!(p.degree() as u64, euler_phi(d), "D = {d}");
            let mut xd = vec![0i64; d as usize + 1];
            xd[0] = -1;
            xd[d as usize] = 1;
            assert!(poly_rem(xd, &p.coeffs).iter().all(|c| *c == 0), "D = {d}");
        }
    }
}

mod gauss {
    use super::*;

    fn coprime_pair() -> impl Strategy<Value = (i64, i64)> {
        (odd(1, 99), -400i64..400).prop_filter("coprime", |(r, s)| gcd(*r, *s) == 1)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn norm_is_r((r, s) in coprime_pair()) {
            let g = gauss_brute(s, r);
            prop_assert!(&g * &g.conj() == CycloNumber::from_int(r));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn multiplicative_with_jacobi_sign(
            (r1, r2, s) in (odd(3, 31), odd(3, 31), -100i64..100)
                .prop_filter("coprime", |(a, b, s)| gcd(*a, *b) == 1 && gcd(*s, a * b) == 1)
        ) {
            let whole = gauss_brute(s, r1 * r2).eval_complex();
            let sign = (jacobi(r1, r2).unwrap() * jacobi(r2, r1).unwrap()) as f64;
            let parts = gauss_brute(s, r1).eval_complex() * gauss_brute(s, r2).eval_complex() * sign;
            prop_assert!((whole - parts).norm() < 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn linear_term_by_direct_summation(p in -30i64..30, two_a in -60i64..60, s in -50i64..50, r in odd(1, 45)) {
            prop_assume!(gcd(s, r) == 1);
            let direct: Complex64 = (0..r)
                .map(|n| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (s * (p * n * n + two_a * n)).rem_euclid(r) as f64 / r as f64))
                .sum();
            let x = gauss_linear(p, &q(two_a, 2), s, r).unwrap().eval_complex();
            prop_assert!((x - direct).norm() < 1e-9, "{} vs {}", x, direct);
        }
    }
}

fn seifert_data() -> impl Strategy<Value = SeifertData> {
    let fiber = (2i64..9, -8i64..9).prop_filter("coprime", |(p, q)| *q != 0 && gcd(*p, *q) == 1);
    (-2i64..3, prop::collection::vec(fiber, 1..5)).prop_filter_map("e != 0", |(b, fs)| {
        let d = SeifertData::new(b, &fs).ok()?;
        (!d.euler().is_zero()).then_some(d)
    })
}

fn brieskorn_triples(max_product: i64) -> Vec<[i64; 3]> {
    let mut out = vec![];
    for a in 2..=max_product {
        for b in a + 1..=max_product / a {
            for c in b + 1..=max_product / (a * b) {
                if gcd(a, b) == 1 && gcd(a, c) == 1 && gcd(b, c) == 1 {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

mod seifert {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn linking_determinant_is_homology_order(d in seifert_data()) {
            let inv = d.invariants().unwrap();
            prop_assert_eq!(qi(inv.h), (&inv.e * qi(inv.p)).abs());
            prop_assert_eq!(det(&d.linking_matrix()).abs(), inv.h.into());
        }
    }

    fn prime_power(n: i64) -> bool {
        (2..=n).filter(|d| n % d == 0 && is_prime(*d)).count() == 1
    }

    /// `(1,1,1)` always has `CS ≡ −χ²/4e`; it is the only rotation number
    /// with that value when every `p_j` is a prime power. A composite `p_j`
    /// admits further square roots of the same residue, e.g. `(1,1,6)` for
    /// `(2,3,35)`.
    #[test]
    fn geometric_value_among_rotation_numbers() {
        let mut shared = 0;
        for p in brieskorn_triples(1000) {
            let d = SeifertData::brieskorn(&p).unwrap();
            let inv = d.invariants().unwrap();
            let target = RationalMod1::new(&(-(&inv.chi * &inv.chi) / (qi(4) * &inv.e)));
            let conns = nonabelian_connections(even_first(p)).unwrap();
            assert_eq!(conns.len() as i64, count_nonabelian(p), "{p:?}");
            let hits: Vec<_> = rotation_numbers(even_first(p))
                .into_iter()
                .filter(|a| RationalMod1::new(&rotation_cs_lift(even_first(p), *a)) == target)
                .collect();
            assert!(hits.contains(&[1, 1, 1]), "{p:?}");
            if p.iter().all(|x| prime_power(*x)) {
                assert_eq!(hits, vec![[1, 1, 1]], "{p:?}");
            } else if hits.len() > 1 {
                shared += 1;
            }
        }
        assert!(shared > 0);
    }
}

mod false_theta {
    use super::*;

    fn basis() -> impl Strategy<Value = PeriodicFunction> {
        let phi = prop::sample::select(brieskorn_triples(400)).prop_flat_map(|p| {
            ((1..p[0]), (1..p[1]), (1..p[2])).prop_map(move |(a, b, c)| phi_basis(p, [a, b, c]).unwrap())
        });
        let psi = (2i64..60).prop_flat_map(|p| (1..p).prop_map(move |a| psi_basis(p, a).unwrap()));
        prop_oneof![phi, psi]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn odd_and_mean_zero(f in basis()) {
            let p2 = 2 * f.half_period();
            prop_assert_eq!(f.values().iter().sum::<i64>(), 0);
            for l in -p2..p2 {
                prop_assert_eq!(f.at(-l), -f.at(l));
                prop_assert_eq!(f.at(l + p2), f.at(l));
            }
        }

        #[test]
        fn limit_at_zero_is_l_value(f in basis()) {
            prop_assert!(eichler_limit(&f, &Q::zero()) == CycloNumber::from_rational(l_value(&f, 0)));
        }
    }

    #[test]
    fn table_count_matches_connection_count() {
        for p in brieskorn_triples(1000) {
            let mut tables = HashSet::new();
            for a in 1..p[0] {
                for b in 1..p[1] {
                    for c in 1..p[2] {
                        let f = phi_basis(p, [a, b, c]).unwrap();
                        let v = f.values().to_vec();
                        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
                        if !tables.contains(&neg) {
                            tables.insert(v);
                        }
                    }
                }
            }
            assert_eq!(tables.len() as i64, count_nonabelian(p), "{p:?}");
        }
    }

    #[test]
    fn t_phase_is_minus_cs() {
        for p in brieskorn_triples(500) {
            let p = even_first(p);
            for a in rotation_numbers(p) {
                // T = e^{πi·t_phase} = e^{−2πi·CS}
                let sum = t_phase(p, a) / qi(2) + rotation_cs_lift(p, a);
                assert!(sum.is_integer(), "{p:?} {a:?}");
            }
        }
    }
}

mod wrt {
    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn prefactor_cancels_gauss_sum(big_p in 1i64..60, r in odd(1, 41), s in 0i64..100) {
            let s = 4 * s + 1;
            prop_assume!(gcd(s, r) == 1 && gcd(s, big_p) == 1);
            let ctx = RootContext::new(r, s).unwrap();
            let g = gauss_2pr(big_p, &ctx).eval_complex();
            let x = g * closed_prefactor(big_p, &ctx).unwrap() * 2.0;
            prop_assert!((x - Complex64::one()).norm() < 1e-10, "{}", x);
        }
    }

    #[test]
    fn orientation_reversal_conjugates() {
        let cases = [
            SeifertData::new(1, &[(2, 1), (3, 1), (5, 1)]).unwrap(),
            SeifertData::new(1, &[(2, 1), (3, 1), (3, 1)]).unwrap(),
            SeifertData::new(-1, &[(2, -1), (3, -1), (9, -1)]).unwrap(),
            SeifertData::new(1, &[(3, 1), (5, 1)]).unwrap(),
            SeifertData::new(2, &[(2, 1), (3, 1), (5, 1)]).unwrap(),
        ];
        let mut n = 0;
        for d in &cases {
            for (r, s) in [(5, 1), (7, 5)] {
                let ctx = RootContext::new(r, s).unwrap();
                let v = wrt_seifert_closed(d, &ctx).unwrap();
                let Normalization::Prefactored(delta) = v.normalization.clone() else { unreachable!() };
                let tau = tau_from_prefactored(v.exact.as_ref().unwrap(), &delta, &ctx).eval_complex();
                let brute = wrt_brute_surgery(&d.reversed(), &ctx).unwrap().numeric;
                assert!((brute - tau.conj()).norm() < 1e-9, "{d} r={r} s={s}: {brute} vs {}", tau.conj());
                n += 1;
            }
        }
        assert_eq!(n, 10);
    }
}
