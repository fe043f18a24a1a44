//! Executable checks of the quantum modularity statements for Seifert
//! manifolds: false theta identities, integrality, abelian decompositions,
//! saddle expansions, geometric relations and asymptotic residuals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cyclotomic::CycloNumber;
use crate::error::{invalid, Error, Result};
use crate::false_theta::{
    eichler_limit, eichler_limit_f64, phi_basis, phi_labels, psi_basis, psi_combination,
    s_matrix_phi, s_transform_residual, sqrt_r_over_is, trivial_series,
};
use crate::number_theory::{is_integer, q, qi, to_f64, RootContext, Q};
use crate::seifert::{
    abelian_connections, even_first, geometric_connection, geometric_rotation,
    rotation_cs_lift, ConnectionKind, FlatConnection, Geometry, QhsFamily, SeifertData,
};
use crate::wrt::{
    lens_reconstruction_unit, w_closed, wrt_brute_surgery, wrt_lens, wrt_seifert_closed,
    xi_pow, xi_tilde_pow, Normalization,
};

/// A manifold selected by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Manifold {
    Brieskorn([i64; 3]),
    Seifert(SeifertData),
    Qhs(QhsFamily),
}

impl Manifold {
    pub fn data(&self) -> Result<SeifertData> {
        match self {
            Manifold::Brieskorn(p) => SeifertData::brieskorn(p),
            Manifold::Seifert(d) => Ok(d.clone()),
            Manifold::Qhs(f) => f.data(),
        }
    }
}

impl fmt::Display for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Manifold::Brieskorn(p) => write!(f, "brieskorn:{},{},{}", p[0], p[1], p[2]),
            Manifold::Seifert(d) => {
                write!(f, "seifert:{}", d.b)?;
                for (i, x) in d.fibers.iter().enumerate() {
                    write!(f, "{}{}/{}", if i == 0 { ";" } else { "," }, x.p, x.q)?;
                }
                Ok(())
            }
            Manifold::Qhs(x) => write!(f, "{x}"),
        }
    }
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("not an integer: {s:?}")))
}

impl FromStr for Manifold {
    type Err = Error;

    /// `brieskorn:p1,p2,p3 | lens:p | seifert:b;p1/q1,... | ex:2-3-3 |
    /// ex:neg-2-3-9 | ex:family:p`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("unknown manifold syntax: {s:?}")))?;
        match kind {
            "brieskorn" => {
                let p: Vec<i64> = rest.split(',').map(parse_int).collect::<Result<_>>()?;
                if p.len() != 3 {
                    return invalid(format!("brieskorn needs three orders, got {}", p.len()));
                }
                let p = [p[0], p[1], p[2]];
                SeifertData::brieskorn(&p)?;
                Ok(Manifold::Brieskorn(p))
            }
            "lens" => {
                let p = parse_int(rest)?;
                if p < 1 || p % 2 == 0 {
                    return invalid(format!("lens space needs odd p >= 1, got {p}"));
                }
                Ok(Manifold::Qhs(QhsFamily::Lens(p)))
            }
            "seifert" => Ok(Manifold::Seifert(rest.parse()?)),
            "ex" => match rest {
                "2-3-3" => Ok(Manifold::Qhs(QhsFamily::Ex233)),
                "neg-2-3-9" => Ok(Manifold::Qhs(QhsFamily::ExNeg239)),
                _ => match rest.strip_prefix("family:") {
                    Some(p) => {
                        let p = parse_int(p)?;
                        QhsFamily::Family(p).data()?;
                        Ok(Manifold::Qhs(QhsFamily::Family(p)))
                    }
                    None => invalid(format!("unknown example {rest:?}")),
                },
            },
            _ => invalid(format!("unknown manifold syntax: {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// One named check; `tolerance = None` means exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub r: Option<i64>,
    pub s: Option<i64>,
    pub status: Status,
    pub tolerance: Option<f64>,
    pub evidence: Value,
}

fn c2j(z: Complex64) -> Value {
    json!([z.re, z.im])
}

impl Check {
    pub fn new(name: &str, ctx: Option<&RootContext>, ok: bool, tolerance: Option<f64>, evidence: Value) -> Self {
        Check {
            name: name.to_string(),
            r: ctx.map(|c| c.r),
            s: ctx.map(|c| c.s),
            status: Status::from_bool(ok),
            tolerance,
            evidence,
        }
    }

    /// Exact equality; a failure carries both sides exactly.
    pub fn exact(name: &str, ctx: Option<&RootContext>, lhs: &CycloNumber, rhs: &CycloNumber) -> Self {
        let ok = lhs == rhs;
        let (l, r) = (lhs.eval_complex(), rhs.eval_complex());
        let evidence = if ok {
            json!({ "value": c2j(l) })
        } else {
            json!({
                "lhs": c2j(l),
                "rhs": c2j(r),
                "lhs_exact": lhs.to_exact_repr(),
                "rhs_exact": rhs.to_exact_repr(),
            })
        };
        Check::new(name, ctx, ok, None, evidence)
    }

    pub fn numeric(name: &str, ctx: Option<&RootContext>, lhs: Complex64, rhs: Complex64, tol: f64) -> Self {
        let err = (lhs - rhs).norm();
        let ok = err <= tol;
        Check::new(
            name,
            ctx,
            ok,
            Some(tol),
            json!({ "lhs": c2j(lhs), "rhs": c2j(rhs), "error": err }),
        )
    }

    pub fn error(name: &str, ctx: Option<&RootContext>, e: &Error) -> Self {
        Check::new(name, ctx, false, None, json!({ "error": e.to_string() }))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub manifold: String,
    pub contexts: Vec<RootContext>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(manifold: impl Into<String>) -> Self {
        VerificationReport {
            manifold: manifold.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, c: Check) {
        if let (Some(r), Some(s)) = (c.r, c.s) {
            let ctx = RootContext { r, s };
            if !self.contexts.contains(&ctx) {
                self.contexts.push(ctx);
            }
        }
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        for c in other.checks {
            self.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    /// Per-name status, failing if any instance failed.
    pub fn summary(&self) -> BTreeMap<String, Status> {
        let mut m = BTreeMap::new();
        for c in &self.checks {
            let e = m.entry(c.name.clone()).or_insert(Status::Pass);
            if !c.passed() {
                *e = Status::Fail;
            }
        }
        m
    }

    pub fn to_json(&self) -> Value {
        json!({
            "manifold": self.manifold,
            "contexts": self.contexts,
            "summary": self.summary(),
            "passed": self.passed(),
            "checks": self.checks,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.manifold);
        for c in &self.checks {
            let at = match (c.r, c.s) {
                (Some(r), Some(s)) => format!(" r={r} s={s}"),
                _ => String::new(),
            };
            out += &format!("  {:<4} {}{}\n", c.status, c.name, at);
        }
        out += &format!("{} of {} checks passed\n", self.checks.len() - self.failures().len(), self.checks.len());
        out
    }
}

fn prefactored_delta(d: &SeifertData) -> Result<Q> {
    Ok(&d.invariants()?.phi / qi(4) - q(1, 2))
}

fn canonical_p(p: [i64; 3]) -> [i64; 3] {
    even_first(p)
}

fn spherical(p: [i64; 3]) -> bool {
    q(1, p[0]) + q(1, p[1]) + q(1, p[2]) > qi(1)
}

/// `½Φ̃^{(1,1,1)}(α)`, plus `x^{1/120}` for `Σ(2,3,5)`, as a function of the
/// power map `x^·`. At `α = s/r` with `x = ξ` this is `ξ^{φ/4−1/2}(ξ−1)τ`.
fn brieskorn_false_theta(p: [i64; 3], alpha: &Q, pow: &dyn Fn(&Q) -> CycloNumber) -> Result<CycloNumber> {
    let p = canonical_p(p);
    let half = eichler_limit(&phi_basis(p, [1, 1, 1])?, alpha).scale(&q(1, 2));
    if spherical(p) {
        if p != [2, 3, 5] {
            return Err(Error::Unsupported(format!("spherical triple {p:?}")));
        }
        return Ok(&half + &pow(&q(1, 120)));
    }
    Ok(half)
}

/// Exact check of `ξ^{φ/4−1/2}(ξ−1)τ = ½Φ̃^{(1,1,1)}(s/r)`, with the
/// additional `ξ^{1/120}` for `Σ(2,3,5)`.
pub fn brieskorn_identity(p: [i64; 3], ctx: &RootContext) -> Result<VerificationReport> {
    let d = SeifertData::brieskorn(&p)?;
    let mut rep = VerificationReport::new(Manifold::Brieskorn(p).to_string());
    let name = if spherical(p) { "poincare_identity" } else { "brieskorn_identity" };
    let lhs = match wrt_seifert_closed(&d, ctx) {
        Ok(v) => v.exact.expect("closed form is exact"),
        Err(e) => {
            rep.push(Check::error(name, Some(ctx), &e));
            return Ok(rep);
        }
    };
    let rhs = brieskorn_false_theta(p, &ctx.alpha(), &|x: &Q| xi_pow(ctx, x))?;
    rep.push(Check::exact(name, Some(ctx), &lhs, &rhs));
    Ok(rep)
}

/// `ξ^{CS[a]}·½Φ̃^a(s/r)` and whether it lies in `ℤ[ζ]`; the witness is the
/// power-basis coefficient list.
pub fn integrality_check(p: [i64; 3], a: [i64; 3], ctx: &RootContext) -> Result<(bool, Vec<Q>)> {
    let p = canonical_p(p);
    let f = phi_basis(p, a)?;
    let x = &xi_pow(ctx, &rotation_cs_lift(p, a)) * &eichler_limit(&f, &ctx.alpha()).scale(&q(1, 2));
    let pb = x.compress().to_power_basis();
    let ok = pb.iter().all(is_integer);
    Ok((ok, pb))
}

/// The three sums over `ℤ/r` and `ε ∈ {±1}³` built from
/// `F_ε(L) = P(L + Σ (ε_j+1)/2 · a_j/p_j)(L + 1 + Σ (ε_j−1)/2 · a_j/p_j)`.
pub fn phase_sum_checks(p: [i64; 3], a: [i64; 3], r: i64) -> Result<VerificationReport> {
    let ctx = RootContext::new(r, 1)?;
    let big_p = p[0] * p[1] * p[2];
    let mut first = CycloNumber::zero();
    let mut signed = [CycloNumber::zero(), CycloNumber::zero(), CycloNumber::zero()];
    let mut weighted = CycloNumber::zero();
    for mask in 0..8 {
        let eps: Vec<i64> = (0..3).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
        let sign = eps[0] * eps[1] * eps[2];
        let mut x = Q::zero();
        let mut y = qi(1);
        for j in 0..3 {
            x += q((eps[j] + 1) / 2 * a[j], p[j]);
            y += q((eps[j] - 1) / 2 * a[j], p[j]);
        }
        for l in 0..r {
            let f = qi(big_p) * (&x + qi(l)) * (&y + qi(l));
            if !is_integer(&f) {
                return Err(Error::Hypothesis(format!("F_eps({l}) = {f} is not an integer")));
            }
            let k = f.to_integer().to_i64().expect("small exponent").rem_euclid(r);
            let term = CycloNumber::root_power(r as u64, k);
            first += &term.scale(&qi(sign));
            for j in 0..3 {
                signed[j] += &term.scale(&qi(sign * eps[j]));
            }
            weighted += &term.scale(&qi(sign * l));
        }
    }
    let mut rep = VerificationReport::new(format!("phase-sums:{p:?}:{a:?}"));
    let zero = CycloNumber::zero();
    rep.push(Check::exact("phase_sum_vanishes", Some(&ctx), &first, &zero));
    for (j, x) in signed.iter().enumerate() {
        rep.push(Check::exact(&format!("signed_phase_sum_vanishes_{}", j + 1), Some(&ctx), x, &zero));
    }
    let w = weighted.scale(&q(1, 2 * r));
    let integral = w.is_integral();
    rep.push(Check::new(
        "weighted_phase_sum_integral",
        Some(&ctx),
        integral,
        None,
        json!({ "power_basis": w.to_power_basis().iter().map(|c| c.to_string()).collect::<Vec<_>>() }),
    ));
    Ok(rep)
}

/// Integrality of `P_A(ξ̃)` for every nonabelian saddle of a Brieskorn sphere.
pub fn saddle_integrality(p: [i64; 3], ctx: &RootContext) -> Result<VerificationReport> {
    let m = Manifold::Brieskorn(p);
    let mut rep = VerificationReport::new(m.to_string());
    for t in brieskorn_saddles(p, ctx, 0)?.into_iter().skip(1) {
        let pb = t.p_value.compress().to_power_basis();
        let ok = pb.iter().all(is_integer);
        let rot = match t.connection.kind {
            ConnectionKind::Nonabelian(a) => json!(a),
            _ => Value::Null,
        };
        rep.push(Check::new(
            "saddle_integrality",
            Some(ctx),
            ok,
            None,
            json!({ "rotation": rot, "power_basis_len": pb.len() }),
        ));
    }
    Ok(rep)
}

/// One label of an abelian decomposition,
/// `W^{(a)} = x^{e}(Σ_b c_b Ψ̃^{(b)}_P(α) + Σ_k d_k x^{k})`.
#[derive(Clone, Debug)]
pub struct SectorFormula {
    pub connection: FlatConnection,
    pub exponent: Q,
    pub psi_period: i64,
    pub psi: Vec<(i64, CycloNumber)>,
    pub monomials: Vec<(Q, CycloNumber)>,
}

fn cq(x: Q) -> CycloNumber {
    CycloNumber::from_rational(x)
}

/// `cos(2πk/n)` exactly.
fn cos_turn(k: i64, n: i64) -> CycloNumber {
    CycloNumber::from_terms(n as u64, [(k, q(1, 2)), (-k, q(1, 2))])
}

/// `sin(πk/n)` exactly, as `(ζ_{2n}^k − ζ_{2n}^{−k})/2i`.
fn sin_half_turn(k: i64, n: i64) -> CycloNumber {
    let d = 4 * n as u64;
    CycloNumber::from_terms(d, [(2 * k - n, q(1, 2)), (-2 * k - n, q(-1, 2))])
}

/// `W = unit · Σ_a e^{2πi(r/s)CS[a]} W^{(a)}`; the unit is `−ξ^{(3−p)/2}` for
/// `L(p,1)` and `1` otherwise.
pub fn sector_formulas(family: QhsFamily, s: i64) -> Result<Vec<SectorFormula>> {
    let conns = abelian_connections(family, s)?;
    let mut out = Vec::new();
    for (a, c) in conns.into_iter().enumerate() {
        let a = a as i64;
        let f = match family {
            QhsFamily::Lens(p) => {
                let monomials = if a == 0 {
                    vec![(q(-1, p), cq(qi(1))), (Q::zero(), cq(qi(-1)))]
                } else {
                    vec![(q(-1, p), cos_turn(2 * a, p).scale(&qi(2))), (Q::zero(), cq(qi(-2)))]
                };
                SectorFormula { connection: c, exponent: q(p - 1, 4), psi_period: 1, psi: vec![], monomials }
            }
            QhsFamily::Ex233 => {
                let (psi, m) = if a == 0 {
                    (vec![(1, q(-1, 2)), (3, qi(-1)), (5, q(-1, 2))], qi(1))
                } else {
                    (vec![(1, qi(-1)), (3, qi(1)), (5, qi(-1))], qi(2))
                };
                SectorFormula {
                    connection: c,
                    exponent: q(-13, 24),
                    psi_period: 6,
                    psi: psi.into_iter().map(|(b, x)| (b, cq(x))).collect(),
                    monomials: vec![(q(1, 24), cq(m))],
                }
            }
            QhsFamily::ExNeg239 => {
                let psi = if a == 0 {
                    vec![(1, q(1, 2)), (5, q(-1, 2)), (13, q(-1, 2)), (17, q(1, 2))]
                } else {
                    vec![(1, qi(1)), (5, q(1, 2)), (13, q(1, 2)), (17, qi(1))]
                };
                SectorFormula {
                    connection: c,
                    exponent: q(107, 72),
                    psi_period: 18,
                    psi: psi.into_iter().map(|(b, x)| (b, cq(x))).collect(),
                    monomials: vec![],
                }
            }
            QhsFamily::Family(p) => {
                let h = 2 * p + 1;
                let big_p = p * h;
                let (u, v, w) = (big_p - 4 * p - 1, big_p - 2 * p - 1, big_p - 1);
                let psi = if a == 0 {
                    vec![(u, cq(q(1, 2))), (v, cq(qi(-1))), (w, cq(q(1, 2)))]
                } else {
                    vec![(u, cq(qi(1))), (w, cq(qi(1))), (v, cos_turn(s * a, h).scale(&qi(-2)))]
                };
                SectorFormula {
                    connection: c,
                    exponent: -prefactored_delta(&family.data()?)?,
                    psi_period: big_p,
                    psi,
                    monomials: vec![],
                }
            }
        };
        out.push(f);
    }
    Ok(out)
}

impl SectorFormula {
    /// `W^{(a)}` with powers `x^·` and false theta argument `α`.
    pub fn eval(&self, pow: &dyn Fn(&Q) -> CycloNumber, alpha: &Q) -> Result<CycloNumber> {
        let mut inner = CycloNumber::zero();
        for (b, c) in &self.psi {
            inner += &(c * &eichler_limit(&psi_basis(self.psi_period, *b)?, alpha));
        }
        for (k, c) in &self.monomials {
            inner += &(c * &pow(k));
        }
        Ok(&pow(&self.exponent) * &inner)
    }
}

fn reconstruction_unit(family: QhsFamily, ctx: &RootContext) -> CycloNumber {
    match family {
        QhsFamily::Lens(p) => lens_reconstruction_unit(p, ctx),
        _ => CycloNumber::one(),
    }
}

/// `(label, connection, W^{(a)}(ξ))` for each abelian label.
pub fn qhs_decomposition(family: QhsFamily, ctx: &RootContext) -> Result<Vec<(i64, FlatConnection, CycloNumber)>> {
    let pow = |x: &Q| xi_pow(ctx, x);
    sector_formulas(family, ctx.s)?
        .into_iter()
        .enumerate()
        .map(|(a, f)| Ok((a as i64, f.connection.clone(), f.eval(&pow, &ctx.alpha())?)))
        .collect()
}

/// `W_M(ξ)` independently of the decomposition: the lens formula, or the
/// closed Seifert form normalized by `√H (H/s)`.
pub fn qhs_w_direct(family: QhsFamily, ctx: &RootContext) -> Result<CycloNumber> {
    match family {
        QhsFamily::Lens(p) => Ok(wrt_lens(p, ctx)?.0.exact.expect("exact")),
        _ => w_closed(&family.data()?, ctx),
    }
}

fn cs_phase(lift: &Q, ctx: &RootContext) -> CycloNumber {
    CycloNumber::exp_2pi_i(&(lift * q(ctx.r, ctx.s)))
}

/// Reconstruction of `W_M(ξ)` from the labels, checked exactly against the
/// direct value, and numerically against the surgery oracle when it is
/// affordable.
pub fn qhs_decomposition_check(family: QhsFamily, ctx: &RootContext) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(family.to_string());
    let terms = qhs_decomposition(family, ctx)?;
    let mut rec = CycloNumber::zero();
    for (_, c, w) in &terms {
        rec += &(&cs_phase(&c.cs_lift, ctx) * w);
    }
    let rec = &reconstruction_unit(family, ctx) * &rec;
    let direct = qhs_w_direct(family, ctx)?;
    rep.push(Check::exact("decomposition_reconstruction", Some(ctx), &rec, &direct));
    if let Ok(brute) = brute_w(family, ctx) {
        rep.push(Check::numeric("decomposition_vs_surgery", Some(ctx), rec.eval_complex(), brute, 1e-9));
    }
    Ok(rep)
}

/// `W` from the surgery oracle, `√H (H/s)(ξ−1)τ`.
fn brute_w(family: QhsFamily, ctx: &RootContext) -> Result<Complex64> {
    let d = family.data()?;
    let h = d.invariants()?.h.abs();
    let tau = wrt_brute_surgery(&d, ctx)?;
    let w = crate::wrt::w_normalized(&tau, h, ctx)?;
    Ok(w.exact.map(|x| x.eval_complex()).unwrap_or(w.numeric))
}

/// A term `e^{2πi(r/s)CS}·P_A(ξ̃)·I_A` of the saddle expansion.
#[derive(Clone, Debug)]
pub struct SaddleTerm {
    pub connection: FlatConnection,
    /// Abelian label of the decomposition sector, when there is one.
    pub sector: Option<i64>,
    pub cs_lift: Q,
    pub p_value: CycloNumber,
    pub i_value: Complex64,
    pub delta: i64,
}

impl SaddleTerm {
    pub fn contribution(&self, ctx: &RootContext) -> Complex64 {
        cs_phase(&self.cs_lift, ctx).eval_complex() * self.p_value.eval_complex() * self.i_value
    }
}

/// Saddle terms through order `K` of the trivial and abelian series.
pub fn saddle_expansion(m: &Manifold, ctx: &RootContext, order: usize) -> Result<Vec<SaddleTerm>> {
    match m {
        Manifold::Brieskorn(p) => brieskorn_saddles(*p, ctx, order),
        Manifold::Qhs(f) => qhs_saddles(*f, ctx, order),
        Manifold::Seifert(_) => Err(Error::Unsupported(format!(
            "saddle expansion is implemented for Brieskorn spheres and the named examples, not {m}"
        ))),
    }
}

fn brieskorn_saddles(p: [i64; 3], ctx: &RootContext, order: usize) -> Result<Vec<SaddleTerm>> {
    let d = SeifertData::brieskorn(&p)?;
    let delta = prefactored_delta(&d)?;
    let (p, labels) = phi_labels(p);
    let f = phi_basis(p, [1, 1, 1])?;
    let pref = xi_pow(ctx, &-&delta).eval_complex();
    let mut trivial_i = pref * 0.5 * trivial_series(&f, order, ctx);
    if spherical(p) {
        trivial_i += xi_pow(ctx, &(-&delta + q(1, 120))).eval_complex();
    }
    let mut out = vec![SaddleTerm {
        connection: FlatConnection::trivial(),
        sector: None,
        cs_lift: Q::zero(),
        p_value: CycloNumber::one(),
        i_value: trivial_i,
        delta: 0,
    }];
    let s_row = &s_matrix_phi(p)[labels.iter().position(|a| *a == [1, 1, 1]).expect("(1,1,1) is a label")];
    let dual = q(-ctx.r, ctx.s);
    for (j, a) in labels.iter().enumerate() {
        let lift = rotation_cs_lift(p, *a);
        let pv = (&xi_tilde_pow(ctx, &lift) * &eichler_limit(&phi_basis(p, *a)?, &dual)).scale(&q(1, 2));
        out.push(SaddleTerm {
            connection: FlatConnection::new(ConnectionKind::Nonabelian(*a), lift.clone()),
            sector: None,
            cs_lift: lift,
            p_value: pv,
            i_value: -sqrt_r_over_is(ctx) * s_row[j] * pref,
            delta: -1,
        });
    }
    Ok(out)
}

fn qhs_saddles(family: QhsFamily, ctx: &RootContext, order: usize) -> Result<Vec<SaddleTerm>> {
    let unit = reconstruction_unit(family, ctx).eval_complex();
    let dual = q(-ctx.r, ctx.s);
    let mut out = Vec::new();
    for (a, f) in sector_formulas(family, ctx.s)?.into_iter().enumerate() {
        let a = a as i64;
        let pref = unit * xi_pow(ctx, &f.exponent).eval_complex();
        // abelian saddle: trivial series of the ψ part plus the monomials
        let mut i_ab = Complex64::zero();
        for (b, c) in &f.psi {
            i_ab += c.eval_complex() * trivial_series(&psi_basis(f.psi_period, *b)?, order, ctx);
        }
        for (k, c) in &f.monomials {
            i_ab += c.eval_complex() * xi_pow(ctx, k).eval_complex();
        }
        out.push(SaddleTerm {
            connection: f.connection.clone(),
            sector: Some(a),
            cs_lift: f.connection.cs_lift.clone(),
            p_value: CycloNumber::one(),
            i_value: pref * i_ab,
            delta: 0,
        });
        if f.psi.is_empty() {
            continue;
        }
        // nonabelian saddles: ψ-labels grouped by CS = −b²/4P mod 1
        let big_p = f.psi_period;
        let mut classes: BTreeMap<Q, Vec<i64>> = BTreeMap::new();
        let mut lifts: BTreeMap<Q, Q> = BTreeMap::new();
        for b in 1..big_p {
            let lift = q(-b * b, 4 * big_p);
            let key = crate::number_theory::frac_q(&lift);
            lifts.entry(key.clone()).or_insert(lift);
            classes.entry(key).or_default().push(b);
        }
        let norm = -sqrt_r_over_is(ctx) * (2.0 / big_p as f64).sqrt();
        for (key, bs) in classes {
            let lift = lifts[&key].clone();
            let mut pv = CycloNumber::zero();
            for &b in &bs {
                let mut w = CycloNumber::zero();
                for (b2, c) in &f.psi {
                    w += &(c * &sin_half_turn(b * b2, big_p));
                }
                pv += &(&w * &eichler_limit(&psi_basis(big_p, b)?, &dual));
            }
            let pv = &xi_tilde_pow(ctx, &lift) * &pv;
            out.push(SaddleTerm {
                connection: FlatConnection::new(ConnectionKind::Geometric, lift.clone()),
                sector: Some(a),
                cs_lift: &f.connection.cs_lift + &lift,
                p_value: pv,
                i_value: pref * norm,
                delta: -1,
            });
        }
    }
    Ok(out)
}

/// `W_M(ξ)` in floating point from its false theta expression.
pub fn w_false_theta(m: &Manifold, ctx: &RootContext) -> Result<Complex64> {
    match m {
        Manifold::Brieskorn(p) => {
            let d = SeifertData::brieskorn(p)?;
            let delta = prefactored_delta(&d)?;
            let pc = canonical_p(*p);
            let mut x = eichler_limit_f64(&phi_basis(pc, [1, 1, 1])?, &ctx.alpha()) * 0.5;
            if spherical(pc) {
                x += xi_pow(ctx, &q(1, 120)).eval_complex();
            }
            Ok(xi_pow(ctx, &-delta).eval_complex() * x)
        }
        Manifold::Qhs(family) => {
            let mut total = Complex64::zero();
            for f in sector_formulas(*family, ctx.s)? {
                let mut inner = Complex64::zero();
                for (b, c) in &f.psi {
                    inner += c.eval_complex() * eichler_limit_f64(&psi_basis(f.psi_period, *b)?, &ctx.alpha());
                }
                for (k, c) in &f.monomials {
                    inner += c.eval_complex() * xi_pow(ctx, k).eval_complex();
                }
                total += cs_phase(&f.connection.cs_lift, ctx).eval_complex()
                    * xi_pow(ctx, &f.exponent).eval_complex()
                    * inner;
            }
            Ok(reconstruction_unit(*family, ctx).eval_complex() * total)
        }
        Manifold::Seifert(_) => Err(Error::Unsupported(format!("no false theta expression for {m}"))),
    }
}

/// `W_M(ξ) − Σ saddle terms`.
pub fn saddle_residual(m: &Manifold, ctx: &RootContext, order: usize) -> Result<Complex64> {
    let w = w_false_theta(m, ctx)?;
    let terms = saddle_expansion(m, ctx, order)?;
    Ok(w - terms.iter().map(|t| t.contribution(ctx)).sum::<Complex64>())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub r: i64,
    pub s: i64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidualScan {
    pub manifold: String,
    pub order: usize,
    pub rows: Vec<ResidualRow>,
    pub slope: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn scan(
    manifold: String,
    ctxs: &[RootContext],
    order: usize,
    f: impl Fn(&RootContext) -> Result<Complex64> + Sync,
) -> Result<ResidualScan> {
    use rayon::prelude::*;
    let rows: Vec<ResidualRow> = ctxs
        .par_iter()
        .map(|ctx| {
            let z = f(ctx)?;
            Ok(ResidualRow { r: ctx.r, s: ctx.s, re: z.re, im: z.im, abs: z.norm() })
        })
        .collect::<Result<_>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|x| (x.r as f64, x.abs)).collect();
    Ok(ResidualScan { manifold, order, slope: loglog_slope(&pts), rows })
}

/// `W_M(ξ) − Σ saddle terms` at each root, with the log-log slope in `r`.
pub fn residual_scan(m: &Manifold, ctxs: &[RootContext], order: usize) -> Result<ResidualScan> {
    scan(m.to_string(), ctxs, order, |ctx| saddle_residual(m, ctx, order))
}

/// `s_transform_residual` of `Φ^{(1,1,1)}` at each root, with the slope.
pub fn s_transform_scan(p: [i64; 3], ctxs: &[RootContext], order: usize) -> Result<ResidualScan> {
    let pc = canonical_p(p);
    scan(Manifold::Brieskorn(p).to_string(), ctxs, order, |ctx| {
        s_transform_residual(pc, [1, 1, 1], ctx, order)
    })
}

/// `W_M(ξ̃)` for a Brieskorn sphere: the closed form at the root `ξ̃` when
/// `s > 1`, otherwise the false theta expression read at `ξ̃`.
fn brieskorn_w_tilde(p: [i64; 3], ctx: &RootContext) -> Result<(CycloNumber, &'static str)> {
    let d = SeifertData::brieskorn(&p)?;
    let delta = prefactored_delta(&d)?;
    match ctx.dual() {
        Some(dual) => {
            let v = wrt_seifert_closed(&d, &dual)?;
            debug_assert!(matches!(v.normalization, Normalization::Prefactored(_)));
            Ok((&xi_pow(&dual, &-delta) * &v.exact.expect("exact"), "closed form at the dual root"))
        }
        None => {
            let pow = |x: &Q| xi_tilde_pow(ctx, x);
            let x = brieskorn_false_theta(p, &q(-ctx.r, ctx.s), &pow)?;
            Ok((&pow(&-delta) * &x, "false theta expression at the dual root"))
        }
    }
}

/// `P_{A*}(ξ̃) = ½ξ̃^{CS[A*]}Φ̃^{a*}(−r/s)`.
fn brieskorn_p_geometric(p: [i64; 3], ctx: &RootContext) -> Result<(Q, CycloNumber)> {
    let d = SeifertData::brieskorn(&p)?;
    let geo = geometric_connection(&d)?;
    let pc = canonical_p(p);
    let a = geometric_rotation(pc)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Unsupported(format!("no rotation number matches the geometric connection of {p:?}")))?;
    let f = phi_basis(pc, a)?;
    let x = (&xi_tilde_pow(ctx, &geo.cs_lift) * &eichler_limit(&f, &q(-ctx.r, ctx.s))).scale(&q(1, 2));
    Ok((geo.cs_lift, x))
}

/// Exponents `δ ∈ (1/4P)ℤ ∩ [0, s)` with `P = ξ̃^δ W` exactly.
pub fn delta_search(pa: &CycloNumber, w: &CycloNumber, big_p: i64, ctx: &RootContext) -> Vec<Q> {
    let den = 4 * big_p;
    let (pz, wz) = (pa.eval_complex(), w.eval_complex());
    let tol = 1e-8 * (1.0 + pz.norm());
    (0..den * ctx.s)
        .map(|k| q(k, den))
        .filter(|d| {
            let t = std::f64::consts::TAU * to_f64(&(d * q(-ctx.r, ctx.s)));
            (Complex64::from_polar(1.0, t) * wz - pz).norm() < tol
        })
        .filter(|d| &xi_tilde_pow(ctx, d) * w == *pa)
        .collect()
}

/// The relation between `P_{A*}(ξ̃)` and `W_M(ξ̃)` for the geometric flat
/// connection.
pub fn geometric_relation(m: &Manifold, ctx: &RootContext) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new(m.to_string());
    match m {
        Manifold::Brieskorn(p) => {
            let d = SeifertData::brieskorn(p)?;
            let (w, how) = brieskorn_w_tilde(*p, ctx)?;
            let (lift, pa) = brieskorn_p_geometric(*p, ctx)?;
            let inv = d.invariants()?;
            match crate::seifert::classify_geometry(&inv.e, &inv.chi) {
                Geometry::S3 => {
                    let rhs = &(&xi_tilde_pow(ctx, &qi(1)) * &w) - &CycloNumber::one();
                    let mut c = Check::exact("geometric_relation", Some(ctx), &pa, &rhs);
                    c.evidence["w_tilde"] = json!(how);
                    c.evidence["cs_lift"] = json!(lift.to_string());
                    rep.push(c);
                }
                _ => {
                    let found = delta_search(&pa, &w, d.big_p(), ctx);
                    let integral: Vec<&Q> = found.iter().filter(|x| is_integer(x)).collect();
                    let canonical = integral.first().map(|x| {
                        let k = x.to_integer().to_i64().unwrap_or(0);
                        if 2 * k > ctx.s {
                            k - ctx.s
                        } else {
                            k
                        }
                    });
                    rep.push(Check::new(
                        "geometric_relation",
                        Some(ctx),
                        canonical.is_some(),
                        None,
                        json!({
                            "delta": canonical,
                            "delta_candidates": found.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                            "cs_lift": lift.to_string(),
                            "w_tilde": how,
                        }),
                    ));
                }
            }
        }
        Manifold::Qhs(family) => {
            let pow = |x: &Q| xi_tilde_pow(ctx, x);
            let dual = q(-ctx.r, ctx.s);
            let mut total = CycloNumber::zero();
            for f in sector_formulas(*family, ctx.s)? {
                total += &f.eval(&pow, &dual)?;
            }
            match family {
                QhsFamily::Lens(p) => {
                    let lhs = &(&pow(&q(1 - p, 4)) * &total) + &cq(qi(*p));
                    let xi_total = {
                        let pw = |x: &Q| xi_pow(ctx, x);
                        let mut t = CycloNumber::zero();
                        for f in sector_formulas(*family, ctx.s)? {
                            t += &f.eval(&pw, &ctx.alpha())?;
                        }
                        t
                    };
                    let xi_reading = (&(&pow(&q(1 - p, 4)) * &xi_total) + &cq(qi(*p))).is_zero();
                    let mut c = Check::exact("geometric_relation", Some(ctx), &lhs, &CycloNumber::zero());
                    c.evidence["reading"] = json!("xi_tilde");
                    c.evidence["xi_reading_holds"] = json!(xi_reading);
                    rep.push(c);
                }
                QhsFamily::Ex233 => {
                    let pa = (&pow(&q(-1, 24)) * &eichler_limit(&psi_combination(6, &[(1, 3), (5, 3)])?, &dual))
                        .scale(&q(-1, 2));
                    let rhs = &(&pow(&q(1, 2)) * &total) - &cq(qi(3));
                    rep.push(Check::exact("geometric_relation", Some(ctx), &pa, &rhs));
                }
                QhsFamily::ExNeg239 => {
                    let pa = (&pow(&q(-1, 72)) * &eichler_limit(&psi_combination(18, &[(1, 3), (17, 3)])?, &dual))
                        .scale(&q(1, 2));
                    let rhs = &pow(&q(-3, 2)) * &total;
                    rep.push(Check::exact("geometric_relation", Some(ctx), &pa, &rhs));
                }
                QhsFamily::Family(p) => {
                    let h = 2 * p + 1;
                    let big_p = p * h;
                    let (u, w) = (big_p - 4 * p - 1, big_p - 1);
                    let lift = q(-(big_p - 1) * (big_p - 1), 4 * big_p);
                    let pa = (&pow(&lift) * &eichler_limit(&psi_combination(big_p, &[(u, h), (w, h)])?, &dual))
                        .scale(&q(1, 2));
                    let delta = prefactored_delta(&family.data()?)?;
                    let rhs = &pow(&(delta + &lift)) * &total;
                    rep.push(Check::exact("geometric_relation", Some(ctx), &pa, &rhs));
                }
            }
        }
        Manifold::Seifert(_) => {
            return Err(Error::Unsupported(format!("geometric relation is not implemented for {m}")));
        }
    }
    Ok(rep)
}

/// Closed form against the surgery oracle, exactly.
pub fn oracle_check(d: &SeifertData, ctx: &RootContext) -> Result<Check> {
    let name = "oracle_equivalence";
    let v = wrt_seifert_closed(d, ctx)?;
    let Normalization::Prefactored(delta) = v.normalization.clone() else {
        unreachable!("closed form is prefactored")
    };
    let tau = crate::wrt::tau_from_prefactored(v.exact.as_ref().expect("exact"), &delta, ctx);
    let brute = wrt_brute_surgery(d, ctx)?;
    let mut c = Check::exact(name, Some(ctx), &tau, brute.exact.as_ref().expect("exact"));
    let err = (tau.eval_complex() - brute.numeric).norm();
    c.evidence["numeric_error"] = json!(err);
    if err > 1e-9 * tau.eval_complex().norm().max(1.0) {
        c.status = Status::Fail;
    }
    Ok(c)
}

/// Checks to run in [`verify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Identity,
    Integrality,
    Geometric,
    Oracle,
    Decomposition,
    PhaseSums,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "identity" => Suite::Identity,
            "integrality" => Suite::Integrality,
            "geometric" => Suite::Geometric,
            "oracle" => Suite::Oracle,
            "decomposition" => Suite::Decomposition,
            "phase-sums" => Suite::PhaseSums,
            _ => return invalid(format!("unknown verification suite {s:?}")),
        })
    }
}

fn push_result(rep: &mut VerificationReport, name: &str, ctx: &RootContext, r: Result<VerificationReport>) {
    match r {
        Ok(x) => rep.extend(x),
        Err(e) => rep.push(Check::error(name, Some(ctx), &e)),
    }
}

/// Runs the applicable checks of a suite at each root.
pub fn verify(m: &Manifold, ctxs: &[RootContext], suite: Suite) -> Result<VerificationReport> {
    use rayon::prelude::*;
    let d = m.data()?;
    let want = |x: Suite| suite == Suite::All || suite == x;
    let parts: Vec<VerificationReport> = ctxs
        .par_iter()
        .map(|ctx| {
            let mut rep = VerificationReport::new(m.to_string());
            match m {
                Manifold::Brieskorn(p) => {
                    if want(Suite::Identity) {
                        push_result(&mut rep, "brieskorn_identity", ctx, brieskorn_identity(*p, ctx));
                    }
                    if want(Suite::Integrality) {
                        let (pc, labels) = phi_labels(*p);
                        for a in labels {
                            match integrality_check(pc, a, ctx) {
                                Ok((ok, pb)) => rep.push(Check::new(
                                    "integrality",
                                    Some(ctx),
                                    ok,
                                    None,
                                    json!({ "rotation": a, "power_basis_len": pb.len() }),
                                )),
                                Err(e) => rep.push(Check::error("integrality", Some(ctx), &e)),
                            }
                        }
                    }
                    if want(Suite::Integrality) {
                        push_result(&mut rep, "saddle_integrality", ctx, saddle_integrality(*p, ctx));
                    }
                    if want(Suite::Geometric) && ctx.s > 1 {
                        push_result(&mut rep, "geometric_relation", ctx, geometric_relation(m, ctx));
                    }
                    if want(Suite::PhaseSums) {
                        let pc = canonical_p(*p);
                        push_result(&mut rep, "phase_sums", ctx, phase_sum_checks(pc, [1, 1, 1], ctx.r));
                    }
                }
                Manifold::Qhs(f) => {
                    if want(Suite::Decomposition) {
                        push_result(&mut rep, "decomposition_reconstruction", ctx, qhs_decomposition_check(*f, ctx));
                    }
                    if want(Suite::Geometric) {
                        push_result(&mut rep, "geometric_relation", ctx, geometric_relation(m, ctx));
                    }
                }
                Manifold::Seifert(_) => {}
            }
            if want(Suite::Oracle) && d.integral_framings() && d.m() > 0 {
                match oracle_check(&d, ctx) {
                    Ok(c) => rep.push(c),
                    Err(Error::CostGuard { .. }) => {}
                    Err(e) => rep.push(Check::error("oracle_equivalence", Some(ctx), &e)),
                }
            }
            rep
        })
        .collect();
    let mut rep = VerificationReport::new(m.to_string());
    for p in parts {
        rep.extend(p);
    }
    Ok(rep)
}

/// Residual decay check: slope within `±tol` of `−(K+1)`.
pub fn verify_modularity(
    m: &Manifold,
    ctxs: &[RootContext],
    order: usize,
    tol: f64,
) -> Result<(VerificationReport, ResidualScan)> {
    let scan = residual_scan(m, ctxs, order)?;
    let target = -(order as f64 + 1.0);
    // the lens expansion has no remainder
    let exact = scan.rows.iter().all(|x| x.abs < 1e-12);
    let mut rep = VerificationReport::new(m.to_string());
    rep.push(Check::new(
        "residual_decay",
        None,
        exact || (scan.slope - target).abs() <= tol,
        Some(tol),
        json!({
            "slope": scan.slope,
            "target": target,
            "order": order,
            "exact_expansion": exact,
            "rows": scan.rows,
        }),
    ));
    Ok((rep, scan))
}

/// Stability of the exponent found by [`geometric_relation`] across roots.
/// The exponent is compared in the symmetric range modulo each `s`.
pub fn delta_stability(p: [i64; 3], ctxs: &[RootContext]) -> Result<Check> {
    let m = Manifold::Brieskorn(p);
    let mut seen = Vec::new();
    let mut ok = true;
    for ctx in ctxs {
        let rep = geometric_relation(&m, ctx)?;
        let c = &rep.checks[0];
        ok &= c.passed();
        seen.push(json!({ "r": ctx.r, "s": ctx.s, "delta": c.evidence.get("delta").cloned().unwrap_or(Value::Null) }));
    }
    let first = seen.first().map(|x| x["delta"].clone());
    ok &= first.as_ref().is_some_and(|v| !v.is_null()) && seen.iter().all(|x| Some(&x["delta"]) == first.as_ref());
    Ok(Check::new("delta_stable", None, ok, None, json!({ "delta": first, "roots": seen })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_round_trip() {
        for s in ["brieskorn:2,3,7", "lens:5", "ex:2-3-3", "ex:neg-2-3-9", "ex:family:3", "seifert:1;2/1,3/1,5/1"] {
            let m: Manifold = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("brieskorn:2,4,5".parse::<Manifold>().is_err());
        assert!("torus:3".parse::<Manifold>().is_err());
    }

    #[test]
    fn identity_at_small_roots() {
        let ctx = RootContext::new(7, 1).unwrap();
        assert!(brieskorn_identity([2, 3, 7], &ctx).unwrap().passed());
        let ctx = RootContext::new(5, 1).unwrap();
        assert!(brieskorn_identity([2, 3, 5], &ctx).unwrap().passed());
    }

    #[test]
    fn integrality_examples() {
        let ctx = RootContext::new(5, 1).unwrap();
        assert!(integrality_check([2, 3, 7], [1, 1, 1], &ctx).unwrap().0);
        let ctx = RootContext::new(7, 1).unwrap();
        assert!(integrality_check([2, 3, 5], [1, 1, 2], &ctx).unwrap().0);
        assert_eq!(rotation_cs_lift([2, 3, 5], [1, 1, 2]), q(-4489, 120));
        let ctx = RootContext::new(1, 1).unwrap();
        let (ok, pb) = integrality_check([2, 3, 7], [1, 1, 2], &ctx).unwrap();
        assert!(ok && pb.len() <= 1);
    }

    #[test]
    fn phase_sum_examples() {
        assert!(phase_sum_checks([2, 3, 5], [1, 1, 1], 7).unwrap().passed());
        assert!(phase_sum_checks([3, 4, 5], [1, 1, 2], 11).unwrap().passed());
        assert!(phase_sum_checks([2, 3, 5], [1, 1, 1], 1).unwrap().passed());
    }

    #[test]
    fn saddle_values_integral() {
        for (r, s) in [(7, 5), (11, 13), (9, 1), (3, 17)] {
            let ctx = RootContext::new(r, s).unwrap();
            for p in [[2, 3, 5], [2, 3, 7], [2, 5, 7]] {
                let rep = saddle_integrality(p, &ctx).unwrap();
                assert!(rep.passed(), "{p:?} r={r} s={s}");
            }
        }
    }

    #[test]
    fn saddles_237() {
        let m = Manifold::Brieskorn([2, 3, 7]);
        let ctx = RootContext::new(11, 5).unwrap();
        let t = saddle_expansion(&m, &ctx, 2).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t[0].p_value == CycloNumber::one());
    }

    #[test]
    fn saddle_235_geometric_p() {
        let ctx = RootContext::new(7, 5).unwrap();
        let (lift, pa) = brieskorn_p_geometric([2, 3, 5], &ctx).unwrap();
        assert_eq!(lift, q(-1, 120));
        let f = phi_basis([2, 3, 5], [1, 1, 1]).unwrap();
        let expect = (&xi_tilde_pow(&ctx, &q(-1, 120)) * &eichler_limit(&f, &q(-7, 5))).scale(&q(1, 2));
        assert!(pa == expect);
    }

    #[test]
    fn neg239_sector_zero_vanishing_saddle() {
        let m = Manifold::Qhs(QhsFamily::ExNeg239);
        let ctx = RootContext::new(7, 1).unwrap();
        let t = saddle_expansion(&m, &ctx, 1).unwrap();
        let x = t
            .iter()
            .find(|x| x.sector == Some(0) && crate::number_theory::frac_q(&(&x.cs_lift - &t[0].cs_lift)) == q(7, 8))
            .unwrap();
        assert!(x.p_value.is_zero());
    }

    #[test]
    fn decomposition_233() {
        let ctx = RootContext::new(7, 1).unwrap();
        let rep = qhs_decomposition_check(QhsFamily::Ex233, &ctx).unwrap();
        assert!(rep.passed(), "{}", rep.to_text());
        assert_eq!(rep.checks.len(), 2);
    }

    #[test]
    fn family_labels() {
        let f = sector_formulas(QhsFamily::Family(2), 1).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(f[0].psi_period, 10);
        let labels: Vec<i64> = f[0].psi.iter().map(|x| x.0).collect();
        assert_eq!(labels, vec![1, 5, 9]);
    }

    #[test]
    fn residual_matches_s_transform() {
        let m = Manifold::Brieskorn([2, 3, 7]);
        let ctx = RootContext::new(101, 1).unwrap();
        let a = saddle_residual(&m, &ctx, 2).unwrap().norm();
        let b = s_transform_residual([2, 3, 7], [1, 1, 1], &ctx, 2).unwrap().norm();
        assert!((a - 0.5 * b).abs() < 1e-9 * (1.0 + b), "{a} {b}");
    }
}

#[cfg(test)]
mod qhs_residual_tests {
    use super::*;

    #[test]
    fn qhs_residuals_decay() {
        for s in [1, 5] {
            for m in ["ex:2-3-3", "ex:neg-2-3-9", "ex:family:3"] {
                let m: Manifold = m.parse().unwrap();
                let ctxs: Vec<RootContext> = [101, 201, 401, 801].iter().map(|&r| RootContext::new(r, s).unwrap()).collect();
                let scan = residual_scan(&m, &ctxs, 2).unwrap();
                assert!((scan.slope + 3.0).abs() < 0.5, "{m} s={s} {:?}", scan);
            }
            let ctxs = [RootContext::new(101, s).unwrap(), RootContext::new(201, s).unwrap()];
            let scan = residual_scan(&Manifold::Qhs(QhsFamily::Lens(7)), &ctxs, 2).unwrap();
            assert!(scan.rows.iter().all(|x| x.abs < 1e-12), "{scan:?}");
        }
    }
}
