//! Seifert fibered manifolds over `S²`: invariants, geometry, linking
//! matrices and flat connections.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::matrix::IntMatrix;
use crate::number_theory::{dedekind_sum, gcd, mod_inverse, q, qi, RationalMod1, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fiber {
    pub p: i64,
    pub q: i64,
}

/// `S²(b; p₁/q₁, …, p_m/q_m)`. Orientation is carried by the signs of `b`
/// and the `q_j`; see [`SeifertData::reversed`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SeifertData {
    pub b: i64,
    pub fibers: Vec<Fiber>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertInvariants {
    pub e: Q,
    pub chi: Q,
    pub p: i64,
    /// Order of `H₁`, `0` when infinite.
    pub h: i64,
    pub phi: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    S2xR,
    E3,
    H2xR,
    S3,
    Nil,
    SL2R,
    /// Not a Seifert geometry; present for completeness of the enum.
    H3,
    /// Not a Seifert geometry; present for completeness of the enum.
    Sol,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Geometry::S2xR => "S2xR",
            Geometry::E3 => "R3",
            Geometry::H2xR => "H2xR",
            Geometry::S3 => "S3",
            Geometry::Nil => "Nil",
            Geometry::SL2R => "SL2R",
            Geometry::H3 => "H3",
            Geometry::Sol => "Sol",
        };
        f.write_str(s)
    }
}

fn check_coprime(p: &[i64]) -> Result<()> {
    for (i, &a) in p.iter().enumerate() {
        if a < 2 {
            return invalid(format!("fiber orders must be >= 2, got {a}"));
        }
        for &b in &p[i + 1..] {
            if gcd(a, b) != 1 {
                return invalid(format!("fiber orders {a} and {b} are not coprime"));
            }
        }
    }
    Ok(())
}

impl SeifertData {
    pub fn new(b: i64, fibers: &[(i64, i64)]) -> Result<Self> {
        for &(p, qq) in fibers {
            if p < 1 {
                return invalid(format!("fiber order must be positive, got {p}"));
            }
            if gcd(p, qq) != 1 {
                return invalid(format!("fiber {p}/{qq} is not coprime"));
            }
        }
        Ok(SeifertData {
            b,
            fibers: fibers.iter().map(|&(p, q)| Fiber { p, q }).collect(),
        })
    }

    /// The integer homology sphere `Σ(p₁, …, p_m)` with `b = 0` and `e = 1/P`.
    pub fn brieskorn(p: &[i64]) -> Result<Self> {
        if p.is_empty() {
            return invalid("need at least one fiber");
        }
        check_coprime(p)?;
        let big_p: i64 = p.iter().product();
        let mut qs: Vec<i64> = p
            .iter()
            .map(|&pj| {
                let inv = mod_inverse((big_p / pj).rem_euclid(pj), pj).expect("coprime");
                if inv > pj / 2 {
                    inv - pj
                } else {
                    inv
                }
            })
            .collect();
        let tot: i64 = qs.iter().zip(p).map(|(qj, pj)| qj * (big_p / pj)).sum();
        qs[0] += (1 - tot) / (big_p / p[0]);
        let fibers: Vec<(i64, i64)> = p.iter().copied().zip(qs).collect();
        SeifertData::new(0, &fibers)
    }

    /// Surgery on the `p`-framed unknot.
    pub fn lens(p: i64) -> Result<Self> {
        if p == 0 {
            return invalid("lens space needs p != 0");
        }
        SeifertData::new(p, &[])
    }

    pub fn m(&self) -> usize {
        self.fibers.len()
    }

    pub fn euler(&self) -> Q {
        self.fibers
            .iter()
            .fold(-qi(self.b), |acc, f| acc + q(f.q, f.p))
    }

    pub fn chi(&self) -> Q {
        self.fibers
            .iter()
            .fold(qi(2), |acc, f| acc - (Q::one() - q(1, f.p)))
    }

    pub fn big_p(&self) -> i64 {
        self.fibers.iter().map(|f| f.p).product()
    }

    pub fn invariants(&self) -> Result<SeifertInvariants> {
        let e = self.euler();
        let big_p = self.big_p();
        let h = (&e * qi(big_p)).abs();
        let h = h
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::InvalidArgument("|H| too large".into()))?;
        let sign = if e.is_zero() {
            0
        } else if e.is_positive() {
            3
        } else {
            -3
        };
        // Dedekind sums only see q_j mod p_j; the linear part sums to e.
        let mut phi = qi(sign) - &e;
        for f in &self.fibers {
            phi += dedekind_sum(f.q, f.p)? * qi(12);
        }
        Ok(SeifertInvariants {
            e,
            chi: self.chi(),
            p: big_p,
            h,
            phi,
        })
    }

    /// Same manifold with the opposite orientation.
    pub fn reversed(&self) -> Self {
        SeifertData {
            b: -self.b,
            fibers: self.fibers.iter().map(|f| Fiber { p: f.p, q: -f.q }).collect(),
        }
    }

    /// Equivalent data with `b = 0`, shifting the first fiber.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        if let Some(f) = out.fibers.first_mut() {
            f.q -= self.b * f.p;
            out.b = 0;
        }
        out
    }

    /// True if every `q_j = ±1`, so the surgery link has integer framings.
    pub fn integral_framings(&self) -> bool {
        self.fibers.iter().all(|f| f.q == 1 || f.q == -1)
    }

    /// Framings `p_j/q_j` of the legs, when integral.
    pub fn leg_framings(&self) -> Result<Vec<i64>> {
        if !self.integral_framings() {
            return Err(Error::Unsupported(format!(
                "{self} has non-integral surgery coefficients"
            )));
        }
        Ok(self.fibers.iter().map(|f| f.p * f.q).collect())
    }

    /// The presentation matrix of `H₁`: first row `(b, 1, …, 1)`, then
    /// `(q_j, 0, …, p_j, …, 0)`. `|det| = |e·P|`.
    pub fn linking_matrix(&self) -> IntMatrix {
        let m = self.m();
        let mut b = vec![vec![0i64; m + 1]; m + 1];
        b[0][0] = self.b;
        for (j, f) in self.fibers.iter().enumerate() {
            b[0][j + 1] = 1;
            b[j + 1][0] = f.q;
            b[j + 1][j + 1] = f.p;
        }
        b
    }

    /// Symmetric linking matrix of the surgery link when all `q_j = ±1`.
    pub fn surgery_matrix(&self) -> Result<IntMatrix> {
        let fr = self.leg_framings()?;
        let m = fr.len();
        let mut b = vec![vec![0i64; m + 1]; m + 1];
        b[0][0] = self.b;
        for (j, &pj) in fr.iter().enumerate() {
            b[0][j + 1] = 1;
            b[j + 1][0] = 1;
            b[j + 1][j + 1] = pj;
        }
        Ok(b)
    }
}

impl fmt::Display for SeifertData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let legs: Vec<String> = self.fibers.iter().map(|x| format!("{}/{}", x.p, x.q)).collect();
        if legs.is_empty() {
            write!(f, "S2({})", self.b)
        } else {
            write!(f, "S2({}; {})", self.b, legs.join(", "))
        }
    }
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("not an integer: {s:?}")))
}

impl FromStr for SeifertData {
    type Err = Error;

    /// Accepts `S2(b; p1/q1, ..., pm/qm)` and the bare `b; p1/q1, ...`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let body = match t.strip_prefix("S2(") {
            Some(rest) => rest
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidArgument(format!("unbalanced parenthesis in {s:?}")))?,
            None => t,
        };
        let (b, legs) = match body.split_once(';') {
            Some((b, legs)) => (b, legs),
            None => (body, ""),
        };
        let b = parse_int(b)?;
        let mut fibers = Vec::new();
        for leg in legs.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (p, qq) = leg
                .split_once('/')
                .ok_or_else(|| Error::InvalidArgument(format!("fiber must be p/q, got {leg:?}")))?;
            fibers.push((parse_int(p)?, parse_int(qq)?));
        }
        SeifertData::new(b, &fibers)
    }
}

pub fn classify_geometry(e: &Q, chi: &Q) -> Geometry {
    match (e.is_zero(), chi.is_positive(), chi.is_zero()) {
        (true, true, _) => Geometry::S2xR,
        (true, _, true) => Geometry::E3,
        (true, _, _) => Geometry::H2xR,
        (false, true, _) => Geometry::S3,
        (false, _, true) => Geometry::Nil,
        (false, _, _) => Geometry::SL2R,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConnectionKind {
    Trivial,
    Abelian(i64),
    Nonabelian([i64; 3]),
    Geometric,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatConnection {
    pub kind: ConnectionKind,
    pub cs: RationalMod1,
    pub cs_lift: Q,
}

impl FlatConnection {
    pub fn new(kind: ConnectionKind, cs_lift: Q) -> Self {
        FlatConnection {
            kind,
            cs: RationalMod1::new(&cs_lift),
            cs_lift,
        }
    }

    pub fn trivial() -> Self {
        FlatConnection::new(ConnectionKind::Trivial, Q::zero())
    }
}

/// Fiber orders reordered so an even entry, if any, comes first.
pub fn even_first(p: [i64; 3]) -> [i64; 3] {
    let mut out = p;
    if let Some(i) = p.iter().position(|x| x % 2 == 0) {
        out.swap(0, i);
        if i == 2 {
            out.swap(1, 2);
        }
    }
    out
}

/// `D_p = (p₁−1)(p₂−1)(p₃−1)/4`.
pub fn count_nonabelian(p: [i64; 3]) -> i64 {
    (p[0] - 1) * (p[1] - 1) * (p[2] - 1) / 4
}

/// Canonical enumeration `1 ≤ a₁ < p₁`, `1 ≤ a_j ≤ (p_j−1)/2`; expects
/// `p` already in [`even_first`] order.
pub fn rotation_numbers(p: [i64; 3]) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for a1 in 1..p[0] {
        for a2 in 1..=(p[1] - 1) / 2 {
            for a3 in 1..=(p[2] - 1) / 2 {
                out.push([a1, a2, a3]);
            }
        }
    }
    out
}

/// `−(P/4)(1 + Σ a_j/p_j)²`.
pub fn rotation_cs_lift(p: [i64; 3], a: [i64; 3]) -> Q {
    let big_p = p[0] * p[1] * p[2];
    let mut t = Q::one();
    for j in 0..3 {
        t += q(a[j], p[j]);
    }
    -(q(big_p, 4) * &t * &t)
}

pub fn nonabelian_connections(p: [i64; 3]) -> Result<Vec<FlatConnection>> {
    check_coprime(&p)?;
    let p = even_first(p);
    Ok(rotation_numbers(p)
        .into_iter()
        .map(|a| FlatConnection::new(ConnectionKind::Nonabelian(a), rotation_cs_lift(p, a)))
        .collect())
}

/// The flat connection coming from the geometric structure, `CS = −χ²/4e`.
pub fn geometric_connection(d: &SeifertData) -> Result<FlatConnection> {
    let e = d.euler();
    let chi = d.chi();
    match classify_geometry(&e, &chi) {
        Geometry::S3 | Geometry::SL2R => {}
        g => {
            return Err(Error::Unsupported(format!(
                "no geometric SL(2,C) connection for {g} geometry"
            )))
        }
    }
    let lift = -(&chi * &chi) / (qi(4) * &e);
    Ok(FlatConnection::new(ConnectionKind::Geometric, lift))
}

/// For a Brieskorn triple, the rotation number whose CS value agrees with
/// the geometric one.
pub fn geometric_rotation(p: [i64; 3]) -> Result<Vec<[i64; 3]>> {
    let d = SeifertData::brieskorn(&p)?;
    let geo = geometric_connection(&d)?;
    Ok(nonabelian_connections(p)?
        .into_iter()
        .filter(|c| c.cs == geo.cs)
        .filter_map(|c| match c.kind {
            ConnectionKind::Nonabelian(a) => Some(a),
            _ => None,
        })
        .collect())
}

/// Rational homology spheres with an implemented abelian decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QhsFamily {
    /// `L(p, 1)`, `p` odd.
    Lens(i64),
    /// `S²(1; 2, 3, 3)`.
    Ex233,
    /// `S²(−1; −2, −3, −9)`.
    ExNeg239,
    /// `S²(0; p, −(2p+1), −(2p+1))`.
    Family(i64),
}

impl QhsFamily {
    pub fn data(&self) -> Result<SeifertData> {
        match *self {
            QhsFamily::Lens(p) => SeifertData::lens(p),
            QhsFamily::Ex233 => SeifertData::new(1, &[(2, 1), (3, 1), (3, 1)]),
            QhsFamily::ExNeg239 => SeifertData::new(-1, &[(2, -1), (3, -1), (9, -1)]),
            QhsFamily::Family(p) => {
                if p < 2 {
                    return invalid(format!("family parameter must be >= 2, got {p}"));
                }
                let h = 2 * p + 1;
                SeifertData::new(0, &[(p, 1), (h, -1), (h, -1)])
            }
        }
    }

    /// `|H₁|`.
    pub fn order(&self) -> i64 {
        match *self {
            QhsFamily::Lens(p) => p,
            QhsFamily::Ex233 | QhsFamily::ExNeg239 => 3,
            QhsFamily::Family(p) => 2 * p + 1,
        }
    }

    /// Number of labels, `(|H|+1)/2`.
    pub fn num_labels(&self) -> i64 {
        (self.order() + 1) / 2
    }
}

impl fmt::Display for QhsFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QhsFamily::Lens(p) => write!(f, "lens:{p}"),
            QhsFamily::Ex233 => write!(f, "ex:2-3-3"),
            QhsFamily::ExNeg239 => write!(f, "ex:neg-2-3-9"),
            QhsFamily::Family(p) => write!(f, "ex:family:{p}"),
        }
    }
}

/// Abelian flat connections `a = 0, …, (|H|−1)/2` with the CS lifts entering
/// the phases `e^{2πi(r/s)·lift}` of the decompositions at the given `s`.
///
/// Lens spaces use `−(s·s*·a)²/p` with `s*s ≡ 1 (mod p)`; the `ℤ/3` examples
/// and the family use `s²a²c/H` with `c = 1` and `c = p + 1` respectively.
pub fn abelian_connections(family: QhsFamily, s: i64) -> Result<Vec<FlatConnection>> {
    let h = family.order();
    if gcd(s, h) != 1 {
        return Err(Error::Hypothesis(format!("gcd(s, |H|) = gcd({s}, {h}) != 1")));
    }
    let lift = |a: i64| -> Q {
        match family {
            QhsFamily::Lens(p) => {
                let s_inv = mod_inverse(s.rem_euclid(p), p).unwrap_or(1);
                let x = BigInt::from(s) * BigInt::from(s_inv) * BigInt::from(a);
                -Q::new(&x * &x, BigInt::from(p))
            }
            QhsFamily::Ex233 | QhsFamily::ExNeg239 => q(s * s * a * a, 3),
            QhsFamily::Family(p) => {
                let x = BigInt::from(s) * BigInt::from(a);
                Q::new(&x * &x * BigInt::from(p + 1), BigInt::from(h))
            }
        }
    };
    Ok((0..family.num_labels())
        .map(|a| {
            let kind = if a == 0 {
                ConnectionKind::Trivial
            } else {
                ConnectionKind::Abelian(a)
            };
            FlatConnection::new(kind, lift(a))
        })
        .collect())
}
