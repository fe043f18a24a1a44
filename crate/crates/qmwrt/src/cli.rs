//! Command-line front end: argument parsing, job execution and JSON/CSV
//! output.

use std::ffi::OsString;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cyclotomic::CycloNumber;
use crate::error::{Error, Result};
use crate::false_theta::{
    eichler_limit, l_value, phi_basis, psi_basis, psi_t_phase, t_phase, trivial_series,
    PeriodicFunction,
};
use crate::gauss_sums::{gauss_brute, gauss_closed};
use crate::number_theory::{normalize_s, to_f64, RootContext, Q};
use crate::qmod::{residual_scan, verify, verify_modularity, Manifold, Status, Suite, VerificationReport};
use crate::seifert::{
    abelian_connections, classify_geometry, even_first, geometric_connection,
    nonabelian_connections, ConnectionKind, FlatConnection,
};
use crate::wrt::{
    lens_tau_surgery, tau_from_prefactored, w_closed, wrt_brute_surgery, wrt_lens,
    wrt_seifert_closed, Normalization,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Wrt,
    Falsetheta,
    Flatconn,
    Verify,
    Sweep,
    Gauss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Closed Seifert formula.
    Closed,
    /// Surgery on the plumbing link.
    Surgery,
    /// Both, with a comparison.
    Both,
}

/// Inclusive range `start:end:step` of odd `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RRange {
    pub start: i64,
    pub end: i64,
    pub step: i64,
}

impl RRange {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let nums: Vec<i64> = match parts.len() {
            2 | 3 => parts
                .iter()
                .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad r-range {s:?}")))
                .collect::<std::result::Result<_, _>>()?,
            _ => return Err(format!("r-range must be start:end[:step], got {s:?}")),
        };
        let step = nums.get(2).copied().unwrap_or(2);
        if step <= 0 || step % 2 != 0 {
            return Err(format!("r-range step must be even and positive, got {step}"));
        }
        if nums[0] > nums[1] {
            return Err(format!("empty r-range {s:?}"));
        }
        Ok(RRange { start: nums[0], end: nums[1], step })
    }

    pub fn values(&self) -> Vec<i64> {
        (self.start..=self.end).step_by(self.step as usize).collect()
    }
}

/// A validated invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: CommandKind,
    pub suite: Option<String>,
    pub selector: Option<String>,
    pub r: Option<i64>,
    pub r_range: Option<RRange>,
    pub s: i64,
    pub order: usize,
    pub format: OutputFormat,
    pub exact: bool,
    pub method: Method,
    pub threads: Option<usize>,
    pub tolerance: Option<f64>,
}

#[derive(Debug)]
pub enum CliError {
    /// Help, version or a parse error from the argument parser.
    Clap(clap::Error),
    Usage(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Usage(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qmwrt", version, about = "WRT invariants of Seifert manifolds and quantum modularity checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV rows (r, s, quantity, re, im, abs, status, exact).
    #[arg(long, global = true)]
    csv: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct Roots {
    /// Odd level r.
    #[arg(long, conflicts_with = "r_range")]
    r: Option<i64>,
    /// Odd levels start:end:step with even step.
    #[arg(long = "r-range")]
    r_range: Option<String>,
    /// Galois parameter, normalized per r.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    s: i64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// WRT invariant τ and its normalization W.
    Wrt {
        /// brieskorn:p1,p2,p3 | lens:p | seifert:b;p1/q1,... | ex:2-3-3 | ex:neg-2-3-9 | ex:family:p
        #[arg(long)]
        manifold: String,
        #[command(flatten)]
        roots: Roots,
        /// Include exact cyclotomic values.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value = "closed")]
        method: Method,
    },
    /// False theta limits, L-values and T-phases of a basis function.
    Falsetheta {
        /// phi:p1,p2,p3:a1,a2,a3 | psi:P:a
        #[arg(long)]
        basis: String,
        #[command(flatten)]
        roots: Roots,
        #[arg(long, default_value_t = 2)]
        order: usize,
        #[arg(long)]
        exact: bool,
    },
    /// Invariants and flat connections with their CS values.
    Flatconn {
        #[arg(long)]
        manifold: String,
        /// Galois parameter fixing the abelian lifts.
        #[arg(long, default_value_t = 1)]
        s: i64,
    },
    /// Run a verification suite.
    Verify {
        /// all | identity | integrality | geometric | oracle | decomposition | phase-sums | modularity
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        manifold: String,
        #[command(flatten)]
        roots: Roots,
        /// Truncation order K of the asymptotic series.
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Allowed deviation of the fitted slope from −(K+1).
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Saddle expansion residuals over a range of r.
    Sweep {
        #[arg(long)]
        manifold: String,
        #[command(flatten)]
        roots: Roots,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Quadratic Gauss sum G(s, r), closed against brute force.
    Gauss {
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long)]
        r: i64,
    },
}

const SUITES: [&str; 8] = [
    "all",
    "identity",
    "integrality",
    "geometric",
    "oracle",
    "decomposition",
    "phase-sums",
    "modularity",
];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A false theta basis selected by name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Basis {
    Phi([i64; 3], [i64; 3]),
    Psi(i64, i64),
}

impl Basis {
    pub fn parse(s: &str) -> Result<Self> {
        let triple = |x: &str| -> Result<[i64; 3]> {
            let v: Vec<i64> = x
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad integer in {x:?}"))))
                .collect::<Result<_>>()?;
            match v.as_slice() {
                [a, b, c] => Ok([*a, *b, *c]),
                _ => Err(Error::InvalidArgument(format!("need three entries, got {x:?}"))),
            }
        };
        let parts: Vec<&str> = s.split(':').collect();
        let int = |x: &str| x.trim().parse::<i64>().map_err(|_| Error::InvalidArgument(format!("bad integer {x:?}")));
        match parts.as_slice() {
            ["phi", p, a] => {
                let b = Basis::Phi(triple(p)?, triple(a)?);
                b.function()?;
                Ok(b)
            }
            ["psi", p, a] => {
                let b = Basis::Psi(int(p)?, int(a)?);
                b.function()?;
                Ok(b)
            }
            _ => Err(Error::InvalidArgument(format!("unknown basis syntax {s:?}"))),
        }
    }

    pub fn function(&self) -> Result<PeriodicFunction> {
        match self {
            Basis::Phi(p, a) => phi_basis(*p, *a),
            Basis::Psi(p, a) => psi_basis(*p, *a),
        }
    }

    fn t_phase(&self) -> Q {
        match self {
            Basis::Phi(p, a) => t_phase(*p, *a),
            Basis::Psi(p, a) => psi_t_phase(*p, *a),
        }
    }
}

fn validate_roots(roots: &Roots) -> std::result::Result<(Option<i64>, Option<RRange>), CliError> {
    let rs = match (&roots.r, &roots.r_range) {
        (Some(r), None) => vec![*r],
        (None, Some(x)) => RRange::parse(x).map_err(usage)?.values(),
        (None, None) => return Err(usage("one of --r or --r-range is required")),
        (Some(_), Some(_)) => return Err(usage("--r and --r-range are exclusive")),
    };
    for &r in &rs {
        if r <= 0 || r % 2 == 0 {
            return Err(usage(format!("r must be odd and positive, got {r}")));
        }
        normalize_s(roots.s, r).map_err(|e| usage(e.to_string()))?;
    }
    let range = match &roots.r_range {
        Some(x) => Some(RRange::parse(x).map_err(usage)?),
        None => None,
    };
    Ok((roots.r, range))
}

/// Parses and validates a command line (including the program name).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<JobSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let format = if cli.json {
        OutputFormat::Json
    } else if cli.csv {
        OutputFormat::Csv
    } else {
        OutputFormat::Text
    };
    let mut job = JobSpec {
        command: CommandKind::Wrt,
        suite: None,
        selector: None,
        r: None,
        r_range: None,
        s: 1,
        order: 0,
        format,
        exact: false,
        method: Method::Closed,
        threads: cli.threads,
        tolerance: None,
    };
    if cli.threads == Some(0) {
        return Err(usage("--threads must be positive"));
    }
    let check_manifold = |m: &str| -> std::result::Result<(), CliError> {
        m.parse::<Manifold>().map(|_| ()).map_err(|e| usage(e.to_string()))
    };
    match cli.command {
        Cmd::Wrt { manifold, roots, exact, method } => {
            check_manifold(&manifold)?;
            (job.r, job.r_range) = validate_roots(&roots)?;
            job.command = CommandKind::Wrt;
            job.selector = Some(manifold);
            job.s = roots.s;
            job.exact = exact;
            job.method = method;
        }
        Cmd::Falsetheta { basis, roots, order, exact } => {
            Basis::parse(&basis).map_err(|e| usage(e.to_string()))?;
            (job.r, job.r_range) = validate_roots(&roots)?;
            job.command = CommandKind::Falsetheta;
            job.selector = Some(basis);
            job.s = roots.s;
            job.order = order;
            job.exact = exact;
        }
        Cmd::Flatconn { manifold, s } => {
            check_manifold(&manifold)?;
            if s % 2 == 0 {
                return Err(usage(format!("s must be odd, got {s}")));
            }
            job.command = CommandKind::Flatconn;
            job.selector = Some(manifold);
            job.s = s;
        }
        Cmd::Verify { suite, manifold, roots, order, tolerance } => {
            if !SUITES.contains(&suite.as_str()) {
                return Err(usage(format!("unknown suite {suite:?}; expected one of {}", SUITES.join(", "))));
            }
            check_manifold(&manifold)?;
            (job.r, job.r_range) = validate_roots(&roots)?;
            job.command = CommandKind::Verify;
            job.suite = Some(suite);
            job.selector = Some(manifold);
            job.s = roots.s;
            job.order = order;
            job.tolerance = tolerance;
        }
        Cmd::Sweep { manifold, roots, order } => {
            check_manifold(&manifold)?;
            (job.r, job.r_range) = validate_roots(&roots)?;
            job.command = CommandKind::Sweep;
            job.selector = Some(manifold);
            job.s = roots.s;
            job.order = order;
        }
        Cmd::Gauss { s, r } => {
            if r <= 0 {
                return Err(usage(format!("r must be positive, got {r}")));
            }
            job.command = CommandKind::Gauss;
            job.r = Some(r);
            job.s = s;
        }
    }
    Ok(job)
}

impl JobSpec {
    /// The roots `(r, normalize_s(s, r))`, ordered by `r`.
    pub fn contexts(&self) -> Result<Vec<RootContext>> {
        let rs = match (self.r, self.r_range) {
            (Some(r), _) => vec![r],
            (None, Some(x)) => x.values(),
            (None, None) => vec![],
        };
        rs.into_iter().map(|r| RootContext::normalized(r, self.s)).collect()
    }

    fn manifold(&self) -> Result<Manifold> {
        self.selector.as_deref().unwrap_or_default().parse()
    }
}

/// One output row.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub r: Option<i64>,
    pub s: Option<i64>,
    pub quantity: String,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Value>,
}

impl Row {
    fn new(ctx: Option<&RootContext>, quantity: impl Into<String>, z: Complex64) -> Self {
        Row {
            r: ctx.map(|c| c.r),
            s: ctx.map(|c| c.s),
            quantity: quantity.into(),
            re: z.re,
            im: z.im,
            abs: z.norm(),
            status: None,
            exact: None,
        }
    }

    fn cyclo(ctx: Option<&RootContext>, quantity: impl Into<String>, x: &CycloNumber, exact: bool) -> Self {
        let mut row = Row::new(ctx, quantity, x.eval_complex());
        if exact {
            row.exact = Some(serde_json::to_value(x.to_exact_repr()).expect("serializable"));
        }
        row
    }

    fn rational(ctx: Option<&RootContext>, quantity: impl Into<String>, x: &Q) -> Self {
        let mut row = Row::new(ctx, quantity, Complex64::new(to_f64(x), 0.0));
        row.exact = Some(Value::String(x.to_string()));
        row
    }
}

/// Result of a run: the rendered artifact and the names of failed checks.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub stdout: String,
    pub failures: Vec<String>,
}

struct Emitted {
    rows: Vec<Row>,
    /// Extra top-level JSON fields.
    extra: serde_json::Map<String, Value>,
    report: Option<VerificationReport>,
}

impl Emitted {
    fn rows(rows: Vec<Row>) -> Self {
        Emitted { rows, extra: Default::default(), report: None }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn render(job: &JobSpec, ctxs: &[RootContext], e: &Emitted) -> Result<String> {
    match job.format {
        OutputFormat::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("job".into(), serde_json::to_value(job).expect("serializable"));
            obj.insert("manifold".into(), json!(job.selector));
            obj.insert("ctx".into(), json!(ctxs));
            obj.insert("results".into(), json!(e.rows));
            if let Some(rep) = &e.report {
                if let Value::Object(m) = rep.to_json() {
                    for (k, v) in m {
                        if k != "manifold" && k != "contexts" {
                            obj.insert(k, v);
                        }
                    }
                }
            }
            for (k, v) in &e.extra {
                obj.insert(k.clone(), v.clone());
            }
            Ok(serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable") + "\n")
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(vec![]);
            let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
            w.write_record(["r", "s", "quantity", "re", "im", "abs", "status", "exact"]).map_err(io)?;
            for row in &e.rows {
                w.write_record([
                    row.r.map(|x| x.to_string()).unwrap_or_default(),
                    row.s.map(|x| x.to_string()).unwrap_or_default(),
                    row.quantity.clone(),
                    num(row.re),
                    num(row.im),
                    num(row.abs),
                    row.status.map(|x| x.to_string()).unwrap_or_default(),
                    match &row.exact {
                        Some(Value::String(x)) => x.clone(),
                        Some(x) => x.to_string(),
                        None => String::new(),
                    },
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("utf-8"))
        }
        OutputFormat::Text => {
            if let Some(rep) = &e.report {
                let mut out = rep.to_text();
                for row in &e.rows {
                    let _ = writeln!(out, "  r={:?} {} = {:.12e}", row.r.unwrap_or(0), row.quantity, row.abs);
                }
                return Ok(out);
            }
            let mut out = String::new();
            if let Some(sel) = &job.selector {
                let _ = writeln!(out, "{sel}");
            }
            for row in &e.rows {
                let at = match (row.r, row.s) {
                    (Some(r), Some(s)) => format!("r={r} s={s} "),
                    _ => String::new(),
                };
                let ex = match &row.exact {
                    Some(Value::String(x)) => format!("  [{x}]"),
                    _ => String::new(),
                };
                let st = row.status.map(|s| format!("  {s}")).unwrap_or_default();
                let _ = writeln!(out, "  {at}{} = {:.15} {:+.15}i{ex}{st}", row.quantity, row.re, row.im);
            }
            for (k, v) in &e.extra {
                let _ = writeln!(out, "  {k}: {v}");
            }
            Ok(out)
        }
    }
}

fn run_wrt(job: &JobSpec, ctxs: &[RootContext]) -> Result<Emitted> {
    let m = job.manifold()?;
    let exact = job.exact;
    let per: Vec<Vec<Row>> = ctxs
        .par_iter()
        .map(|ctx| -> Result<Vec<Row>> {
            let mut rows = Vec::new();
            let c = Some(ctx);
            if let Manifold::Qhs(crate::seifert::QhsFamily::Lens(p)) = m {
                let (w, _) = wrt_lens(p, ctx)?;
                if job.method != Method::Surgery {
                    rows.push(Row::cyclo(c, "W", w.exact.as_ref().expect("exact"), exact));
                }
                if job.method != Method::Closed {
                    rows.push(Row::cyclo(c, "tau_surgery", &lens_tau_surgery(p, ctx)?, exact));
                }
                return Ok(rows);
            }
            let d = m.data()?;
            let mut closed_tau = None;
            if job.method != Method::Surgery {
                let v = wrt_seifert_closed(&d, ctx)?;
                let Normalization::Prefactored(delta) = v.normalization.clone() else {
                    unreachable!("closed form is prefactored")
                };
                let tau = tau_from_prefactored(v.exact.as_ref().expect("exact"), &delta, ctx);
                rows.push(Row::cyclo(c, "tau", &tau, exact));
                if let Ok(w) = w_closed(&d, ctx) {
                    rows.push(Row::cyclo(c, "W", &w, exact));
                }
                closed_tau = Some(tau.eval_complex());
            }
            if job.method != Method::Closed {
                let b = wrt_brute_surgery(&d, ctx)?;
                let mut row = match &b.exact {
                    Some(x) => Row::cyclo(c, "tau_surgery", x, exact),
                    None => Row::new(c, "tau_surgery", b.numeric),
                };
                if let Some(t) = closed_tau {
                    let ok = (t - b.numeric).norm() <= 1e-9 * t.norm().max(1.0);
                    row.status = Some(Status::from_bool(ok));
                }
                rows.push(row);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(Emitted::rows(per.into_iter().flatten().collect()))
}

fn run_falsetheta(job: &JobSpec, ctxs: &[RootContext]) -> Result<Emitted> {
    let basis = Basis::parse(job.selector.as_deref().unwrap_or_default())?;
    let f = basis.function()?;
    let mut rows: Vec<Row> = (0..=job.order)
        .map(|k| Row::rational(None, format!("L(-{})", 2 * k), &l_value(&f, k)))
        .collect();
    rows.push(Row::rational(None, "t_phase", &basis.t_phase()));
    let per: Vec<Vec<Row>> = ctxs
        .par_iter()
        .map(|ctx| {
            let c = Some(ctx);
            vec![
                Row::cyclo(c, "limit(s/r)", &eichler_limit(&f, &ctx.alpha()), job.exact),
                Row::cyclo(c, "limit(-r/s)", &eichler_limit(&f, &Q::new((-ctx.r).into(), ctx.s.into())), job.exact),
                Row::new(c, format!("trivial_series(K={})", job.order), trivial_series(&f, job.order, ctx)),
            ]
        })
        .collect();
    rows.extend(per.into_iter().flatten());
    Ok(Emitted::rows(rows))
}

fn conn_label(c: &FlatConnection) -> String {
    match &c.kind {
        ConnectionKind::Trivial => "trivial".into(),
        ConnectionKind::Abelian(a) => format!("abelian:{a}"),
        ConnectionKind::Nonabelian(a) => format!("nonabelian:{},{},{}", a[0], a[1], a[2]),
        ConnectionKind::Geometric => "geometric".into(),
    }
}

fn run_flatconn(job: &JobSpec) -> Result<Emitted> {
    let m = job.manifold()?;
    let d = m.data()?;
    let inv = d.invariants()?;
    let mut conns = vec![FlatConnection::trivial()];
    match &m {
        Manifold::Brieskorn(p) => conns.extend(nonabelian_connections(even_first(*p))?),
        Manifold::Qhs(f) => conns = abelian_connections(*f, job.s)?,
        Manifold::Seifert(_) => {}
    }
    if let Ok(g) = geometric_connection(&d) {
        conns.push(g);
    }
    let mut rows = vec![
        Row::rational(None, "e", &inv.e),
        Row::rational(None, "chi", &inv.chi),
        Row::rational(None, "phi", &inv.phi),
        Row::rational(None, "P", &Q::from_integer(inv.p.into())),
        Row::rational(None, "H", &Q::from_integer(inv.h.into())),
    ];
    for c in &conns {
        rows.push(Row::rational(None, format!("cs_lift[{}]", conn_label(c)), &c.cs_lift));
    }
    let mut e = Emitted::rows(rows);
    e.extra.insert("geometry".into(), json!(classify_geometry(&inv.e, &inv.chi).to_string()));
    e.extra.insert(
        "connections".into(),
        json!(conns
            .iter()
            .map(|c| json!({
                "kind": conn_label(c),
                "cs": c.cs.value().to_string(),
                "cs_lift": c.cs_lift.to_string(),
            }))
            .collect::<Vec<_>>()),
    );
    Ok(e)
}

fn run_verify(job: &JobSpec, ctxs: &[RootContext]) -> Result<Emitted> {
    let m = job.manifold()?;
    let suite = job.suite.as_deref().unwrap_or("all");
    if suite == "modularity" {
        let (rep, scan) = verify_modularity(&m, ctxs, job.order, job.tolerance.unwrap_or(0.5))?;
        let rows = scan
            .rows
            .iter()
            .map(|x| {
                let c = RootContext { r: x.r, s: x.s };
                Row::new(Some(&c), "residual", Complex64::new(x.re, x.im))
            })
            .collect();
        let mut e = Emitted::rows(rows);
        e.extra.insert("slope".into(), json!(scan.slope));
        e.report = Some(rep);
        return Ok(e);
    }
    let rep = verify(&m, ctxs, suite.parse::<Suite>()?)?;
    let rows = rep
        .checks
        .iter()
        .map(|c| {
            let ctx = c.r.zip(c.s).map(|(r, s)| RootContext { r, s });
            let mut row = Row::new(ctx.as_ref(), c.name.clone(), Complex64::new(0.0, 0.0));
            if let Some(v) = c.evidence.get("value").or_else(|| c.evidence.get("lhs")) {
                if let (Some(re), Some(im)) = (v[0].as_f64(), v[1].as_f64()) {
                    row = Row::new(ctx.as_ref(), c.name.clone(), Complex64::new(re, im));
                }
            }
            row.status = Some(c.status);
            row
        })
        .collect();
    let mut e = Emitted::rows(rows);
    e.report = Some(rep);
    Ok(e)
}

fn run_sweep(job: &JobSpec, ctxs: &[RootContext]) -> Result<Emitted> {
    let m = job.manifold()?;
    let scan = residual_scan(&m, ctxs, job.order)?;
    let rows = scan
        .rows
        .iter()
        .map(|x| Row::new(Some(&RootContext { r: x.r, s: x.s }), "residual", Complex64::new(x.re, x.im)))
        .collect();
    let mut e = Emitted::rows(rows);
    e.extra.insert("order".into(), json!(job.order));
    e.extra.insert("slope".into(), json!(scan.slope));
    Ok(e)
}

fn run_gauss(job: &JobSpec) -> Result<Emitted> {
    let (s, r) = (job.s, job.r.expect("validated"));
    let closed = gauss_closed(s, r)?;
    let brute = gauss_brute(s, r);
    let cz = closed.value();
    let bz = brute.eval_complex();
    let ok = (cz - bz).norm() <= 1e-9 * (r as f64).sqrt().max(1.0);
    let mut row = Row::cyclo(None, "G", &brute, job.exact);
    row.status = Some(Status::from_bool(ok));
    let mut e = Emitted::rows(vec![row]);
    e.extra.insert("closed".into(), json!(closed));
    e.extra.insert("closed_re".into(), json!(cz.re));
    e.extra.insert("closed_im".into(), json!(cz.im));
    e.extra.insert("brute_re".into(), json!(bz.re));
    e.extra.insert("brute_im".into(), json!(bz.im));
    e.extra.insert("match".into(), json!(ok));
    Ok(e)
}

fn failures(e: &Emitted) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(rep) = &e.report {
        for c in rep.failures() {
            out.push(match (c.r, c.s) {
                (Some(r), Some(s)) => format!("{} (r={r}, s={s})", c.name),
                _ => c.name.clone(),
            });
        }
    } else {
        for row in &e.rows {
            if row.status == Some(Status::Fail) {
                out.push(match (row.r, row.s) {
                    (Some(r), Some(s)) => format!("{} (r={r}, s={s})", row.quantity),
                    _ => row.quantity.clone(),
                });
            }
        }
    }
    out
}

fn run_inner(job: &JobSpec) -> Result<RunOutput> {
    let ctxs = match job.command {
        CommandKind::Gauss | CommandKind::Flatconn => vec![],
        _ => job.contexts()?,
    };
    let e = match job.command {
        CommandKind::Wrt => run_wrt(job, &ctxs)?,
        CommandKind::Falsetheta => run_falsetheta(job, &ctxs)?,
        CommandKind::Flatconn => run_flatconn(job)?,
        CommandKind::Verify => run_verify(job, &ctxs)?,
        CommandKind::Sweep => run_sweep(job, &ctxs)?,
        CommandKind::Gauss => run_gauss(job)?,
    };
    Ok(RunOutput { stdout: render(job, &ctxs, &e)?, failures: failures(&e) })
}

/// Executes a job on its own worker pool.
pub fn run(job: &JobSpec) -> Result<RunOutput> {
    match job.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| run_inner(job)),
        None => run_inner(job),
    }
}

/// Exit codes: 0 all checks passed, 1 a check failed, 2 usage error.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let job = match parse_args(argv) {
        Ok(j) => j,
        Err(CliError::Clap(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    match run(&job) {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.failures.is_empty() {
                0
            } else {
                for f in &out.failures {
                    eprintln!("failed: {f}");
                }
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> std::result::Result<JobSpec, CliError> {
        parse_args(std::iter::once("qmwrt").chain(s.split_whitespace()))
    }

    #[test]
    fn parses_examples() {
        let j = parse("wrt --manifold brieskorn:2,3,7 --r 29 --s 5 --exact --json").unwrap();
        assert_eq!(j.command, CommandKind::Wrt);
        assert_eq!((j.r, j.s, j.exact, j.format), (Some(29), 5, true, OutputFormat::Json));
        let j = parse("verify modularity --manifold brieskorn:2,3,7 --s 5 --r-range 101:501:50 --order 3").unwrap();
        assert_eq!(j.suite.as_deref(), Some("modularity"));
        assert_eq!(j.r_range.unwrap().values().len(), 9);
        assert_eq!(j.order, 3);
    }

    #[test]
    fn rejects_bad_input() {
        match parse("wrt --manifold brieskorn:2,3,7 --r 4") {
            Err(CliError::Usage(m)) => assert!(m.contains("r must be odd"), "{m}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("wrt --manifold torus:3 --r 5"), Err(CliError::Usage(_))));
        assert!(matches!(parse("wrt --manifold lens:3 --r 15 --s 5"), Err(CliError::Usage(_))));
        assert!(matches!(parse("sweep --manifold lens:3 --r-range 101:201:5"), Err(CliError::Usage(_))));
        assert!(matches!(parse("verify bogus --manifold lens:3 --r 5"), Err(CliError::Usage(_))));
        assert!(matches!(parse("wrt --r 5"), Err(CliError::Clap(_))));
    }

    #[test]
    fn contexts_are_normalized_and_ordered() {
        let j = parse("sweep --manifold brieskorn:2,3,7 --s 3 --r-range 5:17:6").unwrap();
        let c = j.contexts().unwrap();
        assert_eq!(c.iter().map(|x| x.r).collect::<Vec<_>>(), vec![5, 11, 17]);
        assert!(c.iter().all(|x| x.s % 4 == 1 && (x.s - 3) % x.r == 0));
    }

    #[test]
    fn basis_selector() {
        assert_eq!(Basis::parse("phi:2,3,7:1,1,1").unwrap(), Basis::Phi([2, 3, 7], [1, 1, 1]));
        assert_eq!(Basis::parse("psi:6:1").unwrap(), Basis::Psi(6, 1));
        assert!(Basis::parse("psi:6:6").is_err());
        assert!(Basis::parse("theta:6").is_err());
    }
}
