//! Command-line front end for `zeropres`.
//!
//! [`run`] executes one [`RunConfig`] against the contents of an operator
//! file and writes a text or JSON report. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | certified, consistent with the evidence, or nothing to report |
//! | 1 | falsified; the witness is printed |
//! | 2 | usage, parse or validation error |
//! | 3 | numerical failure |
//!
//! JSON reports contain no maps with unspecified order and no timing, so a
//! fixed configuration and seed give byte-identical output.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;
use zeropres::certify::PolyWitness;
use zeropres::{
    certify_closed, certify_closed_bounded, certify_open, falsify, gcd_image, nonvanishing_check,
    operator_symbol, Budget, CertReport, LinearOperator, MoebiusDomain, Nonvanishing,
    NonvanishingMode, Poly, Region, RegionTag, Verdict, Witness,
};

pub mod config;
pub mod opfile;

pub use config::{Class, Command, Output, RunConfig};
pub use opfile::{parse_operator, serialize_operator};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid entry `{entry}`: {message}")]
    Entry { entry: String, message: String },
    #[error("entry `{entry}`: index {index} exceeds the horizon N = {horizon}")]
    Horizon {
        entry: String,
        index: usize,
        horizon: usize,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] zeropres::Error),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

/// Coefficient of `z^i w^j`.
#[derive(Serialize)]
struct Term {
    i: usize,
    j: usize,
    #[serde(serialize_with = "pair")]
    c: num_complex::Complex64,
}

fn pair<S: serde::Serializer>(z: &num_complex::Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'static str,
    domain: &'a MoebiusDomain,
    seed: u64,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct SymbolBody {
    n: usize,
    mode: NonvanishingMode,
    samples: usize,
    terms: Vec<Term>,
    search: Nonvanishing,
    verified: Option<bool>,
}

#[derive(Serialize)]
struct FalsifyBody {
    source: Region,
    target: Region,
    degrees: [usize; 2],
    trials: usize,
    witness: Option<PolyWitness>,
}

#[derive(Serialize)]
struct GcdBody {
    n: usize,
    samples: usize,
    gcd: Poly,
    images: usize,
    stable: bool,
}

#[derive(Serialize)]
struct PointBody {
    #[serde(serialize_with = "pair")]
    z: num_complex::Complex64,
    tag: RegionTag,
    side: f64,
    normalized_side: f64,
    #[serde(serialize_with = "pair")]
    phi: num_complex::Complex64,
}

fn domain_of(config: &RunConfig) -> Result<MoebiusDomain, CliError> {
    let dom = MoebiusDomain::from_spec(&config.domain_spec)?;
    Ok(match config.tol {
        Some(tol) if tol > 0.0 && tol.is_finite() => dom.with_tol(tol),
        Some(tol) => return Err(CliError::Usage(format!("--tol must be positive, got {tol}"))),
        None => dom,
    })
}

fn need<T>(v: Option<T>, flag: &str, command: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{command} needs {flag}")))
}

fn emit<T: Serialize>(
    config: &RunConfig,
    dom: &MoebiusDomain,
    command: &'static str,
    body: T,
    text: impl FnOnce(&T) -> String,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match config.output {
        Output::Json => {
            let env = Envelope {
                command,
                domain: dom,
                seed: config.seed,
                body,
            };
            let s = serde_json::to_string_pretty(&env).expect("report serializes");
            writeln!(out, "{s}")?;
        }
        Output::Text => write!(out, "{}", text(&body))?,
    }
    Ok(())
}

fn fmt_c(z: num_complex::Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Poly(p) => poly_witness_text(p),
        Witness::Symbol { n, mode, zero } => format!(
            "witness: T[Q_{n}] vanishes at z = {}, w = {} ({:?} x {:?}), |F| = {:.3e}\n",
            fmt_c(zero.z),
            fmt_c(zero.w),
            mode.z_region,
            mode.w_region,
            zero.value.norm()
        ),
    }
}

fn poly_witness_text(w: &PolyWitness) -> String {
    format!(
        "witness: p = {}\n  T[p] = {}\n  bad root {} is {} (target {:?})\n",
        w.p,
        w.image,
        fmt_c(w.bad_root),
        w.bad_tag,
        w.target
    )
}

fn certify_text(r: &CertReport) -> String {
    let mut s = format!(
        "verdict: {}\nroute: {}\nclass: {}, horizon {}, n_max {}\nbudget: {} w-samples, {} trials, seed {}\n",
        serde_json::to_value(r.verdict).unwrap().as_str().unwrap(),
        serde_json::to_value(r.route).unwrap().as_str().unwrap(),
        serde_json::to_value(&r.class).unwrap().as_str().unwrap(),
        r.horizon,
        r.n_max,
        r.budget.w_samples,
        r.budget.trials,
        r.budget.seed
    );
    if let Some(w) = &r.witness {
        s += &witness_text(w);
    }
    let d = &r.diagnostics;
    if let Some(k) = d.minimal_k {
        s += &format!("minimal k: {k}\n");
    }
    if let Some(b) = &d.boundary {
        let roots: Vec<String> = b
            .roots
            .iter()
            .map(|r| format!("{} ({})", fmt_c(r.location), r.tag))
            .collect();
        s += &format!(
            "boundary check on T[z^{}]: {} [{}]\n",
            b.k,
            if b.passes { "pass" } else { "fail" },
            roots.join(", ")
        );
    }
    if let Some(r1) = &d.rank_one {
        s += &format!("rank one: P = {}\n", r1.form.p);
    }
    for (label, list) in [("stability", &d.closed_symbols), ("closure x interior", &d.open_symbols)] {
        for sr in list {
            s += &format!(
                "symbol n={} ({label}): {} after {} samples\n",
                sr.n,
                serde_json::to_value(sr.status).unwrap().as_str().unwrap(),
                sr.samples
            );
        }
    }
    s
}

fn certify(
    config: &RunConfig,
    dom: &MoebiusDomain,
    t: &LinearOperator,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let budget = Budget {
        w_samples: config.samples.unwrap_or(zeropres::symbol::W_SAMPLES),
        trials: config.trials,
        seed: config.seed,
    };
    let n_max = config.n_max.min(t.horizon());
    let report = match (config.class, t.bounded_degree()) {
        (Class::Closed, Some(_)) => certify_closed_bounded(t, dom, &budget)?,
        (Class::Closed, None) => certify_closed(t, dom, n_max, &budget)?,
        (Class::Open, _) => certify_open(t, dom, n_max, &budget)?,
    };
    let code = if report.verdict == Verdict::Falsified { 1 } else { 0 };
    emit(config, dom, "certify", report, certify_text, out)?;
    Ok(code)
}

fn symbol(
    config: &RunConfig,
    dom: &MoebiusDomain,
    t: &LinearOperator,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let n = need(config.n, "--n", "symbol")?;
    let f = operator_symbol(t, dom, n)?;
    let mode = match config.class {
        Class::Closed => NonvanishingMode::STABILITY,
        Class::Open => NonvanishingMode::CLOSURE_INTERIOR,
    };
    let samples = config.samples.unwrap_or(zeropres::symbol::W_SAMPLES);
    let terms = f
        .terms()
        .into_iter()
        .map(|(i, j, c)| Term { i, j, c })
        .collect();
    let (search, verified) = if f.is_zero() {
        (Nonvanishing::NoZeroFound { samples: 0, degenerate: 0 }, None)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let search = nonvanishing_check(&f, dom, mode, samples, &mut rng)?;
        let verified = search.witness().map(|w| w.verify(&f, dom, mode));
        (search, verified)
    };
    let code = if verified == Some(true) { 1 } else { 0 };
    let body = SymbolBody {
        n,
        mode,
        samples,
        terms,
        search,
        verified,
    };
    emit(config, dom, "symbol", body, |b| {
        let mut s = format!("T[Q_{}] coefficients (z^i w^j):\n", b.n);
        for t in &b.terms {
            s += &format!("  {} {} {}\n", t.i, t.j, fmt_c(t.c));
        }
        match (b.search.witness(), b.verified) {
            (Some(w), Some(true)) => {
                s += &format!("zero found at z = {}, w = {}\n", fmt_c(w.z), fmt_c(w.w))
            }
            (Some(_), _) => s += "reported zero failed re-verification\n",
            (None, _) => s += &format!("no zero found ({} slices per pass)\n", b.samples),
        }
        s
    }, out)?;
    Ok(code)
}

fn falsify_cmd(
    config: &RunConfig,
    dom: &MoebiusDomain,
    t: &LinearOperator,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let (source, target) = match config.class {
        Class::Closed => (Region::Complement, Region::Complement),
        Class::Open => (Region::Exterior, Region::Exterior),
    };
    let source = config.source.unwrap_or(source);
    let target = config.target.unwrap_or(target);
    let limit = t.bounded_degree().unwrap_or(t.horizon());
    let degrees = config
        .degree_range
        .clone()
        .unwrap_or(0..=config.n_max.min(limit));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let witness = falsify(t, dom, source, target, degrees.clone(), config.trials, &mut rng)?;
    let code = if witness.is_some() { 1 } else { 0 };
    let body = FalsifyBody {
        source,
        target,
        degrees: [*degrees.start(), *degrees.end()],
        trials: config.trials,
        witness,
    };
    emit(config, dom, "falsify", body, |b| match &b.witness {
        Some(w) => format!("falsified\n{}", poly_witness_text(w)),
        None => format!("no counterexample in {} trials\n", b.trials),
    }, out)?;
    Ok(code)
}

fn gcd_cmd(
    config: &RunConfig,
    dom: &MoebiusDomain,
    t: &LinearOperator,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let n = need(config.n, "--n", "gcd-image")?;
    let samples = config.samples.unwrap_or(zeropres::certify::GCD_SAMPLES);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let g = gcd_image(t, dom, n, samples, &mut rng)?;
    let body = GcdBody {
        n,
        samples,
        gcd: g.gcd,
        images: g.images,
        stable: g.stable,
    };
    emit(config, dom, "gcd-image", body, |b| {
        format!(
            "gcd of {} images at degree {}: {}{}\n",
            b.images,
            b.n,
            b.gcd,
            if b.stable { "" } else { " (unstable under resampling)" }
        )
    }, out)?;
    Ok(0)
}

fn classify_cmd(config: &RunConfig, dom: &MoebiusDomain, out: &mut dyn Write) -> Result<i32, CliError> {
    let z = need(config.z, "--z", "classify-point")?;
    let body = PointBody {
        z,
        tag: dom.classify(z),
        side: dom.side(z),
        normalized_side: dom.normalized_side(z),
        phi: dom.phi(z),
    };
    emit(config, dom, "classify-point", body, |b| format!("{}\n", b.tag), out)?;
    Ok(0)
}

fn dispatch(config: &RunConfig, operator_text: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let dom = domain_of(config)?;
    if config.command == Command::ClassifyPoint {
        return classify_cmd(config, &dom, out);
    }
    let t = parse_operator(operator_text)?;
    match config.command {
        Command::Certify => certify(config, &dom, &t, out),
        Command::Symbol => symbol(config, &dom, &t, out),
        Command::Falsify => falsify_cmd(config, &dom, &t, out),
        Command::GcdImage => gcd_cmd(config, &dom, &t, out),
        Command::ClassifyPoint => unreachable!(),
    }
}

/// Runs one command and returns the process exit code. Errors are reported
/// on `out`, as `{"error": ...}` in JSON mode.
pub fn run(config: &RunConfig, operator_text: &str, out: &mut dyn Write) -> i32 {
    match dispatch(config, operator_text, out) {
        Ok(code) => code,
        Err(e) => {
            let code = e.exit_code();
            let _ = match config.output {
                Output::Json => writeln!(
                    out,
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "exit_code": code })
                ),
                Output::Text => writeln!(out, "error: {e}"),
            };
            code
        }
    }
}
