use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use zeropres::Region;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Certify or falsify the operator for the chosen class.
    Certify,
    /// Print the symbol T[Q_n] and search it for zeros.
    Symbol,
    /// Random search for a counterexample polynomial.
    Falsify,
    /// Common roots of T applied to sampled degree-n polynomials.
    GcdImage,
    /// Tag a point as interior, boundary or exterior.
    ClassifyPoint,
}

impl Command {
    pub fn needs_operator(self) -> bool {
        self != Command::ClassifyPoint
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Class {
    /// Roots in the closed complement of the domain.
    Closed,
    /// Roots in the open exterior.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub operator_path: Option<PathBuf>,
    /// A preset name, or `moebius` followed by eight reals.
    pub domain_spec: Vec<String>,
    pub class: Class,
    pub n_max: usize,
    /// Falsifier degrees; defaults to `0..=n_max` capped at the horizon.
    pub degree_range: Option<RangeInclusive<usize>>,
    /// w-samples per symbol, or sampled polynomials for `gcd-image`.
    pub samples: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Boundary band tolerance.
    pub tol: Option<f64>,
    pub output: Output,
    pub n: Option<usize>,
    pub z: Option<Complex64>,
    pub source: Option<Region>,
    pub target: Option<Region>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Certify,
            operator_path: None,
            domain_spec: vec!["upper-half-plane".into()],
            class: Class::Closed,
            n_max: 8,
            degree_range: None,
            samples: None,
            trials: 2000,
            seed: 0,
            tol: None,
            output: Output::Text,
            n: None,
            z: None,
            source: None,
            target: None,
        }
    }
}

fn parse_degrees(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, found `{s}`"))?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad lower degree `{lo}`"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad upper degree `{hi}`"))?;
    if lo > hi {
        return Err(format!("empty degree range {lo}..{hi}"));
    }
    Ok(lo..=hi)
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let part = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{x}` is not a real number"))
    };
    Ok(Complex64::new(part(re)?, part(im)?))
}

fn parse_region(s: &str) -> Result<Region, String> {
    s.parse().map_err(|e: zeropres::Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "zeropres", version)]
#[command(about = "Root-location preservation checks for linear operators on polynomials")]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Operator file (JSON).
    #[arg(value_name = "OPERATOR")]
    operator: Option<PathBuf>,
    /// Preset name or `moebius a_re a_im b_re b_im c_re c_im d_re d_im`.
    #[arg(long, num_args = 1..=9, allow_negative_numbers = true, default_value = "upper-half-plane")]
    domain: Vec<String>,
    #[arg(long, value_enum, default_value = "closed")]
    class: Class,
    #[arg(long, default_value_t = 8)]
    nmax: usize,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    /// Falsifier degree range, `lo..hi` inclusive.
    #[arg(long, value_parser = parse_degrees)]
    degrees: Option<RangeInclusive<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    json: bool,
    /// Symbol or GCD degree.
    #[arg(long)]
    n: Option<usize>,
    /// Point as `re,im`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    z: Option<Complex64>,
    #[arg(long, value_parser = parse_region)]
    source: Option<Region>,
    #[arg(long, value_parser = parse_region)]
    target: Option<Region>,
}

impl RunConfig {
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let a = Args::try_parse_from(args)?;
        Ok(RunConfig {
            command: a.command,
            operator_path: a.operator,
            domain_spec: a.domain,
            class: a.class,
            n_max: a.nmax,
            degree_range: a.degrees,
            samples: a.samples,
            trials: a.trials,
            seed: a.seed,
            tol: a.tol,
            output: if a.json { Output::Json } else { Output::Text },
            n: a.n,
            z: a.z,
            source: a.source,
            target: a.target,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::from_args(["zeropres", "certify", "op.json"]).unwrap();
        assert_eq!(
            c,
            RunConfig {
                operator_path: Some("op.json".into()),
                ..RunConfig::default()
            }
        );
    }

    #[test]
    fn moebius_domain_and_flags() {
        let c = RunConfig::from_args([
            "zeropres", "falsify", "op.json", "--domain", "moebius", "0", "-1", "0", "1", "1", "0",
            "1", "0", "--degrees", "1..4", "--seed", "7", "--json", "--class", "open",
        ])
        .unwrap();
        assert_eq!(c.domain_spec.len(), 9);
        assert_eq!(c.degree_range, Some(1..=4));
        assert_eq!((c.seed, c.output, c.class), (7, Output::Json, Class::Open));
    }

    #[test]
    fn point_and_regions() {
        let c = RunConfig::from_args([
            "zeropres", "classify-point", "--z", "-0.5,2", "--domain", "unit-disk",
        ])
        .unwrap();
        assert_eq!(c.z, Some(Complex64::new(-0.5, 2.0)));
        let c = RunConfig::from_args(["zeropres", "falsify", "x", "--source", "closure", "--target", "interior"])
            .unwrap();
        assert_eq!((c.source, c.target), (Some(Region::Closure), Some(Region::Interior)));
    }

    #[test]
    fn bad_flags() {
        assert!(RunConfig::from_args(["zeropres", "certify", "--degrees", "4..1"]).is_err());
        assert!(RunConfig::from_args(["zeropres", "frobnicate"]).is_err());
        assert!(RunConfig::from_args(["zeropres", "certify", "--class", "ajar"]).is_err());
    }
}
