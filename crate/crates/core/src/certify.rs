//! Decision procedures for root preservation.
//!
//! An operator `T` preserves a region `K` when every polynomial with all roots
//! in `K` is mapped to a polynomial with all roots in `K`, or to zero.
//! Nonzero constants have no roots and always qualify.
//!
//! Two classes are handled for a domain `C`:
//!
//! * the closed class, `K = C'` (complement of `C`, boundary included);
//! * the open class, `K = C^r` (the open exterior).
//!
//! Sampling never proves membership. A pass is reported as
//! [`Verdict::EvidenceConsistent`] together with its budget and seed; only the
//! rank-one structure earns [`Verdict::CertifiedRankOne`]. Every
//! [`Verdict::Falsified`] report carries a witness that has been re-checked
//! independently of the search that found it.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{MoebiusDomain, Region, RegionTag};
use crate::enclose::{certified_tag, enclose, Enclosure};
use crate::error::{Error, Result};
use crate::operator::{LinearOperator, RankOneForm};
use crate::poly::{c64, Poly};
use crate::roots::{approx_gcd, roots_balanced, RootMultiset, CLUSTER_RADIUS};
use crate::symbol::{
    nonvanishing_check, operator_symbol, Nonvanishing, NonvanishingMode, ZeroWitness, W_SAMPLES,
    ZERO_TOL,
};

/// Default number of sampled polynomials in [`gcd_image`].
pub const GCD_SAMPLES: usize = 50;

// Independent RNG streams derived from one seed. Symbol degree `n` uses
// stream `n`, so the closed and open scans see the same w-samples.
const FALSIFY_STREAM: u64 = 1 << 32;
const WITNESS_STREAM: u64 = 1 << 33;

const WITNESS_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedRankOne,
    /// No violation within the sampling budget.
    EvidenceConsistent,
    Falsified,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self != Verdict::Falsified
    }
}

/// Which criterion produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Rank-one structure or stability of every `T[Q_n]`, `n <= n_max`.
    ClosedSymbol,
    /// Rank-one structure or stability of the single symbol `T[Q_n]` at the bounded degree.
    BoundedClosedSymbol,
    /// Closed evidence plus the boundary test on the first nonzero `T[z^k]`.
    MinimalKBoundary,
    /// Nonvanishing of `T[Q_n]` with `z` in the closure and `w` in `C`.
    OpenSymbol,
    /// Random search only.
    FalsifierOracle,
}

/// Sampling budget. `seed` determines every sampled quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub w_samples: usize,
    pub trials: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            w_samples: W_SAMPLES,
            trials: 2000,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// A polynomial with admissible roots whose image has an inadmissible root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyWitness {
    pub p: Poly,
    #[serde(serialize_with = "crate::ser::complex_vec")]
    pub p_roots: Vec<Complex64>,
    pub image: Poly,
    #[serde(serialize_with = "crate::ser::complex")]
    pub bad_root: Complex64,
    /// Tag certified by the enclosing disk; a far root inside the invariant
    /// boundary band can resolve to a strict side.
    pub bad_tag: RegionTag,
    pub source: Region,
    pub target: Region,
    /// `|Tp(r)| / sum |c_i| |r|^i` at the bad root.
    pub residual: f64,
    /// Radius of a disk around the bad root that holds a zero of the image
    /// and certifies `bad_tag`.
    pub radius: f64,
}

fn poly_eval(p: &Poly) -> impl Fn(Complex64) -> (Complex64, f64) + '_ {
    move |z| (p.eval(z), p.abs_eval(z.norm()))
}

impl PolyWitness {
    /// Recomputes the image and every region tag from scratch.
    pub fn verify(&self, t: &LinearOperator, dom: &MoebiusDomain) -> bool {
        let Ok(image) = t.apply(&self.p) else {
            return false;
        };
        if image.is_zero() || image.degree().is_none() {
            return false;
        }
        if image.max_diff(&self.image) > 1e-12 * image.max_abs().max(1.0) {
            return false;
        }
        if self.p.degree() != Some(self.p_roots.len()) {
            return false;
        }
        let roots_ok = self.p_roots.iter().all(|&r| {
            self.source.admits(dom.classify(r))
                && self.p.eval(r).norm() <= ZERO_TOL * self.p.abs_eval(r.norm())
        });
        let r = self.bad_root;
        let degree = image.degree().unwrap_or(0);
        roots_ok
            && image.eval(r).norm() <= ZERO_TOL * image.abs_eval(r.norm())
            && certified_tag(&poly_eval(&image), degree, dom, r, self.radius)
                .is_some_and(|tag| tag == self.bad_tag && !self.target.admits(tag))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Symbol {
        n: usize,
        mode: NonvanishingMode,
        zero: ZeroWitness,
    },
    Poly(PolyWitness),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolStatus {
    IdenticallyZero,
    NoZeroFound,
    ZeroFound,
    /// The search reported a zero that failed re-verification.
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolResult {
    pub n: usize,
    pub status: SymbolStatus,
    pub samples: usize,
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaggedRoot {
    #[serde(serialize_with = "crate::ser::complex")]
    pub location: Complex64,
    pub multiplicity: usize,
    pub tag: RegionTag,
}

fn tag_roots(ms: &RootMultiset, dom: &MoebiusDomain) -> Vec<TaggedRoot> {
    ms.roots
        .iter()
        .map(|r| TaggedRoot {
            location: r.location,
            multiplicity: r.multiplicity,
            tag: dom.classify(r.location),
        })
        .collect()
}

fn tagged_roots_of(p: &Poly, dom: &MoebiusDomain) -> Result<Vec<TaggedRoot>> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    Ok(tag_roots(&roots_balanced(p)?, dom))
}

/// Roots of the first nonzero monomial image `T[z^k]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCheck {
    pub k: usize,
    pub image: Poly,
    pub roots: Vec<TaggedRoot>,
    pub passes: bool,
}

/// Rank-one structure `T f = α(f) P` with the tags of `P`'s roots.
///
/// `closed` is the region test for the closed class (every root in `C'`).
/// For the open class two readings are recorded: `open_literal` asks for
/// `P` to have its roots in `C'`, `open_strict` in the open exterior. Only
/// the strict reading is used, since a boundary root of `P` is itself a
/// counterexample for the open class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankOneDiagnostics {
    pub form: RankOneForm,
    pub roots: Vec<TaggedRoot>,
    pub closed: bool,
    pub open_literal: bool,
    pub open_strict: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    pub minimal_k: Option<usize>,
    pub boundary: Option<BoundaryCheck>,
    pub rank_one: Option<RankOneDiagnostics>,
    /// Per-degree results in stability mode.
    pub closed_symbols: Vec<SymbolResult>,
    /// Per-degree results with `z` in the closure.
    pub open_symbols: Vec<SymbolResult>,
    pub closed_verdict: Option<Verdict>,
    pub minimal_k_verdict: Option<Verdict>,
    pub open_symbol_verdict: Option<Verdict>,
    /// Whether the two open-class routes agree on falsification.
    pub routes_agree: Option<bool>,
    /// Set when no criterion applies and only the random search ran.
    pub oracle_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Class {
    Closed,
    BoundedClosed,
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub verdict: Verdict,
    pub route: Route,
    pub class: Class,
    pub horizon: usize,
    pub n_max: usize,
    pub budget: Budget,
    pub witness: Option<Witness>,
    pub diagnostics: Diagnostics,
}

fn rank_one_diagnostics(t: &LinearOperator, dom: &MoebiusDomain) -> Result<Option<RankOneDiagnostics>> {
    let Some(form) = t.rank_one_check() else {
        return Ok(None);
    };
    let roots = tagged_roots_of(&form.p, dom)?;
    let closed = roots.iter().all(|r| r.tag.in_complement());
    let open_strict = roots.iter().all(|r| r.tag == RegionTag::Exterior);
    Ok(Some(RankOneDiagnostics {
        form,
        roots,
        closed,
        open_literal: closed,
        open_strict,
    }))
}

/// Scans `T[Q_n]` for the given degrees. The witness is the verified zero of
/// lowest degree; unless `exhaustive`, the scan stops there.
fn symbol_scan(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    degrees: impl IntoIterator<Item = usize>,
    mode: NonvanishingMode,
    budget: &Budget,
    exhaustive: bool,
) -> Result<(Vec<SymbolResult>, Option<Witness>)> {
    let mut results = Vec::new();
    let mut first = None;
    for n in degrees {
        let f = operator_symbol(t, dom, n)?;
        if f.is_zero() {
            results.push(SymbolResult {
                n,
                status: SymbolStatus::IdenticallyZero,
                samples: 0,
                degenerate: 0,
            });
            continue;
        }
        let mut rng = budget.stream(n as u64);
        match nonvanishing_check(&f, dom, mode, budget.w_samples, &mut rng)? {
            Nonvanishing::NoZeroFound {
                samples,
                degenerate,
            } => results.push(SymbolResult {
                n,
                status: SymbolStatus::NoZeroFound,
                samples,
                degenerate,
            }),
            Nonvanishing::Zero(zero) => {
                let verified = zero.verify(&f, dom, mode);
                results.push(SymbolResult {
                    n,
                    status: if verified {
                        SymbolStatus::ZeroFound
                    } else {
                        SymbolStatus::Rejected
                    },
                    samples: zero.sample + 1,
                    degenerate: 0,
                });
                if verified && first.is_none() {
                    first = Some(Witness::Symbol { n, mode, zero });
                    if !exhaustive {
                        break;
                    }
                }
            }
        }
    }
    Ok((results, first))
}

fn check_n_max(t: &LinearOperator, n_max: usize) -> Result<()> {
    if n_max > t.horizon() {
        return Err(Error::DegreeOutOfRange {
            degree: n_max,
            horizon: t.horizon(),
        });
    }
    Ok(())
}

fn closed_report(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    degrees: std::ops::RangeInclusive<usize>,
    budget: &Budget,
    route: Route,
    class: Class,
) -> Result<CertReport> {
    let n_max = *degrees.end();
    let mut diagnostics = Diagnostics {
        minimal_k: t.minimal_k(),
        rank_one: rank_one_diagnostics(t, dom)?,
        ..Diagnostics::default()
    };
    let (verdict, witness) = if diagnostics.rank_one.as_ref().is_some_and(|r| r.closed) {
        (Verdict::CertifiedRankOne, None)
    } else {
        let (results, witness) = symbol_scan(t, dom, degrees, NonvanishingMode::STABILITY, budget, false)?;
        diagnostics.closed_symbols = results;
        match witness {
            Some(w) => (Verdict::Falsified, Some(w)),
            None => (Verdict::EvidenceConsistent, None),
        }
    };
    diagnostics.closed_verdict = Some(verdict);
    Ok(CertReport {
        verdict,
        route,
        class,
        horizon: t.horizon(),
        n_max,
        budget: *budget,
        witness,
        diagnostics,
    })
}

/// Closed class: does `T` map `π(C')` into `π(C') ∪ {0}`?
pub fn certify_closed(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    n_max: usize,
    budget: &Budget,
) -> Result<CertReport> {
    check_n_max(t, n_max)?;
    closed_report(t, dom, 0..=n_max, budget, Route::ClosedSymbol, Class::Closed)
}

/// Closed class for an operator defined only on polynomials of degree at
/// most its bounded degree `n`. Only `T[Q_n]` is examined.
pub fn certify_closed_bounded(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    budget: &Budget,
) -> Result<CertReport> {
    let n = t.bounded_degree().ok_or(Error::UnboundedOperator)?;
    closed_report(t, dom, n..=n, budget, Route::BoundedClosedSymbol, Class::BoundedClosed)
}

/// Tags the roots of `T[z^k]` for the smallest `k` with a nonzero image.
/// Passes iff none of them lies on the boundary.
pub fn boundary_root_check(t: &LinearOperator, dom: &MoebiusDomain) -> Result<BoundaryCheck> {
    let k = t.minimal_k().ok_or(Error::ZeroOperator)?;
    let image = t.images()[k].clone();
    let roots = tagged_roots_of(&image, dom)?;
    let passes = roots.iter().all(|r| r.tag != RegionTag::Boundary);
    Ok(BoundaryCheck {
        k,
        image,
        roots,
        passes,
    })
}

/// Open class: does `T` map `π(C^r)` into `π(C^r) ∪ {0}`?
///
/// Two routes are run and compared. The minimal-k route combines the closed
/// verdict with [`boundary_root_check`]; the symbol route searches every
/// `T[Q_n]` for a zero with `z` in the closure. Disagreement is reported in
/// [`Diagnostics::routes_agree`] and left unresolved. The verdict follows the
/// minimal-k route, whose failures come with a polynomial witness.
///
/// Operators with a bounded degree fall outside both criteria; for them only
/// the random search runs and the report is marked oracle-only.
pub fn certify_open(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    n_max: usize,
    budget: &Budget,
) -> Result<CertReport> {
    if let Some(bounded) = t.bounded_degree() {
        return oracle_report(t, dom, bounded, budget);
    }
    check_n_max(t, n_max)?;
    let rank_one = rank_one_diagnostics(t, dom)?;
    let closed = certify_closed(t, dom, n_max, budget)?;
    let boundary = boundary_root_check(t, dom)?;

    let (route4, witness4) = if closed.verdict == Verdict::Falsified {
        (Verdict::Falsified, closed.witness.clone())
    } else if !boundary.passes {
        let w = boundary_witness(t, dom, boundary.k, budget)?.map(Witness::Poly);
        (Verdict::Falsified, w)
    } else {
        (Verdict::EvidenceConsistent, None)
    };

    let (open_symbols, witness5) =
        symbol_scan(t, dom, 0..=n_max, NonvanishingMode::CLOSURE_INTERIOR, budget, true)?;
    let route5 = if witness5.is_some() {
        Verdict::Falsified
    } else {
        Verdict::EvidenceConsistent
    };

    let strict = rank_one.as_ref().is_some_and(|r| r.open_strict);
    let (verdict, route, witness) = if strict {
        (Verdict::CertifiedRankOne, Route::OpenSymbol, None)
    } else if route4 == Verdict::Falsified && witness4.is_none() {
        // no polynomial witness could be built; fall back to the symbol zero
        (route4, Route::MinimalKBoundary, witness5)
    } else {
        (route4, Route::MinimalKBoundary, witness4)
    };

    let diagnostics = Diagnostics {
        minimal_k: Some(boundary.k),
        boundary: Some(boundary),
        rank_one,
        closed_symbols: closed.diagnostics.closed_symbols,
        open_symbols,
        closed_verdict: Some(closed.verdict),
        minimal_k_verdict: Some(route4),
        open_symbol_verdict: Some(route5),
        routes_agree: Some(route4.is_pass() == route5.is_pass()),
        oracle_only: false,
    };
    Ok(CertReport {
        verdict,
        route,
        class: Class::Open,
        horizon: t.horizon(),
        n_max,
        budget: *budget,
        witness,
        diagnostics,
    })
}

fn oracle_report(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    bounded: usize,
    budget: &Budget,
) -> Result<CertReport> {
    let mut rng = budget.stream(FALSIFY_STREAM);
    let found = falsify(
        t,
        dom,
        Region::Exterior,
        Region::Exterior,
        0..=bounded,
        budget.trials,
        &mut rng,
    )?;
    let verdict = if found.is_some() {
        Verdict::Falsified
    } else {
        Verdict::EvidenceConsistent
    };
    Ok(CertReport {
        verdict,
        route: Route::FalsifierOracle,
        class: Class::Open,
        horizon: t.horizon(),
        n_max: bounded,
        budget: *budget,
        witness: found.map(Witness::Poly),
        diagnostics: Diagnostics {
            minimal_k: t.minimal_k(),
            oracle_only: true,
            ..Diagnostics::default()
        },
    })
}

/// Degree-`k` polynomials with exterior roots: their image is a multiple of
/// `T[z^k]`, so a boundary root of `T[z^k]` carries over.
fn boundary_witness(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    k: usize,
    budget: &Budget,
) -> Result<Option<PolyWitness>> {
    let mut rng = budget.stream(WITNESS_STREAM);
    for _ in 0..WITNESS_ATTEMPTS {
        let roots = dom.sample(Region::Exterior, k, &mut rng)?;
        if let Some(w) = poly_witness(t, dom, &roots, Region::Exterior, Region::Exterior) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Builds and verifies a witness from `p = prod (z - r)`, if `Tp` has a root
/// outside `target`.
fn poly_witness(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    p_roots: &[Complex64],
    source: Region,
    target: Region,
) -> Option<PolyWitness> {
    let p = Poly::from_roots(p_roots, c64(1.0, 0.0));
    if p.degree() != Some(p_roots.len()) {
        // leading coefficient lost to overflow or cancellation
        return None;
    }
    let image = t.apply(&p).ok()?;
    if image.is_zero() || image.degree().is_none() {
        return None;
    }
    let roots = roots_balanced(&image).ok()?;
    roots.roots.iter().find_map(|r| {
        let z = r.location;
        let band_tag = dom.classify(z);
        if band_tag != RegionTag::Boundary && target.admits(band_tag) {
            return None;
        }
        let Enclosure { tag, radius } = enclose(&poly_eval(&image), image.degree()?, dom, z)?;
        if target.admits(tag) {
            return None;
        }
        let scale = image.abs_eval(z.norm());
        let w = PolyWitness {
            residual: if scale > 0.0 { image.eval(z).norm() / scale } else { 0.0 },
            radius,
            p: p.clone(),
            p_roots: p_roots.to_vec(),
            image: image.clone(),
            bad_root: z,
            bad_tag: tag,
            source,
            target,
        };
        w.verify(t, dom).then_some(w)
    })
}

/// Random search for a [`PolyWitness`]: `trials` polynomials with roots drawn
/// from `source` and degrees drawn uniformly from `degrees`. Returns the
/// witness from the earliest trial. The samples are generated up front, so
/// the result depends only on the RNG state.
pub fn falsify(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    source: Region,
    target: Region,
    degrees: std::ops::RangeInclusive<usize>,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Option<PolyWitness>> {
    use rand::Rng;
    let limit = t.bounded_degree().unwrap_or(t.horizon());
    if *degrees.end() > limit {
        return Err(Error::DegreeOutOfRange {
            degree: *degrees.end(),
            horizon: limit,
        });
    }
    if degrees.is_empty() {
        return Err(Error::InvalidArgument("empty degree range".into()));
    }
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let d = rng.gen_range(degrees.clone());
        samples.push(dom.sample(source, d, rng)?);
    }
    Ok(samples
        .par_iter()
        .find_map_first(|roots| poly_witness(t, dom, roots, source, target)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GcdImage {
    pub n: usize,
    pub gcd: Poly,
    /// Nonzero images that entered the GCD.
    pub images: usize,
    /// The GCD of the first half of the images matches the full one.
    pub stable: bool,
}

/// Monte-Carlo estimate of the GCD of `T` applied to every degree-`n`
/// polynomial with all roots in `C`.
pub fn gcd_image(
    t: &LinearOperator,
    dom: &MoebiusDomain,
    n: usize,
    sample_count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<GcdImage> {
    let limit = t.bounded_degree().unwrap_or(t.horizon());
    if n > limit {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            horizon: limit,
        });
    }
    if sample_count < 2 {
        return Err(Error::InvalidArgument("gcd_image needs at least 2 samples".into()));
    }
    let mut inputs = Vec::with_capacity(sample_count);
    for _ in 0..sample_count {
        inputs.push(dom.sample(Region::Interior, n, rng)?);
    }
    let images: Vec<Poly> = inputs
        .par_iter()
        .map(|roots| {
            let p = Poly::from_roots(roots, c64(1.0, 0.0));
            t.apply(&p)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|img| img.degree().is_some())
        .collect();
    if images.is_empty() {
        return Err(Error::AllImagesZero);
    }
    let gcd = approx_gcd(&images, CLUSTER_RADIUS)?;
    let half = approx_gcd(&images[..images.len().div_ceil(2)], CLUSTER_RADIUS)?;
    let stable = half.len() == gcd.len() && half.max_diff(&gcd) <= 1e-6 * gcd.max_abs();
    Ok(GcdImage {
        n,
        gcd,
        images: images.len(),
        stable,
    })
}
