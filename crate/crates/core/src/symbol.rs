//! The symbols `Q_n(z, w) = ((az + b)(cw + d) + (aw + b)(cz + d))^n`, their
//! images `T[Q_n]`, and a sampling search for zeros of a bivariate
//! polynomial over a pair of regions.
//!
//! The search fixes `w` at heavy-tailed samples of the w-region, finds all
//! roots of the univariate slice `F(·, w)` and checks whether any of them
//! lands in the z-region. A zero found this way is a refutation; finding
//! none is evidence qualified by the sample budget, never a proof.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{MoebiusDomain, Region, RegionTag};
use crate::enclose::{certified_tag, enclose};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::poly::{BiPoly, Poly, TRIM_TOL};
use crate::roots::roots_balanced;

/// A zero is accepted when `|F(z, w)| <= ZERO_TOL * sum |F_ij| |z|^i |w|^j`.
pub const ZERO_TOL: f64 = 1e-8;

/// Default number of w-samples per symbol.
pub const W_SAMPLES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NonvanishingMode {
    pub z_region: Region,
    pub w_region: Region,
}

impl NonvanishingMode {
    /// Both variables in `C`: stability.
    pub const STABILITY: Self = NonvanishingMode {
        z_region: Region::Interior,
        w_region: Region::Interior,
    };

    /// `z` in the closure, `w` in `C`.
    pub const CLOSURE_INTERIOR: Self = NonvanishingMode {
        z_region: Region::Closure,
        w_region: Region::Interior,
    };
}

/// The variable solved for at a sampled value of the other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Solved {
    Z,
    W,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroWitness {
    #[serde(serialize_with = "crate::ser::complex")]
    pub z: Complex64,
    #[serde(serialize_with = "crate::ser::complex")]
    pub w: Complex64,
    #[serde(serialize_with = "crate::ser::complex")]
    pub value: Complex64,
    /// `sum |F_ij| |z|^i |w|^j` at the reported point.
    pub scale: f64,
    pub refined: bool,
    pub solved: Solved,
    /// Radius of a disk around the solved coordinate holding a zero of the
    /// slice by the argument principle. The disk either stays on one side of
    /// the boundary or reaches it within `10^4` band half-widths.
    pub radius: f64,
    pub z_tag: RegionTag,
    pub w_tag: RegionTag,
    /// Index into the sample list: w-samples first, then z-samples.
    pub sample: usize,
}

impl ZeroWitness {
    /// Re-evaluates `f`, the region tags and the enclosing disk independently
    /// of the search.
    pub fn verify(&self, f: &BiPoly, dom: &MoebiusDomain, mode: NonvanishingMode) -> bool {
        let value = f.eval(self.z, self.w);
        let scale = f.abs_eval(self.z.norm(), self.w.norm());
        let z_tag = dom.classify(self.z);
        let w_tag = dom.classify(self.w);
        let (g, root, fixed, region) = match self.solved {
            Solved::Z => (f.clone(), self.z, self.w, mode.z_region),
            Solved::W => (f.transpose(), self.w, self.z, mode.w_region),
        };
        let contained = certified_tag(&slice_eval(&g, fixed), degree(&g), dom, root, self.radius)
            .is_some_and(|tag| region.admits(tag));
        value.norm() <= ZERO_TOL * scale
            && mode.z_region.admits(z_tag)
            && mode.w_region.admits(w_tag)
            && contained
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Nonvanishing {
    NoZeroFound {
        samples: usize,
        /// w-samples at which the slice vanished identically.
        degenerate: usize,
    },
    Zero(ZeroWitness),
}

impl Nonvanishing {
    pub fn witness(&self) -> Option<&ZeroWitness> {
        match self {
            Nonvanishing::Zero(w) => Some(w),
            Nonvanishing::NoZeroFound { .. } => None,
        }
    }
}

/// `(az + b)(cw + d) + (aw + b)(cz + d)`
fn base_linear(dom: &MoebiusDomain) -> BiPoly {
    let [a, b, c, d] = dom.coefficients();
    let two = Complex64::new(2.0, 0.0);
    let mixed = a * d + b * c;
    BiPoly::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => two * b * d,
        (1, 0) | (0, 1) => mixed,
        _ => two * a * c,
    })
}

pub fn base_symbol(dom: &MoebiusDomain, n: usize) -> BiPoly {
    base_linear(dom).pow(n)
}

/// `T[Q_n]`, which may be identically zero.
pub fn operator_symbol(t: &LinearOperator, dom: &MoebiusDomain, n: usize) -> Result<BiPoly> {
    if n > t.horizon() {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            horizon: t.horizon(),
        });
    }
    t.apply_bivariate(&base_symbol(dom, n))
}

/// `z -> (F(z, fixed), sum |F_ij| |z|^i |fixed|^j)`
fn slice_eval(g: &BiPoly, fixed: Complex64) -> impl Fn(Complex64) -> (Complex64, f64) + '_ {
    move |z| (g.eval(z, fixed), g.abs_eval(z.norm(), fixed.norm()))
}

fn degree(g: &BiPoly) -> usize {
    g.z_degree().unwrap_or(0)
}

struct SliceZero {
    root: Complex64,
    refined: bool,
    radius: f64,
}

enum SliceOutcome {
    Clean,
    Degenerate,
    Zero(SliceZero),
}

/// Roots of `g(·, fixed)` that lie in `region`, accepted only with an
/// enclosing disk.
fn check_slice(g: &BiPoly, dom: &MoebiusDomain, region: Region, fixed: Complex64) -> Result<SliceOutcome> {
    let mut slice = g.restrict_w(fixed);
    let scale = g.restrict_w_scale(fixed.norm());
    slice.trim_against(&scale, TRIM_TOL);
    if slice.is_zero() {
        return Ok(SliceOutcome::Degenerate);
    }
    let roots = roots_balanced(&slice)?;
    for root in &roots.roots {
        let z0 = root.location;
        let tag = dom.classify(z0);
        if tag != RegionTag::Boundary && !region.admits(tag) {
            continue;
        }
        let (z, refined) = refine(g, &slice, dom, region, z0, fixed);
        let value = g.eval(z, fixed);
        if value.norm() > ZERO_TOL * g.abs_eval(z.norm(), fixed.norm()) {
            continue;
        }
        // Near a multiple root |F| is tiny on a whole neighbourhood, so a
        // small residual alone does not place the zero.
        let Some(enclosure) = enclose(&slice_eval(g, fixed), degree(g), dom, z) else {
            continue;
        };
        if !region.admits(enclosure.tag) {
            continue;
        }
        let radius = enclosure.radius;
        return Ok(SliceOutcome::Zero(SliceZero {
            root: z,
            refined,
            radius,
        }));
    }
    Ok(SliceOutcome::Clean)
}

/// One Newton step on the slice, kept only if it stays admissible and does
/// not increase `|F|`.
fn refine(
    g: &BiPoly,
    slice: &Poly,
    dom: &MoebiusDomain,
    region: Region,
    z: Complex64,
    fixed: Complex64,
) -> (Complex64, bool) {
    let step = slice.eval(z) / slice.derivative().eval(z);
    let z1 = z - step;
    if step.is_finite()
        && region.admits(dom.classify(z1))
        && g.eval(z1, fixed).norm() <= g.eval(z, fixed).norm()
    {
        (z1, true)
    } else {
        (z, false)
    }
}

/// Searches for `(z, w)` with `F(z, w) = 0`, `z` in `mode.z_region` and `w`
/// in `mode.w_region`.
///
/// Two passes of `samples` slices each: `w` fixed at samples of its region
/// while solving for `z`, then the reverse. One pass alone misses zero sets
/// of the form `w = const` (or `z = const`), which sampling never hits. All
/// samples are drawn up front and the reported witness is the one with the
/// lowest sample index, so the result depends only on the RNG state.
pub fn nonvanishing_check<R: Rng + ?Sized>(
    f: &BiPoly,
    dom: &MoebiusDomain,
    mode: NonvanishingMode,
    samples: usize,
    rng: &mut R,
) -> Result<Nonvanishing> {
    if f.is_zero() {
        return Err(Error::ZeroInput);
    }
    let ws = dom.sample(mode.w_region, samples, rng)?;
    let zs = dom.sample(mode.z_region, samples, rng)?;
    let ft = f.transpose();
    let jobs: Vec<(Solved, Complex64)> = ws
        .iter()
        .map(|&w| (Solved::Z, w))
        .chain(zs.iter().map(|&z| (Solved::W, z)))
        .collect();
    let slice = |&(solved, fixed): &(Solved, Complex64)| match solved {
        Solved::Z => check_slice(f, dom, mode.z_region, fixed),
        Solved::W => check_slice(&ft, dom, mode.w_region, fixed),
    };
    let found = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| slice(job).map(|o| (i, o)))
        .find_map_first(|r| match r {
            Ok((i, SliceOutcome::Zero(found))) => Some(Ok((i, found))),
            Err(e) => Some(Err(e)),
            Ok(_) => None,
        });
    match found {
        Some(Ok((i, found))) => {
            let (solved, fixed) = jobs[i];
            let (z, w) = match solved {
                Solved::Z => (found.root, fixed),
                Solved::W => (fixed, found.root),
            };
            Ok(Nonvanishing::Zero(ZeroWitness {
                z,
                w,
                value: f.eval(z, w),
                scale: f.abs_eval(z.norm(), w.norm()),
                refined: found.refined,
                solved,
                radius: found.radius,
                z_tag: dom.classify(z),
                w_tag: dom.classify(w),
                sample: i,
            }))
        }
        Some(Err(e)) => Err(e),
        None => {
            let degenerate = jobs
                .iter()
                .filter(|&&(solved, fixed)| {
                    let g = if solved == Solved::Z { f } else { &ft };
                    let mut s = g.restrict_w(fixed);
                    s.trim_against(&g.restrict_w_scale(fixed.norm()), TRIM_TOL);
                    s.is_zero()
                })
                .count();
            Ok(Nonvanishing::NoZeroFound {
                samples: jobs.len(),
                degenerate,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::c64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h() -> MoebiusDomain {
        MoebiusDomain::preset("upper-half-plane").unwrap()
    }

    fn disk() -> MoebiusDomain {
        MoebiusDomain::preset("unit-disk").unwrap()
    }

    fn binomial(n: usize, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn identity_map_symbol_is_binomial() {
        for n in 0..=6 {
            let q = base_symbol(&h(), n);
            for i in 0..=n {
                for j in 0..=n {
                    let expected = if i + j == n { binomial(n, i) } else { 0.0 };
                    // identity map gives ((z + w))^n up to the factor 1
                    assert_eq!(q.get(i, j), c64(expected, 0.0), "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn unit_disk_first_symbol() {
        let q = base_symbol(&disk(), 1);
        assert_eq!(q.get(0, 0), c64(0.0, 2.0));
        assert_eq!(q.get(1, 1), c64(0.0, -2.0));
        assert_eq!(q.get(1, 0), c64(0.0, 0.0));
        assert_eq!(q.get(0, 1), c64(0.0, 0.0));
        assert_eq!(base_symbol(&disk(), 0), BiPoly::one());
    }

    #[test]
    fn operator_symbol_examples() {
        let id = LinearOperator::identity(5);
        assert_eq!(operator_symbol(&id, &h(), 4).unwrap(), base_symbol(&h(), 4));

        let zp = LinearOperator::multiply_by(&Poly::z(), 5);
        let s = operator_symbol(&zp, &h(), 0).unwrap();
        assert_eq!(s.terms(), vec![(1, 0, c64(1.0, 0.0))]);

        assert_eq!(
            operator_symbol(&id, &h(), 6),
            Err(Error::DegreeOutOfRange {
                degree: 6,
                horizon: 5
            })
        );
    }

    #[test]
    fn z_plus_w_has_no_zero_in_closure_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = base_symbol(&h(), 1);
        let out = nonvanishing_check(&f, &h(), NonvanishingMode::CLOSURE_INTERIOR, 512, &mut rng)
            .unwrap();
        assert!(matches!(out, Nonvanishing::NoZeroFound { samples: 1024, .. }), "{out:?}");
    }

    #[test]
    fn one_minus_zw_is_disk_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = BiPoly::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64(1.0, 0.0),
            (1, 1) => c64(-1.0, 0.0),
            _ => c64(0.0, 0.0),
        });
        let out = nonvanishing_check(&f, &disk(), NonvanishingMode::STABILITY, 512, &mut rng)
            .unwrap();
        assert!(out.witness().is_none(), "{out:?}");
    }

    #[test]
    fn z_vanishes_on_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = BiPoly::from_fn(2, 1, |i, _| c64(i as f64, 0.0));
        let mode = NonvanishingMode::CLOSURE_INTERIOR;
        let out = nonvanishing_check(&f, &h(), mode, 64, &mut rng).unwrap();
        let w = out.witness().expect("zero at z = 0");
        assert_eq!(w.z, c64(0.0, 0.0));
        assert_eq!(w.sample, 0);
        assert_eq!(w.z_tag, RegionTag::Boundary);
        assert!(w.verify(&f, &h(), mode));

        // the same zero is not admissible for stability
        let out = nonvanishing_check(&f, &h(), NonvanishingMode::STABILITY, 64, &mut rng).unwrap();
        assert!(out.witness().is_none());
    }

    #[test]
    fn zero_input_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(
            nonvanishing_check(&BiPoly::zeros(2, 2), &h(), NonvanishingMode::STABILITY, 8, &mut rng),
            Err(Error::ZeroInput)
        );
    }

    #[test]
    fn vanishing_slice_is_degenerate_not_a_witness() {
        // (w - i)(z - 5i) vanishes identically at w = i
        let i = c64(0.0, 1.0);
        let f = BiPoly::from_fn(2, 2, |a, b| match (a, b) {
            (0, 0) => -i * -5.0 * i,
            (1, 0) => -i,
            (0, 1) => -5.0 * i,
            _ => c64(1.0, 0.0),
        });
        assert!(f.eval(c64(3.0, 1.0), i).norm() < 1e-14);
        let out = check_slice(&f, &h(), Region::Interior, i).unwrap();
        assert!(matches!(out, SliceOutcome::Degenerate));
        let out = check_slice(&f, &h(), Region::Interior, c64(0.0, 2.0)).unwrap();
        assert!(matches!(out, SliceOutcome::Zero(ref w) if (w.root - 5.0 * i).norm() < 1e-12));
    }

    #[test]
    fn zero_line_in_w_is_found_by_the_second_pass() {
        // w (1 - zw) vanishes on the whole line w = 0, inside the disk
        let f = BiPoly::from_fn(2, 3, |i, j| match (i, j) {
            (0, 1) => c64(1.0, 0.0),
            (1, 2) => c64(-1.0, 0.0),
            _ => c64(0.0, 0.0),
        });
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out = nonvanishing_check(&f, &disk(), NonvanishingMode::STABILITY, 32, &mut rng).unwrap();
        let w = out.witness().expect("w = 0 is a zero for every z");
        assert_eq!(w.solved, Solved::W);
        assert!(w.sample >= 32);
        assert!(w.w.norm() < 1e-12);
        assert!(w.verify(&f, &disk(), NonvanishingMode::STABILITY));
    }

    #[test]
    fn pseudo_zero_near_multiple_root_is_rejected() {
        // (z + 1 + w)^8 has its zero in the lower half-plane for w near -1
        // in the upper one, but |F| is tiny on a wide neighbourhood of it
        let t = LinearOperator::from_fn(8, |k| Poly::from_roots(&vec![c64(-1.0, 0.0); k], c64(1.0, 0.0)));
        let f = operator_symbol(&t, &h(), 8).unwrap();
        let w = c64(-1.0448554268498547, 0.03565678334869981);
        assert!(matches!(
            check_slice(&f, &h(), Region::Interior, w).unwrap(),
            SliceOutcome::Clean
        ));
        assert!(matches!(
            check_slice(&f, &h(), Region::Closure, w).unwrap(),
            SliceOutcome::Clean
        ));
    }
}
