//! Certified zero enclosures by the argument principle.
//!
//! A small residual `|p(z)|` does not place a zero near `z` when `z` sits
//! close to a multiple or clustered root: `|p|` is then tiny on a whole
//! neighbourhood. Counting zeros inside a circle on which `|p|` is well
//! above rounding noise does.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::domain::{MoebiusDomain, RegionTag};

/// Largest multiple of the band half-width tried around a boundary zero.
pub(crate) const BOUNDARY_REACH: f64 = 1e4;

/// Values on the circle must exceed this many rounding units of the
/// absolute evaluation.
const NOISE_UNITS: f64 = 1e3;

/// Number of zeros inside `|z - center| < radius` of a function given by
/// `eval(z) = (value, absolute scale)`, with `degree` bounding the number of
/// zeros. `None` when the value on the circle comes within rounding noise of
/// zero or its argument cannot be tracked.
pub(crate) fn winding_count(
    eval: &dyn Fn(Complex64) -> (Complex64, f64),
    degree: usize,
    center: Complex64,
    radius: f64,
) -> Option<usize> {
    let mut n = 16 * (degree + 1);
    'refine: while n <= 4096 {
        let mut total = 0.0;
        let mut prev: Option<Complex64> = None;
        for k in 0..=n {
            let pt = center + Complex64::from_polar(radius, TAU * k as f64 / n as f64);
            let (v, scale) = eval(pt);
            if !(v.norm() > NOISE_UNITS * f64::EPSILON * scale) {
                return None;
            }
            if let Some(p) = prev {
                let step = (v / p).arg();
                if step.abs() > FRAC_PI_2 {
                    n *= 2;
                    continue 'refine;
                }
                total += step;
            }
            prev = Some(v);
        }
        return Some((total / TAU).round().max(0.0) as usize);
    }
    None
}

/// A disk around a reported zero that provably holds a zero, with the
/// region tag the disk certifies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Enclosure {
    pub tag: RegionTag,
    pub radius: f64,
}

/// The tag certified by a disk of `radius` around `z` that holds a zero.
/// A disk clear of `∂C` certifies the strict side of `z`; one that reaches
/// `∂C` within [`BOUNDARY_REACH`] band half-widths certifies Boundary.
pub(crate) fn certified_tag(
    eval: &dyn Fn(Complex64) -> (Complex64, f64),
    degree: usize,
    dom: &MoebiusDomain,
    z: Complex64,
    radius: f64,
) -> Option<RegionTag> {
    if !(radius > 0.0) || winding_count(eval, degree, z, radius)? == 0 {
        return None;
    }
    if radius < dom.boundary_distance(z) {
        return Some(if dom.side(z) > 0.0 {
            RegionTag::Interior
        } else {
            RegionTag::Exterior
        });
    }
    (dom.classify(z) == RegionTag::Boundary
        && radius <= BOUNDARY_REACH * dom.band_halfwidth(z) * (1.0 + 1e-12))
        .then_some(RegionTag::Boundary)
}

/// Finds an [`Enclosure`] for a zero reported at `z`.
///
/// Off the boundary band the disk has half the distance to `∂C`. On the
/// band the invariant tag can be coarse, far from the origin in particular,
/// so the disk grows by factors of ten from the smaller of the band
/// half-width and `tol * max(1, |z|)`, and the first conclusive one decides.
pub(crate) fn enclose(
    eval: &dyn Fn(Complex64) -> (Complex64, f64),
    degree: usize,
    dom: &MoebiusDomain,
    z: Complex64,
) -> Option<Enclosure> {
    let at = |radius: f64| {
        certified_tag(eval, degree, dom, z, radius).map(|tag| Enclosure { tag, radius })
    };
    if dom.classify(z) != RegionTag::Boundary {
        return at(0.5 * dom.boundary_distance(z));
    }
    let limit = BOUNDARY_REACH * dom.band_halfwidth(z);
    let mut radius = dom.band_halfwidth(z).min(dom.tol() * z.norm().max(1.0));
    while radius <= limit {
        if let Some(e) = at(radius) {
            return Some(e);
        }
        radius *= 10.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{c64, Poly};

    fn eval_of(p: &Poly) -> impl Fn(Complex64) -> (Complex64, f64) + '_ {
        move |z| (p.eval(z), p.abs_eval(z.norm()))
    }

    #[test]
    fn counts_roots_inside() {
        let p = Poly::from_roots(&[c64(0.0, 0.0), c64(0.1, 0.0), c64(3.0, 0.0)], c64(1.0, 0.0));
        assert_eq!(winding_count(&eval_of(&p), 3, c64(0.0, 0.0), 1.0), Some(2));
        assert_eq!(winding_count(&eval_of(&p), 3, c64(0.0, 0.0), 5.0), Some(3));
        assert_eq!(winding_count(&eval_of(&p), 3, c64(10.0, 0.0), 1.0), Some(0));
    }

    #[test]
    fn noise_level_circle_is_inconclusive() {
        let p = Poly::from_roots(&[c64(1.0, 0.0); 6], c64(1.0, 0.0));
        assert_eq!(winding_count(&eval_of(&p), 6, c64(1.0, 0.0), 1e-6), None);
    }

    #[test]
    fn boundary_zero_is_enclosed_at_band_scale() {
        let h = MoebiusDomain::preset("upper-half-plane").unwrap();
        let p = Poly::from_real(&[0.0, 1.0]);
        let e = enclose(&eval_of(&p), 1, &h, c64(0.0, 0.0)).unwrap();
        assert_eq!(e.tag, RegionTag::Boundary);
        assert_eq!(certified_tag(&eval_of(&p), 1, &h, c64(0.0, 0.0), e.radius), Some(e.tag));
    }

    #[test]
    fn far_band_root_resolves_to_its_side() {
        // the invariant band is wide far from the origin
        let h = MoebiusDomain::preset("upper-half-plane").unwrap();
        let z = c64(186572.7, -15.4);
        assert_eq!(h.classify(z), RegionTag::Boundary);
        let p = Poly::from_roots(&[z, c64(-3.0, -2.0)], c64(1.0, 0.0));
        let e = enclose(&eval_of(&p), 2, &h, z).unwrap();
        assert_eq!(e.tag, RegionTag::Exterior);
        assert!(e.radius < 15.4);
    }

    #[test]
    fn near_band_root_stays_on_the_boundary() {
        let h = MoebiusDomain::preset("upper-half-plane").unwrap();
        let z = c64(0.137, -1.2e-12);
        let p = Poly::from_roots(&[z, c64(1.0, 0.0)], c64(1.0, 0.0));
        assert_eq!(enclose(&eval_of(&p), 2, &h, z).unwrap().tag, RegionTag::Boundary);
    }

    #[test]
    fn point_beside_a_double_root_is_not_a_boundary_zero() {
        let h = MoebiusDomain::preset("upper-half-plane").unwrap();
        let q = Poly::from_roots(&[c64(0.0, -1e-3); 2], c64(1.0, 0.0));
        let e = enclose(&eval_of(&q), 2, &h, c64(0.0, 0.0));
        assert!(e.map_or(true, |e| e.tag != RegionTag::Boundary), "{e:?}");
    }
}
