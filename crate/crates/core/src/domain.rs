//! Circular domains `C = Φ⁻¹(H)` for a Moebius map `Φ(z) = (az + b)/(cz + d)`.
//!
//! Every finite point is tagged Interior (in `C`), Boundary (on `∂C`, within a
//! tolerance band) or Exterior (in the open complement). The band is measured
//! in the Möbius-invariant quantity `2 Im Φ / (1 + |Φ|²)`, so it has the same
//! meaning for half-planes and disks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::c64;

/// Default half-width of the boundary band.
pub const BOUNDARY_TOL: f64 = 1e-9;

const MAX_REJECTIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionTag {
    Interior,
    Boundary,
    Exterior,
}

impl RegionTag {
    /// In the closure `C̄`.
    pub fn in_closure(self) -> bool {
        matches!(self, RegionTag::Interior | RegionTag::Boundary)
    }

    /// In the complement `C'`.
    pub fn in_complement(self) -> bool {
        matches!(self, RegionTag::Boundary | RegionTag::Exterior)
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionTag::Interior => "interior",
            RegionTag::Boundary => "boundary",
            RegionTag::Exterior => "exterior",
        })
    }
}

/// A set of points built from the three tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `C`
    Interior,
    /// `C̄`
    Closure,
    /// `∂C`
    Boundary,
    /// `C^r`, the interior of the complement
    Exterior,
    /// `C'`
    Complement,
}

impl Region {
    pub fn admits(self, tag: RegionTag) -> bool {
        match self {
            Region::Interior => tag == RegionTag::Interior,
            Region::Closure => tag.in_closure(),
            Region::Boundary => tag == RegionTag::Boundary,
            Region::Exterior => tag == RegionTag::Exterior,
            Region::Complement => tag.in_complement(),
        }
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interior" => Ok(Region::Interior),
            "closure" => Ok(Region::Closure),
            "boundary" => Ok(Region::Boundary),
            "exterior" => Ok(Region::Exterior),
            "complement" => Ok(Region::Complement),
            other => Err(Error::InvalidArgument(format!("unknown region `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryShape {
    Circle { center: Complex64, radius: f64 },
    /// `direction` has unit modulus.
    Line { point: Complex64, direction: Complex64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MoebiusDomain {
    #[serde(serialize_with = "crate::ser::complex")]
    a: Complex64,
    #[serde(serialize_with = "crate::ser::complex")]
    b: Complex64,
    #[serde(serialize_with = "crate::ser::complex")]
    c: Complex64,
    #[serde(serialize_with = "crate::ser::complex")]
    d: Complex64,
    tol: f64,
}

impl MoebiusDomain {
    pub const PRESETS: [&'static str; 4] = [
        "upper-half-plane",
        "lower-half-plane",
        "unit-disk",
        "exterior-unit-disk",
    ];

    /// Rejects tuples with `|ad - bc| <= 1e-12 * max(|a|,|b|,|c|,|d|)²`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
        if !(det.norm() > 1e-12 * scale * scale) {
            return Err(Error::DegenerateMoebius { det: det.norm() });
        }
        Ok(MoebiusDomain {
            a,
            b,
            c,
            d,
            tol: BOUNDARY_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn preset(name: &str) -> Result<Self> {
        let i = c64(0.0, 1.0);
        let one = c64(1.0, 0.0);
        let zero = c64(0.0, 0.0);
        match name {
            "upper-half-plane" => Self::new(one, zero, zero, one),
            "lower-half-plane" => Self::new(-one, zero, zero, one),
            "unit-disk" => Self::new(-i, i, one, one),
            "exterior-unit-disk" => Self::new(i, i, one, -one),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    /// Parses either a preset name or `[moebius] a_re a_im b_re b_im c_re c_im d_re d_im`.
    pub fn from_spec<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        let tokens: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        match tokens.as_slice() {
            [name] => Self::preset(name),
            ["moebius", rest @ ..] | rest if rest.len() == 8 => {
                let mut v = [0.0; 8];
                for (slot, tok) in v.iter_mut().zip(rest) {
                    *slot = tok.parse().map_err(|_| {
                        Error::InvalidArgument(format!("domain: `{tok}` is not a real number"))
                    })?;
                }
                Self::new(
                    c64(v[0], v[1]),
                    c64(v[2], v[3]),
                    c64(v[4], v[5]),
                    c64(v[6], v[7]),
                )
            }
            _ => Err(Error::InvalidArgument(
                "domain: expected a preset name or `moebius` followed by 8 reals".into(),
            )),
        }
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `Φ(z)`; infinite or NaN at the pole.
    pub fn phi(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// `Φ⁻¹(ζ) = (dζ - b)/(-cζ + a)`.
    pub fn phi_inv(&self, zeta: Complex64) -> Complex64 {
        (self.d * zeta - self.b) / (-self.c * zeta + self.a)
    }

    /// The point `-d/c` mapped to infinity, if any.
    pub fn pole(&self) -> Option<Complex64> {
        (self.c != Complex64::default()).then(|| -self.d / self.c)
    }

    /// `Im((az + b) conj(cz + d))`: positive on `C`, zero on `∂C`, negative
    /// on the open complement.
    pub fn side(&self, z: Complex64) -> f64 {
        ((self.a * z + self.b) * (self.c * z + self.d).conj()).im
    }

    /// `(|az + b|² + |cz + d|²) / 2`
    pub fn band_scale(&self, z: Complex64) -> f64 {
        ((self.a * z + self.b).norm_sqr() + (self.c * z + self.d).norm_sqr()) / 2.0
    }

    /// `side / band_scale`, which lies in `[-1, 1]`.
    pub fn normalized_side(&self, z: Complex64) -> f64 {
        self.side(z) / self.band_scale(z)
    }

    /// `∂C` as a circle or line in the z-plane, through three finite
    /// preimages of real points.
    pub fn boundary_shape(&self) -> BoundaryShape {
        let pts: Vec<Complex64> = [0.0, 1.0, -1.0, 2.0, -2.0]
            .iter()
            .map(|&t| self.phi_inv(c64(t, 0.0)))
            .filter(|z| z.is_finite())
            .take(3)
            .collect();
        // Φ⁻¹ is infinite at no more than one real point
        let (p1, u, v) = (pts[0], pts[1] - pts[0], pts[2] - pts[0]);
        let cross = (u.conj() * v).im;
        if cross.abs() <= 1e-12 * u.norm() * v.norm() {
            BoundaryShape::Line {
                point: p1,
                direction: u / u.norm(),
            }
        } else {
            let offset = (v * u.norm_sqr() - u * v.norm_sqr()) / c64(0.0, 2.0 * cross);
            BoundaryShape::Circle {
                center: p1 + offset,
                radius: offset.norm(),
            }
        }
    }

    /// Euclidean half-width of the boundary band near `z`.
    pub fn band_halfwidth(&self, z: Complex64) -> f64 {
        let grad = (self.a * (self.c * z + self.d).conj() - self.c * (self.a * z + self.b).conj()).norm();
        self.tol * self.band_scale(z) / grad
    }

    /// Euclidean distance from `z` to `∂C`.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match self.boundary_shape() {
            BoundaryShape::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            BoundaryShape::Line { point, direction } => ((z - point) * direction.conj()).im.abs(),
        }
    }

    pub fn classify(&self, z: Complex64) -> RegionTag {
        let s = self.side(z);
        if s.abs() <= self.tol * self.band_scale(z) {
            RegionTag::Boundary
        } else if s > 0.0 {
            RegionTag::Interior
        } else {
            RegionTag::Exterior
        }
    }

    /// Draws `count` points of `region` by pushing heavy-tailed samples of
    /// the upper half-plane, real line or lower half-plane through `Φ⁻¹`.
    /// Points that do not re-classify to the requested region, or land next
    /// to the pole, are redrawn.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        region: Region,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(count);
        let mut rejections = 0;
        while out.len() < count {
            let tag = match region {
                Region::Interior => RegionTag::Interior,
                Region::Boundary => RegionTag::Boundary,
                Region::Exterior => RegionTag::Exterior,
                Region::Closure if rng.gen_bool(0.5) => RegionTag::Boundary,
                Region::Closure => RegionTag::Interior,
                Region::Complement if rng.gen_bool(0.5) => RegionTag::Boundary,
                Region::Complement => RegionTag::Exterior,
            };
            let x = cauchy(rng);
            let y = match tag {
                RegionTag::Interior => half_cauchy(rng),
                RegionTag::Boundary => 0.0,
                RegionTag::Exterior => -half_cauchy(rng),
            };
            let z = self.phi_inv(c64(x, y));
            if self.acceptable(z, tag) {
                out.push(z);
                rejections = 0;
            } else {
                rejections += 1;
                if rejections >= MAX_REJECTIONS {
                    return Err(Error::DegenerateSample { rejections });
                }
            }
        }
        Ok(out)
    }

    fn acceptable(&self, z: Complex64, tag: RegionTag) -> bool {
        if !z.is_finite() {
            return false;
        }
        if let Some(pole) = self.pole() {
            if (z - pole).norm() <= 1e-12 * pole.norm().max(1.0) {
                return false;
            }
        }
        self.classify(z) == tag
    }
}

fn cauchy<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (PI * (rng.gen::<f64>() - 0.5)).tan()
}

fn half_cauchy<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (PI * rng.gen::<f64>() / 2.0).tan()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn identity() -> MoebiusDomain {
        MoebiusDomain::preset("upper-half-plane").unwrap()
    }

    fn disk() -> MoebiusDomain {
        MoebiusDomain::preset("unit-disk").unwrap()
    }

    #[test]
    fn side_examples() {
        assert_eq!(identity().side(c64(3.0, 2.5)), 2.5);
        assert_eq!(disk().side(c64(0.0, 0.0)), 1.0);
        assert_eq!(disk().side(c64(1.0, 0.0)), 0.0);
        assert!(disk().phi(c64(0.0, 0.0)).im > 0.0);
    }

    #[test]
    fn classify_examples() {
        let h = identity();
        assert_eq!(h.classify(c64(0.0, 1e-14)), RegionTag::Boundary);
        assert_eq!(h.classify(c64(0.0, 1.0)), RegionTag::Interior);
        assert_eq!(disk().side(c64(2.0, 0.0)), -3.0);
        assert_eq!(disk().classify(c64(2.0, 0.0)), RegionTag::Exterior);
    }

    #[test]
    fn boundary_geometry() {
        let h = identity();
        assert!(matches!(h.boundary_shape(), BoundaryShape::Line { .. }));
        assert!((h.boundary_distance(c64(3.0, -2.0)) - 2.0).abs() < 1e-15);
        let d = disk();
        let BoundaryShape::Circle { center, radius } = d.boundary_shape() else {
            panic!("disk boundary is a circle");
        };
        assert!(center.norm() < 1e-15 && (radius - 1.0).abs() < 1e-15);
        assert!((d.boundary_distance(c64(0.0, 0.25)) - 0.75).abs() < 1e-15);
        assert!((d.band_halfwidth(c64(1.0, 0.0)) - BOUNDARY_TOL).abs() < 1e-24);
        assert!((h.band_halfwidth(c64(0.0, 0.0)) - BOUNDARY_TOL / 2.0).abs() < 1e-24);
        let shifted = MoebiusDomain::from_spec(&["moebius", "1", "0", "0", "0", "0", "0", "1", "0"])
            .unwrap();
        assert!((shifted.boundary_distance(c64(5.0, 0.5)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pole_is_boundary() {
        let d = disk();
        let pole = d.pole().unwrap();
        assert_eq!(pole, c64(-1.0, 0.0));
        assert_eq!(d.classify(pole), RegionTag::Boundary);
        assert!(identity().pole().is_none());
    }

    #[test]
    fn presets() {
        let h = MoebiusDomain::preset("upper-half-plane").unwrap();
        assert!(h.side(c64(0.0, 1.0)) > 0.0);
        let d = disk();
        assert!(d.side(c64(0.0, 0.0)) > 0.0 && d.side(c64(2.0, 0.0)) < 0.0);
        let l = MoebiusDomain::preset("lower-half-plane").unwrap();
        assert!(l.side(c64(0.0, -1.0)) > 0.0);
        let e = MoebiusDomain::preset("exterior-unit-disk").unwrap();
        assert_eq!(e.classify(c64(2.0, 0.0)), RegionTag::Interior);
        assert_eq!(e.classify(c64(0.3, 0.2)), RegionTag::Exterior);
        assert_eq!(e.classify(c64(0.0, 1.0)), RegionTag::Boundary);
        assert_eq!(
            MoebiusDomain::preset("strip"),
            Err(Error::UnknownPreset("strip".into()))
        );
    }

    #[test]
    fn degenerate_tuple_rejected() {
        let one = c64(1.0, 0.0);
        assert!(matches!(
            MoebiusDomain::new(one, one, one, one),
            Err(Error::DegenerateMoebius { .. })
        ));
    }

    #[test]
    fn spec_grammar() {
        let d = MoebiusDomain::from_spec(&["unit-disk"]).unwrap();
        assert_eq!(d, disk());
        let m = MoebiusDomain::from_spec(&["moebius", "0", "-1", "0", "1", "1", "0", "1", "0"])
            .unwrap();
        assert_eq!(m, disk());
        let bare = MoebiusDomain::from_spec(&["1", "0", "0", "0", "0", "0", "1", "0"]).unwrap();
        assert_eq!(bare, identity());
        assert!(MoebiusDomain::from_spec(&["moebius", "1", "2"]).is_err());
        assert!(MoebiusDomain::from_spec(&["1", "0", "0", "0", "0", "0", "x", "0"]).is_err());
    }

    #[test]
    fn sampler_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = identity().sample(Region::Interior, 5, &mut rng).unwrap();
        assert_eq!(pts.len(), 5);
        assert!(pts.iter().all(|z| z.im > 0.0));

        let pts = disk().sample(Region::Interior, 5, &mut rng).unwrap();
        assert!(pts.iter().all(|z| z.norm() < 1.0));

        let pts = identity().sample(Region::Boundary, 3, &mut rng).unwrap();
        assert!(pts.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn region_parsing_and_admission() {
        assert_eq!("closure".parse::<Region>().unwrap(), Region::Closure);
        assert!("nowhere".parse::<Region>().is_err());
        assert!(Region::Closure.admits(RegionTag::Boundary));
        assert!(!Region::Exterior.admits(RegionTag::Boundary));
        assert!(Region::Complement.admits(RegionTag::Exterior));
    }
}
