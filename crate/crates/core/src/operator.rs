//! Linear operators on `C[z]`, stored by their monomial images `T[z^k]` up
//! to a finite horizon `N`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{c64, BiPoly, Poly, TRIM_TOL};

/// Relative tolerance for proportionality of images in [`LinearOperator::rank_one_check`].
pub const RANK_ONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    images: Vec<Poly>,
    bounded_degree: Option<usize>,
}

/// `T = sum_k qs[k] D^k`, truncated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffExpansion {
    pub qs: Vec<Poly>,
}

/// `T[z^k] = alphas[k] P` for every `k` on the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankOneForm {
    #[serde(serialize_with = "crate::ser::complex_vec")]
    pub alphas: Vec<Complex64>,
    pub p: Poly,
}

/// `m! / (m - k)!`
fn falling_factorial(m: usize, k: usize) -> f64 {
    ((m - k + 1)..=m).map(|x| x as f64).product()
}

/// Highest exactly-nonzero index, ignoring a tail that is negligible relative
/// to the largest coefficient. Errors when the significant degree exceeds `limit`.
fn checked_len(p: &Poly, limit: usize) -> Result<usize> {
    let exact = p.coeffs().iter().rposition(|c| *c != Complex64::default());
    match exact {
        None => Ok(0),
        Some(d) if d <= limit => Ok(d + 1),
        Some(_) => match p.degree() {
            Some(d) if d > limit => Err(Error::DegreeOutOfRange {
                degree: d,
                horizon: limit,
            }),
            _ => Ok(limit + 1),
        },
    }
}

impl LinearOperator {
    /// `images[k] = T[z^k]`; the horizon is `images.len() - 1`.
    pub fn new(mut images: Vec<Poly>) -> Self {
        if images.is_empty() {
            images.push(Poly::zero());
        }
        LinearOperator {
            images,
            bounded_degree: None,
        }
    }

    pub fn from_fn(horizon: usize, f: impl Fn(usize) -> Poly) -> Self {
        LinearOperator::new((0..=horizon).map(f).collect())
    }

    /// Restricts the operator to `C_n[z]`; `n` must equal the horizon.
    pub fn with_bounded_degree(mut self, n: usize) -> Result<Self> {
        if n != self.horizon() {
            return Err(Error::HorizonMismatch {
                bounded: n,
                horizon: self.horizon(),
            });
        }
        self.bounded_degree = Some(n);
        Ok(self)
    }

    pub fn identity(horizon: usize) -> Self {
        Self::from_fn(horizon, |k| Poly::monomial(k, c64(1.0, 0.0)))
    }

    /// Differentiation.
    pub fn derivative(horizon: usize) -> Self {
        Self::from_fn(horizon, |k| {
            if k == 0 {
                Poly::zero()
            } else {
                Poly::monomial(k - 1, c64(k as f64, 0.0))
            }
        })
    }

    /// `p ↦ q p`.
    pub fn multiply_by(q: &Poly, horizon: usize) -> Self {
        Self::from_fn(horizon, |k| q * &Poly::monomial(k, c64(1.0, 0.0)))
    }

    /// Diagonal operator `z^k ↦ a[k] z^k`; the horizon is `a.len() - 1`.
    pub fn diagonal(a: &[Complex64]) -> Self {
        LinearOperator::new(
            a.iter()
                .enumerate()
                .map(|(k, &ak)| Poly::monomial(k, ak))
                .collect(),
        )
    }

    /// `f ↦ alpha(f) P` where `alpha(z^k) = alphas[k]`.
    pub fn rank_one(alphas: &[Complex64], p: &Poly) -> Self {
        LinearOperator::new(alphas.iter().map(|&a| p.scale(a)).collect())
    }

    pub fn horizon(&self) -> usize {
        self.images.len() - 1
    }

    pub fn bounded_degree(&self) -> Option<usize> {
        self.bounded_degree
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn image(&self, k: usize) -> Option<&Poly> {
        self.images.get(k)
    }

    /// Largest coefficient magnitude across all images.
    pub fn scale(&self) -> f64 {
        self.images.iter().map(Poly::max_abs).fold(0.0, f64::max)
    }

    fn image_is_zero(&self, k: usize, scale: f64) -> bool {
        self.images[k].max_abs() <= TRIM_TOL * scale
    }

    /// `Tp = sum_k p_k T[z^k]`. Coefficients that cancel to below the
    /// rounding level of the summed terms are set to exactly zero.
    pub fn apply(&self, p: &Poly) -> Result<Poly> {
        let len = checked_len(p, self.horizon())?;
        let out_len = self.images[..len].iter().map(Poly::len).max().unwrap_or(0);
        let mut out = vec![Complex64::default(); out_len];
        let mut scale = vec![0.0; out_len];
        for (k, img) in self.images[..len].iter().enumerate() {
            let pk = p.coeff(k);
            if pk == Complex64::default() {
                continue;
            }
            for (j, &c) in img.coeffs().iter().enumerate() {
                let t = pk * c;
                out[j] += t;
                scale[j] += t.norm();
            }
        }
        let mut out = Poly::new(out);
        out.trim_against(&scale, TRIM_TOL);
        Ok(out)
    }

    /// Extension to `C[z, w]` treating `w` as a constant: each w-slice is
    /// mapped by [`LinearOperator::apply`].
    pub fn apply_bivariate(&self, f: &BiPoly) -> Result<BiPoly> {
        let slices = (0..f.w_len())
            .map(|j| self.apply(&f.w_slice(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(BiPoly::from_w_slices(&slices))
    }

    /// Solves `T[z^m] = sum_{k<=m} Q_k m!/(m-k)! z^(m-k)` for `Q_0, Q_1, ...`.
    pub fn to_diff_expansion(&self) -> DiffExpansion {
        let mut qs: Vec<Poly> = Vec::with_capacity(self.images.len());
        for (m, img) in self.images.iter().enumerate() {
            let mut acc: Vec<Complex64> = img.coeffs().to_vec();
            let mut scale: Vec<f64> = acc.iter().map(|c| c.norm()).collect();
            for (k, q) in qs.iter().enumerate() {
                let f = falling_factorial(m, k);
                let shift = m - k;
                for (i, &c) in q.coeffs().iter().enumerate() {
                    let idx = i + shift;
                    if idx >= acc.len() {
                        acc.resize(idx + 1, Complex64::default());
                        scale.resize(idx + 1, 0.0);
                    }
                    let t = c * f;
                    acc[idx] -= t;
                    scale[idx] += t.norm();
                }
            }
            let fact = falling_factorial(m, m);
            let mut q = Poly::new(acc.into_iter().map(|c| c / fact).collect());
            let scale: Vec<f64> = scale.into_iter().map(|s| s / fact).collect();
            q.trim_against(&scale, TRIM_TOL);
            qs.push(q);
        }
        DiffExpansion { qs }
    }

    /// Some form iff every nonzero image is proportional to the first one.
    pub fn rank_one_check(&self) -> Option<RankOneForm> {
        let scale = self.scale();
        let first = (0..self.images.len()).find(|&k| !self.image_is_zero(k, scale))?;
        let p = self.images[first].monic()?;
        let pp: f64 = p.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let mut alphas = Vec::with_capacity(self.images.len());
        for (k, img) in self.images.iter().enumerate() {
            if self.image_is_zero(k, scale) {
                alphas.push(Complex64::default());
                continue;
            }
            let n = p.len().max(img.len());
            let dot: Complex64 = (0..n).map(|i| p.coeff(i).conj() * img.coeff(i)).sum();
            let alpha = dot / pp;
            if img.max_diff(&p.scale(alpha)) > RANK_ONE_TOL * img.max_abs() {
                return None;
            }
            alphas.push(alpha);
        }
        Some(RankOneForm { alphas, p })
    }

    /// Smallest `k` with `T[z^k]` not identically zero.
    pub fn minimal_k(&self) -> Option<usize> {
        let scale = self.scale();
        if scale == 0.0 {
            return None;
        }
        (0..self.images.len()).find(|&k| !self.image_is_zero(k, scale))
    }
}

impl DiffExpansion {
    /// Monomial images `T[z^m] = sum_k Q_k m!/(m-k)! z^(m-k)` for `m <= horizon`.
    pub fn to_operator(&self, horizon: usize) -> LinearOperator {
        LinearOperator::from_fn(horizon, |m| {
            let mut out: Vec<Complex64> = Vec::new();
            let mut scale: Vec<f64> = Vec::new();
            for (k, q) in self.qs.iter().enumerate().take(m + 1) {
                let f = falling_factorial(m, k);
                let shift = m - k;
                for (i, &c) in q.coeffs().iter().enumerate() {
                    let idx = i + shift;
                    if idx >= out.len() {
                        out.resize(idx + 1, Complex64::default());
                        scale.resize(idx + 1, 0.0);
                    }
                    let t = c * f;
                    out[idx] += t;
                    scale[idx] += t.norm();
                }
            }
            let mut p = Poly::new(out);
            p.trim_against(&scale, TRIM_TOL);
            p
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_prime_minus_zp(horizon: usize) -> LinearOperator {
        DiffExpansion {
            qs: vec![Poly::from_real(&[0.0, -1.0]), Poly::from_real(&[1.0])],
        }
        .to_operator(horizon)
    }

    /// `p ↦ a_{n+1} - a_0 z`
    fn coefficient_swap(n: usize, horizon: usize) -> LinearOperator {
        LinearOperator::from_fn(horizon, |k| {
            if k == 0 {
                Poly::from_real(&[0.0, -1.0])
            } else if k == n + 1 {
                Poly::one()
            } else {
                Poly::zero()
            }
        })
    }

    #[test]
    fn apply_examples() {
        let p = Poly::from_real(&[1.0, 0.0, 1.0]);
        assert_eq!(LinearOperator::identity(4).apply(&p).unwrap(), p);

        let t = p_prime_minus_zp(3);
        assert_eq!(t.apply(&Poly::one()).unwrap(), Poly::from_real(&[0.0, -1.0]));

        let swap = coefficient_swap(1, 3);
        let got = swap.apply(&Poly::from_real(&[5.0, 0.0, 1.0])).unwrap();
        assert_eq!(got, Poly::from_real(&[1.0, -5.0]));
    }

    #[test]
    fn apply_rejects_high_degree() {
        let t = LinearOperator::identity(2);
        assert_eq!(
            t.apply(&Poly::from_real(&[0.0, 0.0, 0.0, 1.0])),
            Err(Error::DegreeOutOfRange {
                degree: 3,
                horizon: 2
            })
        );
        // a negligible tail beyond the horizon is ignored
        let p = Poly::from_real(&[1.0, 1.0, 1.0, 1e-20]);
        assert_eq!(t.apply(&p).unwrap(), Poly::from_real(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn apply_bivariate_examples() {
        let zw = BiPoly::from_fn(2, 2, |i, j| if i + j == 1 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        let sq = zw.pow(2);
        let d = LinearOperator::derivative(4).apply_bivariate(&sq).unwrap();
        let two = BiPoly::from_fn(1, 1, |_, _| c64(2.0, 0.0));
        assert!(d.max_diff(&zw.mul(&two)) < 1e-15);

        // (p' - zp)[(z+w)^n] = (z+w)^(n-1) (n - z(z+w))
        for n in 1..=5usize {
            let got = p_prime_minus_zp(8).apply_bivariate(&zw.pow(n)).unwrap();
            let z_zw = BiPoly::from_fn(3, 2, |i, j| match (i, j) {
                (0, 0) => c64(n as f64, 0.0),
                (2, 0) | (1, 1) => c64(-1.0, 0.0),
                _ => c64(0.0, 0.0),
            });
            let expected = zw.pow(n - 1).mul(&z_zw);
            assert!(got.max_diff(&expected) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn diff_expansion_examples() {
        let zp = LinearOperator::multiply_by(&Poly::z(), 5).to_diff_expansion();
        assert_eq!(zp.qs[0], Poly::z());
        assert!(zp.qs[1..].iter().all(Poly::is_zero));

        let d = LinearOperator::derivative(5).to_diff_expansion();
        assert!(d.qs[0].is_zero());
        assert_eq!(d.qs[1], Poly::one());
        assert!(d.qs[2..].iter().all(Poly::is_zero));

        // images of p' - zp: -z, 1 - z^2, 2z - z^3
        let t = LinearOperator::new(vec![
            Poly::from_real(&[0.0, -1.0]),
            Poly::from_real(&[1.0, 0.0, -1.0]),
            Poly::from_real(&[0.0, 2.0, 0.0, -1.0]),
        ]);
        let e = t.to_diff_expansion();
        assert_eq!(e.qs[0], Poly::from_real(&[0.0, -1.0]));
        assert_eq!(e.qs[1], Poly::one());
        assert!(e.qs[2].is_zero());
    }

    #[test]
    fn from_diff_expansion_examples() {
        let id = DiffExpansion { qs: vec![Poly::one()] }.to_operator(4);
        assert_eq!(id, LinearOperator::identity(4));

        let t = p_prime_minus_zp(2);
        assert_eq!(t.images()[0], Poly::from_real(&[0.0, -1.0]));
        assert_eq!(t.images()[1], Poly::from_real(&[1.0, 0.0, -1.0]));
        assert_eq!(t.images()[2], Poly::from_real(&[0.0, 2.0, 0.0, -1.0]));

        let d = DiffExpansion {
            qs: vec![Poly::zero(), Poly::one()],
        }
        .to_operator(4);
        assert_eq!(d, LinearOperator::derivative(4));
    }

    #[test]
    fn rank_one_examples() {
        let p = Poly::new(vec![c64(0.0, -1.0), c64(1.0, 0.0)]);
        let alphas: Vec<Complex64> = (1..=4).map(|k| c64(k as f64, 0.0)).collect();
        let t = LinearOperator::rank_one(&alphas, &p);
        let form = t.rank_one_check().unwrap();
        assert!(form.p.max_diff(&p) < 1e-15);
        for (a, b) in form.alphas.iter().zip(&alphas) {
            assert!((a - b).norm() < 1e-12);
        }

        assert!(LinearOperator::identity(3).rank_one_check().is_none());

        let q = Poly::from_real(&[1.0, 0.0, 1.0]);
        let t = LinearOperator::new(vec![q.clone(), Poly::zero(), Poly::zero()]);
        let form = t.rank_one_check().unwrap();
        assert_eq!(form.p, q);
        assert_eq!(form.alphas, vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);

        assert!(LinearOperator::new(vec![Poly::zero(); 3]).rank_one_check().is_none());
    }

    #[test]
    fn minimal_k_examples() {
        assert_eq!(LinearOperator::derivative(3).minimal_k(), Some(1));
        assert_eq!(LinearOperator::multiply_by(&Poly::z(), 3).minimal_k(), Some(0));
        assert_eq!(LinearOperator::new(vec![Poly::zero(); 4]).minimal_k(), None);
    }

    #[test]
    fn bounded_degree_must_match_horizon() {
        assert!(LinearOperator::identity(3).with_bounded_degree(3).is_ok());
        assert_eq!(
            LinearOperator::identity(3).with_bounded_degree(2),
            Err(Error::HorizonMismatch {
                bounded: 2,
                horizon: 3
            })
        );
    }
}
