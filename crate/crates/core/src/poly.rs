//! Dense univariate and bivariate polynomials with complex coefficients.
//!
//! Coefficients are stored in ascending order of degree. Trailing
//! coefficients may be numerically zero; [`Poly::degree`] decides what counts
//! as zero relative to the largest coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default relative threshold below which a coefficient is treated as zero.
pub const TRIM_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Univariate polynomial; `coeffs[i]` multiplies `z^i`.
#[derive(Clone, Default)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

/// Exact comparison of values; trailing zero coefficients are ignored.
impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        let zero = Complex64::default();
        let n = self.len().max(other.len());
        (0..n).all(|i| {
            self.coeffs.get(i).unwrap_or(&zero) == other.coeffs.get(i).unwrap_or(&zero)
        })
    }
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&re| c64(re, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(c64(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `c * z^k`
    pub fn monomial(k: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::default(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// The polynomial `z`.
    pub fn z() -> Self {
        Poly::monomial(1, c64(1.0, 0.0))
    }

    /// Expanded product `leading * prod (z - r)`.
    pub fn from_roots(roots: &[Complex64], leading: Complex64) -> Self {
        let mut coeffs = vec![leading];
        for &r in roots {
            let mut next = vec![Complex64::default(); coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^i`, zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree with the default trimming tolerance; `None` for the zero
    /// polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.degree_with(TRIM_TOL)
    }

    /// Largest index whose coefficient magnitude exceeds `tol * max |c_i|`.
    pub fn degree_with(&self, tol: f64) -> Option<usize> {
        let max = self.max_abs();
        if !(max > 0.0) {
            return None;
        }
        self.coeffs.iter().rposition(|c| c.norm() > tol * max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::default())
    }

    /// Drops trailing coefficients beyond [`Poly::degree`].
    pub fn trimmed(&self) -> Poly {
        match self.degree() {
            Some(d) => Poly::new(self.coeffs[..=d].to_vec()),
            None => Poly::zero(),
        }
    }

    /// Leading coefficient after trimming.
    pub fn leading(&self) -> Option<Complex64> {
        self.degree().map(|d| self.coeffs[d])
    }

    /// Trimmed and divided by its leading coefficient.
    pub fn monic(&self) -> Option<Poly> {
        let d = self.degree()?;
        let lead = self.coeffs[d];
        Some(Poly::new(self.coeffs[..=d].iter().map(|c| c / lead).collect()))
    }

    /// Horner evaluation of `sum coeffs[i] z^i`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// `sum |coeffs[i]| r^i`, the magnitude scale of an evaluation at `|z| = r`.
    pub fn abs_eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// `p(lambda z)`.
    pub fn rescaled(&self, lambda: f64) -> Poly {
        let mut s = 1.0;
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| {
                    let v = c * s;
                    s *= lambda;
                    v
                })
                .collect(),
        )
    }

    pub fn scale(&self, k: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Sets to zero every coefficient with `|c_i| <= tol * scale[i]`, where
    /// `scale` is the magnitude of the terms that were summed to form it.
    pub(crate) fn trim_against(&mut self, scale: &[f64], tol: f64) {
        for (c, &s) in self.coeffs.iter_mut().zip(scale) {
            if c.norm() <= tol * s {
                *c = Complex64::default();
            }
        }
        while self.coeffs.last() == Some(&Complex64::default()) {
            self.coeffs.pop();
        }
    }

    /// Largest coefficientwise distance, padding the shorter side with zeros.
    pub fn max_diff(&self, other: &Poly) -> f64 {
        let n = self.len().max(other.len());
        (0..n)
            .map(|i| (self.coeff(i) - other.coeff(i)).norm())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(d) = self.degree() else {
            return write!(f, "0");
        };
        let mut first = true;
        for (i, c) in self.coeffs[..=d].iter().enumerate().rev() {
            if *c == Complex64::default() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_empty() || rhs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![Complex64::default(); self.len() + rhs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(Poly::new(pairs.into_iter().map(|[re, im]| c64(re, im)).collect()))
    }
}

/// Bivariate polynomial in `(z, w)`; entry `(i, j)` multiplies `z^i w^j`.
#[derive(Clone, PartialEq)]
pub struct BiPoly {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl BiPoly {
    /// Zero polynomial with room for `z^0..z^{rows-1}` and `w^0..w^{cols-1}`.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BiPoly {
            rows,
            cols,
            data: vec![Complex64::default(); rows * cols],
        }
    }

    pub fn one() -> Self {
        let mut p = BiPoly::zeros(1, 1);
        p.data[0] = c64(1.0, 0.0);
        p
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut p = BiPoly::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                p.data[i * cols + j] = f(i, j);
            }
        }
        p
    }

    /// Builds `sum_j slices[j](z) w^j`.
    pub fn from_w_slices(slices: &[Poly]) -> Self {
        let rows = slices.iter().map(Poly::len).max().unwrap_or(0);
        BiPoly::from_fn(rows, slices.len(), |i, j| slices[j].coeff(i))
    }

    /// Number of stored z-powers (z-degree bound plus one).
    pub fn z_len(&self) -> usize {
        self.rows
    }

    pub fn w_len(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i < self.rows && j < self.cols {
            self.data[i * self.cols + j]
        } else {
            Complex64::default()
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == Complex64::default())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest z-degree with a nonzero coefficient.
    pub fn z_degree(&self) -> Option<usize> {
        (0..self.rows)
            .rev()
            .find(|&i| (0..self.cols).any(|j| self.get(i, j) != Complex64::default()))
    }

    /// Largest w-degree with a nonzero coefficient.
    pub fn w_degree(&self) -> Option<usize> {
        (0..self.cols)
            .rev()
            .find(|&j| (0..self.rows).any(|i| self.get(i, j) != Complex64::default()))
    }

    /// The z-polynomial multiplying `w^j`.
    pub fn w_slice(&self, j: usize) -> Poly {
        Poly::new((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    /// `F(z, w0)` as a polynomial in `z`.
    pub fn restrict_w(&self, w0: Complex64) -> Poly {
        Poly::new(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .rev()
                        .fold(Complex64::default(), |acc, j| acc * w0 + self.get(i, j))
                })
                .collect(),
        )
    }

    /// Per-coefficient magnitude scale of [`BiPoly::restrict_w`] at `|w0| = r`.
    pub fn restrict_w_scale(&self, r: f64) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .rev()
                    .fold(0.0, |acc, j| acc * r + self.get(i, j).norm())
            })
            .collect()
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.restrict_w(w).eval(z)
    }

    /// `sum |F(i,j)| |z|^i |w|^j`.
    pub fn abs_eval(&self, rz: f64, rw: f64) -> f64 {
        let mut total = 0.0;
        let mut zi = 1.0;
        for i in 0..self.rows {
            let mut wj = 1.0;
            for j in 0..self.cols {
                total += self.get(i, j).norm() * zi * wj;
                wj *= rw;
            }
            zi *= rz;
        }
        total
    }

    /// Swaps the roles of `z` and `w`.
    pub fn transpose(&self) -> BiPoly {
        BiPoly::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Two-dimensional convolution.
    pub fn mul(&self, rhs: &BiPoly) -> BiPoly {
        if self.rows == 0 || self.cols == 0 || rhs.rows == 0 || rhs.cols == 0 {
            return BiPoly::zeros(0, 0);
        }
        let mut out = BiPoly::zeros(self.rows + rhs.rows - 1, self.cols + rhs.cols - 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::default() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let idx = (i + k) * out.cols + (j + l);
                        out.data[idx] += a * rhs.get(k, l);
                    }
                }
            }
        }
        out
    }

    /// `base^n` by repeated convolution; `n = 0` gives the constant 1.
    pub fn pow(&self, n: usize) -> BiPoly {
        (0..n).fold(BiPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn max_diff(&self, other: &BiPoly) -> f64 {
        let rows = self.rows.max(other.rows);
        let cols = self.cols.max(other.cols);
        let mut m: f64 = 0.0;
        for i in 0..rows {
            for j in 0..cols {
                m = m.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        m
    }

    /// Nonzero entries as `(i, j, coefficient)`.
    pub fn terms(&self) -> Vec<(usize, usize, Complex64)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let c = self.get(i, j);
                if c != Complex64::default() {
                    out.push((i, j, c));
                }
            }
        }
        out
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BiPoly")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("terms", &self.terms())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn eval_examples() {
        let p = Poly::from_real(&[1.0, 0.0, 1.0]);
        assert_eq!(p.eval(I), Complex64::default());
        assert_eq!(Poly::zero().eval(c64(7.0, 0.0)), Complex64::default());
        // (z - i)^2 (z + 2i) = z^3 + 3z - 2i
        let q = Poly::new(vec![c64(0.0, -2.0), c64(3.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert!(q.eval(I).norm() < 1e-15);
    }

    #[test]
    fn equality_ignores_trailing_zeros() {
        assert_eq!(Poly::z().scale(Complex64::default()), Poly::zero());
        assert_eq!(Poly::from_real(&[1.0, 2.0, 0.0]), Poly::from_real(&[1.0, 2.0]));
        assert_ne!(Poly::from_real(&[1.0, 2.0]), Poly::from_real(&[1.0, 2.0, 1e-300]));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            Poly::from_real(&[1.0, 0.0, 1.0]).derivative(),
            Poly::from_real(&[0.0, 2.0])
        );
        assert!(Poly::from_real(&[5.0]).derivative().is_zero());
        let q = Poly::new(vec![c64(0.0, -2.0), c64(3.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert_eq!(q.derivative(), Poly::from_real(&[3.0, 0.0, 3.0]));
    }

    #[test]
    fn from_roots_examples() {
        assert_eq!(Poly::from_roots(&[I, -I], c64(1.0, 0.0)), Poly::from_real(&[1.0, 0.0, 1.0]));
        assert_eq!(Poly::from_roots(&[], c64(3.0, 0.0)), Poly::from_real(&[3.0]));
        let p = Poly::from_roots(&[I, I, -2.0 * I], c64(1.0, 0.0));
        let expected =
            Poly::new(vec![c64(0.0, -2.0), c64(3.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert!(p.max_diff(&expected) < 1e-15, "{p:?}");
    }

    #[test]
    fn degree_trims_relative_noise() {
        let p = Poly::from_real(&[1.0, 2.0, 1e-14]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::from_real(&[0.0, 0.0]).degree(), None);
        assert_eq!(p.trimmed().len(), 2);
    }

    #[test]
    fn bipoly_pow_examples() {
        // z + w
        let base = BiPoly::from_fn(2, 2, |i, j| if i + j == 1 { c64(1.0, 0.0) } else { c64(0.0, 0.0) });
        let sq = base.pow(2);
        assert_eq!(sq.get(2, 0), c64(1.0, 0.0));
        assert_eq!(sq.get(1, 1), c64(2.0, 0.0));
        assert_eq!(sq.get(0, 2), c64(1.0, 0.0));
        assert_eq!(sq.get(1, 0), c64(0.0, 0.0));

        assert_eq!(base.pow(0), BiPoly::one());

        // 1 - zw
        let b = BiPoly::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c64(1.0, 0.0),
            (1, 1) => c64(-1.0, 0.0),
            _ => c64(0.0, 0.0),
        });
        assert_eq!(b.pow(2).get(1, 1), c64(-2.0, 0.0));
    }

    #[test]
    fn restrict_and_transpose() {
        let f = BiPoly::from_fn(3, 2, |i, j| c64(i as f64 + 1.0, j as f64));
        let w0 = c64(0.3, -0.7);
        let z0 = c64(-1.1, 0.4);
        let direct: Complex64 = f.terms().iter().map(|&(i, j, c)| c * z0.powu(i as u32) * w0.powu(j as u32)).sum();
        assert!((f.eval(z0, w0) - direct).norm() < 1e-13);
        assert!((f.transpose().eval(w0, z0) - direct).norm() < 1e-13);
        assert_eq!(f.w_slice(1), Poly::new(vec![c64(1.0, 1.0), c64(2.0, 1.0), c64(3.0, 1.0)]));
    }
}
