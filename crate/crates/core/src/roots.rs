//! Simultaneous (Aberth–Ehrlich) root finding, multiplicity clustering and
//! root-matching approximate GCD.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Poly, TRIM_TOL};

/// Default radius under which computed roots are merged into one entry.
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Relative correction size at which an approximation is accepted.
    pub tol: f64,
    pub max_iters: usize,
    /// Roots closer than `cluster_radius * max(1, |r|)` are merged.
    pub cluster_radius: f64,
    pub trim_tol: f64,
    /// Decide the degree after rescaling `z` to balance the outer
    /// coefficients. Use for polynomials without cancellation noise whose
    /// roots span many orders of magnitude.
    pub balanced: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            tol: 1e-12,
            max_iters: 200,
            cluster_radius: CLUSTER_RADIUS,
            trim_tol: TRIM_TOL,
            balanced: false,
        }
    }
}

impl RootOptions {
    pub fn balanced() -> Self {
        RootOptions {
            balanced: true,
            ..Self::default()
        }
    }

    pub fn with_cluster_radius(mut self, r: f64) -> Self {
        self.cluster_radius = r;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    #[serde(serialize_with = "crate::ser::complex")]
    pub location: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootMultiset {
    pub roots: Vec<Root>,
    /// `max |p(r)| / (max|c_i| * max(1,|r|)^deg)` over the entries.
    pub residual: f64,
}

impl RootMultiset {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn locations(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.roots.iter().map(|r| r.location)
    }

    /// Roots listed with repetition.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.location).take(r.multiplicity))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

impl Poly {
    pub fn roots(&self) -> Result<RootMultiset> {
        roots_with(self, &RootOptions::default())
    }
}

pub fn roots(p: &Poly) -> Result<RootMultiset> {
    roots_with(p, &RootOptions::default())
}

/// Roots of `p` with multiplicities. A nonzero constant yields an empty set.
pub fn roots_with(p: &Poly, opts: &RootOptions) -> Result<RootMultiset> {
    let c = p.coeffs();
    let n = working_degree(c, opts).ok_or(Error::ZeroPolynomial)?;
    let zeros = c.iter().position(|x| *x != Complex64::default()).unwrap_or(0);
    if n == 0 {
        return Ok(RootMultiset {
            roots: Vec::new(),
            residual: 0.0,
        });
    }

    // points are (location in z, location in the balanced variable, radius)
    let mut points: Vec<(Complex64, Complex64, f64)> =
        vec![(Complex64::default(), Complex64::default(), 0.0); zeros.min(n)];

    if n > zeros {
        let q = &c[zeros..=n];
        let d = q.len() - 1;
        let lambda = balance_scale(q[0], q[d], d);
        let big = q
            .iter()
            .enumerate()
            .map(|(i, x)| x.norm() * lambda.powi(i as i32))
            .fold(0.0, f64::max);
        let b: Vec<Complex64> = q
            .iter()
            .enumerate()
            .map(|(i, &x)| x * (lambda.powi(i as i32) / big))
            .collect();
        let us = if d == 1 {
            vec![-b[0] / b[1]]
        } else {
            aberth(&b, opts)?
        };
        let radii = inclusion_radii(&b, &us);
        for (u, r) in us.into_iter().zip(radii) {
            points.push((u * lambda, u, r));
        }
    }

    let mut roots: Vec<Root> = cluster(&points, opts.cluster_radius)
        .into_iter()
        .map(|g| Root {
            location: g.iter().map(|&i| points[i].0).sum::<Complex64>() / g.len() as f64,
            multiplicity: g.len(),
        })
        .collect();
    if n > zeros {
        let q = &c[zeros..=n];
        let lambda = balance_scale(q[0], q[q.len() - 1], q.len() - 1);
        let b = Poly::new(q.iter().enumerate().map(|(i, &x)| x * lambda.powi(i as i32)).collect());
        for r in roots.iter_mut() {
            if r.multiplicity > 1 && r.location.norm() > opts.cluster_radius {
                r.location = polish_cluster(&b, r.location / lambda, r.multiplicity) * lambda;
            }
        }
    }
    let roots = merge_close(roots, opts.cluster_radius);
    let max = p.max_abs();
    let residual = roots
        .iter()
        .map(|r| p.eval(r.location).norm() / (max * r.location.norm().max(1.0).powi(n as i32)))
        .fold(0.0, f64::max);
    Ok(RootMultiset { roots, residual })
}

/// Roots with the degree decided in the balanced variable.
pub fn roots_balanced(p: &Poly) -> Result<RootMultiset> {
    roots_with(p, &RootOptions::balanced())
}

fn working_degree(c: &[Complex64], opts: &RootOptions) -> Option<usize> {
    let p = Poly::new(c.to_vec());
    if !opts.balanced {
        return p.degree_with(opts.trim_tol);
    }
    let hi = c.iter().rposition(|x| *x != Complex64::default())?;
    let lo = c.iter().position(|x| *x != Complex64::default())?;
    if hi == lo {
        return Some(hi);
    }
    let lambda = balance_scale(c[lo], c[hi], hi - lo);
    p.rescaled(lambda).degree_with(opts.trim_tol)
}

/// `(|low| / |high|)^(1/span)`, the geometric mean modulus of the roots.
fn balance_scale(low: Complex64, high: Complex64, span: usize) -> f64 {
    if span == 0 {
        return 1.0;
    }
    let s = (low.norm().ln() - high.norm().ln()) / span as f64;
    let lambda = s.exp();
    if lambda.is_finite() && lambda > 0.0 {
        lambda
    } else {
        1.0
    }
}

/// Initial guesses from the upper convex hull of `(i, ln|b_i|)`: each hull
/// edge spanning `k` indices contributes `k` points on a circle whose radius
/// matches the slope of that edge.
fn initial_guesses(b: &[Complex64]) -> Vec<Complex64> {
    let d = b.len() - 1;
    let pts: Vec<(usize, f64)> = b
        .iter()
        .enumerate()
        .filter(|(_, x)| **x != Complex64::default())
        .map(|(i, x)| (i, x.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (i1, y1) = hull[hull.len() - 2];
            let (i2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly above the chord
            let cross = (i2 as f64 - i1 as f64) * (p.1 - y1) - (y2 - y1) * (p.0 as f64 - i1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut out = Vec::with_capacity(d);
    for w in hull.windows(2) {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        let k = j - i;
        let radius = ((yi - yj) / k as f64).exp();
        for m in 0..k {
            let theta = std::f64::consts::TAU * (m as f64 / k as f64 + i as f64 / d as f64) + sigma;
            out.push(Complex64::from_polar(radius, theta));
        }
    }
    out
}

/// `p'(z)/p(z)` and whether `|p(z)|` is already at the rounding level.
fn log_derivative(b: &[Complex64], z: Complex64) -> (Complex64, bool) {
    let d = b.len() - 1;
    let fudge = 4.0 * d as f64 * f64::EPSILON;
    if z.norm() <= 1.0 {
        let mut p = Complex64::default();
        let mut dp = Complex64::default();
        let mut abs = 0.0;
        let r = z.norm();
        for &c in b.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            abs = abs * r + c.norm();
        }
        (dp / p, p.norm() <= fudge * abs)
    } else {
        // p(z) = z^d R(1/z) with R the reversed polynomial
        let y = z.inv();
        let r = y.norm();
        let mut rp = Complex64::default();
        let mut drp = Complex64::default();
        let mut abs = 0.0;
        for &c in b.iter() {
            drp = drp * y + rp;
            rp = rp * y + c;
            abs = abs * r + c.norm();
        }
        ((rp * d as f64 - y * drp) / (z * rp), rp.norm() <= fudge * abs)
    }
}

fn aberth(b: &[Complex64], opts: &RootOptions) -> Result<Vec<Complex64>> {
    let d = b.len() - 1;
    let mut z = initial_guesses(b);
    let mut done = vec![false; d];
    for _ in 0..opts.max_iters {
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (inv, at_noise) = log_derivative(b, z[i]);
            if at_noise || !inv.is_finite() {
                done[i] = true;
                continue;
            }
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let corr = (inv - s).inv();
            if !corr.is_finite() {
                // coincident approximations; nudge apart
                z[i] *= Complex64::new(1.0, 1e-7);
                continue;
            }
            z[i] -= corr;
            if corr.norm() <= opts.tol * z[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&x| x) {
            return Ok(z);
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iters,
        degree: d,
    })
}

/// Weierstrass inclusion radii `d |W_i|` with the residual inflated to the
/// rounding level; overlapping disks mark approximations of one cluster.
fn inclusion_radii(b: &[Complex64], us: &[Complex64]) -> Vec<f64> {
    let d = b.len() - 1;
    let lead = b[d].norm();
    let fudge = 4.0 * d as f64 * f64::EPSILON;
    us.iter()
        .enumerate()
        .map(|(i, &u)| {
            let p = Poly::new(b.to_vec());
            let val = p.eval(u).norm() + fudge * p.abs_eval(u.norm());
            let prod: f64 = us
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| (u - v).norm())
                .product();
            if prod == 0.0 {
                f64::INFINITY
            } else {
                d as f64 * val / (lead * prod)
            }
        })
        .collect()
}

/// Newton on the `(m-1)`-th derivative, which has a simple root at an
/// `m`-fold cluster. Falls back to the centroid if the iteration wanders off.
fn polish_cluster(b: &Poly, u0: Complex64, m: usize) -> Complex64 {
    let mut g = b.clone();
    for _ in 1..m {
        g = g.derivative();
    }
    let dg = g.derivative();
    let mut u = u0;
    let mut prev = f64::INFINITY;
    for _ in 0..30 {
        let step = g.eval(u) / dg.eval(u);
        if !step.is_finite() {
            return u0;
        }
        u -= step;
        let size = step.norm() / u.norm().max(1.0);
        // once contraction stops, the steps are rounding noise
        let stalled = size > 0.5 * prev && size <= 1e-6;
        if size <= 64.0 * f64::EPSILON || stalled {
            return if (u - u0).norm() <= 0.1 * u0.norm().max(1.0) { u } else { u0 };
        }
        prev = size;
    }
    u0
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut k = i;
    while parent[k] != r {
        let next = parent[k];
        parent[k] = r;
        k = next;
    }
    r
}

fn close(a: Complex64, b: Complex64, radius: f64) -> bool {
    (a - b).norm() <= radius * a.norm().max(b.norm()).max(1.0)
}

/// Groups of point indices taken as one root. Points merge when close or
/// when their inclusion disks overlap; a merged group that falls apart into
/// well separated parts is split again.
fn cluster(points: &[(Complex64, Complex64, f64)], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (zi, ui, ri) = points[i];
            let (zj, uj, rj) = points[j];
            if close(zi, zj, radius) || (ui - uj).norm() <= ri + rj {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    let mut out = Vec::new();
    for g in groups {
        split(points, g, radius, &mut out);
    }
    out
}

/// Cuts the longest edge of the group's minimum spanning tree when it is
/// four times longer than every other edge. Approximations of one multiple
/// root scatter without such a gap; two nearby multiple roots leave one.
fn split(points: &[(Complex64, Complex64, f64)], group: Vec<usize>, radius: f64, out: &mut Vec<Vec<usize>>) {
    let m = group.len();
    let at = |i: usize| points[group[i]].0;
    if m < 3 {
        out.push(group);
        return;
    }
    // Prim: edges[i] = (parent, length) for every vertex but the first
    let mut in_tree = vec![false; m];
    let mut best = vec![(0usize, f64::INFINITY); m];
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(m - 1);
    in_tree[0] = true;
    for j in 1..m {
        best[j] = (0, (at(0) - at(j)).norm());
    }
    for _ in 1..m {
        let v = (0..m)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| best[a].1.total_cmp(&best[b].1))
            .unwrap();
        in_tree[v] = true;
        edges.push((best[v].0, v, best[v].1));
        for j in 0..m {
            let d = (at(v) - at(j)).norm();
            if !in_tree[j] && d < best[j].1 {
                best[j] = (v, d);
            }
        }
    }
    edges.sort_by(|a, b| b.2.total_cmp(&a.2));
    let (longest, rest) = (edges[0], &edges[1..]);
    let span = (0..m).map(|i| at(i).norm()).fold(1.0, f64::max);
    if longest.2 <= radius * span || longest.2 <= 4.0 * rest[0].2 {
        out.push(group);
        return;
    }
    let mut parent: Vec<usize> = (0..m).collect();
    for &(a, b, _) in rest {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let side = find(&mut parent, longest.0);
    let (left, right): (Vec<usize>, Vec<usize>) =
        (0..m).partition(|&i| find(&mut parent, i) == side);
    split(points, left.into_iter().map(|i| group[i]).collect(), radius, out);
    split(points, right.into_iter().map(|i| group[i]).collect(), radius, out);
}

/// Merges roots whose locations fall within `radius` of each other and sorts.
fn merge_close(mut roots: Vec<Root>, radius: f64) -> Vec<Root> {
    loop {
        let mut merged = false;
        'outer: for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if close(roots[i].location, roots[j].location, radius) {
                    let (a, b) = (roots[i], roots[j]);
                    let m = a.multiplicity + b.multiplicity;
                    roots[i] = Root {
                        location: (a.location * a.multiplicity as f64
                            + b.location * b.multiplicity as f64)
                            / m as f64,
                        multiplicity: m,
                    };
                    roots.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    roots.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    roots
}

/// Monic polynomial whose roots are the locations common to every member,
/// each with the smallest multiplicity seen; constant 1 when none are shared.
pub fn approx_gcd(ps: &[Poly], cluster_radius: f64) -> Result<Poly> {
    let opts = RootOptions::balanced().with_cluster_radius(cluster_radius);
    let (first, rest) = ps.split_first().ok_or(Error::EmptyInput)?;
    let mut common: Vec<Root> = roots_with(first, &opts)?.roots;
    for p in rest {
        if common.is_empty() {
            // still validate the remaining members
            if p.degree().is_none() {
                return Err(Error::ZeroPolynomial);
            }
            continue;
        }
        let theirs = roots_with(p, &opts)?.roots;
        let mut used = vec![false; theirs.len()];
        let mut next = Vec::new();
        for r in &common {
            let best = theirs
                .iter()
                .enumerate()
                .filter(|(k, t)| !used[*k] && close(r.location, t.location, cluster_radius))
                .min_by(|a, b| {
                    (a.1.location - r.location)
                        .norm()
                        .total_cmp(&(b.1.location - r.location).norm())
                });
            if let Some((k, t)) = best {
                used[k] = true;
                next.push(Root {
                    location: r.location,
                    multiplicity: r.multiplicity.min(t.multiplicity),
                });
            }
        }
        common = next;
    }
    let expanded: Vec<Complex64> = common
        .iter()
        .flat_map(|r| std::iter::repeat(r.location).take(r.multiplicity))
        .collect();
    Ok(Poly::from_roots(&expanded, Complex64::new(1.0, 0.0)))
}
