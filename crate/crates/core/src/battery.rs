//! A fixed set of test operators with known or easily predicted behaviour on
//! the upper half-plane, plus a few seeded random ones.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{DiffExpansion, LinearOperator};
use crate::poly::{c64, Poly};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub op: LinearOperator,
}

fn entry(name: impl Into<String>, op: LinearOperator) -> Entry {
    Entry {
        name: name.into(),
        op,
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `p -> p' - z p`
pub fn shifted_derivative(horizon: usize) -> LinearOperator {
    LinearOperator::from_fn(horizon, |k| {
        let zk = Poly::monomial(k, c64(1.0, 0.0));
        &zk.derivative() - &(&Poly::z() * &zk)
    })
}

/// `p -> a_{n+1} - a_0 z` on polynomials of degree at most `n + 1`.
pub fn coefficient_swap(n: usize) -> LinearOperator {
    LinearOperator::from_fn(n + 1, |k| {
        if k == 0 {
            Poly::new(vec![c64(0.0, 0.0), c64(-1.0, 0.0)])
        } else if k == n + 1 {
            Poly::one()
        } else {
            Poly::zero()
        }
    })
}

/// `f -> f(x) P`
pub fn evaluation_times(x: Complex64, p: &Poly, horizon: usize) -> LinearOperator {
    let alphas: Vec<Complex64> = (0..=horizon).map(|k| x.powu(k as u32)).collect();
    LinearOperator::rank_one(&alphas, p)
}

/// `sum_k Q_k D^k` with random `Q_k` of degree at most 2, `k <= 3`.
pub fn random_diff_operator(horizon: usize, rng: &mut impl Rng) -> LinearOperator {
    let qs = (0..=3)
        .map(|_| {
            Poly::new(
                (0..3)
                    .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            )
        })
        .collect();
    DiffExpansion { qs }.to_operator(horizon)
}

/// Twenty-two operators with horizon `horizon`; the five random ones are
/// drawn from `seed`.
pub fn battery(horizon: usize, seed: u64) -> Vec<Entry> {
    let one = c64(1.0, 0.0);
    let linear = |root: Complex64| Poly::new(vec![-root, one]);
    let diag = |f: &dyn Fn(usize) -> f64| {
        LinearOperator::diagonal(&(0..=horizon).map(|k| c64(f(k), 0.0)).collect::<Vec<_>>())
    };
    let d = LinearOperator::derivative(horizon);
    let mut out = vec![
        entry("identity", LinearOperator::identity(horizon)),
        entry("derivative", d.clone()),
        entry("times-z", LinearOperator::multiply_by(&Poly::z(), horizon)),
        entry("shifted-derivative", shifted_derivative(horizon)),
        entry("multiplier-one", diag(&|_| 1.0)),
        entry("multiplier-k-plus-one", diag(&|k| (k + 1) as f64)),
        entry("multiplier-inverse-factorial", diag(&|k| 1.0 / factorial(k))),
        entry("multiplier-powers-of-two", diag(&|k| 2f64.powi(k as i32))),
        entry("rank-one-interior", evaluation_times(c64(0.0, 0.0), &linear(I), horizon)),
        entry("rank-one-boundary", evaluation_times(c64(0.0, 0.0), &linear(one), horizon)),
        entry("rank-one-exterior", evaluation_times(c64(0.0, 0.0), &linear(-I), horizon)),
        entry(
            "rank-one-exterior-at-one",
            evaluation_times(one, &linear(c64(1.0, -2.0)), horizon),
        ),
        entry(
            "second-derivative",
            LinearOperator::from_fn(horizon, |k| d.images()[k].derivative()),
        ),
        entry(
            "plus-derivative",
            LinearOperator::from_fn(horizon, |k| &Poly::monomial(k, one) + &d.images()[k]),
        ),
        entry(
            "euler",
            LinearOperator::from_fn(horizon, |k| Poly::monomial(k, c64(k as f64, 0.0))),
        ),
        entry(
            "times-z-plus-i",
            LinearOperator::multiply_by(&linear(-I), horizon),
        ),
        entry(
            "real-shift",
            LinearOperator::from_fn(horizon, |k| Poly::from_roots(&vec![-one; k], one)),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..5 {
        out.push(entry(
            format!("random-diff-{i}"),
            random_diff_operator(horizon, &mut rng),
        ));
    }
    out
}
