//! Complex numbers serialize as `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

pub fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub fn complex_vec<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}
