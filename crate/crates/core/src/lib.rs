//! Numerical certification of root-preserving linear operators on complex
//! polynomials, for circular domains given as Möbius preimages of the upper
//! half-plane.
//!
//! ```
//! use zeropres::{certify_open, Budget, LinearOperator, MoebiusDomain, Poly, Verdict};
//!
//! let dom = MoebiusDomain::preset("upper-half-plane").unwrap();
//! let t = LinearOperator::multiply_by(&Poly::z(), 4);
//! let report = certify_open(&t, &dom, 4, &Budget::default()).unwrap();
//! assert_eq!(report.verdict, Verdict::Falsified);
//! ```

pub mod battery;
pub mod certify;
pub mod domain;
mod enclose;
pub mod error;
pub mod operator;
pub mod poly;
pub mod roots;
mod ser;
pub mod symbol;

pub use certify::{
    boundary_root_check, certify_closed, certify_closed_bounded, certify_open, falsify,
    gcd_image, Budget, CertReport, Route, Verdict, Witness,
};
pub use domain::{BoundaryShape, MoebiusDomain, Region, RegionTag};
pub use error::{Error, Result};
pub use operator::{DiffExpansion, LinearOperator, RankOneForm};
pub use poly::{BiPoly, Poly};
pub use roots::{approx_gcd, roots, roots_with, Root, RootMultiset, RootOptions};
pub use symbol::{base_symbol, nonvanishing_check, operator_symbol, Nonvanishing, NonvanishingMode};
