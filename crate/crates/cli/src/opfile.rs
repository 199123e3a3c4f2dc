//! Operator files.
//!
//! A single JSON document:
//!
//! ```json
//! { "form": "monomial", "N": 2, "images": { "0": [[0, 0], [1, 0]] } }
//! { "form": "diff", "N": 3, "qs": { "0": [[0, 0], [-1, 0]], "1": [[1, 0]] } }
//! ```
//!
//! `images[k]` lists the coefficients of `T[z^k]` and `qs[k]` those of `Q_k`
//! in `T = sum Q_k D^k`, each as `[re, im]` pairs in ascending powers of
//! `z`. Missing indices mean the zero polynomial. An optional
//! `bounded_degree` restricts the operator to polynomials of that degree,
//! which must equal `N`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use zeropres::{DiffExpansion, LinearOperator, Poly};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Form {
    Monomial,
    Diff,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    form: Form,
    #[serde(rename = "N")]
    horizon: usize,
    #[serde(default)]
    bounded_degree: Option<usize>,
    #[serde(default)]
    images: Option<BTreeMap<String, Value>>,
    #[serde(default)]
    qs: Option<BTreeMap<String, Value>>,
}

#[derive(Serialize)]
struct Output<'a> {
    form: Form,
    #[serde(rename = "N")]
    horizon: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounded_degree: Option<usize>,
    images: BTreeMap<String, &'a Poly>,
}

fn entry_error(entry: &str, message: impl Into<String>) -> CliError {
    CliError::Entry {
        entry: entry.to_string(),
        message: message.into(),
    }
}

fn coefficient(entry: &str, v: &Value) -> Result<Complex64, CliError> {
    let pair = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| entry_error(entry, format!("expected a [re, im] pair, found {v}")))?;
    let part = |x: &Value| {
        x.as_f64()
            .ok_or_else(|| entry_error(entry, format!("`{x}` is not a number")))
    };
    Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
}

/// Reads the `k -> coefficient list` map under `field`.
fn polys(field: &str, map: &BTreeMap<String, Value>, horizon: usize) -> Result<Vec<Poly>, CliError> {
    let mut out = vec![Poly::zero(); horizon + 1];
    for (key, list) in map {
        let entry = format!("{field}.{key}");
        let k: usize = key
            .parse()
            .map_err(|_| entry_error(&entry, "index is not a non-negative integer"))?;
        if k > horizon {
            return Err(CliError::Horizon {
                entry,
                index: k,
                horizon,
            });
        }
        let items = list
            .as_array()
            .ok_or_else(|| entry_error(&entry, "expected a list of [re, im] pairs"))?;
        let coeffs = items
            .iter()
            .enumerate()
            .map(|(i, v)| coefficient(&format!("{entry}[{i}]"), v))
            .collect::<Result<Vec<_>, _>>()?;
        out[k] = Poly::new(coeffs);
    }
    Ok(out)
}

pub fn parse_operator(text: &str) -> Result<LinearOperator, CliError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let op = match doc.form {
        Form::Monomial => {
            if doc.qs.is_some() {
                return Err(entry_error("qs", "only allowed with form \"diff\""));
            }
            let images = doc.images.unwrap_or_default();
            LinearOperator::new(polys("images", &images, doc.horizon)?)
        }
        Form::Diff => {
            if doc.images.is_some() {
                return Err(entry_error("images", "only allowed with form \"monomial\""));
            }
            let qs = doc.qs.unwrap_or_default();
            DiffExpansion {
                qs: polys("qs", &qs, doc.horizon)?,
            }
            .to_operator(doc.horizon)
        }
    };
    match doc.bounded_degree {
        Some(n) => Ok(op.with_bounded_degree(n)?),
        None => Ok(op),
    }
}

/// Monomial form; zero images are left out.
pub fn serialize_operator(t: &LinearOperator) -> String {
    let images = t
        .images()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| (k.to_string(), p))
        .collect();
    let out = Output {
        form: Form::Monomial,
        horizon: t.horizon(),
        bounded_degree: t.bounded_degree(),
        images,
    };
    serde_json::to_string_pretty(&out).expect("operator serializes")
}
