//! JSON formats for measure and spec files.
//!
//! Complex numbers are written as `[re, im]`; a bare number is accepted on input
//! as a real value.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::formulas::{IntegrandSpec, OneMatrixSpec};
use crate::measure::{
    catalog, gauss_legendre_discretize, product_bimeasure_coupled, DiscreteBiMeasure,
    DiscreteMeasure,
};
use crate::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonComplex {
    Pair([f64; 2]),
    Real(f64),
}

impl From<JsonComplex> for Complex {
    fn from(v: JsonComplex) -> Self {
        match v {
            JsonComplex::Pair([re, im]) => Complex::new(re, im),
            JsonComplex::Real(re) => Complex::new(re, 0.0),
        }
    }
}

pub fn complex_json(z: Complex) -> Value {
    json!([z.re, z.im])
}

fn to_complex(v: &[JsonComplex]) -> Vec<Complex> {
    v.iter().map(|&z| z.into()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureWeight {
    /// `dx`.
    One,
    /// `exp(−x²) dx`.
    Gauss,
    /// Product of two Gauss–Legendre rules coupled by `exp(xy)`.
    ExpXy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureFile {
    DiscreteBimeasure {
        x_nodes: Vec<JsonComplex>,
        y_nodes: Vec<JsonComplex>,
        weights: Vec<Vec<JsonComplex>>,
    },
    DiscreteMeasure {
        nodes: Vec<JsonComplex>,
        weights: Vec<JsonComplex>,
    },
    Quadrature {
        weight: QuadratureWeight,
        interval: [f64; 2],
        n_nodes: usize,
    },
}

/// A parsed measure: either one- or two-variable.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedMeasure {
    Two(DiscreteBiMeasure),
    One(DiscreteMeasure),
}

impl MeasureFile {
    pub fn build(&self) -> Result<LoadedMeasure> {
        Ok(match self {
            MeasureFile::DiscreteBimeasure {
                x_nodes,
                y_nodes,
                weights,
            } => LoadedMeasure::Two(DiscreteBiMeasure::new(
                to_complex(x_nodes),
                to_complex(y_nodes),
                weights.iter().map(|r| to_complex(r)).collect(),
            )?),
            MeasureFile::DiscreteMeasure { nodes, weights } => LoadedMeasure::One(
                DiscreteMeasure::new(to_complex(nodes), to_complex(weights))?,
            ),
            MeasureFile::Quadrature {
                weight,
                interval,
                n_nodes,
            } => {
                let iv = (interval[0], interval[1]);
                match weight {
                    QuadratureWeight::One => LoadedMeasure::One(gauss_legendre_discretize(
                        |_| Complex::new(1.0, 0.0),
                        iv,
                        *n_nodes,
                    )?),
                    QuadratureWeight::Gauss => LoadedMeasure::One(gauss_legendre_discretize(
                        |x| Complex::new((-x * x).exp(), 0.0),
                        iv,
                        *n_nodes,
                    )?),
                    QuadratureWeight::ExpXy => {
                        let m =
                            gauss_legendre_discretize(|_| Complex::new(1.0, 0.0), iv, *n_nodes)?;
                        LoadedMeasure::Two(product_bimeasure_coupled(&m, &m, |x, y| (x * y).exp())?)
                    }
                }
            }
        })
    }
}

/// Names accepted by [`load_measure`] after a `builtin:` prefix.
pub const BUILTIN_MEASURES: &[&str] = &[
    "coupled-sign",
    "exp-xy-grid3",
    "exp-xy-grid5",
    "two-point",
    "legendre8",
];

fn builtin(name: &str) -> Result<LoadedMeasure> {
    Ok(match name {
        "coupled-sign" => LoadedMeasure::Two(catalog::coupled_sign(0.5)),
        "exp-xy-grid3" => LoadedMeasure::Two(catalog::exp_xy_grid3()),
        "exp-xy-grid5" => LoadedMeasure::Two(catalog::exp_xy_grid(&[-1.0, -0.5, 0.0, 0.5, 1.0])),
        "two-point" => LoadedMeasure::One(catalog::two_point()),
        "legendre8" => LoadedMeasure::One(catalog::legendre(8)),
        _ => {
            return Err(Error::Invalid(format!(
                "unknown builtin measure {name:?}; expected one of {BUILTIN_MEASURES:?}"
            )))
        }
    })
}

pub fn parse_measure(text: &str) -> Result<LoadedMeasure> {
    let file: MeasureFile =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("measure JSON: {e}")))?;
    file.build()
}

/// Load a measure from a JSON file, or a built-in one named `builtin:<name>`.
pub fn load_measure(source: &str) -> Result<LoadedMeasure> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return builtin(name);
    }
    parse_measure(&read(source)?)
}

fn read(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub xi: Vec<JsonComplex>,
    #[serde(default)]
    pub zeta: Vec<JsonComplex>,
    #[serde(default)]
    pub eta: Vec<JsonComplex>,
    #[serde(default)]
    pub mu: Vec<JsonComplex>,
}

impl SpecFile {
    pub fn two(&self) -> Result<IntegrandSpec> {
        IntegrandSpec::new(
            self.n,
            to_complex(&self.xi),
            to_complex(&self.zeta),
            to_complex(&self.eta),
            to_complex(&self.mu),
        )
    }

    pub fn one(&self) -> Result<OneMatrixSpec> {
        if !self.zeta.is_empty() || !self.mu.is_empty() {
            return Err(Error::Invalid(
                "one-matrix specs take only N, xi and eta".into(),
            ));
        }
        OneMatrixSpec::new(self.n, to_complex(&self.xi), to_complex(&self.eta))
    }
}

/// Either a file path or inline JSON (anything starting with `{`).
pub fn read_spec_source(source: &str) -> Result<String> {
    if source.trim_start().starts_with('{') {
        Ok(source.to_string())
    } else {
        read(source)
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("spec JSON: {e}")))
}

fn list_json(v: &[Complex]) -> Value {
    Value::Array(v.iter().map(|&z| complex_json(z)).collect())
}

pub fn integrand_spec_json(spec: &IntegrandSpec) -> Value {
    json!({
        "N": spec.n_pairs,
        "xi": list_json(&spec.xi),
        "zeta": list_json(&spec.zeta),
        "eta": list_json(&spec.eta),
        "mu": list_json(&spec.mu),
    })
}

pub fn one_matrix_spec_json(spec: &OneMatrixSpec) -> Value {
    json!({
        "N": spec.n,
        "xi": list_json(&spec.xi),
        "eta": list_json(&spec.eta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn parses_bimeasure() {
        let text = r#"{"type":"discrete_bimeasure","x_nodes":[1,-1],"y_nodes":[[1,0],[-1,0]],
            "weights":[[0.375,0.125],[0.125,0.375]]}"#;
        let LoadedMeasure::Two(m) = parse_measure(text).unwrap() else {
            panic!("expected a bimeasure")
        };
        assert_eq!(m, catalog::coupled_sign(0.5));
    }

    #[test]
    fn parses_measures_and_quadratures() {
        let text = r#"{"type":"discrete_measure","nodes":[1,-1],"weights":[0.5,0.5]}"#;
        assert_eq!(
            parse_measure(text).unwrap(),
            LoadedMeasure::One(catalog::two_point())
        );
        let text = r#"{"type":"quadrature","weight":"one","interval":[-1,1],"n_nodes":8}"#;
        assert_eq!(
            parse_measure(text).unwrap(),
            LoadedMeasure::One(catalog::legendre(8))
        );
        let text = r#"{"type":"quadrature","weight":"exp_xy","interval":[-1,1],"n_nodes":3}"#;
        let LoadedMeasure::Two(m) = parse_measure(text).unwrap() else {
            panic!("expected a bimeasure")
        };
        assert_eq!(m.support_size(), 9);
    }

    #[test]
    fn rejects_bad_measures() {
        assert!(
            parse_measure(r#"{"type":"discrete_measure","nodes":[1,1],"weights":[1,1]}"#).is_err()
        );
        assert!(parse_measure(r#"{"type":"nope"}"#).is_err());
        assert!(load_measure("builtin:unknown").is_err());
        assert!(load_measure("/nonexistent/measure.json").is_err());
    }

    #[test]
    fn spec_round_trip() {
        let s = parse_spec(r#"{"N":2,"xi":[[1,1]],"zeta":[2],"eta":[[0,3]],"mu":[[-2,0]]}"#)
            .unwrap()
            .two()
            .unwrap();
        assert_eq!(s.xi, vec![c(1.0, 1.0)]);
        assert_eq!(s.zeta, vec![c(2.0, 0.0)]);
        let v = integrand_spec_json(&s);
        let back = parse_spec(&v.to_string()).unwrap().two().unwrap();
        assert_eq!(back, s);

        let one = parse_spec(r#"{"N":1,"eta":[3]}"#).unwrap();
        assert_eq!(one.one().unwrap().eta, vec![c(3.0, 0.0)]);
        assert!(parse_spec(r#"{"N":1,"mu":[3]}"#).unwrap().one().is_err());
        assert!(parse_spec(r#"{"N":1,"bogus":[]}"#).is_err());
        assert_eq!(read_spec_source(" {\"N\":1}").unwrap(), " {\"N\":1}");
    }
}
