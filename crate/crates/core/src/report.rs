//! Deterministic JSON and text reports.
//!
//! Floats are written as `%.12e` (`1.234567890123e-05`); non-finite values
//! become `null`. Keys appear in declaration order, so a report parsed back
//! into these types and re-serialized is byte-identical.

use std::fmt::{self, Write as _};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::co1::Residuals;
use crate::decomp::{ComponentNorm, DecompositionReport, DimensionTable, Param, SubmoduleId};
use crate::Result;

/// A float serialized in fixed scientific notation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

/// `%.12e` as in C: twelve fractional digits, signed exponent of at least two digits.
pub fn format_sci(x: f64) -> String {
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format_sci(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Sci {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Sci(Option::<f64>::deserialize(deserializer)?.unwrap_or(f64::NAN)))
    }
}

impl fmt::Display for Sci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_sci(self.0))
    }
}

fn sci_vec(v: &[f64]) -> Vec<Sci> {
    v.iter().copied().map(Sci).collect()
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub nabla_R: Sci,
    pub nabla_T: Sci,
    pub nabla_xi: Sci,
    pub nabla_g_D: Sci,
    pub torsion_D: Sci,
    pub frobenius: Sci,
}

impl From<&Residuals> for ResidualsJson {
    fn from(r: &Residuals) -> Self {
        Self {
            nabla_R: Sci(r.nabla_curvature),
            nabla_T: Sci(r.nabla_torsion),
            nabla_xi: Sci(r.nabla_xi),
            nabla_g_D: Sci(r.nabla_metric_d),
            torsion_D: Sci(r.torsion_d),
            frobenius: Sci(r.frobenius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamJson {
    Scalar(Sci),
    Vector(Vec<Sci>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub id: SubmoduleId,
    pub norm: Sci,
    pub param: Option<ParamJson>,
}

impl From<&ComponentNorm> for ComponentJson {
    fn from(c: &ComponentNorm) -> Self {
        Self {
            id: c.id,
            norm: Sci(c.norm),
            param: c.param.as_ref().map(|p| match p {
                Param::Scalar(v) => ParamJson::Scalar(Sci(*v)),
                Param::Vector(v) => ParamJson::Vector(sci_vec(v)),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub coords: Vec<Sci>,
    pub residuals: Option<ResidualsJson>,
    pub classification: Vec<ComponentJson>,
}

impl PointJson {
    pub fn verified(coords: &[f64], residuals: &Residuals) -> Self {
        Self {
            coords: sci_vec(coords),
            residuals: Some(residuals.into()),
            classification: Vec::new(),
        }
    }

    /// Every fine component when `all` is set, otherwise only those present.
    pub fn classified(coords: &[f64], report: &DecompositionReport, all: bool) -> Self {
        let classification = if all {
            report.components.iter().map(ComponentJson::from).collect()
        } else {
            report.present().into_iter().map(ComponentJson::from).collect()
        };
        Self {
            coords: sci_vec(coords),
            residuals: None,
            classification,
        }
    }
}

/// Report of the `verify`, `decompose` and `classify` commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub command: String,
    pub example: String,
    pub n: usize,
    pub tolerance: Sci,
    pub points: Vec<PointJson>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimJson {
    pub id: SubmoduleId,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimsReport {
    pub command: String,
    pub n: usize,
    pub modules: Vec<DimJson>,
    pub total: usize,
    pub pass: bool,
}

impl DimsReport {
    pub fn new(table: &DimensionTable) -> Self {
        use SubmoduleId::*;
        let order = [T, T1, T2, T3, II, II1, II2, II3, Z, Z1, Z2, Z3, SU1];
        let modules = order.iter().map(|&id| DimJson { id, dim: table.get(id) }).collect();
        Self {
            command: "dims".into(),
            n: table.n,
            modules,
            total: table.total,
            pass: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSample {
    pub t: Sci,
    /// Largest `|canonical − direct|` over all slot combinations.
    pub max_difference: Sci,
    pub shape_eigenvalues: Vec<Sci>,
    pub expected_eigenvalue: Sci,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalReport {
    pub command: String,
    pub example: String,
    pub n: usize,
    pub tolerance: Sci,
    pub samples: Vec<CanonicalSample>,
    pub pass: bool,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

/// Parses a report and serializes it again.
pub fn reserialize<T: Serialize + DeserializeOwned>(json: &str) -> Result<String> {
    let parsed: T = serde_json::from_str(json)?;
    to_json(&parsed)
}

pub fn point_report_text(r: &PointReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} (n = {}, tol = {})", r.command, r.example, r.n, r.tolerance);
    for p in &r.points {
        let coords: Vec<String> = p.coords.iter().map(|c| format!("{:.6}", c.0)).collect();
        let _ = writeln!(out, "  at ({})", coords.join(", "));
        if let Some(res) = &p.residuals {
            let _ = writeln!(
                out,
                "    nabla_R {}  nabla_T {}  nabla_xi {}  nabla_g_D {}  torsion_D {}  frobenius {}",
                res.nabla_R, res.nabla_T, res.nabla_xi, res.nabla_g_D, res.torsion_D, res.frobenius
            );
        }
        if p.residuals.is_none() && p.classification.is_empty() {
            let _ = writeln!(out, "    (no components)");
        }
        for c in &p.classification {
            let param = match &c.param {
                None => String::new(),
                Some(ParamJson::Scalar(v)) => format!("  param {v}"),
                Some(ParamJson::Vector(v)) => {
                    let items: Vec<String> = v.iter().map(|x| format!("{:.6}", x.0)).collect();
                    format!("  param [{}]", items.join(", "))
                }
            };
            let _ = writeln!(out, "    {:<4} norm {}{param}", c.id.as_str(), c.norm);
        }
    }
    let _ = writeln!(out, "{}", if r.pass { "PASS" } else { "FAIL" });
    out
}

pub fn dims_report_text(r: &DimsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "submodule dimensions for n = {}", r.n);
    for m in &r.modules {
        let indent = if m.id.is_fine() && m.id != SubmoduleId::SU1 { "    " } else { "  " };
        let _ = writeln!(out, "{indent}{:<4} {}", m.id.as_str(), m.dim);
    }
    let _ = writeln!(out, "  total {}", r.total);
    out
}

pub fn canonical_report_text(r: &CanonicalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "canonical {} (n = {}, tol = {})", r.example, r.n, r.tolerance);
    for s in &r.samples {
        let eig: Vec<String> = s.shape_eigenvalues.iter().map(|x| format!("{:.9}", x.0)).collect();
        let _ = writeln!(
            out,
            "  t = {:>8.4}  max |canonical - direct| {}  shape eigenvalues [{}] (expected {:.9})",
            s.t.0,
            s.max_difference,
            eig.join(", "),
            s.expected_eigenvalue.0
        );
    }
    let _ = writeln!(out, "{}", if r.pass { "PASS" } else { "FAIL" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_sci(1.0), "1.000000000000e+00");
        assert_eq!(format_sci(-2.5e-7), "-2.500000000000e-07");
        assert_eq!(format_sci(0.0), "0.000000000000e+00");
        assert_eq!(format_sci(6.02e123), "6.020000000000e+123");
    }

    #[test]
    fn non_finite_is_null_and_round_trips() {
        let v = vec![Sci(f64::NAN), Sci(1.0 / 3.0)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[null,3.333333333333e-01]");
        let back: Vec<Sci> = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
