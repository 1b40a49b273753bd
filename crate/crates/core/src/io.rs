//! JSON and CSV formats.
//!
//! Matrices are written as `{"rows": r, "cols": c, "data": [...]}` with the
//! data in row-major order; nested row arrays (`[[-0.1]]`) are accepted on
//! input. Models are `{"domain": ..., "A": .., "B": .., "C": .., "D": ..}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::design::DesignSpec;
use crate::error::{Error, Result};
use crate::pattern::DecimationPattern;
use crate::statespace::{Domain, StateSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRepr {
    Shaped { rows: usize, cols: usize, data: Vec<f64> },
    Nested(Vec<Vec<f64>>),
}

impl MatrixRepr {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let data = (0..m.nrows()).flat_map(|i| m.row(i).iter().copied().collect::<Vec<_>>()).collect();
        MatrixRepr::Shaped { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        match self {
            MatrixRepr::Shaped { rows, cols, data } => {
                if data.len() != rows * cols {
                    return Err(Error::InvalidSpec(format!(
                        "matrix declares {rows}x{cols} but holds {} values",
                        data.len()
                    )));
                }
                Ok(DMatrix::from_row_slice(*rows, *cols, data))
            }
            MatrixRepr::Nested(rows) => {
                let cols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != cols) {
                    return Err(Error::InvalidSpec("ragged matrix rows".into()));
                }
                let data: Vec<f64> = rows.iter().flatten().copied().collect();
                Ok(DMatrix::from_row_slice(rows.len(), cols, &data))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRepr {
    #[serde(default = "continuous", deserialize_with = "lenient_domain")]
    pub domain: Domain,
    #[serde(rename = "A")]
    pub a: MatrixRepr,
    #[serde(rename = "B")]
    pub b: MatrixRepr,
    #[serde(rename = "C")]
    pub c: MatrixRepr,
    #[serde(rename = "D")]
    pub d: MatrixRepr,
}

fn continuous() -> Domain {
    Domain::Continuous
}

/// Also accepts a bare `"discrete"`, meaning a unit sampling period.
fn lenient_domain<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Domain, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Full(Domain),
        Bare(String),
    }
    match Repr::deserialize(de)? {
        Repr::Full(d) => Ok(d),
        Repr::Bare(s) if s == "discrete" => Ok(Domain::Discrete { period: 1.0 }),
        Repr::Bare(s) => Err(serde::de::Error::custom(format!("unknown domain {s:?}"))),
    }
}

impl ModelRepr {
    pub fn from_model(g: &StateSpace) -> Self {
        Self {
            domain: g.domain,
            a: MatrixRepr::from_matrix(&g.a),
            b: MatrixRepr::from_matrix(&g.b),
            c: MatrixRepr::from_matrix(&g.c),
            d: MatrixRepr::from_matrix(&g.d),
        }
    }

    pub fn to_model(&self) -> Result<StateSpace> {
        let a = self.a.to_matrix()?;
        let b = self.b.to_matrix()?;
        let c = self.c.to_matrix()?;
        let d = self.d.to_matrix()?;
        // Nested arrays cannot express zero-state shapes; infer them from D.
        let nx = a.nrows();
        let b = if nx == 0 && b.is_empty() { DMatrix::zeros(0, d.ncols()) } else { b };
        let c = if nx == 0 && c.is_empty() { DMatrix::zeros(d.nrows(), 0) } else { c };
        StateSpace::new(a, b, c, d, self.domain)
    }
}

/// `#[serde(with = "...")]` adapter for [`StateSpace`] fields.
pub mod model_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(g: &StateSpace, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelRepr::from_model(g).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<StateSpace, D::Error> {
        ModelRepr::deserialize(d)?.to_model().map_err(serde::de::Error::custom)
    }
}

impl Serialize for StateSpace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        model_serde::serialize(self, s)
    }
}

impl<'de> Deserialize<'de> for StateSpace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        model_serde::deserialize(d)
    }
}

/// Design problem file; every field may be left out and filled in from
/// command-line flags or defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<DecimationPattern>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<ModelRepr>,
}

impl SpecFile {
    pub fn from_spec(spec: &DesignSpec) -> Self {
        Self {
            pattern: Some(spec.pattern.clone()),
            h: Some(spec.h),
            m: Some(spec.m),
            n: Some(spec.n),
            f: Some(ModelRepr::from_model(&spec.f)),
        }
    }

    /// Complete specification; all fields must be present.
    pub fn to_spec(&self) -> Result<DesignSpec> {
        let missing = |f: &str| Error::InvalidSpec(format!("missing field {f:?}"));
        let f = self.f.as_ref().ok_or_else(|| missing("F"))?.to_model()?;
        DesignSpec::new(
            self.pattern.clone().ok_or_else(|| missing("pattern"))?,
            self.h.ok_or_else(|| missing("h"))?,
            self.m.ok_or_else(|| missing("m"))?,
            self.n.ok_or_else(|| missing("n"))?,
            f,
        )
    }
}

pub fn parse_spec(json: &str) -> Result<DesignSpec> {
    let file: SpecFile = serde_json::from_str(json).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    file.to_spec()
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with every float written by [`fmt_f64`]; non-finite values
/// become `null`.
pub fn to_json_pretty<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    struct Exact<'a>(serde_json::ser::PrettyFormatter<'a>);

    macro_rules! forward {
        ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {$(
            fn $name<W: ?Sized + std::io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*};
    }

    impl serde_json::ser::Formatter for Exact<'_> {
        fn write_f64<W: ?Sized + std::io::Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
            if v.is_finite() {
                w.write_all(fmt_f64(v).as_bytes())
            } else {
                w.write_all(b"null")
            }
        }
        forward!(
            begin_array(),
            end_array(),
            begin_array_value(first: bool),
            end_array_value(),
            begin_object(),
            end_object(),
            begin_object_key(first: bool),
            begin_object_value(),
            end_object_value(),
        );
    }

    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Exact(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Reads a single-column CSV of samples. Blank lines, `#` comments and a
/// non-numeric header line are skipped.
pub fn read_signal_csv(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        // a non-numeric line before any data is taken as a header
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let field = t.split(',').next().unwrap_or("").trim();
        match field.parse::<f64>() {
            Ok(v) => out.push(v),
            Err(_) if out.is_empty() => continue,
            Err(_) => return Err(Error::InvalidSpec(format!("line {}: not a number: {field:?}", lineno + 1))),
        }
    }
    Ok(out)
}

pub fn write_signal_csv(x: &[f64]) -> String {
    let mut s = String::new();
    for v in x {
        s.push_str(&fmt_f64(*v));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_spec_literal() {
        let json = r#"{"pattern": "1100", "h": 1.0, "m": 4, "n": 4,
            "F": {"A": [[-0.1]], "B": [[1.0]], "C": [[0.1]], "D": [[0.0]]}}"#;
        let spec = parse_spec(json).unwrap();
        assert_eq!(spec.pattern.to_string(), "1100");
        assert_eq!((spec.m, spec.n), (4, 4));
        assert_eq!(spec.f.a[(0, 0)], -0.1);
        assert!(!spec.f.is_discrete());
    }

    #[test]
    fn malformed_json_is_an_invalid_spec() {
        assert!(matches!(parse_spec("{\"pattern\": "), Err(Error::InvalidSpec(_))));
        assert!(matches!(parse_spec("{\"pattern\": \"000\"}"), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn model_round_trip_is_exact() {
        let g = StateSpace::discrete(
            DMatrix::from_row_slice(2, 2, &[0.1, 1.0 / 3.0, -2.5e-7, 0.9]),
            DMatrix::from_row_slice(2, 1, &[1.0, std::f64::consts::PI]),
            DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
            DMatrix::from_row_slice(3, 1, &[0.0, 1e-300, -7.0]),
            0.25,
        )
        .unwrap();
        let json = serde_json::to_string(&g).unwrap();
        let back: StateSpace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        let gain = StateSpace::gain(DMatrix::from_element(2, 3, 0.5), Domain::Discrete { period: 1.0 });
        let back: StateSpace = serde_json::from_str(&serde_json::to_string(&gain).unwrap()).unwrap();
        assert_eq!(back, gain);
    }

    #[test]
    fn json_floats_carry_17_digits_and_round_trip() {
        let values = vec![0.1, -1.0 / 3.0, 6.02e23, 5e-324, 0.0, f64::NAN];
        let text = to_json_pretty(&values).unwrap();
        assert!(text.contains("1.0000000000000001e-1"), "{text}");
        assert!(text.contains("null"));
        let back: Vec<Option<f64>> = serde_json::from_str(&text).unwrap();
        for (a, b) in values.iter().zip(&back) {
            match b {
                Some(b) => assert_eq!(a.to_bits(), b.to_bits()),
                None => assert!(a.is_nan()),
            }
        }
    }

    #[test]
    fn signal_csv() {
        let x = read_signal_csv("# note\nx\n1.5\n-2\n\n3e-1\n").unwrap();
        assert_eq!(x, vec![1.5, -2.0, 0.3]);
        assert_eq!(read_signal_csv(&write_signal_csv(&x)).unwrap(), x);
        assert!(read_signal_csv("1\nabc\n").is_err());
    }
}
