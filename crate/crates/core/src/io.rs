//! JSON file formats, content hashes and CSV flattening.
//!
//! Writers print every real with 17 significant digits so that a
//! write/read round trip reproduces the same `f64`.

use nalgebra::DVector;
use serde::ser::Error as _;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hypomorphism::Hypomorphism;
use crate::matrix::SymmetricMatrix;
use crate::presentation::Presentation;
use crate::solid_angle::Cone;

/// `x` printed with 17 significant digits.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A real that serializes with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite value {}", self.0)));
        }
        RawValue::from_string(format_sig17(self.0))
            .map_err(S::Error::custom)?
            .serialize(s)
    }
}

fn sig_vec(v: impl IntoIterator<Item = f64>) -> Vec<Sig17> {
    v.into_iter().map(Sig17).collect()
}

#[derive(Serialize)]
struct MatrixOut {
    n: usize,
    entries: Vec<Vec<Sig17>>,
}

impl From<&SymmetricMatrix> for MatrixOut {
    fn from(m: &SymmetricMatrix) -> Self {
        Self {
            n: m.n(),
            entries: m.rows().into_iter().map(sig_vec).collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixIn {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl MatrixIn {
    fn into_matrix(self) -> Result<SymmetricMatrix> {
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.entries.len(),
            });
        }
        SymmetricMatrix::new(self.entries)
    }
}

pub fn matrix_to_json(m: &SymmetricMatrix) -> Result<String> {
    Ok(serde_json::to_string(&MatrixOut::from(m))?)
}

pub fn matrix_from_json(text: &str) -> Result<SymmetricMatrix> {
    serde_json::from_str::<MatrixIn>(text)?.into_matrix()
}

/// A matrix pair, optionally with a hypomorphism between them.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFile {
    pub a: SymmetricMatrix,
    pub b: SymmetricMatrix,
    pub sigma: Option<Hypomorphism>,
}

#[derive(Serialize)]
struct PairOut {
    #[serde(rename = "A")]
    a: MatrixOut,
    #[serde(rename = "B")]
    b: MatrixOut,
    sigma: Option<Vec<Vec<usize>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairIn {
    #[serde(rename = "A")]
    a: MatrixIn,
    #[serde(rename = "B")]
    b: MatrixIn,
    #[serde(default)]
    sigma: Option<Vec<Vec<usize>>>,
}

pub fn pair_to_json(pair: &PairFile) -> Result<String> {
    let out = PairOut {
        a: (&pair.a).into(),
        b: (&pair.b).into(),
        sigma: pair.sigma.as_ref().map(Hypomorphism::to_images),
    };
    Ok(serde_json::to_string(&out)?)
}

pub fn pair_from_json(text: &str) -> Result<PairFile> {
    let raw: PairIn = serde_json::from_str(text)?;
    let a = raw.a.into_matrix()?;
    let b = raw.b.into_matrix()?;
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let sigma = raw.sigma.map(Hypomorphism::from_images).transpose()?;
    if let Some(s) = &sigma {
        if s.n() != a.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                found: s.n(),
            });
        }
    }
    Ok(PairFile { a, b, sigma })
}

#[derive(Serialize)]
struct PresentationOut {
    n: usize,
    columns: Vec<Vec<Sig17>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentationIn {
    n: usize,
    columns: Vec<Vec<f64>>,
}

/// `columns` lists the vectors `u_1, …, u_n`.
pub fn presentation_to_json(u: &Presentation) -> Result<String> {
    let out = PresentationOut {
        n: u.n(),
        columns: u.columns().into_iter().map(sig_vec).collect(),
    };
    Ok(serde_json::to_string(&out)?)
}

pub fn presentation_from_json(text: &str) -> Result<Presentation> {
    let raw: PresentationIn = serde_json::from_str(text)?;
    if raw.columns.len() != raw.n {
        return Err(Error::DimensionMismatch {
            expected: raw.n,
            found: raw.columns.len(),
        });
    }
    Presentation::from_columns(&raw.columns)
}

#[derive(Serialize)]
struct ConeOut {
    apex: Vec<Sig17>,
    generators: Vec<Vec<Sig17>>,
    ambient_dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConeIn {
    apex: Vec<f64>,
    generators: Vec<Vec<f64>>,
    #[serde(default)]
    ambient_dim: Option<usize>,
}

/// `generators` are the edge directions `u_i - u`, not the points `u_i`.
pub fn cone_to_json(c: &Cone) -> Result<String> {
    let out = ConeOut {
        apex: sig_vec(c.apex().iter().copied()),
        generators: c
            .generators()
            .iter()
            .map(|g| sig_vec(g.iter().copied()))
            .collect(),
        ambient_dim: c.declared_ambient_dim(),
    };
    Ok(serde_json::to_string(&out)?)
}

pub fn cone_from_json(text: &str) -> Result<Cone> {
    let raw: ConeIn = serde_json::from_str(text)?;
    let finite = raw
        .apex
        .iter()
        .chain(raw.generators.iter().flatten())
        .all(|x| x.is_finite());
    if !finite {
        return Err(Error::InvalidInput("cone has non-finite coordinates".into()));
    }
    Cone::new(
        DVector::from_vec(raw.apex),
        raw.generators.into_iter().map(DVector::from_vec).collect(),
        raw.ambient_dim,
    )
}

/// Lowercase hex SHA-256 of raw bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of the canonical matrix JSON.
pub fn matrix_hash(m: &SymmetricMatrix) -> Result<String> {
    Ok(sha256_hex(matrix_to_json(m)?.as_bytes()))
}

/// SHA-256 of the canonical pair JSON (including `sigma`).
pub fn pair_hash(pair: &PairFile) -> Result<String> {
    Ok(sha256_hex(pair_to_json(pair)?.as_bytes()))
}

pub fn presentation_hash(u: &Presentation) -> Result<String> {
    Ok(sha256_hex(presentation_to_json(u)?.as_bytes()))
}

pub fn cone_hash(c: &Cone) -> Result<String> {
    Ok(sha256_hex(cone_to_json(c)?.as_bytes()))
}

/// Writes `rows` as CSV with a header taken from the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits UTF-8"))
}
