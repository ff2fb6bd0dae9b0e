//! Certification of finished line-bundle collections by exact cohomology.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize, Serializer};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lattice::{determinant, IntMatrix};
use crate::mutation::{Collection, Engine, MutationError};
use crate::oracle::{DiskCache, HVector, Oracle, OracleError};
use crate::toric::{BlowUp, BundleSpec, CenterSpec, FanError, PicClass};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("object {index} is not a line bundle")]
    NonLineBundlePresent { index: usize },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Mutation(#[from] MutationError),
}

/// `entries[i][j] = Ext^*(object i, object j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtTable {
    pub entries: Vec<Vec<HVector>>,
}

impl ExtTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &HVector {
        &self.entries[i][j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Exceptional,
    Semiorthogonal,
    Strong,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub i: usize,
    pub j: usize,
    pub ext: HVector,
}

/// Serialized as a JSON integer when it fits in 64 bits, as a decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Determinant(pub BigInt);

impl Serialize for Determinant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Determinant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let parsed = match &v {
            serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
            serde_json::Value::String(s) => s.parse().ok(),
            _ => None,
        };
        parsed
            .map(Determinant)
            .ok_or_else(|| serde::de::Error::custom("bad determinant"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub exceptional: bool,
    pub semiorthogonal: bool,
    pub strong: bool,
    /// Upper triangular with unit diagonal and determinant `+-1`.
    pub gram_unimodular: bool,
    pub length_ok: bool,
    pub gram: Vec<Vec<i64>>,
    pub gram_determinant: Determinant,
    pub length_expected: usize,
    pub length_actual: usize,
    pub violations: Vec<Violation>,
    /// SHA-256 of the certified objects, as canonical JSON.
    pub provenance: String,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.exceptional
            && self.semiorthogonal
            && self.strong
            && self.gram_unimodular
            && self.length_ok
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("json value serializes")
    }
}

/// Ext table of a list of line bundle classes on the oracle's fan.
pub fn ext_table_classes(oracle: &Oracle, classes: &[PicClass]) -> Result<ExtTable, VerifyError> {
    let entries = classes
        .iter()
        .map(|a| {
            classes
                .iter()
                .map(|b| oracle.ext(a, b))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExtTable { entries })
}

fn line_classes(col: &Collection) -> Result<Vec<PicClass>, VerifyError> {
    col.objects
        .iter()
        .enumerate()
        .map(|(index, o)| o.class().ok_or(VerifyError::NonLineBundlePresent { index }))
        .collect()
}

/// Ext table of a collection of line bundles on its blow-up.
pub fn ext_table(oracle: &Oracle, col: &Collection) -> Result<ExtTable, VerifyError> {
    ext_table_classes(oracle, &line_classes(col)?)
}

/// `(s+1)(r+1) + (c-1)(s'+1)(r'+1)`.
pub fn expected_length(spec: &BundleSpec, center: &CenterSpec) -> Result<usize, VerifyError> {
    Ok(BlowUp::new(spec, center)?.expected_length())
}

fn provenance(classes: &[PicClass]) -> String {
    let coords: Vec<&Vec<i64>> = classes.iter().map(|c| &c.coords).collect();
    let text = serde_json::to_string(&coords).expect("coords serialize");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Checks exceptionality, semiorthogonality, strongness, the Euler-Gram
/// condition and the length of a list of line bundles.
pub fn certify_classes(
    oracle: &Oracle,
    classes: &[PicClass],
    expected_length: usize,
) -> Result<Report, VerifyError> {
    let table = ext_table_classes(oracle, classes)?;
    Ok(certify_table(&table, classes, expected_length))
}

pub fn certify_table(table: &ExtTable, classes: &[PicClass], expected_length: usize) -> Report {
    let n = table.len();
    let mut violations = Vec::new();
    let mut gram = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let h = table.get(i, j);
            gram[i][j] = h.euler();
            let kind = if i == j {
                let len = h.len();
                (*h != HVector::unit(len, 0)).then_some(ViolationKind::Exceptional)
            } else if i > j {
                (!h.is_zero()).then_some(ViolationKind::Semiorthogonal)
            } else {
                (!h.is_acyclic()).then_some(ViolationKind::Strong)
            };
            if let Some(kind) = kind {
                violations.push(Violation {
                    kind,
                    i,
                    j,
                    ext: h.clone(),
                });
            }
        }
    }
    let det = if n == 0 {
        BigInt::one()
    } else {
        determinant(&IntMatrix::from_rows(&gram))
    };
    let triangular = (0..n).all(|i| gram[i][i] == 1 && (0..i).all(|j| gram[i][j] == 0));
    let has = |k: ViolationKind| violations.iter().any(|v| v.kind == k);
    Report {
        exceptional: !has(ViolationKind::Exceptional),
        semiorthogonal: !has(ViolationKind::Semiorthogonal),
        strong: !has(ViolationKind::Strong),
        gram_unimodular: triangular && det.abs().is_one(),
        length_ok: n == expected_length,
        gram,
        gram_determinant: Determinant(det),
        length_expected: expected_length,
        length_actual: n,
        violations,
        provenance: provenance(classes),
    }
}

/// Certifies a finished collection against its own blow-up.
pub fn certify(
    oracle: &Oracle,
    col: &Collection,
    expected_length: usize,
) -> Result<Report, VerifyError> {
    certify_classes(oracle, &line_classes(col)?, expected_length)
}

/// Rebuilds the blow-up named in the collection and certifies it.
pub fn certify_collection(
    col: &Collection,
    cache: Option<DiskCache>,
) -> Result<Report, VerifyError> {
    let engine = Engine::for_collection(col, cache)?;
    let expected = engine.blow.expected_length();
    certify(&engine.oracle, col, expected)
}

/// The first adjacent pair with a nonzero forward Hom, swapped. Used as a
/// negative control: the result must fail certification.
pub fn swap_first_dependent_pair(
    oracle: &Oracle,
    col: &Collection,
) -> Result<Option<Collection>, VerifyError> {
    let classes = line_classes(col)?;
    for i in 0..classes.len().saturating_sub(1) {
        if !oracle.ext(&classes[i], &classes[i + 1])?.is_zero() {
            let mut out = col.clone();
            out.objects.swap(i, i + 1);
            return Ok(Some(out));
        }
    }
    Ok(None)
}
