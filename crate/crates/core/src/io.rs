//! JSON file formats. Indices in files are 1-based.
//!
//! ```json
//! {"group": {"kind": "rplus"}, "n": 3,
//!  "entries": [{"i": 1, "j": 2, "v": 2.0}, {"i": 1, "j": 3, "v": 4.0}, {"i": 2, "j": 3, "v": 2.0}]}
//! ```
//!
//! Elements are written as `{"kind": "rplus", "value": x}`,
//! `{"kind": "gl", "m": rows}`, `{"kind": "se2", "r": rows, "t": [..]}`
//! (or `"angle"` instead of `"r"`), `{"kind": "se3", "r": rows, "t": [..]}`
//! and `{"kind": "product", "parts": [..]}`. A bare number is accepted for
//! a positive real.

use std::path::Path;

use nalgebra::{DMatrix, SMatrix, SVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::distance::DistanceMatrix;
use crate::error::Error;
use crate::gauge::{GaugeVector, PhiDecomposition};
use crate::graph::GraphPCMatrix;
use crate::group::{GroupElement, GroupKind, GroupSpec, Rigid};
use crate::inconsistency::IndicatorReport;
use crate::matrix::{upper_pairs, PCMatrix, WeightVector};
use crate::stochastic::{EntryMeasure, MCEstimate, ProductMeasure};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid content: {0}")]
    Invalid(String),
}

impl From<Error> for FormatError {
    fn from(e: Error) -> Self {
        FormatError::Invalid(e.to_string())
    }
}

pub type FormatResult<T> = std::result::Result<T, FormatError>;

fn invalid<T>(msg: impl Into<String>) -> FormatResult<T> {
    Err(FormatError::Invalid(msg.into()))
}

pub fn read_json(path: &Path) -> FormatResult<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FormatError::Io { path: path.display().to_string(), message: e.to_string() })?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum KindJson {
    Rplus,
    Gl { n: usize },
    Se2,
    Se3,
    Product { factors: Vec<KindJson> },
}

impl KindJson {
    fn to_kind(&self) -> FormatResult<GroupKind> {
        Ok(match self {
            KindJson::Rplus => GroupKind::RPlus,
            KindJson::Gl { n } if *n > 0 => GroupKind::GL(*n),
            KindJson::Gl { .. } => return invalid("GL dimension must be positive"),
            KindJson::Se2 => GroupKind::SE2,
            KindJson::Se3 => GroupKind::SE3,
            KindJson::Product { factors } => {
                GroupKind::Product(factors.iter().map(KindJson::to_kind).collect::<FormatResult<_>>()?)
            }
        })
    }

    fn from_kind(kind: &GroupKind) -> Self {
        match kind {
            GroupKind::RPlus => KindJson::Rplus,
            GroupKind::GL(n) => KindJson::Gl { n: *n },
            GroupKind::SE2 => KindJson::Se2,
            GroupKind::SE3 => KindJson::Se3,
            GroupKind::Product(parts) => KindJson::Product { factors: parts.iter().map(KindJson::from_kind).collect() },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SpecJson {
    #[serde(flatten)]
    kind: KindJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
}

pub fn spec_from_json(v: &Value) -> FormatResult<GroupSpec> {
    let s: SpecJson = serde_json::from_value(v.clone())?;
    let kind = s.kind.to_kind()?;
    Ok(match s.tolerance {
        Some(t) => GroupSpec::with_tolerance(kind, t)?,
        None => GroupSpec::new(kind)?,
    })
}

pub fn spec_to_json(spec: &GroupSpec) -> Value {
    serde_json::to_value(SpecJson { kind: KindJson::from_kind(spec.kind()), tolerance: Some(spec.tolerance()) })
        .expect("serializable")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum ElementJson {
    Scalar(f64),
    Tagged(TaggedElement),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TaggedElement {
    Rplus {
        value: f64,
    },
    Gl {
        m: Vec<Vec<f64>>,
    },
    Se2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angle: Option<f64>,
        t: Vec<f64>,
    },
    Se3 {
        r: Vec<Vec<f64>>,
        t: Vec<f64>,
    },
    Product {
        parts: Vec<ElementJson>,
    },
}

fn square(rows: &[Vec<f64>], n: usize) -> FormatResult<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return invalid(format!("expected a {n}x{n} matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn rigid<const D: usize>(r: &[Vec<f64>], t: &[f64]) -> FormatResult<Rigid<D>> {
    let m = square(r, D)?;
    if t.len() != D {
        return invalid(format!("translation must have {D} coordinates"));
    }
    Ok(Rigid { rotation: SMatrix::<f64, D, D>::from_fn(|i, j| m[(i, j)]), translation: SVector::from_column_slice(t) })
}

fn element_from(e: &ElementJson) -> FormatResult<GroupElement> {
    Ok(match e {
        ElementJson::Scalar(x) | ElementJson::Tagged(TaggedElement::Rplus { value: x }) => GroupElement::RPlus(*x),
        ElementJson::Tagged(TaggedElement::Gl { m }) => GroupElement::GL(square(m, m.len())?),
        ElementJson::Tagged(TaggedElement::Se2 { r, angle, t }) => match (r, angle) {
            (Some(r), None) => GroupElement::SE2(rigid::<2>(r, t)?),
            (None, Some(a)) if t.len() == 2 => GroupElement::se2(*a, [t[0], t[1]]),
            (None, Some(_)) => return invalid("translation must have 2 coordinates"),
            _ => return invalid("se2 element needs exactly one of \"r\" and \"angle\""),
        },
        ElementJson::Tagged(TaggedElement::Se3 { r, t }) => GroupElement::SE3(rigid::<3>(r, t)?),
        ElementJson::Tagged(TaggedElement::Product { parts }) => {
            GroupElement::Product(parts.iter().map(element_from).collect::<FormatResult<_>>()?)
        }
    })
}

fn element_json(g: &GroupElement) -> ElementJson {
    ElementJson::Tagged(match g {
        GroupElement::RPlus(x) => TaggedElement::Rplus { value: *x },
        GroupElement::GL(m) => TaggedElement::Gl { m: rows_of(m) },
        GroupElement::SE2(r) => TaggedElement::Se2 {
            r: Some(r.rotation.row_iter().map(|row| row.iter().copied().collect()).collect()),
            angle: None,
            t: r.translation.iter().copied().collect(),
        },
        GroupElement::SE3(r) => TaggedElement::Se3 {
            r: r.rotation.row_iter().map(|row| row.iter().copied().collect()).collect(),
            t: r.translation.iter().copied().collect(),
        },
        GroupElement::Product(parts) => TaggedElement::Product { parts: parts.iter().map(element_json).collect() },
    })
}

/// Parses an element and validates it against `spec`.
pub fn element_from_json(spec: &GroupSpec, v: &Value) -> FormatResult<GroupElement> {
    let g = element_from(&serde_json::from_value(v.clone())?)?;
    spec.validate(&g)?;
    Ok(g)
}

pub fn element_to_json(g: &GroupElement) -> Value {
    serde_json::to_value(element_json(g)).expect("serializable")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct EntryJson {
    i: usize,
    j: usize,
    v: Value,
}

fn entry_to_json(i: usize, j: usize, g: &GroupElement) -> Value {
    json!({"i": i + 1, "j": j + 1, "v": element_to_json(g)})
}

/// Converts 1-based `(i, j)` to 0-based, checking the range.
fn zero_based(e: &EntryJson, n: usize) -> FormatResult<(usize, usize)> {
    if e.i == 0 || e.j == 0 || e.i > n || e.j > n || e.i == e.j {
        return invalid(format!("entry ({}, {}) is not an off-diagonal index pair of a {n}x{n} matrix", e.i, e.j));
    }
    Ok((e.i - 1, e.j - 1))
}

#[derive(Clone, Debug, Deserialize)]
struct MatrixFile {
    group: Value,
    n: usize,
    entries: Vec<EntryJson>,
}

/// Every unordered pair must appear exactly once; a pair given as `(j, i)`
/// with `j > i` stores the inverse above the diagonal.
pub fn pc_matrix_from_json(v: &Value) -> FormatResult<PCMatrix> {
    let f: MatrixFile = serde_json::from_value(v.clone())?;
    let spec = spec_from_json(&f.group)?;
    if f.n < 2 {
        return invalid("n must be at least 2");
    }
    let mut a = PCMatrix::identity(spec.clone(), f.n)?;
    let mut seen = vec![false; f.n * f.n];
    for e in &f.entries {
        let (i, j) = zero_based(e, f.n)?;
        let (lo, hi) = (i.min(j), i.max(j));
        if std::mem::replace(&mut seen[lo * f.n + hi], true) {
            return invalid(format!("pair ({}, {}) given twice", lo + 1, hi + 1));
        }
        a.set(i, j, element_from_json(&spec, &e.v)?)?;
    }
    if let Some((i, j)) = upper_pairs(f.n).find(|&(i, j)| !seen[i * f.n + j]) {
        return invalid(format!("missing entry ({}, {})", i + 1, j + 1));
    }
    Ok(a)
}

pub fn pc_matrix_to_json(a: &PCMatrix) -> Value {
    let entries: Vec<Value> = upper_pairs(a.n()).map(|(i, j)| entry_to_json(i, j, a.upper(i, j))).collect();
    json!({"group": spec_to_json(a.spec()), "n": a.n(), "entries": entries})
}

#[derive(Clone, Debug, Deserialize)]
struct GraphFile {
    group: Value,
    n: usize,
    edges: Vec<EntryJson>,
}

pub fn graph_from_json(v: &Value) -> FormatResult<GraphPCMatrix> {
    let f: GraphFile = serde_json::from_value(v.clone())?;
    let spec = spec_from_json(&f.group)?;
    let edges = f
        .edges
        .iter()
        .map(|e| {
            let (i, j) = zero_based(e, f.n)?;
            Ok((i, j, element_from_json(&spec, &e.v)?))
        })
        .collect::<FormatResult<Vec<_>>>()?;
    Ok(GraphPCMatrix::new(spec, f.n, edges)?)
}

pub fn graph_to_json(a: &GraphPCMatrix) -> Value {
    let edges: Vec<Value> = a.edges().map(|(i, j, g)| entry_to_json(i, j, g)).collect();
    json!({"group": spec_to_json(a.spec()), "n": a.n(), "edges": edges})
}

/// A file holding either a full matrix (`"entries"`) or a graph (`"edges"`).
pub enum ComparisonInput {
    Matrix(PCMatrix),
    Graph(GraphPCMatrix),
}

pub fn comparison_from_json(v: &Value) -> FormatResult<ComparisonInput> {
    match (v.get("entries"), v.get("edges")) {
        (Some(_), None) => Ok(ComparisonInput::Matrix(pc_matrix_from_json(v)?)),
        (None, Some(_)) => Ok(ComparisonInput::Graph(graph_from_json(v)?)),
        _ => invalid("expected exactly one of \"entries\" and \"edges\""),
    }
}

fn elements_to_json(items: &[GroupElement]) -> Vec<Value> {
    items.iter().map(element_to_json).collect()
}

pub fn gauge_to_json(g: &GaugeVector) -> Value {
    json!({"group": spec_to_json(g.spec()), "entries": elements_to_json(g.entries())})
}

pub fn weights_to_json(w: &WeightVector) -> Value {
    json!({"group": spec_to_json(w.spec()), "entries": elements_to_json(w.entries())})
}

pub fn gauge_from_json(v: &Value) -> FormatResult<GaugeVector> {
    #[derive(Deserialize)]
    struct GaugeFile {
        group: Value,
        entries: Vec<Value>,
    }
    let f: GaugeFile = serde_json::from_value(v.clone())?;
    let spec = spec_from_json(&f.group)?;
    let entries = f.entries.iter().map(|e| element_from_json(&spec, e)).collect::<FormatResult<_>>()?;
    Ok(GaugeVector::new(spec, entries)?)
}

pub fn phi_to_json(d: &PhiDecomposition) -> Value {
    let components: Vec<Value> = d.components.iter().map(|((i, j), c)| entry_to_json(*i, *j, c)).collect();
    json!({"consistent": pc_matrix_to_json(&d.consistent), "components": components})
}

pub fn phi_from_json(v: &Value) -> FormatResult<PhiDecomposition> {
    #[derive(Deserialize)]
    struct PhiFile {
        consistent: Value,
        components: Vec<EntryJson>,
    }
    let f: PhiFile = serde_json::from_value(v.clone())?;
    let consistent = pc_matrix_from_json(&f.consistent)?;
    let spec = consistent.spec().clone();
    let components = f
        .components
        .iter()
        .map(|e| Ok((zero_based(e, consistent.n())?, element_from_json(&spec, &e.v)?)))
        .collect::<FormatResult<_>>()?;
    Ok(PhiDecomposition { consistent, components })
}

pub fn indicator_report_to_json(r: &IndicatorReport) -> Value {
    match &r.worst_triad {
        Some(t) => {
            let (i, j, k) = t.indices;
            json!({"value": r.value, "worst_triad": [i + 1, j + 1, k + 1], "defect": element_to_json(&t.defect)})
        }
        None => json!({"value": r.value}),
    }
}

pub fn distance_from_json(v: &Value) -> FormatResult<DistanceMatrix> {
    #[derive(Deserialize)]
    struct DistanceFile {
        n: usize,
        k: Vec<Vec<f64>>,
    }
    let f: DistanceFile = serde_json::from_value(v.clone())?;
    Ok(DistanceMatrix::new(square(&f.k, f.n)?)?)
}

pub fn distance_to_json(k: &DistanceMatrix) -> Value {
    json!({"n": k.n(), "k": rows_of(k.as_matrix())})
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MeasureJson {
    Lognormal { sigma: f64 },
    UniformRotation { sigma_t: f64 },
    GaussianGl { n: usize, sigma: f64 },
}

impl From<&MeasureJson> for EntryMeasure {
    fn from(m: &MeasureJson) -> Self {
        match m {
            MeasureJson::Lognormal { sigma } => EntryMeasure::LogNormal { sigma: *sigma },
            MeasureJson::UniformRotation { sigma_t } => EntryMeasure::UniformRotation { sigma_t: *sigma_t },
            MeasureJson::GaussianGl { n, sigma } => EntryMeasure::MatrixGaussianGL { n: *n, sigma: *sigma },
        }
    }
}

/// `{"n": 3, "measure": {"kind": "lognormal", "sigma": 0.5}}` for a
/// homogeneous measure, or `"entries": [..]` with one measure per
/// upper-triangle entry in row-major order. Measure kinds are `lognormal`
/// (`sigma`), `uniform_rotation` (`sigma_t`) and `gaussian_gl` (`n`, `sigma`).
pub fn measure_from_json(v: &Value) -> FormatResult<ProductMeasure> {
    #[derive(Deserialize)]
    struct MeasureFile {
        n: usize,
        measure: Option<MeasureJson>,
        entries: Option<Vec<MeasureJson>>,
    }
    let f: MeasureFile = serde_json::from_value(v.clone())?;
    Ok(match (f.measure, f.entries) {
        (Some(m), None) => ProductMeasure::homogeneous(f.n, (&m).into())?,
        (None, Some(es)) => ProductMeasure::new(f.n, es.iter().map(EntryMeasure::from).collect())?,
        _ => return invalid("expected exactly one of \"measure\" and \"entries\""),
    })
}

pub fn estimate_to_json(e: &MCEstimate) -> Value {
    json!({"estimate": e.value, "stderr": e.stderr, "samples": e.samples, "ess": e.ess})
}
