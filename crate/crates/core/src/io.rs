//! File formats: JSON for behaviors, expressions and certificates; CSV and
//! SVG for the slice geometry and scan reports.
//!
//! Scalars are JSON numbers for the float kind and exact-scalar strings
//! (`p/q[±r/t*s2]`) for the exact kind.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::certificates::{Gram, SosCertificate};
use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, NCPolynomial, QSqrt2};
use crate::linalg::Matrix;
use crate::optimize::FaceScanReport;
use crate::scenario::{AnyBehavior, AnyExpression, Behavior, BellExpression, QubitParams};
use crate::slice::PolygonVertex;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

trait JsonScalar: crate::scalar::Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_f64().ok_or_else(|| parse_err(format!("expected a number, found {v}")))
    }
}

impl JsonScalar for QSqrt2 {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_str()
            .ok_or_else(|| parse_err(format!("expected an exact-scalar string, found {v}")))?
            .parse()
    }
}

fn pair_json<T: JsonScalar>(x: &[T; 2]) -> Value {
    Value::Array(x.iter().map(T::to_json).collect())
}

fn matrix_json<T: JsonScalar>(x: &[[T; 2]; 2]) -> Value {
    Value::Array(x.iter().map(pair_json).collect())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(format!("missing field `{key}`")))
}

fn parse_pair<T: JsonScalar>(v: &Value) -> Result<[T; 2]> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok([T::from_json(a)?, T::from_json(b)?]),
        _ => Err(parse_err(format!("expected a 2-element array, found {v}"))),
    }
}

fn parse_matrix<T: JsonScalar>(v: &Value) -> Result<[[T; 2]; 2]> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => Ok([parse_pair(a)?, parse_pair(b)?]),
        _ => Err(parse_err(format!("expected a 2x2 array, found {v}"))),
    }
}

fn object<'a>(v: &'a Value, keys: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v.as_object().ok_or_else(|| parse_err("expected a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !keys.contains(&k.as_str())) {
        return Err(parse_err(format!("unknown field `{k}`")));
    }
    Ok(obj)
}

fn kind(obj: &Map<String, Value>) -> Result<bool> {
    match field(obj, "kind")?.as_str() {
        Some("exact") => Ok(true),
        Some("float") => Ok(false),
        _ => Err(parse_err("`kind` must be \"exact\" or \"float\"")),
    }
}

fn behavior_value<T: JsonScalar>(kind: &str, b: &Behavior<T>) -> Value {
    json!({"kind": kind, "mA": pair_json(&b.m_a), "mB": pair_json(&b.m_b), "K": matrix_json(&b.k)})
}

fn expression_value<T: JsonScalar>(kind: &str, e: &BellExpression<T>) -> Value {
    json!({"kind": kind, "a": pair_json(&e.a), "b": pair_json(&e.b), "c": matrix_json(&e.c)})
}

pub fn behavior_to_json(b: &AnyBehavior) -> Value {
    match b {
        AnyBehavior::Exact(b) => behavior_value("exact", b),
        AnyBehavior::Float(b) => behavior_value("float", b),
    }
}

pub fn behavior_from_json(v: &Value) -> Result<AnyBehavior> {
    fn typed<T: JsonScalar>(o: &Map<String, Value>) -> Result<Behavior<T>> {
        Ok(Behavior::new(parse_pair(field(o, "mA")?)?, parse_pair(field(o, "mB")?)?, parse_matrix(field(o, "K")?)?))
    }
    let o = object(v, &["kind", "mA", "mB", "K"])?;
    Ok(if kind(o)? { AnyBehavior::Exact(typed(o)?) } else { AnyBehavior::Float(typed(o)?) })
}

pub fn expression_to_json(e: &AnyExpression) -> Value {
    match e {
        AnyExpression::Exact(e) => expression_value("exact", e),
        AnyExpression::Float(e) => expression_value("float", e),
    }
}

pub fn expression_from_json(v: &Value) -> Result<AnyExpression> {
    fn typed<T: JsonScalar>(o: &Map<String, Value>) -> Result<BellExpression<T>> {
        Ok(BellExpression::new(parse_pair(field(o, "a")?)?, parse_pair(field(o, "b")?)?, parse_matrix(field(o, "c")?)?))
    }
    let o = object(v, &["kind", "a", "b", "c"])?;
    Ok(if kind(o)? { AnyExpression::Exact(typed(o)?) } else { AnyExpression::Float(typed(o)?) })
}

/// `{"labels", "basis", "W", "target"}`; `W` holds exact-scalar strings for an
/// exact Gram matrix and numbers otherwise.
pub fn certificate_to_json(c: &SosCertificate) -> Value {
    let w = match &c.gram {
        Gram::Exact(m) => Value::Array(
            m.to_rows().iter().map(|r| Value::Array(r.iter().map(QSqrt2::to_json).collect())).collect(),
        ),
        Gram::Float(m) => {
            Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(|x| json!(x)).collect())).collect())
        }
    };
    json!({
        "labels": c.labels,
        "basis": c.basis.iter().map(NCPolynomial::to_string).collect::<Vec<_>>(),
        "W": w,
        "target": expression_to_json(&c.target),
    })
}

pub fn certificate_from_json(v: &Value) -> Result<SosCertificate> {
    let o = object(v, &["labels", "basis", "W", "target"])?;
    let basis: Vec<NCPolynomial> = field(o, "basis")?
        .as_array()
        .ok_or_else(|| parse_err("`basis` must be an array"))?
        .iter()
        .map(|p| p.as_str().ok_or_else(|| parse_err("basis entries must be strings"))?.parse())
        .collect::<Result<_>>()?;
    let labels = match o.get("labels") {
        None => (0..basis.len()).map(|k| format!("n{k}")).collect(),
        Some(l) => l
            .as_array()
            .ok_or_else(|| parse_err("`labels` must be an array"))?
            .iter()
            .map(|s| s.as_str().map(str::to_owned).ok_or_else(|| parse_err("labels must be strings")))
            .collect::<Result<_>>()?,
    };
    let rows = field(o, "W")?.as_array().ok_or_else(|| parse_err("`W` must be an array of rows"))?;
    let rows: Vec<&Vec<Value>> =
        rows.iter().map(|r| r.as_array().ok_or_else(|| parse_err("`W` rows must be arrays"))).collect::<Result<_>>()?;
    let exact = rows.iter().flat_map(|r| r.iter()).next().is_some_and(Value::is_string);
    let gram = if exact {
        let m: Vec<Vec<QSqrt2>> =
            rows.iter().map(|r| r.iter().map(QSqrt2::from_json).collect::<Result<_>>()).collect::<Result<_>>()?;
        Gram::Exact(ExactMatrix::from_rows(m)?)
    } else {
        let m: Vec<Vec<f64>> =
            rows.iter().map(|r| r.iter().map(f64::from_json).collect::<Result<_>>()).collect::<Result<_>>()?;
        Gram::Float(Matrix::from_rows(&m)?)
    };
    let target = expression_from_json(field(o, "target")?)?;
    Ok(SosCertificate { labels, basis, gram, target })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values built from finite data");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))
}

/// Header `k,r0,r1`, exact coordinates.
pub fn octagon_csv(vertices: &[PolygonVertex<QSqrt2>]) -> String {
    let mut out = String::from("k,r0,r1\n");
    for (k, v) in vertices.iter().enumerate() {
        writeln!(out, "{k},{},{}", v.r0, v.r1).unwrap();
    }
    out
}

pub const SCAN_CSV_HEADER: &str = "cluster,value,mA0,mA1,mB0,mB1,K00,K01,K10,K11";

pub fn clusters_csv(report: &FaceScanReport) -> String {
    let mut out = format!("{SCAN_CSV_HEADER}\n");
    for (i, c) in report.clusters.iter().enumerate() {
        write!(out, "{i},{}", c.center.value).unwrap();
        for x in c.center.behavior.to_vec8() {
            write!(out, ",{x}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn face_scan_json(report: &FaceScanReport) -> Value {
    json!({
        "value": report.value,
        "clusters": report.clusters.iter().map(|c| json!({
            "classification": c.kind.to_string(),
            "value": c.center.value,
            "members": c.members,
            "params": c.center.params.to_array(),
            "behavior": behavior_to_json(&AnyBehavior::Float(c.center.behavior.clone())),
        })).collect::<Vec<_>>(),
    })
}

/// Half-width of the `(r0, r1)` window drawn in SVG output.
pub const SVG_HALF_WIDTH: f64 = 0.35;
pub const SVG_SIZE: f64 = 1000.0;

/// A layer of the slice figure.
#[derive(Clone, Debug)]
pub struct Layer {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

/// Polygon through `samples` points of the circle of radius `r`.
pub fn circle_layer(name: &str, r: f64, samples: usize) -> Layer {
    let points = (0..samples)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / samples as f64;
            (r * t.cos(), r * t.sin())
        })
        .collect();
    Layer { name: name.into(), points, closed: true }
}

pub fn octagon_layer(vertices: &[PolygonVertex<QSqrt2>]) -> Layer {
    Layer {
        name: "octagon".into(),
        points: vertices.iter().map(|v| (v.r0.to_f64(), v.r1.to_f64())).collect(),
        closed: true,
    }
}

/// Layers of the slice figure: local-bound octagon, second-order exclusion
/// circle of radius `hessian_radius`, and the certified disk of radius
/// `1/(4√2)`.
pub fn slice_figure_layers(vertices: &[PolygonVertex<QSqrt2>], hessian_radius: f64, samples: usize) -> Vec<Layer> {
    vec![
        octagon_layer(vertices),
        circle_layer("hessian_circle", hessian_radius, samples),
        circle_layer("npa_disk", 0.25 * std::f64::consts::FRAC_1_SQRT_2, samples),
    ]
}

/// Header `layer,k,r0,r1`.
pub fn layers_csv(layers: &[Layer]) -> String {
    let mut out = String::from("layer,k,r0,r1\n");
    for l in layers {
        for (k, (x, y)) in l.points.iter().enumerate() {
            writeln!(out, "{},{k},{x},{y}", l.name).unwrap();
        }
    }
    out
}

fn to_px(x: f64, y: f64) -> (f64, f64) {
    let s = SVG_SIZE / (2.0 * SVG_HALF_WIDTH);
    ((x + SVG_HALF_WIDTH) * s, (SVG_HALF_WIDTH - y) * s)
}

const LAYER_STYLES: [&str; 3] = [
    "fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"3\" stroke-dasharray=\"12 6\"",
    "fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" stroke-dasharray=\"3 5\"",
    "fill=\"none\" stroke=\"#e07b00\" stroke-width=\"2\" stroke-dasharray=\"3 5\"",
];

/// 1000×1000 viewbox over `[−0.35, 0.35]²`, `r1` pointing up.
pub fn layers_svg(layers: &[Layer]) -> String {
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_SIZE} {SVG_SIZE}\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\">\n"
    );
    let (ox, oy) = to_px(0.0, 0.0);
    writeln!(out, "  <line x1=\"0\" y1=\"{oy}\" x2=\"{SVG_SIZE}\" y2=\"{oy}\" stroke=\"#999\" stroke-width=\"1\"/>").unwrap();
    writeln!(out, "  <line x1=\"{ox}\" y1=\"0\" x2=\"{ox}\" y2=\"{SVG_SIZE}\" stroke=\"#999\" stroke-width=\"1\"/>").unwrap();
    for (i, l) in layers.iter().enumerate() {
        let pts: Vec<String> = l
            .points
            .iter()
            .map(|&(x, y)| {
                let (px, py) = to_px(x, y);
                format!("{px:.3},{py:.3}")
            })
            .collect();
        let tag = if l.closed { "polygon" } else { "polyline" };
        writeln!(out, "  <{tag} id=\"{}\" points=\"{}\" {}/>", l.name, pts.join(" "), LAYER_STYLES[i % LAYER_STYLES.len()])
            .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

pub fn octagon_svg(vertices: &[PolygonVertex<QSqrt2>]) -> String {
    layers_svg(&[octagon_layer(vertices)])
}

/// Names of the behavior coordinates in `to_vec8` order.
pub const COORDINATE_NAMES: [&str; 8] = ["mA0", "mA1", "mB0", "mB1", "K00", "K01", "K10", "K11"];

/// Parses `x,y,z` coordinate names into `to_vec8` indices.
pub fn parse_axes(spec: &str) -> Result<[usize; 3]> {
    let idx: Vec<usize> = spec
        .split(',')
        .map(|s| {
            COORDINATE_NAMES
                .iter()
                .position(|n| *n == s.trim())
                .ok_or_else(|| Error::InvalidArgument(format!("unknown axis `{s}`; expected one of {COORDINATE_NAMES:?}")))
        })
        .collect::<Result<_>>()?;
    match idx.as_slice() {
        [a, b, c] if a != b && b != c && a != c => Ok([*a, *b, *c]),
        _ => Err(Error::InvalidArgument("expected three distinct axes".into())),
    }
}

/// Random qubit-family behaviors projected on three coordinates, plus the
/// local vertices and the Tsirelson point, as CSV `kind,x,y,z`.
pub fn projection_csv(axes: [usize; 3], samples: usize, seed: u64) -> String {
    use std::f64::consts::{PI, TAU};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = axes.map(|i| COORDINATE_NAMES[i]);
    let mut out = format!("kind,{},{},{}\n", names[0], names[1], names[2]);
    let mut row = |kind: &str, p: [f64; 8]| {
        writeln!(out, "{kind},{},{},{}", p[axes[0]], p[axes[1]], p[axes[2]]).unwrap();
    };
    for v in crate::scenario::LocalVertex::all() {
        row("local", v.behavior::<f64>().to_vec8());
    }
    row("tsirelson", crate::scenario::tsirelson_point::<f64>().to_vec8());
    for _ in 0..samples {
        let p = QubitParams::new(
            rng.random::<f64>() * PI / 2.0,
            [rng.random::<f64>() * TAU, rng.random::<f64>() * TAU],
            [rng.random::<f64>() * TAU, rng.random::<f64>() * TAU],
        );
        row("qubit", p.behavior().to_vec8());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::w3_certificate;
    use crate::scenario::chsh;
    use crate::slice::{beta_t, octagon_vertices};

    #[test]
    fn expression_round_trip() {
        for e in [AnyExpression::Exact(beta_t()), AnyExpression::Float(beta_t()), AnyExpression::Exact(chsh())] {
            let text = to_json_string(&expression_to_json(&e));
            assert_eq!(expression_from_json(&parse_json(&text).unwrap()).unwrap(), e);
        }
    }

    #[test]
    fn certificate_round_trip() {
        let c = w3_certificate();
        let v = certificate_to_json(&c);
        let back = certificate_from_json(&parse_json(&to_json_string(&v)).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_malformed_input() {
        for text in [
            r#"{"kind":"exact","a":[1,0],"b":["0/1","0/1"],"c":[["1/1","1/1"],["1/1","-1/1"]]}"#,
            r#"{"kind":"float","a":[0,0],"b":[0,0]}"#,
            r#"{"kind":"other","a":[0,0],"b":[0,0],"c":[[0,0],[0,0]]}"#,
            r#"{"kind":"float","a":[0,0],"b":[0,0],"c":[[0,0],[0,0]],"extra":1}"#,
        ] {
            assert!(expression_from_json(&parse_json(text).unwrap()).is_err(), "{text}");
        }
    }

    #[test]
    fn octagon_csv_first_row() {
        let csv = octagon_csv(&octagon_vertices());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "k,r0,r1");
        assert_eq!(lines[1], "0,1/1-1/2*s2,0/1");
    }

    #[test]
    fn svg_maps_origin_to_center() {
        assert_eq!(to_px(0.0, 0.0), (500.0, 500.0));
        assert_eq!(to_px(-0.35, 0.35), (0.0, 0.0));
        assert!(octagon_svg(&octagon_vertices()).contains("viewBox=\"0 0 1000 1000\""));
    }
}
