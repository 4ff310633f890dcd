//! CSV and JSON tables for charts, coordinate grids and eigenfunctions.
//!
//! CSV files open with `#` comment lines (`# key = value`) recording the run
//! configuration; readers skip them. Floats are written in shortest
//! round-trip form so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::eigenfun::{AngularEigenfunction, EigenCoeffs};
use crate::error::{Error, Result};
use crate::geometry::{CoordLabel, Polyline};
use crate::hill::State2;
use crate::spectrum::{Branch, CharacteristicCurve, Chart, CurveLabel, Parity};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Ordered `key = value` metadata written ahead of every table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header(pub BTreeMap<String, String>);

impl Header {
    pub fn new() -> Self {
        let mut h = Self::default();
        h.set("version", VERSION);
        h
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.insert(key.to_string(), value.to_string().replace('\n', " "));
        self
    }

    fn write_comments<W: Write>(&self, w: &mut W) -> Result<()> {
        for (k, v) in &self.0 {
            writeln!(w, "# {k} = {v}").map_err(io)?;
        }
        Ok(())
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Parse(format!("i/o: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("json: {e}"))
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r)
}

fn finite(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Parse(format!("{name} is not finite")))
    }
}

// ---------------------------------------------------------------- charts

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartRow {
    pub alpha_sq: f64,
    pub label_numerator: u32,
    pub label_denominator: u32,
    pub branch: Branch,
    pub parity: Parity,
    pub q1: f64,
    pub lambda: f64,
}

fn label_from_parts(num: u32, den: u32, branch: Branch, parity: Parity) -> Result<CurveLabel> {
    let twice = match den {
        1 => num.checked_mul(2).ok_or_else(|| Error::Parse("label numerator too large".into()))?,
        2 if num % 2 == 1 => num,
        _ => return Err(Error::Parse(format!("label {num}/{den} is not reduced with denominator 1 or 2"))),
    };
    let label = CurveLabel::new(twice, parity)?;
    if label.branch() != branch {
        return Err(Error::Parse(format!("label {label} does not belong to branch {branch}")));
    }
    Ok(label)
}

fn chart_rows(alpha_sq: f64, curve: &CharacteristicCurve) -> impl Iterator<Item = ChartRow> + '_ {
    let (num, den) = curve.label.fraction();
    curve.points.iter().map(move |&(q1, lambda)| ChartRow {
        alpha_sq,
        label_numerator: num,
        label_denominator: den,
        branch: curve.label.branch(),
        parity: curve.label.parity(),
        q1,
        lambda,
    })
}

/// Chart table; lost curves add `# error = …` records after the header.
pub fn write_chart_csv<W: Write>(mut w: W, header: &Header, chart: &Chart) -> Result<()> {
    header.write_comments(&mut w)?;
    for c in &chart.curves {
        if let Some(e) = &c.error {
            writeln!(w, "# error = {}: {}", c.curve.label, e).map_err(io)?;
        }
    }
    let curves: Vec<&CharacteristicCurve> = chart.curves.iter().map(|c| &c.curve).collect();
    write_curves_csv_body(w, chart.alpha * chart.alpha, &curves)
}

/// A bare list of curves (used for the classical overlay file).
pub fn write_curves_csv<W: Write>(mut w: W, header: &Header, alpha_sq: f64, curves: &[CharacteristicCurve]) -> Result<()> {
    header.write_comments(&mut w)?;
    let refs: Vec<&CharacteristicCurve> = curves.iter().collect();
    write_curves_csv_body(w, alpha_sq, &refs)
}

fn write_curves_csv_body<W: Write>(w: W, alpha_sq: f64, curves: &[&CharacteristicCurve]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["alpha_sq", "label_numerator", "label_denominator", "branch", "parity", "q1", "lambda"])
        .map_err(csv_err)?;
    for c in curves {
        for row in chart_rows(alpha_sq, c) {
            out.serialize(row).map_err(csv_err)?;
        }
    }
    out.flush().map_err(io)
}

/// Read a chart CSV back into curves, grouped by label in order of first
/// appearance.
pub fn read_chart_csv<R: Read>(r: R) -> Result<Vec<CharacteristicCurve>> {
    let mut rdr = csv_reader(r);
    let mut curves: Vec<CharacteristicCurve> = Vec::new();
    for row in rdr.deserialize::<ChartRow>() {
        let row = row.map_err(csv_err)?;
        let alpha_sq = finite("alpha_sq", row.alpha_sq)?;
        if alpha_sq <= 0.0 {
            return Err(Error::Parse("alpha_sq must be positive".into()));
        }
        let label = label_from_parts(row.label_numerator, row.label_denominator, row.branch, row.parity)?;
        let point = (finite("q1", row.q1)?, finite("lambda", row.lambda)?);
        let alpha = alpha_sq.sqrt();
        match curves.iter_mut().find(|c| c.label == label) {
            Some(c) => {
                if c.alpha != alpha {
                    return Err(Error::Parse(format!("curve {label} mixes alpha values")));
                }
                if c.points.last().is_some_and(|p| p.0 >= point.0) {
                    return Err(Error::Parse(format!("curve {label} is not increasing in q1")));
                }
                c.points.push(point);
            }
            None => curves.push(CharacteristicCurve {
                label,
                alpha,
                points: vec![point],
            }),
        }
    }
    Ok(curves)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveJson {
    /// `"3/2"` or `"2"`.
    pub n: String,
    pub branch: Branch,
    pub parity: Parity,
    pub points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartJson {
    pub alpha_sq: f64,
    pub curves: Vec<CurveJson>,
    #[serde(default)]
    pub meta: Header,
}

fn fraction_string(label: &CurveLabel) -> String {
    match label.fraction() {
        (n, 1) => n.to_string(),
        (n, d) => format!("{n}/{d}"),
    }
}

fn curve_json(c: &CharacteristicCurve, error: Option<String>) -> CurveJson {
    CurveJson {
        n: fraction_string(&c.label),
        branch: c.label.branch(),
        parity: c.label.parity(),
        points: c.points.iter().map(|&(q, l)| [q, l]).collect(),
        error,
    }
}

pub fn chart_to_json(header: &Header, chart: &Chart) -> ChartJson {
    ChartJson {
        alpha_sq: chart.alpha * chart.alpha,
        curves: chart
            .curves
            .iter()
            .map(|c| curve_json(&c.curve, c.error.as_ref().map(|e| e.to_string())))
            .collect(),
        meta: header.clone(),
    }
}

pub fn curves_to_json(header: &Header, alpha_sq: f64, curves: &[CharacteristicCurve]) -> ChartJson {
    ChartJson {
        alpha_sq,
        curves: curves.iter().map(|c| curve_json(c, None)).collect(),
        meta: header.clone(),
    }
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(json_err)?;
    writeln!(w).map_err(io)
}

/// Parse and validate a chart JSON document.
pub fn read_chart_json<R: Read>(r: R) -> Result<Vec<CharacteristicCurve>> {
    let doc: ChartJson = serde_json::from_reader(r).map_err(json_err)?;
    let alpha_sq = finite("alpha_sq", doc.alpha_sq)?;
    if alpha_sq <= 0.0 {
        return Err(Error::Parse("alpha_sq must be positive".into()));
    }
    doc.curves
        .into_iter()
        .map(|c| {
            let label: CurveLabel = format!("{}:{}", c.n, c.parity).parse()?;
            if label.branch() != c.branch {
                return Err(Error::Parse(format!("label {label} does not belong to branch {}", c.branch)));
            }
            let mut points = Vec::with_capacity(c.points.len());
            for [q, l] in c.points {
                let p = (finite("q1", q)?, finite("lambda", l)?);
                if points.last().is_some_and(|last: &(f64, f64)| last.0 >= p.0) {
                    return Err(Error::Parse(format!("curve {label} is not increasing in q1")));
                }
                points.push(p);
            }
            Ok(CharacteristicCurve {
                label,
                alpha: alpha_sq.sqrt(),
                points,
            })
        })
        .collect()
}

// ---------------------------------------------------------------- grids

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub curve_id: usize,
    pub coord_label: String,
    pub coord_value: f64,
    pub x: f64,
    pub y: f64,
}

pub fn write_grid_csv<W: Write>(mut w: W, header: &Header, lines: &[Polyline]) -> Result<()> {
    header.write_comments(&mut w)?;
    let mut out = csv_writer(w);
    out.write_record(["curve_id", "coord_label", "coord_value", "x", "y"]).map_err(csv_err)?;
    for (id, line) in lines.iter().enumerate() {
        for p in &line.points {
            out.serialize(GridRow {
                curve_id: id,
                coord_label: line.label.to_string(),
                coord_value: line.value,
                x: p[0],
                y: p[1],
            })
            .map_err(csv_err)?;
        }
    }
    out.flush().map_err(io)
}

pub fn read_grid_csv<R: Read>(r: R) -> Result<Vec<Polyline>> {
    let mut rdr = csv_reader(r);
    let mut lines: Vec<(usize, Polyline)> = Vec::new();
    for row in rdr.deserialize::<GridRow>() {
        let row = row.map_err(csv_err)?;
        let label: CoordLabel = row.coord_label.parse()?;
        let p = [finite("x", row.x)?, finite("y", row.y)?];
        let value = finite("coord_value", row.coord_value)?;
        match lines.last_mut() {
            Some((id, line)) if *id == row.curve_id => {
                if line.label != label || line.value != value {
                    return Err(Error::Parse(format!("curve {id} changes its coordinate")));
                }
                line.points.push(p);
            }
            _ => {
                if lines.iter().any(|(id, _)| *id == row.curve_id) {
                    return Err(Error::Parse(format!("curve {} is not contiguous", row.curve_id)));
                }
                lines.push((
                    row.curve_id,
                    Polyline {
                        label,
                        value,
                        points: vec![p],
                    },
                ));
            }
        }
    }
    Ok(lines.into_iter().map(|(_, l)| l).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridJson {
    pub lines: Vec<Polyline>,
    #[serde(default)]
    pub meta: Header,
}

// ---------------------------------------------------------- eigenfunctions

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenMeta {
    pub lambda: f64,
    pub q1: f64,
    pub alpha_sq: f64,
    pub n: String,
    pub branch: Branch,
    pub parity: Parity,
    pub coeffs: EigenCoeffs,
}

impl EigenMeta {
    pub fn of(f: &AngularEigenfunction) -> Self {
        Self {
            lambda: f.lambda,
            q1: f.q1,
            alpha_sq: f.alpha * f.alpha,
            n: fraction_string(&f.label),
            branch: f.branch(),
            parity: f.parity(),
            coeffs: f.coeffs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub theta: f64,
    pub value: f64,
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTableJson {
    pub meta: EigenMeta,
    pub table: Vec<EigenRow>,
    #[serde(default)]
    pub run: Header,
}

fn rows(states: &[State2]) -> Vec<EigenRow> {
    states
        .iter()
        .map(|s| EigenRow {
            theta: s.at,
            value: s.value,
            derivative: s.slope,
        })
        .collect()
}

/// Table with the metadata block embedded as a `# meta = {json}` line.
pub fn write_eigen_csv<W: Write>(mut w: W, header: &Header, f: &AngularEigenfunction, states: &[State2]) -> Result<()> {
    let mut h = header.clone();
    h.set("meta", serde_json::to_string(&EigenMeta::of(f)).map_err(json_err)?);
    h.write_comments(&mut w)?;
    let mut out = csv_writer(w);
    out.write_record(["theta", "value", "derivative"]).map_err(csv_err)?;
    for r in rows(states) {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush().map_err(io)
}

pub fn eigen_to_json(header: &Header, f: &AngularEigenfunction, states: &[State2]) -> EigenTableJson {
    EigenTableJson {
        meta: EigenMeta::of(f),
        table: rows(states),
        run: header.clone(),
    }
}

/// Rows of an eigenfunction CSV; `theta` must be non-decreasing.
pub fn read_eigen_csv<R: Read>(r: R) -> Result<Vec<EigenRow>> {
    let mut rdr = csv_reader(r);
    let mut out: Vec<EigenRow> = Vec::new();
    for row in rdr.deserialize::<EigenRow>() {
        let row = row.map_err(csv_err)?;
        finite("theta", row.theta)?;
        finite("value", row.value)?;
        finite("derivative", row.derivative)?;
        if out.last().is_some_and(|p| p.theta > row.theta) {
            return Err(Error::Parse("theta column is not sorted".into()));
        }
        out.push(row);
    }
    Ok(out)
}
