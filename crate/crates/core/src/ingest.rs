//! Front end: the strict JSON spec document and CSV data tables.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::model::{
    AxisSpec, ChartSpec, ChartType, DataPoint, Domain, Encoding, Series, SpecError,
};
use crate::simplify::{format_date, parse_date};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    MissingField,
    BadEnum,
    DomainViolation,
}

impl ParseErrorKind {
    pub fn tag(self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "syntax",
            ParseErrorKind::MissingField => "missing-field",
            ParseErrorKind::BadEnum => "bad-enum",
            ParseErrorKind::DomainViolation => "domain-violation",
        }
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at {path}: {message}")]
pub struct SpecParseError {
    pub kind: ParseErrorKind,
    pub path: String,
    pub message: String,
    /// The underlying model error for domain violations.
    pub spec_error: Option<SpecError>,
}

impl SpecParseError {
    fn new(kind: ParseErrorKind, path: &str, message: impl Into<String>) -> Self {
        Self {
            kind,
            path: path.to_string(),
            message: message.into(),
            spec_error: None,
        }
    }

    fn syntax(path: &str, message: impl Into<String>) -> Self {
        Self::new(ParseErrorKind::Syntax, path, message)
    }

    fn from_spec(e: SpecError) -> Self {
        let path = match &e {
            SpecError::EmptySeries(s)
            | SpecError::MissingErrors(s)
            | SpecError::UnexpectedErrors(s) => format!("$.series[{s}]"),
            SpecError::ErrorLength { series, .. } => format!("$.series[{series}].y_err"),
            SpecError::PointOutOfDomain { series, point } => format!("$.series[{series}].points[{point}]"),
            SpecError::NegativeError { series, point } | SpecError::ErrorOutOfDomain { series, point } => {
                format!("$.series[{series}].y_err[{point}]")
            }
            SpecError::LegendTitleMismatch { .. } => "$.legend_title".into(),
            SpecError::TextValueAxis => "$.y_axis.encoding".into(),
            SpecError::BarNeedsCategories => "$.x_axis.encoding".into(),
            SpecError::NoSeries | SpecError::TooManySeries(_) | SpecError::DuplicateSeriesName(_) => {
                "$.series".into()
            }
            _ => "$".into(),
        };
        Self {
            kind: ParseErrorKind::DomainViolation,
            path,
            message: e.to_string(),
            spec_error: Some(e),
        }
    }
}

const TOP_FIELDS: &[&str] = &["chart_type", "title", "x_axis", "y_axis", "legend_title", "series"];
const AXIS_FIELDS: &[&str] = &["title", "encoding", "domain"];
const SERIES_FIELDS: &[&str] = &["name", "points", "y_err"];

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, SpecParseError> {
    let obj = v
        .as_object()
        .ok_or_else(|| SpecParseError::syntax(path, format!("expected an object, found {}", kind_of(v))))?;
    Ok(obj)
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), SpecParseError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(SpecParseError::syntax(&format!("{path}.{k}"), format!("unknown field `{k}`"))),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, SpecParseError> {
    match obj.get(key) {
        Some(Value::Null) | None => Err(SpecParseError::new(
            ParseErrorKind::MissingField,
            &format!("{path}.{key}"),
            format!("missing field `{key}`"),
        )),
        Some(v) => Ok(v),
    }
}

fn optional<'a>(obj: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.get(key).filter(|v| !v.is_null())
}

fn kind_of(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn string<'a>(v: &'a Value, path: &str) -> Result<&'a str, SpecParseError> {
    v.as_str()
        .ok_or_else(|| SpecParseError::syntax(path, format!("expected a string, found {}", kind_of(v))))
}

fn number(v: &Value, path: &str) -> Result<f64, SpecParseError> {
    let n = v
        .as_f64()
        .ok_or_else(|| SpecParseError::syntax(path, format!("expected a number, found {}", kind_of(v))))?;
    if !n.is_finite() {
        return Err(SpecParseError::syntax(path, "number out of range"));
    }
    Ok(n)
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a [Value], SpecParseError> {
    v.as_array()
        .map(Vec::as_slice)
        .ok_or_else(|| SpecParseError::syntax(path, format!("expected an array, found {}", kind_of(v))))
}

fn date(v: &Value, path: &str) -> Result<f64, SpecParseError> {
    let s = string(v, path)?;
    parse_date(s)
        .map(|d| d as f64)
        .ok_or_else(|| SpecParseError::syntax(path, format!("`{s}` is not a YYYY-MM-DD date")))
}

/// A coordinate under the axis encoding: dates are strings, categories are
/// names resolved to their index, everything else is a number.
fn coordinate(v: &Value, axis: &AxisSpec, path: &str) -> Result<f64, SpecParseError> {
    match axis.encoding() {
        Encoding::DateTime => date(v, path),
        Encoding::Text => {
            let name = string(v, path)?;
            let cats = axis.domain().categories().unwrap_or(&[]);
            cats.iter()
                .position(|c| c == name)
                .map(|i| i as f64)
                .ok_or_else(|| {
                    SpecParseError::new(
                        ParseErrorKind::DomainViolation,
                        path,
                        format!("`{name}` is not one of the axis categories"),
                    )
                })
        }
        _ => number(v, path),
    }
}

fn parse_axis(v: &Value, path: &str) -> Result<AxisSpec, SpecParseError> {
    let obj = object(v, path)?;
    reject_unknown(obj, AXIS_FIELDS, path)?;
    let title = string(required(obj, "title", path)?, &format!("{path}.title"))?;
    let enc_path = format!("{path}.encoding");
    let enc_tag = string(required(obj, "encoding", path)?, &enc_path)?;
    let encoding: Encoding = enc_tag.parse().map_err(|_| {
        SpecParseError::new(ParseErrorKind::BadEnum, &enc_path, format!("unknown encoding `{enc_tag}`"))
    })?;
    let dom_path = format!("{path}.domain");
    let dom = object(required(obj, "domain", path)?, &dom_path)?;
    let domain = if encoding == Encoding::Text {
        reject_unknown(dom, &["categories"], &dom_path)?;
        let cats_path = format!("{dom_path}.categories");
        let cats = array(required(dom, "categories", &dom_path)?, &cats_path)?
            .iter()
            .enumerate()
            .map(|(i, c)| string(c, &format!("{cats_path}[{i}]")).map(str::to_string))
            .collect::<Result<Vec<_>, _>>()?;
        Domain::Categories(cats)
    } else {
        reject_unknown(dom, &["lo", "hi"], &dom_path)?;
        let bound = |key: &str| -> Result<f64, SpecParseError> {
            let p = format!("{dom_path}.{key}");
            let v = required(dom, key, &dom_path)?;
            if encoding == Encoding::DateTime {
                date(v, &p)
            } else {
                number(v, &p)
            }
        };
        Domain::Numeric {
            lo: bound("lo")?,
            hi: bound("hi")?,
        }
    };
    AxisSpec::new(title, encoding, domain).map_err(|e| {
        let mut err = SpecParseError::from_spec(e);
        err.path = dom_path;
        err
    })
}

fn parse_series(v: &Value, x: &AxisSpec, y: &AxisSpec, path: &str) -> Result<Series, SpecParseError> {
    let obj = object(v, path)?;
    reject_unknown(obj, SERIES_FIELDS, path)?;
    let name = string(required(obj, "name", path)?, &format!("{path}.name"))?;
    let pts_path = format!("{path}.points");
    let points = array(required(obj, "points", path)?, &pts_path)?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let pp = format!("{pts_path}[{i}]");
            match array(p, &pp)? {
                [px, py] => Ok(DataPoint::new(
                    coordinate(px, x, &format!("{pp}[0]"))?,
                    coordinate(py, y, &format!("{pp}[1]"))?,
                )),
                other => Err(SpecParseError::syntax(
                    &pp,
                    format!("expected an [x, y] pair, found {} elements", other.len()),
                )),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut series = Series::new(name, points);
    if let Some(errs) = optional(obj, "y_err") {
        let ep = format!("{path}.y_err");
        let errs = array(errs, &ep)?
            .iter()
            .enumerate()
            .map(|(i, e)| number(e, &format!("{ep}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        series = series.with_errors(errs);
    }
    Ok(series)
}

/// Parses a spec document. Every input yields either a valid spec or an error.
pub fn parse_spec(bytes: &[u8]) -> Result<ChartSpec, SpecParseError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| SpecParseError::syntax("$", format!("input is not UTF-8: {e}")))?;
    let root: Value = serde_json::from_str(text)
        .map_err(|e| SpecParseError::syntax("$", format!("invalid JSON: {e}")))?;
    spec_from_value(&root)
}

/// Like [`parse_spec`] for an already-parsed JSON value.
pub fn spec_from_value(root: &Value) -> Result<ChartSpec, SpecParseError> {
    let obj = object(root, "$")?;
    reject_unknown(obj, TOP_FIELDS, "$")?;

    let ct_tag = string(required(obj, "chart_type", "$")?, "$.chart_type")?;
    let chart_type: ChartType = ct_tag.parse().map_err(|_| {
        SpecParseError::new(
            ParseErrorKind::BadEnum,
            "$.chart_type",
            format!("unknown chart type `{ct_tag}`"),
        )
    })?;
    let title = string(required(obj, "title", "$")?, "$.title")?;
    let x_axis = parse_axis(required(obj, "x_axis", "$")?, "$.x_axis")?;
    let y_axis = parse_axis(required(obj, "y_axis", "$")?, "$.y_axis")?;
    let legend_title = optional(obj, "legend_title")
        .map(|v| string(v, "$.legend_title").map(str::to_string))
        .transpose()?;
    let series = array(required(obj, "series", "$")?, "$.series")?
        .iter()
        .enumerate()
        .map(|(i, s)| parse_series(s, &x_axis, &y_axis, &format!("$.series[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;

    ChartSpec::new(chart_type, title, x_axis, y_axis, legend_title, series)
        .map_err(SpecParseError::from_spec)
}

/// Integral values are written as integers so that documents stay stable
/// under re-serialization.
fn num(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 9.007_199_254_740_992e15 {
        Value::Number(Number::from(v as i64))
    } else {
        Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
    }
}

fn coordinate_value(v: f64, axis: &AxisSpec) -> Value {
    match axis.encoding() {
        Encoding::DateTime => Value::String(format_date(v)),
        Encoding::Text => {
            let cats = axis.domain().categories().unwrap_or(&[]);
            Value::String(cats.get(v as usize).cloned().unwrap_or_default())
        }
        _ => num(v),
    }
}

fn axis_value(axis: &AxisSpec) -> Value {
    let domain = match axis.domain() {
        Domain::Categories(c) => serde_json::json!({ "categories": c }),
        Domain::Numeric { lo, hi } => {
            let bound = |v: f64| {
                if axis.encoding() == Encoding::DateTime {
                    Value::String(format_date(v))
                } else {
                    num(v)
                }
            };
            serde_json::json!({ "lo": bound(*lo), "hi": bound(*hi) })
        }
    };
    serde_json::json!({
        "title": axis.title(),
        "encoding": axis.encoding().tag(),
        "domain": domain,
    })
}

pub fn spec_to_value(spec: &ChartSpec) -> Value {
    let series: Vec<Value> = spec
        .series()
        .iter()
        .map(|s| {
            let points: Vec<Value> = s
                .points
                .iter()
                .map(|p| {
                    Value::Array(vec![
                        coordinate_value(p.x, spec.x_axis()),
                        coordinate_value(p.y, spec.y_axis()),
                    ])
                })
                .collect();
            let mut m = Map::new();
            m.insert("name".into(), Value::String(s.name.clone()));
            m.insert("points".into(), Value::Array(points));
            if let Some(err) = &s.y_err {
                m.insert("y_err".into(), Value::Array(err.iter().map(|&e| num(e)).collect()));
            }
            Value::Object(m)
        })
        .collect();
    let mut root = Map::new();
    root.insert("chart_type".into(), Value::String(spec.chart_type().tag().into()));
    root.insert("title".into(), Value::String(spec.title().into()));
    root.insert("x_axis".into(), axis_value(spec.x_axis()));
    root.insert("y_axis".into(), axis_value(spec.y_axis()));
    if let Some(l) = spec.legend_title() {
        root.insert("legend_title".into(), Value::String(l.into()));
    }
    root.insert("series".into(), Value::Array(series));
    Value::Object(root)
}

/// Canonical serialization: sorted keys, two-space indentation, trailing newline.
pub fn serialize_spec(spec: &ChartSpec) -> String {
    let mut s = serde_json::to_string_pretty(&spec_to_value(spec)).expect("JSON values always serialize");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------------
// CSV

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvError {
    #[error("CSV document is empty")]
    Empty,
    #[error("CSV needs an x column and at least one series column")]
    NoSeries,
    #[error("duplicate header `{0}`")]
    DuplicateHeader(String),
    #[error("line {line}: expected {expected} cells, found {found}")]
    Ragged { line: u64, expected: usize, found: usize },
    #[error("line {line}, column `{column}`: empty cell")]
    EmptyCell { line: u64, column: String },
    #[error("line {line}, column `{column}`: `{value}` is not a valid {encoding} value")]
    BadValue {
        line: u64,
        column: String,
        value: String,
        encoding: Encoding,
    },
    #[error("error column `{0}` has no matching series column")]
    OrphanErrorColumn(String),
    #[error("CSV syntax error: {0}")]
    Syntax(String),
}

/// Series parsed from a data table. For text x columns the categories are
/// listed in order of first appearance and points carry their indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvData {
    pub x_header: String,
    pub series: Vec<Series>,
    pub categories: Option<Vec<String>>,
}

const ERR_SUFFIX: &str = "_err";

fn cell_value(raw: &str, enc: Encoding) -> Option<f64> {
    match enc {
        Encoding::DateTime => parse_date(raw).map(|d| d as f64),
        _ => raw.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Parses a table whose first column is x and whose other columns are one
/// series each. A column `<name>_err` supplies error bars for series `<name>`.
pub fn parse_csv_series(bytes: &[u8], x_encoding: Encoding, y_encoding: Encoding) -> Result<CsvData, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(CsvError::Empty),
        Some(r) => r.map_err(|e| CsvError::Syntax(e.to_string()))?,
    };
    let headers: Vec<String> = header.iter().map(str::to_string).collect();
    if headers.len() < 2 {
        return Err(CsvError::NoSeries);
    }
    let mut seen = HashSet::new();
    for h in &headers {
        if !seen.insert(h.as_str()) {
            return Err(CsvError::DuplicateHeader(h.clone()));
        }
    }

    let value_cols: Vec<usize> = (1..headers.len())
        .filter(|&c| !headers[c].ends_with(ERR_SUFFIX) || !seen.contains(&headers[c][..headers[c].len() - ERR_SUFFIX.len()]))
        .collect();
    let mut err_cols: HashMap<usize, usize> = HashMap::new();
    for c in 1..headers.len() {
        if value_cols.contains(&c) {
            continue;
        }
        let base = &headers[c][..headers[c].len() - ERR_SUFFIX.len()];
        match headers.iter().position(|h| h == base) {
            Some(0) | None => return Err(CsvError::OrphanErrorColumn(headers[c].clone())),
            Some(s) => {
                err_cols.insert(s, c);
            }
        }
    }
    if value_cols.is_empty() {
        return Err(CsvError::NoSeries);
    }

    let mut categories: Vec<String> = Vec::new();
    let mut points: Vec<Vec<DataPoint>> = vec![Vec::new(); value_cols.len()];
    let mut errors: Vec<Vec<f64>> = vec![Vec::new(); value_cols.len()];
    for rec in records {
        let rec = rec.map_err(|e| CsvError::Syntax(e.to_string()))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != headers.len() {
            return Err(CsvError::Ragged {
                line,
                expected: headers.len(),
                found: rec.len(),
            });
        }
        let cell = |c: usize| -> Result<&str, CsvError> {
            let v = &rec[c];
            if v.is_empty() {
                Err(CsvError::EmptyCell {
                    line,
                    column: headers[c].clone(),
                })
            } else {
                Ok(v)
            }
        };
        let bad = |c: usize, enc: Encoding| CsvError::BadValue {
            line,
            column: headers[c].clone(),
            value: rec[c].to_string(),
            encoding: enc,
        };
        let x_raw = cell(0)?;
        let x = if x_encoding == Encoding::Text {
            match categories.iter().position(|c| c == x_raw) {
                Some(i) => i as f64,
                None => {
                    categories.push(x_raw.to_string());
                    (categories.len() - 1) as f64
                }
            }
        } else {
            cell_value(x_raw, x_encoding).ok_or_else(|| bad(0, x_encoding))?
        };
        for (k, &c) in value_cols.iter().enumerate() {
            let y = cell_value(cell(c)?, y_encoding).ok_or_else(|| bad(c, y_encoding))?;
            points[k].push(DataPoint::new(x, y));
            if let Some(&ec) = err_cols.get(&c) {
                let e = cell_value(cell(ec)?, Encoding::Float).ok_or_else(|| bad(ec, Encoding::Float))?;
                errors[k].push(e);
            }
        }
    }

    let series = value_cols
        .iter()
        .zip(points.into_iter().zip(errors))
        .map(|(&c, (pts, errs))| {
            let s = Series::new(headers[c].clone(), pts);
            if err_cols.contains_key(&c) {
                s.with_errors(errs)
            } else {
                s
            }
        })
        .collect();
    Ok(CsvData {
        x_header: headers[0].clone(),
        series,
        categories: (x_encoding == Encoding::Text).then_some(categories),
    })
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CsvSpecError {
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error("{0}")]
    Spec(#[from] SpecError),
}

/// Padded numeric domain covering `values`; integral encodings get whole bounds.
fn data_domain(values: impl Iterator<Item = f64>, enc: Encoding) -> Domain {
    let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if enc.is_integral() {
        (lo, hi) = (lo.floor(), hi.ceil());
    }
    if lo == hi {
        (lo, hi) = (lo - 1.0, hi + 1.0);
    }
    Domain::Numeric { lo, hi }
}

/// Builds a spec from a data table, deriving axis domains from the data.
pub fn spec_from_csv(
    bytes: &[u8],
    chart_type: ChartType,
    x_encoding: Encoding,
    y_encoding: Encoding,
    title: &str,
) -> Result<ChartSpec, CsvSpecError> {
    let data = parse_csv_series(bytes, x_encoding, y_encoding)?;
    let x_domain = match &data.categories {
        Some(c) => Domain::Categories(c.clone()),
        None => data_domain(data.series.iter().flat_map(|s| s.points.iter().map(|p| p.x)), x_encoding),
    };
    let y_values = data.series.iter().flat_map(|s| {
        s.points.iter().enumerate().flat_map(move |(i, p)| {
            let e = s.y_err.as_ref().map_or(0.0, |e| e[i]);
            [p.y - e, p.y + e]
        })
    });
    let y_domain = data_domain(y_values, y_encoding);
    let y_title = match data.series.as_slice() {
        [only] => only.name.clone(),
        _ => "value".to_string(),
    };
    let legend_title = (data.series.len() > 1).then(|| "series".to_string());
    let x_axis = AxisSpec::new(data.x_header.clone(), x_encoding, x_domain)?;
    let y_axis = AxisSpec::new(y_title, y_encoding, y_domain)?;
    Ok(ChartSpec::new(chart_type, title, x_axis, y_axis, legend_title, data.series)?)
}
