//! Shared domain types: chart specifications, tactile styles, the tactile
//! scene graph and validation reports. No I/O happens here.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braille::BrailleRun;

/// Maximum number of series in one chart; equals the default palette size.
pub const MAX_SERIES: usize = 6;

/// Minimum stroke width any tactile element may use, in millimetres.
pub const MIN_STROKE_MM: f64 = 1.0;
/// Minimum "on" length of a dash segment, in millimetres.
pub const MIN_DASH_ON_MM: f64 = 1.0;
/// Minimum gap between dash segments, in millimetres.
pub const MIN_DASH_OFF_MM: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartType {
    Line,
    Bar,
    Scatter,
    ErrorBar,
}

impl ChartType {
    pub const ALL: [ChartType; 4] = [
        ChartType::Line,
        ChartType::Bar,
        ChartType::Scatter,
        ChartType::ErrorBar,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ChartType::Line => "line",
            ChartType::Bar => "bar",
            ChartType::Scatter => "scatter",
            ChartType::ErrorBar => "error_bar",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ChartType::Line => "Line chart",
            ChartType::Bar => "Bar chart",
            ChartType::Scatter => "Scatter plot",
            ChartType::ErrorBar => "Error-bar chart",
        }
    }
}

impl fmt::Display for ChartType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown tag `{0}`")]
pub struct UnknownTag(pub String);

impl FromStr for ChartType {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChartType::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| UnknownTag(s.to_string()))
    }
}

/// How the values on an axis are to be read and labelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Int,
    Float,
    Fraction,
    #[serde(rename = "datetime")]
    DateTime,
    Text,
}

impl Encoding {
    pub const ALL: [Encoding; 5] = [
        Encoding::Int,
        Encoding::Float,
        Encoding::Fraction,
        Encoding::DateTime,
        Encoding::Text,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Encoding::Int => "int",
            Encoding::Float => "float",
            Encoding::Fraction => "fraction",
            Encoding::DateTime => "datetime",
            Encoding::Text => "text",
        }
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Encoding::Text)
    }

    /// Int and DateTime axes only ever carry whole numbers.
    pub fn is_integral(self) -> bool {
        matches!(self, Encoding::Int | Encoding::DateTime)
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Encoding {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Encoding::ALL
            .into_iter()
            .find(|e| e.tag() == s)
            .ok_or_else(|| UnknownTag(s.to_string()))
    }
}

/// Axis domain: a numeric interval, or an ordered list of categories whose
/// members are addressed by index `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Numeric { lo: f64, hi: f64 },
    Categories(Vec<String>),
}

impl Domain {
    /// Inclusive numeric bounds; categories span `0..=n-1`.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Domain::Numeric { lo, hi } => (*lo, *hi),
            Domain::Categories(c) => (0.0, c.len().saturating_sub(1) as f64),
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        match self {
            Domain::Numeric { lo, hi } => v >= *lo && v <= *hi,
            Domain::Categories(c) => v >= 0.0 && v.fract() == 0.0 && (v as usize) < c.len(),
        }
    }

    pub fn categories(&self) -> Option<&[String]> {
        match self {
            Domain::Categories(c) => Some(c),
            Domain::Numeric { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    title: String,
    encoding: Encoding,
    domain: Domain,
}

impl AxisSpec {
    pub fn new(title: impl Into<String>, encoding: Encoding, domain: Domain) -> Result<Self, SpecError> {
        match (&domain, encoding) {
            (Domain::Categories(c), Encoding::Text) => {
                if c.is_empty() {
                    return Err(SpecError::EmptyCategories);
                }
                let mut seen = HashSet::new();
                for name in c {
                    if !seen.insert(name.as_str()) {
                        return Err(SpecError::DuplicateCategory(name.clone()));
                    }
                }
            }
            (Domain::Categories(_), _) => return Err(SpecError::DomainEncodingMismatch(encoding)),
            (Domain::Numeric { .. }, Encoding::Text) => {
                return Err(SpecError::DomainEncodingMismatch(encoding))
            }
            (Domain::Numeric { lo, hi }, _) => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(SpecError::NonFinite("axis domain".into()));
                }
                if lo > hi {
                    return Err(SpecError::InvertedDomain { lo: *lo, hi: *hi });
                }
                if encoding.is_integral() && (lo.fract() != 0.0 || hi.fract() != 0.0) {
                    return Err(SpecError::NonIntegral("axis domain".into()));
                }
            }
        }
        Ok(Self {
            title: title.into(),
            encoding,
            domain,
        })
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub x: f64,
    pub y: f64,
}

impl DataPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// One named data series. Category x values are stored as indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<DataPoint>,
    pub y_err: Option<Vec<f64>>,
}

impl Series {
    pub fn new(name: impl Into<String>, points: Vec<DataPoint>) -> Self {
        Self {
            name: name.into(),
            points,
            y_err: None,
        }
    }

    pub fn with_errors(mut self, y_err: Vec<f64>) -> Self {
        self.y_err = Some(y_err);
        self
    }
}

/// The canonical chart metadata consumed by the compiler. Construction
/// validates every invariant; instances are immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    chart_type: ChartType,
    title: String,
    x_axis: AxisSpec,
    y_axis: AxisSpec,
    legend_title: Option<String>,
    series: Vec<Series>,
}

impl ChartSpec {
    pub fn new(
        chart_type: ChartType,
        title: impl Into<String>,
        x_axis: AxisSpec,
        y_axis: AxisSpec,
        legend_title: Option<String>,
        series: Vec<Series>,
    ) -> Result<Self, SpecError> {
        if series.is_empty() {
            return Err(SpecError::NoSeries);
        }
        if series.len() > MAX_SERIES {
            return Err(SpecError::TooManySeries(series.len()));
        }
        if legend_title.is_some() != (series.len() > 1) {
            return Err(SpecError::LegendTitleMismatch {
                series: series.len(),
                has_legend_title: legend_title.is_some(),
            });
        }
        if y_axis.encoding == Encoding::Text {
            return Err(SpecError::TextValueAxis);
        }
        if chart_type == ChartType::Bar && x_axis.encoding != Encoding::Text {
            return Err(SpecError::BarNeedsCategories);
        }

        let mut names = HashSet::new();
        for (si, s) in series.iter().enumerate() {
            if !names.insert(s.name.as_str()) {
                return Err(SpecError::DuplicateSeriesName(s.name.clone()));
            }
            if s.points.is_empty() {
                return Err(SpecError::EmptySeries(si));
            }
            match (&s.y_err, chart_type) {
                (None, ChartType::ErrorBar) => return Err(SpecError::MissingErrors(si)),
                (Some(_), t) if t != ChartType::ErrorBar => {
                    return Err(SpecError::UnexpectedErrors(si))
                }
                (Some(err), _) if err.len() != s.points.len() => {
                    return Err(SpecError::ErrorLength {
                        series: si,
                        points: s.points.len(),
                        errors: err.len(),
                    })
                }
                _ => {}
            }
            for (pi, p) in s.points.iter().enumerate() {
                if !p.x.is_finite() || !p.y.is_finite() {
                    return Err(SpecError::NonFinite(format!("series {si} point {pi}")));
                }
                for (v, axis) in [(p.x, &x_axis), (p.y, &y_axis)] {
                    if axis.encoding.is_integral() && v.fract() != 0.0 {
                        return Err(SpecError::NonIntegral(format!("series {si} point {pi}")));
                    }
                    if !axis.domain.contains(v) {
                        return Err(SpecError::PointOutOfDomain { series: si, point: pi });
                    }
                }
                if let Some(err) = &s.y_err {
                    let e = err[pi];
                    if !e.is_finite() || e < 0.0 {
                        return Err(SpecError::NegativeError { series: si, point: pi });
                    }
                    if !y_axis.domain.contains(p.y - e) || !y_axis.domain.contains(p.y + e) {
                        return Err(SpecError::ErrorOutOfDomain { series: si, point: pi });
                    }
                }
            }
        }

        Ok(Self {
            chart_type,
            title: title.into(),
            x_axis,
            y_axis,
            legend_title,
            series,
        })
    }

    pub fn chart_type(&self) -> ChartType {
        self.chart_type
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn x_axis(&self) -> &AxisSpec {
        &self.x_axis
    }

    pub fn y_axis(&self) -> &AxisSpec {
        &self.y_axis
    }

    pub fn legend_title(&self) -> Option<&str> {
        self.legend_title.as_deref()
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn total_points(&self) -> usize {
        self.series.iter().map(|s| s.points.len()).sum()
    }
}

/// Every way a [`ChartSpec`] can be rejected. Each variant has a stable code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("chart has no series")]
    NoSeries,
    #[error("{0} series exceed the palette capacity of {MAX_SERIES}")]
    TooManySeries(usize),
    #[error("duplicate series name `{0}`")]
    DuplicateSeriesName(String),
    #[error("legend title must be present iff there is more than one series ({series} series, legend title present: {has_legend_title})")]
    LegendTitleMismatch { series: usize, has_legend_title: bool },
    #[error("series {0} has no points")]
    EmptySeries(usize),
    #[error("series {series} point {point} lies outside the axis domain")]
    PointOutOfDomain { series: usize, point: usize },
    #[error("error-bar series {0} is missing y_err")]
    MissingErrors(usize),
    #[error("series {0} carries y_err but the chart is not an error-bar chart")]
    UnexpectedErrors(usize),
    #[error("series {series}: y_err has {errors} entries for {points} points")]
    ErrorLength { series: usize, points: usize, errors: usize },
    #[error("series {series} point {point}: y_err must be a finite non-negative number")]
    NegativeError { series: usize, point: usize },
    #[error("series {series} point {point}: error bar leaves the y domain")]
    ErrorOutOfDomain { series: usize, point: usize },
    #[error("inverted domain [{lo}, {hi}]")]
    InvertedDomain { lo: f64, hi: f64 },
    #[error("text axis needs at least one category")]
    EmptyCategories,
    #[error("duplicate category `{0}`")]
    DuplicateCategory(String),
    #[error("domain kind does not match the `{0}` encoding")]
    DomainEncodingMismatch(Encoding),
    #[error("non-finite number in {0}")]
    NonFinite(String),
    #[error("non-integral value for an integral encoding in {0}")]
    NonIntegral(String),
    #[error("the y axis must be numeric")]
    TextValueAxis,
    #[error("bar charts need a text (category) x axis")]
    BarNeedsCategories,
}

impl SpecError {
    pub fn code(&self) -> &'static str {
        match self {
            SpecError::NoSeries => "E-NO-SERIES",
            SpecError::TooManySeries(_) => "E-TOO-MANY-SERIES",
            SpecError::DuplicateSeriesName(_) => "E-DUP-SERIES",
            SpecError::LegendTitleMismatch { .. } => "E-LEGEND-TITLE",
            SpecError::EmptySeries(_) => "E-EMPTY-SERIES",
            SpecError::PointOutOfDomain { .. } => "E-POINT-DOMAIN",
            SpecError::MissingErrors(_) => "E-YERR-MISSING",
            SpecError::UnexpectedErrors(_) => "E-YERR-UNEXPECTED",
            SpecError::ErrorLength { .. } => "E-YERR-LENGTH",
            SpecError::NegativeError { .. } => "E-YERR-NEGATIVE",
            SpecError::ErrorOutOfDomain { .. } => "E-YERR-DOMAIN",
            SpecError::InvertedDomain { .. } => "E-DOMAIN-INVERTED",
            SpecError::EmptyCategories => "E-NO-CATEGORIES",
            SpecError::DuplicateCategory(_) => "E-DUP-CATEGORY",
            SpecError::DomainEncodingMismatch(_) => "E-DOMAIN-ENCODING",
            SpecError::NonFinite(_) => "E-NON-FINITE",
            SpecError::NonIntegral(_) => "E-NON-INTEGRAL",
            SpecError::TextValueAxis => "E-TEXT-Y-AXIS",
            SpecError::BarNeedsCategories => "E-BAR-CATEGORIES",
        }
    }
}

// ---------------------------------------------------------------------------
// Tactile styles

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerShape {
    Circle,
    Square,
    Triangle,
    Cross,
    Diamond,
    Plus,
}

impl MarkerShape {
    pub fn tag(self) -> &'static str {
        match self {
            MarkerShape::Circle => "circle",
            MarkerShape::Square => "square",
            MarkerShape::Triangle => "triangle",
            MarkerShape::Cross => "cross",
            MarkerShape::Diamond => "diamond",
            MarkerShape::Plus => "plus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hatch {
    SolidFill,
    Horizontal,
    Vertical,
    Diagonal,
    Dots,
    Crosshatch,
}

impl Hatch {
    pub fn tag(self) -> &'static str {
        match self {
            Hatch::SolidFill => "solid_fill",
            Hatch::Horizontal => "horizontal",
            Hatch::Vertical => "vertical",
            Hatch::Diagonal => "diagonal",
            Hatch::Dots => "dots",
            Hatch::Crosshatch => "crosshatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DashSegment {
    pub on_mm: f64,
    pub off_mm: f64,
}

/// A touch-distinguishable rendering assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStyle", into = "RawStyle")]
pub struct TactileStyle {
    stroke_width_mm: f64,
    dash_pattern: Vec<DashSegment>,
    marker: MarkerShape,
    hatch: Hatch,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StyleError {
    #[error("stroke width {0} mm is below the {MIN_STROKE_MM} mm minimum")]
    ThinStroke(f64),
    #[error("dash segment ({on}, {off}) mm violates the {MIN_DASH_ON_MM} mm on / {MIN_DASH_OFF_MM} mm off floors")]
    ShortDash { on: f64, off: f64 },
}

impl TactileStyle {
    pub fn new(
        stroke_width_mm: f64,
        dash_pattern: Vec<DashSegment>,
        marker: MarkerShape,
        hatch: Hatch,
    ) -> Result<Self, StyleError> {
        if !(stroke_width_mm >= MIN_STROKE_MM) || !stroke_width_mm.is_finite() {
            return Err(StyleError::ThinStroke(stroke_width_mm));
        }
        for d in &dash_pattern {
            if !(d.on_mm >= MIN_DASH_ON_MM && d.off_mm >= MIN_DASH_OFF_MM) {
                return Err(StyleError::ShortDash {
                    on: d.on_mm,
                    off: d.off_mm,
                });
            }
        }
        Ok(Self {
            stroke_width_mm,
            dash_pattern,
            marker,
            hatch,
        })
    }

    /// Solid stroke with default marker and fill; used for structural elements.
    pub fn solid(stroke_width_mm: f64) -> Self {
        Self::new(stroke_width_mm, Vec::new(), MarkerShape::Circle, Hatch::SolidFill)
            .expect("structural stroke width must respect the tactile minimum")
    }

    pub fn stroke_width_mm(&self) -> f64 {
        self.stroke_width_mm
    }

    pub fn dash_pattern(&self) -> &[DashSegment] {
        &self.dash_pattern
    }

    pub fn marker(&self) -> MarkerShape {
        self.marker
    }

    pub fn hatch(&self) -> Hatch {
        self.hatch
    }

    pub fn is_solid(&self) -> bool {
        self.dash_pattern.is_empty()
    }

    pub fn describe_stroke(&self) -> String {
        if self.dash_pattern.is_empty() {
            format!("solid line {} mm wide", self.stroke_width_mm)
        } else {
            let segs: Vec<String> = self
                .dash_pattern
                .iter()
                .map(|d| format!("{} mm on {} mm off", d.on_mm, d.off_mm))
                .collect();
            format!("dashed line ({}) {} mm wide", segs.join(", "), self.stroke_width_mm)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStyle {
    stroke_width_mm: f64,
    #[serde(default)]
    dash_pattern: Vec<(f64, f64)>,
    marker: MarkerShape,
    hatch: Hatch,
}

impl TryFrom<RawStyle> for TactileStyle {
    type Error = StyleError;

    fn try_from(raw: RawStyle) -> Result<Self, Self::Error> {
        TactileStyle::new(
            raw.stroke_width_mm,
            raw.dash_pattern
                .into_iter()
                .map(|(on_mm, off_mm)| DashSegment { on_mm, off_mm })
                .collect(),
            raw.marker,
            raw.hatch,
        )
    }
}

impl From<TactileStyle> for RawStyle {
    fn from(s: TactileStyle) -> Self {
        RawStyle {
            stroke_width_mm: s.stroke_width_mm,
            dash_pattern: s.dash_pattern.iter().map(|d| (d.on_mm, d.off_mm)).collect(),
            marker: s.marker,
            hatch: s.hatch,
        }
    }
}

// ---------------------------------------------------------------------------
// Tick labels

#[derive(Debug, Clone, PartialEq)]
pub enum TickValue {
    Number(f64),
    Category { index: usize, name: String },
}

impl TickValue {
    /// Position along the axis in data units (category index for categories).
    pub fn position(&self) -> f64 {
        match self {
            TickValue::Number(v) => *v,
            TickValue::Category { index, .. } => *index as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickLabel {
    pub value: TickValue,
    pub label_text: String,
    pub braille: BrailleRun,
}

// ---------------------------------------------------------------------------
// Tactile scene

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Affine map from one data axis onto a millimetre interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMap {
    pub data_lo: f64,
    pub data_hi: f64,
    pub mm_lo: f64,
    pub mm_hi: f64,
}

impl AxisMap {
    pub fn apply(&self, v: f64) -> f64 {
        self.mm_lo + (v - self.data_lo) / (self.data_hi - self.data_lo) * (self.mm_hi - self.mm_lo)
    }

    /// Millimetres per data unit (negative when the axis runs upwards).
    pub fn scale(&self) -> f64 {
        (self.mm_hi - self.mm_lo) / (self.data_hi - self.data_lo)
    }
}

/// Data space to canvas millimetres. SVG y grows downwards, so the y map
/// sends `data_lo` to the bottom of the plot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotTransform {
    pub x: AxisMap,
    pub y: AxisMap,
}

impl PlotTransform {
    pub fn apply(&self, p: DataPoint) -> Point2 {
        Point2::new(self.x.apply(p.x), self.y.apply(p.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Open-interior intersection: rectangles sharing only an edge do not intersect.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.right()
            && other.x < self.right()
            && self.y < other.bottom()
            && other.y < self.bottom()
    }

    pub fn contains_rect(&self, other: &Rect, eps: f64) -> bool {
        other.x >= self.x - eps
            && other.y >= self.y - eps
            && other.right() <= self.right() + eps
            && other.bottom() <= self.bottom() + eps
    }

    pub fn union(&self, other: &Rect) -> Rect {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        Rect::new(
            x,
            y,
            self.right().max(other.right()) - x,
            self.bottom().max(other.bottom()) - y,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Frame,
    Tick,
    DataMark,
    DataPath,
    Bar,
    ErrorbarWhisker,
    BrailleText,
    TextBbox,
    LegendItem,
}

impl Role {
    pub fn tag(self) -> &'static str {
        match self {
            Role::Frame => "frame",
            Role::Tick => "tick",
            Role::DataMark => "data-mark",
            Role::DataPath => "data-path",
            Role::Bar => "bar",
            Role::ErrorbarWhisker => "errorbar-whisker",
            Role::BrailleText => "braille-text",
            Role::TextBbox => "text-bbox",
            Role::LegendItem => "legend-item",
        }
    }

    /// Roles that must carry a title and description.
    pub fn is_described(self) -> bool {
        !matches!(self, Role::Frame | Role::Tick)
    }
}

/// SVG group an element is emitted into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Frame,
    Axes,
    Data,
    Labels,
    Legend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn tag(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TextKind {
    Title,
    AxisTitle(Axis),
    TickLabel(Axis),
    LegendTitle,
    LegendName,
}

impl TextKind {
    pub fn tag(self) -> &'static str {
        match self {
            TextKind::Title => "title",
            TextKind::AxisTitle(_) => "axis-title",
            TextKind::TickLabel(_) => "tick-label",
            TextKind::LegendTitle => "legend-title",
            TextKind::LegendName => "legend-name",
        }
    }

    pub fn axis(self) -> Option<Axis> {
        match self {
            TextKind::AxisTitle(a) | TextKind::TickLabel(a) => Some(a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Polyline(Vec<Point2>),
    Polylines(Vec<Vec<Point2>>),
    Rect(Rect),
    Marker {
        center: Point2,
        shape: MarkerShape,
        size_mm: f64,
    },
    Braille {
        origin: Point2,
        cells: Vec<char>,
    },
}

impl Geometry {
    /// Axis-aligned bounds of the geometry itself (stroke width excluded).
    pub fn bounds(&self) -> Rect {
        fn of_points<'a>(pts: impl Iterator<Item = &'a Point2>) -> Rect {
            let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
            for p in pts {
                x0 = x0.min(p.x);
                y0 = y0.min(p.y);
                x1 = x1.max(p.x);
                y1 = y1.max(p.y);
            }
            Rect::new(x0, y0, x1 - x0, y1 - y0)
        }
        match self {
            Geometry::Polyline(pts) => of_points(pts.iter()),
            Geometry::Polylines(lines) => of_points(lines.iter().flatten()),
            Geometry::Rect(r) => *r,
            Geometry::Marker { center, size_mm, .. } => Rect::new(
                center.x - size_mm / 2.0,
                center.y - size_mm / 2.0,
                *size_mm,
                *size_mm,
            ),
            Geometry::Braille { origin, cells } => Rect::new(
                origin.x,
                origin.y,
                cells.len() as f64 * crate::braille::CELL_ADVANCE_MM,
                crate::braille::CELL_HEIGHT_MM,
            ),
        }
    }
}

/// Which data point an element was generated from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceRef {
    pub series: String,
    pub index: usize,
}

/// Text carried by braille-text and text-bbox elements. `pair` links a run to
/// its bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct TextInfo {
    pub kind: TextKind,
    pub text: String,
    pub pair: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneElement {
    pub role: Role,
    pub layer: Layer,
    /// Series index for data elements and legend entries.
    pub series: Option<usize>,
    pub geometry: Geometry,
    pub style: TactileStyle,
    /// Short accessible name.
    pub title: String,
    /// Full accessible description.
    pub description: String,
    pub source_ref: Option<SourceRef>,
    pub text: Option<TextInfo>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    pub width_mm: f64,
    pub height_mm: f64,
}

/// Positioned, styled and described tactile elements, ready for emission.
#[derive(Debug, Clone, PartialEq)]
pub struct TactileScene {
    pub canvas: Canvas,
    pub elements: Vec<SceneElement>,
    pub chart_type: ChartType,
    pub title: String,
    pub series_names: Vec<String>,
    /// Series styles in series order.
    pub series_styles: Vec<TactileStyle>,
    /// Category count of a text x axis; such axes may carry fewer than 3 labels.
    pub x_categories: Option<usize>,
    /// Canonical spec document embedded as provenance.
    pub spec_document: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("element {0} lies outside the canvas")]
    OutOfCanvas(usize),
    #[error("element {0} has no description")]
    MissingDescription(usize),
    #[error("braille run {0} has {1} enclosing bounding boxes, expected exactly one")]
    UnpairedText(usize, usize),
}

impl TactileScene {
    /// Checks the structural invariants every scene must satisfy.
    pub fn check(&self) -> Result<(), SceneError> {
        const EPS: f64 = 1e-6;
        let canvas = Rect::new(0.0, 0.0, self.canvas.width_mm, self.canvas.height_mm);
        for (i, el) in self.elements.iter().enumerate() {
            if !canvas.contains_rect(&el.geometry.bounds(), EPS) {
                return Err(SceneError::OutOfCanvas(i));
            }
            if el.role.is_described() && (el.description.trim().is_empty() || el.title.trim().is_empty()) {
                return Err(SceneError::MissingDescription(i));
            }
            if el.role == Role::BrailleText {
                let pair = el.text.as_ref().map(|t| t.pair);
                let run = el.geometry.bounds();
                let boxes = self
                    .elements
                    .iter()
                    .filter(|b| b.role == Role::TextBbox)
                    .filter(|b| b.text.as_ref().map(|t| t.pair) == pair)
                    .filter(|b| b.geometry.bounds().contains_rect(&run, EPS))
                    .count();
                if boxes != 1 {
                    return Err(SceneError::UnpairedText(i, boxes));
                }
            }
        }
        Ok(())
    }

    pub fn count_role(&self, role: Role) -> usize {
        self.elements.iter().filter(|e| e.role == role).count()
    }
}

// ---------------------------------------------------------------------------
// Validation reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "R-XML")]
    Xml,
    #[serde(rename = "R-UNITS")]
    Units,
    #[serde(rename = "R-THIN")]
    Thin,
    #[serde(rename = "R-BRAILLE")]
    Braille,
    #[serde(rename = "R-HORIZ")]
    Horiz,
    #[serde(rename = "R-BBOX")]
    Bbox,
    #[serde(rename = "R-DESC")]
    Desc,
    #[serde(rename = "R-LABELCOUNT")]
    LabelCount,
    #[serde(rename = "R-OVERLAP")]
    Overlap,
    #[serde(rename = "R-STYLEDUP")]
    StyleDup,
}

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        RuleId::Xml,
        RuleId::Units,
        RuleId::Thin,
        RuleId::Braille,
        RuleId::Horiz,
        RuleId::Bbox,
        RuleId::Desc,
        RuleId::LabelCount,
        RuleId::Overlap,
        RuleId::StyleDup,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::Xml => "R-XML",
            RuleId::Units => "R-UNITS",
            RuleId::Thin => "R-THIN",
            RuleId::Braille => "R-BRAILLE",
            RuleId::Horiz => "R-HORIZ",
            RuleId::Bbox => "R-BBOX",
            RuleId::Desc => "R-DESC",
            RuleId::LabelCount => "R-LABELCOUNT",
            RuleId::Overlap => "R-OVERLAP",
            RuleId::StyleDup => "R-STYLEDUP",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| UnknownTag(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub rule_id: RuleId,
    pub severity: Severity,
    pub locus: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: {}", self.rule_id, self.severity, self.locus, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn is_fatal(&self) -> bool {
        self.findings.iter().any(|f| f.rule_id == RuleId::Xml)
    }

    pub fn rule_ids(&self) -> Vec<RuleId> {
        self.findings.iter().map(|f| f.rule_id).collect()
    }
}
