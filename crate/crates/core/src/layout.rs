//! Places every tactile element on the physical canvas.
//!
//! Vertical stack, top to bottom: title row, y-axis title row, plot, x tick
//! labels (one or two staggered rows), x-axis title row, legend rows. Y tick
//! labels sit in a column left of the plot.

use thiserror::Error;

use crate::braille::{self, BrailleError, BrailleRun, CELL_ADVANCE_MM, CELL_HEIGHT_MM, ELLIPSIS_CELL};
use crate::model::{
    Axis, AxisMap, Canvas, ChartSpec, ChartType, DataPoint, Domain, Encoding, Geometry, Layer,
    Point2, PlotTransform, Rect, Role, SceneElement, SceneError, SourceRef, TactileScene,
    TactileStyle, TextInfo, TextKind, TickLabel,
};
use crate::simplify::{format_date, smooth_polyline, Smoothing};

const FRAME_STROKE_MM: f64 = 1.5;
const TICK_STROKE_MM: f64 = 1.0;
const BBOX_STROKE_MM: f64 = 1.0;
const CAP_WIDTH_MM: f64 = 4.0;
const SWATCH_WIDTH_MM: f64 = 20.0;
const MIN_PLOT_MM: f64 = 20.0;
const MIN_BAR_WIDTH_MM: f64 = 3.0;
const BAR_GROUP_FILL: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanvasConfig {
    pub width_mm: f64,
    pub height_mm: f64,
    pub margin_mm: f64,
    pub min_gap_mm: f64,
    pub tick_length_mm: f64,
    pub bbox_padding_mm: f64,
    /// Size of scatter and error-bar markers.
    pub marker_size_mm: f64,
}

impl Default for CanvasConfig {
    fn default() -> Self {
        Self {
            width_mm: 297.0,
            height_mm: 210.0,
            margin_mm: 15.0,
            min_gap_mm: 2.0,
            tick_length_mm: 5.0,
            bbox_padding_mm: 1.5,
            marker_size_mm: 4.0,
        }
    }
}

impl CanvasConfig {
    pub fn validate(&self) -> Result<(), LayoutError> {
        let fields = [
            ("width_mm", self.width_mm),
            ("height_mm", self.height_mm),
            ("margin_mm", self.margin_mm),
            ("min_gap_mm", self.min_gap_mm),
            ("tick_length_mm", self.tick_length_mm),
            ("bbox_padding_mm", self.bbox_padding_mm),
            ("marker_size_mm", self.marker_size_mm),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(LayoutError::Config(format!("{name} must be positive, got {v}")));
        }
        if self.width_mm <= 2.0 * self.margin_mm || self.height_mm <= 2.0 * self.margin_mm {
            return Err(LayoutError::Config("margins leave no drawing area".into()));
        }
        Ok(())
    }

    fn bbox_height(&self) -> f64 {
        CELL_HEIGHT_MM + 2.0 * self.bbox_padding_mm
    }

    fn bbox_width(&self, cells: usize) -> f64 {
        cells as f64 * CELL_ADVANCE_MM + 2.0 * self.bbox_padding_mm
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("invalid canvas configuration: {0}")]
    Config(String),
    #[error("canvas overflow: {0}")]
    CanvasOverflow(String),
    #[error("label collision: {0}")]
    LabelCollision(String),
    #[error("cannot transcribe `{text}`: {source}")]
    Braille {
        text: String,
        #[source]
        source: BrailleError,
    },
    #[error("{styles} styles supplied for {series} series")]
    StyleCount { styles: usize, series: usize },
    #[error("{0} tick labels on an axis; at least 2 are needed")]
    TooFewTicks(usize),
    #[error("internal scene check failed: {0}")]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisTicks {
    pub x: Vec<TickLabel>,
    pub y: Vec<TickLabel>,
}

/// Everything layout consumes besides the canvas configuration.
#[derive(Debug, Clone, Copy)]
pub struct LayoutInput<'a> {
    pub spec: &'a ChartSpec,
    pub ticks: &'a AxisTicks,
    pub styles: &'a [TactileStyle],
    /// Per series: indices of the points to draw, or `None` for all of them.
    pub selected: &'a [Option<Vec<usize>>],
    pub smoothing: Smoothing,
    /// Canonical spec document carried into the scene.
    pub spec_document: &'a str,
}

fn transcribe(text: &str) -> Result<BrailleRun, LayoutError> {
    braille::transcribe(text).map_err(|source| LayoutError::Braille {
        text: text.to_string(),
        source,
    })
}

/// Cuts `run` so that its box fits in `max_w`, ending it with the ellipsis
/// cell. Returns `None` when not even one cell plus the ellipsis fits.
fn fit_run(run: &BrailleRun, max_w: f64, cfg: &CanvasConfig) -> Option<(BrailleRun, bool)> {
    let max_cells = ((max_w - 2.0 * cfg.bbox_padding_mm) / CELL_ADVANCE_MM + 1e-9).floor();
    let max_cells = if max_cells < 0.0 { 0 } else { max_cells as usize };
    if run.cells.len() <= max_cells {
        return Some((run.clone(), false));
    }
    if max_cells < 2 {
        return None;
    }
    let mut cells = run.cells[..max_cells - 1].to_vec();
    cells.push(ELLIPSIS_CELL);
    Some((
        BrailleRun {
            cells,
            source_text: run.source_text.clone(),
        },
        true,
    ))
}

fn label_interval(centre: f64, run: &BrailleRun, cfg: &CanvasConfig) -> (f64, f64) {
    let w = cfg.bbox_width(run.cells.len());
    (centre - w / 2.0, centre + w / 2.0)
}

/// One legend entry before placement.
struct LegendEntry {
    series: Option<usize>,
    text: String,
    run: BrailleRun,
    truncated: bool,
}

impl LegendEntry {
    fn width(&self, cfg: &CanvasConfig) -> f64 {
        let text_w = cfg.bbox_width(self.run.cells.len());
        match self.series {
            Some(_) => SWATCH_WIDTH_MM + cfg.min_gap_mm + text_w,
            None => text_w,
        }
    }
}

/// Plot rectangle, data transform and the label placement decisions that
/// determined them.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotGeometry {
    pub plot: Rect,
    pub transform: PlotTransform,
    /// Row (0 or 1) of each x tick label.
    pub x_label_rows: Vec<usize>,
    x_label_top: f64,
    x_title_top: f64,
    y_title_top: f64,
    legend_top: f64,
}

struct Plan {
    geometry: PlotGeometry,
    title: BrailleRun,
    x_title: (BrailleRun, bool),
    y_title: (BrailleRun, bool),
    legend: Vec<Vec<LegendEntry>>,
}

fn axis_map(domain: &Domain, ticks: &[TickLabel], mm_lo: f64, mm_hi: f64) -> AxisMap {
    let (data_lo, data_hi) = match domain {
        Domain::Categories(c) => (-0.5, c.len() as f64 - 0.5),
        Domain::Numeric { .. } => (
            ticks[0].value.position(),
            ticks[ticks.len() - 1].value.position(),
        ),
    };
    AxisMap {
        data_lo,
        data_hi,
        mm_lo,
        mm_hi,
    }
}

fn plan(spec: &ChartSpec, ticks: &AxisTicks, cfg: &CanvasConfig) -> Result<Plan, LayoutError> {
    cfg.validate()?;
    // a single category is the only axis allowed one tick
    if ticks.y.len() < 2 {
        return Err(LayoutError::TooFewTicks(ticks.y.len()));
    }
    if ticks.x.len() < 2 && spec.x_axis().domain().categories().is_none() {
        return Err(LayoutError::TooFewTicks(ticks.x.len()));
    }
    let (w, h, m, gap) = (cfg.width_mm, cfg.height_mm, cfg.margin_mm, cfg.min_gap_mm);
    let avail_w = w - 2.0 * m;
    let bbox_h = cfg.bbox_height();

    let title = transcribe(spec.title())?;
    if cfg.bbox_width(title.cells.len()) > avail_w {
        return Err(LayoutError::CanvasOverflow(format!(
            "title needs {:.1} mm but only {avail_w:.1} mm are available",
            cfg.bbox_width(title.cells.len())
        )));
    }
    let fit = |text: &str, what: &str| -> Result<(BrailleRun, bool), LayoutError> {
        let run = transcribe(text)?;
        fit_run(&run, avail_w, cfg)
            .ok_or_else(|| LayoutError::CanvasOverflow(format!("no room for the {what}")))
    };
    let y_title = fit(spec.y_axis().title(), "y-axis title")?;
    let x_title = fit(spec.x_axis().title(), "x-axis title")?;

    // legend: flow layout, wrapping to a new row when an entry does not fit
    let mut legend: Vec<Vec<LegendEntry>> = Vec::new();
    if spec.series().len() > 1 {
        let mut entries = Vec::new();
        if let Some(t) = spec.legend_title() {
            let (run, truncated) = fit(t, "legend title")?;
            entries.push(LegendEntry {
                series: None,
                text: t.to_string(),
                run,
                truncated,
            });
        }
        for (k, s) in spec.series().iter().enumerate() {
            let run = transcribe(&s.name)?;
            let (run, truncated) = fit_run(&run, avail_w - SWATCH_WIDTH_MM - gap, cfg)
                .ok_or_else(|| LayoutError::CanvasOverflow("no room for legend entries".into()))?;
            entries.push(LegendEntry {
                series: Some(k),
                text: s.name.clone(),
                run,
                truncated,
            });
        }
        let spacing = 3.0 * gap;
        let mut row: Vec<LegendEntry> = Vec::new();
        let mut used = 0.0;
        for e in entries {
            let ew = e.width(cfg);
            if !row.is_empty() && used + spacing + ew > avail_w {
                legend.push(std::mem::take(&mut row));
                used = 0.0;
            }
            used += if row.is_empty() { ew } else { spacing + ew };
            row.push(e);
        }
        if !row.is_empty() {
            legend.push(row);
        }
    }

    // horizontal extent of the plot
    let y_label_w = ticks
        .y
        .iter()
        .map(|t| cfg.bbox_width(t.braille.cells.len()))
        .fold(0.0, f64::max);
    let half = |t: Option<&TickLabel>| t.map_or(0.0, |t| cfg.bbox_width(t.braille.cells.len()) / 2.0);
    let plot_left = (m + y_label_w + gap + cfg.tick_length_mm).max(m + half(ticks.x.first()));
    let plot_right = w - m - half(ticks.x.last());
    if plot_right - plot_left < MIN_PLOT_MM {
        return Err(LayoutError::CanvasOverflow(format!(
            "plot would be {:.1} mm wide",
            plot_right - plot_left
        )));
    }
    let x_map = axis_map(spec.x_axis().domain(), &ticks.x, plot_left, plot_right);

    // x labels: one row, or two staggered rows when neighbours collide
    let spans: Vec<(f64, f64)> = ticks
        .x
        .iter()
        .map(|t| label_interval(x_map.apply(t.value.position()), &t.braille, cfg))
        .collect();
    let collide = |a: usize, b: usize| spans[a].1 + gap > spans[b].0;
    let x_label_rows: Vec<usize> = if (1..spans.len()).any(|i| collide(i - 1, i)) {
        if let Some(i) = (2..spans.len()).find(|&i| collide(i - 2, i)) {
            return Err(LayoutError::LabelCollision(format!(
                "x tick labels `{}` and `{}` overlap even when staggered",
                ticks.x[i - 2].label_text,
                ticks.x[i].label_text
            )));
        }
        (0..spans.len()).map(|i| i % 2).collect()
    } else {
        vec![0; spans.len()]
    };
    let rows = x_label_rows.iter().max().map_or(1, |r| r + 1) as f64;

    // vertical stack
    let y_title_top = m + bbox_h + gap;
    let plot_top = y_title_top + bbox_h + gap + bbox_h / 2.0;
    let legend_h = if legend.is_empty() {
        0.0
    } else {
        legend.len() as f64 * (bbox_h + gap)
    };
    let legend_top = h - m - legend_h + gap;
    let x_title_top = h - m - legend_h - bbox_h;
    let label_offset = (cfg.tick_length_mm + gap).max(bbox_h / 2.0 + gap);
    let labels_h = rows * bbox_h + (rows - 1.0) * gap;
    let plot_bottom = x_title_top - gap - labels_h - label_offset;
    if plot_bottom - plot_top < MIN_PLOT_MM {
        return Err(LayoutError::CanvasOverflow(format!(
            "plot would be {:.1} mm tall",
            plot_bottom - plot_top
        )));
    }
    let y_map = axis_map(spec.y_axis().domain(), &ticks.y, plot_bottom, plot_top);
    let mut centres: Vec<(f64, &str)> = ticks
        .y
        .iter()
        .map(|t| (y_map.apply(t.value.position()), t.label_text.as_str()))
        .collect();
    centres.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in centres.windows(2) {
        if pair[1].0 - pair[0].0 < bbox_h + gap {
            return Err(LayoutError::LabelCollision(format!(
                "y tick labels `{}` and `{}` are too close",
                pair[0].1, pair[1].1
            )));
        }
    }

    Ok(Plan {
        geometry: PlotGeometry {
            plot: Rect::new(plot_left, plot_top, plot_right - plot_left, plot_bottom - plot_top),
            transform: PlotTransform { x: x_map, y: y_map },
            x_label_rows,
            x_label_top: plot_bottom + label_offset,
            x_title_top,
            y_title_top,
            legend_top,
        },
        title,
        x_title,
        y_title,
        legend,
    })
}

/// Plot rectangle and data transform for a spec and its ticks.
pub fn plot_geometry(spec: &ChartSpec, ticks: &AxisTicks, cfg: &CanvasConfig) -> Result<PlotGeometry, LayoutError> {
    plan(spec, ticks, cfg).map(|p| p.geometry)
}

/// Exact text of a data value as it appears in descriptions.
pub fn value_text(v: f64, encoding: Encoding, domain: &Domain) -> String {
    match (encoding, domain) {
        (Encoding::Text, Domain::Categories(c)) => c.get(v as usize).cloned().unwrap_or_default(),
        (Encoding::DateTime, _) => format_date(v),
        _ => format!("{v}"),
    }
}

fn kind_phrase(kind: TextKind) -> &'static str {
    match kind {
        TextKind::Title => "Chart title",
        TextKind::AxisTitle(Axis::X) => "X axis title",
        TextKind::AxisTitle(Axis::Y) => "Y axis title",
        TextKind::TickLabel(Axis::X) => "X axis label",
        TextKind::TickLabel(Axis::Y) => "Y axis label",
        TextKind::LegendTitle => "Legend title",
        TextKind::LegendName => "Legend entry",
    }
}

fn chart_phrase(t: ChartType) -> &'static str {
    match t {
        ChartType::Line => "Line series",
        ChartType::Bar => "Bar series",
        ChartType::Scatter => "Scatter series",
        ChartType::ErrorBar => "Error bar series",
    }
}

#[derive(Default)]
struct Layers {
    frame: Vec<SceneElement>,
    ticks: Vec<SceneElement>,
    data: Vec<SceneElement>,
    bboxes: Vec<SceneElement>,
    runs: Vec<SceneElement>,
    legend: Vec<SceneElement>,
    pairs: usize,
}

fn element(role: Role, layer: Layer, geometry: Geometry, style: TactileStyle) -> SceneElement {
    SceneElement {
        role,
        layer,
        series: None,
        geometry,
        style,
        title: String::new(),
        description: String::new(),
        source_ref: None,
        text: None,
    }
}

impl Layers {
    /// Adds a Braille run and its bounding box with the box's top-left at `at`.
    #[allow(clippy::too_many_arguments)]
    fn text(
        &mut self,
        cfg: &CanvasConfig,
        kind: TextKind,
        full_text: &str,
        run: &BrailleRun,
        truncated: bool,
        at: Point2,
        title: String,
        series: Option<usize>,
    ) {
        if run.is_empty() {
            return;
        }
        let pad = cfg.bbox_padding_mm;
        let pair = self.pairs;
        self.pairs += 1;
        let info = TextInfo {
            kind,
            text: full_text.to_string(),
            pair,
            truncated,
        };
        let phrase = kind_phrase(kind);
        let mut description = format!("{phrase}: {full_text}");
        if truncated {
            description.push_str(" (shortened in Braille)");
        }
        let bbox = Rect::new(at.x, at.y, cfg.bbox_width(run.cells.len()), cfg.bbox_height());
        let layer = if series.is_some() || kind == TextKind::LegendTitle {
            Layer::Legend
        } else {
            Layer::Labels
        };
        let mut b = element(Role::TextBbox, layer, Geometry::Rect(bbox), TactileStyle::solid(BBOX_STROKE_MM));
        b.series = series;
        b.title = format!("{title} box");
        b.description = format!("Bounding box around the {}: {full_text}", phrase.to_lowercase());
        b.text = Some(info.clone());
        let mut r = element(
            Role::BrailleText,
            layer,
            Geometry::Braille {
                origin: Point2::new(at.x + pad, at.y + pad),
                cells: run.cells.clone(),
            },
            TactileStyle::solid(BBOX_STROKE_MM),
        );
        r.series = series;
        r.title = title;
        r.description = description;
        r.text = Some(info);
        if layer == Layer::Legend {
            self.legend.push(b);
            self.legend.push(r);
        } else {
            self.bboxes.push(b);
            self.runs.push(r);
        }
    }

    fn finish(self) -> Vec<SceneElement> {
        let mut out = self.frame;
        out.extend(self.ticks);
        out.extend(self.data);
        out.extend(self.bboxes);
        out.extend(self.runs);
        out.extend(self.legend);
        out
    }
}

fn line(a: Point2, b: Point2) -> Geometry {
    Geometry::Polyline(vec![a, b])
}

/// Builds the tactile scene for a simplified spec.
pub fn layout_scene(input: &LayoutInput<'_>, cfg: &CanvasConfig) -> Result<TactileScene, LayoutError> {
    let spec = input.spec;
    let series = spec.series();
    if input.styles.len() != series.len() {
        return Err(LayoutError::StyleCount {
            styles: input.styles.len(),
            series: series.len(),
        });
    }
    let plan = plan(spec, input.ticks, cfg)?;
    let g = &plan.geometry;
    let (plot, tf) = (g.plot, g.transform);
    let (m, gap, bbox_h) = (cfg.margin_mm, cfg.min_gap_mm, cfg.bbox_height());
    let mut layers = Layers::default();

    // frame and ticks
    for (axis, geom) in [
        (Axis::X, line(Point2::new(plot.x, plot.bottom()), Point2::new(plot.right(), plot.bottom()))),
        (Axis::Y, line(Point2::new(plot.x, plot.y), Point2::new(plot.x, plot.bottom()))),
    ] {
        let mut e = element(Role::Frame, Layer::Frame, geom, TactileStyle::solid(FRAME_STROKE_MM));
        e.title = format!("{} axis", axis.tag().to_uppercase());
        layers.frame.push(e);
    }
    for (i, t) in input.ticks.x.iter().enumerate() {
        let x = tf.x.apply(t.value.position());
        let mut e = element(
            Role::Tick,
            Layer::Axes,
            line(Point2::new(x, plot.bottom()), Point2::new(x, plot.bottom() + cfg.tick_length_mm)),
            TactileStyle::solid(TICK_STROKE_MM),
        );
        e.title = format!("X tick {i}");
        layers.ticks.push(e);
    }
    for (i, t) in input.ticks.y.iter().enumerate() {
        let y = tf.y.apply(t.value.position());
        let mut e = element(
            Role::Tick,
            Layer::Axes,
            line(Point2::new(plot.x - cfg.tick_length_mm, y), Point2::new(plot.x, y)),
            TactileStyle::solid(TICK_STROKE_MM),
        );
        e.title = format!("Y tick {i}");
        layers.ticks.push(e);
    }

    layout_data(input, cfg, &plot, &tf, &mut layers.data)?;

    // titles
    let title_w = cfg.bbox_width(plan.title.cells.len());
    layers.text(
        cfg,
        TextKind::Title,
        spec.title(),
        &plan.title,
        false,
        Point2::new((cfg.width_mm - title_w) / 2.0, m),
        "Chart title".into(),
        None,
    );
    let (yt, yt_cut) = &plan.y_title;
    layers.text(
        cfg,
        TextKind::AxisTitle(Axis::Y),
        spec.y_axis().title(),
        yt,
        *yt_cut,
        Point2::new(m, g.y_title_top),
        "Y axis title".into(),
        None,
    );
    let (xt, xt_cut) = &plan.x_title;
    let xt_w = cfg.bbox_width(xt.cells.len());
    let xt_x = (plot.x + plot.w / 2.0 - xt_w / 2.0).clamp(m, cfg.width_mm - m - xt_w);
    layers.text(
        cfg,
        TextKind::AxisTitle(Axis::X),
        spec.x_axis().title(),
        xt,
        *xt_cut,
        Point2::new(xt_x, g.x_title_top),
        "X axis title".into(),
        None,
    );

    // tick labels
    for (i, t) in input.ticks.x.iter().enumerate() {
        let (x0, _) = label_interval(tf.x.apply(t.value.position()), &t.braille, cfg);
        let top = g.x_label_top + g.x_label_rows[i] as f64 * (bbox_h + gap);
        layers.text(
            cfg,
            TextKind::TickLabel(Axis::X),
            &t.label_text,
            &t.braille,
            false,
            Point2::new(x0, top),
            format!("X axis label {i}"),
            None,
        );
    }
    let y_label_right = plot.x - cfg.tick_length_mm - gap;
    for (i, t) in input.ticks.y.iter().enumerate() {
        let y = tf.y.apply(t.value.position());
        let w = cfg.bbox_width(t.braille.cells.len());
        layers.text(
            cfg,
            TextKind::TickLabel(Axis::Y),
            &t.label_text,
            &t.braille,
            false,
            Point2::new(y_label_right - w, y - bbox_h / 2.0),
            format!("Y axis label {i}"),
            None,
        );
    }

    // legend rows
    let spacing = 3.0 * gap;
    for (r, row) in plan.legend.iter().enumerate() {
        let top = g.legend_top + r as f64 * (bbox_h + gap);
        let mut x = m;
        for e in row {
            match e.series {
                None => layers.text(
                    cfg,
                    TextKind::LegendTitle,
                    &e.text,
                    &e.run,
                    e.truncated,
                    Point2::new(x, top),
                    "Legend title".into(),
                    None,
                ),
                Some(k) => {
                    let style = &input.styles[k];
                    let centre = Point2::new(x + SWATCH_WIDTH_MM / 2.0, top + bbox_h / 2.0);
                    for geom in swatch(spec.chart_type(), style, centre, cfg) {
                        let mut s = element(Role::LegendItem, Layer::Legend, geom, style.clone());
                        s.series = Some(k);
                        s.title = format!("Legend swatch {k}");
                        s.description = format!(
                            "Legend sample for series {}: {}",
                            series[k].name,
                            style_phrase(spec.chart_type(), style)
                        );
                        layers.legend.push(s);
                    }
                    layers.text(
                        cfg,
                        TextKind::LegendName,
                        &e.text,
                        &e.run,
                        e.truncated,
                        Point2::new(x + SWATCH_WIDTH_MM + gap, top),
                        format!("Legend name {k}"),
                        Some(k),
                    );
                }
            }
            x += e.width(cfg) + spacing;
        }
    }

    let scene = TactileScene {
        canvas: Canvas {
            width_mm: cfg.width_mm,
            height_mm: cfg.height_mm,
        },
        elements: layers.finish(),
        chart_type: spec.chart_type(),
        title: spec.title().to_string(),
        series_names: series.iter().map(|s| s.name.clone()).collect(),
        series_styles: input.styles.to_vec(),
        x_categories: spec.x_axis().domain().categories().map(<[String]>::len),
        spec_document: input.spec_document.to_string(),
    };
    scene.check()?;
    Ok(scene)
}

/// How a style reads by touch, for legend descriptions.
pub fn style_phrase(chart_type: ChartType, style: &TactileStyle) -> String {
    match chart_type {
        ChartType::Line => style.describe_stroke(),
        ChartType::Scatter => format!("{} markers", style.marker().tag()),
        ChartType::Bar => format!("{} fill", style.hatch().tag().replace('_', " ")),
        ChartType::ErrorBar => format!(
            "{} markers with error whiskers, {} fill",
            style.marker().tag(),
            style.hatch().tag().replace('_', " ")
        ),
    }
}

fn swatch(chart_type: ChartType, style: &TactileStyle, c: Point2, cfg: &CanvasConfig) -> Vec<Geometry> {
    let half = SWATCH_WIDTH_MM / 2.0;
    let marker = Geometry::Marker {
        center: c,
        shape: style.marker(),
        size_mm: cfg.marker_size_mm,
    };
    match chart_type {
        ChartType::Line => vec![line(Point2::new(c.x - half, c.y), Point2::new(c.x + half, c.y))],
        ChartType::Scatter => vec![marker],
        ChartType::Bar => vec![Geometry::Rect(Rect::new(c.x - half, c.y - 4.0, SWATCH_WIDTH_MM, 8.0))],
        ChartType::ErrorBar => {
            let (top, bottom) = (c.y - 5.0, c.y + 5.0);
            let cap = CAP_WIDTH_MM / 2.0;
            vec![
                Geometry::Polylines(vec![
                    vec![Point2::new(c.x, top), Point2::new(c.x, bottom)],
                    vec![Point2::new(c.x - cap, top), Point2::new(c.x + cap, top)],
                    vec![Point2::new(c.x - cap, bottom), Point2::new(c.x + cap, bottom)],
                ]),
                marker,
            ]
        }
    }
}

fn layout_data(
    input: &LayoutInput<'_>,
    cfg: &CanvasConfig,
    plot: &Rect,
    tf: &PlotTransform,
    out: &mut Vec<SceneElement>,
) -> Result<(), LayoutError> {
    let spec = input.spec;
    let (xa, ya) = (spec.x_axis(), spec.y_axis());
    let xt = |v: f64| value_text(v, xa.encoding(), xa.domain());
    let yt = |v: f64| value_text(v, ya.encoding(), ya.domain());
    let pair = |p: &DataPoint| format!("({}; {})", xt(p.x), yt(p.y));
    let n_series = spec.series().len();
    let phrase = chart_phrase(spec.chart_type());
    let gap = cfg.min_gap_mm;

    for (k, s) in spec.series().iter().enumerate() {
        let style = &input.styles[k];
        let mut push = |role: Role, geometry: Geometry, title: String, description: String, idx: Option<usize>| {
            let mut e = element(role, Layer::Data, geometry, style.clone());
            e.series = Some(k);
            e.title = title;
            e.description = description;
            e.source_ref = idx.map(|index| SourceRef {
                series: s.name.clone(),
                index,
            });
            out.push(e);
        };
        match spec.chart_type() {
            ChartType::Line => {
                let pts: Vec<Point2> = s.points.iter().map(|p| tf.apply(*p)).collect();
                let pts = match input.smoothing {
                    Smoothing::Chaikin { iterations } => smooth_polyline(&pts, iterations),
                    Smoothing::Off => pts,
                };
                let values: Vec<String> = s.points.iter().map(pair).collect();
                push(
                    Role::DataPath,
                    Geometry::Polyline(pts),
                    format!("Series {}", s.name),
                    format!(
                        "{phrase} \"{}\", {} points: {}",
                        s.name,
                        s.points.len(),
                        values.join(" ")
                    ),
                    None,
                );
            }
            ChartType::Scatter => {
                let all: Vec<usize>;
                let idx = match input.selected.get(k).and_then(Option::as_ref) {
                    Some(sel) => sel.as_slice(),
                    None => {
                        all = (0..s.points.len()).collect();
                        &all
                    }
                };
                for &i in idx {
                    let p = &s.points[i];
                    push(
                        Role::DataMark,
                        Geometry::Marker {
                            center: tf.apply(*p),
                            shape: style.marker(),
                            size_mm: cfg.marker_size_mm,
                        },
                        format!("Series {} point {i}", s.name),
                        format!(
                            "{phrase} \"{}\", point {i} of {}: {}",
                            s.name,
                            s.points.len(),
                            pair(p)
                        ),
                        Some(i),
                    );
                }
            }
            ChartType::Bar => {
                let n_cat = xa.domain().categories().map_or(1, <[String]>::len);
                let slot = plot.w / n_cat as f64;
                let group = (slot * BAR_GROUP_FILL).min(slot - gap);
                let bw = (group - (n_series as f64 - 1.0) * gap) / n_series as f64;
                if bw < MIN_BAR_WIDTH_MM {
                    return Err(LayoutError::CanvasOverflow(format!(
                        "bars would be {bw:.2} mm wide; at least {MIN_BAR_WIDTH_MM} mm are needed"
                    )));
                }
                let (lo, _) = ya.domain().bounds();
                let base = tf.y.apply(lo.max(0.0));
                for (i, p) in s.points.iter().enumerate() {
                    let centre = tf.x.apply(p.x);
                    let x0 = centre - group / 2.0 + k as f64 * (bw + gap);
                    let y = tf.y.apply(p.y);
                    push(
                        Role::Bar,
                        Geometry::Rect(Rect::new(x0, y.min(base), bw, (y - base).abs())),
                        format!("Series {} bar {}", s.name, xt(p.x)),
                        format!("{phrase} \"{}\", point {i}: {}", s.name, pair(p)),
                        Some(i),
                    );
                }
            }
            ChartType::ErrorBar => {
                let errs = s.y_err.as_deref().unwrap_or(&[]);
                let dodge = (k as f64 - (n_series as f64 - 1.0) / 2.0) * (cfg.marker_size_mm + gap);
                let centres: Vec<Point2> = s
                    .points
                    .iter()
                    .map(|p| {
                        let c = tf.apply(*p);
                        Point2::new(c.x + dodge, c.y)
                    })
                    .collect();
                let min_sep = cfg.marker_size_mm + gap;
                for i in 0..centres.len() {
                    for j in i + 1..centres.len() {
                        if centres[i].distance(centres[j]) < min_sep {
                            return Err(LayoutError::CanvasOverflow(format!(
                                "markers {i} and {j} of series `{}` are closer than {min_sep} mm",
                                s.name
                            )));
                        }
                    }
                }
                for (i, (p, c)) in s.points.iter().zip(&centres).enumerate() {
                    let e = errs.get(i).copied().unwrap_or(0.0);
                    let (top, bottom) = (tf.y.apply(p.y + e), tf.y.apply(p.y - e));
                    let cap = CAP_WIDTH_MM / 2.0;
                    push(
                        Role::DataMark,
                        Geometry::Marker {
                            center: *c,
                            shape: style.marker(),
                            size_mm: cfg.marker_size_mm,
                        },
                        format!("Series {} point {i}", s.name),
                        format!("{phrase} \"{}\", point {i}: {} ± {}", s.name, pair(p), yt(e)),
                        Some(i),
                    );
                    push(
                        Role::ErrorbarWhisker,
                        Geometry::Polylines(vec![
                            vec![Point2::new(c.x, top), Point2::new(c.x, bottom)],
                            vec![Point2::new(c.x - cap, top), Point2::new(c.x + cap, top)],
                            vec![Point2::new(c.x - cap, bottom), Point2::new(c.x + cap, bottom)],
                        ]),
                        format!("Series {} error bar {i}", s.name),
                        format!(
                            "Error bar of series \"{}\", point {i}: from {} to {}",
                            s.name,
                            yt(p.y - e),
                            yt(p.y + e)
                        ),
                        Some(i),
                    );
                }
            }
        }
    }
    Ok(())
}
