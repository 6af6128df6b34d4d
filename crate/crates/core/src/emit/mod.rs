//! SVG serialization of a [`TactileScene`].
//!
//! Output conventions read back by the validator:
//!
//! * the root carries `viewBox="0 0 W H"` and `tc:units="mm"`, never a fixed size,
//! * every tactile element carries `tc:role`; described roles get `title` and `desc` children,
//! * Braille runs are `g` elements of dot circles with `tc:role="braille-text"`,
//!   `tc:kind`, `tc:axis` (tick labels and axis titles) and `tc:bbox`,
//! * each series is a `g` with id `<prefix>-series-<k>`,
//! * markers carry `tc:marker`, `tc:cx`, `tc:cy` and `tc:size`.

mod xml;

use std::collections::BTreeSet;

use thiserror::Error;

pub use xml::num;
use xml::XmlWriter;

use crate::braille::{cell_dots, dot_offset, CELL_ADVANCE_MM, DOT_DIAMETER_MM};
use crate::model::{
    Geometry, Hatch, Layer, MarkerShape, Point2, Rect, Role, SceneElement, SceneError, TactileScene,
    TactileStyle,
};

pub const SVG_NS: &str = "http://www.w3.org/2000/svg";
pub const TC_NS: &str = "urn:tactograph:svg:1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Tactile,
    Visual,
}

impl Variant {
    pub fn tag(self) -> &'static str {
        match self {
            Variant::Tactile => "tactile",
            Variant::Visual => "visual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitConfig {
    pub variant: Variant,
    pub pretty: bool,
    pub id_prefix: String,
}

impl Default for EmitConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Tactile,
            pretty: true,
            id_prefix: "tc".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmitError {
    #[error("id prefix `{0}` is not a valid XML name")]
    BadPrefix(String),
    #[error("scene rejected: {0}")]
    Scene(#[from] SceneError),
}

impl EmitConfig {
    pub fn validate(&self) -> Result<(), EmitError> {
        let mut chars = self.id_prefix.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if ok {
            Ok(())
        } else {
            Err(EmitError::BadPrefix(self.id_prefix.clone()))
        }
    }
}

const VISUAL_COLOURS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
const VISUAL_STROKE_MM: f64 = 0.3;
const VISUAL_FONT_MM: f64 = 5.0;
const HATCH_TILE_MM: f64 = 6.0;
const HATCH_STROKE_MM: f64 = 1.0;
const MARKER_STROKE_MM: f64 = 1.5;

struct Emitter<'a> {
    w: XmlWriter,
    cfg: &'a EmitConfig,
    scene: &'a TactileScene,
}

type Attr = (&'static str, String);

fn points_attr(pts: &[Point2]) -> String {
    pts.iter()
        .map(|p| format!("{},{}", num(p.x), num(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn path_d(lines: &[Vec<Point2>]) -> String {
    let mut d = Vec::new();
    for line in lines {
        for (i, p) in line.iter().enumerate() {
            d.push(format!("{}{},{}", if i == 0 { "M" } else { "L" }, num(p.x), num(p.y)));
        }
    }
    d.join(" ")
}

fn dasharray(style: &TactileStyle) -> Option<String> {
    if style.is_solid() {
        return None;
    }
    let parts: Vec<String> = style
        .dash_pattern()
        .iter()
        .flat_map(|d| [num(d.on_mm), num(d.off_mm)])
        .collect();
    Some(parts.join(" "))
}

fn hatch_id(prefix: &str, h: Hatch) -> String {
    format!("{prefix}-hatch-{}", h.tag().replace('_', "-"))
}

fn marker_shape(shape: MarkerShape, c: Point2, size: f64) -> (&'static str, Vec<Attr>, bool) {
    let h = size / 2.0;
    let p = |x: f64, y: f64| format!("{},{}", num(x), num(y));
    match shape {
        MarkerShape::Circle => (
            "circle",
            vec![("cx", num(c.x)), ("cy", num(c.y)), ("r", num(h))],
            true,
        ),
        MarkerShape::Square => (
            "rect",
            vec![
                ("x", num(c.x - h)),
                ("y", num(c.y - h)),
                ("width", num(size)),
                ("height", num(size)),
            ],
            true,
        ),
        MarkerShape::Triangle => (
            "path",
            vec![(
                "d",
                format!("M{} L{} L{} Z", p(c.x, c.y - h), p(c.x + h, c.y + h), p(c.x - h, c.y + h)),
            )],
            true,
        ),
        MarkerShape::Diamond => (
            "path",
            vec![(
                "d",
                format!(
                    "M{} L{} L{} L{} Z",
                    p(c.x, c.y - h),
                    p(c.x + h, c.y),
                    p(c.x, c.y + h),
                    p(c.x - h, c.y)
                ),
            )],
            true,
        ),
        MarkerShape::Cross => (
            "path",
            vec![(
                "d",
                format!(
                    "M{} L{} M{} L{}",
                    p(c.x - h, c.y - h),
                    p(c.x + h, c.y + h),
                    p(c.x - h, c.y + h),
                    p(c.x + h, c.y - h)
                ),
            )],
            false,
        ),
        MarkerShape::Plus => (
            "path",
            vec![(
                "d",
                format!("M{} L{} M{} L{}", p(c.x - h, c.y), p(c.x + h, c.y), p(c.x, c.y - h), p(c.x, c.y + h)),
            )],
            false,
        ),
    }
}

impl<'a> Emitter<'a> {
    fn tactile(&self) -> bool {
        self.cfg.variant == Variant::Tactile
    }

    fn id(&self, suffix: &str) -> String {
        format!("{}-{suffix}", self.cfg.id_prefix)
    }

    fn colour(&self, el: &SceneElement) -> &'static str {
        match (self.cfg.variant, el.series) {
            (Variant::Visual, Some(k)) if matches!(el.layer, Layer::Data | Layer::Legend) => {
                VISUAL_COLOURS[k % VISUAL_COLOURS.len()]
            }
            (Variant::Visual, _) => "#333333",
            (Variant::Tactile, _) => "black",
        }
    }

    fn stroke_width(&self, style: &TactileStyle) -> f64 {
        if self.tactile() {
            style.stroke_width_mm()
        } else {
            VISUAL_STROKE_MM
        }
    }

    fn stroke_attrs(&self, el: &SceneElement) -> Vec<Attr> {
        let mut a = vec![
            ("fill", "none".to_string()),
            ("stroke", self.colour(el).to_string()),
            ("stroke-width", num(self.stroke_width(&el.style))),
        ];
        if matches!(el.role, Role::DataPath | Role::LegendItem) {
            if let Some(d) = dasharray(&el.style) {
                a.push(("stroke-dasharray", d));
            }
        }
        a
    }

    fn fill_for(&self, el: &SceneElement) -> String {
        if !self.tactile() {
            return self.colour(el).to_string();
        }
        match el.style.hatch() {
            Hatch::SolidFill => "black".to_string(),
            h => format!("url(#{})", hatch_id(&self.cfg.id_prefix, h)),
        }
    }

    fn common_attrs(&self, el: &SceneElement) -> Vec<Attr> {
        let mut a = vec![("tc:role", el.role.tag().to_string())];
        if let Some(k) = el.series {
            a.push(("tc:series", k.to_string()));
        }
        if let Some(src) = &el.source_ref {
            a.push(("tc:index", src.index.to_string()));
        }
        a
    }

    fn described(&mut self, el: &SceneElement) {
        if el.role.is_described() {
            self.w.text_element("title", &[], &el.title);
            self.w.text_element("desc", &[], &el.description);
        }
    }

    /// Writes `name` with `attrs`, adding title/desc children when required.
    fn shape(&mut self, el: &SceneElement, name: &'static str, attrs: Vec<Attr>) {
        let attrs: Vec<(&str, String)> = attrs.into_iter().collect();
        if el.role.is_described() {
            self.w.open(name, &attrs);
            self.described(el);
            self.w.close();
        } else {
            self.w.empty(name, &attrs);
        }
    }

    fn element(&mut self, el: &SceneElement) {
        let mut attrs = self.common_attrs(el);
        match &el.geometry {
            Geometry::Polyline(pts) if pts.len() == 2 => {
                attrs.extend([
                    ("x1", num(pts[0].x)),
                    ("y1", num(pts[0].y)),
                    ("x2", num(pts[1].x)),
                    ("y2", num(pts[1].y)),
                ]);
                attrs.extend(self.stroke_attrs(el));
                attrs.push(("stroke-linecap", "round".into()));
                self.shape(el, "line", attrs);
            }
            Geometry::Polyline(pts) => {
                attrs.push(("points", points_attr(pts)));
                attrs.extend(self.stroke_attrs(el));
                attrs.push(("stroke-linejoin", "round".into()));
                self.shape(el, "polyline", attrs);
            }
            Geometry::Polylines(lines) => {
                attrs.push(("d", path_d(lines)));
                attrs.extend(self.stroke_attrs(el));
                self.shape(el, "path", attrs);
            }
            Geometry::Rect(r) => self.rect(el, r, attrs),
            Geometry::Marker { center, shape, size_mm } => {
                let size = if self.tactile() { *size_mm } else { size_mm / 2.0 };
                let (name, geo, filled) = marker_shape(*shape, *center, size);
                attrs.extend(geo);
                if filled {
                    attrs.push(("fill", self.colour(el).to_string()));
                } else {
                    let w = if self.tactile() { MARKER_STROKE_MM } else { VISUAL_STROKE_MM };
                    attrs.extend([
                        ("fill", "none".to_string()),
                        ("stroke", self.colour(el).to_string()),
                        ("stroke-width", num(w)),
                    ]);
                }
                attrs.extend([
                    ("tc:marker", shape.tag().to_string()),
                    ("tc:cx", num(center.x)),
                    ("tc:cy", num(center.y)),
                    ("tc:size", num(size)),
                ]);
                self.shape(el, name, attrs);
            }
            Geometry::Braille { origin, cells } => self.braille(el, *origin, cells, attrs),
        }
    }

    fn rect(&mut self, el: &SceneElement, r: &Rect, mut attrs: Vec<Attr>) {
        if el.role == Role::TextBbox && !self.tactile() {
            return;
        }
        attrs.extend([
            ("x", num(r.x)),
            ("y", num(r.y)),
            ("width", num(r.w)),
            ("height", num(r.h)),
        ]);
        match el.role {
            Role::TextBbox => {
                let pair = el.text.as_ref().map_or(0, |t| t.pair);
                attrs.push(("tc:for", self.id(&format!("text-{pair}"))));
                attrs.extend(self.stroke_attrs(el));
            }
            _ => {
                attrs.push(("fill", self.fill_for(el)));
                if self.tactile() {
                    attrs.extend([
                        ("stroke", "black".to_string()),
                        ("stroke-width", num(el.style.stroke_width_mm())),
                        ("tc:hatch", el.style.hatch().tag().to_string()),
                    ]);
                }
            }
        }
        self.shape(el, "rect", attrs);
    }

    fn braille(&mut self, el: &SceneElement, origin: Point2, cells: &[char], mut attrs: Vec<Attr>) {
        let info = el.text.as_ref();
        let pair = info.map_or(0, |t| t.pair);
        let full = info.map_or("", |t| t.text.as_str());
        let mut id_attrs: Vec<Attr> = vec![("id", self.id(&format!("text-{pair}")))];
        id_attrs.append(&mut attrs);
        let mut attrs = id_attrs;
        if let Some(t) = info {
            attrs.push(("tc:kind", t.kind.tag().to_string()));
            if let Some(axis) = t.kind.axis() {
                attrs.push(("tc:axis", axis.tag().to_string()));
            }
            attrs.push(("tc:text", full.to_string()));
        }
        if !self.tactile() {
            attrs.retain(|(k, _)| *k != "tc:role");
            attrs.insert(1, ("tc:role", "latin-text".to_string()));
            attrs.extend([
                ("x", num(origin.x)),
                ("y", num(origin.y + 7.5)),
                ("font-family", "sans-serif".to_string()),
                ("font-size", num(VISUAL_FONT_MM)),
                ("fill", "#000000".to_string()),
            ]);
            let attrs: Vec<(&str, String)> = attrs.into_iter().collect();
            self.w.open("text", &attrs);
            self.described(el);
            self.w.text(full);
            self.w.close();
            return;
        }
        let bounds = el.geometry.bounds();
        attrs.push(("tc:cells", cells.iter().collect()));
        attrs.push((
            "tc:bbox",
            format!("{} {} {} {}", num(bounds.x), num(bounds.y), num(bounds.w), num(bounds.h)),
        ));
        attrs.push(("fill", "black".to_string()));
        let attrs: Vec<(&str, String)> = attrs.into_iter().collect();
        self.w.open("g", &attrs);
        self.described(el);
        let r = num(DOT_DIAMETER_MM / 2.0);
        for (i, &cell) in cells.iter().enumerate() {
            let x0 = origin.x + i as f64 * CELL_ADVANCE_MM;
            for d in cell_dots(cell) {
                let (dx, dy) = dot_offset(d);
                self.w.empty(
                    "circle",
                    &[("cx", num(x0 + dx)), ("cy", num(origin.y + dy)), ("r", r.clone())],
                );
            }
        }
        self.w.close();
    }

    fn defs(&mut self) {
        if !self.tactile() {
            return;
        }
        let hatches: BTreeSet<&'static str> = self
            .scene
            .elements
            .iter()
            .filter(|e| matches!(e.geometry, Geometry::Rect(_)) && matches!(e.role, Role::Bar | Role::LegendItem))
            .map(|e| e.style.hatch())
            .filter(|h| *h != Hatch::SolidFill)
            .map(Hatch::tag)
            .collect();
        if hatches.is_empty() {
            return;
        }
        self.w.open("defs", &[]);
        let t = HATCH_TILE_MM;
        let sw = num(HATCH_STROKE_MM);
        for tag in hatches {
            let h = match tag {
                "horizontal" => Hatch::Horizontal,
                "vertical" => Hatch::Vertical,
                "diagonal" => Hatch::Diagonal,
                "dots" => Hatch::Dots,
                _ => Hatch::Crosshatch,
            };
            self.w.open(
                "pattern",
                &[
                    ("id", hatch_id(&self.cfg.id_prefix, h)),
                    ("patternUnits", "userSpaceOnUse".into()),
                    ("width", num(t)),
                    ("height", num(t)),
                ],
            );
            let line = |w: &mut XmlWriter, d: &str| {
                w.empty(
                    "path",
                    &[
                        ("d", d.to_string()),
                        ("stroke", "black".into()),
                        ("stroke-width", sw.clone()),
                        ("fill", "none".into()),
                    ],
                )
            };
            match h {
                Hatch::Horizontal => line(&mut self.w, "M0,3 L6,3"),
                Hatch::Vertical => line(&mut self.w, "M3,0 L3,6"),
                Hatch::Diagonal => line(&mut self.w, "M0,6 L6,0 M-1.5,1.5 L1.5,-1.5 M4.5,7.5 L7.5,4.5"),
                Hatch::Crosshatch => line(&mut self.w, "M0,3 L6,3 M3,0 L3,6"),
                Hatch::Dots => self.w.empty(
                    "circle",
                    &[("cx", "3".into()), ("cy", "3".into()), ("r", num(DOT_DIAMETER_MM / 2.0)), ("fill", "black".into())],
                ),
                Hatch::SolidFill => {}
            }
            self.w.close();
        }
        self.w.close();
    }

    fn run(mut self) -> String {
        let s = self.scene;
        let (w, h) = (num(s.canvas.width_mm), num(s.canvas.height_mm));
        self.w.open(
            "svg",
            &[
                ("xmlns", SVG_NS.into()),
                ("xmlns:tc", TC_NS.into()),
                ("version", "1.1".into()),
                ("viewBox", format!("0 0 {w} {h}")),
                ("tc:units", "mm".into()),
                ("tc:variant", self.cfg.variant.tag().into()),
                ("tc:chart-type", s.chart_type.tag().into()),
            ]
            .into_iter()
            .chain(s.x_categories.map(|n| ("tc:x-categories", n.to_string())))
            .collect::<Vec<_>>(),
        );
        self.w.text_element("title", &[], &s.title);
        self.w.open("metadata", &[]);
        self.w.text_element("tc:spec", &[("media-type", "application/json".into())], &s.spec_document);
        self.w.close();
        self.defs();
        if !self.tactile() {
            self.w.empty(
                "rect",
                &[
                    ("x", "0".into()),
                    ("y", "0".into()),
                    ("width", w.clone()),
                    ("height", h.clone()),
                    ("fill", "white".into()),
                ],
            );
        }

        for (layer, name) in [
            (Layer::Frame, "frame"),
            (Layer::Axes, "axes"),
            (Layer::Data, "data"),
            (Layer::Labels, "labels"),
            (Layer::Legend, "legend"),
        ] {
            self.w.open("g", &[("id", self.id(name)), ("tc:layer", name.into())]);
            if layer == Layer::Data {
                for (k, style) in s.series_styles.iter().enumerate() {
                    self.w.open(
                        "g",
                        &[
                            ("id", self.id(&format!("series-{k}"))),
                            ("tc:role", "series".into()),
                            ("tc:series", k.to_string()),
                            ("tc:name", s.series_names.get(k).cloned().unwrap_or_default()),
                            ("tc:style", crate::layout::style_phrase(s.chart_type, style)),
                        ],
                    );
                    for el in s.elements.iter().filter(|e| e.layer == layer && e.series == Some(k)) {
                        self.element(el);
                    }
                    self.w.close();
                }
            } else {
                for el in s.elements.iter().filter(|e| e.layer == layer) {
                    self.element(el);
                }
            }
            self.w.close();
        }
        self.w.finish()
    }
}

/// Serializes a scene. Identical scenes and configurations give identical bytes.
pub fn emit_svg(scene: &TactileScene, cfg: &EmitConfig) -> Result<String, EmitError> {
    cfg.validate()?;
    scene.check()?;
    let out = Emitter {
        w: XmlWriter::new(cfg.pretty),
        cfg,
        scene,
    }
    .run();
    Ok(out)
}
