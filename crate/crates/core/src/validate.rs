//! Tactile-accessibility lint rules over arbitrary SVG documents.
//!
//! Lengths are compared in millimetres. A document declares millimetre user
//! units with `tc:units="mm"` or with `width`/`height` in `mm` next to a
//! `viewBox`; otherwise user units are taken as millimetres and R-UNITS
//! warns about it.

use std::collections::{BTreeMap, HashMap, HashSet};

use roxmltree::{Document, Node, ParsingOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emit::TC_NS;
use crate::model::{Finding, RuleId, Severity, ValidationReport};

const OVERLAP_TOLERANCE_MM: f64 = 0.005;
const CONTAIN_TOLERANCE_MM: f64 = 0.01;

const DESCRIBED_ROLES: [&str; 7] = [
    "data-mark",
    "data-path",
    "bar",
    "errorbar-whisker",
    "braille-text",
    "text-bbox",
    "legend-item",
];
const DATA_ROLES: [&str; 3] = ["data-mark", "data-path", "bar"];
const SHAPES: [&str; 7] = ["line", "polyline", "polygon", "path", "rect", "circle", "ellipse"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub rule_id: RuleId,
    pub severity: Severity,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl Rule {
    fn new(rule_id: RuleId, severity: Severity, params: &[(&str, f64)]) -> Self {
        Self {
            rule_id,
            severity,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn param(&self, key: &str) -> f64 {
        self.params
            .get(key)
            .copied()
            .or_else(|| default_param(self.rule_id, key))
            .unwrap_or(0.0)
    }
}

fn default_param(id: RuleId, key: &str) -> Option<f64> {
    match (id, key) {
        (RuleId::Thin, "min_mm") => Some(1.0),
        (RuleId::LabelCount, "min") => Some(3.0),
        (RuleId::LabelCount, "max") => Some(4.0),
        (RuleId::Overlap, "min_gap_mm") => Some(2.0),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleSetError {
    #[error("rule {0} listed twice")]
    Duplicate(RuleId),
    #[error("rule {0} has no parameter `{1}`")]
    UnknownParam(RuleId, String),
    #[error("rule {0}: parameter `{1}` must be a non-negative number")]
    BadParam(RuleId, String),
}

/// Ordered rules with unique ids. R-XML is always checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRuleSet", into = "RawRuleSet")]
pub struct RuleSet {
    rules: Vec<Rule>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRuleSet {
    rules: Vec<Rule>,
}

impl TryFrom<RawRuleSet> for RuleSet {
    type Error = RuleSetError;

    fn try_from(raw: RawRuleSet) -> Result<Self, Self::Error> {
        RuleSet::new(raw.rules)
    }
}

impl From<RuleSet> for RawRuleSet {
    fn from(r: RuleSet) -> Self {
        RawRuleSet { rules: r.rules }
    }
}

impl Default for RuleSet {
    fn default() -> Self {
        use Severity::{Error, Warning};
        RuleSet {
            rules: vec![
                Rule::new(RuleId::Units, Warning, &[]),
                Rule::new(RuleId::Thin, Error, &[("min_mm", 1.0)]),
                Rule::new(RuleId::Braille, Error, &[]),
                Rule::new(RuleId::Horiz, Error, &[]),
                Rule::new(RuleId::Bbox, Error, &[]),
                Rule::new(RuleId::Desc, Error, &[]),
                Rule::new(RuleId::LabelCount, Error, &[("min", 3.0), ("max", 4.0)]),
                Rule::new(RuleId::Overlap, Error, &[("min_gap_mm", 2.0)]),
                Rule::new(RuleId::StyleDup, Error, &[]),
            ],
        }
    }
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<Self, RuleSetError> {
        let mut seen = HashSet::new();
        for r in &rules {
            if !seen.insert(r.rule_id) {
                return Err(RuleSetError::Duplicate(r.rule_id));
            }
            for (k, v) in &r.params {
                if default_param(r.rule_id, k).is_none() {
                    return Err(RuleSetError::UnknownParam(r.rule_id, k.clone()));
                }
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(RuleSetError::BadParam(r.rule_id, k.clone()));
                }
            }
        }
        Ok(Self { rules })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn get(&self, id: RuleId) -> Option<&Rule> {
        self.rules.iter().find(|r| r.rule_id == id)
    }

    /// The same rules restricted to `ids`.
    pub fn only(&self, ids: &[RuleId]) -> RuleSet {
        RuleSet {
            rules: self.rules.iter().filter(|r| ids.contains(&r.rule_id)).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub String);

/// Description and guideline citation of a rule.
pub fn explain_rule(rule_id: &str) -> Result<&'static str, UnknownRule> {
    let id: RuleId = rule_id.parse().map_err(|_| UnknownRule(rule_id.to_string()))?;
    Ok(match id {
        RuleId::Xml => "R-XML: the document must be well-formed XML with an <svg> root. Tooling rule, no guideline citation.",
        RuleId::Units => "R-UNITS: lengths must be calibrated in millimetres, via tc:units=\"mm\" or a viewBox with width/height in mm. Physical checks fall back to user units otherwise. Supports guideline 2.",
        RuleId::Thin => "R-THIN: strokes, dash segments and filled dots must be at least min_mm wide (default 1.0 mm). Cites guideline 2 (avoid thin elements).",
        RuleId::Braille => "R-BRAILLE: text content must be Braille (U+2800..U+28FF) or drawn Braille dot geometry. Cites guideline 3 (text in Braille).",
        RuleId::Horiz => "R-HORIZ: Braille and text must not be rotated, skewed or set in a vertical writing mode. Cites guideline 3 (horizontal text).",
        RuleId::Bbox => "R-BBOX: every text run must lie inside a bounding rectangle. Cites expert recommendation 1 (text bounding boxes).",
        RuleId::Desc => "R-DESC: the root needs a title, and every data, text and legend element needs title and desc children. Cites expert recommendation 3 (description tags).",
        RuleId::LabelCount => "R-LABELCOUNT: each axis carries between min and max tick labels (default 3 to 4). Cites the axis labelling rule of the extraction schema (3 or 4 labels).",
        RuleId::Overlap => "R-OVERLAP: data marks of one series keep at least min_gap_mm between their outlines (default 2.0 mm). Cites expert recommendation 2 (non-overlapping points).",
        RuleId::StyleDup => "R-STYLEDUP: no two series share the same stroke width, dash pattern, marker and fill. Cites guideline 1 (distinguishable by touch).",
    })
}

struct Ctx<'a, 'input> {
    doc: &'a Document<'input>,
    rules: &'a RuleSet,
    /// Millimetres per user unit.
    scale: f64,
    findings: Vec<(usize, Finding)>,
}

fn tc<'a>(n: Node<'a, '_>, name: &str) -> Option<&'a str> {
    n.attribute((TC_NS, name))
}

/// Presentation attribute or `style` declaration on this element only.
fn own_prop<'a>(n: Node<'a, '_>, name: &str) -> Option<&'a str> {
    if let Some(style) = n.attribute("style") {
        for decl in style.split(';') {
            if let Some((k, v)) = decl.split_once(':') {
                if k.trim() == name {
                    return Some(v.trim());
                }
            }
        }
    }
    n.attribute(name).map(str::trim)
}

fn inherited<'a>(n: Node<'a, '_>, name: &str) -> Option<&'a str> {
    n.ancestors().filter(Node::is_element).find_map(|a| own_prop(a, name))
}

fn length(s: &str) -> Option<f64> {
    let s = s.trim();
    let s = s
        .strip_suffix("mm")
        .or_else(|| s.strip_suffix("px"))
        .unwrap_or(s);
    s.trim().parse::<f64>().ok()
}

fn attr_num(n: Node<'_, '_>, name: &str) -> Option<f64> {
    n.attribute(name).and_then(length)
}

fn locus(n: Node<'_, '_>) -> String {
    let mut parts = Vec::new();
    for a in n.ancestors().filter(Node::is_element) {
        let name = a.tag_name().name();
        let part = match a.attribute("id") {
            Some(id) => format!("{name}[@id='{id}']"),
            None => {
                let idx = a
                    .prev_siblings()
                    .filter(|s| s.is_element() && s.tag_name().name() == name)
                    .count();
                if a.parent_element().is_none() {
                    name.to_string()
                } else {
                    format!("{name}[{}]", idx + 1)
                }
            }
        };
        parts.push(part);
    }
    parts.reverse();
    format!("/{}", parts.join("/"))
}

fn is_svg(n: Node<'_, '_>, name: &str) -> bool {
    n.is_element() && n.tag_name().name() == name
}

fn in_metadata(n: Node<'_, '_>) -> bool {
    n.ancestors().any(|a| matches!(a.tag_name().name(), "metadata" | "title" | "desc"))
}

#[derive(Debug, Clone, Copy)]
struct BBox {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl BBox {
    fn contains(&self, o: &BBox, eps: f64) -> bool {
        o.x0 >= self.x0 - eps && o.y0 >= self.y0 - eps && o.x1 <= self.x1 + eps && o.y1 <= self.y1 + eps
    }

    fn union(self, o: BBox) -> BBox {
        BBox {
            x0: self.x0.min(o.x0),
            y0: self.y0.min(o.y0),
            x1: self.x1.max(o.x1),
            y1: self.y1.max(o.y1),
        }
    }
}

fn rect_bbox(n: Node<'_, '_>) -> Option<BBox> {
    let x = attr_num(n, "x").unwrap_or(0.0);
    let y = attr_num(n, "y").unwrap_or(0.0);
    Some(BBox {
        x0: x,
        y0: y,
        x1: x + attr_num(n, "width")?,
        y1: y + attr_num(n, "height")?,
    })
}

/// Extent of a Braille run or text element.
fn text_bbox(n: Node<'_, '_>) -> Option<BBox> {
    if let Some(b) = tc(n, "bbox") {
        let v: Vec<f64> = b.split_whitespace().filter_map(|s| s.parse().ok()).collect();
        if let [x, y, w, h] = v[..] {
            return Some(BBox { x0: x, y0: y, x1: x + w, y1: y + h });
        }
    }
    if is_svg(n, "text") {
        let x = attr_num(n, "x")?;
        let y = attr_num(n, "y")?;
        return Some(BBox { x0: x, y0: y, x1: x, y1: y });
    }
    n.descendants()
        .filter(|d| is_svg(*d, "circle"))
        .filter_map(|c| {
            let (cx, cy, r) = (attr_num(c, "cx")?, attr_num(c, "cy")?, attr_num(c, "r")?);
            Some(BBox { x0: cx - r, y0: cy - r, x1: cx + r, y1: cy + r })
        })
        .reduce(BBox::union)
}

fn text_content(n: Node<'_, '_>) -> String {
    n.descendants()
        .filter(|d| d.is_text())
        .filter(|d| !d.ancestors().any(|a| matches!(a.tag_name().name(), "title" | "desc")))
        .filter_map(|d| d.text())
        .collect()
}

fn is_text_run(n: Node<'_, '_>) -> bool {
    is_svg(n, "text") || (n.is_element() && tc(n, "role") == Some("braille-text"))
}

fn non_horizontal(n: Node<'_, '_>) -> Option<String> {
    for a in n.ancestors().filter(Node::is_element) {
        if let Some(t) = own_prop(a, "transform") {
            if let Some(reason) = transform_turns(t) {
                return Some(format!("transform `{t}` {reason}"));
            }
        }
        if let Some(m) = own_prop(a, "writing-mode") {
            if m.starts_with("tb") || m.starts_with("vertical") {
                return Some(format!("vertical writing-mode `{m}`"));
            }
        }
        if is_svg(a, "text") || is_svg(a, "tspan") {
            if let Some(r) = a.attribute("rotate") {
                if r.split([' ', ',']).filter_map(|v| v.parse::<f64>().ok()).any(|v| v % 360.0 != 0.0) {
                    return Some(format!("glyph rotation `{r}`"));
                }
            }
        }
    }
    None
}

fn transform_turns(t: &str) -> Option<&'static str> {
    for part in t.split(')') {
        let Some((name, args)) = part.split_once('(') else { continue };
        let nums: Vec<f64> = args
            .split([' ', ','])
            .filter(|s| !s.is_empty())
            .filter_map(|s| s.parse().ok())
            .collect();
        match name.trim().trim_start_matches(',').trim() {
            "rotate" if nums.first().is_some_and(|a| a % 360.0 != 0.0) => return Some("rotates"),
            "skewX" | "skewY" if nums.first().is_some_and(|a| *a != 0.0) => return Some("skews"),
            "matrix" if nums.len() == 6 && (nums[1] != 0.0 || nums[2] != 0.0) => return Some("rotates or skews"),
            _ => {}
        }
    }
    None
}

/// Centre and radius of a data mark.
fn mark_circle(n: Node<'_, '_>) -> Option<(f64, f64, f64)> {
    if let (Some(cx), Some(cy), Some(s)) = (tc(n, "cx"), tc(n, "cy"), tc(n, "size")) {
        return Some((cx.parse().ok()?, cy.parse().ok()?, s.parse::<f64>().ok()? / 2.0));
    }
    if is_svg(n, "circle") {
        return Some((attr_num(n, "cx")?, attr_num(n, "cy")?, attr_num(n, "r")?));
    }
    None
}

fn series_groups<'a, 'i>(doc: &'a Document<'i>) -> Vec<Node<'a, 'i>> {
    doc.descendants()
        .filter(|n| is_svg(*n, "g"))
        .filter(|n| {
            tc(*n, "role") == Some("series")
                || n.attribute("id").is_some_and(|id| {
                    id.rsplit_once("-series-")
                        .is_some_and(|(_, k)| !k.is_empty() && k.chars().all(|c| c.is_ascii_digit()))
                })
        })
        .collect()
}

impl<'a, 'i> Ctx<'a, 'i> {
    fn push(&mut self, id: RuleId, node: Option<Node<'_, '_>>, message: String) {
        let Some(rule) = self.rules.get(id) else { return };
        let (pos, locus) = match node {
            Some(n) => (n.id().get_usize(), locus(n)),
            None => (0, "/".to_string()),
        };
        self.findings.push((
            pos,
            Finding {
                rule_id: id,
                severity: rule.severity,
                locus,
                message,
            },
        ));
    }

    fn enabled(&self, id: RuleId) -> bool {
        self.rules.get(id).is_some()
    }

    fn units(&mut self) {
        let root = self.doc.root_element();
        let view_box: Option<Vec<f64>> = root
            .attribute("viewBox")
            .map(|v| v.split([' ', ',']).filter(|s| !s.is_empty()).filter_map(|s| s.parse().ok()).collect());
        let view_box = view_box.filter(|v| v.len() == 4 && v[2] > 0.0 && v[3] > 0.0);
        if tc(root, "units") == Some("mm") {
            return;
        }
        let width_mm = root.attribute("width").and_then(|w| w.trim().strip_suffix("mm")?.trim().parse::<f64>().ok());
        match (width_mm, &view_box) {
            (Some(w), Some(vb)) => self.scale = w / vb[2],
            (Some(_), None) => {}
            _ => {
                let msg = if view_box.is_none() {
                    "no viewBox and no millimetre calibration; lengths are read as millimetres"
                } else {
                    "viewBox is not calibrated to millimetres; user units are read as millimetres"
                };
                self.push(RuleId::Units, Some(root), msg.to_string());
            }
        }
    }

    fn thin(&mut self) {
        let Some(rule) = self.rules.get(RuleId::Thin) else { return };
        let min = rule.param("min_mm");
        let eps = 1e-9;
        let mut hits = Vec::new();
        for n in self.doc.descendants().filter(|n| n.is_element() && SHAPES.contains(&n.tag_name().name())) {
            if in_metadata(n) {
                continue;
            }
            let stroked = inherited(n, "stroke").is_some_and(|s| s != "none");
            if stroked {
                let w = inherited(n, "stroke-width").and_then(length).unwrap_or(1.0) * self.scale;
                if w < min - eps {
                    hits.push((n, format!("stroke width {w} mm is below {min} mm")));
                    continue;
                }
                if let Some(d) = inherited(n, "stroke-dasharray").filter(|d| *d != "none") {
                    let segs: Vec<f64> = d.split([' ', ',']).filter_map(length).collect();
                    if let Some(on) = segs.iter().step_by(2).find(|s| **s * self.scale < min - eps) {
                        hits.push((n, format!("dash segment {} mm is below {min} mm", on * self.scale)));
                        continue;
                    }
                }
            }
            let filled = inherited(n, "fill") != Some("none");
            if filled && is_svg(n, "circle") {
                if let Some(r) = attr_num(n, "r") {
                    let d = 2.0 * r * self.scale;
                    if d < min - eps {
                        hits.push((n, format!("dot diameter {d} mm is below {min} mm")));
                        continue;
                    }
                }
            }
            if filled && !stroked && is_svg(n, "rect") {
                if let Some(b) = rect_bbox(n) {
                    let t = (b.x1 - b.x0).min(b.y1 - b.y0) * self.scale;
                    if t < min - eps {
                        hits.push((n, format!("filled rectangle {t} mm thick is below {min} mm")));
                    }
                }
            }
        }
        for (n, msg) in hits {
            self.push(RuleId::Thin, Some(n), msg);
        }
    }

    fn braille_and_horiz(&mut self) {
        let mut hits = Vec::new();
        for n in self.doc.descendants().filter(|n| is_text_run(*n)) {
            if is_svg(n, "text") {
                let text = text_content(n);
                if let Some(c) = text.chars().find(|c| !c.is_whitespace() && !('\u{2800}'..='\u{28FF}').contains(c)) {
                    hits.push((RuleId::Braille, n, format!("text contains non-Braille character {c:?}")));
                }
            }
            if let Some(reason) = non_horizontal(n) {
                hits.push((RuleId::Horiz, n, format!("text is not horizontal: {reason}")));
            }
        }
        for (id, n, msg) in hits {
            self.push(id, Some(n), msg);
        }
    }

    fn bbox(&mut self) {
        let rects: Vec<Node> = self.doc.descendants().filter(|n| is_svg(*n, "rect") && !in_metadata(*n)).collect();
        let tagged: Vec<Node> = rects.iter().copied().filter(|r| tc(*r, "role") == Some("text-bbox")).collect();
        let candidates: Vec<BBox> = if tagged.is_empty() { &rects } else { &tagged }
            .iter()
            .filter_map(|r| rect_bbox(*r))
            .collect();
        let mut hits = Vec::new();
        for n in self.doc.descendants().filter(|n| is_text_run(*n)) {
            let Some(b) = text_bbox(n) else { continue };
            if !candidates.iter().any(|c| c.contains(&b, CONTAIN_TOLERANCE_MM)) {
                hits.push(n);
            }
        }
        for n in hits {
            self.push(RuleId::Bbox, Some(n), "text is not enclosed by a bounding box".into());
        }
    }

    fn desc(&mut self) {
        let root = self.doc.root_element();
        let has = |n: Node<'_, '_>, name: &str| {
            n.children()
                .any(|c| is_svg(c, name) && c.text().is_some_and(|t| !t.trim().is_empty()))
        };
        let mut hits = Vec::new();
        if !has(root, "title") {
            hits.push((root, "document has no title".to_string()));
        }
        for n in self.doc.descendants().filter(Node::is_element) {
            let described = tc(n, "role").is_some_and(|r| DESCRIBED_ROLES.contains(&r)) || is_svg(n, "text");
            if !described {
                continue;
            }
            let missing: Vec<&str> = ["title", "desc"].into_iter().filter(|t| !has(n, t)).collect();
            if !missing.is_empty() {
                hits.push((n, format!("missing {}", missing.join(" and "))));
            }
        }
        for (n, msg) in hits {
            self.push(RuleId::Desc, Some(n), msg);
        }
    }

    fn label_count(&mut self) {
        let Some(rule) = self.rules.get(RuleId::LabelCount) else { return };
        let (min, max) = (rule.param("min") as usize, rule.param("max") as usize);
        let root = self.doc.root_element();
        let x_categories: Option<usize> = tc(root, "x-categories").and_then(|v| v.parse().ok());
        let mut per_axis: BTreeMap<&str, Vec<Node>> = BTreeMap::new();
        for n in self.doc.descendants().filter(|n| n.is_element() && tc(*n, "kind") == Some("tick-label")) {
            per_axis.entry(tc(n, "axis").unwrap_or("?")).or_default().push(n);
        }
        let mut hits = Vec::new();
        for (axis, labels) in &per_axis {
            let c = labels.len();
            let (lo, hi) = match x_categories {
                Some(n) if *axis == "x" && n < min => (n, n),
                _ => (min, max),
            };
            if c < lo || c > hi {
                let at = if c > hi { labels[hi] } else { labels[0] };
                hits.push((at, format!("{axis} axis has {c} tick labels; expected {lo} to {hi}")));
            }
        }
        for (n, msg) in hits {
            self.push(RuleId::LabelCount, Some(n), msg);
        }
    }

    fn overlap(&mut self) {
        let Some(rule) = self.rules.get(RuleId::Overlap) else { return };
        let gap = rule.param("min_gap_mm");
        let mut hits = Vec::new();
        for g in series_groups(self.doc) {
            let marks: Vec<(Node, (f64, f64, f64))> = g
                .descendants()
                .filter(|n| n.is_element() && tc(*n, "role") == Some("data-mark"))
                .filter_map(|n| Some((n, mark_circle(n)?)))
                .collect();
            for j in 1..marks.len() {
                let (nj, (xj, yj, rj)) = marks[j];
                let clash = marks[..j].iter().find(|(_, (xi, yi, ri))| {
                    let edge = (xj - xi).hypot(yj - yi) - ri - rj;
                    edge * self.scale < gap - OVERLAP_TOLERANCE_MM
                });
                if let Some((ni, _)) = clash {
                    hits.push((nj, format!("mark is closer than {gap} mm to {}", locus(*ni))));
                }
            }
        }
        for (n, msg) in hits {
            self.push(RuleId::Overlap, Some(n), msg);
        }
    }

    fn style_dup(&mut self) {
        let mut seen: HashMap<[String; 4], Node> = HashMap::new();
        let mut hits = Vec::new();
        for g in series_groups(self.doc) {
            let Some(first) = g
                .descendants()
                .find(|n| n.is_element() && tc(*n, "role").is_some_and(|r| DATA_ROLES.contains(&r)))
            else {
                continue;
            };
            let key = [
                inherited(first, "stroke-width").unwrap_or("").to_string(),
                inherited(first, "stroke-dasharray").unwrap_or("none").to_string(),
                tc(first, "marker").unwrap_or("").to_string(),
                inherited(first, "fill").unwrap_or("").to_string(),
            ];
            match seen.get(&key) {
                Some(prev) => hits.push((g, format!("series style duplicates {}", locus(*prev)))),
                None => {
                    seen.insert(key, g);
                }
            }
        }
        for (n, msg) in hits {
            self.push(RuleId::StyleDup, Some(n), msg);
        }
    }
}

/// Checks a document against `rules`. Findings are ordered by document
/// position, then by rule.
pub fn validate_svg(document: &str, rules: &RuleSet) -> ValidationReport {
    let opts = ParsingOptions {
        allow_dtd: true,
        ..ParsingOptions::default()
    };
    let doc = match Document::parse_with_options(document, opts) {
        Ok(d) => d,
        Err(e) => {
            return ValidationReport {
                findings: vec![Finding {
                    rule_id: RuleId::Xml,
                    severity: Severity::Error,
                    locus: "/".into(),
                    message: format!("not well-formed XML: {e}"),
                }],
            }
        }
    };
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return ValidationReport {
            findings: vec![Finding {
                rule_id: RuleId::Xml,
                severity: Severity::Error,
                locus: locus(root),
                message: format!("root element is <{}>, not <svg>", root.tag_name().name()),
            }],
        };
    }
    let mut ctx = Ctx {
        doc: &doc,
        rules,
        scale: 1.0,
        findings: Vec::new(),
    };
    // units first: it fixes the scale the physical rules use
    ctx.units();
    if ctx.enabled(RuleId::Thin) {
        ctx.thin();
    }
    if ctx.enabled(RuleId::Braille) || ctx.enabled(RuleId::Horiz) {
        ctx.braille_and_horiz();
    }
    if ctx.enabled(RuleId::Bbox) {
        ctx.bbox();
    }
    if ctx.enabled(RuleId::Desc) {
        ctx.desc();
    }
    ctx.label_count();
    ctx.overlap();
    if ctx.enabled(RuleId::StyleDup) {
        ctx.style_dup();
    }
    let mut findings = ctx.findings;
    findings.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.rule_id.cmp(&b.1.rule_id)));
    ValidationReport {
        findings: findings.into_iter().map(|(_, f)| f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(body: &str) -> String {
        format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:tc="urn:tactograph:svg:1" viewBox="0 0 100 100" tc:units="mm"><title>t</title>{body}</svg>"#
        )
    }

    fn ids(body: &str) -> Vec<RuleId> {
        validate_svg(&doc(body), &RuleSet::default()).rule_ids()
    }

    #[test]
    fn empty_document_is_clean() {
        assert_eq!(ids(""), vec![]);
    }

    #[test]
    fn not_xml_is_fatal() {
        let r = validate_svg("<svg", &RuleSet::default());
        assert!(r.is_fatal());
        assert_eq!(r.findings.len(), 1);
    }

    #[test]
    fn thin_stroke() {
        assert_eq!(ids(r#"<line x1="0" y1="0" x2="5" y2="5" stroke="black" stroke-width="0.2"/>"#), vec![RuleId::Thin]);
        assert_eq!(ids(r#"<g stroke-width="0.5"><line x1="0" y1="0" x2="5" y2="5" stroke="black"/></g>"#), vec![RuleId::Thin]);
        assert_eq!(ids(r#"<line x1="0" y1="0" x2="5" y2="5" style="stroke:black;stroke-width:1.2"/>"#), vec![]);
    }

    #[test]
    fn width_in_mm_scales() {
        let d = r#"<svg xmlns="http://www.w3.org/2000/svg" width="50mm" height="50mm" viewBox="0 0 100 100"><title>t</title><line x1="0" y1="0" x2="5" y2="5" stroke="black" stroke-width="1.5"/></svg>"#;
        assert_eq!(validate_svg(d, &RuleSet::default()).rule_ids(), vec![RuleId::Thin]);
    }

    #[test]
    fn uncalibrated_units_warn() {
        let d = r#"<svg xmlns="http://www.w3.org/2000/svg" width="400" height="300"><title>t</title></svg>"#;
        let r = validate_svg(d, &RuleSet::default());
        assert_eq!(r.rule_ids(), vec![RuleId::Units]);
        assert!(!r.has_errors());
    }

    #[test]
    fn transforms() {
        assert_eq!(transform_turns("translate(3 4) rotate(90)"), Some("rotates"));
        assert_eq!(transform_turns("rotate(0) scale(2)"), None);
        assert_eq!(transform_turns("matrix(1 0 0 1 5 5)"), None);
        assert_eq!(transform_turns("skewX(10)"), Some("skews"));
    }

    #[test]
    fn rule_set_rejects_duplicates_and_unknown_params() {
        let r = Rule::new(RuleId::Thin, Severity::Error, &[]);
        assert!(RuleSet::new(vec![r.clone(), r]).is_err());
        assert!(RuleSet::new(vec![Rule::new(RuleId::Thin, Severity::Error, &[("nope", 1.0)])]).is_err());
        let json = serde_json::to_string(&RuleSet::default()).unwrap();
        assert_eq!(serde_json::from_str::<RuleSet>(&json).unwrap(), RuleSet::default());
    }

    #[test]
    fn explanations_cite_guidelines() {
        assert!(explain_rule("R-THIN").unwrap().contains("guideline 2"));
        assert!(explain_rule("R-DESC").unwrap().contains("recommendation 3"));
        assert_eq!(explain_rule("R-BOGUS"), Err(UnknownRule("R-BOGUS".into())));
    }
}
