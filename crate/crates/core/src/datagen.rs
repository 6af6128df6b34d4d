//! Seeded synthetic chart corpus: random series, compiled into tactile and
//! visual SVG pairs plus a checksummed manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{AxisSpec, ChartSpec, ChartType, DataPoint, Domain, Encoding, Finding, Series, SpecError};
use crate::pipeline::{emit_dataset_pair, PipelineConfig, PipelineError};
use crate::simplify::parse_date;
use crate::validate::{validate_svg, RuleSet};

pub const GENERATOR_VERSION: &str = concat!("tactograph-datagen/", env!("CARGO_PKG_VERSION"), "+1");

const DECIMALS: f64 = 1e4;

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Span {
    pub min: usize,
    pub max: usize,
}

impl Span {
    pub const fn new(min: usize, max: usize) -> Self {
        Self { min, max }
    }

    fn sample(self, rng: &mut impl Rng) -> usize {
        rng.random_range(self.min..=self.max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValueModel {
    LinearTrend,
    RandomWalk,
    Seasonal,
    Piecewise,
}

impl ValueModel {
    pub const ALL: [ValueModel; 4] = [
        ValueModel::LinearTrend,
        ValueModel::RandomWalk,
        ValueModel::Seasonal,
        ValueModel::Piecewise,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub n_per_category: usize,
    pub seed: u64,
    pub categories: Vec<ChartType>,
    pub series_count: Span,
    pub points: Span,
    pub scatter_points: Span,
    pub bar_categories: Span,
    pub error_bar_points: Span,
    pub error_bar_series: Span,
    pub value_models: Vec<ValueModel>,
    /// Relative noise amplitude, as a fraction of the series' scale.
    pub noise: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n_per_category: 10,
            seed: 0,
            categories: ChartType::ALL.to_vec(),
            series_count: Span::new(1, 4),
            points: Span::new(5, 60),
            scatter_points: Span::new(50, 500),
            bar_categories: Span::new(3, 8),
            error_bar_points: Span::new(5, 12),
            error_bar_series: Span::new(1, 3),
            value_models: ValueModel::ALL.to_vec(),
            noise: 0.08,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("generator config: {0}")]
pub struct GenConfigError(String);

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenConfigError> {
        let err = |m: String| Err(GenConfigError(m));
        if self.n_per_category == 0 {
            return err("n_per_category must be positive".into());
        }
        if self.categories.is_empty() {
            return err("no categories selected".into());
        }
        for (i, c) in self.categories.iter().enumerate() {
            if self.categories[..i].contains(c) {
                return err(format!("category {c} listed twice"));
            }
        }
        if self.value_models.is_empty() {
            return err("no value models selected".into());
        }
        let spans = [
            ("series_count", self.series_count, 1, crate::model::MAX_SERIES),
            ("points", self.points, 2, usize::MAX),
            ("scatter_points", self.scatter_points, 1, usize::MAX),
            ("bar_categories", self.bar_categories, 1, MONTHS.len()),
            ("error_bar_points", self.error_bar_points, 1, usize::MAX),
            ("error_bar_series", self.error_bar_series, 1, crate::model::MAX_SERIES),
        ];
        for (name, s, lo, hi) in spans {
            if s.min > s.max {
                return err(format!("{name}: min {} exceeds max {}", s.min, s.max));
            }
            if s.min < lo || s.max > hi {
                return err(format!("{name}: must lie within {lo}..={hi}"));
            }
        }
        if !(self.noise.is_finite() && (0.0..=1.0).contains(&self.noise)) {
            return err("noise must lie within 0..=1".into());
        }
        Ok(())
    }
}

const TOPICS: [&str; 16] = [
    "Sales", "Rainfall", "Traffic", "Visitors", "Output", "Prices", "Energy use", "Exports",
    "Enrolment", "Demand", "Turnout", "Yield", "Revenue", "Costs", "Downloads", "Orders",
];
const PLACES: [&str; 10] = [
    "in Oslo", "in Lima", "in Pune", "in Kiel", "in Perth", "by region", "by store", "by site", "overall",
    "by line",
];
const Y_TITLES: [&str; 8] = ["value", "count", "rate", "index", "level", "amount", "total", "share"];
const SERIES_NAMES: [&str; 12] = [
    "north", "south", "east", "west", "alpha", "beta", "gamma", "delta", "urban", "rural", "A", "B",
];
const MONTHS: [&str; 12] = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"];

fn round4(v: f64) -> f64 {
    let r = (v * DECIMALS).round() / DECIMALS;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Per-sample seed: the first 8 bytes of sha256(root ‖ tag ‖ index).
pub fn sample_seed(root: u64, category: ChartType, index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(root.to_le_bytes());
    h.update(category.tag().as_bytes());
    h.update((index as u64).to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

struct Shape {
    base: f64,
    scale: f64,
}

fn model_values(model: ValueModel, ts: &[f64], shape: &Shape, noise: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = ts.len().max(1) as f64;
    let span = ts.last().copied().unwrap_or(1.0) - ts.first().copied().unwrap_or(0.0);
    let span = if span > 0.0 { span } else { 1.0 };
    let sd = (shape.scale * noise).max(f64::MIN_POSITIVE);
    let normal = Normal::new(0.0, sd).expect("finite positive sd");
    let t0 = ts.first().copied().unwrap_or(0.0);
    match model {
        ValueModel::LinearTrend => {
            let slope = rng.random_range(-1.0..1.0) * shape.scale / span;
            ts.iter()
                .map(|t| shape.base + slope * (t - t0) + normal.sample(rng))
                .collect()
        }
        ValueModel::RandomWalk => {
            let step = Normal::new(0.0, shape.scale / n.sqrt()).expect("finite sd");
            let mut v = shape.base;
            ts.iter()
                .map(|_| {
                    v += step.sample(rng);
                    v
                })
                .collect()
        }
        ValueModel::Seasonal => {
            let periods = rng.random_range(1.0..4.0);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let amp = shape.scale * rng.random_range(0.3..1.0);
            ts.iter()
                .map(|t| {
                    let u = (t - t0) / span;
                    shape.base + amp * (u * periods * std::f64::consts::TAU + phase).sin() + normal.sample(rng)
                })
                .collect()
        }
        ValueModel::Piecewise => {
            let pieces = rng.random_range(2..=4usize);
            let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.random_range(0.0..1.0)).collect();
            cuts.sort_by(f64::total_cmp);
            let slopes: Vec<f64> = (0..pieces)
                .map(|_| rng.random_range(-2.0..2.0) * shape.scale)
                .collect();
            ts.iter()
                .map(|t| {
                    let u = (t - t0) / span;
                    let mut v = shape.base;
                    let mut prev = 0.0;
                    for (k, slope) in slopes.iter().enumerate() {
                        let end = cuts.get(k).copied().unwrap_or(1.0);
                        v += slope * (u.min(end) - prev).max(0.0);
                        prev = end;
                    }
                    v + normal.sample(rng)
                })
                .collect()
        }
    }
}

fn quantize(v: f64, enc: Encoding) -> f64 {
    match enc {
        Encoding::Int => v.round(),
        Encoding::Fraction => (v * 4.0).round() / 4.0,
        _ => round4(v),
    }
}

fn outward(lo: f64, hi: f64, enc: Encoding) -> (f64, f64) {
    let (mut lo, mut hi) = if enc.is_integral() {
        (lo.floor(), hi.ceil())
    } else {
        let mut l = (lo * DECIMALS).floor() / DECIMALS;
        let mut h = (hi * DECIMALS).ceil() / DECIMALS;
        if l > lo {
            l -= 1.0 / DECIMALS;
        }
        if h < hi {
            h += 1.0 / DECIMALS;
        }
        (l, h)
    };
    if lo == hi {
        lo -= 1.0;
        hi += 1.0;
    }
    (lo, hi)
}

fn numeric_axis(title: &str, enc: Encoding, values: impl Iterator<Item = f64>) -> Result<AxisSpec, SpecError> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    let (lo, hi) = outward(lo, hi, enc);
    AxisSpec::new(title, enc, Domain::Numeric { lo, hi })
}

fn pick_names(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let mut names: Vec<&str> = SERIES_NAMES.to_vec();
    names.shuffle(rng);
    names.into_iter().take(n).map(str::to_string).collect()
}

struct XAxis {
    title: &'static str,
    encoding: Encoding,
    positions: Vec<f64>,
    categories: Option<Vec<String>>,
}

fn time_axis(rng: &mut ChaCha8Rng, n: usize) -> XAxis {
    if rng.random_bool(0.5) {
        let start = rng.random_range(1950..=2000) as f64;
        XAxis {
            title: "year",
            encoding: Encoding::Int,
            positions: (0..n).map(|i| start + i as f64).collect(),
            categories: None,
        }
    } else {
        let year = rng.random_range(2000..=2024);
        let start = parse_date(&format!("{year}-01-01")).expect("valid date") as f64;
        let step = *[1.0, 7.0, 30.0].choose(rng).expect("non-empty");
        XAxis {
            title: "date",
            encoding: Encoding::DateTime,
            positions: (0..n).map(|i| start + step * i as f64).collect(),
            categories: None,
        }
    }
}

fn y_encoding(rng: &mut ChaCha8Rng) -> Encoding {
    match rng.random_range(0..6) {
        0 | 1 => Encoding::Int,
        2 => Encoding::Fraction,
        _ => Encoding::Float,
    }
}

fn shape_for(enc: Encoding, rng: &mut ChaCha8Rng) -> Shape {
    let magnitude = match enc {
        Encoding::Int => 10f64.powi(rng.random_range(1..=3)),
        Encoding::Fraction => rng.random_range(2.0..8.0),
        _ => 10f64.powi(rng.random_range(-1..=2)),
    };
    Shape {
        base: magnitude * rng.random_range(1.0..3.0),
        scale: magnitude,
    }
}

/// A valid spec of `category`, fully determined by the seed.
pub fn gen_spec(category: ChartType, seed: u64) -> ChartSpec {
    gen_spec_with(&GenConfig::default(), category, seed)
}

pub fn gen_spec_with(cfg: &GenConfig, category: ChartType, seed: u64) -> ChartSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_series = match category {
        ChartType::ErrorBar => cfg.error_bar_series.sample(&mut rng),
        _ => cfg.series_count.sample(&mut rng),
    };
    let x = match category {
        ChartType::Line => {
            let n = cfg.points.sample(&mut rng);
            time_axis(&mut rng, n)
        }
        ChartType::Scatter => {
            let n = cfg.scatter_points.sample(&mut rng);
            let (title, enc) = *[("dose", Encoding::Float), ("age", Encoding::Int), ("size", Encoding::Float)]
                .choose(&mut rng)
                .expect("non-empty");
            let hi = 10f64.powi(rng.random_range(1..=3));
            let positions = (0..n).map(|_| quantize(rng.random_range(0.0..hi), enc)).collect();
            XAxis {
                title,
                encoding: enc,
                positions,
                categories: None,
            }
        }
        ChartType::Bar => {
            let n = cfg.bar_categories.sample(&mut rng);
            let start = rng.random_range(0..=MONTHS.len() - n);
            XAxis {
                title: "month",
                encoding: Encoding::Text,
                positions: (0..n).map(|i| i as f64).collect(),
                categories: Some(MONTHS[start..start + n].iter().map(|s| s.to_string()).collect()),
            }
        }
        ChartType::ErrorBar => {
            let n = cfg.error_bar_points.sample(&mut rng);
            let start = rng.random_range(1..=5) as f64;
            XAxis {
                title: "trial",
                encoding: Encoding::Int,
                positions: (0..n).map(|i| start + i as f64).collect(),
                categories: None,
            }
        }
    };
    let y_enc = match category {
        ChartType::Scatter => Encoding::Float,
        _ => y_encoding(&mut rng),
    };
    let shape = shape_for(y_enc, &mut rng);
    let names = pick_names(&mut rng, n_series);

    let mut series = Vec::with_capacity(n_series);
    for name in names {
        let model = *cfg.value_models.choose(&mut rng).expect("validated non-empty");
        let mut ts = x.positions.clone();
        if category == ChartType::Scatter {
            ts.sort_by(f64::total_cmp);
        }
        let mut ys: Vec<f64> = model_values(model, &ts, &shape, cfg.noise, &mut rng)
            .into_iter()
            .map(|v| quantize(v, y_enc))
            .collect();
        if category == ChartType::Bar {
            // bars grow from zero
            ys.iter_mut().for_each(|v| *v = quantize(v.abs(), y_enc));
        }
        let points = ts.iter().zip(&ys).map(|(&x, &y)| DataPoint::new(x, y)).collect();
        let mut s = Series::new(name, points);
        if category == ChartType::ErrorBar {
            let errs = ys
                .iter()
                .map(|_| {
                    let e = quantize(shape.scale * rng.random_range(0.05..0.3), y_enc);
                    e.abs()
                })
                .collect();
            s = s.with_errors(errs);
        }
        series.push(s);
    }

    let x_axis = match &x.categories {
        Some(c) => AxisSpec::new(x.title, Encoding::Text, Domain::Categories(c.clone())),
        None => numeric_axis(x.title, x.encoding, x.positions.iter().copied()),
    }
    .expect("generated x domain is consistent");
    let ys = series.iter().flat_map(|s| {
        let errs = s.y_err.clone().unwrap_or_else(|| vec![0.0; s.points.len()]);
        s.points
            .iter()
            .zip(errs)
            .flat_map(|(p, e)| [p.y - e, p.y + e])
            .collect::<Vec<_>>()
    });
    let ys: Vec<f64> = if category == ChartType::Bar {
        ys.chain([0.0]).collect()
    } else {
        ys.collect()
    };
    let y_title = *Y_TITLES.choose(&mut rng).expect("non-empty");
    let y_axis = numeric_axis(y_title, y_enc, ys.into_iter()).expect("generated y domain is consistent");
    let title = format!(
        "{} {}",
        TOPICS.choose(&mut rng).expect("non-empty"),
        PLACES.choose(&mut rng).expect("non-empty")
    );
    let legend = (n_series > 1).then(|| "series".to_string());
    ChartSpec::new(category, title, x_axis, y_axis, legend, series).expect("generated spec is valid")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checksums {
    pub spec: String,
    pub tactile: String,
    pub visual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub category: ChartType,
    pub seed_used: u64,
    pub spec_path: String,
    pub tactile_path: String,
    pub visual_path: String,
    pub checksums: Checksums,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub generator_version: String,
    pub root_seed: u64,
    pub n_per_category: usize,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    /// Recomputes every checksum from disk, relative to `root`.
    pub fn verify(&self, root: &Path) -> Result<(), DatagenError> {
        for e in &self.entries {
            for (rel, want) in [
                (&e.spec_path, &e.checksums.spec),
                (&e.tactile_path, &e.checksums.tactile),
                (&e.visual_path, &e.checksums.visual),
            ] {
                let path = root.join(rel);
                let bytes = fs::read(&path).map_err(|source| DatagenError::Io { path: path.clone(), source })?;
                if &sha256_hex(&bytes) != want {
                    return Err(DatagenError::Checksum(rel.clone()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error(transparent)]
    Config(#[from] GenConfigError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("sample {id}: {source}")]
    Pipeline { id: String, source: PipelineError },
    #[error("sample {id} failed validation: {}", summary(findings))]
    Validation { id: String, findings: Vec<Finding> },
    #[error("checksum mismatch for {0}")]
    Checksum(String),
}

fn summary(findings: &[Finding]) -> String {
    findings
        .iter()
        .map(|f| format!("{} at {}: {}", f.rule_id, f.locus, f.message))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<String, DatagenError> {
    fs::write(&path, bytes).map_err(|source| DatagenError::Io { path, source })?;
    Ok(sha256_hex(bytes))
}

pub fn sample_id(category: ChartType, index: usize) -> String {
    format!("{}-{index:05}", category.tag().replace('_', "-"))
}

fn gen_sample(
    cfg: &GenConfig,
    pipeline: &PipelineConfig,
    rules: &RuleSet,
    out: &Path,
    category: ChartType,
    index: usize,
) -> Result<ManifestEntry, DatagenError> {
    let id = sample_id(category, index);
    let seed = sample_seed(cfg.seed, category, index);
    let spec = gen_spec_with(cfg, category, seed);
    let pair = emit_dataset_pair(&spec, pipeline).map_err(|source| DatagenError::Pipeline { id: id.clone(), source })?;
    let report = validate_svg(&pair.tactile, rules);
    if report.has_errors() {
        return Err(DatagenError::Validation {
            id,
            findings: report.errors().cloned().collect(),
        });
    }
    let dir = category.tag();
    let rel = |ext: &str| format!("{dir}/{id}.{ext}");
    let (spec_path, tactile_path, visual_path) = (rel("spec.json"), rel("tactile.svg"), rel("visual.svg"));
    let checksums = Checksums {
        spec: write(out.join(&spec_path), pair.spec_document.as_bytes())?,
        tactile: write(out.join(&tactile_path), pair.tactile.as_bytes())?,
        visual: write(out.join(&visual_path), pair.visual.as_bytes())?,
    };
    Ok(ManifestEntry {
        id,
        category,
        seed_used: seed,
        spec_path,
        tactile_path,
        visual_path,
        checksums,
    })
}

pub fn gen_dataset(cfg: &GenConfig, out_dir: &Path) -> Result<DatasetManifest, DatagenError> {
    gen_dataset_with(cfg, &PipelineConfig::default(), &RuleSet::default(), out_dir)
}

/// Writes `<out>/<category>/<id>.{spec.json,tactile.svg,visual.svg}` for every
/// sample, then `<out>/manifest.json`. Any sample that fails to compile or
/// validate aborts the run before the manifest is written.
pub fn gen_dataset_with(
    cfg: &GenConfig,
    pipeline: &PipelineConfig,
    rules: &RuleSet,
    out_dir: &Path,
) -> Result<DatasetManifest, DatagenError> {
    cfg.validate()?;
    for c in &cfg.categories {
        let dir = out_dir.join(c.tag());
        fs::create_dir_all(&dir).map_err(|source| DatagenError::Io { path: dir, source })?;
    }
    let jobs: Vec<(ChartType, usize)> = cfg
        .categories
        .iter()
        .flat_map(|&c| (0..cfg.n_per_category).map(move |i| (c, i)))
        .collect();
    let entries = jobs
        .par_iter()
        .map(|&(c, i)| gen_sample(cfg, pipeline, rules, out_dir, c, i))
        .collect::<Result<Vec<_>, _>>()?;
    log::info!("generated {} samples", entries.len());
    let manifest = DatasetManifest {
        generator_version: GENERATOR_VERSION.to_string(),
        root_seed: cfg.seed,
        n_per_category: cfg.n_per_category,
        entries,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write(out_dir.join("manifest.json"), json.as_bytes())?;
    Ok(manifest)
}
