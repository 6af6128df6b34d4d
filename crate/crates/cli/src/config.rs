//! Layered configuration: defaults, then the config file, then flags.
//!
//! The file is a JSON document with a single `config` root:
//!
//! ```json
//! {"config": {"canvas": {"width_mm": 420}, "simplify": {"smoothing_iterations": 2}}}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tactograph::datagen::GenConfig;
use tactograph::model_client::{EndpointConfig, Mode, AUTH_TOKEN_ENV};
use tactograph::pipeline::PipelineConfig;
use tactograph::simplify::Smoothing;
use tactograph::validate::RuleSet;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRoot {
    config: FileConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    simplify: SimplifyLayer,
    canvas: CanvasLayer,
    emit: EmitLayer,
    rules: Option<RuleSet>,
    gen: Option<GenConfig>,
    endpoint: EndpointLayer,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimplifyLayer {
    points_per_label_unit: Option<u32>,
    min_mark_gap_mm: Option<f64>,
    smoothing_iterations: Option<u8>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CanvasLayer {
    width_mm: Option<f64>,
    height_mm: Option<f64>,
    margin_mm: Option<f64>,
    min_gap_mm: Option<f64>,
    tick_length_mm: Option<f64>,
    bbox_padding_mm: Option<f64>,
    marker_size_mm: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EmitLayer {
    pretty: Option<bool>,
    id_prefix: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EndpointLayer {
    base_url: Option<String>,
    timeout_s: Option<f64>,
    fixtures: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct CliConfig {
    pub pipeline: PipelineConfig,
    pub rules: RuleSet,
    pub gen: GenConfig,
    pub endpoint: EndpointConfig,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

pub fn smoothing(iterations: u8) -> Smoothing {
    if iterations == 0 {
        Smoothing::Off
    } else {
        Smoothing::Chaikin { iterations }
    }
}

impl CliConfig {
    /// Defaults overlaid with `path`, when given. The endpoint token comes
    /// from the environment only.
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let mut cfg = CliConfig::default();
        cfg.endpoint.auth_token = std::env::var(AUTH_TOKEN_ENV).ok().filter(|t| !t.is_empty());
        let Some(path) = path else { return Ok(cfg) };
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let root: FileRoot =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let f = root.config;

        let s = &mut cfg.pipeline.simplify;
        set(&mut s.points_per_label_unit, f.simplify.points_per_label_unit);
        set(&mut s.min_mark_gap_mm, f.simplify.min_mark_gap_mm);
        set(&mut s.smoothing, f.simplify.smoothing_iterations.map(smoothing));

        let c = &mut cfg.pipeline.canvas;
        set(&mut c.width_mm, f.canvas.width_mm);
        set(&mut c.height_mm, f.canvas.height_mm);
        set(&mut c.margin_mm, f.canvas.margin_mm);
        set(&mut c.min_gap_mm, f.canvas.min_gap_mm);
        set(&mut c.tick_length_mm, f.canvas.tick_length_mm);
        set(&mut c.bbox_padding_mm, f.canvas.bbox_padding_mm);
        set(&mut c.marker_size_mm, f.canvas.marker_size_mm);

        let e = &mut cfg.pipeline.emit;
        set(&mut e.pretty, f.emit.pretty);
        set(&mut e.id_prefix, f.emit.id_prefix);

        set(&mut cfg.rules, f.rules);
        set(&mut cfg.gen, f.gen);

        let ep = &mut cfg.endpoint;
        set(&mut ep.base_url, f.endpoint.base_url);
        set(&mut ep.timeout_s, f.endpoint.timeout_s);
        set(&mut ep.mode, f.endpoint.fixtures.map(Mode::Fixture));
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), String> {
        self.pipeline.validate().map_err(|e| e.to_string())?;
        self.gen.validate().map_err(|e| e.to_string())
    }
}
