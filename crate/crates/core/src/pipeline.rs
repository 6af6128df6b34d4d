//! The full compiler: spec → simplified labels and marks → scene → SVG.

use thiserror::Error;

use crate::emit::{emit_svg, EmitConfig, EmitError, Variant};
use crate::ingest::serialize_spec;
use crate::layout::{layout_scene, plot_geometry, AxisTicks, CanvasConfig, LayoutError, LayoutInput};
use crate::model::{ChartSpec, ChartType, TactileScene, TactileStyle};
use crate::simplify::{
    assign_styles, decimate_scatter, reduce_axis_labels, ConfigError, DecimateError, LabelError,
    SimplifyConfig, StyleAssignError,
};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineConfig {
    pub simplify: SimplifyConfig,
    pub canvas: CanvasConfig,
    pub emit: EmitConfig,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.simplify.validate()?;
        self.canvas.validate()?;
        self.emit.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("axis labels: {0}")]
    Labels(#[from] LabelError),
    #[error("decimation: {0}")]
    Decimate(#[from] DecimateError),
    #[error(transparent)]
    Styles(#[from] StyleAssignError),
    #[error("layout: {0}")]
    Layout(#[from] LayoutError),
    #[error("emit: {0}")]
    Emit(#[from] EmitError),
}

/// A compiled chart with the intermediate decisions kept for inspection.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    pub ticks: AxisTicks,
    pub styles: Vec<TactileStyle>,
    /// Per series: the drawn point indices, `None` when every point is drawn.
    pub selected: Vec<Option<Vec<usize>>>,
    pub scene: TactileScene,
}

fn build(spec: &ChartSpec, cfg: &PipelineConfig, decimate: bool) -> Result<Compiled, PipelineError> {
    cfg.validate()?;
    let ticks = AxisTicks {
        x: reduce_axis_labels(spec.x_axis().domain(), spec.x_axis().encoding())?,
        y: reduce_axis_labels(spec.y_axis().domain(), spec.y_axis().encoding())?,
    };
    let styles = assign_styles(spec.series().len(), spec.chart_type(), &cfg.simplify)?;
    let mut selected = vec![None; spec.series().len()];
    if decimate && spec.chart_type() == ChartType::Scatter && ticks.x.len() >= 2 {
        let geometry = plot_geometry(spec, &ticks, &cfg.canvas)?;
        for (k, s) in spec.series().iter().enumerate() {
            let idx = decimate_scatter(
                &s.points,
                &ticks.x,
                &cfg.simplify,
                cfg.canvas.marker_size_mm,
                &geometry.transform,
            )?;
            selected[k] = Some(idx);
        }
    }
    let document = serialize_spec(spec);
    let scene = layout_scene(
        &LayoutInput {
            spec,
            ticks: &ticks,
            styles: &styles,
            selected: &selected,
            smoothing: cfg.simplify.smoothing,
            spec_document: &document,
        },
        &cfg.canvas,
    )?;
    Ok(Compiled {
        ticks,
        styles,
        selected,
        scene,
    })
}

/// Runs the simplification passes and layout for the tactile output.
pub fn compile(spec: &ChartSpec, cfg: &PipelineConfig) -> Result<Compiled, PipelineError> {
    build(spec, cfg, true)
}

/// Tactile SVG for a spec.
pub fn convert(spec: &ChartSpec, cfg: &PipelineConfig) -> Result<String, PipelineError> {
    let compiled = compile(spec, cfg)?;
    let emit = EmitConfig {
        variant: Variant::Tactile,
        ..cfg.emit.clone()
    };
    Ok(emit_svg(&compiled.scene, &emit)?)
}

/// Conventional rendering of the unsimplified spec: every point, thin
/// coloured strokes and Latin text.
pub fn convert_visual(spec: &ChartSpec, cfg: &PipelineConfig) -> Result<String, PipelineError> {
    let compiled = build(spec, cfg, false)?;
    let emit = EmitConfig {
        variant: Variant::Visual,
        ..cfg.emit.clone()
    };
    Ok(emit_svg(&compiled.scene, &emit)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPair {
    pub tactile: String,
    pub visual: String,
    pub spec_document: String,
}

/// Tactile SVG, visual SVG and canonical spec document for one chart.
pub fn emit_dataset_pair(spec: &ChartSpec, cfg: &PipelineConfig) -> Result<DatasetPair, PipelineError> {
    Ok(DatasetPair {
        tactile: convert(spec, cfg)?,
        visual: convert_visual(spec, cfg)?,
        spec_document: serialize_spec(spec),
    })
}
