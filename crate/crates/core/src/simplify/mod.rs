//! Lowering passes that turn a faithful [`ChartSpec`](crate::model::ChartSpec)
//! into something readable by touch: fewer axis labels, decluttered scatter
//! marks, distinguishable series styles and optional line smoothing.

mod decimate;
mod smooth;
mod ticks;

pub use decimate::{decimate_scatter, DecimateError};
pub use smooth::smooth_polyline;
pub use ticks::{
    category_tick_indices, format_date, format_float, format_fraction, format_label, nice_ticks,
    parse_date, reduce_axis_labels, LabelError, NiceStep, NiceTicks, MANTISSAS_X10,
};

use thiserror::Error;

use crate::model::{ChartType, DashSegment, Hatch, MarkerShape, TactileStyle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    #[default]
    Off,
    Chaikin { iterations: u8 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplifyConfig {
    pub points_per_label_unit: u32,
    pub min_mark_gap_mm: f64,
    pub palettes: Palettes,
    pub smoothing: Smoothing,
}

impl Default for SimplifyConfig {
    fn default() -> Self {
        Self {
            points_per_label_unit: 10,
            min_mark_gap_mm: 2.0,
            palettes: Palettes::default(),
            smoothing: Smoothing::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("points_per_label_unit must be positive")]
    ZeroPointsPerUnit,
    #[error("min_mark_gap_mm must be positive, got {0}")]
    BadGap(f64),
    #[error("smoothing iterations must be 1..=3, got {0}")]
    BadIterations(u8),
    #[error("{0} palette has duplicate entries {1} and {2}")]
    DuplicatePaletteEntry(ChartType, usize, usize),
    #[error("{0} palette is empty")]
    EmptyPalette(ChartType),
}

impl SimplifyConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.points_per_label_unit == 0 {
            return Err(ConfigError::ZeroPointsPerUnit);
        }
        if !(self.min_mark_gap_mm > 0.0) {
            return Err(ConfigError::BadGap(self.min_mark_gap_mm));
        }
        if let Smoothing::Chaikin { iterations } = self.smoothing {
            if !(1..=3).contains(&iterations) {
                return Err(ConfigError::BadIterations(iterations));
            }
        }
        self.palettes.validate()
    }
}

/// Per-chart-type ordered style palettes.
#[derive(Debug, Clone, PartialEq)]
pub struct Palettes {
    pub line: Vec<TactileStyle>,
    pub bar: Vec<TactileStyle>,
    pub scatter: Vec<TactileStyle>,
    pub error_bar: Vec<TactileStyle>,
}

const MARKER_ORDER: [MarkerShape; 6] = [
    MarkerShape::Circle,
    MarkerShape::Square,
    MarkerShape::Triangle,
    MarkerShape::Cross,
    MarkerShape::Diamond,
    MarkerShape::Plus,
];

const HATCH_ORDER: [Hatch; 6] = [
    Hatch::SolidFill,
    Hatch::Diagonal,
    Hatch::Horizontal,
    Hatch::Dots,
    Hatch::Vertical,
    Hatch::Crosshatch,
];

fn style(width: f64, dashes: &[(f64, f64)], marker: MarkerShape, hatch: Hatch) -> TactileStyle {
    let dashes = dashes
        .iter()
        .map(|&(on_mm, off_mm)| DashSegment { on_mm, off_mm })
        .collect();
    TactileStyle::new(width, dashes, marker, hatch).expect("default palette entries are tactile-safe")
}

impl Default for Palettes {
    fn default() -> Self {
        use MarkerShape::Circle;
        use Hatch::SolidFill;
        let line = vec![
            style(1.5, &[], Circle, SolidFill),
            style(1.5, &[(4.0, 3.0)], Circle, SolidFill),
            style(1.5, &[(1.5, 3.0)], Circle, SolidFill),
            style(1.5, &[(4.0, 3.0), (1.5, 3.0)], Circle, SolidFill),
            style(2.5, &[], Circle, SolidFill),
            style(2.5, &[(7.0, 3.0)], Circle, SolidFill),
        ];
        let scatter = MARKER_ORDER.iter().map(|&m| style(1.5, &[], m, SolidFill)).collect();
        let bar = HATCH_ORDER.iter().map(|&h| style(1.5, &[], Circle, h)).collect();
        let error_bar = MARKER_ORDER
            .iter()
            .zip(HATCH_ORDER)
            .map(|(&m, h)| style(1.5, &[], m, h))
            .collect();
        Self {
            line,
            bar,
            scatter,
            error_bar,
        }
    }
}

impl Palettes {
    pub fn for_chart(&self, chart_type: ChartType) -> &[TactileStyle] {
        match chart_type {
            ChartType::Line => &self.line,
            ChartType::Bar => &self.bar,
            ChartType::Scatter => &self.scatter,
            ChartType::ErrorBar => &self.error_bar,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for t in ChartType::ALL {
            let p = self.for_chart(t);
            if p.is_empty() {
                return Err(ConfigError::EmptyPalette(t));
            }
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    if p[i] == p[j] {
                        return Err(ConfigError::DuplicatePaletteEntry(t, i, j));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StyleAssignError {
    #[error("{requested} series but the {chart_type} palette holds only {capacity} styles")]
    PaletteExhausted {
        chart_type: ChartType,
        requested: usize,
        capacity: usize,
    },
}

/// The first `n_series` entries of the chart type's palette.
pub fn assign_styles(
    n_series: usize,
    chart_type: ChartType,
    cfg: &SimplifyConfig,
) -> Result<Vec<TactileStyle>, StyleAssignError> {
    let palette = cfg.palettes.for_chart(chart_type);
    if n_series > palette.len() {
        return Err(StyleAssignError::PaletteExhausted {
            chart_type,
            requested: n_series,
            capacity: palette.len(),
        });
    }
    Ok(palette[..n_series].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_line_style_is_solid_1_5() {
        let s = assign_styles(1, ChartType::Line, &SimplifyConfig::default()).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].is_solid());
        assert_eq!(s[0].stroke_width_mm(), 1.5);
    }

    #[test]
    fn four_line_styles_have_distinct_dashes() {
        let s = assign_styles(4, ChartType::Line, &SimplifyConfig::default()).unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(s[i].dash_pattern(), s[j].dash_pattern());
            }
        }
    }

    #[test]
    fn seventh_series_exhausts_palette() {
        let err = assign_styles(7, ChartType::Line, &SimplifyConfig::default()).unwrap_err();
        assert_eq!(
            err,
            StyleAssignError::PaletteExhausted {
                chart_type: ChartType::Line,
                requested: 7,
                capacity: 6
            }
        );
    }

    #[test]
    fn palettes_vary_the_documented_attribute() {
        let cfg = SimplifyConfig::default();
        for n in 1..=6 {
            for t in ChartType::ALL {
                let s = assign_styles(n, t, &cfg).unwrap();
                for i in 0..n {
                    for j in i + 1..n {
                        assert_ne!(s[i], s[j]);
                        match t {
                            ChartType::Scatter => assert_ne!(s[i].marker(), s[j].marker()),
                            ChartType::Bar | ChartType::ErrorBar => assert_ne!(s[i].hatch(), s[j].hatch()),
                            ChartType::Line => {}
                        }
                    }
                }
            }
        }
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn config_validation() {
        let cfg = SimplifyConfig {
            smoothing: Smoothing::Chaikin { iterations: 4 },
            ..SimplifyConfig::default()
        };
        assert!(cfg.validate().is_err());
        let mut cfg = SimplifyConfig::default();
        cfg.palettes.line[1] = cfg.palettes.line[0].clone();
        assert!(matches!(cfg.validate(), Err(ConfigError::DuplicatePaletteEntry(ChartType::Line, 0, 1))));
    }
}
