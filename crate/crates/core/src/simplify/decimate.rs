//! Scatter decluttering: at most `points_per_label_unit` marks between two
//! adjacent x labels, and no two kept marks closer than the marker size plus
//! the minimum gap. Points are only ever dropped, never moved.

use std::cmp::Ordering;

use thiserror::Error;

use super::SimplifyConfig;
use crate::model::{DataPoint, PlotTransform, TickLabel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecimateError {
    #[error("decimation needs at least 2 x ticks, got {0}")]
    TooFewTicks(usize),
}

/// Returns the indices of the points to draw, ascending.
///
/// Each inter-tick interval is cut into `points_per_label_unit` equal bins;
/// the last interval is closed on the right. In every bin the point closest
/// to the bin's x centre is a candidate (lower index on ties). Candidates are
/// then accepted left to right unless they come within
/// `marker_diameter_mm + min_mark_gap_mm` of an accepted one.
pub fn decimate_scatter(
    points: &[DataPoint],
    x_ticks: &[TickLabel],
    cfg: &SimplifyConfig,
    marker_diameter_mm: f64,
    transform: &PlotTransform,
) -> Result<Vec<usize>, DecimateError> {
    if x_ticks.len() < 2 {
        return Err(DecimateError::TooFewTicks(x_ticks.len()));
    }
    let ticks: Vec<f64> = x_ticks.iter().map(|t| t.value.position()).collect();
    let bins_per_interval = cfg.points_per_label_unit as usize;
    let last_interval = ticks.len() - 2;

    let mut candidates: Vec<usize> = Vec::new();
    for (i, pair) in ticks.windows(2).enumerate() {
        let (lo, hi) = (pair[0], pair[1]);
        let closed = i == last_interval;
        let width = (hi - lo) / bins_per_interval as f64;
        let bin_lo = |j: usize| lo + j as f64 * width;
        let mut best: Vec<Option<(f64, usize)>> = vec![None; bins_per_interval];
        for (idx, p) in points.iter().enumerate() {
            if !(p.x >= lo && (p.x < hi || (closed && p.x == hi))) {
                continue;
            }
            // locate the bin by arithmetic, then settle against the exact bin edges
            let mut b = (((p.x - lo) / width).floor().max(0.0) as usize).min(bins_per_interval - 1);
            while b > 0 && p.x < bin_lo(b) {
                b -= 1;
            }
            while b + 1 < bins_per_interval && p.x >= bin_lo(b + 1) {
                b += 1;
            }
            let centre = bin_lo(b) + width / 2.0;
            let d = (p.x - centre).abs();
            match best[b] {
                Some((bd, _)) if bd <= d => {}
                _ => best[b] = Some((d, idx)),
            }
        }
        candidates.extend(best.into_iter().flatten().map(|(_, idx)| idx));
    }

    candidates.sort_by(|&a, &b| {
        points[a]
            .x
            .partial_cmp(&points[b].x)
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });

    let min_sep = marker_diameter_mm + cfg.min_mark_gap_mm;
    let mut accepted: Vec<(usize, crate::model::Point2)> = Vec::new();
    for idx in candidates {
        let at = transform.apply(points[idx]);
        if accepted.iter().all(|(_, other)| at.distance(*other) >= min_sep) {
            accepted.push((idx, at));
        }
    }
    let mut out: Vec<usize> = accepted.into_iter().map(|(i, _)| i).collect();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braille::BrailleRun;
    use crate::model::{AxisMap, TickValue};

    fn ticks(v: &[f64]) -> Vec<TickLabel> {
        v.iter()
            .map(|&x| TickLabel {
                value: TickValue::Number(x),
                label_text: String::new(),
                braille: BrailleRun {
                    cells: vec![],
                    source_text: String::new(),
                },
            })
            .collect()
    }

    fn transform() -> PlotTransform {
        PlotTransform {
            x: AxisMap { data_lo: 0.0, data_hi: 100.0, mm_lo: 0.0, mm_hi: 200.0 },
            y: AxisMap { data_lo: 0.0, data_hi: 100.0, mm_lo: 100.0, mm_hi: 0.0 },
        }
    }

    #[test]
    fn well_separated_points_all_kept() {
        let pts: Vec<_> = (0..5).map(|i| DataPoint::new(i as f64 * 20.0, 50.0)).collect();
        let sel = decimate_scatter(&pts, &ticks(&[0.0, 50.0, 100.0]), &SimplifyConfig::default(), 4.0, &transform()).unwrap();
        assert_eq!(sel, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn coincident_points_keep_one() {
        let pts = vec![DataPoint::new(10.0, 10.0), DataPoint::new(10.0, 10.0)];
        let sel = decimate_scatter(&pts, &ticks(&[0.0, 50.0, 100.0]), &SimplifyConfig::default(), 4.0, &transform()).unwrap();
        assert_eq!(sel, vec![0]);
    }

    #[test]
    fn last_tick_is_inside_the_last_interval() {
        let pts = vec![DataPoint::new(100.0, 10.0)];
        let sel = decimate_scatter(&pts, &ticks(&[0.0, 50.0, 100.0]), &SimplifyConfig::default(), 4.0, &transform()).unwrap();
        assert_eq!(sel, vec![0]);
    }

    #[test]
    fn too_few_ticks() {
        let r = decimate_scatter(&[], &ticks(&[0.0]), &SimplifyConfig::default(), 4.0, &transform());
        assert_eq!(r, Err(DecimateError::TooFewTicks(1)));
    }

    #[test]
    fn dense_uniform_cloud_respects_caps() {
        let pts: Vec<_> = (0..1000)
            .map(|i| DataPoint::new(i as f64 / 10.0, ((i * 37) % 100) as f64))
            .collect();
        let t = ticks(&[0.0, 50.0, 100.0]);
        let sel = decimate_scatter(&pts, &t, &SimplifyConfig::default(), 4.0, &transform()).unwrap();
        assert!(sel.len() <= 20 && !sel.is_empty());
        for (a, &i) in sel.iter().enumerate() {
            for &j in &sel[a + 1..] {
                let d = transform().apply(pts[i]).distance(transform().apply(pts[j]));
                assert!(d >= 6.0);
            }
        }
    }
}
