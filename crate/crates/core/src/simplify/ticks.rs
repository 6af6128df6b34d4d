//! Axis label reduction and encoding-aware label formatting.

use chrono::{Days, NaiveDate};
use thiserror::Error;

use crate::braille::{self, BrailleError};
use crate::model::{Domain, Encoding, TickLabel, TickValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabelError {
    #[error("degenerate axis domain [{lo}, {hi}]")]
    DegenerateDomain { lo: f64, hi: f64 },
    #[error("tick label `{label}` cannot be transcribed: {source}")]
    Braille {
        label: String,
        #[source]
        source: BrailleError,
    },
}

const POW10: [f64; 23] = [
    1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16,
    1e17, 1e18, 1e19, 1e20, 1e21, 1e22,
];

fn pow10(p: i32) -> f64 {
    POW10
        .get(p.unsigned_abs() as usize)
        .copied()
        .unwrap_or_else(|| 10f64.powi(p.abs()))
}

/// Mantissas of the nice-step set, scaled by ten: 1, 2, 2.5 and 5.
pub const MANTISSAS_X10: [i64; 4] = [10, 20, 25, 50];

/// A tick step `mantissa_x10 / 10 * 10^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NiceStep {
    pub mantissa_x10: i64,
    pub exp: i32,
}

impl NiceStep {
    pub fn value(self) -> f64 {
        self.tick(1)
    }

    /// The `k`-th multiple of the step, rounded once from its exact decimal value.
    pub fn tick(self, k: i64) -> f64 {
        let num = (k as i128 * self.mantissa_x10 as i128) as f64;
        let p = self.exp - 1;
        if p >= 0 {
            num * pow10(p)
        } else {
            num / pow10(-p)
        }
    }

    /// Whether ticks at multiples of this step can be labelled in `encoding`.
    /// Integral encodings need whole steps; the others need hundredths.
    pub fn allowed_for(self, encoding: Encoding) -> bool {
        let min_exp = if encoding.is_integral() { 0 } else { -2 };
        self.exp > min_exp || (self.exp == min_exp && self.mantissa_x10 != 25)
    }
}

/// Chosen numeric ticks together with the step that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct NiceTicks {
    pub step: NiceStep,
    pub values: Vec<f64>,
}

impl NiceTicks {
    pub fn overshoot(&self, lo: f64, hi: f64) -> f64 {
        (lo - self.values[0]) + (self.values[self.values.len() - 1] - hi)
    }
}

/// Picks 3 or 4 ticks at multiples of a nice step covering `[lo, hi]`,
/// minimising how far they reach beyond the domain. Ties prefer 4 ticks, then
/// the smaller mantissa.
pub fn nice_ticks(lo: f64, hi: f64, encoding: Encoding) -> Result<NiceTicks, LabelError> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return Err(LabelError::DegenerateDomain { lo, hi });
    }
    let min_allowed_exp = if encoding.is_integral() { 0 } else { -2 };
    let first_exp = ((span / 3.0).log10().floor() as i32 - 1).max(min_allowed_exp);
    let last_exp = (span.log10().floor() as i32 + 1).max(min_allowed_exp + 1);
    let tol = span * 1e-9;

    let mut best: Option<(f64, usize, NiceStep, i64)> = None;
    for exp in first_exp..=last_exp {
        for mantissa_x10 in MANTISSAS_X10 {
            let step = NiceStep { mantissa_x10, exp };
            if !step.allowed_for(encoding) {
                continue;
            }
            let mut k0 = (lo / step.value()).floor() as i64;
            while step.tick(k0) > lo {
                k0 -= 1;
            }
            while step.tick(k0 + 1) <= lo {
                k0 += 1;
            }
            for count in [3usize, 4] {
                let last = step.tick(k0 + count as i64 - 1);
                if last < hi {
                    continue;
                }
                let overshoot = (lo - step.tick(k0)) + (last - hi);
                let better = match &best {
                    None => true,
                    Some((b_over, b_count, b_step, _)) => {
                        if overshoot < b_over - tol {
                            true
                        } else if overshoot <= b_over + tol {
                            count > *b_count
                                || (count == *b_count && mantissa_x10 < b_step.mantissa_x10)
                        } else {
                            false
                        }
                    }
                };
                if better {
                    best = Some((overshoot, count, step, k0));
                }
            }
        }
    }
    let (_, count, step, k0) = best.expect("a step at least as wide as the span always covers it");
    Ok(NiceTicks {
        step,
        values: (0..count as i64).map(|k| step.tick(k0 + k)).collect(),
    })
}

/// Indices of the categories that get a label: all of them when there are
/// at most four, otherwise 3 or 4 evenly spaced ones including both ends.
pub fn category_tick_indices(n: usize) -> Vec<usize> {
    if n <= 4 {
        return (0..n).collect();
    }
    let count = if (n - 1).is_multiple_of(3) {
        4
    } else if (n - 1).is_multiple_of(2) {
        3
    } else {
        4
    };
    (0..count)
        .map(|k| ((k * (n - 1)) as f64 / (count - 1) as f64).round() as usize)
        .collect()
}

/// Reduces an axis to 3 or 4 labelled ticks (fewer only for short category lists).
pub fn reduce_axis_labels(domain: &Domain, encoding: Encoding) -> Result<Vec<TickLabel>, LabelError> {
    let values: Vec<TickValue> = match domain {
        Domain::Numeric { lo, hi } => nice_ticks(*lo, *hi, encoding)?
            .values
            .into_iter()
            .map(TickValue::Number)
            .collect(),
        Domain::Categories(names) => category_tick_indices(names.len())
            .into_iter()
            .map(|index| TickValue::Category {
                index,
                name: names[index].clone(),
            })
            .collect(),
    };
    values
        .into_iter()
        .map(|value| {
            let label_text = format_label(&value, encoding);
            let braille = braille::transcribe(&label_text).map_err(|source| LabelError::Braille {
                label: label_text.clone(),
                source,
            })?;
            Ok(TickLabel {
                value,
                label_text,
                braille,
            })
        })
        .collect()
}

pub fn format_label(value: &TickValue, encoding: Encoding) -> String {
    let v = match value {
        TickValue::Category { name, .. } => return name.clone(),
        TickValue::Number(v) => *v,
    };
    match encoding {
        Encoding::Int => format_int(v),
        Encoding::Float => format_float(v),
        Encoding::Fraction => format_fraction(v).unwrap_or_else(|| {
            log::warn!("no fraction with denominator <= 16 matches {v}; using decimal form");
            format_float(v)
        }),
        Encoding::DateTime => format_date(v),
        Encoding::Text => format_float(v),
    }
}

fn format_int(v: f64) -> String {
    let r = v.round();
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r:.0}")
    }
}

/// Shortest decimal with at most two fraction digits that parses back to `v`;
/// otherwise the shortest round-trip representation.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    for digits in 0..=2 {
        let s = format!("{v:.digits$}");
        if s.parse::<f64>() == Ok(v) {
            return s;
        }
    }
    format!("{v}")
}

/// `p/q` with the smallest denominator `q <= 16` within 1e-9 of `v`, with an
/// integer part when `|v| >= 1` (`1 1/2`).
pub fn format_fraction(v: f64) -> Option<String> {
    let (p, q) = (1..=16i64).find_map(|q| {
        let p = (v * q as f64).round();
        ((v - p / q as f64).abs() <= 1e-9).then_some((p as i64, q))
    })?;
    let sign = if p < 0 { "-" } else { "" };
    let (whole, rem) = (p.abs() / q, p.abs() % q);
    Some(match (whole, rem) {
        (0, 0) => "0".to_string(),
        (w, 0) => format!("{sign}{w}"),
        (0, r) => format!("{sign}{r}/{q}"),
        (w, r) => format!("{sign}{w} {r}/{q}"),
    })
}

const UNIX_EPOCH: NaiveDate = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap();

/// Days since 1970-01-01 as an ISO-8601 calendar date.
pub fn format_date(days: f64) -> String {
    let d = days.floor() as i64;
    let date = if d >= 0 {
        UNIX_EPOCH.checked_add_days(Days::new(d as u64))
    } else {
        UNIX_EPOCH.checked_sub_days(Days::new(d.unsigned_abs()))
    };
    match date {
        Some(date) => date.format("%Y-%m-%d").to_string(),
        None => format_int(days),
    }
}

/// Parses `YYYY-MM-DD` into days since 1970-01-01.
pub fn parse_date(s: &str) -> Option<i64> {
    let date = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
    if s.len() != 10 {
        return None;
    }
    Some(date.signed_duration_since(UNIX_EPOCH).num_days())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(lo: f64, hi: f64, enc: Encoding) -> Vec<f64> {
        nice_ticks(lo, hi, enc).unwrap().values
    }

    #[test]
    fn documented_examples() {
        assert_eq!(values(0.0, 100.0, Encoding::Int), vec![0.0, 50.0, 100.0]);
        assert_eq!(values(3.0, 97.0, Encoding::Int), vec![0.0, 50.0, 100.0]);
        assert_eq!(
            nice_ticks(5.0, 5.0, Encoding::Int),
            Err(LabelError::DegenerateDomain { lo: 5.0, hi: 5.0 })
        );
    }

    #[test]
    fn categories_pass_through_or_reduce() {
        let d = Domain::Categories(vec!["Q1".into(), "Q2".into(), "Q3".into()]);
        let labels = reduce_axis_labels(&d, Encoding::Text).unwrap();
        let texts: Vec<_> = labels.iter().map(|l| l.label_text.as_str()).collect();
        assert_eq!(texts, ["Q1", "Q2", "Q3"]);
        assert_eq!(category_tick_indices(5), vec![0, 2, 4]);
        assert_eq!(category_tick_indices(7), vec![0, 2, 4, 6]);
        assert_eq!(category_tick_indices(6), vec![0, 2, 3, 5]);
        assert_eq!(category_tick_indices(1), vec![0]);
    }

    #[test]
    fn integral_encodings_avoid_fractional_steps() {
        // [0, 5] could use 2.5 with Float but must not with Int
        assert_eq!(values(0.0, 5.0, Encoding::Float), vec![0.0, 2.5, 5.0]);
        let int = values(0.0, 5.0, Encoding::Int);
        assert!(int.iter().all(|v| v.fract() == 0.0), "{int:?}");
    }

    #[test]
    fn tiny_float_span_still_covers() {
        let v = values(1.0, 1.00001, Encoding::Float);
        assert!(v[0] <= 1.0 && *v.last().unwrap() >= 1.00001);
        assert!(v.iter().all(|t| format_float(*t).split('.').nth(1).map_or(0, str::len) <= 2));
    }

    #[test]
    fn negative_domains() {
        assert_eq!(values(-7.0, 7.0, Encoding::Int), vec![-10.0, 0.0, 10.0]);
    }

    #[test]
    fn label_formats() {
        let n = |v| TickValue::Number(v);
        assert_eq!(format_label(&n(42.0), Encoding::Int), "42");
        assert_eq!(format_label(&n(0.5), Encoding::Fraction), "1/2");
        assert_eq!(format_label(&n(1.5), Encoding::Fraction), "1 1/2");
        assert_eq!(format_label(&n(-0.75), Encoding::Fraction), "-3/4");
        assert_eq!(format_label(&n(3.0), Encoding::Fraction), "3");
        assert_eq!(format_label(&n(0.05), Encoding::Fraction), "0.05");
        assert_eq!(format_label(&n(19723.0), Encoding::DateTime), "2024-01-01");
        assert_eq!(format_label(&n(2.5), Encoding::Float), "2.5");
        assert_eq!(format_label(&n(0.1 + 0.2), Encoding::Float), "0.30000000000000004");
        assert_eq!(format_label(&n(-0.0), Encoding::Float), "0");
    }

    #[test]
    fn date_parsing() {
        assert_eq!(parse_date("2024-01-01"), Some(19723));
        assert_eq!(parse_date("1969-12-31"), Some(-1));
        assert_eq!(parse_date("2024-1-1"), None);
        assert_eq!(parse_date("2024-02-30"), None);
        assert_eq!(format_date(-1.0), "1969-12-31");
    }

    #[test]
    fn step_ticks_are_exact_decimals() {
        let s = NiceStep { mantissa_x10: 10, exp: -1 };
        assert_eq!(s.tick(3), 0.3);
        let s = NiceStep { mantissa_x10: 25, exp: -1 };
        assert_eq!(s.tick(3), 0.75);
    }
}
