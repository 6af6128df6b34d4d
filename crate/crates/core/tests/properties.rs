use proptest::prelude::*;
use quick_xml::events::Event;
use quick_xml::Reader;

use tactograph::datagen::{gen_dataset, gen_spec, GenConfig};
use tactograph::ingest::{parse_spec, serialize_spec};
use tactograph::model::{AxisMap, ChartType, DataPoint, Domain, Encoding, PlotTransform};
use tactograph::pipeline::{convert, convert_visual, PipelineConfig};
use tactograph::simplify::{decimate_scatter, nice_ticks, reduce_axis_labels, SimplifyConfig};
use tactograph::validate::{validate_svg, RuleSet};

/// Exhaustive search in hundredths: steps m·10^e for every allowed exponent,
/// counts 3 and 4, least overshoot, then more ticks, then smaller mantissa.
fn ticks_oracle(lo: i64, hi: i64) -> Vec<i64> {
    let mut best: Option<((i64, i64, i64), Vec<i64>)> = None;
    for e in 0..12u32 {
        for m10 in [10i64, 20, 25, 50] {
            // step in hundredths is m10/10 * 10^(e-2) * 100 = m10 * 10^e / 10
            let raw = m10 * 10i64.pow(e);
            if raw % 10 != 0 {
                continue;
            }
            let step = raw / 10;
            let k0 = lo.div_euclid(step);
            for count in [4i64, 3] {
                let first = k0 * step;
                let last = (k0 + count - 1) * step;
                if last < hi {
                    continue;
                }
                let key = ((lo - first) + (last - hi), -count, m10);
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, (0..count).map(|i| first + i * step).collect()));
                }
            }
        }
    }
    best.unwrap().1
}

fn well_formed(xml: &str) -> Result<usize, String> {
    let mut reader = Reader::from_str(xml);
    let mut depth = 0i64;
    let mut elements = 0;
    loop {
        match reader.read_event() {
            Ok(Event::Start(_)) => {
                depth += 1;
                elements += 1;
            }
            Ok(Event::Empty(_)) => elements += 1,
            Ok(Event::End(_)) => depth -= 1,
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    if depth == 0 {
        Ok(elements)
    } else {
        Err(format!("unbalanced by {depth}"))
    }
}

fn chart_type() -> impl Strategy<Value = ChartType> {
    prop::sample::select(ChartType::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ticks_match_exhaustive_search(lo in -100_000i64..100_000, span in 1i64..500_000) {
        let hi = lo + span;
        let got = nice_ticks(lo as f64 / 100.0, hi as f64 / 100.0, Encoding::Float).unwrap().values;
        let want: Vec<f64> = ticks_oracle(lo, hi).into_iter().map(|v| v as f64 / 100.0).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn ticks_cover_and_are_evenly_spaced(lo in -1e9f64..1e9, span in 1e-3f64..1e9, enc in prop::sample::select(vec![Encoding::Int, Encoding::Float, Encoding::Fraction, Encoding::DateTime])) {
        let (lo, hi) = if enc.is_integral() { (lo.floor(), (lo + span).ceil()) } else { (lo, lo + span) };
        let t = nice_ticks(lo, hi, enc).unwrap();
        let v = &t.values;
        prop_assert!(v.len() == 3 || v.len() == 4);
        prop_assert!(v[0] <= lo && v[v.len() - 1] >= hi);
        prop_assert!(t.step.allowed_for(enc));
        let step = t.step.value();
        for w in v.windows(2) {
            prop_assert!(((w[1] - w[0]) - step).abs() <= step * 1e-9);
        }
    }

    #[test]
    fn decimation_keeps_caps_and_gaps(
        pts in prop::collection::vec((0.0f64..100.0, 0.0f64..100.0), 0..400),
        width in 30.0f64..300.0,
    ) {
        let points: Vec<DataPoint> = pts.iter().map(|&(x, y)| DataPoint::new(x, y)).collect();
        let ticks = reduce_axis_labels(&Domain::Numeric { lo: 0.0, hi: 100.0 }, Encoding::Float).unwrap();
        let tx: Vec<f64> = ticks.iter().map(|t| t.value.position()).collect();
        let tf = PlotTransform {
            x: AxisMap { data_lo: tx[0], data_hi: tx[tx.len() - 1], mm_lo: 0.0, mm_hi: width },
            y: AxisMap { data_lo: 0.0, data_hi: 100.0, mm_lo: 100.0, mm_hi: 0.0 },
        };
        let cfg = SimplifyConfig::default();
        let sel = decimate_scatter(&points, &ticks, &cfg, 4.0, &tf).unwrap();
        prop_assert!(sel.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(sel.len() <= 10 * (tx.len() - 1));
        for (a, &i) in sel.iter().enumerate() {
            for &j in &sel[a + 1..] {
                prop_assert!(tf.apply(points[i]).distance(tf.apply(points[j])) >= 6.0);
            }
        }
        if !points.is_empty() {
            prop_assert!(!sel.is_empty());
        }
    }

    #[test]
    fn compiled_charts_are_well_formed_and_clean(c in chart_type(), seed in any::<u64>()) {
        let spec = gen_spec(c, seed);
        let cfg = PipelineConfig::default();
        let svg = convert(&spec, &cfg).unwrap();
        prop_assert!(well_formed(&svg).unwrap() > 10);
        let report = validate_svg(&svg, &RuleSet::default());
        prop_assert!(report.is_clean(), "{:?}", report.findings);
        prop_assert!(well_formed(&convert_visual(&spec, &cfg).unwrap()).is_ok());
    }

    #[test]
    fn spec_documents_round_trip(c in chart_type(), seed in any::<u64>()) {
        let spec = gen_spec(c, seed);
        let doc = serialize_spec(&spec);
        let back = parse_spec(doc.as_bytes()).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(serialize_spec(&back), doc);
    }

    #[test]
    fn validator_never_panics(s in ".{0,300}") {
        let _ = validate_svg(&s, &RuleSet::default());
        let doc = format!("<svg xmlns=\"http://www.w3.org/2000/svg\">{s}</svg>");
        let _ = validate_svg(&doc, &RuleSet::default());
    }
}

#[test]
fn dataset_is_reproducible_and_verifiable() {
    let cfg = GenConfig {
        n_per_category: 2,
        seed: 42,
        ..GenConfig::default()
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = gen_dataset(&cfg, a.path()).unwrap();
    let mb = gen_dataset(&cfg, b.path()).unwrap();
    assert_eq!(ma, mb);
    assert_eq!(ma.entries.len(), 8);
    ma.verify(a.path()).unwrap();
    assert_eq!(
        std::fs::read(a.path().join("manifest.json")).unwrap(),
        std::fs::read(b.path().join("manifest.json")).unwrap()
    );
}

#[test]
fn unwritable_output_leaves_no_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = GenConfig {
        n_per_category: 1,
        ..GenConfig::default()
    };
    assert!(gen_dataset(&cfg, &blocker.join("out")).is_err());
    assert!(!blocker.join("out/manifest.json").exists());
}
