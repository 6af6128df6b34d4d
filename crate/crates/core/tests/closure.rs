use std::collections::BTreeMap;

use tactograph::datagen::{gen_spec, sample_seed};
use tactograph::model::ChartType;
use tactograph::pipeline::{convert, convert_visual, PipelineConfig};
use tactograph::validate::{validate_svg, RuleSet};

#[test]
fn generated_specs_compile_and_validate_clean() {
    let cfg = PipelineConfig::default();
    let rules = RuleSet::default();
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    let mut example = BTreeMap::new();
    for c in ChartType::ALL {
        for i in 0..100 {
            let spec = gen_spec(c, sample_seed(3, c, i));
            let key = match convert(&spec, &cfg) {
                Ok(svg) => {
                    let r = validate_svg(&svg, &rules);
                    if !r.has_errors() {
                        continue;
                    }
                    let f = r.errors().next().unwrap();
                    format!("{c}: {}", f.rule_id)
                }
                Err(e) => format!("{c}: {e}").chars().take(90).collect(),
            };
            example.entry(key.clone()).or_insert(i);
            *failures.entry(key).or_default() += 1;
        }
        let spec = gen_spec(c, 1);
        convert_visual(&spec, &cfg).unwrap();
    }
    assert!(failures.is_empty(), "{failures:#?} first at {example:?}");
}
