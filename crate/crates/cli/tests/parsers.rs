use std::fs;
use std::path::PathBuf;

use duplex_cli::output::format_g;
use duplex_cli::{parse_axis, parse_config, parse_value};
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    seeds.sort();
    seeds
        .into_iter()
        .map(|p| {
            let text = String::from_utf8_lossy(&fs::read(&p).unwrap()).into_owned();
            (p, text)
        })
        .collect()
}

#[test]
fn fuzz_seeds_parse_as_expected() {
    let outcomes: Vec<(String, bool)> = corpus("parse_config")
        .into_iter()
        .chain(corpus("parse_axis"))
        .chain(corpus("parse_value"))
        .map(|(path, text)| {
            let target = path
                .parent()
                .unwrap()
                .file_name()
                .unwrap()
                .to_string_lossy()
                .into_owned();
            let ok = match target.as_str() {
                "parse_config" => parse_config(&text).is_ok(),
                "parse_axis" => parse_axis(&text).is_ok(),
                _ => parse_value(&text).is_ok(),
            };
            (
                format!("{target}/{}", path.file_name().unwrap().to_string_lossy()),
                ok,
            )
        })
        .collect();
    assert!(outcomes.len() >= 15);
    let rejected: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.1)
        .map(|o| o.0.as_str())
        .collect();
    assert_eq!(
        rejected,
        [
            "parse_config/duplicate",
            "parse_axis/reversed",
            "parse_value/inf"
        ]
    );
}

proptest! {
    #[test]
    fn config_parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_config(&text);
    }

    #[test]
    fn config_lines_with_noise(lines in proptest::collection::vec("[a-z_ =#:.0-9pi/-]{0,30}", 0..20)) {
        let _ = parse_config(&lines.join("\n"));
    }

    #[test]
    fn value_parser_never_panics(text in "\\PC{0,40}") {
        if let Ok(v) = parse_value(&text) {
            prop_assert!(v.is_finite());
        }
    }

    #[test]
    fn axis_parser_never_panics(text in "[a-z_=:.0-9pi/*-]{0,40}") {
        if let Ok(a) = parse_axis(&text) {
            prop_assert!(a.start < a.stop && a.points >= 2);
        }
    }

    #[test]
    fn formatted_floats_parse_back(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
        let s = format_g(x);
        let back = parse_value(&s).unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs(), "{x:e} -> {s}");
    }

    #[test]
    fn axes_round_trip(start in -100.0..100.0f64, width in 1e-3..100.0f64, points in 2usize..10_000) {
        let stop = start + width;
        let a = parse_axis(&format!("phi={}:{}:{points}", start, stop)).unwrap();
        prop_assert_eq!((a.start, a.stop, a.points), (start, stop, points));
    }

    #[test]
    fn pi_multiples(n in -50i32..50, d in 1i32..50) {
        let v = parse_value(&format!("{n}*pi/{d}")).unwrap();
        prop_assert!((v - f64::from(n) * std::f64::consts::PI / f64::from(d)).abs() < 1e-12);
    }
}
