use std::path::Path;

use qdecomp::io::{
    batch_to_tsv, histogram_pair_to_distributions, load_distribution, load_manifest, parse_distribution,
    parse_histogram_pair, parse_manifest, parse_samples_csv, run_batch, PairSource, Truncation,
};
use qdecomp::suites::histogram_cases;
use qdecomp::{avm, cd_via_cdf, Distribution, DivergenceKind, Error, QuadratureConfig};

#[test]
fn parses_every_distribution_type() {
    let specs = [
        r#"{"type": "normal", "mu": 0, "sigma": 1}"#,
        r#"{"type": "uniform", "a": -1, "b": 2}"#,
        r#"{"type": "empirical", "samples": [3, 1, 2]}"#,
        r#"{"type": "histogram", "edges": [0, 1, 3], "probs": [0.25, 0.75]}"#,
        r#"{"type": "piecewise_quantile", "levels": [0.5, 1], "values": [0, 1], "mode": "step"}"#,
        r#"{"type": "mixture", "components": [[0.5, {"type": "normal", "mu": 0, "sigma": 1}],
                                             [0.5, {"type": "uniform", "a": 0, "b": 1}]]}"#,
    ];
    for s in specs {
        parse_distribution(s).unwrap_or_else(|e| panic!("{s}: {e}"));
    }
}

#[test]
fn parse_errors_name_the_offending_field() {
    let cases = [
        (r#"{"type": "normal", "mu": 0, "sigma": -1}"#, "$"),
        (r#"{"type": "normal", "mu": 0}"#, "sigma"),
        (r#"{"type": "gamma"}"#, "$.type"),
        (r#"{"type": "uniform", "a": 0, "b": 1, "c": 2}"#, "\"c\""),
        (r#"{"type": "mixture", "components": [[0.5]]}"#, "$.components[0]"),
        ("{not json", "line 1"),
    ];
    for (text, needle) in cases {
        let err = parse_distribution(text).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{text}: {err:?}");
        assert!(err.is_input_error());
        assert!(err.to_string().contains(needle), "{text}: {err}");
    }
}

#[test]
fn samples_csv_skips_comments_and_reads_the_first_column() {
    let d = parse_samples_csv("# header\n1.5, a\n\n-2\n0.5\n").unwrap();
    assert_eq!(d, Distribution::empirical(vec![1.5, -2.0, 0.5]).unwrap());
    let err = parse_samples_csv("1\nx\n").unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    assert!(parse_samples_csv("# only a comment\n").is_err());
}

#[test]
fn missing_files_are_io_errors() {
    let err = load_distribution(Path::new("/nonexistent/f.json")).unwrap_err();
    assert!(matches!(err, Error::Io(_)), "{err:?}");
}

#[test]
fn histogram_pair_json_matches_the_hand_cases() {
    let text = r#"{"f": {"edges": [0, 4, 8, null], "probs": [0.3, 0.5, 0.2]},
                   "g": {"edges": [0, 6, 12, null], "probs": [0.4, 0.4, 0.2]},
                   "truncation": "conservative"}"#;
    let spec = parse_histogram_pair(text).unwrap();
    let case = &histogram_cases()[1];
    assert_eq!(spec, case.spec);
    assert_eq!(spec.bounds().unwrap(), case.bounds);
    let (f, g) = histogram_pair_to_distributions(&spec).unwrap();
    let cfg = QuadratureConfig::default();
    assert!((avm(&f, &g, &cfg).unwrap() - case.avm).abs() <= 1e-9);
    assert!((cd_via_cdf(&f, &g, &cfg).unwrap() - case.cd).abs() <= 1e-9);
}

#[test]
fn explicit_bounds_override_the_default_rule() {
    let text = r#"{"f": {"edges": [null, 0, 1], "probs": [0.5, 0.5]},
                   "g": {"edges": [0, 1, null], "probs": [0.5, 0.5]},
                   "truncation": {"lower": -3, "upper": 5}}"#;
    let spec = parse_histogram_pair(text).unwrap();
    assert_eq!(
        spec.truncation,
        Truncation::Bounds {
            lower: Some(-3.0),
            upper: Some(5.0)
        }
    );
    assert_eq!(spec.bounds().unwrap(), (-3.0, 5.0));
    let (f, g) = histogram_pair_to_distributions(&spec).unwrap();
    assert_eq!((f.support().0, g.support().1), (-3.0, 5.0));
}

#[test]
fn bounds_inside_the_finite_edges_are_rejected() {
    let text = r#"{"f": {"edges": [0, 4, null], "probs": [0.5, 0.5]},
                   "g": {"edges": [0, 4, 8], "probs": [0.5, 0.5]},
                   "truncation": {"upper": 2}}"#;
    let spec = parse_histogram_pair(text).unwrap();
    assert!(histogram_pair_to_distributions(&spec).is_err());
    let missing = r#"{"f": {"edges": [0, 4, null], "probs": [0.5, 0.5]},
                      "g": {"edges": [0, 4, 8], "probs": [0.5, 0.5]},
                      "truncation": {"lower": -1}}"#;
    assert!(parse_histogram_pair(missing).unwrap().bounds().is_err());
}

#[test]
fn malformed_histograms_are_parse_errors() {
    for text in [
        r#"{"f": {"edges": [0, null, 1], "probs": [0.5, 0.5]}, "g": {"edges": [0, 1], "probs": [1]}}"#,
        r#"{"f": {"edges": [null, null], "probs": [1]}, "g": {"edges": [0, 1], "probs": [1]}}"#,
        r#"{"f": {"edges": [0, 1], "probs": [0.9]}, "g": {"edges": [0, 1], "probs": [1]}}"#,
        r#"{"f": {"edges": [0, 1], "probs": [1]}, "g": {"edges": [0, 1], "probs": [1]}, "truncation": 3}"#,
    ] {
        let err = parse_histogram_pair(text).unwrap_err();
        assert!(err.is_input_error(), "{text}: {err:?}");
    }
}

fn manifest_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("f.json"), r#"{"type": "uniform", "a": 0, "b": 1}"#).unwrap();
    std::fs::write(dir.path().join("g.csv"), "0.1\n0.4\n0.9\n1.3\n").unwrap();
    std::fs::write(
        dir.path().join("survey.json"),
        r#"{"f": {"edges": [0, 1], "probs": [1]}, "g": {"edges": [0, 2], "probs": [1]}}"#,
    )
    .unwrap();
    let manifest = r#"{"pairs": [
        {"id": "files", "f": "f.json", "g": "g.csv", "divergences": ["avm", "wd", "cd"], "p": [1, 2]},
        {"id": "inline", "f": {"type": "normal", "mu": 0, "sigma": 1},
                         "g": {"type": "normal", "mu": 1, "sigma": 2}},
        {"id": "survey", "histograms": "survey.json", "divergences": ["avm", "cd"]},
        {"id": "broken", "f": "missing.json", "g": "f.json", "divergences": ["avm"]}
    ]}"#;
    std::fs::write(dir.path().join("jobs.json"), manifest).unwrap();
    dir
}

#[test]
fn manifest_resolves_paths_and_keeps_entry_errors() {
    let dir = manifest_dir();
    let m = load_manifest(&dir.path().join("jobs.json")).unwrap();
    let ids: Vec<_> = m.entries.iter().map(|e| e.id.as_str()).collect();
    assert_eq!(ids, ["files", "inline", "survey", "broken"]);
    assert_eq!(
        m.entries[0].divergences,
        [
            DivergenceKind::Avm,
            DivergenceKind::Wd(1),
            DivergenceKind::Wd(2),
            DivergenceKind::Cd
        ]
    );
    assert_eq!(m.entries[1].divergences.len(), 3);
    assert!(matches!(m.entries[2].source, Ok(PairSource::Histograms(_))));
    assert!(m.entries[3].source.is_err());
}

#[test]
fn batch_is_deterministic_and_ordered() {
    let dir = manifest_dir();
    let m = load_manifest(&dir.path().join("jobs.json")).unwrap();
    let cfg = QuadratureConfig::default();
    let first = run_batch(&m, &cfg);
    for _ in 0..3 {
        assert_eq!(run_batch(&m, &cfg), first);
    }
    let ids: Vec<_> = first.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(
        ids,
        ["files", "files", "files", "files", "inline", "inline", "inline", "survey", "survey", "broken"]
    );
    let survey = first[7].decomposition.unwrap();
    assert!((survey.total - 0.5).abs() <= 1e-12);
    assert!(first[9].error.is_some() && first[9].decomposition.is_none());
    let tsv = batch_to_tsv(&first);
    assert_eq!(tsv.lines().count(), first.len() + 1);
}

#[test]
fn manifest_structure_errors_fail_the_whole_manifest() {
    let base = Path::new(".");
    for text in [
        r#"{"jobs": []}"#,
        r#"{"pairs": [{"f": "a", "g": "b", "divergences": ["kl"]}]}"#,
        r#"{"pairs": [{"f": "a", "g": "b", "p": 0}]}"#,
        r#"{"pairs": [{"id": 3, "f": "a", "g": "b"}]}"#,
    ] {
        assert!(parse_manifest(text, base).is_err(), "{text}");
    }
}
