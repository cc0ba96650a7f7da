use qdecomp::selftest::Section;
use qdecomp::suites::{bridge_section, histogram_section, invariant_section, SuiteConfig};

fn assert_passes(section: Section) {
    let failed: Vec<_> = section.checks.iter().filter(|c| !c.passed).collect();
    assert!(section.passed && failed.is_empty(), "{}: {failed:#?}", section.name);
    assert!(!section.checks.is_empty());
}

#[test]
fn divergence_invariants_hold() {
    assert_passes(invariant_section(&SuiteConfig::default()));
}

#[test]
fn order_bridges_hold() {
    assert_passes(bridge_section(&SuiteConfig::default()));
}

#[test]
fn histogram_pipeline_matches_hand_oracles() {
    assert_passes(histogram_section(&SuiteConfig::default()));
}

#[test]
fn another_seed_also_passes_the_bridges() {
    let cfg = SuiteConfig {
        seed: 99,
        instances: 100,
        ..SuiteConfig::default()
    };
    assert_passes(bridge_section(&cfg));
}
