use qdecomp::fixtures::{pinned_cases, run_pinned, Expected};
use qdecomp::{decompose, QuadratureConfig};

/// Runs the pinned case whose label starts with `prefix`.
fn pinned(prefix: &str) {
    let cfg = QuadratureConfig::default();
    let cases: Vec<_> = pinned_cases()
        .into_iter()
        .filter(|c| c.label.starts_with(prefix))
        .collect();
    assert!(!cases.is_empty(), "no case {prefix}");
    for c in cases {
        let d = decompose(c.kind, &c.f, &c.g, &cfg).unwrap();
        let (expected, actual) = match c.expected {
            Expected::Components(v) => (v.to_vec(), d.components().to_vec()),
            Expected::Total(t) => (vec![t], vec![d.total]),
            Expected::Shares(v) => (v.to_vec(), d.components().map(|x| x / d.total).to_vec()),
        };
        for (e, a) in expected.iter().zip(&actual) {
            assert!(
                (e - a).abs() <= c.tol,
                "{}: expected {expected:?}, got {actual:?}",
                c.label
            );
        }
    }
}

#[test]
fn uniform_vs_normal_avm() {
    pinned("uniform vs normal");
}

#[test]
fn mirrored_mixtures_avm() {
    pinned("mirrored mixtures");
}

#[test]
fn location_scale_avm_total_and_cd() {
    pinned("location-scale");
}

#[test]
fn dispersion_vs_shift_avm_and_cd() {
    pinned("dispersion vs shift");
}

#[test]
fn two_atoms_wd_p() {
    pinned("two atoms");
}

#[test]
fn unimodal_counterexample_wd_p() {
    pinned("unimodal counterexample");
}

#[test]
fn symmetric_with_atoms_avm_and_cd() {
    pinned("symmetric with atoms");
}

#[test]
fn spiked_triple_cd_shares() {
    pinned("spiked triple");
}

#[test]
fn runner_agrees_with_direct_evaluation() {
    let outcomes = run_pinned(&QuadratureConfig::default());
    assert_eq!(outcomes.len(), pinned_cases().len());
    let failed: Vec<_> = outcomes.iter().filter(|c| !c.passed).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}

#[test]
fn piecewise_pairs_take_the_exact_path() {
    let cfg = QuadratureConfig::default();
    let mut seen = 0;
    for c in pinned_cases() {
        if c.f.knots().is_some() && c.g.knots().is_some() {
            let d = decompose(c.kind, &c.f, &c.g, &cfg).unwrap();
            assert!(d.exact, "{}", c.label);
            assert!(d.residual() <= 1e-9, "{}: residual {}", c.label, d.residual());
            seen += 1;
        }
    }
    assert!(seen >= 10);
}
