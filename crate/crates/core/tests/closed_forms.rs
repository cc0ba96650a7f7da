use qdecomp::closed_forms::{normal_avm_decompose, normal_cd_decompose, normal_wdp_decompose, NormalPair};
use qdecomp::selftest::{closed_form, relative_gap};
use qdecomp::{decompose, Decomposition, DivergenceKind, QuadratureConfig};

const KINDS: [DivergenceKind; 5] = [
    DivergenceKind::Avm,
    DivergenceKind::Wd(2),
    DivergenceKind::Wd(3),
    DivergenceKind::Wd(4),
    DivergenceKind::Cd,
];

fn pair(mf: f64, sf: f64, mg: f64, sg: f64) -> NormalPair {
    NormalPair::new(mf, sf, mg, sg).unwrap()
}

fn max_gap(a: &Decomposition, b: &Decomposition) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| (x - y).abs())
        .fold((a.total - b.total).abs(), f64::max)
}

#[test]
fn continuous_as_location_gap_vanishes() {
    for (sf, sg) in [(1.0, 2.0), (1.5, 0.4)] {
        for kind in KINDS {
            let at_zero = closed_form(kind, &pair(0.0, sf, 0.0, sg)).unwrap();
            for eps in [1e-3, 1e-6] {
                let near = closed_form(kind, &pair(eps, sf, 0.0, sg)).unwrap();
                let gap = max_gap(&at_zero, &near);
                assert!(gap <= 10.0 * eps, "{kind} at mu gap {eps}: moved {gap}");
                assert!(near.total.is_finite() && near.residual() <= 1e-12 * (1.0 + near.total));
            }
        }
    }
}

#[test]
fn continuous_as_scale_gap_vanishes() {
    for kind in KINDS {
        let at_zero = closed_form(kind, &pair(0.7, 1.0, 0.0, 1.0)).unwrap();
        for eps in [1e-3, 1e-6] {
            let near = closed_form(kind, &pair(0.7, 1.0 + eps, 0.0, 1.0)).unwrap();
            let gap = max_gap(&at_zero, &near);
            assert!(gap <= 10.0 * eps, "{kind} at scale gap {eps}: moved {gap}");
        }
    }
}

#[test]
fn identical_normals_give_zero() {
    let p = pair(1.2, 0.8, 1.2, 0.8);
    for kind in KINDS {
        let d = closed_form(kind, &p).unwrap();
        assert_eq!(d.total, 0.0, "{kind}");
        assert_eq!(d.components(), [0.0; 4], "{kind}");
    }
}

#[test]
fn wd_one_is_avm() {
    let p = pair(0.3, 2.0, -0.4, 0.9);
    let a = normal_avm_decompose(&p);
    let w = normal_wdp_decompose(&p, 1).unwrap();
    assert!(max_gap(&a, &w) <= 1e-12);
}

#[test]
fn sides_follow_location_and_scale() {
    let d = normal_cd_decompose(&pair(1.0, 2.0, 0.0, 1.0));
    assert!(d.shift_plus > 0.0 && d.disp_plus > 0.0);
    assert_eq!((d.shift_minus, d.disp_minus), (0.0, 0.0));
    let d = normal_wdp_decompose(&pair(-1.0, 0.5, 0.0, 1.0), 2).unwrap();
    assert!(d.shift_minus > 0.0 && d.disp_minus > 0.0);
    assert_eq!((d.shift_plus, d.disp_plus), (0.0, 0.0));
}

#[test]
fn swapping_the_pair_swaps_sides() {
    let (a, b) = (pair(0.4, 1.3, -1.0, 0.6), pair(-1.0, 0.6, 0.4, 1.3));
    for kind in KINDS {
        let fg = closed_form(kind, &a).unwrap();
        let gf = closed_form(kind, &b).unwrap().swapped();
        assert!(max_gap(&fg, &gf) <= 1e-12, "{kind}");
    }
}

#[test]
fn quadrature_matches_closed_forms() {
    let cfg = QuadratureConfig::default();
    for p in [
        pair(0.0, 1.0, 0.5, 2.0),
        pair(2.0, 0.3, -1.0, 1.1),
        pair(0.2, 1.0, 0.0, 1.0),
    ] {
        let (f, g) = p.distributions();
        for (kind, tol) in [
            (DivergenceKind::Avm, 1e-4),
            (DivergenceKind::Wd(2), 1e-3),
            (DivergenceKind::Wd(3), 1e-3),
            (DivergenceKind::Cd, 2e-3),
        ] {
            let gap = relative_gap(&closed_form(kind, &p).unwrap(), &decompose(kind, &f, &g, &cfg).unwrap());
            assert!(gap <= tol, "{kind} on {p:?}: relative gap {gap}");
        }
    }
}

#[test]
fn invalid_scales_are_rejected() {
    assert!(NormalPair::new(0.0, 0.0, 0.0, 1.0).is_err());
    assert!(NormalPair::new(0.0, 1.0, f64::NAN, 1.0).is_err());
    assert!(normal_wdp_decompose(&pair(0.0, 1.0, 0.0, 2.0), 0).is_err());
}
