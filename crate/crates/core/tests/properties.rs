use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use qdecomp::io::{parse_distribution, serialize_distribution};
use qdecomp::{decompose, random, Distribution, DivergenceKind, QuadratureConfig};

const KINDS: [DivergenceKind; 4] = [
    DivergenceKind::Avm,
    DivergenceKind::Wd(2),
    DivergenceKind::Wd(3),
    DivergenceKind::Cd,
];

fn piecewise() -> impl Strategy<Value = Distribution> {
    any::<u64>().prop_map(|s| random::piecewise(&mut StdRng::seed_from_u64(s)))
}

fn smooth() -> impl Strategy<Value = Distribution> {
    any::<u64>().prop_map(|s| random::smooth(&mut StdRng::seed_from_u64(s)))
}

fn any_law() -> impl Strategy<Value = Distribution> {
    prop_oneof![piecewise(), smooth()]
}

fn levels() -> impl Strategy<Value = f64> {
    1e-6..(1.0 - 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantile_is_nondecreasing(d in any_law(), a in levels(), b in levels()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(d.quantile(lo).unwrap() <= d.quantile(hi).unwrap());
    }

    #[test]
    fn quantile_inverts_the_cdf(d in any_law(), tau in levels()) {
        let x = d.quantile(tau).unwrap();
        prop_assert!(d.cdf(x) >= tau - 1e-9, "F(Q({tau})) = {}", d.cdf(x));
        let below = x - 1e-7 * (1.0 + x.abs());
        prop_assert!(d.cdf(below) <= tau + 1e-6, "F below Q({tau}) = {}", d.cdf(below));
    }

    #[test]
    fn affine_maps_quantiles(d in any_law(), s in 0.2..5.0f64, l in -5.0..5.0f64, tau in levels()) {
        let moved = d.affine(s, l).unwrap();
        let (q, m) = (d.quantile(tau).unwrap(), moved.quantile(tau).unwrap());
        prop_assert!((m - (s * q + l)).abs() <= 1e-7 * (1.0 + m.abs()));
    }

    #[test]
    fn central_intervals_nest(d in any_law(), a in 0.0..0.99f64, b in 0.0..0.99f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (inner, outer) = (d.central_interval(lo).unwrap(), d.central_interval(hi).unwrap());
        prop_assert!(outer.lo <= inner.lo && inner.hi <= outer.hi);
        prop_assert!(inner.width() >= 0.0);
    }

    #[test]
    fn spec_round_trips(d in any_law()) {
        let back = parse_distribution(&serialize_distribution(&d)).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn exact_path_sums_to_total(f in piecewise(), g in piecewise()) {
        let cfg = QuadratureConfig::default();
        for kind in KINDS {
            let d = decompose(kind, &f, &g, &cfg).unwrap();
            prop_assert!(d.exact);
            prop_assert!(d.residual() <= 1e-9, "{kind}: residual {}", d.residual());
            prop_assert!(d.components().iter().all(|&c| c >= 0.0));
        }
    }

    #[test]
    fn swapping_swaps_sides(f in any_law(), g in any_law()) {
        let cfg = QuadratureConfig::default();
        for kind in KINDS {
            let fg = decompose(kind, &f, &g, &cfg).unwrap();
            let gf = decompose(kind, &g, &f, &cfg).unwrap().swapped();
            prop_assert_eq!(fg.components(), gf.components());
        }
    }

    #[test]
    fn a_law_against_itself_is_zero(d in any_law()) {
        let cfg = QuadratureConfig::default();
        for kind in KINDS {
            let r = decompose(kind, &d, &d, &cfg).unwrap();
            prop_assert!(r.total <= 1e-12 && r.components().iter().all(|&c| c <= 1e-12), "{kind}: {r:?}");
        }
    }
}

#[test]
fn quantile_rejects_levels_outside_the_open_interval() {
    let d = Distribution::normal(0.0, 1.0).unwrap();
    for tau in [0.0, 1.0, -0.1, f64::NAN] {
        assert!(d.quantile(tau).is_err());
    }
}

#[test]
fn constructors_reject_invalid_parameters() {
    assert!(Distribution::normal(0.0, 0.0).is_err());
    assert!(Distribution::uniform(1.0, 1.0).is_err());
    assert!(Distribution::empirical(vec![]).is_err());
    assert!(Distribution::histogram(vec![0.0, 1.0], vec![0.5]).is_err());
    assert!(Distribution::mixture(vec![(0.5, Distribution::point_mass(0.0).unwrap())]).is_err());
}
