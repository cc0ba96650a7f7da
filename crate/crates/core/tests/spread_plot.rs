use qdecomp::fixtures::{mirrored_mixtures, uniform_vs_normal};
use qdecomp::{avm, spread_plot_data, Distribution, QuadratureConfig, SpreadPlotData};

#[test]
fn rows_sit_on_a_uniform_coverage_grid() {
    let (f, g) = uniform_vs_normal();
    let data = spread_plot_data(&f, &g, 50).unwrap();
    assert_eq!(data.rows.len(), 50);
    for (i, r) in data.rows.iter().enumerate() {
        assert_eq!(r.alpha, i as f64 / 50.0);
        assert!(r.f_lo <= r.f_hi && r.g_lo <= r.g_hi);
    }
}

#[test]
fn terms_add_up_to_the_pointwise_gap() {
    let (f, g) = uniform_vs_normal();
    for r in spread_plot_data(&f, &g, 40).unwrap().rows {
        let c = r.components;
        let gap = (r.f_lo - r.g_lo).abs() + (r.f_hi - r.g_hi).abs();
        assert!((c.avm_alpha - gap).abs() <= 1e-12);
        let parts = c.shift_plus + c.shift_minus + c.disp_plus + c.disp_minus;
        assert!((parts - c.avm_alpha).abs() <= 1e-12 * (1.0 + gap), "alpha {}", r.alpha);
    }
}

#[test]
fn averaging_the_curve_recovers_avm() {
    let (f, g) = (
        Distribution::uniform(0.0, 2.0).unwrap(),
        Distribution::uniform(0.5, 1.5).unwrap(),
    );
    let n = 2000;
    let data = spread_plot_data(&f, &g, n).unwrap();
    // AVM is half the mean of the pointwise gap over coverage levels
    let mean: f64 = data.rows.iter().map(|r| r.components.avm_alpha).sum::<f64>() / n as f64;
    let total = avm(&f, &g, &QuadratureConfig::default()).unwrap();
    assert!((0.5 * mean - total).abs() <= 1e-3, "{} vs {total}", 0.5 * mean);
}

#[test]
fn pure_shift_pair_has_no_dispersion_column() {
    let (f, g) = mirrored_mixtures();
    for r in spread_plot_data(&f, &g, 100).unwrap().rows {
        assert_eq!(
            (r.components.disp_plus, r.components.disp_minus),
            (0.0, 0.0),
            "alpha {}",
            r.alpha
        );
    }
}

#[test]
fn tsv_has_a_header_and_one_line_per_row() {
    let (f, g) = uniform_vs_normal();
    let tsv = spread_plot_data(&f, &g, 10).unwrap().to_tsv();
    let lines: Vec<_> = tsv.lines().collect();
    assert_eq!(lines[0].split('\t').collect::<Vec<_>>(), SpreadPlotData::HEADER);
    assert_eq!(lines.len(), 11);
    assert!(lines[1..].iter().all(|l| l.split('\t').count() == 9));
}

#[test]
fn too_few_levels_is_an_error() {
    let (f, g) = uniform_vs_normal();
    assert!(spread_plot_data(&f, &g, 1).is_err());
}
