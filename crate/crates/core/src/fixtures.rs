//! Reference distribution pairs with known decomposition values.
//!
//! Every pair is built from uniform mixtures, point masses or normals, so all
//! but the first have exact piecewise-linear quantiles.

use crate::decomp::{decompose, Decomposition, DivergenceKind, QuadratureConfig};
use crate::quantile::{Distribution, Interpolation};

/// Mixture of uniforms from `(weight, a, b)` triples.
pub fn uniform_mixture(parts: &[(f64, f64, f64)]) -> Distribution {
    let comps = parts
        .iter()
        .map(|&(w, a, b)| (w, Distribution::uniform(a, b).expect("fixture uniform")))
        .collect();
    Distribution::mixture(comps).expect("fixture mixture")
}

fn linear_quantile(levels: &[f64], values: &[f64]) -> Distribution {
    Distribution::piecewise_quantile(levels.to_vec(), values.to_vec(), Interpolation::Linear).expect("fixture quantile")
}

/// `U(-1.6, 1.6)` against `N(0, 1)`: both dispersion parts positive.
pub fn uniform_vs_normal() -> (Distribution, Distribution) {
    (
        Distribution::uniform(-1.6, 1.6).expect("fixture uniform"),
        Distribution::normal(0.0, 1.0).expect("fixture normal"),
    )
}

/// Mirrored asymmetric mixtures: both shift parts positive.
pub fn mirrored_mixtures() -> (Distribution, Distribution) {
    (
        uniform_mixture(&[(0.5, 0.0, 4.0), (0.5, 4.0, 6.0)]),
        uniform_mixture(&[(0.5, 1.0, 3.0), (0.5, 3.0, 7.0)]),
    )
}

/// Asymmetric location-scale pair with `G^-1 = 2 F^-1`.
pub fn location_scale_pair() -> (Distribution, Distribution) {
    (
        uniform_mixture(&[(0.5, -5.0, 0.0), (1.0 / 3.0, 0.0, 1.0), (1.0 / 6.0, 1.0, 5.0)]),
        uniform_mixture(&[(0.5, -10.0, 0.0), (1.0 / 3.0, 0.0, 2.0), (1.0 / 6.0, 2.0, 10.0)]),
    )
}

/// `U[-2, 2]` against a narrower, lower mixture; AVM sees only dispersion.
pub fn dispersion_vs_shift() -> (Distribution, Distribution) {
    (
        Distribution::uniform(-2.0, 2.0).expect("fixture uniform"),
        uniform_mixture(&[(0.5, -2.0, 0.0), (0.5, 0.0, 1.0)]),
    )
}

/// Two-atom law and its image under `x -> 1.8 x + 0.5`.
pub fn two_atoms_location_scale() -> (Distribution, Distribution) {
    let step = |vals: [f64; 2]| {
        Distribution::piecewise_quantile(vec![0.25, 1.0], vals.to_vec(), Interpolation::Step)
            .expect("fixture step quantile")
    };
    (step([-1.0, 0.0]), step([-1.3, 0.5]))
}

/// Bimodal-looking uniform mixtures where the WD_p dispersion share shrinks
/// with `p`.
pub fn unimodal_counterexample() -> (Distribution, Distribution) {
    (
        uniform_mixture(&[(0.5, -1.0, 1.0), (0.5, 1.0, 2.0)]),
        uniform_mixture(&[(0.5, -0.5, 0.0), (0.5, 0.0, 2.0)]),
    )
}

/// Symmetric pair with atoms at both ends.
pub fn symmetric_with_atoms() -> (Distribution, Distribution) {
    let levels = [0.0, 0.3, 0.5, 0.7, 1.0];
    (
        linear_quantile(&levels, &[-1.0, -1.0, 0.1, 1.2, 1.2]),
        linear_quantile(&levels, &[-1.0, -1.0, 0.0, 1.0, 1.0]),
    )
}

/// Triple built around `G = U[-2, 2]`: `F` has a dense spike just below
/// zero and a long upper tail, `H` is the mirror image of `F`.
pub fn spiked_triple() -> [Distribution; 3] {
    [
        uniform_mixture(&[
            (0.25, -3.0, -1.0),
            (0.21, -1.0, -0.1),
            (0.04, -0.1, 0.0),
            (0.5, 0.0, 3.0),
        ]),
        Distribution::uniform(-2.0, 2.0).expect("fixture uniform"),
        uniform_mixture(&[(0.5, -3.0, 0.0), (0.04, 0.0, 0.1), (0.21, 0.1, 1.0), (0.25, 1.0, 3.0)]),
    ]
}

/// Triple without common support where `F >=wS G >=wS H` but not
/// `F >=wS H`. `H` is the mirror image of `F` and `G = U[-2, 2]`.
pub fn weak_stochastic_triple() -> [Distribution; 3] {
    let parts = [
        (0.25, -3.0, -2.4),
        (0.35, -2.4, 1.6),
        (0.05, 1.6, 1.9),
        (0.35, 1.9, 2.7),
    ];
    let mirrored: Vec<_> = parts.iter().rev().map(|&(w, a, b)| (w, -b, -a)).collect();
    [
        uniform_mixture(&parts),
        Distribution::uniform(-2.0, 2.0).expect("fixture uniform"),
        uniform_mixture(&mirrored),
    ]
}

/// Triple with common support, `F >=rS G >=rS H` but not `F >=rS H`.
pub fn relaxed_stochastic_triple() -> [Distribution; 3] {
    [
        uniform_mixture(&[
            (0.2, -4.0, -1.8),
            (0.3, -1.8, 0.0),
            (0.25, 0.0, 0.5),
            (0.05, 0.5, 3.0),
            (0.2, 3.0, 4.0),
        ]),
        Distribution::uniform(-4.0, 4.0).expect("fixture uniform"),
        uniform_mixture(&[
            (0.2, -4.0, -3.0),
            (0.05, -3.0, -0.5),
            (0.25, -0.5, 0.0),
            (0.3, 0.0, 1.8),
            (0.2, 1.8, 4.0),
        ]),
    ]
}

/// Pair with jumping quantiles: `F` is strictly wider in the quantile spread
/// order, yet no dispersion component is positive.
pub fn jump_counterexample() -> (Distribution, Distribution) {
    (
        uniform_mixture(&[(0.25, -3.0, -2.0), (0.75, -1.0, 2.0)]),
        uniform_mixture(&[(0.75, -2.0, 1.0), (0.25, 2.0, 3.0)]),
    )
}

/// What a pinned check compares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expected {
    /// `[shift_plus, shift_minus, disp_plus, disp_minus]`.
    Components([f64; 4]),
    Total(f64),
    /// Components divided by the total.
    Shares([f64; 4]),
}

/// One reference value with its tolerance.
#[derive(Debug, Clone)]
pub struct PinnedCase {
    pub label: &'static str,
    pub f: Distribution,
    pub g: Distribution,
    pub kind: DivergenceKind,
    pub expected: Expected,
    pub tol: f64,
}

/// Result of evaluating a [`PinnedCase`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckOutcome {
    pub label: String,
    pub expected: Vec<f64>,
    pub actual: Vec<f64>,
    pub tol: f64,
    pub max_error: f64,
    pub passed: bool,
    pub error: Option<String>,
}

impl CheckOutcome {
    pub fn failed(label: impl Into<String>, error: String) -> Self {
        Self {
            label: label.into(),
            expected: vec![],
            actual: vec![],
            tol: 0.0,
            max_error: f64::INFINITY,
            passed: false,
            error: Some(error),
        }
    }

    /// A property check that passed; it carries no numbers.
    pub fn holds(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            expected: vec![],
            actual: vec![],
            tol: 0.0,
            max_error: 0.0,
            passed: true,
            error: None,
        }
    }

    pub fn compare(label: impl Into<String>, expected: &[f64], actual: &[f64], tol: f64) -> Self {
        let max_error = expected
            .iter()
            .zip(actual)
            .map(|(e, a)| (e - a).abs())
            .fold(0.0, f64::max);
        let finite = actual.iter().all(|a| a.is_finite());
        Self {
            label: label.into(),
            expected: expected.to_vec(),
            actual: actual.to_vec(),
            tol,
            max_error,
            passed: finite && expected.len() == actual.len() && max_error <= tol,
            error: None,
        }
    }
}

/// The full table of reference values.
pub fn pinned_cases() -> Vec<PinnedCase> {
    use DivergenceKind::{Avm, Cd, Wd};
    use Expected::{Components, Shares, Total};
    let mut out = Vec::new();
    let mut add = |label, (f, g): (Distribution, Distribution), kind, expected, tol| {
        out.push(PinnedCase {
            label,
            f,
            g,
            kind,
            expected,
            tol,
        })
    };
    add(
        "uniform vs normal: AVM",
        uniform_vs_normal(),
        Avm,
        Components([0.0, 0.0, 0.065, 0.063]),
        1e-3,
    );
    add(
        "mirrored mixtures: AVM",
        mirrored_mixtures(),
        Avm,
        Components([0.25, 0.25, 0.0, 0.0]),
        1e-9,
    );
    add(
        "location-scale: AVM total",
        location_scale_pair(),
        Avm,
        Total(23.0 / 12.0),
        1e-9,
    );
    add(
        "location-scale: CD",
        location_scale_pair(),
        Cd,
        Components([0.033, 0.0, 0.0, 0.232]),
        2e-3,
    );
    add(
        "dispersion vs shift: AVM",
        dispersion_vs_shift(),
        Avm,
        Components([0.0, 0.0, 0.25, 0.0]),
        1e-9,
    );
    add(
        "dispersion vs shift: CD",
        dispersion_vs_shift(),
        Cd,
        Components([0.02083, 0.0, 0.02083, 0.0]),
        2e-4,
    );
    add(
        "two atoms: WD1",
        two_atoms_location_scale(),
        Wd(1),
        Components([0.0, 0.25, 0.0, 0.20]),
        1e-3,
    );
    add(
        "two atoms: WD2",
        two_atoms_location_scale(),
        Wd(2),
        Components([0.0, 0.125, 0.0, 0.085]),
        1e-3,
    );
    add(
        "two atoms: WD3",
        two_atoms_location_scale(),
        Wd(3),
        Components([0.0, 0.0625, 0.0, 0.038]),
        1e-3,
    );
    add(
        "unimodal counterexample: WD1",
        unimodal_counterexample(),
        Wd(1),
        Components([0.3333, 0.0, 0.125, 0.0]),
        1e-3,
    );
    add(
        "unimodal counterexample: WD2",
        unimodal_counterexample(),
        Wd(2),
        Components([0.2222, 0.0, 0.0694, 0.0]),
        1e-3,
    );
    add(
        "unimodal counterexample: WD3",
        unimodal_counterexample(),
        Wd(3),
        Components([0.1667, 0.0, 0.0469, 0.0]),
        1e-3,
    );
    add(
        "symmetric with atoms: CD",
        symmetric_with_atoms(),
        Cd,
        Components([0.002, 0.0, 0.019, 0.0]),
        5e-4,
    );
    add(
        "symmetric with atoms: AVM",
        symmetric_with_atoms(),
        Avm,
        Components([0.02, 0.0, 0.08, 0.0]),
        1e-6,
    );
    let [f, g, h] = spiked_triple();
    add(
        "spiked triple: CD(F,G) shares",
        (f, g.clone()),
        Cd,
        Shares([0.1336, 0.0, 0.8664, 0.0]),
        2e-3,
    );
    add(
        "spiked triple: CD(G,H) shares",
        (g, h),
        Cd,
        Shares([0.1345, 0.0, 0.0, 0.8655]),
        2e-3,
    );
    out
}

fn outcome(case: &PinnedCase, d: &Decomposition) -> CheckOutcome {
    match case.expected {
        Expected::Components(c) => CheckOutcome::compare(case.label, &c, &d.components(), case.tol),
        Expected::Total(t) => CheckOutcome::compare(case.label, &[t], &[d.total], case.tol),
        Expected::Shares(c) => {
            let shares = d.components().map(|x| if d.total > 0.0 { x / d.total } else { 0.0 });
            CheckOutcome::compare(case.label, &c, &shares, case.tol)
        }
    }
}

/// Evaluates every pinned case under `cfg`.
pub fn run_pinned(cfg: &QuadratureConfig) -> Vec<CheckOutcome> {
    pinned_cases()
        .iter()
        .map(|case| match decompose(case.kind, &case.f, &case.g, cfg) {
            Ok(d) => outcome(case, &d),
            Err(e) => CheckOutcome::failed(case.label, e.to_string()),
        })
        .collect()
}
