//! Randomized property suites beyond the self-test: cross-divergence laws,
//! order bridges and the histogram pipeline.
//!
//! Every check draws its inputs from a seeded generator and counts
//! violations under the component-zero tolerance, so a run is reproducible
//! from its [`SuiteConfig`].

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::closed_forms::{normal_avm_decompose, normal_cd_decompose};
use crate::decomp::{component_is_zero, decompose, Decomposition, DivergenceKind, QuadratureConfig};
use crate::error::Result;
use crate::fixtures;
use crate::fixtures::CheckOutcome;
use crate::io::{histogram_pair_to_distributions, HistogramPairSpec, OpenHistogram, Truncation};
use crate::orders::{
    check, check_all, order_component_bridge, BridgeComponent, BridgeReport, OrderConfig, OrderVerdict, Relation,
};
use crate::quantile::Distribution;
use crate::random;
use crate::selftest::{random_normal_pair, Section, SelftestReport};

/// Sizes and seed of a suite run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub quadrature: QuadratureConfig,
    pub orders: OrderConfig,
    /// Random instances per property.
    pub instances: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            orders: OrderConfig::default(),
            instances: 200,
            seed: 7_130_226,
        }
    }
}

/// How one random instance of a property came out.
enum Instance {
    Holds,
    Violated(String),
    /// A component sits between the hard-zero level and the zero tolerance,
    /// so its sign cannot be classified; the instance is redrawn.
    Undecided,
}

/// Collects violations of one property over many instances.
struct Property {
    label: String,
    decided: usize,
    undecided: usize,
    violations: Vec<String>,
}

impl Property {
    fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            decided: 0,
            undecided: 0,
            violations: Vec::new(),
        }
    }

    /// Keeps drawing until `target` instances are decided, giving up after
    /// ten times as many draws.
    fn wants(&self, target: usize) -> bool {
        self.decided < target && self.decided + self.undecided < 10 * target
    }

    /// Records one instance; errors count as violations.
    fn record(&mut self, outcome: Result<Instance>) {
        match outcome {
            Ok(Instance::Holds) => self.decided += 1,
            Ok(Instance::Undecided) => self.undecided += 1,
            Ok(Instance::Violated(msg)) => {
                self.violations.push(format!("instance {}: {msg}", self.decided));
                self.decided += 1;
            }
            Err(e) => {
                self.violations.push(format!("instance {}: {e}", self.decided));
                self.decided += 1;
            }
        }
    }

    fn finish(self, target: usize) -> CheckOutcome {
        let mut label = format!("{}, {} instances", self.label, self.decided);
        if self.undecided > 0 {
            label.push_str(&format!(" ({} redrawn)", self.undecided));
        }
        match self.violations.first() {
            None if self.decided >= target => CheckOutcome::holds(label),
            None => CheckOutcome::failed(label, format!("only {} of {target} instances decided", self.decided)),
            Some(first) => CheckOutcome::failed(label, format!("{} violations; first {first}", self.violations.len())),
        }
    }
}

fn violated(msg: Option<String>) -> Instance {
    match msg {
        Some(m) => Instance::Violated(m),
        None => Instance::Holds,
    }
}

/// A single yes/no check on a fixture.
fn fixture_check(label: &str, run: impl FnOnce() -> Result<Option<String>>) -> CheckOutcome {
    match run() {
        Ok(None) => CheckOutcome::holds(label),
        Ok(Some(msg)) => CheckOutcome::failed(label, msg),
        Err(e) => CheckOutcome::failed(label, e.to_string()),
    }
}

fn timed(name: &'static str, run: impl FnOnce() -> Vec<CheckOutcome>) -> Section {
    let start = std::time::Instant::now();
    let checks = run();
    Section {
        name,
        passed: checks.iter().all(|c| c.passed),
        elapsed_ms: start.elapsed().as_millis(),
        checks,
    }
}

fn positive(component: f64, d: &Decomposition) -> bool {
    !component_is_zero(component, d.total)
}

/// Sign of a component, or `None` when it lies above the hard-zero level
/// `1e-9 (1 + total)` but within the zero tolerance.
fn sign(component: f64, d: &Decomposition) -> Option<bool> {
    if component <= 1e-9 * (1.0 + d.total) {
        Some(false)
    } else if component_is_zero(component, d.total) {
        None
    } else {
        Some(true)
    }
}

/// Sign with a wider band for comparisons across divergences, whose
/// weightings can shrink a small part by several orders of magnitude.
fn coarse_sign(component: f64, d: &Decomposition) -> Option<bool> {
    if component <= 1e-9 * (1.0 + d.total) {
        Some(false)
    } else if component <= 1e-3 * d.total {
        None
    } else {
        Some(true)
    }
}

/// Signs of a plus and minus component pair.
fn signs(plus: f64, minus: f64, d: &Decomposition) -> Option<(bool, bool)> {
    Some((sign(plus, d)?, sign(minus, d)?))
}

fn disp_share(d: &Decomposition) -> f64 {
    if d.total > 0.0 {
        (d.disp_plus + d.disp_minus) / d.total
    } else {
        0.0
    }
}

/// Any law from the random generators, piecewise or smooth.
fn any_law(rng: &mut StdRng) -> Distribution {
    if rng.gen_bool(0.5) {
        random::piecewise(rng)
    } else {
        random::smooth(rng)
    }
}

/// Law with a continuous, strictly increasing quantile function.
fn continuous_law(rng: &mut StdRng) -> Distribution {
    match rng.gen_range(0..3) {
        0 => random::contiguous_mixture(rng),
        1 => random::normal(rng),
        _ => random::smooth(rng),
    }
}

/// Continuous pair for the bridge and lattice checks: contiguous mixtures
/// or two normals.
fn continuous_pair(rng: &mut StdRng) -> (Distribution, Distribution) {
    if rng.gen_bool(0.5) {
        (random::contiguous_mixture(rng), random::contiguous_mixture(rng))
    } else {
        (random::normal(rng), random::normal(rng))
    }
}

/// Contiguous mixture rescaled onto `[-4, 4]`, so any two share a support.
fn common_support_law(rng: &mut StdRng) -> Distribution {
    let d = random::contiguous_mixture(rng);
    let (a, b) = d.support();
    let s = 8.0 / (b - a);
    d.affine(s, -4.0 - s * a).expect("positive scale")
}

const SIGN_KINDS: [DivergenceKind; 4] = [
    DivergenceKind::Avm,
    DivergenceKind::Wd(2),
    DivergenceKind::Wd(3),
    DivergenceKind::Cd,
];

/// Medians equal up to rounding count as equal.
fn compare_medians(a: f64, b: f64) -> std::cmp::Ordering {
    if (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs())) {
        std::cmp::Ordering::Equal
    } else {
        a.total_cmp(&b)
    }
}

fn symmetry(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("swapping F and G swaps plus and minus parts");
    while prop.wants(cfg.instances) {
        let (f, g) = (any_law(rng), any_law(rng));
        prop.record((|| {
            for kind in SIGN_KINDS {
                let fg = decompose(kind, &f, &g, &cfg.quadrature)?;
                let gf = decompose(kind, &g, &f, &cfg.quadrature)?.swapped();
                if fg.components() != gf.components() {
                    return Ok(Instance::Violated(format!(
                        "{kind}: {:?} vs {:?}",
                        fg.components(),
                        gf.components()
                    )));
                }
            }
            Ok(Instance::Holds)
        })());
    }
    prop.finish(cfg.instances)
}

fn shift_invariance(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("AVM and CD dispersion parts ignore a location shift of F");
    while prop.wants(cfg.instances) {
        let (f, g) = (any_law(rng), any_law(rng));
        prop.record((|| {
            for kind in [DivergenceKind::Avm, DivergenceKind::Cd] {
                let base = decompose(kind, &f, &g, &cfg.quadrature)?;
                for s in [-3.0, 0.7, 10.0] {
                    let moved = decompose(kind, &f.affine(1.0, s)?, &g, &cfg.quadrature)?;
                    let gap = (moved.disp_plus - base.disp_plus)
                        .abs()
                        .max((moved.disp_minus - base.disp_minus).abs());
                    if gap > 1e-6 {
                        return Ok(Instance::Violated(format!(
                            "{kind}, shift {s}: dispersion moved by {gap:.3e}"
                        )));
                    }
                }
            }
            Ok(Instance::Holds)
        })());
    }
    prop.finish(cfg.instances)
}

fn symmetric_shift_law(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("symmetric laws: shift_plus > 0 iff median(F) > median(G)");
    while prop.wants(cfg.instances) {
        let (f, g) = (random::symmetric(rng), random::symmetric(rng));
        prop.record((|| {
            let order = compare_medians(f.central_median(), g.central_median());
            for kind in SIGN_KINDS {
                let d = decompose(kind, &f, &g, &cfg.quadrature)?;
                let Some(got) = signs(d.shift_plus, d.shift_minus, &d) else {
                    return Ok(Instance::Undecided);
                };
                if got != (order.is_gt(), order.is_lt()) {
                    return Ok(Instance::Violated(format!(
                        "{kind}: medians {order:?}, shift parts {:?}",
                        [d.shift_plus, d.shift_minus]
                    )));
                }
            }
            Ok(Instance::Holds)
        })());
    }
    prop.finish(cfg.instances)
}

fn location_scale_law(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("location-scale family: dispersion follows scale, WD_p shift follows median");
    while prop.wants(cfg.instances) {
        let ((f, sf, _), (g, sg, _)) = random::location_scale_pair(rng);
        prop.record((|| {
            let scale = sf.total_cmp(&sg);
            let median = compare_medians(f.central_median(), g.central_median());
            for kind in SIGN_KINDS {
                let d = decompose(kind, &f, &g, &cfg.quadrature)?;
                let (Some(disp), Some(shift)) = (
                    signs(d.disp_plus, d.disp_minus, &d),
                    signs(d.shift_plus, d.shift_minus, &d),
                ) else {
                    return Ok(Instance::Undecided);
                };
                if disp != (scale.is_gt(), scale.is_lt()) {
                    return Ok(Instance::Violated(format!(
                        "{kind}: scales {sf} vs {sg}, dispersion parts {:?}",
                        [d.disp_plus, d.disp_minus]
                    )));
                }
                if kind != DivergenceKind::Cd && shift != (median.is_gt(), median.is_lt()) {
                    return Ok(Instance::Violated(format!(
                        "{kind}: medians {median:?}, shift parts {:?}",
                        [d.shift_plus, d.shift_minus]
                    )));
                }
            }
            Ok(Instance::Holds)
        })());
    }
    prop.finish(cfg.instances)
}

/// Outcome of comparing one component of a WD_p and a CD decomposition:
/// `equal` asks for matching signs, otherwise a positive WD_p part must
/// come with a positive CD part. Mismatches where the positive side sits in
/// the coarse band are undecided.
fn agree(wd: (f64, &Decomposition), cd: (f64, &Decomposition), equal: bool) -> Option<bool> {
    let (w, c) = (sign(wd.0, wd.1)?, sign(cd.0, cd.1)?);
    let ok = if equal { w == c } else { !w || c };
    if ok {
        return Some(true);
    }
    let positive = if w { wd } else { cd };
    coarse_sign(positive.0, positive.1).map(|_| false)
}

fn concordance(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("positive dispersion parts agree across divergences; WD_p shift implies CD shift");
    while prop.wants(cfg.instances) {
        let (f, g) = (continuous_law(rng), continuous_law(rng));
        prop.record((|| {
            let cd = decompose(DivergenceKind::Cd, &f, &g, &cfg.quadrature)?;
            let mut undecided = false;
            for p in 1..=3 {
                let wd = decompose(DivergenceKind::Wd(p), &f, &g, &cfg.quadrature)?;
                let verdicts = [
                    agree((wd.disp_plus, &wd), (cd.disp_plus, &cd), true),
                    agree((wd.disp_minus, &wd), (cd.disp_minus, &cd), true),
                    agree((wd.shift_plus, &wd), (cd.shift_plus, &cd), false),
                    agree((wd.shift_minus, &wd), (cd.shift_minus, &cd), false),
                ];
                if verdicts.contains(&Some(false)) {
                    return Ok(Instance::Violated(format!(
                        "wd{p} {:?} vs cd {:?}",
                        wd.components(),
                        cd.components()
                    )));
                }
                undecided |= verdicts.contains(&None);
            }
            Ok(if undecided {
                Instance::Undecided
            } else {
                Instance::Holds
            })
        })());
    }
    prop.finish(cfg.instances)
}

fn p_monotonicity(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("symmetric laws: WD_p dispersion share nondecreasing in p");
    while prop.wants(cfg.instances) {
        let (f, g) = (random::symmetric(rng), random::symmetric(rng));
        prop.record((|| {
            let mut last = 0.0;
            for p in 1..=4 {
                let share = disp_share(&decompose(DivergenceKind::Wd(p), &f, &g, &cfg.quadrature)?);
                if share < last - 1e-6 {
                    return Ok(Instance::Violated(format!(
                        "share drops from {last} to {share} at p = {p}"
                    )));
                }
                last = share;
            }
            Ok(Instance::Holds)
        })());
    }
    prop.finish(cfg.instances)
}

fn cd_weight_closed_form(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("normal pairs (closed forms): CD dispersion share <= AVM share");
    let target = cfg.instances * 50;
    while prop.wants(target) {
        let pair = random_normal_pair(rng);
        let (a, c) = (
            disp_share(&normal_avm_decompose(&pair)),
            disp_share(&normal_cd_decompose(&pair)),
        );
        prop.record(Ok(violated(
            (c > a + 1e-9).then(|| format!("{pair:?}: CD share {c} > AVM share {a}")),
        )));
    }
    prop.finish(target)
}

fn cd_weight_quadrature(cfg: &SuiteConfig, rng: &mut StdRng) -> CheckOutcome {
    let mut prop = Property::new("normal pairs (quadrature): CD dispersion share <= AVM share");
    while prop.wants(cfg.instances) {
        let pair = random_normal_pair(rng);
        let (f, g) = pair.distributions();
        prop.record((|| {
            let a = disp_share(&decompose(DivergenceKind::Avm, &f, &g, &cfg.quadrature)?);
            let c = disp_share(&decompose(DivergenceKind::Cd, &f, &g, &cfg.quadrature)?);
            Ok(violated(
                (c > a + 1e-9).then(|| format!("{pair:?}: CD share {c} > AVM share {a}")),
            ))
        })());
    }
    prop.finish(cfg.instances)
}

/// Fixtures where a law fails outside its assumptions.
fn counterexamples(cfg: &QuadratureConfig) -> Vec<CheckOutcome> {
    let shares_fall = |(f, g): (Distribution, Distribution)| -> Result<Option<String>> {
        let shares = (1..=3)
            .map(|p| decompose(DivergenceKind::Wd(p), &f, &g, cfg).map(|d| disp_share(&d)))
            .collect::<Result<Vec<_>>>()?;
        let falls = shares.windows(2).all(|w| w[1] < w[0]);
        Ok((!falls).then(|| format!("dispersion shares {shares:?} do not decrease")))
    };
    vec![
        fixture_check(
            "two-atom location-scale pair: WD_p dispersion share decreases in p",
            || shares_fall(fixtures::two_atoms_location_scale()),
        ),
        fixture_check("asymmetric mixtures: WD_p dispersion share decreases in p", || {
            shares_fall(fixtures::unimodal_counterexample())
        }),
        fixture_check(
            "symmetric pair with atoms: CD dispersion share exceeds AVM share",
            || {
                let (f, g) = fixtures::symmetric_with_atoms();
                let a = disp_share(&decompose(DivergenceKind::Avm, &f, &g, cfg)?);
                let c = disp_share(&decompose(DivergenceKind::Cd, &f, &g, cfg)?);
                Ok((c <= a).then(|| format!("CD share {c} <= AVM share {a}")))
            },
        ),
        fixture_check(
            "dispersion vs shift: CD shift positive while WD_p shift is zero",
            || {
                let (f, g) = fixtures::dispersion_vs_shift();
                let cd = decompose(DivergenceKind::Cd, &f, &g, cfg)?;
                if !positive(cd.shift_plus, &cd) {
                    return Ok(Some(format!("CD shift_plus {}", cd.shift_plus)));
                }
                for p in 1..=3 {
                    let wd = decompose(DivergenceKind::Wd(p), &f, &g, cfg)?;
                    if positive(wd.shift_plus, &wd) || positive(wd.shift_minus, &wd) {
                        return Ok(Some(format!("wd{p} shift parts {:?}", [wd.shift_plus, wd.shift_minus])));
                    }
                }
                Ok(None)
            },
        ),
        fixture_check(
            "asymmetric location-scale pair: CD shift positive at equal medians",
            || {
                let (f, g) = fixtures::location_scale_pair();
                let cd = decompose(DivergenceKind::Cd, &f, &g, cfg)?;
                let same = compare_medians(f.central_median(), g.central_median()).is_eq();
                Ok((!(same && positive(cd.shift_plus, &cd)))
                    .then(|| format!("medians equal {same}, CD shift_plus {}", cd.shift_plus)))
            },
        ),
    ]
}

/// Symmetry, shift invariance, sign laws, concordance and the two
/// monotonicity results, each over `cfg.instances` random inputs, plus the
/// pinned counterexamples.
pub fn invariant_section(cfg: &SuiteConfig) -> Section {
    timed("divergence invariants", || {
        let mut rng = StdRng::seed_from_u64(cfg.seed);
        let mut checks = vec![
            symmetry(cfg, &mut rng),
            shift_invariance(cfg, &mut rng),
            symmetric_shift_law(cfg, &mut rng),
            location_scale_law(cfg, &mut rng),
            concordance(cfg, &mut rng),
            p_monotonicity(cfg, &mut rng),
            cd_weight_closed_form(cfg, &mut rng),
            cd_weight_quadrature(cfg, &mut rng),
        ];
        checks.extend(counterexamples(&cfg.quadrature));
        checks
    })
}

fn verdict(vs: &[OrderVerdict], r: Relation) -> OrderVerdict {
    *vs.iter().find(|v| v.relation == r).expect("all relations checked")
}

/// Left relation implies right relation, for `holds` and `strict_holds`.
const IMPLICATIONS: [(Relation, Relation, bool); 8] = [
    (Relation::Dispersive, Relation::WeakDispersive, false),
    (Relation::Stochastic, Relation::WeakStochastic, false),
    (Relation::WeakStochastic, Relation::RelaxedStochastic, false),
    (Relation::Dispersive, Relation::WeakDispersive, true),
    (Relation::Stochastic, Relation::WeakStochastic, true),
    (Relation::WeakStochastic, Relation::RelaxedStochastic, true),
    (Relation::StrongStochastic, Relation::RelaxedStochastic, true),
    (Relation::Stochastic, Relation::RelaxedStochastic, false),
];

fn lattice_violation(vs: &[OrderVerdict]) -> Option<String> {
    for (a, b, strict) in IMPLICATIONS {
        let (va, vb) = (verdict(vs, a), verdict(vs, b));
        let (ha, hb) = if strict {
            (va.strict_holds, vb.strict_holds)
        } else {
            (va.holds, vb.holds)
        };
        if ha && !hb {
            let s = if strict { ">" } else { ">=" };
            return Some(format!("{s}_{a} holds but {s}_{b} fails"));
        }
    }
    None
}

/// Sign check of the components a bridge row looks at.
fn bridge_decided(report: &BridgeReport) -> bool {
    report.checks.iter().all(|c| {
        let d = report
            .decompositions
            .iter()
            .find(|d| d.kind.name() == c.divergence && d.kind.p() == c.p)
            .expect("every bridge row has its decomposition");
        match c.component {
            BridgeComponent::Dispersion => signs(d.disp_plus, d.disp_minus, d).is_some(),
            BridgeComponent::Shift => signs(d.shift_plus, d.shift_minus, d).is_some(),
        }
    })
}

fn bridges(cfg: &SuiteConfig, rng: &mut StdRng) -> Vec<CheckOutcome> {
    let mut bridge = Property::new("continuous pairs: orders agree with zero components (AVM, WD_2, CD)");
    let mut lattice = Property::new("continuous pairs: implication lattice");
    let mut antisym = Property::new("continuous pairs: strict orders never hold both ways");
    while bridge.wants(cfg.instances) {
        let (f, g) = continuous_pair(rng);
        let report = match order_component_bridge(&f, &g, 2, &cfg.quadrature, &cfg.orders) {
            Ok(r) => r,
            Err(e) => {
                bridge.record(Err(e.clone()));
                lattice.record(Err(e.clone()));
                antisym.record(Err(e));
                continue;
            }
        };
        lattice.record(Ok(violated(lattice_violation(&report.verdicts))));
        antisym.record(check_all(&g, &f, &cfg.orders).map(|back| {
            violated(
                report
                    .verdicts
                    .iter()
                    .zip(&back)
                    .find(|(a, b)| a.strict_holds && b.strict_holds)
                    .map(|(a, _)| format!("strict {} both ways", a.relation)),
            )
        }));
        if !bridge_decided(&report) {
            bridge.record(Ok(Instance::Undecided));
            continue;
        }
        let bad = report.checks.iter().find(|c| !c.consistent);
        bridge.record(Ok(violated(bad.map(|c| {
            format!(
                "{} vs {} {:?}: order {} / strict {}, minus zero {} / unique plus {}",
                c.relation, c.divergence, c.component, c.order_holds, c.strict_order_holds, c.minus_zero, c.unique_plus
            )
        }))));
    }
    let n = lattice.decided;
    vec![bridge.finish(cfg.instances), lattice.finish(n), antisym.finish(n)]
}

/// Whether `r` holds on `(F, G)`, `(G, H)` and `(F, H)`.
fn triple_outcome(r: Relation, t: &[Distribution; 3], cfg: &OrderConfig) -> Result<(bool, bool, bool)> {
    Ok((
        check(r, &t[0], &t[1], cfg)?.holds,
        check(r, &t[1], &t[2], cfg)?.holds,
        check(r, &t[0], &t[2], cfg)?.holds,
    ))
}

fn transitivity(
    label: &str,
    r: Relation,
    cfg: &SuiteConfig,
    rng: &mut StdRng,
    mut law: impl FnMut(&mut StdRng) -> Distribution,
) -> CheckOutcome {
    let mut prop = Property::new(label);
    while prop.wants(cfg.instances) {
        let t = [law(rng), law(rng), law(rng)];
        prop.record((|| {
            let reflexive = check(r, &t[0], &t[0], &cfg.orders)?.holds;
            if !reflexive {
                return Ok(Instance::Violated(format!(">=_{r} not reflexive")));
            }
            let (fg, gh, fh) = triple_outcome(r, &t, &cfg.orders)?;
            Ok(violated((fg && gh && !fh).then(|| format!(">=_{r} not transitive"))))
        })());
    }
    prop.finish(cfg.instances)
}

fn intransitive(label: &str, r: Relation, t: [Distribution; 3], cfg: &OrderConfig) -> CheckOutcome {
    fixture_check(label, || {
        let (fg, gh, fh) = triple_outcome(r, &t, cfg)?;
        Ok((!(fg && gh && !fh)).then(|| format!("F>=G {fg}, G>=H {gh}, F>=H {fh}")))
    })
}

fn jump_breakdown(cfg: &SuiteConfig) -> CheckOutcome {
    fixture_check(
        "jumping quantiles: strict weak dispersive order without a dispersion part",
        || {
            let (f, g) = fixtures::jump_counterexample();
            let report = order_component_bridge(&f, &g, 2, &cfg.quadrature, &cfg.orders)?;
            let wd = verdict(&report.verdicts, Relation::WeakDispersive);
            if !wd.strict_holds {
                return Ok(Some("F >_wD G should hold".into()));
            }
            if let Some(d) = report.decompositions.iter().find(|d| positive(d.disp_plus, d)) {
                return Ok(Some(format!("{} disp_plus {} should be zero", d.kind, d.disp_plus)));
            }
            if !report.assumption_violated || report.discrepancies == 0 {
                return Ok(Some(format!(
                    "expected a flagged breakdown, got assumption_violated {} with {} discrepancies",
                    report.assumption_violated, report.discrepancies
                )));
            }
            Ok(None)
        },
    )
}

/// Order bridges and lattice on random continuous pairs, preorder
/// properties, and the pinned intransitivity and breakdown fixtures.
pub fn bridge_section(cfg: &SuiteConfig) -> Section {
    timed("order bridges", || {
        let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(1));
        let mut checks = bridges(cfg, &mut rng);
        checks.push(transitivity(
            "weak dispersive order: reflexive and transitive",
            Relation::WeakDispersive,
            cfg,
            &mut rng,
            continuous_law,
        ));
        checks.push(transitivity(
            "weak stochastic order on a common support: reflexive and transitive",
            Relation::WeakStochastic,
            cfg,
            &mut rng,
            common_support_law,
        ));
        checks.push(transitivity(
            "relaxed stochastic order on symmetric laws: reflexive and transitive",
            Relation::RelaxedStochastic,
            cfg,
            &mut rng,
            random::symmetric,
        ));
        checks.push(intransitive(
            "weak stochastic order intransitive without a common support",
            Relation::WeakStochastic,
            fixtures::weak_stochastic_triple(),
            &cfg.orders,
        ));
        checks.push(intransitive(
            "relaxed stochastic order intransitive on asymmetric laws",
            Relation::RelaxedStochastic,
            fixtures::relaxed_stochastic_triple(),
            &cfg.orders,
        ));
        checks.push(jump_breakdown(cfg));
        checks
    })
}

/// A hand-worked histogram pair with its expected bounds, AVM and CD.
pub struct HistogramCase {
    pub label: &'static str,
    pub spec: HistogramPairSpec,
    pub bounds: (f64, f64),
    pub avm: f64,
    pub cd: f64,
}

fn open(edges: &[Option<f64>], probs: &[f64]) -> OpenHistogram {
    OpenHistogram::new(edges.to_vec(), probs.to_vec()).expect("case histogram")
}

/// Three pairs whose totals were integrated by hand over the merged CDF
/// breakpoints.
pub fn histogram_cases() -> Vec<HistogramCase> {
    vec![
        // F(x) = x on [0, 1], G(x) = x / 2 on [0, 2].
        HistogramCase {
            label: "closed single bins",
            spec: HistogramPairSpec {
                f: open(&[Some(0.0), Some(1.0)], &[1.0]),
                g: open(&[Some(0.0), Some(2.0)], &[1.0]),
                truncation: Truncation::Conservative,
            },
            bounds: (0.0, 2.0),
            avm: 0.5,
            cd: 1.0 / 6.0,
        },
        // Upper bins open from 8 and 12: both close at 12, G's tail is an
        // atom there and G(x) = x / 15 below it.
        HistogramCase {
            label: "open upper bins",
            spec: HistogramPairSpec {
                f: open(&[Some(0.0), Some(4.0), Some(8.0), None], &[0.3, 0.5, 0.2]),
                g: open(&[Some(0.0), Some(6.0), Some(12.0), None], &[0.4, 0.4, 0.2]),
                truncation: Truncation::Conservative,
            },
            bounds: (0.0, 12.0),
            avm: 1.6,
            cd: 74.0 / 225.0,
        },
        // Lower bins open below -2 and -5: both close at -5, G's tail is an
        // atom there. F - G changes sign once, at x = 1/7.
        HistogramCase {
            label: "open lower bins",
            spec: HistogramPairSpec {
                f: open(&[None, Some(-2.0), Some(0.0), Some(2.0)], &[0.1, 0.5, 0.4]),
                g: open(&[None, Some(-5.0), Some(1.0), Some(3.0)], &[0.2, 0.5, 0.3]),
                truncation: Truncation::Conservative,
            },
            bounds: (-5.0, 3.0),
            avm: 201.0 / 140.0,
            cd: 31.0 / 90.0,
        },
    ]
}

/// Largest downward step of the CDF on a grid over the support, and the
/// CDF values at both ends.
fn cdf_profile(d: &Distribution, lo: f64, hi: f64) -> (f64, f64, f64) {
    let n = 2000;
    let mut drop = 0.0_f64;
    let mut last = d.cdf(lo - 1.0);
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let c = d.cdf(x);
        drop = drop.max(last - c);
        last = c;
    }
    (drop, d.cdf(lo - 1.0), d.cdf(hi))
}

fn random_open_histogram(rng: &mut StdRng, open_below: bool, open_above: bool) -> OpenHistogram {
    let n = rng.gen_range(2..=5);
    let mut edges: Vec<f64> = (0..n)
        .map(|_| (rng.gen_range(-10.0..10.0_f64) * 4.0).round() / 4.0)
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    if edges.len() < 2 {
        edges.push(edges[0] + 1.0);
    }
    let mut e: Vec<Option<f64>> = edges.into_iter().map(Some).collect();
    if open_below {
        e.insert(0, None);
    }
    if open_above {
        e.push(None);
    }
    let bins = e.len() - 1;
    let cuts: Vec<f64> = (0..bins).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = cuts.iter().sum();
    let mut probs: Vec<f64> = cuts.iter().map(|c| c / total).collect();
    let rest = 1.0 - probs[..bins - 1].iter().sum::<f64>();
    probs[bins - 1] = rest;
    OpenHistogram::new(e, probs).expect("generated histogram")
}

/// Bound selection, CDF shape and hand-computed totals for histogram pairs
/// with open bins.
pub fn histogram_section(cfg: &SuiteConfig) -> Section {
    timed("histogram pipeline", || {
        let mut checks = Vec::new();
        for case in histogram_cases() {
            let label = format!("{}: bounds, AVM and CD", case.label);
            checks.push(match histogram_pair_to_distributions(&case.spec) {
                Ok((f, g)) => {
                    let got = (|| -> Result<Vec<f64>> {
                        let (lo, hi) = case.spec.bounds()?;
                        let avm = decompose(DivergenceKind::Avm, &f, &g, &cfg.quadrature)?.total;
                        let cd = decompose(DivergenceKind::Cd, &f, &g, &cfg.quadrature)?.total;
                        Ok(vec![lo, hi, avm, cd])
                    })();
                    match got {
                        Ok(v) => {
                            CheckOutcome::compare(label, &[case.bounds.0, case.bounds.1, case.avm, case.cd], &v, 1e-9)
                        }
                        Err(e) => CheckOutcome::failed(label, e.to_string()),
                    }
                }
                Err(e) => CheckOutcome::failed(label, e.to_string()),
            });
        }
        checks.push(fixture_check(
            "open upper bin at the shared bound becomes an atom",
            || {
                let (_, g) = histogram_pair_to_distributions(&histogram_cases()[1].spec)?;
                let k = g.knots().expect("histograms are piecewise");
                let atom = k.cdf(12.0) - k.cdf_left(12.0);
                Ok(((atom - 0.2).abs() > 1e-12).then(|| format!("mass at 12 is {atom}")))
            },
        ));
        checks.push(fixture_check("explicit bounds override the conservative rule", || {
            let mut spec = histogram_cases()[1].spec.clone();
            spec.truncation = Truncation::Bounds {
                lower: None,
                upper: Some(20.0),
            };
            let (f, g) = histogram_pair_to_distributions(&spec)?;
            let (sf, sg) = (f.support().1, g.support().1);
            Ok((sf != 20.0 || sg != 20.0).then(|| format!("upper support ends {sf} and {sg}")))
        }));
        let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(2));
        let mut prop = Property::new("random open histograms: monotone CDFs from 0 to 1 within the bounds");
        while prop.wants(cfg.instances) {
            let flags: [bool; 4] = std::array::from_fn(|_| rng.gen_bool(0.5));
            let spec = HistogramPairSpec {
                f: random_open_histogram(&mut rng, flags[0], flags[1]),
                g: random_open_histogram(&mut rng, flags[2], flags[3]),
                truncation: Truncation::Conservative,
            };
            prop.record((|| {
                let (lo, hi) = spec.bounds()?;
                let (f, g) = histogram_pair_to_distributions(&spec)?;
                for (name, d) in [("F", &f), ("G", &g)] {
                    let (drop, start, end) = cdf_profile(d, lo, hi);
                    if drop > 0.0 || start != 0.0 || (end - 1.0).abs() > 1e-12 {
                        return Ok(Instance::Violated(format!(
                            "{name}: drop {drop}, F(lo-1) = {start}, F(hi) = {end}"
                        )));
                    }
                    let (a, b) = d.support();
                    if a < lo || b > hi {
                        return Ok(Instance::Violated(format!(
                            "{name}: support [{a}, {b}] outside [{lo}, {hi}]"
                        )));
                    }
                }
                Ok(Instance::Holds)
            })());
        }
        checks.push(prop.finish(cfg.instances));
        checks
    })
}

/// Runs the invariant, bridge and histogram sections.
pub fn run(cfg: &SuiteConfig) -> SelftestReport {
    SelftestReport::from_sections(vec![
        invariant_section(cfg),
        bridge_section(cfg),
        histogram_section(cfg),
    ])
}
