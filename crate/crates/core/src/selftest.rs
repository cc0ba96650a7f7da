//! Built-in validation run by `qdecomp selftest`.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::closed_forms::{normal_avm_decompose, normal_cd_decompose, normal_wdp_decompose, NormalPair};
use crate::decomp::{decompose, Decomposition, DivergenceKind, QuadratureConfig};
use crate::error::Result;
use crate::fixtures::{run_pinned, CheckOutcome};
use crate::quantile::Distribution;
use crate::random;

/// Sizes and seed of a self-test run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestConfig {
    pub quadrature: QuadratureConfig,
    /// Random pairs per divergence and path for the exactness check.
    pub exactness_pairs: usize,
    /// Random normal pairs per divergence for the closed-form check.
    pub oracle_pairs: usize,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            exactness_pairs: 500,
            oracle_pairs: 200,
            seed: 20_240_917,
        }
    }
}

/// A named group of checks.
#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub passed: bool,
    pub elapsed_ms: u128,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub sections: Vec<Section>,
}

impl SelftestReport {
    pub fn from_sections(sections: Vec<Section>) -> Self {
        Self {
            passed: sections.iter().all(|s| s.passed),
            sections,
        }
    }

    /// Appends the sections of another report.
    pub fn extend(&mut self, other: SelftestReport) {
        self.passed &= other.passed;
        self.sections.extend(other.sections);
    }

    /// Plain-text table, one line per check.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!(
                "== {} ({} ms): {}\n",
                s.name,
                s.elapsed_ms,
                if s.passed { "PASS" } else { "FAIL" }
            ));
            for c in &s.checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                match &c.error {
                    Some(e) => out.push_str(&format!("  {status}  {}: {e}\n", c.label)),
                    None if c.expected.is_empty() => out.push_str(&format!("  {status}  {}\n", c.label)),
                    None => out.push_str(&format!(
                        "  {status}  {}: max error {:.3e} (tol {:.1e})\n",
                        c.label, c.max_error, c.tol
                    )),
                }
            }
        }
        out.push_str(if self.passed {
            "selftest: PASS\n"
        } else {
            "selftest: FAIL\n"
        });
        out
    }
}

fn section(name: &'static str, run: impl FnOnce() -> Vec<CheckOutcome>) -> Section {
    let start = Instant::now();
    let checks = run();
    Section {
        name,
        passed: checks.iter().all(|c| c.passed),
        elapsed_ms: start.elapsed().as_millis(),
        checks,
    }
}

/// Expected values for the reference pairs.
pub fn pinned_section(cfg: &SelftestConfig) -> Section {
    section("reference values", || run_pinned(&cfg.quadrature))
}

/// `f` over `items` on scoped worker threads, results in input order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(items.len().max(1));
    let chunk = items.len().div_ceil(threads).max(1);
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Worst value of `err` over pairs, as a single check against `tol`.
fn worst<I>(label: String, tol: f64, items: I) -> CheckOutcome
where
    I: IntoIterator<Item = Result<f64>>,
{
    let mut max = 0.0_f64;
    for (n, item) in items.into_iter().enumerate() {
        match item {
            Ok(e) if e.is_finite() => max = max.max(e),
            Ok(e) => return CheckOutcome::failed(label, format!("non-finite error {e} at pair {n}")),
            Err(err) => return CheckOutcome::failed(label, format!("pair {n}: {err}")),
        }
    }
    CheckOutcome::compare(label, &[0.0], &[max], tol)
}

const EXACTNESS_KINDS: [DivergenceKind; 5] = [
    DivergenceKind::Avm,
    DivergenceKind::Wd(2),
    DivergenceKind::Wd(3),
    DivergenceKind::Wd(4),
    DivergenceKind::Cd,
];

/// `|sum of components - total|` on random pairs: at most `1e-9` when both
/// inputs are piecewise linear and `1e-3 (1 + total)` under quadrature.
pub fn exactness_section(cfg: &SelftestConfig) -> Section {
    section("decomposition exactness", || {
        let mut checks = Vec::new();
        for (path, exact) in [("exact path", true), ("quadrature path", false)] {
            let mut rng = StdRng::seed_from_u64(cfg.seed ^ exact as u64);
            let gen = |rng: &mut StdRng| -> (Distribution, Distribution) {
                if exact {
                    (random::piecewise(rng), random::piecewise(rng))
                } else {
                    (random::smooth(rng), random::smooth(rng))
                }
            };
            let pairs: Vec<_> = (0..cfg.exactness_pairs).map(|_| gen(&mut rng)).collect();
            for kind in EXACTNESS_KINDS {
                let label = format!("{kind} {path}, {} pairs", pairs.len());
                let errs = par_map(&pairs, |(f, g)| {
                    let d = decompose(kind, f, g, &cfg.quadrature)?;
                    Ok(if exact {
                        d.residual()
                    } else {
                        d.residual() / (1.0 + d.total)
                    })
                });
                checks.push(worst(label, if exact { 1e-9 } else { 1e-3 }, errs));
            }
        }
        checks
    })
}

/// Largest deviation of any component or the total, relative to the
/// closed-form total.
pub fn relative_gap(reference: &Decomposition, approx: &Decomposition) -> f64 {
    let scale = reference.total.max(f64::MIN_POSITIVE);
    let mut gap = (reference.total - approx.total).abs();
    for (a, b) in reference.components().iter().zip(approx.components()) {
        gap = gap.max((a - b).abs());
    }
    gap / scale
}

/// Closed form for a normal pair.
pub fn closed_form(kind: DivergenceKind, pair: &NormalPair) -> Result<Decomposition> {
    match kind {
        DivergenceKind::Avm => Ok(normal_avm_decompose(pair)),
        DivergenceKind::Wd(p) => normal_wdp_decompose(pair, p),
        DivergenceKind::Cd => Ok(normal_cd_decompose(pair)),
    }
}

/// Random normal pair, drawn with a visible gap in location or scale so the
/// relative error stays meaningful.
pub fn random_normal_pair(rng: &mut StdRng) -> NormalPair {
    loop {
        let (f, g) = (random::normal(rng), random::normal(rng));
        if let Some(p) = NormalPair::from_distributions(&f, &g) {
            if p.mu_tilde() + p.sigma_tilde() > 0.05 {
                return p;
            }
        }
    }
}

const ORACLE_KINDS: [(DivergenceKind, f64); 5] = [
    (DivergenceKind::Avm, 1e-4),
    (DivergenceKind::Wd(1), 1e-3),
    (DivergenceKind::Wd(2), 1e-3),
    (DivergenceKind::Wd(3), 1e-3),
    (DivergenceKind::Cd, 2e-3),
];

/// Gaussian closed forms against the quadrature on random normal pairs.
pub fn oracle_section(cfg: &SelftestConfig) -> Section {
    section("closed-form oracle", || {
        let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(1));
        let pairs: Vec<_> = (0..cfg.oracle_pairs).map(|_| random_normal_pair(&mut rng)).collect();
        ORACLE_KINDS
            .iter()
            .map(|&(kind, tol)| {
                let label = format!("{kind} normal pairs, {} pairs", pairs.len());
                let errs = par_map(&pairs, |pair| {
                    let (f, g) = pair.distributions();
                    let reference = closed_form(kind, pair)?;
                    let approx = decompose(kind, &f, &g, &cfg.quadrature)?;
                    Ok(relative_gap(&reference, &approx))
                });
                worst(label, tol, errs)
            })
            .collect()
    })
}

/// Runs all three sections.
pub fn run(cfg: &SelftestConfig) -> SelftestReport {
    SelftestReport::from_sections(vec![pinned_section(cfg), exactness_section(cfg), oracle_section(cfg)])
}
