//! Grid checkers for dispersive and stochastic order relations, and the
//! bridge between those orders and zero decomposition components.
//!
//! Every relation is a universally quantified inequality over quantile
//! levels. The checkers evaluate it on a midpoint grid, augmented with the
//! knot levels of piecewise inputs so that jumps and kinks are hit exactly.
//! Verdicts are therefore sound up to grid resolution.

use serde::Serialize;

use crate::decomp::{component_is_zero, decompose, Decomposition, DivergenceKind, QuadratureConfig};
use crate::error::{Error, Result};
use crate::quantile::Distribution;

/// The order relations on distributions that the checkers cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    /// Dispersive order, `>=_D`.
    #[serde(rename = "D")]
    Dispersive,
    /// Weak dispersive (quantile spread) order, `>=_wD`.
    #[serde(rename = "wD")]
    WeakDispersive,
    /// Usual stochastic order, `>=_S`.
    #[serde(rename = "S")]
    Stochastic,
    /// Weak stochastic order, `>=_wS`.
    #[serde(rename = "wS")]
    WeakStochastic,
    /// Relaxed stochastic order, `>=_rS`.
    #[serde(rename = "rS")]
    RelaxedStochastic,
    /// Strong stochastic order, `>_sS` (strict by definition).
    #[serde(rename = "sS")]
    StrongStochastic,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Dispersive,
        Relation::WeakDispersive,
        Relation::Stochastic,
        Relation::WeakStochastic,
        Relation::RelaxedStochastic,
        Relation::StrongStochastic,
    ];

    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Dispersive => "D",
            Relation::WeakDispersive => "wD",
            Relation::Stochastic => "S",
            Relation::WeakStochastic => "wS",
            Relation::RelaxedStochastic => "rS",
            Relation::StrongStochastic => "sS",
        }
    }
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A level, or a level pair for the two-level relations, where the defining
/// inequality fails or is strict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub tau: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

impl Witness {
    fn level(tau: f64) -> Self {
        Self { tau, xi: None }
    }

    fn pair(tau: f64, xi: f64) -> Self {
        Self { tau, xi: Some(xi) }
    }
}

/// Outcome of checking `F >= G` in one relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    /// `F >= G`. For the strong stochastic order this equals `strict_holds`.
    pub holds: bool,
    /// `F >= G` and not `G >= F`.
    pub strict_holds: bool,
    /// Where `F >= G` fails when it does not hold; otherwise where `G >= F`
    /// fails when the strict version holds.
    pub witness: Option<Witness>,
    /// Smallest value of the defining expression over the grid.
    pub margin: f64,
    /// Slack used for the inequality.
    pub tol: f64,
    /// An input has a jumping quantile function, outside the setting in
    /// which the bridge equivalences are guaranteed.
    pub assumption_violated: bool,
}

/// Grid sizes and slack for the order checkers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderConfig {
    /// Midpoint nodes for the one-level relations.
    pub grid_n: usize,
    /// Midpoint nodes per axis for the weak stochastic order.
    pub grid2_n: usize,
    /// Fixed slack; `None` uses [`default_tolerance`].
    pub tol: Option<f64>,
}

impl Default for OrderConfig {
    fn default() -> Self {
        Self {
            grid_n: 1024,
            grid2_n: 256,
            tol: None,
        }
    }
}

impl OrderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 8 || self.grid2_n < 8 {
            return Err(Error::Domain(format!(
                "order grids need at least 8 nodes (got {} and {})",
                self.grid_n, self.grid2_n
            )));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Domain(format!(
                    "order tolerance must be finite and >= 0 (got {t})"
                )));
            }
        }
        Ok(())
    }

    fn tolerance(&self, f: &Distribution, g: &Distribution) -> f64 {
        self.tol.unwrap_or_else(|| default_tolerance(f, g))
    }
}

/// `1e-9 * (1 + max IQR)`.
pub fn default_tolerance(f: &Distribution, g: &Distribution) -> f64 {
    1e-9 * (1.0 + f.iqr().max(g.iqr()))
}

/// Knot levels of piecewise inputs, strictly inside `(0, 1)`.
fn structural_levels(f: &Distribution, g: &Distribution) -> Vec<f64> {
    [f, g]
        .iter()
        .filter_map(|d| d.knots())
        .flat_map(|k| k.levels().iter().copied())
        .filter(|&l| l > 0.0 && l < 1.0)
        .collect()
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Midpoint levels on `(0, 1)` plus structural levels and their mirrors.
fn full_grid(n: usize, extra: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    v.extend(extra.iter().flat_map(|&l| [l, 1.0 - l]));
    sorted_unique(v)
}

/// Midpoint levels on `(0.5, 1)` plus structural levels folded into it.
fn upper_grid(n: usize, extra: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| 0.5 + (i as f64 + 0.5) / (2.0 * n as f64)).collect();
    v.extend(extra.iter().map(|&l| l.max(1.0 - l)).filter(|&l| l > 0.5 && l < 1.0));
    sorted_unique(v)
}

/// Minimum of a relation's defining expression and where it is attained.
type Scan = (f64, Option<Witness>);

fn q(d: &Distribution, tau: f64) -> f64 {
    d.quantile_unchecked(tau)
}

/// `min_{xi < tau} [(F^-1(tau) - F^-1(xi)) - (G^-1(tau) - G^-1(xi))]`.
fn scan_dispersive(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Scan {
    let grid = full_grid(cfg.grid_n, &structural_levels(f, g));
    let mut best: Scan = (f64::INFINITY, None);
    let mut run_max = f64::NEG_INFINITY;
    let mut run_at = 0.0;
    for &t in &grid {
        let h = q(f, t) - q(g, t);
        if run_max > f64::NEG_INFINITY && h - run_max < best.0 {
            best = (h - run_max, Some(Witness::pair(t, run_at)));
        }
        if h > run_max {
            run_max = h;
            run_at = t;
        }
    }
    best
}

/// Minimum over an upper-half grid of a one-level expression.
fn scan_upper(f: &Distribution, g: &Distribution, cfg: &OrderConfig, e: impl Fn(f64, f64, f64, f64) -> f64) -> Scan {
    let grid = upper_grid(cfg.grid_n, &structural_levels(f, g));
    let mut best: Scan = (f64::INFINITY, None);
    for &t in &grid {
        let v = e(q(f, t), q(f, 1.0 - t), q(g, t), q(g, 1.0 - t));
        if v < best.0 {
            best = (v, Some(Witness::level(t)));
        }
    }
    best
}

fn scan_weak_dispersive(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Scan {
    scan_upper(f, g, cfg, |fu, fl, gu, gl| (fu - fl) - (gu - gl))
}

fn scan_stochastic(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Scan {
    scan_upper(f, g, cfg, |fu, fl, gu, gl| (fu - gu).min(fl - gl))
}

fn scan_relaxed(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Scan {
    scan_upper(f, g, cfg, |fu, fl, gu, gl| (fu - gu).max(fl - gl))
}

/// `min_{tau, xi} max{F^-1(tau) - G^-1(xi), F^-1(1 - tau) - G^-1(1 - xi)}`.
fn scan_weak_stochastic(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Scan {
    let grid = upper_grid(cfg.grid2_n, &structural_levels(f, g));
    let ends = |d: &Distribution| -> Vec<(f64, f64)> { grid.iter().map(|&t| (q(d, t), q(d, 1.0 - t))).collect() };
    let (fe, ge) = (ends(f), ends(g));
    let mut best: Scan = (f64::INFINITY, None);
    for (i, &(fu, fl)) in fe.iter().enumerate() {
        for (j, &(gu, gl)) in ge.iter().enumerate() {
            let v = (fu - gu).max(fl - gl);
            if v < best.0 {
                best = (v, Some(Witness::pair(grid[i], grid[j])));
            }
        }
    }
    best
}

fn scanner(relation: Relation) -> fn(&Distribution, &Distribution, &OrderConfig) -> Scan {
    match relation {
        Relation::Dispersive => scan_dispersive,
        Relation::WeakDispersive => scan_weak_dispersive,
        Relation::Stochastic | Relation::StrongStochastic => scan_stochastic,
        Relation::WeakStochastic => scan_weak_stochastic,
        Relation::RelaxedStochastic => scan_relaxed,
    }
}

/// Checks `F >= G` and `F > G` in `relation`.
pub fn check(relation: Relation, f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<OrderVerdict> {
    cfg.validate()?;
    let tol = cfg.tolerance(f, g);
    let scan = scanner(relation);
    let (margin, fail_at) = scan(f, g, cfg);
    let holds = margin >= -tol;
    let assumption_violated = f.has_quantile_jump() || g.has_quantile_jump();
    let mut verdict = OrderVerdict {
        relation,
        holds,
        strict_holds: false,
        witness: if holds { None } else { fail_at },
        margin,
        tol,
        assumption_violated,
    };
    if relation == Relation::StrongStochastic {
        // F >=_S G plus a level where both end differences exceed the slack
        let (best, at) = scan_upper(f, g, cfg, |fu, fl, gu, gl| -(fu - gu).min(fl - gl));
        let strong = holds && -best > tol;
        verdict.holds = strong;
        verdict.strict_holds = strong;
        if strong {
            verdict.witness = at;
        }
        return Ok(verdict);
    }
    if holds {
        let (back, back_at) = scan(g, f, cfg);
        if back < -tol {
            verdict.strict_holds = true;
            verdict.witness = back_at;
        }
    }
    Ok(verdict)
}

pub fn check_dispersive(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<OrderVerdict> {
    check(Relation::Dispersive, f, g, cfg)
}

pub fn check_weak_dispersive(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<OrderVerdict> {
    check(Relation::WeakDispersive, f, g, cfg)
}

/// Usual stochastic order; see [`check_strong_stochastic`] for `>_sS`.
pub fn check_stochastic(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<OrderVerdict> {
    check(Relation::Stochastic, f, g, cfg)
}

pub fn check_strong_stochastic(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<OrderVerdict> {
    check(Relation::StrongStochastic, f, g, cfg)
}

pub fn check_weak_stochastic(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<OrderVerdict> {
    check(Relation::WeakStochastic, f, g, cfg)
}

pub fn check_relaxed_stochastic(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<OrderVerdict> {
    check(Relation::RelaxedStochastic, f, g, cfg)
}

/// All six verdicts in [`Relation::ALL`] order.
pub fn check_all(f: &Distribution, g: &Distribution, cfg: &OrderConfig) -> Result<Vec<OrderVerdict>> {
    Relation::ALL.iter().map(|&r| check(r, f, g, cfg)).collect()
}

/// Which component a bridge equivalence ties to an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BridgeComponent {
    /// `disp_minus = 0` for the order, plus `disp_plus > 0` for the strict order.
    Dispersion,
    /// `shift_minus = 0` for the order, plus `shift_plus > 0` for the strict order.
    Shift,
}

/// One equivalence between an order and a zero component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BridgeCheck {
    pub relation: Relation,
    pub divergence: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    pub component: BridgeComponent,
    pub order_holds: bool,
    pub minus_zero: bool,
    pub strict_order_holds: bool,
    /// Minus component zero and plus component positive.
    pub unique_plus: bool,
    /// Both equivalences agree.
    pub consistent: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Orders, decompositions and the agreement of each equivalence.
#[derive(Debug, Clone, Serialize)]
pub struct BridgeReport {
    pub verdicts: Vec<OrderVerdict>,
    pub decompositions: Vec<Decomposition>,
    pub checks: Vec<BridgeCheck>,
    /// An input has a jumping quantile function; disagreements are then
    /// expected rather than errors.
    pub assumption_violated: bool,
    pub discrepancies: usize,
}

fn bridge_check(v: &OrderVerdict, d: &Decomposition, component: BridgeComponent) -> BridgeCheck {
    let (plus, minus) = match component {
        BridgeComponent::Dispersion => (d.disp_plus, d.disp_minus),
        BridgeComponent::Shift => (d.shift_plus, d.shift_minus),
    };
    let minus_zero = component_is_zero(minus, d.total);
    let unique_plus = minus_zero && !component_is_zero(plus, d.total);
    BridgeCheck {
        relation: v.relation,
        divergence: d.kind.name(),
        p: d.kind.p(),
        component,
        order_holds: v.holds,
        minus_zero,
        strict_order_holds: v.strict_holds,
        unique_plus,
        consistent: v.holds == minus_zero && v.strict_holds == unique_plus,
        witness: v.witness,
    }
}

/// Compares the weak dispersive, weak stochastic and relaxed stochastic
/// orders with zero components of AVM, WD_p and CD.
///
/// `>=_wD` pairs with `disp_minus = 0` for every divergence, `>=_wS` with
/// the CD `shift_minus = 0`, and `>=_rS` with `shift_minus = 0` of AVM and
/// WD_p. The strict orders pair with a unique positive component.
pub fn order_component_bridge(
    f: &Distribution,
    g: &Distribution,
    p: u32,
    qcfg: &QuadratureConfig,
    ocfg: &OrderConfig,
) -> Result<BridgeReport> {
    let verdicts = check_all(f, g, ocfg)?;
    let verdict = |r: Relation| {
        verdicts
            .iter()
            .find(|v| v.relation == r)
            .expect("all relations checked")
    };
    let mut kinds = vec![DivergenceKind::Avm];
    if p > 1 {
        kinds.push(DivergenceKind::Wd(p));
    }
    kinds.push(DivergenceKind::Cd);
    let decompositions = kinds
        .iter()
        .map(|&k| decompose(k, f, g, qcfg))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = Vec::new();
    for d in &decompositions {
        checks.push(bridge_check(
            verdict(Relation::WeakDispersive),
            d,
            BridgeComponent::Dispersion,
        ));
        let shift_order = match d.kind {
            DivergenceKind::Cd => Relation::WeakStochastic,
            _ => Relation::RelaxedStochastic,
        };
        checks.push(bridge_check(verdict(shift_order), d, BridgeComponent::Shift));
    }
    let discrepancies = checks.iter().filter(|c| !c.consistent).count();
    Ok(BridgeReport {
        assumption_violated: verdicts.iter().any(|v| v.assumption_violated),
        verdicts,
        decompositions,
        checks,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(mu: f64, sigma: f64) -> Distribution {
        Distribution::normal(mu, sigma).unwrap()
    }

    #[test]
    fn reflexive_relations_hold_without_strictness() {
        let f = normal(0.3, 1.7);
        let cfg = OrderConfig::default();
        for v in check_all(&f, &f, &cfg).unwrap() {
            let expect = v.relation != Relation::StrongStochastic;
            assert_eq!(v.holds, expect, "{v:?}");
            assert!(!v.strict_holds, "{v:?}");
        }
    }

    #[test]
    fn scale_dominates_dispersive_order() {
        let cfg = OrderConfig::default();
        let v = check_dispersive(&normal(0.0, 2.0), &normal(5.0, 1.0), &cfg).unwrap();
        assert!(v.holds && v.strict_holds);
        let w = check_weak_dispersive(&normal(7.0, 3.0), &normal(0.0, 1.0), &cfg).unwrap();
        assert!(w.holds && w.strict_holds);
        let back = check_dispersive(&normal(5.0, 1.0), &normal(0.0, 2.0), &cfg).unwrap();
        assert!(!back.holds && back.witness.unwrap().xi.is_some());
    }

    #[test]
    fn unit_shift_is_strongly_ordered() {
        let cfg = OrderConfig::default();
        let (f, g) = (normal(1.0, 1.0), normal(0.0, 1.0));
        for r in Relation::ALL.into_iter().skip(2) {
            let v = check(r, &f, &g, &cfg).unwrap();
            assert!(v.holds && v.strict_holds, "{v:?}");
        }
    }

    #[test]
    fn grids_include_mirrored_knots() {
        let g = upper_grid(8, &[0.25, 0.9]);
        assert!(g.contains(&0.75) && g.contains(&0.9));
        assert!(g.iter().all(|&t| t > 0.5 && t < 1.0));
    }
}
