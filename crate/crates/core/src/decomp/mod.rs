//! Divergences between two distributions and their four-part decompositions.
//!
//! For a pair `(F, G)` every divergence `D` splits as
//! `D = shift_plus + shift_minus + disp_plus + disp_minus`, each part
//! non-negative. `shift_plus` measures how far `F` sits above `G`,
//! `disp_plus` how much wider `F` is. Minus parts are the plus parts of the
//! swapped pair, computed by the same code.
//!
//! When both quantile functions are piecewise linear (uniforms, histograms,
//! empirical laws, piecewise quantiles and their mixtures) the integrals are
//! evaluated in closed form. Otherwise level-space integrals use the
//! composite midpoint rule.

mod cramer;
mod exact;
mod polygon;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quantile::{CentralInterval, Distribution};

pub use cramer::{cd_decompose, cd_quantile_rep, cd_via_cdf};

/// Partial sums beyond this are reported as overflow.
const OVERFLOW_LIMIT: f64 = 1e308;

/// Grid sizes for the midpoint rules and the choice of integration path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// Nodes for one-dimensional level-space and x-space integrals.
    pub n_single: usize,
    /// Nodes per axis for the two-dimensional Cramér grid.
    pub n_double: usize,
    /// Use closed-form integration whenever both inputs are piecewise linear.
    pub prefer_exact: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_single: 4096,
            n_double: 512,
            prefer_exact: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_single < 8 || self.n_double < 8 {
            return Err(Error::Domain(format!(
                "grid sizes must be at least 8 (got n_single={}, n_double={})",
                self.n_single, self.n_double
            )));
        }
        Ok(())
    }

    /// Same grids, quadrature forced.
    pub fn quadrature_only(self) -> Self {
        Self {
            prefer_exact: false,
            ..self
        }
    }
}

/// Which divergence a [`Decomposition`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    /// Area validation metric, `int |F^-1 - G^-1|`.
    Avm,
    /// `int |F^-1 - G^-1|^p`, the p-th power of the Wasserstein metric.
    Wd(u32),
    /// Cramér distance, `int (F - G)^2 dx`.
    Cd,
}

impl DivergenceKind {
    pub fn name(&self) -> &'static str {
        match self {
            DivergenceKind::Avm => "avm",
            DivergenceKind::Wd(_) => "wd",
            DivergenceKind::Cd => "cd",
        }
    }

    pub fn p(&self) -> Option<u32> {
        match self {
            DivergenceKind::Wd(p) => Some(*p),
            _ => None,
        }
    }
}

impl std::fmt::Display for DivergenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergenceKind::Wd(p) => write!(f, "wd{p}"),
            other => f.write_str(other.name()),
        }
    }
}

/// A divergence total with its four components.
///
/// `total` is computed along an independent route (direct level-space or
/// x-space integration), so `total - sum()` measures the integration error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition {
    pub kind: DivergenceKind,
    pub total: f64,
    pub shift_plus: f64,
    pub shift_minus: f64,
    pub disp_plus: f64,
    pub disp_minus: f64,
    /// True when every integral was evaluated in closed form.
    pub exact: bool,
}

impl Decomposition {
    pub(crate) fn new(kind: DivergenceKind, total: f64, parts: [f64; 4], exact: bool) -> Self {
        let clean = |v: f64| if v > 0.0 { v } else { 0.0 };
        Self {
            kind,
            total: clean(total),
            shift_plus: clean(parts[0]),
            shift_minus: clean(parts[1]),
            disp_plus: clean(parts[2]),
            disp_minus: clean(parts[3]),
            exact,
        }
    }

    /// `[shift_plus, shift_minus, disp_plus, disp_minus]`.
    pub fn components(&self) -> [f64; 4] {
        [self.shift_plus, self.shift_minus, self.disp_plus, self.disp_minus]
    }

    pub fn sum(&self) -> f64 {
        self.shift_plus + self.shift_minus + self.disp_plus + self.disp_minus
    }

    /// `|total - sum of components|`.
    pub fn residual(&self) -> f64 {
        (self.total - self.sum()).abs()
    }

    /// The decomposition of the swapped pair `(G, F)`.
    pub fn swapped(&self) -> Self {
        Self {
            shift_plus: self.shift_minus,
            shift_minus: self.shift_plus,
            disp_plus: self.disp_minus,
            disp_minus: self.disp_plus,
            ..*self
        }
    }
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Decomposition", 8)?;
        st.serialize_field("kind", self.kind.name())?;
        if let Some(p) = self.kind.p() {
            st.serialize_field("p", &p)?;
        }
        st.serialize_field("total", &self.total)?;
        st.serialize_field("shift_plus", &self.shift_plus)?;
        st.serialize_field("shift_minus", &self.shift_minus)?;
        st.serialize_field("disp_plus", &self.disp_plus)?;
        st.serialize_field("disp_minus", &self.disp_minus)?;
        st.serialize_field("exact_path", &self.exact)?;
        st.end()
    }
}

/// Tolerance below which a component counts as zero.
pub fn zero_tolerance(total: f64) -> f64 {
    f64::max(1e-9, 1e-6 * total)
}

/// True when `component` is zero up to [`zero_tolerance`].
pub fn component_is_zero(component: f64, total: f64) -> bool {
    component <= zero_tolerance(total)
}

/// AVM terms at a single coverage level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaComponents {
    pub alpha: f64,
    pub avm_alpha: f64,
    pub shift_plus: f64,
    pub shift_minus: f64,
    pub disp_plus: f64,
    pub disp_minus: f64,
}

fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Signed power `sign(x) |x|^p`.
pub(crate) fn spow(x: f64, p: u32) -> f64 {
    if p == 1 {
        return x;
    }
    let m = x.abs().powi(p as i32);
    if x < 0.0 {
        -m
    } else {
        m
    }
}

/// AVM terms comparing two central intervals at the same coverage.
///
/// Differences within a few ulps of the endpoint magnitudes are rounding
/// noise and are reported as zero.
pub fn alpha_components_from_intervals(f: &CentralInterval, g: &CentralInterval) -> AlphaComponents {
    let scale = [f.lo, f.hi, g.lo, g.hi].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let snap = |x: f64| if x.abs() <= 4.0 * f64::EPSILON * scale { 0.0 } else { x };
    let lo = snap(f.lo - g.lo);
    let hi = snap(f.hi - g.hi);
    let spread = snap(hi - lo);
    AlphaComponents {
        alpha: f.alpha,
        avm_alpha: lo.abs() + hi.abs(),
        shift_plus: 2.0 * pos(lo.min(hi)),
        shift_minus: 2.0 * pos((-lo).min(-hi)),
        disp_plus: pos(spread),
        disp_minus: pos(-spread),
    }
}

/// AVM terms at coverage `alpha` in `[0, 1)`.
pub fn avm_alpha_components(f: &Distribution, g: &Distribution, alpha: f64) -> Result<AlphaComponents> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("coverage {alpha} outside [0, 1)")));
    }
    let fi = f.central_interval(alpha)?;
    let gi = g.central_interval(alpha)?;
    Ok(alpha_components_from_intervals(&fi, &gi))
}

fn both_exact<'a>(
    f: &'a Distribution,
    g: &'a Distribution,
    cfg: &QuadratureConfig,
) -> Option<(&'a crate::Knots, &'a crate::Knots)> {
    if !cfg.prefer_exact {
        return None;
    }
    Some((f.knots()?, g.knots()?))
}

fn check_p(p: u32) -> Result<()> {
    if p == 0 {
        return Err(Error::Domain("p must be a positive integer".into()));
    }
    if p > 64 {
        return Err(Error::Domain(format!("p = {p} is beyond the supported range 1..=64")));
    }
    Ok(())
}

/// Adds `term` to a running sum, failing on non-finite values or overflow.
pub(crate) fn accumulate(sum: &mut f64, term: f64, level: f64) -> Result<()> {
    if !term.is_finite() {
        return Err(Error::NonFinite {
            level,
            detail: format!("integrand evaluated to {term}"),
        });
    }
    *sum += term;
    if sum.abs() > OVERFLOW_LIMIT {
        return Err(Error::Overflow(format!(
            "partial sum exceeded {OVERFLOW_LIMIT:e} near level {level}"
        )));
    }
    Ok(())
}

pub(crate) fn checked_quantile(d: &Distribution, tau: f64) -> Result<f64> {
    checked_quantile_near(d, tau, None)
}

pub(crate) fn checked_quantile_near(d: &Distribution, tau: f64, hint: Option<f64>) -> Result<f64> {
    let q = d.quantile_near(tau, hint);
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Error::NonFinite {
            level: tau,
            detail: format!("quantile evaluated to {q}"),
        })
    }
}

/// Midpoint rule in `u` under the substitution `alpha = 1 - (1 - u)^2`.
///
/// Nodes crowd towards full coverage, where unbounded quantiles blow up, and
/// the Jacobian `2 (1 - u)` damps the tail singularity.
pub(crate) fn coverage_node(i: usize, n: usize) -> (f64, f64) {
    let v = 1.0 - (i as f64 + 0.5) / n as f64;
    (1.0 - v * v, 2.0 * v / n as f64)
}

/// Quantiles at both ends of the central intervals on the graded coverage
/// grid of [`coverage_node`].
pub(crate) struct FoldedQuantiles {
    pub alpha: Vec<f64>,
    pub weight: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl FoldedQuantiles {
    pub fn new(d: &Distribution, n: usize) -> Result<Self> {
        let mut out = Self {
            alpha: Vec::with_capacity(n),
            weight: Vec::with_capacity(n),
            lo: Vec::with_capacity(n),
            hi: Vec::with_capacity(n),
        };
        for i in 0..n {
            let (a, w) = coverage_node(i, n);
            out.alpha.push(a);
            out.weight.push(w);
            let lo = checked_quantile_near(d, 0.5 * (1.0 - a), out.lo.last().copied())?;
            let hi = checked_quantile_near(d, 0.5 * (1.0 + a), out.hi.last().copied())?;
            out.lo.push(lo);
            out.hi.push(hi);
        }
        Ok(out)
    }
}

/// `[shift_plus, disp_plus]` of WD_p on the coverage grid.
fn quad_plus(f: &FoldedQuantiles, g: &FoldedQuantiles, p: u32) -> Result<[f64; 2]> {
    let (mut shift, mut disp) = (0.0, 0.0);
    for i in 0..f.lo.len() {
        let l = spow(f.lo[i] - g.lo[i], p);
        let u = spow(f.hi[i] - g.hi[i], p);
        let w = f.weight[i];
        accumulate(&mut disp, w * pos(u - l), f.alpha[i])?;
        accumulate(&mut shift, w * pos(l.min(u)), f.alpha[i])?;
    }
    Ok([shift, 0.5 * disp])
}

/// `int_0^1 |F^-1 - G^-1|^p`, folded onto the coverage grid.
fn quad_wd_total(f: &FoldedQuantiles, g: &FoldedQuantiles, p: u32) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..f.lo.len() {
        let lo = (f.lo[i] - g.lo[i]).abs().powi(p as i32);
        let hi = (f.hi[i] - g.hi[i]).abs().powi(p as i32);
        accumulate(&mut sum, 0.5 * f.weight[i] * (lo + hi), f.alpha[i])?;
    }
    Ok(sum)
}

/// `int_0^1 |F^-1 - G^-1|^p dtau`, the p-th power of the p-Wasserstein distance.
pub fn wd_p(f: &Distribution, g: &Distribution, p: u32, cfg: &QuadratureConfig) -> Result<f64> {
    check_p(p)?;
    cfg.validate()?;
    match both_exact(f, g, cfg) {
        Some((fk, gk)) => exact::wd_total(fk, gk, p),
        None => {
            let fq = FoldedQuantiles::new(f, cfg.n_single)?;
            let gq = FoldedQuantiles::new(g, cfg.n_single)?;
            quad_wd_total(&fq, &gq, p)
        }
    }
}

/// Area validation metric, `int_0^1 |F^-1 - G^-1| dtau`.
pub fn avm(f: &Distribution, g: &Distribution, cfg: &QuadratureConfig) -> Result<f64> {
    wd_p(f, g, 1, cfg)
}

/// Four-part decomposition of WD_p built from signed p-th powers of the
/// differences between central-interval endpoints.
pub fn wd_decompose(f: &Distribution, g: &Distribution, p: u32, cfg: &QuadratureConfig) -> Result<Decomposition> {
    check_p(p)?;
    cfg.validate()?;
    let kind = if p == 1 {
        DivergenceKind::Avm
    } else {
        DivergenceKind::Wd(p)
    };
    if let Some((fk, gk)) = both_exact(f, g, cfg) {
        let [sp, dp] = exact::wd_plus(fk, gk, p)?;
        let [sm, dm] = exact::wd_plus(gk, fk, p)?;
        let total = exact::wd_total(fk, gk, p)?;
        return Ok(Decomposition::new(kind, total, [sp, sm, dp, dm], true));
    }
    let fq = FoldedQuantiles::new(f, cfg.n_single)?;
    let gq = FoldedQuantiles::new(g, cfg.n_single)?;
    let [sp, dp] = quad_plus(&fq, &gq, p)?;
    let [sm, dm] = quad_plus(&gq, &fq, p)?;
    let total = quad_wd_total(&fq, &gq, p)?;
    Ok(Decomposition::new(kind, total, [sp, sm, dp, dm], false))
}

/// Four-part decomposition of the area validation metric.
pub fn avm_decompose(f: &Distribution, g: &Distribution, cfg: &QuadratureConfig) -> Result<Decomposition> {
    wd_decompose(f, g, 1, cfg)
}

/// Any of the three divergences by kind.
pub fn decompose(
    kind: DivergenceKind,
    f: &Distribution,
    g: &Distribution,
    cfg: &QuadratureConfig,
) -> Result<Decomposition> {
    match kind {
        DivergenceKind::Avm => avm_decompose(f, g, cfg),
        DivergenceKind::Wd(p) => wd_decompose(f, g, p, cfg),
        DivergenceKind::Cd => cd_decompose(f, g, cfg),
    }
}

/// One row of spread-plot data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadRow {
    pub alpha: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub g_lo: f64,
    pub g_hi: f64,
    pub components: AlphaComponents,
}

/// Central intervals of both laws and the AVM terms at each coverage level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadPlotData {
    pub rows: Vec<SpreadRow>,
}

impl SpreadPlotData {
    pub const HEADER: [&'static str; 9] = [
        "alpha",
        "f_lo",
        "f_hi",
        "g_lo",
        "g_hi",
        "shift_plus",
        "shift_minus",
        "disp_plus",
        "disp_minus",
    ];

    /// Tab-separated table with a header row.
    pub fn to_tsv(&self) -> String {
        let mut out = Self::HEADER.join("\t");
        out.push('\n');
        for r in &self.rows {
            let c = &r.components;
            let cols = [
                r.alpha,
                r.f_lo,
                r.f_hi,
                r.g_lo,
                r.g_hi,
                c.shift_plus,
                c.shift_minus,
                c.disp_plus,
                c.disp_minus,
            ];
            let line: Vec<String> = cols.iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join("\t"));
            out.push('\n');
        }
        out
    }
}

/// Rows at `alpha_i = i / levels`, `i = 0..levels`. The first row sits at
/// the medians; coverage 1 is excluded so unbounded laws stay finite.
pub fn spread_plot_data(f: &Distribution, g: &Distribution, levels: usize) -> Result<SpreadPlotData> {
    if levels < 2 {
        return Err(Error::Domain(format!("need at least 2 levels (got {levels})")));
    }
    let mut rows = Vec::with_capacity(levels);
    for i in 0..levels {
        let alpha = i as f64 / levels as f64;
        let fi = f.central_interval(alpha)?;
        let gi = g.central_interval(alpha)?;
        rows.push(SpreadRow {
            alpha,
            f_lo: fi.lo,
            f_hi: fi.hi,
            g_lo: gi.lo,
            g_hi: gi.hi,
            components: alpha_components_from_intervals(&fi, &gi),
        });
    }
    Ok(SpreadPlotData { rows })
}
