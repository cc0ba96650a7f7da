//! Distributions on the real line, represented through their generalized
//! (left-continuous) quantile functions.
//!
//! Every variant can evaluate `quantile(tau) = inf{x : tau <= F(x)}` and the
//! CDF. Variants whose CDF is piecewise linear (uniforms, histograms, step and
//! piecewise-linear quantiles, and mixtures built only from those) also carry
//! an exact [`Knots`] polyline, which the divergence code integrates in closed
//! form.

use crate::error::{Error, Result};
use crate::special;

/// Mixture quantiles are bracketed by the component quantiles at these levels.
const BRACKET_LEVEL: f64 = 1e-15;
/// Absolute tolerance on `x` for CDF bisection.
const BISECTION_TOL: f64 = 1e-12;

/// A monotone polyline through `(level, value)` knots.
///
/// The quantile function is the linear interpolation of the knots. Two knots
/// sharing a level form a jump of the quantile (a gap in the support); two
/// knots sharing a value form a flat piece (an atom). Read the other way round
/// the same polyline is the graph of the CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct Knots {
    levels: Vec<f64>,
    values: Vec<f64>,
}

impl Knots {
    /// Builds a polyline from `(level, value)` pairs.
    ///
    /// Levels must run from exactly 0 to exactly 1, both sequences must be
    /// nondecreasing and finite. Repeated identical knots are dropped.
    pub fn new(levels: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if levels.len() != values.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} levels but {} values",
                levels.len(),
                values.len()
            )));
        }
        if levels.len() < 2 {
            return Err(Error::InvalidDistribution(
                "a quantile polyline needs at least two knots".into(),
            ));
        }
        if levels[0] != 0.0 || levels[levels.len() - 1] != 1.0 {
            return Err(Error::InvalidDistribution(
                "knot levels must start at 0 and end at 1".into(),
            ));
        }
        if levels.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDistribution("knots must be finite".into()));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidDistribution("levels must be nondecreasing".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidDistribution("values must be nondecreasing".into()));
        }
        let mut out_l = Vec::with_capacity(levels.len());
        let mut out_v = Vec::with_capacity(values.len());
        for (l, v) in levels.into_iter().zip(values) {
            if out_l.last() == Some(&l) && out_v.last() == Some(&v) {
                continue;
            }
            out_l.push(l);
            out_v.push(v);
        }
        if out_l.len() < 2 {
            // a single knot cannot happen: levels 0 and 1 always differ
            unreachable!("knot deduplication collapsed distinct levels");
        }
        Ok(Self {
            levels: out_l,
            values: out_v,
        })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn lerp(&self, k: usize, tau: f64) -> f64 {
        let (l0, l1) = (self.levels[k], self.levels[k + 1]);
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        if tau >= l1 {
            return v1;
        }
        if tau <= l0 {
            return v0;
        }
        let t = (tau - l0) / (l1 - l0);
        v0 + (v1 - v0) * t
    }

    /// Left-continuous evaluation, i.e. the quantile itself, for `tau` in `(0, 1]`.
    pub fn eval_left(&self, tau: f64) -> f64 {
        let k = self.levels.partition_point(|&l| l < tau);
        if k == 0 {
            return self.values[0];
        }
        if k >= self.levels.len() {
            return self.values[self.values.len() - 1];
        }
        self.lerp(k - 1, tau)
    }

    /// Right limit `Q(tau+)` for `tau` in `[0, 1)`.
    pub fn eval_right(&self, tau: f64) -> f64 {
        let k = self.levels.partition_point(|&l| l <= tau);
        if k == 0 {
            return self.values[0];
        }
        if k >= self.levels.len() {
            return self.values[self.values.len() - 1];
        }
        self.lerp(k - 1, tau)
    }

    /// Right-continuous CDF `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 {
            return 0.0;
        }
        if k >= self.values.len() {
            return 1.0;
        }
        self.cdf_on(k - 1, x)
    }

    /// Left limit of the CDF, `P(X < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v < x);
        if k == 0 {
            return 0.0;
        }
        if k >= self.values.len() {
            return 1.0;
        }
        self.cdf_on(k - 1, x)
    }

    /// Slope of the CDF at `x`, zero on flat pieces and outside the support.
    fn density(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        if k == 0 || k >= self.values.len() {
            return 0.0;
        }
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        (self.levels[k] - self.levels[k - 1]) / (v1 - v0)
    }

    fn cdf_on(&self, k: usize, x: f64) -> f64 {
        let (v0, v1) = (self.values[k], self.values[k + 1]);
        let (l0, l1) = (self.levels[k], self.levels[k + 1]);
        if x >= v1 {
            return l1;
        }
        if x <= v0 || l1 == l0 {
            return l0;
        }
        l0 + (l1 - l0) * ((x - v0) / (v1 - v0))
    }

    /// True if the quantile function jumps somewhere in `(0, 1)`.
    pub fn has_interior_jump(&self) -> bool {
        (0..self.levels.len() - 1).any(|k| {
            self.levels[k] == self.levels[k + 1]
                && self.values[k] < self.values[k + 1]
                && self.levels[k] > 0.0
                && self.levels[k] < 1.0
        })
    }

    fn affine(&self, scale: f64, loc: f64) -> Knots {
        Knots {
            levels: self.levels.clone(),
            values: self.values.iter().map(|v| scale * v + loc).collect(),
        }
    }

    /// Quantile polyline of the mixture `sum_i w_i F_i`, obtained by summing
    /// the component CDFs at every breakpoint and reading the result back as
    /// a quantile polyline.
    fn mixture(parts: &[(f64, &Knots)]) -> Result<Knots> {
        let mut xs: Vec<f64> = parts.iter().flat_map(|(_, k)| k.values.iter().copied()).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut levels = Vec::with_capacity(2 * xs.len());
        let mut values = Vec::with_capacity(2 * xs.len());
        let mut last = 0.0_f64;
        for &x in &xs {
            let lo: f64 = parts.iter().map(|(w, k)| w * k.cdf_left(x)).sum();
            let hi: f64 = parts.iter().map(|(w, k)| w * k.cdf(x)).sum();
            let lo = lo.clamp(last, 1.0);
            let hi = hi.clamp(lo, 1.0);
            levels.push(lo);
            values.push(x);
            if hi > lo {
                levels.push(hi);
                values.push(x);
            }
            last = hi;
        }
        levels[0] = 0.0;
        let n = levels.len();
        levels[n - 1] = 1.0;
        for l in levels.iter_mut().take(n - 1) {
            if *l > 1.0 {
                *l = 1.0;
            }
        }
        Knots::new(levels, values)
    }
}

/// Interpolation rule for [`PiecewiseQuantile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Linear between knots; levels run from 0 to 1.
    #[default]
    Linear,
    /// `Q(tau) = values[k]` for `tau` in `(levels[k-1], levels[k]]`; the last
    /// level is 1.
    Step,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normal {
    mu: f64,
    sigma: f64,
}

impl Normal {
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Uniform {
    a: f64,
    b: f64,
    knots: Knots,
}

impl Uniform {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    components: Vec<(f64, Distribution)>,
    knots: Option<Knots>,
}

impl Mixture {
    pub fn components(&self) -> &[(f64, Distribution)] {
        &self.components
    }

    fn cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, d)| w * d.cdf(x)).sum()
    }

    fn bracket(&self) -> (f64, f64) {
        let lo = self
            .components
            .iter()
            .map(|(_, d)| d.lower_bracket())
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .components
            .iter()
            .map(|(_, d)| d.upper_bracket())
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    fn density(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, d)| w * d.density(x)).sum()
    }

    /// `inf{x : tau <= F(x)}` on the mixture CDF by Newton steps kept inside
    /// a shrinking bracket, bisecting when a step leaves it or stalls.
    fn quantile_by_search(&self, tau: f64) -> f64 {
        self.quantile_from(tau, None)
    }

    /// As [`Self::quantile_by_search`], starting the iteration at `start`
    /// when it falls inside the bracket.
    fn quantile_from(&self, tau: f64, start: Option<f64>) -> f64 {
        // the mixture quantile lies between the component quantiles
        let (mut lo, mut hi) = self
            .components
            .iter()
            .map(|(_, d)| d.quantile_unchecked(tau))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| (a.min(q), b.max(q)));
        if self.cdf(lo) >= tau {
            return lo;
        }
        // invariant: F(lo) < tau <= F(hi)
        let mut x = match start {
            Some(s) if s > lo && s < hi => s,
            _ => 0.5 * (lo + hi),
        };
        let mut dx_old = hi - lo;
        let mut dx = dx_old;
        for _ in 0..400 {
            let cx = self.cdf(x);
            if cx >= tau {
                hi = x;
            } else {
                lo = x;
            }
            if hi - lo <= BISECTION_TOL {
                break;
            }
            // Newton on the log of the nearer tail, close to linear far out
            let d = self.density(x);
            let step = if tau < 0.5 {
                (cx.ln() - tau.ln()) * cx / d
            } else {
                let sx = 1.0 - cx;
                ((1.0 - tau).ln() - sx.ln()) * sx / d
            };
            let newton = x - step;
            let slow = (2.0 * step).abs() > dx_old.abs();
            dx_old = dx;
            if d > 0.0 && newton > lo && newton <= hi && !slow {
                dx = newton - x;
                x = newton;
            } else {
                dx = 0.5 * (hi - lo);
                x = lo + dx;
            }
            if dx.abs() < 0.5 * BISECTION_TOL {
                return self.pin_quantile(tau, x, lo, hi);
            }
            if x <= lo || x >= hi {
                break;
            }
        }
        hi
    }

    /// Refines a converged estimate `x` inside `(lo, hi)` to the generalized
    /// inverse: gallop outward from `x` until the bracket closes, then bisect.
    fn pin_quantile(&self, tau: f64, x: f64, mut lo: f64, mut hi: f64) -> f64 {
        let mut h = BISECTION_TOL;
        if self.cdf(x) >= tau {
            hi = x;
            while hi - h > lo {
                if self.cdf(hi - h) >= tau {
                    hi -= h;
                    h *= 2.0;
                } else {
                    lo = hi - h;
                    break;
                }
            }
        } else {
            lo = x;
            while lo + h < hi {
                if self.cdf(lo + h) < tau {
                    lo += h;
                    h *= 2.0;
                } else {
                    hi = lo + h;
                    break;
                }
            }
        }
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= tau {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// `inf{x : F(x) > 0.5}`, the upper end of the median interval.
    fn upper_median(&self, lower: f64) -> f64 {
        if self.cdf(lower) > 0.5 {
            return lower;
        }
        let (_, mut hi) = self.bracket();
        let mut lo = lower;
        for _ in 0..400 {
            if hi - lo <= BISECTION_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) > 0.5 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseQuantile {
    levels: Vec<f64>,
    values: Vec<f64>,
    mode: Interpolation,
    knots: Knots,
}

impl PiecewiseQuantile {
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode(&self) -> Interpolation {
        self.mode
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Empirical {
    samples: Vec<f64>,
    knots: Knots,
}

impl Empirical {
    /// Sorted samples.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<f64>,
    probs: Vec<f64>,
    knots: Knots,
}

impl Histogram {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// A probability law on the real line.
///
/// Values are immutable after construction; all methods are pure.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Normal(Normal),
    Uniform(Uniform),
    Mixture(Mixture),
    PiecewiseQuantile(PiecewiseQuantile),
    Empirical(Empirical),
    Histogram(Histogram),
}

/// Central interval at coverage `alpha`: the `(1 - alpha)/2` and
/// `(1 + alpha)/2` quantiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralInterval {
    pub alpha: f64,
    pub lo: f64,
    pub hi: f64,
}

impl CentralInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn check_weights_sum(sum: f64, what: &str) -> Result<()> {
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("{what} must sum to 1 (got {sum})")));
    }
    Ok(())
}

impl Distribution {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "normal needs finite mu and sigma > 0 (got mu={mu}, sigma={sigma})"
            )));
        }
        Ok(Distribution::Normal(Normal { mu, sigma }))
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidDistribution(format!(
                "uniform needs finite a < b (got a={a}, b={b})"
            )));
        }
        let knots = Knots::new(vec![0.0, 1.0], vec![a, b])?;
        Ok(Distribution::Uniform(Uniform { a, b, knots }))
    }

    /// Weighted mixture. Weights must lie in `(0, 1]` and sum to 1.
    pub fn mixture(components: Vec<(f64, Distribution)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDistribution("mixture has no components".into()));
        }
        for (w, _) in &components {
            if !(w.is_finite() && *w > 0.0 && *w <= 1.0) {
                return Err(Error::InvalidDistribution(format!("mixture weight {w} outside (0, 1]")));
            }
        }
        check_weights_sum(components.iter().map(|(w, _)| w).sum(), "mixture weights")?;
        let exact: Option<Vec<(f64, &Knots)>> = components.iter().map(|(w, d)| d.knots().map(|k| (*w, k))).collect();
        let knots = match exact {
            Some(parts) => Some(Knots::mixture(&parts)?),
            None => None,
        };
        Ok(Distribution::Mixture(Mixture { components, knots }))
    }

    /// Quantile function given by knots; see [`Interpolation`] for the two modes.
    pub fn piecewise_quantile(levels: Vec<f64>, values: Vec<f64>, mode: Interpolation) -> Result<Self> {
        let knots = match mode {
            Interpolation::Linear => Knots::new(levels.clone(), values.clone())?,
            Interpolation::Step => {
                if levels.is_empty() || levels.len() != values.len() {
                    return Err(Error::InvalidDistribution(
                        "step quantile needs matching, nonempty levels and values".into(),
                    ));
                }
                if levels[0] <= 0.0 || levels.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidDistribution(
                        "step levels must be strictly increasing in (0, 1]".into(),
                    ));
                }
                if levels[levels.len() - 1] != 1.0 {
                    return Err(Error::InvalidDistribution("last step level must be 1".into()));
                }
                let mut kl = Vec::with_capacity(2 * levels.len());
                let mut kv = Vec::with_capacity(2 * levels.len());
                let mut prev = 0.0;
                for (&l, &v) in levels.iter().zip(&values) {
                    kl.push(prev);
                    kv.push(v);
                    kl.push(l);
                    kv.push(v);
                    prev = l;
                }
                Knots::new(kl, kv)?
            }
        };
        Ok(Distribution::PiecewiseQuantile(PiecewiseQuantile {
            levels,
            values,
            mode,
            knots,
        }))
    }

    /// Empirical distribution of `samples` (mass `1/n` each, ties allowed).
    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDistribution("no samples".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidDistribution("samples must be finite".into()));
        }
        samples.sort_by(f64::total_cmp);
        let n = samples.len() as f64;
        let mut kl = Vec::with_capacity(2 * samples.len());
        let mut kv = Vec::with_capacity(2 * samples.len());
        for (i, &s) in samples.iter().enumerate() {
            kl.push(i as f64 / n);
            kv.push(s);
            kl.push(if i + 1 == samples.len() {
                1.0
            } else {
                (i + 1) as f64 / n
            });
            kv.push(s);
        }
        let knots = Knots::new(kl, kv)?;
        Ok(Distribution::Empirical(Empirical { samples, knots }))
    }

    /// Histogram with mass spread uniformly inside each bin. Zero-width bins
    /// (equal consecutive edges) are atoms.
    pub fn histogram(edges: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || probs.len() + 1 != edges.len() {
            return Err(Error::InvalidDistribution(format!(
                "histogram needs n+1 edges for n probabilities (got {} edges, {} probs)",
                edges.len(),
                probs.len()
            )));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidDistribution("histogram edges must be finite".into()));
        }
        if edges.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidDistribution("histogram edges must be sorted".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "histogram probabilities must be nonnegative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        check_weights_sum(total, "probabilities")?;
        let mut kl = Vec::with_capacity(edges.len());
        let mut acc = 0.0;
        kl.push(0.0);
        for p in &probs {
            acc += p;
            kl.push((acc / total).min(1.0));
        }
        let n = kl.len();
        kl[n - 1] = 1.0;
        let knots = Knots::new(kl, edges.clone())?;
        Ok(Distribution::Histogram(Histogram { edges, probs, knots }))
    }

    /// Dirac measure at `x`.
    pub fn point_mass(x: f64) -> Result<Self> {
        Self::piecewise_quantile(vec![0.0, 1.0], vec![x, x], Interpolation::Linear)
    }

    /// Exact quantile polyline, when the CDF is piecewise linear.
    pub fn knots(&self) -> Option<&Knots> {
        match self {
            Distribution::Normal(_) => None,
            Distribution::Uniform(u) => Some(&u.knots),
            Distribution::Mixture(m) => m.knots.as_ref(),
            Distribution::PiecewiseQuantile(p) => Some(&p.knots),
            Distribution::Empirical(e) => Some(&e.knots),
            Distribution::Histogram(h) => Some(&h.knots),
        }
    }

    /// Generalized quantile `inf{x : tau <= F(x)}` for `tau` in `(0, 1)`.
    pub fn quantile(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::Domain(format!("quantile level {tau} outside (0, 1)")));
        }
        Ok(self.quantile_unchecked(tau))
    }

    pub(crate) fn quantile_unchecked(&self, tau: f64) -> f64 {
        match self {
            Distribution::Normal(n) => n.mu + n.sigma * special::inv_cdf(tau),
            Distribution::Mixture(m) => match &m.knots {
                Some(k) => k.eval_left(tau),
                None => m.quantile_by_search(tau),
            },
            other => other.knots().expect("piecewise variants carry knots").eval_left(tau),
        }
    }

    /// Quantile with a nearby starting point for iterative variants, such
    /// as the result at the previous node of a grid.
    pub(crate) fn quantile_near(&self, tau: f64, hint: Option<f64>) -> f64 {
        match self {
            Distribution::Mixture(m) if m.knots.is_none() => m.quantile_from(tau, hint),
            other => other.quantile_unchecked(tau),
        }
    }

    /// Right-continuous CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Normal(n) => special::cdf((x - n.mu) / n.sigma),
            Distribution::Mixture(m) => match &m.knots {
                Some(k) => k.cdf(x),
                None => m.cdf(x).clamp(0.0, 1.0),
            },
            other => other.knots().expect("piecewise variants carry knots").cdf(x),
        }
    }

    /// Density of the absolutely continuous part, zero at atoms.
    pub(crate) fn density(&self, x: f64) -> f64 {
        match self {
            Distribution::Normal(n) => special::phi((x - n.mu) / n.sigma) / n.sigma,
            Distribution::Mixture(m) if m.knots.is_none() => m.density(x),
            other => other.knots().expect("piecewise variants carry knots").density(x),
        }
    }

    /// Closed hull of the support; infinite ends for unbounded laws.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Normal(_) => (f64::NEG_INFINITY, f64::INFINITY),
            Distribution::Mixture(m) if m.knots.is_none() => {
                let lo = m
                    .components
                    .iter()
                    .map(|(_, d)| d.support().0)
                    .fold(f64::INFINITY, f64::min);
                let hi = m
                    .components
                    .iter()
                    .map(|(_, d)| d.support().1)
                    .fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            other => {
                let k = other.knots().expect("piecewise variants carry knots");
                (k.values[0], k.values[k.values.len() - 1])
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        let (lo, hi) = self.support();
        lo.is_finite() && hi.is_finite()
    }

    fn lower_bracket(&self) -> f64 {
        match self {
            Distribution::Normal(n) => n.mu + n.sigma * special::inv_cdf(BRACKET_LEVEL),
            Distribution::Mixture(m) if m.knots.is_none() => m.bracket().0,
            _ => self.support().0,
        }
    }

    fn upper_bracket(&self) -> f64 {
        match self {
            Distribution::Normal(n) => n.mu - n.sigma * special::inv_cdf(BRACKET_LEVEL),
            Distribution::Mixture(m) if m.knots.is_none() => m.bracket().1,
            _ => self.support().1,
        }
    }

    /// Lower end of the range used when integrating in `x`: the support end
    /// when finite, else the `eps`-quantile.
    pub(crate) fn lower_extent(&self, eps: f64) -> f64 {
        let lo = self.support().0;
        if lo.is_finite() {
            lo
        } else {
            self.quantile_unchecked(eps)
        }
    }

    pub(crate) fn upper_extent(&self, eps: f64) -> f64 {
        let hi = self.support().1;
        if hi.is_finite() {
            hi
        } else {
            self.quantile_unchecked(1.0 - eps)
        }
    }

    /// Central interval at coverage `alpha` in `[0, 1)`; `alpha = 1` is
    /// accepted for bounded supports and returns the support hull.
    pub fn central_interval(&self, alpha: f64) -> Result<CentralInterval> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("coverage {alpha} outside [0, 1]")));
        }
        if alpha == 1.0 {
            if !self.is_bounded() {
                return Err(Error::Domain("coverage 1 requires a bounded support".into()));
            }
            let (lo, hi) = self.support();
            return Ok(CentralInterval { alpha, lo, hi });
        }
        let lo = self.quantile_unchecked(0.5 * (1.0 - alpha));
        let hi = self.quantile_unchecked(0.5 * (1.0 + alpha));
        Ok(CentralInterval { alpha, lo, hi })
    }

    /// Midpoint of the median interval `[Q(0.5), Q(0.5+)]`.
    pub fn central_median(&self) -> f64 {
        match self {
            Distribution::Normal(n) => n.mu,
            Distribution::Uniform(u) => 0.5 * (u.a + u.b),
            Distribution::Mixture(m) if m.knots.is_none() => {
                let lo = m.quantile_by_search(0.5);
                let hi = m.upper_median(lo);
                0.5 * (lo + hi)
            }
            other => {
                let k = other.knots().expect("piecewise variants carry knots");
                0.5 * (k.eval_left(0.5) + k.eval_right(0.5))
            }
        }
    }

    /// Checks `|Q(g) + Q(1 - g) - 2m| <= tol` on a midpoint grid of `grid_n`
    /// levels, `m` the central median. Normal and uniform laws are symmetric
    /// by construction.
    pub fn is_symmetric(&self, grid_n: usize, tol: f64) -> bool {
        match self {
            Distribution::Normal(_) | Distribution::Uniform(_) => true,
            _ => {
                let n = grid_n.max(2);
                let m2 = 2.0 * self.central_median();
                (0..n).all(|i| {
                    let g = (i as f64 + 0.5) / n as f64;
                    let s = self.quantile_unchecked(g) + self.quantile_unchecked(1.0 - g);
                    (s - m2).abs() <= tol
                })
            }
        }
    }

    /// Interquartile range.
    pub fn iqr(&self) -> f64 {
        self.quantile_unchecked(0.75) - self.quantile_unchecked(0.25)
    }

    /// True when the quantile function is known to jump inside `(0, 1)`.
    pub fn has_quantile_jump(&self) -> bool {
        self.knots().is_some_and(Knots::has_interior_jump)
    }

    /// The law of `scale * X + loc`, `scale > 0`.
    pub fn affine(&self, scale: f64, loc: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0 && loc.is_finite()) {
            return Err(Error::Domain(format!(
                "affine map needs scale > 0 and finite loc (got {scale}, {loc})"
            )));
        }
        let map = |v: &[f64]| v.iter().map(|x| scale * x + loc).collect::<Vec<_>>();
        Ok(match self {
            Distribution::Normal(n) => Distribution::normal(scale * n.mu + loc, scale * n.sigma)?,
            Distribution::Uniform(u) => Distribution::uniform(scale * u.a + loc, scale * u.b + loc)?,
            Distribution::Mixture(m) => {
                let components = m
                    .components
                    .iter()
                    .map(|(w, d)| Ok((*w, d.affine(scale, loc)?)))
                    .collect::<Result<Vec<_>>>()?;
                let knots = m.knots.as_ref().map(|k| k.affine(scale, loc));
                Distribution::Mixture(Mixture { components, knots })
            }
            Distribution::PiecewiseQuantile(p) => Distribution::PiecewiseQuantile(PiecewiseQuantile {
                levels: p.levels.clone(),
                values: map(&p.values),
                mode: p.mode,
                knots: p.knots.affine(scale, loc),
            }),
            Distribution::Empirical(e) => Distribution::Empirical(Empirical {
                samples: map(&e.samples),
                knots: e.knots.affine(scale, loc),
            }),
            Distribution::Histogram(h) => Distribution::Histogram(Histogram {
                edges: map(&h.edges),
                probs: h.probs.clone(),
                knots: h.knots.affine(scale, loc),
            }),
        })
    }

    /// The law of `X + s`.
    pub fn shifted(&self, s: f64) -> Result<Self> {
        self.affine(1.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex1b_f() -> Distribution {
        Distribution::mixture(vec![
            (0.5, Distribution::uniform(0.0, 4.0).unwrap()),
            (0.5, Distribution::uniform(4.0, 6.0).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn standard_normal_median_is_zero() {
        let d = Distribution::normal(0.0, 1.0).unwrap();
        assert_eq!(d.quantile(0.5).unwrap(), 0.0);
    }

    #[test]
    fn uniform_quarter_quantile() {
        let d = Distribution::uniform(-1.6, 1.6).unwrap();
        assert!((d.quantile(0.25).unwrap() + 0.8).abs() < 1e-15);
    }

    #[test]
    fn mixture_quantile_by_cdf_inversion() {
        // F(5) = 0.5 + 0.5 * (5 - 4) / 2 = 0.75
        let d = ex1b_f();
        assert!((d.quantile(0.75).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_rejects_levels_outside_open_unit_interval() {
        let d = Distribution::normal(0.0, 1.0).unwrap();
        for tau in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(d.quantile(tau), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn central_intervals() {
        let n = Distribution::normal(0.0, 1.0).unwrap();
        let ci = n.central_interval(0.0).unwrap();
        assert_eq!((ci.lo, ci.hi), (0.0, 0.0));

        let u = Distribution::uniform(-1.6, 1.6).unwrap();
        let ci = u.central_interval(0.5).unwrap();
        assert!((ci.lo + 0.8).abs() < 1e-15 && (ci.hi - 0.8).abs() < 1e-15);

        // z_0.75 from the standard normal table
        let z75 = 0.674_489_750_196_081_7;
        let n12 = Distribution::normal(1.0, 2.0).unwrap();
        let ci = n12.central_interval(0.5).unwrap();
        assert!((ci.lo - (1.0 - 2.0 * z75)).abs() < 1e-12);
        assert!((ci.hi - (1.0 + 2.0 * z75)).abs() < 1e-12);

        assert!(n.central_interval(1.0).is_err());
        let full = u.central_interval(1.0).unwrap();
        assert_eq!((full.lo, full.hi), (-1.6, 1.6));
    }

    #[test]
    fn central_medians() {
        assert_eq!(Distribution::normal(3.0, 1.0).unwrap().central_median(), 3.0);
        assert_eq!(Distribution::empirical(vec![2.0, 1.0]).unwrap().central_median(), 1.5);
        assert_eq!(Distribution::uniform(0.0, 2.0).unwrap().central_median(), 1.0);
        // flat CDF between 1 and 3 at level 0.5
        let gap = Distribution::mixture(vec![
            (0.5, Distribution::uniform(0.0, 1.0).unwrap()),
            (0.5, Distribution::uniform(3.0, 4.0).unwrap()),
        ])
        .unwrap();
        assert!((gap.central_median() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn symmetry_detection() {
        assert!(Distribution::normal(1.0, 2.0).unwrap().is_symmetric(100, 1e-9));
        assert!(Distribution::uniform(-1.6, 1.6).unwrap().is_symmetric(100, 1e-9));
        assert!(!ex1b_f().is_symmetric(100, 1e-9));
        let sym = Distribution::mixture(vec![
            (0.25, Distribution::uniform(-3.0, -1.0).unwrap()),
            (0.5, Distribution::uniform(-1.0, 1.0).unwrap()),
            (0.25, Distribution::uniform(1.0, 3.0).unwrap()),
        ])
        .unwrap();
        assert!(sym.is_symmetric(257, 1e-12));
    }

    #[test]
    fn step_quantile_is_left_continuous() {
        let d = Distribution::empirical(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(d.quantile(0.25).unwrap(), 1.0);
        assert_eq!(d.quantile(0.25 + 1e-12).unwrap(), 2.0);
        assert_eq!(d.quantile(0.75).unwrap(), 2.0);
        assert_eq!(d.quantile(0.76).unwrap(), 3.0);
        assert_eq!(d.cdf(2.0), 0.75);
        assert_eq!(d.cdf(1.999), 0.25);
    }

    #[test]
    fn knots_cdf_left_and_right() {
        let k = Knots::new(vec![0.0, 0.25, 0.25, 1.0], vec![-1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(k.cdf(-1.0), 0.25);
        assert_eq!(k.cdf_left(-1.0), 0.0);
        assert_eq!(k.cdf(0.0), 1.0);
        assert_eq!(k.cdf_left(0.0), 0.25);
        assert_eq!(k.eval_left(0.25), -1.0);
        assert_eq!(k.eval_right(0.25), 0.0);
    }

    #[test]
    fn histogram_knots_reproduce_edges() {
        let d = Distribution::histogram(vec![0.0, 1.0, 3.0, 4.0], vec![0.2, 0.5, 0.3]).unwrap();
        let k = d.knots().unwrap();
        assert_eq!(k.values(), &[0.0, 1.0, 3.0, 4.0]);
        assert_eq!(d.quantile(0.2).unwrap(), 1.0);
        assert!((d.quantile(0.7).unwrap() - 3.0).abs() < 1e-15);
        assert!(Distribution::histogram(vec![0.0, 1.0], vec![0.9]).is_err());
    }

    #[test]
    fn mixture_with_normal_uses_bisection() {
        let d = Distribution::mixture(vec![
            (0.3, Distribution::normal(-2.0, 1.0).unwrap()),
            (0.7, Distribution::uniform(0.0, 1.0).unwrap()),
        ])
        .unwrap();
        assert!(d.knots().is_none());
        for tau in [1e-6, 0.1, 0.3, 0.5, 0.9, 1.0 - 1e-9] {
            let x = d.quantile(tau).unwrap();
            assert!(d.cdf(x) >= tau - 1e-15);
            assert!(d.cdf(x - 1e-9) < tau);
        }
    }

    #[test]
    fn affine_maps_quantiles() {
        let d = ex1b_f().affine(2.0, -1.0).unwrap();
        assert!((d.quantile(0.75).unwrap() - 9.0).abs() < 1e-12);
        assert!(ex1b_f().affine(0.0, 1.0).is_err());
    }

    #[test]
    fn interior_jumps_are_detected() {
        let gap = Distribution::mixture(vec![
            (0.25, Distribution::uniform(-3.0, -2.0).unwrap()),
            (0.75, Distribution::uniform(-1.0, 2.0).unwrap()),
        ])
        .unwrap();
        assert!(gap.has_quantile_jump());
        assert!(!ex1b_f().has_quantile_jump());
        assert!(!Distribution::point_mass(1.0).unwrap().has_quantile_jump());
    }
}
