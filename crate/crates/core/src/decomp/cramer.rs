//! Cramér distance: CDF form, quantile form and four-part decomposition.

use super::exact::{alpha_breaks, fit_linear, Lin};
use super::polygon::{clip, integrate, rect, Affine};
use super::{accumulate, checked_quantile, pos, Decomposition, DivergenceKind, FoldedQuantiles, QuadratureConfig};
use crate::error::{Error, Result};
use crate::quantile::{Distribution, Knots};

/// Tail mass cut from unbounded supports in x-space integration.
const HULL_EPS: f64 = 1e-9;
/// Above this many cells the exact decomposition falls back to the grid.
const MAX_EXACT_CELLS: usize = 4_000_000;

/// `int (F - G)^2 dx` for piecewise-linear CDFs, segment by segment.
fn cdf_sq_exact(f: &Knots, g: &Knots) -> Result<f64> {
    let mut xs: Vec<f64> = f.values().iter().chain(g.values()).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut sum = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let d0 = f.cdf(x0) - g.cdf(x0);
        let d1 = f.cdf_left(x1) - g.cdf_left(x1);
        accumulate(&mut sum, (x1 - x0) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0, x0)?;
    }
    Ok(sum)
}

/// `int (F(x) - G(x))^2 dx`.
///
/// Piecewise-linear pairs are integrated exactly. Otherwise the midpoint rule
/// with `n_single` nodes runs over the hull of both supports, unbounded ends
/// cut at the `1e-9` and `1 - 1e-9` quantiles.
pub fn cd_via_cdf(f: &Distribution, g: &Distribution, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.prefer_exact {
        if let (Some(fk), Some(gk)) = (f.knots(), g.knots()) {
            return cdf_sq_exact(fk, gk);
        }
    }
    let lo = f.lower_extent(HULL_EPS).min(g.lower_extent(HULL_EPS));
    let hi = f.upper_extent(HULL_EPS).max(g.upper_extent(HULL_EPS));
    let width = hi - lo;
    if !width.is_finite() {
        return Err(Error::Overflow(format!("integration hull [{lo}, {hi}] is unbounded")));
    }
    if width <= 0.0 {
        return Ok(0.0);
    }
    let n = cfg.n_single;
    let h = width / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let x = lo + (i as f64 + 0.5) * h;
        let d = f.cdf(x) - g.cdf(x);
        accumulate(&mut sum, d * d, x)?;
    }
    let total = sum * h;
    if !total.is_finite() || total > super::OVERFLOW_LIMIT {
        return Err(Error::Overflow("Cramér integral left the representable range".into()));
    }
    Ok(total)
}

/// `2 int int chi(tau, xi) |F^-1(tau) - G^-1(xi)|`, where `chi` flags pairs
/// whose value order contradicts their level order, on an `n_double` square
/// midpoint grid. Exact ties never contribute; diagonal cells count half.
pub fn cd_quantile_rep(f: &Distribution, g: &Distribution, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    let n = cfg.n_double;
    let level = |i: usize| (i as f64 + 0.5) / n as f64;
    let fq = (0..n)
        .map(|i| checked_quantile(f, level(i)))
        .collect::<Result<Vec<_>>>()?;
    let gq = (0..n)
        .map(|j| checked_quantile(g, level(j)))
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for (i, &fv) in fq.iter().enumerate() {
        let mut row = 0.0;
        for (j, &gv) in gq.iter().enumerate() {
            let d = fv - gv;
            row += match i.cmp(&j) {
                std::cmp::Ordering::Less => pos(d),
                std::cmp::Ordering::Greater => pos(-d),
                std::cmp::Ordering::Equal => 0.5 * d.abs(),
            };
        }
        accumulate(&mut total, row, level(i))?;
    }
    Ok(2.0 * total / (n as f64 * n as f64))
}

/// Prefix sums of the weighted folded quantiles, made monotone to absorb
/// bisection noise.
struct Prefix {
    lo: Vec<f64>,
    hi: Vec<f64>,
    width: Vec<f64>,
    w: Vec<f64>,
    w_lo: Vec<f64>,
    w_hi: Vec<f64>,
    alpha: Vec<f64>,
    /// Trapezoid integral of the width from the first node to node `k`.
    trap: Vec<f64>,
}

impl Prefix {
    fn new(q: &FoldedQuantiles) -> Self {
        let n = q.lo.len();
        let mut lo = q.lo.clone();
        let mut hi = q.hi.clone();
        for k in 1..n {
            lo[k] = lo[k].min(lo[k - 1]);
            hi[k] = hi[k].max(hi[k - 1]);
        }
        let width: Vec<f64> = hi.iter().zip(&lo).map(|(h, l)| h - l).collect();
        let cum = |v: &mut Vec<f64>, x: f64| {
            let last = *v.last().expect("starts with zero");
            v.push(last + x);
        };
        let (mut w, mut w_lo, mut w_hi) = (vec![0.0], vec![0.0], vec![0.0]);
        for k in 0..n {
            cum(&mut w, q.weight[k]);
            cum(&mut w_lo, q.weight[k] * lo[k]);
            cum(&mut w_hi, q.weight[k] * hi[k]);
        }
        let mut trap = vec![0.0];
        for k in 1..n {
            let seg = 0.5 * (q.alpha[k] - q.alpha[k - 1]) * (width[k] + width[k - 1]);
            trap.push(trap[k - 1] + seg);
        }
        Self {
            lo,
            hi,
            width,
            w,
            w_lo,
            w_hi,
            alpha: q.alpha.clone(),
            trap,
        }
    }

    /// `int_0^{alpha_j} [width(a) - c]_+ da` with the width interpolated
    /// linearly between nodes and held constant below the first node. The
    /// region is a thin sliver when both widths are close, so the crossing
    /// point is located inside its cell.
    fn width_excess(&self, j: usize, c: f64) -> f64 {
        let k = self.width.partition_point(|&w| w < c);
        if k > j {
            return 0.0;
        }
        let body = (self.trap[j] - self.trap[k]) - c * (self.alpha[j] - self.alpha[k]);
        let head = if k == 0 {
            self.alpha[0] * (self.width[0] - c)
        } else {
            let (w0, w1) = (self.width[k - 1], self.width[k]);
            let r = (c - w0) / (w1 - w0);
            0.5 * (1.0 - r) * (self.alpha[k] - self.alpha[k - 1]) * (w1 - c)
        };
        body + head
    }

    /// `sum_{s <= k < e} w_k (v_k - c)` for `v = lo` or `v = hi`.
    fn excess(&self, upper: bool, s: usize, e: usize, c: f64) -> f64 {
        if e <= s {
            return 0.0;
        }
        let p = if upper { &self.w_hi } else { &self.w_lo };
        (p[e] - p[s]) - c * (self.w[e] - self.w[s])
    }
}

/// `[shift_plus, disp_plus]` on the coverage grid. With
/// `A = F_lo(a) - G_lo(b)`, `B = F_hi(a) - G_hi(b)`, `C = F_lo(a) - G_hi(b)`:
/// `disp_plus = 1/2 int_{a <= b} [B - A]_+` and
/// `shift_plus = 1/2 int ([min(A, B)]_+ + [C]_+)`.
///
/// For fixed `b` every integrand changes sign at most once in `a`, because
/// `F_lo` falls, `F_hi` rises and `B - A` is a difference of widths. Each
/// row is therefore a prefix-sum difference located by binary search. The
/// cap `a <= b` ends the dispersion row exactly at the diagonal node.
fn cd_quad_plus(f: &FoldedQuantiles, g: &FoldedQuantiles) -> Result<[f64; 2]> {
    let n = f.lo.len();
    let (fp, gp) = (Prefix::new(f), Prefix::new(g));
    let (mut shift, mut disp) = (0.0, 0.0);
    for j in 0..n {
        let (gl, gu, gw) = (gp.lo[j], gp.hi[j], gp.width[j]);
        // A <= B from here on
        let k_star = fp.width.partition_point(|&w| w < gw);
        let k_a = fp.lo.partition_point(|&l| l > gl);
        let k_b = fp.hi.partition_point(|&h| h <= gu);
        let k_c = fp.lo.partition_point(|&l| l > gu);
        let srow = fp.excess(false, k_star, k_a, gl) + fp.excess(true, k_b, k_star, gu) + fp.excess(false, 0, k_c, gu);
        let drow = fp.width_excess(j, gw);
        accumulate(&mut shift, g.weight[j] * srow, g.alpha[j])?;
        accumulate(&mut disp, g.weight[j] * drow, g.alpha[j])?;
    }
    Ok([0.5 * shift, 0.5 * disp])
}

/// Lower and upper folded quantiles on each coverage cell.
struct FoldedCells {
    edges: Vec<f64>,
    lo: Vec<Lin>,
    hi: Vec<Lin>,
}

impl FoldedCells {
    fn new(k: &Knots) -> Self {
        let edges = alpha_breaks(k.levels().iter());
        let mut lo = Vec::with_capacity(edges.len());
        let mut hi = Vec::with_capacity(edges.len());
        for w in edges.windows(2) {
            lo.push(fit_linear(w[0], w[1], |a| k.eval_left(0.5 * (1.0 - a))));
            hi.push(fit_linear(w[0], w[1], |a| k.eval_left(0.5 * (1.0 + a))));
        }
        Self { edges, lo, hi }
    }

    fn cells(&self) -> usize {
        self.edges.len() - 1
    }
}

/// Affine `u(alpha) - v(beta)` in cell-local coordinates.
fn diff_affine(u: &Lin, wu: f64, v: &Lin, wv: f64) -> Affine {
    Affine {
        c: u.y0 - v.y0,
        bx: (u.y1 - u.y0) / wu,
        by: -(v.y1 - v.y0) / wv,
    }
}

/// Exact `[shift_plus, disp_plus]` by integrating the affine cell integrands
/// over the polygons where they are active.
fn cd_exact_plus(f: &FoldedCells, g: &FoldedCells) -> Result<[f64; 2]> {
    let (mut shift, mut disp) = (0.0, 0.0);
    for j in 0..g.cells() {
        let (b0, b1) = (g.edges[j], g.edges[j + 1]);
        let wb = b1 - b0;
        let (mut srow, mut drow) = (0.0, 0.0);
        for i in 0..f.cells() {
            let (a0, a1) = (f.edges[i], f.edges[i + 1]);
            let wa = a1 - a0;
            let a = diff_affine(&f.lo[i], wa, &g.lo[j], wb);
            let b = diff_affine(&f.hi[i], wa, &g.hi[j], wb);
            let c = diff_affine(&f.lo[i], wa, &g.hi[j], wb);
            let cell = rect(wa, wb);
            let bma = b.sub(a);

            // min(A, B) is A where B >= A and B elsewhere; when B == A
            // throughout the cell only the first region counts
            let a_active = clip(&clip(&cell, &a), &bma);
            srow += integrate(&a_active, &a);
            if !bma.is_zero() {
                let b_active = clip(&clip(&cell, &b), &bma.neg());
                srow += integrate(&b_active, &b);
            }
            srow += integrate(&clip(&cell, &c), &c);

            if a0 < b1 {
                let below = if a1 > b0 {
                    // keep alpha <= beta
                    clip(
                        &cell,
                        &Affine {
                            c: b0 - a0,
                            bx: -1.0,
                            by: 1.0,
                        },
                    )
                } else {
                    cell
                };
                drow += integrate(&clip(&below, &bma), &bma);
            }
        }
        accumulate(&mut shift, srow, b0)?;
        accumulate(&mut disp, drow, b0)?;
    }
    Ok([0.5 * shift, 0.5 * disp])
}

/// Four-part decomposition of the Cramér distance over pairs of central
/// intervals at coverage levels `alpha` (for `F`) and `beta` (for `G`).
///
/// The total is the CDF-form integral, computed independently of the
/// components.
pub fn cd_decompose(f: &Distribution, g: &Distribution, cfg: &QuadratureConfig) -> Result<Decomposition> {
    cfg.validate()?;
    if cfg.prefer_exact {
        if let (Some(fk), Some(gk)) = (f.knots(), g.knots()) {
            let (fc, gc) = (FoldedCells::new(fk), FoldedCells::new(gk));
            if fc.cells().saturating_mul(gc.cells()) <= MAX_EXACT_CELLS {
                let [sp, dp] = cd_exact_plus(&fc, &gc)?;
                let [sm, dm] = cd_exact_plus(&gc, &fc)?;
                let total = cdf_sq_exact(fk, gk)?;
                return Ok(Decomposition::new(DivergenceKind::Cd, total, [sp, sm, dp, dm], true));
            }
        }
    }
    let fq = FoldedQuantiles::new(f, cfg.n_double)?;
    let gq = FoldedQuantiles::new(g, cfg.n_double)?;
    let [sp, dp] = cd_quad_plus(&fq, &gq)?;
    let [sm, dm] = cd_quad_plus(&gq, &fq)?;
    let total = cd_via_cdf(f, g, cfg)?;
    Ok(Decomposition::new(DivergenceKind::Cd, total, [sp, sm, dp, dm], false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(a: f64, b: f64) -> Distribution {
        Distribution::uniform(a, b).unwrap()
    }

    #[test]
    fn adjacent_uniforms() {
        // (F - G)^2 is x^2 on [0, 1] and (2 - x)^2 on [1, 2]
        let (f, g) = (uniform(0.0, 1.0), uniform(1.0, 2.0));
        let cfg = QuadratureConfig::default();
        assert!((cd_via_cdf(&f, &g, &cfg).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        let q = cd_via_cdf(&f, &g, &cfg.quadrature_only()).unwrap();
        assert!((q - 2.0 / 3.0).abs() < 1e-6);
        let r = cd_quantile_rep(&f, &g, &cfg).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn identical_laws_have_zero_distance() {
        let f = Distribution::normal(0.0, 1.0).unwrap();
        let cfg = QuadratureConfig::default();
        assert_eq!(cd_via_cdf(&f, &f, &cfg).unwrap(), 0.0);
        assert_eq!(cd_quantile_rep(&f, &f, &cfg).unwrap(), 0.0);
        let d = cd_decompose(&f, &f, &cfg).unwrap();
        assert_eq!(d.sum(), 0.0);
    }

    #[test]
    fn exact_and_grid_decompositions_agree() {
        let f = Distribution::mixture(vec![(0.3, uniform(-1.0, 0.5)), (0.7, uniform(0.0, 3.0))]).unwrap();
        let g = uniform(-0.5, 2.0);
        let cfg = QuadratureConfig::default();
        let e = cd_decompose(&f, &g, &cfg).unwrap();
        let q = cd_decompose(&f, &g, &cfg.quadrature_only()).unwrap();
        assert!(e.exact && !q.exact);
        assert!(e.residual() < 1e-12, "residual {}", e.residual());
        for (x, y) in e.components().iter().zip(q.components()) {
            assert!((x - y).abs() < 2e-3 * e.total, "{e:?} vs {q:?}");
        }
    }
}
