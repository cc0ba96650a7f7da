//! Closed-form level-space integrals for piecewise-linear quantile functions.
//!
//! Between consecutive breakpoints every quantile difference is linear, so
//! `|d|^p` and signed powers integrate exactly once the interval is split at
//! the roots of the linear pieces.

use super::accumulate;
use crate::error::Result;
use crate::quantile::Knots;

/// A linear function on a segment, stored by its endpoint values.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Lin {
    pub y0: f64,
    pub y1: f64,
}

impl Lin {
    /// Value at fraction `s` of the segment.
    pub fn at(&self, s: f64) -> f64 {
        self.y0 + (self.y1 - self.y0) * s
    }

    /// Root strictly inside `(0, 1)`, if the sign changes.
    pub fn root(&self) -> Option<f64> {
        if (self.y0 < 0.0 && self.y1 > 0.0) || (self.y0 > 0.0 && self.y1 < 0.0) {
            Some(self.y0 / (self.y0 - self.y1))
        } else {
            None
        }
    }

    fn sub(self, o: Lin) -> Lin {
        Lin {
            y0: self.y0 - o.y0,
            y1: self.y1 - o.y1,
        }
    }
}

/// Builds the linear function on `[x0, x1]` from samples at the interior
/// quarter points. Sampling inside the segment keeps jumps at the endpoints
/// from leaking into the fit.
pub(crate) fn fit_linear(x0: f64, x1: f64, h: impl Fn(f64) -> f64) -> Lin {
    let w = x1 - x0;
    let a = h(x0 + 0.25 * w);
    let b = h(x0 + 0.75 * w);
    let half = 0.5 * (b - a);
    Lin {
        y0: a - half,
        y1: b + half,
    }
}

/// `int_0^len |y|^p` for a linear `y` that does not change sign.
fn int_abs_pow(len: f64, y0: f64, y1: f64, p: u32) -> f64 {
    let (a, b) = (y0.abs(), y1.abs());
    if p == 1 {
        return 0.5 * len * (a + b);
    }
    // sum_k a^k b^(p-k), accumulated with integer powers
    let mut s = 0.0;
    let mut ak = 1.0;
    for k in 0..=p {
        s += ak * b.powi((p - k) as i32);
        if k < p {
            ak *= a;
        }
    }
    len * s / (p as f64 + 1.0)
}

/// `int_0^len sign(y)|y|^p` for a linear `y` that does not change sign.
fn int_spow(len: f64, y: Lin, p: u32) -> f64 {
    let v = int_abs_pow(len, y.y0, y.y1, p);
    if y.y0 + y.y1 < 0.0 {
        -v
    } else {
        v
    }
}

/// `int |y|^p` over a segment of length `len`, split at the root.
fn int_abs_pow_split(len: f64, y: Lin, p: u32) -> f64 {
    match y.root() {
        Some(r) => int_abs_pow(len * r, y.y0, 0.0, p) + int_abs_pow(len * (1.0 - r), 0.0, y.y1, p),
        None => int_abs_pow(len, y.y0, y.y1, p),
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Union of the knot levels of both polylines.
pub(crate) fn level_breaks(f: &Knots, g: &Knots) -> Vec<f64> {
    sorted_unique(f.levels().iter().chain(g.levels()).copied().collect())
}

/// Coverage levels `|2l - 1|` of the given knot levels, plus 0 and 1.
pub(crate) fn alpha_breaks<'a>(levels: impl Iterator<Item = &'a f64>) -> Vec<f64> {
    let mut v: Vec<f64> = levels.map(|l| (2.0 * l - 1.0).abs().min(1.0)).collect();
    v.push(0.0);
    v.push(1.0);
    sorted_unique(v)
}

/// `int_0^1 |F^-1 - G^-1|^p`.
pub(crate) fn wd_total(f: &Knots, g: &Knots, p: u32) -> Result<f64> {
    let br = level_breaks(f, g);
    let mut total = 0.0;
    for w in br.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 <= t0 {
            continue;
        }
        let d = fit_linear(t0, t1, |t| f.eval_left(t) - g.eval_left(t));
        accumulate(&mut total, int_abs_pow_split(t1 - t0, d, p), t0)?;
    }
    Ok(total)
}

/// `[shift_plus, disp_plus]` of WD_p for the pair `(F, G)`.
///
/// With `L`, `U` the differences at the lower and upper ends of the central
/// intervals, `disp_plus = 1/2 int [U^[p] - L^[p]]_+` and
/// `shift_plus = int [min(L, U)^[p]]_+` over coverage in `[0, 1]`.
pub(crate) fn wd_plus(f: &Knots, g: &Knots, p: u32) -> Result<[f64; 2]> {
    let br = alpha_breaks(f.levels().iter().chain(g.levels()));
    let diff = |tau: f64| f.eval_left(tau) - g.eval_left(tau);
    let (mut shift, mut disp) = (0.0, 0.0);
    let mut cuts = Vec::with_capacity(5);
    for w in br.windows(2) {
        let (a0, a1) = (w[0], w[1]);
        if a1 <= a0 {
            continue;
        }
        let len = a1 - a0;
        let l = fit_linear(a0, a1, |a| diff(0.5 * (1.0 - a)));
        let u = fit_linear(a0, a1, |a| diff(0.5 * (1.0 + a)));
        cuts.clear();
        cuts.push(0.0);
        cuts.extend(l.root());
        cuts.extend(u.root());
        cuts.extend(u.sub(l).root());
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        for c in cuts.windows(2) {
            let (s0, s1) = (c[0], c[1]);
            if s1 <= s0 {
                continue;
            }
            let piece = |y: Lin| Lin {
                y0: y.at(s0),
                y1: y.at(s1),
            };
            let (lp, up) = (piece(l), piece(u));
            let plen = len * (s1 - s0);
            let sm = 0.5 * (s0 + s1);
            let (lm, um) = (l.at(sm), u.at(sm));
            if um > lm {
                let term = int_spow(plen, up, p) - int_spow(plen, lp, p);
                accumulate(&mut disp, term, a0)?;
            }
            let (mn, mv) = if lm <= um { (lp, lm) } else { (up, um) };
            if mv > 0.0 {
                accumulate(&mut shift, int_spow(plen, mn, p), a0)?;
            }
        }
    }
    Ok([shift, 0.5 * disp])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_integral_of_ramp() {
        // int_0^2 x^3 dx with x from 0 to 2
        assert!((int_abs_pow(2.0, 0.0, 2.0, 3) - 4.0).abs() < 1e-15);
        // int_0^1 (1 - 2x)^2 dx = 1/3
        let y = Lin { y0: 1.0, y1: -1.0 };
        assert!((int_abs_pow_split(1.0, y, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_point_fit_recovers_line() {
        let l = fit_linear(1.0, 3.0, |x| 2.0 * x - 1.0);
        assert!((l.y0 - 1.0).abs() < 1e-15 && (l.y1 - 5.0).abs() < 1e-15);
    }

    #[test]
    fn coverage_breaks_fold_levels() {
        let b = alpha_breaks([0.0, 0.25, 0.5, 0.75, 1.0].iter());
        assert_eq!(b, vec![0.0, 0.5, 1.0]);
    }
}
