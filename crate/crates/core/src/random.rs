//! Seeded generators of random distributions for property checks.
//!
//! Values are rounded to short decimals so that failures are easy to replay
//! by hand.

use rand::Rng;

use crate::quantile::{Distribution, Interpolation};

fn round(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

/// `n` positive weights on a 0.01 lattice summing to 1, from distinct cuts
/// of the unit interval.
fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut cuts = rand::seq::index::sample(rng, 99, n - 1).into_vec();
    cuts.iter_mut().for_each(|c| *c += 1);
    cuts.push(0);
    cuts.push(100);
    cuts.sort_unstable();
    cuts.windows(2).map(|w| (w[1] - w[0]) as f64 / 100.0).collect()
}

/// `n + 1` strictly increasing breakpoints on a 0.1 lattice inside `[lo, hi]`.
fn breakpoints<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    loop {
        let mut b: Vec<f64> = (0..=n).map(|_| round(rng.gen_range(lo..hi), 0.1)).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        if b.len() == n + 1 {
            return b;
        }
    }
}

fn uniform_mixture(parts: &[(f64, f64, f64)]) -> Distribution {
    let comps = parts
        .iter()
        .map(|&(w, a, b)| (w, Distribution::uniform(a, b).expect("generated a < b")))
        .collect();
    Distribution::mixture(comps).expect("generated weights sum to 1")
}

/// Uniform mixture on adjacent intervals: bounded support without gaps, so
/// the quantile function is continuous and strictly increasing.
pub fn contiguous_mixture<R: Rng>(rng: &mut R) -> Distribution {
    let n = rng.gen_range(1..=4);
    let b = breakpoints(rng, n, -4.0, 4.0);
    let w = weights(rng, n);
    let parts: Vec<_> = (0..n).map(|i| (w[i], b[i], b[i + 1])).collect();
    uniform_mixture(&parts)
}

pub fn normal<R: Rng>(rng: &mut R) -> Distribution {
    let mu = round(rng.gen_range(-3.0..3.0), 0.01);
    let sigma = round(rng.gen_range(0.2..3.0), 0.01);
    Distribution::normal(mu, sigma).expect("generated sigma > 0")
}

/// Any variant with a piecewise-linear quantile: contiguous or gapped
/// mixtures, histograms with atoms, empirical laws and point masses.
pub fn piecewise<R: Rng>(rng: &mut R) -> Distribution {
    match rng.gen_range(0..6) {
        0 | 1 => contiguous_mixture(rng),
        2 => {
            // possibly overlapping or separated uniforms
            let n = rng.gen_range(2..=3);
            let w = weights(rng, n);
            let parts: Vec<_> = (0..n)
                .map(|i| {
                    let a = round(rng.gen_range(-4.0..3.0), 0.1);
                    let len = round(rng.gen_range(0.1..3.0), 0.1).max(0.1);
                    (w[i], a, a + len)
                })
                .collect();
            uniform_mixture(&parts)
        }
        3 => {
            let n = rng.gen_range(2..=5);
            let mut edges = breakpoints(rng, n, -4.0, 4.0);
            if rng.gen_bool(0.5) {
                // a zero-width bin is an atom
                let k = rng.gen_range(0..=n);
                edges.insert(k, edges[k]);
            }
            let probs = weights(rng, edges.len() - 1);
            Distribution::histogram(edges, probs).expect("generated histogram")
        }
        4 => {
            let n = rng.gen_range(1..=6);
            let samples = (0..n).map(|_| round(rng.gen_range(-4.0..4.0), 0.1)).collect();
            Distribution::empirical(samples).expect("finite samples")
        }
        _ => {
            let n = rng.gen_range(2..=4);
            let mut levels: Vec<f64> = (1..n).map(|_| round(rng.gen_range(0.05..0.95), 0.05)).collect();
            levels.push(1.0);
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            let mut values: Vec<f64> = levels.iter().map(|_| round(rng.gen_range(-4.0..4.0), 0.1)).collect();
            values.sort_by(f64::total_cmp);
            Distribution::piecewise_quantile(levels, values, Interpolation::Step).expect("generated step quantile")
        }
    }
}

/// Laws without a closed-form quantile polyline: normals and mixtures
/// with a normal component.
pub fn smooth<R: Rng>(rng: &mut R) -> Distribution {
    match rng.gen_range(0..3) {
        0 => normal(rng),
        1 => {
            let w = weights(rng, 2);
            Distribution::mixture(vec![(w[0], normal(rng)), (w[1], normal(rng))]).expect("generated mixture")
        }
        _ => {
            let w = weights(rng, 2);
            Distribution::mixture(vec![(w[0], normal(rng)), (w[1], contiguous_mixture(rng))])
                .expect("generated mixture")
        }
    }
}

/// Symmetric law about a random center with a unique median.
pub fn symmetric<R: Rng>(rng: &mut R) -> Distribution {
    let m = round(rng.gen_range(-3.0..3.0), 0.1);
    match rng.gen_range(0..3) {
        0 => Distribution::normal(m, round(rng.gen_range(0.2..3.0), 0.01)).expect("sigma > 0"),
        1 => {
            let h = round(rng.gen_range(0.1..3.0), 0.1);
            Distribution::uniform(m - h, m + h).expect("h > 0")
        }
        _ => {
            // mirrored adjacent pieces around m
            let n = rng.gen_range(1..=3);
            let mut r = breakpoints(rng, n, 0.05, 3.0);
            r[0] = 0.0;
            let w = weights(rng, n);
            let mut parts = Vec::with_capacity(2 * n);
            for i in 0..n {
                parts.push((w[i] / 2.0, m + r[i], m + r[i + 1]));
                parts.push((w[i] / 2.0, m - r[i + 1], m - r[i]));
            }
            uniform_mixture(&parts)
        }
    }
}

/// Two members `s H + l` of one random location-scale family with their
/// scales and locations.
pub fn location_scale_pair<R: Rng>(rng: &mut R) -> ((Distribution, f64, f64), (Distribution, f64, f64)) {
    let base = if rng.gen_bool(0.5) {
        contiguous_mixture(rng)
    } else {
        smooth(rng)
    };
    let member = |rng: &mut R| {
        let s = round(rng.gen_range(0.3..2.5), 0.1);
        let l = round(rng.gen_range(-2.0..2.0), 0.1);
        (base.affine(s, l).expect("positive scale"), s, l)
    };
    let a = member(rng);
    let b = member(rng);
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn weights_are_valid() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(1);
        for n in 1..8 {
            for _ in 0..200 {
                let w = weights(&mut rng, n);
                assert_eq!(w.len(), n);
                assert!(w.iter().all(|&x| x > 0.0));
                assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn generators_build_valid_laws() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(2);
        for _ in 0..300 {
            assert!(piecewise(&mut rng).knots().is_some());
            assert!(!contiguous_mixture(&mut rng).has_quantile_jump());
            assert!(symmetric(&mut rng).is_symmetric(64, 1e-9));
            let _ = smooth(&mut rng);
        }
    }
}
