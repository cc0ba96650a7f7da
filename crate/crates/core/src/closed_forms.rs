//! Closed-form decompositions for pairs of normal distributions.
//!
//! For normals the quantile difference is linear in the standard normal
//! quantile, so every component reduces to expressions in `phi`, `Phi` and
//! truncated normal moments.

use std::f64::consts::SQRT_2;

use crate::decomp::{Decomposition, DivergenceKind};
use crate::error::{Error, Result};
use crate::quantile::Distribution;
use crate::special::{self, PHI_ZERO};

/// Below this fraction of the larger scale the scales are treated as equal.
const EQUAL_SCALE_RATIO: f64 = 1e-13;

/// Parameters of two normal laws `F = N(mu_f, sigma_f^2)`, `G = N(mu_g, sigma_g^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalPair {
    pub mu_f: f64,
    pub sigma_f: f64,
    pub mu_g: f64,
    pub sigma_g: f64,
}

impl NormalPair {
    pub fn new(mu_f: f64, sigma_f: f64, mu_g: f64, sigma_g: f64) -> Result<Self> {
        for (name, v) in [("mu_f", mu_f), ("mu_g", mu_g)] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite")));
            }
        }
        for (name, v) in [("sigma_f", sigma_f), ("sigma_g", sigma_g)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive and finite")));
            }
        }
        Ok(Self {
            mu_f,
            sigma_f,
            mu_g,
            sigma_g,
        })
    }

    /// The pair behind two normal distributions, if both are normal.
    pub fn from_distributions(f: &Distribution, g: &Distribution) -> Option<Self> {
        match (f, g) {
            (Distribution::Normal(a), Distribution::Normal(b)) => Some(Self {
                mu_f: a.mu(),
                sigma_f: a.sigma(),
                mu_g: b.mu(),
                sigma_g: b.sigma(),
            }),
            _ => None,
        }
    }

    pub fn distributions(&self) -> (Distribution, Distribution) {
        (
            Distribution::normal(self.mu_f, self.sigma_f).expect("validated parameters"),
            Distribution::normal(self.mu_g, self.sigma_g).expect("validated parameters"),
        )
    }

    /// `|mu_f - mu_g|`.
    pub fn mu_tilde(&self) -> f64 {
        (self.mu_f - self.mu_g).abs()
    }

    /// `|sigma_f - sigma_g|`.
    pub fn sigma_tilde(&self) -> f64 {
        (self.sigma_f - self.sigma_g).abs()
    }

    /// `sqrt(sigma_f^2 + sigma_g^2)`.
    pub fn rho_tilde(&self) -> f64 {
        self.sigma_f.hypot(self.sigma_g)
    }

    fn equal_scales(&self) -> bool {
        self.sigma_tilde() < EQUAL_SCALE_RATIO * self.sigma_f.max(self.sigma_g)
    }

    /// Places a shift and a dispersion amount on the sides given by the signs
    /// of the location and scale differences.
    fn assign(&self, kind: DivergenceKind, total: f64, shift: f64, disp: f64) -> Decomposition {
        let up = self.mu_f > self.mu_g;
        let wider = self.sigma_f > self.sigma_g;
        let parts = [
            if up { shift } else { 0.0 },
            if up { 0.0 } else { shift },
            if wider { disp } else { 0.0 },
            if wider { 0.0 } else { disp },
        ];
        Decomposition::new(kind, total, parts, true)
    }
}

/// `2 Phi(z) - 1` without cancellation for large `z`.
fn two_cdf_minus_one(z: f64) -> f64 {
    if z > 0.0 {
        1.0 - 2.0 * special::sf(z)
    } else {
        2.0 * special::cdf(z) - 1.0
    }
}

/// `phi(0) - phi(z)`, accurate for small `z`.
fn phi_drop(z: f64) -> f64 {
    -PHI_ZERO * (-0.5 * z * z).exp_m1()
}

/// Closed-form AVM decomposition.
pub fn normal_avm_decompose(pair: &NormalPair) -> Decomposition {
    let mu = pair.mu_tilde();
    if pair.equal_scales() {
        return pair.assign(DivergenceKind::Avm, mu, mu, 0.0);
    }
    let s = pair.sigma_tilde();
    let r = mu / s;
    let total = mu * two_cdf_minus_one(r) + 2.0 * s * special::phi(r);
    let disp = 2.0 * s * PHI_ZERO;
    let shift = mu * two_cdf_minus_one(r) - 2.0 * s * phi_drop(r);
    pair.assign(DivergenceKind::Avm, total, shift, disp)
}

/// Closed-form Cramér decomposition.
pub fn normal_cd_decompose(pair: &NormalPair) -> Decomposition {
    let mu = pair.mu_tilde();
    let rho = pair.rho_tilde();
    let s = pair.sigma_tilde();
    let r = mu / rho;
    let total =
        2.0 * rho * special::phi(r) + mu * two_cdf_minus_one(r) - SQRT_2 * PHI_ZERO * (pair.sigma_f + pair.sigma_g);
    // 2 rho phi(0) - sqrt(2) phi(0) (sigma_f + sigma_g), rationalized
    let disp = PHI_ZERO * s * s / (rho + (pair.sigma_f + pair.sigma_g) / SQRT_2);
    let shift = mu * two_cdf_minus_one(r) - 2.0 * rho * phi_drop(r);
    pair.assign(DivergenceKind::Cd, total, shift, disp)
}

/// `E[X^p 1{X > a}]` for `X ~ N(mu, sigma^2)`.
fn partial_moment(p: u32, mu: f64, sigma: f64, a: f64) -> f64 {
    let z = (a - mu) / sigma;
    let dens = sigma * special::phi(z);
    let (mut prev, mut cur) = (0.0, special::sf(z));
    let mut a_pow = 1.0;
    for k in 1..=p {
        let next = (k as f64 - 1.0) * sigma * sigma * prev + mu * cur + a_pow * dens;
        prev = cur;
        cur = next;
        a_pow *= a;
    }
    cur
}

/// `E[X^p | X > a]` for `X ~ N(mu, sigma^2)`, `p >= -1`, with `m_0 = 1`
/// and `m_-1 = 0`.
pub fn truncated_normal_moment(p: i32, mu: f64, sigma: f64, a: f64) -> Result<f64> {
    if p < -1 {
        return Err(Error::Domain(format!("moment order {p} is below -1")));
    }
    if !(sigma.is_finite() && sigma > 0.0) || !mu.is_finite() || !a.is_finite() {
        return Err(Error::Domain("need finite mu, a and sigma > 0".into()));
    }
    let z = (a - mu) / sigma;
    let tail = special::sf(z);
    if tail < f64::MIN_POSITIVE {
        return Err(Error::Domain(format!(
            "truncation point is {z:.1} standard deviations above the mean; the upper tail \
             underflows. Shift mu towards a or rescale the problem"
        )));
    }
    if p == -1 {
        return Ok(0.0);
    }
    let hazard = special::phi(z) / tail;
    let (mut prev, mut cur) = (0.0, 1.0);
    let mut a_pow = 1.0;
    for k in 1..=p {
        let next = (k as f64 - 1.0) * sigma * sigma * prev + mu * cur + sigma * a_pow * hazard;
        prev = cur;
        cur = next;
        a_pow *= a;
    }
    Ok(cur)
}

/// Closed-form WD_p decomposition, `p >= 1`.
pub fn normal_wdp_decompose(pair: &NormalPair, p: u32) -> Result<Decomposition> {
    if p == 0 {
        return Err(Error::Domain("p must be a positive integer".into()));
    }
    let kind = if p == 1 {
        DivergenceKind::Avm
    } else {
        DivergenceKind::Wd(p)
    };
    let mu = pair.mu_tilde();
    if pair.equal_scales() {
        let t = mu.powi(p as i32);
        return Ok(pair.assign(kind, t, t, 0.0));
    }
    let s = pair.sigma_tilde();
    let up = partial_moment(p, mu, s, 0.0);
    let down = partial_moment(p, -mu, s, 0.0);
    // E[X^p | X > mu] for X ~ N(mu, s^2); the tail probability is exactly 1/2
    let centered = 2.0 * partial_moment(p, mu, s, mu);
    let total = up + down;
    let disp = centered + down - up;
    let shift = 2.0 * up - centered;
    let out = pair.assign(kind, total, shift, disp);
    if !out.total.is_finite() {
        return Err(Error::Overflow(format!("WD_{p} closed form overflowed")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(mf: f64, sf: f64, mg: f64, sg: f64) -> NormalPair {
        NormalPair::new(mf, sf, mg, sg).unwrap()
    }

    #[test]
    fn pure_shift() {
        let d = normal_avm_decompose(&pair(1.0, 1.0, 0.0, 1.0));
        assert_eq!(d.components(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.total, 1.0);
        let w = normal_wdp_decompose(&pair(0.0, 1.0, 1.0, 1.0), 2).unwrap();
        assert_eq!(w.components(), [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn pure_scale_avm() {
        let d = normal_avm_decompose(&pair(0.0, 2.0, 0.0, 1.0));
        assert!((d.disp_plus - 0.797_884_560_802_865_4).abs() < 1e-15);
        assert_eq!(d.shift_plus + d.shift_minus + d.disp_minus, 0.0);
    }

    #[test]
    fn pure_scale_wd2_is_squared_scale_gap() {
        let d = normal_wdp_decompose(&pair(0.0, 2.0, 0.0, 1.0), 2).unwrap();
        assert!((d.total - 1.0).abs() < 1e-14);
        assert!((d.disp_plus - 1.0).abs() < 1e-14);
        assert!(d.shift_plus.abs() < 1e-15);
    }

    #[test]
    fn equal_laws_have_zero_cd() {
        let d = normal_cd_decompose(&pair(0.5, 1.5, 0.5, 1.5));
        assert!(d.total < 1e-15 && d.sum() < 1e-15);
    }

    #[test]
    fn cd_unit_shift_total() {
        let d = normal_cd_decompose(&pair(1.0, 1.0, 0.0, 1.0));
        let r = 1.0 / SQRT_2;
        let expected = 2.0 * SQRT_2 * special::phi(r) + (2.0 * special::cdf(r) - 1.0) - 2.0 * SQRT_2 * PHI_ZERO;
        assert!((d.total - expected).abs() < 1e-15);
        assert_eq!(d.disp_plus + d.disp_minus, 0.0);
        assert!((d.sum() - d.total).abs() < 1e-15);
    }

    #[test]
    fn cd_matches_cdf_integral() {
        let p = pair(0.4, 1.3, -0.2, 0.7);
        let (f, g) = p.distributions();
        let num = crate::decomp::cd_via_cdf(&f, &g, &crate::decomp::QuadratureConfig::default()).unwrap();
        let d = normal_cd_decompose(&p);
        assert!((d.total - num).abs() < 1e-6, "{} vs {num}", d.total);
        assert!((d.sum() - d.total).abs() < 1e-12);
    }

    #[test]
    fn truncated_moments() {
        assert_eq!(truncated_normal_moment(0, 3.0, 2.0, 1.0).unwrap(), 1.0);
        assert_eq!(truncated_normal_moment(-1, 3.0, 2.0, 1.0).unwrap(), 0.0);
        let m1 = truncated_normal_moment(1, 0.0, 1.0, 0.0).unwrap();
        assert!((m1 - 2.0 * PHI_ZERO).abs() < 1e-15);
        let m2 = truncated_normal_moment(2, 0.0, 1.0, 0.0).unwrap();
        assert!((m2 - 1.0).abs() < 1e-15);
        assert!(matches!(
            truncated_normal_moment(1, 0.0, 1.0, 60.0),
            Err(Error::Domain(_))
        ));
        assert!(truncated_normal_moment(-2, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn p_one_matches_avm_form() {
        for (mf, sf, mg, sg) in [(0.3, 1.0, -1.2, 2.5), (2.0, 0.4, 2.1, 0.5), (-1.0, 3.0, 4.0, 1.0)] {
            let p = pair(mf, sf, mg, sg);
            let a = normal_avm_decompose(&p);
            let w = normal_wdp_decompose(&p, 1).unwrap();
            for (x, y) in a.components().iter().zip(w.components()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
