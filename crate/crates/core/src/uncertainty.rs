//! Mutual information from measurement uncertainty.
//!
//! Alice (and Eve) estimate Bob's quadrature values from their own; the
//! residual variance `Δ` of that estimate feeds the Gaussian channel formula
//! `I = ½·log₂((V + χ)/(1 + χ))` through the added-noise budget `χ`.
//!
//! The detected quadratures are modelled as
//!
//! ```text
//! X_A = (n_A/2)·x_in   + √(1 − (n_A/2)²)·v_A   + N_A
//! X_B = (τn_B/2)·x_in  + √(1 − (τn_B/2)²)·v_B  + N_B
//! X_E = (μn_E/2)·x_in  + √(1 − (μn_E/2)²)·v_E  + N_E
//! ```
//!
//! with unit-variance vacuum terms `v` and detector noise `N`. The two
//! residual variances below are used exactly as they are usually printed.
//! Note the asymmetry: the Alice–Bob expression carries `1 − n_A/2` where the
//! Bob–Eve one carries `1 − (τn_B)²/2`.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Detector efficiencies, detector noise second moments and channel
/// transmittance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub eff_a: f64,
    pub eff_b: f64,
    pub eff_e: f64,
    /// `⟨N_A²⟩`
    pub noise_a: f64,
    /// `⟨N_B²⟩`
    pub noise_b: f64,
    /// `⟨N_E²⟩`
    pub noise_e: f64,
    pub transmittance: f64,
}

impl Default for NoiseModel {
    /// Unit efficiencies, unit detector noise, lossless channel.
    fn default() -> Self {
        Self {
            eff_a: 1.0,
            eff_b: 1.0,
            eff_e: 1.0,
            noise_a: 1.0,
            noise_b: 1.0,
            noise_e: 1.0,
            transmittance: 1.0,
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        for (name, eff) in [("n_A", self.eff_a), ("n_B", self.eff_b), ("n_E", self.eff_e)] {
            if !(eff > 0.0 && eff <= 1.0) {
                return domain(format!("detector efficiency {name} must lie in (0, 1], got {eff}"));
            }
        }
        for (name, n2) in [
            ("<N_A^2>", self.noise_a),
            ("<N_B^2>", self.noise_b),
            ("<N_E^2>", self.noise_e),
        ] {
            if !(n2 >= 0.0 && n2.is_finite()) {
                return domain(format!("detector noise {name} must be >= 0, got {n2}"));
            }
        }
        if !(self.transmittance > 0.0 && self.transmittance <= 1.0) {
            return domain(format!(
                "channel transmittance must lie in (0, 1], got {}",
                self.transmittance
            ));
        }
        Ok(())
    }
}

/// Variance of a detected quadrature `c·x_in + √(1 − c²)·v + N` with unit
/// vacuum variance: `c²·Var(x_in) + (1 − c²) + ⟨N²⟩`.
pub fn detected_quadrature_variance(coupling: f64, input_variance: f64, noise2: f64) -> f64 {
    let c2 = coupling * coupling;
    c2 * input_variance + (1.0 - c2) + noise2
}

/// Alice's uncertainty on Bob's quadrature,
/// `(τn_B/n_A)²·(1 − n_A/2 + ⟨N_A²⟩) + 1 + ⟨N_B²⟩`.
pub fn delta_ab(nm: &NoiseModel, tau: f64) -> Result<f64> {
    if nm.eff_a == 0.0 {
        return domain("Alice's detector efficiency must be nonzero");
    }
    nm.validate()?;
    let gain = tau * nm.eff_b / nm.eff_a;
    Ok(gain * gain * (1.0 - nm.eff_a / 2.0 + nm.noise_a) + 1.0 + nm.noise_b)
}

/// Eve's uncertainty on Bob's quadrature,
/// `(μn_E/(τn_B))²·(1 − (τn_B)²/2 + ⟨N_B²⟩) + 1 + ⟨N_E²⟩`.
pub fn delta_be(nm: &NoiseModel, tau: f64, mu: f64) -> Result<f64> {
    if tau <= 0.0 {
        return domain(format!("Bob's transmittance must be positive, got {tau}"));
    }
    nm.validate()?;
    let gain = mu * nm.eff_e / (tau * nm.eff_b);
    let tb = tau * nm.eff_b;
    Ok(gain * gain * (1.0 - tb * tb / 2.0 + nm.noise_b) + 1.0 + nm.noise_e)
}

/// Gaussian-channel mutual information `½·log₂((V + χ)/(1 + χ))` in bits.
pub fn gaussian_mi(variance: f64, chi: f64) -> Result<f64> {
    if !(variance >= 1.0) {
        return domain(format!("quadrature variance must be >= 1, got {variance}"));
    }
    if !(chi >= 0.0) {
        return domain(format!("added noise must be >= 0, got {chi}"));
    }
    if chi.is_infinite() {
        return Ok(0.0);
    }
    Ok(0.5 * ((variance + chi) / (1.0 + chi)).log2())
}

/// Added-noise budget `χ = χ_line + χ_hom/T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    /// `1/T − 2 + Δ`
    pub line: f64,
    /// `(1 + ⟨N²⟩)/n_B − 1`
    pub hom: f64,
    pub total: f64,
}

/// Splits the residual variance `Δ` into channel and detection noise.
/// Uses Bob's detector (efficiency and noise) for the detection term.
pub fn total_noise(nm: &NoiseModel, delta: f64) -> Result<NoiseBudget> {
    if nm.transmittance == 0.0 {
        return domain("channel transmittance must be nonzero");
    }
    nm.validate()?;
    let t = nm.transmittance;
    let line = 1.0 / t - 2.0 + delta;
    let hom = (1.0 + nm.noise_b) / nm.eff_b - 1.0;
    // constant part first so that χ = Δ holds bit-exactly when it cancels
    Ok(NoiseBudget {
        line,
        hom,
        total: delta + ((1.0 / t - 2.0) + hom / t),
    })
}

/// One point of the uncertainty-method curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyResult {
    pub variance: f64,
    pub delta_ab: f64,
    pub delta_be: f64,
    pub noise_ab: NoiseBudget,
    pub noise_be: NoiseBudget,
    pub i_ab: f64,
    pub i_be: f64,
}

/// `I(A;B)` and `I(B;E)` at one source variance for Eve's splitter `(τ, μ)`.
pub fn uncertainty_point(nm: &NoiseModel, tau: f64, mu: f64, variance: f64) -> Result<UncertaintyResult> {
    let d_ab = delta_ab(nm, tau)?;
    let d_be = delta_be(nm, tau, mu)?;
    let noise_ab = total_noise(nm, d_ab)?;
    let noise_be = total_noise(nm, d_be)?;
    Ok(UncertaintyResult {
        variance,
        delta_ab: d_ab,
        delta_be: d_be,
        noise_ab,
        noise_be,
        i_ab: gaussian_mi(variance, noise_ab.total)?,
        i_be: gaussian_mi(variance, noise_be.total)?,
    })
}

/// Curves of `I(A;B)` and `I(B;E)` against source variance, with Eve's
/// splitter at amplitude transmittance `tau`.
pub fn uncertainty_curves(nm: &NoiseModel, tau: f64, variances: &[f64]) -> Result<Vec<UncertaintyResult>> {
    if !(0.0..=1.0).contains(&tau) {
        return domain(format!("amplitude transmittance must lie in [0, 1], got {tau}"));
    }
    let mu = (1.0 - tau * tau).max(0.0).sqrt();
    variances
        .iter()
        .map(|&v| uncertainty_point(nm, tau, mu, v))
        .collect()
}

/// Amplitude transmittance of a 50:50 tap.
pub const BALANCED_TAU: f64 = FRAC_1_SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn delta_ab_examples() {
        let nm = NoiseModel::default();
        assert_abs_diff_eq!(delta_ab(&nm, 1.0).unwrap(), 3.5);
        assert_abs_diff_eq!(delta_ab(&nm, 0.0).unwrap(), 2.0);
        let noisy = NoiseModel {
            noise_b: 0.4,
            ..nm
        };
        assert_abs_diff_eq!(delta_ab(&noisy, 0.0).unwrap(), 1.4);

        // halving n_A (equivalently doubling the n_B/n_A ratio) scales the
        // prefactor by 4 while the bracket follows n_A
        let half = NoiseModel { eff_a: 0.5, ..nm };
        let expected = 4.0 * (1.0 - 0.25 + 1.0) + 2.0;
        assert_abs_diff_eq!(delta_ab(&half, 1.0).unwrap(), expected, epsilon = 1e-12);
        assert!(delta_ab(&NoiseModel { eff_a: 0.0, ..nm }, 1.0).is_err());
    }

    #[test]
    fn delta_be_examples() {
        let nm = NoiseModel::default();
        let t = BALANCED_TAU;
        assert_abs_diff_eq!(delta_be(&nm, t, t).unwrap(), 3.75, epsilon = 1e-12);
        assert_abs_diff_eq!(delta_be(&nm, 1.0, 0.0).unwrap(), 2.0);
        assert!(delta_be(&nm, 0.0, 1.0).is_err());
        // quadratic growth in μ at fixed τ
        let base = delta_be(&nm, 0.6, 0.0).unwrap();
        let d1 = delta_be(&nm, 0.6, 0.4).unwrap() - base;
        let d2 = delta_be(&nm, 0.6, 0.8).unwrap() - base;
        assert_abs_diff_eq!(d2 / d1, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_mi_examples() {
        assert_eq!(gaussian_mi(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(gaussian_mi(1.0, 7.5).unwrap(), 0.0);
        assert_abs_diff_eq!(gaussian_mi(9.0, 1.0).unwrap(), 1.160_964_047_443_681, epsilon = 1e-12);
        assert_eq!(gaussian_mi(9.0, f64::INFINITY).unwrap(), 0.0);
        assert!(gaussian_mi(0.9, 1.0).is_err());
        assert!(gaussian_mi(2.0, -0.1).is_err());
        let far = gaussian_mi(9.0, 1e12).unwrap();
        assert!(far < 1e-11);
    }

    #[test]
    fn noise_budget_examples() {
        let nm = NoiseModel::default();
        let b = total_noise(&nm, 3.5).unwrap();
        assert_eq!(b.line, 2.5);
        assert_eq!(b.hom, 1.0);
        assert_eq!(b.total, 3.5);

        let quiet = NoiseModel {
            noise_b: 0.0,
            ..nm
        };
        assert_eq!(total_noise(&quiet, 1.0).unwrap().hom, 0.0);

        let lossy = NoiseModel {
            transmittance: 0.5,
            ..nm
        };
        assert_abs_diff_eq!(total_noise(&lossy, 0.0).unwrap().total, 2.0, epsilon = 1e-15);
        assert!(total_noise(&NoiseModel { transmittance: 0.0, ..nm }, 1.0).is_err());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::default().validate().is_ok());
        assert!(NoiseModel { eff_b: 1.2, ..Default::default() }.validate().is_err());
        assert!(NoiseModel { noise_e: -0.1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn curves_vanish_at_vacuum_and_keep_order() {
        let nm = NoiseModel::default();
        let vs: Vec<f64> = (0..50).map(|k| 1.0 + k as f64 * 10.0).collect();
        let pts = uncertainty_curves(&nm, BALANCED_TAU, &vs).unwrap();
        assert_eq!(pts[0].i_ab, 0.0);
        assert_eq!(pts[0].i_be, 0.0);
        for p in &pts[1..] {
            assert!(p.i_ab > p.i_be);
        }
        assert!(pts.windows(2).all(|w| w[1].i_ab > w[0].i_ab && w[1].i_be > w[0].i_be));
        assert!(uncertainty_curves(&nm, BALANCED_TAU, &[0.5]).is_err());
    }
}
