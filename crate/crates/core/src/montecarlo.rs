//! Photon-level Monte Carlo of the protocol.
//!
//! Each trial draws a Fock number from the thermal source, splits it
//! binomially at every beam splitter, and records the counts at each
//! party's two detectors. Trial `t` draws from its own ChaCha stream
//! (`stream = t`) under a key derived from the seed, so results do not
//! depend on how trials are scheduled across threads.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Geometric};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::protocol::{Party, ProtocolConfig};

/// Truncated thermal tail allowed when sizing sampling tables.
pub const SAMPLING_TAIL: f64 = 1e-12;

/// `P(n > truncation)` for a thermal source with mean `mean_photons`.
pub fn thermal_tail(mean_photons: f64, truncation: u64) -> f64 {
    if mean_photons <= 0.0 {
        return 0.0;
    }
    let ratio = mean_photons / (mean_photons + 1.0);
    ratio.powf(truncation as f64 + 1.0)
}

/// Thermal photon-number source `p_n = n̄ⁿ / (n̄ + 1)ⁿ⁺¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSource {
    mean_photons: f64,
    truncation: u64,
    geometric: Geometric,
}

impl ThermalSource {
    pub fn new(mean_photons: f64) -> Result<Self> {
        Self::with_tail(mean_photons, SAMPLING_TAIL)
    }

    /// Source whose truncation drops less than `tail` probability.
    pub fn with_tail(mean_photons: f64, tail: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return domain(format!(
                "mean photon number must be finite and >= 0, got {mean_photons}"
            ));
        }
        if !(tail > 0.0 && tail < 1.0) {
            return domain(format!("tail probability must lie in (0, 1), got {tail}"));
        }
        let truncation = if mean_photons == 0.0 {
            0
        } else {
            let ratio = mean_photons / (mean_photons + 1.0);
            // smallest T with ratio^(T+1) < tail
            let t = (tail.ln() / ratio.ln()).floor() as u64;
            (t.saturating_sub(2)..)
                .find(|&t| thermal_tail(mean_photons, t) < tail)
                .expect("thermal tail decays geometrically")
        };
        let geometric = Geometric::new(1.0 / (mean_photons + 1.0))
            .map_err(|e| crate::Error::Domain(e.to_string()))?;
        Ok(Self {
            mean_photons,
            truncation,
            geometric,
        })
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    /// `p_n` for a single Fock number.
    pub fn probability(&self, n: u64) -> f64 {
        let m = self.mean_photons;
        (m / (m + 1.0)).powf(n as f64) / (m + 1.0)
    }

    /// Photon-number variance `n̄(n̄ + 1)`.
    pub fn photon_number_variance(&self) -> f64 {
        self.mean_photons * (self.mean_photons + 1.0)
    }
}

/// One Fock number drawn from the thermal law (geometric, mean `n̄`),
/// capped at the source's truncation.
pub fn sample_thermal<R: Rng + ?Sized>(src: &ThermalSource, rng: &mut R) -> u64 {
    src.geometric.sample(rng).min(src.truncation)
}

/// Splits `n_in` photons at a splitter with power transmittance `t2`:
/// the transmitted count is `Bin(n_in, t2)`, the rest is reflected.
pub fn split_fock<R: Rng + ?Sized>(n_in: u64, t2: f64, rng: &mut R) -> (u64, u64) {
    if n_in == 0 {
        return (0, 0);
    }
    let transmitted = Binomial::new(n_in, t2)
        .expect("power transmittance lies in [0, 1]")
        .sample(rng);
    (transmitted, n_in - transmitted)
}

/// How a party turns its two detector counts into one scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementModel {
    /// `z = n₁ + n₂`.
    #[default]
    PhotonCount,
    /// Each detector reports a quadrature drawn from the Husimi function of
    /// its Fock state: `|α|² ~ Gamma(n + 1, 1)` with a uniform phase. The
    /// first detector gives `x`, the second `p`, and `z = √(x² + p²)`.
    Heterodyne,
}

/// Per-trial data of one party.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartyRecord {
    /// Counts at the X-quadrature detector.
    pub n1: Vec<u64>,
    /// Counts at the P-quadrature detector.
    pub n2: Vec<u64>,
    /// Scalar measurement value per trial.
    pub z: Vec<f64>,
}

impl PartyRecord {
    fn with_capacity(n: usize) -> Self {
        Self {
            n1: Vec::with_capacity(n),
            n2: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
        }
    }

    /// Total count `n₁ + n₂` per trial.
    pub fn counts(&self) -> Vec<u64> {
        self.n1.iter().zip(&self.n2).map(|(a, b)| a + b).collect()
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// All parties' measurement streams from one run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEnsemble {
    pub config: ProtocolConfig,
    pub trials: usize,
    pub seed: u64,
    pub model: MeasurementModel,
    /// Source Fock number per trial.
    pub source: Vec<u64>,
    pub alice: PartyRecord,
    pub bob: PartyRecord,
    pub eve: PartyRecord,
}

impl TrialEnsemble {
    pub fn party(&self, party: Party) -> &PartyRecord {
        match party {
            Party::Alice => &self.alice,
            Party::Bob => &self.bob,
            Party::Eve => &self.eve,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct TrialOutcome {
    source: u64,
    counts: [(u64, u64); 3],
    z: [f64; 3],
}

/// Generator for trial `t` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

fn heterodyne_quadrature<R: Rng + ?Sized>(n: u64, rng: &mut R, sine: bool) -> f64 {
    let r2 = Gamma::new(n as f64 + 1.0, 1.0)
        .expect("shape n + 1 is positive")
        .sample(rng);
    let phase = rng.random::<f64>() * TAU;
    let amp = (2.0 * r2).sqrt();
    if sine {
        amp * phase.sin()
    } else {
        amp * phase.cos()
    }
}

fn run_trial(
    cfg: &ProtocolConfig,
    src: &ThermalSource,
    model: MeasurementModel,
    rng: &mut ChaCha8Rng,
) -> TrialOutcome {
    let n = sample_thermal(src, rng);
    let (alice, channel) = split_fock(n, 0.5, rng);
    let (bob, eve) = split_fock(channel, cfg.eve_t2(), rng);
    let mut counts = [(0, 0); 3];
    let mut z = [0.0; 3];
    for (k, arriving) in [alice, bob, eve].into_iter().enumerate() {
        let (n1, n2) = split_fock(arriving, 0.5, rng);
        counts[k] = (n1, n2);
        z[k] = match model {
            MeasurementModel::PhotonCount => (n1 + n2) as f64,
            MeasurementModel::Heterodyne => {
                let x = heterodyne_quadrature(n1, rng, false);
                let p = heterodyne_quadrature(n2, rng, true);
                x.hypot(p)
            }
        };
    }
    TrialOutcome {
        source: n,
        counts,
        z,
    }
}

/// Simulates `trials` independent protocol rounds.
pub fn run_protocol(
    cfg: &ProtocolConfig,
    trials: usize,
    seed: u64,
    model: MeasurementModel,
) -> Result<TrialEnsemble> {
    if trials == 0 {
        return domain("at least one trial is required");
    }
    let src = ThermalSource::new(cfg.mean_photons())?;
    let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .with_min_len(1024)
        .map(|t| {
            let mut rng = ChaCha8Rng::from_seed(key);
            rng.set_stream(t as u64);
            run_trial(cfg, &src, model, &mut rng)
        })
        .collect();

    let mut parties = [
        PartyRecord::with_capacity(trials),
        PartyRecord::with_capacity(trials),
        PartyRecord::with_capacity(trials),
    ];
    let mut source = Vec::with_capacity(trials);
    for o in &outcomes {
        source.push(o.source);
        for (rec, (&(n1, n2), &z)) in parties.iter_mut().zip(o.counts.iter().zip(&o.z)) {
            rec.n1.push(n1);
            rec.n2.push(n2);
            rec.z.push(z);
        }
    }
    let [alice, bob, eve] = parties;
    Ok(TrialEnsemble {
        config: *cfg,
        trials,
        seed,
        model,
        source,
        alice,
        bob,
        eve,
    })
}

/// A median-thresholded bit string.
#[derive(Debug, Clone, PartialEq)]
pub struct BitString {
    bits: Vec<u8>,
    threshold: Option<f64>,
}

impl BitString {
    /// Wraps raw bits (each 0 or 1) with no associated threshold.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return domain("bits must be 0 or 1");
        }
        Ok(Self {
            bits,
            threshold: None,
        })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Median used to derive the bits, if any.
    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

/// Sample median; the mean of the two central order statistics for even
/// lengths.
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return domain("median of an empty array");
    }
    if values.iter().any(|v| v.is_nan()) {
        return domain("median of an array containing NaN");
    }
    let mut v = values.to_vec();
    let mid = v.len() / 2;
    let (_, &mut upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    if v.len() % 2 == 1 {
        return Ok(upper);
    }
    let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(0.5 * (lower + upper))
}

/// Bit `1` iff the value is strictly above the median; ties map to `0`.
pub fn derive_bits(values: &[f64]) -> Result<BitString> {
    let threshold = median(values)?;
    Ok(BitString {
        bits: values.iter().map(|&v| (v > threshold) as u8).collect(),
        threshold: Some(threshold),
    })
}
