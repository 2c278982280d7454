//! Classical information measures on bit strings and measurement streams.
//!
//! All entropies are plug-in (maximum-likelihood) estimates in bits with the
//! convention `0·log₂0 = 0`; no bias correction is applied.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::montecarlo::{median, thermal_tail, BitString};

/// Below this, a negative information value is treated as rounding noise.
const INFO_TOL: f64 = 1e-12;

/// Default number of bootstrap resamples for error bars.
pub const BOOTSTRAP_RESAMPLES: usize = 100;

/// Largest probability mass the enumeration oracle may drop.
pub const ORACLE_TAIL_LIMIT: f64 = 1e-9;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Entropy in bits of a probability vector. Terms are summed in sorted
/// order, so the result does not depend on how the outcomes are listed.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    sorted_sum(probabilities.iter().map(|&p| plogp(p)))
}

fn sorted_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let mut terms: Vec<f64> = terms.collect();
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

/// `H = −p₀log₂p₀ − (1 − p₀)log₂(1 − p₀)`.
pub fn binary_entropy(p0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) {
        return domain(format!("probability must lie in [0, 1], got {p0}"));
    }
    Ok(plogp(p0) + plogp(1.0 - p0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// Measured bit strings.
    Shannon,
    /// Quantum state via the covariance matrix.
    VonNeumann,
}

impl Flavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            Flavor::Shannon => "shannon",
            Flavor::VonNeumann => "von_neumann",
        }
    }
}

/// Raw measures from which key rates and bounds are derived.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KeyRateInputs {
    pub h_a: f64,
    pub h_b: f64,
    pub h_e: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    pub i_ab_given_e: f64,
}

/// Entropies, mutual informations and key-rate bounds for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoSummary {
    pub flavor: Flavor,
    pub h_a: f64,
    pub h_b: f64,
    pub h_e: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    pub i_ab_given_e: f64,
    /// Direct reconciliation rate `I(A;B) − I(A;E)`.
    pub k_dr: f64,
    /// Reverse reconciliation rate `I(A;B) − I(B;E)`.
    pub k_rr: f64,
    /// `max(K_DR, K_RR)`
    pub lower_bound: f64,
    /// `min(I(A;B), I(A;B|E))`
    pub upper_bound: f64,
}

impl InfoSummary {
    pub fn from_inputs(flavor: Flavor, x: KeyRateInputs) -> Self {
        let k_dr = x.i_ab - x.i_ae;
        let k_rr = x.i_ab - x.i_be;
        Self {
            flavor,
            h_a: x.h_a,
            h_b: x.h_b,
            h_e: x.h_e,
            i_ab: x.i_ab,
            i_ae: x.i_ae,
            i_be: x.i_be,
            i_ab_given_e: x.i_ab_given_e,
            k_dr,
            k_rr,
            lower_bound: k_dr.max(k_rr),
            upper_bound: x.i_ab.min(x.i_ab_given_e),
        }
    }
}

/// Key rates and bounds from already computed information values.
pub fn key_rate_bounds(flavor: Flavor, inputs: KeyRateInputs) -> Result<InfoSummary> {
    let finite = [
        inputs.i_ab,
        inputs.i_ae,
        inputs.i_be,
        inputs.i_ab_given_e,
    ]
    .iter()
    .all(|v| v.is_finite());
    if !finite {
        return domain("mutual information values must be finite");
    }
    Ok(InfoSummary::from_inputs(flavor, inputs))
}

/// Counts over the joint outcomes of one to three equal-length bit strings.
///
/// Cell `c` counts positions where string `i` reads bit `(c >> i) & 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointHistogram {
    n_strings: usize,
    counts: Vec<u64>,
}

impl JointHistogram {
    pub fn empty(n_strings: usize) -> Result<Self> {
        if !(1..=3).contains(&n_strings) {
            return domain(format!("joint histogram takes 1 to 3 strings, got {n_strings}"));
        }
        Ok(Self {
            n_strings,
            counts: vec![0; 1 << n_strings],
        })
    }

    pub fn from_strings(strings: &[&BitString]) -> Result<Self> {
        let mut hist = Self::empty(strings.len())?;
        let len = strings[0].len();
        if strings.iter().any(|s| s.len() != len) {
            return domain("bit strings have different lengths");
        }
        if len == 0 {
            return domain("bit strings are empty");
        }
        hist.accumulate(strings, 0..len);
        Ok(hist)
    }

    /// Same as [`from_strings`](Self::from_strings) but accumulated over
    /// `shards` chunks in parallel and merged.
    pub fn from_strings_sharded(strings: &[&BitString], shards: usize) -> Result<Self> {
        let len = strings.first().map_or(0, |s| s.len());
        if strings.iter().any(|s| s.len() != len) {
            return domain("bit strings have different lengths");
        }
        if len == 0 {
            return domain("bit strings are empty");
        }
        let shards = shards.clamp(1, len);
        let chunk = len.div_ceil(shards);
        let parts: Vec<Self> = (0..shards)
            .into_par_iter()
            .map(|s| {
                let mut h = Self::empty(strings.len()).expect("checked by caller");
                h.accumulate(strings, s * chunk..((s + 1) * chunk).min(len));
                h
            })
            .collect();
        let mut total = Self::empty(strings.len())?;
        for p in &parts {
            total.merge(p)?;
        }
        Ok(total)
    }

    fn accumulate(&mut self, strings: &[&BitString], range: std::ops::Range<usize>) {
        for t in range {
            let cell = strings
                .iter()
                .enumerate()
                .fold(0usize, |c, (i, s)| c | ((s.bits()[t] as usize) << i));
            self.counts[cell] += 1;
        }
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.n_strings != self.n_strings {
            return domain("cannot merge histograms over different string counts");
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    pub fn n_strings(&self) -> usize {
        self.n_strings
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.total() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Joint distribution of one to three binary variables, indexed like
/// [`JointHistogram`] cells.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryJoint {
    n_vars: usize,
    probs: Vec<f64>,
}

impl BinaryJoint {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let n_vars = match probs.len() {
            2 => 1,
            4 => 2,
            8 => 3,
            other => return domain(format!("expected 2, 4 or 8 cells, got {other}")),
        };
        Ok(Self { n_vars, probs })
    }

    pub fn from_histogram(hist: &JointHistogram) -> Self {
        Self {
            n_vars: hist.n_strings,
            probs: hist.probabilities(),
        }
    }

    /// Entropy of the variables selected by the bit mask `vars`.
    pub fn entropy(&self, vars: usize) -> f64 {
        let marginal: Vec<f64> = (0..self.probs.len())
            .filter(|cell| cell & !vars == 0)
            .map(|key| {
                sorted_sum(
                    self.probs
                        .iter()
                        .enumerate()
                        .filter(|(cell, _)| cell & vars == key)
                        .map(|(_, &p)| p),
                )
            })
            .collect();
        shannon_entropy(&marginal)
    }

    /// Summary for three variables (A, B, E) = bits (0, 1, 2).
    pub fn summary(&self) -> Result<InfoSummary> {
        if self.n_vars != 3 {
            return domain("summary needs the joint distribution of three strings");
        }
        const A: usize = 1;
        const B: usize = 2;
        const E: usize = 4;
        let h = |m| self.entropy(m);
        let mi = |x: usize, y: usize| (h(x) + h(y) - h(x | y)).max(0.0);
        let cmi = (h(A | E) + h(B | E) - h(E) - h(A | B | E)).max(0.0);
        Ok(InfoSummary::from_inputs(
            Flavor::Shannon,
            KeyRateInputs {
                h_a: h(A),
                h_b: h(B),
                h_e: h(E),
                i_ab: mi(A, B),
                i_ae: mi(A, E),
                i_be: mi(B, E),
                i_ab_given_e: cmi,
            },
        ))
    }
}

/// `I(A;B) = H(A) + H(B) − H(AB)` from the joint 2×2 histogram.
pub fn mutual_information_bits(a: &BitString, b: &BitString) -> Result<f64> {
    let joint = BinaryJoint::from_histogram(&JointHistogram::from_strings(&[a, b])?);
    let mi = joint.entropy(1) + joint.entropy(2) - joint.entropy(3);
    Ok(clamp_info(mi))
}

/// `I(A;B|E) = H(AE) + H(BE) − H(E) − H(ABE)`.
pub fn conditional_mutual_information(
    a: &BitString,
    b: &BitString,
    e: &BitString,
) -> Result<f64> {
    let joint = BinaryJoint::from_histogram(&JointHistogram::from_strings(&[a, b, e])?);
    let cmi = joint.entropy(5) + joint.entropy(6) - joint.entropy(4) - joint.entropy(7);
    Ok(clamp_info(cmi))
}

fn clamp_info(x: f64) -> f64 {
    if x < 0.0 && x > -INFO_TOL {
        0.0
    } else {
        x.max(0.0)
    }
}

/// Shannon summary of Alice's, Bob's and Eve's bit strings.
pub fn shannon_summary(a: &BitString, b: &BitString, e: &BitString) -> Result<InfoSummary> {
    BinaryJoint::from_histogram(&JointHistogram::from_strings(&[a, b, e])?).summary()
}

/// Plug-in mutual information between two discrete label streams.
pub fn discrete_mutual_information(x: &[u64], y: &[u64]) -> Result<f64> {
    if x.len() != y.len() {
        return domain("streams have different lengths");
    }
    if x.is_empty() {
        return domain("streams are empty");
    }
    let n = x.len() as f64;
    let mut joint: HashMap<(u64, u64), u64> = HashMap::new();
    let mut mx: HashMap<u64, u64> = HashMap::new();
    let mut my: HashMap<u64, u64> = HashMap::new();
    for (&a, &b) in x.iter().zip(y) {
        *joint.entry((a, b)).or_default() += 1;
        *mx.entry(a).or_default() += 1;
        *my.entry(b).or_default() += 1;
    }
    let h = |m: &mut dyn Iterator<Item = u64>| m.map(|c| plogp(c as f64 / n)).sum::<f64>();
    let mi = h(&mut mx.values().copied()) + h(&mut my.values().copied())
        - h(&mut joint.values().copied());
    Ok(clamp_info(mi))
}

/// One-standard-deviation bootstrap errors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BootstrapErrors {
    pub i_ab: f64,
    pub i_ae: f64,
    pub i_be: f64,
    pub k_dr: f64,
    pub k_rr: f64,
}

/// Bootstrap conditional on the bit thresholds.
///
/// With thresholds held at their full-sample values, resampling `N` trials
/// and re-histogramming is the same as drawing the eight cell counts from
/// `Multinomial(N, p̂)`, which is what this does. Use [`bootstrap_trials`]
/// for errors that include threshold estimation.
pub fn bootstrap_errors(
    hist: &JointHistogram,
    resamples: usize,
    seed: u64,
) -> Result<BootstrapErrors> {
    if hist.n_strings() != 3 {
        return domain("bootstrap needs the joint histogram of three strings");
    }
    if resamples < 2 {
        return domain("bootstrap needs at least two resamples");
    }
    let n = hist.total();
    let p = hist.probabilities();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xB007);

    let mut samples = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut counts = vec![0u64; p.len()];
        let mut left = n;
        let mut mass = 1.0;
        for (cell, &pc) in p.iter().enumerate() {
            if left == 0 {
                break;
            }
            if cell + 1 == p.len() || mass <= 0.0 {
                counts[cell] = left;
                break;
            }
            let q = (pc / mass).clamp(0.0, 1.0);
            let k = Binomial::new(left, q)
                .expect("probability clamped to [0, 1]")
                .sample(&mut rng);
            counts[cell] = k;
            left -= k;
            mass -= pc;
        }
        let total = n as f64;
        let joint = BinaryJoint::new(counts.iter().map(|&c| c as f64 / total).collect())?;
        samples.push(joint.summary()?);
    }
    Ok(spread(&samples))
}

/// Nonparametric bootstrap over trials of the whole pipeline: each resample
/// draws `N` trials with replacement, re-derives the three median
/// thresholds and bit strings, and recomputes the summary.
pub fn bootstrap_trials(values: [&[f64]; 3], resamples: usize, seed: u64) -> Result<BootstrapErrors> {
    let n = values[0].len();
    if n == 0 || values.iter().any(|v| v.len() != n) {
        return domain("bootstrap needs three non-empty streams of equal length");
    }
    if resamples < 2 {
        return domain("bootstrap needs at least two resamples");
    }
    let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
    let samples = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::from_seed(key);
            rng.set_stream(0xB007_0000 + r as u64);
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let mut cell = vec![0u8; n];
            for (bit, stream) in values.iter().enumerate() {
                let drawn: Vec<f64> = idx.iter().map(|&i| stream[i]).collect();
                let t = median(&drawn)?;
                for (c, v) in cell.iter_mut().zip(&drawn) {
                    if *v > t {
                        *c |= 1 << bit;
                    }
                }
            }
            let mut counts = [0u64; 8];
            for &c in &cell {
                counts[c as usize] += 1;
            }
            BinaryJoint::new(counts.iter().map(|&c| c as f64 / n as f64).collect())?.summary()
        })
        .collect::<Result<Vec<InfoSummary>>>()?;
    Ok(spread(&samples))
}

fn spread(samples: &[InfoSummary]) -> BootstrapErrors {
    let sd = |f: &dyn Fn(&InfoSummary) -> f64| {
        let xs: Vec<f64> = samples.iter().map(f).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        var.sqrt()
    };
    BootstrapErrors {
        i_ab: sd(&|s| s.i_ab),
        i_ae: sd(&|s| s.i_ae),
        i_be: sd(&|s| s.i_be),
        k_dr: sd(&|s| s.k_dr),
        k_rr: sd(&|s| s.k_rr),
    }
}

/// Pearson correlation at one relative offset of two streams.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffsetCorrelation {
    /// `k` in the pairing `a[i]` with `b[i + k]`.
    pub offset: i64,
    pub r: f64,
    /// Number of overlapping pairs.
    pub pairs: usize,
    /// One of the windows had zero variance; `r` is reported as 0.
    pub degenerate: bool,
}

/// Pearson correlation of `a[i]` against `b[i + k]` for every
/// `k ∈ [−max_offset, max_offset]`, over the overlapping window.
pub fn offset_correlation(a: &[f64], b: &[f64], max_offset: usize) -> Result<Vec<OffsetCorrelation>> {
    if a.len() != b.len() {
        return domain("streams have different lengths");
    }
    if a.len() <= max_offset {
        return domain(format!(
            "streams of length {} are too short for offsets up to {max_offset}",
            a.len()
        ));
    }
    let n = a.len();
    let m = max_offset as i64;
    Ok((-m..=m)
        .map(|k| {
            let shift = k.unsigned_abs() as usize;
            let (xs, ys) = if k >= 0 {
                (&a[..n - shift], &b[shift..])
            } else {
                (&a[shift..], &b[..n - shift])
            };
            let (r, degenerate) = match pearson(xs, ys) {
                Some(r) => (r, false),
                None => (0.0, true),
            };
            OffsetCorrelation {
                offset: k,
                r,
                pairs: xs.len(),
                degenerate,
            }
        })
        .collect())
}

/// Two-pass Pearson correlation; `None` when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&u, &v) in x.iter().zip(y) {
        let (du, dv) = (u - mx, v - my);
        sxy += du * dv;
        sxx += du * du;
        syy += dv * dv;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Exact population-level Shannon quantities for the photon-count model.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationInfo {
    pub summary: InfoSummary,
    /// Thresholds applied to Alice's, Bob's and Eve's counts.
    pub thresholds: [f64; 3],
    /// Probabilities of the eight (A, B, E) bit cells.
    pub cells: [f64; 8],
    /// Thermal probability mass above the truncation (dropped, then the
    /// remainder renormalized).
    pub tail_mass: f64,
}

/// Exact joint law of the three parties' photon counts.
///
/// Alice holds `a ~ Bin(n, ½)` of the `n` source photons; Bob holds
/// `b ~ Bin(n − a, τ²)` and Eve the remainder. The two detectors behind
/// each party's own 50:50 splitter sum back to the party's count, so they
/// do not enter.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactCountLaw {
    side: usize,
    /// `joint[(a·side + b)·side + e]`, zero unless `a + b + e ≤ truncation`.
    joint: Vec<f64>,
    marginals: [Vec<f64>; 3],
    tail_mass: f64,
}

impl ExactCountLaw {
    /// Enumerates every source Fock number up to `truncation`; refuses if
    /// the dropped thermal tail exceeds [`ORACLE_TAIL_LIMIT`].
    pub fn enumerate(mean_photons: f64, eve_t2: f64, truncation: u64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return domain(format!("mean photon number must be >= 0, got {mean_photons}"));
        }
        if !(0.0..=1.0).contains(&eve_t2) {
            return domain(format!("power transmittance must lie in [0, 1], got {eve_t2}"));
        }
        let tail = thermal_tail(mean_photons, truncation);
        if tail > ORACLE_TAIL_LIMIT {
            return Err(Error::Truncation {
                truncation,
                tail,
                limit: ORACLE_TAIL_LIMIT,
            });
        }
        let t = truncation as usize;
        let side = t + 1;
        let idx = |a: usize, b: usize, e: usize| (a * side + b) * side + e;

        let choose = pascal(t);
        let ratio = mean_photons / (mean_photons + 1.0);
        let p0 = 1.0 / (mean_photons + 1.0);

        let mut joint = vec![0.0f64; side * side * side];
        for n in 0..=t {
            let pn = p0 * ratio.powi(n as i32);
            if pn == 0.0 {
                continue;
            }
            let half_n = 0.5f64.powi(n as i32);
            for a in 0..=n {
                let pa = pn * choose[n][a] * half_n;
                let m = n - a;
                for b in 0..=m {
                    let pb = choose[m][b]
                        * eve_t2.powi(b as i32)
                        * (1.0 - eve_t2).powi((m - b) as i32);
                    joint[idx(a, b, m - b)] += pa * pb;
                }
            }
        }
        let total: f64 = joint.iter().sum();
        joint.iter_mut().for_each(|p| *p /= total);

        let mut marginals = [vec![0.0; side], vec![0.0; side], vec![0.0; side]];
        for a in 0..side {
            for b in 0..side - a {
                for e in 0..side - a - b {
                    let p = joint[idx(a, b, e)];
                    marginals[0][a] += p;
                    marginals[1][b] += p;
                    marginals[2][e] += p;
                }
            }
        }
        Ok(Self {
            side,
            joint,
            marginals,
            tail_mass: tail,
        })
    }

    /// Probability of the count triple `(a, b, e)`.
    pub fn probability(&self, a: usize, b: usize, e: usize) -> f64 {
        if a.max(b).max(e) >= self.side {
            return 0.0;
        }
        self.joint[(a * self.side + b) * self.side + e]
    }

    /// Marginal pmf of Alice's (0), Bob's (1) or Eve's (2) count.
    pub fn marginal(&self, party: usize) -> &[f64] {
        &self.marginals[party]
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Population medians with the same convention as the sample median.
    pub fn population_medians(&self) -> [f64; 3] {
        let tie_tol = (2.0 * self.tail_mass).max(1e-12);
        [0, 1, 2].map(|k| population_median(&self.marginals[k], tie_tol))
    }

    /// Shannon summary of the bits `count > threshold`.
    pub fn info_at_thresholds(&self, thresholds: [f64; 3]) -> Result<PopulationInfo> {
        let side = self.side;
        let mut cells = [0.0; 8];
        for a in 0..side {
            for b in 0..side - a {
                for e in 0..side - a - b {
                    let cell = (a as f64 > thresholds[0]) as usize
                        | ((b as f64 > thresholds[1]) as usize) << 1
                        | ((e as f64 > thresholds[2]) as usize) << 2;
                    cells[cell] += self.joint[(a * side + b) * side + e];
                }
            }
        }
        let summary = BinaryJoint::new(cells.to_vec())?.summary()?;
        Ok(PopulationInfo {
            summary,
            thresholds,
            cells,
            tail_mass: self.tail_mass,
        })
    }
}

/// Exact population Shannon summary of the photon-count model, with every
/// party's bits thresholded at the population median of their count.
pub fn exact_enumeration_oracle(
    mean_photons: f64,
    eve_t2: f64,
    truncation: u64,
) -> Result<PopulationInfo> {
    let law = ExactCountLaw::enumerate(mean_photons, eve_t2, truncation)?;
    law.info_at_thresholds(law.population_medians())
}

fn pascal(rows: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(rows + 1);
    for n in 0..=rows {
        let mut row = vec![1.0; n + 1];
        for k in 1..n {
            row[k] = out[n - 1][k - 1] + out[n - 1][k];
        }
        out.push(row);
    }
    out
}

/// Median of a pmf on `0, 1, 2, …`, using the population analogue of the
/// even-length sample convention: when the CDF sits exactly at ½ on `m`,
/// the median is the midpoint of `m` and the next support point.
pub fn population_median(pmf: &[f64], tie_tol: f64) -> f64 {
    let mut cdf = 0.0;
    for (x, &p) in pmf.iter().enumerate() {
        cdf += p;
        if cdf >= 0.5 - tie_tol {
            if (cdf - 0.5).abs() <= tie_tol {
                if let Some(next) = pmf[x + 1..].iter().position(|&q| q > 0.0) {
                    return x as f64 + 0.5 * (next + 1) as f64;
                }
            }
            return x as f64;
        }
    }
    (pmf.len() - 1) as f64
}
