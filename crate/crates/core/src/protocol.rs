//! The central-broadcast protocol as a Gaussian circuit.
//!
//! A thermal source is split 50:50 between Alice and the channel to Bob.
//! Eve taps the channel with a splitter of amplitude transmittance `τ`
//! and keeps the reflected beam. Each party then splits what they receive
//! 50:50 onto two detectors (X and P). The final state has six modes,
//! ordered `(A₁, A₂, B₁, B₂, E₁, E₂)`.

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gaussian::{BeamSplitter, CovarianceMatrix, ModePartition};
use crate::info::{Flavor, InfoSummary, KeyRateInputs};

pub const A1: usize = 0;
pub const A2: usize = 1;
pub const B1: usize = 2;
pub const B2: usize = 3;
pub const E1: usize = 4;
pub const E2: usize = 5;

/// Parameters of one protocol configuration. Every splitter other than
/// Eve's is 50:50.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    mean_photons: f64,
    eve: BeamSplitter,
    /// Kept alongside `eve` so the sampler sees the exact value requested
    /// rather than `sqrt(t2)²`.
    eve_t2: f64,
}

impl ProtocolConfig {
    /// `eve_t2` is the power transmittance `τ²` of Eve's splitter.
    pub fn new(mean_photons: f64, eve_t2: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return domain(format!(
                "mean photon number must be finite and >= 0, got {mean_photons}"
            ));
        }
        Ok(Self {
            mean_photons,
            eve: BeamSplitter::from_power_transmittance(eve_t2)?,
            eve_t2,
        })
    }

    pub fn with_eve_splitter(mean_photons: f64, eve: BeamSplitter) -> Result<Self> {
        let mut cfg = Self::new(mean_photons, 1.0)?;
        if eve.mu() < 0.0 {
            return domain("Eve's splitter reflectance must be nonnegative");
        }
        cfg.eve = eve;
        cfg.eve_t2 = eve.power_transmittance();
        Ok(cfg)
    }

    pub fn mean_photons(&self) -> f64 {
        self.mean_photons
    }

    /// Source quadrature variance `V = 2n̄ + 1`.
    pub fn variance(&self) -> f64 {
        2.0 * self.mean_photons + 1.0
    }

    pub fn eve_splitter(&self) -> BeamSplitter {
        self.eve
    }

    /// Amplitude transmittance `τ` of Eve's splitter.
    pub fn eve_tau(&self) -> f64 {
        self.eve.tau()
    }

    /// Amplitude reflectance `μ` of Eve's splitter.
    pub fn eve_mu(&self) -> f64 {
        self.eve.mu()
    }

    /// Power transmittance `τ²`, the binomial probability used by the sampler.
    pub fn eve_t2(&self) -> f64 {
        self.eve_t2
    }

    /// Same source with Eve's transmittance and reflectance exchanged.
    pub fn swapped_eve(&self) -> Self {
        Self {
            mean_photons: self.mean_photons,
            eve: BeamSplitter::new(self.eve.mu(), self.eve.tau())
                .expect("swapping a valid splitter keeps it valid"),
            eve_t2: 1.0 - self.eve_t2,
        }
    }
}

/// Party labels for the two-mode blocks of the final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
    Eve,
}

impl Party {
    pub const ALL: [Party; 3] = [Party::Alice, Party::Bob, Party::Eve];

    pub fn modes(self) -> ModePartition {
        match self {
            Party::Alice => ModePartition::range(A1, 2),
            Party::Bob => ModePartition::range(B1, 2),
            Party::Eve => ModePartition::range(E1, 2),
        }
    }
}

/// The six-mode covariance matrix after all splitters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolState {
    config: ProtocolConfig,
    gamma: CovarianceMatrix,
}

impl ProtocolState {
    /// Runs the circuit: thermal ⊗ vacuum⁵, then the source splitter,
    /// Eve's tap, and the three measurement splitters. The incoming signal
    /// is always the splitter's first port.
    pub fn build(config: &ProtocolConfig) -> Result<Self> {
        let half = BeamSplitter::balanced();
        let gamma = CovarianceMatrix::thermal(config.mean_photons)?
            .append_vacuum(5)?
            // source: thermal on A₁, vacuum on B₁ → Alice's beam, Bob's channel
            .apply_beam_splitter(A1, B1, &half)?
            // Eve: transmitted stays on B₁, reflected goes to E₁
            .apply_beam_splitter(B1, E1, &config.eve)?
            .apply_beam_splitter(A1, A2, &half)?
            .apply_beam_splitter(B1, B2, &half)?
            .apply_beam_splitter(E1, E2, &half)?;
        Ok(Self {
            config: *config,
            gamma,
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn covariance(&self) -> &CovarianceMatrix {
        &self.gamma
    }

    /// Two-mode covariance matrix of one party.
    pub fn party_block(&self, party: Party) -> CovarianceMatrix {
        self.gamma
            .reduce(&party.modes())
            .expect("party modes are valid for the six-mode state")
    }

    /// 4×4 cross-covariance block between two parties' modes.
    pub fn cross_block(&self, row: Party, col: Party) -> DMatrix<f64> {
        let r0 = 2 * row.modes().indices()[0];
        let c0 = 2 * col.modes().indices()[0];
        self.gamma.matrix().view((r0, c0), (4, 4)).into_owned()
    }

    /// Submatrices in the same labelled form as [`closed_form_submatrices`].
    pub fn submatrices(&self) -> Submatrices {
        Submatrices {
            alice: self.party_block(Party::Alice).into_inner(),
            bob: self.party_block(Party::Bob).into_inner(),
            eve: self.party_block(Party::Eve).into_inner(),
            c_ab: self.cross_block(Party::Alice, Party::Bob),
            c_ae: self.cross_block(Party::Alice, Party::Eve),
            c_be: self.cross_block(Party::Bob, Party::Eve),
        }
    }

    pub fn mutual_information(&self, x: Party, y: Party) -> Result<f64> {
        self.gamma.mutual_information(&x.modes(), &y.modes())
    }

    /// `S(AE) + S(BE) − S(E) − S(ABE)`, clamped at 0.
    pub fn conditional_mutual_information(&self) -> Result<f64> {
        let a = Party::Alice.modes();
        let b = Party::Bob.modes();
        let e = Party::Eve.modes();
        let ae = a.union(&e)?;
        let be = b.union(&e)?;
        let abe = ae.union(&b)?;
        let cmi = self.gamma.entropy_of(&ae)? + self.gamma.entropy_of(&be)?
            - self.gamma.entropy_of(&e)?
            - self.gamma.entropy_of(&abe)?;
        Ok(cmi.max(0.0))
    }

    /// Entropies, pairwise mutual informations and key-rate bounds.
    pub fn information(&self) -> Result<InfoSummary> {
        let entropy = |p: Party| self.gamma.entropy_of(&p.modes());
        Ok(InfoSummary::from_inputs(
            Flavor::VonNeumann,
            KeyRateInputs {
                h_a: entropy(Party::Alice)?,
                h_b: entropy(Party::Bob)?,
                h_e: entropy(Party::Eve)?,
                i_ab: self.mutual_information(Party::Alice, Party::Bob)?,
                i_ae: self.mutual_information(Party::Alice, Party::Eve)?,
                i_be: self.mutual_information(Party::Bob, Party::Eve)?,
                i_ab_given_e: self.conditional_mutual_information()?,
            },
        ))
    }
}

/// von Neumann information summary for a configuration.
pub fn protocol_mutual_informations(config: &ProtocolConfig) -> Result<InfoSummary> {
    ProtocolState::build(config)?.information()
}

/// The six labelled 4×4 blocks of the final covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Submatrices {
    pub alice: DMatrix<f64>,
    pub bob: DMatrix<f64>,
    pub eve: DMatrix<f64>,
    pub c_ab: DMatrix<f64>,
    pub c_ae: DMatrix<f64>,
    pub c_be: DMatrix<f64>,
}

impl Submatrices {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &DMatrix<f64>)> {
        [
            ("gamma_A1A2", &self.alice),
            ("gamma_B1B2", &self.bob),
            ("gamma_E1E2", &self.eve),
            ("C_AB", &self.c_ab),
            ("C_AE", &self.c_ae),
            ("C_BE", &self.c_be),
        ]
        .into_iter()
    }

    /// Largest entrywise difference over all six blocks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|((_, x), (_, y))| (x - y).amax())
            .fold(0.0, f64::max)
    }
}

/// `m ⊗ I₂` in `(X₁, P₁, X₂, P₂)` ordering.
fn kron_identity(m: Matrix2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(4, 4, |i, j| if i % 2 == j % 2 { m[(i / 2, j / 2)] } else { 0.0 })
}

/// The six blocks written out directly from their closed forms, without
/// running the circuit.
pub fn closed_form_submatrices(config: &ProtocolConfig) -> Submatrices {
    let v = config.variance();
    let t = config.eve_tau();
    let m = config.eve_mu();
    let (t2, m2) = (t * t, m * m);

    let sym = |d: f64, o: f64| kron_identity(Matrix2::new(d, o, o, d));

    let alice = sym((v + 3.0) / 4.0, -(v - 1.0) / 4.0);
    let bob = sym(
        t2 / 4.0 * (v + 1.0) + (1.0 + m2) / 2.0,
        -t2 / 4.0 * (v + 1.0) + (1.0 - m2) / 2.0,
    );
    let eve = sym(
        m2 / 4.0 * (v + 1.0) + (1.0 + t2) / 2.0,
        -m2 / 4.0 * (v + 1.0) + (1.0 - t2) / 2.0,
    );
    let ab = t / 4.0 * (1.0 - v);
    let ae = m / 4.0 * (1.0 - v);
    let be = t * m / 4.0 * (v - 1.0);
    Submatrices {
        alice,
        bob,
        eve,
        c_ab: sym(ab, -ab),
        c_ae: sym(-ae, ae),
        c_be: sym(-be, be),
    }
}
