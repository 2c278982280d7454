//! Zero-mean Gaussian states described by their quadrature covariance matrix.
//!
//! Quadratures are stored in mode order `(X₁, P₁, …, X_N, P_N)` with the
//! vacuum variance normalized to 1. A thermal mode with mean photon number
//! `n̄` therefore has quadrature variance `V = 2n̄ + 1`. Every state handled
//! here (thermal sources, vacua and anything reachable from them through
//! beam splitters) has zero mean, so no displacement vector is carried.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Slack allowed below the vacuum bound before a state is rejected.
pub const PHYSICAL_TOL: f64 = 1e-9;

/// Relative tolerance for accepting a user-supplied matrix as symmetric.
const SYMMETRY_TOL: f64 = 1e-12;

/// Tolerance on `τ² + μ² = 1` for beam splitters.
const UNITARITY_TOL: f64 = 1e-12;

/// Bosonic entropy function `G(x) = (x+1)·log₂(x+1) − x·log₂x` in bits.
///
/// This is the entropy of a thermal mode with mean photon number `x`.
/// `G(0) = 0` and negative arguments (rounding below the vacuum) clamp to 0.
pub fn bosonic_entropy(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

/// Two-port beam splitter with amplitude transmittance `tau` and amplitude
/// reflectance `mu`.
///
/// Acting on a pair of modes `(a, b)` it maps the quadratures as
/// `a' = τa + μb`, `b' = −μa + τb`, identically for X and P.
/// The reflectance may be negative so that the inverse splitter `(τ, −μ)` is
/// representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitter {
    tau: f64,
    mu: f64,
}

impl BeamSplitter {
    pub fn new(tau: f64, mu: f64) -> Result<Self> {
        if !tau.is_finite() || !mu.is_finite() {
            return domain("beam splitter coefficients must be finite");
        }
        if !(0.0..=1.0).contains(&tau) || mu.abs() > 1.0 {
            return domain(format!(
                "beam splitter needs tau in [0, 1] and |mu| <= 1, got ({tau}, {mu})"
            ));
        }
        if (tau * tau + mu * mu - 1.0).abs() > UNITARITY_TOL {
            return domain(format!(
                "beam splitter is not lossless: tau^2 + mu^2 = {}",
                tau * tau + mu * mu
            ));
        }
        Ok(Self { tau, mu })
    }

    /// Splitter with power transmittance `t2 = τ²`.
    pub fn from_power_transmittance(t2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t2) {
            return domain(format!("power transmittance must lie in [0, 1], got {t2}"));
        }
        Ok(Self {
            tau: t2.sqrt(),
            mu: (1.0 - t2).sqrt(),
        })
    }

    /// 50:50 splitter.
    pub fn balanced() -> Self {
        Self {
            tau: FRAC_1_SQRT_2,
            mu: FRAC_1_SQRT_2,
        }
    }

    pub fn identity() -> Self {
        Self { tau: 1.0, mu: 0.0 }
    }

    /// The splitter that undoes this one.
    pub fn inverse(&self) -> Self {
        Self {
            tau: self.tau,
            mu: -self.mu,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn power_transmittance(&self) -> f64 {
        self.tau * self.tau
    }
}

/// A strictly increasing list of mode indices selecting a subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModePartition {
    indices: Vec<usize>,
}

impl ModePartition {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return domain(format!(
                "mode partition must be strictly increasing, got {indices:?}"
            ));
        }
        Ok(Self { indices })
    }

    /// Modes `start..start + len`.
    pub fn range(start: usize, len: usize) -> Self {
        Self {
            indices: (start..start + len).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !self.indices.iter().any(|i| other.indices.contains(i))
    }

    /// Union of two disjoint partitions.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if !self.is_disjoint(other) {
            return domain(format!(
                "partitions {:?} and {:?} overlap",
                self.indices, other.indices
            ));
        }
        let mut indices: Vec<usize> = self.indices.iter().chain(&other.indices).copied().collect();
        indices.sort_unstable();
        Ok(Self { indices })
    }
}

/// Symplectic eigenvalues of a covariance matrix, sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::INFINITY)
    }

    /// von Neumann entropy `Σ G((λ − 1)/2)` in bits.
    ///
    /// Eigenvalues are clamped to `max(λ, 1)`; those within
    /// [`PHYSICAL_TOL`] of 1 contribute exactly zero.
    pub fn entropy(&self) -> f64 {
        self.values
            .iter()
            .filter(|&&l| l - 1.0 > PHYSICAL_TOL)
            .map(|&l| bosonic_entropy((l.max(1.0) - 1.0) / 2.0))
            .sum()
    }
}

/// Symplectic eigenvalues of a raw `2N × 2N` matrix.
///
/// These are the moduli of the eigenvalues of `Ωγ`. They are obtained from
/// the real antisymmetric matrix `A = γ^{½} Ω γ^{½}`, which is similar to
/// `Ωγ`: the eigenvalues of `AᵀA = −A²` are the `λᵢ²`, each appearing twice.
/// Requires `γ` symmetric and positive definite; any physical state is.
pub fn symplectic_eigenvalues(matrix: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    check_shape(matrix)?;
    check_symmetric(matrix)?;
    let dim = matrix.nrows();

    let eig = SymmetricEigen::new(matrix.clone());
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&v| v <= 0.0) {
        return Err(Error::Unphysical { eigenvalue: bad });
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let sqrt_gamma = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();

    let omega = symplectic_form(dim / 2);
    let a = &sqrt_gamma * omega * &sqrt_gamma;
    let mut squared = a.transpose() * &a;
    symmetrize(&mut squared);

    let mut sq: Vec<f64> = SymmetricEigen::new(squared).eigenvalues.iter().copied().collect();
    sq.sort_by(|x, y| y.total_cmp(x));
    let values = sq
        .chunks_exact(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect();
    Ok(SymplecticSpectrum { values })
}

/// The standard symplectic form `⊕ [[0, 1], [−1, 0]]` on `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

fn check_shape(matrix: &DMatrix<f64>) -> Result<()> {
    let (r, c) = matrix.shape();
    if r != c || r == 0 || r % 2 != 0 {
        return domain(format!(
            "covariance matrix must be 2N x 2N with N >= 1, got {r} x {c}"
        ));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return domain("covariance matrix has non-finite entries");
    }
    Ok(())
}

fn check_symmetric(matrix: &DMatrix<f64>) -> Result<()> {
    let n = matrix.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let (x, y) = (matrix[(i, j)], matrix[(j, i)]);
            let scale = 1f64.max(x.abs()).max(y.abs());
            if (x - y).abs() > SYMMETRY_TOL * scale {
                return domain(format!(
                    "covariance matrix is not symmetric at ({i}, {j}): {x} vs {y}"
                ));
            }
        }
    }
    Ok(())
}

fn symmetrize(matrix: &mut DMatrix<f64>) {
    let n = matrix.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (matrix[(i, j)] + matrix[(j, i)]);
            matrix[(i, j)] = avg;
            matrix[(j, i)] = avg;
        }
    }
}

/// Covariance matrix of a zero-mean Gaussian state.
///
/// Always symmetric as stored, with strictly positive diagonal and every
/// symplectic eigenvalue at least `1 − PHYSICAL_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates and wraps a raw matrix. Entries that are symmetric up to
    /// rounding are averaged so the stored matrix is exactly symmetric.
    pub fn new(mut matrix: DMatrix<f64>) -> Result<Self> {
        check_shape(&matrix)?;
        check_symmetric(&matrix)?;
        symmetrize(&mut matrix);
        if let Some(&d) = matrix.diagonal().iter().find(|&&d| d <= 0.0) {
            return domain(format!("covariance matrix has non-positive diagonal entry {d}"));
        }
        let spectrum = symplectic_eigenvalues(&matrix)?;
        if spectrum.min() < 1.0 - PHYSICAL_TOL {
            return Err(Error::Unphysical {
                eigenvalue: spectrum.min(),
            });
        }
        Ok(Self { matrix })
    }

    /// Output of a unitary (or a reduction) of a valid state; skips the
    /// physicality check.
    fn from_trusted(mut matrix: DMatrix<f64>) -> Self {
        symmetrize(&mut matrix);
        Self { matrix }
    }

    /// `n_modes` vacuum modes: the identity matrix.
    pub fn vacuum(n_modes: usize) -> Self {
        assert!(n_modes > 0, "a state needs at least one mode");
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Single thermal mode `diag(V, V)` with `V = 2n̄ + 1`.
    pub fn thermal(mean_photons: f64) -> Result<Self> {
        if !mean_photons.is_finite() || mean_photons < 0.0 {
            return domain(format!(
                "mean photon number must be finite and >= 0, got {mean_photons}"
            ));
        }
        let v = 2.0 * mean_photons + 1.0;
        Ok(Self {
            matrix: DMatrix::from_diagonal_element(2, 2, v),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Block-diagonal extension by `k` vacuum modes.
    pub fn append_vacuum(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return domain("append_vacuum needs at least one extra mode");
        }
        let n = self.matrix.nrows();
        let mut out = DMatrix::identity(n + 2 * k, n + 2 * k);
        out.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        Ok(Self { matrix: out })
    }

    /// Applies `bs` to the mode pair `(mode_a, mode_b)`; `mode_a` is the
    /// splitter's first port.
    pub fn apply_beam_splitter(
        &self,
        mode_a: usize,
        mode_b: usize,
        bs: &BeamSplitter,
    ) -> Result<Self> {
        let n_modes = self.n_modes();
        for index in [mode_a, mode_b] {
            if index >= n_modes {
                return Err(Error::Index { index, n_modes });
            }
        }
        if mode_a == mode_b {
            return domain(format!("beam splitter needs two distinct modes, got {mode_a} twice"));
        }
        let (t, m) = (bs.tau, bs.mu);
        let mut g = self.matrix.clone();
        for q in 0..2 {
            let (ra, rb) = (2 * mode_a + q, 2 * mode_b + q);
            // S·γ: mix rows
            for c in 0..g.ncols() {
                let (x, y) = (g[(ra, c)], g[(rb, c)]);
                g[(ra, c)] = t * x + m * y;
                g[(rb, c)] = -m * x + t * y;
            }
        }
        for q in 0..2 {
            let (ca, cb) = (2 * mode_a + q, 2 * mode_b + q);
            // (S·γ)·Sᵀ: mix columns
            for r in 0..g.nrows() {
                let (x, y) = (g[(r, ca)], g[(r, cb)]);
                g[(r, ca)] = t * x + m * y;
                g[(r, cb)] = -m * x + t * y;
            }
        }
        Ok(Self::from_trusted(g))
    }

    /// Principal submatrix on the quadratures of the selected modes.
    pub fn reduce(&self, part: &ModePartition) -> Result<Self> {
        if part.is_empty() {
            return domain("cannot reduce onto an empty partition");
        }
        let n_modes = self.n_modes();
        if let Some(&index) = part.indices().iter().find(|&&i| i >= n_modes) {
            return Err(Error::Index { index, n_modes });
        }
        let rows: Vec<usize> = part
            .indices()
            .iter()
            .flat_map(|&m| [2 * m, 2 * m + 1])
            .collect();
        let k = rows.len();
        let out = DMatrix::from_fn(k, k, |i, j| self.matrix[(rows[i], rows[j])]);
        Ok(Self { matrix: out })
    }

    pub fn symplectic_spectrum(&self) -> SymplecticSpectrum {
        symplectic_eigenvalues(&self.matrix)
            .expect("validated covariance matrix is symmetric positive definite")
    }

    /// von Neumann entropy in bits.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.symplectic_spectrum().entropy()
    }

    /// Entropy of the subsystem selected by `part`.
    pub fn entropy_of(&self, part: &ModePartition) -> Result<f64> {
        Ok(self.reduce(part)?.von_neumann_entropy())
    }

    /// Quantum mutual information `S(a) + S(b) − S(ab)` in bits, clamped at 0.
    pub fn mutual_information(&self, a: &ModePartition, b: &ModePartition) -> Result<f64> {
        let ab = a.union(b)?;
        let mi = self.entropy_of(a)? + self.entropy_of(b)? - self.entropy_of(&ab)?;
        Ok(mi.max(0.0))
    }
}
