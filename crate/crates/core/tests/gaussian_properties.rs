use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;
use thermal_qkd::gaussian::{
    bosonic_entropy, symplectic_eigenvalues, symplectic_form, BeamSplitter, CovarianceMatrix,
    ModePartition,
};

/// Moduli of the eigenvalues of Ωγ from nalgebra's general (Schur) solver,
/// one per ±iλ pair, sorted descending.
fn dense_oracle_spectrum(gamma: &DMatrix<f64>) -> Vec<f64> {
    let n = gamma.nrows() / 2;
    let m = symplectic_form(n) * gamma;
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Symplectic matrix of a single-mode squeezer followed by a phase rotation
/// on `mode` of an `n`-mode system.
fn local_symplectic(n: usize, mode: usize, squeeze: f64, phase: f64) -> DMatrix<f64> {
    let rot = Matrix2::new(phase.cos(), phase.sin(), -phase.sin(), phase.cos());
    let sq = Matrix2::new(squeeze, 0.0, 0.0, 1.0 / squeeze);
    let block = rot * sq;
    let mut s = DMatrix::identity(2 * n, 2 * n);
    for i in 0..2 {
        for j in 0..2 {
            s[(2 * mode + i, 2 * mode + j)] = block[(i, j)];
        }
    }
    s
}

/// Beam splitter as a full symplectic matrix.
fn splitter_symplectic(n: usize, a: usize, b: usize, tau: f64, mu: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * n, 2 * n);
    for q in 0..2 {
        let (ra, rb) = (2 * a + q, 2 * b + q);
        s[(ra, ra)] = tau;
        s[(ra, rb)] = mu;
        s[(rb, ra)] = -mu;
        s[(rb, rb)] = tau;
    }
    s
}

#[derive(Debug, Clone)]
struct RandomState {
    nus: Vec<f64>,
    squeezes: Vec<(f64, f64)>,
    splitters: Vec<(usize, usize, f64)>,
}

impl RandomState {
    /// Williamson form `S·diag(ν)·Sᵀ`, so the spectrum is `ν` by construction.
    fn matrix(&self) -> DMatrix<f64> {
        let n = self.nus.len();
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2 * n,
            self.nus.iter().flat_map(|&v| [v, v]),
        ));
        let mut s = DMatrix::identity(2 * n, 2 * n);
        for (k, &(r, phi)) in self.squeezes.iter().enumerate() {
            s = local_symplectic(n, k, r, phi) * s;
        }
        for &(a, b, theta) in &self.splitters {
            if a != b {
                s = splitter_symplectic(n, a, b, theta.cos(), theta.sin()) * s;
            }
        }
        let g = &s * d * s.transpose();
        (&g + g.transpose()) * 0.5
    }
}

fn random_state(max_modes: usize) -> impl Strategy<Value = RandomState> {
    (1..=max_modes).prop_flat_map(|n| {
        (
            prop::collection::vec(1.0f64..50.0, n),
            prop::collection::vec((0.5f64..2.0, 0.0f64..6.28), n),
            prop::collection::vec((0..n, 0..n, 0.0f64..1.57), 0..6),
        )
            .prop_map(|(nus, squeezes, splitters)| RandomState {
                nus,
                squeezes,
                splitters,
            })
    })
}

fn thermal_chain(v: f64, extra: usize, splitters: &[(usize, usize, f64)]) -> CovarianceMatrix {
    let mut g = CovarianceMatrix::thermal((v - 1.0) / 2.0)
        .unwrap()
        .append_vacuum(extra)
        .unwrap();
    for &(a, b, t2) in splitters {
        if a != b {
            g = g
                .apply_beam_splitter(a, b, &BeamSplitter::from_power_transmittance(t2).unwrap())
                .unwrap();
        }
    }
    g
}

/// Closed-form two-mode spectrum with Δ = det γ₁ + det γ₂ + sign·2·det C.
fn two_mode_closed_form(g: &DMatrix<f64>, sign: f64) -> (f64, f64) {
    let det2 = |r: usize, c: usize| g[(r, c)] * g[(r + 1, c + 1)] - g[(r, c + 1)] * g[(r + 1, c)];
    let delta = det2(0, 0) + det2(2, 2) + sign * 2.0 * det2(0, 2);
    let det = g.determinant();
    let root = (delta * delta - 4.0 * det).max(0.0).sqrt();
    (
        (0.5 * (delta + root)).sqrt(),
        (0.5 * (delta - root)).max(0.0).sqrt(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_matches_williamson_construction(state in random_state(4)) {
        let g = state.matrix();
        let spectrum = symplectic_eigenvalues(&g).unwrap();
        let mut expected = state.nus.clone();
        expected.sort_by(|a, b| b.total_cmp(a));
        for (got, want) in spectrum.values().iter().zip(&expected) {
            prop_assert!((got - want).abs() < 1e-9 * want.max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn spectrum_matches_dense_eigensolver(state in random_state(4)) {
        let g = state.matrix();
        let spectrum = symplectic_eigenvalues(&g).unwrap();
        let oracle = dense_oracle_spectrum(&g);
        for (got, want) in spectrum.values().iter().zip(&oracle) {
            prop_assert!((got - want).abs() < 1e-8 * want.max(1.0), "{got} vs {want}");
        }
    }

    #[test]
    fn one_mode_spectrum_is_sqrt_det(state in random_state(1)) {
        let g = state.matrix();
        let lambda = symplectic_eigenvalues(&g).unwrap().values()[0];
        prop_assert!((lambda - g.determinant().sqrt()).abs() < 1e-9 * lambda);
    }

    #[test]
    fn two_mode_spectrum_matches_standard_closed_form(
        nu1 in 1.0f64..30.0,
        nu2 in 1.0f64..30.0,
        squeezes in prop::collection::vec((0.5f64..2.0, 0.0f64..6.28), 2),
        theta in 0.0f64..1.57,
    ) {
        let state = RandomState { nus: vec![nu1, nu2], squeezes, splitters: vec![(0, 1, theta)] };
        let g = state.matrix();
        let spectrum = symplectic_eigenvalues(&g).unwrap();
        let (plus, minus) = two_mode_closed_form(&g, 1.0);
        prop_assert!((spectrum.values()[0] - plus).abs() < 1e-9 * plus);
        prop_assert!((spectrum.values()[1] - minus).abs() < 1e-7 * plus);
    }

    #[test]
    fn beam_splitters_preserve_spectrum(
        v in 1.0f64..400.0,
        extra in 1usize..5,
        splitters in prop::collection::vec((0usize..6, 0usize..6, 0.0f64..=1.0), 1..8),
    ) {
        let n = extra + 1;
        let splitters: Vec<_> = splitters.into_iter().map(|(a, b, t)| (a % n, b % n, t)).collect();
        let g = thermal_chain(v, extra, &splitters);
        let spectrum = g.symplectic_spectrum();
        prop_assert!((spectrum.values()[0] - v).abs() < 1e-9 * v);
        for &l in &spectrum.values()[1..] {
            prop_assert!((l - 1.0).abs() < 1e-9);
        }
        let n_bar = (v - 1.0) / 2.0;
        prop_assert!((g.von_neumann_entropy() - bosonic_entropy(n_bar)).abs() < 1e-9);
    }

    #[test]
    fn inverse_splitter_restores_state(
        state in random_state(3),
        t2 in 0.0f64..=1.0,
        a in 0usize..3,
        b in 0usize..3,
    ) {
        let g = CovarianceMatrix::new(state.matrix()).unwrap();
        let n = g.n_modes();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b);
        let bs = BeamSplitter::from_power_transmittance(t2).unwrap();
        let back = g
            .apply_beam_splitter(a, b, &bs)
            .unwrap()
            .apply_beam_splitter(a, b, &bs.inverse())
            .unwrap();
        let scale = g.matrix().amax().max(1.0);
        prop_assert!((back.matrix() - g.matrix()).amax() < 1e-12 * scale);
    }

    #[test]
    fn entropy_nonnegative_and_zero_only_for_pure(state in random_state(3)) {
        let g = CovarianceMatrix::new(state.matrix()).unwrap();
        let s = g.von_neumann_entropy();
        prop_assert!(s >= 0.0);
        let pure = state.nus.iter().all(|&v| (v - 1.0).abs() < 1e-9);
        prop_assert_eq!(s == 0.0, pure);
    }

    #[test]
    fn mutual_information_symmetric_and_nonnegative(state in random_state(4)) {
        let g = CovarianceMatrix::new(state.matrix()).unwrap();
        let n = g.n_modes();
        prop_assume!(n >= 2);
        let a = ModePartition::new(vec![0]).unwrap();
        let b = ModePartition::new((1..n).collect()).unwrap();
        let ab = g.mutual_information(&a, &b).unwrap();
        prop_assert_eq!(ab, g.mutual_information(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
    }
}

#[test]
fn post_splitter_state_spectrum_from_dense_oracle() {
    let g = thermal_chain(3.0, 1, &[(0, 1, 0.5)]);
    let oracle = dense_oracle_spectrum(g.matrix());
    assert_abs_diff_eq!(oracle[0], 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(oracle[1], 1.0, epsilon = 1e-12);
    let s = g.symplectic_spectrum();
    assert_abs_diff_eq!(s.values()[0], oracle[0], epsilon = 1e-12);
    assert_abs_diff_eq!(s.values()[1], oracle[1], epsilon = 1e-12);
}

#[test]
fn flipped_cross_determinant_sign_fails_for_passively_correlated_modes() {
    // Split thermal light: C = c·I with det C = c² > 0. The +2 det C form
    // reproduces the solver; flipping the sign does not.
    let g = thermal_chain(9.0, 1, &[(0, 1, 0.5)]);
    let s = g.symplectic_spectrum();
    let (plus, minus) = two_mode_closed_form(g.matrix(), 1.0);
    assert_abs_diff_eq!(s.values()[0], plus, epsilon = 1e-9);
    assert_abs_diff_eq!(s.values()[1], minus, epsilon = 1e-6);
    let (flipped_plus, _) = two_mode_closed_form(g.matrix(), -1.0);
    assert!((flipped_plus - plus).abs() > 1.0);
}

#[test]
fn product_state_mutual_information_is_zero() {
    let a = CovarianceMatrix::thermal(3.0).unwrap();
    let mut m = DMatrix::identity(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(a.matrix());
    m[(2, 2)] = 5.0;
    m[(3, 3)] = 5.0;
    let g = CovarianceMatrix::new(m).unwrap();
    let mi = g
        .mutual_information(&ModePartition::new(vec![0]).unwrap(), &ModePartition::new(vec![1]).unwrap())
        .unwrap();
    assert_abs_diff_eq!(mi, 0.0, epsilon = 1e-12);
}
