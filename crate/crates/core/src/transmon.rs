//! Charge-basis diagonalization of the voltage-biased superconducting
//! island: eigenfrequencies, charge matrix elements, and charge dispersion.
//!
//! The island Hamiltonian in the Cooper-pair number basis `|m⟩`,
//! `m = −nCut..nCut`, has diagonal `4·EC·(m − n_g)²` and nearest-neighbor
//! Josephson coupling `−EJ/2`. The charge operator (which both the drive
//! and the dissipative bath couple to) is diagonal in this basis with
//! entries `2e·(m − n_g)`.

use ndarray::Array2;

use crate::consts::E_CHARGE;
use crate::consts::HBAR;
use crate::error::{Error, Result};
use crate::linalg;
use crate::liouville::DenseOperator;
use crate::C64;

/// Spectrum of the island truncated to `n_levels` eigenstates.
#[derive(Debug, Clone)]
pub struct TransmonSpectrum {
    /// Eigen angular frequencies (rad/s) with the ground state shifted
    /// to 0; strictly increasing in the transmon regime.
    pub omegas: Vec<f64>,
    /// Charge matrix elements `X_ij = ⟨i|X|j⟩` (coulomb) in the eigenbasis,
    /// Hermitian, with a deterministic eigenvector phase convention.
    pub charge_me: DenseOperator,
    /// Charge dispersions `ε_k` (joule, signed), from the asymptotic
    /// closed form. Empty if the spectrum was produced by the low-level
    /// [`diagonalize`] entry point, which cannot recover `EC`/`EJ` from a
    /// bare Hamiltonian; [`TransmonSpectrum::compute`] always fills them.
    pub epsilons: Vec<f64>,
    /// Number of retained levels.
    pub n_levels: usize,
    /// Charge-basis cutoff used for diagonalization.
    pub n_cut: usize,
}

/// Default charge cutoff for a given `EJ/EC`: enough margin that retained
/// eigenvalues are cutoff-independent to 10⁻¹⁰ for ratios up to ~400.
pub fn default_cutoff(ej_over_ec: f64) -> usize {
    let base = (4.0 + ej_over_ec.max(0.0).sqrt()).ceil() as usize + 5;
    base.max(10)
}

fn check_cutoff(ec: f64, ej: f64, n_cut: usize) -> Result<()> {
    let needed = (4.0 + (ej / ec).sqrt()).ceil() as usize;
    if n_cut < needed {
        return Err(Error::TruncationNotConverged {
            detail: format!(
                "charge cutoff {n_cut} below required minimum {needed} for EJ/EC = {:.1}",
                ej / ec
            ),
        });
    }
    Ok(())
}

/// Island Hamiltonian in the charge basis, dimension `2·n_cut + 1`, joule.
pub fn build_charge_hamiltonian(ec: f64, ej: f64, ng: f64, n_cut: usize) -> Result<DenseOperator> {
    if !(ec > 0.0) {
        return Err(Error::ParameterDomain {
            what: "EC",
            value: ec,
            requirement: "must be > 0",
        });
    }
    if !(ej >= 0.0) {
        return Err(Error::ParameterDomain {
            what: "EJ",
            value: ej,
            requirement: "must be >= 0",
        });
    }
    check_cutoff(ec, ej, n_cut)?;
    let dim = 2 * n_cut + 1;
    let mut h = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
    for i in 0..dim {
        let m = i as f64 - n_cut as f64;
        h[[i, i]] = C64::new(4.0 * ec * (m - ng) * (m - ng), 0.0);
        if i + 1 < dim {
            h[[i, i + 1]] = C64::new(-ej / 2.0, 0.0);
            h[[i + 1, i]] = C64::new(-ej / 2.0, 0.0);
        }
    }
    Ok(h)
}

/// Island charge operator in the same charge basis, coulomb: diagonal
/// entries `2e·(m − n_g)`.
pub fn build_charge_operator(ng: f64, n_cut: usize) -> DenseOperator {
    let dim = 2 * n_cut + 1;
    let mut x = Array2::from_elem((dim, dim), C64::new(0.0, 0.0));
    for i in 0..dim {
        let m = i as f64 - n_cut as f64;
        x[[i, i]] = C64::new(2.0 * E_CHARGE * (m - ng), 0.0);
    }
    x
}

/// Diagonalize a charge-basis Hamiltonian `h` (joule) and rotate the
/// charge operator `x` into its eigenbasis, keeping the lowest `n_levels`
/// states.
///
/// Eigenvector phases are fixed by making each vector's largest-magnitude
/// component real positive, so matrix elements are reproducible between
/// runs. The returned spectrum has an empty dispersion list; use
/// [`TransmonSpectrum::compute`] when dispersions are needed.
pub fn diagonalize(h: &DenseOperator, x: &DenseOperator, n_levels: usize) -> Result<TransmonSpectrum> {
    let dim = h.nrows();
    if x.nrows() != dim || x.ncols() != dim {
        return Err(Error::DimensionMismatch {
            context: "diagonalize charge operator",
            expected: dim,
            got: x.nrows(),
        });
    }
    if n_levels > dim {
        return Err(Error::DimensionMismatch {
            context: "diagonalize level count",
            expected: dim,
            got: n_levels,
        });
    }
    let defect = linalg::hermiticity_defect(h);
    let scale = linalg::one_norm(h).max(f64::MIN_POSITIVE);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian {
            context: "diagonalize",
            deviation: defect,
        });
    }
    // The charge-basis Hamiltonian and charge operator are real symmetric;
    // the eigensolver here handles exactly that class.
    let mut h_re = Array2::<f64>::zeros((dim, dim));
    let mut max_im = 0.0_f64;
    for i in 0..dim {
        for j in 0..dim {
            h_re[[i, j]] = h[[i, j]].re;
            max_im = max_im.max(h[[i, j]].im.abs());
        }
    }
    if max_im > 1e-12 * scale {
        return Err(Error::NumericalCheck {
            context: "diagonalize",
            detail: format!(
                "complex Hermitian input not supported (max |Im| = {max_im:.3e}); \
                 charge-basis operators are real symmetric"
            ),
        });
    }
    let (evals, mut evecs) = linalg::eigh(&h_re)?;

    // Deterministic phase: largest-|component| entry of each kept vector
    // made positive.
    for k in 0..dim {
        let mut best = 0usize;
        let mut best_abs = 0.0;
        for i in 0..dim {
            if evecs[[i, k]].abs() > best_abs {
                best_abs = evecs[[i, k]].abs();
                best = i;
            }
        }
        if evecs[[best, k]] < 0.0 {
            for i in 0..dim {
                evecs[[i, k]] = -evecs[[i, k]];
            }
        }
    }

    let omegas: Vec<f64> = (0..n_levels).map(|k| (evals[k] - evals[0]) / HBAR).collect();

    // X in the eigenbasis: (Vᵀ X V) restricted to the kept block. X is
    // real diagonal here, but the rotation is written for any real X.
    let mut x_re = Array2::<f64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            x_re[[i, j]] = x[[i, j]].re;
        }
    }
    let xv = x_re.dot(&evecs);
    let full = evecs.t().dot(&xv);
    let mut charge_me = Array2::from_elem((n_levels, n_levels), C64::new(0.0, 0.0));
    for i in 0..n_levels {
        for j in 0..n_levels {
            charge_me[[i, j]] = C64::new(full[[i, j]], 0.0);
        }
    }

    Ok(TransmonSpectrum {
        omegas,
        charge_me,
        epsilons: Vec::new(),
        n_levels,
        n_cut: (dim - 1) / 2,
    })
}

impl TransmonSpectrum {
    /// One-stop spectrum computation from energies: builds the charge-basis
    /// operators at the default cutoff, diagonalizes, and attaches the
    /// charge dispersions `ε_k` for every retained level.
    pub fn compute(ec: f64, ej: f64, ng: f64, n_levels: usize) -> Result<Self> {
        Self::compute_with_cutoff(ec, ej, ng, n_levels, default_cutoff(ej / ec))
    }

    /// Same as [`TransmonSpectrum::compute`] with an explicit charge cutoff.
    pub fn compute_with_cutoff(
        ec: f64,
        ej: f64,
        ng: f64,
        n_levels: usize,
        n_cut: usize,
    ) -> Result<Self> {
        let h = build_charge_hamiltonian(ec, ej, ng, n_cut)?;
        let x = build_charge_operator(ng, n_cut);
        let mut spec = diagonalize(&h, &x, n_levels)?;
        spec.epsilons = (0..n_levels)
            .map(|k| charge_dispersion(ec, ej, k))
            .collect::<Result<Vec<f64>>>()?;
        Ok(spec)
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// Asymptotic charge dispersion `ε_k` (joule, signed):
///
/// `ε_k = (−1)^k · EC · (2^(4k+5)/k!) · sqrt(2/π) · (EJ/2EC)^(k/2+3/4) · exp(−sqrt(8·EJ/EC))`.
///
/// Valid deep in the transmon regime (`EJ/EC ≳ 20`); the formula is
/// evaluated as written for any positive energies.
pub fn charge_dispersion(ec: f64, ej: f64, k: usize) -> Result<f64> {
    if !(ec > 0.0) || !(ej > 0.0) {
        return Err(Error::ParameterDomain {
            what: "EJ/EC",
            value: if ec > 0.0 { ej } else { ec },
            requirement: "energies must be > 0",
        });
    }
    let ratio = ej / ec;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let value = ec
        * (2.0_f64.powi(4 * k as i32 + 5) / factorial(k))
        * (2.0 / std::f64::consts::PI).sqrt()
        * (ratio / 2.0).powf(k as f64 / 2.0 + 0.75)
        * (-(8.0 * ratio).sqrt()).exp();
    Ok(sign * value)
}

/// Gate-charge dependence of level `k` in the cosine approximation:
///
/// `ω_k(n_g) = ω_k(1/4) − (ε_k/2ħ)·cos(2π·n_g)` (rad/s),
///
/// anchored at the exact (unshifted) eigenfrequency at `n_g = 1/4`, where
/// the cosine vanishes. This is the form whose `n_g` derivative sets the
/// pure dephasing sensitivity.
pub fn spectrum_vs_ng(ec: f64, ej: f64, k: usize, ng: f64) -> Result<f64> {
    let n_cut = default_cutoff(ej / ec);
    let h = build_charge_hamiltonian(ec, ej, 0.25, n_cut)?;
    let x = build_charge_operator(0.25, n_cut);
    let anchor = diagonalize_raw_level(&h, &x, k)?;
    let eps = charge_dispersion(ec, ej, k)?;
    Ok(anchor - eps / (2.0 * HBAR) * (2.0 * std::f64::consts::PI * ng).cos())
}

/// Raw (unshifted) eigenfrequency `E_k/ħ` of the given level.
fn diagonalize_raw_level(h: &DenseOperator, _x: &DenseOperator, k: usize) -> Result<f64> {
    let dim = h.nrows();
    if k >= dim {
        return Err(Error::DimensionMismatch {
            context: "spectrum level index",
            expected: dim,
            got: k,
        });
    }
    let mut h_re = Array2::<f64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            h_re[[i, j]] = h[[i, j]].re;
        }
    }
    let (evals, _) = linalg::eigh(&h_re)?;
    Ok(evals[k] / HBAR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EC: f64 = 3.667e-25; // joule, ≈ h·0.5534 GHz

    #[test]
    fn ej_zero_spectrum_is_pure_charging() {
        let ng = 0.3;
        let n_cut = 10;
        let h = build_charge_hamiltonian(EC, 0.0, ng, n_cut).unwrap();
        let x = build_charge_operator(ng, n_cut);
        let spec = diagonalize(&h, &x, 5).unwrap();
        // Sorted charging parabola energies 4EC(m−ng)².
        let mut exact: Vec<f64> = (-(n_cut as i64)..=n_cut as i64)
            .map(|m| 4.0 * EC * (m as f64 - ng) * (m as f64 - ng))
            .collect();
        exact.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for k in 0..5 {
            assert_relative_eq!(
                spec.omegas[k],
                (exact[k] - exact[0]) / HBAR,
                max_relative = 1e-10,
                epsilon = 1e-3
            );
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_exactly() {
        let h = build_charge_hamiltonian(EC, 50.0 * EC, 0.17, 15).unwrap();
        assert_eq!(linalg::hermiticity_defect(&h), 0.0);
    }

    #[test]
    fn cutoff_below_requirement_is_rejected() {
        assert!(matches!(
            build_charge_hamiltonian(EC, 400.0 * EC, 0.0, 10),
            Err(Error::TruncationNotConverged { .. })
        ));
    }

    #[test]
    fn transition_frequency_near_plasma_asymptote() {
        let spec = TransmonSpectrum::compute(EC, 50.0 * EC, 0.0, 3).unwrap();
        let omega10 = spec.omegas[1];
        // Frozen exact value at EJ/EC = 50.
        assert_relative_eq!(omega10 * HBAR / EC, 18.9419, max_relative = 1e-4);
        // Asymptote sqrt(8·EJ·EC) − EC is good to 3% here.
        let asym = ((8.0 * 50.0_f64).sqrt() - 1.0) * EC / HBAR;
        assert!((omega10 / asym - 1.0).abs() < 0.03);
    }

    #[test]
    fn anharmonicity_at_ej_ec_50() {
        let spec = TransmonSpectrum::compute(EC, 50.0 * EC, 0.0, 3).unwrap();
        let anh = (spec.omegas[2] - 2.0 * spec.omegas[1]) * HBAR / EC;
        // Frozen exact value: the asymptote −EC is approached only slowly
        // in EJ/EC, and at 50 the true anharmonicity is ≈ −1.149·EC.
        assert_relative_eq!(anh, -1.149223, max_relative = 1e-4);
    }

    #[test]
    fn charge_matrix_element_ladder_ratio() {
        let spec = TransmonSpectrum::compute(EC, 50.0 * EC, 0.0, 3).unwrap();
        let x10 = spec.charge_me[[1, 0]].norm();
        let x21 = spec.charge_me[[2, 1]].norm();
        let ratio = x21 / x10;
        assert_relative_eq!(ratio, 1.369985, max_relative = 1e-4);
        // Harmonic-ladder prediction sqrt(2), good to 5%.
        assert!((ratio / 2.0_f64.sqrt() - 1.0).abs() < 0.05);
    }

    #[test]
    fn next_nearest_coupling_suppressed() {
        // At the charge-symmetric point the 0↔2 element vanishes by parity.
        let spec = TransmonSpectrum::compute(EC, 50.0 * EC, 0.0, 3).unwrap();
        let x10 = spec.charge_me[[1, 0]].norm();
        assert!(spec.charge_me[[2, 0]].norm() / x10 < 1e-10);
        // Away from it the suppression is still strong.
        let spec = TransmonSpectrum::compute(EC, 50.0 * EC, 0.25, 3).unwrap();
        let x10 = spec.charge_me[[1, 0]].norm();
        assert!(spec.charge_me[[2, 0]].norm() / x10 < 0.1);
    }

    #[test]
    fn charge_matrix_hermitian_with_real_diagonal() {
        let spec = TransmonSpectrum::compute(EC, 50.0 * EC, 0.13, 4).unwrap();
        assert!(linalg::hermiticity_defect(&spec.charge_me) < 1e-16 * 2.0 * E_CHARGE);
        for k in 0..4 {
            assert_eq!(spec.charge_me[[k, k]].im, 0.0);
        }
    }

    #[test]
    fn eigenvalues_cutoff_independent() {
        for ratio in [20.0, 50.0, 100.0, 400.0] {
            let n_cut = default_cutoff(ratio);
            let a = TransmonSpectrum::compute_with_cutoff(EC, ratio * EC, 0.25, 4, n_cut).unwrap();
            let b =
                TransmonSpectrum::compute_with_cutoff(EC, ratio * EC, 0.25, 4, n_cut + 5).unwrap();
            for k in 1..4 {
                assert_relative_eq!(a.omegas[k], b.omegas[k], max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn dispersion_signs_alternate() {
        for k in 0..4 {
            let eps = charge_dispersion(EC, 50.0 * EC, k).unwrap();
            assert_eq!(eps.signum(), if k % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn dispersion_against_exact_gate_sweep() {
        // |ε_0| from the closed form vs. the exact ground-level splitting
        // between the two gate-charge extremes.
        let ej = 50.0 * EC;
        let n_cut = default_cutoff(50.0);
        let exact = |ng: f64| {
            let h = build_charge_hamiltonian(EC, ej, ng, n_cut).unwrap();
            let x = build_charge_operator(ng, n_cut);
            diagonalize_raw_level(&h, &x, 0).unwrap()
        };
        let split = HBAR * (exact(0.0) - exact(0.5)).abs();
        let eps0 = charge_dispersion(EC, ej, 0).unwrap().abs();
        assert!(
            (eps0 / split - 1.0).abs() < 0.2,
            "closed form/exact = {:.4}",
            eps0 / split
        );
    }

    #[test]
    fn dispersion_ratio_matches_closed_forms() {
        let e0 = charge_dispersion(EC, 50.0 * EC, 0).unwrap();
        let e1 = charge_dispersion(EC, 50.0 * EC, 1).unwrap();
        let expected = -(2.0_f64.powi(4)) * (50.0_f64 / 2.0).sqrt();
        assert_relative_eq!(e1 / e0, expected, max_relative = 1e-12);
    }

    #[test]
    fn gate_sweep_anchor_and_extremes() {
        let ej = 50.0 * EC;
        let k = 1;
        let at_quarter = spectrum_vs_ng(EC, ej, k, 0.25).unwrap();
        let n_cut = default_cutoff(50.0);
        let h = build_charge_hamiltonian(EC, ej, 0.25, n_cut).unwrap();
        let x = build_charge_operator(0.25, n_cut);
        let raw = diagonalize_raw_level(&h, &x, k).unwrap();
        assert_relative_eq!(at_quarter, raw, max_relative = 1e-12);

        let eps = charge_dispersion(EC, ej, k).unwrap();
        let diff = spectrum_vs_ng(EC, ej, k, 0.0).unwrap() - spectrum_vs_ng(EC, ej, k, 0.5).unwrap();
        assert_relative_eq!(diff, -eps / HBAR, max_relative = 1e-10);
    }

    #[test]
    fn gate_derivative_at_quarter() {
        let ej = 50.0 * EC;
        let k = 1;
        // Step choice: the sweep value carries a ~7e10 rad/s anchor, so the
        // difference loses ~ULP(anchor) ≈ 1.5e-5 to rounding; at h = 1e-4
        // that cancellation (~3e-7 relative after /2h) and the O(h²)
        // truncation (~7e-8) are both well inside the 1e-6 tolerance,
        // while h = 1e-6 would amplify the rounding 100-fold.
        let h = 1e-4;
        let d = (spectrum_vs_ng(EC, ej, k, 0.25 + h).unwrap()
            - spectrum_vs_ng(EC, ej, k, 0.25 - h).unwrap())
            / (2.0 * h);
        let eps = charge_dispersion(EC, ej, k).unwrap();
        assert_relative_eq!(d.abs(), std::f64::consts::PI * eps.abs() / HBAR, max_relative = 1e-6);
    }

    #[test]
    fn diagonal_charge_element_matches_energy_slope() {
        // Hellmann-Feynman: ⟨k|X|k⟩ = −(e/4EC)·∂E_k/∂n_g, checked with a
        // central finite difference of the exact eigenvalues.
        let ej = 50.0 * EC;
        let n_cut = default_cutoff(50.0);
        let ng = 0.25;
        let h_step = 1e-5;
        for k in 0..2 {
            let level = |ng: f64| {
                let h = build_charge_hamiltonian(EC, ej, ng, n_cut).unwrap();
                let x = build_charge_operator(ng, n_cut);
                HBAR * diagonalize_raw_level(&h, &x, k).unwrap()
            };
            let slope = (level(ng + h_step) - level(ng - h_step)) / (2.0 * h_step);
            let spec = TransmonSpectrum::compute_with_cutoff(EC, ej, ng, 3, n_cut).unwrap();
            let xkk = spec.charge_me[[k, k]].re;
            assert_relative_eq!(xkk, -(E_CHARGE / (4.0 * EC)) * slope, max_relative = 1e-5);
        }
    }

    #[test]
    fn diagonalize_rejects_bad_inputs() {
        let h = build_charge_hamiltonian(EC, 50.0 * EC, 0.0, 15).unwrap();
        let x = build_charge_operator(0.0, 15);
        assert!(matches!(
            diagonalize(&h, &x, 100),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut bad = h.clone();
        bad[[0, 1]] = C64::new(1.0, 0.5) * EC;
        assert!(matches!(
            diagonalize(&bad, &x, 3),
            Err(Error::NotHermitian { .. })
        ));
    }
}
