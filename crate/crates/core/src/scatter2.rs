//! Scattering of a coherent microwave tone on a two-level emitter coupled to
//! open transmission lines.
//!
//! An incoming coherent tone with photon flux `nin` drives the 0↔1 transition
//! at detuning `delta` from the emitter frequency.  In the frame rotating at
//! the drive frequency the dynamics reduce to a time-independent Lindblad
//! generator; the reflected field amplitude is proportional to the
//! steady-state coherence ρ₀₁, and the transmitted amplitude is the coherent
//! sum of drive and reflection, `t = 1 + r`.
//!
//! Two evaluation paths are provided and agree to solver precision at every
//! drive strength:
//!
//! * [`analytic_rt`] / [`analytic_rho01`] — closed forms of the steady-state
//!   coherence and reflection coefficient;
//! * [`numeric_rt`] — assembles the rotating-frame generator and solves for
//!   the steady state through [`crate::liouville`], supporting thermal
//!   excitation (`gamma_up > 0`) where the closed form assumes none.

use ndarray::array;
use rayon::prelude::*;

use crate::consts::HBAR;
use crate::error::{Error, Result};
use crate::liouville::{build_liouvillian, steady_state, DenseOperator};
use crate::params_units::flux_to_rabi;
use crate::C64;

/// Drive and dissipation parameters for two-level scattering.
///
/// All rates are angular frequencies (rad/s).  `gamma10` is the energy
/// relaxation rate Γ of the excited state into the lines; `gamma10_total` is
/// the total decay rate γ of the 0–1 coherence, which is Γ/2 plus any pure
/// dephasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// Incoming photon flux of the drive (photons/s).
    pub nin: f64,
    /// Drive detuning from the emitter transition, ω_drive − ω₁₀ (rad/s).
    pub delta: f64,
    /// Energy relaxation rate Γ₁₀ of the 1→0 transition (rad/s).
    pub gamma10: f64,
    /// Total decay rate γ₁₀ of the 0–1 coherence (rad/s); at least Γ₁₀/2.
    pub gamma10_total: f64,
}

impl DriveSpec {
    /// Builds and validates a drive specification.
    pub fn new(nin: f64, delta: f64, gamma10: f64, gamma10_total: f64) -> Result<Self> {
        let spec = DriveSpec {
            nin,
            delta,
            gamma10,
            gamma10_total,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Radiatively limited spec: coherence decays at exactly half the
    /// relaxation rate (no pure dephasing, no thermal excitation).
    pub fn radiative(nin: f64, delta: f64, gamma10: f64) -> Result<Self> {
        Self::new(nin, delta, gamma10, 0.5 * gamma10)
    }

    /// Checks the parameter domain: finite values, `nin ≥ 0`, `gamma10 > 0`,
    /// and `gamma10_total ≥ gamma10 / 2`.
    pub fn validate(&self) -> Result<()> {
        if !self.nin.is_finite() || self.nin < 0.0 {
            return Err(Error::ParameterDomain {
                what: "nin",
                value: self.nin,
                requirement: "photon flux must be finite and >= 0",
            });
        }
        if !self.delta.is_finite() {
            return Err(Error::ParameterDomain {
                what: "delta",
                value: self.delta,
                requirement: "detuning must be finite",
            });
        }
        if !self.gamma10.is_finite() || self.gamma10 <= 0.0 {
            return Err(Error::ParameterDomain {
                what: "gamma10",
                value: self.gamma10,
                requirement: "relaxation rate must be finite and > 0",
            });
        }
        if !self.gamma10_total.is_finite()
            || self.gamma10_total < 0.5 * self.gamma10 * (1.0 - 1e-12)
        {
            return Err(Error::UnphysicalRates {
                detail: format!(
                    "coherence decay gamma10_total = {:.6e} rad/s is below gamma10/2 = {:.6e} rad/s; \
                     the coherence cannot outlive the excited-state population",
                    self.gamma10_total,
                    0.5 * self.gamma10
                ),
            });
        }
        Ok(())
    }

    /// Peak reflection magnitude `r₀ = Γ₁₀ / (2 γ₁₀)` reached on resonance in
    /// the weak-drive limit; equals 1 for a radiatively limited emitter.
    pub fn r0(&self) -> f64 {
        self.gamma10 / (2.0 * self.gamma10_total)
    }

    /// Copy with a different detuning.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// Copy with a different drive flux.
    pub fn with_nin(mut self, nin: f64) -> Self {
        self.nin = nin;
        self
    }
}

/// Reflection and transmission at one drive point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterResult {
    /// Complex reflection coefficient of the negative-frequency field
    /// component.
    pub r: C64,
    /// Complex transmission coefficient, `t = 1 + r` exactly.
    pub t: C64,
    /// Reflectance `|r|²`.
    pub reflectance: f64,
    /// Transmittance `|t|²`.
    pub transmittance: f64,
}

impl ScatterResult {
    /// Derives the full record from a reflection coefficient, enforcing
    /// `t = 1 + r` by construction.
    pub fn from_reflection(r: C64) -> Self {
        let t = C64::new(1.0, 0.0) + r;
        ScatterResult {
            r,
            t,
            reflectance: r.norm_sqr(),
            transmittance: t.norm_sqr(),
        }
    }
}

/// Voltage amplitude (volt) of a coherent tone carrying photon flux `nin`
/// (photons/s) at angular frequency `omega` (rad/s) on a line of impedance
/// `z0` (ohm): the inverse of `nin = Ω² / (2 Z₀ ħ ω)`.
pub fn voltage_amplitude_for_flux(nin: f64, omega: f64, z0: f64) -> Result<f64> {
    if !nin.is_finite() || nin < 0.0 {
        return Err(Error::ParameterDomain {
            what: "nin",
            value: nin,
            requirement: "photon flux must be finite and >= 0",
        });
    }
    if !(omega > 0.0) {
        return Err(Error::ParameterDomain {
            what: "omega",
            value: omega,
            requirement: "angular frequency must be > 0",
        });
    }
    if !(z0 > 0.0) {
        return Err(Error::ParameterDomain {
            what: "z0",
            value: z0,
            requirement: "line impedance must be > 0",
        });
    }
    Ok((2.0 * z0 * HBAR * omega * nin).sqrt())
}

/// Closed-form steady-state coherence ρ₀₁ of the driven emitter in the
/// rotating frame (the oscillating phase at the drive frequency is stripped):
///
/// `ρ₀₁ = ½ √(ħω₁₀ Γ₁₀ Z₀) (Δ + iγ₁₀) Ω_p / (ħω₁₀ Z₀ γ₁₀² + ħω₁₀ Z₀ Δ² + γ₁₀ Ω_p²)`
///
/// with drive voltage amplitude `omega_p_volt` (volt) on a line of impedance
/// `z0` at emitter frequency `omega10`.  Only `delta`, `gamma10`, and
/// `gamma10_total` are read from `d`; the drive strength comes from the
/// voltage amplitude, so `d.nin` is ignored here.  The result depends on
/// `(omega10, z0, omega_p_volt)` only through the photon flux
/// `Ω_p² / (2 Z₀ ħ ω₁₀)`.
pub fn analytic_rho01(d: &DriveSpec, omega10: f64, z0: f64, omega_p_volt: f64) -> Result<C64> {
    d.validate()?;
    if !(omega10 > 0.0) || !omega10.is_finite() {
        return Err(Error::ParameterDomain {
            what: "omega10",
            value: omega10,
            requirement: "emitter frequency must be finite and > 0",
        });
    }
    if !(z0 > 0.0) || !z0.is_finite() {
        return Err(Error::ParameterDomain {
            what: "z0",
            value: z0,
            requirement: "line impedance must be finite and > 0",
        });
    }
    if !omega_p_volt.is_finite() || omega_p_volt < 0.0 {
        return Err(Error::ParameterDomain {
            what: "omega_p_volt",
            value: omega_p_volt,
            requirement: "drive voltage amplitude must be finite and >= 0",
        });
    }
    let gamma = d.gamma10_total;
    let energy_scale = HBAR * omega10 * z0;
    let numerator = 0.5 * (energy_scale * d.gamma10).sqrt() * omega_p_volt;
    let denominator = energy_scale * (gamma * gamma + d.delta * d.delta)
        + gamma * omega_p_volt * omega_p_volt;
    Ok(C64::new(d.delta, gamma) * (numerator / denominator))
}

/// Closed-form reflection and transmission coefficients:
///
/// `r = −r₀ (1 − iΔ/γ₁₀) / (1 + (Δ/γ₁₀)² + 2 nin/γ₁₀)`, `t = 1 + r`,
///
/// with `r₀ = Γ₁₀/(2γ₁₀)`.  Valid at every drive strength; the `2 nin/γ₁₀`
/// term is the saturation of the transition by the coherent drive.
pub fn analytic_rt(d: &DriveSpec) -> Result<ScatterResult> {
    d.validate()?;
    let gamma = d.gamma10_total;
    let x = d.delta / gamma;
    let denom = 1.0 + x * x + 2.0 * d.nin / gamma;
    let r = C64::new(1.0, -x) * (-d.r0() / denom);
    Ok(ScatterResult::from_reflection(r))
}

/// Reflection and transmission from the steady state of the rotating-frame
/// master equation.
///
/// The generator combines `H/ħ = −Δ|1⟩⟨1| + (Ω_R/2)σˣ` with `Ω_R = √(2Γ₁₀ nin)`,
/// relaxation `Γ₁₀ D(σ⁻)`, thermal excitation `gamma_up D(σ⁺)`, and a σ_z
/// channel at rate `γ_φ/2` carrying the pure-dephasing residual
/// `γ_φ = γ₁₀ − Γ₁₀/2 − gamma_up/2` (each σ_z quantum of rate contributes
/// twice its half to the coherence decay, so the channel reproduces γ₁₀
/// exactly).  The reflection coefficient is read off the steady coherence as
/// `r = i √(Γ₁₀/(2 nin)) ρ₀₁`.
///
/// Requires `nin > 0`: the reflected amplitude is normalized by the drive
/// amplitude, so the zero-drive limit is only defined as a limit — use
/// [`analytic_rt`] there.
pub fn numeric_rt(d: &DriveSpec, gamma_up: f64) -> Result<ScatterResult> {
    d.validate()?;
    if !(d.nin > 0.0) {
        return Err(Error::ParameterDomain {
            what: "nin",
            value: d.nin,
            requirement: "> 0 (reflection is the steady coherence divided by the drive amplitude)",
        });
    }
    if !gamma_up.is_finite() || gamma_up < 0.0 {
        return Err(Error::ParameterDomain {
            what: "gamma_up",
            value: gamma_up,
            requirement: "thermal excitation rate must be finite and >= 0",
        });
    }
    let gamma_phi = d.gamma10_total - 0.5 * d.gamma10 - 0.5 * gamma_up;
    let tol = 1e-10 * d.gamma10_total.max(d.gamma10).max(gamma_up);
    if gamma_phi < -tol {
        return Err(Error::UnphysicalRates {
            detail: format!(
                "gamma10_total = {:.6e} rad/s is below (gamma10 + gamma_up)/2 = {:.6e} rad/s; \
                 no nonnegative pure-dephasing rate reproduces it",
                d.gamma10_total,
                0.5 * (d.gamma10 + gamma_up)
            ),
        });
    }
    let gamma_phi = gamma_phi.max(0.0);
    let omega_r = flux_to_rabi(d.nin, d.gamma10)?;

    let half_rabi = C64::new(0.5 * omega_r, 0.0);
    let h = array![
        [C64::new(0.0, 0.0), half_rabi],
        [half_rabi, C64::new(-d.delta, 0.0)],
    ];
    let collapse = [
        (d.gamma10, lowering()),
        (gamma_up, raising()),
        (0.5 * gamma_phi, sigma_z()),
    ];
    let generator = build_liouvillian(&h, &collapse, &[])?;
    let rho = steady_state(&generator)?;
    let r = C64::i() * (d.gamma10 / (2.0 * d.nin)).sqrt() * rho.element(0, 1);
    Ok(ScatterResult::from_reflection(r))
}

/// Evaluates the closed-form reflection/transmission over a detuning grid at
/// fixed drive flux.  Points are independent and computed in parallel; the
/// output order matches `deltas`.
pub fn sweep_two_level(deltas: &[f64], base: &DriveSpec) -> Result<Vec<ScatterResult>> {
    base.validate()?;
    deltas
        .par_iter()
        .map(|&delta| analytic_rt(&base.with_delta(delta)))
        .collect()
}

/// Lowering operator |0⟩⟨1| on the (ground, excited) basis.
fn lowering() -> DenseOperator {
    array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
    ]
}

/// Raising operator |1⟩⟨0|.
fn raising() -> DenseOperator {
    array![
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ]
}

/// Population-difference operator |0⟩⟨0| − |1⟩⟨1|.
fn sigma_z() -> DenseOperator {
    array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
    ]
}
