//! Probe scattering on a three-level ladder emitter under a strong control
//! tone (Autler-Townes regime).
//!
//! A weak probe addresses the 0↔1 transition while a control tone drives
//! 1↔2.  In the doubly rotating frame (probe and control frequencies) the
//! generator is time independent.  The reflected probe amplitude is carried
//! by the 0–1 coherence alone; the control-frequency component of the output
//! lives on the 1–2 coherence and never mixes into the probe reflection.
//!
//! Closed forms are available for the first-order-in-probe coherence
//! ([`analytic_rho10_first_order`]) and, for a resonant control tone, the
//! probe reflection coefficient ([`analytic_r_probe`]).  The numeric path
//! ([`numeric_r_probe`]) solves the full steady state and also covers
//! detuned control (`delta_c ≠ 0`) and non-perturbative probe powers.
//!
//! The five-rate set in [`ThreeLevelRates`] describes a cold environment:
//! only downward relaxation and pure dephasing appear, so upward (absorption)
//! channels vanish.  Thermal excitation enters the two-level and correlation
//! modules, which carry an explicit temperature.

use ndarray::Array2;
use rayon::prelude::*;

use crate::consts::HBAR;
use crate::error::{Error, Result};
use crate::liouville::{build_liouvillian, steady_state, DenseOperator};
use crate::params_units::flux_to_rabi;
use crate::scatter2::ScatterResult;
use crate::C64;

/// Relaxation and coherence-decay rates of the three-level ladder (rad/s).
///
/// `gamma10` and `gamma21` are the energy relaxation rates Γ of the 1→0 and
/// 2→1 transitions; the `*_total` fields are the decay rates γ of the three
/// coherences.  Each total must be at least half the population decay out of
/// the pair of levels it connects; the excess is pure dephasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelRates {
    /// Relaxation rate Γ₁₀ of the 1→0 transition.
    pub gamma10: f64,
    /// Relaxation rate Γ₂₁ of the 2→1 transition.
    pub gamma21: f64,
    /// Decay rate γ₁₀ of the 0–1 coherence.
    pub gamma10_total: f64,
    /// Decay rate γ₂₀ of the 0–2 coherence.
    pub gamma20_total: f64,
    /// Decay rate γ₂₁ of the 1–2 coherence.
    pub gamma21_total: f64,
}

impl ThreeLevelRates {
    /// Builds and validates a rate set.
    pub fn new(
        gamma10: f64,
        gamma21: f64,
        gamma10_total: f64,
        gamma20_total: f64,
        gamma21_total: f64,
    ) -> Result<Self> {
        let rates = ThreeLevelRates {
            gamma10,
            gamma21,
            gamma10_total,
            gamma20_total,
            gamma21_total,
        };
        rates.validate()?;
        Ok(rates)
    }

    /// Radiatively limited rate set: every coherence decays at exactly half
    /// the population decay out of its two levels (no pure dephasing).
    pub fn radiative(gamma10: f64, gamma21: f64) -> Result<Self> {
        Self::new(
            gamma10,
            gamma21,
            0.5 * gamma10,
            0.5 * gamma21,
            0.5 * (gamma10 + gamma21),
        )
    }

    /// Radiatively limited ladder with the matrix-element scaling of a weakly
    /// anharmonic oscillator, where the second transition relaxes at twice
    /// the rate of the first: `Γ₂₁ = 2 Γ₁₀`.
    pub fn ladder_default(gamma10: f64) -> Result<Self> {
        Self::radiative(gamma10, 2.0 * gamma10)
    }

    /// Checks positivity and the consistency of the coherence decays with
    /// some nonnegative per-level pure-dephasing split.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma10", self.gamma10),
            ("gamma21", self.gamma21),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::ParameterDomain {
                    what: name,
                    value,
                    requirement: "relaxation rate must be finite and > 0",
                });
            }
        }
        for (name, value) in [
            ("gamma10_total", self.gamma10_total),
            ("gamma20_total", self.gamma20_total),
            ("gamma21_total", self.gamma21_total),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::ParameterDomain {
                    what: name,
                    value,
                    requirement: "coherence decay must be finite and >= 0",
                });
            }
        }
        self.dephasing_split().map(|_| ())
    }

    /// Per-level pure-dephasing rates `[f₀, f₁, f₂]` reproducing the three
    /// coherence decays when each level `k` carries a projector collapse
    /// channel of rate `2 f_k`.
    ///
    /// Writing `φ_ij = γ_ij − (out_i + out_j)/2` for the pure-dephasing part
    /// of each coherence decay (with `out_k` the population decay out of
    /// level `k`), the channel rates satisfy `φ_ij = f_i + f_j`, a linear
    /// system with the unique solution returned here.  Any `f_k` below zero
    /// beyond numerical tolerance means no physical dephasing model matches
    /// the requested γ values.
    pub fn dephasing_split(&self) -> Result<[f64; 3]> {
        let out1 = self.gamma10;
        let out2 = self.gamma21;
        let phi10 = self.gamma10_total - 0.5 * out1;
        let phi20 = self.gamma20_total - 0.5 * out2;
        let phi21 = self.gamma21_total - 0.5 * (out1 + out2);
        let f = [
            0.5 * (phi10 + phi20 - phi21),
            0.5 * (phi10 + phi21 - phi20),
            0.5 * (phi20 + phi21 - phi10),
        ];
        let scale = self
            .gamma10
            .max(self.gamma21)
            .max(self.gamma10_total)
            .max(self.gamma20_total)
            .max(self.gamma21_total);
        let tol = 1e-10 * scale;
        for (k, &fk) in f.iter().enumerate() {
            if fk < -tol {
                return Err(Error::UnphysicalRates {
                    detail: format!(
                        "coherence decays imply a negative pure-dephasing rate \
                         f{k} = {fk:.6e} rad/s; the requested gamma totals are \
                         inconsistent with the relaxation rates"
                    ),
                });
            }
        }
        Ok([f[0].max(0.0), f[1].max(0.0), f[2].max(0.0)])
    }
}

/// Probe/control drive configuration for the three-level problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelDrive {
    /// Probe photon flux on the 0↔1 transition (photons/s).
    pub nin_p: f64,
    /// Control photon flux on the 1↔2 transition (photons/s).
    pub nin_c: f64,
    /// Probe detuning Δ_p = ω_p − ω₁₀ (rad/s).
    pub delta_p: f64,
    /// Control detuning Δ_c = ω_c − ω₂₁ (rad/s).
    pub delta_c: f64,
    /// Relaxation and coherence-decay rates.
    pub rates: ThreeLevelRates,
}

impl ThreeLevelDrive {
    /// Builds and validates a drive configuration.
    pub fn new(
        nin_p: f64,
        nin_c: f64,
        delta_p: f64,
        delta_c: f64,
        rates: ThreeLevelRates,
    ) -> Result<Self> {
        let drive = ThreeLevelDrive {
            nin_p,
            nin_c,
            delta_p,
            delta_c,
            rates,
        };
        drive.validate()?;
        Ok(drive)
    }

    /// Checks flux nonnegativity, detuning finiteness, and rate consistency.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("nin_p", self.nin_p), ("nin_c", self.nin_c)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::ParameterDomain {
                    what: name,
                    value,
                    requirement: "photon flux must be finite and >= 0",
                });
            }
        }
        for (name, value) in [("delta_p", self.delta_p), ("delta_c", self.delta_c)] {
            if !value.is_finite() {
                return Err(Error::ParameterDomain {
                    what: name,
                    value,
                    requirement: "detuning must be finite",
                });
            }
        }
        self.rates.validate()
    }

    /// Copy with a different probe detuning.
    pub fn with_delta_p(mut self, delta_p: f64) -> Self {
        self.delta_p = delta_p;
        self
    }

    /// Copy with a different control flux.
    pub fn with_nin_c(mut self, nin_c: f64) -> Self {
        self.nin_c = nin_c;
        self
    }
}

/// One evaluated point of a probe-response sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeLevelPoint {
    /// Probe detuning of this point (rad/s).
    pub delta_p: f64,
    /// Control flux of this point (photons/s).
    pub nin_c: f64,
    /// Probe reflection/transmission at this point.
    pub result: ScatterResult,
}

/// Rotating-frame Hamiltonian (rad/s) and collapse channels of the driven
/// ladder.
///
/// `H/ħ = −Δ_p|1⟩⟨1| − (Δ_p+Δ_c)|2⟩⟨2| + (Ω_p/2)σ₁ˣ + (Ω_c/2)σ₂ˣ` with Rabi
/// frequencies `Ω_p = √(2 Γ₁₀ nin_p)` and `Ω_c = √(2 Γ₂₁ nin_c)`.  Collapse
/// channels are the two downward relaxations plus one projector channel per
/// level carrying the pure-dephasing split (channels with zero rate are
/// dropped).  Upward channels vanish for this cold-environment rate set.
pub fn rotating_frame_3lvl(
    d: &ThreeLevelDrive,
) -> Result<(DenseOperator, Vec<(f64, DenseOperator)>)> {
    d.validate()?;
    let omega_p = flux_to_rabi(d.nin_p, d.rates.gamma10)?;
    let omega_c = flux_to_rabi(d.nin_c, d.rates.gamma21)?;

    let mut h: DenseOperator = Array2::zeros((3, 3));
    h[[1, 1]] = C64::new(-d.delta_p, 0.0);
    h[[2, 2]] = C64::new(-(d.delta_p + d.delta_c), 0.0);
    h[[0, 1]] = C64::new(0.5 * omega_p, 0.0);
    h[[1, 0]] = C64::new(0.5 * omega_p, 0.0);
    h[[1, 2]] = C64::new(0.5 * omega_c, 0.0);
    h[[2, 1]] = C64::new(0.5 * omega_c, 0.0);

    let mut collapse = vec![
        (d.rates.gamma10, ladder_lowering(1)),
        (d.rates.gamma21, ladder_lowering(2)),
    ];
    let split = d.rates.dephasing_split()?;
    for (k, &fk) in split.iter().enumerate() {
        if fk > 0.0 {
            collapse.push((2.0 * fk, level_projector(k)));
        }
    }
    Ok((h, collapse))
}

/// Steady-state coherence ρ₁₀ = ⟨1|ρ|0⟩ of the full rotating-frame master
/// equation (no expansion in the probe power).
pub fn numeric_rho10(d: &ThreeLevelDrive) -> Result<C64> {
    let (h, collapse) = rotating_frame_3lvl(d)?;
    let generator = build_liouvillian(&h, &collapse, &[])?;
    let rho = steady_state(&generator)?;
    Ok(rho.element(1, 0))
}

/// Probe reflection and transmission from the full steady state:
/// `r = i √(Γ₁₀/(2 nin_p)) ρ₀₁`, `t = 1 + r`.
///
/// Requires `nin_p > 0` since the reflected amplitude is normalized by the
/// probe amplitude.  Supports any control detuning and probe power.
pub fn numeric_r_probe(d: &ThreeLevelDrive) -> Result<ScatterResult> {
    d.validate()?;
    if !(d.nin_p > 0.0) {
        return Err(Error::ParameterDomain {
            what: "nin_p",
            value: d.nin_p,
            requirement: "> 0 (reflection is the steady coherence divided by the probe amplitude)",
        });
    }
    let rho10 = numeric_rho10(d)?;
    let r = C64::i() * (d.rates.gamma10 / (2.0 * d.nin_p)).sqrt() * rho10.conj();
    Ok(ScatterResult::from_reflection(r))
}

/// First-order-in-probe steady-state coherence ρ₁₀ in the rotating frame
/// (phase at the probe frequency stripped):
///
/// `ρ₁₀ = −2i ħω₂₁Z₀ √(Γ₁₀/(ħω₁₀Z₀)) (γ₂₀ − i(Δ_c+Δ_p)) Ω_p
///        / (4ħω₂₁Z₀ (γ₁₀ − iΔ_p)(γ₂₀ − i(Δ_c+Δ_p)) + Γ₂₁ Ω_c²)`
///
/// with voltage amplitudes `Ω_p = √(2 Z₀ ħω₁₀ nin_p)` and
/// `Ω_c = √(2 Z₀ ħω₂₁ nin_c)`.  Valid for a strong control tone
/// (`nin_c ≫ nin_p`); the expansion error grows with `nin_p/nin_c`.  The
/// result depends on `(omega10, omega21, z0)` only through the fluxes.
pub fn analytic_rho10_first_order(
    d: &ThreeLevelDrive,
    omega10: f64,
    omega21: f64,
    z0: f64,
) -> Result<C64> {
    d.validate()?;
    for (name, value) in [("omega10", omega10), ("omega21", omega21), ("z0", z0)] {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::ParameterDomain {
                what: name,
                value,
                requirement: "must be finite and > 0",
            });
        }
    }
    let omega_p_volt = (2.0 * z0 * HBAR * omega10 * d.nin_p).sqrt();
    let omega_c_volt = (2.0 * z0 * HBAR * omega21 * d.nin_c).sqrt();
    let delta_two = d.delta_c + d.delta_p;
    let context = HBAR * omega21 * z0;
    let coupling = (d.rates.gamma10 / (HBAR * omega10 * z0)).sqrt();
    let two_photon = C64::new(d.rates.gamma20_total, -delta_two);
    let numerator = C64::new(0.0, -2.0) * context * coupling * two_photon * omega_p_volt;
    let denominator = 4.0
        * context
        * C64::new(d.rates.gamma10_total, -d.delta_p)
        * two_photon
        + d.rates.gamma21 * omega_c_volt * omega_c_volt;
    Ok(numerator / denominator)
}

/// Closed-form probe reflection for a resonant control tone (`Δ_c = 0`),
/// exact to first order in the probe power:
///
/// `r = −[2Γ₁₀(γ₂₀²+Δ_p²)(γ₁₀−iΔ_p) + Γ₁₀Γ₂₁(γ₂₀+iΔ_p) nin_c]
///      / [4(γ₁₀²+Δ_p²)(γ₂₀²+Δ_p²) + 4Γ₂₁(γ₁₀γ₂₀−Δ_p²) nin_c + Γ₂₁² nin_c²]`
///
/// and `t = 1 + r`.  Independent of `nin_p` (linear response).  A detuned
/// control tone has no closed form here; use [`numeric_r_probe`] instead.
pub fn analytic_r_probe(d: &ThreeLevelDrive) -> Result<ScatterResult> {
    d.validate()?;
    if d.delta_c != 0.0 {
        return Err(Error::ClosedFormUnavailable {
            detail: format!(
                "probe reflection closed form requires a resonant control tone; \
                 got delta_c = {:.6e} rad/s (use the numeric steady-state path)",
                d.delta_c
            ),
        });
    }
    let g10 = d.rates.gamma10;
    let g21 = d.rates.gamma21;
    let c10 = d.rates.gamma10_total;
    let c20 = d.rates.gamma20_total;
    let dp = d.delta_p;
    let nc = d.nin_c;

    let probe_line = c10 * c10 + dp * dp;
    let two_photon_line = c20 * c20 + dp * dp;
    let numerator = 2.0 * g10 * two_photon_line * C64::new(c10, -dp)
        + g10 * g21 * nc * C64::new(c20, dp);
    let denominator = 4.0 * probe_line * two_photon_line
        + 4.0 * g21 * (c10 * c20 - dp * dp) * nc
        + g21 * g21 * nc * nc;
    Ok(ScatterResult::from_reflection(-numerator / denominator))
}

/// Probe response over the cartesian grid `nin_cs × deltas_p` (control flux
/// outer, detuning inner; output order matches).
///
/// With `base.nin_p > 0` each point is a full numeric steady state at that
/// probe power (control detuning allowed).  With `base.nin_p = 0` the
/// weak-probe closed form is evaluated instead, which requires
/// `base.delta_c = 0`.  Points are independent and computed in parallel.
pub fn sweep_three_level(
    deltas_p: &[f64],
    nin_cs: &[f64],
    base: &ThreeLevelDrive,
) -> Result<Vec<ThreeLevelPoint>> {
    base.validate()?;
    let grid: Vec<(f64, f64)> = nin_cs
        .iter()
        .flat_map(|&nc| deltas_p.iter().map(move |&dp| (nc, dp)))
        .collect();
    grid.par_iter()
        .map(|&(nin_c, delta_p)| {
            let point = base.with_nin_c(nin_c).with_delta_p(delta_p);
            let result = if base.nin_p > 0.0 {
                numeric_r_probe(&point)?
            } else {
                analytic_r_probe(&point)?
            };
            Ok(ThreeLevelPoint {
                delta_p,
                nin_c,
                result,
            })
        })
        .collect()
}

/// Lowering operator |k−1⟩⟨k| of the ladder.
fn ladder_lowering(k: usize) -> DenseOperator {
    let mut op: DenseOperator = Array2::zeros((3, 3));
    op[[k - 1, k]] = C64::new(1.0, 0.0);
    op
}

/// Projector |k⟩⟨k|.
fn level_projector(k: usize) -> DenseOperator {
    let mut op: DenseOperator = Array2::zeros((3, 3));
    op[[k, k]] = C64::new(1.0, 0.0);
    op
}
