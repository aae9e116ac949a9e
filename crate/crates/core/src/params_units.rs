//! Circuit parameters, derived quantities, unit conversions, and the
//! port-splitting rules for one or more attached transmission lines.
//!
//! The device is a voltage-biased superconducting island (Josephson energy
//! `EJ`, junction capacitance `CJ`) coupled through `Cc` to `nPorts`
//! semi-infinite transmission lines of impedance `Z0`. Everything downstream
//! (spectra, rates, scattering) consumes the [`DerivedParams`] produced
//! here rather than raw circuit values.
//!
//! Unit conventions: all frequencies are angular (rad/s), energies are in
//! joules, and powers are in watts; [`dbm_to_watt`] converts from the RF
//! convention `P_W = 10^(P_dBm/10) · 1 mW` at the boundary.

use crate::consts::{E_CHARGE, HBAR};
use crate::error::{Error, Result};

/// Raw circuit parameters of the coupled transmon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// Coupling capacitance to each transmission line, farad.
    pub cc: f64,
    /// Junction (island) capacitance, farad.
    pub cj: f64,
    /// Josephson energy, joule.
    pub ej: f64,
    /// Characteristic impedance of each line, ohm.
    pub z0: f64,
    /// Environment temperature, kelvin.
    pub temperature: f64,
    /// DC bias voltage on the line, volt.
    pub vdc: f64,
    /// Number of semi-infinite lines attached to the coupling node.
    pub n_ports: u32,
}

impl CircuitParams {
    /// Check the physical domain of every field.
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 4] = [
            ("Cc", self.cc),
            ("CJ", self.cj),
            ("EJ", self.ej),
            ("Z0", self.z0),
        ];
        for (what, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::ParameterDomain {
                    what,
                    value,
                    requirement: "must be finite and > 0",
                });
            }
        }
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(Error::ParameterDomain {
                what: "T",
                value: self.temperature,
                requirement: "must be finite and >= 0",
            });
        }
        if self.n_ports < 1 {
            return Err(Error::ParameterDomain {
                what: "nPorts",
                value: self.n_ports as f64,
                requirement: "must be >= 1",
            });
        }
        Ok(())
    }
}

/// Quantities derived from [`CircuitParams`] that the physics modules
/// actually consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Total island capacitance `CΣ = Cc + CJ`, farad.
    pub c_sigma: f64,
    /// Charging energy `EC = e²/(2CΣ)`, joule.
    pub ec: f64,
    /// Dimensionless coupling `κ = Cc/CΣ`.
    pub kappa: f64,
    /// Damping constant `γ = (Z0/nPorts)·κ²`, ohm. Spontaneous emission
    /// rates are `(2γ/ħ)·ω·|X|²` with charge matrix elements `X`.
    pub gamma: f64,
    /// Discharge time `τ_RC = (Z0/nPorts)·(Cc·CJ/CΣ)`, second.
    pub tau_rc: f64,
    /// Dimensionless gate charge `n_g = Cc·VDC/(2e)`.
    pub ng: f64,
    /// Port count the damping quantities were derived with.
    pub n_ports: u32,
}

/// Field-splitting weights for `n` symmetrically attached lines.
///
/// The node voltage couples to one specific combination of the incident
/// fields, and each outgoing field is a fixed linear combination of the
/// incident ones plus the emitted contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortMapping {
    /// Weight `1/n` of each incident field in the combination that drives
    /// the atom.
    pub in_weight: f64,
    /// Coefficient `2/n − 1` of a port's own incident field in its
    /// outgoing field.
    pub self_reflection: f64,
    /// Coefficient `2/n` of every other port's incident field in a given
    /// outgoing field.
    pub cross_transmission: f64,
    /// Weight `τ_RC/CJ` (ohm) multiplying the island charge rate in each
    /// outgoing field.
    pub emission_weight: f64,
}

/// Compute [`DerivedParams`] from raw circuit values.
///
/// `gamma` and `tau_rc` both carry the `1/nPorts` reduction from sharing
/// the coupling node among several lines; the other fields are port-count
/// independent.
pub fn derive_params(p: &CircuitParams) -> Result<DerivedParams> {
    p.validate()?;
    let c_sigma = p.cc + p.cj;
    let kappa = p.cc / c_sigma;
    let n = f64::from(p.n_ports);
    Ok(DerivedParams {
        c_sigma,
        ec: E_CHARGE * E_CHARGE / (2.0 * c_sigma),
        kappa,
        gamma: (p.z0 / n) * kappa * kappa,
        tau_rc: (p.z0 / n) * (p.cc * p.cj / c_sigma),
        ng: p.cc * p.vdc / (2.0 * E_CHARGE),
        n_ports: p.n_ports,
    })
}

/// Field-splitting weights for `n` attached lines.
///
/// `d` must have been derived with the same port count (`d.n_ports == n`),
/// since its damping quantities already include the `1/n` sharing; mixing
/// counts would double-apply the split.
pub fn map_ports(d: &DerivedParams, n: u32) -> Result<PortMapping> {
    if n < 1 {
        return Err(Error::ParameterDomain {
            what: "n",
            value: n as f64,
            requirement: "must be >= 1",
        });
    }
    if n != d.n_ports {
        return Err(Error::ParameterDomain {
            what: "n",
            value: n as f64,
            requirement: "must equal the port count used in derive_params",
        });
    }
    let nf = f64::from(n);
    // CJ recovered from CΣ and κ: CJ = CΣ(1 − κ).
    let cj = d.c_sigma * (1.0 - d.kappa);
    Ok(PortMapping {
        in_weight: 1.0 / nf,
        self_reflection: 2.0 / nf - 1.0,
        cross_transmission: 2.0 / nf,
        emission_weight: d.tau_rc / cj,
    })
}

/// Convert an RF power level in dBm to watts (`10^(P/10) · 1 mW`).
pub fn dbm_to_watt(p_dbm: f64) -> f64 {
    10.0_f64.powf(p_dbm / 10.0) * 1e-3
}

/// Photon flux (photons per second) carried by power `p_watt` at carrier
/// angular frequency `omega`.
pub fn power_to_flux(p_watt: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::ParameterDomain {
            what: "omega",
            value: omega,
            requirement: "must be > 0",
        });
    }
    if !(p_watt >= 0.0) {
        return Err(Error::ParameterDomain {
            what: "P",
            value: p_watt,
            requirement: "must be >= 0 (watts)",
        });
    }
    Ok(p_watt / (HBAR * omega))
}

/// Inverse of [`power_to_flux`]: power in watts carried by `flux` photons
/// per second at angular frequency `omega`.
pub fn flux_to_power(flux: f64, omega: f64) -> f64 {
    flux * HBAR * omega
}

/// Rabi angular frequency of a transition with relaxation rate `gamma_rel`
/// driven by a coherent tone of photon flux `nin`: `Ω = sqrt(2·Γ·N_in)`.
///
/// This calibration makes the driven steady state reproduce the closed-form
/// scattering coefficients: the saturation term `Ω²/(γ·Γ)` becomes
/// `2·N_in/γ` in the reflection denominator.
pub fn flux_to_rabi(nin: f64, gamma_rel: f64) -> Result<f64> {
    if !(nin >= 0.0) {
        return Err(Error::ParameterDomain {
            what: "Nin",
            value: nin,
            requirement: "must be >= 0",
        });
    }
    if !(gamma_rel > 0.0) {
        return Err(Error::ParameterDomain {
            what: "Gamma",
            value: gamma_rel,
            requirement: "must be > 0",
        });
    }
    Ok((2.0 * gamma_rel * nin).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::H_PLANCK;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn standard_circuit() -> CircuitParams {
        CircuitParams {
            cc: 10e-15,
            cj: 25e-15,
            ej: 20.0 * 6.6e9 * H_PLANCK, // irrelevant for these tests
            z0: 50.0,
            temperature: 0.0,
            vdc: 0.0,
            n_ports: 1,
        }
    }

    #[test]
    fn derived_quantities_match_definitions() {
        let p = standard_circuit();
        let d = derive_params(&p).unwrap();
        assert_relative_eq!(d.c_sigma, 35e-15, max_relative = 1e-15);
        assert_relative_eq!(d.kappa, 10.0 / 35.0, max_relative = 1e-15);
        assert_relative_eq!(d.gamma, 50.0 * (10.0 / 35.0_f64).powi(2), max_relative = 1e-15);
        assert_relative_eq!(d.tau_rc, 50.0 * (10.0 * 25.0 / 35.0) * 1e-15, max_relative = 1e-15);
    }

    #[test]
    fn inverse_rc_time_lands_in_microwave_band() {
        // 1/(2π·τ_RC) for the standard circuit sits in the few-hundred-GHz
        // range, far above every qubit and drive frequency in play.
        let d = derive_params(&standard_circuit()).unwrap();
        let f_rc = 1.0 / (2.0 * PI * d.tau_rc);
        assert_relative_eq!(f_rc, 4.4563e11, max_relative = 1e-3);
        assert!(f_rc > 350e9 && f_rc < 500e9);
    }

    #[test]
    fn charging_energy_for_35_ff_island() {
        let d = derive_params(&standard_circuit()).unwrap();
        assert_relative_eq!(d.ec / H_PLANCK, 0.5534e9, max_relative = 1e-3);
    }

    #[test]
    fn decoupling_limit_kills_damping() {
        let mut p = standard_circuit();
        p.cc = 1e-30; // farads; effectively zero against CJ = 25 fF
        let d = derive_params(&p).unwrap();
        assert!(d.gamma < 1e-25);
        assert!(d.tau_rc < 1e-25);
    }

    #[test]
    fn gate_charge_from_bias_voltage() {
        let mut p = standard_circuit();
        p.vdc = 2.0 * E_CHARGE / p.cc * 0.25; // quarter Cooper pair
        let d = derive_params(&p).unwrap();
        assert_relative_eq!(d.ng, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn two_ports_halve_damping_and_rc_time() {
        let p1 = standard_circuit();
        let p2 = CircuitParams { n_ports: 2, ..p1 };
        let d1 = derive_params(&p1).unwrap();
        let d2 = derive_params(&p2).unwrap();
        assert_eq!(d2.gamma, d1.gamma / 2.0);
        assert_eq!(d2.tau_rc, d1.tau_rc / 2.0);
    }

    #[test]
    fn rejects_nonpositive_inputs() {
        for bad in [
            CircuitParams { cc: 0.0, ..standard_circuit() },
            CircuitParams { cj: -1e-15, ..standard_circuit() },
            CircuitParams { ej: 0.0, ..standard_circuit() },
            CircuitParams { z0: -50.0, ..standard_circuit() },
            CircuitParams { temperature: -0.01, ..standard_circuit() },
            CircuitParams { n_ports: 0, ..standard_circuit() },
        ] {
            assert!(matches!(
                derive_params(&bad),
                Err(Error::ParameterDomain { .. })
            ));
        }
    }

    #[test]
    fn port_mapping_known_counts() {
        let make = |n: u32| {
            let p = CircuitParams { n_ports: n, ..standard_circuit() };
            let d = derive_params(&p).unwrap();
            map_ports(&d, n).unwrap()
        };
        let m1 = make(1);
        assert_eq!(m1.self_reflection, 1.0);
        assert_eq!(m1.in_weight, 1.0);
        assert_eq!(m1.cross_transmission, 2.0);
        let m2 = make(2);
        assert_eq!(m2.self_reflection, 0.0);
        assert_eq!(m2.cross_transmission, 1.0);
        let m4 = make(4);
        assert_eq!(m4.self_reflection, -0.5);
        assert_eq!(m4.cross_transmission, 0.5);
    }

    #[test]
    fn emission_weight_is_tau_rc_over_cj() {
        let p = standard_circuit();
        let d = derive_params(&p).unwrap();
        let m = map_ports(&d, 1).unwrap();
        assert_relative_eq!(m.emission_weight, d.tau_rc / p.cj, max_relative = 1e-12);
    }

    #[test]
    fn port_mapping_rejects_mismatched_count() {
        let d = derive_params(&standard_circuit()).unwrap();
        assert!(matches!(
            map_ports(&d, 2),
            Err(Error::ParameterDomain { .. })
        ));
    }

    #[test]
    fn zero_power_means_zero_flux() {
        assert_eq!(power_to_flux(0.0, 2.0 * PI * 5e9).unwrap(), 0.0);
    }

    #[test]
    fn flux_at_typical_drive_power() {
        // −131 dBm at 5.12 GHz carrier.
        let p = dbm_to_watt(-131.0);
        let flux = power_to_flux(p, 2.0 * PI * 5.12e9).unwrap();
        assert_relative_eq!(flux, 2.3414e7, max_relative = 1e-4);
    }

    #[test]
    fn rabi_frequency_example() {
        let gamma10 = 2.0 * PI * 41e6;
        let omega_r = flux_to_rabi(2.3e4, gamma10).unwrap();
        let f_r = omega_r / (2.0 * PI);
        assert!(f_r > 0.5e6 && f_r < 0.6e6, "Ω_R/2π = {f_r:.4e} Hz");
        assert_relative_eq!(f_r, 0.5479e6, max_relative = 1e-3);
    }

    #[test]
    fn zero_flux_means_zero_rabi() {
        assert_eq!(flux_to_rabi(0.0, 1.0e6).unwrap(), 0.0);
    }

    proptest! {
        #[test]
        fn incident_weights_conserve_flux(n in 1u32..=32) {
            // self + cross·(n−1) = 1: the outgoing fields repartition the
            // incident ones without loss at the coupling node.
            let p = CircuitParams { n_ports: n, ..standard_circuit() };
            let d = derive_params(&p).unwrap();
            let m = map_ports(&d, n).unwrap();
            let total = m.self_reflection + m.cross_transmission * f64::from(n - 1);
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn flux_linear_in_power(p_watt in 1e-20_f64..1e-10, scale in 0.1_f64..10.0) {
            let omega = 2.0 * PI * 5e9;
            let f1 = power_to_flux(p_watt, omega).unwrap();
            let f2 = power_to_flux(p_watt * scale, omega).unwrap();
            prop_assert!((f2 / f1 - scale).abs() < 1e-12 * scale);
        }

        #[test]
        fn power_flux_round_trip(p_dbm in -160.0_f64..-80.0, f_ghz in 1.0_f64..12.0) {
            let omega = 2.0 * PI * f_ghz * 1e9;
            let p = dbm_to_watt(p_dbm);
            let back = flux_to_power(power_to_flux(p, omega).unwrap(), omega);
            prop_assert!((back - p).abs() <= 1e-12 * p);
        }

        #[test]
        fn damping_scales_inversely_with_ports(n in 1u32..=16) {
            let base = derive_params(&standard_circuit()).unwrap();
            let p = CircuitParams { n_ports: n, ..standard_circuit() };
            let d = derive_params(&p).unwrap();
            prop_assert!((d.gamma * f64::from(n) - base.gamma).abs() < 1e-12 * base.gamma);
            prop_assert!((d.tau_rc * f64::from(n) - base.tau_rc).abs() < 1e-12 * base.tau_rc);
        }
    }
}
