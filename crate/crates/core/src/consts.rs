//! Physical constants (SI, 2019 redefinition — all exact).

/// Elementary charge `e` in coulomb.
pub const E_CHARGE: f64 = 1.602_176_634e-19;

/// Planck constant `h` in joule-second.
pub const H_PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant `ħ = h / 2π` in joule-second.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant `k_B` in joule per kelvin.
pub const K_B: f64 = 1.380_649e-23;

/// von Klitzing resistance quantum `R_K = h / e²` in ohm (≈ 25.813 kΩ).
pub const R_K: f64 = H_PLANCK / (E_CHARGE * E_CHARGE);
