//! Microwave scattering of coherent states on a superconducting transmon
//! coupled to open transmission lines.
//!
//! The crate models a single artificial atom (a transmon, or its two- and
//! three-level truncations) capacitively coupled to one or more semi-infinite
//! waveguides, driven by weak coherent tones. It provides:
//!
//! - circuit-level parameter derivation (charging energy, damping rate,
//!   port splitting) in [`params_units`],
//! - exact charge-basis diagonalization of the transmon with charge
//!   dispersions and drive matrix elements in [`transmon`],
//! - temperature-dependent relaxation, excitation and dephasing rates in
//!   [`rates`],
//! - a dense Lindblad master-equation engine (Liouvillian construction,
//!   steady states, propagators, two-time correlators) in [`liouville`],
//! - reflection/transmission coefficients of a driven two-level atom in
//!   [`scatter2`] and the probe/control (Autler-Townes) three-level setup
//!   in [`scatter3`],
//! - second-order photon correlations `g²(τ)` of the scattered field,
//!   including detector-bandwidth filtering via a cascaded filter
//!   resonator, in [`g2corr`].
//!
//! # Conventions
//!
//! All frequencies and rates carried between functions are *angular*
//! (rad/s); conversion from cyclic units (Hz, GHz) happens at the edges.
//! Energies are in joules. Uppercase-Γ quantities (`gamma10`, `gamma21`
//! fields) are energy relaxation rates between levels; the corresponding
//! `*_total` fields are total coherence decay rates (γ) of the associated
//! off-diagonal density-matrix element, which include lifetime and pure
//! dephasing contributions. Density matrices are stored as dense complex
//! matrices; superoperators act on column-stacked matrices, see
//! [`liouville`] for the vectorization convention.

pub mod consts;
pub mod error;
pub mod g2corr;
pub mod linalg;
pub mod liouville;
pub mod params_units;
pub mod rates;
pub mod scatter2;
pub mod scatter3;
pub mod transmon;

pub use error::{Error, Result};
pub use g2corr::{FieldSelect, G2Config, G2Curve, ThermalFactors};
pub use liouville::{DenseOperator, DensityMatrix, SuperOperator};
pub use params_units::{CircuitParams, DerivedParams, PortMapping};
pub use rates::RateSet;
pub use scatter2::{DriveSpec, ScatterResult};
pub use scatter3::{ThreeLevelDrive, ThreeLevelRates};
pub use transmon::TransmonSpectrum;

/// Complex double-precision scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
