//! Second-order (intensity) correlations of the field scattered by a driven
//! two-level emitter, with finite temperature and finite detection bandwidth.
//!
//! A detector of bandwidth `gamma_bw` is modeled as a single-mode resonator
//! tuned to the emitter frequency and cascaded after it: the emitter output
//! feeds the resonator unidirectionally, and normalized photon correlations
//! `g²(τ)` are read from the resonator mode.  In the frame rotating at the
//! (resonant) drive frequency both the emitter and resonator Hamiltonians
//! vanish, so the joint generator is built purely from dissipators, the
//! one-way cascade couplings, and the coherent drive term.
//!
//! For the *reflected* field the resonator receives the emitter emission
//! alone; for the *transmitted* field the coherent drive is additionally fed
//! forward into the resonator, which produces photon bunching instead of
//! antibunching.  The infinite-bandwidth limit ([`g2_unfiltered`]) evaluates
//! correlations of the bare emitter dipole and is reproduced pointwise by the
//! filtered path once `gamma_bw` exceeds a few tens of emitter linewidths.
//!
//! The resonator thermal weights in the cascade generator are
//! `(n/2 + 1, n/2)` by default — see [`ThermalFactors`] for the conventional
//! `(n + 1, n)` alternative exposed for sensitivity analysis.

use ndarray::linalg::kron;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::liouville::{
    build_liouvillian, commutator_map, dissipator, sandwich_terms, two_time_g2, DenseOperator,
    SuperOperator,
};
use crate::linalg::{dagger, identity, one_norm};
use crate::rates::thermal_occupation;
use crate::C64;

/// Which output port of the emitter the detector looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSelect {
    /// Emission only: the field radiated back toward the source.
    Reflected,
    /// Drive plus forward emission: the field continuing past the emitter.
    Transmitted,
}

/// Thermal weighting of the filter-resonator dissipators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThermalFactors {
    /// Cascade weights `(n/2 + 1)·D(a)` and `(n/2)·D(a†)`: the module's
    /// default, matching the generator used for all reference results.  At
    /// zero temperature both variants coincide.
    HalfOccupancy,
    /// Textbook thermal-bath weights `(n + 1)·D(a)` and `n·D(a†)`, exposed
    /// for sensitivity analysis of the finite-temperature curves.
    FullOccupancy,
}

/// Configuration of one correlation computation.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Config {
    /// Which output field the detector receives.
    pub field: FieldSelect,
    /// Whether a finite-bandwidth filter resonator is cascaded after the
    /// emitter (`false` = idealized infinite-bandwidth detection).
    pub filtered: bool,
    /// Filter resonator energy-decay rate (rad/s); must be positive when
    /// `filtered`, ignored otherwise.
    pub gamma_bw: f64,
    /// Fock-space truncation of the filter resonator (≥ 2 when `filtered`).
    /// [`g2_filtered`] doubles this automatically until `g²(0)` is converged.
    pub n_fock: usize,
    /// Environment temperature (kelvin).
    pub temperature: f64,
    /// Emitter relaxation rate Γ₁₀ (rad/s).
    pub gamma10: f64,
    /// Emitter transition frequency ω₁₀ (rad/s); sets the thermal occupation.
    pub omega10: f64,
    /// Incoming photon flux of the resonant drive (photons/s).
    pub nin: f64,
    /// Delay grid (seconds, ascending, starting at ≥ 0).
    pub tau_grid: Vec<f64>,
    /// Thermal weighting of the resonator dissipators.
    pub thermal_factors: ThermalFactors,
}

impl G2Config {
    /// Finite-bandwidth detection through a cascaded filter resonator, with
    /// the default truncation (8), delay grid ([`default_tau_grid`]), and
    /// thermal weights ([`ThermalFactors::HalfOccupancy`]).
    pub fn filtered_detection(
        field: FieldSelect,
        gamma_bw: f64,
        temperature: f64,
        gamma10: f64,
        omega10: f64,
        nin: f64,
    ) -> Self {
        G2Config {
            field,
            filtered: true,
            gamma_bw,
            n_fock: 8,
            temperature,
            gamma10,
            omega10,
            nin,
            tau_grid: default_tau_grid(),
            thermal_factors: ThermalFactors::HalfOccupancy,
        }
    }

    /// Idealized infinite-bandwidth detection on the bare emitter dipole.
    pub fn broadband_detection(
        field: FieldSelect,
        temperature: f64,
        gamma10: f64,
        omega10: f64,
        nin: f64,
    ) -> Self {
        G2Config {
            field,
            filtered: false,
            gamma_bw: 0.0,
            n_fock: 2,
            temperature,
            gamma10,
            omega10,
            nin,
            tau_grid: default_tau_grid(),
            thermal_factors: ThermalFactors::HalfOccupancy,
        }
    }

    /// Copy with a different delay grid.
    pub fn with_tau_grid(mut self, tau_grid: Vec<f64>) -> Self {
        self.tau_grid = tau_grid;
        self
    }

    /// Copy with a different starting Fock truncation.
    pub fn with_n_fock(mut self, n_fock: usize) -> Self {
        self.n_fock = n_fock;
        self
    }

    /// Copy with the other thermal-weight convention.
    pub fn with_thermal_factors(mut self, thermal_factors: ThermalFactors) -> Self {
        self.thermal_factors = thermal_factors;
        self
    }

    /// Checks the parameter domain and grid shape.
    pub fn validate(&self) -> Result<()> {
        if !self.gamma10.is_finite() || self.gamma10 <= 0.0 {
            return Err(Error::ParameterDomain {
                what: "gamma10",
                value: self.gamma10,
                requirement: "emitter relaxation rate must be finite and > 0",
            });
        }
        if !self.omega10.is_finite() || self.omega10 <= 0.0 {
            return Err(Error::ParameterDomain {
                what: "omega10",
                value: self.omega10,
                requirement: "emitter frequency must be finite and > 0",
            });
        }
        if !self.nin.is_finite() || self.nin < 0.0 {
            return Err(Error::ParameterDomain {
                what: "nin",
                value: self.nin,
                requirement: "photon flux must be finite and >= 0",
            });
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(Error::ParameterDomain {
                what: "temperature",
                value: self.temperature,
                requirement: "temperature must be finite and >= 0",
            });
        }
        if self.filtered {
            if !self.gamma_bw.is_finite() || self.gamma_bw <= 0.0 {
                return Err(Error::ParameterDomain {
                    what: "gamma_bw",
                    value: self.gamma_bw,
                    requirement: "filter bandwidth must be finite and > 0 when filtered",
                });
            }
            if self.n_fock < 2 {
                return Err(Error::ParameterDomain {
                    what: "n_fock",
                    value: self.n_fock as f64,
                    requirement: ">= 2 when filtered",
                });
            }
        }
        if self.tau_grid.is_empty() {
            return Err(Error::ParameterDomain {
                what: "tau_grid",
                value: 0.0,
                requirement: "delay grid must be non-empty",
            });
        }
        if !self.tau_grid[0].is_finite() || self.tau_grid[0] < 0.0 {
            return Err(Error::ParameterDomain {
                what: "tau_grid",
                value: self.tau_grid[0],
                requirement: "delays must be finite and >= 0",
            });
        }
        for pair in self.tau_grid.windows(2) {
            if !pair[1].is_finite() || pair[1] < pair[0] {
                return Err(Error::ParameterDomain {
                    what: "tau_grid",
                    value: pair[1],
                    requirement: "delay grid must be ascending and finite",
                });
            }
        }
        Ok(())
    }

    /// Thermal photon occupation at the emitter frequency.
    pub fn thermal_occupation(&self) -> Result<f64> {
        thermal_occupation(self.omega10, self.temperature)
    }
}

/// Normalized intensity-correlation curve.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Curve {
    /// Delay grid (seconds, ascending).
    pub taus: Vec<f64>,
    /// `g²(τ)` at each delay (dimensionless, nonnegative).
    pub values: Vec<f64>,
}

impl G2Curve {
    /// Builds a curve, validating grid shape and nonnegativity.  Values in
    /// `[−1e−8, 0)` are rounded up to zero (they are exact zeros polluted by
    /// floating-point cancellation); anything more negative is rejected.
    pub fn new(taus: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if taus.len() != values.len() || taus.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "G2Curve",
                expected: taus.len().max(1),
                got: values.len(),
            });
        }
        if !taus[0].is_finite() || taus[0] < 0.0 {
            return Err(Error::ParameterDomain {
                what: "taus",
                value: taus[0],
                requirement: "delays must be finite and >= 0",
            });
        }
        for pair in taus.windows(2) {
            if !pair[1].is_finite() || pair[1] < pair[0] {
                return Err(Error::ParameterDomain {
                    what: "taus",
                    value: pair[1],
                    requirement: "delay grid must be ascending and finite",
                });
            }
        }
        let mut clean = Vec::with_capacity(values.len());
        for &v in &values {
            if !v.is_finite() || v < -1e-8 {
                return Err(Error::NumericalCheck {
                    context: "G2Curve",
                    detail: format!("correlation value {v:.6e} is negative beyond roundoff"),
                });
            }
            clean.push(v.max(0.0));
        }
        Ok(G2Curve {
            taus,
            values: clean,
        })
    }

    /// Number of delay points.
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    /// Whether the curve has no points (never true for a validated curve).
    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Value at the first grid point (the zero-delay correlation when the
    /// grid starts at τ = 0).
    pub fn at_start(&self) -> f64 {
        self.values[0]
    }
}

/// Default delay grid: 400 uniform points covering 0–200 ns, resolving the
/// correlation dip of an emitter with a linewidth of tens of MHz.
pub fn default_tau_grid() -> Vec<f64> {
    let n = 400;
    (0..n).map(|k| 200e-9 * k as f64 / (n - 1) as f64).collect()
}

/// Assembles the joint emitter–resonator generator of the cascaded detection
/// model on the `2 × n_fock` space (emitter factor first, column-stacked
/// vectorization).
///
/// Terms, with `n` the thermal occupation at the emitter frequency and
/// `Γ₀₁ = Γ₁₀ n/(1+n)`:
///
/// * emitter dissipators `Γ₁₀ D(σ⁻)` and `Γ₀₁ D(σ⁺)`;
/// * resonator dissipators `γ_BW [w_down D(a) + w_up D(a†)]` with
///   `(w_down, w_up)` from the [`ThermalFactors`] convention;
/// * one-way cascade couplings
///   `(i/2)√(Γ₁₀(n+1)γ_BW) ([a, ρσ⁺] + [a†, σ⁻ρ])` and
///   `(i/2)√(Γ₀₁ n γ_BW) ([σ⁺ρ, a] + [ρσ⁻, a†])`;
/// * drive `i√(Γ₁₀ nin / (2(n+1))) [ρ, σˣ]`;
/// * for transmitted-field detection, the drive feed-forward
///   `√(γ_BW nin / 2) [ρ, a† − a]`.
///
/// The result is checked to annihilate the trace functional before being
/// returned.
pub fn build_cascaded_liouvillian(cfg: &G2Config) -> Result<SuperOperator> {
    cfg.validate()?;
    if !cfg.filtered {
        return Err(Error::ParameterDomain {
            what: "filtered",
            value: 0.0,
            requirement: "cascaded generator requires a filter resonator (filtered = true)",
        });
    }
    build_with_n_fock(cfg, cfg.n_fock)
}

fn build_with_n_fock(cfg: &G2Config, n_fock: usize) -> Result<SuperOperator> {
    let n = cfg.thermal_occupation()?;
    let gamma10 = cfg.gamma10;
    let gamma01 = gamma10 * n / (1.0 + n);
    let gamma_bw = cfg.gamma_bw;
    let (w_down, w_up) = match cfg.thermal_factors {
        ThermalFactors::HalfOccupancy => (0.5 * n + 1.0, 0.5 * n),
        ThermalFactors::FullOccupancy => (n + 1.0, n),
    };

    let s_m = kron(&transmon_lowering(), &identity(n_fock));
    let s_p = dagger(&s_m);
    let s_x = &s_m + &s_p;
    let a_j = kron(&identity(2), &fock_annihilation(n_fock));
    let a_dag = dagger(&a_j);
    let d = 2 * n_fock;
    let eye = identity(d);

    let mut gen: Array2<C64> = Array2::zeros((d * d, d * d));
    let mut acc = |term: &SuperOperator, coeff: C64| {
        gen += &(term.matrix() * coeff);
    };

    acc(&dissipator(&s_m)?, C64::new(gamma10, 0.0));
    if gamma01 > 0.0 {
        acc(&dissipator(&s_p)?, C64::new(gamma01, 0.0));
    }
    acc(&dissipator(&a_j)?, C64::new(gamma_bw * w_down, 0.0));
    if w_up > 0.0 {
        acc(&dissipator(&a_dag)?, C64::new(gamma_bw * w_up, 0.0));
    }

    // Emission cascade: (i/2)√(Γ₁₀(n+1)γ_BW) ([a, ρσ⁺] + [a†, σ⁻ρ]).
    let c_emit = C64::new(0.0, 0.5) * (gamma10 * (1.0 + n) * gamma_bw).sqrt();
    acc(&sandwich_terms(&a_j, &s_p)?, c_emit);
    acc(&sandwich_terms(&eye, &s_p.dot(&a_j))?, -c_emit);
    acc(&sandwich_terms(&a_dag.dot(&s_m), &eye)?, c_emit);
    acc(&sandwich_terms(&s_m, &a_dag)?, -c_emit);

    // Absorption cascade: (i/2)√(Γ₀₁ n γ_BW) ([σ⁺ρ, a] + [ρσ⁻, a†]).
    let c_abs = C64::new(0.0, 0.5) * (gamma01 * n * gamma_bw).sqrt();
    if c_abs.norm() > 0.0 {
        acc(&sandwich_terms(&s_p, &a_j)?, c_abs);
        acc(&sandwich_terms(&a_j.dot(&s_p), &eye)?, -c_abs);
        acc(&sandwich_terms(&eye, &s_m.dot(&a_dag))?, c_abs);
        acc(&sandwich_terms(&a_dag, &s_m)?, -c_abs);
    }

    // Coherent drive on the emitter: i√(Γ₁₀ nin/(2(n+1))) [ρ, σˣ].
    let c_drive = C64::new(0.0, 1.0) * (gamma10 * cfg.nin / (2.0 * (1.0 + n))).sqrt();
    acc(&commutator_map(&s_x)?, c_drive);

    // Transmitted field: feed the drive forward into the resonator.
    if cfg.field == FieldSelect::Transmitted {
        let c_fwd = (gamma_bw * cfg.nin / 2.0).sqrt();
        let displacement = &a_dag - &a_j;
        acc(&commutator_map(&displacement)?, C64::new(c_fwd, 0.0));
    }

    let generator = SuperOperator::from_matrix(gen)?;
    let defect = cascade_trace_defect(&generator);
    let scale = one_norm(generator.matrix()).max(1.0);
    if defect > 1e-10 * scale {
        return Err(Error::NumericalCheck {
            context: "build_cascaded_liouvillian",
            detail: format!(
                "generator does not preserve the trace: defect {defect:.3e} vs scale {scale:.3e}"
            ),
        });
    }
    Ok(generator)
}

/// Largest entry of the trace functional composed with the generator; zero
/// for any trace-preserving map.
fn cascade_trace_defect(l: &SuperOperator) -> f64 {
    let d = l.dim();
    let mat = l.matrix();
    let mut worst: f64 = 0.0;
    for col in 0..d * d {
        let mut sum = C64::new(0.0, 0.0);
        for k in 0..d {
            sum += mat[[k * d + k, col]];
        }
        worst = worst.max(sum.norm());
    }
    worst
}

/// `g²(τ)` of the selected output field seen through the bandwidth filter.
///
/// The resonator truncation starts at `cfg.n_fock` and doubles until
/// `g²(0)` changes by less than 10⁻³ when two more Fock states are added;
/// the converged curve is evaluated at that enlarged truncation.  Fails with
/// a truncation error if 64 Fock states are not enough.
pub fn g2_filtered(cfg: &G2Config) -> Result<G2Curve> {
    cfg.validate()?;
    if !cfg.filtered {
        return Err(Error::ParameterDomain {
            what: "filtered",
            value: 0.0,
            requirement: "g2_filtered requires a filter resonator (filtered = true)",
        });
    }
    const CONVERGENCE_TOL: f64 = 1e-3;
    const MAX_N_FOCK: usize = 64;

    let mut n_fock = cfg.n_fock.max(2);
    let accepted = loop {
        let coarse = g2_at_zero(cfg, n_fock)?;
        let fine = g2_at_zero(cfg, n_fock + 2)?;
        if (coarse - fine).abs() < CONVERGENCE_TOL {
            break n_fock + 2;
        }
        n_fock *= 2;
        if n_fock > MAX_N_FOCK {
            return Err(Error::TruncationNotConverged {
                detail: format!(
                    "g²(0) still moves by more than {CONVERGENCE_TOL:.0e} per +2 Fock states \
                     at truncation {MAX_N_FOCK}"
                ),
            });
        }
    };

    let generator = build_with_n_fock(cfg, accepted)?;
    let a_j = kron(&identity(2), &fock_annihilation(accepted));
    two_time_g2(&generator, &a_j, &cfg.tau_grid)
}

/// Zero-delay correlation at a fixed resonator truncation, bypassing the
/// automatic doubling of [`g2_filtered`].
///
/// Intended for truncation-convergence studies: evaluating at `n` and
/// `n + 2` measures directly how much the answer still depends on the
/// Fock-space cutoff.
pub fn g2_at_zero(cfg: &G2Config, n_fock: usize) -> Result<f64> {
    let generator = build_with_n_fock(cfg, n_fock)?;
    let a_j = kron(&identity(2), &fock_annihilation(n_fock));
    Ok(two_time_g2(&generator, &a_j, &[0.0])?.values[0])
}

/// `g²(τ)` of the reflected field with idealized infinite-bandwidth
/// detection: correlations of the bare emitter dipole σ⁻ under the same
/// drive and thermal rates as the cascaded model.
///
/// Transmitted-field correlations have no bare-dipole form — the transmitted
/// field is the coherent sum of drive and forward emission, which only the
/// filtered path represents — so they are rejected here.
pub fn g2_unfiltered(cfg: &G2Config) -> Result<G2Curve> {
    cfg.validate()?;
    if cfg.filtered {
        return Err(Error::ParameterDomain {
            what: "filtered",
            value: 1.0,
            requirement: "g2_unfiltered computes the no-filter limit (filtered = false)",
        });
    }
    if cfg.field == FieldSelect::Transmitted {
        return Err(Error::ClosedFormUnavailable {
            detail: "unfiltered transmitted-field correlations require composing the drive \
                     with the forward emission; use the filtered path with a wide bandwidth"
                .to_string(),
        });
    }
    let n = cfg.thermal_occupation()?;
    let gamma01 = cfg.gamma10 * n / (1.0 + n);
    let s_m = transmon_lowering();
    let s_p = dagger(&s_m);
    let s_x = &s_m + &s_p;

    let h: DenseOperator = Array2::zeros((2, 2));
    let collapse = [(cfg.gamma10, s_m.clone()), (gamma01, s_p)];
    let c_drive = C64::new(0.0, 1.0) * (cfg.gamma10 * cfg.nin / (2.0 * (1.0 + n))).sqrt();
    let drive = commutator_map(&s_x)?.scaled(c_drive);
    let generator = build_liouvillian(&h, &collapse, &[drive])?;
    two_time_g2(&generator, &s_m, &cfg.tau_grid)
}

/// Lowering operator |0⟩⟨1| of the emitter factor.
fn transmon_lowering() -> DenseOperator {
    let mut op: DenseOperator = Array2::zeros((2, 2));
    op[[0, 1]] = C64::new(1.0, 0.0);
    op
}

/// Truncated annihilation operator on `n_fock` Fock states.
fn fock_annihilation(n_fock: usize) -> DenseOperator {
    let mut op: DenseOperator = Array2::zeros((n_fock, n_fock));
    for k in 1..n_fock {
        op[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    op
}
