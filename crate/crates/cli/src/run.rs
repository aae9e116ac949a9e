//! Scenario execution, CSV export, and plot-script emission.

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use wqed_core::g2corr::{g2_filtered, g2_unfiltered, G2Config, G2Curve};
use wqed_core::rates::thermal_occupation;
use wqed_core::scatter2::{numeric_rt, sweep_two_level, DriveSpec};
use wqed_core::scatter3::{sweep_three_level, ThreeLevelDrive, ThreeLevelRates};
use wqed_core::transmon::TransmonSpectrum;

use crate::config::{
    G2Cfg, RunConfig, Scenario, SpectrumCfg, ThreeLevelCfg, ThreeLevelSweep, TwoLevelCfg,
};

const TWO_PI: f64 = 2.0 * PI;

/// Tolerance on the closed-form vs steady-state reflection cross-check run
/// behind every zero-temperature two-level sweep.  Both paths are accurate
/// to solver precision, so a violation means the engine is broken — the run
/// aborts rather than emitting numbers it cannot vouch for.
const CROSS_CHECK_TOL: f64 = 1e-6;

/// A finished sweep: column headers (unit-suffixed) and data rows.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Log-spaced x axis (hint for the emitted plot script).
    pub log_x: bool,
}

/// Uniform grid including both endpoints; `n >= 2` enforced at parse time.
fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    let step = (max - min) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { max } else { min + step * k as f64 })
        .collect()
}

/// Log-spaced grid including both endpoints (`min > 0` enforced at parse
/// time).
fn logspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    linspace(min.ln(), max.ln(), n)
        .into_iter()
        .enumerate()
        .map(|(k, l)| {
            if k == 0 {
                min
            } else if k == n - 1 {
                max
            } else {
                l.exp()
            }
        })
        .collect()
}

/// Runs the configured sweep and returns the output table.
pub fn execute(cfg: &RunConfig) -> Result<Table> {
    match cfg {
        RunConfig::Spectrum(c) => run_spectrum(c),
        RunConfig::TwoLevel(c) => run_two_level(c),
        RunConfig::ThreeLevel(c) => run_three_level(c),
        RunConfig::G2(c) => run_g2(c),
    }
}

fn run_spectrum(c: &SpectrumCfg) -> Result<Table> {
    let ngs = linspace(c.ng_min, c.ng_max, c.ng_points);
    let rows = ngs
        .par_iter()
        .map(|&ng| -> Result<Vec<f64>> {
            let spec = TransmonSpectrum::compute(c.ec, c.ej, ng, 3)?;
            let f10 = (spec.omegas[1] - spec.omegas[0]) / (TWO_PI * 1e9);
            let f20 = (spec.omegas[2] - spec.omegas[0]) / (TWO_PI * 1e9);
            let f21 = f20 - f10;
            Ok(vec![ng, f10, f20, f21 - f10])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        headers: vec!["ng", "f10_GHz", "f20_GHz", "anharmonicity_GHz"],
        rows,
        log_x: false,
    })
}

fn run_two_level(c: &TwoLevelCfg) -> Result<Table> {
    // The temperature enters twice: it opens a thermal excitation channel
    // Γ₀₁ = Γ₁₀ n̄/(1+n̄) (detailed balance against the given relaxation
    // rate), and it widens the coherence decay to γ = γ_φ + (Γ₁₀+Γ₀₁)/2
    // with the pure-dephasing part γ_φ taken from the cold-line ratio.
    let (gamma_up, gamma_total) = if c.temperature > 0.0 {
        let omega = c.omega10.expect("checked at parse time");
        let n = thermal_occupation(omega, c.temperature)?;
        let up = c.gamma10 * n / (1.0 + n);
        let gamma_phi = c.gamma10_total_cold - 0.5 * c.gamma10;
        (up, gamma_phi + 0.5 * (c.gamma10 + up))
    } else {
        (0.0, c.gamma10_total_cold)
    };

    let rel_grid = linspace(c.delta_min, c.delta_max, c.delta_points);
    let deltas: Vec<f64> = rel_grid.iter().map(|&x| x * gamma_total).collect();
    let base = DriveSpec::new(c.nin, 0.0, c.gamma10, gamma_total)?;

    let results = if c.temperature > 0.0 {
        deltas
            .par_iter()
            .map(|&delta| numeric_rt(&base.with_delta(delta), gamma_up))
            .collect::<wqed_core::Result<Vec<_>>>()?
    } else {
        let analytic = sweep_two_level(&deltas, &base)?;
        if c.nin > 0.0 {
            // Confirm the closed form against the master-equation steady
            // state at every emitted point.
            let worst = deltas
                .par_iter()
                .zip(analytic.par_iter())
                .map(|(&delta, ana)| {
                    numeric_rt(&base.with_delta(delta), 0.0)
                        .map(|num| ((num.r - ana.r).norm(), delta))
                })
                .try_reduce(
                    || (0.0, f64::NAN),
                    |a, b| Ok(if a.0 >= b.0 { a } else { b }),
                )?;
            if worst.0 > CROSS_CHECK_TOL {
                bail!(
                    "solver cross-check failed: closed-form and steady-state reflection \
                     disagree by |Δr| = {:.3e} at detuning {:.6e} rad/s (tolerance {:.0e})",
                    worst.0,
                    worst.1,
                    CROSS_CHECK_TOL
                );
            }
        }
        analytic
    };

    let rows = rel_grid
        .iter()
        .zip(&results)
        .map(|(&x, res)| vec![x, res.reflectance, res.transmittance])
        .collect();
    Ok(Table {
        headers: vec!["delta_over_gamma10", "R", "T"],
        rows,
        log_x: false,
    })
}

fn run_three_level(c: &ThreeLevelCfg) -> Result<Table> {
    let rates = ThreeLevelRates::radiative(c.gamma10, c.gamma21)?;
    let gamma10_total = rates.gamma10_total;
    let nin_p = c.nin_p_rel * c.gamma10 / TWO_PI;
    let to_flux = |rel: f64| rel * c.gamma10 / TWO_PI;

    let (rel_grid, deltas_p, nin_cs, headers, log_x) = match &c.sweep {
        ThreeLevelSweep::ControlPower {
            nin_c_rel_min,
            nin_c_rel_max,
            points,
            log_spaced,
            delta_p_rel,
        } => {
            let rel: Vec<f64> = if *log_spaced {
                logspace(*nin_c_rel_min, *nin_c_rel_max, *points)
            } else {
                linspace(*nin_c_rel_min, *nin_c_rel_max, *points)
            };
            let fluxes: Vec<f64> = rel.iter().map(|&x| to_flux(x)).collect();
            (
                rel,
                vec![delta_p_rel * gamma10_total],
                fluxes,
                vec!["NinC_rel", "R", "T"],
                *log_spaced,
            )
        }
        ThreeLevelSweep::ProbeDetuning {
            delta_p_rel_min,
            delta_p_rel_max,
            points,
            nin_c_rel,
        } => {
            let rel = linspace(*delta_p_rel_min, *delta_p_rel_max, *points);
            let deltas: Vec<f64> = rel.iter().map(|&x| x * gamma10_total).collect();
            (
                rel,
                deltas,
                vec![to_flux(*nin_c_rel)],
                vec!["delta_p_over_gamma10", "R", "T"],
                false,
            )
        }
    };

    let base = ThreeLevelDrive::new(nin_p, nin_cs[0], deltas_p[0], 0.0, rates)?;
    let points = sweep_three_level(&deltas_p, &nin_cs, &base)?;
    let rows = rel_grid
        .iter()
        .zip(&points)
        .map(|(&x, p)| vec![x, p.result.reflectance, p.result.transmittance])
        .collect();
    Ok(Table {
        headers,
        rows,
        log_x,
    })
}

fn run_g2(c: &G2Cfg) -> Result<Table> {
    // Build the grid in nanoseconds so the emitted column is free of
    // round-trip artifacts, and convert once for the solver.
    let taus_ns = linspace(0.0, c.tau_max_ns, c.tau_points);
    let tau_grid: Vec<f64> = taus_ns.iter().map(|&t| t * 1e-9).collect();
    let curve: G2Curve = match c.gamma_bw {
        Some(bw) => {
            let mut cfg = G2Config::filtered_detection(
                c.field,
                bw,
                c.temperature,
                c.gamma10,
                c.omega10,
                c.nin,
            );
            cfg.tau_grid = tau_grid;
            g2_filtered(&cfg)?
        }
        None => {
            let mut cfg = G2Config::broadband_detection(
                c.field,
                c.temperature,
                c.gamma10,
                c.omega10,
                c.nin,
            );
            cfg.tau_grid = tau_grid;
            g2_unfiltered(&cfg)?
        }
    };
    let rows = taus_ns
        .iter()
        .zip(&curve.values)
        .map(|(&tau_ns, &g2)| vec![tau_ns, g2])
        .collect();
    Ok(Table {
        headers: vec!["tau_ns", "g2"],
        rows,
        log_x: false,
    })
}

/// Writes the table as CSV (comma-separated, header row, `\n` line ends,
/// numbers in shortest round-trip decimal form).
pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create output file {}", path.display()))?;
    w.write_record(&table.headers)?;
    for row in &table.rows {
        debug_assert_eq!(row.len(), table.headers.len());
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// A matplotlib script that renders the CSV sitting next to it.
pub fn plot_script(scenario: Scenario, csv_name: &str, table: &Table) -> String {
    let x = table.headers[0];
    let ys: Vec<&str> = table.headers[1..].to_vec();
    let y_plots: String = ys
        .iter()
        .map(|y| format!("ax.plot(cols[\"{x}\"], cols[\"{y}\"], label=\"{y}\")\n"))
        .collect();
    let xscale = if table.log_x {
        "ax.set_xscale(\"log\")\n"
    } else {
        ""
    };
    let ylabel = if ys.len() == 1 { ys[0] } else { "value" };
    format!(
        r#""""Render {csv_name} (written by wqed-scatter {scenario_name})."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

path = Path(__file__).with_name("{csv_name}")
with path.open(newline="") as fh:
    rows = list(csv.DictReader(fh))
cols = {{name: [float(row[name]) for row in rows] for name in rows[0]}}

fig, ax = plt.subplots(figsize=(6.0, 4.0))
{y_plots}{xscale}ax.set_xlabel("{x}")
ax.set_ylabel("{ylabel}")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
out = path.with_suffix(".png")
fig.savefig(out, dpi=200)
print(f"wrote {{out}}")
"#,
        scenario_name = scenario.name(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_both_endpoints_exactly() {
        let g = linspace(-10.0, 10.0, 401);
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], -10.0);
        assert_eq!(g[400], 10.0);
        assert!((g[200] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn logspace_hits_both_endpoints_exactly() {
        let g = logspace(0.1, 10.0, 21);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[20], 10.0);
        assert!((g[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_level_sweep_peaks_on_resonance() {
        let cfg = TwoLevelCfg {
            gamma10: TWO_PI * 41e6,
            gamma10_total_cold: 0.5 * TWO_PI * 41e6,
            nin: 0.01 * 41e6,
            omega10: None,
            temperature: 0.0,
            delta_min: -5.0,
            delta_max: 5.0,
            delta_points: 11,
        };
        let table = run_two_level(&cfg).unwrap();
        assert_eq!(table.headers, vec!["delta_over_gamma10", "R", "T"]);
        assert_eq!(table.rows.len(), 11);
        let center = &table.rows[5];
        assert!(center[1] > 0.9, "on-resonance R = {}", center[1]);
        // The coherent fraction cannot exceed unity; the shortfall is the
        // inelastically scattered share and grows with drive strength.
        for row in &table.rows {
            let sum = row[1] + row[2];
            assert!(sum <= 1.0 + 1e-12, "R+T = {sum}");
            assert!(sum > 0.9, "R+T = {sum}");
        }
    }
}
