//! Key=value configuration parsing for the sweep scenarios.
//!
//! Grammar: one `key=value` pair per line; `#` starts a comment (full-line
//! or trailing); blank lines ignored. Keys are scenario-specific and
//! unit-suffixed (`Gamma10_MHz`, `f10_GHz`, `P_dBm`, `T_mK`, `BW_MHz`, …);
//! unknown keys, duplicates, malformed numbers, and same-quantity-twice
//! conflicts are all rejected with the offending line number and key name.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use anyhow::{anyhow, bail, Result};
use wqed_core::consts::H_PLANCK;
use wqed_core::g2corr::FieldSelect;
use wqed_core::params_units::{dbm_to_watt, power_to_flux};

const TWO_PI: f64 = 2.0 * PI;

/// Which sweep the binary runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    /// Transmon level structure vs gate charge.
    Spectrum,
    /// Two-level reflectance/transmittance vs probe detuning.
    #[value(name = "two-level")]
    TwoLevel,
    /// Probe response of the driven three-level ladder.
    #[value(name = "three-level")]
    ThreeLevel,
    /// Second-order correlation of the scattered field vs delay.
    G2,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::TwoLevel => "two-level",
            Scenario::ThreeLevel => "three-level",
            Scenario::G2 => "g2",
        }
    }
}

/// Transmon spectrum sweep over gate charge.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCfg {
    /// Charging energy, joule.
    pub ec: f64,
    /// Josephson energy, joule.
    pub ej: f64,
    pub ng_min: f64,
    pub ng_max: f64,
    pub ng_points: usize,
}

/// Two-level detuning sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelCfg {
    /// Relaxation rate Γ₁₀, rad/s.
    pub gamma10: f64,
    /// Zero-temperature coherence decay γ₁₀ = γ_φ + Γ₁₀/2, rad/s.
    pub gamma10_total_cold: f64,
    /// Drive photon flux, photons/s.
    pub nin: f64,
    /// Transition frequency ω₁₀, rad/s (needed for dBm drive and T > 0).
    pub omega10: Option<f64>,
    /// Temperature, kelvin.
    pub temperature: f64,
    /// Detuning grid bounds in units of γ₁₀ and point count.
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta_points: usize,
}

/// Three-level sweep axis.
#[derive(Debug, Clone, PartialEq)]
pub enum ThreeLevelSweep {
    /// Control-power sweep at fixed probe detuning (units of γ₁₀).
    ControlPower {
        nin_c_rel_min: f64,
        nin_c_rel_max: f64,
        points: usize,
        log_spaced: bool,
        delta_p_rel: f64,
    },
    /// Probe-detuning sweep (units of γ₁₀) at fixed control power.
    ProbeDetuning {
        delta_p_rel_min: f64,
        delta_p_rel_max: f64,
        points: usize,
        nin_c_rel: f64,
    },
}

/// Three-level probe/control sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelCfg {
    /// Relaxation rate Γ₁₀, rad/s.
    pub gamma10: f64,
    /// Upper relaxation rate Γ₂₁, rad/s.
    pub gamma21: f64,
    /// Probe flux as a multiple of Γ₁₀/2π (0 selects linear response).
    pub nin_p_rel: f64,
    pub sweep: ThreeLevelSweep,
}

/// Correlation-function computation.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Cfg {
    /// Relaxation rate Γ₁₀, rad/s.
    pub gamma10: f64,
    /// Transition frequency ω₁₀, rad/s.
    pub omega10: f64,
    /// Drive photon flux, photons/s.
    pub nin: f64,
    /// Temperature, kelvin.
    pub temperature: f64,
    /// Detection filter energy decay rate (rad/s); `None` = broadband.
    pub gamma_bw: Option<f64>,
    pub field: FieldSelect,
    pub tau_max_ns: f64,
    pub tau_points: usize,
}

/// A parsed, validated scenario configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum RunConfig {
    Spectrum(SpectrumCfg),
    TwoLevel(TwoLevelCfg),
    ThreeLevel(ThreeLevelCfg),
    G2(G2Cfg),
}

/// One raw `key=value` occurrence.
struct Entry {
    line: usize,
    value: String,
}

/// Raw key/value map with line bookkeeping and typed extraction.
struct Raw {
    scenario: Scenario,
    entries: BTreeMap<String, Entry>,
}

impl Raw {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => bail!(
                    "config line {}: malformed number for key \"{key}\": \"{}\"",
                    e.line,
                    e.value
                ),
            },
        }
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| {
            anyhow!(
                "missing required key \"{key}\" for scenario {}",
                self.scenario.name()
            )
        })
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn usize_opt(&mut self, key: &str) -> Result<Option<usize>> {
        match self.take(key) {
            None => Ok(None),
            Some(e) => match e.value.parse::<usize>() {
                Ok(v) => Ok(Some(v)),
                _ => bail!(
                    "config line {}: malformed number for key \"{key}\": \"{}\" (expected a non-negative integer)",
                    e.line,
                    e.value
                ),
            },
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        Ok(self.usize_opt(key)?.unwrap_or(default))
    }

    /// Exactly-one-of extraction for quantities expressible in two units.
    /// Returns the key that was present and its value.
    fn one_of(&mut self, a: &str, b: &str) -> Result<Option<(&'static str, f64)>> {
        let line_a = self.entries.get(a).map(|e| e.line);
        let line_b = self.entries.get(b).map(|e| e.line);
        if let (Some(la), Some(lb)) = (line_a, line_b) {
            bail!(
                "config: keys \"{a}\" (line {la}) and \"{b}\" (line {lb}) set the same \
                 quantity in different units; give exactly one"
            );
        }
        // Keys are compared against a fixed table, so returning the matched
        // table entry keeps the 'static lifetime.
        if line_a.is_some() {
            let v = self.f64_req(a)?;
            let name = KNOWN_KEYS.iter().find(|&&k| k == a).copied().unwrap_or("key");
            return Ok(Some((name, v)));
        }
        if line_b.is_some() {
            let v = self.f64_req(b)?;
            let name = KNOWN_KEYS.iter().find(|&&k| k == b).copied().unwrap_or("key");
            return Ok(Some((name, v)));
        }
        Ok(None)
    }

    fn finish(self) -> Result<()> {
        if let Some((key, e)) = self.entries.into_iter().next() {
            bail!(
                "config line {}: unknown key \"{key}\" for scenario {}",
                e.line,
                self.scenario.name()
            );
        }
        Ok(())
    }
}

/// All keys any scenario understands (used to keep `'static` names around).
const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "EC_GHz",
    "EJ_over_EC",
    "ng_min",
    "ng_max",
    "ng_points",
    "Gamma10_MHz",
    "Gamma21_over_Gamma10",
    "gamma10_total_over_Gamma10",
    "f10_GHz",
    "Nin_rel",
    "P_dBm",
    "T_mK",
    "delta_min_over_gamma10",
    "delta_max_over_gamma10",
    "delta_points",
    "NinP_rel",
    "NinC_rel",
    "NinC_rel_min",
    "NinC_rel_max",
    "NinC_points",
    "NinC_grid",
    "delta_p_over_gamma10",
    "delta_p_min_over_gamma10",
    "delta_p_max_over_gamma10",
    "delta_p_points",
    "BW_MHz",
    "BW_GHz",
    "field",
    "tau_max_ns",
    "tau_points",
];

/// Split raw text into a line-numbered key/value map, rejecting malformed
/// lines and duplicate keys.
fn tokenize(text: &str, scenario: Scenario) -> Result<Raw> {
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            bail!("config line {line}: expected key=value, got \"{content}\"");
        };
        let key = content[..eq].trim();
        let value = content[eq + 1..].trim();
        if key.is_empty() {
            bail!("config line {line}: empty key before '='");
        }
        if let Some(prev) = entries.get(key) {
            bail!(
                "config line {line}: duplicate key \"{key}\" (already set on line {})",
                prev.line
            );
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(Raw { scenario, entries })
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        bail!("config: key \"{key}\" out of range: must be > 0, got {v}")
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else {
        bail!("config: key \"{key}\" out of range: must be >= 0, got {v}")
    }
}

fn grid(points_key: &str, points: usize, min_key: &str, min: f64, max: f64) -> Result<()> {
    if points < 2 {
        bail!("config: key \"{points_key}\" out of range: a sweep needs at least 2 points");
    }
    if !(min < max) {
        bail!(
            "config: key \"{min_key}\" out of range: sweep minimum {min} must lie below the maximum {max}"
        );
    }
    Ok(())
}

/// Drive flux from either `Nin_rel` (relative to Γ₁₀/2π) or `P_dBm`
/// (needs ω₁₀); errors name whichever key is involved.
fn drive_flux(raw: &mut Raw, gamma10: f64, omega10: Option<f64>) -> Result<f64> {
    match raw.one_of("Nin_rel", "P_dBm")? {
        Some(("Nin_rel", rel)) => Ok(non_negative("Nin_rel", rel)? * gamma10 / TWO_PI),
        Some(("P_dBm", dbm)) => {
            let omega = omega10.ok_or_else(|| {
                anyhow!("key \"P_dBm\" needs \"f10_GHz\" to convert power to photon flux")
            })?;
            Ok(power_to_flux(dbm_to_watt(dbm), omega)?)
        }
        Some((other, _)) => unreachable!("one_of returned unexpected key {other}"),
        None => bail!(
            "missing drive strength for scenario {}: set exactly one of \"Nin_rel\" or \"P_dBm\"",
            raw.scenario.name()
        ),
    }
}

/// Parse and validate a configuration for the given scenario.
pub fn parse_config(text: &str, scenario: Scenario) -> Result<RunConfig> {
    let mut raw = tokenize(text, scenario)?;

    // An explicit scenario key must agree with the command line.
    if let Some(e) = raw.take("scenario") {
        if e.value != scenario.name() {
            bail!(
                "config line {}: scenario \"{}\" does not match the requested scenario \"{}\"",
                e.line,
                e.value,
                scenario.name()
            );
        }
    }

    let cfg = match scenario {
        Scenario::Spectrum => {
            let ec_ghz = positive("EC_GHz", raw.f64_req("EC_GHz")?)?;
            let ratio = positive("EJ_over_EC", raw.f64_req("EJ_over_EC")?)?;
            let ng_min = raw.f64_or("ng_min", 0.0)?;
            let ng_max = raw.f64_or("ng_max", 1.0)?;
            let ng_points = raw.usize_or("ng_points", 101)?;
            grid("ng_points", ng_points, "ng_min", ng_min, ng_max)?;
            let ec = H_PLANCK * ec_ghz * 1e9;
            RunConfig::Spectrum(SpectrumCfg {
                ec,
                ej: ratio * ec,
                ng_min,
                ng_max,
                ng_points,
            })
        }
        Scenario::TwoLevel => {
            let gamma10 = positive("Gamma10_MHz", raw.f64_req("Gamma10_MHz")?)? * TWO_PI * 1e6;
            let ratio = raw.f64_or("gamma10_total_over_Gamma10", 0.5)?;
            if ratio < 0.5 {
                bail!(
                    "config: key \"gamma10_total_over_Gamma10\" out of range: must be >= 0.5 \
                     (coherence cannot decay slower than half the relaxation rate), got {ratio}"
                );
            }
            let omega10 = raw.f64_opt("f10_GHz")?.map(|f| TWO_PI * f * 1e9);
            if let Some(om) = omega10 {
                positive("f10_GHz", om)?;
            }
            let temperature = non_negative("T_mK", raw.f64_or("T_mK", 0.0)?)? * 1e-3;
            if temperature > 0.0 && omega10.is_none() {
                bail!("key \"T_mK\" > 0 needs \"f10_GHz\" to set the thermal occupation");
            }
            let nin = drive_flux(&mut raw, gamma10, omega10)?;
            let delta_min = raw.f64_or("delta_min_over_gamma10", -10.0)?;
            let delta_max = raw.f64_or("delta_max_over_gamma10", 10.0)?;
            let delta_points = raw.usize_or("delta_points", 401)?;
            grid(
                "delta_points",
                delta_points,
                "delta_min_over_gamma10",
                delta_min,
                delta_max,
            )?;
            RunConfig::TwoLevel(TwoLevelCfg {
                gamma10,
                gamma10_total_cold: ratio * gamma10,
                nin,
                omega10,
                temperature,
                delta_min,
                delta_max,
                delta_points,
            })
        }
        Scenario::ThreeLevel => {
            let gamma10 = positive("Gamma10_MHz", raw.f64_req("Gamma10_MHz")?)? * TWO_PI * 1e6;
            let g21_ratio = positive(
                "Gamma21_over_Gamma10",
                raw.f64_or("Gamma21_over_Gamma10", 2.0)?,
            )?;
            let nin_p_rel = non_negative("NinP_rel", raw.f64_req("NinP_rel")?)?;

            let control_points = raw.usize_opt("NinC_points")?;
            let detuning_points = raw.usize_opt("delta_p_points")?;
            let sweep = match (control_points, detuning_points) {
                (Some(_), Some(_)) => bail!(
                    "config: keys \"NinC_points\" and \"delta_p_points\" select two different \
                     sweep axes; give exactly one"
                ),
                (None, None) => bail!(
                    "missing sweep axis for scenario three-level: set \"NinC_points\" (control \
                     sweep) or \"delta_p_points\" (detuning sweep)"
                ),
                (Some(points), None) => {
                    let min = raw.f64_req("NinC_rel_min")?;
                    let max = raw.f64_req("NinC_rel_max")?;
                    grid("NinC_points", points, "NinC_rel_min", min, max)?;
                    let log_spaced = match raw.take("NinC_grid") {
                        None => true,
                        Some(e) => match e.value.as_str() {
                            "log" => true,
                            "linear" => false,
                            other => bail!(
                                "config line {}: key \"NinC_grid\" must be \"log\" or \"linear\", got \"{other}\"",
                                e.line
                            ),
                        },
                    };
                    if log_spaced && min <= 0.0 {
                        bail!(
                            "config: key \"NinC_rel_min\" out of range: log spacing needs a \
                             positive minimum, got {min}"
                        );
                    }
                    non_negative("NinC_rel_min", min)?;
                    ThreeLevelSweep::ControlPower {
                        nin_c_rel_min: min,
                        nin_c_rel_max: max,
                        points,
                        log_spaced,
                        delta_p_rel: raw.f64_or("delta_p_over_gamma10", 0.0)?,
                    }
                }
                (None, Some(points)) => {
                    let min = raw.f64_or("delta_p_min_over_gamma10", -10.0)?;
                    let max = raw.f64_or("delta_p_max_over_gamma10", 10.0)?;
                    grid("delta_p_points", points, "delta_p_min_over_gamma10", min, max)?;
                    ThreeLevelSweep::ProbeDetuning {
                        delta_p_rel_min: min,
                        delta_p_rel_max: max,
                        points,
                        nin_c_rel: non_negative("NinC_rel", raw.f64_req("NinC_rel")?)?,
                    }
                }
            };
            RunConfig::ThreeLevel(ThreeLevelCfg {
                gamma10,
                gamma21: g21_ratio * gamma10,
                nin_p_rel,
                sweep,
            })
        }
        Scenario::G2 => {
            let gamma10 = positive("Gamma10_MHz", raw.f64_req("Gamma10_MHz")?)? * TWO_PI * 1e6;
            let omega10 = positive("f10_GHz", raw.f64_req("f10_GHz")?)? * TWO_PI * 1e9;
            let temperature = non_negative("T_mK", raw.f64_or("T_mK", 0.0)?)? * 1e-3;
            let nin = drive_flux(&mut raw, gamma10, Some(omega10))?;
            let gamma_bw = match raw.one_of("BW_MHz", "BW_GHz")? {
                None => None,
                Some(("BW_MHz", v)) => Some(positive("BW_MHz", v)? * TWO_PI * 1e6),
                Some(("BW_GHz", v)) => Some(positive("BW_GHz", v)? * TWO_PI * 1e9),
                Some((other, _)) => unreachable!("one_of returned unexpected key {other}"),
            };
            let field = match raw.take("field") {
                None => FieldSelect::Reflected,
                Some(e) => match e.value.as_str() {
                    "reflected" => FieldSelect::Reflected,
                    "transmitted" => FieldSelect::Transmitted,
                    other => bail!(
                        "config line {}: key \"field\" must be \"reflected\" or \"transmitted\", got \"{other}\"",
                        e.line
                    ),
                },
            };
            if field == FieldSelect::Transmitted && gamma_bw.is_none() {
                bail!(
                    "transmitted-field correlations need a detection bandwidth: set \"BW_MHz\" \
                     or \"BW_GHz\""
                );
            }
            let tau_max_ns = positive("tau_max_ns", raw.f64_or("tau_max_ns", 200.0)?)?;
            let tau_points = raw.usize_or("tau_points", 400)?;
            if tau_points < 2 {
                bail!("config: key \"tau_points\" out of range: a delay grid needs at least 2 points");
            }
            RunConfig::G2(G2Cfg {
                gamma10,
                omega10,
                nin,
                temperature,
                gamma_bw,
                field,
                tau_max_ns,
                tau_points,
            })
        }
    };

    raw.finish()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_two_level_config_parses() {
        let cfg = parse_config(
            "Gamma10_MHz = 41\nNin_rel = 0.01\n# comment\ndelta_points = 5\n",
            Scenario::TwoLevel,
        )
        .unwrap();
        let RunConfig::TwoLevel(c) = cfg else {
            panic!("wrong variant")
        };
        assert!((c.gamma10 - TWO_PI * 41e6).abs() < 1e-3);
        assert!((c.nin - 0.01 * 41e6).abs() < 1e-9);
        assert_eq!(c.delta_points, 5);
        assert_eq!(c.temperature, 0.0);
    }

    #[test]
    fn unknown_key_is_rejected_with_line_number() {
        let err = parse_config(
            "Gamma10_MHz = 41\nNin_rel = 0.01\nfoo = 1\n",
            Scenario::TwoLevel,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("foo"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn duplicate_key_is_rejected() {
        let err = parse_config(
            "Gamma10_MHz = 41\nGamma10_MHz = 42\n",
            Scenario::TwoLevel,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("duplicate"), "{err}");
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn malformed_number_names_key_and_line() {
        let err = parse_config(
            "Gamma10_MHz = forty-one\nNin_rel = 0.01\n",
            Scenario::TwoLevel,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("Gamma10_MHz"), "{err}");
        assert!(err.contains("line 1"), "{err}");
        assert!(err.contains("forty-one"), "{err}");
    }

    #[test]
    fn drive_strength_in_two_units_is_rejected() {
        let err = parse_config(
            "Gamma10_MHz = 41\nf10_GHz = 5.12\nNin_rel = 0.01\nP_dBm = -131\n",
            Scenario::TwoLevel,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("Nin_rel") && err.contains("P_dBm"), "{err}");
    }

    #[test]
    fn missing_drive_strength_is_rejected() {
        let err = parse_config("Gamma10_MHz = 41\n", Scenario::TwoLevel)
            .unwrap_err()
            .to_string();
        assert!(err.contains("Nin_rel"), "{err}");
        assert!(err.contains("P_dBm"), "{err}");
    }

    #[test]
    fn reference_g2_config_parses_and_converts() {
        let text = "Gamma10_MHz = 41\nf10_GHz = 5.12\nP_dBm = -131\nT_mK = 50\nBW_MHz = 55\n";
        let RunConfig::G2(c) = parse_config(text, Scenario::G2).unwrap() else {
            panic!("wrong variant")
        };
        // 10^(−13.1) mW / (ħ·ω₁₀) ≈ 2.3414×10⁷ photons/s.
        assert!((c.nin / 2.3414e7 - 1.0).abs() < 1e-4, "nin = {}", c.nin);
        assert_eq!(c.temperature, 0.050);
        assert!((c.gamma_bw.unwrap() - TWO_PI * 55e6).abs() < 1e-3);
        assert_eq!(c.field, FieldSelect::Reflected);
    }

    #[test]
    fn scenario_key_must_match_request() {
        let err = parse_config(
            "scenario = g2\nGamma10_MHz = 41\nNin_rel = 0.01\n",
            Scenario::TwoLevel,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("does not match"), "{err}");
    }

    #[test]
    fn three_level_needs_exactly_one_sweep_axis() {
        let base = "Gamma10_MHz = 41\nNinP_rel = 0.001\n";
        let err = parse_config(base, Scenario::ThreeLevel).unwrap_err().to_string();
        assert!(err.contains("sweep axis"), "{err}");

        let both = format!(
            "{base}NinC_points = 5\nNinC_rel_min = 0.1\nNinC_rel_max = 10\ndelta_p_points = 5\nNinC_rel = 1\n"
        );
        let err = parse_config(&both, Scenario::ThreeLevel)
            .unwrap_err()
            .to_string();
        assert!(err.contains("NinC_points") && err.contains("delta_p_points"), "{err}");
    }
}
