//! Experiment configuration: sweep axes, overrides, and the flat
//! `key = value` config-file format.
//!
//! Lists use commas (`k = 8,16,24,32,40`). Blank lines and `#` comments are
//! skipped. Command-line flags override file keys; both feed the same
//! [`ExperimentConfig`].

use crate::access::SensingConfig;
use crate::access::{ReceptionMode, SensingStrategy, TxSensing};
use crate::radio::{self, AntennaPattern, ChannelParams};
use crate::regulatory;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected 'key = value', got '{text}'")]
    Malformed { line: usize, text: String },
    #[error("config key '{key}': {reason}")]
    BadValue { key: String, reason: String },
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("{0}")]
    Invalid(String),
}

/// One full experiment sweep: every (k, strategy, reception) cell runs
/// `n_drops` deployments.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub k_values: Vec<usize>,
    pub strategies: Vec<SensingStrategy>,
    pub reception: Vec<ReceptionMode>,
    pub n_drops: usize,
    pub base_seed: u64,
    pub scs_khz: u32,
    pub channel: ChannelParams,
    pub sensing: SensingConfig,
    pub out_dir: PathBuf,
    /// Worker threads; 0 picks the machine default.
    pub parallelism: usize,
    /// Also emit a per-drop CSV.
    pub dump_drops: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            k_values: vec![8, 16, 24, 32, 40],
            strategies: SensingStrategy::all(),
            reception: vec![ReceptionMode::Omni],
            n_drops: 1000,
            base_seed: 1,
            scs_khz: 120,
            channel: ChannelParams::default(),
            sensing: SensingConfig::default(),
            out_dir: PathBuf::from("results"),
            parallelism: 0,
            dump_drops: false,
        }
    }
}

/// Parses a strategy list such as `omni,dir+lbr,nolbt` or `all`.
pub fn parse_strategies(text: &str) -> Result<Vec<SensingStrategy>, ConfigError> {
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok(SensingStrategy::all());
    }
    text.split(',')
        .map(|tok| parse_strategy(tok.trim()))
        .collect()
}

fn parse_strategy(token: &str) -> Result<SensingStrategy, ConfigError> {
    let lower = token.to_ascii_lowercase();
    let (base, lbr) = match lower.strip_suffix("+lbr") {
        Some(b) => (b, true),
        None => (lower.as_str(), false),
    };
    let kind = match base {
        "nolbt" | "no-lbt" | "none" => TxSensing::NoLbt,
        "omni" | "omnilbt" => TxSensing::OmniLbt,
        "dir" | "dirlbt" => TxSensing::DirLbt,
        "pair" | "pairlbt" => TxSensing::PairLbt,
        "switch" | "lbtswitch" => TxSensing::LbtSwitch,
        other => {
            return Err(ConfigError::BadValue {
                key: "strategy".into(),
                reason: format!("unknown strategy '{}'", other),
            })
        }
    };
    SensingStrategy::new(kind, lbr).map_err(|e| ConfigError::BadValue {
        key: "strategy".into(),
        reason: e.to_string(),
    })
}

/// Parses a reception-mode list: `omni`, `quasi`, or `omni,quasi`.
pub fn parse_reception(text: &str) -> Result<Vec<ReceptionMode>, ConfigError> {
    text.split(',')
        .map(|tok| match tok.trim().to_ascii_lowercase().as_str() {
            "omni" => Ok(ReceptionMode::Omni),
            "quasi" | "quasi-omni" | "quasiomni" => Ok(ReceptionMode::QuasiOmni),
            other => Err(ConfigError::BadValue {
                key: "reception".into(),
                reason: format!("unknown reception mode '{}'", other),
            }),
        })
        .collect()
}

/// Parses a comma-separated list of pair counts.
pub fn parse_k_list(text: &str) -> Result<Vec<usize>, ConfigError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| ConfigError::BadValue {
                    key: "k".into(),
                    reason: format!("'{}' is not a pair count", tok.trim()),
                })
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| ConfigError::BadValue {
            key: key.into(),
            reason: format!("cannot parse '{}'", value.trim()),
        })
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(ConfigError::BadValue {
            key: key.into(),
            reason: format!("'{}' is not a boolean", other),
        }),
    }
}

impl ExperimentConfig {
    /// Applies one `key = value` setting. Shared by the config-file parser
    /// and the flag-override path.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "k" => self.k_values = parse_k_list(value)?,
            "strategy" | "strategies" => self.strategies = parse_strategies(value)?,
            "reception" => self.reception = parse_reception(value)?,
            "drops" | "n_drops" => self.n_drops = parse_num(key, value)?,
            "seed" | "base_seed" => self.base_seed = parse_num(key, value)?,
            "scs" | "scs_khz" => self.scs_khz = parse_num(key, value)?,
            "out" | "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            "jobs" | "parallelism" => self.parallelism = parse_num(key, value)?,
            "dump_drops" => self.dump_drops = parse_bool(key, value)?,
            // Channel overrides.
            "tx_power_dbm" => self.channel.tx_power_dbm = parse_num(key, value)?,
            "noise_figure_db" => self.channel.noise_figure_db = parse_num(key, value)?,
            "noise_psd_dbm_hz" => self.channel.noise_psd_dbm_hz = parse_num(key, value)?,
            "bandwidth_hz" => self.channel.bandwidth_hz = parse_num(key, value)?,
            "carrier_freq_hz" => self.channel.carrier_freq_hz = parse_num(key, value)?,
            "pathloss_exponent" => self.channel.pathloss_exponent = parse_num(key, value)?,
            "ref_distance_m" => self.channel.ref_distance_m = parse_num(key, value)?,
            // Sensing overrides.
            "ed_norm_dbm" => self.sensing.ed_norm_dbm = parse_num(key, value)?,
            "harmful_margin_db" => self.sensing.harmful_margin_db = parse_num(key, value)?,
            "pair_opposite_threshold_offset_db" => {
                self.sensing.pair_opposite_threshold_offset_db = parse_num(key, value)?
            }
            "switch_trigger_offset_db" => {
                self.sensing.switch_trigger_offset_db = parse_num(key, value)?
            }
            "tx_main_gain_db" | "tx_beamwidth_deg" => {
                let (mut gain_db, mut bw) = (
                    self.sensing.tx_pattern.max_gain_db(),
                    self.sensing.tx_pattern.beamwidth().to_degrees(),
                );
                if key == "tx_main_gain_db" {
                    gain_db = parse_num(key, value)?;
                } else {
                    bw = parse_num(key, value)?;
                }
                let pattern = build_pattern(key, gain_db, bw)?;
                self.sensing.tx_pattern = pattern;
                self.sensing.gnb_sense_pattern_dir = pattern;
            }
            "pair_opposite_offsets_deg" => {
                let offsets: Result<Vec<f64>, ConfigError> = value
                    .split(',')
                    .map(|tok| parse_num::<f64>(key, tok))
                    .collect();
                self.sensing.pair_opposite_offsets =
                    offsets?.into_iter().map(f64::to_radians).collect();
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Parses a whole config file.
    pub fn from_file_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_file_text(text)?;
        Ok(cfg)
    }

    /// Applies every setting in a config file on top of the current values.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: idx + 1,
                text: raw.to_string(),
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Validates cross-field invariants before a run.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k_values.is_empty() {
            return Err(ConfigError::Invalid("k list must not be empty".into()));
        }
        if let Some(k) = self.k_values.iter().find(|&&k| k % 2 != 0) {
            return Err(ConfigError::Invalid(format!(
                "pair counts must be even, got {}",
                k
            )));
        }
        if self.n_drops == 0 {
            return Err(ConfigError::Invalid("drops must be at least 1".into()));
        }
        if self.strategies.is_empty() {
            return Err(ConfigError::Invalid(
                "strategy list must not be empty".into(),
            ));
        }
        if self.reception.is_empty() {
            return Err(ConfigError::Invalid(
                "reception list must not be empty".into(),
            ));
        }
        if self.strategies.iter().any(|s| s.lbr_assist()) {
            regulatory::lbr_overhead(self.scs_khz)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        if self.sensing.pair_opposite_offsets.is_empty() {
            return Err(ConfigError::Invalid(
                "pair_opposite_offsets must not be empty".into(),
            ));
        }
        if !self.sensing.ed_norm_dbm.is_finite() {
            return Err(ConfigError::Invalid("ed_norm_dbm must be finite".into()));
        }
        let ch = &self.channel;
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(ch.carrier_freq_hz) || !positive(ch.bandwidth_hz) {
            return Err(ConfigError::Invalid(
                "carrier frequency and bandwidth must be positive".into(),
            ));
        }
        if !ch.pathloss_exponent.is_finite() || ch.pathloss_exponent < 1.0 {
            return Err(ConfigError::Invalid(format!(
                "pathloss exponent must be >= 1, got {}",
                ch.pathloss_exponent
            )));
        }
        if !positive(ch.ref_distance_m) {
            return Err(ConfigError::Invalid(
                "reference distance must be positive".into(),
            ));
        }
        if !ch.shadowing_sigma_db.is_finite() || ch.shadowing_sigma_db < 0.0 {
            return Err(ConfigError::Invalid(
                "shadowing sigma must be non-negative".into(),
            ));
        }
        if !ch.tx_power_dbm.is_finite()
            || !ch.noise_psd_dbm_hz.is_finite()
            || !ch.noise_figure_db.is_finite()
        {
            return Err(ConfigError::Invalid(
                "tx power, noise PSD, and noise figure must be finite".into(),
            ));
        }
        Ok(())
    }
}

fn build_pattern(key: &str, gain_db: f64, bw_deg: f64) -> Result<AntennaPattern, ConfigError> {
    radio::make_pattern(gain_db, bw_deg).map_err(|e| ConfigError::BadValue {
        key: key.into(),
        reason: e.to_string(),
    })
}
