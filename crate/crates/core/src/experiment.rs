//! Experiment sweeps: deterministic parallel drop execution and result-file
//! emission.
//!
//! Every drop derives its seed from `(base_seed, k, strategy_id, drop_index)`
//! through a splitmix64 chain, so a cell reruns identically in isolation and
//! the output is invariant to the worker count. Drops execute on a rayon
//! pool and the reducer consumes them in drop-index order.
//!
//! Output files (LF line endings, numbers at 6 significant digits):
//! - `results.csv`: one row per (strategy, reception, k) cell,
//! - per-panel whitespace-delimited plot files with `#` headers,
//! - `drops.csv` when per-drop dumping is on.

use crate::access::{run_admission, ReceptionMode, SensingConfig, SensingStrategy};
use crate::config::{ConfigError, ExperimentConfig};
use crate::metrics::{aggregate, compute_drop_metrics, AggregateMetrics, DropMetrics};
use crate::radio::ChannelParams;
use crate::regulatory;
use crate::scenario::{generate_deployment, ScenarioError, ScenarioParams};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ConfigError> for ExperimentError {
    fn from(e: ConfigError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

impl From<ScenarioError> for ExperimentError {
    fn from(e: ScenarioError) -> Self {
        ExperimentError::Config(e.to_string())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one drop within one sweep cell.
pub fn drop_seed(base_seed: u64, k: u64, strategy_id: u64, drop_index: u64) -> u64 {
    let mut s = splitmix64(base_seed);
    s = splitmix64(s ^ k);
    s = splitmix64(s ^ strategy_id);
    splitmix64(s ^ drop_index)
}

/// Attempt-order seed derived from the drop seed.
pub fn order_seed(drop_seed: u64) -> u64 {
    splitmix64(drop_seed ^ 0x5bf0_3635_dead_beef)
}

/// Simulates one drop: deployment, admission, metrics.
pub fn simulate_drop(
    k: usize,
    strategy: SensingStrategy,
    mode: ReceptionMode,
    sensing: &SensingConfig,
    ch: &ChannelParams,
    lbr_overhead: f64,
    seed: u64,
) -> Result<DropMetrics, ScenarioError> {
    let params = ScenarioParams::with_k(k);
    let dep = generate_deployment(&params, seed)?;
    let outcome = run_admission(&dep, strategy, mode, sensing, ch, order_seed(seed));
    Ok(compute_drop_metrics(
        &outcome,
        &dep,
        ch,
        mode,
        strategy,
        &sensing.tx_pattern,
        lbr_overhead,
    ))
}

/// One sweep cell's drops (drop-index order) and their aggregate.
pub struct CellResult {
    pub strategy: SensingStrategy,
    pub mode: ReceptionMode,
    pub k: usize,
    pub drops: Vec<DropMetrics>,
    pub agg: AggregateMetrics,
}

/// Runs every drop of one (k, strategy, mode) cell on the current rayon
/// pool.
pub fn run_cell(
    cfg: &ExperimentConfig,
    k: usize,
    strategy: SensingStrategy,
    mode: ReceptionMode,
) -> Result<CellResult, ExperimentError> {
    let lbr_overhead = if strategy.lbr_assist() {
        regulatory::lbr_overhead(cfg.scs_khz).map_err(|e| ExperimentError::Config(e.to_string()))?
    } else {
        0.0
    };
    let drops: Result<Vec<DropMetrics>, ScenarioError> = (0..cfg.n_drops)
        .into_par_iter()
        .map(|i| {
            let seed = drop_seed(cfg.base_seed, k as u64, strategy.id(), i as u64);
            simulate_drop(
                k,
                strategy,
                mode,
                &cfg.sensing,
                &cfg.channel,
                lbr_overhead,
                seed,
            )
        })
        .collect();
    let drops = drops?;
    let agg = aggregate(&drops).map_err(|e| ExperimentError::Config(e.to_string()))?;
    Ok(CellResult {
        strategy,
        mode,
        k,
        drops,
        agg,
    })
}

/// Renders `x` with 6 significant digits in plain decimal notation.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0.00000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = 6i32;
    let a = x.abs();
    let mut exp = a.log10().floor() as i32;
    let scale = 10f64.powi(digits - 1 - exp);
    let mut rounded = (a * scale).round() / scale;
    // Rounding can carry into the next magnitude (e.g. 999999.7 -> 1e6).
    let exp2 = rounded.log10().floor() as i32;
    if exp2 != exp {
        exp = exp2;
        let scale = 10f64.powi(digits - 1 - exp);
        rounded = (a * scale).round() / scale;
    }
    let decimals = (digits - 1 - exp).max(0) as usize;
    format!("{}{:.*}", if x < 0.0 { "-" } else { "" }, decimals, rounded)
}

const GBPS: f64 = 1e9;

fn results_csv(cells: &[CellResult], n_drops: usize) -> String {
    let mut out = String::new();
    out.push_str(
        "strategy,lbr,reception,k,n_drops,sum_rate_gbps_mean,sum_rate_gbps_se,\
         mean_rate_gbps_mean,mean_rate_gbps_se,nru_access_mean,wigig_access_mean,\
         nru_mean_rate_gbps,wigig_mean_rate_gbps\n",
    );
    for c in cells {
        let a = &c.agg;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.strategy.kind().label(),
            c.strategy.lbr_assist(),
            c.mode.label(),
            c.k,
            n_drops,
            fmt_sig6(a.sum_rate_bps.mean / GBPS),
            fmt_sig6(a.sum_rate_bps.std_err / GBPS),
            fmt_sig6(a.mean_rate_accessed_bps.mean / GBPS),
            fmt_sig6(a.mean_rate_accessed_bps.std_err / GBPS),
            fmt_sig6(a.nru_access_count.mean),
            fmt_sig6(a.wigig_access_count.mean),
            fmt_sig6(a.nru_mean_rate_bps.mean / GBPS),
            fmt_sig6(a.wigig_mean_rate_bps.mean / GBPS),
        );
    }
    out
}

fn drops_csv(cells: &[CellResult]) -> String {
    let mut out = String::new();
    out.push_str(
        "strategy,lbr,reception,k,drop,sum_rate_gbps,mean_rate_gbps,nru_access,\
         wigig_access,nru_mean_rate_gbps,wigig_mean_rate_gbps\n",
    );
    for c in cells {
        for (i, d) in c.drops.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                c.strategy.kind().label(),
                c.strategy.lbr_assist(),
                c.mode.label(),
                c.k,
                i,
                fmt_sig6(d.sum_rate_bps / GBPS),
                fmt_sig6(d.mean_rate_accessed_bps / GBPS),
                d.nru_access_count,
                d.wigig_access_count,
                fmt_sig6(d.nru_mean_rate_bps / GBPS),
                fmt_sig6(d.wigig_mean_rate_bps / GBPS),
            );
        }
    }
    out
}

/// Label a strategy carries in plot-file headers.
fn series_label(s: SensingStrategy) -> String {
    if s.lbr_assist() {
        format!("{}+lbr", s.kind().label())
    } else {
        s.kind().label().to_string()
    }
}

fn cell(
    cells: &[CellResult],
    strategy: SensingStrategy,
    mode: ReceptionMode,
    k: usize,
) -> Option<&CellResult> {
    cells
        .iter()
        .find(|c| c.strategy == strategy && c.mode == mode && c.k == k)
}

/// Plot panel with one row per K and one column per strategy.
fn panel_vs_k(
    cells: &[CellResult],
    cfg: &ExperimentConfig,
    mode: ReceptionMode,
    value: &dyn Fn(&AggregateMetrics) -> f64,
) -> String {
    let mut out = String::from("# k");
    for &s in &cfg.strategies {
        let _ = write!(out, " {}", series_label(s));
    }
    out.push('\n');
    for &k in &cfg.k_values {
        let _ = write!(out, "{}", k);
        for &s in &cfg.strategies {
            let v = cell(cells, s, mode, k)
                .map(|c| value(&c.agg))
                .unwrap_or(f64::NAN);
            let _ = write!(out, " {}", fmt_sig6(v));
        }
        out.push('\n');
    }
    out
}

/// Plot panel with the per-RAT breakdown at a single K: two columns per
/// strategy, suffixed `_nru` and `_wigig`.
fn panel_by_rat(
    cells: &[CellResult],
    cfg: &ExperimentConfig,
    mode: ReceptionMode,
    k: usize,
    nru: &dyn Fn(&AggregateMetrics) -> f64,
    wigig: &dyn Fn(&AggregateMetrics) -> f64,
) -> String {
    let mut out = String::from("# k");
    for &s in &cfg.strategies {
        let label = series_label(s);
        let _ = write!(out, " {}_nru {}_wigig", label, label);
    }
    out.push('\n');
    let _ = write!(out, "{}", k);
    for &s in &cfg.strategies {
        let c = cell(cells, s, mode, k);
        let n = c.map(|c| nru(&c.agg)).unwrap_or(f64::NAN);
        let w = c.map(|c| wigig(&c.agg)).unwrap_or(f64::NAN);
        let _ = write!(out, " {} {}", fmt_sig6(n), fmt_sig6(w));
    }
    out.push('\n');
    out
}

/// Runs the whole sweep and writes the result files. Returns the written
/// paths, `results.csv` first.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, ExperimentError> {
    cfg.validate().map_err(ExperimentError::from)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| ExperimentError::Config(e.to_string()))?;

    let mut cells: Vec<CellResult> = Vec::new();
    pool.install(|| -> Result<(), ExperimentError> {
        for &mode in &cfg.reception {
            for &strategy in &cfg.strategies {
                for &k in &cfg.k_values {
                    cells.push(run_cell(cfg, k, strategy, mode)?);
                }
            }
        }
        Ok(())
    })?;

    fs::create_dir_all(&cfg.out_dir)?;
    let mut written = Vec::new();

    let results_path = cfg.out_dir.join("results.csv");
    fs::write(&results_path, results_csv(&cells, cfg.n_drops))?;
    written.push(results_path);

    let k_max = *cfg.k_values.iter().max().expect("validated non-empty");
    for &mode in &cfg.reception {
        let tag = mode.label();
        let panels: [(String, String); 4] = [
            (
                format!("sum_rate_{}.dat", tag),
                panel_vs_k(&cells, cfg, mode, &|a| a.sum_rate_bps.mean / GBPS),
            ),
            (
                format!("mean_rate_{}.dat", tag),
                panel_vs_k(&cells, cfg, mode, &|a| a.mean_rate_accessed_bps.mean / GBPS),
            ),
            (
                format!("access_by_rat_{}.dat", tag),
                panel_by_rat(
                    &cells,
                    cfg,
                    mode,
                    k_max,
                    &|a| a.nru_access_count.mean,
                    &|a| a.wigig_access_count.mean,
                ),
            ),
            (
                format!("rate_by_rat_{}.dat", tag),
                panel_by_rat(
                    &cells,
                    cfg,
                    mode,
                    k_max,
                    &|a| a.nru_rate_pooled_bps.mean / GBPS,
                    &|a| a.wigig_rate_pooled_bps.mean / GBPS,
                ),
            ),
        ];
        for (name, content) in panels {
            let path = cfg.out_dir.join(name);
            fs::write(&path, content)?;
            written.push(path);
        }
    }

    if cfg.dump_drops {
        let path = cfg.out_dir.join("drops.csv");
        fs::write(&path, drops_csv(&cells))?;
        written.push(path);
    }

    Ok(written)
}
