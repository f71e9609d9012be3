//! Per-drop SINR/rate metrics and cross-drop aggregates.
//!
//! Rates map SINR through Shannon capacity over the full channel bandwidth.
//! Receiver-assisted strategies pay their handshake as a multiplicative
//! `(1 - overhead)` factor on NR-U rates; WiGig pairs never carry it.
//! Summations run in linear units and in a fixed order (admission order for
//! interference, drop-index order for aggregates) so results are bit
//! reproducible regardless of parallelism.

use crate::access::{AccessOutcome, ReceptionMode, SensingStrategy};
use crate::radio::{
    dbm_to_mw, noise_power_dbm, rx_power_mw, AntennaPattern, ChannelParams, Radiator,
};
use crate::scenario::{Deployment, LinkPair, Rat};
use std::collections::BTreeMap;
use thiserror::Error;

/// Metrics of one simulated drop.
#[derive(Clone, Debug)]
pub struct DropMetrics {
    /// Sum of data rates over all admitted pairs, bits/s.
    pub sum_rate_bps: f64,
    /// Mean rate over the admitted pairs (0 when none), bits/s.
    pub mean_rate_accessed_bps: f64,
    pub nru_access_count: usize,
    pub wigig_access_count: usize,
    /// Mean rate over admitted NR-U pairs (0 when none), bits/s.
    pub nru_mean_rate_bps: f64,
    /// Mean rate over admitted WiGig pairs (0 when none), bits/s.
    pub wigig_mean_rate_bps: f64,
    /// Rate per admitted pair id, bits/s.
    pub per_pair_rate_bps: BTreeMap<usize, f64>,
}

/// Mean, standard error, and nearest-rank percentiles of one metric across
/// drops.
#[derive(Clone, Copy, Debug)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation divided by sqrt(n); 0 for a single drop.
    pub std_err: f64,
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
}

/// Connection-weighted mean rate: total rate over total access count across
/// all drops, i.e. the average over the connections that got access. Differs
/// from the mean of per-drop means when access counts vary; drops with no
/// access contribute no connections.
#[derive(Clone, Copy, Debug)]
pub struct PooledRate {
    pub mean: f64,
    /// Ratio-estimator standard error (linearization over drops).
    pub std_err: f64,
}

/// Cross-drop aggregates of every drop metric.
#[derive(Clone, Debug)]
pub struct AggregateMetrics {
    pub n_drops: usize,
    pub sum_rate_bps: SummaryStats,
    pub mean_rate_accessed_bps: SummaryStats,
    pub nru_access_count: SummaryStats,
    pub wigig_access_count: SummaryStats,
    pub nru_mean_rate_bps: SummaryStats,
    pub wigig_mean_rate_bps: SummaryStats,
    pub nru_rate_pooled_bps: PooledRate,
    pub wigig_rate_pooled_bps: PooledRate,
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("cannot aggregate an empty drop list")]
    EmptyInput,
}

/// SINR of an admitted pair over the snapshot, dB. `admitted` lists the
/// admitted pair ids in admission order and must contain `pair.id`; every
/// other admitted transmitter contributes interference through the victim's
/// reception beam.
pub fn sinr_db(
    pair: &LinkPair,
    admitted: &[usize],
    dep: &Deployment,
    ch: &ChannelParams,
    mode: ReceptionMode,
    tx_pattern: &AntennaPattern,
) -> f64 {
    debug_assert!(admitted.contains(&pair.id), "pair must be admitted");
    let victim = Radiator::new(pair.rx_pos, mode.pattern(), pair.rx_boresight);
    let own_tx = Radiator::new(pair.tx_pos, *tx_pattern, pair.tx_boresight);
    let signal_mw = rx_power_mw(ch, &own_tx, &victim);

    let mut interference_mw = 0.0;
    for &id in admitted {
        if id == pair.id {
            continue;
        }
        let other = &dep.pairs[id];
        let tx = Radiator::new(other.tx_pos, *tx_pattern, other.tx_boresight);
        interference_mw += rx_power_mw(ch, &tx, &victim);
    }
    let noise_mw = dbm_to_mw(noise_power_dbm(ch));
    10.0 * (signal_mw / (interference_mw + noise_mw)).log10()
}

/// Shannon rate at the given SINR over the channel bandwidth, discounted by
/// the handshake overhead fraction.
pub fn rate_bps(sinr_db: f64, ch: &ChannelParams, overhead_fraction: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&overhead_fraction));
    let sinr_linear = 10f64.powf(sinr_db / 10.0);
    ch.bandwidth_hz * (1.0 + sinr_linear).log2() * (1.0 - overhead_fraction)
}

/// Computes per-drop metrics from an admission outcome. `lbr_overhead`
/// applies to NR-U pairs only and only when the strategy is
/// receiver-assisted.
pub fn compute_drop_metrics(
    outcome: &AccessOutcome,
    dep: &Deployment,
    ch: &ChannelParams,
    mode: ReceptionMode,
    strategy: SensingStrategy,
    tx_pattern: &AntennaPattern,
    lbr_overhead: f64,
) -> DropMetrics {
    let mut per_pair_rate_bps = BTreeMap::new();
    let mut sum = 0.0;
    let mut nru = (0usize, 0.0f64);
    let mut wigig = (0usize, 0.0f64);

    for &id in &outcome.admitted {
        let pair = &dep.pairs[id];
        let sinr = sinr_db(pair, &outcome.admitted, dep, ch, mode, tx_pattern);
        let overhead = if pair.rat == Rat::Nru && strategy.lbr_assist() {
            lbr_overhead
        } else {
            0.0
        };
        let rate = rate_bps(sinr, ch, overhead);
        per_pair_rate_bps.insert(id, rate);
        sum += rate;
        match pair.rat {
            Rat::Nru => {
                nru.0 += 1;
                nru.1 += rate;
            }
            Rat::Wigig => {
                wigig.0 += 1;
                wigig.1 += rate;
            }
        }
    }

    let n_admitted = outcome.admitted.len();
    DropMetrics {
        sum_rate_bps: sum,
        mean_rate_accessed_bps: if n_admitted > 0 {
            sum / n_admitted as f64
        } else {
            0.0
        },
        nru_access_count: nru.0,
        wigig_access_count: wigig.0,
        nru_mean_rate_bps: if nru.0 > 0 { nru.1 / nru.0 as f64 } else { 0.0 },
        wigig_mean_rate_bps: if wigig.0 > 0 {
            wigig.1 / wigig.0 as f64
        } else {
            0.0
        },
        per_pair_rate_bps,
    }
}

/// Nearest-rank percentile of ascending-sorted `sorted`.
fn nearest_rank(sorted: &[f64], percentile: f64) -> f64 {
    let n = sorted.len();
    let rank = ((percentile / 100.0 * n as f64).ceil() as usize).max(1);
    sorted[rank.min(n) - 1]
}

/// Ratio estimator over per-drop (rate sum, access count) pairs.
fn pool_rates(sums: &[f64], counts: &[f64]) -> PooledRate {
    let n = sums.len();
    let total_count: f64 = counts.iter().sum();
    if total_count == 0.0 {
        return PooledRate {
            mean: 0.0,
            std_err: 0.0,
        };
    }
    let mean = sums.iter().sum::<f64>() / total_count;
    if n < 2 {
        return PooledRate { mean, std_err: 0.0 };
    }
    let avg_count = total_count / n as f64;
    let resid_sq: f64 = sums
        .iter()
        .zip(counts)
        .map(|(&s, &c)| {
            let e = s - mean * c;
            e * e
        })
        .sum();
    let var = resid_sq / ((n as f64 - 1.0) * n as f64 * avg_count * avg_count);
    PooledRate {
        mean,
        std_err: var.sqrt(),
    }
}

fn summarize(values: &[f64]) -> SummaryStats {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_err = if n > 1 {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    SummaryStats {
        mean,
        std_err,
        p5: nearest_rank(&sorted, 5.0),
        p50: nearest_rank(&sorted, 50.0),
        p95: nearest_rank(&sorted, 95.0),
    }
}

/// Aggregates drop metrics across a run. Sums run in the given drop-index
/// order for bit reproducibility.
pub fn aggregate(drops: &[DropMetrics]) -> Result<AggregateMetrics, MetricsError> {
    if drops.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let collect = |f: &dyn Fn(&DropMetrics) -> f64| -> Vec<f64> { drops.iter().map(f).collect() };
    let nru_counts = collect(&|d| d.nru_access_count as f64);
    let wigig_counts = collect(&|d| d.wigig_access_count as f64);
    let nru_sums = collect(&|d| d.nru_mean_rate_bps * d.nru_access_count as f64);
    let wigig_sums = collect(&|d| d.wigig_mean_rate_bps * d.wigig_access_count as f64);
    Ok(AggregateMetrics {
        n_drops: drops.len(),
        sum_rate_bps: summarize(&collect(&|d| d.sum_rate_bps)),
        mean_rate_accessed_bps: summarize(&collect(&|d| d.mean_rate_accessed_bps)),
        nru_access_count: summarize(&nru_counts),
        wigig_access_count: summarize(&wigig_counts),
        nru_mean_rate_bps: summarize(&collect(&|d| d.nru_mean_rate_bps)),
        wigig_mean_rate_bps: summarize(&collect(&|d| d.wigig_mean_rate_bps)),
        nru_rate_pooled_bps: pool_rates(&nru_sums, &nru_counts),
        wigig_rate_pooled_bps: pool_rates(&wigig_sums, &wigig_counts),
    })
}
