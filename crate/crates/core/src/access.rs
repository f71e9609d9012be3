//! Channel-access procedures and snapshot admission.
//!
//! Transmitter-side carrier sense comes in four flavors: omnidirectional
//! (omniLBT), directional within the transmit beam (dirLBT), paired
//! directional in the transmit direction plus its opposite(s) (pairLBT), and
//! a switch that picks omni or directional sensing from a receiver-side busy
//! indication (LBTswitch). Each can be combined with receiver-assisted
//! sensing (LBR), where the receiver senses with its reception beam and
//! grants or denies the access. A no-LBT benchmark admits unconditionally.
//!
//! Energy-detection thresholds are normalized by the maximum gain of the
//! sensing antenna: a sense through a `G` dB beam compares against
//! `ed_norm_dbm + G`. Sensed power always includes thermal noise. Ties at
//! exact threshold equality resolve to idle.
//!
//! Admission over a deployment snapshot is sequential-greedy in a uniform
//! random attempt order with no retries: backoff is not emulated, the model
//! answers how many pairs can reuse the spectrum simultaneously.

use crate::radio::{
    self, dbm_to_mw, mw_to_dbm, noise_power_dbm, rx_power_mw, AntennaPattern, ChannelParams,
    Radiator,
};
use crate::scenario::{Deployment, LinkPair, Rat};
use rand::seq::SliceRandom;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use std::f64::consts::PI;
use thiserror::Error;

/// Transmitter-side sensing flavor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TxSensing {
    NoLbt,
    OmniLbt,
    DirLbt,
    PairLbt,
    LbtSwitch,
}

impl TxSensing {
    pub fn label(self) -> &'static str {
        match self {
            TxSensing::NoLbt => "nolbt",
            TxSensing::OmniLbt => "omni",
            TxSensing::DirLbt => "dir",
            TxSensing::PairLbt => "pair",
            TxSensing::LbtSwitch => "switch",
        }
    }

    fn index(self) -> u64 {
        match self {
            TxSensing::NoLbt => 0,
            TxSensing::OmniLbt => 1,
            TxSensing::DirLbt => 2,
            TxSensing::PairLbt => 3,
            TxSensing::LbtSwitch => 4,
        }
    }
}

/// A channel-access strategy: transmitter-side sensing plus optional
/// receiver assistance. `NoLbt` cannot carry LBR.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SensingStrategy {
    kind: TxSensing,
    lbr_assist: bool,
}

#[derive(Debug, Error)]
pub enum AccessError {
    #[error("no-LBT cannot be combined with LBR assistance")]
    NoLbtWithLbr,
}

impl SensingStrategy {
    pub fn new(kind: TxSensing, lbr_assist: bool) -> Result<Self, AccessError> {
        if kind == TxSensing::NoLbt && lbr_assist {
            return Err(AccessError::NoLbtWithLbr);
        }
        Ok(SensingStrategy { kind, lbr_assist })
    }

    pub fn plain(kind: TxSensing) -> Self {
        SensingStrategy {
            kind,
            lbr_assist: false,
        }
    }

    pub fn kind(&self) -> TxSensing {
        self.kind
    }

    pub fn lbr_assist(&self) -> bool {
        self.lbr_assist
    }

    /// Stable identifier used for per-cell seeding: 0-4 plain strategies,
    /// 5-8 their LBR-assisted variants.
    pub fn id(&self) -> u64 {
        self.kind.index() + if self.lbr_assist { 4 } else { 0 }
    }

    /// All nine evaluated strategies, in id order.
    pub fn all() -> Vec<SensingStrategy> {
        let kinds = [
            TxSensing::NoLbt,
            TxSensing::OmniLbt,
            TxSensing::DirLbt,
            TxSensing::PairLbt,
            TxSensing::LbtSwitch,
        ];
        let mut out: Vec<SensingStrategy> = kinds.iter().map(|&k| Self::plain(k)).collect();
        for &k in &kinds[1..] {
            out.push(SensingStrategy {
                kind: k,
                lbr_assist: true,
            });
        }
        out
    }
}

/// Receive antenna configuration at UEs/STAs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReceptionMode {
    /// Omnidirectional data reception; LBR senses omnidirectionally.
    Omni,
    /// Quasi-omnidirectional reception through a 7 dB, 90 deg beam aimed at
    /// the serving transmitter; LBR senses through the same beam.
    QuasiOmni,
}

impl ReceptionMode {
    pub fn pattern(self) -> AntennaPattern {
        match self {
            ReceptionMode::Omni => AntennaPattern::omni(),
            ReceptionMode::QuasiOmni => radio::quasi_omni_pattern(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ReceptionMode::Omni => "omni",
            ReceptionMode::QuasiOmni => "quasi",
        }
    }
}

/// Sensing configuration shared by every pair in a snapshot.
#[derive(Clone, Debug)]
pub struct SensingConfig {
    /// Energy-detection threshold normalized to 0 dB sensing gain, dBm.
    pub ed_norm_dbm: f64,
    /// Transmit data beam at every gNB/AP; also the default directional
    /// sensing beam.
    pub tx_pattern: AntennaPattern,
    /// Beam for directional sensing at the transmitter (dirLBT, pairLBT).
    pub gnb_sense_pattern_dir: AntennaPattern,
    /// Beam for omnidirectional sensing at the transmitter.
    pub gnb_sense_pattern_omni: AntennaPattern,
    /// Offsets from the transmit boresight sensed in addition to it by
    /// pairLBT, radians.
    pub pair_opposite_offsets: Vec<f64>,
    /// Extra threshold shift applied to the opposite-direction senses of
    /// pairLBT, dB. The reversed cone listens with the full main-lobe gain
    /// while the protected receiver sits forward, so the raw normalized
    /// threshold overestimates exposure.
    pub pair_opposite_threshold_offset_db: f64,
    /// Extra threshold shift on the receiver-side busy indication that
    /// drives plain LBTswitch, dB. Without the LBR handshake the receiver
    /// only signals clearly harmful interference.
    pub switch_trigger_offset_db: f64,
    /// Width of the marginal band above the effective threshold in which an
    /// LBTswitch+LBR receiver still grants but recommends omni sensing, dB.
    pub harmful_margin_db: f64,
}

impl Default for SensingConfig {
    fn default() -> Self {
        let tx = radio::default_tx_pattern();
        SensingConfig {
            ed_norm_dbm: -74.0,
            tx_pattern: tx,
            gnb_sense_pattern_dir: tx,
            gnb_sense_pattern_omni: AntennaPattern::omni(),
            pair_opposite_offsets: vec![PI],
            pair_opposite_threshold_offset_db: 3.0,
            switch_trigger_offset_db: 1.5,
            harmful_margin_db: 10.0,
        }
    }
}

/// Outcome of one pair's access attempt.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairDecision {
    Admitted,
    BlockedTxSense,
    BlockedRxSense,
}

/// Pairs admitted to transmit in one snapshot.
#[derive(Clone, Debug)]
pub struct AccessOutcome {
    /// Admitted pair ids, in admission order.
    pub admitted: Vec<usize>,
    /// The random attempt order (a permutation of all pair ids).
    pub attempt_order: Vec<usize>,
    /// Decision per pair id (ids are dense, so the vector is the map).
    pub per_pair_decision: Vec<PairDecision>,
}

/// Receiver feedback under LBTswitch+LBR: the grant carries a
/// recommendation for the sensing type the transmitter should run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchLbrFeedback {
    GrantDir,
    GrantOmni,
    Deny,
}

/// Total power seen by `listener` from the active transmitters plus thermal
/// noise, dBm. An empty active set yields exactly the noise power.
pub fn sensed_power_dbm(listener: &Radiator, active: &[Radiator], ch: &ChannelParams) -> f64 {
    let noise_dbm = noise_power_dbm(ch);
    if active.is_empty() {
        return noise_dbm;
    }
    let mut total_mw = dbm_to_mw(noise_dbm);
    for tx in active {
        total_mw += rx_power_mw(ch, tx, listener);
    }
    mw_to_dbm(total_mw)
}

/// Busy iff the sensed power strictly exceeds the normalized threshold
/// shifted by the maximum gain of the sensing antenna.
pub fn is_busy(sensed_dbm: f64, cfg: &SensingConfig, sense_max_gain_db: f64) -> bool {
    sensed_dbm > cfg.ed_norm_dbm + sense_max_gain_db
}

fn tx_sense(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
    pattern: AntennaPattern,
    boresight: f64,
    extra_threshold_db: f64,
) -> bool {
    let listener = Radiator::new(pair.tx_pos, pattern, boresight);
    !is_busy(
        sensed_power_dbm(&listener, active, ch),
        cfg,
        pattern.max_gain_db() + extra_threshold_db,
    )
}

/// Omnidirectional carrier sense at the transmitter. Returns true when idle.
pub fn omni_lbt(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
) -> bool {
    tx_sense(
        pair,
        active,
        cfg,
        ch,
        cfg.gnb_sense_pattern_omni,
        pair.tx_boresight,
        0.0,
    )
}

/// Directional carrier sense within the transmit beam. Returns true when idle.
pub fn dir_lbt(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
) -> bool {
    tx_sense(
        pair,
        active,
        cfg,
        ch,
        cfg.gnb_sense_pattern_dir,
        pair.tx_boresight,
        0.0,
    )
}

/// Paired directional sense: the transmit direction and every configured
/// opposite offset must all be idle. Opposite senses carry the configured
/// threshold shift.
pub fn pair_lbt(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
) -> bool {
    if !dir_lbt(pair, active, cfg, ch) {
        return false;
    }
    cfg.pair_opposite_offsets.iter().all(|&off| {
        tx_sense(
            pair,
            active,
            cfg,
            ch,
            cfg.gnb_sense_pattern_dir,
            pair.tx_boresight + off,
            cfg.pair_opposite_threshold_offset_db,
        )
    })
}

/// Receiver-side busy indication: the UE/STA senses through its reception
/// beam at the threshold normalized by that beam's maximum gain.
pub fn ue_sense_busy(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
    mode: ReceptionMode,
) -> bool {
    let pattern = mode.pattern();
    let listener = Radiator::new(pair.rx_pos, pattern, pair.rx_boresight);
    is_busy(
        sensed_power_dbm(&listener, active, ch),
        cfg,
        pattern.max_gain_db(),
    )
}

/// Receiver-side indication that drives plain LBTswitch: same sense as
/// [`ue_sense_busy`] but compared at the shifted trigger threshold.
pub fn switch_trigger_busy(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
    mode: ReceptionMode,
) -> bool {
    let pattern = mode.pattern();
    let listener = Radiator::new(pair.rx_pos, pattern, pair.rx_boresight);
    is_busy(
        sensed_power_dbm(&listener, active, ch),
        cfg,
        pattern.max_gain_db() + cfg.switch_trigger_offset_db,
    )
}

/// Switched carrier sense: a busy receiver-side indication selects
/// omnidirectional sensing, otherwise directional. Returns true when idle.
pub fn lbt_switch(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
    rx_sense_busy: bool,
) -> bool {
    if rx_sense_busy {
        omni_lbt(pair, active, cfg, ch)
    } else {
        dir_lbt(pair, active, cfg, ch)
    }
}

/// Receiver-assisted check: after the transmitter-side procedure returned
/// idle, the receiver senses with its reception beam and grants iff idle.
pub fn lbr_check(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
    mode: ReceptionMode,
) -> bool {
    !ue_sense_busy(pair, active, cfg, ch, mode)
}

/// Receiver feedback for LBTswitch+LBR. At or below the effective threshold
/// the receiver grants and recommends directional sensing; within
/// `harmful_margin_db` above it, it grants but recommends omnidirectional
/// sensing; beyond that it denies.
pub fn lbt_switch_lbr_feedback(
    pair: &LinkPair,
    active: &[Radiator],
    cfg: &SensingConfig,
    ch: &ChannelParams,
    mode: ReceptionMode,
) -> SwitchLbrFeedback {
    let pattern = mode.pattern();
    let listener = Radiator::new(pair.rx_pos, pattern, pair.rx_boresight);
    let sensed = sensed_power_dbm(&listener, active, ch);
    let ed_eff = cfg.ed_norm_dbm + pattern.max_gain_db();
    if sensed <= ed_eff {
        SwitchLbrFeedback::GrantDir
    } else if sensed <= ed_eff + cfg.harmful_margin_db {
        SwitchLbrFeedback::GrantOmni
    } else {
        SwitchLbrFeedback::Deny
    }
}

/// Runs one pair's access decision against the currently active
/// transmitters. WiGig pairs always use plain omniLBT; NR-U pairs apply the
/// configured strategy.
pub fn decide_pair(
    pair: &LinkPair,
    active: &[Radiator],
    strategy: SensingStrategy,
    mode: ReceptionMode,
    cfg: &SensingConfig,
    ch: &ChannelParams,
) -> PairDecision {
    if pair.rat == Rat::Wigig {
        return if omni_lbt(pair, active, cfg, ch) {
            PairDecision::Admitted
        } else {
            PairDecision::BlockedTxSense
        };
    }

    match strategy.kind() {
        TxSensing::NoLbt => PairDecision::Admitted,
        TxSensing::OmniLbt | TxSensing::DirLbt | TxSensing::PairLbt => {
            let idle = match strategy.kind() {
                TxSensing::OmniLbt => omni_lbt(pair, active, cfg, ch),
                TxSensing::DirLbt => dir_lbt(pair, active, cfg, ch),
                _ => pair_lbt(pair, active, cfg, ch),
            };
            if !idle {
                PairDecision::BlockedTxSense
            } else if strategy.lbr_assist() && !lbr_check(pair, active, cfg, ch, mode) {
                PairDecision::BlockedRxSense
            } else {
                PairDecision::Admitted
            }
        }
        TxSensing::LbtSwitch => {
            if strategy.lbr_assist() {
                match lbt_switch_lbr_feedback(pair, active, cfg, ch, mode) {
                    SwitchLbrFeedback::Deny => PairDecision::BlockedRxSense,
                    SwitchLbrFeedback::GrantDir => {
                        if dir_lbt(pair, active, cfg, ch) {
                            PairDecision::Admitted
                        } else {
                            PairDecision::BlockedTxSense
                        }
                    }
                    SwitchLbrFeedback::GrantOmni => {
                        if omni_lbt(pair, active, cfg, ch) {
                            PairDecision::Admitted
                        } else {
                            PairDecision::BlockedTxSense
                        }
                    }
                }
            } else {
                let busy = switch_trigger_busy(pair, active, cfg, ch, mode);
                if lbt_switch(pair, active, cfg, ch, busy) {
                    PairDecision::Admitted
                } else {
                    PairDecision::BlockedTxSense
                }
            }
        }
    }
}

/// The transmit radiator a pair contributes to the active set once admitted.
pub fn tx_radiator(pair: &LinkPair, cfg: &SensingConfig) -> Radiator {
    Radiator::new(pair.tx_pos, cfg.tx_pattern, pair.tx_boresight)
}

/// Runs the snapshot admission process: visits all pairs in a uniform random
/// order drawn from `order_seed`; each admitted pair's transmitter joins the
/// active set seen by later attempts; blocked pairs never retry.
pub fn run_admission(
    dep: &Deployment,
    strategy: SensingStrategy,
    mode: ReceptionMode,
    cfg: &SensingConfig,
    ch: &ChannelParams,
    order_seed: u64,
) -> AccessOutcome {
    let k = dep.pairs.len();
    let mut order: Vec<usize> = (0..k).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    order.shuffle(&mut rng);

    let mut active: Vec<Radiator> = Vec::with_capacity(k);
    let mut admitted: Vec<usize> = Vec::with_capacity(k);
    let mut per_pair_decision = vec![PairDecision::BlockedTxSense; k];

    for &id in &order {
        let pair = &dep.pairs[id];
        let decision = decide_pair(pair, &active, strategy, mode, cfg, ch);
        per_pair_decision[id] = decision;
        if decision == PairDecision::Admitted {
            admitted.push(id);
            active.push(tx_radiator(pair, cfg));
        }
    }

    AccessOutcome {
        admitted,
        attempt_order: order,
        per_pair_decision,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_deployment, Point2D, ScenarioParams};

    fn ch() -> ChannelParams {
        ChannelParams::default()
    }

    fn cfg() -> SensingConfig {
        SensingConfig::default()
    }

    /// Hand-built pair: transmitter at `tx` beaming toward `rx`.
    fn pair_at(id: usize, rat: Rat, tx: Point2D, rx: Point2D) -> LinkPair {
        LinkPair {
            id,
            rat,
            tx_pos: tx,
            rx_pos: rx,
            tx_boresight: tx.azimuth_to(&rx),
            rx_boresight: rx.azimuth_to(&tx),
        }
    }

    fn deployment(pairs: Vec<LinkPair>) -> Deployment {
        let params = ScenarioParams::with_k(pairs.len());
        Deployment {
            pairs,
            params,
            seed: 0,
        }
    }

    fn active_of(pairs: &[LinkPair], cfg: &SensingConfig) -> Vec<Radiator> {
        pairs.iter().map(|p| tx_radiator(p, cfg)).collect()
    }

    #[test]
    fn strategy_invariant_and_ids() {
        assert!(SensingStrategy::new(TxSensing::NoLbt, true).is_err());
        let all = SensingStrategy::all();
        assert_eq!(all.len(), 9);
        let ids: Vec<u64> = all.iter().map(|s| s.id()).collect();
        assert_eq!(ids, (0..9).collect::<Vec<u64>>());
    }

    #[test]
    fn effective_thresholds() {
        let cfg = cfg();
        // Normalized threshold shifted by the sensing beam's maximum gain.
        assert_eq!(
            cfg.ed_norm_dbm + cfg.gnb_sense_pattern_omni.max_gain_db(),
            -74.0
        );
        assert_eq!(
            cfg.ed_norm_dbm + cfg.gnb_sense_pattern_dir.max_gain_db(),
            -64.0
        );
        assert_eq!(
            cfg.ed_norm_dbm + ReceptionMode::QuasiOmni.pattern().max_gain_db(),
            -67.0
        );
        assert!(is_busy(-63.9, &cfg, 10.0));
        assert!(!is_busy(-64.0, &cfg, 10.0)); // tie resolves to idle
        assert!(is_busy(-73.9, &cfg, 0.0));
        assert!(!is_busy(-74.1, &cfg, 0.0));
    }

    #[test]
    fn sensed_power_examples() {
        let c = ch();
        let cfg = cfg();
        let listener = Radiator::new(Point2D::new(0.0, 0.0), AntennaPattern::omni(), 0.0);
        // Empty active set: exactly the noise power.
        assert_eq!(sensed_power_dbm(&listener, &[], &c), -77.0);

        // One aligned interferer 1 m away lands at about -48 dBm; the noise
        // contribution is negligible at that level.
        let p = pair_at(0, Rat::Nru, Point2D::new(1.0, 0.0), Point2D::new(-1.0, 0.0));
        let active = active_of(&[p], &cfg);
        let sensed = sensed_power_dbm(&listener, &active, &c);
        assert!((sensed - (-48.0)).abs() < 0.05, "sensed {}", sensed);

        // Two equal receptions sum to +3 dB (plus a sliver of noise).
        // Frozen oracle: 10*log10(2e-6 mW + 10^-7.7 mW) = -56.9466 dBm.
        let tx_at = |x: f64| {
            let pos = Point2D::new(x, 0.0);
            Radiator::new(pos, cfg.tx_pattern, pos.azimuth_to(&listener.pos))
        };
        let mut c2 = c;
        // Tune tx power so each transmitter is received at exactly -60 dBm.
        c2.tx_power_dbm = -60.0 - 10.0 + crate::radio::pathloss_db(&c, 2.0, 0.0);
        let sensed2 = sensed_power_dbm(&listener, &[tx_at(2.0), tx_at(-2.0)], &c2);
        assert!((sensed2 - (-56.9466)).abs() < 1e-3, "sensed {}", sensed2);
    }

    #[test]
    fn noise_only_all_variants_idle() {
        let c = ch();
        let cfg = cfg();
        let p = pair_at(0, Rat::Nru, Point2D::new(0.0, 0.0), Point2D::new(5.0, 0.0));
        assert!(omni_lbt(&p, &[], &cfg, &c));
        assert!(dir_lbt(&p, &[], &cfg, &c));
        assert!(pair_lbt(&p, &[], &cfg, &c));
        for mode in [ReceptionMode::Omni, ReceptionMode::QuasiOmni] {
            assert!(!ue_sense_busy(&p, &[], &cfg, &c, mode));
            assert!(lbr_check(&p, &[], &cfg, &c, mode));
            assert!(lbt_switch(&p, &[], &cfg, &c, false));
            assert_eq!(
                lbt_switch_lbr_feedback(&p, &[], &cfg, &c, mode),
                SwitchLbrFeedback::GrantDir
            );
        }
    }

    #[test]
    fn omni_lbt_threshold_cases() {
        // Interferer tuned to known omni-sensed levels: -70 dBm trips the
        // -74 dBm threshold, -80 dBm does not. The same levels drive the
        // receiver-assisted deny/grant.
        let cfg = cfg();
        let gnb = pair_at(0, Rat::Nru, Point2D::new(0.0, 0.0), Point2D::new(5.0, 0.0));
        let mut c = ch();
        let ap = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(0.0, 30.0),
            Point2D::new(0.0, 0.0),
        );
        let active = active_of(&[ap], &cfg);
        let pl = crate::radio::pathloss_db(&c, 30.0, 0.0);

        c.tx_power_dbm = -70.0 - 10.0 + pl; // main lobe on the listener
        assert!(!omni_lbt(&gnb, &active, &cfg, &c));
        c.tx_power_dbm = -80.0 - 10.0 + pl;
        assert!(omni_lbt(&gnb, &active, &cfg, &c));

        // UE at the origin-side listener position hears the same levels.
        let victim = pair_at(2, Rat::Nru, Point2D::new(5.0, 0.0), Point2D::new(0.0, 0.0));
        c.tx_power_dbm = -70.0 - 10.0 + pl;
        assert!(!lbr_check(&victim, &active, &cfg, &c, ReceptionMode::Omni));
        c.tx_power_dbm = -80.0 - 10.0 + pl;
        assert!(lbr_check(&victim, &active, &cfg, &c, ReceptionMode::Omni));
    }

    #[test]
    fn omni_busy_dir_idle_behind_beam() {
        // Interferer behind the listener's transmit beam: omni sensing trips
        // at -74 dBm while directional sensing stays under -64 dBm.
        let c = ch();
        let cfg = cfg();
        // gNB at origin beaming +x; AP 7 m behind it on -x, beaming at gNB.
        let gnb = pair_at(0, Rat::Nru, Point2D::new(0.0, 0.0), Point2D::new(5.0, 0.0));
        let ap = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(-7.0, 0.0),
            Point2D::new(5.5, 0.0),
        );
        let active = active_of(&[ap], &cfg);
        assert!(!omni_lbt(&gnb, &active, &cfg, &c));
        assert!(dir_lbt(&gnb, &active, &cfg, &c));
    }

    #[test]
    fn dir_busy_on_boresight() {
        let c = ch();
        let cfg = cfg();
        // Interferer inside the transmit beam, aimed back at the sensing gNB.
        let gnb = pair_at(0, Rat::Nru, Point2D::new(0.0, 0.0), Point2D::new(5.0, 0.0));
        let ap = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(6.0, 0.0),
            Point2D::new(0.0, 0.0),
        );
        let active = active_of(&[ap], &cfg);
        assert!(!dir_lbt(&gnb, &active, &cfg, &c));
    }

    #[test]
    fn pair_lbt_conjunction() {
        let c = ch();
        let cfg = cfg();
        // Forward direction clear, but an aligned transmitter sits in the
        // reversed cone close enough to trip the -64 dBm threshold.
        let gnb = pair_at(0, Rat::Nru, Point2D::new(0.0, 0.0), Point2D::new(5.0, 0.0));
        let behind = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(-8.0, 0.0),
            Point2D::new(4.0, 0.0),
        );
        let active = active_of(&[behind], &cfg);
        assert!(dir_lbt(&gnb, &active, &cfg, &c));
        assert!(!pair_lbt(&gnb, &active, &cfg, &c));

        // Same interferer moved off the reversed cone: pairLBT passes.
        let aside = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(-10.0, 5.0),
            Point2D::new(4.0, 5.0),
        );
        let active = active_of(&[aside], &cfg);
        assert!(pair_lbt(&gnb, &active, &cfg, &c));
    }

    /// Fully-aligned geometry: AP, gNB, UE on one line, AP's beam sweeping
    /// across both. The correct behavior is transmission prevented.
    fn fully_aligned() -> (LinkPair, LinkPair) {
        let ap = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(0.0, 0.0),
            Point2D::new(5.0, 0.0),
        );
        let gnb = pair_at(0, Rat::Nru, Point2D::new(7.0, 0.0), Point2D::new(12.0, 0.0));
        (gnb, ap)
    }

    /// Aligned-transmitters geometry: the gNB sits in the AP's beam but
    /// transmits off-axis. The correct behavior is transmission allowed.
    fn aligned_transmitters() -> (LinkPair, LinkPair) {
        let ap = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(0.0, 0.0),
            Point2D::new(9.0, 0.0),
        );
        let gnb = pair_at(0, Rat::Nru, Point2D::new(7.0, 0.0), Point2D::new(7.0, 8.0));
        (gnb, ap)
    }

    /// Aligned-receivers geometry: the UE sits in the AP's beam while the
    /// gNB hears nothing. Only receiver-side sensing can catch this.
    fn aligned_receivers() -> (LinkPair, LinkPair) {
        let ap = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(0.0, 0.0),
            Point2D::new(5.0, 0.0),
        );
        let gnb = pair_at(0, Rat::Nru, Point2D::new(8.0, 7.0), Point2D::new(8.0, 0.0));
        (gnb, ap)
    }

    #[test]
    fn behavior_matrix_fully_aligned() {
        let c = ch();
        let cfg = cfg();
        let (gnb, ap) = fully_aligned();
        let active = active_of(&[ap], &cfg);
        // Exposed sensing: omni trips, directional misses (hidden node).
        assert!(!omni_lbt(&gnb, &active, &cfg, &c));
        assert!(dir_lbt(&gnb, &active, &cfg, &c));
        // The reversed cone catches the AP.
        assert!(!pair_lbt(&gnb, &active, &cfg, &c));
        // The UE hears the AP, so the switch falls back to omni and blocks.
        let busy = ue_sense_busy(&gnb, &active, &cfg, &c, ReceptionMode::Omni);
        assert!(busy);
        assert!(!lbt_switch(&gnb, &active, &cfg, &c, busy));
        // Receiver assistance denies outright.
        assert!(!lbr_check(&gnb, &active, &cfg, &c, ReceptionMode::Omni));
    }

    #[test]
    fn behavior_matrix_aligned_transmitters() {
        let c = ch();
        let cfg = cfg();
        let (gnb, ap) = aligned_transmitters();
        let active = active_of(&[ap], &cfg);
        // Exposed-node case: omni wrongly blocks, directional allows.
        assert!(!omni_lbt(&gnb, &active, &cfg, &c));
        assert!(dir_lbt(&gnb, &active, &cfg, &c));
        // The AP is outside both the forward and reversed cones: allowed.
        assert!(pair_lbt(&gnb, &active, &cfg, &c));
        // The UE does not hear the AP, so dirLBT is chosen and passes.
        let busy = ue_sense_busy(&gnb, &active, &cfg, &c, ReceptionMode::Omni);
        assert!(!busy);
        assert!(lbt_switch(&gnb, &active, &cfg, &c, busy));
        // LBR grants as well.
        assert!(lbr_check(&gnb, &active, &cfg, &c, ReceptionMode::Omni));
    }

    #[test]
    fn behavior_matrix_aligned_receivers() {
        let c = ch();
        let cfg = cfg();
        let (gnb, ap) = aligned_receivers();
        let active = active_of(&[ap], &cfg);
        // No transmitter-side method detects the AP.
        assert!(omni_lbt(&gnb, &active, &cfg, &c));
        assert!(dir_lbt(&gnb, &active, &cfg, &c));
        assert!(pair_lbt(&gnb, &active, &cfg, &c));
        // The switch hears the UE-side busy flag but omni sensing still
        // passes, so the transmission proceeds regardless.
        let busy = ue_sense_busy(&gnb, &active, &cfg, &c, ReceptionMode::Omni);
        assert!(busy);
        assert!(lbt_switch(&gnb, &active, &cfg, &c, busy));
        // Only the receiver-assisted check prevents the interference.
        assert!(!lbr_check(&gnb, &active, &cfg, &c, ReceptionMode::Omni));
        assert_eq!(
            decide_pair(
                &gnb,
                &active,
                SensingStrategy::new(TxSensing::DirLbt, true).unwrap(),
                ReceptionMode::Omni,
                &cfg,
                &c
            ),
            PairDecision::BlockedRxSense
        );
    }

    #[test]
    fn switch_lbr_two_threshold_rule() {
        let c = ch();
        let cfg = cfg();
        // Sweep the interferer distance so the UE-sensed power crosses both
        // thresholds (-74 and -64 dBm effective for omni reception).
        let gnb = pair_at(
            0,
            Rat::Nru,
            Point2D::new(0.0, 50.0),
            Point2D::new(5.0, 50.0),
        );
        let mk_active = |d: f64| {
            let ap = pair_at(
                1,
                Rat::Wigig,
                Point2D::new(5.0 + d, 50.0),
                Point2D::new(5.0, 50.0),
            );
            active_of(&[ap], &cfg)
        };
        // 1.5 m: sensed ~ -51.5 dBm at the UE, above -64 -> deny.
        assert_eq!(
            lbt_switch_lbr_feedback(&gnb, &mk_active(1.5), &cfg, &c, ReceptionMode::Omni),
            SwitchLbrFeedback::Deny
        );
        // 8 m: sensed ~ -66.1 dBm, inside (-74, -64] -> grant with omni.
        assert_eq!(
            lbt_switch_lbr_feedback(&gnb, &mk_active(8.0), &cfg, &c, ReceptionMode::Omni),
            SwitchLbrFeedback::GrantOmni
        );
        // 60 m: sensed ~ -83 dBm -> clean grant with dir.
        assert_eq!(
            lbt_switch_lbr_feedback(&gnb, &mk_active(60.0), &cfg, &c, ReceptionMode::Omni),
            SwitchLbrFeedback::GrantDir
        );
    }

    #[test]
    fn admission_far_pairs_all_admitted() {
        let c = ch();
        let cfg = cfg();
        // Two pairs 100 m apart: every sensed power falls below every
        // threshold, so both are admitted under any strategy and mode.
        let a = pair_at(0, Rat::Nru, Point2D::new(0.0, 0.0), Point2D::new(5.0, 0.0));
        let b = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(100.0, 0.0),
            Point2D::new(105.0, 0.0),
        );
        let dep = deployment(vec![a, b]);
        for strategy in SensingStrategy::all() {
            for mode in [ReceptionMode::Omni, ReceptionMode::QuasiOmni] {
                let out = run_admission(&dep, strategy, mode, &cfg, &c, 42);
                assert_eq!(out.admitted.len(), 2, "strategy {:?}", strategy);
            }
        }
    }

    #[test]
    fn admission_colocated_blocks_second() {
        let c = ch();
        let cfg = cfg();
        // Two transmitters 1 m apart with aligned beams: the second visited
        // pair senses about -48 dBm, far above -74 dBm.
        let a = pair_at(0, Rat::Nru, Point2D::new(0.0, 0.0), Point2D::new(5.0, 0.0));
        let b = pair_at(
            1,
            Rat::Wigig,
            Point2D::new(1.0, 0.0),
            Point2D::new(6.0, 0.0),
        );
        let dep = deployment(vec![a, b]);
        let out = run_admission(
            &dep,
            SensingStrategy::plain(TxSensing::OmniLbt),
            ReceptionMode::Omni,
            &cfg,
            &c,
            42,
        );
        assert_eq!(out.admitted.len(), 1);
        let blocked = if out.admitted[0] == 0 { 1 } else { 0 };
        assert_eq!(out.per_pair_decision[blocked], PairDecision::BlockedTxSense);
    }

    #[test]
    fn no_lbt_admits_every_nru_pair() {
        let c = ch();
        let cfg = cfg();
        let dep = generate_deployment(&ScenarioParams::with_k(12), 5).unwrap();
        let out = run_admission(
            &dep,
            SensingStrategy::plain(TxSensing::NoLbt),
            ReceptionMode::Omni,
            &cfg,
            &c,
            9,
        );
        for p in &dep.pairs {
            if p.rat == Rat::Nru {
                assert_eq!(out.per_pair_decision[p.id], PairDecision::Admitted);
            }
        }
    }

    #[test]
    fn no_lbt_admission_superset() {
        // The NR-U admitted set under no-LBT contains the NR-U admitted set
        // of every other strategy at the same attempt order.
        let c = ch();
        let cfg = cfg();
        for seed in 0..20u64 {
            let dep = generate_deployment(&ScenarioParams::with_k(16), seed).unwrap();
            let base = run_admission(
                &dep,
                SensingStrategy::plain(TxSensing::NoLbt),
                ReceptionMode::Omni,
                &cfg,
                &c,
                seed,
            );
            let base_nru: Vec<usize> = base
                .admitted
                .iter()
                .copied()
                .filter(|&id| dep.pairs[id].rat == Rat::Nru)
                .collect();
            for strategy in SensingStrategy::all() {
                let out = run_admission(&dep, strategy, ReceptionMode::Omni, &cfg, &c, seed);
                for id in out
                    .admitted
                    .iter()
                    .filter(|&&id| dep.pairs[id].rat == Rat::Nru)
                {
                    assert!(base_nru.contains(id));
                }
            }
        }
    }

    #[test]
    fn admission_deterministic_and_prefix_consistent() {
        let c = ch();
        let cfg = cfg();
        let dep = generate_deployment(&ScenarioParams::with_k(16), 3).unwrap();
        let strategy = SensingStrategy::new(TxSensing::LbtSwitch, true).unwrap();
        let a = run_admission(&dep, strategy, ReceptionMode::QuasiOmni, &cfg, &c, 77);
        let b = run_admission(&dep, strategy, ReceptionMode::QuasiOmni, &cfg, &c, 77);
        assert_eq!(a.admitted, b.admitted);
        assert_eq!(a.attempt_order, b.attempt_order);
        assert_eq!(a.per_pair_decision, b.per_pair_decision);

        // Outcome consistency: the attempt order is a permutation, the
        // admitted list is a subset of it, and decisions agree with it.
        let mut sorted = a.attempt_order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..dep.pairs.len()).collect::<Vec<_>>());
        for id in 0..dep.pairs.len() {
            assert_eq!(
                a.per_pair_decision[id] == PairDecision::Admitted,
                a.admitted.contains(&id)
            );
        }

        // A pair's decision depends only on the pairs admitted before it.
        let mut active: Vec<Radiator> = Vec::new();
        for &id in &a.attempt_order {
            let d = decide_pair(
                &dep.pairs[id],
                &active,
                strategy,
                ReceptionMode::QuasiOmni,
                &cfg,
                &c,
            );
            assert_eq!(d, a.per_pair_decision[id]);
            if d == PairDecision::Admitted {
                active.push(tx_radiator(&dep.pairs[id], &cfg));
            }
        }
    }
}
