//! Directional antenna gain model and 60 GHz large-scale channel model.
//!
//! Antennas are modeled as a 3D cone: a main lobe of constant gain over a
//! configurable beamwidth plus a constant sidelobe floor everywhere else. The
//! floor gain is derived from total-power conservation over the sphere
//! (ideal radiation efficiency), so a pattern is fully determined by its
//! main-lobe gain and beamwidth. The pattern is evaluated in the 2D
//! deployment plane.
//!
//! The channel is a line-of-sight large-scale model: free-space reference
//! loss at `ref_distance` plus a configurable pathloss exponent and an
//! optional shadowing term supplied by the caller. Distances below the
//! reference clamp to it to avoid near-field singularities.
//!
//! Power arithmetic that sums contributions is done in linear milliwatts;
//! dBm appears only at interfaces.

use crate::scenario::Point2D;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Cone-plus-floor antenna pattern. Construct via [`make_pattern`] or
/// [`AntennaPattern::omni`]; the invariants (sidelobe floor from energy
/// conservation, `side_gain <= main_gain`) hold for every value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AntennaPattern {
    main_gain: f64,
    main_gain_db: f64,
    beamwidth: f64,
    side_gain: f64,
    is_omni: bool,
}

impl AntennaPattern {
    /// Unit-gain pattern over the full sphere.
    pub fn omni() -> Self {
        AntennaPattern {
            main_gain: 1.0,
            main_gain_db: 0.0,
            beamwidth: TAU,
            side_gain: 1.0,
            is_omni: true,
        }
    }

    /// Main-lobe (maximum) gain, linear.
    pub fn main_gain(&self) -> f64 {
        self.main_gain
    }

    /// Main-lobe gain in dB, exactly as passed to the constructor. Used to
    /// normalize energy-detection thresholds without round-trip error.
    pub fn max_gain_db(&self) -> f64 {
        self.main_gain_db
    }

    /// Full main-lobe width, radians.
    pub fn beamwidth(&self) -> f64 {
        self.beamwidth
    }

    /// Sidelobe floor gain, linear.
    pub fn side_gain(&self) -> f64 {
        self.side_gain
    }

    pub fn side_gain_db(&self) -> f64 {
        10.0 * self.side_gain.log10()
    }

    pub fn is_omni(&self) -> bool {
        self.is_omni
    }
}

/// Large-scale channel and radio parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub pathloss_exponent: f64,
    pub ref_distance_m: f64,
    /// Log-normal shadowing standard deviation in dB. The snapshot pipeline
    /// runs deterministic large-scale only (no draws); callers doing
    /// link-level studies pass their own draw to [`pathloss_db`].
    pub shadowing_sigma_db: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub tx_power_dbm: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            carrier_freq_hz: 60e9,
            bandwidth_hz: 1e9,
            pathloss_exponent: 2.0,
            ref_distance_m: 1.0,
            shadowing_sigma_db: 0.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 7.0,
            tx_power_dbm: 10.0,
        }
    }
}

/// One antenna end of a link: position, pattern, and pointing direction.
#[derive(Clone, Copy, Debug)]
pub struct Radiator {
    pub pos: Point2D,
    pub pattern: AntennaPattern,
    pub boresight: f64,
}

impl Radiator {
    pub fn new(pos: Point2D, pattern: AntennaPattern, boresight: f64) -> Self {
        Radiator {
            pos,
            pattern,
            boresight,
        }
    }
}

#[derive(Debug, Error)]
pub enum RadioError {
    #[error(
        "infeasible pattern: {main_gain_db} dB over {beamwidth_deg} deg main lobe \
         would carry more than the total radiated power"
    )]
    InfeasiblePattern {
        main_gain_db: f64,
        beamwidth_deg: f64,
    },
    #[error("pattern arguments out of range: {0}")]
    InvalidPattern(String),
}

/// Builds a cone pattern from main-lobe gain (dB) and full beamwidth
/// (degrees), deriving the sidelobe floor from
/// `main_gain * omega + side_gain * (4pi - omega) = 4pi` with
/// `omega = 2pi * (1 - cos(beamwidth / 2))`.
pub fn make_pattern(main_gain_db: f64, beamwidth_deg: f64) -> Result<AntennaPattern, RadioError> {
    if !beamwidth_deg.is_finite() || beamwidth_deg <= 0.0 || beamwidth_deg > 360.0 {
        return Err(RadioError::InvalidPattern(format!(
            "beamwidth must be in (0, 360] degrees, got {}",
            beamwidth_deg
        )));
    }
    if !main_gain_db.is_finite() || main_gain_db < 0.0 {
        return Err(RadioError::InvalidPattern(format!(
            "main gain must be >= 0 dB, got {}",
            main_gain_db
        )));
    }

    let main_gain = 10f64.powf(main_gain_db / 10.0);
    if beamwidth_deg == 360.0 {
        // Main lobe covers the whole sphere; only unit gain conserves power.
        if main_gain_db == 0.0 {
            return Ok(AntennaPattern::omni());
        }
        return Err(RadioError::InfeasiblePattern {
            main_gain_db,
            beamwidth_deg,
        });
    }

    let beamwidth = beamwidth_deg.to_radians();
    let omega = TAU * (1.0 - (beamwidth / 2.0).cos());
    let side_gain = (4.0 * PI - main_gain * omega) / (4.0 * PI - omega);
    if side_gain < 0.0 {
        return Err(RadioError::InfeasiblePattern {
            main_gain_db,
            beamwidth_deg,
        });
    }

    Ok(AntennaPattern {
        main_gain,
        main_gain_db,
        beamwidth,
        side_gain,
        is_omni: false,
    })
}

/// Transmit beam used at every gNB/AP in the evaluated scenario: 10 dB main
/// lobe over 30 degrees.
pub fn default_tx_pattern() -> AntennaPattern {
    make_pattern(10.0, 30.0).expect("default tx pattern is feasible")
}

/// Quasi-omnidirectional receive beam: 7 dB main lobe over 90 degrees.
pub fn quasi_omni_pattern() -> AntennaPattern {
    make_pattern(7.0, 90.0).expect("quasi-omni pattern is feasible")
}

/// Absolute angular difference wrapped to `[0, pi]`.
pub fn angular_offset(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// Linear gain of `pattern` pointed along `boresight`, evaluated toward the
/// azimuth `toward`: main-lobe gain within half a beamwidth of boresight,
/// sidelobe floor outside.
pub fn gain(pattern: &AntennaPattern, boresight: f64, toward: f64) -> f64 {
    if pattern.is_omni {
        return 1.0;
    }
    if angular_offset(toward, boresight) <= pattern.beamwidth / 2.0 {
        pattern.main_gain
    } else {
        pattern.side_gain
    }
}

/// Free-space loss at distance `d_m`, dB.
fn fspl_db(ch: &ChannelParams, d_m: f64) -> f64 {
    20.0 * (4.0 * PI * d_m * ch.carrier_freq_hz / SPEED_OF_LIGHT_M_S).log10()
}

/// Large-scale pathloss in dB at `distance_m`, with a caller-supplied
/// shadowing draw in dB (pass 0 for the deterministic model). Distances
/// below `ref_distance_m` clamp to it.
pub fn pathloss_db(ch: &ChannelParams, distance_m: f64, shadow_db: f64) -> f64 {
    let d = distance_m.max(ch.ref_distance_m);
    fspl_db(ch, ch.ref_distance_m)
        + 10.0 * ch.pathloss_exponent * (d / ch.ref_distance_m).log10()
        + shadow_db
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Link budget from `tx` to `rx` in dBm:
/// tx power + tx gain toward rx + rx gain toward tx - pathloss.
pub fn rx_power_dbm(ch: &ChannelParams, tx: &Radiator, rx: &Radiator) -> f64 {
    let d = tx.pos.distance(&rx.pos);
    let g_tx = gain(&tx.pattern, tx.boresight, tx.pos.azimuth_to(&rx.pos));
    let g_rx = gain(&rx.pattern, rx.boresight, rx.pos.azimuth_to(&tx.pos));
    ch.tx_power_dbm + 10.0 * g_tx.log10() + 10.0 * g_rx.log10() - pathloss_db(ch, d, 0.0)
}

/// Link budget in linear milliwatts, for summation.
pub fn rx_power_mw(ch: &ChannelParams, tx: &Radiator, rx: &Radiator) -> f64 {
    dbm_to_mw(rx_power_dbm(ch, tx, rx))
}

/// Thermal noise power over the configured bandwidth plus noise figure, dBm.
pub fn noise_power_dbm(ch: &ChannelParams) -> f64 {
    ch.noise_psd_dbm_hz + 10.0 * ch.bandwidth_hz.log10() + ch.noise_figure_db
}
