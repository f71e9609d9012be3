//! Random indoor coexistence deployments.
//!
//! A deployment drops `K` transmitter/receiver pairs into a square area,
//! alternating between the two radio access technologies so each gets `K/2`
//! pairs. Transmitters are placed by rejection sampling against a minimum
//! separation; each receiver sits at a uniform-random distance and angle from
//! its transmitter. Receivers may land outside the square: only the tx-rx
//! distance is constrained, and resampling on area exit would bias the
//! distance distribution.
//!
//! Generation is a pure function of `(params, seed)`. Every node draws from
//! its own counter-based RNG stream keyed by `(seed, node_index)`, so drops
//! can run on any number of workers without affecting the result.

use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use std::f64::consts::TAU;
use thiserror::Error;

/// Attempts allowed per transmitter before placement gives up.
pub const PLACEMENT_ATTEMPT_BUDGET: usize = 10_000;

/// A point in the 2D deployment plane, in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    /// Euclidean distance to `other` in meters.
    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Azimuth of the direction from `self` toward `other`, in radians.
    pub fn azimuth_to(&self, other: &Point2D) -> f64 {
        (other.y - self.y).atan2(other.x - self.x)
    }
}

/// Radio access technology of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rat {
    Nru,
    Wigig,
}

impl Rat {
    pub fn label(self) -> &'static str {
        match self {
            Rat::Nru => "nru",
            Rat::Wigig => "wigig",
        }
    }
}

/// One transmitter/receiver pair with boresights pointing at each other.
#[derive(Clone, Copy, Debug)]
pub struct LinkPair {
    pub id: usize,
    pub rat: Rat,
    pub tx_pos: Point2D,
    pub rx_pos: Point2D,
    /// Angle from the transmitter toward its receiver, radians.
    pub tx_boresight: f64,
    /// Angle from the receiver toward its transmitter, radians.
    pub rx_boresight: f64,
}

/// Geometry parameters for one deployment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioParams {
    /// Total number of pairs `K`; must be even, half per RAT.
    pub k_pairs: usize,
    /// Side of the square deployment area, meters.
    pub area_side: f64,
    /// Minimum distance between any two transmitters, meters.
    pub min_tx_separation: f64,
    /// Minimum tx-rx distance, meters.
    pub rx_dist_min: f64,
    /// Maximum tx-rx distance, meters. The distance itself is drawn uniform
    /// in `[rx_dist_min, rx_dist_max]` (uniform in distance, not in annulus
    /// area) and the angle uniform in `[0, 2π)`.
    pub rx_dist_max: f64,
}

impl ScenarioParams {
    /// Default indoor geometry (25 m square, 1 m tx separation, 3-8 m links)
    /// with the given pair count.
    pub fn with_k(k_pairs: usize) -> Self {
        ScenarioParams {
            k_pairs,
            area_side: 25.0,
            min_tx_separation: 1.0,
            rx_dist_min: 3.0,
            rx_dist_max: 8.0,
        }
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        if !self.k_pairs.is_multiple_of(2) {
            return Err(ScenarioError::InvalidParams(format!(
                "k_pairs must be even, got {}",
                self.k_pairs
            )));
        }
        if !self.area_side.is_finite() || self.area_side <= 0.0 {
            return Err(ScenarioError::InvalidParams(format!(
                "area_side must be positive, got {}",
                self.area_side
            )));
        }
        if !self.min_tx_separation.is_finite() || self.min_tx_separation <= 0.0 {
            return Err(ScenarioError::InvalidParams(format!(
                "min_tx_separation must be positive, got {}",
                self.min_tx_separation
            )));
        }
        let range_ok = self.rx_dist_min.is_finite()
            && self.rx_dist_max.is_finite()
            && self.rx_dist_min > 0.0
            && self.rx_dist_min <= self.rx_dist_max;
        if !range_ok {
            return Err(ScenarioError::InvalidParams(format!(
                "rx distance range [{}, {}] is invalid",
                self.rx_dist_min, self.rx_dist_max
            )));
        }
        Ok(())
    }
}

/// The placed pairs of one Monte-Carlo drop. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Deployment {
    pub pairs: Vec<LinkPair>,
    pub params: ScenarioParams,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario parameters: {0}")]
    InvalidParams(String),
    #[error(
        "could not place transmitter {node_index} within {attempts} attempts; \
         the configuration is too dense for min_tx_separation"
    )]
    PlacementFailure { node_index: usize, attempts: usize },
}

/// RNG stream for one node of one drop. Streams are independent, so the
/// draws of node `i` do not depend on how many attempts earlier nodes used.
fn node_rng(seed: u64, node_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(node_index as u64);
    rng
}

/// Generates one random deployment. Pure in `(params, seed)`.
///
/// Transmitters are placed in pair-id order, alternating NR-U and WiGig so
/// that a placement failure affects both RATs symmetrically.
pub fn generate_deployment(
    params: &ScenarioParams,
    seed: u64,
) -> Result<Deployment, ScenarioError> {
    params.validate()?;
    let k = params.k_pairs;
    let mut pairs = Vec::with_capacity(k);
    let mut tx_positions: Vec<Point2D> = Vec::with_capacity(k);

    for id in 0..k {
        let mut rng = node_rng(seed, id);

        let mut tx_pos = None;
        for _ in 0..PLACEMENT_ATTEMPT_BUDGET {
            let cand = Point2D::new(
                rng.random_range(0.0..=params.area_side),
                rng.random_range(0.0..=params.area_side),
            );
            if tx_positions
                .iter()
                .all(|p| p.distance(&cand) >= params.min_tx_separation)
            {
                tx_pos = Some(cand);
                break;
            }
        }
        let tx_pos = tx_pos.ok_or(ScenarioError::PlacementFailure {
            node_index: id,
            attempts: PLACEMENT_ATTEMPT_BUDGET,
        })?;

        let dist = rng.random_range(params.rx_dist_min..=params.rx_dist_max);
        let angle = rng.random_range(0.0..TAU);
        let rx_pos = Point2D::new(tx_pos.x + dist * angle.cos(), tx_pos.y + dist * angle.sin());

        pairs.push(LinkPair {
            id,
            rat: if id % 2 == 0 { Rat::Nru } else { Rat::Wigig },
            tx_pos,
            rx_pos,
            tx_boresight: tx_pos.azimuth_to(&rx_pos),
            rx_boresight: rx_pos.azimuth_to(&tx_pos),
        });
        tx_positions.push(tx_pos);
    }

    Ok(Deployment {
        pairs,
        params: *params,
        seed,
    })
}
