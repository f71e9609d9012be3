//! ETSI band constants and channel-access category rules for the unlicensed
//! 5 GHz and 60 GHz bands, plus the receiver-assist handshake overhead table.
//!
//! The initial CCA check at 60 GHz is a multiple of the 5 us slot and the
//! extended check lasts 8 + m * 5 us with m drawn by the backoff procedure;
//! backoff itself is not modeled here, so only the slot duration is carried
//! as a constant.

use thiserror::Error;

/// Unlicensed band with harmonized ETSI rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Band {
    Band5Ghz,
    Band60Ghz,
}

impl std::str::FromStr for Band {
    type Err = RegulatoryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "5" | "5ghz" | "5_ghz" => Ok(Band::Band5Ghz),
            "60" | "60ghz" | "60_ghz" => Ok(Band::Band60Ghz),
            other => Err(RegulatoryError::UnknownBand(other.to_string())),
        }
    }
}

/// Regulatory constants of one band.
#[derive(Clone, Copy, Debug)]
pub struct BandRules {
    pub band: Band,
    /// CCA slot duration, microseconds.
    pub cca_slot_us: f64,
    /// Maximum channel occupancy time, milliseconds. For the 5 GHz band this
    /// is the largest value over the priority classes; see
    /// [`BandRules::mcot_classes_ms`].
    pub mcot_ms: f64,
    /// Allowed MCOT values per channel-access priority class, milliseconds.
    pub mcot_classes_ms: &'static [f64],
    /// Energy-detection threshold, dBm, valid under
    /// [`BandRules::ed_reference_condition`].
    pub ed_reference_dbm: f64,
    pub ed_reference_condition: &'static str,
    /// Maximum mean EIRP, dBm. The 5 GHz entry carries the upper subband
    /// (5.47-5.725 GHz) limits; the lower subband allows 23 dBm and
    /// 10 dBm/MHz.
    pub max_eirp_dbm: f64,
    pub max_psd_dbm_per_mhz: f64,
    /// Occupied channel bandwidth bounds as fractions of the nominal
    /// channel bandwidth.
    pub ocb_min_fraction: f64,
    pub ocb_max_fraction: f64,
}

const RULES_60GHZ: BandRules = BandRules {
    band: Band::Band60Ghz,
    cca_slot_us: 5.0,
    mcot_ms: 9.0,
    mcot_classes_ms: &[9.0],
    ed_reference_dbm: -47.0,
    ed_reference_condition: "at 40 dBm radiated power",
    max_eirp_dbm: 40.0,
    max_psd_dbm_per_mhz: 13.0,
    ocb_min_fraction: 0.80,
    ocb_max_fraction: 1.00,
};

const RULES_5GHZ: BandRules = BandRules {
    band: Band::Band5Ghz,
    cca_slot_us: 9.0,
    mcot_ms: 10.0,
    mcot_classes_ms: &[2.0, 4.0, 6.0, 8.0, 10.0],
    ed_reference_dbm: -72.0,
    ed_reference_condition: "for a 20 MHz channel bandwidth",
    max_eirp_dbm: 30.0,
    max_psd_dbm_per_mhz: 17.0,
    ocb_min_fraction: 0.70,
    ocb_max_fraction: 1.00,
};

/// Constants table of the given band.
pub fn band_rules(band: Band) -> BandRules {
    match band {
        Band::Band60Ghz => RULES_60GHZ,
        Band::Band5Ghz => RULES_5GHZ,
    }
}

/// Handshake overhead of receiver-assisted access as a fraction of the
/// 9 ms MCOT, assuming one slot per trigger/sense/feedback exchange. Values
/// are the slot-over-MCOT ratios truncated at four decimals.
pub const SCS_OVERHEAD_TABLE: [(u32, f64); 5] = [
    (15, 0.1111),
    (30, 0.0555),
    (60, 0.0277),
    (120, 0.0138),
    (240, 0.0069),
];

/// LBT category selected by the gap preceding a responding transmission
/// inside a shared COT.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LbtCategory {
    /// Immediate transmission, no sensing.
    Cat1,
    /// Short deterministic sensing, no backoff.
    Cat2,
    /// Full LBT with random backoff.
    Cat4,
}

#[derive(Debug, Error)]
pub enum RegulatoryError {
    #[error("unknown band '{0}' (expected 5ghz or 60ghz)")]
    UnknownBand(String),
    #[error("no handshake overhead tabulated for SCS {0} kHz")]
    UnknownScs(u32),
    #[error("invalid bandwidth: occupied {occupied_hz} Hz vs nominal {nominal_hz} Hz")]
    InvalidBandwidth { occupied_hz: f64, nominal_hz: f64 },
}

/// Handshake overhead fraction for the given subcarrier spacing.
pub fn lbr_overhead(scs_khz: u32) -> Result<f64, RegulatoryError> {
    SCS_OVERHEAD_TABLE
        .iter()
        .find(|(s, _)| *s == scs_khz)
        .map(|(_, o)| *o)
        .ok_or(RegulatoryError::UnknownScs(scs_khz))
}

/// Category required for a responding device after a gap of `gap_us`
/// microseconds inside a shared COT: under 16 us none, up to 25 us a short
/// sense, beyond that regular LBT.
pub fn cot_gap_category(gap_us: f64) -> LbtCategory {
    if gap_us < 16.0 {
        LbtCategory::Cat1
    } else if gap_us <= 25.0 {
        LbtCategory::Cat2
    } else {
        LbtCategory::Cat4
    }
}

/// True iff a transmission of `duration_ms` fits the band's MCOT.
pub fn check_mcot(duration_ms: f64, band: Band) -> bool {
    duration_ms <= band_rules(band).mcot_ms
}

/// MCOT check against one of the band's priority classes (indexed into
/// [`BandRules::mcot_classes_ms`]).
pub fn check_mcot_class(duration_ms: f64, band: Band, class_index: usize) -> Option<bool> {
    band_rules(band)
        .mcot_classes_ms
        .get(class_index)
        .map(|&limit| duration_ms <= limit)
}

/// True iff the occupied bandwidth fraction lies inside the band's OCB
/// bounds.
pub fn check_ocb(occupied_hz: f64, nominal_hz: f64, band: Band) -> Result<bool, RegulatoryError> {
    let domain_ok = occupied_hz.is_finite()
        && nominal_hz.is_finite()
        && nominal_hz > 0.0
        && occupied_hz > 0.0
        && occupied_hz <= nominal_hz;
    if !domain_ok {
        return Err(RegulatoryError::InvalidBandwidth {
            occupied_hz,
            nominal_hz,
        });
    }
    let rules = band_rules(band);
    let fraction = occupied_hz / nominal_hz;
    Ok(fraction >= rules.ocb_min_fraction && fraction <= rules.ocb_max_fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn band_constant_tables() {
        let r60 = band_rules(Band::Band60Ghz);
        assert_eq!(r60.cca_slot_us, 5.0);
        assert_eq!(r60.mcot_ms, 9.0);
        assert_eq!(r60.ed_reference_dbm, -47.0);
        assert_eq!(r60.max_eirp_dbm, 40.0);
        assert_eq!(r60.max_psd_dbm_per_mhz, 13.0);
        assert_eq!((r60.ocb_min_fraction, r60.ocb_max_fraction), (0.80, 1.00));

        let r5 = band_rules(Band::Band5Ghz);
        assert_eq!(r5.cca_slot_us, 9.0);
        assert_eq!(r5.ed_reference_dbm, -72.0);
        assert_eq!((r5.ocb_min_fraction, r5.ocb_max_fraction), (0.70, 1.00));
        assert_eq!(r5.mcot_classes_ms, &[2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn unknown_band_string() {
        assert!(matches!(
            Band::from_str("2.4ghz"),
            Err(RegulatoryError::UnknownBand(_))
        ));
        assert_eq!(Band::from_str("60ghz").unwrap(), Band::Band60Ghz);
    }

    #[test]
    fn overhead_table_values() {
        assert_eq!(lbr_overhead(15).unwrap(), 0.1111);
        assert_eq!(lbr_overhead(30).unwrap(), 0.0555);
        assert_eq!(lbr_overhead(60).unwrap(), 0.0277);
        assert_eq!(lbr_overhead(120).unwrap(), 0.0138);
        assert_eq!(lbr_overhead(240).unwrap(), 0.0069);
        assert!(matches!(
            lbr_overhead(480),
            Err(RegulatoryError::UnknownScs(480))
        ));
    }

    #[test]
    fn overhead_tracks_slot_fraction() {
        // Each entry is the slot/MCOT ratio truncated at 4 decimals, i.e.
        // within 1e-4 below the exact fraction; overheads strictly decrease
        // with SCS.
        let mut prev = f64::INFINITY;
        for (scs, overhead) in SCS_OVERHEAD_TABLE {
            let slot_ms = 1.0 / (scs as f64 / 15.0);
            let exact = slot_ms / 9.0;
            assert!(
                exact - overhead >= 0.0 && exact - overhead < 1e-4,
                "SCS {}: table {} vs exact {}",
                scs,
                overhead,
                exact
            );
            assert!(overhead < prev);
            prev = overhead;
        }
    }

    #[test]
    fn gap_category_boundaries() {
        assert_eq!(cot_gap_category(10.0), LbtCategory::Cat1);
        assert_eq!(cot_gap_category(15.0), LbtCategory::Cat1);
        assert_eq!(cot_gap_category(16.0), LbtCategory::Cat2);
        assert_eq!(cot_gap_category(20.0), LbtCategory::Cat2);
        assert_eq!(cot_gap_category(25.0), LbtCategory::Cat2);
        assert_eq!(cot_gap_category(26.0), LbtCategory::Cat4);
        assert_eq!(cot_gap_category(100.0), LbtCategory::Cat4);
    }

    #[test]
    fn gap_category_monotone() {
        fn rank(c: LbtCategory) -> u8 {
            match c {
                LbtCategory::Cat1 => 1,
                LbtCategory::Cat2 => 2,
                LbtCategory::Cat4 => 4,
            }
        }
        let mut prev = 0u8;
        for tenth in 0..=400 {
            let r = rank(cot_gap_category(tenth as f64 / 10.0));
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn mcot_checks() {
        assert!(check_mcot(9.0, Band::Band60Ghz));
        assert!(!check_mcot(9.1, Band::Band60Ghz));
        assert!(check_mcot(0.0, Band::Band60Ghz));
        assert!(check_mcot(0.0, Band::Band5Ghz));
        assert_eq!(check_mcot_class(3.0, Band::Band5Ghz, 0), Some(false));
        assert_eq!(check_mcot_class(3.0, Band::Band5Ghz, 1), Some(true));
        assert_eq!(check_mcot_class(3.0, Band::Band5Ghz, 9), None);
    }

    #[test]
    fn ocb_checks() {
        assert!(check_ocb(1.8e9, 2.16e9, Band::Band60Ghz).unwrap());
        assert!(!check_ocb(1.5e9, 2.16e9, Band::Band60Ghz).unwrap());
        assert!(check_ocb(2.16e9, 2.16e9, Band::Band60Ghz).unwrap());
        assert!(matches!(
            check_ocb(3e9, 2.16e9, Band::Band60Ghz),
            Err(RegulatoryError::InvalidBandwidth { .. })
        ));
        assert!(check_ocb(1.0, 0.0, Band::Band5Ghz).is_err());
    }
}
