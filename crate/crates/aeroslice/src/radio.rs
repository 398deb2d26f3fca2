//! Uplink radio model: directional beam gain, co-channel interference and
//! the achievable rate of one eVTOL to base-station link.
//!
//! Beams are steered, so the served link always enjoys the gain of the
//! width that is optimal for its azimuth; the general width-dependent gain
//! is still exposed for analysis. Rate scales with the bandwidth fraction a
//! slice holds and decays with the square of link distance.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::airspace::{self, BaseStation, BsId, EvtolId, EvtolState};
use crate::slices::{ResourcePool, SliceState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadioError {
    #[error("beamwidth must be positive, got {0}")]
    NonPositiveBeamwidth(f64),
    #[error("azimuth must be positive, got {0}")]
    NonPositiveAzimuth(f64),
    #[error("beam fraction {0} outside [0, 1]")]
    FractionOutOfRange(f64),
    #[error("degenerate geometry: zero link distance")]
    ZeroDistance,
}

/// Physical-layer constants plus per-link small-scale power gains.
/// Links missing from the map fall back to a flat gain of 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RadioParams {
    /// Transmit power of every eVTOL, watts.
    pub tx_power: f64,
    /// Receiver noise power, watts.
    pub noise_power: f64,
    /// Half-power beamwidth used for width-sweep analysis, radians.
    pub beamwidth_3db: f64,
    pub channel_gain_sq: BTreeMap<(EvtolId, BsId), f64>,
}

impl RadioParams {
    /// Squared channel magnitude for a link.
    pub fn gain_sq(&self, e: EvtolId, b: BsId) -> f64 {
        self.channel_gain_sq.get(&(e, b)).copied().unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<(), RadioError> {
        if !(self.beamwidth_3db > 0.0) {
            return Err(RadioError::NonPositiveBeamwidth(self.beamwidth_3db));
        }
        Ok(())
    }
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            tx_power: 0.1,
            noise_power: 1e-9,
            beamwidth_3db: 0.2,
            channel_gain_sq: BTreeMap::new(),
        }
    }
}

/// Distance and azimuth of one link, precomputed from airspace state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkGeometry {
    pub distance: f64,
    pub azimuth: f64,
}

impl LinkGeometry {
    pub fn between(e: &EvtolState, b: &BaseStation) -> Result<Self, airspace::AirspaceError> {
        Self::from_points(&e.position, &b.position)
    }

    pub fn from_points(
        p: &crate::airspace::Vec3,
        q: &crate::airspace::Vec3,
    ) -> Result<Self, airspace::AirspaceError> {
        Ok(Self {
            distance: p.distance_to(q),
            azimuth: airspace::azimuth_between(p, q)?,
        })
    }
}

/// Gain of a beam of half-power width `beamwidth_3db` pointed `azimuth` off
/// axis, scaled by the held beam fraction and the pool total.
pub fn beam_gain(
    beamwidth_3db: f64,
    azimuth: f64,
    v_beam: f64,
    s_beam: f64,
) -> Result<f64, RadioError> {
    if !(beamwidth_3db > 0.0) {
        return Err(RadioError::NonPositiveBeamwidth(beamwidth_3db));
    }
    if !(0.0..=1.0).contains(&v_beam) {
        return Err(RadioError::FractionOutOfRange(v_beam));
    }
    let ln2 = std::f64::consts::LN_2;
    let shape = (-4.0 * ln2 * azimuth * azimuth / (beamwidth_3db * beamwidth_3db)).exp();
    Ok(16.0 / (6.76 * beamwidth_3db) * shape * v_beam * s_beam)
}

/// Peak gain over all beamwidths for a link at the given azimuth. The
/// optimum width is azimuth * sqrt(8 ln 2).
pub fn max_beam_gain(azimuth: f64) -> Result<f64, RadioError> {
    if !(azimuth > 0.0) {
        return Err(RadioError::NonPositiveAzimuth(azimuth));
    }
    let ln2 = std::f64::consts::LN_2;
    let e = std::f64::consts::E;
    Ok(16.0 / (6.76 * azimuth * (8.0 * ln2 * e).sqrt()))
}

/// Peak gain weighted by the slice's held beam fraction and the pool total.
pub fn effective_gain(azimuth: f64, v_beam: f64, s_beam: f64) -> Result<f64, RadioError> {
    if !(0.0..=1.0).contains(&v_beam) {
        return Err(RadioError::FractionOutOfRange(v_beam));
    }
    Ok(max_beam_gain(azimuth)? * v_beam * s_beam)
}

/// Signal to interference plus noise ratio at base station `b` for the
/// transmission of eVTOL `e`. Interference comes from every other eVTOL
/// concurrently transmitting towards a different station.
pub fn sinr(e: EvtolId, b: BsId, active_links: &[(EvtolId, BsId)], params: &RadioParams) -> f64 {
    let signal = params.tx_power * params.gain_sq(e, b);
    let mut interference = 0.0;
    for &(oe, ob) in active_links {
        if oe != e && ob != b {
            interference += params.tx_power * params.gain_sq(oe, b);
        }
    }
    signal / (interference + params.noise_power)
}

/// Achievable uplink rate in Mbit/s for a link served by `slice`.
///
/// The bandwidth share sets the spectral budget, the beam share the antenna
/// gain, and the inverse squared distance the propagation loss. A slice
/// holding no bandwidth yields rate zero.
pub fn achievable_rate(
    geometry: &LinkGeometry,
    slice: &SliceState,
    pool: &ResourcePool,
    sinr_value: f64,
) -> Result<f64, RadioError> {
    if !(geometry.distance > 0.0) {
        return Err(RadioError::ZeroDistance);
    }
    if !(0.0..=1.0).contains(&slice.v_band) {
        return Err(RadioError::FractionOutOfRange(slice.v_band));
    }
    let (s_band, s_beam, _) = pool.effective();
    let gain = effective_gain(geometry.azimuth, slice.v_beam, s_beam)?;
    let spectral = (1.0 + sinr_value).log2();
    Ok(slice.v_band * s_band * spectral * gain / (geometry.distance * geometry.distance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slices::{initialize_slice, SliceId};
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn slice_with(v_band: f64, v_beam: f64) -> SliceState {
        let s = SliceState::idle(SliceId(0), 2);
        initialize_slice(&s, [v_band, v_beam, 0.3]).unwrap()
    }

    #[test]
    fn unit_azimuth_peak_gain_matches_closed_form() {
        let g = max_beam_gain(1.0).unwrap();
        let expected = 16.0 / (6.76 * (8.0 * std::f64::consts::LN_2 * std::f64::consts::E).sqrt());
        assert!((g - expected).abs() < 1e-15);
        assert!((g - 0.6096).abs() < 1e-4);
    }

    #[test]
    fn nonpositive_angles_are_rejected() {
        assert!(matches!(max_beam_gain(0.0), Err(RadioError::NonPositiveAzimuth(_))));
        assert!(matches!(
            beam_gain(0.0, 0.5, 0.5, 1.0),
            Err(RadioError::NonPositiveBeamwidth(_))
        ));
    }

    #[test]
    fn beam_fraction_outside_unit_interval_is_rejected() {
        assert!(matches!(
            effective_gain(0.5, 1.2, 1.0),
            Err(RadioError::FractionOutOfRange(_))
        ));
        assert!(matches!(
            beam_gain(0.3, 0.2, -0.1, 1.0),
            Err(RadioError::FractionOutOfRange(_))
        ));
    }

    #[test]
    fn width_sweep_peaks_at_the_closed_form_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let azimuth = rng.random_range(0.2..1.5);
            let best_width = azimuth * (8.0 * std::f64::consts::LN_2).sqrt();
            let mut found = f64::NEG_INFINITY;
            let mut at = 0.0;
            let n = 4000;
            for k in 0..=n {
                let width = best_width * (0.2 + 2.8 * k as f64 / n as f64);
                let g = beam_gain(width, azimuth, 1.0, 1.0).unwrap();
                if g > found {
                    found = g;
                    at = width;
                }
            }
            let peak = max_beam_gain(azimuth).unwrap();
            assert!((found - peak).abs() / peak < 1e-5);
            assert!((at - best_width).abs() / best_width < 2e-3);
        }
    }

    #[test]
    fn rate_is_stationary_in_width_at_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let azimuth = rng.random_range(0.2..1.5);
            let d: f64 = rng.random_range(100.0..2000.0);
            let sinr_value: f64 = rng.random_range(0.1..10.0);
            let rate_at = |width: f64| {
                let g = beam_gain(width, azimuth, 0.5, 1.0).unwrap();
                0.5 * 100.0 * (1.0 + sinr_value).log2() * g / (d * d)
            };
            let w = azimuth * (8.0 * std::f64::consts::LN_2).sqrt();
            let h = w * 1e-6;
            let derivative = (rate_at(w + h) - rate_at(w - h)) / (2.0 * h);
            let relative = derivative * w / rate_at(w);
            assert!(relative.abs() < 1e-6, "relative slope {relative}");
        }
    }

    #[test]
    fn lone_link_sinr_is_signal_over_noise() {
        let params = RadioParams::default();
        let links = [(EvtolId(0), BsId(0))];
        let got = sinr(EvtolId(0), BsId(0), &links, &params);
        assert!((got - 0.1 / 1e-9).abs() / got < 1e-12);
    }

    #[test]
    fn symmetric_interferers_see_equal_sinr() {
        let params = RadioParams::default();
        let links = [(EvtolId(0), BsId(0)), (EvtolId(1), BsId(1))];
        let a = sinr(EvtolId(0), BsId(0), &links, &params);
        let b = sinr(EvtolId(1), BsId(1), &links, &params);
        assert_eq!(a, b);
        assert!((a - 0.1 / (0.1 + 1e-9)).abs() < 1e-12);
    }

    #[test]
    fn same_station_transmitters_do_not_interfere() {
        let params = RadioParams::default();
        let links = [(EvtolId(0), BsId(0)), (EvtolId(1), BsId(0))];
        let a = sinr(EvtolId(0), BsId(0), &links, &params);
        assert!((a - 0.1 / 1e-9).abs() / a < 1e-12);
    }

    #[test]
    fn zero_bandwidth_share_gives_zero_rate() {
        let geom = LinkGeometry {
            distance: 300.0,
            azimuth: 0.7,
        };
        let slice = slice_with(0.0, 0.5);
        let rate = achievable_rate(&geom, &slice, &ResourcePool::default(), 5.0).unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn doubling_distance_quarters_the_rate_at_fixed_azimuth() {
        let slice = slice_with(0.4, 0.5);
        let pool = ResourcePool::default();
        let near = LinkGeometry {
            distance: 200.0,
            azimuth: 0.9,
        };
        let far = LinkGeometry {
            distance: 400.0,
            azimuth: 0.9,
        };
        let r1 = achievable_rate(&near, &slice, &pool, 2.0).unwrap();
        let r2 = achievable_rate(&far, &slice, &pool, 2.0).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_distance_is_a_geometry_error() {
        let geom = LinkGeometry {
            distance: 0.0,
            azimuth: 0.5,
        };
        let slice = slice_with(0.4, 0.5);
        assert!(matches!(
            achievable_rate(&geom, &slice, &ResourcePool::default(), 1.0),
            Err(RadioError::ZeroDistance)
        ));
    }

    proptest! {
        #[test]
        fn rate_is_finite_nonnegative_and_monotone_in_shares(
            d in 50.0..5e3f64,
            az in 0.05..1.5f64,
            vb in 0.0..1.0f64,
            vm in 0.0..1.0f64,
            s in 0.0..50.0f64,
        ) {
            let geom = LinkGeometry { distance: d, azimuth: az };
            let pool = ResourcePool::default();
            let lo = slice_with(vb * 0.5, vm);
            let hi = slice_with(vb, vm);
            let r_lo = achievable_rate(&geom, &lo, &pool, s).unwrap();
            let r_hi = achievable_rate(&geom, &hi, &pool, s).unwrap();
            prop_assert!(r_lo.is_finite() && r_lo >= 0.0);
            prop_assert!(r_hi >= r_lo);
        }

        #[test]
        fn more_interference_never_helps(
            extra in 0.0..1.0f64,
        ) {
            let mut params = RadioParams::default();
            params.channel_gain_sq.insert((EvtolId(2), BsId(0)), extra);
            let quiet = [(EvtolId(0), BsId(0))];
            let noisy = [(EvtolId(0), BsId(0)), (EvtolId(2), BsId(1))];
            let a = sinr(EvtolId(0), BsId(0), &quiet, &params);
            let b = sinr(EvtolId(0), BsId(0), &noisy, &params);
            prop_assert!(b <= a);
        }
    }
}
