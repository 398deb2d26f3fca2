//! Layered-corridor airspace: eVTOL kinematics, flight phases and the
//! geometry of eVTOL to base-station links.
//!
//! Airspace is organised as stacked horizontal layers, each with a fixed
//! altitude and a prescribed cruising speed. An eVTOL flies parallel to the
//! y axis while cruising; its x coordinate never changes. Vertical motion
//! only happens while taking off or landing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of an eVTOL.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EvtolId(pub u32);

/// Identifier of a base station.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BsId(pub u32);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AirspaceError {
    #[error("eVTOL targets unknown layer {0}")]
    UnknownLayer(usize),
    #[error("degenerate geometry: eVTOL and base station coincide")]
    CoincidentPositions,
}

/// A point in metres, x across the corridor, y along it, z up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Euclidean distance to another point.
    pub fn distance_to(&self, other: &Vec3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// One cruising layer: its altitude and the speed every occupant holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerConfig {
    pub altitude: f64,
    pub prescribed_speed: f64,
}

/// Where an eVTOL is in its flight cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlightPhase {
    Grounded,
    Takeoff,
    Cruise,
    Landing,
}

/// Full kinematic state of one eVTOL.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvtolState {
    pub id: EvtolId,
    pub position: Vec3,
    /// Velocity along the corridor, metres per second.
    pub v_y: f64,
    /// Vertical velocity, metres per second.
    pub v_z: f64,
    pub phase: FlightPhase,
    /// Index into the layer table this eVTOL cruises in.
    pub target_layer: usize,
}

impl EvtolState {
    /// A grounded eVTOL parked at (x, y, 0).
    pub fn grounded(id: EvtolId, x: f64, y: f64, target_layer: usize) -> Self {
        Self {
            id,
            position: Vec3::new(x, y, 0.0),
            v_y: 0.0,
            v_z: 0.0,
            phase: FlightPhase::Grounded,
            target_layer,
        }
    }

    pub fn is_airborne(&self) -> bool {
        self.phase != FlightPhase::Grounded
    }
}

/// A ground base station. Antennas sit at z = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: BsId,
    pub position: Vec3,
    /// How many eVTOLs the station accepts at once.
    pub max_attachments: usize,
}

impl BaseStation {
    pub fn new(id: BsId, x: f64, y: f64, max_attachments: usize) -> Self {
        Self {
            id,
            position: Vec3::new(x, y, 0.0),
            max_attachments,
        }
    }
}

/// Advances position by one step of length `dt`: x stays frozen, y and z
/// integrate their velocities.
pub fn step_kinematics(e: &EvtolState, dt: f64) -> EvtolState {
    let mut next = e.clone();
    next.position.y += e.v_y * dt;
    next.position.z += e.v_z * dt;
    next
}

/// Applies the flight-phase rules after integration.
///
/// Takeoff climbs at `climb_rate` until the target altitude is reached, then
/// snaps z onto the layer exactly and hands over to cruise at the prescribed
/// speed. Landing descends until the ground, then parks. Cruise holds
/// altitude and speed.
pub fn phase_controller(
    e: &EvtolState,
    layers: &[LayerConfig],
    climb_rate: f64,
) -> Result<EvtolState, AirspaceError> {
    let layer = layers
        .get(e.target_layer)
        .ok_or(AirspaceError::UnknownLayer(e.target_layer))?;
    let mut next = e.clone();
    match e.phase {
        FlightPhase::Grounded => {
            next.position.z = 0.0;
            next.v_y = 0.0;
            next.v_z = 0.0;
        }
        FlightPhase::Takeoff => {
            if e.position.z >= layer.altitude {
                next.position.z = layer.altitude;
                next.v_z = 0.0;
                next.v_y = layer.prescribed_speed;
                next.phase = FlightPhase::Cruise;
            } else {
                next.v_z = climb_rate;
                next.v_y = 0.0;
            }
        }
        FlightPhase::Cruise => {
            next.position.z = layer.altitude;
            next.v_z = 0.0;
            next.v_y = layer.prescribed_speed;
        }
        FlightPhase::Landing => {
            if e.position.z <= 0.0 {
                next.position.z = 0.0;
                next.v_z = 0.0;
                next.v_y = 0.0;
                next.phase = FlightPhase::Grounded;
            } else {
                next.v_z = -climb_rate;
                next.v_y = 0.0;
            }
        }
    }
    Ok(next)
}

/// Euclidean distance between an eVTOL and a base station.
pub fn distance(e: &EvtolState, b: &BaseStation) -> f64 {
    e.position.distance_to(&b.position)
}

/// Angle between the link from `p` down to `q` and the vertical, radians.
///
/// Zero when `p` sits directly above `q`, pi/2 at equal height. The height
/// ratio is clamped so roundoff can never push it outside the domain of
/// acos.
pub fn azimuth_between(p: &Vec3, q: &Vec3) -> Result<f64, AirspaceError> {
    let d = p.distance_to(q);
    if d == 0.0 {
        return Err(AirspaceError::CoincidentPositions);
    }
    let ratio = ((p.z - q.z) / d).clamp(-1.0, 1.0);
    Ok(ratio.acos())
}

/// Angle between an eVTOL to base-station link and the vertical, radians.
pub fn azimuth(e: &EvtolState, b: &BaseStation) -> Result<f64, AirspaceError> {
    azimuth_between(&e.position, &b.position)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn layers() -> Vec<LayerConfig> {
        vec![
            LayerConfig {
                altitude: 100.0,
                prescribed_speed: 30.0,
            },
            LayerConfig {
                altitude: 200.0,
                prescribed_speed: 50.0,
            },
        ]
    }

    #[test]
    fn kinematics_freeze_x_and_integrate_y_z() {
        let mut e = EvtolState::grounded(EvtolId(0), 5.0, 0.0, 0);
        e.v_y = 3.0;
        e.v_z = 2.0;
        let next = step_kinematics(&e, 0.5);
        assert_eq!(next.position.x, 5.0);
        assert_eq!(next.position.y, 1.5);
        assert_eq!(next.position.z, 1.0);
    }

    #[test]
    fn repeated_steps_match_closed_form() {
        let mut e = EvtolState::grounded(EvtolId(0), 0.0, 10.0, 0);
        e.v_y = 30.0;
        let dt = 1.0;
        for _ in 0..500 {
            e = step_kinematics(&e, dt);
        }
        let expected = 10.0 + 30.0 * 500.0;
        assert!((e.position.y - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn takeoff_reaches_layer_and_snaps() {
        let mut e = EvtolState::grounded(EvtolId(1), 0.0, 0.0, 0);
        e.phase = FlightPhase::Takeoff;
        e.position.z = 99.9;
        e.v_z = 10.0;
        let moved = step_kinematics(&e, 1.0);
        let next = phase_controller(&moved, &layers(), 10.0).unwrap();
        assert_eq!(next.phase, FlightPhase::Cruise);
        assert_eq!(next.position.z, 100.0);
        assert_eq!(next.v_z, 0.0);
        assert_eq!(next.v_y, 30.0);
    }

    #[test]
    fn long_climb_step_still_snaps_to_altitude() {
        let mut e = EvtolState::grounded(EvtolId(1), 0.0, 0.0, 0);
        e.phase = FlightPhase::Takeoff;
        e.position.z = 50.0;
        e.v_z = 10.0;
        let moved = step_kinematics(&e, 5.0);
        let next = phase_controller(&moved, &layers(), 10.0).unwrap();
        assert_eq!(next.position.z, 100.0);
        assert_eq!(next.phase, FlightPhase::Cruise);
    }

    #[test]
    fn landing_descends_then_parks() {
        let mut e = EvtolState::grounded(EvtolId(2), 0.0, 0.0, 1);
        e.phase = FlightPhase::Landing;
        e.position.z = 15.0;
        let mut steps = 0;
        while e.phase != FlightPhase::Grounded && steps < 10 {
            e = phase_controller(&e, &layers(), 10.0).unwrap();
            e = step_kinematics(&e, 1.0);
            e = phase_controller(&e, &layers(), 10.0).unwrap();
            steps += 1;
        }
        assert_eq!(e.phase, FlightPhase::Grounded);
        assert_eq!(e.position.z, 0.0);
        assert_eq!(e.v_y, 0.0);
    }

    #[test]
    fn unknown_layer_is_rejected() {
        let mut e = EvtolState::grounded(EvtolId(0), 0.0, 0.0, 7);
        e.phase = FlightPhase::Takeoff;
        let err = phase_controller(&e, &layers(), 10.0).unwrap_err();
        assert_eq!(err, AirspaceError::UnknownLayer(7));
    }

    #[test]
    fn full_cycle_keeps_cruise_inside_its_layer() {
        let mut e = EvtolState::grounded(EvtolId(0), 0.0, 0.0, 0);
        e.phase = FlightPhase::Takeoff;
        for _ in 0..40 {
            e = step_kinematics(&e, 1.0);
            e = phase_controller(&e, &layers(), 10.0).unwrap();
            if e.phase == FlightPhase::Cruise {
                assert_eq!(e.position.z, 100.0);
                assert_eq!(e.v_y, 30.0);
            }
        }
        assert_eq!(e.phase, FlightPhase::Cruise);
    }

    #[test]
    fn distance_matches_pythagoras() {
        let mut e = EvtolState::grounded(EvtolId(0), 3.0, 0.0, 0);
        e.position.z = 4.0;
        let b = BaseStation::new(BsId(0), 0.0, 0.0, 3);
        assert_eq!(distance(&e, &b), 5.0);
    }

    #[test]
    fn azimuth_overhead_is_zero_and_level_is_right_angle() {
        let mut above = EvtolState::grounded(EvtolId(0), 0.0, 0.0, 0);
        above.position.z = 100.0;
        let b = BaseStation::new(BsId(0), 0.0, 0.0, 3);
        assert!(azimuth(&above, &b).unwrap().abs() < 1e-15);

        let mut level = EvtolState::grounded(EvtolId(1), 500.0, 0.0, 0);
        level.position.z = 0.0;
        let phi = azimuth(&level, &b).unwrap();
        assert!((phi - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn coincident_positions_error() {
        let e = EvtolState::grounded(EvtolId(0), 0.0, 0.0, 0);
        let b = BaseStation::new(BsId(0), 0.0, 0.0, 3);
        assert_eq!(azimuth(&e, &b).unwrap_err(), AirspaceError::CoincidentPositions);
    }

    proptest! {
        #[test]
        fn distance_is_symmetric_and_nonnegative(
            ax in -5e3..5e3f64, ay in -5e3..5e3f64, az in 0.0..500.0f64,
            bx in -5e3..5e3f64, by in -5e3..5e3f64,
        ) {
            let a = Vec3::new(ax, ay, az);
            let b = Vec3::new(bx, by, 0.0);
            prop_assert!(a.distance_to(&b) >= 0.0);
            prop_assert_eq!(a.distance_to(&b), b.distance_to(&a));
        }

        #[test]
        fn azimuth_stays_in_range_and_grows_with_horizontal_offset(
            x in 1.0..4e3f64, y in -4e3..4e3f64, z in 1.0..500.0f64,
        ) {
            let b = BaseStation::new(BsId(0), 0.0, 0.0, 3);
            let mut e = EvtolState::grounded(EvtolId(0), x, y, 0);
            e.position.z = z;
            let phi = azimuth(&e, &b).unwrap();
            prop_assert!((0.0..=std::f64::consts::PI).contains(&phi));

            let mut farther = e.clone();
            farther.position.x = x * 2.0;
            let phi2 = azimuth(&farther, &b).unwrap();
            prop_assert!(phi2 >= phi);
        }
    }
}
