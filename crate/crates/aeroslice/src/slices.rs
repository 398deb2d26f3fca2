//! Network-slice state, the shared resource pool and allocation bookkeeping.
//!
//! Every slice holds a fraction of each pooled resource: bandwidth, beam and
//! compute. Fractions across slices must never sum above the available
//! ceiling, which [`project_allocations`] enforces by proportional rescaling.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::airspace::EvtolId;

/// Identifier of a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SliceId(pub u32);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SliceError {
    #[error("slice {0} is not idle")]
    NotIdle(u32),
    #[error("slice {0} still serves {1} live tasks")]
    LiveTasks(u32, usize),
    #[error("resource pool field {0} must be positive, got {1}")]
    NonPositivePool(&'static str, f64),
}

/// Totals of the shared pool. `scale` multiplies all three, so ablations can
/// grow or shrink the whole pool with one knob.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourcePool {
    /// Total bandwidth, MHz.
    pub s_band: f64,
    /// Total beam resource, dimensionless gain budget.
    pub s_beam: f64,
    /// Total compute, GFLOPS.
    pub s_comp: f64,
    pub scale: f64,
}

impl ResourcePool {
    /// Pool totals with the scale folded in, as (band, beam, comp).
    pub fn effective(&self) -> (f64, f64, f64) {
        (
            self.s_band * self.scale,
            self.s_beam * self.scale,
            self.s_comp * self.scale,
        )
    }

    pub fn validate(&self) -> Result<(), SliceError> {
        for (name, v) in [
            ("s_band", self.s_band),
            ("s_beam", self.s_beam),
            ("s_comp", self.s_comp),
            ("scale", self.scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SliceError::NonPositivePool(name, v));
            }
        }
        Ok(())
    }
}

impl Default for ResourcePool {
    fn default() -> Self {
        Self {
            s_band: 100.0,
            s_beam: 1.0,
            s_comp: 100.0,
            scale: 1.0,
        }
    }
}

/// Lifecycle stage of a slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlicePhase {
    Idle,
    Initialization,
    Scaling,
    Disposal,
}

/// One network slice: its held fractions, lifecycle stage and attached users.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceState {
    pub id: SliceId,
    /// Fraction of the bandwidth pool, in [0, 1].
    pub v_band: f64,
    /// Fraction of the beam pool, in [0, 1].
    pub v_beam: f64,
    /// Fraction of the compute pool, in [0, 1].
    pub v_comp: f64,
    pub phase: SlicePhase,
    pub attached: BTreeSet<EvtolId>,
    /// How many eVTOLs the slice serves at once.
    pub max_attachments: usize,
}

impl SliceState {
    /// A fresh slice holding nothing.
    pub fn idle(id: SliceId, max_attachments: usize) -> Self {
        Self {
            id,
            v_band: 0.0,
            v_beam: 0.0,
            v_comp: 0.0,
            phase: SlicePhase::Idle,
            attached: BTreeSet::new(),
            max_attachments,
        }
    }

    pub fn fractions(&self) -> [f64; 3] {
        [self.v_band, self.v_beam, self.v_comp]
    }

    pub fn is_active(&self) -> bool {
        self.phase == SlicePhase::Scaling || self.phase == SlicePhase::Initialization
    }
}

/// Resources a slice actually holds, fraction times scaled pool total,
/// as (MHz, beam budget, GFLOPS).
pub fn absolute_resources(s: &SliceState, pool: &ResourcePool) -> (f64, f64, f64) {
    let (band, beam, comp) = pool.effective();
    (s.v_band * band, s.v_beam * beam, s.v_comp * comp)
}

/// Brings an idle slice up with the given fraction preset, clamped to [0, 1]
/// per component. Feasibility across slices is the caller's projection step.
pub fn initialize_slice(s: &SliceState, preset: [f64; 3]) -> Result<SliceState, SliceError> {
    if s.phase != SlicePhase::Idle {
        return Err(SliceError::NotIdle(s.id.0));
    }
    let mut next = s.clone();
    next.v_band = preset[0].clamp(0.0, 1.0);
    next.v_beam = preset[1].clamp(0.0, 1.0);
    next.v_comp = preset[2].clamp(0.0, 1.0);
    next.phase = SlicePhase::Scaling;
    Ok(next)
}

/// Applies one scaling action to an active slice. Each action component in
/// [-1, 1] moves the matching fraction by `component * step_scale`, clamped
/// to [0, 1]. Out-of-range components are clamped first; the count of such
/// components is returned for diagnostics.
pub fn apply_scaling(s: &mut SliceState, action: [f64; 3], step_scale: f64) -> u32 {
    debug_assert_eq!(s.phase, SlicePhase::Scaling);
    let mut clamped = 0;
    let fractions = [&mut s.v_band, &mut s.v_beam, &mut s.v_comp];
    for (frac, a) in fractions.into_iter().zip(action) {
        if !(-1.0..=1.0).contains(&a) {
            clamped += 1;
        }
        let a = if a.is_nan() { 0.0 } else { a.clamp(-1.0, 1.0) };
        *frac = (*frac + a * step_scale).clamp(0.0, 1.0);
    }
    clamped
}

/// Tears a slice down once its tasks have drained. Releases all fractions
/// and returns the slice to idle.
pub fn dispose_slice(s: &SliceState, live_tasks: usize) -> Result<SliceState, SliceError> {
    if live_tasks > 0 {
        return Err(SliceError::LiveTasks(s.id.0, live_tasks));
    }
    let mut next = s.clone();
    next.v_band = 0.0;
    next.v_beam = 0.0;
    next.v_comp = 0.0;
    next.attached.clear();
    next.phase = SlicePhase::Idle;
    Ok(next)
}

/// Restores feasibility against a ceiling below 1, used when an assessment
/// pass has reserved only part of the pool.
pub fn project_allocations_capped(slices: &mut [SliceState], ceiling: f64) {
    const SLACK: f64 = 1e-12;
    for dim in 0..3 {
        let sum: f64 = slices.iter().map(|s| s.fractions()[dim]).sum();
        if sum > ceiling + SLACK {
            let factor = ceiling / sum;
            for s in slices.iter_mut() {
                match dim {
                    0 => s.v_band *= factor,
                    1 => s.v_beam *= factor,
                    _ => s.v_comp *= factor,
                }
            }
        }
    }
}

/// Rescales each resource dimension proportionally whenever the fractions
/// held across slices sum above 1, and leaves feasible dimensions untouched.
/// Projecting twice gives bitwise the same result as projecting once.
pub fn project_allocations(slices: &mut [SliceState]) {
    project_allocations_capped(slices, 1.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn active(id: u32, v: [f64; 3]) -> SliceState {
        let mut s = SliceState::idle(SliceId(id), 2);
        s = initialize_slice(&s, v).unwrap();
        s
    }

    #[test]
    fn absolute_resources_scale_with_pool() {
        let s = active(0, [0.3, 0.5, 0.2]);
        let pool = ResourcePool::default();
        let (band, beam, comp) = absolute_resources(&s, &pool);
        assert_eq!(band, 30.0);
        assert_eq!(beam, 0.5);
        assert_eq!(comp, 20.0);

        let scaled = ResourcePool { scale: 2.0, ..pool };
        let (band2, _, _) = absolute_resources(&s, &scaled);
        assert_eq!(band2, 60.0);
    }

    #[test]
    fn quarter_of_default_bandwidth_is_25_mhz() {
        let s = active(0, [0.25, 0.0, 0.0]);
        let (band, _, _) = absolute_resources(&s, &ResourcePool::default());
        assert_eq!(band, 25.0);
    }

    #[test]
    fn initialize_requires_idle() {
        let s = active(0, [0.3, 0.3, 0.3]);
        assert_eq!(
            initialize_slice(&s, [0.1, 0.1, 0.1]).unwrap_err(),
            SliceError::NotIdle(0)
        );
    }

    #[test]
    fn initialize_clamps_presets() {
        let s = SliceState::idle(SliceId(1), 2);
        let up = initialize_slice(&s, [1.4, -0.2, 0.5]).unwrap();
        assert_eq!(up.fractions(), [1.0, 0.0, 0.5]);
        assert_eq!(up.phase, SlicePhase::Scaling);
    }

    #[test]
    fn oversubscribed_presets_project_to_the_ceiling() {
        let mut slices = vec![active(0, [0.6; 3]), active(1, [0.7; 3]), active(2, [0.2; 3])];
        project_allocations(&mut slices);
        for dim in 0..3 {
            let sum: f64 = slices.iter().map(|s| s.fractions()[dim]).sum();
            assert!(sum <= 1.0 + 1e-9);
        }
        let ratio = slices[1].v_band / slices[0].v_band;
        assert!((ratio - 0.7 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn feasible_allocations_are_untouched_bitwise() {
        let mut slices = vec![active(0, [0.2, 0.1, 0.05]), active(1, [0.3, 0.2, 0.1])];
        let before = slices.clone();
        project_allocations(&mut slices);
        assert_eq!(slices, before);
    }

    #[test]
    fn scaling_moves_fractions_and_counts_clamps() {
        let mut s = active(0, [0.5, 0.5, 0.5]);
        let clamped = apply_scaling(&mut s, [1.0, -2.0, 0.5], 0.1);
        assert_eq!(clamped, 1);
        assert!((s.v_band - 0.6).abs() < 1e-15);
        assert!((s.v_beam - 0.4).abs() < 1e-15);
        assert!((s.v_comp - 0.55).abs() < 1e-15);
    }

    #[test]
    fn scaling_saturates_at_unit_interval() {
        let mut s = active(0, [0.95, 0.02, 1.0]);
        apply_scaling(&mut s, [1.0, -1.0, 1.0], 0.1);
        assert_eq!(s.v_band, 1.0);
        assert_eq!(s.v_beam, 0.0);
        assert_eq!(s.v_comp, 1.0);
    }

    #[test]
    fn dispose_refuses_live_tasks_then_releases() {
        let s = active(0, [0.4, 0.4, 0.4]);
        assert_eq!(dispose_slice(&s, 3).unwrap_err(), SliceError::LiveTasks(0, 3));
        let down = dispose_slice(&s, 0).unwrap();
        assert_eq!(down.phase, SlicePhase::Idle);
        assert_eq!(down.fractions(), [0.0; 3]);
    }

    #[test]
    fn pool_validation_rejects_nonpositive_totals() {
        let pool = ResourcePool {
            s_band: 0.0,
            ..ResourcePool::default()
        };
        assert!(pool.validate().is_err());
        assert!(ResourcePool::default().validate().is_ok());
    }

    proptest! {
        #[test]
        fn projection_is_idempotent_and_feasible(
            fracs in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 1..6)
        ) {
            let mut slices: Vec<SliceState> = fracs
                .iter()
                .enumerate()
                .map(|(i, &(a, b, c))| active(i as u32, [a, b, c]))
                .collect();
            project_allocations(&mut slices);
            for dim in 0..3 {
                let sum: f64 = slices.iter().map(|s| s.fractions()[dim]).sum();
                prop_assert!(sum <= 1.0 + 1e-9);
            }
            let once = slices.clone();
            project_allocations(&mut slices);
            prop_assert_eq!(once, slices);
        }

        #[test]
        fn projection_preserves_ratios(
            a in 0.1..1.0f64, b in 0.1..1.0f64, c in 0.1..1.0f64,
        ) {
            let mut slices = vec![active(0, [a; 3]), active(1, [b; 3]), active(2, [c; 3])];
            project_allocations(&mut slices);
            let sum = a + b + c;
            if sum > 1.0 {
                prop_assert!((slices[0].v_band / slices[1].v_band - a / b).abs() < 1e-9);
                prop_assert!((slices[2].v_comp / slices[1].v_comp - c / b).abs() < 1e-9);
            }
        }
    }
}
