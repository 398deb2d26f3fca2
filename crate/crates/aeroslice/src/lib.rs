//! Deterministic, seedable simulator of network-slice resource orchestration
//! for eVTOL traffic in layered low-altitude corridors.
//!
//! The library is organised bottom-up:
//!
//! * [`airspace`]: eVTOL kinematics, flight phases and link geometry
//! * [`slices`]: slice state, the shared resource pool and allocation projection
//! * [`radio`]: directional beam gain, interference and achievable uplink rate
//! * [`workload`]: per-step offloading tasks, delays, satisfaction and costs
//! * [`admission`]: access pairing and resource pre-assessment
//! * [`neuro`]: dense networks, exact gradients, Adam and replay storage
//! * [`marl`]: the slice-orchestration environment and the learners that drive it
//! * [`harness`]: configuration, experiment suites and metric emission
//!
//! Every stochastic component draws from an explicitly seeded generator, so a
//! run is reproducible bit for bit within one build.

pub mod admission;
pub mod airspace;
pub mod harness;
pub mod marl;
pub mod neuro;
pub mod radio;
pub mod slices;
pub mod workload;
