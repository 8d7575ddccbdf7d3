//! Synthetic planar peg-in-hole environment.
//!
//! The low-level stiffness controller is modelled as a spring between the
//! commanded and the actual peg position, so the normal force is
//! `Ks_z · (x.z − x_c.z)` whenever the rim rests on the surface. The lateral
//! channels carry a smooth, bounded signature of the misalignment.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{PlanarMisalignment, Position3, SimRng, Wrench};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    /// Diagonal stiffness of the low-level controller, N/mm.
    pub stiffness: [f64; 3],
    pub peg_radius: f64,
    /// Radial clearance between peg and hole. Offsets strictly below this enter.
    pub hole_clearance: f64,
    pub surface_z: f64,
    pub hole_center: [f64; 2],
    /// Lateral force gain μ (dimensionless).
    pub friction_gain: f64,
    /// Moment arm c, mm.
    pub moment_gain: f64,
    /// Shape length s of the lateral tanh signature, mm.
    pub lateral_shape: f64,
    /// Std of the additive Gaussian noise (N on forces, N·mm on moments).
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            stiffness: [10.0, 10.0, 10.0],
            peg_radius: 10.0,
            hole_clearance: 0.5,
            surface_z: 0.0,
            hole_center: [0.0, 0.0],
            friction_gain: 0.3,
            moment_gain: 10.0,
            lateral_shape: 1.5,
            noise_sigma: 0.05,
            seed: 0,
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.stiffness.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::Config("stiffness components must be > 0".into()));
        }
        if !(self.hole_clearance > 0.0) {
            return Err(Error::Config("hole_clearance must be > 0".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::Config("noise_sigma must be >= 0".into()));
        }
        if !(self.lateral_shape > 0.0) {
            return Err(Error::Config("lateral_shape must be > 0".into()));
        }
        Ok(())
    }

    pub fn without_noise(&self) -> Self {
        EnvConfig {
            noise_sigma: 0.0,
            ..self.clone()
        }
    }

    /// Lateral offset of a commanded point from the true hole center.
    pub fn offset_of(&self, p: Position3) -> PlanarMisalignment {
        PlanarMisalignment::new(p.x - self.hole_center[0], p.y - self.hole_center[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvState {
    pub peg: Position3,
    pub in_hole: bool,
    /// Penetration of the command below the surface while rim-supported.
    pub contact_depth: f64,
}

impl EnvState {
    pub fn in_contact(&self) -> bool {
        self.contact_depth > 0.0
    }
}

/// Rigid-surface constraint. Offsets at or beyond the clearance are blocked by
/// the rim; the peg then follows the command laterally but cannot go below
/// `surface_z`.
pub fn resolve_position(cfg: &EnvConfig, x_c: Position3) -> EnvState {
    let offset = cfg.offset_of(x_c).magnitude();
    if offset < cfg.hole_clearance {
        EnvState {
            peg: x_c,
            in_hole: x_c.z < cfg.surface_z,
            contact_depth: 0.0,
        }
    } else {
        let z = x_c.z.max(cfg.surface_z);
        EnvState {
            peg: Position3::new(x_c.x, x_c.y, z),
            in_hole: false,
            contact_depth: (cfg.surface_z - x_c.z).max(0.0),
        }
    }
}

/// Noise-free wrench for a resolved state.
pub fn contact_wrench(cfg: &EnvConfig, state: &EnvState, x_c: Position3) -> Wrench {
    let normal = (cfg.stiffness[2] * (state.peg.z - x_c.z)).max(0.0);
    if normal == 0.0 {
        return Wrench::ZERO;
    }
    let d = cfg.offset_of(x_c);
    let tx = (d.dx / cfg.lateral_shape).tanh();
    let ty = (d.dy / cfg.lateral_shape).tanh();
    let mu = cfg.friction_gain;
    let c = cfg.moment_gain;
    Wrench {
        fx: -mu * normal * tx,
        fy: -mu * normal * ty,
        fz: normal,
        mx: c * normal * ty,
        my: -c * normal * tx,
        mz: 0.0,
    }
}

pub fn observe_wrench(
    cfg: &EnvConfig,
    state: &EnvState,
    x_c: Position3,
    rng: &mut SimRng,
) -> Wrench {
    let w = contact_wrench(cfg, state, x_c);
    if cfg.noise_sigma == 0.0 {
        return w;
    }
    let noise = Normal::new(0.0, cfg.noise_sigma).expect("noise_sigma validated finite");
    let mut a = w.to_array();
    for v in a.iter_mut() {
        *v += noise.sample(rng);
    }
    Wrench::from_array(a)
}

/// One tick of the "robot + environment" block.
pub fn step(cfg: &EnvConfig, x_c: Position3, rng: &mut SimRng) -> (EnvState, Wrench) {
    let state = resolve_position(cfg, x_c);
    let w = observe_wrench(cfg, &state, x_c, rng);
    (state, w)
}

/// Places the peg at `misalignment` from the hole center.
pub fn lateral_start(cfg: &EnvConfig, misalignment: PlanarMisalignment) -> (f64, f64) {
    (
        cfg.hole_center[0] + misalignment.dx,
        cfg.hole_center[1] + misalignment.dy,
    )
}

/// Draws a misalignment uniformly on the square band `[-3, 3]²` mm.
pub fn sample_misalignment(rng: &mut SimRng) -> PlanarMisalignment {
    let b = PlanarMisalignment::BAND;
    PlanarMisalignment::new(rng.random_range(-b..=b), rng.random_range(-b..=b))
}
