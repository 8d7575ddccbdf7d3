//! Shared geometric and signal types, the reference trajectory generator and
//! the seeded random stream used by every simulation.
//!
//! Units are fixed throughout the crate: millimeters for positions, newtons for
//! forces, newton-millimeters for moments and seconds for time.

use std::ops::{Add, Mul, Sub};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default control tick (50 Hz), so one-second analysis windows hold 50 ticks.
pub const DEFAULT_DT: f64 = 0.02;

/// Deterministic random stream used everywhere in the crate.
///
/// ChaCha8 has a fixed, documented output for a given seed on every platform,
/// so seeded experiments are reproducible bit-for-bit.
pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Point in the task frame. `z` is the insertion axis, positive up.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const ZERO: Position3 = Position3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Position3 { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Position3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Position3 {
    type Output = Position3;
    fn add(self, rhs: Position3) -> Position3 {
        Position3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Position3 {
    type Output = Position3;
    fn sub(self, rhs: Position3) -> Position3 {
        Position3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Position3 {
    type Output = Position3;
    fn mul(self, k: f64) -> Position3 {
        Position3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Force/torque reading. Forces in N, moments in N·mm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Wrench {
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
    pub mx: f64,
    pub my: f64,
    pub mz: f64,
}

impl Wrench {
    pub const ZERO: Wrench = Wrench {
        fx: 0.0,
        fy: 0.0,
        fz: 0.0,
        mx: 0.0,
        my: 0.0,
        mz: 0.0,
    };

    pub fn from_array(a: [f64; 6]) -> Self {
        Wrench {
            fx: a[0],
            fy: a[1],
            fz: a[2],
            mx: a[3],
            my: a[4],
            mz: a[5],
        }
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.fx, self.fy, self.fz, self.mx, self.my, self.mz]
    }

    pub fn force(self) -> [f64; 3] {
        [self.fx, self.fy, self.fz]
    }

    /// Euclidean norm of the force triple; moments are excluded.
    pub fn norm(self) -> f64 {
        (self.fx * self.fx + self.fy * self.fy + self.fz * self.fz).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Planar offset of the peg axis from the true hole center, in mm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarMisalignment {
    pub dx: f64,
    pub dy: f64,
}

impl PlanarMisalignment {
    /// Half-width of the training misalignment band.
    pub const BAND: f64 = 3.0;

    pub const fn new(dx: f64, dy: f64) -> Self {
        PlanarMisalignment { dx, dy }
    }

    pub fn magnitude(self) -> f64 {
        self.dx.hypot(self.dy)
    }

    /// Value along one lateral axis.
    pub fn along(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
        }
    }
}

/// Lateral axis selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

/// Straight-line reference trajectory advancing by a constant increment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub start: Position3,
    /// Unit direction of travel.
    pub direction: [f64; 3],
    /// Advance per tick, mm.
    pub speed: f64,
    pub num_ticks: usize,
    /// Seconds per tick.
    pub dt: f64,
}

impl TrajectorySpec {
    /// Straight-down insertion from `start` along −z.
    pub fn downward(start: Position3, speed: f64, num_ticks: usize) -> Self {
        TrajectorySpec {
            start,
            direction: [0.0, 0.0, -1.0],
            speed,
            num_ticks,
            dt: DEFAULT_DT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = Position3::from_array(self.direction).norm();
        if !((n - 1.0).abs() <= 1e-9) {
            return Err(Error::InvalidSpec(format!(
                "direction must be a unit vector (norm {n})"
            )));
        }
        if !(self.speed > 0.0 && self.speed.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "speed must be positive (got {})",
                self.speed
            )));
        }
        if self.num_ticks == 0 {
            return Err(Error::InvalidSpec("num_ticks must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "dt must be positive (got {})",
                self.dt
            )));
        }
        if !self.start.is_finite() {
            return Err(Error::InvalidSpec("start must be finite".into()));
        }
        Ok(())
    }

    /// Per-tick reference increment Δx_r, snapped to [`Self::grid`].
    pub fn increment(&self) -> Position3 {
        snap(
            Position3::from_array(self.direction) * self.speed,
            self.grid(),
        )
    }

    /// Power-of-two spacing at which every point of the trajectory is exactly
    /// representable: the ulp of (twice) the largest coordinate reached.
    pub fn grid(&self) -> f64 {
        let raw = Position3::from_array(self.direction) * self.speed;
        let end = self.start + raw * self.num_ticks as f64;
        let m = self
            .start
            .to_array()
            .into_iter()
            .chain(end.to_array())
            .fold(1.0_f64, |m, v| m.max(v.abs()));
        2f64.powi(m.log2().ceil() as i32 + 1 - 52)
    }
}

fn snap(p: Position3, grid: f64) -> Position3 {
    let q = |v: f64| (v / grid).round() * grid;
    Position3::new(q(p.x), q(p.y), q(p.z))
}

/// Emits `num_ticks + 1` positions, starting at `spec.start`.
///
/// The start and the increment are snapped to [`TrajectorySpec::grid`], which
/// moves them by at most half an ulp of the largest coordinate. Every partial
/// sum then stays on the grid and is exact, so all first differences equal
/// the increment bit-for-bit.
pub fn make_constant_velocity_trajectory(spec: &TrajectorySpec) -> Result<Vec<Position3>> {
    spec.validate()?;
    let grid = spec.grid();
    let step = spec.increment();
    let mut out = Vec::with_capacity(spec.num_ticks + 1);
    let mut p = snap(spec.start, grid);
    out.push(p);
    for _ in 0..spec.num_ticks {
        p = p + step;
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn trajectory_reaches_expected_endpoint() {
        let spec = TrajectorySpec {
            start: Position3::new(0.0, 0.0, 50.0),
            direction: [0.0, 0.0, -1.0],
            speed: 0.1,
            num_ticks: 10,
            dt: DEFAULT_DT,
        };
        let pts = make_constant_velocity_trajectory(&spec).unwrap();
        assert_eq!(pts.len(), 11);
        let last = pts[10];
        assert!((last.z - 49.0).abs() < 1e-12);
        assert_eq!(last.x, 0.0);
        assert_eq!(last.y, 0.0);
    }

    #[test]
    fn zero_speed_is_rejected() {
        let spec = TrajectorySpec::downward(Position3::ZERO, 0.0, 10);
        assert!(matches!(
            make_constant_velocity_trajectory(&spec),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn non_unit_direction_is_rejected() {
        let mut spec = TrajectorySpec::downward(Position3::ZERO, 0.1, 10);
        spec.direction = [0.0, 0.0, -1.0 - 1e-6];
        assert!(make_constant_velocity_trajectory(&spec).is_err());
        spec.direction = [0.0, 0.0, -1.0 - 1e-12];
        assert!(make_constant_velocity_trajectory(&spec).is_ok());
    }

    #[test]
    fn seeded_streams_are_reproducible() {
        let a: Vec<u64> = (0..100)
            .map({
                let mut r = seeded_rng(7);
                move |_| r.random()
            })
            .collect();
        let b: Vec<u64> = (0..100)
            .map({
                let mut r = seeded_rng(7);
                move |_| r.random()
            })
            .collect();
        let c: Vec<u64> = (0..100)
            .map({
                let mut r = seeded_rng(8);
                move |_| r.random()
            })
            .collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_band_mean_is_centered() {
        // 3σ bound on the sample mean of U(-3,3): σ = sqrt(3)/sqrt(n).
        let n = 100_000;
        let mut r = seeded_rng(7);
        let mean: f64 = (0..n).map(|_| r.random_range(-3.0..3.0)).sum::<f64>() / n as f64;
        let bound = 3.0 * 3f64.sqrt() / (n as f64).sqrt();
        assert!(bound < 0.05);
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    proptest::proptest! {
        #[test]
        fn first_differences_are_bit_identical(
            x in -500.0f64..500.0, y in -500.0f64..500.0, z in -500.0f64..500.0,
            theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..std::f64::consts::TAU,
            speed in 1e-4f64..2.0, ticks in 1usize..400,
        ) {
            let dir = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let spec = TrajectorySpec {
                start: Position3::new(x, y, z),
                direction: dir,
                speed,
                num_ticks: ticks,
                dt: DEFAULT_DT,
            };
            let pts = make_constant_velocity_trajectory(&spec).unwrap();
            let step = spec.increment();
            proptest::prop_assert_eq!(pts.len(), ticks + 1);
            for w in pts.windows(2) {
                let d = w[1] - w[0];
                proptest::prop_assert_eq!(d, step);
            }
            proptest::prop_assert!((step - Position3::from_array(dir) * speed).norm() <= spec.grid());
        }
    }

    #[test]
    fn wrench_norm_ignores_moments() {
        let w = Wrench::from_array([3.0, 4.0, 0.0, 100.0, 100.0, 100.0]);
        assert_eq!(w.norm(), 5.0);
    }
}
