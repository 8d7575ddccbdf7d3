//! Accommodation controllers and closed-loop episode execution.
//!
//! Both laws turn a constant-velocity reference into a commanded trajectory
//! whose contact force stays bounded:
//!
//! * linear: `x_c[k] = x_c[k-1] + Δx_r + e[k]`, with the discounted feedback
//!   sum kept as the recursion `e[k] = γ (e[k-1] + K_a ∘ f[k-1])`;
//! * nonlinear: `x_c[k] = x_c[k-1] + (1 - α[k]) Δx_r`, where
//!   `α = 1 / (1 + exp(-K_a (|f| - f_sat)))`.
//!
//! Wrenches are forces acting on the peg. A rim contact during a downward
//! insertion therefore reads `fz > 0`, and adding `K_a f` to the command
//! retracts it.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contact::{self, EnvConfig, EnvState};
use crate::error::{Error, Result};
use crate::types::{PlanarMisalignment, Position3, SimRng, TrajectorySpec, Wrench};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LinearAccommodationConfig {
    /// Diagonal accommodation gain, mm/N.
    pub ka: [f64; 3],
    /// Discount on the force history, in (0, 1). Works well in (0.3, 0.6).
    pub gamma: f64,
}

impl Default for LinearAccommodationConfig {
    fn default() -> Self {
        LinearAccommodationConfig {
            ka: [0.0025; 3],
            gamma: 0.35,
        }
    }
}

impl LinearAccommodationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Config(format!(
                "gamma must lie in (0, 1), got {}",
                self.gamma
            )));
        }
        if self.ka.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
            return Err(Error::Config("linear Ka components must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinearState {
    /// Running discounted feedback term, mm.
    pub e: [f64; 3],
    pub x_c_prev: Position3,
}

impl LinearState {
    pub fn new(x_c0: Position3) -> Self {
        LinearState {
            e: [0.0; 3],
            x_c_prev: x_c0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NonlinearAccommodationConfig {
    /// Sigmoid steepness along the insertion axis, 1/N.
    pub ka: f64,
    /// Force around which the advance stalls, N.
    pub f_sat: f64,
}

impl Default for NonlinearAccommodationConfig {
    fn default() -> Self {
        NonlinearAccommodationConfig {
            ka: 5.0,
            f_sat: 8.0,
        }
    }
}

impl NonlinearAccommodationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ka > 0.0 && self.ka.is_finite()) {
            return Err(Error::Config("nonlinear Ka must be > 0".into()));
        }
        if !(self.f_sat > 0.0 && self.f_sat.is_finite()) {
            return Err(Error::Config("f_sat must be > 0".into()));
        }
        Ok(())
    }

    /// Fraction of the reference advance kept in free space, `1 - α(0)`.
    pub fn free_space_advance(&self) -> f64 {
        1.0 - sigmoid_alpha(0.0, self.ka, self.f_sat)
    }
}

/// A non-finite force reached a control law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NonFiniteForce;

impl fmt::Display for NonFiniteForce {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("non-finite force")
    }
}

impl std::error::Error for NonFiniteForce {}

/// One step of the linear law on all three axes.
pub fn linear_command(
    cfg: &LinearAccommodationConfig,
    state: &LinearState,
    delta_xr: Position3,
    f_prev: [f64; 3],
) -> Result<(Position3, LinearState), NonFiniteForce> {
    if f_prev.iter().any(|f| !f.is_finite()) {
        return Err(NonFiniteForce);
    }
    let mut e = [0.0; 3];
    for i in 0..3 {
        e[i] = cfg.gamma * (state.e[i] + cfg.ka[i] * f_prev[i]);
    }
    let x_c = state.x_c_prev + delta_xr + Position3::from_array(e);
    Ok((x_c, LinearState { e, x_c_prev: x_c }))
}

/// Force at which the linear law stops advancing the command:
/// `-Δx_r (1 - γ) / (K_a γ)`.
pub fn steady_state_force_linear(delta_xr: f64, ka: f64, gamma: f64) -> f64 {
    -delta_xr * (1.0 - gamma) / (ka * gamma)
}

pub fn sigmoid_alpha(f: f64, ka: f64, f_sat: f64) -> f64 {
    1.0 / (1.0 + (-ka * (f - f_sat)).exp())
}

/// One step of the nonlinear law. Only the insertion axis is attenuated; the
/// lateral increments pass through unchanged.
pub fn nonlinear_command(
    cfg: &NonlinearAccommodationConfig,
    x_c_prev: Position3,
    delta_xr: Position3,
    f: Wrench,
) -> Result<Position3, NonFiniteForce> {
    if !f.fz.is_finite() {
        return Err(NonFiniteForce);
    }
    let alpha = sigmoid_alpha(f.fz.abs(), cfg.ka, cfg.f_sat);
    Ok(Position3::new(
        x_c_prev.x + delta_xr.x,
        x_c_prev.y + delta_xr.y,
        x_c_prev.z + (1.0 - alpha) * delta_xr.z,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Linear,
    Nonlinear,
}

impl ControllerKind {
    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Linear => "linear",
            ControllerKind::Nonlinear => "nonlinear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(ControllerKind::Linear),
            "nonlinear" => Some(ControllerKind::Nonlinear),
            _ => None,
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ControllerConfig {
    Linear(LinearAccommodationConfig),
    Nonlinear(NonlinearAccommodationConfig),
}

impl ControllerConfig {
    pub fn kind(&self) -> ControllerKind {
        match self {
            ControllerConfig::Linear(_) => ControllerKind::Linear,
            ControllerConfig::Nonlinear(_) => ControllerKind::Nonlinear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ControllerConfig::Linear(c) => c.validate(),
            ControllerConfig::Nonlinear(c) => c.validate(),
        }
    }
}

/// Per-episode controller state.
///
/// In closed loop the linear law is driven by the insertion-axis force only:
/// the lateral channels carry the misalignment signature, not a stiffness
/// reaction, and feeding them back would slide the peg.
#[derive(Debug, Clone)]
pub struct Controller {
    cfg: ControllerConfig,
    x_c: Position3,
    linear: LinearState,
}

impl Controller {
    pub fn new(cfg: ControllerConfig, x_c0: Position3) -> Self {
        Controller {
            cfg,
            x_c: x_c0,
            linear: LinearState::new(x_c0),
        }
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.cfg
    }

    pub fn commanded(&self) -> Position3 {
        self.x_c
    }

    pub fn command(&mut self, delta_xr: Position3, f: Wrench) -> Result<Position3, NonFiniteForce> {
        if !f.is_finite() {
            return Err(NonFiniteForce);
        }
        self.x_c = match &self.cfg {
            ControllerConfig::Linear(c) => {
                let (x_c, st) = linear_command(c, &self.linear, delta_xr, [0.0, 0.0, f.fz])?;
                self.linear = st;
                x_c
            }
            ControllerConfig::Nonlinear(c) => nonlinear_command(c, self.x_c, delta_xr, f)?,
        };
        Ok(self.x_c)
    }

    /// Moves the command sideways without touching the feedback state.
    pub fn shift_lateral(&mut self, dx: f64, dy: f64) {
        self.x_c.x += dx;
        self.x_c.y += dy;
        self.linear.x_c_prev = self.x_c;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickRecord {
    pub t: f64,
    pub x_r: Position3,
    pub x_c: Position3,
    pub x: Position3,
    pub wrench: Wrench,
    pub in_hole: bool,
    pub contact_depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMeta {
    pub controller: ControllerConfig,
    pub env_seed: u64,
    pub misalignment: PlanarMisalignment,
    pub dt: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abort: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub meta: EpisodeMeta,
    pub records: Vec<TickRecord>,
}

impl EpisodeLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn fz(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.wrench.fz).collect()
    }

    /// Index of the first tick with the rim loaded.
    pub fn contact_onset(&self) -> Option<usize> {
        self.records.iter().position(|r| r.contact_depth > 0.0)
    }

    pub fn aborted(&self) -> bool {
        self.meta.abort.is_some()
    }

    /// Writes the `t,x,y,z,fx,fy,fz,mx,my,mz` rows (actual peg position).
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(crate::io::SAMPLE_HEADER)?;
        for r in &self.records {
            wr.write_record(crate::io::sample_fields(r.t, r.x, r.wrench))?;
        }
        wr.flush().map_err(|e| Error::io("<episode csv>", e))?;
        Ok(())
    }

    /// Writes `<stem>.csv` and `<stem>.json` (metadata sidecar).
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        let csv_path = dir.join(format!("{stem}.csv"));
        let f = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
        self.write_csv(std::io::BufWriter::new(f))?;
        let meta_path = dir.join(format!("{stem}.json"));
        let json = serde_json::to_string_pretty(&self.meta)?;
        std::fs::write(&meta_path, json).map_err(|e| Error::io(&meta_path, e))?;
        Ok(())
    }
}

/// Closed-loop stepper: command, resolve, observe, log.
pub struct EpisodeRunner<'a> {
    env: &'a EnvConfig,
    controller: Controller,
    delta_xr: Position3,
    x_r: Position3,
    dt: f64,
    last: Wrench,
    last_state: EnvState,
    log: EpisodeLog,
}

impl<'a> EpisodeRunner<'a> {
    /// Starts an episode at `start` and records tick 0.
    pub fn new(
        env: &'a EnvConfig,
        cfg: ControllerConfig,
        start: Position3,
        delta_xr: Position3,
        dt: f64,
        misalignment: PlanarMisalignment,
        rng: &mut SimRng,
    ) -> Self {
        let (state, w) = contact::step(env, start, rng);
        let log = EpisodeLog {
            meta: EpisodeMeta {
                controller: cfg,
                env_seed: env.seed,
                misalignment,
                dt,
                abort: None,
            },
            records: vec![TickRecord {
                t: 0.0,
                x_r: start,
                x_c: start,
                x: state.peg,
                wrench: w,
                in_hole: state.in_hole,
                contact_depth: state.contact_depth,
            }],
        };
        EpisodeRunner {
            env,
            controller: Controller::new(cfg, start),
            delta_xr,
            x_r: start,
            dt,
            last: w,
            last_state: state,
            log,
        }
    }

    pub fn tick(&self) -> usize {
        self.log.records.len() - 1
    }

    pub fn state(&self) -> &EnvState {
        &self.last_state
    }

    pub fn last_wrench(&self) -> Wrench {
        self.last
    }

    pub fn commanded(&self) -> Position3 {
        self.controller.commanded()
    }

    pub fn log(&self) -> &EpisodeLog {
        &self.log
    }

    pub fn step(&mut self, rng: &mut SimRng) -> Result<&TickRecord> {
        if let Some(a) = &self.log.meta.abort {
            return Err(Error::Config(format!("episode already aborted: {a}")));
        }
        let k = self.tick() + 1;
        let x_c = match self.controller.command(self.delta_xr, self.last) {
            Ok(x) => x,
            Err(_) => {
                let err = Error::SensorFault { tick: k };
                self.log.meta.abort = Some(err.to_string());
                return Err(err);
            }
        };
        self.x_r = self.x_r + self.delta_xr;
        let (state, w) = contact::step(self.env, x_c, rng);
        self.last = w;
        self.last_state = state;
        self.log.records.push(TickRecord {
            t: k as f64 * self.dt,
            x_r: self.x_r,
            x_c,
            x: state.peg,
            wrench: w,
            in_hole: state.in_hole,
            contact_depth: state.contact_depth,
        });
        Ok(self.log.records.last().expect("just pushed"))
    }

    /// Sideways move of reference and command.
    pub fn shift_lateral(&mut self, dx: f64, dy: f64) {
        self.controller.shift_lateral(dx, dy);
        self.x_r.x += dx;
        self.x_r.y += dy;
    }

    pub fn into_log(self) -> EpisodeLog {
        self.log
    }
}

/// Runs `traj.num_ticks` closed-loop ticks. The lateral start is placed at
/// `misalignment` from the hole center; `traj.start.z` sets the height.
/// A sensor fault ends the episode early and is recorded in `meta.abort`.
pub fn run_episode(
    controller: &ControllerConfig,
    env: &EnvConfig,
    traj: &TrajectorySpec,
    misalignment: PlanarMisalignment,
    rng: &mut SimRng,
) -> Result<EpisodeLog> {
    controller.validate()?;
    env.validate()?;
    traj.validate()?;
    let (x0, y0) = contact::lateral_start(env, misalignment);
    let start = Position3::new(x0, y0, traj.start.z);
    let mut runner = EpisodeRunner::new(
        env,
        *controller,
        start,
        traj.increment(),
        traj.dt,
        misalignment,
        rng,
    );
    for _ in 0..traj.num_ticks {
        if runner.step(rng).is_err() {
            break;
        }
    }
    Ok(runner.into_log())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::seeded_rng;
    use rand::Rng;

    /// Direct evaluation of Σ_{i<k} γ^{k-i} K_a f[i].
    fn explicit_sum(gamma: f64, ka: f64, history: &[f64]) -> f64 {
        let k = history.len();
        history
            .iter()
            .enumerate()
            .map(|(i, f)| gamma.powi((k - i) as i32) * ka * f)
            .sum()
    }

    #[test]
    fn free_space_linear_follows_reference() {
        let cfg = LinearAccommodationConfig::default();
        let mut st = LinearState::new(Position3::new(1.0, 2.0, 3.0));
        let d = Position3::new(0.0, 0.0, -0.125);
        for k in 1..=20 {
            let (x_c, next) = linear_command(&cfg, &st, d, [0.0; 3]).unwrap();
            assert_eq!(x_c.z, 3.0 - 0.125 * k as f64);
            assert_eq!(next.e, [0.0; 3]);
            st = next;
        }
    }

    #[test]
    fn linear_single_step_example() {
        let cfg = LinearAccommodationConfig {
            ka: [0.1; 3],
            gamma: 0.5,
        };
        let st = LinearState::new(Position3::ZERO);
        let d = Position3::new(0.0, 0.0, -0.1);
        let (x_c, next) = linear_command(&cfg, &st, d, [2.0, 2.0, 2.0]).unwrap();
        let brute = explicit_sum(0.5, 0.1, &[2.0]);
        assert!((next.e[2] - 0.1).abs() < 1e-12);
        assert!((next.e[2] - brute).abs() < 1e-12);
        assert!((x_c.z - (-0.1 + 0.1)).abs() < 1e-12);
    }

    #[test]
    fn linear_rejects_nan_force() {
        let cfg = LinearAccommodationConfig::default();
        let st = LinearState::new(Position3::ZERO);
        assert_eq!(
            linear_command(&cfg, &st, Position3::ZERO, [0.0, f64::NAN, 0.0]),
            Err(NonFiniteForce)
        );
    }

    #[test]
    fn constant_fixed_point_force_stops_advance() {
        let (gamma, ka, dz) = (0.35, 0.01, -0.1);
        let f_star = steady_state_force_linear(dz, ka, gamma);
        let cfg = LinearAccommodationConfig { ka: [ka; 3], gamma };
        let mut st = LinearState::new(Position3::ZERO);
        let d = Position3::new(0.0, 0.0, dz);
        let mut last_inc = f64::INFINITY;
        for _ in 0..200 {
            let prev = st.x_c_prev.z;
            let (x_c, next) = linear_command(&cfg, &st, d, [0.0, 0.0, f_star]).unwrap();
            last_inc = x_c.z - prev;
            st = next;
        }
        assert!(last_inc.abs() < 1e-12, "increment {last_inc}");
    }

    #[test]
    fn steady_state_closed_form() {
        let f = steady_state_force_linear(-0.1, 0.01, 0.35);
        assert!((f - 18.5714285714).abs() < 1e-6);
        assert!((steady_state_force_linear(0.1, 0.01, 0.35) + 18.5714285714).abs() < 1e-6);
        assert_eq!(steady_state_force_linear(0.0, 0.01, 0.35), 0.0);
        let near_one = steady_state_force_linear(-0.1, 0.01, 1.0 - 1e-9);
        assert!(near_one.abs() < 1e-5);
    }

    #[test]
    fn sigmoid_values() {
        let (ka, fsat) = (2.5, 7.0);
        assert!((sigmoid_alpha(fsat, ka, fsat) - 0.5).abs() < 1e-12);
        assert!((sigmoid_alpha(fsat + 3f64.ln() / ka, ka, fsat) - 0.75).abs() < 1e-12);
        assert!((sigmoid_alpha(fsat + 31.0 / ka, ka, fsat) - 1.0).abs() < 1e-12);
        assert!(sigmoid_alpha(1e300, ka, fsat) == 1.0);
        assert!(sigmoid_alpha(-1e300, ka, fsat) == 0.0);
    }

    #[test]
    fn nonlinear_advance_factors() {
        let cfg = NonlinearAccommodationConfig {
            ka: 5.0,
            f_sat: 8.0,
        };
        let d = Position3::new(0.0, 0.0, -0.2);
        let free = nonlinear_command(&cfg, Position3::ZERO, d, Wrench::ZERO).unwrap();
        assert!(free.z / d.z >= 0.999);
        let half = nonlinear_command(
            &cfg,
            Position3::ZERO,
            d,
            Wrench {
                fz: 8.0,
                ..Wrench::ZERO
            },
        )
        .unwrap();
        assert!((half.z - 0.5 * d.z).abs() < 1e-15);
        // α = 0.99 ⇔ f = f_sat + ln(99)/Ka
        let f99 = 8.0 + 99f64.ln() / 5.0;
        let hi = nonlinear_command(
            &cfg,
            Position3::ZERO,
            d,
            Wrench {
                fz: f99,
                ..Wrench::ZERO
            },
        )
        .unwrap();
        assert!((hi.z - 0.01 * d.z).abs() < 1e-12);
        // pushing and pulling contacts are treated alike
        let neg = nonlinear_command(
            &cfg,
            Position3::ZERO,
            d,
            Wrench {
                fz: -8.0,
                ..Wrench::ZERO
            },
        )
        .unwrap();
        assert_eq!(neg, half);
        assert!(nonlinear_command(
            &cfg,
            Position3::ZERO,
            d,
            Wrench {
                fz: f64::INFINITY,
                ..Wrench::ZERO
            }
        )
        .is_err());
    }

    #[test]
    fn free_space_transparency_bound() {
        for (ka, fsat) in [(5.0, 2.0), (1.0, 10.0), (2.0, 6.0)] {
            let cfg = NonlinearAccommodationConfig { ka, f_sat: fsat };
            assert!(ka * fsat >= 10.0);
            assert!(cfg.free_space_advance() >= 0.999);
        }
    }

    #[test]
    fn aligned_episode_enters_hole() {
        let env = EnvConfig::default();
        let traj = TrajectorySpec::downward(Position3::new(0.0, 0.0, 0.5), 0.02, 400);
        for cfg in [
            ControllerConfig::Linear(LinearAccommodationConfig::default()),
            ControllerConfig::Nonlinear(NonlinearAccommodationConfig::default()),
        ] {
            let log = run_episode(
                &cfg,
                &env,
                &traj,
                PlanarMisalignment::default(),
                &mut seeded_rng(4),
            )
            .unwrap();
            let last = log.records.last().unwrap();
            assert!(last.in_hole);
            assert!(log.contact_onset().is_none());
            let lateral_max = log
                .records
                .iter()
                .map(|r| r.wrench.fx.abs().max(r.wrench.fy.abs()))
                .fold(0.0, f64::max);
            assert!(lateral_max < 5.0 * env.noise_sigma);
        }
    }

    #[test]
    fn timestamps_strictly_increase() {
        let env = EnvConfig::default();
        let traj = TrajectorySpec::downward(Position3::new(0.0, 0.0, 0.5), 0.02, 100);
        let cfg = ControllerConfig::Linear(LinearAccommodationConfig::default());
        let log = run_episode(
            &cfg,
            &env,
            &traj,
            PlanarMisalignment::new(2.0, 0.0),
            &mut seeded_rng(1),
        )
        .unwrap();
        assert_eq!(log.len(), 101);
        assert!(log.records.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn episode_csv_has_fixed_columns() {
        let env = EnvConfig::default();
        let traj = TrajectorySpec::downward(Position3::new(0.0, 0.0, 0.1), 0.02, 3);
        let cfg = ControllerConfig::Nonlinear(NonlinearAccommodationConfig::default());
        let log = run_episode(
            &cfg,
            &env,
            &traj,
            PlanarMisalignment::new(1.0, 1.0),
            &mut seeded_rng(1),
        )
        .unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,x,y,z,fx,fy,fz,mx,my,mz");
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn same_seed_same_log() {
        let env = EnvConfig::default();
        let traj = TrajectorySpec::downward(Position3::new(0.0, 0.0, 0.5), 0.02, 300);
        let cfg = ControllerConfig::Linear(LinearAccommodationConfig::default());
        let m = PlanarMisalignment::new(-1.5, 2.2);
        let a = run_episode(&cfg, &env, &traj, m, &mut seeded_rng(11)).unwrap();
        let b = run_episode(&cfg, &env, &traj, m, &mut seeded_rng(11)).unwrap();
        assert_eq!(a, b);
    }

    proptest::proptest! {
        #[test]
        fn recursion_matches_explicit_sum(
            gamma in 0.05f64..0.95, ka in 1e-4f64..0.5,
            forces in proptest::collection::vec(-50.0f64..50.0, 1..200),
        ) {
            let cfg = LinearAccommodationConfig { ka: [ka; 3], gamma };
            let mut st = LinearState::new(Position3::ZERO);
            for k in 0..forces.len() {
                let (_, next) = linear_command(&cfg, &st, Position3::ZERO, [0.0, 0.0, forces[k]]).unwrap();
                st = next;
                let brute = explicit_sum(gamma, ka, &forces[..=k]);
                proptest::prop_assert!((st.e[2] - brute).abs() <= 1e-10 * (1.0 + brute.abs()));
            }
        }

        #[test]
        fn contact_force_stays_bounded(
            gamma in 0.3f64..0.6, ka_lin in 0.001f64..0.01,
            ka_nl in 1.0f64..10.0, f_sat in 2.0f64..10.0, dx in 0.5f64..3.0,
        ) {
            let env = EnvConfig::default().without_noise();
            let traj = TrajectorySpec::downward(Position3::new(0.0, 0.0, 0.5), 0.02, 800);
            let m = PlanarMisalignment::new(dx, 0.0);
            let max_fz = |cfg: ControllerConfig| {
                let log = run_episode(&cfg, &env, &traj, m, &mut seeded_rng(0)).unwrap();
                log.fz().into_iter().fold(0.0_f64, |a, f| a.max(f.abs()))
            };
            let lin = max_fz(ControllerConfig::Linear(LinearAccommodationConfig { ka: [ka_lin; 3], gamma }));
            proptest::prop_assert!(lin <= 1.5 * steady_state_force_linear(-0.02, ka_lin, gamma));
            let nl = max_fz(ControllerConfig::Nonlinear(NonlinearAccommodationConfig { ka: ka_nl, f_sat }));
            proptest::prop_assert!(nl <= f_sat + 10.0 / ka_nl);
        }
    }

    #[test]
    fn random_noise_histories_match_sum_tightly() {
        let mut rng = seeded_rng(99);
        for _ in 0..20 {
            let gamma = rng.random_range(0.3..0.6);
            let ka = rng.random_range(0.001..0.05);
            let fs: Vec<f64> = (0..200).map(|_| rng.random_range(-20.0..20.0)).collect();
            let cfg = LinearAccommodationConfig { ka: [ka; 3], gamma };
            let mut st = LinearState::new(Position3::ZERO);
            for f in &fs {
                st = linear_command(&cfg, &st, Position3::ZERO, [*f; 3])
                    .unwrap()
                    .1;
            }
            assert!((st.e[0] - explicit_sum(gamma, ka, &fs)).abs() < 1e-10);
        }
    }
}
