//! Closed-loop corrective insertion.
//!
//! The peg is sent to a noisy hole estimate and pressed down under an
//! accommodation controller. Whenever the contact force settles, the steady
//! wrench is classified per axis and the command is moved one fixed step
//! toward the predicted hole side, keeping the converged insertion-axis
//! command. The loop ends on insertion, on the correction cap, or when the
//! next step would leave the divergence radius around the initial estimate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contact::EnvConfig;
use crate::control::{ControllerConfig, EpisodeRunner};
use crate::convergence::{detect_online_from, ConvergenceCriterionConfig};
use crate::error::{Error, Result};
use crate::learning::dataset::{mean_wrench, EpisodeConfig};
use crate::learning::{DirectionPrediction, ModelBundle};
use crate::types::{seeded_rng, Axis, PlanarMisalignment, Position3, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyConfig {
    /// Lateral correction per axis, mm.
    pub step_size: f64,
    pub max_corrections: usize,
    /// Radius around the initial estimate the command may not leave, mm.
    pub divergence_limit: f64,
    /// Depth below the surface that counts as inserted, mm.
    pub success_depth: f64,
    /// Minimum |score| of a direction prediction before stepping on that axis.
    pub confidence_gate: f64,
    /// Tick budget for each descend-and-settle segment.
    pub segment_horizon_ticks: usize,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            step_size: 0.5,
            max_corrections: 10,
            divergence_limit: 5.0,
            success_depth: 5.0,
            confidence_gate: 0.1,
            segment_horizon_ticks: 1500,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) {
            return Err(Error::Config("step_size must be > 0".into()));
        }
        if !(self.divergence_limit > self.step_size) {
            return Err(Error::Config(
                "divergence_limit must exceed step_size".into(),
            ));
        }
        if !(self.success_depth > 0.0) || self.segment_horizon_ticks == 0 {
            return Err(Error::Config(
                "success_depth and segment horizon must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Surrogate for a vision-based hole detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleEstimate {
    pub center: [f64; 2],
    /// Per-axis bound on the estimate error, mm.
    pub error_bound: f64,
}

/// `truth + U(-3, 3)` independently per axis.
pub fn simulate_hole_estimate(true_center: [f64; 2], rng: &mut SimRng) -> HoleEstimate {
    let b = PlanarMisalignment::BAND;
    HoleEstimate {
        center: [
            true_center[0] + rng.random_range(-b..=b),
            true_center[1] + rng.random_range(-b..=b),
        ],
        error_bound: b,
    }
}

/// Source of per-axis direction predictions from a steady wrench.
pub trait DirectionPredictor {
    /// Predicted side of the misalignment (sign of `peg − hole`) along `axis`.
    fn predict(&self, axis: Axis, features: &[f64; 6]) -> Result<DirectionPrediction>;
}

impl DirectionPredictor for ModelBundle {
    fn predict(&self, axis: Axis, features: &[f64; 6]) -> Result<DirectionPrediction> {
        self.classifier(axis).predict(features)
    }
}

/// Reads the offset sign straight off the noise-free contact signature
/// (lateral force opposes the offset). Exact when sensor noise is off; a zero
/// lateral force yields score 0, which the gate rejects.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignaturePredictor;

impl DirectionPredictor for SignaturePredictor {
    fn predict(&self, axis: Axis, f: &[f64; 6]) -> Result<DirectionPrediction> {
        let lateral = match axis {
            Axis::X => f[0],
            Axis::Y => f[1],
        };
        let score = if lateral == 0.0 {
            0.0
        } else {
            -lateral.signum()
        };
        Ok(DirectionPrediction {
            sign: if score < 0.0 { -1.0 } else { 1.0 },
            score,
        })
    }
}

/// Always picks the wrong side. Used to exercise the termination paths.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdversarialPredictor;

impl DirectionPredictor for AdversarialPredictor {
    fn predict(&self, axis: Axis, f: &[f64; 6]) -> Result<DirectionPrediction> {
        let p = SignaturePredictor.predict(axis, f)?;
        Ok(DirectionPrediction {
            sign: -p.sign,
            score: if p.score == 0.0 { 1.0 } else { -p.score },
        })
    }
}

/// Everything an insertion attempt needs besides the predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsertionSetup {
    pub env: EnvConfig,
    pub controller: ControllerConfig,
    pub episode: EpisodeConfig,
    pub criterion: ConvergenceCriterionConfig,
    pub policy: PolicyConfig,
}

impl InsertionSetup {
    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.controller.validate()?;
        self.episode.validate()?;
        self.criterion.validate()?;
        self.policy.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Inserted,
    /// The next step would leave the divergence radius.
    Diverged,
    CorrectionCap,
    /// Contact force did not settle within the segment budget.
    NoConvergence,
    Aborted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    pub tick: usize,
    /// Predicted offset sign per axis (x, y).
    pub predicted_sign: [f64; 2],
    pub score: [f64; 2],
    /// Commanded lateral step per axis, mm.
    pub step: [f64; 2],
    /// Steady wrench the decision was based on.
    pub wrench: [f64; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub success: bool,
    pub outcome: TrialOutcome,
    pub corrections_used: usize,
    /// Initial estimate error (estimate − truth), mm.
    pub initial_error: [f64; 2],
    /// Lateral distance of the final command from the true center, mm.
    pub final_offset: f64,
    pub ticks: usize,
    pub corrections: Vec<CorrectionRecord>,
}

pub fn attempt_insertion(
    setup: &InsertionSetup,
    predictor: &dyn DirectionPredictor,
    estimate: &HoleEstimate,
    rng: &mut SimRng,
) -> Result<TrialResult> {
    setup.validate()?;
    let env = &setup.env;
    let pol = &setup.policy;
    let initial_error = [
        estimate.center[0] - env.hole_center[0],
        estimate.center[1] - env.hole_center[1],
    ];
    let start = Position3::new(
        estimate.center[0],
        estimate.center[1],
        env.surface_z + setup.episode.approach_height,
    );
    let mut runner = EpisodeRunner::new(
        env,
        setup.controller,
        start,
        setup.episode.delta_xr(),
        setup.episode.dt,
        PlanarMisalignment::new(initial_error[0], initial_error[1]),
        rng,
    );
    let tpw = setup.criterion.ticks_per_window(setup.episode.dt);
    let mut corrections = Vec::new();
    let mut segment_start = 0usize;
    let mut first_segment = true;

    let finish =
        |runner: &EpisodeRunner, outcome: TrialOutcome, corrections: Vec<CorrectionRecord>| {
            let c = runner.commanded();
            TrialResult {
                success: outcome == TrialOutcome::Inserted,
                outcome,
                corrections_used: corrections.len(),
                initial_error,
                final_offset: (c.x - env.hole_center[0]).hypot(c.y - env.hole_center[1]),
                ticks: runner.tick(),
                corrections,
            }
        };

    loop {
        if runner.step(rng).is_err() {
            return Ok(finish(&runner, TrialOutcome::Aborted, corrections));
        }
        let state = *runner.state();
        if state.in_hole && state.peg.z <= env.surface_z - pol.success_depth {
            return Ok(finish(&runner, TrialOutcome::Inserted, corrections));
        }
        let k = runner.tick();
        if k - segment_start > pol.segment_horizon_ticks {
            return Ok(finish(&runner, TrialOutcome::NoConvergence, corrections));
        }
        if state.in_hole || !(k + 1 - segment_start).is_multiple_of(tpw) {
            continue;
        }
        let anchor = if first_segment {
            match runner.log().records[segment_start..]
                .iter()
                .position(|r| r.contact_depth > 0.0)
            {
                Some(p) => segment_start + p,
                None => continue,
            }
        } else {
            segment_start
        };
        let Some(conv) = detect_online_from(runner.log(), anchor, &setup.criterion) else {
            continue;
        };
        let (s, e) = conv.snapshot_range();
        if e > runner.log().len() {
            continue;
        }
        if corrections.len() >= pol.max_corrections {
            return Ok(finish(&runner, TrialOutcome::CorrectionCap, corrections));
        }
        let snapshot: Vec<_> = runner.log().records[s..e]
            .iter()
            .map(|r| r.wrench)
            .collect();
        let features = mean_wrench(&snapshot).to_array();
        let mut rec = CorrectionRecord {
            tick: k,
            predicted_sign: [0.0; 2],
            score: [0.0; 2],
            step: [0.0; 2],
            wrench: features,
        };
        for (i, axis) in Axis::BOTH.into_iter().enumerate() {
            let p = predictor.predict(axis, &features)?;
            rec.predicted_sign[i] = p.sign;
            rec.score[i] = p.score;
            if p.score.abs() > pol.confidence_gate {
                rec.step[i] = -p.sign * pol.step_size;
            }
        }
        let c = runner.commanded();
        let nx = c.x + rec.step[0] - estimate.center[0];
        let ny = c.y + rec.step[1] - estimate.center[1];
        if nx.hypot(ny) > pol.divergence_limit {
            return Ok(finish(&runner, TrialOutcome::Diverged, corrections));
        }
        runner.shift_lateral(rec.step[0], rec.step[1]);
        corrections.push(rec);
        segment_start = k + 1;
        first_segment = false;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub n_trials: usize,
    pub success_rate: f64,
    /// Mean corrections over successful trials; `None` without successes.
    pub mean_corrections: Option<f64>,
    pub trials: Vec<TrialResult>,
}

impl RunSummary {
    pub fn from_trials(trials: Vec<TrialResult>) -> Self {
        let n = trials.len();
        let ok: Vec<&TrialResult> = trials.iter().filter(|t| t.success).collect();
        let mean_corrections = (!ok.is_empty())
            .then(|| ok.iter().map(|t| t.corrections_used as f64).sum::<f64>() / ok.len() as f64);
        RunSummary {
            n_trials: n,
            success_rate: if n == 0 {
                0.0
            } else {
                ok.len() as f64 / n as f64
            },
            mean_corrections,
            trials,
        }
    }
}

/// Half-width of the square in which the object is placed for each trial, mm.
pub const PLACEMENT_HALF_WIDTH: f64 = 20.0;

/// Independent trials, each with its own seed drawn from `rng`: the object
/// is placed at a random location, a fresh hole estimate is drawn, and one
/// insertion is attempted.
pub fn evaluate_policy(
    setup: &InsertionSetup,
    predictor: &dyn DirectionPredictor,
    n_trials: usize,
    rng: &mut SimRng,
) -> Result<RunSummary> {
    if n_trials == 0 {
        return Err(Error::Config("n_trials must be >= 1".into()));
    }
    let seeds: Vec<u64> = (0..n_trials).map(|_| rng.random()).collect();
    let trials = seeds
        .into_iter()
        .map(|seed| {
            let mut trng = seeded_rng(seed);
            let h = PLACEMENT_HALF_WIDTH;
            let center = [trng.random_range(-h..=h), trng.random_range(-h..=h)];
            let trial_setup = InsertionSetup {
                env: EnvConfig {
                    hole_center: center,
                    seed,
                    ..setup.env.clone()
                },
                ..setup.clone()
            };
            let estimate = simulate_hole_estimate(center, &mut trng);
            attempt_insertion(&trial_setup, predictor, &estimate, &mut trng)
        })
        .collect::<Result<_>>()?;
    Ok(RunSummary::from_trials(trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::LinearAccommodationConfig;

    fn quiet_setup() -> InsertionSetup {
        InsertionSetup {
            env: EnvConfig {
                noise_sigma: 0.0,
                ..EnvConfig::default()
            },
            controller: ControllerConfig::Linear(LinearAccommodationConfig::default()),
            episode: EpisodeConfig::default(),
            criterion: ConvergenceCriterionConfig::default(),
            policy: PolicyConfig::default(),
        }
    }

    /// Pure-geometry replay of the stepping rule under a perfect sign oracle.
    fn oracle_corrections(mut d: [f64; 2], clearance: f64, step: f64) -> usize {
        let mut n = 0;
        while d[0].hypot(d[1]) >= clearance {
            for v in d.iter_mut() {
                if *v != 0.0 {
                    *v -= v.signum() * step;
                }
            }
            n += 1;
        }
        n
    }

    fn at(err: [f64; 2]) -> HoleEstimate {
        HoleEstimate {
            center: err,
            error_bound: 3.0,
        }
    }

    #[test]
    fn estimate_is_deterministic_and_bounded() {
        let a = simulate_hole_estimate([1.0, 2.0], &mut seeded_rng(3));
        let b = simulate_hole_estimate([1.0, 2.0], &mut seeded_rng(3));
        assert_eq!(a, b);
        let mut rng = seeded_rng(4);
        let n = 10_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let e = simulate_hole_estimate([0.0, 0.0], &mut rng);
            assert!(e.center[0].abs() <= 3.0 && e.center[1].abs() <= 3.0);
            sx += e.center[0];
            sy += e.center[1];
        }
        assert!((sx / n as f64).abs() < 0.1 && (sy / n as f64).abs() < 0.1);
    }

    #[test]
    fn exact_estimate_needs_no_correction() {
        let r = attempt_insertion(
            &quiet_setup(),
            &SignaturePredictor,
            &at([0.0, 0.0]),
            &mut seeded_rng(1),
        )
        .unwrap();
        assert!(r.success);
        assert_eq!(r.corrections_used, 0);
    }

    #[test]
    fn perfect_predictor_matches_step_oracle() {
        let setup = quiet_setup();
        let r = attempt_insertion(
            &setup,
            &SignaturePredictor,
            &at([1.2, 0.0]),
            &mut seeded_rng(1),
        )
        .unwrap();
        assert!(r.success);
        assert_eq!(r.corrections_used, oracle_corrections([1.2, 0.0], 0.5, 0.5));
        assert_eq!(r.corrections_used, 2);
        assert!(r.corrections.iter().all(|c| c.step == [-0.5, 0.0]));
        assert!(r.final_offset < 0.5);
    }

    #[test]
    fn adversarial_predictor_terminates() {
        let setup = quiet_setup();
        let r = attempt_insertion(
            &setup,
            &AdversarialPredictor,
            &at([1.0, -1.0]),
            &mut seeded_rng(1),
        )
        .unwrap();
        assert!(!r.success);
        assert!(matches!(
            r.outcome,
            TrialOutcome::Diverged | TrialOutcome::CorrectionCap
        ));
        assert!(r.corrections_used <= setup.policy.max_corrections);
        let bound = (setup.policy.max_corrections + 1) * (setup.policy.segment_horizon_ticks + 1);
        assert!(r.ticks <= bound);
    }

    #[test]
    fn command_stays_inside_divergence_radius() {
        let setup = quiet_setup();
        let est = at([2.0, 2.0]);
        let r = attempt_insertion(&setup, &AdversarialPredictor, &est, &mut seeded_rng(2)).unwrap();
        let (mut x, mut y) = (est.center[0], est.center[1]);
        for c in &r.corrections {
            x += c.step[0];
            y += c.step[1];
            assert!((x - est.center[0]).hypot(y - est.center[1]) <= setup.policy.divergence_limit);
        }
    }

    #[test]
    fn single_axis_oracle_matches_ceiling_formula() {
        for d in [0.3, 0.7, 1.2, 2.05, 2.9] {
            let want = ((d - 0.5_f64).max(0.0) / 0.5).ceil() as usize;
            assert_eq!(oracle_corrections([d, 0.0], 0.5, 0.5), want, "d = {d}");
        }
    }

    #[test]
    fn perfect_predictor_two_axis_counts() {
        let setup = quiet_setup();
        for (i, e) in [[2.3, -1.1], [-0.9, 0.4], [0.2, 2.7]]
            .into_iter()
            .enumerate()
        {
            let r = attempt_insertion(
                &setup,
                &SignaturePredictor,
                &at(e),
                &mut seeded_rng(i as u64),
            )
            .unwrap();
            assert!(r.success, "{e:?}");
            assert_eq!(r.corrections_used, oracle_corrections(e, 0.5, 0.5), "{e:?}");
        }
    }

    #[test]
    fn invalid_policy_is_rejected() {
        let mut s = quiet_setup();
        s.policy.divergence_limit = 0.4;
        assert!(
            attempt_insertion(&s, &SignaturePredictor, &at([0.0, 0.0]), &mut seeded_rng(0))
                .is_err()
        );
    }
}
