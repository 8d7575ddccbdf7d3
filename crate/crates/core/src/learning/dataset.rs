//! Force-signature dataset collection under the accommodation controllers.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contact::{self, EnvConfig};
use crate::control::{ControllerConfig, ControllerKind, EpisodeLog, EpisodeRunner};
use crate::convergence::{detect_online, ConvergenceCriterionConfig, OnlineConvergence};
use crate::error::{Error, Result};
use crate::types::{seeded_rng, PlanarMisalignment, Position3, SimRng, Wrench, DEFAULT_DT};

/// Straight-down probing motion used for every data-collection episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    /// Reference advance per tick, mm.
    pub speed: f64,
    /// Start height above the surface, mm.
    pub approach_height: f64,
    pub horizon_ticks: usize,
    pub dt: f64,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        EpisodeConfig {
            speed: 0.02,
            approach_height: 0.5,
            horizon_ticks: 1500,
            dt: DEFAULT_DT,
        }
    }
}

impl EpisodeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.speed > 0.0) || !(self.dt > 0.0) || self.horizon_ticks == 0 {
            return Err(Error::Config(
                "episode speed, dt and horizon must be positive".into(),
            ));
        }
        if !(self.approach_height >= 0.0) {
            return Err(Error::Config("approach_height must be >= 0".into()));
        }
        Ok(())
    }

    pub fn delta_xr(&self) -> Position3 {
        Position3::new(0.0, 0.0, -self.speed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub misalignment: PlanarMisalignment,
    /// Quasi-steady wrench `[fx, fy, fz, mx, my, mz]`.
    pub features: [f64; 6],
    pub controller: ControllerKind,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub records: Vec<DatasetRecord>,
}

pub const DATASET_HEADER: [&str; 10] = [
    "dx",
    "dy",
    "fx",
    "fy",
    "fz",
    "mx",
    "my",
    "mz",
    "controller",
    "seed",
];

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn for_controller(&self, kind: ControllerKind) -> Dataset {
        Dataset {
            records: self
                .records
                .iter()
                .filter(|r| r.controller == kind)
                .copied()
                .collect(),
        }
    }

    pub fn controllers(&self) -> Vec<ControllerKind> {
        let mut v: Vec<ControllerKind> = Vec::new();
        for r in &self.records {
            if !v.contains(&r.controller) {
                v.push(r.controller);
            }
        }
        v
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(DATASET_HEADER)?;
        for r in &self.records {
            let f = r.features;
            wr.write_record([
                r.misalignment.dx.to_string(),
                r.misalignment.dy.to_string(),
                f[0].to_string(),
                f[1].to_string(),
                f[2].to_string(),
                f[3].to_string(),
                f[4].to_string(),
                f[5].to_string(),
                r.controller.name().to_string(),
                r.seed.to_string(),
            ])?;
        }
        wr.flush().map_err(|e| Error::io("<dataset csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
        if header != DATASET_HEADER {
            return Err(Error::InsufficientData(format!(
                "unexpected dataset header {header:?}"
            )));
        }
        let bad = |s: &str| Error::InsufficientData(format!("bad dataset field {s:?}"));
        let mut records = Vec::new();
        for row in rd.records() {
            let row = row?;
            let num = |i: usize| -> Result<f64> { row[i].parse().map_err(|_| bad(&row[i])) };
            let features = [num(2)?, num(3)?, num(4)?, num(5)?, num(6)?, num(7)?];
            records.push(DatasetRecord {
                misalignment: PlanarMisalignment::new(num(0)?, num(1)?),
                features,
                controller: ControllerKind::parse(&row[8]).ok_or_else(|| bad(&row[8]))?,
                seed: row[9].parse().map_err(|_| bad(&row[9]))?,
            });
        }
        Ok(Dataset { records })
    }
}

/// Outcome of one probing episode.
#[derive(Debug, Clone)]
pub struct ProbeResult {
    pub log: EpisodeLog,
    pub convergence: Option<OnlineConvergence>,
    /// Mean wrench over the first post-convergence window.
    pub snapshot: Option<Wrench>,
}

/// Descends at a fixed lateral offset until the online criterion fires and
/// one more window has been observed, or the horizon runs out.
pub fn probe(
    env: &EnvConfig,
    controller: &ControllerConfig,
    episode: &EpisodeConfig,
    criterion: &ConvergenceCriterionConfig,
    misalignment: PlanarMisalignment,
    horizon_ticks: usize,
    rng: &mut SimRng,
) -> Result<ProbeResult> {
    let (x0, y0) = contact::lateral_start(env, misalignment);
    let start = Position3::new(x0, y0, env.surface_z + episode.approach_height);
    let mut runner = EpisodeRunner::new(
        env,
        *controller,
        start,
        episode.delta_xr(),
        episode.dt,
        misalignment,
        rng,
    );
    let tpw = criterion.ticks_per_window(episode.dt);
    let mut next_check = tpw;
    while runner.tick() < horizon_ticks {
        runner.step(rng)?;
        // Re-evaluate at window boundaries only.
        if runner.tick() + 1 < next_check {
            continue;
        }
        next_check += tpw;
        let log = runner.log();
        if let Some(c) = detect_online(log, criterion) {
            let (s, e) = c.snapshot_range();
            if e <= log.len() {
                let snapshot = mean_wrench(
                    &log.records[s..e]
                        .iter()
                        .map(|r| r.wrench)
                        .collect::<Vec<_>>(),
                );
                return Ok(ProbeResult {
                    log: runner.into_log(),
                    convergence: Some(c),
                    snapshot: Some(snapshot),
                });
            }
        }
    }
    let log = runner.into_log();
    let convergence = detect_online(&log, criterion);
    Ok(ProbeResult {
        log,
        convergence,
        snapshot: None,
    })
}

pub fn mean_wrench(ws: &[Wrench]) -> Wrench {
    let n = ws.len() as f64;
    let mut acc = [0.0; 6];
    for w in ws {
        for (a, v) in acc.iter_mut().zip(w.to_array()) {
            *a += v;
        }
    }
    Wrench::from_array(acc.map(|a| a / n))
}

/// Runs `n` probing episodes with misalignments drawn uniformly on
/// `[-3, 3]²` mm. Every episode owns a seed drawn from `rng`; the
/// misalignment and the sensor noise both come from that seed. An episode
/// that does not converge is retried once with twice the horizon.
pub fn collect_dataset(
    env: &EnvConfig,
    controller: &ControllerConfig,
    episode: &EpisodeConfig,
    criterion: &ConvergenceCriterionConfig,
    n: usize,
    rng: &mut SimRng,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Config("collect_dataset needs n >= 1".into()));
    }
    env.validate()?;
    controller.validate()?;
    episode.validate()?;
    criterion.validate()?;
    let seeds: Vec<u64> = (0..n).map(|_| rng.random()).collect();
    let records = seeds
        .into_iter()
        .map(|seed| collect_one(env, controller, episode, criterion, seed, None))
        .collect::<Result<_>>()?;
    Ok(Dataset { records })
}

/// One record from an episode seed; `forced` overrides the sampled offset.
pub fn collect_one(
    env: &EnvConfig,
    controller: &ControllerConfig,
    episode: &EpisodeConfig,
    criterion: &ConvergenceCriterionConfig,
    seed: u64,
    forced: Option<PlanarMisalignment>,
) -> Result<DatasetRecord> {
    let env = EnvConfig {
        seed,
        ..env.clone()
    };
    for horizon in [episode.horizon_ticks, 2 * episode.horizon_ticks] {
        let mut erng = seeded_rng(seed);
        let sampled = contact::sample_misalignment(&mut erng);
        let m = forced.unwrap_or(sampled);
        let res = probe(&env, controller, episode, criterion, m, horizon, &mut erng)?;
        if let Some(w) = res.snapshot {
            return Ok(DatasetRecord {
                misalignment: m,
                features: w.to_array(),
                controller: controller.kind(),
                seed,
            });
        }
    }
    Err(Error::NonConvergence { seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{LinearAccommodationConfig, NonlinearAccommodationConfig};
    use crate::types::seeded_rng;

    fn lin() -> ControllerConfig {
        ControllerConfig::Linear(LinearAccommodationConfig::default())
    }

    #[test]
    fn centered_probe_has_no_lateral_signature() {
        let env = EnvConfig::default();
        let rec = collect_one(
            &env,
            &lin(),
            &EpisodeConfig::default(),
            &ConvergenceCriterionConfig::default(),
            42,
            Some(PlanarMisalignment::new(0.0, 0.0)),
        )
        .unwrap();
        // window-mean of noise: 3σ is a loose bound
        for i in [0, 1, 3, 4] {
            assert!(
                rec.features[i].abs() <= 3.0 * env.noise_sigma,
                "{:?}",
                rec.features
            );
        }
    }

    #[test]
    fn blocked_probe_snapshots_after_convergence() {
        let env = EnvConfig::default();
        let res = probe(
            &env,
            &lin(),
            &EpisodeConfig::default(),
            &ConvergenceCriterionConfig::default(),
            PlanarMisalignment::new(2.0, -1.0),
            1500,
            &mut seeded_rng(1),
        )
        .unwrap();
        let c = res.convergence.unwrap();
        assert!(c.start_tick > 0);
        let w = res.snapshot.unwrap();
        assert!(w.fz > 10.0);
        assert!(w.fx < 0.0 && w.fy > 0.0);
        assert!(res.log.len() >= c.snapshot_range().1);
    }

    #[test]
    fn collection_is_deterministic() {
        let env = EnvConfig::default();
        let ctl = ControllerConfig::Nonlinear(NonlinearAccommodationConfig::default());
        let ep = EpisodeConfig::default();
        let cr = ConvergenceCriterionConfig::default();
        let a = collect_dataset(&env, &ctl, &ep, &cr, 10, &mut seeded_rng(5)).unwrap();
        let b = collect_dataset(&env, &ctl, &ep, &cr, 10, &mut seeded_rng(5)).unwrap();
        assert_eq!(a, b);
        let (mut ba, mut bb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ba).unwrap();
        b.write_csv(&mut bb).unwrap();
        assert_eq!(ba, bb);
        let back = Dataset::read_csv(ba.as_slice()).unwrap();
        assert_eq!(back, a);
        for r in &a.records {
            assert!(r.misalignment.dx.abs() <= 3.0 && r.misalignment.dy.abs() <= 3.0);
        }
    }

    #[test]
    fn hopeless_horizon_names_the_seed() {
        let env = EnvConfig::default();
        let ep = EpisodeConfig {
            horizon_ticks: 60,
            ..Default::default()
        };
        let err = collect_one(
            &env,
            &lin(),
            &ep,
            &ConvergenceCriterionConfig::default(),
            77,
            Some(PlanarMisalignment::new(2.0, 2.0)),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonConvergence { seed: 77 }));
    }
}
