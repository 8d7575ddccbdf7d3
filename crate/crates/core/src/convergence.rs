//! Windowed force statistics and the consecutive-window convergence rule.
//!
//! A statistic `X` passes window `k` when `|X_k − X_{k−1}| < η_th`. The system
//! is declared converged at the first window where every statistic has passed
//! for `consecutive_required` windows in a row.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::control::EpisodeLog;
use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceCriterionConfig {
    pub eta_th: f64,
    pub consecutive_required: usize,
    /// Window length in seconds.
    pub window_len: f64,
}

impl Default for ConvergenceCriterionConfig {
    fn default() -> Self {
        ConvergenceCriterionConfig {
            eta_th: 0.1,
            consecutive_required: 2,
            window_len: 1.0,
        }
    }
}

impl ConvergenceCriterionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_th > 0.0) {
            return Err(Error::Config("eta_th must be > 0".into()));
        }
        if self.consecutive_required == 0 {
            return Err(Error::Config("consecutive_required must be >= 1".into()));
        }
        if !(self.window_len > 0.0) {
            return Err(Error::Config("window_len must be > 0".into()));
        }
        Ok(())
    }

    pub fn ticks_per_window(&self, dt: f64) -> usize {
        ((self.window_len / dt).round() as usize).max(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub window_index: usize,
    pub mean_fz: f64,
    /// Twice the sample standard deviation (ddof = 1).
    pub two_sigma_fz: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Tiles `series` into non-overlapping windows of `ticks` samples; the
/// trailing partial window is dropped.
pub fn window_statistics_of(series: &[f64], ticks: usize) -> Result<Vec<WindowStats>> {
    if ticks < 2 {
        return Err(Error::Config("windows need at least 2 samples".into()));
    }
    let n = series.len() / ticks;
    if n == 0 {
        return Err(Error::InsufficientData(format!(
            "{} samples do not fill one {ticks}-sample window",
            series.len()
        )));
    }
    Ok(series
        .chunks_exact(ticks)
        .enumerate()
        .map(|(i, w)| {
            let (m, s) = mean_std(w);
            WindowStats {
                window_index: i,
                mean_fz: m,
                two_sigma_fz: 2.0 * s,
            }
        })
        .collect())
}

/// Per-window statistics of the `fz` channel, windows starting at tick 0.
pub fn window_statistics(log: &EpisodeLog, window_len: f64) -> Result<Vec<WindowStats>> {
    let ticks = ((window_len / log.meta.dt).round() as usize).max(2);
    window_statistics_of(&log.fz(), ticks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleWindow {
    pub window_index: usize,
    /// Mean over episodes of the window means.
    pub mean_fz: f64,
    /// Sample std (ddof = 1) of the window means across episodes.
    pub std_of_means: f64,
    /// 95% CI half-width of `mean_fz`, `1.96 · std / √n`.
    pub ci_half_width: f64,
    /// E[σ(F_z)]: mean over episodes of the window standard deviations.
    pub mean_sigma: f64,
    /// σ(σ(F_z)): std (ddof = 1) of the window standard deviations.
    pub std_sigma: f64,
}

impl EnsembleWindow {
    /// The four statistics fed to the detector in ensemble mode.
    pub fn criterion_stats(&self) -> [f64; 4] {
        [
            self.mean_fz,
            self.ci_half_width,
            2.0 * self.mean_sigma,
            2.0 * self.std_sigma,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n_episodes: usize,
    pub windows: Vec<EnsembleWindow>,
}

impl EnsembleStats {
    /// Statistic sequences in detector layout: one `Vec` per statistic.
    pub fn criterion_series(&self) -> Vec<Vec<f64>> {
        (0..4)
            .map(|i| {
                self.windows
                    .iter()
                    .map(|w| w.criterion_stats()[i])
                    .collect()
            })
            .collect()
    }
}

/// Aggregates per-episode window statistics. Series are truncated to the
/// shortest one.
pub fn ensemble_of(per_episode: &[Vec<WindowStats>]) -> Result<EnsembleStats> {
    if per_episode.len() < 2 {
        return Err(Error::InsufficientData(
            "ensemble statistics need at least 2 episodes".into(),
        ));
    }
    let n_windows = per_episode.iter().map(Vec::len).min().unwrap_or(0);
    let n = per_episode.len();
    let windows = (0..n_windows)
        .map(|k| {
            let means: Vec<f64> = per_episode.iter().map(|s| s[k].mean_fz).collect();
            let sigmas: Vec<f64> = per_episode
                .iter()
                .map(|s| s[k].two_sigma_fz / 2.0)
                .collect();
            let (m, sm) = mean_std(&means);
            let (ms, ss) = mean_std(&sigmas);
            EnsembleWindow {
                window_index: k,
                mean_fz: m,
                std_of_means: sm,
                ci_half_width: Z_95 * sm / (n as f64).sqrt(),
                mean_sigma: ms,
                std_sigma: ss,
            }
        })
        .collect();
    Ok(EnsembleStats {
        n_episodes: n,
        windows,
    })
}

pub fn ensemble_statistics(logs: &[EpisodeLog], window_len: f64) -> Result<EnsembleStats> {
    if logs.len() < 2 {
        return Err(Error::InsufficientData(
            "ensemble statistics need at least 2 episodes".into(),
        ));
    }
    let per: Vec<Vec<WindowStats>> = logs
        .iter()
        .map(|l| window_statistics(l, window_len))
        .collect::<Result<_>>()?;
    ensemble_of(&per)
}

/// First window index at which all statistics have stayed within `eta_th`
/// of their previous window for `consecutive_required` windows in a row.
/// Returns `None` with fewer than three windows or if never satisfied.
pub fn detect_convergence(stats: &[Vec<f64>], cfg: &ConvergenceCriterionConfig) -> Option<usize> {
    if stats.is_empty() {
        return None;
    }
    let n = stats.iter().map(Vec::len).min().unwrap_or(0);
    if n < 3 {
        return None;
    }
    let mut run = 0;
    for k in 1..n {
        let pass = stats.iter().all(|s| (s[k] - s[k - 1]).abs() < cfg.eta_th);
        run = if pass { run + 1 } else { 0 };
        if run >= cfg.consecutive_required {
            return Some(k);
        }
    }
    None
}

/// Single-episode statistic set: window mean and window 2σ.
pub fn online_series(windows: &[WindowStats]) -> Vec<Vec<f64>> {
    vec![
        windows.iter().map(|w| w.mean_fz).collect(),
        windows.iter().map(|w| w.two_sigma_fz).collect(),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineConvergence {
    /// Window index (relative to `start_tick`) at which convergence was declared.
    pub window: usize,
    /// First tick of window 0.
    pub start_tick: usize,
    pub ticks_per_window: usize,
}

impl OnlineConvergence {
    /// Tick range `[start, end)` of the first window after convergence.
    pub fn snapshot_range(&self) -> (usize, usize) {
        let s = self.start_tick + (self.window + 1) * self.ticks_per_window;
        (s, s + self.ticks_per_window)
    }

    /// Seconds from window 0 to the end of the convergence window.
    pub fn time_s(&self, dt: f64) -> f64 {
        ((self.window + 1) * self.ticks_per_window) as f64 * dt
    }
}

/// Online detection on one log, with windows starting at `start_tick`.
pub fn detect_online_from(
    log: &EpisodeLog,
    start_tick: usize,
    cfg: &ConvergenceCriterionConfig,
) -> Option<OnlineConvergence> {
    let ticks = cfg.ticks_per_window(log.meta.dt);
    let fz: Vec<f64> = log
        .records
        .get(start_tick..)?
        .iter()
        .map(|r| r.wrench.fz)
        .collect();
    let windows = window_statistics_of(&fz, ticks).ok()?;
    detect_convergence(&online_series(&windows), cfg).map(|window| OnlineConvergence {
        window,
        start_tick,
        ticks_per_window: ticks,
    })
}

/// Online detection with windows anchored at the first rim contact (or at
/// tick 0 when the peg never touches the surface).
pub fn detect_online(
    log: &EpisodeLog,
    cfg: &ConvergenceCriterionConfig,
) -> Option<OnlineConvergence> {
    detect_online_from(log, log.contact_onset().unwrap_or(0), cfg)
}

pub const CONVERGENCE_HEADER: [&str; 7] = [
    "window",
    "mean_fz",
    "two_sigma",
    "ens_mean",
    "ci_half",
    "esig",
    "ssig",
];

/// Writes `convergence.csv`: representative-episode online statistics next
/// to the ensemble statistics (`esig` = 2E[σ], `ssig` = 2σ(σ)).
pub fn write_convergence_csv<W: Write>(
    w: W,
    representative: &[WindowStats],
    ensemble: &EnsembleStats,
) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CONVERGENCE_HEADER)?;
    for (k, (r, e)) in representative.iter().zip(&ensemble.windows).enumerate() {
        wr.write_record([
            k.to_string(),
            r.mean_fz.to_string(),
            r.two_sigma_fz.to_string(),
            e.mean_fz.to_string(),
            e.ci_half_width.to_string(),
            (2.0 * e.mean_sigma).to_string(),
            (2.0 * e.std_sigma).to_string(),
        ])?;
    }
    wr.flush().map_err(|e| Error::io("<convergence csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::seeded_rng;
    use rand::Rng;

    fn brute(xs: &[f64]) -> (f64, f64) {
        let mut sum = 0.0;
        for x in xs {
            sum += x;
        }
        let m = sum / xs.len() as f64;
        let mut ss = 0.0;
        for x in xs {
            ss += (x - m).powi(2);
        }
        (m, 2.0 * (ss / (xs.len() as f64 - 1.0)).sqrt())
    }

    #[test]
    fn constant_signal_windows() {
        let s = vec![5.0; 150];
        let w = window_statistics_of(&s, 50).unwrap();
        assert_eq!(w.len(), 3);
        for x in &w {
            assert_eq!(x.mean_fz, 5.0);
            assert_eq!(x.two_sigma_fz, 0.0);
        }
    }

    #[test]
    fn alternating_signal_windows() {
        let s: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let w = window_statistics_of(&s, 50).unwrap();
        let (m, two_sigma) = brute(&s[..50]);
        assert!((w[0].mean_fz - m).abs() < 1e-12);
        assert!(w[0].mean_fz.abs() < 1e-12);
        assert!((w[0].two_sigma_fz - two_sigma).abs() < 1e-12);
        // 50 samples of ±1: var = 50 / 49
        assert!((w[0].two_sigma_fz - 2.0 * (50.0f64 / 49.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn partial_window_is_dropped() {
        let s = vec![1.0; 90];
        assert_eq!(window_statistics_of(&s, 50).unwrap().len(), 1);
        assert!(matches!(
            window_statistics_of(&s[..40], 50),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn two_episode_ensemble() {
        let a = vec![WindowStats {
            window_index: 0,
            mean_fz: 4.0,
            two_sigma_fz: 0.2,
        }];
        let b = vec![WindowStats {
            window_index: 0,
            mean_fz: 6.0,
            two_sigma_fz: 0.2,
        }];
        let e = ensemble_of(&[a.clone(), b]).unwrap();
        let w = e.windows[0];
        assert!((w.mean_fz - 5.0).abs() < 1e-12);
        assert!((w.std_of_means - 2f64.sqrt()).abs() < 1e-12);
        assert!((w.ci_half_width - 1.96).abs() < 1e-12);
        assert_eq!(w.std_sigma, 0.0);
        assert!(ensemble_of(&[a]).is_err());
    }

    #[test]
    fn identical_ensemble_has_no_spread() {
        let a: Vec<WindowStats> =
            window_statistics_of(&(0..200).map(|i| (i as f64).sin()).collect::<Vec<_>>(), 50)
                .unwrap();
        let e = ensemble_of(&[a.clone(), a.clone(), a]).unwrap();
        for w in &e.windows {
            assert!(w.ci_half_width < 1e-15);
            assert!(w.std_sigma < 1e-15);
        }
    }

    #[test]
    fn constant_stats_converge_at_window_two() {
        let cfg = ConvergenceCriterionConfig::default();
        let s = vec![vec![3.0; 6]; 4];
        assert_eq!(detect_convergence(&s, &cfg), Some(2));
        assert_eq!(detect_convergence(&[vec![3.0; 2]], &cfg), None);
    }

    #[test]
    fn ramp_never_converges() {
        let cfg = ConvergenceCriterionConfig::default();
        let ramp: Vec<f64> = (0..30).map(|k| 0.15 * k as f64).collect();
        assert_eq!(detect_convergence(&[ramp, vec![0.0; 30]], &cfg), None);
    }

    #[test]
    fn fast_decrease_is_not_convergence() {
        let cfg = ConvergenceCriterionConfig::default();
        let down: Vec<f64> = (0..10).map(|k| 10.0 - k as f64).collect();
        assert_eq!(detect_convergence(&[down], &cfg), None);
    }

    #[test]
    fn window_stats_match_two_pass_oracle() {
        let mut rng = seeded_rng(5);
        for _ in 0..20 {
            let n = rng.random_range(100..600);
            let s: Vec<f64> = (0..n).map(|_| rng.random_range(-30.0..30.0)).collect();
            let ticks = rng.random_range(2..60);
            let w = window_statistics_of(&s, ticks).unwrap();
            assert_eq!(w.len(), n / ticks);
            for (i, ws) in w.iter().enumerate() {
                let (m, ts) = brute(&s[i * ticks..(i + 1) * ticks]);
                assert!((ws.mean_fz - m).abs() < 1e-10);
                assert!((ws.two_sigma_fz - ts).abs() < 1e-10);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn offset_invariance(
            base in proptest::collection::vec(-5.0f64..5.0, 3..40),
            offset in -100.0f64..100.0,
        ) {
            let cfg = ConvergenceCriterionConfig { eta_th: 1.0, ..Default::default() };
            // Offsets are multiples of 1/8 so shifted differences stay exact.
            let offset = (offset * 8.0).round() / 8.0;
            let base: Vec<f64> = base.iter().map(|v| (v * 64.0).round() / 64.0).collect();
            let shifted: Vec<f64> = base.iter().map(|v| v + offset).collect();
            proptest::prop_assert_eq!(
                detect_convergence(std::slice::from_ref(&base), &cfg),
                detect_convergence(&[shifted], &cfg)
            );
        }

        #[test]
        fn larger_threshold_never_delays(
            s in proptest::collection::vec(-3.0f64..3.0, 3..50),
            eta in 0.01f64..2.0, extra in 0.0f64..2.0,
        ) {
            let lo = ConvergenceCriterionConfig { eta_th: eta, ..Default::default() };
            let hi = ConvergenceCriterionConfig { eta_th: eta + extra, ..Default::default() };
            let a = detect_convergence(std::slice::from_ref(&s), &lo);
            let b = detect_convergence(&[s], &hi);
            if let Some(ka) = a {
                proptest::prop_assert!(b.is_some() && b.unwrap() <= ka);
            }
        }
    }
}
