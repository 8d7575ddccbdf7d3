//! WebAssembly bindings for the interactive demo page in `www/`.

use wasm_bindgen::prelude::*;

use pih_core::contact::EnvConfig;
use pih_core::control::{
    run_episode, sigmoid_alpha, ControllerConfig, LinearAccommodationConfig,
    NonlinearAccommodationConfig,
};
use pih_core::convergence::{detect_online, window_statistics, ConvergenceCriterionConfig};
use pih_core::types::{seeded_rng, PlanarMisalignment, Position3, TrajectorySpec, DEFAULT_DT};

/// One simulated descent onto the rim.
#[wasm_bindgen]
pub struct ForceTrace {
    fz: Vec<f64>,
    window_mean: Vec<f64>,
    window_two_sigma: Vec<f64>,
    converged_window: Option<usize>,
    onset_tick: Option<usize>,
    ticks_per_window: usize,
}

#[wasm_bindgen]
impl ForceTrace {
    /// Insertion-axis force per tick, N.
    #[wasm_bindgen(getter)]
    pub fn fz(&self) -> Vec<f64> {
        self.fz.clone()
    }

    /// Per-window mean of fz, windows anchored at contact onset.
    #[wasm_bindgen(getter, js_name = windowMean)]
    pub fn window_mean(&self) -> Vec<f64> {
        self.window_mean.clone()
    }

    #[wasm_bindgen(getter, js_name = windowTwoSigma)]
    pub fn window_two_sigma(&self) -> Vec<f64> {
        self.window_two_sigma.clone()
    }

    /// Window index at which the force was declared settled, or -1.
    #[wasm_bindgen(getter, js_name = convergedWindow)]
    pub fn converged_window(&self) -> i32 {
        self.converged_window.map_or(-1, |w| w as i32)
    }

    /// First tick with the rim loaded, or -1.
    #[wasm_bindgen(getter, js_name = onsetTick)]
    pub fn onset_tick(&self) -> i32 {
        self.onset_tick.map_or(-1, |t| t as i32)
    }

    #[wasm_bindgen(getter, js_name = ticksPerWindow)]
    pub fn ticks_per_window(&self) -> usize {
        self.ticks_per_window
    }
}

#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct DemoParams {
    /// `true` for the sigmoid law.
    pub nonlinear: bool,
    pub gamma: f64,
    /// Linear gain, mm/N.
    pub ka_linear: f64,
    /// Sigmoid steepness, 1/N.
    pub ka_sigmoid: f64,
    pub f_sat: f64,
    /// Reference advance per tick, mm.
    pub speed: f64,
    pub offset_x: f64,
    pub noise_sigma: f64,
    pub eta_th: f64,
    pub ticks: usize,
    pub seed: u32,
}

#[wasm_bindgen]
impl DemoParams {
    #[wasm_bindgen(constructor)]
    pub fn new() -> DemoParams {
        let lin = LinearAccommodationConfig::default();
        let nl = NonlinearAccommodationConfig::default();
        DemoParams {
            nonlinear: false,
            gamma: lin.gamma,
            ka_linear: lin.ka[2],
            ka_sigmoid: nl.ka,
            f_sat: nl.f_sat,
            speed: 0.02,
            offset_x: 2.0,
            noise_sigma: EnvConfig::default().noise_sigma,
            eta_th: ConvergenceCriterionConfig::default().eta_th,
            ticks: 1500,
            seed: 1,
        }
    }
}

impl Default for DemoParams {
    fn default() -> Self {
        Self::new()
    }
}

/// Runs one episode and the online convergence detector.
#[wasm_bindgen(js_name = forceTrace)]
pub fn force_trace(p: &DemoParams) -> Result<ForceTrace, JsError> {
    let controller = if p.nonlinear {
        ControllerConfig::Nonlinear(NonlinearAccommodationConfig {
            ka: p.ka_sigmoid,
            f_sat: p.f_sat,
        })
    } else {
        ControllerConfig::Linear(LinearAccommodationConfig {
            ka: [p.ka_linear; 3],
            gamma: p.gamma,
        })
    };
    let env = EnvConfig {
        noise_sigma: p.noise_sigma,
        seed: p.seed as u64,
        ..EnvConfig::default()
    };
    let traj = TrajectorySpec::downward(Position3::new(0.0, 0.0, 0.5), p.speed, p.ticks);
    let m = PlanarMisalignment::new(p.offset_x, 0.0);
    let log = run_episode(&controller, &env, &traj, m, &mut seeded_rng(p.seed as u64))?;
    let crit = ConvergenceCriterionConfig {
        eta_th: p.eta_th,
        ..ConvergenceCriterionConfig::default()
    };
    let onset = log.contact_onset();
    let windows = match onset {
        Some(s) => {
            let fz: Vec<f64> = log.fz()[s..].to_vec();
            pih_core::convergence::window_statistics_of(&fz, crit.ticks_per_window(DEFAULT_DT))
                .unwrap_or_default()
        }
        None => window_statistics(&log, crit.window_len).unwrap_or_default(),
    };
    Ok(ForceTrace {
        fz: log.fz(),
        window_mean: windows.iter().map(|w| w.mean_fz).collect(),
        window_two_sigma: windows.iter().map(|w| w.two_sigma_fz).collect(),
        converged_window: detect_online(&log, &crit).map(|c| c.window),
        onset_tick: onset,
        ticks_per_window: crit.ticks_per_window(DEFAULT_DT),
    })
}

/// Samples `α(f)` on `[0, f_max]` at `n` points.
#[wasm_bindgen(js_name = sigmoidCurve)]
pub fn sigmoid_curve(ka: f64, f_sat: f64, f_max: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| sigmoid_alpha(f_max * i as f64 / (n - 1) as f64, ka, f_sat))
        .collect()
}
