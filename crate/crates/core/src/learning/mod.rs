//! Learning the misalignment from quasi-steady force signatures: dataset
//! collection, GP direction classifiers and magnitude regressors, forest
//! feature importance and the full-vs-reduced evaluation.

pub mod dataset;
pub mod forest;
pub mod gp;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::control::ControllerKind;
use crate::error::{Error, Result};
use crate::types::{seeded_rng, Axis, SimRng};

pub use dataset::{collect_dataset, Dataset, DatasetRecord, EpisodeConfig};
pub use forest::{feature_importance, fit_forest, FeatureImportance, ForestConfig, RandomForest};
pub use gp::{GpRegressor, RbfKernelParams};

pub const FEATURE_NAMES: [&str; 6] = ["fx", "fy", "fz", "mx", "my", "mz"];

/// Which wrench channels feed the models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSelector {
    Full,
    /// `fx, fy, mx, my`: drops `fz` and `mz`.
    #[default]
    Reduced,
}

impl FeatureSelector {
    pub const BOTH: [FeatureSelector; 2] = [FeatureSelector::Full, FeatureSelector::Reduced];

    pub fn indices(self) -> &'static [usize] {
        match self {
            FeatureSelector::Full => &[0, 1, 2, 3, 4, 5],
            FeatureSelector::Reduced => &[0, 1, 3, 4],
        }
    }

    pub fn select(self, features: &[f64; 6]) -> Vec<f64> {
        self.indices().iter().map(|&i| features[i]).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSelector::Full => "full",
            FeatureSelector::Reduced => "reduced",
        }
    }
}

/// Sign label of an offset. Exact zeros count as positive.
pub fn direction_label(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionPrediction {
    /// +1 or −1.
    pub sign: f64,
    /// Posterior mean of the ±1 regression.
    pub score: f64,
}

impl DirectionPrediction {
    pub fn from_score(score: f64) -> Self {
        DirectionPrediction {
            sign: if score >= 0.0 { 1.0 } else { -1.0 },
            score,
        }
    }
}

/// Least-squares GP classifier: regression on ±1 labels, sign of the mean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionClassifier {
    pub axis: Axis,
    pub selector: FeatureSelector,
    pub gp: GpRegressor,
}

pub fn fit_direction_classifier(
    data: &[DatasetRecord],
    axis: Axis,
    selector: FeatureSelector,
    params: &RbfKernelParams,
) -> Result<DirectionClassifier> {
    let labels: Vec<f64> = data
        .iter()
        .map(|r| direction_label(r.misalignment.along(axis)))
        .collect();
    let pos = labels.iter().filter(|&&l| l > 0.0).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::DegenerateData(format!(
            "direction labels along {} contain a single class",
            axis.name()
        )));
    }
    let x: Vec<Vec<f64>> = data.iter().map(|r| selector.select(&r.features)).collect();
    Ok(DirectionClassifier {
        axis,
        selector,
        gp: GpRegressor::fit(&x, &labels, params)?,
    })
}

impl DirectionClassifier {
    pub fn predict(&self, features: &[f64; 6]) -> Result<DirectionPrediction> {
        let score = self.gp.predict_mean(&self.selector.select(features))?;
        Ok(DirectionPrediction::from_score(score))
    }
}

pub fn predict_direction(c: &DirectionClassifier, features: &[f64; 6]) -> Result<f64> {
    Ok(c.predict(features)?.sign)
}

/// GP regression of the offset magnitude `|d|` along one axis, in mm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MagnitudeRegressor {
    pub axis: Axis,
    pub selector: FeatureSelector,
    pub gp: GpRegressor,
}

pub fn fit_magnitude_regressor(
    data: &[DatasetRecord],
    axis: Axis,
    selector: FeatureSelector,
    params: &RbfKernelParams,
) -> Result<MagnitudeRegressor> {
    let y: Vec<f64> = data
        .iter()
        .map(|r| r.misalignment.along(axis).abs())
        .collect();
    let x: Vec<Vec<f64>> = data.iter().map(|r| selector.select(&r.features)).collect();
    Ok(MagnitudeRegressor {
        axis,
        selector,
        gp: GpRegressor::fit(&x, &y, params)?,
    })
}

impl MagnitudeRegressor {
    pub fn predict(&self, features: &[f64; 6]) -> Result<(f64, f64)> {
        self.gp.predict(&self.selector.select(features))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearningConfig {
    pub feature_mode: FeatureSelector,
    pub classifier_kernel: RbfKernelParams,
    pub regressor_kernel: RbfKernelParams,
    /// Lengthscale candidates for the regressor; empty disables the search.
    pub lengthscale_grid: Vec<f64>,
    pub forest: ForestConfig,
    pub split_seed: u64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        LearningConfig {
            feature_mode: FeatureSelector::Reduced,
            classifier_kernel: RbfKernelParams::default(),
            regressor_kernel: RbfKernelParams::default(),
            lengthscale_grid: vec![0.3, 1.0, 3.0],
            forest: ForestConfig::default(),
            split_seed: 2024,
        }
    }
}

/// Deterministic 80/20 split by seed.
pub fn train_test_split(
    data: &[DatasetRecord],
    seed: u64,
) -> (Vec<DatasetRecord>, Vec<DatasetRecord>) {
    let mut idx: Vec<usize> = (0..data.len()).collect();
    idx.shuffle(&mut seeded_rng(seed));
    let n_train = (data.len() * 4).div_ceil(5);
    let train = idx[..n_train].iter().map(|&i| data[i]).collect();
    let test = idx[n_train..].iter().map(|&i| data[i]).collect();
    (train, test)
}

fn regressor_params(
    train: &[DatasetRecord],
    axis: Axis,
    selector: FeatureSelector,
    cfg: &LearningConfig,
) -> Result<RbfKernelParams> {
    if cfg.lengthscale_grid.is_empty() {
        return Ok(cfg.regressor_kernel.clone());
    }
    let x: Vec<Vec<f64>> = train.iter().map(|r| selector.select(&r.features)).collect();
    let y: Vec<f64> = train
        .iter()
        .map(|r| r.misalignment.along(axis).abs())
        .collect();
    gp::select_lengthscale(&x, &y, &cfg.regressor_kernel, &cfg.lengthscale_grid, 0.2)
}

/// Trained classifiers and regressors for both axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelBundle {
    pub controller: ControllerKind,
    pub feature_mode: FeatureSelector,
    pub classifier_x: DirectionClassifier,
    pub classifier_y: DirectionClassifier,
    pub regressor_x: MagnitudeRegressor,
    pub regressor_y: MagnitudeRegressor,
}

impl ModelBundle {
    pub fn classifier(&self, axis: Axis) -> &DirectionClassifier {
        match axis {
            Axis::X => &self.classifier_x,
            Axis::Y => &self.classifier_y,
        }
    }

    pub fn regressor(&self, axis: Axis) -> &MagnitudeRegressor {
        match axis {
            Axis::X => &self.regressor_x,
            Axis::Y => &self.regressor_y,
        }
    }
}

pub fn train_models(
    data: &[DatasetRecord],
    controller: ControllerKind,
    selector: FeatureSelector,
    cfg: &LearningConfig,
) -> Result<ModelBundle> {
    let cls = |a| fit_direction_classifier(data, a, selector, &cfg.classifier_kernel);
    let reg = |a| -> Result<MagnitudeRegressor> {
        let p = regressor_params(data, a, selector, cfg)?;
        fit_magnitude_regressor(data, a, selector, &p)
    };
    Ok(ModelBundle {
        controller,
        feature_mode: selector,
        classifier_x: cls(Axis::X)?,
        classifier_y: cls(Axis::Y)?,
        regressor_x: reg(Axis::X)?,
        regressor_y: reg(Axis::Y)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub axis: Axis,
    pub controller: ControllerKind,
    pub feature_mode: FeatureSelector,
    pub accuracy: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub axis: Axis,
    pub controller: ControllerKind,
    pub feature: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub n_train: usize,
    pub n_test: usize,
    pub split_seed: u64,
    pub rows: Vec<ReportRow>,
    pub importance: Vec<ImportanceRow>,
}

impl EvaluationReport {
    pub fn row(
        &self,
        axis: Axis,
        controller: ControllerKind,
        mode: FeatureSelector,
    ) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.axis == axis && r.controller == controller && r.feature_mode == mode)
    }

    pub fn importance_of(&self, axis: Axis, controller: ControllerKind) -> Vec<f64> {
        FEATURE_NAMES
            .iter()
            .map(|n| {
                self.importance
                    .iter()
                    .find(|r| r.axis == axis && r.controller == controller && r.feature == *n)
                    .map_or(0.0, |r| r.mean)
            })
            .collect()
    }
}

/// Held-out direction accuracy and magnitude RMSE per axis, controller and
/// feature mode, plus forest importance of the six wrench channels.
pub fn evaluate_models(
    data: &Dataset,
    cfg: &LearningConfig,
    rng: &mut SimRng,
) -> Result<EvaluationReport> {
    if data.len() < 100 {
        return Err(Error::InsufficientData(format!(
            "evaluation needs at least 100 records, got {}",
            data.len()
        )));
    }
    let mut rows = Vec::new();
    let mut importance = Vec::new();
    let mut sizes = (0, 0);
    for kind in data.controllers() {
        let subset = data.for_controller(kind);
        let (train, test) = train_test_split(&subset.records, cfg.split_seed);
        sizes = (sizes.0 + train.len(), sizes.1 + test.len());
        for axis in Axis::BOTH {
            for mode in FeatureSelector::BOTH {
                let c = fit_direction_classifier(&train, axis, mode, &cfg.classifier_kernel)?;
                let p = regressor_params(&train, axis, mode, cfg)?;
                let r = fit_magnitude_regressor(&train, axis, mode, &p)?;
                let mut correct = 0usize;
                let mut pred = Vec::with_capacity(test.len());
                let mut truth = Vec::with_capacity(test.len());
                for rec in &test {
                    let d = rec.misalignment.along(axis);
                    if c.predict(&rec.features)?.sign == direction_label(d) {
                        correct += 1;
                    }
                    pred.push(r.predict(&rec.features)?.0);
                    truth.push(d.abs());
                }
                rows.push(ReportRow {
                    axis,
                    controller: kind,
                    feature_mode: mode,
                    accuracy: correct as f64 / test.len() as f64,
                    rmse: gp::rmse(&pred, &truth),
                });
            }
            let x: Vec<Vec<f64>> = subset.records.iter().map(|r| r.features.to_vec()).collect();
            let y: Vec<bool> = subset
                .records
                .iter()
                .map(|r| r.misalignment.along(axis) >= 0.0)
                .collect();
            let forest = fit_forest(&x, &y, &cfg.forest, rng)?;
            for (name, imp) in FEATURE_NAMES.iter().zip(feature_importance(&forest)) {
                importance.push(ImportanceRow {
                    axis,
                    controller: kind,
                    feature: name.to_string(),
                    mean: imp.mean,
                    std: imp.std,
                });
            }
        }
    }
    Ok(EvaluationReport {
        n_train: sizes.0,
        n_test: sizes.1,
        split_seed: cfg.split_seed,
        rows,
        importance,
    })
}
