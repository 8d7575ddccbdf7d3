//! Bagged CART classifiers with Gini splits and impurity-decrease importance.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{seeded_rng, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub num_trees: usize,
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features tried per split; `None` means `⌊√d⌋`.
    pub max_features: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            num_trees: 100,
            max_depth: 6,
            min_leaf: 5,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf {
        /// Fraction of positive labels.
        p_pos: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    root: Node,
    /// Weighted Gini decrease accumulated per feature.
    importance: Vec<f64>,
    pub bootstrap_seed: u64,
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [bool],
    cfg: ForestConfig,
    n_features_try: usize,
    n_root: usize,
    importance: Vec<f64>,
}

impl Builder<'_> {
    fn build(&mut self, idx: &mut [usize], depth: usize, rng: &mut SimRng) -> Node {
        let n = idx.len();
        let pos = idx.iter().filter(|&&i| self.y[i]).count();
        let leaf = Node::Leaf {
            p_pos: pos as f64 / n as f64,
        };
        if depth >= self.cfg.max_depth || pos == 0 || pos == n || n < 2 * self.cfg.min_leaf {
            return leaf;
        }
        let parent = gini(pos, n);
        let d = self.x[0].len();
        let mut best: Option<(f64, usize, f64)> = None;
        for f in sample(rng, d, self.n_features_try) {
            idx.sort_by(|&a, &b| self.x[a][f].total_cmp(&self.x[b][f]));
            let mut left_pos = 0;
            for k in 1..n {
                if self.y[idx[k - 1]] {
                    left_pos += 1;
                }
                if k < self.cfg.min_leaf || n - k < self.cfg.min_leaf {
                    continue;
                }
                let lo = self.x[idx[k - 1]][f];
                let hi = self.x[idx[k]][f];
                if lo == hi {
                    continue;
                }
                let child = (k as f64 * gini(left_pos, k)
                    + (n - k) as f64 * gini(pos - left_pos, n - k))
                    / n as f64;
                let gain = parent - child;
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, 0.5 * (lo + hi)));
                }
            }
        }
        let Some((gain, feature, threshold)) = best else {
            return leaf;
        };
        if gain <= 0.0 {
            return leaf;
        }
        self.importance[feature] += gain * n as f64 / self.n_root as f64;
        let (mut l, mut r): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.build(&mut l, depth + 1, rng);
        let right = self.build(&mut r, depth + 1, rng);
        Node::Split {
            feature,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

impl DecisionTree {
    fn predict_proba(&self, x: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { p_pos } => return *p_pos,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Per-tree importance normalized to sum 1 (all zeros for a stump leaf).
    pub fn normalized_importance(&self) -> Vec<f64> {
        let s: f64 = self.importance.iter().sum();
        if s > 0.0 {
            self.importance.iter().map(|v| v / s).collect()
        } else {
            vec![0.0; self.importance.len()]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub config: ForestConfig,
    pub n_features: usize,
}

/// Fits a forest on boolean labels. Each tree gets its own bootstrap seed
/// drawn from `rng`.
pub fn fit_forest(
    x: &[Vec<f64>],
    y: &[bool],
    config: &ForestConfig,
    rng: &mut SimRng,
) -> Result<RandomForest> {
    if x.len() < 20 {
        return Err(Error::InsufficientData(format!(
            "forest needs at least 20 samples, got {}",
            x.len()
        )));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let pos = y.iter().filter(|&&b| b).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::DegenerateData(
            "forest labels contain a single class".into(),
        ));
    }
    let d = x[0].len();
    let n_try = config
        .max_features
        .unwrap_or_else(|| ((d as f64).sqrt().floor() as usize).max(1))
        .clamp(1, d);
    let n = x.len();
    let trees = (0..config.num_trees)
        .map(|_| {
            let seed: u64 = rng.random();
            let mut trng = seeded_rng(seed);
            let mut idx: Vec<usize> = (0..n).map(|_| trng.random_range(0..n)).collect();
            let mut b = Builder {
                x,
                y,
                cfg: *config,
                n_features_try: n_try,
                n_root: n,
                importance: vec![0.0; d],
            };
            let root = b.build(&mut idx, 0, &mut trng);
            DecisionTree {
                root,
                importance: b.importance,
                bootstrap_seed: seed,
            }
        })
        .collect();
    Ok(RandomForest {
        trees,
        config: *config,
        n_features: d,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub mean: f64,
    /// Spread across trees.
    pub std: f64,
}

impl RandomForest {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_proba(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.predict_proba(x) >= 0.5
    }
}

/// Mean over trees of each tree's normalized impurity decrease, renormalized
/// to sum 1, with the across-tree standard deviation.
pub fn feature_importance(forest: &RandomForest) -> Vec<FeatureImportance> {
    let d = forest.n_features;
    let per: Vec<Vec<f64>> = forest
        .trees
        .iter()
        .map(|t| t.normalized_importance())
        .collect();
    let nt = per.len() as f64;
    let mut mean = vec![0.0; d];
    for imp in &per {
        for j in 0..d {
            mean[j] += imp[j] / nt;
        }
    }
    let mut std = vec![0.0; d];
    for imp in &per {
        for j in 0..d {
            std[j] += (imp[j] - mean[j]).powi(2) / nt;
        }
    }
    let total: f64 = mean.iter().sum();
    let norm = if total > 0.0 { total } else { 1.0 };
    (0..d)
        .map(|j| FeatureImportance {
            mean: mean[j] / norm,
            std: std[j].sqrt() / norm,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;

    fn synthetic(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
        let mut rng = seeded_rng(seed);
        let mut x = Vec::new();
        let mut y = Vec::new();
        for _ in 0..n {
            let row: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            y.push(row[0] > 0.0);
            x.push(row);
        }
        (x, y)
    }

    fn accuracy(f: &RandomForest, x: &[Vec<f64>], y: &[bool]) -> f64 {
        x.iter().zip(y).filter(|(r, l)| f.predict(r) == **l).count() as f64 / y.len() as f64
    }

    /// Accuracy drop when the given columns are jointly permuted on held-out data.
    fn permutation_importance(
        f: &RandomForest,
        x: &[Vec<f64>],
        y: &[bool],
        cols: &[usize],
        seed: u64,
    ) -> f64 {
        let base = accuracy(f, x, y);
        let mut rng = seeded_rng(seed);
        let mut perm: Vec<usize> = (0..x.len()).collect();
        perm.shuffle(&mut rng);
        let xp: Vec<Vec<f64>> = x
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                for &c in cols {
                    r[c] = x[perm[i]][c];
                }
                r
            })
            .collect();
        base - accuracy(f, &xp, y)
    }

    #[test]
    fn single_informative_feature_dominates() {
        let (x, y) = synthetic(400, 1);
        let f = fit_forest(&x, &y, &ForestConfig::default(), &mut seeded_rng(2)).unwrap();
        let imp = feature_importance(&f);
        assert!(imp[0].mean >= 0.9, "{imp:?}");
        let s: f64 = imp.iter().map(|i| i.mean).sum();
        assert!((s - 1.0).abs() < 1e-9);
        assert!(imp.iter().all(|i| i.mean >= 0.0 && i.std >= 0.0));
        assert!(accuracy(&f, &x, &y) > 0.98);
    }

    #[test]
    fn duplicated_feature_shares_importance() {
        let (x, y) = synthetic(400, 3);
        let (xt, yt) = synthetic(400, 4);
        let dup = |m: &[Vec<f64>]| -> Vec<Vec<f64>> {
            m.iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.push(r[0]);
                    r
                })
                .collect()
        };
        let cfg = ForestConfig::default();
        let base = fit_forest(&x, &y, &cfg, &mut seeded_rng(5)).unwrap();
        let with_dup = fit_forest(&dup(&x), &y, &cfg, &mut seeded_rng(5)).unwrap();
        let i0 = feature_importance(&base)[0].mean;
        let idup = feature_importance(&with_dup);
        let pair = idup[0].mean + idup[4].mean;
        assert!((pair - i0).abs() <= 0.1, "pair {pair} vs single {i0}");

        // independent oracle: permuting the pair jointly hurts as much as
        // permuting the single informative column
        let p_single = permutation_importance(&base, &xt, &yt, &[0], 9);
        let p_pair = permutation_importance(&with_dup, &dup(&xt), &yt, &[0, 4], 9);
        assert!((p_single - p_pair).abs() <= 0.1, "{p_single} vs {p_pair}");
        assert!(p_single > 0.3);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let (x, _) = synthetic(50, 1);
        let y = vec![true; 50];
        assert!(matches!(
            fit_forest(&x, &y, &ForestConfig::default(), &mut seeded_rng(0)),
            Err(Error::DegenerateData(_))
        ));
        let (x, y) = synthetic(10, 1);
        assert!(matches!(
            fit_forest(&x, &y, &ForestConfig::default(), &mut seeded_rng(0)),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn fitting_is_deterministic() {
        let (x, y) = synthetic(100, 7);
        let a = fit_forest(&x, &y, &ForestConfig::default(), &mut seeded_rng(1)).unwrap();
        let b = fit_forest(&x, &y, &ForestConfig::default(), &mut seeded_rng(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn depth_and_leaf_limits_hold() {
        fn check(n: &Node, depth: usize, max: usize) {
            assert!(depth <= max);
            if let Node::Split { left, right, .. } = n {
                check(left, depth + 1, max);
                check(right, depth + 1, max);
            }
        }
        let (x, y) = synthetic(300, 11);
        let cfg = ForestConfig {
            num_trees: 10,
            max_depth: 3,
            ..Default::default()
        };
        let f = fit_forest(&x, &y, &cfg, &mut seeded_rng(1)).unwrap();
        for t in &f.trees {
            check(&t.root, 0, 3);
        }
    }
}
