use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::split::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    /// Value of the constant column appended to every input; its weight acts
    /// as a (regularized) intercept.
    pub intercept_scaling: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-4,
            epochs: 50,
            intercept_scaling: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvm {
    pub params: SvmParams,
    /// One weight vector per class, the last coordinate multiplying the
    /// intercept column.
    pub weights: Vec<Vec<f64>>,
}

fn dot(w: &[f64], x: &[f64], intercept: f64) -> f64 {
    let d = x.len();
    w[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[d] * intercept
}

impl LinearSvm {
    /// One-vs-rest heads, each trained by Pegasos-style subgradient descent on
    /// the L2-regularized hinge loss with step 1/(lambda t). Head `c` shuffles
    /// with a stream derived from `(seed, c)`.
    pub fn fit(data: &Dataset, params: SvmParams, seed: u64) -> LinearSvm {
        let k = data.class_names.len();
        let d = data.n_features();
        let n = data.vectors.len();
        let weights = (0..k)
            .into_par_iter()
            .map(|c| {
                let mut rng = rng_for(seed, c as u64);
                let mut w = vec![0.0; d + 1];
                let mut order: Vec<usize> = (0..n).collect();
                let mut t = 0u64;
                for _ in 0..params.epochs {
                    order.shuffle(&mut rng);
                    for &i in &order {
                        t += 1;
                        let v = &data.vectors[i];
                        let y = if v.label == c { 1.0 } else { -1.0 };
                        let eta = 1.0 / (params.lambda * t as f64);
                        let margin = y * dot(&w, &v.values, params.intercept_scaling);
                        let shrink = 1.0 - eta * params.lambda;
                        w.iter_mut().for_each(|wi| *wi *= shrink);
                        if margin < 1.0 {
                            for (wi, xi) in w[..d].iter_mut().zip(&v.values) {
                                *wi += eta * y * xi;
                            }
                            w[d] += eta * y * params.intercept_scaling;
                        }
                    }
                }
                w
            })
            .collect();
        LinearSvm { params, weights }
    }

    pub fn margins(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| dot(w, x, self.params.intercept_scaling))
            .collect()
    }

    /// Softmax over margins; only meaningful as a ranking score.
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        crate::context::softmax(&self.margins(x))
    }
}
