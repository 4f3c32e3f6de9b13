use serde::{Deserialize, Serialize};

use super::Dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub var_smoothing: f64,
    pub priors: Vec<f64>,
    /// `means[c][f]`
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
    /// Classes with at least one training sample.
    pub present: Vec<bool>,
}

/// Order-independent sum: values are sorted before accumulation.
fn sorted_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

fn mean_var(values: &mut [f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = sorted_sum(values) / n;
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    (mean, sorted_sum(&mut sq) / n)
}

impl GaussianNb {
    /// Per-class priors, means and population variances. Variances are
    /// floored at `var_smoothing` times the largest feature variance of the
    /// whole dataset (or at `var_smoothing` itself when every feature is
    /// constant).
    pub fn fit(data: &Dataset, var_smoothing: f64) -> GaussianNb {
        let k = data.class_names.len();
        let d = data.n_features();
        let n = data.vectors.len() as f64;

        let max_var = (0..d)
            .map(|f| {
                let mut col: Vec<f64> = data.vectors.iter().map(|v| v.values[f]).collect();
                mean_var(&mut col).1
            })
            .fold(0.0, f64::max);
        let floor = if max_var > 0.0 {
            var_smoothing * max_var
        } else {
            var_smoothing
        };

        let mut priors = vec![0.0; k];
        let mut means = vec![vec![0.0; d]; k];
        let mut variances = vec![vec![floor; d]; k];
        let mut present = vec![false; k];
        for c in 0..k {
            let members: Vec<&Vec<f64>> = data
                .vectors
                .iter()
                .filter(|v| v.label == c)
                .map(|v| &v.values)
                .collect();
            if members.is_empty() {
                continue;
            }
            present[c] = true;
            priors[c] = members.len() as f64 / n;
            for f in 0..d {
                let mut col: Vec<f64> = members.iter().map(|v| v[f]).collect();
                let (m, v) = mean_var(&mut col);
                means[c][f] = m;
                variances[c][f] = v.max(floor);
            }
        }
        GaussianNb {
            var_smoothing,
            priors,
            means,
            variances,
            present,
        }
    }

    /// Log of prior times the product of Gaussian densities, per class;
    /// absent classes get negative infinity.
    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        (0..self.priors.len())
            .map(|c| {
                if !self.present[c] {
                    return f64::NEG_INFINITY;
                }
                let mut ll = self.priors[c].ln();
                for (f, &xf) in x.iter().enumerate() {
                    let var = self.variances[c][f];
                    ll -= 0.5 * (2.0 * std::f64::consts::PI * var).ln();
                    ll -= (xf - self.means[c][f]).powi(2) / (2.0 * var);
                }
                ll
            })
            .collect()
    }

    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let jll = self.joint_log_likelihood(x);
        let max = jll.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = jll.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = exp.iter().sum();
        exp.into_iter().map(|e| e / z).collect()
    }
}
