use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, TreeParams};
use super::Dataset;
use crate::split::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
    pub feature_subsample: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            tree: TreeParams::default(),
            bootstrap: true,
            feature_subsample: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub params: ForestParams,
    pub trees: Vec<DecisionTree>,
}

impl RandomForest {
    /// Tree `i` draws its bootstrap sample and feature subsets from a stream
    /// derived from `(seed, i)`, so the result does not depend on scheduling.
    pub fn fit(data: &Dataset, params: ForestParams, seed: u64) -> RandomForest {
        let n = data.vectors.len();
        let trees = (0..params.n_trees.max(1))
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(seed, i as u64);
                let rows: Vec<usize> = if params.bootstrap {
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                let feature_rng = params.feature_subsample.then_some(&mut rng);
                DecisionTree::fit_rows(data, &rows, params.tree, feature_rng)
            })
            .collect();
        RandomForest { params, trees }
    }

    /// Mean of the trees' leaf distributions.
    pub fn proba(&self, x: &[f64]) -> Vec<f64> {
        let k = self.trees[0].n_classes;
        let mut acc = vec![0.0; k];
        for t in &self.trees {
            for (a, p) in acc.iter_mut().zip(t.leaf_distribution(x)) {
                *a += p;
            }
        }
        let m = self.trees.len() as f64;
        acc.iter_mut().for_each(|a| *a /= m);
        acc
    }

    /// Per-class counts of the trees' individual predictions.
    pub fn votes(&self, x: &[f64]) -> Vec<usize> {
        let k = self.trees[0].n_classes;
        let mut votes = vec![0; k];
        for t in &self.trees {
            votes[super::argmax(t.leaf_distribution(x))] += 1;
        }
        votes
    }
}
