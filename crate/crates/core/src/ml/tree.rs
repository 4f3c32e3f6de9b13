//! CART decision tree with Gini impurity.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 12,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        distribution: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub params: TreeParams,
    pub n_classes: usize,
    pub nodes: Vec<Node>,
}

pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// The best (feature, threshold, impurity decrease) among `features`, where
/// the decrease is `gini(parent) - weighted gini(children)`. Thresholds are
/// midpoints between consecutive distinct values; ties keep the earliest
/// feature and lowest threshold.
pub fn best_split(
    data: &Dataset,
    rows: &[usize],
    features: &[usize],
    n_classes: usize,
) -> Option<(usize, f64, f64)> {
    let n = rows.len();
    let mut parent = vec![0usize; n_classes];
    for &r in rows {
        parent[data.vectors[r].label] += 1;
    }
    let parent_gini = gini(&parent);
    let mut best: Option<(usize, f64, f64)> = None;
    let mut sorted = rows.to_vec();
    for &f in features {
        sorted.sort_by(|&a, &b| data.vectors[a].values[f].total_cmp(&data.vectors[b].values[f]));
        let mut left = vec![0usize; n_classes];
        let mut right = parent.clone();
        for i in 0..n - 1 {
            let label = data.vectors[sorted[i]].label;
            left[label] += 1;
            right[label] -= 1;
            let here = data.vectors[sorted[i]].values[f];
            let next = data.vectors[sorted[i + 1]].values[f];
            if here == next {
                continue;
            }
            let nl = (i + 1) as f64;
            let nr = (n - i - 1) as f64;
            let child = (nl * gini(&left) + nr * gini(&right)) / n as f64;
            let decrease = parent_gini - child;
            let mid = here + (next - here) / 2.0;
            let threshold = if mid < next { mid } else { here };
            if best.map_or(true, |(_, _, d)| decrease > d + 1e-12) {
                best = Some((f, threshold, decrease));
            }
        }
    }
    best
}

impl DecisionTree {
    /// Fits on `rows` of `data`. When `feature_rng` is given, each split
    /// considers a random subset of ceil(sqrt(d)) features.
    pub fn fit_rows<R: Rng>(
        data: &Dataset,
        rows: &[usize],
        params: TreeParams,
        mut feature_rng: Option<&mut R>,
    ) -> DecisionTree {
        let n_classes = data.class_names.len();
        let mut tree = DecisionTree {
            params,
            n_classes,
            nodes: Vec::new(),
        };
        let d = data.n_features();
        let subset = (d as f64).sqrt().ceil() as usize;
        // (node slot, rows, depth)
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        tree.nodes.push(Node::Leaf { distribution: vec![] });
        stack.push((0, rows.to_vec(), 0));
        while let Some((slot, node_rows, depth)) = stack.pop() {
            let mut counts = vec![0usize; n_classes];
            for &r in &node_rows {
                counts[data.vectors[r].label] += 1;
            }
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let leaf = || Node::Leaf {
                distribution: counts
                    .iter()
                    .map(|&c| c as f64 / node_rows.len().max(1) as f64)
                    .collect(),
            };
            if pure || depth >= params.max_depth || node_rows.len() < params.min_samples_split.max(2) {
                tree.nodes[slot] = leaf();
                continue;
            }
            let features: Vec<usize> = match feature_rng.as_deref_mut() {
                Some(rng) if subset < d => {
                    let mut f = sample(rng, d, subset).into_vec();
                    f.sort_unstable();
                    f
                }
                _ => (0..d).collect(),
            };
            match best_split(data, &node_rows, &features, n_classes) {
                Some((feature, threshold, _)) => {
                    let (l, r): (Vec<usize>, Vec<usize>) = node_rows
                        .iter()
                        .partition(|&&i| data.vectors[i].values[feature] <= threshold);
                    if l.is_empty() || r.is_empty() {
                        tree.nodes[slot] = leaf();
                        continue;
                    }
                    let left = tree.nodes.len();
                    tree.nodes.push(Node::Leaf { distribution: vec![] });
                    let right = tree.nodes.len();
                    tree.nodes.push(Node::Leaf { distribution: vec![] });
                    tree.nodes[slot] = Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    };
                    stack.push((right, r, depth + 1));
                    stack.push((left, l, depth + 1));
                }
                None => tree.nodes[slot] = leaf(),
            }
        }
        tree
    }

    pub fn fit(data: &Dataset, params: TreeParams) -> DecisionTree {
        let rows: Vec<usize> = (0..data.vectors.len()).collect();
        DecisionTree::fit_rows::<rand_chacha::ChaCha8Rng>(data, &rows, params, None)
    }

    pub fn leaf_distribution(&self, x: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { distribution } => return distribution,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Dataset, FeatureVector, Task};
    use super::*;

    fn data(points: &[(Vec<f64>, usize)], k: usize) -> Dataset {
        Dataset {
            feature_names: (0..points[0].0.len()).map(|i| format!("x{i}")).collect(),
            vectors: points
                .iter()
                .enumerate()
                .map(|(i, (v, l))| FeatureVector { values: v.clone(), label: *l, provenance: i as u32 })
                .collect(),
            class_names: (0..k).map(|c| format!("c{c}")).collect(),
            task: Task::Polarity,
        }
    }

    #[test]
    fn two_points_fit_perfectly() {
        let d = data(&[(vec![0.0], 0), (vec![1.0], 1)], 2);
        let t = DecisionTree::fit(&d, TreeParams { max_depth: usize::MAX, min_samples_split: 2 });
        assert_eq!(t.leaf_distribution(&[0.0]), &[1.0, 0.0]);
        assert_eq!(t.leaf_distribution(&[1.0]), &[0.0, 1.0]);
    }

    #[test]
    fn pure_node_is_single_leaf() {
        let d = data(&[(vec![0.0], 1), (vec![5.0], 1), (vec![3.0], 1)], 2);
        let t = DecisionTree::fit(&d, TreeParams::default());
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.leaf_distribution(&[100.0]), &[0.0, 1.0]);
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[5, 0]), 0.0);
        assert_eq!(gini(&[2, 2]), 0.5);
        assert_eq!(gini(&[]), 0.0);
    }
}
