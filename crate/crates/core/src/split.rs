//! Seeded stratified partitioning shared by the classical and contextual
//! pipelines.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes a base seed with a unit index (tree, head, fold) so that each unit
/// gets an independent stream regardless of scheduling.
pub fn derive_seed(seed: u64, unit: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ unit.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64, unit: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, unit))
}

/// Part sizes summing to `n`: the first parts are `round(n * f)`, the last
/// takes the remainder.
pub fn part_sizes(n: usize, fractions: &[f64]) -> Vec<usize> {
    let mut sizes: Vec<usize> = fractions[..fractions.len() - 1]
        .iter()
        .map(|f| (n as f64 * f).round() as usize)
        .collect();
    let used: usize = sizes.iter().sum();
    sizes.push(n.saturating_sub(used));
    sizes
}

/// Splits item indices into `fractions.len()` parts, stratified by `labels`.
/// Part sizes follow [`part_sizes`]; within each class the allocation is
/// proportional with largest-remainder rounding. Each part lists indices in
/// ascending order.
pub fn stratified_partition(labels: &[usize], fractions: &[f64], seed: u64) -> Vec<Vec<usize>> {
    let n = labels.len();
    let parts = fractions.len();
    let targets = part_sizes(n, fractions);
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for members in by_class.iter_mut() {
        members.shuffle(&mut rng);
    }

    // quota[c][p]: floor of the proportional share
    let mut quota = vec![vec![0usize; parts]; n_classes];
    let mut remainders = Vec::new();
    for (c, members) in by_class.iter().enumerate() {
        for p in 0..parts {
            let ideal = members.len() as f64 * targets[p] as f64 / n.max(1) as f64;
            quota[c][p] = ideal.floor() as usize;
            remainders.push((ideal - ideal.floor(), c, p));
        }
    }
    let mut class_left: Vec<usize> = (0..n_classes)
        .map(|c| by_class[c].len() - quota[c].iter().sum::<usize>())
        .collect();
    let mut part_left: Vec<usize> = (0..parts)
        .map(|p| targets[p] - (0..n_classes).map(|c| quota[c][p]).sum::<usize>())
        .collect();
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for &(_, c, p) in &remainders {
        if class_left[c] > 0 && part_left[p] > 0 {
            quota[c][p] += 1;
            class_left[c] -= 1;
            part_left[p] -= 1;
        }
    }
    for c in 0..n_classes {
        for p in 0..parts {
            let take = class_left[c].min(part_left[p]);
            quota[c][p] += take;
            class_left[c] -= take;
            part_left[p] -= take;
        }
    }

    let mut out = vec![Vec::new(); parts];
    for (c, members) in by_class.iter().enumerate() {
        let mut cursor = 0;
        for p in 0..parts {
            out[p].extend_from_slice(&members[cursor..cursor + quota[c][p]]);
            cursor += quota[c][p];
        }
    }
    for part in out.iter_mut() {
        part.sort_unstable();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seventy_twenty_ten() {
        let labels: Vec<usize> = (0..1000).map(|i| i % 3).collect();
        let parts = stratified_partition(&labels, &[0.7, 0.2, 0.1], 1);
        assert_eq!(parts.iter().map(Vec::len).collect::<Vec<_>>(), vec![700, 200, 100]);
        let parts = stratified_partition(&vec![0; 10], &[0.7, 0.2, 0.1], 1);
        assert_eq!(parts.iter().map(Vec::len).collect::<Vec<_>>(), vec![7, 2, 1]);
    }

    #[test]
    fn deterministic() {
        let labels: Vec<usize> = (0..100).map(|i| i % 4).collect();
        assert_eq!(
            stratified_partition(&labels, &[0.8, 0.2], 7),
            stratified_partition(&labels, &[0.8, 0.2], 7)
        );
        assert_ne!(
            stratified_partition(&labels, &[0.8, 0.2], 7),
            stratified_partition(&labels, &[0.8, 0.2], 8)
        );
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    proptest! {
        #[test]
        fn partition_property(labels in proptest::collection::vec(0usize..4, 0..200), seed in any::<u64>()) {
            let parts = stratified_partition(&labels, &[0.7, 0.2, 0.1], seed);
            let mut all: Vec<usize> = parts.concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            let want = part_sizes(labels.len(), &[0.7, 0.2, 0.1]);
            for (p, w) in parts.iter().zip(&want) {
                prop_assert_eq!(p.len(), *w);
            }
            // per-class counts stay within one of the proportional share
            for c in 0..4 {
                let nc = labels.iter().filter(|&&l| l == c).count() as f64;
                for (p, w) in parts.iter().zip(&want) {
                    let got = p.iter().filter(|&&i| labels[i] == c).count() as f64;
                    let ideal = nc * *w as f64 / labels.len().max(1) as f64;
                    prop_assert!((got - ideal).abs() <= 2.0);
                }
            }
        }
    }
}
