use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Assigns each of `n` rows to one of `k` folds: a seeded shuffle followed by
/// round-robin dealing, so fold sizes differ by at most one.
pub(crate) fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(seed));
    let mut folds = alloc::vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        folds[row] = pos % k;
    }
    folds
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_are_balanced_and_deterministic() {
        let a = fold_assignment(103, 10, 7);
        let b = fold_assignment(103, 10, 7);
        assert_eq!(a, b);
        let mut sizes = [0usize; 10];
        for f in &a {
            sizes[*f] += 1;
        }
        assert!(sizes.iter().all(|&s| s == 10 || s == 11));
        assert_ne!(a, fold_assignment(103, 10, 8));
    }
}
