//! Deterministic local-swap search over maps between finite index sets.
//!
//! Shared by the plain and equivariant approximation searches: callers supply
//! the score (lower is better) and seed maps, the engine does the rest.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) struct SearchOutcome {
    pub image: Vec<usize>,
    pub score: f64,
    pub evaluated: usize,
}

/// Evaluates every seed, then improves the best one by single-point swaps
/// until a full pass finds nothing or the budget is spent. At least one map
/// is always evaluated, whatever the budget.
pub(crate) fn local_search<F>(
    source_len: usize,
    target_len: usize,
    seeds: Vec<Vec<usize>>,
    budget: usize,
    seed: u64,
    mut score: F,
) -> SearchOutcome
where
    F: FnMut(&[usize]) -> f64,
{
    let mut seeds = seeds;
    if seeds.is_empty() {
        seeds.push(alloc::vec![0; source_len]);
    }
    let mut evaluated = 0usize;
    let mut best: Option<(Vec<usize>, f64)> = None;
    for s in seeds {
        debug_assert_eq!(s.len(), source_len);
        if evaluated >= budget.max(1) && best.is_some() {
            break;
        }
        let v = score(&s);
        evaluated += 1;
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((s, v));
        }
    }
    let (mut image, mut current) = best.expect("at least one seed evaluated");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..source_len).collect();
    let mut targets: Vec<usize> = (0..target_len).collect();
    'outer: while evaluated < budget && current > 0.0 {
        order.shuffle(&mut rng);
        let mut improved = false;
        for &i in &order {
            targets.shuffle(&mut rng);
            let old = image[i];
            for &t in &targets {
                if t == old {
                    continue;
                }
                if evaluated >= budget {
                    break 'outer;
                }
                image[i] = t;
                let v = score(&image);
                evaluated += 1;
                if v < current - 1e-15 {
                    current = v;
                    improved = true;
                    break;
                }
                image[i] = old;
            }
        }
        if !improved {
            break;
        }
    }
    SearchOutcome { image, score: current, evaluated }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_target_map_by_swaps() {
        let want = [2usize, 0, 1, 1];
        let out = local_search(4, 3, alloc::vec![alloc::vec![0; 4]], 1000, 7, |m| {
            m.iter().zip(want.iter()).filter(|(a, b)| a != b).count() as f64
        });
        assert_eq!(out.image, want);
        assert_eq!(out.score, 0.0);
    }

    #[test]
    fn zero_budget_still_scores_a_seed() {
        let out = local_search(3, 3, Vec::new(), 0, 0, |_| 1.5);
        assert_eq!(out.evaluated, 1);
        assert_eq!(out.score, 1.5);
    }
}
