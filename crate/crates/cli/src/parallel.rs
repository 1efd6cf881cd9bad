//! Multi-threaded Monte Carlo permutation sampling.
//!
//! Sample `i` always draws from the generator keyed by `(seed, i)`, so
//! splitting the sample range across workers cannot change the result.

use std::thread;

use embias_core::weat::{PValue, PermutationTest};
use embias_core::Result;

/// Monte Carlo p-value over `samples` bipartitions using up to `workers`
/// threads. The result is bit-identical for every worker count.
pub fn monte_carlo_parallel(
    test: &PermutationTest,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<PValue> {
    let workers = (workers.max(1) as u64).min(samples.max(1));
    let chunk = samples.div_ceil(workers);
    let exceedances: u64 = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = (w * chunk).min(samples);
                let hi = ((w + 1) * chunk).min(samples);
                scope.spawn(move || test.monte_carlo_exceedances(seed, lo..hi))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampling worker panicked"))
            .sum()
    });
    test.monte_carlo_result(samples, seed, exceedances)
}
