//! Seeded inverse-CDF sampling over a channel's support.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::Result;
use crate::mechanism::Channel;

/// Draws `n` outputs from `Q(· | x)`.
///
/// A uniform `u` in `[0, 1)` selects the first output (ascending) whose
/// cumulative mass exceeds `u`, so each atom owns the half-open interval
/// `[F(y-), F(y))`. Rounding slack at the top of the CDF goes to the last
/// atom. The generator is ChaCha20 seeded from `seed`, so identical
/// arguments give identical draws on every platform.
pub fn sample<C: Channel + ?Sized>(channel: &C, x: i64, seed: u64, n: usize) -> Result<Vec<i64>> {
    let atoms = channel.support_distribution(x)?;
    let mut cumulative = Vec::with_capacity(atoms.len());
    let mut acc = 0.0;
    for &(_, p) in &atoms {
        acc += p;
        cumulative.push(acc);
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let last = atoms.len() - 1;
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let i = cumulative.partition_point(|&c| c <= u).min(last);
            atoms[i].0
        })
        .collect())
}

/// Counts of each support atom among `draws`, in ascending output order.
pub fn histogram<C: Channel + ?Sized>(channel: &C, x: i64, draws: &[i64]) -> Result<Vec<(i64, u64)>> {
    let atoms = channel.support_distribution(x)?;
    let mut counts: Vec<(i64, u64)> = atoms.iter().map(|&(y, _)| (y, 0)).collect();
    for d in draws {
        if let Ok(i) = counts.binary_search_by_key(d, |&(y, _)| y) {
            counts[i].1 += 1;
        }
    }
    Ok(counts)
}
