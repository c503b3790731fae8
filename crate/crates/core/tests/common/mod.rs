//! Shared generators for integration tests.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sparse_ldp::mechanism::{DistanceModel, KernelFamily, MechanismSpec};

/// Random spec with at most 12 outputs, random supports, and either
/// `|x - y|` or a random distance matrix.
pub fn random_spec(rng: &mut ChaCha8Rng) -> MechanismSpec {
    let n_out = rng.gen_range(1..=12);
    let base: i64 = rng.gen_range(-5..5);
    let outputs: Vec<i64> = (0..n_out as i64).map(|i| base + i).collect();
    let n_in = rng.gen_range(1..=4);
    let mut inputs: Vec<i64> = Vec::new();
    while inputs.len() < n_in {
        let x = rng.gen_range(base - 2..base + n_out as i64 + 2);
        if !inputs.contains(&x) {
            inputs.push(x);
        }
    }
    let mut supports = BTreeMap::new();
    for &x in &inputs {
        let mut s: Vec<i64> = outputs.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        if s.is_empty() {
            s.push(outputs[rng.gen_range(0..n_out)]);
        }
        supports.insert(x, s);
    }
    let kernel = if rng.gen_bool(0.5) {
        KernelFamily::laplace(rng.gen_range(0.05..3.0)).unwrap()
    } else {
        KernelFamily::gaussian(rng.gen_range(0.3..4.0)).unwrap()
    };
    let distance = if rng.gen_bool(0.5) {
        DistanceModel::AbsoluteDifference
    } else {
        DistanceModel::ExplicitMatrix(
            inputs
                .iter()
                .map(|&x| {
                    outputs
                        .iter()
                        .map(|&y| if x == y { 0.0 } else { rng.gen_range(0.0..6.0) })
                        .collect()
                })
                .collect(),
        )
    };
    MechanismSpec::new(kernel, inputs, outputs, supports, distance).unwrap()
}

