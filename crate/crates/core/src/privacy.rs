//! Exact pure and approximate local-privacy guarantees of sparse channels.
//!
//! For a pair of inputs `(x, x')` the ordered defect
//! `Δ_ε(x, x') = Σ_y [Q(y|x) - e^ε Q(y|x')]_+` splits into mass that `x` puts
//! outside `S(x')` (support leakage) and positive parts on `S(x) ∩ S(x')`
//! (overlap excess). A channel is `(ε, δ)`-LDP iff every ordered defect is
//! at most `δ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{check_epsilon, KernelFamily, MechanismSpec, TruncatedMechanism, TruncatedParams};

/// `total = support_leakage + overlap_excess`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DefectBreakdown {
    pub support_leakage: f64,
    pub overlap_excess: f64,
    pub total: f64,
}

impl DefectBreakdown {
    fn from_parts(support_leakage: f64, overlap_excess: f64) -> Self {
        let support_leakage = support_leakage.min(1.0);
        let overlap_excess = overlap_excess.min(1.0);
        Self {
            support_leakage,
            overlap_excess,
            total: (support_leakage + overlap_excess).min(1.0),
        }
    }

    fn full_leakage() -> Self {
        Self {
            support_leakage: 1.0,
            overlap_excess: 0.0,
            total: 1.0,
        }
    }
}

/// An ordered input pair and an output: either the point attaining the
/// largest privacy loss, or a point in `S(x) \ S(x')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: i64,
    pub x_prime: i64,
    pub output: i64,
}

/// Pure-LDP level of a spec. `epsilon_star` is `None` exactly when the
/// channel is not pure-LDP for any finite ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PureLdpResult {
    pub finite: bool,
    pub epsilon_star: Option<f64>,
    pub witness: Option<Witness>,
}

/// `L(x, x'; y) = log Q(y|x) / Q(y|x')` for `y` in both supports.
pub fn pointwise_loss(spec: &MechanismSpec, x: i64, x_prime: i64, y: i64) -> Result<f64> {
    let in_x = spec.support(x)?.binary_search(&y).is_ok();
    let in_x_prime = spec.support(x_prime)?.binary_search(&y).is_ok();
    if !(in_x && in_x_prime) {
        return Err(Error::OutsideOverlap {
            x,
            x_prime,
            output: y,
        });
    }
    let z = spec.normalizer(x)?;
    let z_prime = spec.normalizer(x_prime)?;
    loss_with(spec, x, x_prime, y, z, z_prime)
}

fn loss_with(spec: &MechanismSpec, x: i64, x_prime: i64, y: i64, z: f64, z_prime: f64) -> Result<f64> {
    let kernel = spec.kernel().kernel_loss(spec.distance(x, y)?, spec.distance(x_prime, y)?);
    Ok(kernel + (z_prime / z).ln())
}

/// Smallest ε for which the spec is pure ε-LDP, or a support-mismatch
/// witness when none exists.
pub fn pure_ldp_epsilon(spec: &MechanismSpec) -> PureLdpResult {
    let inputs = spec.inputs();
    for &x in inputs {
        for &x_prime in inputs {
            let s_prime = &spec.supports()[&x_prime];
            if let Some(&y) = spec.supports()[&x]
                .iter()
                .find(|y| s_prime.binary_search(y).is_err())
            {
                return PureLdpResult {
                    finite: false,
                    epsilon_star: None,
                    witness: Some(Witness { x, x_prime, output: y }),
                };
            }
        }
    }

    // common support from here on; inputs and outputs were validated, so
    // lookups cannot fail
    let normalizers: Vec<f64> = inputs
        .iter()
        .map(|&x| spec.normalizer(x).expect("validated input"))
        .collect();
    let mut best: Option<(f64, Witness)> = None;
    for (i, &x) in inputs.iter().enumerate() {
        for (j, &x_prime) in inputs.iter().enumerate() {
            for &y in &spec.supports()[&x] {
                let loss = loss_with(spec, x, x_prime, y, normalizers[i], normalizers[j])
                    .expect("validated output");
                if best.is_none_or(|(b, _)| loss > b) {
                    best = Some((loss, Witness { x, x_prime, output: y }));
                }
            }
        }
    }
    let (eps, witness) = best.expect("at least one input with a nonempty support");
    PureLdpResult {
        finite: true,
        // the x = x' terms contribute 0
        epsilon_star: Some(eps.max(0.0)),
        witness: Some(witness),
    }
}

/// `λ D + log(Z_x' / Z_x)`: an upper bound on the pure-LDP level of a
/// common-support Laplace channel with `d = |x - y|` and input diameter `D`.
pub fn pure_ldp_bound(lambda: f64, diameter: f64, log_normalizer_ratio: f64) -> Result<f64> {
    if diameter.is_nan() || diameter < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "diameter must be nonnegative, got {diameter}"
        )));
    }
    Ok(lambda * diameter + log_normalizer_ratio)
}

/// Ordered defect `Δ_ε(x, x')` split into leakage and overlap terms.
pub fn ordered_defect(spec: &MechanismSpec, x: i64, x_prime: i64, epsilon: f64) -> Result<DefectBreakdown> {
    check_epsilon(epsilon)?;
    let support = spec.support(x)?;
    let support_prime = spec.support(x_prime)?;
    let z = spec.normalizer(x)?;
    let z_prime = spec.normalizer(x_prime)?;
    let kernel = spec.kernel();
    let scale = epsilon.exp();

    let mut shared = false;
    let mut leakage = 0.0;
    let mut overlap = 0.0;
    for &y in support {
        let d = spec.distance(x, y)?;
        let p = kernel.weight(d) / z;
        if support_prime.binary_search(&y).is_err() {
            leakage += p;
            continue;
        }
        shared = true;
        let d_prime = spec.distance(x_prime, y)?;
        let loss = kernel.kernel_loss(d, d_prime) + (z_prime / z).ln();
        if loss > epsilon {
            let q = kernel.weight(d_prime) / z_prime;
            overlap += (p - scale * q).max(0.0);
        }
    }
    if !shared {
        return Ok(DefectBreakdown::full_leakage());
    }
    Ok(DefectBreakdown::from_parts(leakage, overlap))
}

/// Largest ordered defect over all input pairs, with the pair attaining it.
pub fn max_defect(spec: &MechanismSpec, epsilon: f64) -> Result<(DefectBreakdown, i64, i64)> {
    let mut best: Option<(DefectBreakdown, i64, i64)> = None;
    for &x in spec.inputs() {
        for &x_prime in spec.inputs() {
            let d = ordered_defect(spec, x, x_prime, epsilon)?;
            if best.is_none_or(|(b, _, _)| d.total > b.total) {
                best = Some((d, x, x_prime));
            }
        }
    }
    Ok(best.expect("spec has at least one input"))
}

/// Defect between inputs `0` and `h` of a radius-`t` truncated channel,
/// split into leakage and overlap terms.
///
/// Leakage is the mass of offsets `-t ..= h - t - 1`; the overlap runs over
/// offsets `h - t ..= t` with loss `log w(|k|) - log w(|k - h|)`.
/// Separations beyond `2t` give disjoint supports and a defect of exactly 1.
pub fn separation_breakdown(family: KernelFamily, radius: u64, h: u64, epsilon: f64) -> DefectBreakdown {
    if h == 0 {
        return DefectBreakdown::default();
    }
    if h > 2 * radius {
        return DefectBreakdown::full_leakage();
    }
    let mechanism = TruncatedMechanism::from_radius(family, radius);
    let c = mechanism.normalizer();
    let (t, h) = (radius as i64, h as i64);
    let scale = epsilon.exp();

    let leakage: f64 = (-t..h - t).map(|k| mechanism.weight_at(k)).sum();
    let mut overlap = 0.0;
    for k in h - t..=t {
        let loss = family.kernel_loss(k.unsigned_abs() as f64, (k - h).unsigned_abs() as f64);
        if loss > epsilon {
            overlap += (mechanism.weight_at(k) - scale * mechanism.weight_at(k - h)).max(0.0);
        }
    }
    DefectBreakdown::from_parts(leakage / c, overlap / c)
}

pub fn separation_defect(family: KernelFamily, radius: u64, h: u64, epsilon: f64) -> f64 {
    separation_breakdown(family, radius, h, epsilon).total
}

/// Separation defect of the truncated discrete-Laplace channel.
pub fn separation_defect_laplace(epsilon: f64, lambda: f64, radius: u64, h: u64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(separation_defect(KernelFamily::laplace(lambda)?, radius, h, epsilon))
}

/// Separation defect of the truncated Gaussian channel.
pub fn separation_defect_gaussian(epsilon: f64, sigma: f64, radius: u64, h: u64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(separation_defect(KernelFamily::gaussian(sigma)?, radius, h, epsilon))
}

/// Worst separation defect over `h ∈ {0, ..., H}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub delta_star: f64,
    /// Smallest maximizing separation.
    pub argmax_h: u64,
}

/// `δ* = max_{0 <= h <= H} δ_h`, ties broken toward the smallest `h`.
pub fn worst_case_defect(params: &TruncatedParams) -> WorstCase {
    let family = params.mechanism.family();
    let radius = params.mechanism.radius();
    // every h > 2t gives exactly 1, so the first one is the only candidate
    let last = params.privacy_range.min(2 * radius + 1);
    let mut best = WorstCase {
        delta_star: 0.0,
        argmax_h: 0,
    };
    for h in 1..=last {
        let d = separation_defect(family, radius, h, params.epsilon);
        if d > best.delta_star {
            best = WorstCase {
                delta_star: d,
                argmax_h: h,
            };
        }
    }
    best
}

/// Per-separation breakdown for `h ∈ {0, ..., H}`.
pub fn defect_profile(params: &TruncatedParams) -> Vec<(u64, DefectBreakdown)> {
    let family = params.mechanism.family();
    let radius = params.mechanism.radius();
    (0..=params.privacy_range)
        .map(|h| (h, separation_breakdown(family, radius, h, params.epsilon)))
        .collect()
}

/// `κ_h = h/2 - σ²ε/h`: the Gaussian overlap summand at offset `k` is
/// positive iff `k < κ_h`.
pub fn gaussian_overlap_threshold(h: u64, sigma: f64, epsilon: f64) -> Result<f64> {
    if h == 0 {
        return Err(Error::ZeroSeparation);
    }
    KernelFamily::gaussian(sigma)?;
    check_epsilon(epsilon)?;
    let h = h as f64;
    Ok(h / 2.0 - sigma * sigma * epsilon / h)
}
