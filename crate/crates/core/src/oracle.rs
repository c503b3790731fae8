//! Reference computations of the hockey-stick divergence on dense
//! probability vectors, independent of the support decomposition.

use crate::error::{Error, Result};
use crate::mechanism::check_epsilon;

/// Largest vector length accepted by [`max_event_excess`].
pub const MAX_ENUMERATION_LEN: usize = 20;

const SUM_TOLERANCE: f64 = 1e-9;

fn validate(p: &[f64], q: &[f64], epsilon: f64) -> Result<()> {
    check_epsilon(epsilon)?;
    if p.len() != q.len() {
        return Err(Error::InvalidArgument(format!(
            "probability vectors have different lengths ({} and {})",
            p.len(),
            q.len()
        )));
    }
    for v in [p, q] {
        if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidArgument(format!("invalid probability {x}")));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized(sum));
        }
    }
    Ok(())
}

/// `Σ_y [p(y) - e^ε q(y)]_+`.
pub fn brute_force_defect(p: &[f64], q: &[f64], epsilon: f64) -> Result<f64> {
    validate(p, q, epsilon)?;
    let scale = epsilon.exp();
    Ok(p.iter().zip(q).map(|(a, b)| (a - scale * b).max(0.0)).sum())
}

/// `max_A p(A) - e^ε q(A)` by enumerating all `2^n` events.
pub fn max_event_excess(p: &[f64], q: &[f64], epsilon: f64) -> Result<f64> {
    validate(p, q, epsilon)?;
    if p.len() > MAX_ENUMERATION_LEN {
        return Err(Error::InvalidArgument(format!(
            "exhaustive enumeration is limited to {MAX_ENUMERATION_LEN} atoms, got {}",
            p.len()
        )));
    }
    let scale = epsilon.exp();
    let mut best = 0.0f64; // empty event
    for mask in 1u32..(1u32 << p.len()) {
        let (mut pa, mut qa) = (0.0, 0.0);
        for i in 0..p.len() {
            if mask & (1 << i) != 0 {
                pa += p[i];
                qa += q[i];
            }
        }
        best = best.max(pa - scale * qa);
    }
    Ok(best)
}
