//! Support-size calibration for truncated channels: feasibility thresholds,
//! clean-regime bounds, and the exact minimum-support design search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{
    check_epsilon, DistortionMoments, FamilyKind, KernelFamily, TruncatedMechanism, TruncatedParams,
};
use crate::privacy::worst_case_defect;

/// Smallest odd integer `>= x` (and `>= 1`).
pub fn ceil_odd(x: f64) -> u64 {
    let c = x.ceil().max(1.0) as u64;
    if c.is_multiple_of(2) {
        c + 1
    } else {
        c
    }
}

/// Largest odd integer `<= x`, if any.
pub fn floor_odd(x: f64) -> Option<u64> {
    if x.is_nan() || x < 1.0 {
        return None;
    }
    let f = x.floor() as u64;
    Some(if f.is_multiple_of(2) { f - 1 } else { f })
}

/// Smallest odd `s` with `s >= H + 1`. Below it some pair within range has
/// disjoint supports and the defect is 1.
pub fn feasibility_min_support(range: u64) -> u64 {
    if range.is_multiple_of(2) {
        range + 1
    } else {
        range + 2
    }
}

/// Outcome of a clean-regime check, where the overlap term vanishes for
/// every separation in range and only support leakage is left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanBoundReport {
    pub applicable: bool,
    pub condition_overlap: bool,
    pub condition_size: bool,
    /// `max_{h <= H}` of the leakage-only defect, when applicable.
    pub exact_leakage_delta: Option<f64>,
    pub upper_bound: Option<f64>,
}

/// `(1 / C_t) Σ_{j = t-h+1}^{t} w(j)`: mass that input 0 puts beyond the
/// window of input `h`.
fn leakage_only(mechanism: &TruncatedMechanism, h: u64) -> f64 {
    let t = mechanism.radius();
    let tail: f64 = (t + 1 - h..=t).map(|j| mechanism.weight_at(j as i64)).sum();
    tail / mechanism.normalizer()
}

fn clean_report(
    mechanism: TruncatedMechanism,
    range: u64,
    condition_overlap: bool,
    bound: impl Fn(f64) -> f64,
) -> CleanBoundReport {
    let condition_size = mechanism.support_size() > 2 * range;
    let applicable = condition_overlap && condition_size;
    if !applicable {
        return CleanBoundReport {
            applicable,
            condition_overlap,
            condition_size,
            exact_leakage_delta: None,
            upper_bound: None,
        };
    }
    let exact = (1..=range)
        .map(|h| leakage_only(&mechanism, h))
        .fold(0.0, f64::max);
    let t = mechanism.radius() as f64;
    let upper = if range == 0 {
        0.0
    } else {
        range as f64 * bound(t - range as f64 + 1.0)
    };
    CleanBoundReport {
        applicable,
        condition_overlap,
        condition_size,
        exact_leakage_delta: Some(exact),
        upper_bound: Some(upper),
    }
}

/// Clean regime of the truncated discrete-Laplace channel:
/// `λH <= ε` and `s >= 2H + 1`, with bound `H e^{-λ(t - H + 1)}`.
pub fn laplace_clean_bound(epsilon: f64, lambda: f64, support_size: u64, range: u64) -> Result<CleanBoundReport> {
    check_epsilon(epsilon)?;
    let mechanism = TruncatedMechanism::new(KernelFamily::laplace(lambda)?, support_size)?;
    let condition_overlap = lambda * range as f64 <= epsilon;
    Ok(clean_report(mechanism, range, condition_overlap, |gap| {
        (-lambda * gap).exp()
    }))
}

/// Clean regime of the truncated Gaussian channel:
/// `ε >= H(2t - H) / (2σ²)` and `s >= 2H + 1`, with bound
/// `H e^{-(t - H + 1)² / (2σ²)}`.
pub fn gaussian_clean_bound(epsilon: f64, sigma: f64, support_size: u64, range: u64) -> Result<CleanBoundReport> {
    check_epsilon(epsilon)?;
    let mechanism = TruncatedMechanism::new(KernelFamily::gaussian(sigma)?, support_size)?;
    let t = mechanism.radius() as i128;
    let h = range as i128;
    let worst_loss = (h * (2 * t - h)) as f64 / (2.0 * sigma * sigma);
    let condition_overlap = epsilon >= worst_loss;
    Ok(clean_report(mechanism, range, condition_overlap, |gap| {
        (-(gap * gap) / (2.0 * sigma * sigma)).exp()
    }))
}

/// Smallest odd `s` with `s >= 2H - 1 + (2/λ) log(H/δ)` and `s >= 2H + 1`.
/// Requires the Laplace overlap condition `λH <= ε`.
pub fn laplace_sufficient_support(epsilon: f64, delta: f64, lambda: f64, range: u64) -> Result<u64> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    KernelFamily::laplace(lambda)?;
    if range == 0 {
        return Err(Error::Precondition("privacy range must be at least 1".into()));
    }
    let h = range as f64;
    if lambda * h > epsilon {
        return Err(Error::Precondition(format!(
            "lambda * H = {} exceeds epsilon = {epsilon}; the overlap term does not vanish",
            lambda * h
        )));
    }
    let formula = 2.0 * h - 1.0 + (2.0 / lambda) * (h / delta).ln();
    Ok(ceil_odd(formula.max(2.0 * h + 1.0)))
}

/// Inclusive range of odd support sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportWindow {
    pub lo: u64,
    pub hi: u64,
}

impl SupportWindow {
    pub fn sizes(&self) -> impl Iterator<Item = u64> {
        (self.lo..=self.hi).step_by(2)
    }
}

/// Odd `s` with `2H - 1 + 2 sqrt(2σ² log(H/δ)) <= s <= H + 1 + 2σ²ε/H` and
/// `s >= 2H + 1`, or `None` when empty. The log term is clamped at 0 for
/// `δ >= H`.
pub fn gaussian_support_window(epsilon: f64, delta: f64, sigma: f64, range: u64) -> Result<Option<SupportWindow>> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    KernelFamily::gaussian(sigma)?;
    if range == 0 {
        return Err(Error::Precondition("privacy range must be at least 1".into()));
    }
    let h = range as f64;
    let var = sigma * sigma;
    let log_term = (h / delta).ln().max(0.0);
    let lower = 2.0 * h - 1.0 + 2.0 * (2.0 * var * log_term).sqrt();
    let lo = ceil_odd(lower.max(2.0 * h + 1.0));
    let Some(hi) = floor_odd(h + 1.0 + 2.0 * var * epsilon / h) else {
        return Ok(None);
    };
    Ok((lo <= hi).then_some(SupportWindow { lo, hi }))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    Ok(())
}

/// Outcome of the minimum-support search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub feasible: bool,
    pub s_chosen: Option<u64>,
    pub achieved_delta_star: Option<f64>,
    pub moments: Option<DistortionMoments>,
    /// Largest support size whose defect was evaluated.
    pub s_scanned_max: u64,
}

/// Scan limit used when the caller gives none: `2H + 1 + ceil(40/λ)` for
/// Laplace and `2H + 1 + ceil(8σ²) + 2H` for Gaussian, rounded up to odd.
pub fn default_s_max(family: KernelFamily, range: u64) -> u64 {
    let base = 2.0 * range as f64 + 1.0;
    let extra = match family {
        KernelFamily::DiscreteLaplace { lambda } => (40.0 / lambda).ceil(),
        KernelFamily::Gaussian { sigma } => (8.0 * sigma * sigma).ceil() + 2.0 * range as f64,
    };
    ceil_odd(base + extra)
}

/// Smallest odd `s <= s_max` whose exact `δ*` over range `H` is at most `δ`.
///
/// The scan is linear and ascending so the answer is certified minimal.
/// For `δ < 1` it starts at [`feasibility_min_support`], since every smaller
/// `s` has `δ* = 1`; for `δ = 1` every `s` qualifies and the scan starts at 1.
/// Since both distortion moments are nondecreasing in `s`, the result is
/// also the distortion-optimal feasible support size.
pub fn min_feasible_support(
    family: KernelFamily,
    epsilon: f64,
    delta: f64,
    range: u64,
    s_max: Option<u64>,
) -> Result<DesignResult> {
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    let s_max = s_max.unwrap_or_else(|| default_s_max(family, range));
    if s_max.is_multiple_of(2) {
        return Err(Error::EvenSupportSize(s_max));
    }
    let start = if delta >= 1.0 {
        1
    } else {
        feasibility_min_support(range)
    };

    let mut scanned = 0;
    for s in (start..=s_max).step_by(2) {
        let params = TruncatedParams::new(family, s, range, epsilon)?;
        let worst = worst_case_defect(&params);
        scanned = s;
        if worst.delta_star <= delta {
            return Ok(DesignResult {
                feasible: true,
                s_chosen: Some(s),
                achieved_delta_star: Some(worst.delta_star),
                moments: Some(params.mechanism.distortion_moments()),
                s_scanned_max: s,
            });
        }
    }
    Ok(DesignResult {
        feasible: false,
        s_chosen: None,
        achieved_delta_star: None,
        moments: None,
        s_scanned_max: scanned,
    })
}

/// One row of a support-size or kernel-parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub varied: f64,
    pub delta_star: f64,
    pub r1: f64,
    pub r2: f64,
}

fn row(varied: f64, params: &TruncatedParams) -> SweepRow {
    let moments = params.mechanism.distortion_moments();
    SweepRow {
        varied,
        delta_star: worst_case_defect(params).delta_star,
        r1: moments.r1,
        r2: moments.r2,
    }
}

/// `(s, δ*, R1, R2)` for each support size, in the given order.
pub fn sweep_support(family: KernelFamily, epsilon: f64, range: u64, sizes: &[u64]) -> Result<Vec<SweepRow>> {
    if sizes.is_empty() {
        return Err(Error::InvalidArgument("no support sizes to sweep".into()));
    }
    sizes
        .iter()
        .map(|&s| Ok(row(s as f64, &TruncatedParams::new(family, s, range, epsilon)?)))
        .collect()
}

/// `(param, δ*, R1, R2)` for each kernel parameter at fixed `s`.
pub fn sweep_param(
    kind: FamilyKind,
    params: &[f64],
    epsilon: f64,
    range: u64,
    support_size: u64,
) -> Result<Vec<SweepRow>> {
    if params.is_empty() {
        return Err(Error::InvalidArgument("no kernel parameters to sweep".into()));
    }
    params
        .iter()
        .map(|&p| {
            let family = kind.with_param(p)?;
            Ok(row(p, &TruncatedParams::new(family, support_size, range, epsilon)?))
        })
        .collect()
}
