//! Sparse channels `Q(y | x) ∝ w(x, y) · 1{y ∈ S(x)}` with a discrete-Laplace
//! or Gaussian kernel.
//!
//! Two representations are provided. [`MechanismSpec`] is the general form with
//! an explicit input alphabet, per-input support sets and an arbitrary distance.
//! [`TruncatedMechanism`] is the translation-invariant radius-truncated form on
//! the integers, where the support of `x` is the window `{x - t, ..., x + t}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel family without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Laplace,
    Gaussian,
}

impl FamilyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::Laplace => "laplace",
            FamilyKind::Gaussian => "gaussian",
        }
    }

    pub fn with_param(self, param: f64) -> Result<KernelFamily> {
        match self {
            FamilyKind::Laplace => KernelFamily::laplace(param),
            FamilyKind::Gaussian => KernelFamily::gaussian(param),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "laplace" | "discrete-laplace" => Ok(FamilyKind::Laplace),
            "gaussian" => Ok(FamilyKind::Gaussian),
            other => Err(Error::InvalidArgument(format!(
                "unknown kernel family `{other}` (expected `laplace` or `gaussian`)"
            ))),
        }
    }
}

/// Kernel `w(x, y)` as a function of the distance `d(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// `w = exp(-lambda * d)`, `lambda` is the inverse temperature.
    DiscreteLaplace { lambda: f64 },
    /// `w = exp(-d^2 / (2 sigma^2))`.
    Gaussian { sigma: f64 },
}

impl KernelFamily {
    pub fn laplace(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "lambda must be a positive finite number, got {lambda}"
            )));
        }
        Ok(KernelFamily::DiscreteLaplace { lambda })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "sigma must be a positive finite number, got {sigma}"
            )));
        }
        Ok(KernelFamily::Gaussian { sigma })
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            KernelFamily::DiscreteLaplace { .. } => FamilyKind::Laplace,
            KernelFamily::Gaussian { .. } => FamilyKind::Gaussian,
        }
    }

    /// `lambda` or `sigma`.
    pub fn param(&self) -> f64 {
        match *self {
            KernelFamily::DiscreteLaplace { lambda } => lambda,
            KernelFamily::Gaussian { sigma } => sigma,
        }
    }

    /// Unnormalized weight at distance `d`.
    #[inline]
    pub fn weight(&self, d: f64) -> f64 {
        match *self {
            KernelFamily::DiscreteLaplace { lambda } => (-lambda * d).exp(),
            KernelFamily::Gaussian { sigma } => (-(d * d) / (2.0 * sigma * sigma)).exp(),
        }
    }

    /// Log-ratio `log w(d_x) - log w(d_x_prime)`, i.e. the kernel part of the
    /// privacy loss of `x` against `x'` at an output at distances
    /// `d_x = d(x, y)` and `d_x_prime = d(x', y)`.
    ///
    /// The distance difference is formed before scaling so that integer
    /// distances give a loss that is monotone in that difference.
    #[inline]
    pub fn kernel_loss(&self, d_x: f64, d_x_prime: f64) -> f64 {
        match *self {
            KernelFamily::DiscreteLaplace { lambda } => lambda * (d_x_prime - d_x),
            KernelFamily::Gaussian { sigma } => {
                (d_x_prime * d_x_prime - d_x * d_x) / (2.0 * sigma * sigma)
            }
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFamily::DiscreteLaplace { lambda } => write!(f, "laplace(lambda={lambda})"),
            KernelFamily::Gaussian { sigma } => write!(f, "gaussian(sigma={sigma})"),
        }
    }
}

/// Distance `d(x, y)` between an input and an output.
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceModel {
    /// `|x - y|` on the integers.
    AbsoluteDifference,
    /// `values[i][j]` is the distance from the `i`-th input to the `j`-th
    /// output, in the order of [`MechanismSpec::inputs`] and
    /// [`MechanismSpec::outputs`].
    ExplicitMatrix(Vec<Vec<f64>>),
}

/// A general sparse channel over finite integer alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct MechanismSpec {
    kernel: KernelFamily,
    inputs: Vec<i64>,
    outputs: Vec<i64>,
    supports: BTreeMap<i64, Vec<i64>>,
    distance: DistanceModel,
    input_index: BTreeMap<i64, usize>,
    output_index: BTreeMap<i64, usize>,
}

impl MechanismSpec {
    /// Validates and builds a spec. Support sets are stored in ascending order.
    pub fn new(
        kernel: KernelFamily,
        inputs: Vec<i64>,
        outputs: Vec<i64>,
        supports: BTreeMap<i64, Vec<i64>>,
        distance: DistanceModel,
    ) -> Result<Self> {
        // re-run the constructor checks in case the kernel was built by hand
        kernel.kind().with_param(kernel.param())?;

        if inputs.is_empty() {
            return Err(Error::InvalidSpec("input alphabet is empty".into()));
        }
        if outputs.is_empty() {
            return Err(Error::InvalidSpec("output alphabet is empty".into()));
        }
        let input_index = index_of(&inputs, "inputs")?;
        let output_index = index_of(&outputs, "outputs")?;

        for key in supports.keys() {
            if !input_index.contains_key(key) {
                return Err(Error::InvalidSpec(format!(
                    "support given for {key}, which is not an input"
                )));
            }
        }

        let mut sorted_supports = BTreeMap::new();
        for &x in &inputs {
            let support = supports
                .get(&x)
                .ok_or_else(|| Error::InvalidSpec(format!("no support set for input {x}")))?;
            if support.is_empty() {
                return Err(Error::InvalidSpec(format!("support of input {x} is empty")));
            }
            let set: BTreeSet<i64> = support.iter().copied().collect();
            if set.len() != support.len() {
                return Err(Error::InvalidSpec(format!(
                    "support of input {x} contains duplicates"
                )));
            }
            if let Some(y) = set.iter().find(|y| !output_index.contains_key(y)) {
                return Err(Error::InvalidSpec(format!(
                    "support of input {x} contains {y}, which is not an output"
                )));
            }
            sorted_supports.insert(x, set.into_iter().collect());
        }

        if let DistanceModel::ExplicitMatrix(values) = &distance {
            if values.len() != inputs.len() {
                return Err(Error::InvalidSpec(format!(
                    "distance matrix has {} rows, expected {}",
                    values.len(),
                    inputs.len()
                )));
            }
            for (row, &x) in values.iter().zip(&inputs) {
                if row.len() != outputs.len() {
                    return Err(Error::InvalidSpec(format!(
                        "distance row for input {x} has {} entries, expected {}",
                        row.len(),
                        outputs.len()
                    )));
                }
                if let Some(v) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                    return Err(Error::InvalidSpec(format!(
                        "distance entry {v} for input {x} is not a nonnegative number"
                    )));
                }
                if let Some(&j) = output_index.get(&x) {
                    if row[j] != 0.0 {
                        return Err(Error::InvalidSpec(format!(
                            "d({x}, {x}) must be 0, got {}",
                            row[j]
                        )));
                    }
                }
            }
        }

        Ok(Self {
            kernel,
            inputs,
            outputs,
            supports: sorted_supports,
            distance,
            input_index,
            output_index,
        })
    }

    /// Convenience constructor using `d(x, y) = |x - y|`.
    pub fn with_abs_distance(
        kernel: KernelFamily,
        inputs: Vec<i64>,
        outputs: Vec<i64>,
        supports: BTreeMap<i64, Vec<i64>>,
    ) -> Result<Self> {
        Self::new(kernel, inputs, outputs, supports, DistanceModel::AbsoluteDifference)
    }

    pub fn kernel(&self) -> KernelFamily {
        self.kernel
    }

    pub fn inputs(&self) -> &[i64] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[i64] {
        &self.outputs
    }

    pub fn distance_model(&self) -> &DistanceModel {
        &self.distance
    }

    pub fn supports(&self) -> &BTreeMap<i64, Vec<i64>> {
        &self.supports
    }

    /// Support set `S(x)`, ascending.
    pub fn support(&self, x: i64) -> Result<&[i64]> {
        self.supports
            .get(&x)
            .map(Vec::as_slice)
            .ok_or(Error::InputNotFound(x))
    }

    pub fn contains_input(&self, x: i64) -> bool {
        self.input_index.contains_key(&x)
    }

    /// `d(x, y)`. `y` must be an output; `x` must be an input.
    pub fn distance(&self, x: i64, y: i64) -> Result<f64> {
        let i = *self.input_index.get(&x).ok_or(Error::InputNotFound(x))?;
        match &self.distance {
            DistanceModel::AbsoluteDifference => Ok((x - y).unsigned_abs() as f64),
            DistanceModel::ExplicitMatrix(values) => {
                let j = *self.output_index.get(&y).ok_or_else(|| {
                    Error::InvalidArgument(format!("{y} is not an output"))
                })?;
                Ok(values[i][j])
            }
        }
    }

    /// `Z_x` (Laplace) or `W_x` (Gaussian): the kernel mass of `S(x)`,
    /// summed in ascending output order.
    pub fn normalizer(&self, x: i64) -> Result<f64> {
        let mut total = 0.0;
        for &y in self.support(x)? {
            total += self.kernel.weight(self.distance(x, y)?);
        }
        Ok(total)
    }

    /// `Q(· | x)` restricted to `S(x)`; outputs outside the support are absent.
    pub fn pmf(&self, x: i64) -> Result<BTreeMap<i64, f64>> {
        Ok(self.support_pmf(x)?.into_iter().collect())
    }

    /// `Q(· | x)` as `(output, probability)` pairs over `S(x)`, ascending.
    pub fn support_pmf(&self, x: i64) -> Result<Vec<(i64, f64)>> {
        let z = self.normalizer(x)?;
        self.support(x)?
            .iter()
            .map(|&y| Ok((y, self.kernel.weight(self.distance(x, y)?) / z)))
            .collect()
    }

    /// `Q(· | x)` as a dense vector aligned with [`outputs`](Self::outputs).
    pub fn pmf_vector(&self, x: i64) -> Result<Vec<f64>> {
        let mut dense = vec![0.0; self.outputs.len()];
        for (y, p) in self.support_pmf(x)? {
            dense[self.output_index[&y]] = p;
        }
        Ok(dense)
    }
}

fn index_of(values: &[i64], what: &str) -> Result<BTreeMap<i64, usize>> {
    let mut index = BTreeMap::new();
    for (i, &v) in values.iter().enumerate() {
        if index.insert(v, i).is_some() {
            return Err(Error::InvalidSpec(format!("{what} contain duplicate value {v}")));
        }
    }
    Ok(index)
}

/// Radius-truncated channel on the integers: `Q(y | x) ∝ w(|x - y|)` for
/// `|x - y| <= t`, with support size `s = 2t + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedMechanism {
    family: KernelFamily,
    support_size: u64,
}

impl TruncatedMechanism {
    /// `support_size` must be odd.
    pub fn new(family: KernelFamily, support_size: u64) -> Result<Self> {
        if support_size.is_multiple_of(2) {
            return Err(Error::EvenSupportSize(support_size));
        }
        Ok(Self {
            family,
            support_size,
        })
    }

    pub fn from_radius(family: KernelFamily, radius: u64) -> Self {
        Self {
            family,
            support_size: 2 * radius + 1,
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn support_size(&self) -> u64 {
        self.support_size
    }

    /// `t = (s - 1) / 2`.
    pub fn radius(&self) -> u64 {
        (self.support_size - 1) / 2
    }

    /// Kernel weight at offset `k`.
    #[inline]
    pub fn weight_at(&self, k: i64) -> f64 {
        self.family.weight(k.unsigned_abs() as f64)
    }

    /// `C_t` or `Γ_t`: `sum_{k=-t}^{t} w(|k|)`, summed in ascending `k`.
    pub fn normalizer(&self) -> f64 {
        let t = self.radius() as i64;
        (-t..=t).map(|k| self.weight_at(k)).sum()
    }

    /// Probabilities at offsets `-t, ..., t`.
    pub fn offset_masses(&self) -> Vec<f64> {
        let t = self.radius() as i64;
        let c = self.normalizer();
        (-t..=t).map(|k| self.weight_at(k) / c).collect()
    }

    /// `Q(· | x)` on `{x - t, ..., x + t}`.
    pub fn pmf(&self, x: i64) -> BTreeMap<i64, f64> {
        self.support_pmf(x).into_iter().collect()
    }

    pub fn support_pmf(&self, x: i64) -> Vec<(i64, f64)> {
        let t = self.radius() as i64;
        (-t..=t).zip(self.offset_masses()).map(|(k, p)| (x + k, p)).collect()
    }

    /// Closed-form expected absolute and squared deviation of the output
    /// from the input.
    pub fn distortion_moments(&self) -> DistortionMoments {
        let c = self.normalizer();
        let (mut first, mut second) = (0.0, 0.0);
        for j in 1..=self.radius() {
            let w = self.weight_at(j as i64);
            let j = j as f64;
            first += j * w;
            second += j * j * w;
        }
        DistortionMoments {
            r1: 2.0 * first / c,
            r2: 2.0 * second / c,
        }
    }

    /// Materializes the channel restricted to `inputs` as a general spec
    /// with `d = |x - y|`. The output alphabet is the union of the windows.
    pub fn to_spec(&self, inputs: &[i64]) -> Result<MechanismSpec> {
        let t = self.radius() as i64;
        let mut supports = BTreeMap::new();
        let mut outputs = BTreeSet::new();
        for &x in inputs {
            let window: Vec<i64> = (x - t..=x + t).collect();
            outputs.extend(window.iter().copied());
            supports.insert(x, window);
        }
        MechanismSpec::with_abs_distance(
            self.family,
            inputs.to_vec(),
            outputs.into_iter().collect(),
            supports,
        )
    }
}

/// A truncated channel together with the privacy target it is analysed
/// against: separations up to `privacy_range` at level `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedParams {
    pub mechanism: TruncatedMechanism,
    pub privacy_range: u64,
    pub epsilon: f64,
}

impl TruncatedParams {
    pub fn new(
        family: KernelFamily,
        support_size: u64,
        privacy_range: u64,
        epsilon: f64,
    ) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(Self {
            mechanism: TruncatedMechanism::new(family, support_size)?,
            privacy_range,
            epsilon,
        })
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be a nonnegative finite number, got {epsilon}"
        )));
    }
    Ok(())
}

/// First and second distortion moments `E|Y - x|` and `E(Y - x)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionMoments {
    pub r1: f64,
    pub r2: f64,
}

/// Anything that yields a finite output distribution per input.
pub trait Channel {
    /// `(output, probability)` pairs over the support of `x`, ascending by output.
    fn support_distribution(&self, x: i64) -> Result<Vec<(i64, f64)>>;
}

impl Channel for MechanismSpec {
    fn support_distribution(&self, x: i64) -> Result<Vec<(i64, f64)>> {
        self.support_pmf(x)
    }
}

impl Channel for TruncatedMechanism {
    fn support_distribution(&self, x: i64) -> Result<Vec<(i64, f64)>> {
        Ok(self.support_pmf(x))
    }
}
