//! Ensemble studies: sample a state class, record every state's monogamy
//! ingredients, then reduce the records to the nonmonogamous fraction
//! `f(alpha)`, the two critical powers, the area `M_Q` under `f`, moments
//! of the score distribution and histograms.
//!
//! Record `k` of an ensemble is always produced from `RandomSeed(base_seed, k)`
//! and reductions run in index order, so results do not depend on the
//! number of workers.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::measures::MeasureKind;
use crate::monogamy::{
    alpha_crossing, measure_state, AlphaCrossing, MonogamyError, MonogamyRecord,
    NonmonogamyProfile, ALPHA_MAX,
};
use crate::states::{sample_haar_pure, sample_w_class, RandomSeed, StateError};

/// Default bisection tolerance for the critical powers.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Successive halvings of the `M_Q` quadrature step must agree to this.
pub const M_Q_CONVERGENCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("invalid ensemble: {0}")]
    InvalidSpec(String),
    #[error("no records to reduce")]
    Empty,
    #[error("ensemble stopped after {completed} records: {source}")]
    Partial {
        completed: usize,
        #[source]
        source: MonogamyError,
    },
    #[error("alpha_c exceeds {ALPHA_MAX}; the area under f is undefined")]
    UnboundedAlphaC,
    #[error("invalid histogram: {0}")]
    Histogram(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Which random ensemble states are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateClass {
    /// Haar-uniform pure states; for three qubits these are GHZ-class with
    /// probability one.
    Haar,
    /// The three-qubit W-class family.
    WClass,
}

impl StateClass {
    pub fn name(self) -> &'static str {
        match self {
            StateClass::Haar => "haar",
            StateClass::WClass => "w-class",
        }
    }

    pub fn sample(
        self,
        n_qubits: usize,
        seed: RandomSeed,
    ) -> Result<crate::states::PureState, StateError> {
        match self {
            StateClass::Haar => sample_haar_pure(n_qubits, seed),
            StateClass::WClass => Ok(sample_w_class(seed)),
        }
    }
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "ghz" | "ghz-class" => Ok(StateClass::Haar),
            "w" | "w-class" => Ok(StateClass::WClass),
            other => Err(format!("unknown state class `{other}`")),
        }
    }
}

/// Strictly increasing positive powers at which `f` is tabulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AlphaGrid(Vec<f64>);

impl AlphaGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, EnsembleError> {
        if points.is_empty() {
            return Err(EnsembleError::InvalidSpec("alpha grid is empty".into()));
        }
        if points.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(EnsembleError::InvalidSpec(
                "alpha grid must be positive and finite".into(),
            ));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EnsembleError::InvalidSpec(
                "alpha grid must be strictly increasing".into(),
            ));
        }
        Ok(Self(points))
    }

    /// 16 geometric points on `[1e-3, 0.05]`, then steps of 0.01 up to 4
    /// and steps of 0.25 up to 20.
    pub fn standard() -> Self {
        let mut points: Vec<f64> = (0..16)
            .map(|k| 1e-3 * (0.05f64 / 1e-3).powf(k as f64 / 15.0))
            .collect();
        points[15] = 0.05;
        points.extend((6..=400).map(|k| k as f64 / 100.0));
        points.extend((1..=64).map(|k| 4.0 + k as f64 * 0.25));
        Self(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self::standard()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub state_class: StateClass,
    pub n_qubits: usize,
    pub n_samples: usize,
    pub measure: MeasureKind,
    /// Register index of the nodal observer.
    pub nodal: usize,
    pub base_seed: u64,
    pub alpha_grid: AlphaGrid,
    pub workers: usize,
}

impl EnsembleSpec {
    pub fn new(
        state_class: StateClass,
        n_qubits: usize,
        measure: MeasureKind,
        n_samples: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            state_class,
            n_qubits,
            n_samples,
            measure,
            nodal: 0,
            base_seed,
            alpha_grid: AlphaGrid::standard(),
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.state_class == StateClass::WClass && self.n_qubits != 3 {
            return Err(EnsembleError::InvalidSpec(format!(
                "the W-class ensemble is three-qubit only, got {} qubits",
                self.n_qubits
            )));
        }
        if !(3..=crate::states::MAX_SAMPLED_QUBITS).contains(&self.n_qubits) {
            return Err(EnsembleError::InvalidSpec(format!(
                "qubit count {} outside 3..={}",
                self.n_qubits,
                crate::states::MAX_SAMPLED_QUBITS
            )));
        }
        if self.nodal >= self.n_qubits {
            return Err(EnsembleError::InvalidSpec(format!(
                "nodal qubit {} outside the register",
                self.nodal
            )));
        }
        if self.workers == 0 {
            return Err(EnsembleError::InvalidSpec(
                "at least one worker is required".into(),
            ));
        }
        AlphaGrid::new(self.alpha_grid.0.clone())?;
        Ok(())
    }
}

/// Samples and measures every state of the ensemble. On failure reports how
/// many leading records were completed.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<Vec<MonogamyRecord>, EnsembleError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| EnsembleError::Pool(e.to_string()))?;
    let results: Vec<Result<MonogamyRecord, MonogamyError>> = pool.install(|| {
        (0..spec.n_samples)
            .into_par_iter()
            .map(|k| {
                let seed = RandomSeed::new(spec.base_seed, k as u64);
                let state = spec
                    .state_class
                    .sample(spec.n_qubits, seed)
                    .map_err(crate::measures::MeasureError::from)?;
                measure_state(&state, spec.measure, spec.nodal)
            })
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    for (completed, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => records.push(rec),
            Err(source) => return Err(EnsembleError::Partial { completed, source }),
        }
    }
    Ok(records)
}

fn non_empty(records: &[MonogamyRecord]) -> Result<(), EnsembleError> {
    if records.is_empty() {
        return Err(EnsembleError::Empty);
    }
    Ok(())
}

/// Fraction of records whose score at `alpha` is below `-1e-10`.
pub fn fraction_nonmonogamous(
    records: &[MonogamyRecord],
    alpha: f64,
) -> Result<f64, EnsembleError> {
    non_empty(records)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(EnsembleError::InvalidSpec(format!(
            "alpha = {alpha} must be positive"
        )));
    }
    Ok(fraction_at(records, alpha))
}

fn fraction_at(records: &[MonogamyRecord], alpha: f64) -> f64 {
    let count = records.iter().filter(|r| r.is_nonmonogamous(alpha)).count();
    count as f64 / records.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionPoint {
    pub alpha: f64,
    pub f: f64,
}

pub fn fraction_curve(
    records: &[MonogamyRecord],
    grid: &AlphaGrid,
) -> Result<Vec<FractionPoint>, EnsembleError> {
    non_empty(records)?;
    Ok(grid
        .points()
        .iter()
        .map(|&alpha| FractionPoint {
            alpha,
            f: fraction_at(records, alpha),
        })
        .collect())
}

/// Largest power up to which every record is nonmonogamous. Zero when
/// `f < 1` already at the first grid point.
pub fn estimate_alpha_p(
    records: &[MonogamyRecord],
    grid: &AlphaGrid,
    tol: f64,
) -> Result<f64, EnsembleError> {
    non_empty(records)?;
    let all = |a: f64| records.iter().all(|r| r.is_nonmonogamous(a));
    let points = grid.points();
    let Some(last) = points
        .iter()
        .position(|&a| !all(a))
        .map(|k| k as isize - 1)
        .or(Some(points.len() as isize - 1))
    else {
        unreachable!()
    };
    if last < 0 {
        return Ok(0.0);
    }
    let last = last as usize;
    if last == points.len() - 1 {
        return Ok(points[last]);
    }
    let (mut lo, mut hi) = (points[last], points[last + 1]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if all(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Critical power: every sampled state is monogamous above it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaC {
    Finite(f64),
    /// Some record is still nonmonogamous at [`ALPHA_MAX`].
    ExceedsMax,
}

impl AlphaC {
    pub fn value(self) -> Option<f64> {
        match self {
            AlphaC::Finite(a) => Some(a),
            AlphaC::ExceedsMax => None,
        }
    }
}

impl fmt::Display for AlphaC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaC::Finite(a) => f.write_str(&crate::export::format_sig6(*a)),
            AlphaC::ExceedsMax => write!(f, "exceeds {ALPHA_MAX}"),
        }
    }
}

impl Serialize for AlphaC {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            AlphaC::Finite(a) => serializer.serialize_f64(*a),
            AlphaC::ExceedsMax => serializer.serialize_str(&self.to_string()),
        }
    }
}

/// Maximum over records of the per-record crossing power.
pub fn estimate_alpha_c(records: &[MonogamyRecord], tol: f64) -> Result<AlphaC, EnsembleError> {
    non_empty(records)?;
    let mut best: f64 = 0.0;
    for r in records {
        match alpha_crossing(r, tol) {
            AlphaCrossing::BeyondMax => return Ok(AlphaC::ExceedsMax),
            AlphaCrossing::At(a) => best = best.max(a),
            AlphaCrossing::Monogamous => {}
        }
    }
    Ok(AlphaC::Finite(best))
}

/// The same critical power read off the tabulated `f`: bisects between the
/// last grid power with `f > 0` and the next one.
pub fn alpha_c_from_fraction(
    records: &[MonogamyRecord],
    grid: &AlphaGrid,
    tol: f64,
) -> Result<AlphaC, EnsembleError> {
    non_empty(records)?;
    let any = |a: f64| records.iter().any(|r| r.is_nonmonogamous(a));
    let points = grid.points();
    let Some(last) = points.iter().rposition(|&a| any(a)) else {
        return Ok(AlphaC::Finite(0.0));
    };
    if last == points.len() - 1 {
        return Ok(if points[last] >= ALPHA_MAX {
            AlphaC::ExceedsMax
        } else {
            AlphaC::Finite(points[last])
        });
    }
    let (mut lo, mut hi) = (points[last], points[last + 1]);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if any(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(AlphaC::Finite(0.5 * (lo + hi)))
}

/// Trapezoidal area under `f` on `[0, alpha_c]`, with `f(0) = 1`. The
/// curve is cut at `alpha_c`; the last retained value is held up to it.
pub fn integrate_m(curve: &[FractionPoint], alpha_c: AlphaC) -> Result<f64, EnsembleError> {
    let Some(alpha_c) = alpha_c.value() else {
        return Err(EnsembleError::UnboundedAlphaC);
    };
    let mut nodes = vec![(0.0, 1.0)];
    nodes.extend(
        curve
            .iter()
            .filter(|p| p.alpha > 0.0 && p.alpha < alpha_c)
            .map(|p| (p.alpha, p.f)),
    );
    if alpha_c > 0.0 {
        let held = nodes.last().map(|n| n.1).unwrap_or(1.0);
        nodes.push((alpha_c, held));
    } else {
        return Ok(0.0);
    }
    Ok(nodes
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum())
}

/// `f` evaluated from the records' nonmonogamous intervals, so arbitrarily
/// fine curves cost a binary search per point.
pub struct FractionProfile {
    starts: Vec<f64>,
    ends: Vec<f64>,
    n: f64,
}

impl FractionProfile {
    pub fn new(records: &[MonogamyRecord], tol: f64) -> Result<Self, EnsembleError> {
        non_empty(records)?;
        let mut starts = Vec::new();
        let mut ends = Vec::new();
        for r in records {
            for (a, b) in NonmonogamyProfile::of(r, tol).intervals {
                starts.push(a);
                ends.push(b);
            }
        }
        starts.sort_by(f64::total_cmp);
        ends.sort_by(f64::total_cmp);
        Ok(Self {
            starts,
            ends,
            n: records.len() as f64,
        })
    }

    pub fn fraction(&self, alpha: f64) -> f64 {
        let opened = self.starts.partition_point(|&s| s < alpha);
        let closed = self.ends.partition_point(|&e| e < alpha);
        (opened - closed) as f64 / self.n
    }

    /// Uniform curve with `intervals` steps on `[0, upto]`, excluding 0.
    pub fn uniform_curve(&self, upto: f64, intervals: usize) -> Vec<FractionPoint> {
        let h = upto / intervals as f64;
        (1..=intervals)
            .map(|k| {
                let alpha = k as f64 * h;
                FractionPoint {
                    alpha,
                    f: self.fraction(alpha),
                }
            })
            .collect()
    }
}

/// `M_Q` by trapezoidal quadrature on uniform grids, halving the step until
/// successive results agree within [`M_Q_CONVERGENCE`].
pub fn m_q(records: &[MonogamyRecord], alpha_c: AlphaC, tol: f64) -> Result<f64, EnsembleError> {
    let Some(upto) = alpha_c.value() else {
        return Err(EnsembleError::UnboundedAlphaC);
    };
    if upto <= 0.0 {
        return Ok(0.0);
    }
    let profile = FractionProfile::new(records, tol)?;
    // points strictly inside [0, alpha_c]; the end node repeats the last one
    let integrate = |k: usize| {
        let mut curve = profile.uniform_curve(upto, k);
        curve.pop();
        integrate_m(&curve, alpha_c)
    };
    let mut intervals = 256;
    let mut previous = integrate(intervals)?;
    while intervals < 1 << 20 {
        intervals *= 2;
        let next = integrate(intervals)?;
        if (next - previous).abs() < M_Q_CONVERGENCE {
            return Ok(next);
        }
        previous = next;
    }
    Ok(previous)
}

/// Population mean, variance and skewness. Skewness is `None` when the
/// standard deviation is below `1e-12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: Option<f64>,
}

pub fn moments_of(values: &[f64]) -> Result<Moments, EnsembleError> {
    if values.is_empty() {
        return Err(EnsembleError::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sd = variance.sqrt();
    let skewness = (sd >= 1e-12).then(|| {
        values
            .iter()
            .map(|x| ((x - mean) / sd).powi(3))
            .sum::<f64>()
            / n
    });
    Ok(Moments {
        mean,
        variance,
        skewness,
    })
}

pub fn scores(records: &[MonogamyRecord], alpha: f64) -> Result<Vec<f64>, EnsembleError> {
    records
        .iter()
        .map(|r| {
            r.score(alpha)
                .map_err(|e| EnsembleError::InvalidSpec(e.to_string()))
        })
        .collect()
}

pub fn distribution_stats(
    records: &[MonogamyRecord],
    alpha: f64,
) -> Result<Moments, EnsembleError> {
    non_empty(records)?;
    moments_of(&scores(records, alpha)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub rel_freq: f64,
}

/// Equal-width histogram of `values` on `[lo, hi]`; values outside the
/// range land in the edge bins.
pub fn histogram_of(
    values: &[f64],
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<Vec<HistogramBin>, EnsembleError> {
    if bins == 0 {
        return Err(EnsembleError::Histogram(
            "at least one bin is required".into(),
        ));
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(EnsembleError::Histogram(format!(
            "range ({lo}, {hi}) is empty"
        )));
    }
    if values.is_empty() {
        return Err(EnsembleError::Empty);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values {
        let k = ((x - lo) / width).floor();
        let k = if k.is_nan() || k < 0.0 {
            0
        } else {
            (k as usize).min(bins - 1)
        };
        counts[k] += 1;
    }
    let n = values.len() as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(k, &c)| HistogramBin {
            bin_left: lo + k as f64 * width,
            bin_right: if k + 1 == bins {
                hi
            } else {
                lo + (k + 1) as f64 * width
            },
            rel_freq: c as f64 / n,
        })
        .collect())
}

pub fn histogram(
    records: &[MonogamyRecord],
    alpha: f64,
    bins: usize,
    range: (f64, f64),
) -> Result<Vec<HistogramBin>, EnsembleError> {
    histogram_of(&scores(records, alpha)?, bins, range.0, range.1)
}

/// Haar average of the one-qubit reduced entropy of an `n`-qubit pure
/// state, in bits: `log2(e) (sum_{j=2^{n-1}+1}^{2^n} 1/j - 2^{-n})`.
pub fn mean_single_qubit_entropy(n_qubits: u32) -> f64 {
    let big = 1u64 << n_qubits;
    let harmonic: f64 = ((big / 2 + 1)..=big).map(|j| 1.0 / j as f64).sum();
    std::f64::consts::LOG2_E * (harmonic - 1.0 / big as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub alpha: f64,
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryOptions {
    /// Powers at which moments are reported.
    pub moment_alphas: Vec<f64>,
    pub histogram: Option<HistogramSpec>,
    pub tol: f64,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self {
            moment_alphas: vec![1.0, 2.0],
            histogram: None,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentsAt {
    pub alpha: f64,
    #[serde(flatten)]
    pub moments: Moments,
}

/// Reduction of one `(class, N, measure)` ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub state_class: StateClass,
    pub n_qubits: usize,
    pub measure: MeasureKind,
    #[serde(rename = "nodal_index")]
    pub nodal: usize,
    pub n_samples: usize,
    pub base_seed: u64,
    pub f_curve: Vec<FractionPoint>,
    pub alpha_p: f64,
    pub alpha_c: AlphaC,
    /// `alpha_c` recomputed from the tabulated `f`, as a consistency check.
    pub alpha_c_from_f: AlphaC,
    pub m_q: Option<f64>,
    pub moments: Vec<MomentsAt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<HistogramBin>>,
}

pub fn summarize(
    spec: &EnsembleSpec,
    records: &[MonogamyRecord],
    options: &SummaryOptions,
) -> Result<EnsembleSummary, EnsembleError> {
    non_empty(records)?;
    let tol = options.tol;
    let alpha_c = estimate_alpha_c(records, tol)?;
    let alpha_p = estimate_alpha_p(records, &spec.alpha_grid, tol)?;
    let m_q = match alpha_c {
        AlphaC::Finite(_) => Some(m_q(records, alpha_c, tol)?),
        AlphaC::ExceedsMax => None,
    };
    let moments = options
        .moment_alphas
        .iter()
        .map(|&alpha| {
            Ok(MomentsAt {
                alpha,
                moments: distribution_stats(records, alpha)?,
            })
        })
        .collect::<Result<Vec<_>, EnsembleError>>()?;
    let histogram = options
        .histogram
        .map(|h| histogram(records, h.alpha, h.bins, (h.lo, h.hi)))
        .transpose()?;
    Ok(EnsembleSummary {
        state_class: spec.state_class,
        n_qubits: spec.n_qubits,
        measure: spec.measure,
        nodal: spec.nodal,
        n_samples: records.len(),
        base_seed: spec.base_seed,
        f_curve: fraction_curve(records, &spec.alpha_grid)?,
        alpha_p,
        alpha_c,
        alpha_c_from_f: alpha_c_from_fraction(records, &spec.alpha_grid, tol)?,
        m_q,
        moments,
        histogram,
    })
}

/// [`run_ensemble`] followed by [`summarize`].
pub fn run_and_summarize(
    spec: &EnsembleSpec,
    options: &SummaryOptions,
) -> Result<EnsembleSummary, EnsembleError> {
    let records = run_ensemble(spec)?;
    summarize(spec, &records, options)
}
