//! Monogamy scores `delta_{Q^alpha} = Q^alpha(nodal:rest) - sum_i Q^alpha(nodal:i)`.
//!
//! A [`MonogamyRecord`] stores the alpha-independent ingredients for one
//! state, so any power can be scored afterwards without touching the state
//! again.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{pure_cut_value, two_qubit_value, MeasureError, MeasureKind};
use crate::states::{partial_trace, PureState};

/// Entries outside `[-RECORD_SLACK, 1 + RECORD_SLACK]` are rejected; entries
/// inside are clamped to `[0, 1]`.
pub const RECORD_SLACK: f64 = 1e-8;
/// Largest power searched for a sign change of the score.
pub const ALPHA_MAX: f64 = 20.0;
pub const CROSSING_GRID_MIN: f64 = 1e-3;
pub const CROSSING_GRID_POINTS: usize = 64;
/// Absolute accuracy assumed for every measured value `q`.
pub const VALUE_ACCURACY: f64 = 1e-13;
/// Relative accuracy of the powered terms.
pub const TERM_ACCURACY: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonogamyError {
    #[error("monogamy scores need at least three qubits, got {0}")]
    TooFewQubits(usize),
    #[error("nodal qubit {nodal} outside a register of {n_qubits} qubits")]
    InvalidNodal { nodal: usize, n_qubits: usize },
    #[error("power alpha = {0} must be positive and finite")]
    InvalidAlpha(f64),
    #[error("measure value {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Per-state ingredients of the monogamy score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonogamyRecord {
    /// `Q(nodal : rest)`.
    pub q_rest: f64,
    /// `Q(nodal : i)` for every other qubit `i`, ascending.
    pub q_pair: Vec<f64>,
    pub measure: MeasureKind,
    pub nodal: usize,
}

fn clamp_entry(x: f64) -> Result<f64, MonogamyError> {
    if !(-RECORD_SLACK..=1.0 + RECORD_SLACK).contains(&x) || x.is_nan() {
        return Err(MonogamyError::OutOfRange(x));
    }
    Ok(x.clamp(0.0, 1.0))
}

impl MonogamyRecord {
    /// Builds a record from raw values, applying the range policy.
    pub fn new(
        q_rest: f64,
        q_pair: Vec<f64>,
        measure: MeasureKind,
        nodal: usize,
    ) -> Result<Self, MonogamyError> {
        Ok(Self {
            q_rest: clamp_entry(q_rest)?,
            q_pair: q_pair
                .into_iter()
                .map(clamp_entry)
                .collect::<Result<_, _>>()?,
            measure,
            nodal,
        })
    }

    /// `q_rest^alpha - sum q_pair^alpha` with `0^alpha = 0`.
    pub fn score(&self, alpha: f64) -> Result<f64, MonogamyError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(MonogamyError::InvalidAlpha(alpha));
        }
        Ok(self.score_unchecked(alpha))
    }

    #[inline]
    pub(crate) fn score_unchecked(&self, alpha: f64) -> f64 {
        let pow = |x: f64| if x > 0.0 { x.powf(alpha) } else { 0.0 };
        pow(self.q_rest) - self.q_pair.iter().map(|&q| pow(q)).sum::<f64>()
    }

    /// Score together with its round-off bound: the first-order effect of
    /// a [`VALUE_ACCURACY`] error in every non-zero value plus
    /// [`TERM_ACCURACY`] of the larger side.
    pub fn score_with_bound(&self, alpha: f64) -> (f64, f64) {
        let mut rest = 0.0;
        let mut pairs = 0.0;
        let mut slope = 0.0;
        for (k, &q) in std::iter::once(&self.q_rest)
            .chain(&self.q_pair)
            .enumerate()
        {
            if q > 0.0 {
                let t = q.powf(alpha);
                slope += t / q;
                if k == 0 {
                    rest = t;
                } else {
                    pairs += t;
                }
            }
        }
        let bound = VALUE_ACCURACY * alpha * slope + TERM_ACCURACY * rest.max(pairs);
        (rest - pairs, bound)
    }

    /// Negative beyond its round-off bound.
    #[inline]
    pub fn is_nonmonogamous(&self, alpha: f64) -> bool {
        let (score, bound) = self.score_with_bound(alpha);
        score < -bound
    }
}

/// Evaluates `measure` on the nodal:rest cut and on every nodal:i pair.
/// In each pair the nodal qubit is the first party, so right-direction
/// discord and work deficit measure the non-nodal qubit.
pub fn measure_state(
    state: &PureState,
    measure: MeasureKind,
    nodal: usize,
) -> Result<MonogamyRecord, MonogamyError> {
    let n = state.n_qubits();
    if n < 3 {
        return Err(MonogamyError::TooFewQubits(n));
    }
    if nodal >= n {
        return Err(MonogamyError::InvalidNodal { nodal, n_qubits: n });
    }
    let q_rest = pure_cut_value(state, nodal, measure)?;
    let q_pair = (0..n)
        .filter(|&i| i != nodal)
        .map(|i| {
            let rho = partial_trace(state, &[nodal, i]).map_err(MeasureError::from)?;
            Ok(two_qubit_value(&rho, measure)?)
        })
        .collect::<Result<Vec<_>, MonogamyError>>()?;
    MonogamyRecord::new(q_rest, q_pair, measure, nodal)
}

pub fn score(record: &MonogamyRecord, alpha: f64) -> Result<f64, MonogamyError> {
    record.score(alpha)
}

/// Where a record's score last changes sign on `(0, ALPHA_MAX]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaCrossing {
    /// Never nonmonogamous on the search grid.
    Monogamous,
    /// Nonmonogamous just below this power, monogamous from it up to `ALPHA_MAX`.
    At(f64),
    /// Still nonmonogamous at `ALPHA_MAX`.
    BeyondMax,
}

impl AlphaCrossing {
    pub fn root(self) -> Option<f64> {
        match self {
            AlphaCrossing::At(a) => Some(a),
            _ => None,
        }
    }
}

/// Geometric grid from [`CROSSING_GRID_MIN`] to [`ALPHA_MAX`].
pub fn crossing_grid() -> Vec<f64> {
    let ratio = (ALPHA_MAX / CROSSING_GRID_MIN).powf(1.0 / (CROSSING_GRID_POINTS - 1) as f64);
    let mut grid: Vec<f64> = (0..CROSSING_GRID_POINTS)
        .map(|k| CROSSING_GRID_MIN * ratio.powi(k as i32))
        .collect();
    grid[CROSSING_GRID_POINTS - 1] = ALPHA_MAX;
    grid
}

/// Bisects the boundary between a nonmonogamous `lo` and a monogamous `hi`.
fn bisect(record: &MonogamyRecord, mut lo: f64, mut hi: f64, tol: f64, lo_state: bool) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if record.is_nonmonogamous(mid) == lo_state {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest power at which the score changes sign, located on the geometric
/// crossing grid and refined by bisection to `tol`.
pub fn alpha_crossing(record: &MonogamyRecord, tol: f64) -> AlphaCrossing {
    let grid = crossing_grid();
    let last_negative = grid.iter().rposition(|&a| record.is_nonmonogamous(a));
    match last_negative {
        None => AlphaCrossing::Monogamous,
        Some(k) if k == grid.len() - 1 => AlphaCrossing::BeyondMax,
        Some(k) => AlphaCrossing::At(bisect(record, grid[k], grid[k + 1], tol, true)),
    }
}

/// The set of powers in `(0, ALPHA_MAX]` where a record is nonmonogamous,
/// as disjoint intervals resolved on the crossing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NonmonogamyProfile {
    pub intervals: Vec<(f64, f64)>,
}

impl NonmonogamyProfile {
    pub fn of(record: &MonogamyRecord, tol: f64) -> Self {
        let grid = crossing_grid();
        let flags: Vec<bool> = grid.iter().map(|&a| record.is_nonmonogamous(a)).collect();
        let mut intervals = Vec::new();
        let mut start = if flags[0] { Some(0.0) } else { None };
        for k in 1..grid.len() {
            match (flags[k - 1], flags[k]) {
                (false, true) => start = Some(bisect(record, grid[k - 1], grid[k], tol, false)),
                (true, false) => {
                    let end = bisect(record, grid[k - 1], grid[k], tol, true);
                    intervals.push((start.take().unwrap_or(0.0), end));
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            intervals.push((s, ALPHA_MAX));
        }
        Self { intervals }
    }

    /// Lebesgue measure of the nonmonogamous set within `[0, upto]`.
    pub fn length_within(&self, upto: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| (b.min(upto) - a).max(0.0))
            .sum()
    }
}
