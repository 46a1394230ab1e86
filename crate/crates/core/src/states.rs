//! Pure states on qubit registers, reduced density matrices, and the random
//! state ensembles.
//!
//! Qubit `0` is the most significant bit of a computational-basis index, so
//! the amplitude of `|i_0 i_1 ... i_{n-1}>` sits at index
//! `i_0 2^{n-1} + ... + i_{n-1}`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, LinalgError};

pub const NORM_TOL: f64 = 1e-10;
pub const MIN_SAMPLED_QUBITS: usize = 2;
pub const MAX_SAMPLED_QUBITS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("amplitude vector of length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state norm {0} differs from one")]
    NotNormalized(f64),
    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },
    #[error("invalid qubit selection {selection:?} for a register of {n_qubits} qubits")]
    InvalidSelection {
        selection: Vec<usize>,
        n_qubits: usize,
    },
    #[error("{kind:?} state is not defined on {n_qubits} qubits")]
    IncompatibleKind { kind: NamedState, n_qubits: usize },
    #[error("operator is not unitary")]
    NotUnitary,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Normalized amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps amplitudes that are already normalized to within [`NORM_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n_qubits = register_size(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(StateError::NotNormalized(norm.sqrt()));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary non-zero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let n_qubits = register_size(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(StateError::NotNormalized(norm));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            labels: (0..self.n_qubits).collect(),
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }
}

fn register_size(len: usize) -> Result<usize, StateError> {
    if len < 2 || !len.is_power_of_two() {
        return Err(StateError::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Density matrix on an ordered list of register qubits; the first label is
/// the most significant factor of the matrix index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates hermiticity and trace. Positivity is checked lazily by the
    /// spectral routines that consume the matrix.
    pub fn new(labels: Vec<usize>, matrix: ComplexMatrix) -> Result<Self, StateError> {
        if matrix.dim() != 1usize << labels.len() {
            return Err(StateError::Linalg(LinalgError::Dimension(format!(
                "{} labels need dimension {}, got {}",
                labels.len(),
                1usize << labels.len(),
                matrix.dim()
            ))));
        }
        if !distinct(&labels) {
            let n_qubits = labels.len();
            return Err(StateError::InvalidSelection {
                selection: labels,
                n_qubits,
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > crate::linalg::HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { deviation }.into());
        }
        let deviation = (matrix.trace() - Complex64::new(1.0, 0.0)).norm();
        if deviation > crate::linalg::TRACE_TOL {
            return Err(LinalgError::BadTrace { deviation }.into());
        }
        Ok(Self { labels, matrix })
    }

    /// Density matrix on qubits `0..k` for a `2^k`-dimensional matrix.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self, StateError> {
        let k = register_size(matrix.dim())?;
        Self::new((0..k).collect(), matrix)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    fn positions(&self, selection: &[usize]) -> Result<Vec<usize>, StateError> {
        let invalid = || StateError::InvalidSelection {
            selection: selection.to_vec(),
            n_qubits: self.labels.len(),
        };
        if selection.is_empty() || !distinct(selection) {
            return Err(invalid());
        }
        selection
            .iter()
            .map(|l| self.labels.iter().position(|x| x == l).ok_or_else(invalid))
            .collect()
    }
}

fn distinct(xs: &[usize]) -> bool {
    xs.iter().enumerate().all(|(i, x)| !xs[..i].contains(x))
}

/// Splits a basis index into the index over `keep` (in the given order) and
/// the index over the remaining qubits (ascending).
struct IndexSplit {
    kept: Vec<usize>,
    rest: Vec<usize>,
    kept_dim: usize,
    rest_dim: usize,
}

impl IndexSplit {
    fn new(n: usize, keep: &[usize]) -> Self {
        let rest_qubits: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let gather = |i: usize, qubits: &[usize]| {
            qubits
                .iter()
                .fold(0usize, |acc, &q| (acc << 1) | ((i >> (n - 1 - q)) & 1))
        };
        let dim = 1usize << n;
        Self {
            kept: (0..dim).map(|i| gather(i, keep)).collect(),
            rest: (0..dim).map(|i| gather(i, &rest_qubits)).collect(),
            kept_dim: 1 << keep.len(),
            rest_dim: 1 << rest_qubits.len(),
        }
    }
}

/// Reduced density matrix of a pure state on the qubits in `keep`; the
/// order of `keep` fixes the factor order of the result.
pub fn partial_trace(state: &PureState, keep: &[usize]) -> Result<DensityMatrix, StateError> {
    let n = state.n_qubits;
    check_selection(keep, n)?;
    let split = IndexSplit::new(n, keep);
    // psi as a kept_dim x rest_dim matrix; rho = M M^dagger
    let mut m = vec![Complex64::new(0.0, 0.0); split.kept_dim * split.rest_dim];
    for (i, a) in state.amplitudes.iter().enumerate() {
        m[split.kept[i] * split.rest_dim + split.rest[i]] = *a;
    }
    let d = split.kept_dim;
    let r = split.rest_dim;
    let mut matrix = ComplexMatrix::zeros(d);
    for a in 0..d {
        for b in a..d {
            let z: Complex64 = (0..r).map(|k| m[a * r + k] * m[b * r + k].conj()).sum();
            matrix[(a, b)] = z;
            matrix[(b, a)] = z.conj();
        }
        matrix[(a, a)].im = 0.0;
    }
    Ok(DensityMatrix {
        labels: keep.to_vec(),
        matrix,
    })
}

/// Partial trace of a density matrix down to the register labels in `keep`.
pub fn partial_trace_dm(dm: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, StateError> {
    let positions = dm.positions(keep)?;
    let split = IndexSplit::new(dm.n_qubits(), &positions);
    let d = split.kept_dim;
    let full = dm.matrix.dim();
    let mut matrix = ComplexMatrix::zeros(d);
    for i in 0..full {
        for j in 0..full {
            if split.rest[i] == split.rest[j] {
                matrix[(split.kept[i], split.kept[j])] += dm.matrix[(i, j)];
            }
        }
    }
    Ok(DensityMatrix {
        labels: keep.to_vec(),
        matrix,
    })
}

fn check_selection(keep: &[usize], n: usize) -> Result<(), StateError> {
    if keep.is_empty() || !distinct(keep) || keep.iter().any(|&q| q >= n) {
        return Err(StateError::InvalidSelection {
            selection: keep.to_vec(),
            n_qubits: n,
        });
    }
    Ok(())
}

/// Transposes the tensor factors belonging to the register labels in
/// `subsystem`. The subsystem must be a proper, non-empty subset of the
/// matrix's labels.
pub fn partial_transpose(
    dm: &DensityMatrix,
    subsystem: &[usize],
) -> Result<ComplexMatrix, StateError> {
    let positions = dm.positions(subsystem)?;
    let n = dm.n_qubits();
    if positions.len() == n {
        return Err(StateError::InvalidSelection {
            selection: subsystem.to_vec(),
            n_qubits: n,
        });
    }
    let mask = positions
        .iter()
        .fold(0usize, |acc, &p| acc | (1 << (n - 1 - p)));
    Ok(partial_transpose_mask(dm.matrix(), mask))
}

/// Swaps the row/column bits selected by `mask`.
pub(crate) fn partial_transpose_mask(m: &ComplexMatrix, mask: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.dim(), |i, j| {
        let i2 = (i & !mask) | (j & mask);
        let j2 = (j & !mask) | (i & mask);
        m[(i2, j2)]
    })
}

/// Applies a single-qubit unitary to `site`.
pub fn apply_local_unitary(
    state: &PureState,
    site: usize,
    u: &ComplexMatrix,
) -> Result<PureState, StateError> {
    let n = state.n_qubits;
    check_selection(&[site], n)?;
    if u.dim() != 2 || !u.is_unitary(1e-10) {
        return Err(StateError::NotUnitary);
    }
    let bit = 1usize << (n - 1 - site);
    let mut out = state.amplitudes.clone();
    for i in 0..out.len() {
        if i & bit == 0 {
            let a0 = state.amplitudes[i];
            let a1 = state.amplitudes[i | bit];
            out[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
            out[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
        }
    }
    Ok(PureState {
        n_qubits: n,
        amplitudes: out,
    })
}

/// Reference states used as fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedState {
    /// `(|0...0> + |1...1>)/sqrt 2`
    Ghz,
    /// Equal superposition of the single-excitation basis states.
    W,
    /// `(|00> + |11>)/sqrt 2`, two qubits only.
    Bell,
    /// `|0...0>`
    ProductZero,
}

pub fn named_state(kind: NamedState, n_qubits: usize) -> Result<PureState, StateError> {
    let incompatible = Err(StateError::IncompatibleKind { kind, n_qubits });
    if !(1..=MAX_SAMPLED_QUBITS).contains(&n_qubits) {
        return incompatible;
    }
    let dim = 1usize << n_qubits;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        NamedState::Ghz => {
            if n_qubits < 2 {
                return incompatible;
            }
            amps[0] = Complex64::new(h, 0.0);
            amps[dim - 1] = Complex64::new(h, 0.0);
        }
        NamedState::Bell => {
            if n_qubits != 2 {
                return incompatible;
            }
            amps[0] = Complex64::new(h, 0.0);
            amps[3] = Complex64::new(h, 0.0);
        }
        NamedState::W => {
            if n_qubits < 2 {
                return incompatible;
            }
            let a = Complex64::new(1.0 / (n_qubits as f64).sqrt(), 0.0);
            for q in 0..n_qubits {
                amps[1 << q] = a;
            }
        }
        NamedState::ProductZero => amps[0] = Complex64::new(1.0, 0.0),
    }
    PureState::new(amps)
}

/// Identifies one random draw: the same `(base_seed, stream_index)` always
/// yields the same state, independent of what else was sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSeed {
    pub base_seed: u64,
    pub stream_index: u64,
}

impl RandomSeed {
    pub fn new(base_seed: u64, stream_index: u64) -> Self {
        Self {
            base_seed,
            stream_index,
        }
    }

    /// ChaCha20 keyed by the base seed, positioned on its own stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.base_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Haar-uniform pure state: i.i.d. standard normal real and imaginary parts,
/// normalized.
pub fn sample_haar_pure(n_qubits: usize, seed: RandomSeed) -> Result<PureState, StateError> {
    if !(MIN_SAMPLED_QUBITS..=MAX_SAMPLED_QUBITS).contains(&n_qubits) {
        return Err(StateError::QubitCount {
            n: n_qubits,
            min: MIN_SAMPLED_QUBITS,
            max: MAX_SAMPLED_QUBITS,
        });
    }
    let mut rng = seed.rng();
    let amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    PureState::normalized(amps)
}

/// Random three-qubit W-class state
/// `sqrt(a)|001> + sqrt(b)|010> + sqrt(c)|100> + sqrt(d)|000>`, with
/// `(a, b, c, d)` the normalized squares of four standard normals.
pub fn sample_w_class(seed: RandomSeed) -> PureState {
    let mut rng = seed.rng();
    let g: [f64; 4] = std::array::from_fn(|_| {
        let x: f64 = StandardNormal.sample(&mut rng);
        x * x
    });
    let total: f64 = g.iter().sum();
    let [a, b, c, d] = g.map(|x| (x / total).sqrt());
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b001] = Complex64::new(a, 0.0);
    amps[0b010] = Complex64::new(b, 0.0);
    amps[0b100] = Complex64::new(c, 0.0);
    amps[0b000] = Complex64::new(d, 0.0);
    // renormalize away the rounding in the square roots
    PureState::normalized(amps).expect("W-class amplitudes are non-zero")
}

/// One line of the state dump format.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateRecord {
    pub n_qubits: usize,
    pub base_seed: u64,
    pub stream_index: u64,
    /// `[re, im]` pairs, length `2^n_qubits`.
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateRecord {
    pub fn new(state: &PureState, seed: RandomSeed) -> Self {
        Self {
            n_qubits: state.n_qubits,
            base_seed: seed.base_seed,
            stream_index: seed.stream_index,
            amplitudes: state.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState, StateError> {
        let state = PureState::new(
            self.amplitudes
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect(),
        )?;
        if state.n_qubits != self.n_qubits {
            return Err(StateError::NotPowerOfTwo(self.amplitudes.len()));
        }
        Ok(state)
    }
}
