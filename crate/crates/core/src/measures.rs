//! Bipartite quantum-correlation measures.
//!
//! Two-qubit mixed-state versions of concurrence, entanglement of formation,
//! negativity, logarithmic negativity, quantum discord and quantum work
//! deficit, plus their values on the pure one-qubit-versus-rest cut of a
//! multiqubit register. Everything is in bits and equals one on
//! `(|00> + |11>)/sqrt 2`.
//!
//! The information-theoretic measures minimize over rank-one projective
//! measurements `{|n+><n+|, |n-><n-|}` on one qubit, parametrized by the
//! Bloch direction `n = (sin t cos p, sin t sin p, cos t)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    self, binary_entropy_unchecked, clamp_psd, hermitian_eigensystem, hermitian_eigenvalues, pauli,
    psd_sqrt, shannon_entropy, trace_norm_hermitian, ComplexMatrix, LinalgError,
};
use crate::states::{partial_trace, partial_transpose, DensityMatrix, PureState, StateError};

/// Rounding slack below zero that is reported as zero.
pub const NEGATIVITY_CLAMP: f64 = 1e-10;
/// Discord or work deficit below `-DEFICIT_CLAMP` signals a failed
/// optimization rather than round-off.
pub const DEFICIT_CLAMP: f64 = 1e-6;

/// Which party a projective measurement acts on. `Right` measures the
/// second party (written with a left arrow in the literature); `Right` is
/// the default throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Measurement on the first party.
    Left,
    /// Measurement on the second party.
    #[default]
    Right,
}

impl Direction {
    pub fn measured_party(self) -> Party {
        match self {
            Direction::Left => Party::First,
            Direction::Right => Party::Second,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    First,
    Second,
}

/// The six correlation measures. Only discord and work deficit carry a
/// measurement direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Concurrence,
    Eof,
    Negativity,
    LogNegativity,
    Discord(Direction),
    WorkDeficit(Direction),
}

impl MeasureKind {
    pub const ALL_DEFAULT: [MeasureKind; 6] = [
        MeasureKind::Concurrence,
        MeasureKind::Eof,
        MeasureKind::Negativity,
        MeasureKind::LogNegativity,
        MeasureKind::Discord(Direction::Right),
        MeasureKind::WorkDeficit(Direction::Right),
    ];

    pub fn direction(self) -> Option<Direction> {
        match self {
            MeasureKind::Discord(d) | MeasureKind::WorkDeficit(d) => Some(d),
            _ => None,
        }
    }

    /// Same family with a different direction; a no-op for families that
    /// have none.
    pub fn with_direction(self, direction: Direction) -> Self {
        match self {
            MeasureKind::Discord(_) => MeasureKind::Discord(direction),
            MeasureKind::WorkDeficit(_) => MeasureKind::WorkDeficit(direction),
            other => other,
        }
    }

    /// Measures built from entanglement, as opposed to measurement-based
    /// information-theoretic quantities.
    pub fn is_entanglement(self) -> bool {
        self.direction().is_none()
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::Eof => "eof",
            MeasureKind::Negativity => "negativity",
            MeasureKind::LogNegativity => "log-negativity",
            MeasureKind::Discord(Direction::Left) => "discord-left",
            MeasureKind::Discord(Direction::Right) => "discord-right",
            MeasureKind::WorkDeficit(Direction::Left) => "work-deficit-left",
            MeasureKind::WorkDeficit(Direction::Right) => "work-deficit-right",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for MeasureKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for MeasureKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown measure `{0}`")]
pub struct UnknownMeasure(pub String);

impl FromStr for MeasureKind {
    type Err = UnknownMeasure;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind = match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "concurrence" | "c" => MeasureKind::Concurrence,
            "eof" | "entanglement-of-formation" => MeasureKind::Eof,
            "negativity" | "n" => MeasureKind::Negativity,
            "log-negativity" | "lognegativity" | "l" => MeasureKind::LogNegativity,
            "discord" | "discord-right" => MeasureKind::Discord(Direction::Right),
            "discord-left" => MeasureKind::Discord(Direction::Left),
            "work-deficit" | "work-deficit-right" => MeasureKind::WorkDeficit(Direction::Right),
            "work-deficit-left" => MeasureKind::WorkDeficit(Direction::Left),
            _ => return Err(UnknownMeasure(s.to_string())),
        };
        Ok(kind)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("expected a two-qubit density matrix, got {0} qubits")]
    NotTwoQubit(usize),
    #[error("measurement optimization produced a non-finite objective")]
    NonFiniteObjective,
    #[error("{measure} evaluated to {value:e}, below the round-off allowance")]
    Negative { measure: &'static str, value: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Bloch direction of a projective qubit measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    /// Polar angle in `[0, pi]`.
    pub theta: f64,
    /// Azimuth in `[0, 2 pi)`.
    pub phi: f64,
}

impl MeasurementSetting {
    pub fn new(theta: f64, phi: f64) -> Self {
        // fold onto the canonical chart
        let mut theta = theta.rem_euclid(2.0 * PI);
        let mut phi = phi;
        if theta > PI {
            theta = 2.0 * PI - theta;
            phi += PI;
        }
        Self {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        }
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `(|n+><n+|, |n-><n-|)`.
    pub fn projectors(&self) -> (ComplexMatrix, ComplexMatrix) {
        let (s, c) = (self.theta / 2.0).sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        let plus = [Complex64::new(c, 0.0), e * s];
        let minus = [Complex64::new(s, 0.0), -e * c];
        (ComplexMatrix::outer(&plus), ComplexMatrix::outer(&minus))
    }
}

/// What the measurement optimizer minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// `sum_i p_i S(rho_{A|i})`, entering discord.
    ConditionalEntropy,
    /// `S(sum_i (1 x Pi_i) rho (1 x Pi_i))`, entering work deficit.
    PostMeasurementEntropy,
}

fn two_qubit(rho: &DensityMatrix) -> Result<&ComplexMatrix, MeasureError> {
    if rho.n_qubits() != 2 {
        return Err(MeasureError::NotTwoQubit(rho.n_qubits()));
    }
    Ok(rho.matrix())
}

/// `sigma_y (x) sigma_y`.
fn spin_flip() -> ComplexMatrix {
    pauli(2).kron(&pauli(2))
}

/// `(sigma_y x sigma_y) rho^* (sigma_y x sigma_y)`.
pub fn spin_flipped(rho: &ComplexMatrix) -> ComplexMatrix {
    let s = spin_flip();
    &(&s * &rho.conj()) * &s
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`.
///
/// The `l_k` are the singular values of `tau = V^T (sigma_y x sigma_y) V`,
/// where `rho = V V^dagger` with columns `sqrt(p_k) |e_k>` from the spectral
/// decomposition. They coincide with the eigenvalues of
/// `R = sqrt(sqrt(rho) rho~ sqrt(rho))`, but avoid taking square roots of
/// eigenvalues that are zero up to round-off, which matters for the rank-two
/// reductions of three-qubit pure states.
pub fn concurrence_2q(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let m = two_qubit(rho)?;
    let lambdas = wootters_lambdas(m)?;
    Ok(concurrence_from_spectrum(&lambdas))
}

/// `max(0, l1 - sum of the rest)` for a non-increasing spectrum.
pub fn concurrence_from_spectrum(lambdas: &[f64]) -> f64 {
    match lambdas.split_first() {
        Some((first, rest)) => (first - rest.iter().sum::<f64>()).clamp(0.0, 1.0),
        None => 0.0,
    }
}

fn wootters_lambdas(m: &ComplexMatrix) -> Result<Vec<f64>, MeasureError> {
    let mut eig = hermitian_eigensystem(m)?;
    clamp_psd(&mut eig.values)?;
    let cutoff = linalg::ENTROPY_CUTOFF;
    let kept: Vec<usize> = (0..4).filter(|&k| eig.values[k] > cutoff).collect();
    let r = kept.len();
    // V: 4 x r
    let v: Vec<[Complex64; 4]> = kept
        .iter()
        .map(|&k| {
            let w = eig.values[k].sqrt();
            std::array::from_fn(|i| eig.vectors[(i, k)] * w)
        })
        .collect();
    // sigma_y x sigma_y maps |ab> to -(-1)^{a+b} |(1-a)(1-b)>
    let flip = |x: &[Complex64; 4]| -> [Complex64; 4] { [-x[3], x[2], x[1], -x[0]] };
    let tau: Vec<Vec<Complex64>> = v
        .iter()
        .map(|vi| {
            v.iter()
                .map(|vj| {
                    let fj = flip(vj);
                    (0..4).map(|a| vi[a] * fj[a]).sum()
                })
                .collect()
        })
        .collect();

    let mut sv = match r {
        0 => vec![],
        1 => vec![tau[0][0].norm()],
        2 => {
            let fro2: f64 = tau.iter().flatten().map(|z| z.norm_sqr()).sum();
            let det = (tau[0][0] * tau[1][1] - tau[0][1] * tau[1][0]).norm();
            let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
            let s1 = ((fro2 + disc) / 2.0).sqrt();
            let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
            vec![s1, s2]
        }
        _ => {
            let t = ComplexMatrix::from_fn(r, |i, j| tau[i][j]);
            let mut gram = hermitian_eigenvalues(&(&t.adjoint() * &t))?;
            clamp_psd(&mut gram)?;
            gram.iter().map(|g| g.sqrt()).collect()
        }
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.resize(4, 0.0);
    Ok(sv)
}

/// Descending eigenvalues of `R = sqrt(sqrt(rho) rho~ sqrt(rho))`, computed
/// literally. Kept as an independent route to the concurrence spectrum.
pub fn wootters_r_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>, MeasureError> {
    let m = two_qubit(rho)?;
    let sqrt_rho = psd_sqrt(m)?;
    let inner = &(&sqrt_rho * &spin_flipped(m)) * &sqrt_rho;
    let r = psd_sqrt(&inner)?;
    Ok(hermitian_eigenvalues(&r)?)
}

/// `F(C) = h((1 + sqrt(1 - C^2)) / 2)`.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy_unchecked((1.0 + (1.0 - c * c).sqrt()) / 2.0)
}

pub fn eof_2q(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    Ok(eof_from_concurrence(concurrence_2q(rho)?))
}

/// `||rho^{T_B}||_1 - 1`, where `second_side` lists the register labels of
/// the transposed party. Equals twice the magnitude of the negative
/// eigenvalues of the partial transpose.
pub fn negativity(rho: &DensityMatrix, second_side: &[usize]) -> Result<f64, MeasureError> {
    let pt = partial_transpose(rho, second_side)?;
    let n = trace_norm_hermitian(&pt)? - 1.0;
    if n < -NEGATIVITY_CLAMP {
        return Err(MeasureError::Negative {
            measure: "negativity",
            value: n,
        });
    }
    Ok(n.max(0.0))
}

/// Negativity of a two-qubit state across its only cut.
pub fn negativity_2q(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    two_qubit(rho)?;
    let second = rho.labels()[1];
    negativity(rho, &[second])
}

pub fn log_negativity_from(negativity: f64) -> f64 {
    (negativity + 1.0).log2()
}

pub fn log_negativity(rho: &DensityMatrix, second_side: &[usize]) -> Result<f64, MeasureError> {
    Ok(log_negativity_from(negativity(rho, second_side)?))
}

/// Real Pauli-basis coordinates of a two-qubit state:
/// `rho = (1/4)(I + r.sigma x I + I x s.sigma + sum_ij T_ij sigma_i x sigma_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn of(rho: &ComplexMatrix) -> Self {
        let expect = |i: usize, j: usize| -> f64 {
            let op = pauli(i).kron(&pauli(j));
            (0..4)
                .flat_map(|a| (0..4).map(move |b| (a, b)))
                .map(|(a, b)| rho[(a, b)] * op[(b, a)])
                .sum::<Complex64>()
                .re
        };
        Self {
            r: std::array::from_fn(|i| expect(i + 1, 0)),
            s: std::array::from_fn(|j| expect(0, j + 1)),
            t: std::array::from_fn(|i| std::array::from_fn(|j| expect(i + 1, j + 1))),
        }
    }

    /// Same state with the parties exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            r: self.s,
            s: self.r,
            t: std::array::from_fn(|i| std::array::from_fn(|j| self.t[j][i])),
        }
    }

    /// Outcome probabilities and unmeasured-party Bloch vectors for a
    /// measurement along `n` on the second party.
    #[inline]
    fn branches(&self, n: [f64; 3]) -> [(f64, f64); 2] {
        let sn = self.s[0] * n[0] + self.s[1] * n[1] + self.s[2] * n[2];
        let tn: [f64; 3] = std::array::from_fn(|i| {
            self.t[i][0] * n[0] + self.t[i][1] * n[1] + self.t[i][2] * n[2]
        });
        let mut out = [(0.0, 0.0); 2];
        for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
            let p = 0.5 * (1.0 + sign * sn);
            // unnormalized Bloch vector (r + sign T n) / 2 scaled by 1/p
            let b2: f64 = (0..3).map(|i| (self.r[i] + sign * tn[i]).powi(2)).sum();
            let len = if p > 1e-15 {
                b2.sqrt() / (2.0 * p)
            } else {
                0.0
            };
            out[k] = (p.max(0.0), len.min(1.0));
        }
        out
    }

    /// Objective value for measuring the second party along `n`.
    #[inline]
    pub fn objective(&self, objective: Objective, n: [f64; 3]) -> f64 {
        let branches = self.branches(n);
        let conditional: f64 = branches
            .iter()
            .filter(|(p, _)| *p > 1e-15)
            .map(|&(p, len)| p * binary_entropy_unchecked((1.0 + len) / 2.0))
            .sum();
        match objective {
            Objective::ConditionalEntropy => conditional,
            Objective::PostMeasurementEntropy => {
                // the dephased state is block diagonal in the measured basis
                conditional + shannon_entropy(&[branches[0].0, branches[1].0])
            }
        }
    }
}

const COARSE_THETA: usize = 64;
const COARSE_PHI: usize = 128;
const REFINE_STARTS: usize = 4;
const REFINE_STEP: f64 = 1e-6;

/// Minimizes `objective` over projective measurements on `party`.
///
/// A 64 x 128 grid over `(theta, phi)` seeds a compass search from each of
/// the four best grid points; the search halves its step until it falls
/// below `1e-6` radians.
pub fn optimal_qubit_measurement(
    rho: &DensityMatrix,
    party: Party,
    objective: Objective,
) -> Result<(MeasurementSetting, f64), MeasureError> {
    let m = two_qubit(rho)?;
    let form = BlochForm::of(m);
    let form = match party {
        Party::Second => form,
        Party::First => form.swapped(),
    };
    optimize_bloch(&form, objective)
}

fn optimize_bloch(
    form: &BlochForm,
    objective: Objective,
) -> Result<(MeasurementSetting, f64), MeasureError> {
    let eval =
        |theta: f64, phi: f64| form.objective(objective, MeasurementSetting { theta, phi }.bloch());

    let d_theta = PI / (COARSE_THETA - 1) as f64;
    let d_phi = 2.0 * PI / COARSE_PHI as f64;
    let mut coarse: Vec<(f64, f64, f64)> = Vec::with_capacity(COARSE_THETA * COARSE_PHI);
    for i in 0..COARSE_THETA {
        let theta = i as f64 * d_theta;
        for j in 0..COARSE_PHI {
            let phi = j as f64 * d_phi;
            coarse.push((eval(theta, phi), theta, phi));
        }
    }
    if coarse.iter().any(|c| !c.0.is_finite()) {
        return Err(MeasureError::NonFiniteObjective);
    }
    coarse.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &(value, theta, phi) in coarse.iter().take(REFINE_STARTS) {
        let refined = compass_search(&eval, (value, theta, phi), d_theta, d_phi);
        if refined.0 < best.0 {
            best = refined;
        }
    }
    if !best.0.is_finite() {
        return Err(MeasureError::NonFiniteObjective);
    }
    Ok((MeasurementSetting::new(best.1, best.2), best.0))
}

fn compass_search(
    eval: &impl Fn(f64, f64) -> f64,
    start: (f64, f64, f64),
    step_theta: f64,
    step_phi: f64,
) -> (f64, f64, f64) {
    let (mut value, mut theta, mut phi) = start;
    let (mut ht, mut hp) = (step_theta, step_phi);
    while ht > REFINE_STEP || hp > REFINE_STEP {
        let candidates = [
            (theta + ht, phi),
            (theta - ht, phi),
            (theta, phi + hp),
            (theta, phi - hp),
        ];
        let mut moved = false;
        for (t, p) in candidates {
            let v = eval(t, p);
            if v < value {
                value = v;
                theta = t;
                phi = p;
                moved = true;
                break;
            }
        }
        if !moved {
            ht *= 0.5;
            hp *= 0.5;
        }
    }
    (value, theta, phi)
}

fn entropy_of(m: &ComplexMatrix) -> Result<f64, MeasureError> {
    let mut values = hermitian_eigenvalues(m)?;
    clamp_psd(&mut values)?;
    Ok(shannon_entropy(&values))
}

fn reduced_one(m: &ComplexMatrix, party: Party) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |i, j| match party {
        Party::First => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
        Party::Second => m[(i, j)] + m[(2 + i, 2 + j)],
    })
}

fn non_negative(measure: &'static str, value: f64) -> Result<f64, MeasureError> {
    if value < -DEFICIT_CLAMP {
        return Err(MeasureError::Negative { measure, value });
    }
    Ok(value.max(0.0))
}

/// Quantum discord with the measurement on the party selected by
/// `direction`: `S(rho_measured) - S(rho_AB) + min sum_i p_i S(rho_{other|i})`.
pub fn discord_2q(rho: &DensityMatrix, direction: Direction) -> Result<f64, MeasureError> {
    let m = two_qubit(rho)?;
    let party = direction.measured_party();
    let s_measured = entropy_of(&reduced_one(m, party))?;
    let s_joint = entropy_of(m)?;
    let (_, conditional) = optimal_qubit_measurement(rho, party, Objective::ConditionalEntropy)?;
    non_negative("discord", s_measured - s_joint + conditional)
}

/// One-way work deficit: `min S(rho') - S(rho_AB)` with `rho'` the state
/// dephased by the measurement on the party selected by `direction`.
pub fn work_deficit_2q(rho: &DensityMatrix, direction: Direction) -> Result<f64, MeasureError> {
    let m = two_qubit(rho)?;
    let s_joint = entropy_of(m)?;
    let (_, dephased) = optimal_qubit_measurement(
        rho,
        direction.measured_party(),
        Objective::PostMeasurementEntropy,
    )?;
    non_negative("work deficit", dephased - s_joint)
}

/// Any of the six measures on a two-qubit state.
pub fn two_qubit_value(rho: &DensityMatrix, measure: MeasureKind) -> Result<f64, MeasureError> {
    match measure {
        MeasureKind::Concurrence => concurrence_2q(rho),
        MeasureKind::Eof => eof_2q(rho),
        MeasureKind::Negativity => negativity_2q(rho),
        MeasureKind::LogNegativity => Ok(log_negativity_from(negativity_2q(rho)?)),
        MeasureKind::Discord(d) => discord_2q(rho, d),
        MeasureKind::WorkDeficit(d) => work_deficit_2q(rho, d),
    }
}

/// Measure on the pure cut between qubit `site` and the rest of the
/// register, from the spectrum `(l0, l1)` of the one-qubit reduction:
/// entropy-based measures give `h(l0)`, concurrence and negativity give
/// `2 sqrt(l0 l1)`.
pub fn pure_cut_value(
    state: &PureState,
    site: usize,
    measure: MeasureKind,
) -> Result<f64, MeasureError> {
    let rho = partial_trace(state, &[site])?;
    let m = rho.matrix();
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)].norm();
    // eigenvalues of a 2x2 Hermitian matrix
    let half_gap = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    let mean = (a + d) / 2.0;
    let l0 = (mean + half_gap).clamp(0.0, 1.0);
    let l1 = (mean - half_gap).clamp(0.0, 1.0);
    // 2 sqrt(l0 l1) = sqrt(2 (1 - tr rho^2)), computed from the determinant
    let det = (a * d - b * b).max(0.0);
    let schmidt_overlap = (2.0 * det.sqrt()).min(1.0);
    let value = match measure {
        MeasureKind::Eof | MeasureKind::Discord(_) | MeasureKind::WorkDeficit(_) => {
            shannon_entropy(&[l0, l1])
        }
        MeasureKind::Concurrence | MeasureKind::Negativity => schmidt_overlap,
        MeasureKind::LogNegativity => log_negativity_from(schmidt_overlap),
    };
    Ok(value.clamp(0.0, 1.0))
}

/// [`pure_cut_value`] with qubit 0 as the single-qubit side.
pub fn pure_bipartite_value(state: &PureState, measure: MeasureKind) -> Result<f64, MeasureError> {
    pure_cut_value(state, 0, measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::von_neumann_entropy;
    use crate::states::{named_state, sample_haar_pure, NamedState, RandomSeed};
    use approx::assert_abs_diff_eq;

    fn bell() -> DensityMatrix {
        named_state(NamedState::Bell, 2).unwrap().projector()
    }

    fn zero2() -> DensityMatrix {
        named_state(NamedState::ProductZero, 2).unwrap().projector()
    }

    fn werner(p: f64) -> DensityMatrix {
        let b = bell();
        let m = &b.matrix().scale(Complex64::new(p, 0.0))
            + &ComplexMatrix::identity(4).scale(Complex64::new((1.0 - p) / 4.0, 0.0));
        DensityMatrix::from_matrix(m).unwrap()
    }

    fn w_pair() -> DensityMatrix {
        partial_trace(&named_state(NamedState::W, 3).unwrap(), &[0, 1]).unwrap()
    }

    #[test]
    fn concurrence_fixtures() {
        assert_abs_diff_eq!(concurrence_2q(&bell()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(concurrence_2q(&zero2()).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            concurrence_2q(&w_pair()).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn r_spectrum_route_for_w_pair() {
        // rho~ of the W pair is (1/3)|11><11| + (2/3)|Psi+><Psi+|; R has
        // spectrum (2/3, 0, 0, 0)
        let lambdas = wootters_r_spectrum(&w_pair()).unwrap();
        assert_abs_diff_eq!(lambdas[0], 2.0 / 3.0, epsilon = 1e-7);
        assert_abs_diff_eq!(
            concurrence_from_spectrum(&lambdas),
            2.0 / 3.0,
            epsilon = 1e-7
        );
    }

    #[test]
    fn concurrence_rejects_wrong_size() {
        let ghz = named_state(NamedState::Ghz, 3).unwrap().projector();
        assert!(matches!(
            concurrence_2q(&ghz),
            Err(MeasureError::NotTwoQubit(3))
        ));
    }

    #[test]
    fn eof_fixtures() {
        assert_abs_diff_eq!(eof_2q(&bell()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eof_2q(&zero2()).unwrap(), 0.0, epsilon = 1e-12);
        let expected = binary_entropy_unchecked((1.0 + 5f64.sqrt() / 3.0) / 2.0);
        assert_abs_diff_eq!(expected, 0.550048, epsilon = 1e-6);
        assert_abs_diff_eq!(eof_2q(&w_pair()).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn negativity_fixtures() {
        assert_abs_diff_eq!(negativity_2q(&bell()).unwrap(), 1.0, epsilon = 1e-12);
        let ghz = named_state(NamedState::Ghz, 3).unwrap();
        let pair = partial_trace(&ghz, &[0, 1]).unwrap();
        assert_abs_diff_eq!(negativity_2q(&pair).unwrap(), 0.0, epsilon = 1e-14);
        let full = ghz.projector();
        assert_abs_diff_eq!(negativity(&full, &[1, 2]).unwrap(), 1.0, epsilon = 1e-12);
        assert!(negativity(&full, &[0, 1, 2]).is_err());
    }

    #[test]
    fn log_negativity_fixtures() {
        assert_eq!(log_negativity_from(1.0), 1.0);
        assert_eq!(log_negativity_from(0.0), 0.0);
        let w = named_state(NamedState::W, 3).unwrap().projector();
        let n = negativity(&w, &[1, 2]).unwrap();
        assert_abs_diff_eq!(n, 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-12);
        let expected = (1.0 + 2.0 * 2f64.sqrt() / 3.0).log2();
        assert_abs_diff_eq!(expected, 0.958144, epsilon = 1e-6);
        assert_abs_diff_eq!(
            log_negativity(&w, &[1, 2]).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn setting_projectors_resolve_identity() {
        for &(t, p) in &[(0.0, 0.0), (0.3, 1.1), (PI, 6.0), (2.0, 4.0)] {
            let (a, b) = MeasurementSetting::new(t, p).projectors();
            assert!((&a + &b).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
            assert!((&a * &a).max_abs_diff(&a) < 1e-12);
        }
        let s = MeasurementSetting::new(-0.5, 0.0);
        assert_abs_diff_eq!(s.theta, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.phi, PI, epsilon = 1e-15);
    }

    /// Conditional states built from explicit projector algebra, for checking
    /// the Bloch-form shortcut.
    fn explicit_branches(
        rho: &ComplexMatrix,
        setting: MeasurementSetting,
    ) -> Vec<(f64, ComplexMatrix)> {
        let (p_plus, p_minus) = setting.projectors();
        [p_plus, p_minus]
            .iter()
            .map(|proj| {
                let full = ComplexMatrix::identity(2).kron(proj);
                let projected = &(&full * rho) * &full;
                let reduced = reduced_one(&projected, Party::First);
                let p = reduced.trace().re;
                (p, reduced)
            })
            .collect()
    }

    #[test]
    fn bloch_objectives_match_projector_algebra() {
        for k in 0..20 {
            let s = sample_haar_pure(3, RandomSeed::new(11, k)).unwrap();
            let rho = partial_trace(&s, &[0, 1]).unwrap();
            let form = BlochForm::of(rho.matrix());
            let setting = MeasurementSetting::new(0.1 * k as f64, 0.37 * k as f64);
            let branches = explicit_branches(rho.matrix(), setting);
            let conditional: f64 = branches
                .iter()
                .filter(|(p, _)| *p > 1e-15)
                .map(|(p, m)| {
                    p * von_neumann_entropy(&m.scale(Complex64::new(1.0 / p, 0.0))).unwrap()
                })
                .sum();
            let ce = form.objective(Objective::ConditionalEntropy, setting.bloch());
            assert_abs_diff_eq!(ce, conditional, epsilon = 1e-10);

            // full 4x4 dephased state
            let (a, b) = setting.projectors();
            let pa = ComplexMatrix::identity(2).kron(&a);
            let pb = ComplexMatrix::identity(2).kron(&b);
            let dephased = &(&(&pa * rho.matrix()) * &pa) + &(&(&pb * rho.matrix()) * &pb);
            let pme = form.objective(Objective::PostMeasurementEntropy, setting.bloch());
            assert_abs_diff_eq!(
                pme,
                von_neumann_entropy(&dephased).unwrap(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn optimizer_fixtures() {
        let (_, v) =
            optimal_qubit_measurement(&bell(), Party::Second, Objective::ConditionalEntropy)
                .unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        let (_, v) =
            optimal_qubit_measurement(&zero2(), Party::Second, Objective::ConditionalEntropy)
                .unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        // classically correlated in z: the optimum is the z basis
        let classical =
            DensityMatrix::from_matrix(ComplexMatrix::from_diagonal(&[0.3, 0.0, 0.0, 0.7]))
                .unwrap();
        let (setting, v) =
            optimal_qubit_measurement(&classical, Party::Second, Objective::ConditionalEntropy)
                .unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
        assert!(setting.theta < 1e-4 || PI - setting.theta < 1e-4);
    }

    #[test]
    fn discord_fixtures() {
        for d in [Direction::Left, Direction::Right] {
            assert_abs_diff_eq!(discord_2q(&bell(), d).unwrap(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(discord_2q(&zero2(), d).unwrap(), 0.0, epsilon = 1e-9);
            let classical =
                DensityMatrix::from_matrix(ComplexMatrix::from_diagonal(&[0.3, 0.0, 0.0, 0.7]))
                    .unwrap();
            assert_abs_diff_eq!(discord_2q(&classical, d).unwrap(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn work_deficit_fixtures() {
        for d in [Direction::Left, Direction::Right] {
            assert_abs_diff_eq!(work_deficit_2q(&bell(), d).unwrap(), 1.0, epsilon = 1e-9);
            assert_abs_diff_eq!(work_deficit_2q(&zero2(), d).unwrap(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn werner_family_is_monotone() {
        let grid: Vec<f64> = (0..50).map(|k| k as f64 / 49.0).collect();
        for measure in [
            MeasureKind::Concurrence,
            MeasureKind::Eof,
            MeasureKind::Negativity,
            MeasureKind::LogNegativity,
            MeasureKind::Discord(Direction::Right),
            MeasureKind::WorkDeficit(Direction::Right),
        ] {
            let values: Vec<f64> = grid
                .iter()
                .map(|&p| two_qubit_value(&werner(p), measure).unwrap())
                .collect();
            for w in values.windows(2) {
                assert!(w[1] >= w[0] - 1e-6, "{measure}: {values:?}");
            }
        }
    }

    #[test]
    fn pure_cut_fixtures() {
        for n in 3..=6 {
            let ghz = named_state(NamedState::Ghz, n).unwrap();
            let zero = named_state(NamedState::ProductZero, n).unwrap();
            for m in MeasureKind::ALL_DEFAULT {
                assert_abs_diff_eq!(pure_bipartite_value(&ghz, m).unwrap(), 1.0, epsilon = 1e-12);
                assert_abs_diff_eq!(
                    pure_bipartite_value(&zero, m).unwrap(),
                    0.0,
                    epsilon = 1e-12
                );
            }
        }
        let w = named_state(NamedState::W, 3).unwrap();
        let c = pure_bipartite_value(&w, MeasureKind::Concurrence).unwrap();
        assert_abs_diff_eq!(c, 2.0 * 2f64.sqrt() / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c, 0.942809, epsilon = 1e-6);
    }

    #[test]
    fn measure_names_parse_back() {
        for m in MeasureKind::ALL_DEFAULT {
            assert_eq!(m.name().parse::<MeasureKind>().unwrap(), m);
        }
        for m in [
            MeasureKind::Discord(Direction::Left),
            MeasureKind::WorkDeficit(Direction::Left),
        ] {
            assert_eq!(m.name().parse::<MeasureKind>().unwrap(), m);
        }
        assert_eq!(
            "discord".parse::<MeasureKind>().unwrap(),
            MeasureKind::Discord(Direction::Right)
        );
        assert!("tangle".parse::<MeasureKind>().is_err());
        assert_eq!(MeasureKind::Eof.direction(), None);
        assert_eq!(
            MeasureKind::Discord(Direction::Left).direction(),
            Some(Direction::Left)
        );
        let json = serde_json::to_string(&MeasureKind::WorkDeficit(Direction::Left)).unwrap();
        assert_eq!(json, "\"work-deficit-left\"");
        assert_eq!(
            serde_json::from_str::<MeasureKind>(&json).unwrap(),
            MeasureKind::WorkDeficit(Direction::Left)
        );
    }
}
