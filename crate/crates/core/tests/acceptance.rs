//! Acceptance suite. Prints one verdict line per criterion and exits
//! non-zero if any criterion fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 1 2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use monoscore::export::{format_sig6, write_summary_json};
use monoscore::linalg::ComplexMatrix;
use monoscore::measures::negativity;
use monoscore::measures::{
    optimal_qubit_measurement, pure_cut_value, two_qubit_value, Direction, MeasureKind, Objective,
    Party,
};
use monoscore::monogamy::{measure_state, MonogamyRecord};
use monoscore::montecarlo::{
    estimate_alpha_c, estimate_alpha_p, fraction_nonmonogamous, histogram, m_q, run_and_summarize,
    run_ensemble, scores, AlphaGrid, EnsembleSpec, Moments, StateClass, SummaryOptions,
};
use monoscore::states::{
    apply_local_unitary, named_state, partial_trace, sample_haar_pure, NamedState, PureState,
    RandomSeed,
};
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 1;
const TOL: f64 = 1e-6;

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new() -> Self {
        Self {
            pass: true,
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        self.pass &= ok;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
        if !ok {
            self.detail.push_str(" [x]");
        }
    }

    fn within(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.check(
            (value - target).abs() <= tol,
            format!(
                "{name} = {value:.6} (target {target} +/- {})",
                format_sig6(tol)
            ),
        );
    }

    fn inside(&mut self, name: &str, value: f64, lo: f64, hi: f64) {
        self.check(
            (lo..=hi).contains(&value),
            format!("{name} = {value:.6} in [{lo}, {hi}]"),
        );
    }
}

type Key = (StateClass, usize, MeasureKind, usize);

fn ensemble(
    class: StateClass,
    n_qubits: usize,
    measure: MeasureKind,
    n: usize,
) -> Arc<Vec<MonogamyRecord>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<MonogamyRecord>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (class, n_qubits, measure, n);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return r.clone();
    }
    let spec = EnsembleSpec::new(class, n_qubits, measure, n, SEED);
    let records = Arc::new(run_ensemble(&spec).expect("ensemble"));
    cache.lock().unwrap().insert(key, records.clone());
    records
}

fn moments(records: &[MonogamyRecord], alpha: f64) -> Moments {
    monoscore::montecarlo::distribution_stats(records, alpha).unwrap()
}

fn all_measures() -> Vec<MeasureKind> {
    vec![
        MeasureKind::Concurrence,
        MeasureKind::Eof,
        MeasureKind::Negativity,
        MeasureKind::LogNegativity,
        MeasureKind::Discord(Direction::Left),
        MeasureKind::Discord(Direction::Right),
        MeasureKind::WorkDeficit(Direction::Left),
        MeasureKind::WorkDeficit(Direction::Right),
    ]
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let ghz = named_state(NamedState::Ghz, 3).unwrap();
    let w = named_state(NamedState::W, 3).unwrap();
    let tangle = |s: &PureState| {
        measure_state(s, MeasureKind::Concurrence, 0)
            .unwrap()
            .score(2.0)
            .unwrap()
    };
    v.within("tangle(GHZ)", tangle(&ghz), 1.0, 1e-10);
    v.within("tangle(W)", tangle(&w), 0.0, 1e-10);
    let bell = named_state(NamedState::Bell, 2).unwrap().projector();
    let zero = named_state(NamedState::ProductZero, 2).unwrap().projector();
    let mut worst_bell: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    for m in all_measures() {
        worst_bell = worst_bell.max((two_qubit_value(&bell, m).unwrap() - 1.0).abs());
        worst_zero = worst_zero.max(two_qubit_value(&zero, m).unwrap().abs());
    }
    v.check(
        worst_bell <= 1e-5,
        format!("max |Q(Bell) - 1| = {worst_bell:.1e}"),
    );
    v.check(
        worst_zero <= 1e-8,
        format!("max |Q(|00>)| = {worst_zero:.1e}"),
    );
    let elapsed = start.elapsed().as_secs_f64();
    v.check(elapsed < 1.0, format!("{elapsed:.2} s"));
    v
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let records = ensemble(StateClass::WClass, 3, MeasureKind::Concurrence, 10_000);
    let ap = estimate_alpha_p(&records, &AlphaGrid::standard(), TOL).unwrap();
    let ac = estimate_alpha_c(&records, TOL)
        .unwrap()
        .value()
        .unwrap_or(f64::INFINITY);
    v.within("alpha_p", ap, 2.0, 0.005);
    v.within("alpha_c", ac, 2.0, 0.005);
    let below = fraction_nonmonogamous(&records, 1.995).unwrap();
    let at = fraction_nonmonogamous(&records, 2.0).unwrap();
    v.check(
        below == 1.0 && at == 0.0,
        format!("f(1.995) = {below}, f(2) = {at}"),
    );
    let elapsed = start.elapsed().as_secs_f64();
    v.check(elapsed < 60.0, format!("{elapsed:.1} s"));
    v
}

fn criterion_3() -> Verdict {
    let mut v = Verdict::new();
    let neg = ensemble(StateClass::Haar, 3, MeasureKind::Negativity, 100_000);
    let eof = ensemble(StateClass::Haar, 3, MeasureKind::Eof, 100_000);
    let ac_n = estimate_alpha_c(&neg, TOL)
        .unwrap()
        .value()
        .unwrap_or(f64::INFINITY);
    let ac_e = estimate_alpha_c(&eof, TOL)
        .unwrap()
        .value()
        .unwrap_or(f64::INFINITY);
    let ap_n = estimate_alpha_p(&neg, &AlphaGrid::standard(), TOL).unwrap();
    v.inside("alpha_c(N)", ac_n, 1.55, 1.70);
    v.inside("alpha_c(EoF)", ac_e, 1.25, 1.36);
    v.inside("alpha_p(N)", ap_n, 0.10, 0.16);
    v
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::new();
    for class in [StateClass::Haar, StateClass::WClass] {
        for d in [Direction::Left, Direction::Right] {
            let records = ensemble(class, 3, MeasureKind::WorkDeficit(d), 10_000);
            let f = fraction_nonmonogamous(&records, 10.0).unwrap();
            let ac = estimate_alpha_c(&records, TOL).unwrap();
            v.check(
                f > 0.0 && ac.value().is_none_or(|a| a > 10.0),
                format!(
                    "{class} {}: f(10) = {f}, alpha_c = {ac}",
                    MeasureKind::WorkDeficit(d)
                ),
            );
        }
    }
    v
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::new();
    let neg = ensemble(StateClass::Haar, 3, MeasureKind::Negativity, 100_000);
    let ac = estimate_alpha_c(&neg, TOL).unwrap();
    v.within("M(N, GHZ)", m_q(&neg, ac, TOL).unwrap(), 0.7245, 0.03);
    let w = ensemble(StateClass::WClass, 3, MeasureKind::Concurrence, 100_000);
    let ac = estimate_alpha_c(&w, TOL).unwrap();
    v.within("M(C, W)", m_q(&w, ac, TOL).unwrap(), 2.0, 0.005);
    v
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    let neg = ensemble(StateClass::Haar, 3, MeasureKind::Negativity, 100_000);
    let m = moments(&neg, 1.0);
    v.within("mean(N)", m.mean, 0.18542, 0.005);
    v.within("var(N)", m.variance, 0.022174, 0.002);
    v.within("skew(N)", m.skewness.unwrap_or(f64::NAN), 0.62577, 0.05);
    let conc = ensemble(StateClass::Haar, 3, MeasureKind::Concurrence, 100_000);
    v.within("mean(C^2)", moments(&conc, 2.0).mean, 0.33335, 0.005);
    v
}

fn criterion_7() -> Verdict {
    let mut v = Verdict::new();
    let targets = [0.333, 0.729, 0.902, 0.957];
    for (k, n) in (3..=6).enumerate() {
        let records = ensemble(StateClass::Haar, n, MeasureKind::Concurrence, 10_000);
        let m = moments(&records, 2.0);
        v.within(&format!("mean(C^2, N={n})"), m.mean, targets[k], 0.01);
        match n {
            3 => v.within("skew(C^2, N=3)", m.skewness.unwrap_or(f64::NAN), 0.50, 0.1),
            6 => v.within("skew(C^2, N=6)", m.skewness.unwrap_or(f64::NAN), -1.45, 0.2),
            _ => {}
        }
    }
    v
}

fn criterion_8() -> Verdict {
    let mut v = Verdict::new();
    let records = ensemble(StateClass::Haar, 6, MeasureKind::Concurrence, 10_000);
    let tail = scores(&records, 2.0)
        .unwrap()
        .iter()
        .filter(|&&s| s > 0.9)
        .count() as f64
        / records.len() as f64;
    v.within("P(tangle > 0.9, N=6)", tail, 0.9134, 0.01);
    // the same mass through the histogram path: bins of width 0.1 on [0, 1]
    let bins = histogram(&records, 2.0, 10, (0.0, 1.0)).unwrap();
    let last = bins.last().unwrap().rel_freq;
    v.check(
        (last - tail).abs() < 1e-12,
        format!("top histogram bin = {last:.4}"),
    );
    v
}

/// `log2(e) (sum_{j=d/2+1}^{d} 1/j - 1/d)` with `d = 2^n`.
fn page_oracle(n: u32) -> f64 {
    let d = 2f64.powi(n as i32);
    let mut h = 0.0;
    let mut j = d;
    while j > d / 2.0 {
        h += 1.0 / j;
        j -= 1.0;
    }
    (h - 1.0 / d) / std::f64::consts::LN_2
}

fn criterion_9() -> Verdict {
    let mut v = Verdict::new();
    let mut pair_means = Vec::new();
    for n in 3..=6usize {
        let records = ensemble(StateClass::Haar, n, MeasureKind::Eof, 10_000);
        let s: Vec<f64> = records.iter().map(|r| r.q_rest).collect();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s.len() - 1) as f64;
        let se = (var / s.len() as f64).sqrt();
        let target = page_oracle(n as u32);
        v.check(
            (mean - target).abs() <= 3.0 * se,
            format!(
                "N={n}: <S> = {mean:.5} vs {target:.5} (3 se = {:.5})",
                3.0 * se
            ),
        );
        let neg = ensemble(StateClass::Haar, n, MeasureKind::Negativity, 10_000);
        let pairs: Vec<f64> = neg.iter().flat_map(|r| r.q_pair.iter().copied()).collect();
        pair_means.push(pairs.iter().sum::<f64>() / pairs.len() as f64);
    }
    let decreasing = pair_means.windows(2).all(|w| w[1] < w[0]);
    v.check(
        decreasing,
        format!(
            "mean pair negativity {}",
            pair_means
                .iter()
                .map(|x| format!("{x:.4}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ),
    );
    v
}

// Conditional states of the unmeasured qubit by direct index contraction:
// sigma_v[a][a'] = sum_{b,b'} conj(v_b) rho[(a,b),(a',b')] v_b'.
fn contract(rho: &[[Complex64; 4]; 4], v: [Complex64; 2]) -> [[Complex64; 2]; 2] {
    let mut s = [[Complex64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..2 {
                for bp in 0..2 {
                    s[a][ap] += v[b].conj() * rho[2 * a + b][2 * ap + bp] * v[bp];
                }
            }
        }
    }
    s
}

fn eig2(s: &[[Complex64; 2]; 2]) -> [f64; 2] {
    let a = s[0][0].re;
    let d = s[1][1].re;
    let r = (((a - d) / 2.0).powi(2) + s[0][1].norm_sqr()).sqrt();
    [((a + d) / 2.0 + r).max(0.0), ((a + d) / 2.0 - r).max(0.0)]
}

fn xlogx(x: f64) -> f64 {
    if x > 1e-300 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Dense (theta, phi) minimum of both objectives with the second qubit
/// measured.
fn dense_grid(rho: &[[Complex64; 4]; 4]) -> (f64, f64) {
    let mut best_ce = f64::INFINITY;
    let mut best_pme = f64::INFINITY;
    for i in 0..720 {
        let theta = i as f64 * PI / 719.0;
        let (s, c) = (theta / 2.0).sin_cos();
        for j in 0..1440 {
            let e = Complex64::from_polar(1.0, j as f64 * 2.0 * PI / 1440.0);
            let plus = contract(rho, [Complex64::new(c, 0.0), e * s]);
            let minus = contract(rho, [Complex64::new(s, 0.0), -e * c]);
            let (lp, lm) = (eig2(&plus), eig2(&minus));
            let (pp, pm) = (lp[0] + lp[1], lm[0] + lm[1]);
            let cond = |l: [f64; 2], p: f64| {
                if p > 1e-300 {
                    p * (xlogx(l[0] / p) + xlogx(l[1] / p))
                } else {
                    0.0
                }
            };
            best_ce = best_ce.min(cond(lp, pp) + cond(lm, pm));
            best_pme = best_pme.min(lp.iter().chain(&lm).map(|&x| xlogx(x)).sum());
        }
    }
    (best_ce, best_pme)
}

fn to_array(m: &ComplexMatrix, swap: bool) -> [[Complex64; 4]; 4] {
    let perm = |k: usize| if swap { (k % 2) * 2 + k / 2 } else { k };
    std::array::from_fn(|i| std::array::from_fn(|j| m[(perm(i), perm(j))]))
}

fn random_unitary(rng: &mut impl Rng) -> ComplexMatrix {
    let chi: f64 = rng.random_range(0.0..PI / 2.0);
    let (psi, omega, global): (f64, f64, f64) = (
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..2.0 * PI),
    );
    let g = Complex64::from_polar(1.0, global);
    ComplexMatrix::from_row_major(vec![
        g * Complex64::from_polar(chi.cos(), psi),
        g * Complex64::from_polar(chi.sin(), omega),
        -g * Complex64::from_polar(chi.sin(), -omega),
        g * Complex64::from_polar(chi.cos(), -psi),
    ])
    .unwrap()
}

fn criterion_10() -> Verdict {
    let mut v = Verdict::new();

    // optimizer against the dense grid on a fixed corpus: pair reductions
    // of three- and four-qubit Haar states (ranks 2 and 4)
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let n = if k < 50 { 3 } else { 4 };
        let state = sample_haar_pure(n, RandomSeed::new(777, k)).unwrap();
        let rho = partial_trace(&state, &[0, 1]).unwrap();
        for party in [Party::Second, Party::First] {
            let (ce, pme) = dense_grid(&to_array(rho.matrix(), party == Party::First));
            let (_, opt_ce) =
                optimal_qubit_measurement(&rho, party, Objective::ConditionalEntropy).unwrap();
            let (_, opt_pme) =
                optimal_qubit_measurement(&rho, party, Objective::PostMeasurementEntropy).unwrap();
            worst = worst.max((opt_ce - ce).abs()).max((opt_pme - pme).abs());
        }
    }
    v.check(
        worst <= 1e-5,
        format!("optimizer vs 720x1440 grid: {worst:.1e}"),
    );

    // pure cuts: concurrence from purity, negativity from the partial transpose
    let mut worst: f64 = 0.0;
    for n in 3..=6usize {
        for k in 0..5u64 {
            let state = sample_haar_pure(n, RandomSeed::new(778, k)).unwrap();
            let full = state.projector();
            for site in 0..n {
                let rho = partial_trace(&state, &[site]).unwrap();
                let m = rho.matrix();
                let purity =
                    (m[(0, 0)] * m[(0, 0)] + m[(0, 1)] * m[(1, 0)] * 2.0 + m[(1, 1)] * m[(1, 1)])
                        .re;
                let c_oracle = (2.0 * (1.0 - purity)).max(0.0).sqrt();
                let rest: Vec<usize> = (0..n).filter(|&i| i != site).collect();
                let n_pt = negativity(&full, &rest).unwrap();
                let c = pure_cut_value(&state, site, MeasureKind::Concurrence).unwrap();
                let neg = pure_cut_value(&state, site, MeasureKind::Negativity).unwrap();
                worst = worst
                    .max((c - neg).abs())
                    .max((c - c_oracle).abs())
                    .max((neg - n_pt).abs());
            }
        }
    }
    v.check(
        worst <= 1e-9,
        format!("pure-cut concurrence vs negativity: {worst:.1e}"),
    );

    // local-unitary invariance of every record
    let mut rng = RandomSeed::new(779, 0).rng();
    let mut worst: f64 = 0.0;
    for k in 0..10u64 {
        let state = sample_haar_pure(3, RandomSeed::new(780, k)).unwrap();
        let mut rotated = state.clone();
        for site in 0..3 {
            rotated = apply_local_unitary(&rotated, site, &random_unitary(&mut rng)).unwrap();
        }
        for m in all_measures() {
            let a = measure_state(&state, m, 0).unwrap();
            let b = measure_state(&rotated, m, 0).unwrap();
            worst = worst.max((a.q_rest - b.q_rest).abs());
            for (x, y) in a.q_pair.iter().zip(&b.q_pair) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    v.check(
        worst <= 1e-6,
        format!("local-unitary invariance: {worst:.1e}"),
    );

    // worker-count determinism of the serialized summary
    let outputs: Vec<Vec<u8>> = [1, 2, 8]
        .iter()
        .map(|&workers| {
            let mut spec = EnsembleSpec::new(
                StateClass::Haar,
                3,
                MeasureKind::Discord(Direction::Right),
                300,
                99,
            );
            spec.workers = workers;
            let summary = run_and_summarize(&spec, &SummaryOptions::default()).unwrap();
            let mut buf = Vec::new();
            write_summary_json(&mut buf, &summary).unwrap();
            buf
        })
        .collect();
    v.check(
        outputs.windows(2).all(|w| w[0] == w[1]),
        "1/2/8 workers byte-identical",
    );

    // CKW
    let records = ensemble(StateClass::Haar, 3, MeasureKind::Concurrence, 10_000);
    let lowest = scores(&records, 2.0)
        .unwrap()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    v.check(
        lowest >= -1e-9,
        format!("min tangle over 1e4 states = {lowest:.2e}"),
    );
    v
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Verdict); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failures = 0;
    for (k, run) in criteria {
        if !selected.is_empty() && !selected.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let verdict = run();
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {k:>2} {status} ({:.1} s): {}",
            start.elapsed().as_secs_f64(),
            verdict.detail
        );
        if !verdict.pass {
            failures += 1;
        }
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
