//! Published reference values for the six comparison tables and the code
//! that recomputes each cell.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use monoscore::monogamy::MonogamyRecord;
use monoscore::montecarlo::{
    distribution_stats, estimate_alpha_c, estimate_alpha_p, m_q, run_ensemble, AlphaC, AlphaGrid,
    EnsembleError, EnsembleSpec, Moments, StateClass, DEFAULT_TOL,
};
use monoscore::{Direction, MeasureKind};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    AlphaP,
    AlphaC,
    MQ,
    Mean,
    Variance,
    Skewness,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::AlphaP => "alpha_p",
            Quantity::AlphaC => "alpha_c",
            Quantity::MQ => "M_Q",
            Quantity::Mean => "mean",
            Quantity::Variance => "variance",
            Quantity::Skewness => "skewness",
        }
    }
}

/// A published cell value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Value(f64),
    /// Reported only as a lower bound.
    Above(f64),
    /// Not reported.
    Missing,
}

#[derive(Debug, Clone, Copy)]
pub struct RefCell {
    pub measure: MeasureKind,
    pub class: StateClass,
    pub n_qubits: usize,
    pub quantity: Quantity,
    /// Power for moment cells.
    pub alpha: Option<f64>,
    pub reference: Reference,
}

const L: Direction = Direction::Left;
const R: Direction = Direction::Right;
const GHZ: StateClass = StateClass::Haar;
const W: StateClass = StateClass::WClass;

/// `(class, alpha_p, alpha_c)`.
type CriticalPair = (StateClass, f64, Reference);

fn table_1() -> Vec<RefCell> {
    use Reference::{Above, Value};
    let rows: [(MeasureKind, [CriticalPair; 2]); 8] = [
        (
            MeasureKind::Negativity,
            [(GHZ, 0.1467, Value(1.6735)), (W, 0.0991, Value(1.9885))],
        ),
        (
            MeasureKind::LogNegativity,
            [(GHZ, 0.1497, Value(1.8540)), (W, 0.0991, Value(2.0))],
        ),
        (
            MeasureKind::Concurrence,
            [(GHZ, 0.1470, Value(2.0)), (W, 2.0, Value(2.0))],
        ),
        (
            MeasureKind::Eof,
            [(GHZ, 0.0866, Value(1.3520)), (W, 1.0410, Value(1.4280))],
        ),
        (
            MeasureKind::Discord(L),
            [(GHZ, 0.1163, Value(3.4317)), (W, 0.8382, Value(9.3492))],
        ),
        (
            MeasureKind::Discord(R),
            [(GHZ, 0.0968, Value(1.3520)), (W, 0.9797, Value(1.3608))],
        ),
        (
            MeasureKind::WorkDeficit(L),
            [(GHZ, 0.1183, Above(10.0)), (W, 0.9630, Above(10.0))],
        ),
        (
            MeasureKind::WorkDeficit(R),
            [(GHZ, 0.0989, Above(10.0)), (W, 0.9799, Above(10.0))],
        ),
    ];
    let mut cells = Vec::new();
    for (measure, classes) in rows {
        for (class, ap, ac) in classes {
            let cell = |quantity, reference| RefCell {
                measure,
                class,
                n_qubits: 3,
                quantity,
                alpha: None,
                reference,
            };
            cells.push(cell(Quantity::AlphaP, Value(ap)));
            cells.push(cell(Quantity::AlphaC, ac));
        }
    }
    cells
}

fn table_2() -> Vec<RefCell> {
    let rows = [
        (MeasureKind::Negativity, 0.7245, 0.9441),
        (MeasureKind::LogNegativity, 0.8765, 1.0957),
        (MeasureKind::Concurrence, 0.9498, 2.0000),
        (MeasureKind::Eof, 0.6182, 1.2751),
        (MeasureKind::Discord(L), 0.6669, 1.4870),
        (MeasureKind::Discord(R), 0.6472, 1.2333),
    ];
    rows.iter()
        .flat_map(|&(measure, ghz, w)| {
            [(GHZ, ghz), (W, w)].map(|(class, value)| RefCell {
                measure,
                class,
                n_qubits: 3,
                quantity: Quantity::MQ,
                alpha: None,
                reference: Reference::Value(value),
            })
        })
        .collect()
}

type MomentRow = (MeasureKind, [Option<f64>; 3], [Option<f64>; 3]);

fn moment_cells(alpha: f64, rows: &[MomentRow]) -> Vec<RefCell> {
    let mut cells = Vec::new();
    for &(measure, ghz, w) in rows {
        for (class, values) in [(GHZ, ghz), (W, w)] {
            for (quantity, value) in [Quantity::Mean, Quantity::Variance, Quantity::Skewness]
                .into_iter()
                .zip(values)
            {
                cells.push(RefCell {
                    measure,
                    class,
                    n_qubits: 3,
                    quantity,
                    alpha: Some(alpha),
                    reference: value.map_or(Reference::Missing, Reference::Value),
                });
            }
        }
    }
    cells
}

fn table_3() -> Vec<RefCell> {
    let s = |a: f64, b: f64, c: f64| [Some(a), Some(b), Some(c)];
    moment_cells(
        1.0,
        &[
            (
                MeasureKind::Negativity,
                s(0.18542, 0.022174, 0.62577),
                s(0.025438, 0.0069282, 0.38597),
            ),
            (
                MeasureKind::LogNegativity,
                s(0.094092, 0.026725, 0.59757),
                s(-0.023887, 0.01132, 0.15495),
            ),
            (
                MeasureKind::Concurrence,
                s(0.068952, 0.037962, 0.48944),
                s(-0.19631, 0.0089384, -0.076814),
            ),
            (
                MeasureKind::Eof,
                s(0.25496, 0.036393, 0.50209),
                s(-0.062687, 0.0022365, -0.66105),
            ),
            (
                MeasureKind::Discord(R),
                s(0.25496, 0.036393, 0.50209),
                s(-0.062687, 0.0022365, -0.66105),
            ),
            (
                MeasureKind::WorkDeficit(R),
                s(0.079392, 0.051408, 0.64816),
                s(-0.085636, 0.0033781, -0.9464),
            ),
        ],
    )
}

fn table_4() -> Vec<RefCell> {
    let s = |a: f64, b: f64, c: f64| [Some(a), Some(b), Some(c)];
    moment_cells(
        2.0,
        &[
            (
                MeasureKind::Negativity,
                s(0.413269, 0.027109, 0.19832),
                s(0.14462, 0.015031, 0.90635),
            ),
            (
                MeasureKind::LogNegativity,
                s(0.37581, 0.023849, 0.40478),
                s(0.13071, 0.010451, 0.76232),
            ),
            (
                MeasureKind::Concurrence,
                s(0.33335, 0.034293, 0.50371),
                [Some(0.0), None, None],
            ),
            (
                MeasureKind::Eof,
                s(0.3985, 0.040395, 0.32512),
                s(0.060853, 0.0036504, 1.1312),
            ),
            (
                MeasureKind::Discord(R),
                s(0.42308, 0.040715, 0.23827),
                s(0.074828, 0.0043115, 0.84245),
            ),
            (
                MeasureKind::WorkDeficit(R),
                s(0.31472, 0.043941, 0.46134),
                s(0.058729, 0.003126, 0.70358),
            ),
        ],
    )
}

fn table_5() -> Vec<RefCell> {
    // (mean, variance, skewness) at three and six qubits
    let rows: [(MeasureKind, [f64; 3], [f64; 3]); 5] = [
        (
            MeasureKind::Concurrence,
            [0.33335, 0.034293, 0.50371],
            [0.95732, 0.0013211, -1.4482],
        ),
        (
            MeasureKind::Negativity,
            [0.41329, 0.027109, 0.19832],
            [0.95373, 0.0013209, -1.4483],
        ),
        (
            MeasureKind::Eof,
            [0.3985, 0.040395, 0.32512],
            [0.93432, 0.00259, -1.3846],
        ),
        (
            MeasureKind::LogNegativity,
            [0.37581, 0.023849, 0.040478],
            [0.96605, 0.00073, -1.5107],
        ),
        (
            MeasureKind::Discord(R),
            [0.42308, 0.040715, 0.23827],
            [0.92927, 0.0025693, -1.3762],
        ),
    ];
    let mut cells = Vec::new();
    for (measure, three, six) in rows {
        for (n_qubits, values) in [(3, three), (6, six)] {
            for (quantity, value) in [Quantity::Mean, Quantity::Variance, Quantity::Skewness]
                .into_iter()
                .zip(values)
            {
                cells.push(RefCell {
                    measure,
                    class: GHZ,
                    n_qubits,
                    quantity,
                    alpha: Some(2.0),
                    reference: Reference::Value(value),
                });
            }
        }
    }
    cells
}

fn table_6() -> Vec<RefCell> {
    let rows: [(MeasureKind, [f64; 4]); 5] = [
        (
            MeasureKind::Concurrence,
            [0.33335, 0.72941, 0.90175, 0.95732],
        ),
        (
            MeasureKind::Negativity,
            [0.41329, 0.75322, 0.90303, 0.95373],
        ),
        (MeasureKind::Eof, [0.3985, 0.73239, 0.87166, 0.93432]),
        (
            MeasureKind::LogNegativity,
            [0.37581, 0.75106, 0.92158, 0.96605],
        ),
        (
            MeasureKind::Discord(R),
            [0.42308, 0.70413, 0.85582, 0.92927],
        ),
    ];
    rows.iter()
        .flat_map(|&(measure, means)| {
            (3..=6).zip(means).map(move |(n_qubits, mean)| RefCell {
                measure,
                class: GHZ,
                n_qubits,
                quantity: Quantity::Mean,
                alpha: Some(2.0),
                reference: Reference::Value(mean),
            })
        })
        .collect()
}

pub fn reference_cells(table: u8) -> Option<Vec<RefCell>> {
    Some(match table {
        1 => table_1(),
        2 => table_2(),
        3 => table_3(),
        4 => table_4(),
        5 => table_5(),
        6 => table_6(),
        _ => return None,
    })
}

/// A computed value: a number, or a lower bound when `alpha_c` runs past
/// the largest power examined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellValue {
    Number(f64),
    ExceedsMax,
    Undefined,
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub cell: RefCell,
    pub value: CellValue,
}

impl TableRow {
    pub fn deviation(&self) -> Option<f64> {
        match (self.value, self.cell.reference) {
            (CellValue::Number(v), Reference::Value(r)) => Some((v - r).abs()),
            _ => None,
        }
    }
}

/// Recomputes every cell of `table`, sampling each `(class, N, measure)`
/// ensemble once.
type EnsembleKey = (StateClass, usize, MeasureKind);

pub fn compute_table(
    table: u8,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<TableRow>, EnsembleError> {
    let cells = reference_cells(table)
        .ok_or_else(|| EnsembleError::InvalidSpec(format!("no table {table}")))?;
    let mut ensembles: HashMap<EnsembleKey, Vec<MonogamyRecord>> = HashMap::new();
    let mut criticalities: HashMap<EnsembleKey, AlphaC> = HashMap::new();
    let mut moments: HashMap<(StateClass, usize, MeasureKind, u64), Moments> = HashMap::new();
    let grid = AlphaGrid::standard();
    let mut rows = Vec::with_capacity(cells.len());
    for cell in cells {
        let key = (cell.class, cell.n_qubits, cell.measure);
        let records = match ensembles.entry(key) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => {
                let mut spec =
                    EnsembleSpec::new(cell.class, cell.n_qubits, cell.measure, samples, seed);
                spec.workers = workers;
                e.insert(run_ensemble(&spec)?)
            }
        };
        let records = &*records;
        let mut alpha_c = || -> Result<AlphaC, EnsembleError> {
            if let Some(a) = criticalities.get(&key) {
                return Ok(*a);
            }
            let a = estimate_alpha_c(records, DEFAULT_TOL)?;
            criticalities.insert(key, a);
            Ok(a)
        };
        let value = match cell.quantity {
            Quantity::AlphaP => CellValue::Number(estimate_alpha_p(records, &grid, DEFAULT_TOL)?),
            Quantity::AlphaC => match alpha_c()? {
                AlphaC::Finite(a) => CellValue::Number(a),
                AlphaC::ExceedsMax => CellValue::ExceedsMax,
            },
            Quantity::MQ => match alpha_c()? {
                a @ AlphaC::Finite(_) => CellValue::Number(m_q(records, a, DEFAULT_TOL)?),
                AlphaC::ExceedsMax => CellValue::Undefined,
            },
            Quantity::Mean | Quantity::Variance | Quantity::Skewness => {
                let alpha = cell.alpha.unwrap_or(1.0);
                let m = match moments.get(&(
                    cell.class,
                    cell.n_qubits,
                    cell.measure,
                    alpha.to_bits(),
                )) {
                    Some(m) => *m,
                    None => {
                        let m = distribution_stats(records, alpha)?;
                        moments.insert(
                            (cell.class, cell.n_qubits, cell.measure, alpha.to_bits()),
                            m,
                        );
                        m
                    }
                };
                match cell.quantity {
                    Quantity::Mean => CellValue::Number(m.mean),
                    Quantity::Variance => CellValue::Number(m.variance),
                    _ => m.skewness.map_or(CellValue::Undefined, CellValue::Number),
                }
            }
        };
        rows.push(TableRow { cell, value });
    }
    Ok(rows)
}
