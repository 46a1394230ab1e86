//! Monogamy of quantum correlations in random multiqubit pure states.
//!
//! The crate samples Haar-random and W-class pure states, evaluates six
//! bipartite correlation measures, forms the monogamy score
//! `Q(nodal : rest)^alpha - sum_j Q(nodal : j)^alpha` and reduces whole
//! ensembles to nonmonogamous fractions, critical powers and score
//! distributions.
//!
//! ```
//! use monoscore::measures::MeasureKind;
//! use monoscore::monogamy::{measure_state, score};
//! use monoscore::states::{named_state, NamedState};
//!
//! let ghz = named_state(NamedState::Ghz, 3).unwrap();
//! let record = measure_state(&ghz, MeasureKind::Concurrence, 0).unwrap();
//! assert!((score(&record, 2.0).unwrap() - 1.0).abs() < 1e-10);
//! ```

pub mod export;
pub mod linalg;
pub mod measures;
pub mod monogamy;
pub mod montecarlo;
pub mod states;

pub use measures::{Direction, MeasureKind};
pub use monogamy::{measure_state, MonogamyRecord};
pub use montecarlo::{
    run_ensemble, summarize, AlphaC, AlphaGrid, EnsembleSpec, EnsembleSummary, StateClass,
};
pub use states::{PureState, RandomSeed};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/monogamy.md")]
    mod monogamy {}
    #[doc = include_str!("../../../book/src/ensembles.md")]
    mod ensembles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
