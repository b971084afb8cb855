//! Experience-set intuition model, classical baselines, and an
//! incremental-reveal benchmark harness.
//!
//! The library has four layers:
//!
//! * [`model`] — the intuition model itself: scaled scores, experience
//!   elements, and the mapping/classification pipeline behind [`model::intuit`].
//! * [`datasets`] — loaders and seeded generators for the two benchmark
//!   datasets (car evaluation and poker hands), plus the uncertainty
//!   injectors and reveal sequences used by the experiments.
//! * [`baselines`] — the comparison predictors: a small feedforward network,
//!   a class-aligned hidden Markov model, and an exact combinatorial poker
//!   probability calculator.
//! * [`experiments`] — the benchmark protocols that reveal records one
//!   attribute at a time, ask every method for a prediction at each step,
//!   and aggregate error and timing reports.
//!
//! Everything is deterministic given a seed: the same configuration always
//! produces the same records, the same trained models, and the same reports.

pub mod baselines;
pub mod datasets;
pub mod experiments;
pub mod model;

pub(crate) mod seed;
