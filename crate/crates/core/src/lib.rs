//! Graphon laboratory: W-random graphs, exact homomorphism counting, the
//! limiting objects of subgraph-density fluctuations, the degree-CDF kernel
//! and the binomial Edgeworth machinery behind it.

pub mod binom;
pub mod degree_cdf;
pub mod error;
pub mod experiments;
pub mod fluctuation;
pub mod graph;
pub mod graphon;
pub mod hom;
pub mod quad;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use graph::{LabeledMotif, MotifFamily, SimpleGraph, Word};
pub use graphon::{Graphon, QuadratureSpec};
pub use sampler::SampledGraph;
