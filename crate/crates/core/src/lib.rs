//! Discretized linear isometries of `R^n` acting on the integer lattice.
//!
//! A linear isometry `P` is discretized as `P̂ = π ∘ P`, where `π` rounds
//! every coordinate to the nearest integer (ties go down). Composing such
//! maps shrinks `Z^n` to image sets `Γ_k`; this crate computes those sets
//! on exact finite windows and measures their densities, rates of
//! injectivity and difference frequencies, alongside the torus-measure
//! formulas that predict them.

pub mod bitmap;
pub mod density;
pub mod discretize;
pub mod error;
pub mod lattice;
pub mod par;
pub mod raster;
pub mod rng;
pub mod torus;

pub use bitmap::LatticeBitmap;
pub use density::{
    bohr_mean, delone_parameters, diff_frequency, diff_histogram, find_translations, rate_convergence, rate_curve,
    rate_of_injectivity, rational_rate, uniform_r_density, CenterSampling, DeloneParameters, DensityCurve,
    DiffHistogram, RationalMatrix, SequenceSource, Translation,
};
pub use discretize::{apply_hat, image_chain, safe_window_radius, ChainWalker, ImageChain};
pub use error::{Error, Result};
pub use lattice::{
    ball_cardinality, integer_ball, project, round_half_low, IntPoint, Isometry, IsometrySequence, Provenance, RealVec,
    WindowedSet,
};
pub use par::Execution;
pub use raster::{rotate_raster, Raster, RotationStats};
pub use torus::{
    density_decrease_predicate, diffusion_step, equidistribution_discrepancy, phi, rho_geometric, tau_geometric,
    tau_rotation_closed_form, DecreasePrediction, FrequencyBounds, SamplingScheme, SparseWeights, TorusEstimate,
    TorusSampler,
};
