//! Multipath wave-particle duality with a path detector that is itself in a
//! superposition of being present and absent.
//!
//! The crate builds the joint quanton/detector states, evaluates l1
//! coherence and unambiguous-discrimination distinguishability both from
//! closed forms and from explicit state vectors, and simulates Mach-Zehnder
//! setups with a quantum or a biased classical second beam-splitter.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, partial trace, Gram embedding, spectra
//! - [`model`]: quanton and detector configurations and the joint states
//! - [`metrics`]: coherence, distinguishability and duality reports
//! - [`interferometer`]: quantum vs biased beam-splitter, expanded detector basis
//! - [`sampling`]: seeded random instances for property checks

pub mod error;
pub mod interferometer;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod sampling;
pub mod tolerance;

pub use error::{Error, Result};
pub use interferometer::{
    bbs_mimic_params, expand_detector_states, run_bbs, run_qbs, run_qbs_conditioned,
    wave_particle_decomposition, BiasedBeamSplitter, DetectionStats, ExpandedDetector, MziConfig,
    QuantumBeamSplitter, SecondSplitter, WaveParticleReport,
};
pub use linalg::{
    gram_embed, is_density_matrix, partial_trace, spectral_decompose, tensor, ComplexMatrix,
    ComplexVector, DensityCheck, GramMatrix, SpectralTerm,
};
pub use metrics::{
    coherence, conditioned_metrics, distinguishability_oracle, distinguishability_uqsd,
    mixed_metrics, naive_distinguishability, DualityReport, MixedReport, Regime,
};
pub use model::{
    apply_channel, build_joint_density, build_joint_pure, build_mixed_joint,
    condition_on_location, ChannelBranch, Conditioned, DetectorModel, KrausChannel,
    LocationProjection, MixedJoint, QuantonConfig,
};
pub use num_complex::Complex64;
