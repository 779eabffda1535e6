use thiserror::Error;

/// Errors shared by all library modules.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Unknown protocol family or invalid protocol parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// The post-quench Bloch vector vanishes at some momentum; the
    /// time-rescaled momentum-time manifold is then undefined.
    #[error("gapless post-quench Hamiltonian at k = {k}")]
    GaplessPostQuench { k: f64 },

    /// The pre-quench Bloch vector vanishes at some momentum.
    #[error("gapless pre-quench Hamiltonian at k = {k}")]
    GaplessPreQuench { k: f64 },

    /// The parent Bloch vector gap closes at a sampled momentum.
    #[error("parent Hamiltonian gap closes at k = {k}, t = {t}")]
    GaplessParent { k: f64, t: f64 },

    /// Real-space reconstruction needs harmonics beyond next-nearest
    /// neighbors.
    #[error("unsupported hopping range: harmonic content beyond order {max_order} (residual {residual:.3e})")]
    UnsupportedRange { max_order: usize, residual: f64 },

    /// A zero single-particle energy makes the half-filled ground state
    /// ambiguous.
    #[error("ambiguous filling: single-particle level at |E| = {energy:.3e}")]
    AmbiguousFilling { energy: f64 },

    /// Mismatched matrix or basis dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The Z2 invariant from real momenta is undefined.
    #[error("undefined invariant: d_P^(x) vanishes at real momentum k = {k}")]
    UndefinedInvariant { k: f64 },

    /// The bond-operator mapping requires J' = 0.
    #[error("mapping undefined: {0}")]
    MappingUndefined(String),

    /// Fock-space dimension exceeds the configured cap.
    #[error("basis overflow: {states} states exceeds cap {cap}")]
    BasisOverflow { states: usize, cap: usize },

    /// Iterative eigensolver failed to converge.
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Slater determinants with different particle numbers have no overlap
    /// matrix.
    #[error("particle number mismatch: {left} vs {right}")]
    ParticleNumberMismatch { left: usize, right: usize },

    /// Dense linear algebra backend failure.
    #[error("linear algebra error: {0}")]
    Linalg(String),
}
