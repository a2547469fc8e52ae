//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by state, circuit, pipeline, optimizer, and metric code.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("qubit count {0} outside the supported range 1..=14")]
    QubitCountOutOfRange(usize),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("control and target must differ (both are qubit {0})")]
    ControlEqualsTarget(usize),

    #[error("register sizes differ: {0} vs {1} qubits")]
    RegisterSizeMismatch(usize, usize),

    #[error("{n_qubits}-qubit register exceeds the {limit}-qubit limit for full unitaries")]
    RegisterTooLarge { n_qubits: usize, limit: usize },

    #[error("not a single-qubit density matrix: {0}")]
    NotADensityMatrix(String),

    #[error("entangler {kind} requires width >= {min}, got {width}")]
    EntanglerWidthTooSmall {
        kind: &'static str,
        min: usize,
        width: usize,
    },

    #[error("ansatz width {0} outside the supported range 2..=12")]
    AnsatzWidthOutOfRange(usize),

    #[error("encoder layout expects {expected} angles, got {got}")]
    WrongAngleCount { expected: usize, got: usize },

    #[error("circuit has {expected} parameter slots, got {got} values")]
    WrongParameterCount { expected: usize, got: usize },

    #[error("circuit has unbound parameter slots")]
    UnboundParameters,

    #[error("decoder {decoder} requires a {expected}-qubit register, got {got}")]
    DecoderWidthMismatch {
        decoder: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("feature '{0}' is constant on the fitting set")]
    DegenerateFeature(&'static str),

    #[error("scaler fitting needs at least 2 records, got {0}")]
    TooFewRecords(usize),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("cost function returned a non-finite value ({context})")]
    NonFiniteCost { context: String },

    #[error("need at least {min} fidelity samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("fidelity sample {0} lies outside [0, 1]")]
    SampleOutOfRange(f64),

    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),

    #[error("MLP architecture must start with 5 inputs and end with 1 output, got {0:?}")]
    BadArchitecture(Vec<usize>),

    #[error("weight vector length {got} does not match architecture parameter count {expected}")]
    WeightLengthMismatch { expected: usize, got: usize },
}
