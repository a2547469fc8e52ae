//! End-to-end QNN regression: encode scaled features, run the trainable
//! ansatz, read out a Z expectation, and fit the parameters with Powell
//! against a mean-squared-error cost.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{build_ansatz, build_encoder, AnsatzSpec, Circuit, EncoderSpec};
use crate::error::Error;
use crate::features::{compile_angles, scale_target, FeatureRecord, Scaler, N_FEATURES};
use crate::powell::{powell_minimize, OptimizerSettings};
use crate::state::StateVector;
use crate::Result;

/// Observable whose expectation value is the model output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decoder {
    /// <Z> on qubit 4 (bottom wire of the 5-qubit model).
    Z4,
    /// <Z> on qubit 4 plus <Z> on qubit 9 (the 10-qubit model).
    Z4PlusZ9,
}

impl Decoder {
    pub fn required_width(&self) -> usize {
        match self {
            Decoder::Z4 => 5,
            Decoder::Z4PlusZ9 => 10,
        }
    }

    /// Natural choice for an encoder width.
    pub fn for_width(width: usize) -> Option<Decoder> {
        match width {
            5 => Some(Decoder::Z4),
            10 => Some(Decoder::Z4PlusZ9),
            _ => None,
        }
    }

    /// Inclusive output range.
    pub fn range(&self) -> (f64, f64) {
        match self {
            Decoder::Z4 => (-1.0, 1.0),
            Decoder::Z4PlusZ9 => (-2.0, 2.0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Decoder::Z4 => "z4",
            Decoder::Z4PlusZ9 => "z4_plus_z9",
        }
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        match self {
            Decoder::Z4 => state.expectation_z(4),
            Decoder::Z4PlusZ9 => Ok(state.expectation_z(4)? + state.expectation_z(9)?),
        }
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Decoder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "z4" => Ok(Decoder::Z4),
            "z4_plus_z9" => Ok(Decoder::Z4PlusZ9),
            other => Err(format!("unknown decoder '{other}'")),
        }
    }
}

/// Everything about a QNN model except its parameter values and scaler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnnShape {
    pub encoder: EncoderSpec,
    pub ansatz: AnsatzSpec,
    pub decoder: Decoder,
}

impl QnnShape {
    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        let width = self.encoder.layout.n_qubits();
        if self.ansatz.width != width {
            return Err(Error::AnsatzWidthOutOfRange(self.ansatz.width));
        }
        if self.decoder.required_width() != width {
            return Err(Error::DecoderWidthMismatch {
                decoder: self.decoder.name(),
                expected: self.decoder.required_width(),
                got: width,
            });
        }
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.encoder.layout.n_qubits()
    }

    pub fn parameter_count(&self) -> usize {
        self.ansatz.parameter_count()
    }
}

/// A QNN regression model with bound parameters and a fitted scaler.
#[derive(Debug, Clone, PartialEq)]
pub struct QnnModel {
    pub shape: QnnShape,
    pub params: Vec<f64>,
    pub scaler: Scaler,
}

impl QnnModel {
    pub fn new(shape: QnnShape, params: Vec<f64>, scaler: Scaler) -> Result<Self> {
        shape.validate()?;
        if params.len() != shape.parameter_count() {
            return Err(Error::WrongParameterCount {
                expected: shape.parameter_count(),
                got: params.len(),
            });
        }
        Ok(QnnModel {
            shape,
            params,
            scaler,
        })
    }

    /// Seeded uniform initialization in [0, 2*pi) per parameter.
    pub fn with_random_params(shape: QnnShape, scaler: Scaler, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_parameters(&mut rng, shape.parameter_count());
        QnnModel::new(shape, params, scaler)
    }

    /// Predicted melting point in scaled target units.
    pub fn predict(&self, raw_features: &[f64; N_FEATURES]) -> Result<f64> {
        let encoded = encode(&self.shape, &self.scaler, raw_features)?;
        let ansatz = build_ansatz(&self.shape.ansatz)?.bind_parameters(&self.params)?;
        let mut state = encoded;
        state.run(&ansatz)?;
        self.shape.decoder.expectation(&state)
    }
}

pub(crate) fn random_parameters<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU)
        .collect()
}

/// Encoder-applied state for one record.
fn encode(
    shape: &QnnShape,
    scaler: &Scaler,
    raw_features: &[f64; N_FEATURES],
) -> Result<StateVector> {
    let scaled = scaler.apply(raw_features);
    let angles = compile_angles(shape.encoder.layout, shape.encoder.angle_map, &scaled);
    let encoder = build_encoder(&shape.encoder, &angles)?;
    let mut state = StateVector::zero(shape.width())?;
    state.run(&encoder)?;
    Ok(state)
}

/// Registers at or above this width evaluate records on the rayon pool.
const PARALLEL_WIDTH: usize = 8;

/// MSE cost over a fixed training set with the per-record encoder states
/// precomputed. The ansatz is bound once per evaluation, not per record.
pub struct QnnCost {
    decoder: Decoder,
    ansatz_template: Circuit,
    encoded: Vec<StateVector>,
    targets_scaled: Vec<f64>,
    parallel: bool,
}

impl QnnCost {
    pub fn new(shape: &QnnShape, scaler: &Scaler, records: &[FeatureRecord]) -> Result<Self> {
        shape.validate()?;
        if records.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        let encoded = records
            .iter()
            .map(|r| encode(shape, scaler, &r.features))
            .collect::<Result<Vec<_>>>()?;
        let targets_scaled = records.iter().map(|r| scale_target(r.melting_point_c)).collect();
        Ok(QnnCost {
            decoder: shape.decoder,
            ansatz_template: build_ansatz(&shape.ansatz)?,
            encoded,
            targets_scaled,
            parallel: shape.width() >= PARALLEL_WIDTH,
        })
    }

    pub fn record_count(&self) -> usize {
        self.encoded.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.ansatz_template.parameter_count()
    }

    /// Mean squared error of the decoder output against the scaled
    /// targets. Per-record terms are accumulated in index order so the
    /// result does not depend on the evaluation schedule.
    pub fn eval(&self, params: &[f64]) -> f64 {
        assert_eq!(params.len(), self.parameter_count());
        let ansatz = self
            .ansatz_template
            .bind_parameters(params)
            .expect("length checked above");
        let square_error = |(state, target): (&StateVector, &f64)| -> f64 {
            let mut state = state.clone();
            state.run(&ansatz).expect("encoded states match the ansatz width");
            let prediction = self
                .decoder
                .expectation(&state)
                .expect("decoder validated against width");
            let err = prediction - target;
            err * err
        };
        let errors: Vec<f64> = if self.parallel {
            self.encoded
                .par_iter()
                .zip(self.targets_scaled.par_iter())
                .map(square_error)
                .collect()
        } else {
            self.encoded
                .iter()
                .zip(self.targets_scaled.iter())
                .map(square_error)
                .collect()
        };
        errors.iter().sum::<f64>() / errors.len() as f64
    }
}

/// One-shot MSE evaluation of a parameter vector.
pub fn mse_cost(
    shape: &QnnShape,
    scaler: &Scaler,
    params: &[f64],
    records: &[FeatureRecord],
) -> Result<f64> {
    let cost = QnnCost::new(shape, scaler, records)?;
    if params.len() != cost.parameter_count() {
        return Err(Error::WrongParameterCount {
            expected: cost.parameter_count(),
            got: params.len(),
        });
    }
    Ok(cost.eval(params))
}

/// A trained model, its cost trace, and the sweep count used.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: QnnModel,
    /// Cost at the start and after each Powell sweep; non-increasing.
    pub trace: Vec<f64>,
    pub iterations: usize,
}

/// Fit the model parameters to a training set with Powell, starting from
/// the model's current parameters. Deterministic for a fixed start.
pub fn train(
    model: &QnnModel,
    records: &[FeatureRecord],
    settings: &OptimizerSettings,
) -> Result<TrainOutcome> {
    let cost = QnnCost::new(&model.shape, &model.scaler, records)?;
    let result = powell_minimize(|p| cost.eval(p), &model.params, settings)?;
    let trained = QnnModel::new(model.shape, result.x, model.scaler.clone())?;
    Ok(TrainOutcome {
        model: trained,
        trace: result.trace,
        iterations: result.iterations,
    })
}
