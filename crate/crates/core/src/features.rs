//! Feature scaling, angle maps, and target scaling.
//!
//! Features are standardized with training-set statistics (population
//! convention, divide by N) and then divided by the largest absolute
//! standardized value, so the fitting set lands in [-1, 1] with at least
//! one endpoint attained. Test-set values may fall outside that range and
//! are passed through unclipped.

use crate::circuit::{AngleMap, EncoderLayout};
use crate::error::Error;
use crate::Result;

/// Number of explanatory variables per material.
pub const N_FEATURES: usize = 5;

/// Feature names, in column order.
pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "formation_energy_per_atom",
    "band_gap",
    "density",
    "cati_anio_ratio",
    "dist_from_o",
];

/// Melting points are divided by this many degrees Celsius so the largest
/// target in the study scales to roughly 1.
pub const TARGET_SCALE_C: f64 = 3500.0;

/// One labeled material: five explanatory variables and a melting point.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub material_id: String,
    pub features: [f64; N_FEATURES],
    pub melting_point_c: f64,
}

/// Per-feature standardization statistics, fitted on training folds only.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mean: [f64; N_FEATURES],
    pub std: [f64; N_FEATURES],
    pub max_abs: [f64; N_FEATURES],
}

impl Scaler {
    /// x -> ((x - mean) / std) / max_abs, per feature, without clipping.
    pub fn apply(&self, features: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for i in 0..N_FEATURES {
            out[i] = (features[i] - self.mean[i]) / self.std[i] / self.max_abs[i];
        }
        out
    }

    /// Inverse of [`Scaler::apply`].
    pub fn invert(&self, scaled: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut out = [0.0; N_FEATURES];
        for i in 0..N_FEATURES {
            out[i] = scaled[i] * self.max_abs[i] * self.std[i] + self.mean[i];
        }
        out
    }
}

/// Fit standardize-then-rescale statistics on a fitting set.
pub fn fit_scaler(records: &[FeatureRecord]) -> Result<Scaler> {
    if records.len() < 2 {
        return Err(Error::TooFewRecords(records.len()));
    }
    let n = records.len() as f64;
    let mut mean = [0.0; N_FEATURES];
    let mut std = [0.0; N_FEATURES];
    let mut max_abs = [0.0; N_FEATURES];
    for i in 0..N_FEATURES {
        mean[i] = records.iter().map(|r| r.features[i]).sum::<f64>() / n;
        let variance = records
            .iter()
            .map(|r| {
                let d = r.features[i] - mean[i];
                d * d
            })
            .sum::<f64>()
            / n;
        std[i] = variance.sqrt();
        if std[i] <= 0.0 {
            return Err(Error::DegenerateFeature(FEATURE_NAMES[i]));
        }
        max_abs[i] = records
            .iter()
            .map(|r| ((r.features[i] - mean[i]) / std[i]).abs())
            .fold(0.0, f64::max);
        if max_abs[i] <= 0.0 {
            return Err(Error::DegenerateFeature(FEATURE_NAMES[i]));
        }
    }
    Ok(Scaler { mean, std, max_abs })
}

/// Rotation angle for one scaled feature value.
pub fn angle(map: AngleMap, x: f64) -> f64 {
    match map {
        AngleMap::PiX => std::f64::consts::PI * x,
        AngleMap::ArctanShift => x.atan() + std::f64::consts::FRAC_PI_2,
    }
}

/// Melting point in Celsius to the scaled regression target.
pub fn scale_target(t_celsius: f64) -> f64 {
    t_celsius / TARGET_SCALE_C
}

/// Scaled regression target back to Celsius.
pub fn unscale_target(y: f64) -> f64 {
    y * TARGET_SCALE_C
}

/// Per-qubit rotation angles for an encoder layout.
///
/// FiveX: one angle per feature. TenXX: feature i drives qubits 2i and
/// 2i+1 with the same angle. TenXX2: qubit 2i gets angle(x_i), qubit 2i+1
/// gets angle(x_i^2), the square taken after scaling.
pub fn compile_angles(
    layout: EncoderLayout,
    map: AngleMap,
    scaled_features: &[f64; N_FEATURES],
) -> Vec<f64> {
    match layout {
        EncoderLayout::FiveX => scaled_features.iter().map(|&x| angle(map, x)).collect(),
        EncoderLayout::TenXX => scaled_features
            .iter()
            .flat_map(|&x| [angle(map, x), angle(map, x)])
            .collect(),
        EncoderLayout::TenXX2 => scaled_features
            .iter()
            .flat_map(|&x| [angle(map, x), angle(map, x * x)])
            .collect(),
    }
}
