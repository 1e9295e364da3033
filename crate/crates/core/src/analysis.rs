//! Fringe metrics for sampled 1-D scans.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aperture, Geometry};

pub const MIN_SAMPLES: usize = 16;

/// Relative tolerance on the lattice spacing.
const SPACING_TOLERANCE: f64 = 1e-9;

/// A scan on a uniform lattice r = r₀ + i·h.
///
/// Lattice nodes may be missing (singular coordinates removed from a scan
/// grid); every present spacing is an integer multiple of the step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignal")]
pub struct SampledSignal {
    coordinates: Vec<f64>,
    values: Vec<f64>,
    #[serde(skip)]
    step: f64,
}

#[derive(Deserialize)]
struct RawSignal {
    coordinates: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawSignal> for SampledSignal {
    type Error = Error;

    fn try_from(raw: RawSignal) -> Result<Self> {
        SampledSignal::new(raw.coordinates, raw.values)
    }
}

impl SampledSignal {
    pub fn new(coordinates: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if coordinates.len() != values.len() {
            return Err(Error::InvalidSignal(format!(
                "{} coordinates but {} values",
                coordinates.len(),
                values.len()
            )));
        }
        if coordinates.len() < MIN_SAMPLES {
            return Err(Error::InvalidSignal(format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                coordinates.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidSignal(format!(
                "value {} at index {i} is negative or not finite",
                values[i]
            )));
        }
        if coordinates.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSignal("coordinates must be finite".into()));
        }
        let spacings: Vec<f64> = coordinates.windows(2).map(|w| w[1] - w[0]).collect();
        if spacings.iter().any(|&s| s <= 0.0) {
            return Err(Error::InvalidSignal(
                "coordinates must be strictly increasing".into(),
            ));
        }
        let step = spacings.iter().cloned().fold(f64::INFINITY, f64::min);
        for &s in &spacings {
            let multiple = (s / step).round();
            if (s - multiple * step).abs() > SPACING_TOLERANCE * multiple * step {
                return Err(Error::InvalidSignal(format!(
                    "spacing {s:e} is not a multiple of the lattice step {step:e}"
                )));
            }
        }
        Ok(SampledSignal {
            coordinates,
            values,
            step,
        })
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn lattice_index(&self, i: usize) -> usize {
        ((self.coordinates[i] - self.coordinates[0]) / self.step).round() as usize
    }

    /// Same coordinates, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        SampledSignal::new(self.coordinates.clone(), values)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// Fringe metrics of one scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeReport {
    /// Cycles per meter of scan coordinate.
    pub dominant_frequency: f64,
    pub zero_count: usize,
    pub visibility: f64,
}

/// Relative threshold used by [`fringe_report`] for zero counting.
pub const ZERO_THRESHOLD: f64 = 1e-6;

pub fn fringe_report(signal: &SampledSignal) -> Result<FringeReport> {
    Ok(FringeReport {
        dominant_frequency: dominant_frequency(signal)?,
        zero_count: count_zeros(signal, ZERO_THRESHOLD),
        visibility: visibility(signal)?,
    })
}

/// Frequency of the strongest DFT component of the mean-subtracted signal,
/// refined by a parabola through the peak bin and its neighbours.
///
/// Missing lattice nodes are filled with the mean, so they contribute
/// nothing after mean subtraction. For s(r) = sin²(π f r) this returns f.
pub fn dominant_frequency(signal: &SampledSignal) -> Result<f64> {
    let n = signal.lattice_index(signal.len() - 1) + 1;
    let mean = signal.values.iter().sum::<f64>() / signal.len() as f64;
    let mut buffer = vec![Complex::new(0.0, 0.0); n];
    for (i, &v) in signal.values.iter().enumerate() {
        buffer[signal.lattice_index(i)] = Complex::new(v - mean, 0.0);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

    let half = n / 2;
    let magnitude: Vec<f64> = buffer[..=half].iter().map(|z| z.norm()).collect();
    let (peak, &peak_mag) = magnitude
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InsufficientData("signal too short for a spectrum".into()))?;
    if peak_mag == 0.0 {
        return Err(Error::InsufficientData(
            "signal has no oscillating component".into(),
        ));
    }
    if peak < 2 {
        return Err(Error::InsufficientData(format!(
            "fewer than 2 periods in the scan window (spectral peak in bin {peak})"
        )));
    }
    let mut offset = 0.0;
    if peak < half {
        let (left, right) = (magnitude[peak - 1], magnitude[peak + 1]);
        let curvature = left - 2.0 * peak_mag + right;
        if curvature < 0.0 {
            offset = 0.5 * (left - right) / curvature;
        }
    }
    let window = n as f64 * signal.step;
    Ok((peak as f64 + offset) / window)
}

/// Number of interior local minima that reach (close to) zero.
///
/// A minimum at sample i counts when its estimated floor is at most
/// `threshold` × the signal maximum. The floor comes from fitting a V to
/// √value over samples i-1, i, i+1, which is exact for signals that touch
/// zero quadratically (sin²-type) even when no sample lands on the zero.
pub fn count_zeros(signal: &SampledSignal, threshold: f64) -> usize {
    let v = &signal.values;
    let limit = threshold * signal.max_value();
    if limit <= 0.0 {
        return 0;
    }
    (1..v.len() - 1)
        .filter(|&i| v[i] < v[i - 1] && v[i] <= v[i + 1])
        .filter(|&i| {
            let (a0, a1, a2) = (v[i - 1].sqrt(), v[i].sqrt(), v[i + 1].sqrt());
            let slope = (a0 - a1).max(a2 - a1);
            let floor = (0.5 * (a0.min(a2) + a1 - slope)).max(0.0);
            floor * floor <= limit
        })
        .count()
}

/// (max - min)/(max + min) over the samples.
pub fn visibility(signal: &SampledSignal) -> Result<f64> {
    let max = signal.max_value();
    let min = signal.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((max - min) / (max + min))
}

/// Pointwise division by a known positive envelope.
pub fn flatten_envelope(signal: &SampledSignal, envelope: &[f64]) -> Result<SampledSignal> {
    if envelope.len() != signal.len() {
        return Err(Error::InvalidSignal(format!(
            "envelope has {} entries for {} samples",
            envelope.len(),
            signal.len()
        )));
    }
    if let Some((index, &value)) = envelope
        .iter()
        .enumerate()
        .find(|(_, e)| !(e.is_finite() && **e > 0.0))
    {
        return Err(Error::NonPositiveEnvelope { index, value });
    }
    signal.with_values(
        signal
            .values
            .iter()
            .zip(envelope)
            .map(|(v, e)| v / e)
            .collect(),
    )
}

/// Whether a scan out to `scan_max` reaches the first diffraction order of a
/// pattern modulated `enhancement` times faster than the classical one:
/// k a scan_max/(2 r_z) ≥ 2π/enhancement (inclusive up to rounding).
pub fn abbe_range_check(
    aperture: &Aperture,
    geometry: &Geometry,
    scan_max: f64,
    enhancement: u32,
) -> bool {
    let phase =
        geometry.wavenumber() * aperture.height() * scan_max / (2.0 * geometry.detector_distance());
    phase * enhancement as f64 >= 2.0 * PI * (1.0 - 1e-12)
}

/// Uniform grid on [min, max] with `steps` nodes, minus every node closer
/// than half a step to one of the `excluded` points inside [min, max].
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub coordinates: Vec<f64>,
    /// Nodes that were dropped.
    pub excluded: Vec<f64>,
    pub step: f64,
}

impl ScanGrid {
    pub fn new(min: f64, max: f64, steps: usize, excluded: &[f64]) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::invalid(
                "scan range",
                format!("need scan_min < scan_max, got [{min}, {max}]"),
            ));
        }
        if steps < 2 {
            return Err(Error::invalid("steps", "need at least 2 grid nodes"));
        }
        let step = (max - min) / (steps - 1) as f64;
        let excluded: Vec<f64> = excluded
            .iter()
            .cloned()
            .filter(|s| (min..=max).contains(s))
            .collect();
        let mut coordinates = Vec::with_capacity(steps);
        let mut dropped = Vec::new();
        for i in 0..steps {
            let r = if i == steps - 1 {
                max
            } else {
                min + i as f64 * step
            };
            if excluded.iter().any(|&s| (r - s).abs() < 0.5 * step) {
                dropped.push(r);
            } else {
                coordinates.push(r);
            }
        }
        Ok(ScanGrid {
            coordinates,
            excluded: dropped,
            step,
        })
    }
}
