//! Batch driver: evaluate a scenario over a detector scan, analyze the
//! fringes, and cross-check the far-field amplitude against quadrature.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{flatten_envelope, fringe_report, FringeReport, SampledSignal, ScanGrid};
use crate::config::{OracleSettings, ScanConfig, Scenario};
use crate::correlation::{
    amplitude_matrix, classical_envelope, classical_intensity, g2_envelope,
    g2_envelope_singularities, g_n, grating_partner, ClosedFormVariant,
};
use crate::diffraction::{field, fraunhofer_validity_margin, fresnel_to_closed_form};
use crate::error::{Error, Result};
use crate::geometry::{
    detector_offset, emitter_offset, paper_emitter_pair, paper_emitter_quad, resolve_layout,
    ApertureKind, DetectorLayout, EmitterArray, PlacementStrategy, Transverse,
};
use crate::quadrature::fresnel_field_oracle;

/// How a signal was normalized before its fringes were analyzed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flattening {
    /// Divided by the single-slit 1/r² envelope.
    ClassicalEnvelope,
    /// Divided by the exact two-photon envelope for the pair placement.
    TwoPhotonEnvelope(ClosedFormVariant),
    /// Divided by Π_i (1/N) Σ_j |U_ij|², the product of the mean
    /// single-detector intensities.
    IntensityProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMetadata {
    pub config: ScanConfig,
    pub wavenumber: f64,
    pub emitter_offset: f64,
    pub detector_offset: f64,
    /// Grid nodes dropped because they sit on a singular coordinate.
    pub excluded: Vec<f64>,
    pub fraunhofer_validity_margin: f64,
    pub flattening: Flattening,
    /// Dominant frequency of the signal over that of the classical reference.
    pub frequency_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub signal: SampledSignal,
    pub report: FringeReport,
    /// Coherent single-aperture intensity on the same grid.
    pub classical_reference: SampledSignal,
    pub classical_report: FringeReport,
    pub metadata: ScanMetadata,
}

/// [`run_scan_with_workers`] on the global rayon pool.
pub fn run_scan(config: &ScanConfig) -> Result<ScanResult> {
    evaluate(config)
}

/// Scan with a dedicated pool of `workers` threads. The output does not
/// depend on the worker count.
pub fn run_scan_with_workers(config: &ScanConfig, workers: usize) -> Result<ScanResult> {
    with_pool(workers, || evaluate(config))
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers == 0 {
        return Err(Error::invalid("workers", "must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::ContractViolation(format!("cannot start worker pool: {e}")))?;
    pool.install(job)
}

/// Coordinates a scan of `config` has to skip.
pub fn singular_points(config: &ScanConfig) -> Vec<f64> {
    // the classical reference is flattened by a 1/r² envelope
    let mut points = vec![0.0];
    if let Some(variant) = pair_variant(config.scenario) {
        if config.aperture.kind() == ApertureKind::Rect {
            points.extend(g2_envelope_singularities(
                variant,
                &config.aperture,
                &config.geometry,
            ));
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

fn pair_variant(scenario: Scenario) -> Option<ClosedFormVariant> {
    match scenario {
        Scenario::G2Mirror => Some(ClosedFormVariant::Minus),
        Scenario::G2Coincident => Some(ClosedFormVariant::Plus),
        _ => None,
    }
}

/// Emitters used by `config`'s scenario. Classical scenarios have none.
pub fn scenario_emitters(config: &ScanConfig) -> Option<EmitterArray> {
    let (g, ap) = (&config.geometry, &config.aperture);
    match config.scenario {
        Scenario::ClassicalRect | Scenario::ClassicalGrating => None,
        Scenario::G4Quad => Some(paper_emitter_quad(g, ap)),
        Scenario::G2Mirror | Scenario::G2Coincident | Scenario::G2Grating => {
            Some(paper_emitter_pair(g, ap, config.base_x))
        }
    }
}

/// Detector positions of `config`'s correlation scenario with the scan
/// coordinate at `r`. Classical scenarios have none.
pub fn scenario_detectors(config: &ScanConfig, r: f64) -> Result<Option<DetectorLayout>> {
    let (g, ap) = (&config.geometry, &config.aperture);
    let strategy = match config.scenario {
        Scenario::ClassicalRect | Scenario::ClassicalGrating => return Ok(None),
        Scenario::G2Mirror => PlacementStrategy::MirrorPair,
        Scenario::G2Coincident => PlacementStrategy::CoincidentPair,
        Scenario::G4Quad => PlacementStrategy::PaperQuad,
        Scenario::G2Grating => {
            let r2 = grating_partner(r, config.grating_rule, ap, g)?;
            return Ok(Some(DetectorLayout::new(vec![
                Transverse::on_x(r),
                Transverse::on_x(r2),
            ])?));
        }
    };
    Ok(Some(resolve_layout(strategy, r, g, ap)))
}

/// Signal value of `config`'s scenario with the scan coordinate at `r`.
pub fn signal_at(config: &ScanConfig, emitters: Option<&EmitterArray>, r: f64) -> Result<f64> {
    let (g, ap) = (&config.geometry, &config.aperture);
    match (scenario_detectors(config, r)?, emitters) {
        (None, _) => classical_intensity(Transverse::on_x(r), ap, g),
        (Some(detectors), Some(emitters)) => Ok(g_n(&detectors, emitters, ap, g)?.value()),
        (Some(_), None) => Err(Error::ContractViolation("scenario needs emitters".into())),
    }
}

/// Π_i (1/N) Σ_j |U_ij|² for the scenario's detectors at `r`.
pub fn intensity_product(config: &ScanConfig, emitters: &EmitterArray, r: f64) -> Result<f64> {
    let detectors = scenario_detectors(config, r)?.ok_or_else(|| {
        Error::ContractViolation("classical scenarios have no detector set".into())
    })?;
    let m = amplitude_matrix(&detectors, emitters, &config.aperture, &config.geometry)?;
    let n = m.size();
    Ok((0..n)
        .map(|i| (0..n).map(|j| m.get(i, j).norm_sqr()).sum::<f64>() / n as f64)
        .product())
}

fn evaluate(config: &ScanConfig) -> Result<ScanResult> {
    let singular = singular_points(config);
    let grid = ScanGrid::new(config.scan_min, config.scan_max, config.steps, &singular)?;
    let emitters = scenario_emitters(config);

    let rows: Vec<(f64, f64)> = grid
        .coordinates
        .par_iter()
        .map(|&r| {
            let signal = signal_at(config, emitters.as_ref(), r)?;
            let classical =
                classical_intensity(Transverse::on_x(r), &config.aperture, &config.geometry)?;
            Ok((signal, classical))
        })
        .collect::<Result<_>>()?;

    let signal = SampledSignal::new(grid.coordinates.clone(), rows.iter().map(|p| p.0).collect())?;
    let classical = signal.with_values(rows.iter().map(|p| p.1).collect())?;
    let mut result = analyze_parts(config, signal, classical)?;
    result.metadata.excluded = grid.excluded;
    Ok(result)
}

/// Which normalization [`analyze`] applies for `config`.
pub fn flattening_for(config: &ScanConfig) -> Flattening {
    match pair_variant(config.scenario) {
        Some(v) if config.aperture.kind() == ApertureKind::Rect && config.base_x == 0.0 => {
            Flattening::TwoPhotonEnvelope(v)
        }
        _ if config.scenario.is_classical() => Flattening::ClassicalEnvelope,
        _ => Flattening::IntensityProduct,
    }
}

/// Recompute reports and metadata for an existing scan.
pub fn analyze(result: &ScanResult) -> Result<ScanResult> {
    let mut fresh = analyze_parts(
        &result.metadata.config,
        result.signal.clone(),
        result.classical_reference.clone(),
    )?;
    fresh.metadata.excluded = result.metadata.excluded.clone();
    Ok(fresh)
}

fn analyze_parts(
    config: &ScanConfig,
    signal: SampledSignal,
    classical: SampledSignal,
) -> Result<ScanResult> {
    let (g, ap) = (&config.geometry, &config.aperture);
    let flattening = flattening_for(config);
    let envelope = |f: &dyn Fn(f64) -> Result<f64>| -> Result<Vec<f64>> {
        signal.coordinates().iter().map(|&r| f(r)).collect()
    };

    let classical_flat =
        flatten_envelope(&classical, &envelope(&|r| classical_envelope(r, ap, g))?)?;
    let classical_report = fringe_report(&classical_flat)?;

    let report = match flattening {
        Flattening::ClassicalEnvelope => classical_report,
        Flattening::TwoPhotonEnvelope(v) => fringe_report(&flatten_envelope(
            &signal,
            &envelope(&|r| g2_envelope(r, v, ap, g))?,
        )?)?,
        Flattening::IntensityProduct => {
            let emitters = scenario_emitters(config)
                .ok_or_else(|| Error::ContractViolation("scenario needs emitters".into()))?;
            let product = envelope(&|r| intensity_product(config, &emitters, r))?;
            fringe_report(&flatten_envelope(&signal, &product)?)?
        }
    };

    Ok(ScanResult {
        metadata: ScanMetadata {
            config: config.clone(),
            wavenumber: g.wavenumber(),
            emitter_offset: emitter_offset(g, ap),
            detector_offset: detector_offset(g, ap),
            excluded: Vec::new(),
            fraunhofer_validity_margin: fraunhofer_validity_margin(ap, g),
            flattening,
            frequency_ratio: report.dominant_frequency / classical_report.dominant_frequency,
        },
        signal,
        report,
        classical_reference: classical,
        classical_report,
    })
}

/// Largest number of detector positions used by [`run_oracle_check`].
pub const ORACLE_MAX_POINTS: usize = 64;
/// Points with |U| below this fraction of the largest |U| are not compared.
pub const ORACLE_NEAR_ZERO: f64 = 1e-3;
/// Phases are compared only where |U| is at least this fraction of the
/// largest |U|; near a zero the phase error grows like δU/|U|.
pub const ORACLE_PHASE_FLOOR: f64 = 0.1;
/// Agreement required of the closed form, relative in |U|.
pub const ORACLE_AGREEMENT: f64 = 0.01;
/// Validity margin above which the far-field form is expected to hold.
pub const FAR_FIELD_MARGIN: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub sample_count: usize,
    /// Points skipped because the field nearly vanishes there.
    pub skipped_near_zero: usize,
    /// max ||U_fresnel/c| - |U_closed|| / |U_closed|, c = -R_z r_z.
    pub max_relative_error: f64,
    /// max |U_fresnel/(c U_closed) - 1|, phase included.
    pub max_complex_error: f64,
    /// Largest error in the phase of U relative to the first phase-compared
    /// detector of the same emitter, in radians.
    pub max_phase_difference_error: f64,
    /// Points entering the phase comparison (see [`ORACLE_PHASE_FLOOR`]).
    pub phase_compared: usize,
    /// Mean of |U_fresnel|/|U_closed| before the conversion.
    pub raw_magnitude_ratio: f64,
    /// The conversion constant c, as (re, im).
    pub normalization: (f64, f64),
    /// Largest change of |U_fresnel| under subdivision doubling.
    pub max_self_change: f64,
    pub fraunhofer_validity_margin: f64,
    /// Margin at or above [`FAR_FIELD_MARGIN`].
    pub far_field_regime: bool,
    /// max_relative_error within [`ORACLE_AGREEMENT`].
    pub agrees: bool,
}

/// Detector positions for the oracle: midpoints of at most
/// [`ORACLE_MAX_POINTS`] equal cells spanning the scan window.
pub fn oracle_detectors(config: &ScanConfig) -> Vec<f64> {
    let n = config.steps.min(ORACLE_MAX_POINTS);
    let width = (config.scan_max - config.scan_min) / n as f64;
    (0..n)
        .map(|i| config.scan_min + (i as f64 + 0.5) * width)
        .collect()
}

/// Compare the closed-form amplitude with the Fresnel integral for every
/// emitter of the scenario (or one emitter at `base_x` for classical runs).
pub fn run_oracle_check(config: &ScanConfig, workers: usize) -> Result<OracleReport> {
    let settings = config.oracle.ok_or_else(|| {
        Error::ContractViolation("the configuration has no `oracle` section".into())
    })?;
    with_pool(workers, || oracle_report(config, settings))
}

fn oracle_report(config: &ScanConfig, settings: OracleSettings) -> Result<OracleReport> {
    let (g, ap) = (&config.geometry, &config.aperture);
    let emitters: Vec<Transverse> = match scenario_emitters(config) {
        Some(e) => e.positions().to_vec(),
        None => vec![Transverse::on_x(config.base_x)],
    };
    let detectors = oracle_detectors(config);
    let pairs: Vec<(Transverse, Transverse)> = emitters
        .iter()
        .flat_map(|&e| detectors.iter().map(move |&r| (e, Transverse::on_x(r))))
        .collect();

    let samples: Vec<(usize, _, _)> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, &(e, d))| {
            let closed = field(d, e, ap, g)?;
            let oracle = fresnel_field_oracle(
                d,
                e,
                ap,
                g,
                settings.quadrature,
                settings.convergence_tolerance,
            )?;
            Ok((i, closed, oracle))
        })
        .collect::<Result<_>>()?;

    let conversion = fresnel_to_closed_form(g);
    let peak = samples.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
    let mut report = OracleReport {
        sample_count: 0,
        skipped_near_zero: 0,
        max_relative_error: 0.0,
        max_complex_error: 0.0,
        max_phase_difference_error: 0.0,
        phase_compared: 0,
        raw_magnitude_ratio: 0.0,
        normalization: (conversion.re, conversion.im),
        max_self_change: 0.0,
        fraunhofer_validity_margin: fraunhofer_validity_margin(ap, g),
        far_field_regime: false,
        agrees: false,
    };
    let mut ratio_sum = 0.0;
    for chunk in samples.chunks(detectors.len()) {
        let mut reference = None;
        for &(_, closed, ref sample) in chunk {
            report.max_self_change = report.max_self_change.max(sample.self_change);
            if closed.norm() < ORACLE_NEAR_ZERO * peak {
                report.skipped_near_zero += 1;
                continue;
            }
            let scaled = sample.value / conversion;
            report.sample_count += 1;
            ratio_sum += sample.value.norm() / closed.norm();
            report.max_relative_error = report
                .max_relative_error
                .max((scaled.norm() - closed.norm()).abs() / closed.norm());
            report.max_complex_error = report.max_complex_error.max((scaled / closed - 1.0).norm());
            if closed.norm() < ORACLE_PHASE_FLOOR * peak {
                continue;
            }
            report.phase_compared += 1;
            match reference {
                None => reference = Some((closed, scaled)),
                Some((c0, s0)) => {
                    let expected = (closed / c0).arg();
                    let measured = (scaled / s0).arg();
                    let diff = wrap_phase(measured - expected).abs();
                    report.max_phase_difference_error = report.max_phase_difference_error.max(diff);
                }
            }
        }
    }
    if report.sample_count == 0 {
        return Err(Error::InsufficientData(
            "the field vanishes at every oracle detector".into(),
        ));
    }
    report.raw_magnitude_ratio = ratio_sum / report.sample_count as f64;
    report.far_field_regime = report.fraunhofer_validity_margin >= FAR_FIELD_MARGIN;
    report.agrees = report.max_relative_error <= ORACLE_AGREEMENT;
    Ok(report)
}

fn wrap_phase(p: f64) -> f64 {
    use std::f64::consts::PI;
    (p + PI).rem_euclid(2.0 * PI) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::OracleSettings;
    use crate::quadrature::QuadratureSpec;

    fn small(scenario: Scenario, steps: usize) -> ScanConfig {
        ScanConfig {
            steps,
            ..ScanConfig::for_scenario(scenario)
        }
    }

    #[test]
    fn mirror_scan_skips_singular_nodes() {
        let config = small(Scenario::G2Mirror, 257);
        let result = run_scan(&config).unwrap();
        let rho = result.metadata.detector_offset;
        assert!(result.metadata.excluded.contains(&0.0));
        assert!(result
            .metadata
            .excluded
            .iter()
            .any(|&r| (r - rho).abs() < 1e-12));
        assert_eq!(result.signal.len() + result.metadata.excluded.len(), 257);
        assert_eq!(
            result.metadata.flattening,
            Flattening::TwoPhotonEnvelope(ClosedFormVariant::Minus)
        );
    }

    #[test]
    fn two_photon_pair_doubles_the_frequency() {
        let result = run_scan(&small(Scenario::G2Mirror, 1024)).unwrap();
        assert!(
            (result.metadata.frequency_ratio - 2.0).abs() < 0.05,
            "{:?}",
            result.metadata
        );
        assert!(result.report.visibility > 0.99);
    }

    #[test]
    fn classical_scan_reports_itself() {
        let result = run_scan(&small(Scenario::ClassicalRect, 512)).unwrap();
        assert_eq!(result.signal, result.classical_reference);
        assert_eq!(result.metadata.frequency_ratio, 1.0);
        // sin²(k a r/2r_z) completes one cycle per λ r_z/a = 25 mm
        assert!((result.report.dominant_frequency - 40.0).abs() < 0.5);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let config = ScanConfig {
            scan_max: 0.1,
            ..small(Scenario::G4Quad, 256)
        };
        let one = run_scan_with_workers(&config, 1).unwrap();
        let four = run_scan_with_workers(&config, 4).unwrap();
        assert_eq!(one, four);
        assert!(run_scan_with_workers(&config, 0).is_err());
    }

    #[test]
    fn short_windows_are_refused() {
        // the default window holds less than two periods of the normalized G4
        let err = run_scan(&small(Scenario::G4Quad, 128)).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)), "{err}");
    }

    #[test]
    fn reanalysis_is_stable() {
        let result = run_scan(&small(Scenario::G2Coincident, 200)).unwrap();
        assert_eq!(analyze(&result).unwrap(), result);
    }

    #[test]
    fn oracle_requires_section() {
        let config = small(Scenario::ClassicalRect, 32);
        assert!(matches!(
            run_oracle_check(&config, 1),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn oracle_agrees_in_far_field() {
        let config = ScanConfig {
            oracle: Some(OracleSettings {
                quadrature: QuadratureSpec::new(16, 2).unwrap(),
                convergence_tolerance: 1e-3,
            }),
            ..small(Scenario::ClassicalRect, 16)
        };
        let report = run_oracle_check(&config, 2).unwrap();
        assert!(report.far_field_regime);
        assert!(report.agrees, "{report:?}");
        assert!(report.max_phase_difference_error < 0.05, "{report:?}");
        let rz_rz = config.geometry.source_distance() * config.geometry.detector_distance();
        assert!((report.raw_magnitude_ratio / rz_rz - 1.0).abs() < 0.01);
    }
}
