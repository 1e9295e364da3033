//! Scan configuration: a strict JSON document with unit-suffixed lengths.
//!
//! ```json
//! {
//!   "scenario": "G2Mirror",
//!   "geometry": { "wavelength": "500nm", "source_distance": "0.1m", "detector_distance": "1m" },
//!   "aperture": { "kind": "Rect", "height": "20um", "width": "20um" },
//!   "scan_min": 0, "scan_max": "50mm", "steps": 512,
//!   "oracle": { "points_per_axis": 32, "subdivisions": 4 }
//! }
//! ```
//!
//! Every field except `scenario` has a default. Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::correlation::GratingRule;
use crate::error::{Error, Result};
use crate::geometry::{Aperture, ApertureKind, Geometry};
use crate::quadrature::QuadratureSpec;
use crate::units::Length;

pub const DEFAULT_STEPS: usize = 512;
pub const MIN_STEPS: usize = 16;
pub const DEFAULT_SLIT_SEPARATION: f64 = 60e-6;
pub const DEFAULT_SLIT_COUNT: usize = 3;
pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_OUTPUT_PATH: &str = "scan.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    ClassicalRect,
    ClassicalGrating,
    G2Mirror,
    G2Coincident,
    G4Quad,
    G2Grating,
}

impl Scenario {
    pub fn is_classical(self) -> bool {
        matches!(self, Scenario::ClassicalRect | Scenario::ClassicalGrating)
    }

    fn default_aperture_kind(self) -> ApertureKind {
        match self {
            Scenario::ClassicalGrating | Scenario::G2Grating => ApertureKind::Grating,
            _ => ApertureKind::Rect,
        }
    }
}

/// Quadrature settings for the Fresnel cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub quadrature: QuadratureSpec,
    /// Largest accepted relative change of |U| under subdivision doubling.
    pub convergence_tolerance: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings {
            quadrature: QuadratureSpec::default(),
            convergence_tolerance: DEFAULT_ORACLE_TOLERANCE,
        }
    }
}

/// Validated scan configuration, all lengths in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ConfigDocument", try_from = "ConfigDocument")]
pub struct ScanConfig {
    pub geometry: Geometry,
    pub aperture: Aperture,
    pub scenario: Scenario,
    pub scan_min: f64,
    pub scan_max: f64,
    pub steps: usize,
    /// x position of the first emitter of the two-emitter schemes.
    pub base_x: f64,
    pub grating_rule: GratingRule,
    pub oracle: Option<OracleSettings>,
    pub output_path: String,
}

impl ScanConfig {
    /// Defaults for `scenario`, scanning (0, 2λr_z/a].
    pub fn for_scenario(scenario: Scenario) -> Self {
        let doc = ConfigDocument {
            scenario,
            ..ConfigDocument::default()
        };
        ScanConfig::try_from(doc).expect("defaults are valid")
    }

    /// 2λr_z/a: one full classical fringe period on each side of the first zero.
    pub fn classical_window(geometry: &Geometry, aperture: &Aperture) -> f64 {
        2.0 * geometry.wavelength() * geometry.detector_distance() / aperture.height()
    }
}

/// Read and validate a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScanConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

/// Parse a configuration document; `origin` is only used in messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<ScanConfig> {
    let doc: ConfigDocument = serde_json::from_str(text).map_err(|e| Error::ConfigParse {
        path: origin.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    ScanConfig::try_from(doc).map_err(|message| Error::ConfigValidation {
        path: origin.to_path_buf(),
        message,
    })
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_distance: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector_distance: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ApertureKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slit_separation: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slit_count: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points_per_axis: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// On-disk form of [`ScanConfig`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub scenario: Scenario,
    #[serde(default)]
    pub geometry: GeometryDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aperture: Option<ApertureDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_min: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_max: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_x: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grating_rule: Option<GratingRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl Default for ConfigDocument {
    fn default() -> Self {
        ConfigDocument {
            scenario: Scenario::G2Mirror,
            geometry: GeometryDocument::default(),
            aperture: None,
            scan_min: None,
            scan_max: None,
            steps: None,
            base_x: None,
            grating_rule: None,
            oracle: None,
            output_path: None,
        }
    }
}

impl TryFrom<ConfigDocument> for ScanConfig {
    type Error = String;

    fn try_from(doc: ConfigDocument) -> std::result::Result<Self, String> {
        let defaults = Geometry::default();
        let geometry = Geometry::new(
            doc.geometry
                .wavelength
                .map_or(defaults.wavelength(), Length::meters),
            doc.geometry
                .source_distance
                .map_or(defaults.source_distance(), Length::meters),
            doc.geometry
                .detector_distance
                .map_or(defaults.detector_distance(), Length::meters),
            doc.geometry.amplitude.unwrap_or(defaults.amplitude()),
        )
        .map_err(|e| format!("geometry: {e}"))?;

        let ap_doc = doc.aperture.unwrap_or_default();
        let rect = Aperture::default();
        let kind = ap_doc.kind.unwrap_or(doc.scenario.default_aperture_kind());
        let height = ap_doc.height.map_or(rect.height(), Length::meters);
        let width = ap_doc.width.map_or(rect.width(), Length::meters);
        let aperture = match kind {
            ApertureKind::Rect => {
                if ap_doc.slit_separation.is_some() || ap_doc.slit_count.is_some() {
                    return Err(
                        "aperture: slit_separation/slit_count only apply to kind Grating".into(),
                    );
                }
                Aperture::rect(height, width)
            }
            ApertureKind::Grating => Aperture::grating(
                height,
                width,
                ap_doc
                    .slit_separation
                    .map_or(DEFAULT_SLIT_SEPARATION, Length::meters),
                ap_doc.slit_count.unwrap_or(DEFAULT_SLIT_COUNT),
            ),
        }
        .map_err(|e| format!("aperture: {e}"))?;

        match (doc.scenario, aperture.grating_layout()) {
            (Scenario::G2Grating, Some(g)) if g.slit_count % 2 == 0 => {
                return Err(format!(
                    "scenario G2Grating requires a grating with odd M (got M = {})",
                    g.slit_count
                ))
            }
            (Scenario::G2Grating | Scenario::ClassicalGrating, None) => {
                return Err(format!(
                    "scenario {:?} requires a Grating aperture (with odd M for G2Grating)",
                    doc.scenario
                ))
            }
            (Scenario::G4Quad | Scenario::ClassicalRect, Some(_)) => {
                return Err(format!(
                    "scenario {:?} requires a Rect aperture",
                    doc.scenario
                ))
            }
            _ => {}
        }

        let scan_min = doc.scan_min.map_or(0.0, Length::meters);
        let scan_max = doc.scan_max.map_or(
            ScanConfig::classical_window(&geometry, &aperture),
            Length::meters,
        );
        if scan_min >= scan_max {
            return Err(format!(
                "scan_min must be below scan_max (got {scan_min:e} >= {scan_max:e})"
            ));
        }
        let steps = doc.steps.unwrap_or(DEFAULT_STEPS);
        if steps < MIN_STEPS {
            return Err(format!("steps must be at least {MIN_STEPS} (got {steps})"));
        }
        let base_x = doc.base_x.map_or(0.0, Length::meters);
        if !base_x.is_finite() {
            return Err("base_x must be finite".into());
        }

        let oracle = doc
            .oracle
            .map(|o| {
                let spec = QuadratureSpec::new(
                    o.points_per_axis
                        .unwrap_or(QuadratureSpec::default().points_per_axis),
                    o.subdivisions
                        .unwrap_or(QuadratureSpec::default().subdivisions),
                )
                .map_err(|e| format!("oracle: {e}"))?;
                let tolerance = o.tolerance.unwrap_or(DEFAULT_ORACLE_TOLERANCE);
                if !(tolerance > 0.0 && tolerance.is_finite()) {
                    return Err(format!("oracle: tolerance must be > 0 (got {tolerance})"));
                }
                Ok(OracleSettings {
                    quadrature: spec,
                    convergence_tolerance: tolerance,
                })
            })
            .transpose()?;

        Ok(ScanConfig {
            geometry,
            aperture,
            scenario: doc.scenario,
            scan_min,
            scan_max,
            steps,
            base_x,
            grating_rule: doc.grating_rule.unwrap_or(GratingRule::PlusOffset),
            oracle,
            output_path: doc
                .output_path
                .unwrap_or_else(|| DEFAULT_OUTPUT_PATH.to_string()),
        })
    }
}

impl From<ScanConfig> for ConfigDocument {
    fn from(c: ScanConfig) -> Self {
        let g = c.geometry;
        let layout = c.aperture.grating_layout();
        ConfigDocument {
            scenario: c.scenario,
            geometry: GeometryDocument {
                wavelength: Some(Length(g.wavelength())),
                source_distance: Some(Length(g.source_distance())),
                detector_distance: Some(Length(g.detector_distance())),
                amplitude: Some(g.amplitude()),
            },
            aperture: Some(ApertureDocument {
                kind: Some(c.aperture.kind()),
                height: Some(Length(c.aperture.height())),
                width: Some(Length(c.aperture.width())),
                slit_separation: layout.map(|l| Length(l.slit_separation)),
                slit_count: layout.map(|l| l.slit_count),
            }),
            scan_min: Some(Length(c.scan_min)),
            scan_max: Some(Length(c.scan_max)),
            steps: Some(c.steps),
            base_x: Some(Length(c.base_x)),
            grating_rule: Some(c.grating_rule),
            oracle: c.oracle.map(|o| OracleDocument {
                points_per_axis: Some(o.quadrature.points_per_axis),
                subdivisions: Some(o.quadrature.subdivisions),
                tolerance: Some(o.convergence_tolerance),
            }),
            output_path: Some(c.output_path),
        }
    }
}

/// Path the scan should be written to, `--output` taking precedence.
pub fn output_path(config: &ScanConfig, override_path: Option<&Path>) -> PathBuf {
    override_path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&config.output_path))
}
