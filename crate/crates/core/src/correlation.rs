//! Classical intensity and N-photon correlation signals.
//!
//! The general signal is
//!
//! ```text
//! G^(N)(r_1..r_N) = |perm[U(r_i, R_j)]|² / N^N
//! ```
//!
//! which for N = 2 is the familiar ¼|U₁₁U₂₂ + U₁₂U₂₁|². The 1/N^N factor
//! extends the 1/√2-per-field-operator normalization of the two-photon case
//! to 1/√N per operator; for N > 2 it is a convention.
//!
//! Alongside it live the published closed forms (two-photon scan with the
//! B₊/B₋ envelopes, the M-slit product form) and the envelopes derived
//! directly from the single-slit field, which the scan driver uses to flatten
//! signals before fringe analysis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diffraction::{dirichlet_kernel, field, sine_quotient};
use crate::error::{Error, Result};
use crate::geometry::{
    detector_offset, paper_emitter_pair, resolve_layout, Aperture, ApertureKind, DetectorLayout,
    EmitterArray, Geometry, PlacementStrategy, Transverse,
};
use crate::permanent::{permanent, AmplitudeMatrix};

/// Unnormalized joint detection probability density, always ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CorrelationValue(f64);

impl CorrelationValue {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(CorrelationValue(value))
        } else {
            Err(Error::ContractViolation(format!(
                "correlation value must be finite and >= 0, got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which detector pairing the two-photon closed form describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedFormVariant {
    /// r₂ = +r₁ (coincident detectors), envelope B₊.
    Plus,
    /// r₂ = -r₁ (mirrored detectors), envelope B₋.
    Minus,
}

impl ClosedFormVariant {
    pub fn strategy(self) -> PlacementStrategy {
        match self {
            ClosedFormVariant::Plus => PlacementStrategy::CoincidentPair,
            ClosedFormVariant::Minus => PlacementStrategy::MirrorPair,
        }
    }
}

/// Entry (i, j) = U(detector i, emitter j), using the grating field when the
/// aperture is a grating.
pub fn amplitude_matrix(
    detectors: &DetectorLayout,
    emitters: &EmitterArray,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Result<AmplitudeMatrix> {
    if detectors.len() != emitters.len() {
        return Err(Error::CountMismatch {
            detectors: detectors.len(),
            emitters: emitters.len(),
        });
    }
    let d = detectors.positions();
    let e = emitters.positions();
    AmplitudeMatrix::try_from_fn(d.len(), |i, j| field(d[i], e[j], aperture, geometry))
}

/// |perm|² / N^N for an already assembled amplitude matrix.
pub fn correlation_from_matrix(matrix: &AmplitudeMatrix) -> Result<CorrelationValue> {
    let n = matrix.size();
    let norm = (n as f64).powi(n as i32);
    CorrelationValue::new(permanent(matrix)?.norm_sqr() / norm)
}

/// N-th order correlation for N detectors and N emitters.
pub fn g_n(
    detectors: &DetectorLayout,
    emitters: &EmitterArray,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Result<CorrelationValue> {
    correlation_from_matrix(&amplitude_matrix(detectors, emitters, aperture, geometry)?)
}

/// Published two-photon closed form for emitters at 0 and π R_z/(ka):
///
/// ```text
/// G² = (8A² r_z² / (π² k² R_z² B_±(r)))² · sin²(k a r / r_z)
/// B₊ = r² + π r_z r/(ka),   B₋ = (4/π)(r² - π² r_z²/(k² a²))
/// ```
///
/// Where B vanishes the expression is 0·∞. Such points are refused unless
/// `use_limit` is set, in which case the finite value of the general
/// permanent route at that point is returned.
pub fn g2_closed_form(
    r: f64,
    variant: ClosedFormVariant,
    aperture: &Aperture,
    geometry: &Geometry,
    use_limit: bool,
) -> Result<CorrelationValue> {
    require_rect(aperture, "g2_closed_form")?;
    let k = geometry.wavenumber();
    let a = aperture.height();
    let rz = geometry.detector_distance();
    let shift = detector_offset(geometry, aperture);
    let envelope_b = match variant {
        ClosedFormVariant::Plus => r * r + shift * r,
        ClosedFormVariant::Minus => 4.0 / PI * (r * r - shift * shift),
    };
    if envelope_b == 0.0 {
        if !use_limit {
            return Err(Error::SingularPoint { r });
        }
        let emitters = paper_emitter_pair(geometry, aperture, 0.0);
        let detectors = resolve_layout(variant.strategy(), r, geometry, aperture);
        return g_n(&detectors, &emitters, aperture, geometry);
    }
    let amp = geometry.amplitude();
    let scale = 8.0 * amp * amp * rz * rz
        / (PI * PI * k * k * geometry.source_distance().powi(2) * envelope_b);
    let s = (k * a * r / rz).sin();
    CorrelationValue::new(scale * scale * s * s)
}

/// Envelope E(r) such that G² = E(r)·sin²(k a r/r_z) exactly for emitters at
/// 0 and π R_z/(ka), derived from the single-slit field in the x-z plane:
///
/// ```text
/// E(r) = ¼ (A b / (π R_z² r_z))⁴ / B̃(r)²
/// B̃₊ = r (r + ρ),   B̃₋ = r (r² - ρ²) / ρ,   ρ = π r_z/(ka)
/// ```
pub fn g2_envelope(
    r: f64,
    variant: ClosedFormVariant,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Result<f64> {
    require_rect(aperture, "g2_envelope")?;
    let rho = detector_offset(geometry, aperture);
    let b_tilde = match variant {
        ClosedFormVariant::Plus => r * (r + rho),
        ClosedFormVariant::Minus => r * (r * r - rho * rho) / rho,
    };
    if b_tilde == 0.0 {
        return Err(Error::SingularPoint { r });
    }
    let base = geometry.amplitude() * aperture.width()
        / (PI * geometry.source_distance().powi(2) * geometry.detector_distance());
    Ok(0.25 * base.powi(4) / (b_tilde * b_tilde))
}

/// Coordinates where [`g2_envelope`] is singular.
pub fn g2_envelope_singularities(
    variant: ClosedFormVariant,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Vec<f64> {
    let rho = detector_offset(geometry, aperture);
    match variant {
        ClosedFormVariant::Plus => vec![-rho, 0.0],
        ClosedFormVariant::Minus => vec![-rho, 0.0, rho],
    }
}

/// Coherent-illumination intensity in the detection plane.
///
/// Rect: (8A r_z/(π k r_x r_y R_z))² sin²(k a r_x/2r_z) sin²(k b r_y/2r_z),
/// evaluated through sinc so the axes are finite. Grating: the same envelope
/// times the Dirichlet kernel |Σ e^{iknd r_x/r_z}|² (x-z plane only).
pub fn classical_intensity(
    detector: Transverse,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Result<f64> {
    let k = geometry.wavenumber();
    let rz = geometry.detector_distance();
    let pre = 8.0 * geometry.amplitude() * rz / (PI * k * geometry.source_distance());
    let sx = sine_quotient(k * aperture.height() / (2.0 * rz), detector.x);
    let sy = sine_quotient(k * aperture.width() / (2.0 * rz), detector.y);
    let single = (pre * sx * sy).powi(2);
    match aperture.grating_layout() {
        None => Ok(single),
        Some(g) => {
            if detector.y != 0.0 {
                return Err(Error::ContractViolation(format!(
                    "grating intensity is restricted to the x-z plane (detector y = {:e})",
                    detector.y
                )));
            }
            Ok(single * dirichlet_kernel(k * g.slit_separation * detector.x / rz, g.slit_count))
        }
    }
}

/// Single-slit envelope of [`classical_intensity`] along the x axis:
/// (8A r_z/(π k R_z))² (k b/2r_z)² / r_x², so that
/// I = envelope · sin²(k a r_x/2r_z) for a rectangle.
pub fn classical_envelope(r_x: f64, aperture: &Aperture, geometry: &Geometry) -> Result<f64> {
    if r_x == 0.0 {
        return Err(Error::SingularPoint { r: r_x });
    }
    let k = geometry.wavenumber();
    let rz = geometry.detector_distance();
    let pre = 8.0 * geometry.amplitude() * rz / (PI * k * geometry.source_distance());
    let cy = k * aperture.width() / (2.0 * rz);
    Ok((pre * cy / r_x).powi(2))
}

/// Placement of the second detector for the grating measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GratingRule {
    /// r₂ = +(r₁ + π r_z/(kd))
    PlusOffset,
    /// r₂ = -(r₁ + π r_z/(kd))
    MinusOffset,
}

/// Outcome of a two-photon grating evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingCorrelation {
    /// G² from the permanent of grating fields.
    pub direct: f64,
    /// G²₀: same detectors and emitters, single slit.
    pub single_slit: f64,
    /// (1 - cos(2kMd r₁/r_z)) / (1 - cos(2kd r₁/r_z)), Dirichlet-safe.
    pub grating_factor: f64,
    /// G²₀ · grating_factor, when requested.
    pub product_form: Option<f64>,
    /// Π_j |Σ_n e^{iknd R_j/R_z}|², the r-independent emitter-side array
    /// factor that the product form leaves out.
    pub emitter_array_factor: f64,
}

/// Second detector position for [`g2_grating`].
pub fn grating_partner(
    r1: f64,
    rule: GratingRule,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Result<f64> {
    let layout = aperture
        .grating_layout()
        .ok_or_else(|| Error::ContractViolation("grating rule needs a grating aperture".into()))?;
    let shift =
        PI * geometry.detector_distance() / (geometry.wavenumber() * layout.slit_separation);
    Ok(match rule {
        GratingRule::PlusOffset => r1 + shift,
        GratingRule::MinusOffset => -(r1 + shift),
    })
}

/// Two-photon correlation behind an M-slit grating with detector 1 at `r1`
/// and detector 2 placed by `rule`.
///
/// With `product_form` set, the factorized prediction G²₀ · (1 - cos 2Mθ)/(1 - cos 2θ),
/// θ = kd r₁/r_z, is evaluated too; that form only holds for odd M.
pub fn g2_grating(
    r1: f64,
    rule: GratingRule,
    emitters: &EmitterArray,
    aperture: &Aperture,
    geometry: &Geometry,
    product_form: bool,
) -> Result<GratingCorrelation> {
    let layout = aperture
        .grating_layout()
        .ok_or_else(|| Error::ContractViolation("g2_grating needs a grating aperture".into()))?;
    let m = layout.slit_count;
    if product_form && m % 2 == 0 {
        return Err(Error::ContractViolation(format!(
            "the grating product form holds for odd M only (got M = {m})"
        )));
    }
    if emitters.len() != 2 {
        return Err(Error::CountMismatch {
            detectors: 2,
            emitters: emitters.len(),
        });
    }
    let r2 = grating_partner(r1, rule, aperture, geometry)?;
    let detectors = DetectorLayout::new(vec![Transverse::on_x(r1), Transverse::on_x(r2)])?;

    let direct = g_n(&detectors, emitters, aperture, geometry)?.value();
    let single_slit = g_n(&detectors, emitters, &aperture.single_slit(), geometry)?.value();

    let k = geometry.wavenumber();
    let d = layout.slit_separation;
    let theta = k * d * r1 / geometry.detector_distance();
    let grating_factor = dirichlet_kernel(2.0 * theta, m);
    let emitter_array_factor = emitters
        .positions()
        .iter()
        .map(|e| dirichlet_kernel(k * d * e.x / geometry.source_distance(), m))
        .product();

    Ok(GratingCorrelation {
        direct,
        single_slit,
        grating_factor,
        product_form: product_form.then_some(single_slit * grating_factor),
        emitter_array_factor,
    })
}

fn require_rect(aperture: &Aperture, what: &str) -> Result<()> {
    if aperture.kind() != ApertureKind::Rect {
        return Err(Error::ContractViolation(format!(
            "{what} is defined for a rectangular aperture"
        )));
    }
    Ok(())
}

/// Two-term N = 2 expression ¼|U₁₁U₂₂ + U₁₂U₂₁|², written out without the
/// permanent machinery.
pub fn g2_two_term(u: [[Complex64; 2]; 2]) -> f64 {
    0.25 * (u[0][0] * u[1][1] + u[0][1] * u[1][0]).norm_sqr()
}
