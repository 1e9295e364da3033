//! Physical layout of the imaging setup.
//!
//! The aperture sits in the plane z = 0, the emitters in z = -R_z and the
//! detectors in z = +r_z. Only transverse (x, y) coordinates are stored for
//! points; the plane distances live in [`Geometry`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transverse position (x, y) in one of the three planes, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Transverse {
    pub x: f64,
    pub y: f64,
}

impl Transverse {
    pub const ORIGIN: Transverse = Transverse { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Transverse { x, y }
    }

    /// Point on the x axis.
    pub fn on_x(x: f64) -> Self {
        Transverse { x, y: 0.0 }
    }

    pub fn norm_sqr(self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Wavelength, plane distances and source amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Geometry {
    wavelength: f64,
    source_distance: f64,
    detector_distance: f64,
    amplitude: f64,
}

impl Geometry {
    pub fn new(
        wavelength: f64,
        source_distance: f64,
        detector_distance: f64,
        amplitude: f64,
    ) -> Result<Self> {
        positive("wavelength", wavelength)?;
        positive("source_distance", source_distance)?;
        positive("detector_distance", detector_distance)?;
        positive("amplitude", amplitude)?;
        Ok(Geometry {
            wavelength,
            source_distance,
            detector_distance,
            amplitude,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// R_z, source plane to aperture.
    pub fn source_distance(&self) -> f64 {
        self.source_distance
    }

    /// r_z, aperture to detection plane.
    pub fn detector_distance(&self) -> f64 {
        self.detector_distance
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn wavenumber(&self) -> f64 {
        wavenumber(self)
    }

    pub fn with_amplitude(self, amplitude: f64) -> Result<Self> {
        Geometry::new(
            self.wavelength,
            self.source_distance,
            self.detector_distance,
            amplitude,
        )
    }

    pub fn with_detector_distance(self, detector_distance: f64) -> Result<Self> {
        Geometry::new(
            self.wavelength,
            self.source_distance,
            detector_distance,
            self.amplitude,
        )
    }
}

impl Default for Geometry {
    /// λ = 500 nm, R_z = 0.1 m, r_z = 1 m, A = 1.
    fn default() -> Self {
        Geometry {
            wavelength: 500e-9,
            source_distance: 0.1,
            detector_distance: 1.0,
            amplitude: 1.0,
        }
    }
}

/// k = 2π/λ.
pub fn wavenumber(geometry: &Geometry) -> f64 {
    2.0 * PI / geometry.wavelength
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApertureKind {
    Rect,
    Grating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GratingLayout {
    pub slit_separation: f64,
    pub slit_count: usize,
}

/// A rectangular opening of height `a` (x extent) and width `b` (y extent),
/// optionally repeated as an M-slit grating along x with pitch `d`.
///
/// Slit n (n = 0..M) is centered at x = n·d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aperture {
    height: f64,
    width: f64,
    grating: Option<GratingLayout>,
}

impl Aperture {
    pub fn rect(height: f64, width: f64) -> Result<Self> {
        positive("height_a", height)?;
        positive("width_b", width)?;
        Ok(Aperture {
            height,
            width,
            grating: None,
        })
    }

    pub fn grating(
        height: f64,
        width: f64,
        slit_separation: f64,
        slit_count: usize,
    ) -> Result<Self> {
        positive("height_a", height)?;
        positive("width_b", width)?;
        positive("slit_separation_d", slit_separation)?;
        if slit_separation <= height {
            return Err(Error::invalid(
                "slit_separation_d",
                format!("slits overlap: d = {slit_separation:e} must exceed a = {height:e}"),
            ));
        }
        if slit_count == 0 {
            return Err(Error::invalid("slit_count_M", "need at least one slit"));
        }
        Ok(Aperture {
            height,
            width,
            grating: Some(GratingLayout {
                slit_separation,
                slit_count,
            }),
        })
    }

    pub fn kind(&self) -> ApertureKind {
        match self.grating {
            None => ApertureKind::Rect,
            Some(_) => ApertureKind::Grating,
        }
    }

    /// a, the x extent of one opening.
    pub fn height(&self) -> f64 {
        self.height
    }

    /// b, the y extent of one opening.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn grating_layout(&self) -> Option<GratingLayout> {
        self.grating
    }

    /// Slit count, 1 for a plain rectangle.
    pub fn slit_count(&self) -> usize {
        self.grating.map_or(1, |g| g.slit_count)
    }

    /// The single-slit rectangle this aperture is built from.
    pub fn single_slit(&self) -> Aperture {
        Aperture {
            grating: None,
            ..*self
        }
    }

    /// Total x extent covered by all openings.
    pub fn x_extent(&self) -> f64 {
        match self.grating {
            None => self.height,
            Some(g) => (g.slit_count - 1) as f64 * g.slit_separation + self.height,
        }
    }
}

impl Default for Aperture {
    /// 20 µm × 20 µm rectangle.
    fn default() -> Self {
        Aperture {
            height: 20e-6,
            width: 20e-6,
            grating: None,
        }
    }
}

/// Emitter positions in the source plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmitterArray(Vec<Transverse>);

impl EmitterArray {
    pub fn new(positions: Vec<Transverse>) -> Result<Self> {
        check_points("emitters", &positions)?;
        Ok(EmitterArray(positions))
    }

    pub fn positions(&self) -> &[Transverse] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Detector positions in the detection plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorLayout(Vec<Transverse>);

impl DetectorLayout {
    pub fn new(positions: Vec<Transverse>) -> Result<Self> {
        check_points("detectors", &positions)?;
        Ok(DetectorLayout(positions))
    }

    pub fn positions(&self) -> &[Transverse] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rule turning a scan coordinate r into a detector layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlacementStrategy {
    /// Two detectors at x = +r and x = -r.
    MirrorPair,
    /// Two detectors both at x = +r.
    CoincidentPair,
    /// Four detectors at r, -r, -r + π r_z/(ka), r + (π/2) r_z/(ka).
    PaperQuad,
}

impl PlacementStrategy {
    pub fn detector_count(self) -> usize {
        match self {
            PlacementStrategy::MirrorPair | PlacementStrategy::CoincidentPair => 2,
            PlacementStrategy::PaperQuad => 4,
        }
    }
}

/// π·distance/(k·a): the shift that moves the single-slit sine argument by π/2.
pub(crate) fn quarter_shift(distance: f64, geometry: &Geometry, aperture: &Aperture) -> f64 {
    PI * distance / (geometry.wavenumber() * aperture.height())
}

/// Emitter offset π R_z/(ka) used by the two-emitter scheme.
pub fn emitter_offset(geometry: &Geometry, aperture: &Aperture) -> f64 {
    quarter_shift(geometry.source_distance(), geometry, aperture)
}

/// Detector-plane counterpart π r_z/(ka).
pub fn detector_offset(geometry: &Geometry, aperture: &Aperture) -> f64 {
    quarter_shift(geometry.detector_distance(), geometry, aperture)
}

/// Two emitters at `base_x` and `base_x + π R_z/(ka)`.
pub fn paper_emitter_pair(geometry: &Geometry, aperture: &Aperture, base_x: f64) -> EmitterArray {
    let offset = emitter_offset(geometry, aperture);
    EmitterArray(vec![
        Transverse::on_x(base_x),
        Transverse::on_x(base_x + offset),
    ])
}

/// Four emitters at -π R_z/(ka), 0, (π/2) R_z/(ka), π R_z/(ka).
pub fn paper_emitter_quad(geometry: &Geometry, aperture: &Aperture) -> EmitterArray {
    let offset = emitter_offset(geometry, aperture);
    EmitterArray(vec![
        Transverse::on_x(-offset),
        Transverse::on_x(0.0),
        Transverse::on_x(0.5 * offset),
        Transverse::on_x(offset),
    ])
}

pub fn resolve_layout(
    strategy: PlacementStrategy,
    r: f64,
    geometry: &Geometry,
    aperture: &Aperture,
) -> DetectorLayout {
    let xs = match strategy {
        PlacementStrategy::MirrorPair => vec![r, -r],
        PlacementStrategy::CoincidentPair => vec![r, r],
        PlacementStrategy::PaperQuad => {
            let shift = detector_offset(geometry, aperture);
            vec![r, -r, -r + shift, r + 0.5 * shift]
        }
    };
    DetectorLayout(xs.into_iter().map(Transverse::on_x).collect())
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

fn check_points(what: &str, points: &[Transverse]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::ContractViolation(format!(
            "{what}: need at least one position"
        )));
    }
    if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
        return Err(Error::ContractViolation(format!(
            "{what}: positions must be finite"
        )));
    }
    Ok(())
}
