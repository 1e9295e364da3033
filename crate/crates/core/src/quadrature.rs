//! Direct numerical evaluation of the Fresnel diffraction integral.
//!
//! The integrand keeps both quadratic phases exactly:
//!
//! ```text
//! U = -iA/λ · e^{ikR_z} e^{ikr_z} / (R_z r_z)
//!     · ∬_A exp(ik|ρ_j - ρ₀|²/(2R_z)) · exp(ik|ρ₀ - ρ_i|²/(2r_z)) dS(ρ₀)
//! ```
//!
//! integrated with a composite Gauss-Legendre rule on every slit. The rule is
//! a tensor product, so the x and y node sums are formed separately and then
//! combined over the full 2-D node grid.

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Aperture, Geometry, Transverse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub points_per_axis: usize,
    pub subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(points_per_axis: usize, subdivisions: usize) -> Result<Self> {
        if points_per_axis < 2 {
            return Err(Error::invalid("points_per_axis", "must be at least 2"));
        }
        if subdivisions == 0 {
            return Err(Error::invalid("subdivisions", "must be at least 1"));
        }
        Ok(QuadratureSpec {
            points_per_axis,
            subdivisions,
        })
    }

    pub fn doubled(self) -> Self {
        QuadratureSpec {
            subdivisions: 2 * self.subdivisions,
            ..self
        }
    }

    /// Samples per slit: (points_per_axis · subdivisions)².
    pub fn samples_per_slit(&self) -> usize {
        let per_axis = self.points_per_axis * self.subdivisions;
        per_axis * per_axis
    }
}

impl Default for QuadratureSpec {
    /// 32 Gauss-Legendre points on each of 4 panels per axis.
    fn default() -> Self {
        QuadratureSpec {
            points_per_axis: 32,
            subdivisions: 4,
        }
    }
}

/// Nodes and weights of a composite rule on [lo, hi].
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(lo: f64, hi: f64, spec: QuadratureSpec) -> Result<Self> {
        let base = GaussLegendre::new(spec.points_per_axis)
            .map_err(|e| Error::invalid("points_per_axis", e.to_string()))?;
        let panel = (hi - lo) / spec.subdivisions as f64;
        let mut nodes = Vec::with_capacity(spec.points_per_axis * spec.subdivisions);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for p in 0..spec.subdivisions {
            let left = lo + p as f64 * panel;
            let mid = left + 0.5 * panel;
            for &(x, w) in base.as_node_weight_pairs() {
                nodes.push(mid + 0.5 * panel * x);
                weights.push(0.5 * panel * w);
            }
        }
        Ok(CompositeRule { nodes, weights })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// One Fresnel evaluation at fixed resolution, no convergence check.
pub fn fresnel_field(
    detector: Transverse,
    emitter: Transverse,
    aperture: &Aperture,
    geometry: &Geometry,
    spec: QuadratureSpec,
) -> Result<Complex64> {
    let k = geometry.wavenumber();
    let big_z = geometry.source_distance();
    let small_z = geometry.detector_distance();
    let a = aperture.height();
    let b = aperture.width();

    let phase_1d = |source: f64, target: f64, s: f64| {
        let ds = source - s;
        let dt = s - target;
        0.5 * k * (ds * ds / big_z + dt * dt / small_z)
    };

    let y_rule = CompositeRule::new(-0.5 * b, 0.5 * b, spec)?;
    let y_terms: Vec<Complex64> = y_rule
        .nodes
        .iter()
        .zip(&y_rule.weights)
        .map(|(&y, &w)| Complex64::cis(phase_1d(emitter.y, detector.y, y)) * w)
        .collect();

    let (slit_count, pitch) = match aperture.grating_layout() {
        Some(g) => (g.slit_count, g.slit_separation),
        None => (1, 0.0),
    };

    let mut integral = Complex64::new(0.0, 0.0);
    for n in 0..slit_count {
        let centre = n as f64 * pitch;
        let x_rule = CompositeRule::new(centre - 0.5 * a, centre + 0.5 * a, spec)?;
        for (&x, &wx) in x_rule.nodes.iter().zip(&x_rule.weights) {
            let fx = Complex64::cis(phase_1d(emitter.x, detector.x, x)) * wx;
            for &fy in &y_terms {
                integral += fx * fy;
            }
        }
    }

    let prefactor = Complex64::new(0.0, -geometry.amplitude() / geometry.wavelength())
        * Complex64::cis(k * big_z)
        * Complex64::cis(k * small_z)
        / (big_z * small_z);
    Ok(prefactor * integral)
}

/// Fresnel integral at `spec` and at doubled subdivisions. Returns the finer
/// value, or [`Error::NonConvergence`] when |U| moved by more than
/// `tolerance` (relative) between the two.
pub fn fresnel_field_oracle(
    detector: Transverse,
    emitter: Transverse,
    aperture: &Aperture,
    geometry: &Geometry,
    spec: QuadratureSpec,
    tolerance: f64,
) -> Result<OracleSample> {
    let coarse = fresnel_field(detector, emitter, aperture, geometry, spec)?;
    let fine_spec = spec.doubled();
    let fine = fresnel_field(detector, emitter, aperture, geometry, fine_spec)?;
    let change = relative_change(coarse.norm(), fine.norm());
    if change > tolerance {
        return Err(Error::NonConvergence {
            change,
            tolerance,
            trace: vec![
                (spec.subdivisions, coarse.norm()),
                (fine_spec.subdivisions, fine.norm()),
            ],
        });
    }
    Ok(OracleSample {
        value: fine,
        self_change: change,
    })
}

/// Converged oracle value together with its subdivision-doubling change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    pub value: Complex64,
    pub self_change: f64,
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    if fine == 0.0 && coarse == 0.0 {
        0.0
    } else {
        (fine - coarse).abs() / fine.abs().max(coarse.abs())
    }
}
