//! Single-photon field amplitudes behind the aperture.
//!
//! [`fraunhofer_field`] is the far-field closed form for one rectangular
//! opening, [`grating_field`] dresses it with the two M-term array sums, and
//! [`crate::quadrature::fresnel_field_oracle`] integrates the Fresnel
//! integrand directly for cross-checks.
//!
//! The closed form carries the prefactor `iAλ/π²`. The Fresnel integral with
//! its `-iA/λ · 1/(R_z r_z)` prefactor reduces to exactly `-R_z·r_z` times the
//! closed form in the far-field limit; see [`fresnel_to_closed_form`].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Aperture, ApertureKind, Geometry, Transverse};

/// Below this |x| the sinc is evaluated from its Taylor series.
const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Ratio `U_fresnel / U_closed_form` in the far-field limit: `-R_z · r_z`.
pub fn fresnel_to_closed_form(geometry: &Geometry) -> Complex64 {
    Complex64::new(
        -geometry.source_distance() * geometry.detector_distance(),
        0.0,
    )
}

/// sin(x)/x with the removable singularity at 0 filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// sin(c·u)/u evaluated as c·sinc(c·u).
#[inline]
pub(crate) fn sine_quotient(c: f64, u: f64) -> f64 {
    c * sinc(c * u)
}

/// Far-field amplitude from the emitter at `emitter` (source plane) to the
/// detector at `detector` through one rectangular opening of `aperture`.
///
/// Grating layouts are ignored here; use [`field`] or [`grating_field`].
pub fn fraunhofer_field(
    detector: Transverse,
    emitter: Transverse,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Complex64 {
    let k = geometry.wavenumber();
    let big_z = geometry.source_distance();
    let small_z = geometry.detector_distance();

    let source_phase = 0.5 * k * (2.0 * big_z * big_z + emitter.norm_sqr()) / big_z;
    let detector_phase = 0.5 * k * (2.0 * small_z * small_z + detector.norm_sqr()) / small_z;

    let cx = k * aperture.height() / (2.0 * big_z * small_z);
    let cy = k * aperture.width() / (2.0 * big_z * small_z);
    let ux = emitter.x * small_z + detector.x * big_z;
    let uy = emitter.y * small_z + detector.y * big_z;

    let magnitude = geometry.amplitude() * geometry.wavelength() / (PI * PI)
        * sine_quotient(cx, ux)
        * sine_quotient(cy, uy);

    Complex64::i() * Complex64::cis(source_phase + detector_phase) * magnitude
}

/// Σ_{n=0}^{M-1} e^{i n θ}, summed term by term so principal maxima stay exact.
pub fn array_sum(theta: f64, count: usize) -> Complex64 {
    (0..count).map(|n| Complex64::cis(n as f64 * theta)).sum()
}

/// |Σ_{n=0}^{M-1} e^{i n θ}|², equal to (1 - cos Mθ)/(1 - cos θ) away from θ ≡ 0.
pub fn dirichlet_kernel(theta: f64, count: usize) -> f64 {
    array_sum(theta, count).norm_sqr()
}

/// Grating field: the single-slit amplitude times the emitter-side sum
/// Σ e^{iknd R_x/R_z} and the detector-side sum Σ e^{-iknd r_x/r_z}.
///
/// Only defined in the x-z plane; nonzero y components are rejected.
pub fn grating_field(
    detector: Transverse,
    emitter: Transverse,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Result<Complex64> {
    let layout = aperture
        .grating_layout()
        .ok_or_else(|| Error::ContractViolation("grating_field needs a grating aperture".into()))?;
    if detector.y != 0.0 || emitter.y != 0.0 {
        return Err(Error::ContractViolation(format!(
            "grating field is restricted to the x-z plane (detector y = {:e}, emitter y = {:e})",
            detector.y, emitter.y
        )));
    }
    let k = geometry.wavenumber();
    let d = layout.slit_separation;
    let source_sum = array_sum(
        k * d * emitter.x / geometry.source_distance(),
        layout.slit_count,
    );
    let detector_sum = array_sum(
        -k * d * detector.x / geometry.detector_distance(),
        layout.slit_count,
    );
    Ok(fraunhofer_field(detector, emitter, aperture, geometry) * source_sum * detector_sum)
}

/// Closed-form field for either aperture kind.
pub fn field(
    detector: Transverse,
    emitter: Transverse,
    aperture: &Aperture,
    geometry: &Geometry,
) -> Result<Complex64> {
    match aperture.kind() {
        ApertureKind::Rect => Ok(fraunhofer_field(detector, emitter, aperture, geometry)),
        ApertureKind::Grating => grating_field(detector, emitter, aperture, geometry),
    }
}

/// How comfortably the far-field approximation holds: r_z / ((k/2)·ρ₀²),
/// with ρ₀ the half-diagonal of the full aperture extent.
///
/// The aperture-to-detector distance is approximated by r_z for every
/// detector, so the margin depends only on the aperture and geometry.
pub fn fraunhofer_validity_margin(aperture: &Aperture, geometry: &Geometry) -> f64 {
    let half_x = 0.5 * aperture.x_extent();
    let half_y = 0.5 * aperture.width();
    let rho_sq = half_x * half_x + half_y * half_y;
    geometry.detector_distance() / (0.5 * geometry.wavenumber() * rho_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn defaults() -> (Geometry, Aperture) {
        (Geometry::default(), Aperture::default())
    }

    #[test]
    fn sinc_is_continuous_across_cutoff() {
        assert_eq!(sinc(0.0), 1.0);
        let below = sinc(SINC_SERIES_CUTOFF * (1.0 - 1e-9));
        let above = sinc(SINC_SERIES_CUTOFF * (1.0 + 1e-9));
        assert!((below - above).abs() < 1e-15);
        assert_relative_eq!(sinc(PI / 2.0), 2.0 / PI, max_relative = 1e-15);
        assert!(sinc(PI).abs() < 1e-16);
    }

    #[test]
    fn on_axis_magnitude() {
        let (g, ap) = defaults();
        let u = fraunhofer_field(Transverse::ORIGIN, Transverse::ORIGIN, &ap, &g);
        let expected = g.amplitude() * ap.height() * ap.width()
            / (g.wavelength() * g.source_distance().powi(2) * g.detector_distance().powi(2));
        assert_relative_eq!(u.norm(), expected, max_relative = 1e-12);
    }

    #[test]
    fn first_zero_along_x() {
        let (g, ap) = defaults();
        let x = g.wavelength() * g.detector_distance() / ap.height();
        let u = fraunhofer_field(Transverse::on_x(x), Transverse::ORIGIN, &ap, &g);
        let peak = fraunhofer_field(Transverse::ORIGIN, Transverse::ORIGIN, &ap, &g);
        assert!(u.norm() < 1e-14 * peak.norm(), "{u}");
    }

    #[test]
    fn swap_symmetry_when_planes_equidistant() {
        let g = Geometry::new(500e-9, 0.5, 0.5, 1.0).unwrap();
        let ap = Aperture::rect(20e-6, 30e-6).unwrap();
        let p = Transverse::new(3e-3, -1e-3);
        let q = Transverse::new(-7e-4, 2e-3);
        let a = fraunhofer_field(p, q, &ap, &g).norm();
        let b = fraunhofer_field(q, p, &ap, &g).norm();
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn grating_with_one_slit_matches_rect() {
        let (g, ap) = defaults();
        let grating = Aperture::grating(ap.height(), ap.width(), 60e-6, 1).unwrap();
        for &(r, e) in &[(0.0, 0.0), (0.013, 1.25e-3), (-0.031, -4e-4)] {
            let det = Transverse::on_x(r);
            let em = Transverse::on_x(e);
            let rect = fraunhofer_field(det, em, &ap, &g);
            let one = grating_field(det, em, &grating, &g).unwrap();
            assert_eq!(rect.re, one.re);
            assert_eq!(rect.im, one.im);
        }
    }

    #[test]
    fn grating_on_axis_scales_with_m_squared() {
        let (g, ap) = defaults();
        for m in [2usize, 3, 5, 8] {
            let grating = Aperture::grating(ap.height(), ap.width(), 60e-6, m).unwrap();
            let u_m = grating_field(Transverse::ORIGIN, Transverse::ORIGIN, &grating, &g).unwrap();
            let u_1 = fraunhofer_field(Transverse::ORIGIN, Transverse::ORIGIN, &ap, &g);
            assert_relative_eq!(
                u_m.norm(),
                (m * m) as f64 * u_1.norm(),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn direct_sum_matches_closed_quotient() {
        // (1 - e^{iMθ}) / (1 - e^{iθ}) away from θ ≡ 0 mod 2π
        let (g, _) = defaults();
        let ap = Aperture::grating(20e-6, 20e-6, 60e-6, 3).unwrap();
        let k = g.wavenumber();
        let d = 60e-6;
        let det = Transverse::on_x(0.0137);
        let em = Transverse::on_x(1.1e-3);
        let quotient = |theta: f64, m: usize| {
            (Complex64::new(1.0, 0.0) - Complex64::cis(m as f64 * theta))
                / (Complex64::new(1.0, 0.0) - Complex64::cis(theta))
        };
        let closed = fraunhofer_field(det, em, &ap, &g)
            * quotient(k * d * em.x / g.source_distance(), 3)
            * quotient(-k * d * det.x / g.detector_distance(), 3);
        let direct = grating_field(det, em, &ap, &g).unwrap();
        assert!((direct - closed).norm() <= 1e-12 * closed.norm());
    }

    #[test]
    fn grating_rejects_off_plane_points() {
        let (g, _) = defaults();
        let ap = Aperture::grating(20e-6, 20e-6, 60e-6, 3).unwrap();
        let err = grating_field(Transverse::new(0.0, 1e-3), Transverse::ORIGIN, &ap, &g);
        assert!(matches!(err, Err(Error::ContractViolation(_))));
        let rect = Aperture::default();
        assert!(grating_field(Transverse::ORIGIN, Transverse::ORIGIN, &rect, &g).is_err());
    }

    #[test]
    fn no_poles_across_removable_singularities() {
        let (g, ap) = defaults();
        let em = Transverse::on_x(1.25e-3);
        // u_x = 0 at r_x = -R_x r_z / R_z
        let centre = -em.x * g.detector_distance() / g.source_distance();
        let step = 1e-7;
        let values: Vec<f64> = (-200..=200)
            .map(|i| {
                let det = Transverse::new(centre + i as f64 * step, i as f64 * step * 0.5);
                fraunhofer_field(det, em, &ap, &g).norm()
            })
            .collect();
        assert!(values.iter().all(|v| v.is_finite()));
        let peak = values.iter().cloned().fold(0.0, f64::max);
        let max_second_diff = values
            .windows(3)
            .map(|w| (w[0] - 2.0 * w[1] + w[2]).abs())
            .fold(0.0, f64::max);
        assert!(max_second_diff < 1e-6 * peak, "{max_second_diff} vs {peak}");
    }

    #[test]
    fn validity_margin_default_and_scaling() {
        let (g, ap) = defaults();
        let m = fraunhofer_validity_margin(&ap, &g);
        let expected = 1.0 / ((PI / 500e-9) * (2.0 * 10e-6 * 10e-6) / 1.0);
        assert_relative_eq!(m, expected, max_relative = 1e-12);
        assert!((m - 795.77).abs() < 0.01, "{m}");

        let far = g.with_detector_distance(3.0).unwrap();
        assert_relative_eq!(
            fraunhofer_validity_margin(&ap, &far),
            3.0 * m,
            max_relative = 1e-12
        );
        let big = Aperture::rect(40e-6, 40e-6).unwrap();
        assert_relative_eq!(
            fraunhofer_validity_margin(&big, &g),
            m / 4.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn dirichlet_kernel_values() {
        assert_relative_eq!(dirichlet_kernel(0.0, 3), 9.0, max_relative = 1e-15);
        let theta: f64 = 0.731;
        let closed = (1.0 - (5.0 * theta).cos()) / (1.0 - theta.cos());
        assert_relative_eq!(dirichlet_kernel(theta, 5), closed, max_relative = 1e-12);
        assert_eq!(dirichlet_kernel(1.3, 1), 1.0);
    }
}
