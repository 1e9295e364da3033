//! Coherent single-slit and grating intensity along the x axis.

use subrayleigh::correlation::classical_intensity;
use subrayleigh::diffraction::fraunhofer_field;
use subrayleigh::{Aperture, Geometry, Transverse};

fn main() -> subrayleigh::Result<()> {
    let g = Geometry::default();
    let slit = Aperture::default();
    let grating = Aperture::grating(20e-6, 20e-6, 60e-6, 3)?;

    let on_axis = fraunhofer_field(Transverse::ORIGIN, Transverse::ORIGIN, &slit, &g).norm();
    let expected = g.amplitude() * slit.height() * slit.width()
        / (g.wavelength() * g.source_distance().powi(2) * g.detector_distance().powi(2));
    println!("on-axis |U| = {on_axis:.6e} (expected {expected:.6e})");

    let first_zero = g.wavelength() * g.detector_distance() / slit.height();
    println!("first single-slit zero at r = {:.3} mm", first_zero * 1e3);
    println!("{:>10} {:>14} {:>14}", "r [mm]", "slit", "grating");
    for i in 0..=20 {
        let r = 2.0 * first_zero * i as f64 / 20.0;
        let d = Transverse::on_x(r);
        println!(
            "{:>10.3} {:>14.6e} {:>14.6e}",
            r * 1e3,
            classical_intensity(d, &slit, &g)?,
            classical_intensity(d, &grating, &g)?
        );
    }
    Ok(())
}
