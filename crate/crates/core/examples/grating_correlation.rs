//! Two-photon correlation behind an M-slit grating and its factorized form.

use subrayleigh::correlation::{g2_grating, GratingRule};
use subrayleigh::geometry::paper_emitter_pair;
use subrayleigh::{Aperture, Geometry};

fn main() -> subrayleigh::Result<()> {
    let g = Geometry::default();
    for m in [3, 5] {
        let grating = Aperture::grating(20e-6, 20e-6, 60e-6, m)?;
        let emitters = paper_emitter_pair(&g, &grating, 0.0);
        println!("M = {m}");
        println!(
            "{:>10} {:>14} {:>14} {:>12}",
            "r1 [mm]", "direct", "product", "ratio"
        );
        for i in 1..=6 {
            let r1 = 1.7e-3 * i as f64;
            let c = g2_grating(r1, GratingRule::PlusOffset, &emitters, &grating, &g, true)?;
            let product = c.product_form.expect("requested");
            println!(
                "{:>10.3} {:>14.6e} {:>14.6e} {:>12.6}",
                r1 * 1e3,
                c.direct,
                product,
                c.direct / product
            );
        }
        let c = g2_grating(1e-3, GratingRule::PlusOffset, &emitters, &grating, &g, true)?;
        println!("emitter array factor {:.6}\n", c.emitter_array_factor);
    }
    Ok(())
}
