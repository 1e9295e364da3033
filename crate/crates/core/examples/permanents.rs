//! Enumeration against Ryser on random complex matrices.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use subrayleigh::permanent::{permanent_enumerate, permanent_ryser, AmplitudeMatrix};
use subrayleigh::Complex64;

fn main() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for n in 2..=9 {
        let m = AmplitudeMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .expect("finite entries");
        let t = Instant::now();
        let enumerated = permanent_enumerate(&m);
        let t_enum = t.elapsed();
        let t = Instant::now();
        let ryser = permanent_ryser(&m);
        let t_ryser = t.elapsed();
        println!(
            "N = {n}: rel. difference {:.2e}, enumeration {:?}, Ryser {:?}",
            (enumerated - ryser).norm() / enumerated.norm(),
            t_enum,
            t_ryser
        );
    }
}
