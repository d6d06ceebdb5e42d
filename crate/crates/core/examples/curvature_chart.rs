//! Curvature of a chart metric: Weitzenböck operators on the round sphere
//! and the Bochner formula checked by finite differences.

use formlab::curvature::{bochner_convergence, weitzenbock_at, ChartMetric, DEFAULT_STEP};
use formlab::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> formlab::Result<()> {
    let metric = ChartMetric::round_sphere(3);
    let x = [0.2, -0.1, 0.3];
    for p in 0..=3 {
        let w = weitzenbock_at(&metric, &x, p)?;
        println!("W^[{p}] eigenvalues {:?}", w.eigenvalues());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let omega = sample::form(&mut rng, 3, 1, 1, 4);
    let r = bochner_convergence(&metric, &omega, &x, DEFAULT_STEP)?;
    println!(
        "Bochner residual {:.3e} at h, {:.3e} at h/2, observed order {:?}",
        r.residual, r.residual_half_step, r.order
    );
    Ok(())
}
