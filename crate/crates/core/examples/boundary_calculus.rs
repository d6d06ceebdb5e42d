//! Normal contraction, tangential part and intrinsic operators on the sphere.

use formlab::ballgeom::{BallDomain, BoundaryForm};
use formlab::sample;
use formlab::scalar::{q, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> formlab::Result<()> {
    let domain = BallDomain::<Q>::new(3, q(2, 1))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let omega = sample::form(&mut rng, 3, 1, 2, 3);
    println!("omega = {omega}");
    println!("i_N omega = {}", domain.contract_normal(&omega)?);
    println!("tangential part = {}", domain.tangential_part(&omega));

    let j = BoundaryForm::new(omega.clone());
    let d_sigma = domain.boundary_d(&j)?;
    let delta_sigma = domain.boundary_delta(&j)?;
    println!("d_S J*omega     = {}", d_sigma.rep);
    println!("delta_S J*omega = {}", delta_sigma.rep);
    println!("|J*omega|^2 over the sphere = {}", domain.boundary_norm_sq(&j)?.units);
    println!(
        "normal/tangential split residual: {}",
        domain.normal_split_check(&omega)?.units
    );
    println!("B(omega, omega) integrand: {}", domain.b_term(&omega)?);
    Ok(())
}
