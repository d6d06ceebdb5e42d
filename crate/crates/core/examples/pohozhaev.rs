//! The Pohozhaev-type identity for the Euler field and for a random field.

use formlab::ballgeom::BallDomain;
use formlab::identities::verify_pohozhaev;
use formlab::polyform::PolyVectorField;
use formlab::sample;
use formlab::scalar::{qi, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> formlab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let domain = BallDomain::<Q>::new(4, qi(1))?;
    let phi = sample::form(&mut rng, 4, 1, 2, 3);
    for (name, field) in [
        ("position", PolyVectorField::position(4)),
        ("random", sample::vector_field(&mut rng, 4, 2, 2)),
    ] {
        let r = verify_pohozhaev(&domain, &field, &phi)?;
        println!(
            "{name:>8}: lhs {}  rhs {}  residual {}  pass {}",
            r.lhs, r.rhs, r.residual, r.pass
        );
    }
    Ok(())
}
