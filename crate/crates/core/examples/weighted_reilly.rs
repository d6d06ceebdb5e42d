//! The weighted Reilly formula for a random 1-form, term by term, in exact
//! and floating-point arithmetic.

use formlab::ballgeom::{BallDomain, WeightFunction};
use formlab::identities::{verify_weighted_reilly, IdentityReport};
use formlab::sample;
use formlab::scalar::{q, q_to_f64, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(r: &IdentityReport) {
    println!("{} (m={}, p={}, R={}, exact={})", r.id, r.m, r.p, r.radius, r.exact);
    for t in &r.lhs_terms {
        println!("  lhs  {:<40} {}", t.name, t.value);
    }
    for t in &r.rhs_terms {
        println!("  rhs  {:<40} {}", t.name, t.value);
    }
    println!("  residual {}  pass {}", r.residual, r.pass);
}

fn main() -> formlab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (m, p) = (3, 1);
    let omega = sample::dense_form(&mut rng, m, p, 3, 2);
    let f = sample::polynomial(&mut rng, m, 2, 3);
    let radius = q(1, 2);

    let exact = BallDomain::<Q>::new(m, radius.clone())?;
    show(&verify_weighted_reilly(
        &exact,
        &WeightFunction::from_polynomial(m, f.clone()),
        &omega,
    )?);
    show(&verify_weighted_reilly(&exact, &exact.canonical_weight(), &omega)?);

    let float = BallDomain::<f64>::new(m, q_to_f64(&radius))?;
    let w = WeightFunction::from_polynomial(m, f.convert(q_to_f64));
    show(&verify_weighted_reilly(&float, &w, &omega.convert(q_to_f64))?);
    Ok(())
}
