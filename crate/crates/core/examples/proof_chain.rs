//! Replays the inequality chains behind the first-eigenvalue bounds on an
//! explicit eigenform, with every step evaluated exactly.

use formlab::ballgeom::BallDomain;
use formlab::identities::{replay_proof_chain, ChainKind};
use formlab::scalar::q;
use formlab::spectral::dtn_eigenforms;

fn main() -> formlab::Result<()> {
    let domain = BallDomain::new(3, q(2, 1))?;
    let eig = dtn_eigenforms(&domain, 1, 1, None)?;
    println!("{} eigenforms with sigma = {}", eig.len(), eig[0].sigma);
    for kind in [ChainKind::Bound, ChainKind::Comparison, ChainKind::NonSharp] {
        let r = replay_proof_chain(kind, &domain, &eig[0])?;
        println!("{kind:?}: pass {}", r.pass);
        for s in &r.steps {
            println!("  {:<44} {} {:?} {}  {}", s.name, s.lhs, s.relation, s.rhs, s.pass);
        }
    }
    Ok(())
}
