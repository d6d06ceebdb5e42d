//! Dimensions of homogeneous harmonic form spaces and their closed /
//! normal-null split, with the boundary codifferential isomorphism.

use formlab::ballgeom::BallDomain;
use formlab::harmonic::{delta_sigma_isomorphism, form_space, FormSpaceKind};
use formlab::Q;

fn main() -> formlab::Result<()> {
    let domain = BallDomain::<Q>::unit(3)?;
    println!(" l p  harmonic closed normal-null");
    for l in 0..=3 {
        for p in 1..=2 {
            let h = form_space(3, l, p, FormSpaceKind::Harmonic)?;
            let c = form_space(3, l, p, FormSpaceKind::Closed)?;
            let n = form_space(3, l, p, FormSpaceKind::NormalNull)?;
            println!("{l:>2} {p} {:>9} {:>6} {:>11}", h.dim(), c.dim(), n.dim());
        }
    }
    for l in 1..=3 {
        let r = delta_sigma_isomorphism(&domain, l, 2)?;
        println!("delta_S on closed l={l}, p=2: {r:?} isomorphism={}", r.is_isomorphism());
    }
    Ok(())
}
