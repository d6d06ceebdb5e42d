//! Boundary operator spectra on B^3 for 1-forms, with exact certificates.

use formlab::ballgeom::BallDomain;
use formlab::spectral::{assemble_operator, check_bounds, OperatorKind};
use formlab::Q;

fn main() -> formlab::Result<()> {
    let domain = BallDomain::<Q>::unit(3)?;
    let mut reports = Vec::new();
    for op in [OperatorKind::D, OperatorKind::T, OperatorKind::HodgeBoundary] {
        let r = assemble_operator(op, &domain, 1, 3, None)?;
        println!("{} (certified: {})", op.label(), r.certified);
        for b in &r.blocks {
            for g in &b.eigenvalues {
                println!(
                    "  l={} {:<14} {:>10.6} x{:<3} expected {}",
                    b.l,
                    b.space.label(),
                    g.value,
                    g.multiplicity,
                    b.expected
                );
            }
        }
        reports.push(r);
    }
    let bounds = check_bounds(&reports[0], &reports[1], &reports[2])?;
    for c in &bounds.checks {
        println!("{:<40} {} {:?} {}  {}", c.name, c.lhs, c.relation, c.rhs, c.pass);
    }
    Ok(())
}
