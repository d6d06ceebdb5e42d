//! Exterior derivative, codifferential and Hodge Laplacian of polynomial forms.

use formlab::exalg::Form;
use formlab::polyform::{PolyForm, Polynomial};
use formlab::scalar::{qi, Q};

fn main() -> formlab::Result<()> {
    let m = 3;
    let x = Polynomial::<Q>::var;
    // ω = x0 x1 dx2 + x2² dx0
    let omega = PolyForm::from_constant(&Form::basis(m, &[2])?).mul_poly(&(&x(0) * &x(1)))
        + PolyForm::from_constant(&Form::basis(m, &[0])?).mul_poly(&(&x(2) * &x(2)));
    println!("omega      = {omega}");
    let d = omega.exterior_d()?;
    let delta = omega.codifferential()?;
    println!("d omega    = {d}");
    println!("delta omega = {delta}");
    println!("dd omega   = {}", d.exterior_d()?);
    println!("Laplacian  = {}", omega.hodge_laplacian());

    // Δ = dδ + δd, and on flat space Δ is minus the componentwise Laplacian
    let sum = delta.exterior_d()? + d.codifferential()?;
    println!("d delta + delta d = {sum}");
    println!("|grad omega|^2 = {}", omega.gradient_norm_sq());
    println!("scaled by 1/2: {}", omega.scale_scalar(&Q::new(1.into(), 2.into())));
    let _ = qi(0);
    Ok(())
}
