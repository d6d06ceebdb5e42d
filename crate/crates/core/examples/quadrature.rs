//! Exact sphere and ball integrals of polynomials, checked against Monte Carlo.

use formlab::polyform::Polynomial;
use formlab::quad::{ball_integral, mc_oracle, sphere_integral, unit_sphere_measure, RadialDensity, Region};
use formlab::scalar::{q, Q};

fn main() -> formlab::Result<()> {
    let m = 3;
    let x = Polynomial::<Q>::var;
    let f = &(&x(0) * &x(0)) * &(&x(1) * &x(1)) + x(2).scale(&q(5, 1));
    let r = q(3, 2);
    let s = sphere_integral(&f, m, &r);
    let b = ball_integral(&f, m, &r);
    println!("|S^2(1)| = {:.12}", unit_sphere_measure(m));
    println!("sphere: {} |S^2| = {:.10}", s.units, s.to_f64());
    println!("ball:   {} |S^2| = {:.10}", b.units, b.to_f64());

    let density = RadialDensity::polynomial(m, f);
    for (region, exact) in [(Region::Sphere, s.to_f64()), (Region::Ball, b.to_f64())] {
        let est = mc_oracle(&density, 1.5, region, 400_000, 3);
        println!(
            "{region:?}: Monte Carlo {:.6} ± {:.6} (z = {:.2})",
            est.value,
            est.std_err,
            est.z_score(exact)
        );
    }
    Ok(())
}
