//! Wedge, interior product, Hodge star and tensor lifts on constant forms.

use formlab::exalg::{Form, LinearEndomorphism};
use formlab::scalar::{qi, Q};

fn main() -> formlab::Result<()> {
    let m = 4;
    let a = Form::<Q>::basis(m, &[0])?.scale(&qi(2)) + Form::basis(m, &[2])?;
    let b = Form::<Q>::basis(m, &[1, 3])?;
    let ab = a.wedge(&b)?;
    println!("a = {a}\nb = {b}\na ^ b = {ab}");

    let x = vec![qi(1), qi(-1), qi(0), qi(3)];
    println!("i_x(a ^ b) = {}", ab.interior(&x)?);
    println!("*(a ^ b) = {}", ab.hodge_star());
    println!("**(a ^ b) = {}", ab.hodge_star().hodge_star());

    // a diagonal endomorphism acts on p-forms as a derivation
    let t = LinearEndomorphism::diagonal(&[qi(1), qi(2), qi(3), qi(4)]);
    for p in 0..=m {
        let lifted: Vec<String> = formlab::exalg::MultiIndex::all(m, p)
            .into_iter()
            .map(|i| {
                let e = Form::monomial(m, i.clone(), qi(1));
                format!("{i}:{}", e.inner(&t.lift(p, &e).unwrap()).unwrap())
            })
            .collect();
        println!("T^[{p}] diagonal: {}", lifted.join(" "));
    }
    Ok(())
}
