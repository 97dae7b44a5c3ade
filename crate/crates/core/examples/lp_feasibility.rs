//! The ampleness hypothesis as an exact linear program: find `0 <= d <= 1`
//! with `L - sum d_j D_j` ample, and show instances where no witness exists.
//!
//! cargo run --example lp_feasibility

use toric_bott::divisors::{ample_witness, hypothesis_feasible, is_ample, InvariantDivisor};
use toric_bott::exactmath::format_rational;
use toric_bott::fan::builtin::{hirzebruch, projective_space};
use toric_bott::fan::Fan;

fn show(name: &str, f: &Fan, l: &[i64], dprime: &[usize]) -> toric_bott::Result<()> {
    let w = hypothesis_feasible(f, &InvariantDivisor::from_ints(l), dprime)?;
    let shown = match w {
        Some(d) => format!("{:?}", d.iter().map(format_rational).collect::<Vec<_>>()),
        None => "infeasible".into(),
    };
    println!("{name:4} L={l:?} D'={dprime:?}: {shown}");
    Ok(())
}

fn main() -> toric_bott::Result<()> {
    let p2 = projective_space(2);
    let f1 = hirzebruch(1);
    show("P^2", &p2, &[2, 0, 0], &[0])?;
    show("P^2", &p2, &[1, 0, 0], &[0, 1])?;
    show("P^2", &p2, &[0, 0, 0], &[0])?;
    show("P^2", &p2, &[1, 1, 0], &[0, 1, 2])?;
    show("F_1", &f1, &[1, 1, 1, 1], &[1])?;
    show("F_1", &f1, &[1, 0, 1, 0], &[])?;
    show("F_1", &f1, &[2, 1, 2, 1], &[1, 3])?;

    let h = ample_witness(&f1)?.expect("F_1 is projective");
    println!("an ample class on F_1: {:?}, ample = {}", h.to_ints().unwrap(), is_ample(&f1, &h)?);
    Ok(())
}
