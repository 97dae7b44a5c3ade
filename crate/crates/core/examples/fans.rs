//! Builds the standard fans, validates them, and walks through the
//! combinatorics used everywhere else: walls, intersection numbers, a star
//! subdivision and an orbit-closure fan.
//!
//! cargo run --example fans

use toric_bott::divisors::{canonical_divisor, intersection_matrix};
use toric_bott::fan::builtin::{hirzebruch, projective_space};
use toric_bott::fan::{Fan, StratumId};
use toric_bott::suite::suite_fans;

fn main() -> toric_bott::Result<()> {
    println!("{:8} {:>3} {:>5} {:>5}  smooth complete", "name", "dim", "rays", "cones");
    for (name, f) in suite_fans()? {
        let d = f.validate()?;
        println!(
            "{name:8} {:>3} {:>5} {:>5}  {:6} {}",
            f.dim(),
            f.n_rays(),
            f.max_cones().len(),
            d.smooth,
            d.complete
        );
    }

    let f2 = hirzebruch(2);
    println!("\nF_2 walls and D_rho . C_tau (rows: walls, columns: rays)");
    for (w, row) in f2.walls()?.iter().zip(intersection_matrix(&f2)?) {
        println!("  tau {:?}: {row:?}", w.tau);
    }
    println!("  K = {:?}", canonical_divisor(&f2).to_ints().unwrap());

    let p2 = projective_space(2);
    let bl = p2.star_subdivision(&StratumId::new(vec![0, 1]))?;
    println!("\nP^2 blown up at the point of cone {{0,1}}: rays {:?}", bl.rays());

    let p3 = projective_space(3);
    let s = p3.stratum_fan(&StratumId::new(vec![0]))?;
    println!("V(rho_0) in P^3: rays {:?} from ambient {:?}", s.fan.rays(), s.origin);

    let json = bl.to_json();
    assert_eq!(Fan::from_json(&json)?, bl);
    println!("content hash {}", bl.content_hash());
    Ok(())
}
