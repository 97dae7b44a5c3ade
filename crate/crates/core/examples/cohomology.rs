//! Cohomology of log-form sheaves on P^2 and F_1, with the contributing
//! torus weights and a brute-force cross-check.
//!
//! cargo run --release --example cohomology

use toric_bott::danilov::{CohomologyEngine, LogFormSheafSpec, WeightMode};
use toric_bott::fan::builtin::{hirzebruch, projective_space};

fn main() -> toric_bott::Result<()> {
    let p2 = projective_space(2);
    let engine = CohomologyEngine::shared(&p2)?;
    println!("h^q(P^2, Ω^p(k)) as [h^0, h^1, h^2]");
    for p in 0..=2 {
        let row: Vec<String> = (-3..=3)
            .map(|k| {
                let s = LogFormSheafSpec::new(p, &[], &[k, 0, 0]);
                engine.cohomology(&s).map(|r| format!("{:?}", r.dims))
            })
            .collect::<Result<_, _>>()?;
        println!("  p={p}: k=-3..3 -> {}", row.join(" "));
    }

    let spec = LogFormSheafSpec::new(1, &[0, 1, 2], &[0, 0, 0]);
    let r = engine.cohomology(&spec)?;
    println!("\nΩ^1(log boundary) on P^2: {:?}, weights {:?}", r.dims, r.weight_support);

    let f1 = hirzebruch(1);
    let engine = CohomologyEngine::shared(&f1)?;
    let spec = LogFormSheafSpec::new(1, &[1], &[1, -2, 0, 1]);
    let bound = engine.lp_box_bound(&spec)?;
    let chamber = engine.cohomology(&spec)?;
    let brute = engine.cohomology_with(&spec, WeightMode::BruteBox { bound })?;
    println!(
        "\nF_1, Ω^1(log D_1)(D_0 - 2D_1 + D_3): chamber {:?}, box [-{bound},{bound}]^2 {:?}",
        chamber.dims, brute.dims
    );
    assert_eq!(chamber, brute);
    Ok(())
}
