//! Runs the independent consistency checks over the suite varieties: Serre
//! duality for line bundles and log forms, Euler additivity along residue
//! sequences, the Hodge count of chart complements, and chamber versus
//! brute-force weight enumeration.
//!
//! cargo run --release --example consistency_checks [seed]

use std::time::Instant;

use toric_bott::suite::{
    euler_sample, hodge_sweep, log_serre_sample, method_agreement, serre_duality_sweep, suite_fans,
    SweepStats,
};

fn show(check: &str, s: &SweepStats, start: Instant) {
    println!(
        "{check:10} {:8} instances {:6} checked {:6} failures {} ({:.1?})",
        s.name,
        s.instances,
        s.checked,
        s.failures.len(),
        start.elapsed()
    );
    for f in s.failures.iter().take(5) {
        println!("    {f}");
    }
}

fn main() -> toric_bott::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let fans = suite_fans()?;
    for (name, f) in &fans {
        // the 6-ray grid is large; a smaller bound keeps the demo quick
        let bound = if f.n_rays() > 5 { 2 } else { 3 };
        let t = Instant::now();
        show("serre", &serre_duality_sweep(name, f, bound)?, t);
        let t = Instant::now();
        show("log-serre", &log_serre_sample(name, f, 100, seed)?, t);
        let t = Instant::now();
        show("hodge", &hodge_sweep(name, f)?, t);
        let t = Instant::now();
        show("agreement", &method_agreement(name, f, 20, seed)?, t);
    }
    let t = Instant::now();
    show("euler", &euler_sample(&fans, 300, seed)?, t);
    Ok(())
}
