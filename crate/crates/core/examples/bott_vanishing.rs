//! Sweeps every suite variety: all log sets D', all L with coefficients in
//! {0,1,2}; wherever the hypothesis LP finds a witness, checks that every
//! higher cohomology group of Ω^p(log D')(-D') ⊗ L vanishes.
//!
//! cargo run --release --example bott_vanishing [fan-name]

use std::time::Instant;

use toric_bott::danilov::{verify_vanishing_with, CohomologyEngine};
use toric_bott::divisors::hypothesis_feasible;
use toric_bott::suite::{suite_fans, sweep_instances};

fn main() -> toric_bott::Result<()> {
    let only = std::env::args().nth(1);
    for (name, fan) in suite_fans()? {
        if only.as_deref().is_some_and(|o| o != name) {
            continue;
        }
        let start = Instant::now();
        let engine = CohomologyEngine::shared(&fan)?;
        let (mut feasible, mut violations, mut total) = (0, 0, 0);
        for inst in sweep_instances(&fan) {
            total += 1;
            let l = inst.divisor();
            if hypothesis_feasible(&fan, &l, &inst.dprime)?.is_none() {
                continue;
            }
            feasible += 1;
            let report = verify_vanishing_with(&engine, &inst.dprime, &l, false)?;
            if !report.pass {
                violations += 1;
                println!("  violation: D'={:?} L={:?} {:?}", inst.dprime, inst.l, report.violations);
            }
        }
        println!(
            "{name:6} instances {total:6} feasible {feasible:6} violations {violations} ({:.1?})",
            start.elapsed()
        );
    }
    Ok(())
}
