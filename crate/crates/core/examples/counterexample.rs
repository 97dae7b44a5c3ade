//! Degree arithmetic for the two-step blowup of A^3 along a point and then a
//! plane curve of degree d: where the relative vanishing bound turns positive.
//!
//! cargo run --example counterexample [max-degree]

use toric_bott::counterexample::{minimal_failing_degree, relative_ample_check, scan};

fn main() -> toric_bott::Result<()> {
    let hi = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    println!("{:>3} {:>6} {:>6} {:>6} {:>8}  fails", "d", "genus", "deg L", "e", "h^1 >=");
    for s in scan(1, hi)? {
        println!(
            "{:>3} {:>6} {:>6} {:>6} {:>8}  {}",
            s.d, s.genus, s.deg_l, s.e_invariant, s.rr_lower_bound, s.bott_fails
        );
        assert!(relative_ample_check(s.d)?);
    }
    println!("minimal failing degree: {}", minimal_failing_degree());
    Ok(())
}
