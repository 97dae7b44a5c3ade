//! Builds a residue-sequence certificate for one vanishing instance on F_1,
//! checks it, serializes it, and shows that a tampered copy is rejected.
//!
//! cargo run --release --example certificate

use toric_bott::certifier::{tamper_leaves, Certificate, Certifier};
use toric_bott::danilov::verify_vanishing;
use toric_bott::divisors::InvariantDivisor;
use toric_bott::fan::builtin::hirzebruch;

fn main() -> toric_bott::Result<()> {
    let f1 = hirzebruch(1);
    let l = InvariantDivisor::from_ints(&[2, 1, 2, 1]);
    let dprime = [1];
    let certifier = Certifier::new(&f1)?;
    let cert = certifier.build(&dprime, &l)?;
    println!(
        "leaves {} nodes {} depth {} strata {:?}",
        cert.leaves(),
        cert.nodes(),
        cert.depth(),
        cert.visited_strata()
    );
    println!("check: {}", certifier.check(&cert)?);

    let direct = verify_vanishing(&f1, &dprime, &l, false)?;
    println!("direct h^q for p = 0..2: {:?}", direct.dims);

    let json = cert.to_json();
    let back = Certificate::from_json(&json)?;
    assert_eq!(back, cert);
    println!("json: {} bytes", json.len());

    let mut bad = back;
    for root in &mut bad.roots {
        tamper_leaves(root, -3);
    }
    match certifier.check(&bad) {
        Ok(ok) => println!("tampered check: {ok}"),
        Err(e) => println!("tampered check rejected: {e}"),
    }
    Ok(())
}
