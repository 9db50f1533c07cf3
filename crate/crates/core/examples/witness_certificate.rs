//! Rank certificates for the witness bath, the closed-form matrix elements,
//! and a comparison of nested commutators with `B_0` against `B_+`.

use tdcontrol::witness::{formula_checks, independence_certificate, witness_bath, WitnessBath};

fn main() -> tdcontrol::Result<()> {
    for (n, d) in [(1, 2), (2, 2), (3, 2), (2, 3), (3, 3)] {
        let wb = witness_bath(n, d)?;
        let plus = independence_certificate(&wb, true)?;
        let full = independence_certificate(&wb, false)?;
        let checks = formula_checks(&wb)?;
        let dev = checks.iter().map(|c| c.formula_deviation).fold(0.0, f64::max);
        let b0 = checks.iter().map(|c| c.b0_discrepancy).fold(0.0, f64::max);
        println!(
            "N={n} D={d} dim={:>5}  rank {}/{} (B+), {}/{} (B0)  formula dev {dev:.1e}  B0 vs B+ {b0:.3}",
            wb.dim(),
            plus.rank,
            plus.count,
            full.rank,
            full.count
        );
    }

    let random = WitnessBath::random(3, 3, 3, 7)?;
    let cert = independence_certificate(&random, true)?;
    println!("random 3-dim auxiliary: rank {}/{} (not a certificate)", cert.rank, cert.count);
    Ok(())
}
