//! The sparse operator family behind the witness bath: products of up to
//! `R` operators are linearly independent, read off from the `⟨0|` row.

use tdcontrol::witness::{base_k_index, certify_lemma, lemma_family};

fn main() -> tdcontrol::Result<()> {
    for (kp, r) in [(1, 1), (2, 2), (3, 3), (4, 3)] {
        let family = lemma_family(kp, r)?;
        let report = certify_lemma(&family)?;
        println!(
            "K'={kp} R={r}  dim {:>4}  products {:>3}  rank {:>3}  gram eigenvalues [{:.2}, {:.2}]",
            report.dim, report.count, report.rank, report.gram_min_eigenvalue, report.gram_max_eigenvalue
        );
    }

    let family = lemma_family(2, 3)?;
    let word = [1, 1, 2];
    let code = base_k_index(&word, family.k())?;
    let product = family.product(&word)?;
    let (cols, _) = product.row(0);
    println!("<0| O1 O1 O2 touches columns {cols:?}; own code {code}");
    Ok(())
}
