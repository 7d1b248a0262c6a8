//! Splits a random element of S(V) into its ten submodules.

use co1as::decomp::{classify, project, random_structure, SubmoduleId, CLASSIFY_TOL};

fn main() -> co1as::Result<()> {
    let n = 4;
    let s = random_structure(n, 2024)?;
    let report = classify(&s, CLASSIFY_TOL)?;
    println!("|S| = {:.6}", report.norm);
    let mut total = 0.0;
    for c in &report.components {
        total += c.norm * c.norm;
        println!("  {:<4} {:>10.6}", c.id.as_str(), c.norm);
    }
    println!("sum of squares {total:.12}  vs |S|² {:.12}", report.norm * report.norm);

    // projections land back in S(V) and are fixed by a second projection
    let p = project(&s, SubmoduleId::T2)?;
    let again = project(&p, SubmoduleId::T2)?;
    println!("T2 idempotence defect {:.1e}", again.sub(&p).max_abs());
    Ok(())
}
