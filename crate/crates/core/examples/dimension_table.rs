//! Dimensions of the submodules of S(V) for small n.

use co1as::decomp::submodule_dims;

fn main() -> co1as::Result<()> {
    println!(" n |  T (T1 T2 T3) | II (1 2 3) |  Z (1 2 3) | SU1 | total");
    for n in 2..=7 {
        let d = submodule_dims(n)?;
        println!(
            "{n:>2} | {:>3} ({} {} {}) | {:>3} ({} {} {}) | {:>3} ({} {} {}) | {:>3} | {:>5}",
            d.t, d.t1, d.t2, d.t3, d.ii, d.ii1, d.ii2, d.ii3, d.z, d.z1, d.z2, d.z3, d.su1, d.total
        );
    }
    Ok(())
}
