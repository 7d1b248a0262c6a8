//! Classifies the structure of every built-in example at a few sample points.

use co1as::co1::structure_at;
use co1as::decomp::{classify, CLASSIFY_TOL};
use co1as::registry::{build_example, registry, ExampleParams};

fn main() -> co1as::Result<()> {
    for entry in registry() {
        let ex = build_example(entry.name, 3, &ExampleParams::default())?;
        println!("{}  ({})", entry.name, entry.orientation);
        for p in ex.sample_points(3, 1)? {
            let report = classify(&structure_at(&ex.setup, &p)?, CLASSIFY_TOL)?;
            let found: Vec<String> = report
                .present()
                .iter()
                .map(|c| match c.param.as_ref().and_then(|v| v.scalar()) {
                    Some(l) => format!("{}(λ = {l:+.6})", c.id),
                    None => c.id.to_string(),
                })
                .collect();
            let t = p[0];
            println!(
                "  t = {t:+.3}  {:<40} matches registry: {}",
                if found.is_empty() { "S = 0".to_string() } else { found.join(" ") },
                ex.fingerprint_matches(&p, &report, 1e-6)
            );
        }
    }
    Ok(())
}
