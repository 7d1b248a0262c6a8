//! Produces a JSON report through the command-line entry point and checks it round-trips.

use co1as::report::{reserialize, PointReport};

fn main() -> co1as::Result<()> {
    let args = ["co1as", "classify", "horospheres", "--n", "2", "--points", "2", "--seed", "3", "--format", "json"];
    let mut out = Vec::new();
    let code = co1as::cli::run(args, &mut out, &mut std::io::stderr());
    let json = String::from_utf8(out).expect("utf-8");
    print!("{json}");
    println!("exit code {code}; byte-identical after re-serializing: {}", reserialize::<PointReport>(&json)? == json);
    Ok(())
}
