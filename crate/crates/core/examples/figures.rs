//! Writes the figure tables through the command-line front end.
//!
//! cargo run --release --example figures -- [OUT_DIR]

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    let code = brwss::cli::main_with_args(["brwss", "figures", "--out", &out]);
    if code == 0 {
        println!("wrote {out}/fig1a.csv, {out}/fig1b.csv, {out}/fig2.csv and {out}/manifest.json");
    }
    std::process::exit(code);
}
