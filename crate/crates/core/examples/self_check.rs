//! The fast built-in verification suite.

use lovecap::verify::{verify, Level};

fn main() {
    let report = verify(Level::Fast);
    println!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
}
