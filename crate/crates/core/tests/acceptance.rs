//! One line per acceptance criterion; exits non-zero if any fails.

use curveasym_core::verify;

fn main() {
    let filter: Option<u8> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let outcomes: Vec<_> = match filter {
        Some(id) => verify::run(id).into_iter().collect(),
        None => verify::run_all(),
    };
    for o in &outcomes {
        println!("{}", o.line());
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
