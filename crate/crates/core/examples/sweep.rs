//! Backward errors along the imaginary axis for a seeded random pencil,
//! written as CSV.
//!
//! ```sh
//! cargo run -p dsmkit --example sweep -- 2024 > sweep.csv
//! ```

use dsmkit::io::sweep_csv;
use dsmkit::pencil::{experiment_table, gen_pencil, BlockSelection, Variant, SWEEP_LAMBDAS};
use dsmkit::ToleranceConfig;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2024);
    let p = gen_pencil(4, 2, seed);
    let rows = experiment_table(&p, &SWEEP_LAMBDAS, seed, BlockSelection::JREB, Variant::Sd, &ToleranceConfig::default())
        .expect("admissible eigenvector");
    print!("{}", sweep_csv(&rows));
}
