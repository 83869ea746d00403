//! A coarse sweep through the library API, printed as CSV.

use qcl::cli::{self, Quantity, SweepConfig};

fn main() {
    let cfg = SweepConfig { steps: 6, starts: 10, quantities: Quantity::ALL.to_vec(), ..SweepConfig::default() };
    match cli::sweep(&cfg).and_then(|rows| cli::to_csv(&rows, &cfg.quantities)) {
        Ok(csv) => print!("{csv}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
