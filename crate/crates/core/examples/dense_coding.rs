//! Two dense-coding protocols through the x = 1 channel.

use qcl::cli::protocol_report;
use qcl::protocols::{bell_protocol, phase_protocol};

fn main() -> qcl::Result<()> {
    print!("{}", protocol_report(&phase_protocol()?));
    println!();
    print!("{}", protocol_report(&bell_protocol()?));
    Ok(())
}
