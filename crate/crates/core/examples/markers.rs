//! Merge markers: the smallest x ≥ 2^i with (x/(x-2^i+1))^s ≤ (1+ε)/(1-ε).
//! A span-2^i block merges once it is x_i items old.
//!
//! ```bash
//! cargo run --example markers
//! ```

use decaystream::polydecay::compute_marker;

fn main() -> decaystream::Result<()> {
    let eps = 0.3;
    let levels = 0..=12u32;
    print!("{:>5}", "s\\i");
    for i in levels.clone() {
        print!(" {i:>7}");
    }
    println!();
    for s in [0.0, 0.5, 1.0, 2.0, 5.0] {
        print!("{s:>5}");
        for i in levels.clone() {
            print!(" {:>7}", compute_marker(s, eps, i)?);
        }
        println!();
    }
    println!("(eps = {eps}; s = 0 reduces to plain merge-and-reduce, x_i = 2^i)");
    Ok(())
}
