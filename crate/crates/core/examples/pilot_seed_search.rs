//! Scans pilot seeds for one whose spectrum has no weak bin.
//!
//! `cargo run --release --example pilot_seed_search -- [start] [count] [guard]`

use rayon::prelude::*;

use mslink::txchain::{build_pilot_sequence, pilot_spectrum_guard};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let start: u64 = args.first().map_or(0, |s| s.parse().expect("start seed"));
    let count: u64 = args.get(1).map_or(50_000_000, |s| s.parse().expect("seed count"));
    let guard: f64 = args.get(2).map_or(0.1, |s| s.parse().expect("guard ratio"));

    let chunk = 1_000_000;
    let mut best = (0.0, start);
    let mut from = start;
    while from < start + count {
        let to = (from + chunk).min(start + count);
        let (g, seed) = (from..to)
            .into_par_iter()
            .map(|s| (pilot_spectrum_guard(&build_pilot_sequence(s, 2048)), s))
            .reduce(|| (0.0, u64::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        if g > best.0 {
            best = (g, seed);
        }
        eprintln!("seeds {from}..{to}: best so far {} (guard {:.4})", best.1, best.0);
        if best.0 >= guard {
            break;
        }
        from = to;
    }
    println!("{} {:.6}", best.1, best.0);
}
