//! Generate a few synthetic six-superlayer tracks and print them.
//!
//! cargo run --example generate_tracks -- [n] [seed]

use segrestore::{gen_dataset, GenConfig};

fn main() -> segrestore::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let cfg = GenConfig { seed, ..GenConfig::default() };
    println!("wires = {}, jitter sigma = {}", cfg.wires, cfg.jitter_sigma);
    for (i, track) in gen_dataset(n, &cfg)?.iter().enumerate() {
        let row: Vec<String> = track.values().iter().map(|v| format!("{v:>7.2}")).collect();
        println!("{i:>4}: {}", row.join(" "));
    }
    Ok(())
}
