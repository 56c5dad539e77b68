//! Show the two ways of building training pairs from one clean track.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use segrestore::{corrupt_expand, corrupt_random, gen_dataset, GenConfig, NormSpec};

fn main() -> segrestore::Result<()> {
    let track = gen_dataset(1, &GenConfig::default())?.remove(0);
    println!("clean:      {:?}", track.values());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = corrupt_random(&track, &mut rng);
    println!("\nscheme A (one random slot):");
    println!("  missing {}: {:?}", a.missing_index, a.input);

    println!("\nscheme B (every slot):");
    for p in corrupt_expand(&track) {
        println!("  missing {}: {:?}", p.missing_index, p.input);
    }

    let spec = NormSpec::default();
    println!("\nnetwork units (/{}): {:?}", spec.wires(), a.normalized(&spec)?.input);
    Ok(())
}
