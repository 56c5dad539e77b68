//! Compare backprop against central finite differences on the 6-12-6-12-6 net.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segrestore::{init_network, CANONICAL_DIMS};

fn main() -> segrestore::Result<()> {
    let net = init_network(&CANONICAL_DIMS, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..10 {
        let x: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let t: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let (loss, analytic) = net.backprop(&x, &t)?;
        let numeric = net.numerical_gradient(&x, &t, 1e-5)?;
        println!(
            "trial {trial}: loss {loss:.6}, relative error {:.3e}",
            analytic.relative_error(&numeric)
        );
    }
    Ok(())
}
