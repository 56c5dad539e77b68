//! Train scheme A and scheme B on the same tracks and compare residual widths
//! on a shared test set.
//!
//! cargo run --release --example compare_schemes -- [tracks] [epochs]

use segrestore::dataset::build_pairs;
use segrestore::{
    evaluate, gen_dataset, init_network, split, train, EvalMode, GenConfig, NormSpec, Scheme,
    TrainConfig, CANONICAL_DIMS,
};

fn main() -> segrestore::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1500);
    let epochs = args.next().and_then(|s| s.parse().ok()).unwrap_or(300);

    let spec = NormSpec::default();
    let data = gen_dataset(n, &GenConfig { seed: 11, ..GenConfig::default() })?;
    let (train_set, test_set) = split(&data, n * 3 / 5, n - n * 3 / 5, 12)?;

    for scheme in [Scheme::RandomIndex, Scheme::AllIndices] {
        let pairs = build_pairs(&train_set, scheme, 13)
            .iter()
            .map(|p| p.normalized(&spec))
            .collect::<segrestore::Result<Vec<_>>>()?;
        let mut net = init_network(&CANONICAL_DIMS, 14)?;
        let cfg = TrainConfig { max_epochs: epochs, ..TrainConfig::default() };
        let report = train(&pairs, &cfg, &mut net)?;
        let eval = evaluate(&net, &test_set, EvalMode::RandomIndex(15), &spec, 5.0)?;
        println!(
            "{scheme:?}: {:>6} pairs, final mse {:.3e}, residual mean {:+.3}, std {:.3} wires, recovery {:.4}",
            pairs.len(),
            report.final_mse,
            eval.mean,
            eval.std,
            eval.recovery_rate
        );
    }
    Ok(())
}
