//! Train a scheme-B autoencoder on a small synthetic set and report residuals.
//!
//! cargo run --release --example train_autoencoder -- [tracks] [epochs]

use segrestore::dataset::build_pairs;
use segrestore::{
    evaluate, gen_dataset, init_network, split, train, EvalMode, GenConfig, NormSpec, Scheme,
    TrainConfig, CANONICAL_DIMS,
};

fn main() -> segrestore::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let epochs = args.next().and_then(|s| s.parse().ok()).unwrap_or(300);

    let spec = NormSpec::default();
    let data = gen_dataset(n, &GenConfig { seed: 1, ..GenConfig::default() })?;
    let (train_set, test_set) = split(&data, n * 7 / 10, n - n * 7 / 10, 2)?;
    let pairs = build_pairs(&train_set, Scheme::AllIndices, 3)
        .iter()
        .map(|p| p.normalized(&spec))
        .collect::<segrestore::Result<Vec<_>>>()?;

    let mut net = init_network(&CANONICAL_DIMS, 4)?;
    let cfg = TrainConfig { max_epochs: epochs, log_every: 50, ..TrainConfig::default() };
    let report = train(&pairs, &cfg, &mut net)?;
    println!(
        "{} pairs, {} epochs in {:.1?}: mse {:.3e} -> {:.3e}",
        pairs.len(),
        report.epochs_run,
        report.wall_time,
        report.history[0],
        report.final_mse
    );

    let eval = evaluate(&net, &test_set, EvalMode::AllIndices, &spec, 5.0)?;
    print!("{}", eval.to_text());
    print!("{}", eval.per_index_csv());
    Ok(())
}
