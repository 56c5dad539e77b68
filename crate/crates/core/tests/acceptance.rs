//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Run with `cargo test --test acceptance`.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segrestore::trackgen::{load_csv, save_csv};
use segrestore::{
    corrupt_expand, corrupt_random, gen_dataset, init_network, load_model, save_model, GenConfig,
    TrackSample, CANONICAL_DIMS,
};

type Check = Result<String, String>;

const SEED: &str = "7";
const N_TRACKS: &str = "8500";
const TRAIN_N: &str = "5000";
const TEST_N: &str = "3500";

fn segrestore(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_segrestore"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "segrestore {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// Artifacts of one gen + train(A, B) + eval run.
struct Run {
    dir: PathBuf,
}

impl Run {
    fn file(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn execute(dir: &Path) -> Result<Self, String> {
        let run = Run { dir: dir.to_path_buf() };
        let data = run.file("tracks.csv");
        segrestore(&["gen", "--n", N_TRACKS, "--seed", SEED, "--out", p(&data)])?;
        for scheme in ["A", "B"] {
            let model = run.file(&format!("{scheme}.model"));
            let history = run.file(&format!("{scheme}.history.csv"));
            segrestore(&[
                "train", "--data", p(&data), "--scheme", scheme, "--train-n", TRAIN_N,
                "--test-n", TEST_N, "--seed", SEED, "--out-model", p(&model),
                "--history", p(&history),
            ])?;
        }
        // Both schemes share the split seed, so their test files are identical; use B's.
        let test = run.file("B.model.test.csv");
        for (scheme, mode) in [("A", "random"), ("B", "random"), ("B", "all")] {
            let out = run.file(&format!("{scheme}-{mode}"));
            segrestore(&[
                "eval", "--model", p(&run.file(&format!("{scheme}.model"))), "--test", p(&test),
                "--mode", mode, "--seed", SEED, "--out", p(&out),
            ])?;
        }
        Ok(run)
    }

    fn report_value(&self, report: &str, key: &str) -> Result<f64, String> {
        let path = self.file(report).join("report.txt");
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .ok_or(format!("{key} missing from {}", path.display()))?
            .parse()
            .map_err(|e| format!("{key}: {e}"))
    }

    fn per_index_means(&self, report: &str) -> Result<Vec<f64>, String> {
        let text = std::fs::read_to_string(self.file(report).join("per_index.csv"))
            .map_err(|e| e.to_string())?;
        text.lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap_or("").parse::<f64>().map_err(|e| e.to_string()))
            .collect()
    }

    fn history(&self, scheme: &str) -> Result<Vec<f64>, String> {
        let text = std::fs::read_to_string(self.file(&format!("{scheme}.history.csv")))
            .map_err(|e| e.to_string())?;
        text.lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap_or("").parse::<f64>().map_err(|e| e.to_string()))
            .collect()
    }
}

fn gradient_correctness() -> Check {
    let net = init_network(&CANONICAL_DIMS, 0).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let t: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let (_, analytic) = net.backprop(&x, &t).map_err(|e| e.to_string())?;
        let numeric = net.numerical_gradient(&x, &t, 1e-5).map_err(|e| e.to_string())?;
        worst = worst.max(analytic.relative_error(&numeric));
    }
    let detail = format!("max relative error {worst:.3e} (bound 1e-6)");
    if worst < 1e-6 { Ok(detail) } else { Err(detail) }
}

fn determinism(a: &Run, b: &Run) -> Check {
    let mut files = vec!["tracks.csv".to_string(), "A.model".into(), "B.model".into()];
    for r in ["A-random", "B-random", "B-all"] {
        for f in ["report.txt", "histogram.csv", "per_index.csv"] {
            files.push(format!("{r}/{f}"));
        }
    }
    for f in &files {
        let x = std::fs::read(a.file(f)).map_err(|e| format!("{f}: {e}"))?;
        let y = std::fs::read(b.file(f)).map_err(|e| format!("{f}: {e}"))?;
        if x != y {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok(format!("{} files byte-identical across two runs", files.len()))
}

fn scheme_ordering(run: &Run) -> Check {
    let a = run.report_value("A-random", "std")?;
    let b = run.report_value("B-random", "std")?;
    let detail = format!("std A = {a:.4}, std B = {b:.4}, ratio {:.4} (bound 0.75)", b / a);
    if b < a && b <= 0.75 * a { Ok(detail) } else { Err(detail) }
}

fn absolute_accuracy(run: &Run) -> Check {
    let b = run.report_value("B-random", "std")?;
    let detail = format!("std B = {b:.4} wires (bound 1.0)");
    if b <= 1.0 { Ok(detail) } else { Err(detail) }
}

fn recovery(run: &Run) -> Check {
    let n = run.report_value("B-random", "n")?;
    let rate = run.report_value("B-random", "recovery_rate")?;
    let detail = format!("recovery@5 = {rate:.4} over {n} tracks (bound 0.99)");
    if n == 3500.0 && rate >= 0.99 { Ok(detail) } else { Err(detail) }
}

fn per_index_systematics(run: &Run) -> Check {
    let std = run.report_value("B-all", "std")?;
    let means = run.per_index_means("B-all")?;
    let worst = means.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let detail = format!("max |per-index mean| = {worst:.4}, overall std = {std:.4}");
    if means.len() == 6 && worst <= std { Ok(detail) } else { Err(detail) }
}

fn data_construction() -> Check {
    let data = gen_dataset(500, &GenConfig::default()).map_err(|e| e.to_string())?;
    for s in &data {
        let pairs = corrupt_expand(s);
        let ok = pairs.len() == 6
            && pairs.iter().enumerate().all(|(k, pr)| {
                pr.missing_index == k
                    && pr.input[k] == 0.0
                    && (0..6).all(|j| j == k || pr.input[j] == pr.target[j])
            });
        if !ok {
            return Err(format!("bad expansion of {:?}", s.values()));
        }
    }
    let sample = &data[0];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draws = 60_000usize;
    let mut counts = [0usize; 6];
    for _ in 0..draws {
        counts[corrupt_random(sample, &mut rng).missing_index] += 1;
    }
    let mean = draws as f64 / 6.0;
    let sd = (draws as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
    let worst = counts.iter().map(|&c| (c as f64 - mean).abs() / sd).fold(0.0, f64::max);
    let detail = format!("6 pairs per sample; index counts {counts:?}, max deviation {worst:.2} sd (bound 5)");
    if worst <= 5.0 { Ok(detail) } else { Err(detail) }
}

fn persistence(dir: &Path) -> Check {
    let net = init_network(&CANONICAL_DIMS, 99).map_err(|e| e.to_string())?;
    let model = dir.join("roundtrip.model");
    save_model(&net, &model).map_err(|e| e.to_string())?;
    let back = load_model(&model).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let (u, v) = (net.forward(&x).unwrap(), back.forward(&x).unwrap());
        worst = u.iter().zip(&v).fold(worst, |m, (a, b)| m.max((a - b).abs()));
    }
    let data = gen_dataset(1000, &GenConfig { seed: 5, ..GenConfig::default() })
        .map_err(|e| e.to_string())?;
    let csv = dir.join("roundtrip.csv");
    save_csv(&data, &csv).map_err(|e| e.to_string())?;
    let loaded: Vec<TrackSample> = load_csv(&csv, 112).map_err(|e| e.to_string())?;
    let detail = format!("max model output diff {worst:.1e} (bound 1e-15); 1000-track CSV exact = {}", loaded == data);
    if worst < 1e-15 && loaded == data { Ok(detail) } else { Err(detail) }
}

fn training_sanity(run: &Run) -> Check {
    let h = run.history("B")?;
    let (first, last) = (h.first().copied().unwrap_or(f64::NAN), h.last().copied().unwrap_or(f64::NAN));
    let detail = format!("epoch-1 mse {first:.3e}, final mse {last:.3e} after {} epochs, ratio {:.2e} (bound 0.1)", h.len(), last / first);
    if last <= 0.1 * first { Ok(detail) } else { Err(detail) }
}

fn constant_track_inference(run: &Run) -> Check {
    let out = segrestore(&["infer", "--model", p(&run.file("B.model")), "--input", "50,50,0,50,50,50"])?;
    let pred: f64 = out.trim().parse().map_err(|e| format!("{out:?}: {e}"))?;
    let detail = format!("[50,50,_,50,50,50] -> {pred:.4} (bound |50 - x| <= 2)");
    if (pred - 50.0).abs() <= 2.0 { Ok(detail) } else { Err(detail) }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let tmp = tempfile::tempdir().expect("temp dir");
    let (d1, d2) = (tmp.path().join("run1"), tmp.path().join("run2"));
    std::fs::create_dir_all(&d1).unwrap();
    std::fs::create_dir_all(&d2).unwrap();

    let runs = Run::execute(&d1).and_then(|a| Run::execute(&d2).map(|b| (a, b)));
    let pipeline = |f: &dyn Fn(&Run) -> Check| match &runs {
        Ok((a, _)) => f(a),
        Err(e) => Err(format!("pipeline failed: {e}")),
    };

    let results: Vec<(&str, Check)> = vec![
        ("1 gradient correctness", gradient_correctness()),
        ("2 determinism", match &runs {
            Ok((a, b)) => determinism(a, b),
            Err(e) => Err(format!("pipeline failed: {e}")),
        }),
        ("3 scheme ordering", pipeline(&scheme_ordering)),
        ("4 absolute accuracy", pipeline(&absolute_accuracy)),
        ("5 recovery proxy", pipeline(&recovery)),
        ("6 per-index systematics", pipeline(&per_index_systematics)),
        ("7 data construction", data_construction()),
        ("8 persistence", persistence(tmp.path())),
        ("9 training sanity", pipeline(&training_sanity)),
        ("constant-track inference", pipeline(&constant_track_inference)),
    ];

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.0?}",
        results.len() - failed,
        started.elapsed()
    );
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
