//! Fill in a missing segment with a saved model.
//!
//! cargo run --example infer_segment -- <model> 50,52,0,56,58,60

use std::path::Path;

use segrestore::eval::infer_corrupted;
use segrestore::{load_model, Error, NormSpec};

fn main() -> segrestore::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let [model, input] = args.as_slice() else {
        return Err(Error::Usage("usage: infer_segment <model> <x1,..,x6 with one 0>".into()));
    };
    let values: Vec<f64> = input
        .split(',')
        .map(|f| f.trim().parse().map_err(|_| Error::Usage(format!("bad value {f:?}"))))
        .collect::<segrestore::Result<_>>()?;
    let values: [f64; 6] = values
        .try_into()
        .map_err(|_| Error::Usage("need six values".into()))?;

    let net = load_model(Path::new(model))?;
    let (index, wire) = infer_corrupted(&net, &values, &NormSpec::default())?;
    println!("superlayer {} -> wire {wire:.2}", index + 1);
    Ok(())
}
