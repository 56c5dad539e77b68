//! Line-oriented text format for [`DenseNetwork`].
//!
//! ```text
//! segrestore-model v1
//! 6 12 6 12 6
//! sigmoid sigmoid sigmoid sigmoid
//! <w_00> <w_01> ... <w_0,in-1> <b_0>      one line per output node,
//! ...                                     layer after layer
//! ```
//!
//! Values carry 17 significant digits, so a save/load cycle restores every
//! parameter bit for bit.

use std::path::Path;

use crate::io::{read_to_string, sig17, write_atomic};
use crate::nn::{Activation, DenseLayer, DenseNetwork};
use crate::{Error, Result};

pub const MODEL_HEADER: &str = "segrestore-model v1";
const MAGIC: &str = "segrestore-model";

pub fn model_to_string(net: &DenseNetwork) -> String {
    let mut out = String::new();
    out.push_str(MODEL_HEADER);
    out.push('\n');
    let dims: Vec<String> = net.dims().iter().map(usize::to_string).collect();
    out.push_str(&dims.join(" "));
    out.push('\n');
    let tags: Vec<&str> = net.layers().iter().map(|l| l.activation().tag()).collect();
    out.push_str(&tags.join(" "));
    out.push('\n');
    for layer in net.layers() {
        for row in 0..layer.out_dim() {
            let fields: Vec<String> = layer
                .weight_row(row)
                .iter()
                .chain(std::iter::once(&layer.biases()[row]))
                .map(|&v| sig17(v))
                .collect();
            out.push_str(&fields.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses model text; `path` only labels errors.
pub fn model_from_str(text: &str, path: &Path) -> Result<DenseNetwork> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let mut last_line = 0;
    let mut next = |what: &str| -> Result<(usize, &str)> {
        match lines.next() {
            Some((n, l)) => {
                last_line = n;
                Ok((n, l))
            }
            None => Err(Error::parse(
                path,
                last_line + 1,
                format!("unexpected end of file, expected {what}"),
            )),
        }
    };

    let (n, header) = next("header")?;
    if header != MODEL_HEADER {
        if let Some(rest) = header.strip_prefix(MAGIC) {
            if rest.starts_with(' ') {
                return Err(Error::Version {
                    found: header.to_string(),
                    expected: MODEL_HEADER,
                });
            }
        }
        return Err(Error::parse(path, n, format!("bad header {header:?}")));
    }

    let (n, dims_line) = next("layer sizes")?;
    let dims = dims_line
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::parse(path, n, format!("bad layer size: {e}")))?;
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::parse(
            path,
            n,
            "need at least two positive layer sizes",
        ));
    }

    let (n, tag_line) = next("activation tags")?;
    let acts = tag_line
        .split_whitespace()
        .map(|t| {
            Activation::from_tag(t)
                .ok_or_else(|| Error::parse(path, n, format!("unknown activation {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if acts.len() != dims.len() - 1 {
        return Err(Error::parse(
            path,
            n,
            format!(
                "{} activation tags for {} layers",
                acts.len(),
                dims.len() - 1
            ),
        ));
    }

    let mut layers = Vec::with_capacity(acts.len());
    for (d, &act) in dims.windows(2).zip(&acts) {
        let (n_in, n_out) = (d[0], d[1]);
        let mut weights = Vec::with_capacity(n_in * n_out);
        let mut biases = Vec::with_capacity(n_out);
        for _ in 0..n_out {
            let (n, row) = next("weight row")?;
            let values = row
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::parse(path, n, format!("bad number {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != n_in + 1 {
                return Err(Error::parse(
                    path,
                    n,
                    format!("expected {} values, found {}", n_in + 1, values.len()),
                ));
            }
            weights.extend_from_slice(&values[..n_in]);
            biases.push(values[n_in]);
        }
        layers.push(DenseLayer::new(n_in, n_out, weights, biases, act)?);
    }

    for (n, rest) in lines {
        if !rest.trim().is_empty() {
            return Err(Error::parse(path, n, "trailing content after last layer"));
        }
    }
    DenseNetwork::new(layers)
}

/// Writes atomically: a temporary file beside `path` is renamed into place.
pub fn save_model(net: &DenseNetwork, path: &Path) -> Result<()> {
    write_atomic(path, model_to_string(net).as_bytes())
}

pub fn load_model(path: &Path) -> Result<DenseNetwork> {
    model_from_str(&read_to_string(path)?, path)
}
