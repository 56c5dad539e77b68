use super::{mse, DenseNetwork};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    /// Same row-major layout as the layer's weights.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Per-layer weight and bias gradients shaped exactly like a [`DenseNetwork`].
///
/// Also used as the momentum velocity buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientSet {
    layers: Vec<LayerGradient>,
}

impl GradientSet {
    pub fn zeros_like(net: &DenseNetwork) -> Self {
        let layers = net
            .layers()
            .iter()
            .map(|l| LayerGradient {
                weights: vec![0.0; l.weights().len()],
                biases: vec![0.0; l.biases().len()],
            })
            .collect();
        Self { layers }
    }

    pub fn layers(&self) -> &[LayerGradient] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [LayerGradient] {
        &mut self.layers
    }

    /// All values, layer by layer, weights before biases.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases).copied())
    }

    pub fn len(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn matches(&self, net: &DenseNetwork) -> bool {
        self.layers.len() == net.layers().len()
            && self.layers.iter().zip(net.layers()).all(|(g, l)| {
                g.weights.len() == l.weights().len() && g.biases.len() == l.biases().len()
            })
    }

    pub fn is_finite(&self) -> bool {
        self.values().all(f64::is_finite)
    }

    /// Relative error of the whole gradient vector,
    /// `||a - b|| / max(||a||, ||b||)`; 0 when both are zero.
    pub fn relative_error(&self, other: &GradientSet) -> f64 {
        assert_eq!(self.len(), other.len(), "gradient sets differ in shape");
        let norm = |it: &mut dyn Iterator<Item = f64>| it.map(|v| v * v).sum::<f64>().sqrt();
        let diff = norm(&mut self.values().zip(other.values()).map(|(a, b)| a - b));
        let scale = norm(&mut self.values()).max(norm(&mut other.values()));
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    /// Largest elementwise `|a - b| / max(|a|, |b|, floor)`.
    ///
    /// `floor` keeps parameters whose gradient is numerically zero from
    /// dividing by zero.
    pub fn max_relative_error(&self, other: &GradientSet, floor: f64) -> f64 {
        assert_eq!(self.len(), other.len(), "gradient sets differ in shape");
        self.values()
            .zip(other.values())
            .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(floor))
            .fold(0.0, f64::max)
    }
}

/// Reusable per-sample buffers for [`DenseNetwork::backprop_into`].
#[derive(Debug, Clone)]
pub struct Scratch {
    /// `activations[0]` is the input; `activations[l + 1]` is layer `l`'s output.
    activations: Vec<Vec<f64>>,
    delta: Vec<f64>,
    upstream: Vec<f64>,
}

impl Scratch {
    pub fn new(net: &DenseNetwork) -> Self {
        let dims = net.dims();
        let widest = dims.iter().copied().max().unwrap_or(0);
        Self {
            activations: dims.iter().map(|&d| vec![0.0; d]).collect(),
            delta: vec![0.0; widest],
            upstream: vec![0.0; widest],
        }
    }

    /// Output of the most recent forward pass.
    pub fn output(&self) -> &[f64] {
        &self.activations[self.activations.len() - 1]
    }
}

impl DenseNetwork {
    /// Loss and exact analytic gradients of the mean squared error.
    pub fn backprop(&self, input: &[f64], target: &[f64]) -> Result<(f64, GradientSet)> {
        let mut scratch = Scratch::new(self);
        let mut grads = GradientSet::zeros_like(self);
        let loss = self.backprop_into(input, target, &mut scratch, &mut grads)?;
        Ok((loss, grads))
    }

    /// Allocation-free variant of [`backprop`](Self::backprop); `grads` is overwritten.
    pub fn backprop_into(
        &self,
        input: &[f64],
        target: &[f64],
        scratch: &mut Scratch,
        grads: &mut GradientSet,
    ) -> Result<f64> {
        self.check_input(input)?;
        self.check_target(target)?;
        if !grads.matches(self) {
            return Err(Error::InvalidConfig(
                "gradient set does not match network shape".into(),
            ));
        }
        if scratch.activations.len() != self.layers().len() + 1 {
            *scratch = Scratch::new(self);
        }

        scratch.activations[0].copy_from_slice(input);
        for (l, layer) in self.layers().iter().enumerate() {
            let (done, rest) = scratch.activations.split_at_mut(l + 1);
            layer.forward_into(&done[l], &mut rest[0]);
        }

        let output = &scratch.activations[self.layers().len()];
        let loss = mse(output, target);
        if !loss.is_finite() {
            return Err(Error::Numerical(format!("non-finite loss {loss}")));
        }

        // dLoss/d(output)
        let scale = 2.0 / output.len() as f64;
        for ((u, o), t) in scratch.upstream.iter_mut().zip(output).zip(target) {
            *u = scale * (o - t);
        }

        for (l, layer) in self.layers().iter().enumerate().rev() {
            let a_out = &scratch.activations[l + 1];
            let a_in = &scratch.activations[l];
            let (n_in, n_out) = (layer.in_dim(), layer.out_dim());
            let act = layer.activation();

            for j in 0..n_out {
                scratch.delta[j] = scratch.upstream[j] * act.derivative_from_output(a_out[j]);
            }

            let g = &mut grads.layers[l];
            for j in 0..n_out {
                let d = scratch.delta[j];
                g.biases[j] = d;
                let row = &mut g.weights[j * n_in..(j + 1) * n_in];
                for (gw, x) in row.iter_mut().zip(a_in) {
                    *gw = d * x;
                }
            }

            if l > 0 {
                for i in 0..n_in {
                    scratch.upstream[i] = 0.0;
                }
                for j in 0..n_out {
                    let d = scratch.delta[j];
                    for (i, w) in layer.weight_row(j).iter().enumerate() {
                        scratch.upstream[i] += w * d;
                    }
                }
            }
        }

        if !grads.is_finite() {
            return Err(Error::Numerical("non-finite gradient".into()));
        }
        Ok(loss)
    }

    /// Central finite-difference gradient `(L(p + eps) - L(p - eps)) / (2 eps)`
    /// for every parameter. Works on a private copy, so `self` is untouched.
    pub fn numerical_gradient(
        &self,
        input: &[f64],
        target: &[f64],
        epsilon: f64,
    ) -> Result<GradientSet> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        self.check_input(input)?;
        self.check_target(target)?;

        let mut probe = self.clone();
        let mut grads = GradientSet::zeros_like(self);
        for l in 0..probe.layers().len() {
            for k in 0..probe.layers()[l].weights().len() {
                grads.layers[l].weights[k] = central_difference(
                    &mut probe,
                    |net| &mut net.layers_mut()[l].weights_mut()[k],
                    input,
                    target,
                    epsilon,
                )?;
            }
            for k in 0..probe.layers()[l].biases().len() {
                grads.layers[l].biases[k] = central_difference(
                    &mut probe,
                    |net| &mut net.layers_mut()[l].biases_mut()[k],
                    input,
                    target,
                    epsilon,
                )?;
            }
        }
        Ok(grads)
    }

    /// Momentum SGD step: `v <- momentum * v - lr * g`, then `p <- p + v`.
    pub fn apply_update(
        &mut self,
        grads: &GradientSet,
        velocity: &mut GradientSet,
        lr: f64,
        momentum: f64,
    ) -> Result<()> {
        if !(lr > 0.0 && lr.is_finite()) {
            return Err(Error::InvalidConfig(format!("learning rate must be > 0, got {lr}")));
        }
        if !(0.0..1.0).contains(&momentum) {
            return Err(Error::InvalidConfig(format!(
                "momentum must lie in [0, 1), got {momentum}"
            )));
        }
        if !grads.matches(self) || !velocity.matches(self) {
            return Err(Error::InvalidConfig(
                "gradient or velocity shape does not match network".into(),
            ));
        }
        for ((layer, g), v) in self
            .layers_mut()
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut velocity.layers)
        {
            step(layer.weights_mut(), &g.weights, &mut v.weights, lr, momentum);
            step(layer.biases_mut(), &g.biases, &mut v.biases, lr, momentum);
        }
        Ok(())
    }
}

#[inline]
fn step(params: &mut [f64], grads: &[f64], velocity: &mut [f64], lr: f64, momentum: f64) {
    for ((p, g), v) in params.iter_mut().zip(grads).zip(velocity) {
        *v = momentum * *v - lr * g;
        *p += *v;
    }
}

fn central_difference(
    net: &mut DenseNetwork,
    param: impl Fn(&mut DenseNetwork) -> &mut f64,
    input: &[f64],
    target: &[f64],
    epsilon: f64,
) -> Result<f64> {
    let original = *param(net);
    *param(net) = original + epsilon;
    let plus = net.loss(input, target)?;
    *param(net) = original - epsilon;
    let minus = net.loss(input, target)?;
    *param(net) = original;
    Ok((plus - minus) / (2.0 * epsilon))
}
