//! Feed-forward network with tanh hidden layers and exact reverse-mode
//! gradients, stored as one flat parameter vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Layer widths, input first. The default predictor is `[2, 32, 32, 1]`:
/// two inputs (normalized differential voltage, normalized time), two
/// tanh hidden layers of 32, one linear output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpShape(Vec<usize>);

impl MlpShape {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::structure("shape needs at least input and output"));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::structure("layer widths must be positive"));
        }
        Ok(Self(sizes))
    }

    /// The architecture used throughout: 2 -> 32 -> 32 -> 1.
    pub fn standard() -> Self {
        Self(vec![2, 32, 32, 1])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn input_dim(&self) -> usize {
        self.0[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.0.last().unwrap()
    }

    /// Closed-form parameter count: sum of `fan_in * fan_out + fan_out`
    /// over consecutive layer pairs.
    pub fn param_count(&self) -> usize {
        self.0
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

/// Offsets of each layer's weight block and bias block inside the flat
/// parameter vector. Weights are row-major `[fan_out x fan_in]`.
#[derive(Debug, Clone)]
struct Layout {
    weight_at: Vec<usize>,
    bias_at: Vec<usize>,
}

impl Layout {
    fn new(sizes: &[usize]) -> Self {
        let mut weight_at = Vec::with_capacity(sizes.len() - 1);
        let mut bias_at = Vec::with_capacity(sizes.len() - 1);
        let mut at = 0;
        for w in sizes.windows(2) {
            weight_at.push(at);
            at += w[0] * w[1];
            bias_at.push(at);
            at += w[1];
        }
        Self { weight_at, bias_at }
    }
}

/// Multilayer perceptron over a flat `f64` parameter vector.
#[derive(Debug, Clone)]
pub struct Mlp {
    shape: MlpShape,
    layout: Layout,
    params: Vec<f64>,
}

/// Per-layer post-activation values for a batch, reused between the
/// forward and backward passes.
#[derive(Debug, Default, Clone)]
pub struct BatchCache {
    /// One buffer per non-input layer, length `batch * width`.
    activations: Vec<Vec<f64>>,
    batch: usize,
}

impl Mlp {
    /// Glorot-uniform initialization: weights uniform in
    /// `[-sqrt(6/(fan_in+fan_out)), +sqrt(6/(fan_in+fan_out))]`, biases
    /// zero. Deterministic per seed.
    pub fn init(seed: u64, shape: MlpShape) -> Self {
        let layout = Layout::new(shape.sizes());
        let mut params = vec![0.0; shape.param_count()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (li, w) in shape.sizes().windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let at = layout.weight_at[li];
            for p in params[at..at + fan_in * fan_out].iter_mut() {
                let u: f64 = rng.gen();
                *p = (2.0 * u - 1.0) * bound;
            }
            // biases stay zero
        }
        Self { shape, layout, params }
    }

    /// Wrap an existing flat parameter vector.
    pub fn from_params(shape: MlpShape, params: Vec<f64>) -> Result<Self> {
        if params.len() != shape.param_count() {
            return Err(Error::structure(format!(
                "parameter vector length {} does not match shape count {}",
                params.len(),
                shape.param_count()
            )));
        }
        let layout = Layout::new(shape.sizes());
        Ok(Self { shape, layout, params })
    }

    pub fn shape(&self) -> &MlpShape {
        &self.shape
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: &[f64]) {
        self.params.copy_from_slice(params);
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Forward pass for a single input row. Errors on dimension mismatch.
    pub fn forward_one(&self, input: &[f64]) -> Result<f64> {
        if input.len() != self.shape.input_dim() {
            return Err(Error::argument(format!(
                "input dimension {} does not match network input {}",
                input.len(),
                self.shape.input_dim()
            )));
        }
        let mut cache = BatchCache::default();
        self.forward_batch(input, &mut cache)?;
        Ok(cache.outputs()[0])
    }

    /// Forward pass over a flat batch (`batch * input_dim` values,
    /// row-major). Activations are kept in `cache` for a later backward
    /// pass; `cache.outputs()` holds the scalar outputs.
    pub fn forward_batch(&self, inputs: &[f64], cache: &mut BatchCache) -> Result<()> {
        let d_in = self.shape.input_dim();
        if self.shape.output_dim() != 1 {
            return Err(Error::structure("batch forward expects scalar output"));
        }
        if inputs.len() % d_in != 0 {
            return Err(Error::argument(format!(
                "batch length {} is not a multiple of input dimension {d_in}",
                inputs.len()
            )));
        }
        let batch = inputs.len() / d_in;
        let sizes = self.shape.sizes();
        let n_layers = sizes.len() - 1;
        cache.batch = batch;
        cache.activations.resize(n_layers, Vec::new());
        for (li, buf) in cache.activations.iter_mut().enumerate() {
            buf.clear();
            buf.resize(batch * sizes[li + 1], 0.0);
        }

        for li in 0..n_layers {
            let (fan_in, fan_out) = (sizes[li], sizes[li + 1]);
            let weights = &self.params[self.layout.weight_at[li]..][..fan_in * fan_out];
            let biases = &self.params[self.layout.bias_at[li]..][..fan_out];
            let last = li == n_layers - 1;
            // Split borrows: the input of layer li is either the raw batch
            // or the previous activation buffer.
            if li == 0 {
                let out = &mut cache.activations[0];
                layer_forward(inputs, weights, biases, fan_in, fan_out, batch, last, out);
            } else {
                let (prev, rest) = cache.activations.split_at_mut(li);
                let input = &prev[li - 1];
                let out = &mut rest[0];
                layer_forward(input, weights, biases, fan_in, fan_out, batch, last, out);
            }
        }
        Ok(())
    }

    /// Reverse-mode pass. `out_grads[s]` is the upstream derivative of the
    /// scalar loss with respect to the network output for sample `s`;
    /// parameter gradients are accumulated into `grad` (length
    /// `param_count`). Must be called with the `cache` produced by the
    /// matching `forward_batch`.
    pub fn backward_batch(
        &self,
        inputs: &[f64],
        cache: &BatchCache,
        out_grads: &[f64],
        grad: &mut [f64],
    ) -> Result<()> {
        let d_in = self.shape.input_dim();
        let batch = cache.batch;
        if out_grads.len() != batch {
            return Err(Error::argument(format!(
                "got {} output gradients for batch of {batch}",
                out_grads.len()
            )));
        }
        if grad.len() != self.params.len() {
            return Err(Error::argument(
                "gradient buffer length does not match parameter count",
            ));
        }
        let sizes = self.shape.sizes();
        let n_layers = sizes.len() - 1;

        // delta holds dLoss/d(pre-activation) of the current layer while
        // walking backwards; buffers are reused across samples.
        let widest = *sizes.iter().max().unwrap();
        let mut delta = vec![0.0; widest];
        let mut delta_prev = vec![0.0; widest];

        for s in 0..batch {
            delta[0] = out_grads[s];
            let mut delta_len = 1;
            for li in (0..n_layers).rev() {
                let (fan_in, fan_out) = (sizes[li], sizes[li + 1]);
                debug_assert_eq!(delta_len, fan_out);
                let w_at = self.layout.weight_at[li];
                let b_at = self.layout.bias_at[li];
                let input: &[f64] = if li == 0 {
                    &inputs[s * d_in..(s + 1) * d_in]
                } else {
                    &cache.activations[li - 1][s * fan_in..(s + 1) * fan_in]
                };

                if li > 0 {
                    // dLoss/d(activation of layer li-1): accumulate row by
                    // row so weight reads stay sequential, then apply the
                    // tanh derivative.
                    delta_prev[..fan_in].fill(0.0);
                    for (j, dj) in delta[..fan_out].iter().enumerate() {
                        let row = &self.params[w_at + j * fan_in..w_at + (j + 1) * fan_in];
                        for (d, w) in delta_prev[..fan_in].iter_mut().zip(row) {
                            *d += dj * w;
                        }
                    }
                    let prev_act = &cache.activations[li - 1][s * fan_in..(s + 1) * fan_in];
                    for (d, a) in delta_prev[..fan_in].iter_mut().zip(prev_act) {
                        *d *= 1.0 - a * a;
                    }
                }

                for (j, dj) in delta[..fan_out].iter().enumerate() {
                    let row = &mut grad[w_at + j * fan_in..w_at + (j + 1) * fan_in];
                    for (g, x) in row.iter_mut().zip(input) {
                        *g += dj * x;
                    }
                    grad[b_at + j] += dj;
                }

                if li > 0 {
                    std::mem::swap(&mut delta, &mut delta_prev);
                    delta_len = fan_in;
                }
            }
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn layer_forward(
    input: &[f64],
    weights: &[f64],
    biases: &[f64],
    fan_in: usize,
    fan_out: usize,
    batch: usize,
    linear: bool,
    out: &mut [f64],
) {
    for s in 0..batch {
        let x = &input[s * fan_in..(s + 1) * fan_in];
        let y = &mut out[s * fan_out..(s + 1) * fan_out];
        for j in 0..fan_out {
            let row = &weights[j * fan_in..(j + 1) * fan_in];
            let mut acc = biases[j];
            for (w, xi) in row.iter().zip(x) {
                acc += w * xi;
            }
            y[j] = if linear { acc } else { acc.tanh() };
        }
    }
}

impl BatchCache {
    /// Scalar outputs of the last forward pass.
    pub fn outputs(&self) -> &[f64] {
        self.activations.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_shape_param_count() {
        // 2*32+32 + 32*32+32 + 32*1+1
        assert_eq!(MlpShape::standard().param_count(), 96 + 1056 + 33);
    }

    #[test]
    fn all_zero_params_give_zero_output() {
        let shape = MlpShape::standard();
        let mlp = Mlp::from_params(shape.clone(), vec![0.0; shape.param_count()]).unwrap();
        assert_eq!(mlp.forward_one(&[3.0, -1.5]).unwrap(), 0.0);
    }

    #[test]
    fn output_bias_alone_sets_constant_output() {
        let shape = MlpShape::standard();
        let mut params = vec![0.0; shape.param_count()];
        let last = params.len() - 1; // final bias
        params[last] = 0.7;
        let mlp = Mlp::from_params(shape, params).unwrap();
        assert_eq!(mlp.forward_one(&[0.0, 0.0]).unwrap(), 0.7);
        assert_eq!(mlp.forward_one(&[5.0, 5.0]).unwrap(), 0.7);
    }

    #[test]
    fn degenerate_one_wide_network_composes_tanh() {
        // 2 -> 1 -> 1 -> 1 with all weights one and biases zero, input
        // (0.5, 0): the output is tanh(tanh(0.5)). Expected value from the
        // exponential identity tanh(z) = (e^{2z}-1)/(e^{2z}+1).
        let shape = MlpShape::new(vec![2, 1, 1, 1]).unwrap();
        let mut params = vec![0.0; shape.param_count()];
        // weights: [w1(2), b1(1), w2(1), b2(1), w3(1), b3(1)]
        params[0] = 1.0;
        params[1] = 1.0;
        params[3] = 1.0;
        params[5] = 1.0;
        let mlp = Mlp::from_params(shape, params).unwrap();
        let tanh_exp = |z: f64| ((2.0 * z).exp() - 1.0) / ((2.0 * z).exp() + 1.0);
        let expected = tanh_exp(tanh_exp(0.5));
        let got = mlp.forward_one(&[0.5, 0.0]).unwrap();
        assert!((got - expected).abs() < 1e-12, "got {got}, expected {expected}");
    }

    #[test]
    fn init_is_deterministic_per_seed() {
        let a = Mlp::init(7, MlpShape::standard());
        let b = Mlp::init(7, MlpShape::standard());
        let c = Mlp::init(8, MlpShape::standard());
        assert_eq!(a.params(), b.params());
        assert_ne!(a.params(), c.params());
    }

    #[test]
    fn init_biases_are_zero() {
        let mlp = Mlp::init(3, MlpShape::standard());
        let layout = Layout::new(mlp.shape().sizes());
        for (li, w) in mlp.shape().sizes().windows(2).enumerate() {
            let at = layout.bias_at[li];
            assert!(mlp.params()[at..at + w[1]].iter().all(|&b| b == 0.0));
        }
    }

    #[test]
    fn forward_rejects_dimension_mismatch() {
        let mlp = Mlp::init(0, MlpShape::standard());
        assert!(mlp.forward_one(&[1.0]).is_err());
        assert!(mlp.forward_one(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn backward_on_zero_model_hits_only_output_bias() {
        // Loss = (out - target)^2 at one point with an all-zero model:
        // every hidden activation is tanh(0) = 0, so only the output bias
        // sees gradient 2*(0 - target).
        let shape = MlpShape::standard();
        let mlp = Mlp::from_params(shape.clone(), vec![0.0; shape.param_count()]).unwrap();
        let inputs = [0.3, 0.9];
        let mut cache = BatchCache::default();
        mlp.forward_batch(&inputs, &mut cache).unwrap();
        let target = 2.0;
        let upstream = [2.0 * (cache.outputs()[0] - target)];
        let mut grad = vec![0.0; mlp.param_count()];
        mlp.backward_batch(&inputs, &cache, &upstream, &mut grad).unwrap();
        let last = grad.len() - 1;
        assert_eq!(grad[last], -4.0);
        assert!(grad[..last].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn batch_forward_matches_single_forward() {
        let mlp = Mlp::init(11, MlpShape::standard());
        let rows: Vec<[f64; 2]> = vec![[0.1, 0.2], [-1.0, 0.5], [2.0, -0.3]];
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let mut cache = BatchCache::default();
        mlp.forward_batch(&flat, &mut cache).unwrap();
        for (row, &out) in rows.iter().zip(cache.outputs()) {
            assert_eq!(mlp.forward_one(row).unwrap(), out);
        }
    }
}
