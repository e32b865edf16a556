//! Small dense networks with hand-written backpropagation.
//!
//! Parameters live in one flat `Vec<f64>` (per layer: row-major weights,
//! then biases), which keeps soft updates, the optimizer, checkpointing,
//! and finite-difference probing trivial. Hidden layers are rectified
//! linear; the output layer is linear or tanh.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputActivation {
    Linear,
    Tanh,
}

/// Multilayer perceptron over a flat parameter vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    /// Layer widths, input first: e.g. [52, 64, 64, 2].
    dims: Vec<usize>,
    output_activation: OutputActivation,
    params: Vec<f64>,
}

/// Gradient accumulator with the same flat layout as [`Mlp::params`].
#[derive(Debug, Clone)]
pub struct MlpGrads {
    values: Vec<f64>,
}

impl MlpGrads {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            values: vec![0.0; net.params.len()],
        }
    }

    pub fn reset(&mut self) {
        self.values.fill(0.0);
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// Per-sample forward pass cache: pre- and post-activation values per layer.
#[derive(Debug, Default, Clone)]
pub struct ForwardCache {
    input: Vec<f64>,
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.post.last().expect("forward ran")
    }
}

impl Mlp {
    /// Builds a network with He-uniform hidden layers and a small-uniform
    /// output layer, drawn from `rng`.
    pub fn new<R: Rng + ?Sized>(
        dims: &[usize],
        output_activation: OutputActivation,
        rng: &mut R,
    ) -> Self {
        assert!(dims.len() >= 2, "need at least input and output dims");
        let mut params = Vec::with_capacity(Self::param_count_for(dims));
        let last = dims.len() - 2;
        for (l, pair) in dims.windows(2).enumerate() {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = if l == last {
                3e-3
            } else {
                (6.0 / fan_in as f64).sqrt()
            };
            for _ in 0..fan_in * fan_out {
                params.push(rng.gen_range(-bound..bound));
            }
            for _ in 0..fan_out {
                params.push(0.0);
            }
        }
        Self {
            dims: dims.to_vec(),
            output_activation,
            params,
        }
    }

    pub fn param_count_for(dims: &[usize]) -> usize {
        dims.windows(2).map(|p| p[0] * p[1] + p[1]).sum()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output_activation
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Restores a network from its serialized parts.
    pub fn from_parts(
        dims: Vec<usize>,
        output_activation: OutputActivation,
        params: Vec<f64>,
    ) -> Result<Self, String> {
        let expected = Self::param_count_for(&dims);
        if params.len() != expected {
            return Err(format!(
                "parameter count {} does not match dims {:?} (expected {})",
                params.len(),
                dims,
                expected
            ));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err("non-finite parameter".into());
        }
        Ok(Self {
            dims,
            output_activation,
            params,
        })
    }

    /// Polyak update: self <- tau * source + (1 - tau) * self.
    pub fn soft_update_from(&mut self, source: &Mlp, tau: f64) -> Result<(), String> {
        if self.dims != source.dims {
            return Err(format!(
                "shape mismatch: {:?} vs {:?}",
                self.dims, source.dims
            ));
        }
        for (t, s) in self.params.iter_mut().zip(&source.params) {
            *t = tau * s + (1.0 - tau) * *t;
        }
        Ok(())
    }

    fn layer_offsets(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        // (param offset, fan_in, fan_out) per layer
        let mut offset = 0;
        self.dims.windows(2).map(move |pair| {
            let out = (offset, pair[0], pair[1]);
            offset += pair[0] * pair[1] + pair[1];
            out
        })
    }

    /// Forward pass for one sample, recording everything needed by
    /// [`Mlp::backward`].
    pub fn forward(&self, input: &[f64], cache: &mut ForwardCache) {
        assert_eq!(input.len(), self.input_dim(), "input dimension mismatch");
        cache.input.clear();
        cache.input.extend_from_slice(input);
        let n_layers = self.dims.len() - 1;
        cache.pre.resize(n_layers, Vec::new());
        cache.post.resize(n_layers, Vec::new());

        for (l, (offset, fan_in, fan_out)) in self.layer_offsets().enumerate() {
            let (w, b) = self.layer_slices(offset, fan_in, fan_out);
            let (done, rest) = cache.post.split_at_mut(l);
            let x: &[f64] = if l == 0 { &cache.input } else { &done[l - 1] };
            let pre = &mut cache.pre[l];
            pre.resize(fan_out, 0.0);
            for o in 0..fan_out {
                let row = &w[o * fan_in..(o + 1) * fan_in];
                let mut acc = b[o];
                for (wi, xi) in row.iter().zip(x) {
                    acc += wi * xi;
                }
                pre[o] = acc;
            }
            let post = &mut rest[0];
            post.resize(fan_out, 0.0);
            let is_last = l == n_layers - 1;
            for o in 0..fan_out {
                post[o] = if is_last {
                    match self.output_activation {
                        OutputActivation::Linear => pre[o],
                        OutputActivation::Tanh => pre[o].tanh(),
                    }
                } else {
                    pre[o].max(0.0)
                };
            }
        }
    }

    /// Convenience forward that returns a fresh output vector.
    pub fn infer(&self, input: &[f64]) -> Vec<f64> {
        let mut cache = ForwardCache::default();
        self.forward(input, &mut cache);
        cache.output().to_vec()
    }

    /// Backpropagates `dout` (gradient of the loss w.r.t. the post-activation
    /// output) through the cached sample.
    ///
    /// Accumulates parameter gradients into `grads` when given, and writes
    /// the gradient w.r.t. the network input into `dinput` when given.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        dout: &[f64],
        mut grads: Option<&mut MlpGrads>,
        dinput: Option<&mut Vec<f64>>,
    ) {
        let n_layers = self.dims.len() - 1;
        assert_eq!(dout.len(), self.output_dim(), "output dimension mismatch");

        let offsets: Vec<(usize, usize, usize)> = self.layer_offsets().collect();
        let mut delta: Vec<f64> = dout.to_vec();
        // Output activation derivative.
        {
            let last = n_layers - 1;
            match self.output_activation {
                OutputActivation::Linear => {}
                OutputActivation::Tanh => {
                    for (d, y) in delta.iter_mut().zip(&cache.post[last]) {
                        *d *= 1.0 - y * y;
                    }
                }
            }
        }

        let mut lower_delta = Vec::new();
        for l in (0..n_layers).rev() {
            let (offset, fan_in, fan_out) = offsets[l];
            let prev: &[f64] = if l == 0 { &cache.input } else { &cache.post[l - 1] };
            let (w, _) = self.layer_slices(offset, fan_in, fan_out);

            if let Some(g) = grads.as_deref_mut() {
                let (gw, gb) = Self::layer_slices_mut(&mut g.values, offset, fan_in, fan_out);
                for o in 0..fan_out {
                    let d = delta[o];
                    if d != 0.0 {
                        let row = &mut gw[o * fan_in..(o + 1) * fan_in];
                        for (gwi, pi) in row.iter_mut().zip(prev) {
                            *gwi += d * pi;
                        }
                    }
                    gb[o] += d;
                }
            }

            let need_lower = l > 0 || dinput.is_some();
            if need_lower {
                lower_delta.clear();
                lower_delta.resize(fan_in, 0.0);
                for o in 0..fan_out {
                    let d = delta[o];
                    if d != 0.0 {
                        let row = &w[o * fan_in..(o + 1) * fan_in];
                        for (ld, wi) in lower_delta.iter_mut().zip(row) {
                            *ld += wi * d;
                        }
                    }
                }
                if l > 0 {
                    // ReLU derivative of the layer below.
                    for (ld, z) in lower_delta.iter_mut().zip(&cache.pre[l - 1]) {
                        if *z <= 0.0 {
                            *ld = 0.0;
                        }
                    }
                }
                std::mem::swap(&mut delta, &mut lower_delta);
            }
        }

        if let Some(di) = dinput {
            di.clear();
            di.extend_from_slice(&delta);
        }
    }

    fn layer_slices(&self, offset: usize, fan_in: usize, fan_out: usize) -> (&[f64], &[f64]) {
        let w_end = offset + fan_in * fan_out;
        (&self.params[offset..w_end], &self.params[w_end..w_end + fan_out])
    }

    fn layer_slices_mut(
        values: &mut [f64],
        offset: usize,
        fan_in: usize,
        fan_out: usize,
    ) -> (&mut [f64], &mut [f64]) {
        let (w, rest) = values[offset..].split_at_mut(fan_in * fan_out);
        (w, &mut rest[..fan_out])
    }
}

/// Adaptive moment estimation over a flat parameter vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    t: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(lr: f64, param_count: usize) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            t: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let b1t = 1.0 - self.beta1.powi(self.t as i32);
        let b2t = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / b1t;
            let v_hat = self.v[i] / b2t;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
    }
}
