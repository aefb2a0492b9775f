//! Fixed-topology feed-forward networks evaluated from a flat parameter
//! vector. Inference only.
//!
//! # Parameter layout
//!
//! Parameters are laid out layer by layer, in declaration order. Within a
//! layer the weights come first, then the biases:
//!
//! * `dense`: weights row-major as `[out][in]`, then `out` biases.
//! * `conv2d`: weights as `[out_ch][in_ch][ky][kx]`, then `out_ch` biases.
//! * `prelu`: `num_slopes` slopes.
//! * `maxpool2d`: nothing.
//!
//! Convolutions use no padding. A dense layer that follows an image-shaped
//! activation flattens it in `[channel][row][col]` order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecmath::{xavier_normal_fill, ParameterVector, RngHandle};

/// Initial value of every PReLU slope.
pub const PRELU_INIT_SLOPE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LayerSpec {
    Dense {
        in_features: usize,
        out_features: usize,
    },
    Conv2d {
        in_channels: usize,
        out_channels: usize,
        kernel_size: usize,
        stride: usize,
    },
    Maxpool2d {
        window: usize,
        stride: usize,
    },
    Prelu {
        num_slopes: usize,
    },
}

impl LayerSpec {
    pub fn dense(in_features: usize, out_features: usize) -> Self {
        LayerSpec::Dense {
            in_features,
            out_features,
        }
    }

    pub fn conv2d(in_channels: usize, out_channels: usize, kernel_size: usize, stride: usize) -> Self {
        LayerSpec::Conv2d {
            in_channels,
            out_channels,
            kernel_size,
            stride,
        }
    }

    pub fn maxpool2d(window: usize, stride: usize) -> Self {
        LayerSpec::Maxpool2d { window, stride }
    }

    pub fn prelu(num_slopes: usize) -> Self {
        LayerSpec::Prelu { num_slopes }
    }

    fn sizes(&self) -> Vec<usize> {
        match *self {
            LayerSpec::Dense {
                in_features,
                out_features,
            } => vec![in_features, out_features],
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel_size,
                stride,
            } => vec![in_channels, out_channels, kernel_size, stride],
            LayerSpec::Maxpool2d { window, stride } => vec![window, stride],
            LayerSpec::Prelu { num_slopes } => vec![num_slopes],
        }
    }

    /// (weight count, bias count)
    fn param_counts(&self) -> (usize, usize) {
        match *self {
            LayerSpec::Dense {
                in_features,
                out_features,
            } => (in_features * out_features, out_features),
            LayerSpec::Conv2d {
                in_channels,
                out_channels,
                kernel_size,
                ..
            } => (out_channels * in_channels * kernel_size * kernel_size, out_channels),
            LayerSpec::Maxpool2d { .. } => (0, 0),
            LayerSpec::Prelu { num_slopes } => (num_slopes, 0),
        }
    }
}

/// Declarative network description. `input_shape` is either `[len]` or
/// `[channels, height, width]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_shape: Vec<usize>,
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    /// `inputs → hidden → PReLU → outputs`.
    pub fn mlp(inputs: usize, hidden: usize, outputs: usize) -> Self {
        NetworkSpec {
            input_shape: vec![inputs],
            layers: vec![
                LayerSpec::dense(inputs, hidden),
                LayerSpec::prelu(1),
                LayerSpec::dense(hidden, outputs),
            ],
        }
    }

    /// The 2-input, 2-output network with one hidden layer of 128 units used
    /// for the global-optimization benchmarks.
    pub fn task1() -> Self {
        Self::mlp(2, 128, 2)
    }

    /// MNIST CNN: four 3×3 stride-1 convolutions of 32, 64, 128 and 128
    /// channels with a 2×2 stride-2 max-pool after the second, then a
    /// 512-unit fully connected layer and a 10-way classifier. PReLU after
    /// every conv and hidden dense layer.
    pub fn mnist_cnn() -> Self {
        NetworkSpec {
            input_shape: vec![1, 28, 28],
            layers: vec![
                LayerSpec::conv2d(1, 32, 3, 1),
                LayerSpec::prelu(1),
                LayerSpec::conv2d(32, 64, 3, 1),
                LayerSpec::prelu(1),
                LayerSpec::maxpool2d(2, 2),
                LayerSpec::conv2d(64, 128, 3, 1),
                LayerSpec::prelu(1),
                LayerSpec::conv2d(128, 128, 3, 1),
                LayerSpec::prelu(1),
                LayerSpec::dense(128 * 8 * 8, 512),
                LayerSpec::prelu(1),
                LayerSpec::dense(512, 10),
            ],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network spec serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Flat(usize),
    Image { c: usize, h: usize, w: usize },
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Flat(n) => n,
            Shape::Image { c, h, w } => c * h * w,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
struct BuiltLayer {
    spec: LayerSpec,
    offset: usize,
    input: Shape,
    output: Shape,
}

/// Weights and biases of one layer, in the flat layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerWeights {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Inference-ready network. Immutable after [`Network::build`].
#[derive(Debug, Clone)]
pub struct Network {
    spec: NetworkSpec,
    input: Shape,
    layers: Vec<BuiltLayer>,
    param_count: usize,
}

fn build_err(layer: usize, reason: impl Into<String>) -> Error {
    Error::Build {
        layer,
        reason: reason.into(),
    }
}

fn pooled_dim(size: usize, window: usize, stride: usize) -> usize {
    (size - window) / stride + 1
}

impl Network {
    pub fn build(spec: &NetworkSpec) -> Result<Network> {
        let input = match spec.input_shape[..] {
            [n] if n > 0 => Shape::Flat(n),
            [c, h, w] if c > 0 && h > 0 && w > 0 => Shape::Image { c, h, w },
            _ => {
                return Err(Error::Config(format!(
                    "input_shape must be [len] or [channels, height, width] with positive sizes, got {:?}",
                    spec.input_shape
                )))
            }
        };
        if spec.layers.is_empty() {
            return Err(Error::Config("network has no layers".into()));
        }

        let mut layers = Vec::with_capacity(spec.layers.len());
        let mut shape = input;
        let mut offset = 0;
        for (idx, layer) in spec.layers.iter().enumerate() {
            if layer.sizes().contains(&0) {
                return Err(build_err(idx, "all layer sizes must be at least 1"));
            }
            let output = match *layer {
                LayerSpec::Dense {
                    in_features,
                    out_features,
                } => {
                    if shape.len() != in_features {
                        return Err(build_err(
                            idx,
                            format!("dense expects {in_features} inputs, previous layer produces {}", shape.len()),
                        ));
                    }
                    Shape::Flat(out_features)
                }
                LayerSpec::Conv2d {
                    in_channels,
                    out_channels,
                    kernel_size,
                    stride,
                } => {
                    let Shape::Image { c, h, w } = shape else {
                        return Err(build_err(idx, "conv2d needs an image-shaped input"));
                    };
                    if c != in_channels {
                        return Err(build_err(idx, format!("conv2d expects {in_channels} channels, got {c}")));
                    }
                    if h < kernel_size || w < kernel_size {
                        return Err(build_err(idx, format!("kernel {kernel_size} larger than {h}x{w} input")));
                    }
                    Shape::Image {
                        c: out_channels,
                        h: pooled_dim(h, kernel_size, stride),
                        w: pooled_dim(w, kernel_size, stride),
                    }
                }
                LayerSpec::Maxpool2d { window, stride } => {
                    let Shape::Image { c, h, w } = shape else {
                        return Err(build_err(idx, "maxpool2d needs an image-shaped input"));
                    };
                    if h < window || w < window {
                        return Err(build_err(idx, format!("window {window} larger than {h}x{w} input")));
                    }
                    Shape::Image {
                        c,
                        h: pooled_dim(h, window, stride),
                        w: pooled_dim(w, window, stride),
                    }
                }
                LayerSpec::Prelu { num_slopes } => {
                    let per_unit = match shape {
                        Shape::Flat(n) => n,
                        Shape::Image { c, .. } => c,
                    };
                    if num_slopes != 1 && num_slopes != per_unit {
                        return Err(build_err(
                            idx,
                            format!("prelu needs 1 or {per_unit} slopes, got {num_slopes}"),
                        ));
                    }
                    shape
                }
            };
            let (nw, nb) = layer.param_counts();
            layers.push(BuiltLayer {
                spec: *layer,
                offset,
                input: shape,
                output,
            });
            offset += nw + nb;
            shape = output;
        }

        Ok(Network {
            spec: spec.clone(),
            input,
            layers,
            param_count: offset,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn parameter_count(&self) -> usize {
        self.param_count
    }

    pub fn input_len(&self) -> usize {
        self.input.len()
    }

    pub fn output_len(&self) -> usize {
        self.layers.last().map(|l| l.output.len()).unwrap_or(0)
    }

    /// Xavier-normal weights and biases per layer (fans taken from the layer
    /// geometry), PReLU slopes at [`PRELU_INIT_SLOPE`].
    pub fn init_params(&self, rng: RngHandle) -> ParameterVector {
        let mut rng = rng.rng();
        let mut out = vec![0.0; self.param_count];
        for layer in &self.layers {
            let (nw, nb) = layer.spec.param_counts();
            let block = &mut out[layer.offset..layer.offset + nw + nb];
            let fans = match layer.spec {
                LayerSpec::Dense {
                    in_features,
                    out_features,
                } => Some((in_features, out_features)),
                LayerSpec::Conv2d {
                    in_channels,
                    out_channels,
                    kernel_size,
                    ..
                } => {
                    let area = kernel_size * kernel_size;
                    Some((in_channels * area, out_channels * area))
                }
                LayerSpec::Prelu { .. } => {
                    block.fill(PRELU_INIT_SLOPE);
                    None
                }
                LayerSpec::Maxpool2d { .. } => None,
            };
            if let Some((fan_in, fan_out)) = fans {
                xavier_normal_fill(fan_in, fan_out, block, &mut rng).expect("layer sizes validated at build");
            }
        }
        ParameterVector::new(out)
    }

    /// Split a flat vector into per-layer weights/biases. Pooling layers
    /// yield empty entries.
    pub fn unflatten(&self, params: &[f64]) -> Result<Vec<LayerWeights>> {
        self.check_params(params)?;
        Ok(self
            .layers
            .iter()
            .map(|l| {
                let (nw, nb) = l.spec.param_counts();
                LayerWeights {
                    weights: params[l.offset..l.offset + nw].to_vec(),
                    biases: params[l.offset + nw..l.offset + nw + nb].to_vec(),
                }
            })
            .collect())
    }

    pub fn flatten(&self, layers: &[LayerWeights]) -> Result<ParameterVector> {
        if layers.len() != self.layers.len() {
            return Err(Error::Dimension {
                expected: self.layers.len(),
                found: layers.len(),
            });
        }
        let mut out = Vec::with_capacity(self.param_count);
        for (built, lw) in self.layers.iter().zip(layers) {
            let (nw, nb) = built.spec.param_counts();
            if lw.weights.len() != nw || lw.biases.len() != nb {
                return Err(Error::Dimension {
                    expected: nw + nb,
                    found: lw.weights.len() + lw.biases.len(),
                });
            }
            out.extend_from_slice(&lw.weights);
            out.extend_from_slice(&lw.biases);
        }
        Ok(ParameterVector::new(out))
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count {
            return Err(Error::Dimension {
                expected: self.param_count,
                found: params.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, params: &[f64], input: &[f64]) -> Result<Vec<f64>> {
        let mut scratch = Scratch::default();
        self.forward_with(params, input, &mut scratch)?;
        Ok(std::mem::take(&mut scratch.a))
    }

    /// Forward pass over a batch, reusing one set of buffers.
    pub fn forward_batch<I: AsRef<[f64]>>(&self, params: &[f64], inputs: &[I]) -> Result<Vec<Vec<f64>>> {
        self.check_params(params)?;
        let mut scratch = Scratch::default();
        inputs
            .iter()
            .map(|x| self.forward_with(params, x.as_ref(), &mut scratch).map(<[f64]>::to_vec))
            .collect()
    }

    fn forward_with<'s>(&self, params: &[f64], input: &[f64], scratch: &'s mut Scratch) -> Result<&'s [f64]> {
        self.check_params(params)?;
        if input.len() != self.input.len() {
            return Err(Error::Dimension {
                expected: self.input.len(),
                found: input.len(),
            });
        }
        let Scratch { a, b } = scratch;
        a.clear();
        a.extend_from_slice(input);
        for layer in &self.layers {
            let (nw, nb) = layer.spec.param_counts();
            let weights = &params[layer.offset..layer.offset + nw];
            let biases = &params[layer.offset + nw..layer.offset + nw + nb];
            b.clear();
            b.resize(layer.output.len(), 0.0);
            match layer.spec {
                LayerSpec::Dense { in_features, .. } => dense_forward(weights, biases, in_features, a, b),
                LayerSpec::Conv2d {
                    kernel_size, stride, ..
                } => conv2d_forward(weights, biases, layer.input, layer.output, kernel_size, stride, a, b),
                LayerSpec::Maxpool2d { window, stride } => {
                    maxpool2d_forward(layer.input, layer.output, window, stride, a, b)
                }
                LayerSpec::Prelu { .. } => prelu_forward(weights, layer.input, a, b),
            }
            std::mem::swap(a, b);
        }
        Ok(a.as_slice())
    }
}

#[derive(Default)]
struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

fn dense_forward(weights: &[f64], biases: &[f64], in_features: usize, x: &[f64], out: &mut [f64]) {
    for ((o, row), bias) in out.iter_mut().zip(weights.chunks_exact(in_features)).zip(biases) {
        *o = bias + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
    }
}

#[allow(clippy::too_many_arguments)]
fn conv2d_forward(
    weights: &[f64],
    biases: &[f64],
    input: Shape,
    output: Shape,
    k: usize,
    stride: usize,
    x: &[f64],
    out: &mut [f64],
) {
    let (Shape::Image { c: ic, h, w }, Shape::Image { c: oc, h: oh, w: ow }) = (input, output) else {
        unreachable!("conv shapes validated at build");
    };
    for o in 0..oc {
        let plane = &mut out[o * oh * ow..(o + 1) * oh * ow];
        plane.fill(biases[o]);
        for i in 0..ic {
            let kernel = &weights[(o * ic + i) * k * k..(o * ic + i + 1) * k * k];
            let src = &x[i * h * w..(i + 1) * h * w];
            for ky in 0..k {
                for kx in 0..k {
                    let wv = kernel[ky * k + kx];
                    for oy in 0..oh {
                        let row = &src[(oy * stride + ky) * w..];
                        let dst = &mut plane[oy * ow..(oy + 1) * ow];
                        for (ox, d) in dst.iter_mut().enumerate() {
                            *d += wv * row[ox * stride + kx];
                        }
                    }
                }
            }
        }
    }
}

fn maxpool2d_forward(input: Shape, output: Shape, window: usize, stride: usize, x: &[f64], out: &mut [f64]) {
    let (Shape::Image { c, h, w }, Shape::Image { h: oh, w: ow, .. }) = (input, output) else {
        unreachable!("pool shapes validated at build");
    };
    for ch in 0..c {
        let src = &x[ch * h * w..(ch + 1) * h * w];
        for oy in 0..oh {
            for ox in 0..ow {
                let mut m = f64::NEG_INFINITY;
                for wy in 0..window {
                    for wx in 0..window {
                        m = m.max(src[(oy * stride + wy) * w + ox * stride + wx]);
                    }
                }
                out[(ch * oh + oy) * ow + ox] = m;
            }
        }
    }
}

fn prelu_forward(slopes: &[f64], shape: Shape, x: &[f64], out: &mut [f64]) {
    let unit = match shape {
        Shape::Image { h, w, .. } if slopes.len() > 1 => h * w,
        _ => 1,
    };
    for (i, (o, &v)) in out.iter_mut().zip(x).enumerate() {
        let slope = if slopes.len() == 1 { slopes[0] } else { slopes[i / unit] };
        *o = prelu_apply(v, slope);
    }
}

pub fn prelu_apply(x: f64, slope: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        slope * x
    }
}

/// Mean softmax cross-entropy over a batch of raw logits.
pub fn cross_entropy<L: AsRef<[f64]>>(logits: &[L], labels: &[usize]) -> Result<f64> {
    if logits.is_empty() {
        return Err(Error::arg("cross_entropy over an empty batch"));
    }
    if logits.len() != labels.len() {
        return Err(Error::Dimension {
            expected: logits.len(),
            found: labels.len(),
        });
    }
    let mut total = 0.0;
    for (row, &label) in logits.iter().zip(labels) {
        let row = row.as_ref();
        if label >= row.len() {
            return Err(Error::arg(format!("label {label} out of range for {} classes", row.len())));
        }
        total += log_sum_exp(row) - row[label];
    }
    Ok(total / logits.len() as f64)
}

fn log_sum_exp(row: &[f64]) -> f64 {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + row.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Index of the largest logit; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Fraction of rows whose argmax equals the label.
pub fn accuracy<L: AsRef<[f64]>>(logits: &[L], labels: &[usize]) -> Result<f64> {
    if logits.is_empty() {
        return Err(Error::arg("accuracy over an empty batch"));
    }
    if logits.len() != labels.len() {
        return Err(Error::Dimension {
            expected: logits.len(),
            found: labels.len(),
        });
    }
    let correct = logits
        .iter()
        .zip(labels)
        .filter(|(row, &label)| argmax(row.as_ref()) == label)
        .count();
    Ok(correct as f64 / logits.len() as f64)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use rand::Rng;

    use super::*;

    #[test]
    fn task1_parameter_count() {
        let net = Network::build(&NetworkSpec::task1()).unwrap();
        assert_eq!(net.parameter_count(), 2 * 128 + 128 + 1 + 128 * 2 + 2);
        assert_eq!(net.parameter_count(), 643);
        assert_eq!(Network::build(&NetworkSpec::task1()).unwrap().parameter_count(), 643);
    }

    #[test]
    fn mnist_cnn_parameter_count_near_published_size() {
        let net = Network::build(&NetworkSpec::mnist_cnn()).unwrap();
        let n = net.parameter_count() as f64;
        assert_eq!(net.parameter_count(), 4_440_207);
        assert!((n - 4.7e6).abs() / 4.7e6 <= 0.10, "{n}");
        assert_eq!(net.output_len(), 10);
    }

    #[test]
    fn single_dense_identity_and_sum() {
        let spec = NetworkSpec {
            input_shape: vec![1],
            layers: vec![LayerSpec::dense(1, 1)],
        };
        let net = Network::build(&spec).unwrap();
        assert_eq!(net.parameter_count(), 2);
        assert_eq!(net.forward(&[1.0, 0.0], &[3.5]).unwrap(), vec![3.5]);

        let spec = NetworkSpec {
            input_shape: vec![2],
            layers: vec![LayerSpec::dense(2, 1)],
        };
        let net = Network::build(&spec).unwrap();
        assert_eq!(net.forward(&[1.0, 1.0, 0.0], &[2.0, 3.0]).unwrap(), vec![5.0]);
    }

    #[test]
    fn conv_window_sums() {
        let spec = NetworkSpec {
            input_shape: vec![1, 3, 3],
            layers: vec![LayerSpec::conv2d(1, 1, 2, 1)],
        };
        let net = Network::build(&spec).unwrap();
        let input: Vec<f64> = (1..=9).map(f64::from).collect();
        let out = net.forward(&[1.0, 1.0, 1.0, 1.0, 0.0], &input).unwrap();
        assert_eq!(out, vec![1.0 + 2.0 + 4.0 + 5.0, 2.0 + 3.0 + 5.0 + 6.0, 4.0 + 5.0 + 7.0 + 8.0, 5.0 + 6.0 + 8.0 + 9.0]);
    }

    #[test]
    fn maxpool_picks_window_max() {
        let spec = NetworkSpec {
            input_shape: vec![1, 4, 4],
            layers: vec![LayerSpec::maxpool2d(2, 2)],
        };
        let net = Network::build(&spec).unwrap();
        let input: Vec<f64> = (0..16).map(f64::from).collect();
        assert_eq!(net.forward(&[], &input).unwrap(), vec![5.0, 7.0, 13.0, 15.0]);
    }

    #[test]
    fn build_reports_offending_layer() {
        let spec = NetworkSpec {
            input_shape: vec![2],
            layers: vec![LayerSpec::dense(2, 4), LayerSpec::dense(5, 1)],
        };
        match Network::build(&spec) {
            Err(Error::Build { layer, .. }) => assert_eq!(layer, 1),
            other => panic!("unexpected {other:?}"),
        }
        let spec = NetworkSpec {
            input_shape: vec![4],
            layers: vec![LayerSpec::conv2d(1, 1, 2, 1)],
        };
        assert!(matches!(Network::build(&spec), Err(Error::Build { layer: 0, .. })));
        let spec = NetworkSpec {
            input_shape: vec![2],
            layers: vec![LayerSpec::dense(2, 0)],
        };
        assert!(matches!(Network::build(&spec), Err(Error::Build { layer: 0, .. })));
    }

    #[test]
    fn forward_rejects_bad_lengths() {
        let net = Network::build(&NetworkSpec::task1()).unwrap();
        let p = vec![0.0; 643];
        assert!(matches!(net.forward(&p[..642], &[0.0, 0.0]), Err(Error::Dimension { .. })));
        assert!(matches!(net.forward(&p, &[0.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn prelu_examples() {
        assert_eq!(prelu_apply(2.0, 0.1), 2.0);
        assert_relative_eq!(prelu_apply(-2.0, 0.1), -0.2);
        assert_eq!(prelu_apply(0.0, 0.5), 0.0);
    }

    #[test]
    fn prelu_slope_is_a_parameter() {
        let spec = NetworkSpec {
            input_shape: vec![1],
            layers: vec![LayerSpec::dense(1, 1), LayerSpec::prelu(1)],
        };
        let net = Network::build(&spec).unwrap();
        assert_eq!(net.forward(&[1.0, 0.0, 0.3], &[-2.0]).unwrap(), vec![-0.6]);
    }

    #[test]
    fn cross_entropy_examples() {
        assert_relative_eq!(cross_entropy(&[[0.0, 0.0]], &[0]).unwrap(), std::f64::consts::LN_2, epsilon = 1e-12);
        let near_zero = cross_entropy(&[[1000.0, 0.0]], &[0]).unwrap();
        assert!(near_zero.is_finite() && near_zero.abs() < 1e-12);
        let big = cross_entropy(&[[0.0, 1000.0]], &[0]).unwrap();
        assert_relative_eq!(big, 1000.0, max_relative = 1e-12);
        assert!(cross_entropy::<[f64; 2]>(&[], &[]).is_err());
    }

    #[test]
    fn accuracy_examples() {
        let right = [[1.0, 0.0]; 10];
        assert_eq!(accuracy(&right, &[0; 10]).unwrap(), 1.0);
        assert_eq!(accuracy(&right, &[1; 10]).unwrap(), 0.0);
        let mut labels = [0; 10];
        labels[3] = 1;
        assert_relative_eq!(accuracy(&right, &labels).unwrap(), 0.9);
        // ties resolve to the lowest class index
        assert_eq!(accuracy(&[[0.5, 0.5]], &[0]).unwrap(), 1.0);
    }

    #[test]
    fn flatten_round_trip_preserves_outputs() {
        let spec = NetworkSpec {
            input_shape: vec![2, 5, 5],
            layers: vec![
                LayerSpec::conv2d(2, 3, 2, 1),
                LayerSpec::prelu(3),
                LayerSpec::maxpool2d(2, 2),
                LayerSpec::dense(12, 4),
            ],
        };
        let net = Network::build(&spec).unwrap();
        let params = net.init_params(RngHandle::new(5, 0));
        let layers = net.unflatten(&params).unwrap();
        let again = net.flatten(&layers).unwrap();
        assert_eq!(again, params);
        let mut rng = RngHandle::new(5, 1).rng();
        for _ in 0..5 {
            let x: Vec<f64> = (0..50).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert_eq!(net.forward(&params, &x).unwrap(), net.forward(&again, &x).unwrap());
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = NetworkSpec::mnist_cnn();
        let back = NetworkSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, back);
        let text = r#"{"input_shape":[2],"layers":[{"kind":"dense","in_features":2,"out_features":3},{"kind":"prelu","num_slopes":1}]}"#;
        let parsed = NetworkSpec::from_json(text).unwrap();
        assert_eq!(parsed.layers[1], LayerSpec::prelu(1));
    }
}
