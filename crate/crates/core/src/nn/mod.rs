//! Fully-convolutional first-stage decoder.
//!
//! Every layer is a same-shape 2-D convolution with zero padding. The FP32
//! form uses rectifier hidden layers and a sigmoid output. The binarised form
//! works on {0,1} activations and weights: each output is
//! `popcount(XNOR(patch, kernel)) >= threshold`, padding contributing input 0.

mod conv;
pub mod reference;
mod weights;
mod window;

pub use conv::{conv_forward_binary, conv_forward_fp32, BitPlanes, Planes};
pub use weights::{load_weights, read_weights, save_weights, write_weights, WeightError};
pub use window::{build_window, threshold_outputs, InferredErrors, NetOutput, WindowInput};

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetKind {
    Fp32,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Sigmoid,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConvLayerSpec {
    pub in_ch: usize,
    pub out_ch: usize,
    pub kh: usize,
    pub kw: usize,
}

impl ConvLayerSpec {
    pub fn new(in_ch: usize, out_ch: usize, kh: usize, kw: usize) -> Self {
        Self {
            in_ch,
            out_ch,
            kh,
            kw,
        }
    }

    pub fn fan_in(&self) -> usize {
        self.in_ch * self.kh * self.kw
    }

    pub fn weight_count(&self) -> usize {
        self.out_ch * self.fan_in()
    }

    /// Multiplications per output pixel.
    pub fn mults_per_pixel(&self) -> usize {
        self.kh * self.kw * self.in_ch * self.out_ch
    }
}

/// Layer structure of the base model: `7x7 (2K+2 -> 16)`, `5x5 (16 -> 16)`, `5x5 (16 -> 4)`.
pub fn base_model_specs(k: usize) -> Vec<ConvLayerSpec> {
    vec![
        ConvLayerSpec::new(2 * k + 2, 16, 7, 7),
        ConvLayerSpec::new(16, 16, 5, 5),
        ConvLayerSpec::new(16, 4, 5, 5),
    ]
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("kernel {kh}x{kw} must have odd sides")]
    EvenKernel { kh: usize, kw: usize },
    #[error("layer {layer}: expected {expected} input channels, got {found}")]
    ChannelMismatch {
        layer: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} parameters, got {found}")]
    ParamCount { expected: usize, found: usize },
    #[error("binary layer needs {expected} thresholds, got {found}")]
    MissingThresholds { expected: usize, found: usize },
    #[error("layer kind does not match a {0:?} network")]
    KindMismatch(NetKind),
    #[error("input is {found:?}, network expects {expected:?}")]
    ShapeMismatch {
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },
    #[error("window start layer {t} out of range (volume has {layers} layers)")]
    WindowOutOfRange { t: usize, layers: usize },
    #[error("a decoder needs {expected_in} input and 4 output channels, network has {found_in} and {found_out}")]
    NotADecoder {
        expected_in: usize,
        found_in: usize,
        found_out: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerParams {
    Fp32 {
        /// Row-major `(out, in, y, x)`.
        weights: Vec<f32>,
        bias: Vec<f32>,
    },
    Binary {
        /// Row-major `(out, in, y, x)`.
        weights: Vec<bool>,
        thresholds: Vec<i32>,
        /// Each output kernel packed into `words` little-end-first u64s in `(in, y, x)` order.
        packed: Vec<u64>,
        words: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    spec: ConvLayerSpec,
    params: LayerParams,
}

fn check_kernel(spec: &ConvLayerSpec) -> Result<(), NnError> {
    if spec.kh % 2 == 0 || spec.kw % 2 == 0 {
        return Err(NnError::EvenKernel {
            kh: spec.kh,
            kw: spec.kw,
        });
    }
    Ok(())
}

pub(crate) fn pack_bits(bits: &[bool]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

impl ConvLayer {
    pub fn fp32(spec: ConvLayerSpec, weights: Vec<f32>, bias: Vec<f32>) -> Result<Self, NnError> {
        check_kernel(&spec)?;
        if weights.len() != spec.weight_count() {
            return Err(NnError::ParamCount {
                expected: spec.weight_count(),
                found: weights.len(),
            });
        }
        if bias.len() != spec.out_ch {
            return Err(NnError::ParamCount {
                expected: spec.out_ch,
                found: bias.len(),
            });
        }
        Ok(Self {
            spec,
            params: LayerParams::Fp32 { weights, bias },
        })
    }

    pub fn binary(spec: ConvLayerSpec, weights: Vec<bool>, thresholds: Vec<i32>) -> Result<Self, NnError> {
        check_kernel(&spec)?;
        if weights.len() != spec.weight_count() {
            return Err(NnError::ParamCount {
                expected: spec.weight_count(),
                found: weights.len(),
            });
        }
        if thresholds.len() != spec.out_ch {
            return Err(NnError::MissingThresholds {
                expected: spec.out_ch,
                found: thresholds.len(),
            });
        }
        let fan = spec.fan_in();
        let words = fan.div_ceil(64);
        let mut packed = Vec::with_capacity(words * spec.out_ch);
        for o in 0..spec.out_ch {
            packed.extend(pack_bits(&weights[o * fan..(o + 1) * fan]));
        }
        Ok(Self {
            spec,
            params: LayerParams::Binary {
                weights,
                thresholds,
                packed,
                words,
            },
        })
    }

    pub fn spec(&self) -> &ConvLayerSpec {
        &self.spec
    }

    pub fn params(&self) -> &LayerParams {
        &self.params
    }

    pub fn kind(&self) -> NetKind {
        match self.params {
            LayerParams::Fp32 { .. } => NetKind::Fp32,
            LayerParams::Binary { .. } => NetKind::Binary,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvNet {
    kind: NetKind,
    k: usize,
    layers: Vec<ConvLayer>,
}

impl ConvNet {
    /// Checks odd kernels, a consistent kind and layer-to-layer channel
    /// compatibility. Decoder-specific channel counts are checked by
    /// [`ConvNet::check_decoder`].
    pub fn new(kind: NetKind, k: usize, layers: Vec<ConvLayer>) -> Result<Self, NnError> {
        for (i, layer) in layers.iter().enumerate() {
            if layer.kind() != kind {
                return Err(NnError::KindMismatch(kind));
            }
            if i > 0 && layers[i - 1].spec.out_ch != layer.spec.in_ch {
                return Err(NnError::ChannelMismatch {
                    layer: i,
                    expected: layers[i - 1].spec.out_ch,
                    found: layer.spec.in_ch,
                });
            }
        }
        Ok(Self { kind, k, layers })
    }

    /// Random parameters. FP32 weights are uniform in `±1/sqrt(fan_in)`;
    /// binary thresholds are uniform in `[0, fan_in]`.
    pub fn random<R: Rng>(kind: NetKind, k: usize, specs: &[ConvLayerSpec], rng: &mut R) -> Self {
        let layers = specs
            .iter()
            .map(|&s| match kind {
                NetKind::Fp32 => {
                    let scale = 1.0 / (s.fan_in() as f32).sqrt();
                    let w = (0..s.weight_count()).map(|_| rng.gen_range(-scale..=scale)).collect();
                    let b = (0..s.out_ch).map(|_| rng.gen_range(-scale..=scale)).collect();
                    ConvLayer::fp32(s, w, b)
                }
                NetKind::Binary => {
                    let w = (0..s.weight_count()).map(|_| rng.gen()).collect();
                    let th = (0..s.out_ch).map(|_| rng.gen_range(0..=s.fan_in() as i32)).collect();
                    ConvLayer::binary(s, w, th)
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .expect("specs produce valid layers");
        Self::new(kind, k, layers).expect("specs chain")
    }

    pub fn kind(&self) -> NetKind {
        self.kind
    }

    /// Window depth `K`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn layers(&self) -> &[ConvLayer] {
        &self.layers
    }

    pub fn specs(&self) -> Vec<ConvLayerSpec> {
        self.layers.iter().map(|l| l.spec).collect()
    }

    pub fn in_channels(&self) -> Option<usize> {
        self.layers.first().map(|l| l.spec.in_ch)
    }

    pub fn out_channels(&self) -> Option<usize> {
        self.layers.last().map(|l| l.spec.out_ch)
    }

    pub fn activation(&self, layer: usize) -> Activation {
        match self.kind {
            NetKind::Binary => Activation::Threshold,
            NetKind::Fp32 if layer + 1 == self.layers.len() => Activation::Sigmoid,
            NetKind::Fp32 => Activation::Relu,
        }
    }

    /// A decoder takes `2K + 2` channels and emits 4.
    pub fn check_decoder(&self) -> Result<(), NnError> {
        let found_in = self.in_channels().unwrap_or(0);
        let found_out = self.out_channels().unwrap_or(0);
        if found_in != 2 * self.k + 2 || found_out != 4 {
            return Err(NnError::NotADecoder {
                expected_in: 2 * self.k + 2,
                found_in,
                found_out,
            });
        }
        Ok(())
    }

    pub fn infer(&self, input: &WindowInput) -> Result<NetOutput, NnError> {
        match self.kind {
            NetKind::Fp32 => conv_forward_fp32(self, &input.to_planes()).map(NetOutput::Probs),
            NetKind::Binary => conv_forward_binary(self, input.bits()).map(NetOutput::Bits),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;

    #[test]
    fn base_model_channel_structure() {
        let specs = base_model_specs(4);
        assert_eq!(specs[0].in_ch, 10);
        let mults: Vec<_> = specs.iter().map(|s| s.mults_per_pixel()).collect();
        assert_eq!(mults, vec![7840, 6400, 1600]);
        let net = ConvNet::random(NetKind::Binary, 4, &specs, &mut trial_rng(1, 0));
        net.check_decoder().unwrap();
    }

    #[test]
    fn rejects_broken_chains_and_kernels() {
        let a = ConvLayer::fp32(ConvLayerSpec::new(2, 3, 1, 1), vec![0.0; 6], vec![0.0; 3]).unwrap();
        let b = ConvLayer::fp32(ConvLayerSpec::new(4, 1, 1, 1), vec![0.0; 4], vec![0.0; 1]).unwrap();
        assert_eq!(
            ConvNet::new(NetKind::Fp32, 0, vec![a.clone(), b]),
            Err(NnError::ChannelMismatch {
                layer: 1,
                expected: 3,
                found: 4
            })
        );
        assert!(matches!(
            ConvLayer::fp32(ConvLayerSpec::new(1, 1, 2, 3), vec![0.0; 6], vec![0.0]),
            Err(NnError::EvenKernel { .. })
        ));
        assert!(matches!(
            ConvLayer::binary(ConvLayerSpec::new(1, 2, 1, 1), vec![true; 2], vec![1]),
            Err(NnError::MissingThresholds { .. })
        ));
        let bin = ConvLayer::binary(ConvLayerSpec::new(3, 1, 1, 1), vec![true; 3], vec![1]).unwrap();
        assert_eq!(
            ConvNet::new(NetKind::Fp32, 0, vec![a, bin]),
            Err(NnError::KindMismatch(NetKind::Fp32))
        );
    }
}
