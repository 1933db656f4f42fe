use super::{Activation, ConvLayerSpec, ConvNet, LayerParams, NetKind, NnError};

/// Real-valued `(channel, y, x)` planes.
#[derive(Debug, Clone, PartialEq)]
pub struct Planes {
    pub ch: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f32>,
}

impl Planes {
    pub fn zeros(ch: usize, h: usize, w: usize) -> Self {
        Self {
            ch,
            h,
            w,
            data: vec![0.0; ch * h * w],
        }
    }

    pub fn get(&self, c: usize, y: usize, x: usize) -> f32 {
        self.data[(c * self.h + y) * self.w + x]
    }

    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f32) {
        self.data[(c * self.h + y) * self.w + x] = v;
    }

    pub fn plane(&self, c: usize) -> &[f32] {
        &self.data[c * self.h * self.w..(c + 1) * self.h * self.w]
    }
}

/// Boolean `(channel, y, x)` planes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitPlanes {
    pub ch: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<bool>,
}

impl BitPlanes {
    pub fn zeros(ch: usize, h: usize, w: usize) -> Self {
        Self {
            ch,
            h,
            w,
            data: vec![false; ch * h * w],
        }
    }

    pub fn get(&self, c: usize, y: usize, x: usize) -> bool {
        self.data[(c * self.h + y) * self.w + x]
    }

    pub fn set(&mut self, c: usize, y: usize, x: usize, v: bool) {
        self.data[(c * self.h + y) * self.w + x] = v;
    }

    pub fn plane(&self, c: usize) -> &[bool] {
        &self.data[c * self.h * self.w..(c + 1) * self.h * self.w]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [bool] {
        let n = self.h * self.w;
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn to_planes(&self) -> Planes {
        Planes {
            ch: self.ch,
            h: self.h,
            w: self.w,
            data: self.data.iter().map(|&b| b as u8 as f32).collect(),
        }
    }
}

fn check_input(net: &ConvNet, kind: NetKind, ch: usize, h: usize, w: usize) -> Result<(), NnError> {
    if net.kind() != kind {
        return Err(NnError::KindMismatch(net.kind()));
    }
    if let Some(in_ch) = net.in_channels() {
        if in_ch != ch {
            return Err(NnError::ShapeMismatch {
                expected: (in_ch, h, w),
                found: (ch, h, w),
            });
        }
    }
    Ok(())
}

/// Clipped index range of kernel tap `k` (offset `k - r`) that lands inside `0..n`.
fn valid_range(k: usize, r: usize, n: usize) -> (usize, usize) {
    let lo = r.saturating_sub(k);
    let hi = (n + r).saturating_sub(k).min(n);
    (lo, hi.max(lo))
}

fn fp32_layer(spec: &ConvLayerSpec, weights: &[f32], bias: &[f32], input: &Planes, act: Activation) -> Planes {
    let (h, w) = (input.h, input.w);
    let (ry, rx) = (spec.kh / 2, spec.kw / 2);
    let mut out = Planes::zeros(spec.out_ch, h, w);
    for o in 0..spec.out_ch {
        let dst = &mut out.data[o * h * w..(o + 1) * h * w];
        dst.fill(bias[o]);
        for i in 0..spec.in_ch {
            let src = input.plane(i);
            for ky in 0..spec.kh {
                let (y0, y1) = valid_range(ky, ry, h);
                for kx in 0..spec.kw {
                    let wv = weights[((o * spec.in_ch + i) * spec.kh + ky) * spec.kw + kx];
                    if wv == 0.0 {
                        continue;
                    }
                    let (x0, x1) = valid_range(kx, rx, w);
                    for y in y0..y1 {
                        let iy = y + ky - ry;
                        let srow = &src[iy * w..(iy + 1) * w];
                        let drow = &mut dst[y * w..(y + 1) * w];
                        for x in x0..x1 {
                            drow[x] += wv * srow[x + kx - rx];
                        }
                    }
                }
            }
        }
        match act {
            Activation::Relu => dst.iter_mut().for_each(|v| *v = v.max(0.0)),
            Activation::Sigmoid => dst.iter_mut().for_each(|v| *v = 1.0 / (1.0 + (-*v).exp())),
            Activation::Threshold => unreachable!(),
        }
    }
    out
}

/// FP32 forward pass. Returns the output layer's sigmoid values.
pub fn conv_forward_fp32(net: &ConvNet, input: &Planes) -> Result<Planes, NnError> {
    check_input(net, NetKind::Fp32, input.ch, input.h, input.w)?;
    let mut x = input.clone();
    for (li, layer) in net.layers().iter().enumerate() {
        let LayerParams::Fp32 { weights, bias } = layer.params() else {
            return Err(NnError::KindMismatch(NetKind::Fp32));
        };
        x = fp32_layer(layer.spec(), weights, bias, &x, net.activation(li));
    }
    Ok(x)
}

fn binary_layer(spec: &ConvLayerSpec, packed: &[u64], words: usize, thresholds: &[i32], input: &BitPlanes) -> BitPlanes {
    let (h, w) = (input.h, input.w);
    let (ry, rx) = (spec.kh as isize / 2, spec.kw as isize / 2);
    let fan = spec.fan_in();
    let tail = if fan % 64 == 0 { !0u64 } else { (1u64 << (fan % 64)) - 1 };
    let mut out = BitPlanes::zeros(spec.out_ch, h, w);
    let mut col = vec![0u64; words];
    for y in 0..h {
        for x in 0..w {
            // im2col of the receptive field; out-of-grid taps stay 0
            col.fill(0);
            let mut bit = 0usize;
            for i in 0..spec.in_ch {
                let src = input.plane(i);
                for ky in 0..spec.kh as isize {
                    let iy = y as isize + ky - ry;
                    for kx in 0..spec.kw as isize {
                        let ix = x as isize + kx - rx;
                        if iy >= 0
                            && (iy as usize) < h
                            && ix >= 0
                            && (ix as usize) < w
                            && src[iy as usize * w + ix as usize]
                        {
                            col[bit / 64] |= 1 << (bit % 64);
                        }
                        bit += 1;
                    }
                }
            }
            for o in 0..spec.out_ch {
                let kernel = &packed[o * words..(o + 1) * words];
                let mut count = 0i64;
                for j in 0..words {
                    let mut same = !(col[j] ^ kernel[j]);
                    if j + 1 == words {
                        same &= tail;
                    }
                    count += same.count_ones() as i64;
                }
                out.set(o, y, x, count >= thresholds[o] as i64);
            }
        }
    }
    out
}

/// XNOR-popcount forward pass over bit-packed kernels.
pub fn conv_forward_binary(net: &ConvNet, input: &BitPlanes) -> Result<BitPlanes, NnError> {
    check_input(net, NetKind::Binary, input.ch, input.h, input.w)?;
    let mut x = input.clone();
    for layer in net.layers() {
        let LayerParams::Binary {
            packed,
            words,
            thresholds,
            ..
        } = layer.params()
        else {
            return Err(NnError::KindMismatch(NetKind::Binary));
        };
        x = binary_layer(layer.spec(), packed, *words, thresholds, &x);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{base_model_specs, ConvLayer, ConvLayerSpec};
    use crate::rng::trial_rng;
    use rand::Rng;

    fn random_bits(ch: usize, h: usize, w: usize, rng: &mut impl Rng) -> BitPlanes {
        let mut p = BitPlanes::zeros(ch, h, w);
        p.data.iter_mut().for_each(|b| *b = rng.gen());
        p
    }

    #[test]
    fn zero_net_outputs_one_half() {
        let specs = base_model_specs(3);
        let layers = specs
            .iter()
            .map(|&s| ConvLayer::fp32(s, vec![0.0; s.weight_count()], vec![0.0; s.out_ch]).unwrap())
            .collect();
        let net = ConvNet::new(NetKind::Fp32, 3, layers).unwrap();
        let mut rng = trial_rng(3, 0);
        let out = conv_forward_fp32(&net, &random_bits(8, 5, 5, &mut rng).to_planes()).unwrap();
        assert_eq!((out.ch, out.h, out.w), (4, 5, 5));
        assert!(out.data.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn one_by_one_identity_is_sigmoid() {
        let layer = ConvLayer::fp32(ConvLayerSpec::new(1, 1, 1, 1), vec![1.0], vec![0.0]).unwrap();
        let net = ConvNet::new(NetKind::Fp32, 0, vec![layer]).unwrap();
        let mut input = Planes::zeros(1, 3, 4);
        for (i, v) in input.data.iter_mut().enumerate() {
            *v = i as f32 * 0.5 - 2.0;
        }
        let out = conv_forward_fp32(&net, &input).unwrap();
        for (o, i) in out.data.iter().zip(&input.data) {
            assert!((o - 1.0 / (1.0 + (-i).exp())).abs() < 1e-7);
        }
    }

    #[test]
    fn fp32_matches_naive_oracle() {
        let mut rng = trial_rng(11, 0);
        for case in 0..20 {
            let k = 3 + case % 3;
            let specs = [
                ConvLayerSpec::new(2 * k + 2, 6, 5, 5),
                ConvLayerSpec::new(6, 5, 3, 3),
                ConvLayerSpec::new(5, 4, 3, 1),
            ];
            let net = ConvNet::random(NetKind::Fp32, k, &specs, &mut rng);
            let side = [5, 9, 17][case % 3];
            let input = random_bits(2 * k + 2, side, side, &mut rng).to_planes();
            let fast = conv_forward_fp32(&net, &input).unwrap();
            let slow = crate::nn::reference::naive_fp32(&net, &input);
            let diff = fast.data.iter().zip(&slow.data).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
            assert!(diff < 1e-5, "max abs diff {diff}");
        }
    }

    #[test]
    fn all_ones_majority() {
        let layer = ConvLayer::binary(ConvLayerSpec::new(1, 1, 3, 3), vec![true; 9], vec![5]).unwrap();
        let net = ConvNet::new(NetKind::Binary, 0, vec![layer]).unwrap();
        let mut input = BitPlanes::zeros(1, 3, 3);
        input.data.fill(true);
        let out = conv_forward_binary(&net, &input).unwrap();
        // the centre sees all nine taps inside the grid
        assert!(out.get(0, 1, 1));
    }

    #[test]
    fn complement_input_annihilates() {
        let mut rng = trial_rng(12, 0);
        let weights: Vec<bool> = (0..9).map(|_| rng.gen()).collect();
        let layer = ConvLayer::binary(ConvLayerSpec::new(1, 1, 3, 3), weights.clone(), vec![1]).unwrap();
        let net = ConvNet::new(NetKind::Binary, 0, vec![layer]).unwrap();
        let mut input = BitPlanes::zeros(1, 3, 3);
        for (i, w) in weights.iter().enumerate() {
            input.data[i] = !w;
        }
        assert!(!conv_forward_binary(&net, &input).unwrap().get(0, 1, 1));
    }

    #[test]
    fn wrong_kind_or_channels_rejected() {
        let mut rng = trial_rng(13, 0);
        let net = ConvNet::random(NetKind::Binary, 3, &base_model_specs(3), &mut rng);
        assert!(conv_forward_fp32(&net, &Planes::zeros(8, 5, 5)).is_err());
        assert!(conv_forward_binary(&net, &BitPlanes::zeros(7, 5, 5)).is_err());
    }
}
