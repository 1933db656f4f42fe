//! Direct-loop convolutions with no packing or range clipping. Slow, but
//! simple enough to serve as an independent check on the fast engines.

use super::conv::{BitPlanes, Planes};
use super::{Activation, ConvNet, LayerParams};

fn tap(y: usize, ky: usize, kh: usize, h: usize) -> Option<usize> {
    let iy = y as isize + ky as isize - (kh / 2) as isize;
    (0..h as isize).contains(&iy).then_some(iy as usize)
}

pub fn naive_fp32(net: &ConvNet, input: &Planes) -> Planes {
    let mut x = input.clone();
    for (li, layer) in net.layers().iter().enumerate() {
        let s = layer.spec();
        let LayerParams::Fp32 { weights, bias } = layer.params() else {
            panic!("layer {li} is not fp32");
        };
        let mut out = Planes::zeros(s.out_ch, x.h, x.w);
        for o in 0..s.out_ch {
            for y in 0..x.h {
                for xx in 0..x.w {
                    let mut acc = bias[o] as f64;
                    for i in 0..s.in_ch {
                        for ky in 0..s.kh {
                            for kx in 0..s.kw {
                                let (Some(iy), Some(ix)) = (tap(y, ky, s.kh, x.h), tap(xx, kx, s.kw, x.w)) else {
                                    continue;
                                };
                                let wv = weights[((o * s.in_ch + i) * s.kh + ky) * s.kw + kx];
                                acc += wv as f64 * x.get(i, iy, ix) as f64;
                            }
                        }
                    }
                    let v = match net.activation(li) {
                        Activation::Sigmoid => 1.0 / (1.0 + (-acc).exp()),
                        _ => acc.max(0.0),
                    };
                    out.set(o, y, xx, v as f32);
                }
            }
        }
        x = out;
    }
    x
}

/// Out-of-grid taps read as 0 and still count when the weight bit is 0.
pub fn naive_binary(net: &ConvNet, input: &BitPlanes) -> BitPlanes {
    let mut x = input.clone();
    for (li, layer) in net.layers().iter().enumerate() {
        let s = layer.spec();
        let LayerParams::Binary { weights, thresholds, .. } = layer.params() else {
            panic!("layer {li} is not binary");
        };
        let mut out = BitPlanes::zeros(s.out_ch, x.h, x.w);
        for o in 0..s.out_ch {
            for y in 0..x.h {
                for xx in 0..x.w {
                    let mut agree = 0i64;
                    for i in 0..s.in_ch {
                        for ky in 0..s.kh {
                            for kx in 0..s.kw {
                                let a = match (tap(y, ky, s.kh, x.h), tap(xx, kx, s.kw, x.w)) {
                                    (Some(iy), Some(ix)) => x.get(i, iy, ix),
                                    _ => false,
                                };
                                let w = weights[((o * s.in_ch + i) * s.kh + ky) * s.kw + kx];
                                agree += (a == w) as i64;
                            }
                        }
                    }
                    out.set(o, y, xx, agree >= thresholds[o] as i64);
                }
            }
        }
        x = out;
    }
    x
}
