use neoqec_core::nn::reference::{naive_binary, naive_fp32};
use neoqec_core::nn::{
    base_model_specs, conv_forward_binary, conv_forward_fp32, BitPlanes, ConvLayer, ConvLayerSpec, ConvNet,
    LayerParams, NetKind,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random decoder-shaped stack: `2K+2` in, 4 out, odd kernels.
fn random_specs(k: usize, rng: &mut impl Rng) -> Vec<ConvLayerSpec> {
    let depth = rng.gen_range(1..=3);
    let mut in_ch = 2 * k + 2;
    (0..depth)
        .map(|i| {
            let out = if i + 1 == depth { 4 } else { rng.gen_range(1..=12) };
            let kh = [1, 3, 5, 7][rng.gen_range(0..4)];
            let kw = [1, 3, 5, 7][rng.gen_range(0..4)];
            let s = ConvLayerSpec::new(in_ch, out, kh, kw);
            in_ch = out;
            s
        })
        .collect()
}

fn random_bits(ch: usize, side: usize, density: f64, rng: &mut impl Rng) -> BitPlanes {
    let mut p = BitPlanes::zeros(ch, side, side);
    p.data.iter_mut().for_each(|b| *b = rng.gen_bool(density));
    p
}

fn case() -> impl Strategy<Value = (usize, usize, u64)> {
    (prop::sample::select(vec![3usize, 5, 9]), 3usize..=5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn packed_equals_boolean_oracle((d, k, seed) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let specs = if seed % 5 == 0 { base_model_specs(k) } else { random_specs(k, &mut rng) };
        let net = ConvNet::random(NetKind::Binary, k, &specs, &mut rng);
        let input = random_bits(2 * k + 2, 2 * d - 1, rng.gen_range(0.0..0.5), &mut rng);
        let fast = conv_forward_binary(&net, &input).unwrap();
        prop_assert_eq!((fast.ch, fast.h, fast.w), (4, input.h, input.w));
        prop_assert_eq!(fast, naive_binary(&net, &input));
    }

    #[test]
    fn fp32_within_tolerance_of_oracle((d, k, seed) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = ConvNet::random(NetKind::Fp32, k, &random_specs(k, &mut rng), &mut rng);
        let input = random_bits(2 * k + 2, 2 * d - 1, 0.3, &mut rng).to_planes();
        let fast = conv_forward_fp32(&net, &input).unwrap();
        let slow = naive_fp32(&net, &input);
        prop_assert_eq!((fast.h, fast.w), (slow.h, slow.w));
        let diff = fast.data.iter().zip(&slow.data).map(|(a, b)| (a - b).abs()).fold(0.0f32, f32::max);
        prop_assert!(diff < 1e-5, "max abs diff {}", diff);
    }

    /// Complement input channel `c` and the matching slice of every first-layer
    /// kernel. Zero padding is not complemented, so only outputs farther than
    /// the stack's total radius from the border are compared.
    #[test]
    fn joint_complement_leaves_interior_unchanged(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(3..=5);
        let specs = random_specs(k, &mut rng);
        let net = ConvNet::random(NetKind::Binary, k, &specs, &mut rng);
        let input = random_bits(2 * k + 2, 17, 0.3, &mut rng);
        let c = rng.gen_range(0..2 * k + 2);

        let mut layers = net.layers().to_vec();
        let s = *layers[0].spec();
        let LayerParams::Binary { weights, thresholds, .. } = layers[0].params() else { unreachable!() };
        let mut w = weights.clone();
        let plane = s.kh * s.kw;
        for o in 0..s.out_ch {
            let base = (o * s.in_ch + c) * plane;
            w[base..base + plane].iter_mut().for_each(|b| *b = !*b);
        }
        layers[0] = ConvLayer::binary(s, w, thresholds.clone()).unwrap();
        let flipped = ConvNet::new(NetKind::Binary, k, layers).unwrap();
        let mut inv = input.clone();
        inv.plane_mut(c).iter_mut().for_each(|b| *b = !*b);

        let a = conv_forward_binary(&net, &input).unwrap();
        let b = conv_forward_binary(&flipped, &inv).unwrap();
        let ry: usize = specs.iter().map(|s| s.kh / 2).sum();
        let rx: usize = specs.iter().map(|s| s.kw / 2).sum();
        let all_one_by_one = ry == 0 && rx == 0;
        for o in 0..4 {
            for y in ry..17usize.saturating_sub(ry) {
                for x in rx..17usize.saturating_sub(rx) {
                    prop_assert_eq!(a.get(o, y, x), b.get(o, y, x));
                }
            }
        }
        if all_one_by_one {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn inference_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = ConvNet::random(NetKind::Binary, 4, &base_model_specs(4), &mut rng);
        let input = random_bits(10, 9, 0.2, &mut rng);
        prop_assert_eq!(conv_forward_binary(&net, &input).unwrap(), conv_forward_binary(&net, &input).unwrap());
    }
}

#[test]
fn one_by_one_stack_is_fully_complement_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let specs = [ConvLayerSpec::new(8, 5, 1, 1), ConvLayerSpec::new(5, 4, 1, 1)];
    let net = ConvNet::random(NetKind::Binary, 3, &specs, &mut rng);
    let input = random_bits(8, 5, 0.4, &mut rng);
    let mut layers = net.layers().to_vec();
    let LayerParams::Binary { weights, thresholds, .. } = layers[0].params() else { unreachable!() };
    let mut w = weights.clone();
    for o in 0..5 {
        w[o * 8 + 2] = !w[o * 8 + 2];
    }
    layers[0] = ConvLayer::binary(specs[0], w, thresholds.clone()).unwrap();
    let flipped = ConvNet::new(NetKind::Binary, 3, layers).unwrap();
    let mut inv = input.clone();
    inv.plane_mut(2).iter_mut().for_each(|b| *b = !*b);
    assert_eq!(conv_forward_binary(&net, &input).unwrap(), conv_forward_binary(&flipped, &inv).unwrap());
}
