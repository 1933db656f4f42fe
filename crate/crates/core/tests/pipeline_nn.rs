use neoqec_core::lattice::{
    apply_frame, extract_detection, sample_errors, CellKind, CodeLayout, ErrorTableau, LsSchedule, NoiseParams, Shape,
    Timeline,
};
use neoqec_core::nn::{ConvLayer, ConvLayerSpec, ConvNet, NetKind};
use neoqec_core::online::{run_pipeline, DecoderContext, OnlineConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(shape: Shape, d: usize) -> DecoderContext {
    let layout = CodeLayout::build(d, shape).unwrap();
    let tl = match shape {
        Shape::Single => Timeline::memory(layout, d).unwrap(),
        Shape::MergedRough => Timeline::lattice_surgery(layout, LsSchedule::standard(d)).unwrap(),
    };
    DecoderContext::new(tl, OnlineConfig::for_distance(d)).unwrap()
}

/// K = 2, one 1x1 layer: flag a measurement flip where the same ancilla fires
/// at the target layer and the next.
fn timelike_net() -> ConvNet {
    let spec = ConvLayerSpec::new(6, 4, 1, 1);
    let mut w = vec![0.0f32; 24];
    // output 2 <- X-type events at t and t+1; output 3 <- Z-type events
    w[2 * 6] = 10.0;
    w[2 * 6 + 2] = 10.0;
    w[3 * 6 + 1] = 10.0;
    w[3 * 6 + 3] = 10.0;
    let bias = vec![-10.0, -10.0, -15.0, -15.0];
    ConvNet::new(NetKind::Fp32, 2, vec![ConvLayer::fp32(spec, w, bias).unwrap()]).unwrap()
}

#[test]
fn first_stage_alone_corrects_isolated_measurement_flips() {
    let net = timelike_net();
    for (shape, d) in [(Shape::Single, 3), (Shape::Single, 5), (Shape::MergedRough, 3)] {
        let c = ctx(shape, d);
        let tl = &c.timeline;
        let mut tested = 0;
        for t in 0..tl.cycles() {
            for a in 0..tl.layout().num_cells() {
                if !matches!(tl.layout().kind(a), CellKind::AncX | CellKind::AncZ) || !tl.meas_live(a, t) {
                    continue;
                }
                let mut e = ErrorTableau::for_timeline(tl);
                e.set_meas(t, a, true);
                let vol = extract_detection(tl, &e).unwrap();
                // only flips that show up as a timelike pair are in reach of the net
                if vol.count() != 2 {
                    continue;
                }
                let r = run_pipeline(&c, &e, Some(&net)).unwrap();
                assert!(!r.failed(), "{shape:?} t={t} a={a}");
                assert_eq!(r.frame, e, "{shape:?} t={t} a={a}");
                tested += 1;
            }
        }
        let ancillas = tl.layout().cells_of(CellKind::AncX).count() + tl.layout().cells_of(CellKind::AncZ).count();
        assert!(tested >= ancillas, "{shape:?}: only {tested} flips exercised");
    }
}

#[test]
fn silent_net_matches_second_stage_alone() {
    let spec = ConvLayerSpec::new(10, 4, 3, 3);
    let silent = ConvLayer::fp32(spec, vec![0.0; spec.weight_count()], vec![-20.0; 4]).unwrap();
    let net = ConvNet::new(NetKind::Fp32, 4, vec![silent]).unwrap();
    let c = ctx(Shape::Single, 5);
    for i in 0..200 {
        let e = sample_errors(&c.timeline, &NoiseParams::new(0.03, 3, i)).unwrap();
        assert_eq!(run_pipeline(&c, &e, Some(&net)).unwrap(), run_pipeline(&c, &e, None).unwrap());
    }
}

#[test]
fn arbitrary_nets_still_leave_a_clean_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let specs = [ConvLayerSpec::new(8, 6, 3, 3), ConvLayerSpec::new(6, 4, 3, 3)];
    for kind in [NetKind::Fp32, NetKind::Binary] {
        let net = ConvNet::random(kind, 3, &specs, &mut rng);
        for (shape, d) in [(Shape::Single, 3), (Shape::Single, 5), (Shape::MergedRough, 3)] {
            let c = ctx(shape, d);
            for i in 0..40 {
                let e = sample_errors(&c.timeline, &NoiseParams::new(0.05, 6, i)).unwrap();
                let r = run_pipeline(&c, &e, Some(&net)).unwrap();
                let res = apply_frame(&e, &r.frame).unwrap();
                assert!(extract_detection(&c.timeline, &res).unwrap().is_empty());
            }
        }
    }
}
