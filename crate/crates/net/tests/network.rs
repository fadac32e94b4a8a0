use bdcn_net::{architecture_report, param_count, predict_multiscale, BdcnConfig, Network};
use bdcn_tensor::resize::{resize_map_bilinear, resize_tensor_bilinear};
use bdcn_tensor::{ConvSpec, EdgeProbMap, Graph, Shape4, Tensor4};

fn tiny_config(s: usize) -> BdcnConfig {
    BdcnConfig {
        num_blocks: s,
        vgg_channel_plan: vec![vec![4, 4], vec![6, 6], vec![8, 8], vec![8, 8], vec![8, 8]],
        sem_mid_channels: 4,
        head_channels: 3,
        seed: 7,
        ..BdcnConfig::default()
    }
}

fn ramp_image(c: usize, h: usize, w: usize) -> Tensor4 {
    let shape = Shape4::new(1, c, h, w).unwrap();
    let data = (0..shape.numel())
        .map(|i| ((i * 29 + 13) % 101) as f32 / 101.0)
        .collect();
    Tensor4::from_vec(shape, data).unwrap()
}

/// Reported model sizes for the 2..5 block variants, checked within +/-15%.
#[test]
fn parameter_counts_hit_published_sizes() {
    let targets = [(2usize, 0.28e6f64), (3, 2.26e6), (4, 8.69e6), (5, 16.0e6)];
    for (s, target) in targets {
        let count = param_count(&BdcnConfig::with_blocks(s)) as f64;
        let rel = (count - target).abs() / target;
        assert!(
            rel <= 0.15,
            "S={s}: {count} vs target {target} (off by {:.1}%)",
            rel * 100.0
        );
    }
}

#[test]
fn arithmetic_count_matches_built_network() {
    for s in [2, 3] {
        let cfg = tiny_config(s);
        let net = Network::build(cfg.clone()).unwrap();
        assert_eq!(net.param_count(), param_count(&cfg));
    }
    let cfg = BdcnConfig::with_blocks(2);
    let net = Network::build(cfg.clone()).unwrap();
    assert_eq!(net.param_count(), param_count(&cfg));
}

#[test]
fn forward_yields_2s_plus_1_maps_at_input_resolution() {
    for s in [2, 3] {
        let net = Network::build(tiny_config(s)).unwrap();
        let img = ramp_image(3, 16, 12);
        let out = net.predict(&img).unwrap();
        assert_eq!(out.map_count(), 2 * s + 1);
        for m in out.side_s2d.iter().chain(&out.side_d2s).chain([&out.fused]) {
            assert_eq!((m.height(), m.width()), (16, 12));
            assert!(m.data().iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }
}

#[test]
fn fresh_network_predicts_half_everywhere() {
    // Score heads start at zero, so every logit is 0 and sigmoid(0) = 0.5.
    let net = Network::build(tiny_config(2)).unwrap();
    let out = net.predict(&ramp_image(3, 8, 8)).unwrap();
    for m in out.side_s2d.iter().chain(&out.side_d2s).chain([&out.fused]) {
        assert!(m.data().iter().all(|&v| v == 0.5));
    }
}

#[test]
fn forward_is_deterministic() {
    let img = ramp_image(3, 16, 16);
    let a = Network::build(tiny_config(2)).unwrap().predict(&img).unwrap();
    let b = Network::build(tiny_config(2)).unwrap().predict(&img).unwrap();
    assert_eq!(a.fused.data(), b.fused.data());
    for (x, y) in a.side_s2d.iter().zip(&b.side_s2d) {
        assert_eq!(x.data(), y.data());
    }
}

#[test]
fn too_small_input_is_rejected() {
    let net = Network::build(tiny_config(3)).unwrap();
    let img = ramp_image(3, 3, 16);
    assert!(net.forward(&mut Graph::new(), &img).is_err());
}

#[test]
fn k_zero_sem_is_pass_through() {
    // With K = 0 the heads consume backbone features directly; the net still
    // builds, runs, and has strictly fewer parameters than K = 1.
    let k0 = BdcnConfig {
        sem_branches: 0,
        ..tiny_config(2)
    };
    let k1 = BdcnConfig {
        sem_branches: 1,
        ..tiny_config(2)
    };
    assert!(param_count(&k0) < param_count(&k1));
    let net = Network::build(k0).unwrap();
    let out = net.predict(&ramp_image(3, 8, 8)).unwrap();
    assert_eq!(out.map_count(), 5);
}

/// A unit impulse through a single dilated 3x3 convolution must spread to
/// exactly r*(k-1)+1 = 2r+1 pixels per axis.
#[test]
fn impulse_response_extent_matches_dilation() {
    for r in [1usize, 4, 8, 12] {
        let size = 2 * 12 + 9;
        let shape = Shape4::new(1, 1, size, size).unwrap();
        let mut img = Tensor4::zeros(shape);
        let center = size / 2;
        img.data_mut()[center * size + center] = 1.0;

        let w = Tensor4::filled(Shape4::new(1, 1, 3, 3).unwrap(), 0.5);
        let mut g = Graph::new();
        let x = g.leaf(img);
        let wid = g.leaf(w);
        let y = g.conv2d(x, wid, None, ConvSpec::same3x3(r)).unwrap();
        let out = g.value(y);

        let mut min_y = usize::MAX;
        let mut max_y = 0;
        let mut min_x = usize::MAX;
        let mut max_x = 0;
        for yy in 0..size {
            for xx in 0..size {
                if out.at(0, 0, yy, xx) != 0.0 {
                    min_y = min_y.min(yy);
                    max_y = max_y.max(yy);
                    min_x = min_x.min(xx);
                    max_x = max_x.max(xx);
                }
            }
        }
        assert_eq!(max_y - min_y + 1, 2 * r + 1, "rate {r}");
        assert_eq!(max_x - min_x + 1, 2 * r + 1, "rate {r}");
    }
}

#[test]
fn receptive_field_grows_with_depth() {
    let report = architecture_report(&BdcnConfig::with_blocks(5));
    let rfs: Vec<usize> = report.blocks.iter().map(|b| b.receptive_field).collect();
    assert!(rfs.windows(2).all(|w| w[0] < w[1]), "{rfs:?}");
}

#[test]
fn multiscale_trivial_cases() {
    let net = Network::build(tiny_config(2)).unwrap();
    let img = ramp_image(3, 12, 12);
    let single = net.predict(&img).unwrap().fused;

    let one = predict_multiscale(&net, &img, &[1.0]).unwrap();
    assert_eq!(one.data(), single.data());

    let two = predict_multiscale(&net, &img, &[1.0, 1.0]).unwrap();
    for (a, b) in two.data().iter().zip(single.data()) {
        assert!((a - b).abs() < 1e-6);
    }

    assert!(predict_multiscale(&net, &img, &[]).is_err());
    assert!(predict_multiscale(&net, &img, &[0.0]).is_err());
    assert!(predict_multiscale(&net, &img, &[-1.0]).is_err());
}

#[test]
fn multiscale_matches_hand_composed_pipeline() {
    let net = Network::build(tiny_config(2)).unwrap();
    let img = ramp_image(3, 16, 16);
    let scales = [0.5, 1.0, 1.5];

    let mut acc = vec![0.0f64; 16 * 16];
    for &s in &scales {
        let fused: EdgeProbMap = if s == 1.0 {
            net.predict(&img).unwrap().fused
        } else {
            let th = ((16.0 * s) as f64).round() as usize;
            let scaled = resize_tensor_bilinear(&img, th, th);
            resize_map_bilinear(&net.predict(&scaled).unwrap().fused, 16, 16)
        };
        for (a, &v) in acc.iter_mut().zip(fused.data()) {
            *a += v as f64;
        }
    }
    let expect: Vec<f32> = acc.iter().map(|&v| (v / 3.0) as f32).collect();

    let got = predict_multiscale(&net, &img, &scales).unwrap();
    for (a, b) in got.data().iter().zip(&expect) {
        assert!((a - b).abs() < 1e-6);
    }
}

#[test]
fn checkpoint_round_trip_preserves_everything() {
    let dir = std::env::temp_dir().join("bdcn_net_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("net.bdcn");

    let net = Network::build(tiny_config(2)).unwrap();
    net.save(&path).unwrap();
    let loaded = Network::load(&path).unwrap();
    assert_eq!(loaded.config(), net.config());
    for ((n1, p1), (n2, p2)) in net.params().iter().zip(loaded.params()) {
        assert_eq!(n1, n2);
        let a: Vec<u32> = p1.data().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u32> = p2.data().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b, "parameter {n1} changed in round trip");
    }

    let img = ramp_image(3, 8, 8);
    let a = net.predict(&img).unwrap();
    let b = loaded.predict(&img).unwrap();
    assert_eq!(a.fused.data(), b.fused.data());
}
