mod common;

use ndarray::{arr1, arr2, Array1, Array2, Axis};
use proptest::prelude::*;
use rand::Rng;
use shapeclust::autoencoder::{
    average_activation, decode_layer, encode, encode_layer, init_layer, layer_gradients, layer_loss, loss_sparsity,
    loss_total, reconstruct, reconstruction_stats, train_layer, train_stack, AutoencoderError, LayerConfig, LossParts,
    SaeLayer, StackedModel, TransferKind,
};

use common::gradient_error;

fn random_layer(rng: &mut impl Rng, k: usize, d: usize, encoder: TransferKind, decoder: TransferKind) -> SaeLayer {
    SaeLayer::new(
        Array2::from_shape_simple_fn((k, d), || rng.random_range(-0.6..0.6)),
        Array1::from_shape_simple_fn(k, || rng.random_range(-0.3..0.3)),
        Array1::from_shape_simple_fn(d, || rng.random_range(-0.3..0.3)),
        encoder,
        decoder,
    )
    .unwrap()
}

/// Distance of the nearest pre-activation to a Satlin kink.
fn kink_margin(layer: &SaeLayer, data: &Array2<f64>) -> f64 {
    let z = data.dot(&layer.weights.t()) + &layer.encode_bias;
    let v = layer.encode_batch(data.view()).unwrap();
    let y = v.dot(&layer.weights) + &layer.decode_bias;
    let mut margin = f64::INFINITY;
    for (values, kind) in [(&z, layer.encoder_transfer), (&y, layer.decoder_transfer)] {
        if kind == TransferKind::Satlin {
            for &x in values {
                margin = margin.min(x.abs()).min((x - 1.0).abs());
            }
        }
    }
    margin
}

#[test]
fn gradients_match_finite_differences_for_all_transfer_pairs() {
    use TransferKind::*;
    let mut rng = common::rng(20);
    let mut checked = 0;
    for encoder in [Logsig, Satlin, Purelin] {
        for decoder in [Logsig, Satlin, Purelin] {
            let mut done = 0;
            while done < 12 {
                let (d, k, n) = (rng.random_range(2..=8), rng.random_range(1..=8), rng.random_range(1..=5));
                let data = Array2::from_shape_simple_fn((n, d), || rng.random_range(0.05..0.95));
                let layer = random_layer(&mut rng, k, d, encoder, decoder);
                if kink_margin(&layer, &data) < 1e-3 {
                    continue;
                }
                let mut cfg = LayerConfig {
                    hidden_units: k,
                    beta: rng.random_range(0.5..4.0),
                    lambda: rng.random_range(0.0..0.01),
                    rho: rng.random_range(0.05..0.5),
                    ..LayerConfig::default()
                };
                let rho_hat = average_activation(&layer, data.view()).unwrap();
                if rho_hat.iter().any(|&r| !(r > 1e-3 && r < 1.0 - 1e-3)) {
                    cfg.beta = 0.0;
                }
                let err = gradient_error(&layer, &cfg, &data);
                assert!(err < 1e-5, "{encoder}/{decoder}: relative error {err}");
                done += 1;
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 108);
}

#[test]
fn six_to_three_layer_gradient() {
    let mut rng = common::rng(21);
    let data = Array2::from_shape_simple_fn((4, 6), || rng.random_range(0.0..1.0));
    let layer = random_layer(&mut rng, 3, 6, TransferKind::Logsig, TransferKind::Logsig);
    let cfg = LayerConfig::new(3);
    assert!(gradient_error(&layer, &cfg, &data) < 1e-5);
}

#[test]
fn weight_decay_alone_has_gradient_two_lambda_w() {
    let w = arr2(&[[0.5, -1.0, 2.0], [0.25, 0.0, -3.0]]);
    let layer = SaeLayer::new(w.clone(), Array1::zeros(2), Array1::zeros(3), TransferKind::Purelin, TransferKind::Purelin).unwrap();
    let cfg = LayerConfig { hidden_units: 2, beta: 0.0, lambda: 0.3, ..LayerConfig::default() };
    let (_, g) = layer_gradients(&layer, &cfg, Array2::zeros((3, 3)).view()).unwrap();
    assert!((&g.weights - &(w * 0.6)).iter().all(|v| v.abs() < 1e-15));
    assert!(g.encode_bias.iter().chain(&g.decode_bias).all(|&v| v == 0.0));

    let zero = SaeLayer::zeros(2, 3, TransferKind::Purelin, TransferKind::Purelin);
    let (_, g) = layer_gradients(&zero, &cfg, Array2::zeros((2, 3)).view()).unwrap();
    assert!(g.weights.iter().chain(&g.encode_bias).chain(&g.decode_bias).all(|&v| v == 0.0));
}

#[test]
fn loss_examples() {
    let kl = loss_sparsity(0.5, arr1(&[0.25]).view()).unwrap();
    let expected = 0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln();
    assert!((kl - expected).abs() < 1e-15);
    assert!((kl - 0.14384).abs() < 1e-5);
    assert_eq!(loss_sparsity(0.15, arr1(&[0.15, 0.15]).view()).unwrap(), 0.0);
    assert!(matches!(loss_sparsity(0.15, arr1(&[1.0]).view()), Err(AutoencoderError::Domain(_))));

    let cfg = LayerConfig::default();
    let parts = LossParts { mse: 0.05, sparsity: 0.1, weights: 2.0 };
    assert!((loss_total(&cfg, &parts) - 0.458).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn decomposition_is_exact(seed in any::<u64>(), beta in 0.0..6.0f64, lambda in 0.0..0.1f64, rho in 0.02..0.98f64) {
        let mut rng = common::rng(seed);
        let (d, k, n) = (rng.random_range(2..=9), rng.random_range(1..=6), rng.random_range(1..=6));
        let data = Array2::from_shape_simple_fn((n, d), || rng.random_range(0.0..1.0));
        let layer = random_layer(&mut rng, k, d, TransferKind::Logsig, TransferKind::Logsig);
        let cfg = LayerConfig { hidden_units: k, beta, lambda, rho, ..LayerConfig::default() };
        let parts = layer_loss(&layer, &cfg, data.view()).unwrap();
        let (from_grad, _) = layer_gradients(&layer, &cfg, data.view()).unwrap();
        prop_assert_eq!(parts, from_grad);
        let total = loss_total(&cfg, &parts);
        prop_assert!((total - (beta * parts.sparsity + lambda * parts.weights + parts.mse)).abs() <= 1e-12);
    }

    #[test]
    fn kl_is_nonnegative_and_vanishes_only_at_target(
        rho in 0.01..0.99f64,
        rho_hat in prop::collection::vec(0.001..0.999f64, 1..10),
    ) {
        let kl = loss_sparsity(rho, Array1::from(rho_hat.clone()).view()).unwrap();
        prop_assert!(kl >= 0.0);
        if rho_hat.iter().any(|&r| (r - rho).abs() > 1e-6) {
            prop_assert!(kl > 0.0);
        }
        let at_target = loss_sparsity(rho, Array1::from_elem(rho_hat.len(), rho).view()).unwrap();
        prop_assert!(at_target.abs() < 1e-15);
    }
}

#[test]
fn layer_maps() {
    let zero = SaeLayer::zeros(2, 3, TransferKind::Logsig, TransferKind::Logsig);
    assert_eq!(encode_layer(&zero, arr1(&[1.0, 2.0, 3.0]).view()).unwrap(), arr1(&[0.5, 0.5]));
    assert_eq!(decode_layer(&zero, arr1(&[1.0, 2.0]).view()).unwrap(), arr1(&[0.5, 0.5, 0.5]));
    assert!(matches!(encode_layer(&zero, arr1(&[1.0, 2.0]).view()), Err(AutoencoderError::DimensionMismatch { .. })));

    let one = SaeLayer::new(arr2(&[[2.0]]), arr1(&[0.0]), arr1(&[1.0]), TransferKind::Purelin, TransferKind::Purelin).unwrap();
    assert_eq!(decode_layer(&one, arr1(&[3.0]).view()).unwrap(), arr1(&[7.0]));

    // orthonormal square weights reconstruct exactly
    let (c, s) = (0.6, 0.8);
    let rot = SaeLayer::new(arr2(&[[c, -s], [s, c]]), Array1::zeros(2), Array1::zeros(2), TransferKind::Purelin, TransferKind::Purelin).unwrap();
    let model = StackedModel::from_layers(2, vec![rot]).unwrap();
    let u = arr1(&[0.3, -1.7]);
    let back = reconstruct(&model, u.view()).unwrap();
    assert!((&back - &u).iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn activation_average() {
    let layer = SaeLayer::new(arr2(&[[1.0, -1.0]]), arr1(&[0.5]), Array1::zeros(2), TransferKind::Logsig, TransferKind::Logsig).unwrap();
    let data = arr2(&[[1.0, 0.0], [0.0, 2.0]]);
    let sig = |z: f64| 1.0 / (1.0 + (-z).exp());
    let got = average_activation(&layer, data.view()).unwrap();
    assert!((got[0] - (sig(1.5) + sig(-1.5)) / 2.0).abs() < 1e-15);
    let single = average_activation(&layer, data.slice(ndarray::s![0..1, ..])).unwrap();
    assert!((single[0] - sig(1.5)).abs() < 1e-15);
}

fn one_hot() -> Array2<f64> {
    Array2::from_shape_fn((8, 4), |(i, j)| if i % 4 == j { 1.0 } else { 0.0 })
}

#[test]
fn toy_training_descends_and_repeats() {
    let cfg = LayerConfig { hidden_units: 2, seed: 9, ..LayerConfig::default() };
    let (layer, report) = train_layer(one_hot().view(), &cfg).unwrap();
    assert_eq!(report.epochs(), 500);
    assert!(report.loss_mse.last() < report.loss_mse.first());
    assert!(report.loss_total.last() < report.loss_total.first());
    assert_eq!(report.mean_activation.len(), 2);

    let (again, report2) = train_layer(one_hot().view(), &cfg).unwrap();
    assert_eq!(layer, again);
    assert_eq!(report, report2);
}

#[test]
fn huge_learning_rate_diverges() {
    let cfg = LayerConfig { hidden_units: 2, learning_rate: 1e6, ..LayerConfig::default() };
    assert!(matches!(train_layer(one_hot().view(), &cfg), Err(AutoencoderError::Divergence { .. })));
}

#[test]
fn trained_model_reconstructs_better_than_untrained() {
    let cfg = LayerConfig { hidden_units: 2, seed: 4, ..LayerConfig::default() };
    let data = one_hot();
    let untrained = StackedModel::from_layers(4, vec![init_layer(4, &cfg)]).unwrap();
    let (trained, _) = train_stack(data.view(), std::slice::from_ref(&cfg)).unwrap();
    let before = reconstruction_stats(&untrained, data.view()).unwrap();
    let after = reconstruction_stats(&trained, data.view()).unwrap();
    for (a, b) in after.per_sample.iter().zip(&before.per_sample) {
        assert!(a < b);
    }
}

#[test]
fn stack_shapes_follow_configs() {
    let mut rng = common::rng(22);
    let data = Array2::from_shape_simple_fn((3, 40), || rng.random_range(0.0..1.0));
    let configs: Vec<_> = [12, 6, 3].into_iter().map(|h| LayerConfig { max_epochs: 5, ..LayerConfig::new(h) }).collect();
    let (model, reports) = train_stack(data.view(), &configs).unwrap();
    let shapes: Vec<_> = model.layers().iter().map(|l| l.weights.dim()).collect();
    assert_eq!(shapes, [(12, 40), (6, 12), (3, 6)]);
    assert_eq!(reports.len(), 3);
    let code = encode(&model, data.row(0)).unwrap();
    assert_eq!(code.len(), 3);
    assert!(code.iter().all(|&v| v > 0.0 && v < 1.0));
    assert_eq!(code, encode(&model, data.row(0)).unwrap());

    let bad: Vec<_> = [10, 20].into_iter().map(LayerConfig::new).collect();
    assert!(matches!(train_stack(data.view(), &bad), Err(AutoencoderError::NotDecreasing { .. })));
}

#[test]
fn saved_model_is_bit_identical() {
    let mut rng = common::rng(23);
    let data = Array2::from_shape_simple_fn((5, 9), || rng.random_range(0.0..1.0));
    let configs = [LayerConfig { max_epochs: 20, ..LayerConfig::new(4) }, LayerConfig { max_epochs: 20, ..LayerConfig::new(2) }];
    let (model, _) = train_stack(data.view(), &configs).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ssae");
    model.save(&path).unwrap();
    let loaded = StackedModel::load(&path).unwrap();
    assert_eq!(loaded, model);
    assert_eq!(loaded.encode_batch(data.view()).unwrap(), model.encode_batch(data.view()).unwrap());
    assert_eq!(loaded.reconstruct_batch(data.view()).unwrap(), model.reconstruct_batch(data.view()).unwrap());
    assert!(std::fs::read(&path).unwrap().starts_with(b"ssae-v1\n"));
}

#[test]
fn reconstruction_errors_skew_right_on_shapes() {
    // many similar discs and a few scattered-ink drawings that are hard to reconstruct
    let mut rng = common::rng(24);
    let mut rows = Vec::new();
    for i in 0..40 {
        let r = rng.random_range(0.6..0.8);
        for y in 0..16 {
            for x in 0..16 {
                let (dx, dy) = (x as f64 / 15.0 - 0.5, y as f64 / 15.0 - 0.5);
                let ink = if i % 10 == 9 { rng.random_bool(0.5) } else { (dx * dx + dy * dy).sqrt() < r / 2.0 };
                rows.push(if ink { 1.0 } else { 0.0 });
            }
        }
    }
    let data = Array2::from_shape_vec((40, 256), rows).unwrap();
    let cfg = LayerConfig { hidden_units: 8, learning_rate: 0.05, seed: 1, ..LayerConfig::default() };
    let (model, _) = train_stack(data.view(), &[cfg]).unwrap();
    let stats = reconstruction_stats(&model, data.view()).unwrap();
    assert!(stats.skewness > 0.0, "skewness {}", stats.skewness);
    assert!(stats.min <= stats.q1 && stats.q1 <= stats.median && stats.median <= stats.q3 && stats.q3 <= stats.max);
    assert_eq!(stats.per_sample.len(), data.len_of(Axis(0)));
}
