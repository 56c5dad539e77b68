use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segrestore::{init_network, Activation, DenseNetwork, GradientSet, CANONICAL_DIMS};

/// Output of `init_network([6,12,6,12,6], 42)` on an all-0.5 input, computed by
/// a separate straight-line script at 50-digit precision from the saved weights.
const SEED42_HALF_INPUT: [f64; 6] = [
    0.272_091_705_999_740_610_23,
    0.422_721_797_954_940_515_61,
    0.504_588_987_380_663_479_64,
    0.358_913_941_611_365_431_21,
    0.501_707_347_733_338_729_16,
    0.513_372_942_097_947_485_06,
];

#[test]
fn forward_matches_reference_values() {
    let net = init_network(&CANONICAL_DIMS, 42).unwrap();
    let out = net.forward(&[0.5; 6]).unwrap();
    for (got, want) in out.iter().zip(SEED42_HALF_INPUT) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

/// Naive nested-loop forward pass, written independently of the library's
/// hot path.
fn reference_forward(net: &DenseNetwork, input: &[f64]) -> Vec<f64> {
    let mut x = input.to_vec();
    for layer in net.layers() {
        let mut y = Vec::new();
        for r in 0..layer.out_dim() {
            let mut z = layer.biases()[r];
            for c in 0..layer.in_dim() {
                z += layer.weight(r, c) * x[c];
            }
            y.push(match layer.activation() {
                Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                Activation::Identity => z,
            });
        }
        x = y;
    }
    x
}

#[test]
fn gradient_check_on_canonical_topology() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for trial in 0..10 {
        let net = init_network(&CANONICAL_DIMS, 100 + trial).unwrap();
        let input: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let target: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        let (_, analytic) = net.backprop(&input, &target).unwrap();
        let numeric = net.numerical_gradient(&input, &target, 1e-5).unwrap();
        worst = worst.max(analytic.relative_error(&numeric));
    }
    assert!(worst < 1e-6, "max relative error {worst}");
}

fn unit_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..1.0f64, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_agrees_with_reference(seed in any::<u64>(), input in unit_vec(6)) {
        let net = DenseNetwork::canonical(seed);
        let fast = net.forward(&input).unwrap();
        let slow = reference_forward(&net, &input);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn sigmoid_outputs_in_open_unit_interval(
        seed in any::<u64>(),
        input in proptest::collection::vec(-50.0..50.0f64, 6),
    ) {
        let out = DenseNetwork::canonical(seed).forward(&input).unwrap();
        prop_assert!(out.iter().all(|&y| y > 0.0 && y < 1.0));
    }

    #[test]
    fn init_is_deterministic(seed in any::<u64>()) {
        prop_assert_eq!(init_network(&CANONICAL_DIMS, seed).unwrap(), init_network(&CANONICAL_DIMS, seed).unwrap());
    }

    #[test]
    fn forward_is_pure(seed in any::<u64>(), input in unit_vec(6)) {
        let net = DenseNetwork::canonical(seed);
        prop_assert_eq!(net.forward(&input).unwrap(), net.forward(&input).unwrap());
    }

    #[test]
    fn gradients_are_finite_and_shaped(seed in any::<u64>(), input in unit_vec(6), target in unit_vec(6)) {
        let net = DenseNetwork::canonical(seed);
        let (loss, grads) = net.backprop(&input, &target).unwrap();
        prop_assert!(loss >= 0.0);
        prop_assert!(grads.is_finite());
        prop_assert!(grads.matches(&net));
        prop_assert_eq!(grads.len(), 288 + 36);
    }

    #[test]
    fn small_update_lowers_sample_loss(seed in any::<u64>(), input in unit_vec(6), target in unit_vec(6)) {
        let mut net = DenseNetwork::canonical(seed);
        let (before, grads) = net.backprop(&input, &target).unwrap();
        prop_assume!(before > 1e-8);
        let mut velocity = GradientSet::zeros_like(&net);
        net.apply_update(&grads, &mut velocity, 1e-3, 0.9).unwrap();
        prop_assert!(net.loss(&input, &target).unwrap() < before);
    }
}

#[test]
fn networks_can_be_shared_across_threads() {
    let net = DenseNetwork::canonical(7);
    let expected = net.forward(&[0.3; 6]).unwrap();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..4).map(|_| s.spawn(|| net.forward(&[0.3; 6]).unwrap())).collect();
        for h in handles {
            assert_eq!(h.join().unwrap(), expected);
        }
    });
}
