//! Cross-model scoring properties: prequential additivity, exchangeability
//! of the order-0 smoothed counter, calibration of predictive distributions,
//! and the classic add-one redundancy bound on binary data.

use curio_core::model::{code_length, score_continue, ModelConfig, SequenceModel};
use proptest::prelude::*;

fn arb_config() -> impl Strategy<Value = ModelConfig> {
    prop_oneof![
        (0usize..=3, 0.05f64..4.0).prop_map(|(order, alpha)| ModelConfig::Markov { order, alpha }),
        (0.05f64..4.0).prop_map(|alpha| ModelConfig::Dictionary { alpha }),
        Just(ModelConfig::Constant { symbol: 0 }),
    ]
}

fn arb_symbols(alphabet: usize, max_len: usize) -> impl Strategy<Value = Vec<u16>> {
    proptest::collection::vec(0..alphabet as u16, 0..max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    /// Scoring a concatenation in one go costs exactly the bits of the head
    /// plus the bits of the tail continued from the post-head state.
    #[test]
    fn prequential_bits_are_additive(
        config in arb_config(),
        alphabet in 1usize..=6,
        head in arb_symbols(6, 60),
        tail in arb_symbols(6, 60),
    ) {
        let head: Vec<u16> = head.into_iter().map(|s| s % alphabet as u16).collect();
        let tail: Vec<u16> = tail.into_iter().map(|s| s % alphabet as u16).collect();
        let model = config.build(alphabet).unwrap();

        let mut joined = head.clone();
        joined.extend_from_slice(&tail);
        let whole = code_length(&model, &joined).data_bits;

        let mut scratch = model.clone();
        scratch.reset_position();
        let head_bits = score_continue(&mut scratch, &head);
        let tail_bits = score_continue(&mut scratch, &tail);

        prop_assert!((whole - (head_bits + tail_bits)).abs() < 1e-9,
            "whole {whole} vs split {}", head_bits + tail_bits);
    }

    /// An order-0 counter only sees symbol frequencies, so any reordering of
    /// the data costs the same number of bits.
    #[test]
    fn order_zero_cost_is_exchangeable(
        alpha in 0.05f64..4.0,
        alphabet in 1usize..=6,
        data in arb_symbols(6, 80),
        seed in any::<u64>(),
    ) {
        let data: Vec<u16> = data.into_iter().map(|s| s % alphabet as u16).collect();
        let model = ModelConfig::Markov { order: 0, alpha }.build(alphabet).unwrap();

        let mut shuffled = data.clone();
        // Fisher-Yates on a splitmix-style stream; proptest drives the seed.
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (state >> 33) as usize % (i + 1);
            shuffled.swap(i, j);
        }

        let a = code_length(&model, &data).data_bits;
        let b = code_length(&model, &shuffled).data_bits;
        prop_assert!((a - b).abs() < 1e-9, "original {a} vs shuffled {b}");
    }

    /// Predictions are proper distributions wherever we ask for them.
    #[test]
    fn predictions_are_normalized(
        config in arb_config(),
        alphabet in 1usize..=6,
        data in arb_symbols(6, 60),
        context in arb_symbols(6, 8),
    ) {
        let data: Vec<u16> = data.into_iter().map(|s| s % alphabet as u16).collect();
        let context: Vec<u16> = context.into_iter().map(|s| s % alphabet as u16).collect();
        let mut model = config.build(alphabet).unwrap();
        for &s in &data {
            let p = model.predict_next();
            prop_assert_eq!(p.len(), alphabet);
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9, "predict_next sums to {sum}");
            prop_assert!(p.iter().all(|&v| v > 0.0 && v <= 1.0));
            model.update(s);
        }
        let p = model.predict(&context);
        let sum: f64 = p.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9, "predict sums to {sum}");
    }

    /// Code lengths are never negative, whatever the model has seen.
    #[test]
    fn data_bits_are_nonnegative(
        config in arb_config(),
        alphabet in 1usize..=6,
        warmup in arb_symbols(6, 60),
        data in arb_symbols(6, 60),
    ) {
        let warmup: Vec<u16> = warmup.into_iter().map(|s| s % alphabet as u16).collect();
        let data: Vec<u16> = data.into_iter().map(|s| s % alphabet as u16).collect();
        let mut model = config.build(alphabet).unwrap();
        for &s in &warmup {
            model.update(s);
        }
        let report = code_length(&model, &data);
        prop_assert!(report.data_bits >= -1e-12, "data_bits {}", report.data_bits);
        prop_assert!(report.model_bits >= 0.0);
        prop_assert!((report.total_bits - report.model_bits - report.data_bits).abs() < 1e-12);
        prop_assert_eq!(report.eval_ops, data.len() as u64);
    }

    /// Add-one counting over a binary alphabet never pays more than the
    /// uniform code plus one log factor: bits <= n + log2(n + 1).
    #[test]
    fn add_one_redundancy_bound_binary(data in arb_symbols(2, 200)) {
        let model = ModelConfig::Markov { order: 0, alpha: 1.0 }.build(2).unwrap();
        let bits = code_length(&model, &data).data_bits;
        let n = data.len() as f64;
        prop_assert!(bits <= n + (n + 1.0).log2() + 1e-9, "bits {bits} over bound for n {n}");
    }
}
