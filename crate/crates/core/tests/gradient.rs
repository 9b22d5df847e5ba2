use authorlm::corpus::ContextSet;
use authorlm::nnlm::{cross_entropy, init_model, NnlmConfig, TENSOR_NAMES};
use authorlm::{Nnlm, Nnlm32};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-4;
/// Denominator floor so components that are zero up to rounding do not
/// dominate the relative error.
const REL_FLOOR: f64 = 1e-5;

fn random_case(seed: u64) -> (Nnlm, ContextSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = rng.random_range(2..=10);
    let cfg = NnlmConfig {
        vocab_size: v,
        context_size: 4,
        target_pos: 4,
        emb_dim: rng.random_range(1..=4),
        hidden_dim: rng.random_range(1..=6),
        init_seed: seed,
        init_std: 0.5,
        ..NnlmConfig::default()
    };
    let mut model: Nnlm = init_model(&cfg).unwrap();
    for b in model.params.hid_bias.iter_mut().chain(model.params.out_bias.iter_mut()) {
        *b = rng.random_range(-0.5..0.5);
    }
    let mut batch = ContextSet::new(3);
    for _ in 0..rng.random_range(1..=7) {
        let ctx: Vec<usize> = (0..3).map(|_| rng.random_range(0..v)).collect();
        batch.push(&ctx, rng.random_range(0..v));
    }
    (model, batch)
}

fn cost(model: &Nnlm, batch: &ContextSet) -> f64 {
    cross_entropy(&model.forward(batch).unwrap(), batch.targets()).unwrap()
}

/// Max elementwise relative error per tensor between backprop and central
/// differences of the mean cross-entropy.
fn relative_errors(model: &mut Nnlm, batch: &ContextSet) -> [f64; 5] {
    let analytic = model.backward(&model.forward(batch).unwrap(), batch.targets()).unwrap();
    let mut worst = [0.0; 5];
    for t in 0..5 {
        for i in 0..analytic.tensors()[t].len() {
            let orig = model.params.tensors()[t][i];
            model.params.tensors_mut()[t][i] = orig + H;
            let up = cost(model, batch);
            model.params.tensors_mut()[t][i] = orig - H;
            let down = cost(model, batch);
            model.params.tensors_mut()[t][i] = orig;
            let numeric = (up - down) / (2.0 * H);
            let a = analytic.tensors()[t][i];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(REL_FLOOR);
            worst[t] = f64::max(worst[t], rel);
        }
    }
    worst
}

#[test]
fn backprop_matches_central_differences() {
    for seed in 0..40 {
        let (mut model, batch) = random_case(seed);
        let errs = relative_errors(&mut model, &batch);
        for (name, e) in TENSOR_NAMES.iter().zip(errs) {
            assert!(e <= 1e-5, "seed {seed} tensor {name}: relative error {e:e}");
        }
    }
}

#[test]
fn repeated_context_words_accumulate_embedding_gradient() {
    // the same word in every context slot must collect all three contributions
    let (mut model, _) = random_case(3);
    let mut batch = ContextSet::new(3);
    batch.push(&[1, 1, 1], 0);
    batch.push(&[1, 0, 1], 1);
    let errs = relative_errors(&mut model, &batch);
    assert!(errs.iter().all(|&e| e <= 1e-5), "{errs:?}");
}

#[test]
fn single_precision_forward_tracks_double() {
    let (model, batch) = random_case(11);
    let json = model.to_json().unwrap();
    let as_f32: Nnlm32 = {
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let mut v = v;
        v["scalar"] = "f32".into();
        Nnlm32::from_json(&v.to_string()).unwrap()
    };
    let a = model.forward(&batch).unwrap();
    let b = as_f32.forward(&batch).unwrap();
    for (x, y) in a.y_out.iter().zip(b.y_out.iter()) {
        assert!((x - f64::from(*y)).abs() < 1e-5);
    }
}
