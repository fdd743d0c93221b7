use proptest::prelude::*;

use qkdsim::channel::{payload, MessageKind, Party, Transcript};
use qkdsim::postprocess::{cascade_reconcile, final_length, privacy_amplify, toeplitz_hash, verify_keys, ToeplitzSeed};
use qkdsim::{BitString, RandomStream};

fn with_errors(a: &BitString, rate: f64, rng: &mut RandomStream) -> BitString {
    let mut b = a.clone();
    for i in 0..a.len() {
        if rng.bernoulli(rate) {
            b.flip(i);
        }
    }
    b
}

#[test]
fn cascade_then_verify_gives_identical_keys() {
    for seed in 0..1000 {
        let mut rng = RandomStream::from_seed(seed);
        let a = BitString::random(2048, &mut rng);
        let b = with_errors(&a, 0.02, &mut rng);
        let mut tr = Transcript::new();
        let report = cascade_reconcile(&a, &b, 0.02, &mut tr, &mut rng).unwrap();
        if verify_keys(&a, &report.corrected, 64, &mut rng, &mut tr).unwrap() {
            assert_eq!(report.corrected, a, "seed {seed}");
        }
    }
}

#[test]
fn cascade_leak_counts_alice_parities() {
    let mut rng = RandomStream::from_seed(60);
    let a = BitString::random(4096, &mut rng);
    let b = with_errors(&a, 0.05, &mut rng);
    let mut tr = Transcript::new();
    let report = cascade_reconcile(&a, &b, 0.05, &mut tr, &mut rng).unwrap();
    let bits: usize =
        tr.filter(Party::Alice, MessageKind::EcParity).map(|e| payload::decode_bits(e.payload()).unwrap().len()).sum();
    assert_eq!(report.leak_bits, bits);
    assert_eq!(tr.filter(Party::Bob, MessageKind::EcParity).count(), 0);
}

#[test]
fn amplified_bits_unbiased_over_seeds() {
    let mut rng = RandomStream::from_seed(61);
    let key = BitString::random(256, &mut rng);
    let trials = 20_000;
    let out_len = 8;
    let mut ones = vec![0usize; out_len];
    for _ in 0..trials {
        let (out, _) = privacy_amplify(&key, out_len, &mut rng, &mut Transcript::new()).unwrap();
        for (j, count) in ones.iter_mut().enumerate() {
            *count += out.get(j) as usize;
        }
    }
    let sigma = (0.25 / trials as f64).sqrt();
    for c in ones {
        assert!((c as f64 / trials as f64 - 0.5).abs() <= 4.0 * sigma);
    }
}

proptest! {
    #[test]
    fn toeplitz_is_linear(seed in any::<u64>(), in_len in 1usize..300, out_frac in 0.0..1.0f64) {
        let mut rng = RandomStream::from_seed(seed);
        let out_len = ((in_len as f64 * out_frac) as usize).max(1);
        let s = ToeplitzSeed::random(in_len, out_len, &mut rng);
        let x = BitString::random(in_len, &mut rng);
        let y = BitString::random(in_len, &mut rng);
        let hx = toeplitz_hash(&x, &s, out_len).unwrap();
        let hy = toeplitz_hash(&y, &s, out_len).unwrap();
        let hxy = toeplitz_hash(&x.xor(&y).unwrap(), &s, out_len).unwrap();
        prop_assert_eq!(hxy, hx.xor(&hy).unwrap());
    }

    #[test]
    fn final_length_monotone(n in 0usize..100_000, q in 0.0..0.5f64, dq in 0.0..0.1f64,
                             leak in 0usize..5000, t in 1usize..128, e in 1.0..30.0f64) {
        let eps = 10f64.powf(-e);
        let base = final_length(n, q, leak, t, eps).unwrap();
        prop_assert!(final_length(n, (q + dq).min(0.5), leak, t, eps).unwrap() <= base);
        prop_assert!(final_length(n, q, leak + 10, t, eps).unwrap() <= base);
        prop_assert!(final_length(n, q, leak, t + 1, eps).unwrap() <= base);
        prop_assert!(final_length(n, q, leak, t, eps / 10.0).unwrap() <= base);
        prop_assert!(base <= n);
    }

    #[test]
    fn equal_keys_always_verify(seed in any::<u64>(), len in 1usize..500, t in 1usize..80) {
        let mut rng = RandomStream::from_seed(seed);
        let a = BitString::random(len, &mut rng);
        prop_assert!(verify_keys(&a, &a, t, &mut rng, &mut Transcript::new()).unwrap());
    }
}
