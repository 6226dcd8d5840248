use compaction_forge::ctx::Config;
use compaction_forge::harness::{elem_inputs, elem_outputs, run_many};
use compaction_forge::oracle::check_compact;
use compaction_forge::tinyw::{build_tinyw, width_warning};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ext(f: bool, p: u64, w: usize) -> u64 {
    (u64::from(!f) << w) | p
}

/// Lane word of bit `pos` for codes `base..base + 64`, `base` aligned.
fn lane_word(base: u64, pos: usize) -> u64 {
    const LOW: [u64; 6] = [
        0xaaaa_aaaa_aaaa_aaaa,
        0xcccc_cccc_cccc_cccc,
        0xf0f0_f0f0_f0f0_f0f0,
        0xff00_ff00_ff00_ff00,
        0xffff_0000_ffff_0000,
        0xffff_ffff_0000_0000,
    ];
    if pos < 6 {
        LOW[pos]
    } else if base >> pos & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

#[test]
fn exhaustive_small_inputs_sort() {
    for w in 1..=2usize {
        let vb = w + 1;
        for n in 1..=8usize {
            let c = build_tinyw(n, w, &Config::default()).unwrap();
            let total = 1u64 << (n * vb);
            let mut base = 0;
            while base < total {
                let lanes = (total - base).min(64);
                let ins: Vec<Vec<u64>> = (0..n)
                    .map(|i| (0..vb).map(|j| lane_word(base, i * vb + (w - j))).collect())
                    .collect();
                let run = c.eval_debug(&ins, lanes as u32).unwrap();
                assert!(run.violations.is_empty(), "{:?}", run.violations.first());
                for l in 0..lanes {
                    let code = base + l;
                    let mut want: Vec<u64> = (0..n).map(|i| code >> (i * vb) & ((1 << vb) - 1)).collect();
                    // distinguished first: complement the flag bit
                    want.iter_mut().for_each(|v| *v ^= 1 << w);
                    want.sort_unstable();
                    let got: Vec<u64> = run
                        .outputs
                        .iter()
                        .map(|b| b.iter().fold(0, |a, &x| a << 1 | (x >> l & 1)) ^ (1 << w))
                        .collect();
                    assert_eq!(got, want, "n={n} w={w} code={code:#x}");
                }
                base += lanes;
            }
        }
    }
}

fn check(c: &compaction_forge::Circuit, trials: &[(Vec<bool>, Vec<u64>)], w: usize) {
    let enc: Vec<_> = trials.iter().map(|(f, p)| elem_inputs(f, p, w)).collect();
    let (outs, viol) = run_many(c, &enc, true).unwrap();
    assert!(viol.is_empty(), "{:?}", viol.first());
    for ((f, p), o) in trials.iter().zip(&outs) {
        let (of, op) = elem_outputs(o);
        let mut want: Vec<u64> = f.iter().zip(p).map(|(&f, &p)| ext(f, p, w)).collect();
        want.sort_unstable();
        let got: Vec<u64> = of.iter().zip(&op).map(|(&f, &p)| ext(f, p, w)).collect();
        assert_eq!(got, want, "input {f:?} {p:?}");
        check_compact(f, p, &of, &op).unwrap();
    }
}

#[test]
fn random_inputs_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, w) in [(8, 3), (13, 2), (64, 2), (100, 4), (512, 2)] {
        let c = build_tinyw(n, w, &Config::default()).unwrap();
        let trials: Vec<(Vec<bool>, Vec<u64>)> = (0..64)
            .map(|_| {
                let p: f64 = rng.random();
                (0..n).map(|_| (rng.random_bool(p), rng.random_range(0..1u64 << w))).unzip()
            })
            .collect();
        check(&c, &trials, w);
    }
}

#[test]
fn equal_elements_stay_put() {
    let c = build_tinyw(16, 2, &Config::default()).unwrap();
    check(&c, &[(vec![true; 16], vec![2; 16]), (vec![false; 16], vec![3; 16])], 2);
}

#[test]
fn params_and_warning() {
    assert!(build_tinyw(0, 2, &Config::default()).is_err());
    assert!(build_tinyw(8, 0, &Config::default()).is_err());
    assert!(build_tinyw(8, 13, &Config::default()).is_err());
    assert!(width_warning(1 << 16, 4).is_none());
    assert!(width_warning(1 << 16, 5).is_some());
    let c = build_tinyw(8, 2, &Config::default()).unwrap();
    assert_eq!(c.meta("family"), Some("tinyw"));
    assert!(c.payload_wires().is_empty());
}
