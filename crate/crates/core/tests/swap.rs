use compaction_forge::ctx::{Config, Eps};
use compaction_forge::expander::TwoHop;
use compaction_forge::harness::{from_bits, run_many, to_bits};
use compaction_forge::oracle::{oracle_legal_swap, Colored};
use compaction_forge::swapper::{build_swap, leftover_cap, simulate, swap_graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Balanced instance: `k` colored of each color at random distinct slots.
fn instance(rng: &mut ChaCha8Rng, n: usize) -> Vec<Colored> {
    let k = rng.random_range(0..=n / 2);
    let mut slots: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        slots.swap(i, rng.random_range(0..=i));
    }
    let mut v: Vec<Colored> = (0..n)
        .map(|i| Colored {
            colored: false,
            color: rng.random(),
            payload: i as u64,
        })
        .collect();
    for (j, &s) in slots[..2 * k].iter().enumerate() {
        v[s].colored = true;
        v[s].color = j % 2 == 1;
    }
    v
}

fn run(n: usize, w: usize, trials: usize, seed: u64) {
    let c = build_swap(n, w, &Config::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst: Vec<Vec<Colored>> = (0..trials).map(|_| instance(&mut rng, n)).collect();
    let enc: Vec<Vec<Vec<bool>>> = inst
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    let mut b = vec![x.colored, x.color];
                    b.extend(to_bits(x.payload, w));
                    b
                })
                .collect()
        })
        .collect();
    let (outs, viol) = run_many(&c, &enc, true).unwrap();
    assert!(viol.is_empty(), "{:?}", &viol[..viol.len().min(3)]);
    for (i, o) in inst.iter().zip(&outs) {
        let got: Vec<Colored> = o
            .iter()
            .map(|b| Colored {
                colored: b[0],
                color: b[1],
                payload: from_bits(&b[2..]),
            })
            .collect();
        assert!(got.iter().all(|x| !x.colored), "n={n}: colored element left");
        oracle_legal_swap(i, &got).unwrap_or_else(|e| panic!("n={n}: {e:?}"));
    }
}

#[test]
fn complete_pass_swaps_everything() {
    run(7, 3, 64, 1);
    run(128, 7, 64, 2);
}

#[test]
fn recursive_swap_is_legal() {
    run(200, 8, 64, 3);
    run(600, 10, 64, 4);
}

#[test]
fn accepted_graph_meets_its_cap() {
    let cfg = Config::default();
    let acc = swap_graph(1024, &cfg).unwrap();
    let cap = leftover_cap(1024, &Eps::default());
    assert_eq!(acc.report.report.cap, cap);
    assert!(acc.report.report.max_leftover <= cap);
    // fresh colorings, not the ones used for acceptance
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..16 {
        let inst = instance(&mut rng, 1024);
        let mut colored: Vec<bool> = inst.iter().map(|x| x.colored).collect();
        let color: Vec<bool> = inst.iter().map(|x| x.color).collect();
        assert!(simulate(&acc.report.pairs, &mut colored, &color) <= cap);
    }
}

#[test]
fn complete_pairs_leave_nothing() {
    let p = TwoHop::complete(40);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..32 {
        let inst = instance(&mut rng, 40);
        let mut colored: Vec<bool> = inst.iter().map(|x| x.colored).collect();
        let color: Vec<bool> = inst.iter().map(|x| x.color).collect();
        assert_eq!(simulate(&p, &mut colored, &color), 0);
    }
}

#[test]
fn rejects_empty() {
    assert!(build_swap(0, 4, &Config::default()).is_err());
    assert!(build_swap(4, 0, &Config::default()).is_err());
}
