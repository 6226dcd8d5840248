use compaction_forge::ctx::Config;
use compaction_forge::harness::{elem_inputs, elem_outputs, run_many};
use compaction_forge::lc0::{build_lc0, output_len_with, LooseCompactParams};
use compaction_forge::oracle::check_loose;
use compaction_forge::Circuit;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params(n: usize, w: usize, forced: bool) -> LooseCompactParams {
    let mut p = LooseCompactParams::new(n, w, 16);
    if forced {
        p.bypass_below = 0;
    }
    p
}

/// Runs every placement through the circuit and checks the oracle and the probes.
fn check_all(c: &Circuit, p: &LooseCompactParams, placements: &[Vec<usize>], rng: &mut ChaCha8Rng) {
    let mut cases = Vec::new();
    let mut trials = Vec::new();
    for pos in placements {
        let mut flags = vec![false; p.n];
        for &i in pos {
            flags[i] = true;
        }
        let payloads: Vec<u64> = (0..p.n).map(|_| rng.random_range(0..1u64 << p.w)).collect();
        trials.push(elem_inputs(&flags, &payloads, p.w));
        cases.push((flags, payloads));
    }
    let (outs, viol) = run_many(c, &trials, true).unwrap();
    assert!(viol.is_empty(), "{:?}", &viol[..viol.len().min(3)]);
    let len = output_len_with(p.n, p.d, p.bypass_below);
    for ((f, pl), o) in cases.iter().zip(&outs) {
        let (of, op) = elem_outputs(o);
        check_loose(f, pl, &of, &op, len).unwrap();
    }
}

#[test]
fn all_dummy_gives_all_dummy() {
    for forced in [false, true] {
        let p = params(256, 4, forced);
        let c = build_lc0(&p, &Config::default()).unwrap();
        let out = c.eval(&elem_inputs(&[false; 256], &[3; 256], 4)).unwrap();
        assert_eq!(out.len(), 128);
        assert!(out.iter().all(|b| !b[0]));
    }
}

#[test]
fn every_placement_of_at_most_two_reals_n256() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut placements = vec![vec![]];
    for i in 0..256 {
        placements.push(vec![i]);
        for j in i + 1..256 {
            placements.push(vec![i, j]);
        }
    }
    for forced in [false, true] {
        let p = params(256, 3, forced);
        let c = build_lc0(&p, &Config::default()).unwrap();
        check_all(&c, &p, &placements, &mut rng);
    }
}

#[test]
fn random_sparse_inputs_larger_n() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [512usize, 2048] {
        let p = params(n, 8, false);
        let c = build_lc0(&p, &Config::default()).unwrap();
        assert_eq!(c.outputs().len(), n / 2);
        let bound = n / 128;
        let placements: Vec<Vec<usize>> = (0..256)
            .map(|t| {
                let k = if t % 2 == 0 { bound } else { rng.random_range(0..=bound) };
                index::sample(&mut rng, n, k).into_vec()
            })
            .collect();
        check_all(&c, &p, &placements, &mut rng);
        // reals packed into as few chunks as possible stress the routing
        let packed: Vec<Vec<usize>> = (0..64)
            .map(|_| {
                let start = rng.random_range(0..n / 8 - bound) * 8;
                (start..start + bound).collect()
            })
            .collect();
        check_all(&c, &p, &packed, &mut rng);
    }
}

#[test]
fn indivisible_and_metadata() {
    let c = build_lc0(&params(512, 4, false), &Config::default()).unwrap();
    assert!(c.check_indivisible().is_ok());
    assert_eq!(c.meta("family"), Some("lc0"));
    assert_eq!(c.metadata().get("sparsity").map(String::as_str), Some("1/128"));
    assert!(build_lc0(&LooseCompactParams::new(4, 4, 16), &Config::default()).is_err());
}
