use proptest::prelude::*;

use super::*;

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

fn selector_circuit(w: usize) -> Circuit {
    let mut b = Builder::new();
    let c = b.input(1);
    let x = b.input(w);
    let y = b.input(w);
    let o = b.select(c.get(0), &x, &y);
    b.finish(vec![o]).unwrap()
}

#[test]
fn selector_picks_b_on_one() {
    let c = selector_circuit(4);
    let out = c.eval(&[bits("1"), bits("0101"), bits("1100")]).unwrap();
    assert_eq!(out, vec![bits("1100")]);
    let out = c.eval(&[bits("0"), bits("0110"), bits("0110")]).unwrap();
    assert_eq!(out, vec![bits("0110")]);
}

#[test]
fn reverse_selector_zero_fills() {
    let mut b = Builder::new();
    let c = b.input(1);
    let x = b.input(3);
    let (o0, o1) = b.reverse_select(c.get(0), &x);
    let circ = b.finish(vec![o0, o1]).unwrap();
    let out = circ.eval(&[bits("1"), bits("101")]).unwrap();
    assert_eq!(out, vec![bits("000"), bits("101")]);
    let out = circ.eval(&[bits("0"), bits("101")]).unwrap();
    assert_eq!(out, vec![bits("101"), bits("000")]);
}

#[test]
fn width_mismatch_is_rejected() {
    let c = selector_circuit(4);
    let e = c.eval(&[bits("1"), bits("010"), bits("1100")]).unwrap_err();
    assert_eq!(
        e,
        Error::WidthMismatch {
            index: 1,
            expected: 4,
            got: 3
        }
    );
    assert!(matches!(c.eval(&[bits("1")]), Err(Error::InputCount { .. })));
}

#[test]
fn selector_stats_and_lowering_count() {
    let c = selector_circuit(8);
    let s = c.count();
    assert_eq!((s.bool_gates, s.selector_gates, s.selector_width_sum), (0, 1, 8));
    let c4 = selector_circuit(4);
    let l = lower(&c4);
    assert_eq!(l.gate_count(), 12);
    assert_eq!(c4.stats().lowered_estimate, 12);
}

#[test]
fn identity_table_folds_away() {
    let mut b = Builder::new();
    let x = b.input(1);
    let y = b.func1(&[x.get(0)], |r| r == 1);
    assert_eq!(y, x.get(0));
    assert_eq!(b.stats().bool_gates, 0);
}

#[test]
fn truth_table_validation() {
    assert!(TruthTable::new(4, 1, 0).is_err());
    assert!(TruthTable::new(2, 0, 0).is_err());
    assert!(TruthTable::new(1, 1, 0b100).is_err());
    assert!(TruthTable::new(3, 3, 0xff_ffff).is_ok());
}

#[test]
fn three_input_tables_lower_within_seven_per_output() {
    let mut worst = 0;
    for bits in 0..256u32 {
        let t = TruthTable::new(3, 1, bits).unwrap();
        worst = worst.max(lowered_bool_cost(t));
    }
    assert!(worst <= 7, "worst single-output cost {worst}");
}

#[test]
fn bristol_single_and() {
    let mut b = Builder::new();
    let x = b.input(1);
    let y = b.input(1);
    let z = b.bool_gate(TruthTable::AND, &[x.get(0), y.get(0)]);
    let c = b.finish(vec![z.into()]).unwrap();
    let s = bristol::to_string(&c).unwrap();
    assert_eq!(s, "1 3\n2 1 1\n1 1\n\n2 1 0 1 2 AND\n");
    assert!(bristol::lint(&s).is_empty());
}

#[test]
fn bristol_needs_lowering() {
    let c = selector_circuit(2);
    assert_eq!(bristol::to_string(&c), Err(Error::LoweringRequired));
}

#[test]
fn bristol_passthrough_has_copy_gates() {
    let mut b = Builder::new();
    let x = b.input(2);
    let c = b.finish(vec![x.clone(), x]).unwrap();
    let l = lower(&c);
    assert_eq!(l.gate_count(), 0);
    let s = bristol::to_string(&l).unwrap();
    assert!(bristol::lint(&s).is_empty(), "{s}");
    let out = bristol::interpret(&s, &[bits("10")]).unwrap();
    assert_eq!(out, vec![bits("10"), bits("10")]);
}

#[test]
fn empty_circuit_header() {
    let b = Builder::new();
    let c = b.finish(vec![]).unwrap();
    let s = bristol::to_string(&c).unwrap();
    assert_eq!(s, "0 0\n0\n0\n\n");
    assert!(bristol::lint(&s).is_empty());
}

#[test]
fn bristol_parse_errors_carry_line() {
    let bad = "1 3\n2 1 1\n1 1\n\n2 1 0 1 2 NAND\n";
    match bristol::from_str(bad) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
        other => panic!("{other:?}"),
    }
    assert!(!bristol::lint("1 3\r\n2 1 1\n1 1\n\n2 1 0 1 2 AND\n").is_empty());
    assert!(!bristol::lint("1 3\n2 1 1\n1 1\n\n2 1 0 1 2 AND \n").is_empty());
}

#[test]
fn opnet_round_trip_selector() {
    let c = selector_circuit(8);
    let s = opnet::to_string(&c);
    let d = opnet::from_str(&s).unwrap();
    assert_eq!(c.gates().collect::<Vec<_>>(), d.gates().collect::<Vec<_>>());
    assert_eq!(c.count(), d.count());
    assert_eq!(opnet::to_string(&d), s);
}

#[test]
fn opnet_rejects_garbage() {
    assert!(matches!(opnet::from_str("{\n\"version\": 1,\n x"), Err(Error::Parse { line: 3, .. })));
    assert!(opnet::from_str(r#"{"version":1,"inputs":[1],"outputs":[1],"gates":[],"output_wires":[[5]]}"#).is_err());
}

#[test]
fn counting_builder_cannot_seal() {
    let mut b = Builder::counting();
    let x = b.input(2);
    b.and(x.get(0), x.get(1));
    assert_eq!(b.stats().bool_gates, 1);
    assert!(matches!(b.finish(vec![]), Err(Error::CountingOnly)));
}

#[test]
fn indivisible_scan_flags_bool_on_payload() {
    let mut b = Builder::new();
    let c = b.input(1);
    let p = b.input(2);
    b.mark_payload(p.wires());
    let z = b.zeros(2);
    let q = b.select(c.get(0), &p, &z);
    let bad = b.and(q.get(0), c.get(0));
    let circ = b.finish(vec![vec![bad].into()]).unwrap();
    assert!(circ.check_indivisible().is_err());
    let ok = selector_circuit(3);
    assert!(ok.check_indivisible().is_ok());
}

/// A random circuit over every gate kind, built from a seed.
fn random_circuit(seed: u64, gates: usize) -> Circuit {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new();
    let mut pool: Vec<WireId> = b.input(4).wires().to_vec();
    pool.extend(b.input(3).wires());
    for _ in 0..gates {
        let pick = |rng: &mut rand_chacha::ChaCha8Rng, pool: &Vec<WireId>| pool[rng.random_range(0..pool.len())];
        match rng.random_range(0..5) {
            0 => {
                let k = rng.random_range(1..=3u8);
                let o = rng.random_range(1..=3u8);
                let t = TruthTable::new(k, o, rng.random::<u32>() & ((1 << ((o as u32) << k)) - 1)).unwrap();
                let ins: Vec<WireId> = (0..k).map(|_| pick(&mut rng, &pool)).collect();
                pool.extend(b.bool_gate(t, &ins));
            }
            1 => {
                let w = rng.random_range(1..=3);
                let c = pick(&mut rng, &pool);
                let x: Bundle = (0..w).map(|_| pick(&mut rng, &pool)).collect::<Vec<_>>().into();
                let y: Bundle = (0..w).map(|_| pick(&mut rng, &pool)).collect::<Vec<_>>().into();
                pool.extend(b.select(c, &x, &y).wires());
            }
            2 => {
                let w = rng.random_range(1..=3);
                let c = pick(&mut rng, &pool);
                let x: Bundle = (0..w).map(|_| pick(&mut rng, &pool)).collect::<Vec<_>>().into();
                let (p, q) = b.reverse_select(c, &x);
                pool.extend(p.wires());
                pool.extend(q.wires());
            }
            3 => pool.push(b.constant(rng.random())),
            _ => {
                let x = pick(&mut rng, &pool);
                let y = pick(&mut rng, &pool);
                pool.push(b.xor(x, y));
            }
        }
    }
    let outs: Vec<WireId> = pool.iter().rev().take(6).copied().collect();
    b.finish(vec![outs.into()]).unwrap()
}

proptest! {
    #[test]
    fn lowering_preserves_function(seed in any::<u64>(), words in proptest::collection::vec(any::<u64>(), 7)) {
        let c = random_circuit(seed, 40);
        let l = lower(&c);
        prop_assert!(l.is_lowered());
        prop_assert_eq!(l.gate_count() as u64, c.stats().lowered_estimate);
        let ins = vec![words[..4].to_vec(), words[4..].to_vec()];
        prop_assert_eq!(c.eval_lanes(&ins).unwrap(), l.eval_lanes(&ins).unwrap());
    }

    #[test]
    fn topological_and_serialization_stable(seed in any::<u64>()) {
        let c = random_circuit(seed, 30);
        prop_assert!(c.check_topological().is_ok());
        let d = opnet::from_str(&opnet::to_string(&c)).unwrap();
        prop_assert_eq!(c.count(), d.count());
        prop_assert_eq!(c.gates().count(), d.gates().count());
        prop_assert_eq!(c.stats(), &c.count());
    }

    #[test]
    fn bristol_round_trip_agrees(seed in any::<u64>(), x in any::<u8>()) {
        let l = lower(&random_circuit(seed, 25));
        let s = bristol::to_string(&l).unwrap();
        prop_assert!(bristol::lint(&s).is_empty());
        let ins = vec![(0..4).map(|i| x >> i & 1 == 1).collect::<Vec<_>>(), (4..7).map(|i| x >> i & 1 == 1).collect()];
        let want = l.eval(&ins).unwrap();
        prop_assert_eq!(&bristol::interpret(&s, &ins).unwrap(), &want);
        let back = bristol::from_str(&s).unwrap();
        prop_assert_eq!(back.eval(&ins).unwrap(), want);
    }
}
#[test]
fn every_small_table_lowers_correctly() {
    for (k, o) in [(1u8, 1u8), (2, 1), (2, 2), (3, 1), (3, 2)] {
        let span = 1u64 << ((o as u32) << k);
        for bits in (0..span).step_by(((span / 4096).max(1)) as usize) {
            let t = TruthTable::new(k, o, bits as u32).unwrap();
            let mut b = Builder::new();
            let x = b.input(k as usize);
            let y = b.bool_gate(t, x.wires());
            let c = b.finish(vec![y.into()]).unwrap();
            let l = lower(&c);
            for row in 0..1u32 << k {
                let ins = vec![(0..k).map(|i| row >> i & 1 == 1).collect::<Vec<_>>()];
                assert_eq!(c.eval(&ins).unwrap(), l.eval(&ins).unwrap(), "table {bits:#x} row {row}");
            }
        }
    }
}
