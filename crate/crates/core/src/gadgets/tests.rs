use proptest::prelude::*;

use super::*;
use crate::circuit::{Builder, Bundle, Circuit};
use crate::ctx::{Config, Ctx};

fn to_bits(v: u64, w: usize) -> Vec<bool> {
    (0..w).rev().map(|i| v >> i & 1 == 1).collect()
}

fn from_bits(b: &[bool]) -> u64 {
    b.iter().fold(0, |a, &x| a << 1 | x as u64)
}

/// Two k-bit inputs, outputs from `f`.
fn binary(k: usize, f: impl Fn(&mut Builder, &Num, &Num) -> Vec<Bundle>) -> Circuit {
    let mut b = Builder::new();
    let x = Num::wide(b.input(k).0);
    let y = Num::wide(b.input(k).0);
    let outs = f(&mut b, &x, &y);
    b.finish(outs).unwrap()
}

#[test]
fn comparator_three_way_exhaustive() {
    for k in 1..=6 {
        let c = binary(k, |b, x, y| {
            let (e, g) = compare(b, x, y);
            vec![vec![e, g].into(), vec![gt(b, x, y), ge(b, x, y), eq(b, x, y), lt(b, x, y), le(b, x, y)].into()]
        });
        for x in 0..1u64 << k {
            for y in 0..1u64 << k {
                let o = c.eval(&[to_bits(x, k), to_bits(y, k)]).unwrap();
                assert_eq!(o[0], vec![x == y, x > y], "k={k} x={x} y={y}");
                assert_eq!(o[1], vec![x > y, x >= y, x == y, x < y, x <= y]);
            }
        }
    }
}

#[test]
fn comparator_gate_counts() {
    for k in 1..=16 {
        let mut b = Builder::new();
        let x = Num::wide(b.input(k).0);
        let y = Num::wide(b.input(k).0);
        let s0 = b.stats().bool_gates;
        compare(&mut b, &x, &y);
        assert_eq!(b.stats().bool_gates - s0, 2 * k as u64 - 1);
        let s1 = b.stats().bool_gates;
        gt(&mut b, &x, &y);
        assert_eq!(b.stats().bool_gates - s1, k as u64);
    }
}

#[test]
fn five_vs_three() {
    let c = binary(3, |b, x, y| {
        let (e, g) = compare(b, x, y);
        vec![vec![e, g].into()]
    });
    assert_eq!(c.eval(&[to_bits(5, 3), to_bits(3, 3)]).unwrap()[0], vec![false, true]);
}

#[test]
fn adder_exhaustive_and_budget() {
    for k in 1..=6 {
        let c = binary(k, |b, x, y| {
            let s0 = b.stats().bool_gates;
            let s = add(b, x, y);
            assert!(b.stats().bool_gates - s0 <= k as u64);
            assert_eq!(s.width(), k + 1);
            let d = sub_wrap(b, x, y, k);
            vec![s.bits.into(), d.bits.into()]
        });
        for x in 0..1u64 << k {
            for y in 0..1u64 << k {
                let o = c.eval(&[to_bits(x, k), to_bits(y, k)]).unwrap();
                assert_eq!(from_bits(&o[0]), x + y);
                assert_eq!(from_bits(&o[1]), x.wrapping_sub(y) & ((1 << k) - 1));
            }
        }
    }
}

#[test]
fn seven_plus_one() {
    let c = binary(3, |b, x, y| vec![add(b, x, y).bits.into()]);
    assert_eq!(c.eval(&[to_bits(7, 3), to_bits(1, 3)]).unwrap()[0], to_bits(8, 4));
    assert_eq!(c.eval(&[to_bits(0, 3), to_bits(5, 3)]).unwrap()[0], to_bits(5, 4));
}

fn unary_circuit(n: usize, f: impl Fn(&mut Builder, &[WireId]) -> Vec<Bundle>) -> Circuit {
    let mut b = Builder::new();
    let x = b.input(n);
    let outs = f(&mut b, x.wires());
    b.finish(outs).unwrap()
}

#[test]
fn count_ones_exhaustive_small() {
    for n in 1..=12 {
        let c = unary_circuit(n, |b, x| vec![count_ones(b, x).bits.into()]);
        assert_eq!(c.outputs()[0].width(), bits_for(n as u64));
        for v in 0..1u64 << n {
            let o = c.eval(&[to_bits(v, n)]).unwrap();
            assert_eq!(from_bits(&o[0]), v.count_ones() as u64);
        }
    }
}

#[test]
fn count_ones_examples() {
    let c = unary_circuit(4, |b, x| vec![count_ones(b, x).bits.into()]);
    assert_eq!(from_bits(&c.eval(&[to_bits(0b1011, 4)]).unwrap()[0]), 3);
    assert_eq!(from_bits(&c.eval(&[to_bits(0, 4)]).unwrap()[0]), 0);
    let c = unary_circuit(6, |b, x| vec![count_ones(b, x).bits.into()]);
    assert!(c.stats().bool_gates <= 36);
    assert_eq!(c.stats().lowered_estimate, crate::circuit::lower(&c).gate_count() as u64);
}

#[test]
fn gadget_budgets() {
    let mut n = 4;
    while n <= 256 {
        let c = unary_circuit(n, |b, x| vec![count_ones(b, x).bits.into()]);
        assert!(c.stats().bool_gates <= 6 * n as u64, "count_ones n={n}");
        let log = ceil_log2(n as u64 + 1) as u64;
        let c = unary_circuit(n, |b, x| prefix_sum(b, x).into_iter().map(|p| p.bits.into()).collect());
        assert!(c.stats().bool_gates <= n as u64 * log, "prefix_sum k={n}");
        let kw = bits_for(n as u64);
        let c = unary_circuit(kw, |b, x| vec![binary_to_unary(b, n, &Num::new(x.to_vec(), n as u64)).into()]);
        assert!(c.stats().bool_gates <= 2 * n as u64, "b2u n={n}: {}", c.stats().bool_gates);
        let mut ctx = Ctx::new(Config::default());
        let t = ctx.b.input(4);
        let labels: Vec<Num> = (0..n).map(|_| Num::wide(ctx.b.input(4).0)).collect();
        let items: Vec<Item> = (0..n).map(|_| {
            let p = ctx.b.input(3);
            ctx.leaf(p)
        }).collect();
        let before = ctx.b.stats().clone();
        find_in_array(&mut ctx, &labels, &Num::wide(t.0), &items);
        let d = ctx.b.stats().since(&before);
        assert_eq!(d.selector_gates, n as u64);
        assert!(d.bool_gates <= n as u64 * (4 + 2));
        n *= 2;
    }
}

#[test]
fn prefix_sum_example() {
    let c = unary_circuit(4, |b, x| prefix_sum(b, x).into_iter().map(|p| p.bits.into()).collect());
    let o = c.eval(&[to_bits(0b1101, 4)]).unwrap();
    let got: Vec<u64> = o.iter().map(|v| from_bits(v)).collect();
    assert_eq!(got, vec![1, 2, 2, 3]);
}

#[test]
fn binary_to_unary_exhaustive() {
    for n in 1..=64usize {
        let kw = bits_for(n as u64);
        let c = unary_circuit(kw, |b, x| vec![binary_to_unary(b, n, &Num::wide(x.to_vec())).into()]);
        for k in 0..1u64 << kw {
            let o = c.eval(&[to_bits(k, kw)]).unwrap();
            let want: Vec<bool> = (0..n as u64).map(|j| k <= n as u64 && j >= k).collect();
            assert_eq!(o[0], want, "n={n} k={k}");
        }
    }
}

#[test]
fn b2u_eight_of_three() {
    let c = unary_circuit(4, |b, x| vec![binary_to_unary(b, 8, &Num::wide(x.to_vec())).into()]);
    let o = c.eval(&[to_bits(3, 4)]).unwrap();
    assert_eq!(o[0], vec![false, false, false, true, true, true, true, true]);
}

fn find_circuit(n: usize, k: usize, w: usize) -> Circuit {
    let mut ctx = Ctx::new(Config::default());
    let t = Num::wide(ctx.b.input(k).0);
    let labels: Vec<Num> = (0..n).map(|_| Num::wide(ctx.b.input(k).0)).collect();
    let items: Vec<Item> = (0..n).map(|_| {
        let p = ctx.b.input(w);
        ctx.b.mark_payload(p.wires());
        ctx.leaf(p)
    }).collect();
    let (f, it) = find_in_array(&mut ctx, &labels, &t, &items);
    ctx.finish(vec![vec![f].into(), it.b]).unwrap()
}

#[test]
fn find_first_occurrence() {
    let c = find_circuit(3, 3, 4);
    let ins = vec![to_bits(5, 3), to_bits(2, 3), to_bits(5, 3), to_bits(5, 3), to_bits(1, 4), to_bits(2, 4), to_bits(3, 4)];
    let o = c.eval(&ins).unwrap();
    assert_eq!(o, vec![vec![true], to_bits(2, 4)]);
    let mut miss = ins.clone();
    miss[0] = to_bits(7, 3);
    assert_eq!(c.eval(&miss).unwrap(), vec![vec![false], to_bits(0, 4)]);
    assert!(c.check_indivisible().is_ok());
}

fn sort_circuit(n: usize, k: usize, w: usize) -> Circuit {
    let mut ctx = Ctx::new(Config::default());
    let mut items: Vec<Item> = (0..n).map(|_| {
        let x = ctx.b.input(k + w);
        ctx.b.mark_payload(&x.wires()[k..]);
        ctx.leaf(x)
    }).collect();
    sort_network(&mut ctx, &mut items, k);
    let outs = items.into_iter().map(|i| i.b).collect();
    ctx.finish(outs).unwrap()
}

#[test]
fn batcher_sorts_reverse_and_sorted() {
    let c = sort_circuit(8, 4, 2);
    for order in [(0..8).collect::<Vec<u64>>(), (0..8).rev().collect()] {
        let ins: Vec<Vec<bool>> = order.iter().map(|&v| to_bits(v << 2 | (v & 3), 6)).collect();
        let o = c.eval(&ins).unwrap();
        let keys: Vec<u64> = o.iter().map(|b| from_bits(&b[..4])).collect();
        assert_eq!(keys, (0..8).collect::<Vec<_>>());
    }
    assert!(c.check_indivisible().is_ok());
}

#[test]
fn median_of_five_network_exhaustive() {
    // all 5^5 key assignments over 5 values cover every order type
    for code in 0..3125u32 {
        let mut v: Vec<u32> = (0..5).map(|i| code / 5u32.pow(i) % 5).collect();
        let mut s = v.clone();
        s.sort();
        for &(i, j) in &MEDIAN5 {
            if v[i] > v[j] {
                v.swap(i, j);
            }
        }
        assert_eq!(v[2], s[2], "input code {code}");
    }
}

proptest! {
    #[test]
    fn batcher_matches_oracle(n in 1usize..40, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = sort_circuit(n, 5, 3);
        let vals: Vec<u64> = (0..n).map(|_| rng.random_range(0..256)).collect();
        let ins: Vec<Vec<bool>> = vals.iter().map(|&v| to_bits(v, 8)).collect();
        let o = c.eval(&ins).unwrap();
        let mut got: Vec<u64> = o.iter().map(|b| from_bits(b)).collect();
        let keys: Vec<u64> = got.iter().map(|v| v >> 3).collect();
        prop_assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        let mut want = vals.clone();
        want.sort();
        got.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn find_matches_scan(n in 1usize..32, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = find_circuit(n, 3, 5);
        let t = rng.random_range(0..8u64);
        let labels: Vec<u64> = (0..n).map(|_| rng.random_range(0..8)).collect();
        let pays: Vec<u64> = (0..n).map(|_| rng.random_range(0..32)).collect();
        let mut ins = vec![to_bits(t, 3)];
        ins.extend(labels.iter().map(|&l| to_bits(l, 3)));
        ins.extend(pays.iter().map(|&p| to_bits(p, 5)));
        let o = c.eval(&ins).unwrap();
        let want = labels.iter().position(|&l| l == t).map(|i| pays[i]);
        prop_assert_eq!(o[0][0], want.is_some());
        prop_assert_eq!(from_bits(&o[1]), want.unwrap_or(0));
    }

    #[test]
    fn prefix_sum_matches_scan(v in any::<u16>()) {
        let c = unary_circuit(16, |b, x| prefix_sum(b, x).into_iter().map(|p| p.bits.into()).collect());
        let o = c.eval(&[to_bits(v as u64, 16)]).unwrap();
        let mut run = 0;
        for (i, got) in o.iter().enumerate() {
            run += (v >> (15 - i) & 1) as u64;
            prop_assert_eq!(from_bits(got), run);
        }
    }

    #[test]
    fn count_ones_random_large(words in proptest::collection::vec(any::<bool>(), 13..200)) {
        let n = words.len();
        let c = unary_circuit(n, |b, x| vec![count_ones(b, x).bits.into()]);
        let o = c.eval(&[words.clone()]).unwrap();
        prop_assert_eq!(from_bits(&o[0]), words.iter().filter(|&&x| x).count() as u64);
    }
}
