use std::sync::OnceLock;

use compaction_forge::circuit::{bristol, lower, opnet};
use compaction_forge::compact::build_compact;
use compaction_forge::ctx::Config;
use compaction_forge::harness::{elem_inputs, elem_outputs, from_bits, run_many, to_bits};
use compaction_forge::keysort::{build_sort, SortParams};
use compaction_forge::oracle::{check_compact, check_select_all, oracle_select, oracle_sort_keys};
use compaction_forge::selection::{build_select, build_select_all, SelectParams};
use compaction_forge::tinyw::build_tinyw;
use compaction_forge::{Circuit, Strategy};
use proptest::prelude::*;

fn ladder() -> &'static Circuit {
    static C: OnceLock<Circuit> = OnceLock::new();
    C.get_or_init(|| build_compact(256, 4, Strategy::Ladder, &Config::default()).unwrap())
}

fn tiny() -> &'static Circuit {
    static C: OnceLock<Circuit> = OnceLock::new();
    C.get_or_init(|| build_tinyw(40, 3, &Config::default()).unwrap())
}

fn sorter() -> &'static Circuit {
    static C: OnceLock<Circuit> = OnceLock::new();
    C.get_or_init(|| build_sort(&SortParams::new(70, 3, 6), &Config::default()).unwrap())
}

fn selectors() -> &'static [(usize, Circuit, Circuit)] {
    static C: OnceLock<Vec<(usize, Circuit, Circuit)>> = OnceLock::new();
    C.get_or_init(|| {
        [1usize, 37, 75, 150]
            .into_iter()
            .map(|m| {
                let p = SelectParams { n: 150, w: 5, m, tc: Strategy::Ladder };
                let cfg = Config::default();
                (m, build_select(&p, &cfg).unwrap(), build_select_all(&p, &cfg).unwrap())
            })
            .collect()
    })
}

fn run_one(c: &Circuit, input: Vec<Vec<bool>>) -> Vec<Vec<bool>> {
    let (mut outs, viol) = run_many(c, &[input], true).unwrap();
    assert!(viol.is_empty(), "probe fired: {:?}", viol[0]);
    outs.pop().unwrap()
}

fn values(c: &Circuit, xs: &[u64], w: usize) -> Vec<u64> {
    run_one(c, xs.iter().map(|&x| to_bits(x, w)).collect())
        .iter()
        .map(|b| from_bits(b))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn base_compaction_contract(fp in proptest::collection::vec((any::<bool>(), 0u64..8), 1..20)) {
        let (f, p): (Vec<bool>, Vec<u64>) = fp.into_iter().unzip();
        let c = build_compact(f.len(), 3, Strategy::Base, &Config::default()).unwrap();
        let (of, op) = elem_outputs(&run_one(&c, elem_inputs(&f, &p, 3)));
        prop_assert!(check_compact(&f, &p, &of, &op).is_ok());
    }

    #[test]
    fn ladder_compaction_contract(
        density in 0.0f64..1.0,
        raw in proptest::collection::vec((0.0f64..1.0, 0u64..16), 256),
    ) {
        let f: Vec<bool> = raw.iter().map(|r| r.0 < density).collect();
        let p: Vec<u64> = raw.iter().map(|r| r.1).collect();
        let (of, op) = elem_outputs(&run_one(ladder(), elem_inputs(&f, &p, 4)));
        prop_assert!(check_compact(&f, &p, &of, &op).is_ok());
    }

    #[test]
    fn tinyw_output_is_sorted_permutation(fp in proptest::collection::vec((any::<bool>(), 0u64..8), 40)) {
        let (f, p): (Vec<bool>, Vec<u64>) = fp.into_iter().unzip();
        let (of, op) = elem_outputs(&run_one(tiny(), elem_inputs(&f, &p, 3)));
        // extended value: complemented flag above the payload
        let ext = |f: &[bool], p: &[u64]| -> Vec<u64> {
            f.iter().zip(p).map(|(&f, &p)| u64::from(!f) << 3 | p).collect()
        };
        let got = ext(&of, &op);
        let mut want = ext(&f, &p);
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn sort_keys_nondecreasing_and_multiset_kept(kp in proptest::collection::vec((0u64..6, 0u64..8), 70)) {
        let c = sorter();
        let ins: Vec<Vec<bool>> = kp
            .iter()
            .map(|&(k, p)| {
                let mut b = to_bits(k, 3);
                b.extend(to_bits(p, 3));
                b
            })
            .collect();
        let got: Vec<(u64, u64)> = run_one(c, ins).iter().map(|b| (from_bits(&b[..3]), from_bits(&b[3..]))).collect();
        prop_assert!(oracle_sort_keys(&kp, &got).is_ok());
    }

    #[test]
    fn select_returns_rank_value(xs in proptest::collection::vec(0u64..32, 150), which in 0usize..4) {
        let (m, sel, all) = &selectors()[which];
        let v = values(sel, &xs, 5);
        prop_assert_eq!(v[0], oracle_select(&xs, *m).unwrap());
        let smallest = values(all, &xs, 5);
        prop_assert!(check_select_all(&xs, *m, &smallest).is_ok());
    }

    #[test]
    fn small_select_every_rank(xs in proptest::collection::vec(0u64..8, 1..12)) {
        let n = xs.len();
        for m in 1..=n {
            let p = SelectParams { n, w: 3, m, tc: Strategy::Base };
            let c = build_select(&p, &Config::default()).unwrap();
            prop_assert_eq!(values(&c, &xs, 3)[0], oracle_select(&xs, m).unwrap());
        }
    }

    #[test]
    fn exports_round_trip(fp in proptest::collection::vec((any::<bool>(), 0u64..4), 1..10)) {
        let (f, p): (Vec<bool>, Vec<u64>) = fp.into_iter().unzip();
        let c = build_compact(f.len(), 2, Strategy::Base, &Config::default()).unwrap();
        let ins = elem_inputs(&f, &p, 2);
        let want = c.eval(&ins).unwrap();
        let back = opnet::from_str(&opnet::to_string(&c)).unwrap();
        prop_assert_eq!(back.eval(&ins).unwrap(), want.clone());
        let text = bristol::to_string(&lower(&c)).unwrap();
        prop_assert_eq!(bristol::interpret(&text, &ins).unwrap(), want.clone());
        prop_assert_eq!(bristol::from_str(&text).unwrap().eval(&ins).unwrap(), want);
    }
}
