use proptest::prelude::*;

use hfk_core::gf2::{image_basis, kernel_basis, rank};
use hfk_core::{
    alexander, build_cone, delta_sequence, epsilons, hf_ranks, hfk_rank_reduced, hfk_ranks,
    is_simple, large_surgery_ranks, make_staircase, parse, random_symmetric_complex,
    recognize_staircase, serialize, upsilon, BitMatrix, BitVec, KnotComplex, SliceKind,
    StaircaseSpec, Subspace,
};

fn matrix() -> impl Strategy<Value = BitMatrix> {
    (1usize..24, 1usize..24).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
            let mut m = BitMatrix::zeros(r, c);
            for (k, &b) in bits.iter().enumerate() {
                m.set(k / c, k % c, b).unwrap();
            }
            m
        })
    })
}

fn random_complex() -> impl Strategy<Value = KnotComplex> {
    (1u32..=3, 1usize..=9, any::<u64>())
        .prop_map(|(levels, dim, seed)| random_symmetric_complex(levels, dim, seed))
}

fn staircase_spec() -> impl Strategy<Value = StaircaseSpec> {
    (1u8..16, -4i64..=4).prop_map(|(mask, d)| {
        let steps = (1..=4).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        StaircaseSpec::new(steps, d).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_nullity(m in matrix()) {
        let r = rank(&m);
        prop_assert_eq!(r, image_basis(&m).dim());
        prop_assert_eq!(r, rank(&m.transpose()));
        let ker = kernel_basis(&m);
        prop_assert_eq!(ker.dim() + r, m.cols());
        for v in ker.basis() {
            prop_assert!(m.apply(v).is_zero());
        }
    }

    #[test]
    fn canonical_form_ignores_spanning_set(m in matrix()) {
        let columns: Vec<BitVec> = (0..m.cols()).map(|j| m.column(j)).collect();
        let forward = Subspace::span(m.rows(), columns.clone()).unwrap();
        let backward = Subspace::span(m.rows(), columns.into_iter().rev()).unwrap();
        prop_assert_eq!(forward.canonicalize(), backward.canonicalize());
        prop_assert_eq!(forward.canonicalize().canonicalize(), forward.canonicalize());
    }

    #[test]
    fn whole_homology_counts(b in random_complex()) {
        let d = b.differential();
        prop_assert!(d.mul(d).unwrap().is_zero());
        prop_assert_eq!(b.homology_rank() + 2 * rank(d), b.dim());
    }

    #[test]
    fn duality_and_levels(b in random_complex()) {
        let g = b.genus().unwrap_or(0);
        let min = b.generators().iter().map(|x| x.a).min().unwrap();
        prop_assert_eq!(-min, g);
        for s in -g..=g {
            let at = b.slice(SliceKind::At, s);
            prop_assert_eq!(at.dim(), b.slice(SliceKind::At, -s).dim());
            prop_assert_eq!(at.homology_rank(), at.dim());
        }
    }

    #[test]
    fn connecting_map_exact_sequence(b in random_complex()) {
        let g = b.genus().unwrap_or(0);
        for s in -g - 1..=g {
            let le = b.slice(SliceKind::Le, s).homology_rank();
            let gt = b.slice(SliceKind::Gt, s).homology_rank();
            let p = rank(&b.p_map(s));
            prop_assert_eq!(le + gt - 2 * p, b.homology_rank(), "s = {}", s);
        }
    }

    #[test]
    fn format_round_trip(b in random_complex()) {
        let text = serialize(&b);
        let back = parse(text.as_bytes()).unwrap();
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back.to_raw(), b.to_raw());
    }

    #[test]
    fn reduced_cone_and_support(b in random_complex(), n in 1i64..=6) {
        let g = b.genus().unwrap_or(0);
        let report = hfk_ranks(&b, n).unwrap();
        for s in (1 - g)..=(n + g) {
            prop_assert_eq!(hfk_rank_reduced(&b, n, s).unwrap(), report.get(&s), "s = {}", s);
        }
        prop_assert!(report.ranks.keys().all(|&s| 1 - g <= s && s <= n + g));
        prop_assert_eq!(build_cone(&b, n, -g).unwrap().homology_rank(), 0);
        prop_assert_eq!(build_cone(&b, n, n + g + 1).unwrap().homology_rank(), 0);
    }

    #[test]
    fn simplicity_routes_agree(b in random_complex(), n in 1i64..=6) {
        let verdict = is_simple(&b, n).unwrap();
        prop_assert!(verdict.hfk_total >= verdict.hf_total);
        prop_assert_eq!(verdict.simple, verdict.hfk_total == verdict.hf_total);
        prop_assert_eq!(verdict.simple, verdict.witness_levels.is_empty());
        prop_assert_eq!(hf_ranks(&b, n).unwrap().total(), verdict.hf_total);
    }

    #[test]
    fn upsilon_is_chain_map(b in random_complex(), n in 1i64..=5) {
        let g = b.genus().unwrap_or(0);
        for s in (1 - g)..=(n + g) {
            prop_assert!(upsilon(&b, n, s).is_ok());
        }
    }

    #[test]
    fn large_surgery_for_rank_one(seed in any::<u64>(), extra in 0i64..=2) {
        let b = random_symmetric_complex(3, 9, seed);
        prop_assume!(b.homology_rank() == 1);
        let g = b.genus().unwrap_or(0);
        let n = (2 * g).max(1) + extra;
        for s in (1 - g)..=g {
            prop_assert!(large_surgery_ranks(&b, n, s).unwrap().identified(), "s = {}", s);
        }
        let all_vanish = epsilons(&b).iter().all(|e| e.vanishes());
        prop_assert_eq!(is_simple(&b, n).unwrap().simple, all_vanish);
        if all_vanish {
            prop_assert!(recognize_staircase(&b).is_ok());
        }
    }

    #[test]
    fn staircase_round_trip(spec in staircase_spec()) {
        let b = make_staircase(&spec);
        prop_assert_eq!(b.homology_rank(), 1);
        prop_assert_eq!(b.genus().unwrap(), spec.genus());
        prop_assert_eq!(recognize_staircase(&b).unwrap(), spec.clone());
        let back = parse(serialize(&b).as_bytes()).unwrap();
        prop_assert_eq!(recognize_staircase(&back).unwrap(), spec);
    }

    #[test]
    fn delta_symmetry(spec in staircase_spec()) {
        let delta = delta_sequence(&spec);
        for i in -spec.k()..=spec.k() {
            prop_assert_eq!(delta[&-i], 2 * spec.level(i) + delta[&i], "i = {}", i);
        }
    }

    #[test]
    fn staircase_alexander(spec in staircase_spec()) {
        let poly = alexander(&make_staircase(&spec)).unwrap();
        prop_assert!(poly.is_symmetric());
        prop_assert_eq!(poly.at_one(), 1);
        let nonzero: Vec<i64> = poly.coeffs.values().copied().filter(|&c| c != 0).collect();
        prop_assert_eq!(nonzero.len(), 2 * spec.steps().len() + 1);
        prop_assert!(nonzero.iter().all(|c| c.abs() == 1));
        prop_assert!(nonzero.windows(2).all(|w| w[0] == -w[1]));
    }

    #[test]
    fn staircases_simple_exactly_from_twice_genus(spec in staircase_spec(), n in 1i64..=9) {
        let b = make_staircase(&spec);
        let verdict = is_simple(&b, n).unwrap();
        prop_assert_eq!(verdict.simple, n >= 2 * spec.genus());
    }
}
