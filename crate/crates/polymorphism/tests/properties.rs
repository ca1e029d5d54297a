use polymorphism::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn plurality_is_symmetric(q in 2usize..6, xs in prop::collection::vec(0usize..6, 1..9), seed in any::<u64>()) {
        let xs: Vec<usize> = xs.into_iter().map(|x| x % q).collect();
        let op = make_named_operation(Family::Plurality, xs.len(), q, None).unwrap();
        let mut perm = xs.clone();
        // deterministic shuffle from the seed
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(op.eval(&xs), op.eval(&perm));
    }

    #[test]
    fn plurality_returns_a_most_frequent_element(q in 2usize..6, xs in prop::collection::vec(0usize..6, 1..9)) {
        let xs: Vec<usize> = xs.into_iter().map(|x| x % q).collect();
        let op = make_named_operation(Family::Plurality, xs.len(), q, None).unwrap();
        let out = op.eval(&xs);
        let count = |e: usize| xs.iter().filter(|&&x| x == e).count();
        prop_assert!((0..q).all(|e| count(e) < count(out) || (count(e) == count(out) && e >= out)));
    }

    #[test]
    fn boolean_families_are_odd(l in (0usize..4).prop_map(|i| 2 * i + 1), bits in prop::collection::vec(0usize..2, 9)) {
        let x: Vec<usize> = bits[..l].to_vec();
        let neg: Vec<usize> = x.iter().map(|b| 1 - b).collect();
        for f in [Family::Maj, Family::At] {
            let op = make_named_operation(f, l, 2, None).unwrap();
            prop_assert_eq!(op.eval(&neg), 1 - op.eval(&x));
        }
    }
}
