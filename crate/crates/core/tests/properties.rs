//! Property tests for the arithmetic invariants: reduction confluence,
//! homomorphism laws, Smith-form correctness, Magnus multiplicativity.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use freecover_core::matrix::{smith_normal_form, IntMatrix};
use freecover_core::nilpotent::magnus;
use freecover_core::word::{Endomorphism, Word};

fn letter(rank: usize) -> impl Strategy<Value = i32> {
    (1..=rank as i32).prop_flat_map(|i| prop_oneof![Just(i), Just(-i)])
}

fn raw_letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(letter(rank), 0..=max_len)
}

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    raw_letters(rank, max_len).prop_map(move |raw| Word::reduce(rank, &raw).unwrap())
}

fn endomorphism(rank: usize, max_len: usize) -> impl Strategy<Value = Endomorphism> {
    prop::collection::vec(word(rank, max_len), rank..=rank)
        .prop_map(|images| Endomorphism::new(images).unwrap())
}

/// Splices cancelling pairs into a letter sequence at given positions.
fn splice_pairs(base: &[i32], inserts: &[(usize, i32)]) -> Vec<i32> {
    let mut out = base.to_vec();
    for &(pos, l) in inserts {
        let at = pos % (out.len() + 1);
        out.insert(at, -l);
        out.insert(at, l);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_is_confluent(
        base in raw_letters(3, 12),
        inserts in prop::collection::vec((any::<usize>(), letter(3)), 0..6),
    ) {
        let reduced = Word::reduce(3, &base).unwrap();
        let spliced = splice_pairs(&base, &inserts);
        prop_assert_eq!(Word::reduce(3, &spliced).unwrap(), reduced);
    }

    #[test]
    fn reduce_is_idempotent(base in raw_letters(3, 16)) {
        let once = Word::reduce(3, &base).unwrap();
        let twice = Word::reduce(3, once.letters()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn parse_print_round_trip(w in word(3, 12)) {
        prop_assert_eq!(Word::parse(&w.to_string(), 3).unwrap(), w);
    }

    #[test]
    fn apply_respects_reduction(
        phi in endomorphism(2, 5),
        raw in raw_letters(2, 10),
    ) {
        // naive substitution first, reduce last
        let mut substituted: Vec<i32> = Vec::new();
        for &l in &raw {
            let img = phi.image(l.unsigned_abs() as usize);
            if l > 0 {
                substituted.extend_from_slice(img.letters());
            } else {
                substituted.extend(img.letters().iter().rev().map(|&m| -m));
            }
        }
        let naive = Word::reduce(2, &substituted).unwrap();
        let reduced_first = phi.apply(&Word::reduce(2, &raw).unwrap()).unwrap();
        prop_assert_eq!(naive, reduced_first);
    }

    #[test]
    fn composition_is_associative(
        f in endomorphism(2, 4),
        g in endomorphism(2, 4),
        h in endomorphism(2, 4),
    ) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let id = Endomorphism::identity(2);
        prop_assert_eq!(id.compose(&f).unwrap(), f.clone());
        prop_assert_eq!(f.compose(&id).unwrap(), f);
    }

    #[test]
    fn commutators_cancel_in_pairs(a in word(2, 6), b in word(2, 6)) {
        let ab = Word::commutator(&a, &b).unwrap();
        let ba = Word::commutator(&b, &a).unwrap();
        prop_assert!(ab.multiply(&ba).unwrap().is_empty());
    }

    #[test]
    fn cyclic_reduction_conjugates_back(w in word(3, 12)) {
        let (core, conj) = w.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        let rebuilt = conj
            .invert()
            .multiply(&core)
            .unwrap()
            .multiply(&conj)
            .unwrap();
        prop_assert_eq!(rebuilt, w);
    }

    #[test]
    fn smith_form_is_correct(
        entries in prop::collection::vec(-9i64..=9, 9..=9),
    ) {
        let m = IntMatrix::from_rows(&[
            entries[0..3].to_vec(),
            entries[3..6].to_vec(),
            entries[6..9].to_vec(),
        ]);
        let snf = smith_normal_form(&m);
        let product = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        prop_assert_eq!(&product, &snf.d);
        prop_assert_eq!(snf.u.determinant().unwrap().abs(), BigInt::one());
        prop_assert_eq!(snf.v.determinant().unwrap().abs(), BigInt::one());
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        // |det| equals the product of the invariant factors
        let det = m.determinant().unwrap().abs();
        let prod: BigInt = diag.iter().product();
        prop_assert_eq!(det, prod.abs());
    }

    #[test]
    fn magnus_is_multiplicative(u in word(2, 8), v in word(2, 8)) {
        let cap = 4;
        let lhs = magnus(&u.multiply(&v).unwrap(), cap).unwrap();
        let rhs = magnus(&u, cap).unwrap().mul(&magnus(&v, cap).unwrap());
        prop_assert_eq!(lhs, rhs);
        let inv = magnus(&u.invert(), cap).unwrap();
        prop_assert!(magnus(&u, cap).unwrap().mul(&inv).is_one());
    }
}
