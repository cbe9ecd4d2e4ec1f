use bbgroup::bbfield::{build_field_on_u, explicit_isomorphism, power_to_ppd, ppd_exponent, ppd_prime, structure_constants, BlackBoxField};
use bbgroup::bbox::Matrix;
use bbgroup::field::{ExplicitField, FiniteField};
use bbgroup::frobenius::frobenius_on_sl2;
use bbgroup::harness::{enumerate_closure, Sl2Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn field_for(p: u64, k: usize, seed: u64) -> (Sl2Instance, BlackBoxField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = Sl2Instance::new(p, k, false, true, seed, &mut rng).unwrap();
    let [u, h, n] = inst.hidden_generators();
    let x = inst.harness.group();
    let fd = Arc::new(frobenius_on_sl2(x.clone(), &u, &h, &n, p, k).unwrap());
    let y = fd.y.group();
    let ht = ppd_exponent(y.order(&fd.bar_h).unwrap(), p, k as u32).map(|m| y.pow(&fd.bar_h, m));
    let (field, trace) = build_field_on_u(fd, ht.as_ref()).unwrap();
    assert!(trace.a.is_symmetric());
    assert_ne!(trace.det, 0);
    (inst, field)
}

/// Upper-right entry of the standard-basis matrix of a carrier element.
fn standard_value(inst: &Sl2Instance, f: &BlackBoxField, x: &bbgroup::bbox::ElementString) -> u32 {
    let m = inst.standard_matrix(&f.project(x));
    assert_eq!((m.get(0, 0), m.get(1, 0), m.get(1, 1)), (1, 0, 1), "carrier element is not in U");
    m.get(0, 1)
}

#[test]
fn ppd_prime_examples() {
    assert_eq!(ppd_prime(2, 6).unwrap(), None);
    assert_eq!(ppd_prime(7, 2).unwrap(), None);
    assert_eq!(ppd_prime(3, 4).unwrap(), Some(5));
    assert_eq!(ppd_prime(3, 2).unwrap(), None);
    assert_eq!(ppd_prime(13, 1).unwrap(), Some(3));
    assert!(ppd_prime(4, 2).is_err());
}

#[test]
fn ppd_exponent_examples() {
    assert_eq!(ppd_exponent(80, 3, 4), Some(16));
    assert_eq!(ppd_exponent(5, 3, 4), Some(1));
    assert_eq!(ppd_exponent(8, 3, 4), None);
}

#[test]
fn power_to_ppd_fails_without_ppd_part() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = Sl2Instance::new(3, 4, false, true, 1, &mut rng).unwrap();
    let x = inst.harness.group();
    let [_, h, _] = inst.hidden_generators();
    // h has order 80
    let ht = power_to_ppd(x.as_ref(), &h, 3, 4).unwrap();
    assert_eq!(x.order(&ht).unwrap(), 5);
    assert!(x.eq(&power_to_ppd(x.as_ref(), &ht, 3, 4).unwrap(), &ht));
    let h8 = x.pow(&h, 10);
    assert!(power_to_ppd(x.as_ref(), &h8, 3, 4).is_err());
}

#[test]
fn q9_field_is_exhaustively_a_field() {
    let (inst, f) = field_for(3, 2, 2);
    let all: Vec<_> = f.explicit().elements().map(|a| f.from_coords(&a)).collect();
    for x in &all[1..] {
        assert!(f.eq(&f.pow(x, 8).unwrap(), &f.one()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let w = f.random(&mut rng);
        assert!(f.eq(&f.mul(&f.one(), &w).unwrap(), &w));
    }
    // reading the prime field
    assert_eq!(f.read_prime_field(&f.zero()).unwrap(), 0);
    let std = ExplicitField::standard(3, 2).unwrap();
    let s = &f.trace_data().basis[0];
    let v = std.decode(standard_value(&inst, &f, s) as u64);
    assert_eq!(f.read_prime_field(&f.trace(s)).unwrap(), std.trace(&v));
}

#[test]
fn prime_field_reading_in_characteristic_13() {
    let (_, f) = field_for(13, 1, 4);
    assert_eq!(f.read_prime_field(&f.add(&f.one(), &f.one())).unwrap(), 2);
    assert_eq!(structure_constants(&f).constant(0, 0, 0), 1);
}

#[test]
fn q81_carrier_and_unity_order() {
    let (inst, f) = field_for(3, 4, 5);
    let y = f.group();
    assert!(y.is_identity(&y.pow(&f.one(), 3)));
    assert!(!y.is_identity(&f.one()));
    let gens: Vec<Matrix> = f.trace_data().basis.iter().map(|s| inst.harness.decode(&f.project(s))).collect();
    assert_eq!(enumerate_closure(inst.harness.backend(), &gens, 1000).unwrap().len(), 81);
}

fn check_axioms(f: &BlackBoxField, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
        let ab = f.mul(&a, &b).unwrap();
        assert!(f.eq(&f.mul(&ab, &c).unwrap(), &f.mul(&a, &f.mul(&b, &c).unwrap()).unwrap()));
        assert!(f.eq(&ab, &f.mul(&b, &a).unwrap()));
        let lhs = f.mul(&a, &f.add(&b, &c)).unwrap();
        let rhs = f.add(&ab, &f.mul(&a, &c).unwrap());
        assert!(f.eq(&lhs, &rhs));
        assert!(f.eq(&f.add(&a, &f.zero()), &a));
        assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
        if !f.is_zero(&a) {
            let ai = f.inv(&a).unwrap().unwrap();
            assert!(f.eq(&f.mul(&a, &ai).unwrap(), &f.one()));
        }
        // traces are Frobenius-fixed, the pairing is symmetric
        let t = f.trace(&a);
        assert!(f.eq(&f.frobenius_data().phi(&t), &t));
        let tab = f.read_prime_field(&f.trace(&ab)).unwrap();
        let tba = f.read_prime_field(&f.trace(&f.mul(&b, &a).unwrap())).unwrap();
        assert_eq!(tab, tba);
    }
}

#[test]
fn field_axioms_on_random_triples() {
    for (p, k, seed) in [(3u64, 2usize, 6u64), (5, 2, 7), (13, 1, 8), (3, 4, 9)] {
        let (_, f) = field_for(p, k, seed);
        check_axioms(&f, seed);
    }
}

#[test]
fn recovered_constants_match_standard_arithmetic() {
    for (p, k, seed) in [(3u64, 2usize, 10u64), (5, 2, 11), (3, 4, 12), (13, 1, 13)] {
        let (inst, f) = field_for(p, k, seed);
        let rec = structure_constants(&f);
        let std = ExplicitField::standard(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let iso = explicit_isomorphism(&std, &rec, &mut rng).unwrap();
        let elems: Vec<Vec<u64>> = std.elements().collect();
        for a in &elems {
            assert_eq!(iso.apply_inverse(&iso.apply(a)), *a);
            for b in &elems {
                assert_eq!(iso.apply(&std.mul(a, b)), rec.mul(&iso.apply(a), &iso.apply(b)));
                assert_eq!(iso.apply(&std.add(a, b)), rec.add(&iso.apply(a), &iso.apply(b)));
            }
        }
        // the carrier realizes the standard field up to a Galois twist
        let images: Vec<u64> = elems.iter().map(|a| standard_value(&inst, &f, &f.from_coords(&iso.apply(a))) as u64).collect();
        let twist = (0..k as u32).find(|&j| {
            elems.iter().zip(&images).all(|(a, &img)| std.encode(&std.pow(a, p.pow(j))) == img)
        });
        assert!(twist.is_some(), "q = {}", p.pow(k as u32));
    }
}

#[test]
fn explicit_isomorphism_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let a = ExplicitField::from_modulus(3, &[1, 0, 1]).unwrap();
    let b = ExplicitField::from_modulus(3, &[2, 1, 1]).unwrap();
    let same = explicit_isomorphism(&a, &a, &mut rng).unwrap();
    for x in a.elements() {
        assert_eq!(a.mul(&same.apply(&x), &same.apply(&x)), same.apply(&a.mul(&x, &x)));
    }
    let iso = explicit_isomorphism(&a, &b, &mut rng).unwrap();
    let x = a.basis_vector(1);
    let img = iso.apply(&x);
    assert_eq!(b.add(&b.mul(&img, &img), &b.one()), b.zero());
    for s in a.elements() {
        for t in a.elements() {
            assert_eq!(iso.apply(&a.mul(&s, &t)), b.mul(&iso.apply(&s), &iso.apply(&t)));
        }
    }
    let f27 = ExplicitField::standard(3, 3).unwrap();
    assert!(explicit_isomorphism(&a, &f27, &mut rng).is_err());
    // large enough to use root splitting
    let big_a = ExplicitField::standard(101, 2).unwrap();
    let big_b = ExplicitField::from_modulus(101, &[3, 0, 1]).unwrap();
    let iso = explicit_isomorphism(&big_a, &big_b, &mut rng).unwrap();
    for _ in 0..200 {
        let (s, t) = (big_a.random(&mut rng), big_a.random(&mut rng));
        assert_eq!(iso.apply(&big_a.mul(&s, &t)), big_b.mul(&iso.apply(&s), &iso.apply(&t)));
    }
}
