use bbgroup::bbox::{ElementString, Matrix, Sampler};
use bbgroup::field::FiniteField;
use bbgroup::harness::{enumerate_closure, random_sl2_matrix, Sl2Instance};
use bbgroup::report::StageLog;
use bbgroup::sl2_char2::{build_frame, field_element_order, recover_sl2_char2, verify_char2, Char2Field, Char2Recovery};
use bbgroup::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

fn instance(n: usize, opaque: bool, seed: u64) -> (Sl2Instance, ElementString, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = Sl2Instance::new(2, n, false, opaque, seed, &mut rng).unwrap();
    let r = inst.revealed_involution(&mut rng).unwrap();
    (inst, r, rng)
}

fn recover(n: usize, seed: u64) -> (Sl2Instance, Char2Recovery, ChaCha8Rng) {
    let (inst, r, mut rng) = instance(n, true, seed);
    let mut log = StageLog::default();
    let rec = recover_sl2_char2(inst.harness.group(), &r, None, &mut rng, &mut log).unwrap();
    (inst, rec, rng)
}

fn whole_group(inst: &Sl2Instance) -> HashSet<Matrix> {
    let gens: Vec<Matrix> = inst.harness.group().generators().iter().map(|g| inst.harness.decode(g)).collect();
    enumerate_closure(inst.harness.backend(), &gens, 1 << 20).unwrap()
}

fn decoded_span(inst: &Sl2Instance, gens: &[ElementString]) -> HashSet<Matrix> {
    let gens: Vec<Matrix> = gens.iter().map(|g| inst.harness.decode(g)).collect();
    enumerate_closure(inst.harness.backend(), &gens, 1 << 20).unwrap()
}

fn conj(inst: &Sl2Instance, a: &Matrix, g: &Matrix) -> Matrix {
    let t = inst.tables();
    g.det_inverse(t).1.unwrap().mul(t, a).mul(t, g)
}

#[test]
fn frame_of_sl2_4() {
    let (inst, r, mut rng) = instance(2, true, 1);
    let x = inst.harness.group();
    let mut sampler = Sampler::new(x.as_ref(), &mut rng);
    let f = build_frame(x.as_ref(), &r, None, &mut sampler).unwrap();
    assert_eq!(f.n, 2);
    assert_eq!(f.u_size, Some(4));
    assert_eq!(decoded_span(&inst, &f.u_gens).len(), 4);
    assert_eq!(decoded_span(&inst, &f.v_gens).len(), 4);
    let s3 = decoded_span(&inst, &[f.theta.clone(), r.clone()]);
    assert_eq!(s3.len(), 6);
    assert!(x.is_identity(&x.pow(&f.theta, 3)));
    assert!(x.eq(&x.conj(&f.theta, &r), &x.inv(&f.theta)));
    for i in [&f.v, &f.w] {
        assert!(!x.is_identity(i) && x.is_identity(&x.mul(i, i)));
    }
}

#[test]
fn frame_of_sl2_8_and_bad_input() {
    let (inst, r, mut rng) = instance(3, true, 2);
    let x = inst.harness.group();
    let mut sampler = Sampler::new(x.as_ref(), &mut rng);
    let f = build_frame(x.as_ref(), &r, None, &mut sampler).unwrap();
    assert_eq!(f.u_size, Some(8));
    let f3 = build_frame(x.as_ref(), &r, Some(3), &mut sampler).unwrap();
    assert_eq!(f3.n, 3);
    assert!(matches!(build_frame(x.as_ref(), &r, Some(2), &mut sampler), Err(Error::ContractViolation(_))));
    let theta = f.theta.clone();
    assert!(matches!(build_frame(x.as_ref(), &theta, None, &mut sampler), Err(Error::InvalidInput(_))));
}

#[test]
fn field_of_sl2_4_exhaustively() {
    let (inst, rec, mut rng) = recover(2, 3);
    let f = &rec.field;
    let x = inst.harness.group();
    let mut sampler = Sampler::new(x.as_ref(), &mut rng);
    let u = decoded_span(&inst, &rec.frame.u_gens);
    assert_eq!(u.len(), 4);
    // every element of U is a field element; the nonzero ones have x^3 = 1
    let mut seen: Vec<ElementString> = Vec::new();
    for _ in 0..60 {
        let a = f.random(&mut sampler).unwrap();
        if !seen.iter().any(|s| x.eq(s, &a.s)) {
            seen.push(a.s.clone());
        }
        if !f.is_zero(&a) {
            assert!(f.eq(&f.pow(&a, 3), &f.one()));
        }
    }
    assert_eq!(seen.len(), 4);
    for _ in 0..50 {
        let a = f.random(&mut sampler).unwrap();
        assert!(f.eq(&f.mul(&f.one(), &a), &a));
        assert!(f.is_zero(&f.add(&a, &a, &mut sampler).unwrap()));
    }
}

#[test]
fn parametrization_identities() {
    let (inst, rec, mut rng) = recover(3, 4);
    let f = &rec.field;
    let x = inst.harness.group();
    assert!(x.eq(&f.n(&f.one()).unwrap(), &rec.frame.w));
    assert!(x.is_identity(&f.h(&f.one()).unwrap()));
    let mut sampler = Sampler::new(x.as_ref(), &mut rng);
    let mut found = false;
    for _ in 0..40 {
        let a = f.random(&mut sampler).unwrap();
        if f.is_zero(&a) || field_element_order(f, &a).unwrap() != 7 {
            continue;
        }
        assert_eq!(x.order(&f.h(&a).unwrap()).unwrap(), 7);
        found = true;
    }
    assert!(found);
    assert!(field_element_order(f, &f.zero()).is_err());
}

#[test]
fn psi_on_special_matrices_and_pairs() {
    let (inst, rec, mut rng) = recover(4, 5);
    let x = inst.harness.group();
    let std = &rec.embedding.standard;
    let (one, zero) = (std.one(), std.zero());
    let id = rec.psi_standard(&[one.clone(), zero.clone(), zero.clone(), one.clone()]).unwrap();
    assert!(x.is_identity(&id));
    let swap = rec.psi_standard(&[zero.clone(), one.clone(), one.clone(), zero.clone()]).unwrap();
    assert!(x.eq(&swap, &rec.frame.w));
    assert!(matches!(rec.psi_standard(&[one.clone(), one.clone(), one.clone(), one]), Err(Error::InvalidInput(_))));
    let v = verify_char2(&rec, 200, 50, &mut rng).unwrap();
    assert!(v.success(), "{v:?}");
    assert_eq!(v.psi_homomorphism_checks, "200/200");
    assert_eq!(v.carrier_size, Some(16));
}

#[test]
fn psi_is_an_automorphism_after_decoding() {
    // Psi followed by decoding is a homomorphism SL_2(q) -> SL_2(q) given by
    // matrices; check it with table arithmetic, away from the black box.
    let (inst, rec, mut rng) = recover(3, 6);
    let t = inst.tables();
    let std = &rec.embedding.standard;
    let image = |m: &[Vec<u64>; 4]| inst.harness.decode(&rec.psi_standard(m).unwrap());
    let mut images = HashSet::new();
    for _ in 0..40 {
        let a = bbgroup::field::random_sl2(std, &mut rng);
        let b = bbgroup::field::random_sl2(std, &mut rng);
        let ab = bbgroup::field::mat2_mul(std, &a, &b);
        assert_eq!(image(&ab), image(&a).mul(t, &image(&b)));
        images.insert(image(&a));
    }
    // all of SL_2(8) is hit
    let all: Vec<[Vec<u64>; 4]> = {
        let els: Vec<Vec<u64>> = std.elements().collect();
        let mut out = Vec::new();
        for a in &els {
            for b in &els {
                for c in &els {
                    for d in &els {
                        let m = [a.clone(), b.clone(), c.clone(), d.clone()];
                        if bbgroup::field::mat2_det(std, &m) == std.one() {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    };
    let hit: HashSet<Matrix> = all.iter().map(image).collect();
    assert_eq!(hit.len(), 504);
    assert_eq!(hit, whole_group(&inst));
}

#[test]
fn subgroups_match_brute_force() {
    for n in [2usize, 3] {
        let (inst, rec, mut rng) = recover(n, 10 + n as u64);
        let t = inst.tables();
        let group = whole_group(&inst);
        let r = inst.harness.decode(&rec.frame.r);
        let v = inst.harness.decode(&rec.frame.v);
        let centralizer = |i: &Matrix| -> HashSet<Matrix> { group.iter().filter(|g| g.mul(t, i) == i.mul(t, g)).cloned().collect() };
        let u_set = decoded_span(&inst, &rec.frame.u_gens);
        assert_eq!(u_set, centralizer(&r));
        assert_eq!(decoded_span(&inst, &rec.frame.v_gens), centralizer(&v));
        // Borel subgroup and the torus cosets of field elements
        let borel: Vec<&Matrix> = group.iter().filter(|b| u_set.contains(&conj(&inst, &r, b))).collect();
        assert_eq!(borel.len(), u_set.len() * (u_set.len() - 1));
        let f = &rec.field;
        let x = inst.harness.group();
        let mut sampler = Sampler::new(x.as_ref(), &mut rng);
        for _ in 0..10 {
            let a = f.random(&mut sampler).unwrap();
            if f.is_zero(&a) {
                continue;
            }
            let s = inst.harness.decode(&a.s);
            let ta = inst.harness.decode(&a.t);
            let coset: HashSet<Matrix> = u_set.iter().map(|u| u.mul(t, &ta)).collect();
            let expected: HashSet<Matrix> = group.iter().filter(|b| conj(&inst, &r, b) == s).cloned().collect();
            assert_eq!(coset, expected);
        }
    }
}

#[test]
fn unipotent_subgroup_is_trivial_intersection() {
    for n in [2usize, 3, 4] {
        let (inst, rec, mut rng) = recover(n, 20 + n as u64);
        let u_set = decoded_span(&inst, &rec.frame.u_gens);
        for _ in 0..50 {
            let g = random_sl2_matrix(inst.tables(), &mut rng);
            let g = inst.hide(&g);
            let meet = u_set.iter().filter(|u| u_set.contains(&conj(&inst, u, &g))).count();
            assert!(meet == 1 || meet == u_set.len(), "intersection of size {meet}");
        }
    }
}

#[test]
fn torus_transitivity_is_unique() {
    for n in [2usize, 3] {
        let (inst, rec, _) = recover(n, 30 + n as u64);
        let t = inst.tables();
        let group = whole_group(&inst);
        let u_set = decoded_span(&inst, &rec.frame.u_gens);
        let r = inst.harness.decode(&rec.frame.r);
        let borel: Vec<Matrix> = group.iter().filter(|b| u_set.contains(&conj(&inst, &r, b))).cloned().collect();
        // cosets of U in B
        let mut cosets: Vec<HashSet<Matrix>> = Vec::new();
        for b in &borel {
            if cosets.iter().any(|c| c.contains(b)) {
                continue;
            }
            cosets.push(u_set.iter().map(|u| u.mul(t, b)).collect());
        }
        assert_eq!(cosets.len(), u_set.len() - 1);
        let nonzero: Vec<&Matrix> = u_set.iter().filter(|u| **u != Matrix::identity(2)).collect();
        for s in &nonzero {
            for target in &nonzero {
                let hits = cosets.iter().filter(|c| conj(&inst, s, c.iter().next().unwrap()) == **target).count();
                assert_eq!(hits, 1);
            }
        }
    }
}

#[test]
fn representatives_do_not_matter() {
    let (inst, rec, mut rng) = recover(3, 40);
    let f: &Char2Field = &rec.field;
    let x = inst.harness.group();
    let mut sampler = Sampler::new(x.as_ref(), &mut rng);
    for _ in 0..20 {
        let a = f.random(&mut sampler).unwrap();
        let b = f.random(&mut sampler).unwrap();
        if f.is_zero(&a) {
            continue;
        }
        let a2 = f.from_unipotent(&a.s, &mut sampler).unwrap();
        assert!(f.torus_equiv(&a.t, &a2.t));
        assert!(f.eq(&f.mul(&a, &b), &f.mul(&a2, &b)));
        assert!(f.eq(&f.inv(&a).unwrap(), &f.inv(&a2).unwrap()));
    }
}

#[test]
fn char2_runs_are_deterministic_and_opacity_blind() {
    let run = |opaque: bool| {
        let (inst, r, mut rng) = instance(3, opaque, 50);
        let mut log = StageLog::default();
        let rec = recover_sl2_char2(inst.harness.group(), &r, None, &mut rng, &mut log).unwrap();
        let v = verify_char2(&rec, 50, 20, &mut rng).unwrap();
        (log.without_timings(), v)
    };
    let a = run(true);
    assert_eq!(a, run(true));
    assert_eq!(a, run(false));
}

mod properties {
    use super::*;
    use bbgroup::field::{mat2_mul, random_sl2};
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn q16() -> &'static (Sl2Instance, Char2Recovery) {
        static CELL: OnceLock<(Sl2Instance, Char2Recovery)> = OnceLock::new();
        CELL.get_or_init(|| {
            let (inst, rec, _) = recover(4, 16);
            (inst, rec)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn psi_is_multiplicative(s1 in any::<u64>(), s2 in any::<u64>()) {
            let (inst, rec) = q16();
            let x = inst.harness.group();
            let std = &rec.embedding.standard;
            let a = random_sl2(std, &mut ChaCha8Rng::seed_from_u64(s1));
            let b = random_sl2(std, &mut ChaCha8Rng::seed_from_u64(s2));
            let lhs = rec.psi_standard(&mat2_mul(std, &a, &b)).unwrap();
            let rhs = x.mul(&rec.psi_standard(&a).unwrap(), &rec.psi_standard(&b).unwrap());
            prop_assert!(x.eq(&lhs, &rhs));
        }

        #[test]
        fn embedding_is_a_field_isomorphism(i in 0u64..16, j in 0u64..16) {
            let (_, rec) = q16();
            let (e, f, s) = (&rec.embedding, &rec.field, &rec.embedding.standard);
            let (a, b) = (s.decode(i), s.decode(j));
            let (fa, fb) = (e.apply(f, &a), e.apply(f, &b));
            prop_assert!(f.eq(&e.apply(f, &s.mul(&a, &b)), &f.mul(&fa, &fb)));
            prop_assert!(f.sum_is(&fa, &fb, &e.apply(f, &s.add(&a, &b))));
            prop_assert_eq!(f.is_zero(&fa), s.is_zero(&a));
        }

        #[test]
        fn field_is_commutative_with_inverses(seed in any::<u64>()) {
            let (inst, rec) = q16();
            let f = &rec.field;
            let x = inst.harness.group();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sampler = Sampler::new(x.as_ref(), &mut rng);
            let a = f.random(&mut sampler).unwrap();
            let b = f.random(&mut sampler).unwrap();
            prop_assert!(f.eq(&f.mul(&a, &b), &f.mul(&b, &a)));
            prop_assert!(f.is_zero(&f.add(&a, &a, &mut sampler).unwrap()));
            if let Some(ai) = f.inv(&a) {
                prop_assert!(f.eq(&f.mul(&a, &ai), &f.one()));
            }
        }
    }
}
