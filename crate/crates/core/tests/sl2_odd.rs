use bbgroup::bbox::{Matrix, Sampler};
use bbgroup::field::{mat2_mul, random_sl2, FiniteField, FqTables};
use bbgroup::harness::Sl2Instance;
use bbgroup::report::StageLog;
use bbgroup::sl2_odd::{find_standard_generators, odd_field_order, recover_psl2, streamlined_sl2p, verify_recovery, weyl_disambiguate};
use bbgroup::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mat(t: &FqTables, entries: [u32; 4]) -> Matrix {
    let _ = t;
    Matrix { n: 2, entries: entries.to_vec() }
}

fn inverse(t: &FqTables, m: &Matrix) -> Matrix {
    m.det_inverse(t).1.unwrap()
}

fn same_mod_sign(t: &FqTables, a: &Matrix, b: &Matrix, psl: bool) -> bool {
    a == b || (psl && *a == b.neg(t))
}

#[test]
fn rejects_bad_field_orders() {
    for (p, k) in [(3u64, 1usize), (7, 1), (2, 2), (3, 3), (9, 1)] {
        assert!(matches!(odd_field_order(p, k), Err(Error::InvalidInput(_))), "{p}^{k}");
    }
    assert_eq!(odd_field_order(5, 1).unwrap(), 5);
    assert_eq!(odd_field_order(3, 4).unwrap(), 81);
}

#[test]
fn standard_generators_have_the_right_shape() {
    for (p, k) in [(13u64, 1usize), (3, 2), (5, 2)] {
        let mut ok = 0;
        for seed in 0..20u64 {
            let psl = seed % 2 == 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let inst = Sl2Instance::new(p, k, psl, true, seed, &mut rng).unwrap();
            let x = inst.harness.group();
            let mut sampler = Sampler::new(x.as_ref(), &mut rng);
            let Ok(g) = find_standard_generators(&x, p, k, &mut sampler) else {
                continue;
            };
            let t = inst.tables();
            let q = t.q() as u64;
            assert_eq!(g.is_psl, psl);
            assert_eq!(g.order_h, if psl { (q - 1) / 2 } else { q - 1 });
            // checked on decoded matrices
            let u = inst.standard_matrix(&g.u);
            let h = inst.standard_matrix(&g.h);
            let n = inst.standard_matrix(&g.n);
            let tr = |m: &Matrix| t.add(m.get(0, 0), m.get(1, 1));
            assert!(tr(&u) == t.from_int(2) || (psl && tr(&u) == t.from_int(-2)));
            assert!(!u.is_scalar());
            assert_eq!(tr(&n), 0, "n must be a Weyl element");
            let hn = inverse(t, &n).mul(t, &h).mul(t, &n);
            assert!(same_mod_sign(t, &hn, &inverse(t, &h), psl));
            ok += 1;
        }
        assert!(ok >= 18, "q = {p}^{k}: {ok}/20");
    }
}

#[test]
fn weyl_element_satisfies_the_steinberg_relation() {
    for (p, k) in [(13u64, 1usize), (3, 2), (17, 1)] {
        for psl in [false, true] {
            let mut rng = ChaCha8Rng::seed_from_u64(p * 31 + psl as u64);
            let inst = Sl2Instance::new(p, k, psl, true, 4, &mut rng).unwrap();
            let x = inst.harness.group();
            let mut sampler = Sampler::new(x.as_ref(), &mut rng);
            let g = find_standard_generators(&x, p, k, &mut sampler).unwrap();
            let w = weyl_disambiguate(x.as_ref(), &g).unwrap();
            assert_eq!(w.passed, 1);
            assert_eq!(w.candidates, if psl { 1 } else { 2 });
            // n = u (n^-1 u n) u with u = u(1) is the defining property of n(1)
            let t = inst.tables();
            let u = inst.standard_matrix(&g.u);
            let n = inst.standard_matrix(&w.n_tilde);
            let rhs = u.mul(t, &inverse(t, &n)).mul(t, &u).mul(t, &n).mul(t, &u);
            assert!(same_mod_sign(t, &n, &rhs, psl));
            let n2 = n.mul(t, &n);
            let minus_one = mat(t, [t.neg(1), 0, 0, t.neg(1)]);
            assert!(same_mod_sign(t, &n2, &minus_one, psl));
            if !psl {
                assert_eq!(n2, minus_one);
            }
        }
    }
}

fn recover_and_verify(p: u64, k: usize, psl: bool, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = Sl2Instance::new(p, k, psl, true, seed, &mut rng).unwrap();
    let x = inst.harness.group();
    let mut log = StageLog::default();
    let rec = recover_psl2(x.clone(), p, k, &mut rng, &mut log).unwrap();
    let v = verify_recovery(x.as_ref(), &rec, 200, &mut rng).unwrap();
    assert!(v.success(), "{v:?}");
    assert_eq!(v.phi_homomorphism_checks, "200/200");

    // Phi composed with decoding is an automorphism of (P)SL_2(q): check it
    // on matrices with the table arithmetic, independent of the black box.
    let t = inst.tables();
    let std = &rec.standard;
    let code = |m: &[Vec<u64>; 4]| Matrix {
        n: 2,
        entries: m.iter().map(|e| std.encode(e) as u32).collect(),
    };
    let image = |m: &[Vec<u64>; 4]| inst.standard_matrix(&rec.phi_standard(m).unwrap());
    for _ in 0..30 {
        let a = random_sl2(std, &mut rng);
        let b = random_sl2(std, &mut rng);
        let lhs = image(&mat2_mul(std, &a, &b));
        let rhs = image(&a).mul(t, &image(&b));
        assert!(same_mod_sign(t, &lhs, &rhs, psl));
        let ca = code(&a);
        if !ca.is_scalar() {
            assert!(!image(&a).is_scalar());
        }
    }
    let (one, zero) = (std.one(), std.zero());
    let id = image(&[one.clone(), zero.clone(), zero.clone(), one.clone()]);
    assert!(id.is_scalar() && same_mod_sign(t, &id, &Matrix::identity(2), psl));
    let u1 = rec.phi_standard(&[one.clone(), one.clone(), zero, one]).unwrap();
    assert!(x.eq(&u1, &rec.generators.u));
}

#[test]
fn recovery_q13() {
    recover_and_verify(13, 1, false, 1);
    recover_and_verify(13, 1, true, 2);
}

#[test]
fn recovery_q9() {
    recover_and_verify(3, 2, false, 3);
    recover_and_verify(3, 2, true, 4);
}

#[test]
fn recovery_q81() {
    recover_and_verify(3, 4, false, 5);
}

#[test]
fn recovery_q25_psl() {
    recover_and_verify(5, 2, true, 6);
}

#[test]
fn recovery_is_deterministic_per_seed() {
    let run = |opaque: bool| {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let inst = Sl2Instance::new(13, 1, false, opaque, 77, &mut rng).unwrap();
        let mut log = StageLog::default();
        let rec = recover_psl2(inst.harness.group(), 13, 1, &mut rng, &mut log).unwrap();
        let v = verify_recovery(inst.harness.group().as_ref(), &rec, 50, &mut rng).unwrap();
        (log.without_timings(), v, rec.recovered.structure_constants())
    };
    let a = run(true);
    let b = run(true);
    let c = run(false);
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.2, b.2);
    assert_eq!(a.0, c.0);
    assert_eq!(a.1, c.1);
}

#[test]
fn apply_field_agrees_with_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let inst = Sl2Instance::new(3, 2, false, true, 12, &mut rng).unwrap();
    let x = inst.harness.group();
    let mut log = StageLog::default();
    let rec = recover_psl2(x.clone(), 3, 2, &mut rng, &mut log).unwrap();
    let f = rec.phi.field();
    let k = &rec.recovered;
    for _ in 0..20 {
        let m = random_sl2(k, &mut rng);
        let strings = [0, 1, 2, 3].map(|i| f.from_coords(&m[i]));
        let a = rec.phi.apply(&m).unwrap();
        let b = rec.phi.apply_field(&strings).unwrap();
        assert!(x.eq(&a, &b));
    }
    let bad = [k.one(), k.one(), k.one(), k.one()];
    assert!(matches!(rec.phi.apply(&bad), Err(Error::InvalidInput(_))));
}

#[test]
fn streamlined_prime_field_morphism() {
    for (p, psl) in [(13u64, false), (13, true), (5, false), (5, true), (17, false)] {
        let mut rng = ChaCha8Rng::seed_from_u64(p + psl as u64);
        let inst = Sl2Instance::new(p, 1, psl, true, 9, &mut rng).unwrap();
        let x = inst.harness.group();
        let mut sampler = Sampler::new(x.as_ref(), &mut rng);
        let m = streamlined_sl2p(x.clone(), p, &mut sampler).unwrap_or_else(|e| panic!("{p} {psl}: {e}"));
        assert_eq!(bbgroup::arith::gcd(m.ell, p - 1), 1);
        assert_eq!(m.check(200, &mut rng).unwrap(), 200);
        // h(t) decodes to a torus element acting on u as t^-2
        let t = inst.tables();
        let u = inst.standard_matrix(&m.u);
        let h = inst.standard_matrix(&m.h);
        let uh = inverse(t, &h).mul(t, &u).mul(t, &h);
        let tinv = bbgroup::arith::inv_mod(m.t, p).unwrap();
        let mut expected = Matrix::identity(2);
        for _ in 0..(tinv * tinv % p) {
            expected = expected.mul(t, &u);
        }
        assert!(same_mod_sign(t, &uh, &expected, psl));
        assert!(m.apply([1, 1, 1, 1]).is_err());
    }
}

mod properties {
    use super::*;
    use bbgroup::sl2_odd::Recovery;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn q25() -> &'static (Sl2Instance, Recovery) {
        static CELL: OnceLock<(Sl2Instance, Recovery)> = OnceLock::new();
        CELL.get_or_init(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(25);
            let inst = Sl2Instance::new(5, 2, false, true, 25, &mut rng).unwrap();
            let mut log = StageLog::default();
            let rec = recover_psl2(inst.harness.group(), 5, 2, &mut rng, &mut log).unwrap();
            (inst, rec)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn phi_is_multiplicative(s1 in any::<u64>(), s2 in any::<u64>()) {
            let (inst, rec) = q25();
            let x = inst.harness.group();
            let std = &rec.standard;
            let a = random_sl2(std, &mut ChaCha8Rng::seed_from_u64(s1));
            let b = random_sl2(std, &mut ChaCha8Rng::seed_from_u64(s2));
            let lhs = rec.phi_standard(&mat2_mul(std, &a, &b)).unwrap();
            let rhs = x.mul(&rec.phi_standard(&a).unwrap(), &rec.phi_standard(&b).unwrap());
            prop_assert!(x.eq(&lhs, &rhs));
        }

        #[test]
        fn phi_is_injective_on_sl2(s1 in any::<u64>(), s2 in any::<u64>()) {
            let (inst, rec) = q25();
            let x = inst.harness.group();
            let std = &rec.standard;
            let a = random_sl2(std, &mut ChaCha8Rng::seed_from_u64(s1));
            let b = random_sl2(std, &mut ChaCha8Rng::seed_from_u64(s2));
            let equal = x.eq(&rec.phi_standard(&a).unwrap(), &rec.phi_standard(&b).unwrap());
            prop_assert_eq!(equal, a == b);
        }

        #[test]
        fn field_isomorphism_preserves_operations(i in 0u64..25, j in 0u64..25) {
            let (_, rec) = q25();
            let (s, r) = (&rec.standard, &rec.recovered);
            let (a, b) = (s.decode(i), s.decode(j));
            prop_assert_eq!(rec.iso.apply(&s.mul(&a, &b)), r.mul(&rec.iso.apply(&a), &rec.iso.apply(&b)));
            prop_assert_eq!(rec.iso.apply(&s.add(&a, &b)), r.add(&rec.iso.apply(&a), &rec.iso.apply(&b)));
            prop_assert_eq!(rec.iso.apply_inverse(&rec.iso.apply(&a)), a);
        }
    }
}
