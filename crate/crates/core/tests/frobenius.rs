use bbgroup::bbox::{ElementString, Matrix, Sampler};
use bbgroup::frobenius::{build_shift_blackbox, frobenius_on_sl2, FrobeniusData};
use bbgroup::harness::{enumerate_closure, Sl2Instance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Frobenius data from the hidden standard generators u(1), h(w), n(1).
fn standard_frobenius(inst: &Sl2Instance) -> FrobeniusData {
    let t = inst.tables();
    let w = t.generator();
    let enc = |e: Vec<u32>| inst.harness.encode(&inst.hide(&Matrix::new(2, e).unwrap()));
    let u = enc(vec![1, 1, 0, 1]);
    let h = enc(vec![w, 0, 0, t.inv(w).unwrap()]);
    let n = enc(vec![0, 1, t.neg(1), 0]);
    frobenius_on_sl2(inst.harness.group(), &u, &h, &n, t.p(), t.k()).unwrap()
}

#[test]
fn degree_one_is_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inst = Sl2Instance::new(13, 1, false, true, 1, &mut rng).unwrap();
    let fd = standard_frobenius(&inst);
    let y = fd.y.group();
    let mut s = Sampler::new(y.as_ref(), &mut rng);
    for _ in 0..50 {
        let a = s.sample();
        assert!(y.eq(&fd.phi(&a), &a));
    }
}

#[test]
fn q81_shift_has_order_four_and_powers_h() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let inst = Sl2Instance::new(3, 4, false, true, 2, &mut rng).unwrap();
    let fd = standard_frobenius(&inst);
    let y = fd.y.group();
    assert_eq!(y.bit_len(), 4 * inst.harness.group().bit_len());
    assert!(y.eq(&fd.phi(&fd.bar_h), &y.pow(&fd.bar_h, 3)));
    assert!(y.eq(&fd.phi(&fd.bar_u), &fd.bar_u));
    assert!(y.eq(&fd.phi(&fd.bar_w), &fd.bar_w));
    let t = inst.tables();
    let mut s = Sampler::new(y.as_ref(), &mut rng);
    for _ in 0..100 {
        let a = s.sample();
        let mut b = a.clone();
        for _ in 0..4 {
            b = fd.phi(&b);
        }
        assert!(y.eq(&a, &b));
        // coordinate 1 is the entrywise cube of coordinate 0 in the standard basis
        let c = fd.y.coordinates(&a);
        let m0 = inst.unhide(&inst.harness.decode(&c[0]));
        let m1 = inst.unhide(&inst.harness.decode(&c[1]));
        assert_eq!(m1, m0.map(|x| t.pow(x, 3)));
    }
}

#[test]
fn q9_shift_is_multiplicative_and_projection_onto() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inst = Sl2Instance::new(3, 2, false, true, 3, &mut rng).unwrap();
    let fd = standard_frobenius(&inst);
    let y = fd.y.group();
    let mut s = Sampler::new(y.as_ref(), &mut rng);
    for _ in 0..100 {
        let (a, b) = (s.sample(), s.sample());
        assert!(y.eq(&fd.phi(&y.mul(&a, &b)), &y.mul(&fd.phi(&a), &fd.phi(&b))));
    }
    let images: Vec<Matrix> = [&fd.bar_u, &fd.bar_w, &fd.bar_h]
        .iter()
        .map(|z| inst.harness.decode(&fd.y.project(z)))
        .collect();
    assert_eq!(enumerate_closure(inst.harness.backend(), &images, 10_000).unwrap().len(), 720);
}

#[test]
fn torus_tuples_in_sl2_9() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inst = Sl2Instance::new(3, 2, false, true, 4, &mut rng).unwrap();
    let x = inst.harness.group();
    let t = inst.tables();
    let w = t.generator();
    let h = inst.harness.encode(&inst.hide(&Matrix::new(2, vec![w, 0, 0, t.inv(w).unwrap()]).unwrap()));
    let h3 = x.pow(&h, 3);
    let y = build_shift_blackbox(x.clone(), &[vec![h.clone()], vec![h3.clone()]]).unwrap();
    let yg = y.group();
    let mut s = Sampler::new(yg.as_ref(), &mut rng);
    for _ in 0..20 {
        let a = s.sample();
        let c = y.coordinates(&a);
        let m0 = inst.unhide(&inst.harness.decode(&c[0]));
        let m1 = inst.unhide(&inst.harness.decode(&c[1]));
        assert_eq!(m1, m0.map(|v| t.pow(v, 3)));
        assert!(yg.eq(&y.shift_by(&a, 2), &a));
    }
    let one = build_shift_blackbox(x.clone(), &[x.generators().to_vec()]).unwrap();
    let g: &ElementString = &one.bar_gens()[0];
    assert!(one.group().eq(&one.shift(g), g));
}
