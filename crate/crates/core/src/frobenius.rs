//! Frobenius maps as cyclic shifts.
//!
//! If `X` is generated by `x_1..x_m` and some automorphism `alpha` of order
//! `k` is known only through the tuples `x_j, alpha(x_j), ..., alpha^(k-1)(x_j)`,
//! the subgroup `Y` of `X^k` generated by these tuples carries `alpha` as a
//! rotation of coordinates, and the projection to coordinate 0 is a morphism
//! `Y -> X`.

use crate::bbox::{DirectProduct, ElementString, Sampler, SharedBox, SubgroupBox};
use crate::error::{Error, Result};
use rand::RngCore;
use serde::Serialize;
use std::sync::Arc;

/// `Y <= X^k` with the coordinate rotation.
pub struct ShiftedBlackBox {
    base: SharedBox,
    product: Arc<DirectProduct>,
    group: Arc<SubgroupBox>,
    k: usize,
    bar_gens: Vec<ElementString>,
}

/// Builds `Y` from `k` lists of `m` strings: `gen_tuples[i][j]` is the `i`-th
/// coordinate of the `j`-th generator.
pub fn build_shift_blackbox(x: SharedBox, gen_tuples: &[Vec<ElementString>]) -> Result<ShiftedBlackBox> {
    let k = gen_tuples.len();
    if k == 0 {
        return Err(Error::invalid("need at least one coordinate"));
    }
    let m = gen_tuples[0].len();
    if m == 0 || gen_tuples.iter().any(|t| t.len() != m) {
        return Err(Error::invalid("generator tuples differ in length"));
    }
    let product = Arc::new(DirectProduct::new(vec![x.clone(); k])?);
    let bar_gens: Vec<ElementString> = (0..m)
        .map(|j| product.join(&gen_tuples.iter().map(|t| t[j].clone()).collect::<Vec<_>>()))
        .collect();
    let group = Arc::new(SubgroupBox::new(product.clone(), bar_gens.clone())?);
    Ok(ShiftedBlackBox {
        base: x,
        product,
        group,
        k,
        bar_gens,
    })
}

impl ShiftedBlackBox {
    pub fn group(&self) -> SharedBox {
        self.group.clone()
    }

    pub fn base(&self) -> &SharedBox {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn bar_gens(&self) -> &[ElementString] {
        &self.bar_gens
    }

    /// `(x_0, ..., x_{k-1}) -> (x_1, ..., x_{k-1}, x_0)`.
    pub fn shift(&self, y: &ElementString) -> ElementString {
        self.shift_by(y, 1)
    }

    pub fn shift_by(&self, y: &ElementString, i: usize) -> ElementString {
        let mut parts = self.product.split(y);
        parts.rotate_left(i % self.k);
        self.product.join(&parts)
    }

    /// Coordinate 0, the morphism `Y -> X`.
    pub fn project(&self, y: &ElementString) -> ElementString {
        self.product.component(y, 0)
    }

    pub fn coordinates(&self, y: &ElementString) -> Vec<ElementString> {
        self.product.split(y)
    }

    pub fn tuple(&self, xs: &[ElementString]) -> ElementString {
        self.product.join(xs)
    }

    /// `(x, x, ..., x)`.
    pub fn diagonal(&self, x: &ElementString) -> ElementString {
        self.product.join(&vec![x.clone(); self.k])
    }
}

/// The Frobenius map of a black box `(P)SL_2(p^k)` realized as the shift on
/// `Y`, together with the lifted generators.
pub struct FrobeniusData {
    pub y: ShiftedBlackBox,
    /// `(u, ..., u)`
    pub bar_u: ElementString,
    /// `(n, ..., n)`
    pub bar_w: ElementString,
    /// `(h, h^p, ..., h^(p^(k-1)))`
    pub bar_h: ElementString,
    pub p: u64,
    pub k: usize,
}

impl FrobeniusData {
    pub fn phi(&self, y: &ElementString) -> ElementString {
        self.y.shift(y)
    }
}

/// Frobenius on `X` from generators `u = u(1)`, `h = h(t)` for `t` generating
/// `F_q^*`, and `n = n(1)`: the map `u -> u`, `n -> n`, `h -> h^p` extends to
/// the field automorphism `x -> x^p` applied entrywise.
pub fn frobenius_on_sl2(x: SharedBox, u: &ElementString, h: &ElementString, n: &ElementString, p: u64, k: usize) -> Result<FrobeniusData> {
    if k == 0 {
        return Err(Error::invalid("degree must be positive"));
    }
    let mut h_powers = vec![h.clone()];
    for _ in 1..k {
        h_powers.push(x.pow(h_powers.last().unwrap(), p));
    }
    let tuples: Vec<Vec<ElementString>> = (0..k).map(|i| vec![u.clone(), n.clone(), h_powers[i].clone()]).collect();
    let y = build_shift_blackbox(x, &tuples)?;
    let bar_u = y.bar_gens[0].clone();
    let bar_w = y.bar_gens[1].clone();
    let bar_h = y.bar_gens[2].clone();
    Ok(FrobeniusData {
        y,
        bar_u,
        bar_w,
        bar_h,
        p,
        k,
    })
}

/// Outcome of [`verify_frobenius`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrobeniusVerification {
    pub q: u64,
    /// `phi^k = 1` on random elements of `Y`.
    pub phi_order_checks: String,
    pub phi_order_passed: usize,
    pub phi_h_is_power: bool,
    pub phi_fixes_u: bool,
    pub phi_fixes_w: bool,
    pub phi_homomorphism_checks: String,
    pub phi_homomorphism_passed: usize,
    pub samples: usize,
}

impl FrobeniusVerification {
    pub fn success(&self) -> bool {
        self.phi_order_passed == self.samples && self.phi_homomorphism_passed == self.samples && self.phi_h_is_power && self.phi_fixes_u && self.phi_fixes_w
    }
}

/// Checks `phi^k = 1` and multiplicativity on `samples` random elements and
/// pairs, and the action on the lifted generators.
pub fn verify_frobenius(fd: &FrobeniusData, samples: usize, rng: &mut dyn RngCore) -> FrobeniusVerification {
    let y = fd.y.group();
    let mut sampler = Sampler::new(y.as_ref(), rng);
    let mut order_ok = 0;
    let mut hom_ok = 0;
    for _ in 0..samples {
        let a = sampler.sample();
        let mut b = a.clone();
        for _ in 0..fd.k {
            b = fd.phi(&b);
        }
        if y.eq(&b, &a) {
            order_ok += 1;
        }
        let b = sampler.sample();
        if y.eq(&fd.phi(&y.mul(&a, &b)), &y.mul(&fd.phi(&a), &fd.phi(&b))) {
            hom_ok += 1;
        }
    }
    FrobeniusVerification {
        q: fd.p.pow(fd.k as u32),
        phi_order_checks: format!("{order_ok}/{samples}"),
        phi_order_passed: order_ok,
        phi_h_is_power: y.eq(&fd.phi(&fd.bar_h), &y.pow(&fd.bar_h, fd.p)),
        phi_fixes_u: y.eq(&fd.phi(&fd.bar_u), &fd.bar_u),
        phi_fixes_w: y.eq(&fd.phi(&fd.bar_w), &fd.bar_w),
        phi_homomorphism_checks: format!("{hom_ok}/{samples}"),
        phi_homomorphism_passed: hom_ok,
        samples,
    }
}
