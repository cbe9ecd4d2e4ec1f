//! Structure recovery for black box `(P)SL_2(q)`, `q = p^k = 1 mod 4`.
//!
//! The pipeline finds standard generators `u`, `h`, `n`, fixes the Weyl
//! element `n(1)`, builds the Frobenius box, the black box field on `U`, its
//! structure constants and an isomorphism to the standard `F_q`, and finally
//! the map `Phi: (P)SL_2(F_q) -> X` through Steinberg generators:
//!
//! - `v(t) = u(-t)^n(1)`
//! - `n(t) = u(t) v(-1/t) u(t)`
//! - `h(t) = n(t) n(-1)`
//!
//! and the Bruhat decomposition of a matrix `(a, b; c, d)`:
//! `u(a/c) n(-1/c) u(d/c)` when `c != 0`, `h(a) u(b/a)` when `c = 0`.

use crate::arith::{gcd, inv_mod, is_prime, primitive_root};
use crate::bbfield::{build_field_on_u, explicit_isomorphism, ppd_exponent, structure_constants, BlackBoxField, FieldIsomorphism, TraceData};
use crate::bbox::{r_part, BlackBoxGroup, ElementString, Matrix, QuotientBox, Sampler, SharedBox};
use crate::error::{Error, Result};
use crate::field::{mat2_det, mat2_mul, random_sl2, ExplicitField, FiniteField, PrimeField};
use crate::frobenius::{frobenius_on_sl2, FrobeniusData};
use crate::involutions::{bray_centralizer, BRAY_BUDGET};
use crate::report::StageLog;
use rand::RngCore;
use serde::Serialize;
use std::sync::Arc;

/// Standard generators of a black box `(P)SL_2(q)`.
#[derive(Debug, Clone)]
pub struct StandardGenerators {
    /// Unipotent, of order `p`.
    pub u: ElementString,
    /// Generator of a maximal split torus normalizing `U = C(u)`.
    pub h: ElementString,
    /// Inverts `h`; `n^2` is central.
    pub n: ElementString,
    pub order_h: u64,
    pub is_psl: bool,
}

/// `q = p^k` after checking the shape of the input.
pub fn odd_field_order(p: u64, k: usize) -> Result<u64> {
    if !is_prime(p) || p == 2 {
        return Err(Error::invalid(format!("{p} is not an odd prime")));
    }
    if k == 0 || k > 16 {
        return Err(Error::invalid("degree must be between 1 and 16"));
    }
    let q = p
        .checked_pow(k as u32)
        .filter(|&q| q < 1 << 20)
        .ok_or_else(|| Error::invalid("field too large"))?;
    if q % 4 != 1 {
        return Err(Error::invalid(format!("q = {q} is not 1 mod 4")));
    }
    Ok(q)
}

/// `x` lies in `U = C(u)` iff `x^p = 1` and `x` commutes with `u`.
fn in_unipotent(x: &dyn BlackBoxGroup, u: &ElementString, p: u64, y: &ElementString) -> bool {
    x.is_identity(&x.pow(y, p)) && x.commute(y, u)
}

/// Finds `u`, `h`, `n` by random search. `sampler` must draw from `x`.
///
/// `u` is the `p`-part of a random element; `h` is the `p'`-part of a random
/// element of the Borel subgroup `N(U)` (recognized by `u^b` in `U`), kept
/// once it generates a full split torus; `n` is an element of the centralizer
/// of the involution of `<h>` (modulo the centre for `SL_2`) that inverts `h`.
pub fn find_standard_generators(x: &SharedBox, p: u64, k: usize, sampler: &mut Sampler) -> Result<StandardGenerators> {
    let q = odd_field_order(p, k)?;
    let bx = x.as_ref();
    let budget = 50 * q;
    let u = (0..budget)
        .map(|_| r_part(bx, &sampler.sample(), p))
        .find(|u| !bx.is_identity(u))
        .ok_or_else(|| Error::monte_carlo("standard generators", "no element of order divisible by p"))?;
    if !bx.is_identity(&bx.pow(&u, p)) {
        return Err(Error::contract("unipotent element has order larger than p"));
    }

    let p_part = bx.exponent().value() / bx.exponent().coprime_part(p);
    let mut found = None;
    for _ in 0..budget {
        let b = sampler.sample();
        if !in_unipotent(bx, &u, p, &bx.conj(&u, &b)) {
            continue;
        }
        let h = bx.pow(&b, p_part);
        let o = bx.order(&h)?;
        if o % 2 == 1 {
            continue;
        }
        let is_sl = bx.commute(&bx.pow(&h, o / 2), &u);
        let full = if is_sl { q - 1 } else { (q - 1) / 2 };
        if o == full {
            found = Some((h, o, is_sl));
            break;
        }
    }
    let (h, order_h, is_sl) = found.ok_or_else(|| Error::monte_carlo("standard generators", "no generator of a split torus in the Borel subgroup"))?;

    let h_inv = bx.inv(&h);
    let (i, quotient): (ElementString, Option<QuotientBox>) = if is_sl {
        let z = bx.pow(&h, order_h / 2);
        (bx.pow(&h, order_h / 4), Some(QuotientBox::new(x.clone(), &z)?))
    } else {
        (bx.pow(&h, order_h / 2), None)
    };
    let bray_box: &dyn BlackBoxGroup = match &quotient {
        Some(qb) => qb,
        None => bx,
    };
    let mut count = BRAY_BUDGET;
    for _ in 0..3 {
        for c in bray_centralizer(bray_box, &i, sampler, count)? {
            // n must also move U, which excludes the torus when h is an involution
            if bx.eq(&bx.conj(&h, &c), &h_inv) && !in_unipotent(bx, &u, p, &bx.conj(&u, &c)) {
                let c2 = bx.mul(&c, &c);
                if bx.commute(&c2, &u) && bx.commute(&c2, &h) {
                    return Ok(StandardGenerators {
                        u,
                        h,
                        n: c,
                        order_h,
                        is_psl: !is_sl,
                    });
                }
            }
        }
        count *= 2;
    }
    Err(Error::monte_carlo("standard generators", "no element of the centralizer inverts h"))
}

/// Outcome of the Weyl element search.
#[derive(Debug, Clone)]
pub struct WeylOutcome {
    /// The string encrypting `n(1)` relative to `u = u(1)`.
    pub n_tilde: ElementString,
    /// Coset elements `h^j n` whose `u v^-1 u` passed the order test.
    pub candidates: usize,
    /// Candidates satisfying the conjugated relation `n(1) = u(1) v(-1) u(1)`.
    pub passed: usize,
}

/// Picks `n(1)` in the coset `<h> n`.
///
/// For `c = h^j n` put `v = (u^-1)^c` and `m = u v^-1 u`; `m` is a Weyl
/// element (order 4 with central square, or order 2 in `PSL_2`) exactly when
/// `c = ±n(1)`. Of these, `n(1)` is the one with
/// `c^h = u^h (u^c)^h u^h`, the `h`-conjugate of `n(1) = u(1) v(-1) u(1)`.
pub fn weyl_disambiguate(x: &dyn BlackBoxGroup, gens: &StandardGenerators) -> Result<WeylOutcome> {
    let StandardGenerators { u, h, n, order_h, is_psl } = gens;
    let u_inv = x.inv(u);
    let u_h = x.conj(u, h);
    let mut c = n.clone();
    let mut candidates = 0;
    let mut passed = Vec::new();
    for j in 0..*order_h {
        if j > 0 {
            c = x.mul(h, &c);
        }
        let v = x.conj(&u_inv, &c);
        let m = x.mul(&x.mul(u, &x.inv(&v)), u);
        let weyl = if *is_psl {
            !x.is_identity(&m) && x.is_identity(&x.mul(&m, &m))
        } else {
            let m2 = x.mul(&m, &m);
            !x.is_identity(&m2) && x.is_identity(&x.mul(&m2, &m2)) && x.commute(&m2, u) && x.commute(&m2, n)
        };
        if !weyl {
            continue;
        }
        candidates += 1;
        let rhs = x.product(&[&u_h, &x.conj(&x.conj(u, &c), h), &u_h]);
        if x.eq(&x.conj(&c, h), &rhs) {
            passed.push(c.clone());
        }
    }
    match passed.len() {
        1 => Ok(WeylOutcome {
            n_tilde: passed.pop().unwrap(),
            candidates,
            passed: 1,
        }),
        m => Err(Error::contract(format!("{m} Weyl candidates pass the relation test (of {candidates})"))),
    }
}

/// `Phi: SL_2(K) -> X` through Steinberg generators computed in the
/// Frobenius box and projected to coordinate 0.
pub struct SteinbergMap {
    field: Arc<BlackBoxField>,
    /// `n(1)` lifted diagonally into the Frobenius box.
    w: ElementString,
}

impl SteinbergMap {
    pub fn new(field: Arc<BlackBoxField>) -> Self {
        let w = field.frobenius_data().bar_w.clone();
        SteinbergMap { field, w }
    }

    pub fn field(&self) -> &BlackBoxField {
        &self.field
    }

    fn k(&self) -> &ExplicitField {
        self.field.explicit()
    }

    /// `u(t)` for `t` in coordinates of the recovered field.
    pub fn u(&self, t: &[u64]) -> ElementString {
        self.field.from_coords(t)
    }

    pub fn v(&self, t: &[u64]) -> ElementString {
        let y = self.field.group();
        y.conj(&self.u(&self.k().neg(&t.to_vec())), &self.w)
    }

    pub fn n(&self, t: &[u64]) -> Result<ElementString> {
        let k = self.k();
        let t = t.to_vec();
        let ti = k.inv(&t).ok_or_else(|| Error::invalid("n(0) is undefined"))?;
        let ut = self.u(&t);
        Ok(self.field.group().product(&[&ut, &self.v(&k.neg(&ti)), &ut]))
    }

    pub fn h(&self, t: &[u64]) -> Result<ElementString> {
        let minus_one = self.k().neg(&self.k().one());
        Ok(self.field.group().mul(&self.n(t)?, &self.n(&minus_one)?))
    }

    /// Image in the Frobenius box of `(a, b; c, d)` given in recovered coordinates.
    pub fn apply_lifted(&self, m: &[Vec<u64>; 4]) -> Result<ElementString> {
        let k = self.k();
        if mat2_det(k, m) != k.one() {
            return Err(Error::invalid("matrix does not have determinant one"));
        }
        let [a, b, c, d] = m;
        let y = self.field.group();
        if k.is_zero(c) {
            let ai = k.inv(a).unwrap();
            Ok(y.mul(&self.h(a)?, &self.u(&k.mul(b, &ai))))
        } else {
            let ci = k.inv(c).unwrap();
            Ok(y.product(&[&self.u(&k.mul(a, &ci)), &self.n(&k.neg(&ci))?, &self.u(&k.mul(d, &ci))]))
        }
    }

    /// `Phi` on a matrix over the recovered field.
    pub fn apply(&self, m: &[Vec<u64>; 4]) -> Result<ElementString> {
        Ok(self.field.project(&self.apply_lifted(m)?))
    }

    /// `Phi` on a matrix whose entries are carrier strings of the black box
    /// field, using only the field operations.
    pub fn apply_field(&self, m: &[ElementString; 4]) -> Result<ElementString> {
        let f = &self.field;
        let [a, b, c, d] = m;
        let det = f.sub(&f.mul(a, d)?, &f.mul(b, c)?);
        if !f.eq(&det, &f.one()) {
            return Err(Error::invalid("matrix does not have determinant one"));
        }
        let y = f.group();
        let w = &self.w;
        let v = |t: &ElementString| y.conj(&f.neg(t), w);
        let n = |t: &ElementString| -> Result<ElementString> {
            let ti = f.inv(t)?.ok_or_else(|| Error::invalid("n(0) is undefined"))?;
            Ok(y.product(&[t, &v(&f.neg(&ti)), t]))
        };
        let lifted = if f.is_zero(c) {
            let ai = f.inv(a)?.unwrap();
            let h = y.mul(&n(a)?, &n(&f.neg(&f.one()))?);
            y.mul(&h, &f.mul(b, &ai)?)
        } else {
            let ci = f.inv(c)?.unwrap();
            y.product(&[&f.mul(a, &ci)?, &n(&f.neg(&ci))?, &f.mul(d, &ci)?])
        };
        Ok(f.project(&lifted))
    }
}

/// Everything produced by [`recover_psl2`].
pub struct Recovery {
    pub generators: StandardGenerators,
    pub weyl: WeylOutcome,
    pub field: Arc<BlackBoxField>,
    pub trace: TraceData,
    /// Structure constants of the black box field on its basis.
    pub recovered: ExplicitField,
    /// `F_p[x]/(f)` for the first primitive `f`.
    pub standard: ExplicitField,
    /// `standard -> recovered`.
    pub iso: FieldIsomorphism,
    pub phi: SteinbergMap,
}

impl Recovery {
    /// `Phi` on a matrix over the standard field (coordinate vectors).
    pub fn phi_standard(&self, m: &[Vec<u64>; 4]) -> Result<ElementString> {
        let mapped = [0, 1, 2, 3].map(|i| self.iso.apply(&m[i]));
        self.phi.apply(&mapped)
    }
}

/// Standard generators, the Weyl element and the Frobenius box.
pub fn recover_frobenius(x: SharedBox, p: u64, k: usize, rng: &mut dyn RngCore, log: &mut StageLog) -> Result<(StandardGenerators, WeylOutcome, Arc<FrobeniusData>)> {
    odd_field_order(p, k)?;
    let generators = log.run("standard_generators", |samples| {
        let mut sampler = Sampler::new(x.as_ref(), rng);
        let out = find_standard_generators(&x, p, k, &mut sampler);
        *samples = sampler.samples_used();
        out
    })?;
    let weyl = log.run("weyl_element", |_| weyl_disambiguate(x.as_ref(), &generators))?;
    let fd = log.run("frobenius", |_| {
        frobenius_on_sl2(x.clone(), &generators.u, &generators.h, &weyl.n_tilde, p, k).map(Arc::new)
    })?;
    Ok((generators, weyl, fd))
}

/// Full structure recovery; stages are appended to `log` as they finish.
pub fn recover_psl2(x: SharedBox, p: u64, k: usize, rng: &mut dyn RngCore, log: &mut StageLog) -> Result<Recovery> {
    let (generators, weyl, fd) = recover_frobenius(x.clone(), p, k, rng, log)?;
    let h_tilde = log.run("ppd_element", |_| {
        Ok(ppd_exponent(generators.order_h, p, k as u32).map(|m| fd.y.group().pow(&fd.bar_h, m)))
    })?;
    let (field, trace) = log.run("field_on_u", |_| build_field_on_u(fd.clone(), h_tilde.as_ref()))?;
    let recovered = log.run("structure_constants", |_| {
        let rec = structure_constants(&field);
        rec.check_axioms(rng, 20)?;
        Ok(rec)
    })?;
    let (standard, iso) = log.run("explicit_isomorphism", |_| {
        let standard = ExplicitField::standard(p, k)?;
        let iso = explicit_isomorphism(&standard, &recovered, rng)?;
        Ok((standard, iso))
    })?;
    let field = Arc::new(field);
    let phi = log.run("steinberg_map", |_| {
        let phi = SteinbergMap::new(field.clone());
        let one = recovered.one();
        let zero = recovered.zero();
        let u1 = phi.apply(&[one.clone(), one.clone(), zero, one])?;
        if !x.eq(&u1, &generators.u) {
            return Err(Error::contract("Phi(u(1)) differs from u"));
        }
        Ok(phi)
    })?;
    Ok(Recovery {
        generators,
        weyl,
        field,
        trace,
        recovered,
        standard,
        iso,
        phi,
    })
}

/// Verification statistics of a recovery run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddVerification {
    pub q: u64,
    pub is_psl: bool,
    pub phi_homomorphism_checks: String,
    pub phi_homomorphism_passed: usize,
    pub phi_homomorphism_total: usize,
    pub phi_nontrivial: bool,
    pub isomorphism_pairs_checked: usize,
    pub isomorphism_ok: bool,
    pub trace_form_det: u64,
    pub weyl_candidates: usize,
    pub weyl_passed: usize,
}

impl OddVerification {
    pub fn success(&self) -> bool {
        self.phi_homomorphism_passed == self.phi_homomorphism_total && self.phi_nontrivial && self.isomorphism_ok && self.trace_form_det != 0 && self.weyl_passed == 1
    }
}

/// Checks `Phi` on `pairs` random pairs, and the field isomorphism on all
/// pairs when `q <= 81`, otherwise on 500 random pairs.
pub fn verify_recovery(x: &dyn BlackBoxGroup, rec: &Recovery, pairs: usize, rng: &mut dyn RngCore) -> Result<OddVerification> {
    let std = &rec.standard;
    let q = std.order();
    let mut passed = 0;
    let mut nontrivial = true;
    for _ in 0..pairs {
        let g1 = random_sl2(std, rng);
        let g2 = random_sl2(std, rng);
        let lhs = rec.phi_standard(&mat2_mul(std, &g1, &g2))?;
        let a = rec.phi_standard(&g1)?;
        let rhs = x.mul(&a, &rec.phi_standard(&g2)?);
        if x.eq(&lhs, &rhs) {
            passed += 1;
        }
        let scalar = std.is_zero(&g1[1]) && std.is_zero(&g1[2]) && g1[0] == g1[3];
        if !scalar && x.is_identity(&a) {
            nontrivial = false;
        }
    }
    let rf = &rec.recovered;
    let iso_pair = |a: &Vec<u64>, b: &Vec<u64>| {
        rec.iso.apply(&std.mul(a, b)) == rf.mul(&rec.iso.apply(a), &rec.iso.apply(b))
            && rec.iso.apply(&std.add(a, b)) == rf.add(&rec.iso.apply(a), &rec.iso.apply(b))
    };
    let (checked, iso_ok) = if q <= 81 {
        let all: Vec<Vec<u64>> = std.elements().collect();
        let ok = all.iter().all(|a| all.iter().all(|b| iso_pair(a, b)));
        (all.len() * all.len(), ok)
    } else {
        let ok = (0..500).all(|_| iso_pair(&std.random(rng), &std.random(rng)));
        (500, ok)
    };
    Ok(OddVerification {
        q,
        is_psl: rec.generators.is_psl,
        phi_homomorphism_checks: format!("{passed}/{pairs}"),
        phi_homomorphism_passed: passed,
        phi_homomorphism_total: pairs,
        phi_nontrivial: nontrivial,
        isomorphism_pairs_checked: checked,
        isomorphism_ok: iso_ok,
        trace_form_det: rec.trace.det,
        weyl_candidates: rec.weyl.candidates,
        weyl_passed: rec.weyl.passed,
    })
}

/// The isomorphism `(P)SL_2(p) -> X` from `u(1) -> u`, `h(t) -> h`,
/// `n(1) -> n` for a fixed primitive root `t`, with explicit `F_p`
/// arithmetic on the matrix side.
pub struct Sl2pMorphism {
    x: SharedBox,
    fp: PrimeField,
    pub t: u64,
    /// Power of the originally found torus generator used as `h`.
    pub ell: u64,
    pub u: ElementString,
    pub h: ElementString,
    pub n: ElementString,
    /// `log[a]` with `t^log[a] = a`.
    log: Vec<u64>,
}

/// Streamlined construction over a prime field.
///
/// With `k = t^-2`, chooses `ell` coprime to `p - 1` with `u^(h^ell) = u^k`, so
/// that `h^ell = ±h(t)`; fixes `n(1)` as in [`weyl_disambiguate`]; resolves
/// the sign by comparing with the word `n(t) n(-1)`.
pub fn streamlined_sl2p(x: SharedBox, p: u64, sampler: &mut Sampler) -> Result<Sl2pMorphism> {
    odd_field_order(p, 1)?;
    let gens = find_standard_generators(&x, p, 1, sampler)?;
    let bx = x.as_ref();
    let t = primitive_root(p);
    let t_inv = inv_mod(t, p).unwrap();
    let kappa = t_inv * t_inv % p;
    let u_kappa = bx.pow(&gens.u, kappa);
    let mut hl = gens.h.clone();
    let mut ell = None;
    for l in 1..p - 1 {
        if l > 1 {
            hl = bx.mul(&hl, &gens.h);
        }
        if gcd(l, p - 1) == 1 && bx.eq(&bx.conj(&gens.u, &hl), &u_kappa) {
            ell = Some(l);
            break;
        }
    }
    let mut ell = ell.ok_or_else(|| Error::contract("no power of h acts on u as t^-2"))?;
    let g2 = StandardGenerators { h: hl.clone(), ..gens.clone() };
    let n = weyl_disambiguate(bx, &g2)?.n_tilde;
    let mut log = vec![0u64; p as usize];
    let mut a = 1;
    for j in 0..p - 1 {
        log[a as usize] = j;
        a = a * t % p;
    }
    let mut m = Sl2pMorphism {
        x: x.clone(),
        fp: PrimeField::new(p)?,
        t,
        ell,
        u: gens.u.clone(),
        h: hl,
        n,
        log,
    };
    let word = bx.mul(&m.n_word(t), &m.n_word(p - 1));
    if !bx.eq(&m.h, &word) {
        if gens.is_psl {
            return Err(Error::contract("torus element disagrees with n(t) n(-1)"));
        }
        let minus = bx.pow(&gens.h, gens.order_h / 2);
        m.h = bx.mul(&m.h, &minus);
        ell += (p - 1) / 2;
        m.ell = ell;
        if !bx.eq(&m.h, &word) {
            return Err(Error::contract("neither sign of h^ell equals n(t) n(-1)"));
        }
    }
    Ok(m)
}

impl Sl2pMorphism {
    fn u_pow(&self, a: u64) -> ElementString {
        self.x.pow(&self.u, a % self.fp.p())
    }

    fn v_pow(&self, a: u64) -> ElementString {
        let p = self.fp.p();
        self.x.conj(&self.u_pow((p - a % p) % p), &self.n)
    }

    fn n_word(&self, s: u64) -> ElementString {
        let p = self.fp.p();
        let si = inv_mod(s, p).unwrap();
        let us = self.u_pow(s);
        self.x.product(&[&us, &self.v_pow(p - si), &us])
    }

    /// Image of `(a, b; c, d)` over `F_p` (residues).
    pub fn apply(&self, m: [u64; 4]) -> Result<ElementString> {
        let f = &self.fp;
        let [a, b, c, d] = m.map(|v| v % f.p());
        if f.sub(&f.mul(&a, &d), &f.mul(&b, &c)) != 1 {
            return Err(Error::invalid("matrix does not have determinant one"));
        }
        let x = &self.x;
        if c == 0 {
            let ai = f.inv(&a).unwrap();
            Ok(x.mul(&x.pow(&self.h, self.log[a as usize]), &self.u_pow(f.mul(&b, &ai))))
        } else {
            let ci = f.inv(&c).unwrap();
            Ok(x.product(&[&self.u_pow(f.mul(&a, &ci)), &self.n_word(f.neg(&ci)), &self.u_pow(f.mul(&d, &ci))]))
        }
    }

    /// Multiplicativity on `pairs` random pairs; returns the number passed.
    pub fn check(&self, pairs: usize, rng: &mut dyn RngCore) -> Result<usize> {
        let f = &self.fp;
        let mut ok = 0;
        for _ in 0..pairs {
            let g1 = random_sl2(f, rng);
            let g2 = random_sl2(f, rng);
            let prod = mat2_mul(f, &g1, &g2);
            if self.x.eq(&self.apply(prod)?, &self.x.mul(&self.apply(g1)?, &self.apply(g2)?)) {
                ok += 1;
            }
        }
        Ok(ok)
    }
}

/// A matrix over the standard field as a backend [`Matrix`] of element codes.
pub fn standard_matrix_codes(std: &ExplicitField, m: &[Vec<u64>; 4]) -> Matrix {
    Matrix {
        n: 2,
        entries: m.iter().map(|x| std.encode(x) as u32).collect(),
    }
}
