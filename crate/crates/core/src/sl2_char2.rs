//! Structure recovery for black box `SL_2(2^n)` given one involution `r`.
//!
//! `U = C(r)` is elementary abelian of order `2^n`. Its non-identity elements
//! are the conjugates `r^t` for `t` in the Borel subgroup `N(U)`, and
//! `r^t` depends only on `t` modulo `U`. A field element is a pair `(t, s)`
//! with `s = r^t` in `U`, plus the zero `(1, 1)`:
//!
//! - `(t1, s1) * (t2, s2) = (t1 t2, r^(t1 t2))`
//! - `(t1, s1) + (t2, s2) = (t, s1 s2)`, with `t` any conjugator of `r` to `s1 s2`
//!
//! An order-3 element `theta` inverted by `r` gives the involutions
//! `v = theta r` and `w = theta^2 r`, which play `v(1)` and `n(1)`.

use crate::arith::{factorize, gcd};
use crate::bbox::{BlackBoxGroup, ElementString, Sampler, SharedBox};
use crate::error::{Error, Result};
use crate::field::{mat2_det, mat2_mul, random_sl2, ExplicitField, FiniteField, FqTables};
use crate::involutions::{bray_centralizer, conjugating_involution, find_order3_inverted, is_involution, BRAY_BUDGET, ORDER3_BUDGET};
use crate::report::StageLog;
use rand::{Rng, RngCore};
use serde::Serialize;

/// Largest `U` enumerated to recover the degree.
pub const MAX_ENUMERATED_DEGREE: u32 = 12;
/// Samples per call to [`conjugating_involution`] during addition.
pub const ADD_BUDGET: usize = 64;

#[derive(Debug, Clone)]
pub struct Char2Frame {
    pub r: ElementString,
    pub v: ElementString,
    pub w: ElementString,
    pub theta: ElementString,
    /// A basis of `U = C(r)` when enumerated, otherwise generators.
    pub u_gens: Vec<ElementString>,
    pub v_gens: Vec<ElementString>,
    pub n: u32,
    /// `|U|` when it was enumerated.
    pub u_size: Option<u64>,
}

/// Spanning data for an elementary abelian 2-group.
struct Span {
    basis: Vec<ElementString>,
    elements: Option<Vec<ElementString>>,
}

/// Reduces `gens` to a basis of the elementary abelian group they generate,
/// enumerating it while it has at most `2^MAX_ENUMERATED_DEGREE` elements.
fn elementary_span(x: &dyn BlackBoxGroup, gens: &[ElementString]) -> Result<Span> {
    let mut basis: Vec<ElementString> = Vec::new();
    let mut elements = Some(vec![x.identity()]);
    for g in gens {
        if x.is_identity(g) {
            continue;
        }
        if !is_involution(x, g) || basis.iter().any(|b| !x.commute(b, g)) {
            return Err(Error::contract("centralizer of the involution is not elementary abelian"));
        }
        match &mut elements {
            Some(all) => {
                if all.iter().any(|e| x.eq(e, g)) {
                    continue;
                }
                if basis.len() as u32 >= MAX_ENUMERATED_DEGREE {
                    elements = None;
                } else {
                    let shifted: Vec<_> = all.iter().map(|e| x.mul(e, g)).collect();
                    all.extend(shifted);
                }
                basis.push(g.clone());
            }
            None => basis.push(g.clone()),
        }
    }
    Ok(Span { basis, elements })
}

/// Builds `theta`, `v`, `w` and generators of `U = C(r)`, `V = C(v)`.
///
/// The degree is read off `|U|` when `U` is small enough to enumerate;
/// otherwise it must be given.
pub fn build_frame(x: &dyn BlackBoxGroup, r: &ElementString, degree: Option<u32>, sampler: &mut Sampler) -> Result<Char2Frame> {
    if !is_involution(x, r) {
        return Err(Error::invalid("r is not an involution"));
    }
    if let Some(n) = degree {
        if !(2..=31).contains(&n) {
            return Err(Error::invalid("degree must be between 2 and 31"));
        }
    }
    let theta = find_order3_inverted(x, r, sampler, ORDER3_BUDGET)?;
    let v = x.mul(&theta, r);
    let w = x.mul(&x.mul(&theta, &theta), r);

    let mut count = BRAY_BUDGET;
    for _ in 0..3 {
        let u_span = elementary_span(x, &bray_centralizer(x, r, sampler, count)?)?;
        let v_span = elementary_span(x, &bray_centralizer(x, &v, sampler, count)?)?;
        let sizes = [&u_span, &v_span].map(|s| s.elements.as_ref().map(|e| e.len() as u64));
        let n = match (sizes, degree) {
            ([Some(a), Some(b)], Some(n)) if a == b && a == 1 << n => n,
            ([Some(a), Some(b)], None) if a == b && a >= 4 => a.trailing_zeros(),
            ([Some(a), _], Some(n)) | ([_, Some(a)], Some(n)) if a > 1 << n => {
                return Err(Error::contract(format!("centralizer of order {a} exceeds 2^{n}")));
            }
            ([None, None], Some(n)) if n > MAX_ENUMERATED_DEGREE => n,
            ([None, _], None) | ([_, None], None) => {
                return Err(Error::invalid("the degree must be given when U has more than 4096 elements"));
            }
            _ => {
                count *= 2;
                continue;
            }
        };
        return Ok(Char2Frame {
            r: r.clone(),
            v,
            w,
            theta,
            u_size: sizes[0],
            u_gens: u_span.basis,
            v_gens: v_span.basis,
            n,
        });
    }
    Err(Error::monte_carlo("char-2 frame", "centralizer samples do not generate U and V"))
}

/// Element of the black box field on `U`.
#[derive(Debug, Clone)]
pub struct Char2Elem {
    /// Representative of a coset of `U` in the Borel subgroup.
    pub t: ElementString,
    /// `r^t`, or the identity for zero.
    pub s: ElementString,
}

/// Black box field `F_(2^n)` carried by `U = C(r)`.
pub struct Char2Field {
    x: SharedBox,
    r: ElementString,
    w: ElementString,
    n: u32,
    u_gens: Vec<ElementString>,
}

impl Char2Field {
    pub fn new(x: SharedBox, frame: &Char2Frame) -> Self {
        Char2Field {
            r: frame.r.clone(),
            w: frame.w.clone(),
            n: frame.n,
            u_gens: frame.u_gens.clone(),
            x,
        }
    }

    pub fn group(&self) -> &SharedBox {
        &self.x
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn order(&self) -> u64 {
        1 << self.n
    }

    pub fn zero(&self) -> Char2Elem {
        let e = self.x.identity();
        Char2Elem { t: e.clone(), s: e }
    }

    pub fn one(&self) -> Char2Elem {
        Char2Elem {
            t: self.x.identity(),
            s: self.r.clone(),
        }
    }

    fn from_torus(&self, t: ElementString) -> Char2Elem {
        let s = self.x.conj(&self.r, &t);
        Char2Elem { t, s }
    }

    pub fn is_zero(&self, a: &Char2Elem) -> bool {
        self.x.is_identity(&a.s)
    }

    /// Elements are equal iff their `U`-components are.
    pub fn eq(&self, a: &Char2Elem, b: &Char2Elem) -> bool {
        self.x.eq(&a.s, &b.s)
    }

    /// `t1 = t2` modulo `U`, for `t1`, `t2` in the Borel subgroup.
    pub fn torus_equiv(&self, t1: &ElementString, t2: &ElementString) -> bool {
        let d = self.x.mul(t1, &self.x.inv(t2));
        self.x.is_identity(&self.x.mul(&d, &d))
    }

    pub fn mul(&self, a: &Char2Elem, b: &Char2Elem) -> Char2Elem {
        if self.is_zero(a) || self.is_zero(b) {
            return self.zero();
        }
        self.from_torus(self.x.mul(&a.t, &b.t))
    }

    pub fn inv(&self, a: &Char2Elem) -> Option<Char2Elem> {
        (!self.is_zero(a)).then(|| self.from_torus(self.x.inv(&a.t)))
    }

    pub fn pow(&self, a: &Char2Elem, e: u64) -> Char2Elem {
        if e == 0 {
            return self.one();
        }
        if self.is_zero(a) {
            return self.zero();
        }
        self.from_torus(self.x.pow(&a.t, e))
    }

    /// Field element with `U`-component `s`; finds its torus representative.
    pub fn from_unipotent(&self, s: &ElementString, sampler: &mut Sampler) -> Result<Char2Elem> {
        let x = self.x.as_ref();
        if x.is_identity(s) {
            return Ok(self.zero());
        }
        if !is_involution(x, s) || !x.commute(s, &self.r) {
            return Err(Error::contract("sum of field elements left U"));
        }
        let t = conjugating_involution(x, &self.r, s, self.n, sampler, ADD_BUDGET)?;
        Ok(Char2Elem { t, s: s.clone() })
    }

    pub fn add(&self, a: &Char2Elem, b: &Char2Elem, sampler: &mut Sampler) -> Result<Char2Elem> {
        if self.is_zero(a) {
            return Ok(b.clone());
        }
        if self.is_zero(b) {
            return Ok(a.clone());
        }
        self.from_unipotent(&self.x.mul(&a.s, &b.s), sampler)
    }

    /// `a + b == c`, decided on `U`-components without any sampling.
    pub fn sum_is(&self, a: &Char2Elem, b: &Char2Elem, c: &Char2Elem) -> bool {
        self.x.eq(&self.x.mul(&a.s, &b.s), &c.s)
    }

    /// Uniform element when the frame holds a basis of `U`.
    pub fn random(&self, sampler: &mut Sampler) -> Result<Char2Elem> {
        let mut s = self.x.identity();
        for g in &self.u_gens {
            if sampler.rng().gen::<bool>() {
                s = self.x.mul(&s, g);
            }
        }
        self.from_unipotent(&s, sampler)
    }

    pub fn u(&self, a: &Char2Elem) -> ElementString {
        a.s.clone()
    }

    /// `v(a)`, defined by `v(a)^w = u(a)`.
    pub fn v(&self, a: &Char2Elem) -> ElementString {
        self.x.conj(&a.s, &self.w)
    }

    pub fn n(&self, a: &Char2Elem) -> Result<ElementString> {
        let ai = self.inv(a).ok_or_else(|| Error::invalid("n(0) is undefined"))?;
        let ua = self.u(a);
        Ok(self.x.product(&[&ua, &self.v(&ai), &ua]))
    }

    pub fn h(&self, a: &Char2Elem) -> Result<ElementString> {
        Ok(self.x.mul(&self.n(a)?, &self.n(&self.one())?))
    }

    /// `Psi` of `(a, b; c, d)` over this field.
    pub fn psi(&self, m: &[Char2Elem; 4]) -> Result<ElementString> {
        let [a, b, c, d] = m;
        if !self.sum_is(&self.mul(a, d), &self.mul(b, c), &self.one()) {
            return Err(Error::invalid("matrix does not have determinant one"));
        }
        if self.is_zero(a) {
            Ok(self.x.product(&[&self.w, &self.h(c)?, &self.u(&self.mul(b, d))]))
        } else {
            let ai = self.inv(a).unwrap();
            Ok(self.x.product(&[&self.h(a)?, &self.v(&self.mul(a, c)), &self.u(&self.mul(&ai, b))]))
        }
    }
}

/// Isomorphism from the standard `F_(2^n)` into a [`Char2Field`]:
/// `omega^j -> g^(m j)` for the tables' primitive `omega` and a primitive
/// field element `g`.
pub struct Char2Embedding {
    pub standard: ExplicitField,
    tables: FqTables,
    g: Char2Elem,
    pub m: u64,
}

impl Char2Embedding {
    /// Finds a primitive `g` and the exponent `m`; every candidate accepted
    /// is checked on the full addition table `1 + omega^j`.
    pub fn find(field: &Char2Field, sampler: &mut Sampler, budget: usize) -> Result<Self> {
        let standard = ExplicitField::standard(2, field.degree() as usize)?;
        let tables = FqTables::new(&standard)?;
        let q1 = field.order() - 1;
        let x = field.group();
        let mut g = None;
        for _ in 0..budget {
            let a = field.random(sampler)?;
            if !field.is_zero(&a) && x.order(&a.t)? == q1 {
                g = Some(a);
                break;
            }
        }
        let g = g.ok_or_else(|| Error::monte_carlo("char-2 embedding", "no primitive field element found"))?;
        let one = field.one();
        // zech[j] = log(1 + omega^j)
        let zech: Vec<Option<u32>> = (0..q1)
            .map(|j| tables.log(tables.add(tables.one(), tables.pow(tables.generator(), j))))
            .collect();
        let sigma = |m: u64, j: u64| field.pow(&g, m * j % q1);
        let compatible = |m: u64, j: u64| match zech[j as usize] {
            None => field.sum_is(&one, &sigma(m, j), &field.zero()),
            Some(z) => field.sum_is(&one, &sigma(m, j), &sigma(m, z as u64)),
        };
        for m in (1..q1).filter(|&m| gcd(m, q1) == 1) {
            if (1..q1.min(4)).all(|j| compatible(m, j)) && (1..q1).all(|j| compatible(m, j)) {
                return Ok(Char2Embedding { standard, tables, g, m });
            }
        }
        Err(Error::contract("no multiplicative isomorphism respects addition"))
    }

    pub fn apply(&self, field: &Char2Field, a: &[u64]) -> Char2Elem {
        match self.tables.log(self.standard.encode(a) as u32) {
            None => field.zero(),
            Some(j) => field.pow(&self.g, self.m * j as u64 % (field.order() - 1)),
        }
    }
}

/// Everything produced by [`recover_sl2_char2`].
pub struct Char2Recovery {
    pub frame: Char2Frame,
    pub field: Char2Field,
    pub embedding: Char2Embedding,
}

impl Char2Recovery {
    /// `Psi` on a matrix over the standard field.
    pub fn psi_standard(&self, m: &[Vec<u64>; 4]) -> Result<ElementString> {
        let std = &self.embedding.standard;
        if mat2_det(std, m) != std.one() {
            return Err(Error::invalid("matrix does not have determinant one"));
        }
        let mapped = [0, 1, 2, 3].map(|i| self.embedding.apply(&self.field, &m[i]));
        self.field.psi(&mapped)
    }
}

/// Full recovery; stages are appended to `log`.
pub fn recover_sl2_char2(x: SharedBox, r: &ElementString, degree: Option<u32>, rng: &mut dyn RngCore, log: &mut StageLog) -> Result<Char2Recovery> {
    let bx = x.as_ref();
    let mut sampler = Sampler::new(bx, rng);
    let frame = log.run("frame", |samples| {
        let before = sampler.samples_used();
        let f = build_frame(bx, r, degree, &mut sampler);
        *samples = sampler.samples_used() - before;
        f
    })?;
    let field = log.run("field_char2", |_| {
        let f = Char2Field::new(x.clone(), &frame);
        if f.n(&f.one()).map(|n1| bx.eq(&n1, &frame.w)) != Ok(true) {
            return Err(Error::contract("n(1) differs from w"));
        }
        Ok(f)
    })?;
    let embedding = log.run("standard_embedding", |samples| {
        let before = sampler.samples_used();
        let e = Char2Embedding::find(&field, &mut sampler, 64 * frame.n as usize);
        *samples = sampler.samples_used() - before;
        e
    })?;
    let rec = Char2Recovery { frame, field, embedding };
    log.run("psi", |_| {
        let std = &rec.embedding.standard;
        let (one, zero) = (std.one(), std.zero());
        let u1 = rec.psi_standard(&[one.clone(), one.clone(), zero, one])?;
        if !bx.eq(&u1, r) {
            return Err(Error::contract("Psi(u(1)) differs from r"));
        }
        Ok(())
    })?;
    Ok(rec)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Char2Verification {
    pub q: u64,
    pub degree: u32,
    pub psi_homomorphism_checks: String,
    pub psi_homomorphism_passed: usize,
    pub psi_homomorphism_total: usize,
    pub psi_nontrivial: bool,
    pub field_axiom_checks: String,
    pub field_axioms_passed: usize,
    pub field_axioms_total: usize,
    /// `|U|` from enumeration, when enumerated.
    pub carrier_size: Option<u64>,
    pub n_one_is_w: bool,
    pub embedding_exponent: u64,
}

impl Char2Verification {
    pub fn success(&self) -> bool {
        self.psi_homomorphism_passed == self.psi_homomorphism_total
            && self.psi_nontrivial
            && self.field_axioms_passed == self.field_axioms_total
            && self.carrier_size.is_none_or(|s| s == self.q)
            && self.n_one_is_w
    }
}

/// All field axioms on one triple; `Ok(false)` on a failed identity.
fn axioms_hold(f: &Char2Field, a: &Char2Elem, b: &Char2Elem, c: &Char2Elem, sampler: &mut Sampler) -> Result<bool> {
    let one = f.one();
    let mut ok = f.eq(&f.mul(&f.mul(a, b), c), &f.mul(a, &f.mul(b, c)))
        && f.eq(&f.mul(a, b), &f.mul(b, a))
        && f.eq(&f.mul(&one, a), a)
        && f.eq(&f.add(a, a, sampler)?, &f.zero())
        && f.eq(&f.add(a, &f.zero(), sampler)?, a);
    let ab = f.add(a, b, sampler)?;
    let bc = f.add(b, c, sampler)?;
    ok &= f.eq(&f.add(&ab, c, sampler)?, &f.add(a, &bc, sampler)?);
    ok &= f.sum_is(&f.mul(a, b), &f.mul(a, c), &f.mul(a, &bc));
    if let Some(ai) = f.inv(a) {
        ok &= f.eq(&f.mul(a, &ai), &one);
    }
    Ok(ok)
}

/// `Psi` multiplicativity on `pairs` random pairs and the field axioms on
/// `triples` random triples.
pub fn verify_char2(rec: &Char2Recovery, pairs: usize, triples: usize, rng: &mut dyn RngCore) -> Result<Char2Verification> {
    let f = &rec.field;
    let x = f.group().as_ref();
    let std = &rec.embedding.standard;
    let mut passed = 0;
    let mut nontrivial = true;
    for _ in 0..pairs {
        let g1 = random_sl2(std, rng);
        let g2 = random_sl2(std, rng);
        let a = rec.psi_standard(&g1)?;
        if x.eq(&rec.psi_standard(&mat2_mul(std, &g1, &g2))?, &x.mul(&a, &rec.psi_standard(&g2)?)) {
            passed += 1;
        }
        let identity = std.is_zero(&g1[1]) && std.is_zero(&g1[2]) && g1[0] == std.one();
        if !identity && x.is_identity(&a) {
            nontrivial = false;
        }
    }
    let mut sampler = Sampler::new(x, rng);
    let mut axioms = 0;
    for _ in 0..triples {
        let a = f.random(&mut sampler)?;
        let b = f.random(&mut sampler)?;
        let c = f.random(&mut sampler)?;
        match axioms_hold(f, &a, &b, &c, &mut sampler) {
            Ok(true) => axioms += 1,
            Ok(false) => {}
            Err(e @ Error::ContractViolation(_)) => return Err(e),
            Err(_) => {}
        }
    }
    Ok(Char2Verification {
        q: f.order(),
        degree: f.degree(),
        psi_homomorphism_checks: format!("{passed}/{pairs}"),
        psi_homomorphism_passed: passed,
        psi_homomorphism_total: pairs,
        psi_nontrivial: nontrivial,
        field_axiom_checks: format!("{axioms}/{triples}"),
        field_axioms_passed: axioms,
        field_axioms_total: triples,
        carrier_size: rec.frame.u_size,
        n_one_is_w: f.n(&f.one()).map(|n1| x.eq(&n1, &rec.frame.w))?,
        embedding_exponent: rec.embedding.m,
    })
}

/// Multiplicative order of a nonzero field element, from the torus order.
pub fn field_element_order(f: &Char2Field, a: &Char2Elem) -> Result<u64> {
    if f.is_zero(a) {
        return Err(Error::invalid("zero has no multiplicative order"));
    }
    let q1 = f.order() - 1;
    let mut o = q1;
    for (r, _) in factorize(q1) {
        while o.is_multiple_of(r) && f.eq(&f.pow(a, o / r), &f.one()) {
            o /= r;
        }
    }
    Ok(o)
}
