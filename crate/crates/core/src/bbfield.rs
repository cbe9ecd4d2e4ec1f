//! Black box fields.
//!
//! The carrier is a unipotent subgroup `U` of a black box `(P)SL_2(q)`, lifted
//! into the Frobenius box `Y` so that the field Frobenius is available as a
//! coordinate shift. Addition is group multiplication. Multiplication is built
//! in two phases: [`PartialField`] knows only addition, multiplication by
//! basis elements (conjugation by powers of a torus element) and the trace;
//! that is enough to compute the Gram matrix of the trace form, after which
//! [`PartialField::complete`] produces the full [`BlackBoxField`].

use crate::arith::{factorize, is_prime, multiplicative_order};
use crate::bbox::{BlackBoxGroup, ElementString, SharedBox};
use crate::error::{Error, Result};
use crate::field::poly;
use crate::field::{ExplicitField, FiniteField, FpMatrix};
use crate::frobenius::FrobeniusData;
use rand::{Rng, RngCore};
use std::sync::Arc;

/// Largest primitive prime divisor of `p^n - 1`, i.e. a prime dividing
/// `p^n - 1` but no `p^i - 1` with `i < n`. `None` exactly when none exists.
pub fn ppd_prime(p: u64, n: u32) -> Result<Option<u64>> {
    if !is_prime(p) || n == 0 {
        return Err(Error::invalid("ppd_prime needs a prime p and n >= 1"));
    }
    let q = p
        .checked_pow(n)
        .ok_or_else(|| Error::invalid(format!("{p}^{n} overflows u64")))?;
    Ok(factorize(q - 1)
        .into_iter()
        .rev()
        .map(|(r, _)| r)
        .find(|&r| multiplicative_order(p % r, r) == n as u64))
}

/// The exponent `m` with `h^m` equal to the odd ppd part of `h`: the product of
/// the `r`-parts of `h` over odd primes `r` with `p` of order `k` mod `r`.
pub fn ppd_exponent(order: u64, p: u64, k: u32) -> Option<u64> {
    let ppd_part: u64 = factorize(order)
        .into_iter()
        .filter(|&(r, _)| r != 2 && r != p && multiplicative_order(p % r, r) == k as u64)
        .map(|(r, e)| r.pow(e))
        .product();
    (ppd_part > 1).then_some(order / ppd_part)
}

/// `h^m` of odd order divisible only by ppd primes of `p^k - 1`.
pub fn power_to_ppd(bx: &dyn BlackBoxGroup, h: &ElementString, p: u64, k: u32) -> Result<ElementString> {
    let o = bx.order(h)?;
    let m = ppd_exponent(o, p, k).ok_or_else(|| {
        Error::monte_carlo("ppd power", format!("order {o} has no primitive prime divisor of {p}^{k}-1"))
    })?;
    Ok(bx.pow(h, m))
}

/// Basis and trace-form data for a black box field.
#[derive(Debug, Clone)]
pub struct TraceData {
    /// `s^1, ..., s^k`
    pub basis: Vec<ElementString>,
    /// Gram matrix `a_ij = Tr(s^(i+1) s^(j+1))`, indices from 0.
    pub a: FpMatrix,
    pub a_inv: FpMatrix,
    pub det: u64,
}

/// Field structure on `U` before the full multiplication exists.
pub struct PartialField {
    fd: Arc<FrobeniusData>,
    y: SharedBox,
    unity: ElementString,
    zero: ElementString,
    /// `g^1, ..., g^k` and inverses, `g` the conjugating torus element
    g_pows: Vec<ElementString>,
    g_pows_inv: Vec<ElementString>,
    /// `0, 1, 2, ..., p-1` times the unity
    multiples: Vec<ElementString>,
    basis: Vec<ElementString>,
}

impl PartialField {
    /// `h_tilde` is a ppd element of `Y`; its square root conjugates the
    /// unity to the basis. Without one, the lifted torus generator is used
    /// directly. Over the prime field the basis is the unity itself.
    pub fn new(fd: Arc<FrobeniusData>, h_tilde: Option<&ElementString>) -> Result<Self> {
        let y = fd.y.group();
        let (p, k) = (fd.p, fd.k);
        let g = match h_tilde {
            _ if k == 1 => y.identity(),
            Some(ht) => {
                let m = y.order(ht)?;
                if m % 2 == 0 {
                    return Err(Error::invalid("ppd element must have odd order"));
                }
                y.pow(ht, m.div_ceil(2))
            }
            None => fd.bar_h.clone(),
        };
        let unity = fd.bar_u.clone();
        let zero = y.identity();
        let mut multiples = vec![zero.clone()];
        for _ in 1..p {
            multiples.push(y.mul(multiples.last().unwrap(), &unity));
        }
        if !y.is_identity(&y.mul(multiples.last().unwrap(), &unity)) {
            return Err(Error::contract(format!("additive order of the unity is not {p}")));
        }
        let mut g_pows = vec![g.clone()];
        for _ in 1..k {
            g_pows.push(y.mul(g_pows.last().unwrap(), &g));
        }
        let g_pows_inv: Vec<ElementString> = g_pows.iter().map(|x| y.inv(x)).collect();
        let mut pf = PartialField {
            fd,
            y,
            unity,
            zero,
            g_pows,
            g_pows_inv,
            multiples,
            basis: Vec::new(),
        };
        pf.basis = (1..=k).map(|i| pf.mul_basis(&pf.unity, i)).collect();
        Ok(pf)
    }

    pub fn p(&self) -> u64 {
        self.fd.p
    }

    pub fn k(&self) -> usize {
        self.fd.k
    }

    pub fn add(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.y.mul(a, b)
    }

    pub fn neg(&self, a: &ElementString) -> ElementString {
        self.y.inv(a)
    }

    /// `w (x) s^l = w^(g^l)` for `1 <= l <= k`.
    pub fn mul_basis(&self, w: &ElementString, l: usize) -> ElementString {
        self.y.mul(&self.y.mul(&self.g_pows_inv[l - 1], w), &self.g_pows[l - 1])
    }

    /// `x + x^F + ... + x^(F^(k-1))` with `F` the shift.
    pub fn trace(&self, x: &ElementString) -> ElementString {
        let mut acc = x.clone();
        let mut z = x.clone();
        for _ in 1..self.k() {
            z = self.fd.phi(&z);
            acc = self.y.mul(&acc, &z);
        }
        acc
    }

    /// `j` with `x = j * unity`, by scanning `j = 0, ..., p-1`.
    pub fn read_prime_field(&self, x: &ElementString) -> Result<u64> {
        self.multiples
            .iter()
            .position(|m| self.y.eq(m, x))
            .map(|j| j as u64)
            .ok_or_else(|| Error::contract("element is not in the prime subfield"))
    }

    /// `<w, s^l> = Tr(w (x) s^l)`.
    pub fn pairing_with_basis(&self, w: &ElementString, l: usize) -> Result<u64> {
        self.read_prime_field(&self.trace(&self.mul_basis(w, l)))
    }

    pub fn gram_matrix(&self) -> Result<FpMatrix> {
        let k = self.k();
        let mut a = FpMatrix::zeros(self.p(), k, k);
        for i in 0..k {
            for j in 0..k {
                a.set(i, j, self.pairing_with_basis(&self.basis[i], j + 1)?);
            }
        }
        Ok(a)
    }

    /// Inverts the trace form and extracts structure constants.
    pub fn complete(self) -> Result<(BlackBoxField, TraceData)> {
        let a = self.gram_matrix()?;
        if !a.is_symmetric() {
            return Err(Error::contract("trace form is not symmetric"));
        }
        let det = a.det();
        let a_inv = a
            .inverse()
            .ok_or_else(|| Error::contract("trace form is degenerate (det A = 0)"))?;
        let trace = TraceData {
            basis: self.basis.clone(),
            a,
            a_inv,
            det,
        };
        let (p, k) = (self.p(), self.k());
        let coords = |w: &ElementString| -> Result<Vec<u64>> {
            let beta: Vec<u64> = (1..=k).map(|l| self.pairing_with_basis(w, l)).collect::<Result<_>>()?;
            Ok(trace.a_inv.apply_left(&beta))
        };
        let mut c = vec![0u64; k * k * k];
        for i in 0..k {
            for j in 0..k {
                let prod = self.mul_basis(&self.basis[i], j + 1);
                let v = coords(&prod)?;
                if !self.y.eq(&combine(self.y.as_ref(), &self.basis, &v), &prod) {
                    return Err(Error::contract("basis products are not spanned by the basis"));
                }
                c[(i * k + j) * k..(i * k + j + 1) * k].copy_from_slice(&v);
            }
        }
        let explicit = ExplicitField::new(p, k, c).map_err(|e| Error::contract(format!("recovered constants: {e}")))?;
        let unity_coords = coords(&self.unity)?;
        if unity_coords != explicit.one() {
            return Err(Error::contract("unity coordinates disagree with the structure constants"));
        }
        Ok((BlackBoxField { partial: self, explicit, trace: trace.clone() }, trace))
    }
}

/// A field whose elements are strings of `U` (lifted into `Y`).
pub struct BlackBoxField {
    partial: PartialField,
    explicit: ExplicitField,
    trace: TraceData,
}

impl BlackBoxField {
    pub fn p(&self) -> u64 {
        self.partial.p()
    }

    pub fn k(&self) -> usize {
        self.partial.k()
    }

    pub fn order(&self) -> u64 {
        self.p().pow(self.k() as u32)
    }

    /// The box holding the carrier.
    pub fn group(&self) -> &SharedBox {
        &self.partial.y
    }

    pub fn frobenius_data(&self) -> &FrobeniusData {
        &self.partial.fd
    }

    pub fn explicit(&self) -> &ExplicitField {
        &self.explicit
    }

    pub fn trace_data(&self) -> &TraceData {
        &self.trace
    }

    pub fn zero(&self) -> ElementString {
        self.partial.zero.clone()
    }

    pub fn one(&self) -> ElementString {
        self.partial.unity.clone()
    }

    pub fn eq(&self, a: &ElementString, b: &ElementString) -> bool {
        self.partial.y.eq(a, b)
    }

    pub fn is_zero(&self, a: &ElementString) -> bool {
        self.partial.y.is_identity(a)
    }

    pub fn add(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.partial.add(a, b)
    }

    pub fn neg(&self, a: &ElementString) -> ElementString {
        self.partial.neg(a)
    }

    pub fn sub(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.add(a, &self.neg(b))
    }

    pub fn trace(&self, x: &ElementString) -> ElementString {
        self.partial.trace(x)
    }

    pub fn read_prime_field(&self, x: &ElementString) -> Result<u64> {
        self.partial.read_prime_field(x)
    }

    /// Coordinates on `s^1, ..., s^k`: `alpha = beta A^-1` with
    /// `beta_l = <x, s^l>`.
    pub fn coords(&self, x: &ElementString) -> Result<Vec<u64>> {
        let beta: Vec<u64> = (1..=self.k())
            .map(|l| self.partial.pairing_with_basis(x, l))
            .collect::<Result<_>>()?;
        Ok(self.trace.a_inv.apply_left(&beta))
    }

    /// `sum_i alpha_i s^i`, computed as a product of powers in `U`.
    pub fn from_coords(&self, alpha: &[u64]) -> ElementString {
        combine(self.partial.y.as_ref(), &self.trace.basis, alpha)
    }

    /// `x (x) y = sum_l beta_l (x (x) s^l)` where `beta` are the coordinates of `y`.
    pub fn mul(&self, x: &ElementString, y: &ElementString) -> Result<ElementString> {
        let beta = self.coords(y)?;
        let g = &self.partial.y;
        let parts: Vec<ElementString> = beta
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(|(l, &b)| g.pow(&self.partial.mul_basis(x, l + 1), b))
            .collect();
        Ok(g.product(&parts.iter().collect::<Vec<_>>()))
    }

    /// Multiplicative inverse through the structure constants.
    pub fn inv(&self, x: &ElementString) -> Result<Option<ElementString>> {
        let a = self.coords(x)?;
        Ok(self.explicit.inv(&a).map(|b| self.from_coords(&b)))
    }

    pub fn pow(&self, x: &ElementString, mut e: u64) -> Result<ElementString> {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn random(&self, rng: &mut dyn RngCore) -> ElementString {
        let alpha: Vec<u64> = (0..self.k()).map(|_| rng.gen_range(0..self.p())).collect();
        self.from_coords(&alpha)
    }

    /// The coordinate-0 image in the original box.
    pub fn project(&self, x: &ElementString) -> ElementString {
        self.partial.fd.y.project(x)
    }
}

fn combine(y: &dyn BlackBoxGroup, basis: &[ElementString], alpha: &[u64]) -> ElementString {
    let parts: Vec<ElementString> = alpha
        .iter()
        .zip(basis)
        .filter(|(&a, _)| a != 0)
        .map(|(&a, s)| y.pow(s, a))
        .collect();
    y.product(&parts.iter().collect::<Vec<_>>())
}

/// Builds the field on `U` from Frobenius data (whose `bar_u` is the unity)
/// and an optional ppd element of `Y`.
pub fn build_field_on_u(fd: Arc<FrobeniusData>, h_tilde: Option<&ElementString>) -> Result<(BlackBoxField, TraceData)> {
    PartialField::new(fd, h_tilde)?.complete()
}

/// Structure constants of a completed field.
pub fn structure_constants(field: &BlackBoxField) -> ExplicitField {
    field.explicit.clone()
}

/// Mutually inverse ring isomorphisms between two presentations of `F_q`,
/// as matrices acting on coordinate columns.
#[derive(Debug, Clone)]
pub struct FieldIsomorphism {
    pub forward: FpMatrix,
    pub backward: FpMatrix,
}

impl FieldIsomorphism {
    pub fn apply(&self, a: &[u64]) -> Vec<u64> {
        self.forward.apply(a)
    }

    pub fn apply_inverse(&self, b: &[u64]) -> Vec<u64> {
        self.backward.apply(b)
    }
}

/// Largest field searched by scanning for a root.
pub const ROOT_SCAN_LIMIT: u64 = 10_000;

/// An isomorphism `A -> B`: sends a generator `a` of `A` over `F_p` to a root
/// of its minimal polynomial in `B`, extended linearly on powers of `a`.
pub fn explicit_isomorphism(a: &ExplicitField, b: &ExplicitField, rng: &mut dyn RngCore) -> Result<FieldIsomorphism> {
    let (p, k) = (a.characteristic(), a.degree());
    if b.characteristic() != p || b.degree() != k {
        return Err(Error::invalid("fields of different orders are not isomorphic"));
    }
    let gen = (1..a.order())
        .map(|c| a.decode(c))
        .find(|x| a.minimal_polynomial(x).len() == k + 1)
        .ok_or_else(|| Error::contract("no element of full degree"))?;
    let f = a.minimal_polynomial(&gen);
    let root = if b.order() <= ROOT_SCAN_LIMIT {
        b.elements().find(|x| poly::eval(b, &f.iter().map(|&c| b.scalar(c)).collect::<Vec<_>>(), x) == b.zero())
    } else {
        let fb: Vec<Vec<u64>> = f.iter().map(|&c| b.scalar(c)).collect();
        poly::split_roots(b, &fb, rng).into_iter().next()
    }
    .ok_or_else(|| Error::invalid("minimal polynomial has no root in the target field"))?;
    let powers = |fld: &ExplicitField, x: &Vec<u64>| {
        let mut out = vec![fld.one()];
        for _ in 1..k {
            out.push(fld.mul(out.last().unwrap(), x));
        }
        FpMatrix::from_columns(p, &out)
    };
    let ma = powers(a, &gen);
    let mb = powers(b, &root);
    let ma_inv = ma.inverse().ok_or_else(|| Error::contract("powers of a generator are dependent"))?;
    let forward = mb.mul(&ma_inv);
    let backward = forward.inverse().ok_or_else(|| Error::contract("isomorphism matrix is singular"))?;
    Ok(FieldIsomorphism { forward, backward })
}
