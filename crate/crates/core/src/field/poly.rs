//! Dense univariate polynomials over a [`FiniteField`], coefficients stored
//! low degree first with no trailing zeros (the zero polynomial is empty).

use super::{FiniteField, PrimeField};
use crate::arith::factorize;

pub type Poly<E> = Vec<E>;

pub fn trim<F: FiniteField>(f: &F, mut a: Poly<F::Elem>) -> Poly<F::Elem> {
    while a.last().is_some_and(|c| f.is_zero(c)) {
        a.pop();
    }
    a
}

pub fn add<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let n = a.len().max(b.len());
    let zero = f.zero();
    let out = (0..n)
        .map(|i| f.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(f, out)
}

pub fn sub<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let nb: Vec<F::Elem> = b.iter().map(|c| f.neg(c)).collect();
    add(f, a, &nb)
}

pub fn mul<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

/// Quotient and remainder; panics on division by zero.
pub fn divrem<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F::Elem>, Poly<F::Elem>) {
    let b = trim(f, b.to_vec());
    let lead_inv = f.inv(b.last().expect("division by the zero polynomial")).unwrap();
    let mut r = trim(f, a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![f.zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coeff = f.mul(r.last().unwrap(), &lead_inv);
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&coeff, bc));
        }
        q[shift] = coeff;
        r.pop();
        r = trim(f, r);
    }
    (trim(f, q), r)
}

pub fn rem<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    divrem(f, a, b).1
}

pub fn monic<F: FiniteField>(f: &F, a: Poly<F::Elem>) -> Poly<F::Elem> {
    match a.last() {
        None => a,
        Some(lead) => {
            let inv = f.inv(lead).unwrap();
            a.iter().map(|c| f.mul(c, &inv)).collect()
        }
    }
}

/// Monic greatest common divisor.
pub fn gcd<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Poly<F::Elem> {
    let mut a = trim(f, a.to_vec());
    let mut b = trim(f, b.to_vec());
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    monic(f, a)
}

/// `base^e mod modulus`.
pub fn pow_mod<F: FiniteField>(f: &F, base: &[F::Elem], mut e: u64, modulus: &[F::Elem]) -> Poly<F::Elem> {
    let mut acc = rem(f, &[f.one()], modulus);
    let mut b = rem(f, base, modulus);
    while e > 0 {
        if e & 1 == 1 {
            acc = rem(f, &mul(f, &acc, &b), modulus);
        }
        b = rem(f, &mul(f, &b, &b), modulus);
        e >>= 1;
    }
    acc
}

pub fn eval<F: FiniteField>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
    a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// `x^(p^m) mod modulus` by repeated `p`-th powering.
fn frobenius_power(fp: &PrimeField, m: usize, modulus: &[u64]) -> Poly<u64> {
    let mut x = vec![0u64, 1];
    for _ in 0..m {
        x = pow_mod(fp, &x, fp.p(), modulus);
    }
    x
}

/// Rabin's irreducibility test over `F_p`.
pub fn is_irreducible(fp: &PrimeField, f: &[u64]) -> bool {
    let f = trim(fp, f.to_vec());
    let Some(k) = f.len().checked_sub(1) else {
        return false;
    };
    if k == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    if !rem(fp, &sub(fp, &frobenius_power(fp, k, &f), &x), &f).is_empty() {
        return false;
    }
    for (r, _) in factorize(k as u64) {
        let h = sub(fp, &frobenius_power(fp, k / r as usize, &f), &x);
        if gcd(fp, &h, &f).len() != 1 {
            return false;
        }
    }
    true
}

/// All roots in `field` of a polynomial that splits into distinct linear
/// factors over it (Cantor-Zassenhaus equal-degree splitting, degree one).
pub fn split_roots<F: FiniteField>(field: &F, f: &[F::Elem], rng: &mut dyn rand::RngCore) -> Vec<F::Elem> {
    let q = field.order();
    let f = monic(field, trim(field, f.to_vec()));
    // keep only the product of the distinct linear factors: gcd(f, x^q - x)
    let x = vec![field.zero(), field.one()];
    let xq = pow_mod(field, &x, q, &f);
    let g = gcd(field, &f, &sub(field, &xq, &x));
    let mut roots = Vec::new();
    let mut stack = vec![g];
    while let Some(h) = stack.pop() {
        match h.len() {
            0 | 1 => continue,
            2 => {
                roots.push(field.neg(&h[0]));
                continue;
            }
            _ => {}
        }
        loop {
            let delta = field.random(rng);
            let candidate = if q % 2 == 1 {
                // gcd(h, (x + delta)^((q-1)/2) - 1)
                let shifted = vec![delta, field.one()];
                let pw = pow_mod(field, &shifted, (q - 1) / 2, &h);
                sub(field, &pw, &[field.one()])
            } else {
                // additive trace of delta*x over F_2
                let m = q.trailing_zeros();
                let mut term = rem(field, &[field.zero(), delta], &h);
                let mut acc = term.clone();
                for _ in 1..m {
                    term = rem(field, &mul(field, &term, &term), &h);
                    acc = add(field, &acc, &term);
                }
                acc
            };
            let d = gcd(field, &h, &candidate);
            if d.len() > 1 && d.len() < h.len() {
                let (other, _) = divrem(field, &h, &d);
                stack.push(d);
                stack.push(monic(field, other));
                break;
            }
        }
    }
    roots
}
