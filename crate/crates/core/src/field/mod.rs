//! Explicit finite fields.
//!
//! [`PrimeField`] and [`ExplicitField`] are "white boxes": their elements are
//! residues and coordinate vectors that callers may inspect freely. They are
//! the targets of black box field isomorphisms and the entry type of matrix
//! backends. [`FqTables`] is a log/Zech table view of the same arithmetic used
//! where speed matters.

mod explicit;
pub mod linalg;
pub mod poly;
mod prime;
mod tables;

pub use explicit::{ExplicitField, StructureConstants};
pub use linalg::FpMatrix;
pub use prime::PrimeField;
pub use tables::FqTables;

use rand::Rng;
use std::fmt::Debug;

/// Arithmetic of a finite field whose elements are plain values.
pub trait FiniteField {
    type Elem: Clone + PartialEq + Debug;

    fn characteristic(&self) -> u64;
    fn degree(&self) -> usize;

    fn order(&self) -> u64 {
        self.characteristic().pow(self.degree() as u32)
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` exactly for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn random(&self, rng: &mut dyn rand::RngCore) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Image of the integer `n` under `Z -> F`.
    fn from_int(&self, n: i64) -> Self::Elem {
        let p = self.characteristic() as i64;
        let r = n.rem_euclid(p) as u64;
        let mut acc = self.zero();
        let one = self.one();
        for _ in 0..r {
            acc = self.add(&acc, &one);
        }
        acc
    }

    fn random_nonzero(&self, rng: &mut dyn rand::RngCore) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }
}

/// Random `(a, b, c, d)` with `ad - bc = 1`, uniform over `SL_2(F)`.
pub fn random_sl2<F: FiniteField>(field: &F, rng: &mut dyn rand::RngCore) -> [F::Elem; 4] {
    loop {
        let a = field.random(rng);
        let b = field.random(rng);
        let c = field.random(rng);
        if !field.is_zero(&a) {
            // d = (1 + bc) / a
            let bc = field.mul(&b, &c);
            let d = field.mul(&field.add(&field.one(), &bc), &field.inv(&a).unwrap());
            return [a, b, c, d];
        }
        // a = 0 forces bc = -1; pick b uniformly nonzero and d freely, with
        // probability matching the number of such matrices.
        let q = field.order();
        if rng.gen_range(0..q) == 0 {
            continue;
        }
        let b = field.random_nonzero(rng);
        let c = field.neg(&field.inv(&b).unwrap());
        let d = field.random(rng);
        return [a, b, c, d];
    }
}

/// 2x2 matrix product over any field, row-major `[a, b, c, d]`.
pub fn mat2_mul<F: FiniteField>(f: &F, x: &[F::Elem; 4], y: &[F::Elem; 4]) -> [F::Elem; 4] {
    let e = |i: usize, j: usize, k: usize, l: usize| f.add(&f.mul(&x[i], &y[j]), &f.mul(&x[k], &y[l]));
    [e(0, 0, 1, 2), e(0, 1, 1, 3), e(2, 0, 3, 2), e(2, 1, 3, 3)]
}

pub fn mat2_det<F: FiniteField>(f: &F, x: &[F::Elem; 4]) -> F::Elem {
    f.sub(&f.mul(&x[0], &x[3]), &f.mul(&x[1], &x[2]))
}
