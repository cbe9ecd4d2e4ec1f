//! The black box group contract and the boxes built on top of it.
//!
//! A black box hands out [`ElementString`]s and offers multiplication,
//! inversion and comparison on them, plus a global exponent `E` with
//! `x^E = 1` for every element. Nothing else may be assumed about the strings:
//! two different strings can encrypt the same element.

mod input;
mod matrix;
mod opaque;
mod product;
mod sampler;

pub use input::{GeneratorFile, Residue};
pub use matrix::{make_matrix_blackbox, Matrix, MatrixBackend, MatrixHarness};
pub use opaque::OpaqueBox;
pub use product::{graph_morphism, DirectProduct, MorphismGraph, QuotientBox, SubgroupBox};
pub use sampler::{ProductReplacer, Sampler, BURN_IN};

use crate::arith::factorize;
use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Handle for an element of a black box group. Equality of the encrypted
/// elements is only decidable through [`BlackBoxGroup::eq`], which is why the
/// type does not implement `PartialEq`.
#[derive(Clone)]
pub struct ElementString(Box<[u8]>);

impl ElementString {
    pub fn new(bytes: Vec<u8>) -> Self {
        ElementString(bytes.into_boxed_slice())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn bit_len(&self) -> usize {
        8 * self.0.len()
    }

    pub fn concat(parts: &[&ElementString]) -> Self {
        let mut out = Vec::with_capacity(parts.iter().map(|p| p.0.len()).sum());
        for p in parts {
            out.extend_from_slice(&p.0);
        }
        ElementString::new(out)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        ElementString::new(self.0[range].to_vec())
    }
}

impl fmt::Debug for ElementString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ElementString(")?;
        for b in self.0.iter().take(12) {
            write!(f, "{b:02x}")?;
        }
        if self.0.len() > 12 {
            write!(f, "..")?;
        }
        write!(f, ")")
    }
}

/// A global exponent together with its factorisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalExponent {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl GlobalExponent {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return Err(Error::invalid("global exponent must be positive"));
        }
        Ok(GlobalExponent { value, factors: factorize(value) })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Largest divisor of `E` coprime to `r`.
    pub fn coprime_part(&self, r: u64) -> u64 {
        self.factors
            .iter()
            .filter(|&&(q, _)| q != r)
            .map(|&(q, e)| q.pow(e))
            .product()
    }

    pub fn lcm(&self, other: &GlobalExponent) -> Result<Self> {
        let v = crate::arith::lcm(self.value, other.value)
            .ok_or_else(|| Error::invalid("product exponent overflows u64"))?;
        GlobalExponent::new(v)
    }
}

/// The black box contract: sample (through [`Sampler`]), multiply, invert,
/// compare, and a global exponent.
pub trait BlackBoxGroup: Send + Sync {
    /// Length in bytes of every string produced by this box.
    fn byte_len(&self) -> usize;
    fn exponent(&self) -> &GlobalExponent;
    /// Nonempty generating set.
    fn generators(&self) -> &[ElementString];
    fn mul(&self, a: &ElementString, b: &ElementString) -> ElementString;
    fn inv(&self, a: &ElementString) -> ElementString;
    fn eq(&self, a: &ElementString, b: &ElementString) -> bool;

    /// Factors sampled independently, if this box is a direct product.
    fn components(&self) -> Option<Vec<&dyn BlackBoxGroup>> {
        None
    }

    fn bit_len(&self) -> usize {
        8 * self.byte_len()
    }

    fn identity(&self) -> ElementString {
        let g = &self.generators()[0];
        self.mul(g, &self.inv(g))
    }

    fn is_identity(&self, x: &ElementString) -> bool {
        self.eq(x, &self.identity())
    }

    fn pow(&self, x: &ElementString, mut e: u64) -> ElementString {
        let mut acc: Option<ElementString> = None;
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => self.mul(&a, &base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc.unwrap_or_else(|| self.identity())
    }

    fn pow_signed(&self, x: &ElementString, e: i64) -> ElementString {
        let y = self.pow(x, e.unsigned_abs());
        if e < 0 {
            self.inv(&y)
        } else {
            y
        }
    }

    /// `x^g = g^-1 x g`.
    fn conj(&self, x: &ElementString, g: &ElementString) -> ElementString {
        self.mul(&self.mul(&self.inv(g), x), g)
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    fn commutator(&self, x: &ElementString, y: &ElementString) -> ElementString {
        let xi = self.inv(x);
        let yi = self.inv(y);
        self.mul(&self.mul(&xi, &yi), &self.mul(x, y))
    }

    fn commute(&self, x: &ElementString, y: &ElementString) -> bool {
        self.eq(&self.mul(x, y), &self.mul(y, x))
    }

    fn product(&self, xs: &[&ElementString]) -> ElementString {
        xs.iter()
            .fold(None, |acc: Option<ElementString>, x| {
                Some(match acc {
                    None => (*x).clone(),
                    Some(a) => self.mul(&a, x),
                })
            })
            .unwrap_or_else(|| self.identity())
    }

    /// Exact order of `x`, found by stripping prime factors off `E`.
    fn order(&self, x: &ElementString) -> Result<u64> {
        element_order(self, x)
    }
}

/// Order of `x` via the global exponent. Fails with a contract violation if
/// `x^E` is not the identity.
pub fn element_order<B: BlackBoxGroup + ?Sized>(bx: &B, x: &ElementString) -> Result<u64> {
    let e = bx.exponent();
    if !bx.is_identity(&bx.pow(x, e.value())) {
        return Err(Error::contract("x^E is not the identity"));
    }
    let mut ord = e.value();
    for &(r, _) in e.factors() {
        while ord.is_multiple_of(r) && bx.is_identity(&bx.pow(x, ord / r)) {
            ord /= r;
        }
    }
    Ok(ord)
}

/// `x^m` where `m` is the largest divisor of `E` coprime to `r`; the result is
/// an `r`-element.
pub fn r_part(bx: &dyn BlackBoxGroup, x: &ElementString, r: u64) -> ElementString {
    bx.pow(x, bx.exponent().coprime_part(r))
}

pub type SharedBox = Arc<dyn BlackBoxGroup>;
