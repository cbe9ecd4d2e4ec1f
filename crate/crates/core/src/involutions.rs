//! Involution tools: powering to involutions, centralizers of involutions,
//! order-3 elements inverted by an involution, and conjugators between
//! involutions of a unipotent subgroup in characteristic 2.

use crate::bbox::{BlackBoxGroup, ElementString, Sampler};
use crate::error::{Error, Result};

/// Default number of samples for [`bray_centralizer`].
pub const BRAY_BUDGET: usize = 40;
/// Default number of samples for [`find_order3_inverted`].
pub const ORDER3_BUDGET: usize = 100;

/// `x^(|x|/2)` if `x` has even order.
pub fn to_involution(bx: &dyn BlackBoxGroup, x: &ElementString) -> Result<Option<ElementString>> {
    let o = bx.order(x)?;
    Ok((o % 2 == 0).then(|| bx.pow(x, o / 2)))
}

pub fn is_involution(bx: &dyn BlackBoxGroup, i: &ElementString) -> bool {
    !bx.is_identity(i) && bx.is_identity(&bx.mul(i, i))
}

/// Elements of the centralizer of the involution `i`, one per random `g`.
///
/// With `w = i i^g = [i, g]` of order `m`: if `m` is odd then `g w^((m-1)/2)`
/// centralizes `i`; if `m` is even then `w^(m/2)` is the central involution
/// of the dihedral group `<i, i^g>`. `sampler` must produce elements of `bx`.
pub fn bray_centralizer(bx: &dyn BlackBoxGroup, i: &ElementString, sampler: &mut Sampler, count: usize) -> Result<Vec<ElementString>> {
    if !is_involution(bx, i) {
        return Err(Error::invalid("centralizer requested for a non-involution"));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let g = sampler.sample();
        let w = bx.mul(i, &bx.conj(i, &g));
        let m = bx.order(&w)?;
        let c = if m % 2 == 1 {
            bx.mul(&g, &bx.pow(&w, (m - 1) / 2))
        } else {
            bx.pow(&w, m / 2)
        };
        debug_assert!(bx.commute(&c, i));
        out.push(c);
    }
    Ok(out)
}

/// An element `theta` of order 3 with `theta^r = theta^-1`, taken as the
/// 3-part of a random `r^x r`.
pub fn find_order3_inverted(bx: &dyn BlackBoxGroup, r: &ElementString, sampler: &mut Sampler, budget: usize) -> Result<ElementString> {
    if !is_involution(bx, r) {
        return Err(Error::invalid("expected an involution"));
    }
    for _ in 0..budget {
        let x = sampler.sample();
        let y = bx.mul(&bx.conj(r, &x), r);
        let o = bx.order(&y)?;
        if o % 3 == 0 {
            return Ok(bx.pow(&y, o / 3));
        }
    }
    Err(Error::monte_carlo(
        "order-3 search",
        format!("no r^x r of order divisible by 3 in {budget} samples"),
    ))
}

/// Some `x` with `s^x = t`, for involutions `s`, `t` of one unipotent
/// subgroup of `SL_2(2^n)`.
///
/// For a random conjugate `r = s^z`, the products `sr` and `rt` have odd
/// order dividing `2^(2n) - 1`, so with `e = 2^(2n-1)` the power `(sr)^e` is a
/// square root of `sr` and conjugates `s` to `r`; likewise `(rt)^e` takes `r`
/// to `t`.
pub fn conjugating_involution(bx: &dyn BlackBoxGroup, s: &ElementString, t: &ElementString, n: u32, sampler: &mut Sampler, budget: usize) -> Result<ElementString> {
    if !(1..=31).contains(&n) {
        return Err(Error::invalid("degree out of range"));
    }
    let e = 1u64 << (2 * n - 1);
    for _ in 0..budget {
        let z = sampler.sample();
        let r = bx.conj(s, &z);
        let x = bx.mul(&bx.pow(&bx.mul(s, &r), e), &bx.pow(&bx.mul(&r, t), e));
        if bx.eq(&bx.conj(s, &x), t) {
            return Ok(x);
        }
    }
    Err(Error::monte_carlo(
        "conjugating involution",
        format!("no odd-order witnesses in {budget} samples"),
    ))
}
