//! Integer helpers: modular powers, primality, factorisation, lcm.
//!
//! Everything here works on `u64` with `u128` intermediates, which covers the
//! global exponents of every group this crate handles.

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple; `None` on overflow.
pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse via the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin; the witness set is exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_LIMIT: u64 = 1_000_000;

/// Prime factorisation as sorted `(prime, multiplicity)` pairs.
///
/// Trial division up to 10^6, then Pollard rho on the cofactor.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.iter_mut().find(|(q, _)| *q == p) {
        Some(entry) => entry.1 += 1,
        None => out.push((p, 1)),
    };
    let mut d = 2u64;
    while d <= TRIAL_LIMIT && d * d <= n {
        while n.is_multiple_of(d) {
            push(d, &mut out);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let f = pollard_rho(m);
        stack.push(f);
        stack.push(m / f);
    }
    out.sort_unstable();
    out
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = gcd(x.abs_diff(y), n);
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Smallest `e >= 0` with `p^e >= n`.
pub fn ceil_log(p: u64, n: u64) -> u32 {
    let mut e = 0;
    let mut acc = 1u64;
    while acc < n {
        acc = acc.saturating_mul(p);
        e += 1;
    }
    e
}

/// Exponent of `GL_n(p^k)`: `p^ceil(log_p n) * lcm(p^k - 1, p^2k - 1, ..., p^nk - 1)`.
pub fn global_exponent_gl(n: u32, p: u64, k: u32) -> Result<u64> {
    if n == 0 || k == 0 {
        return Err(Error::invalid("dimension and degree must be positive"));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let overflow = || Error::invalid(format!("exponent of GL_{n}({p}^{k}) overflows u64"));
    let mut e = 1u64;
    for i in 1..=n {
        let q_i = p.checked_pow(i * k).ok_or_else(overflow)?;
        e = lcm(e, q_i - 1).ok_or_else(overflow)?;
    }
    let unipotent = p.checked_pow(ceil_log(p, n as u64)).ok_or_else(overflow)?;
    e.checked_mul(unipotent).ok_or_else(overflow)
}

/// Smallest generator of the multiplicative group of `F_p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = factorize(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&(r, _)| pow_mod(g, (p - 1) / r, p) != 1))
        .expect("every prime has a primitive root")
}

/// Multiplicative order of `a` modulo `m` (`a` coprime to `m`).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    debug_assert!(is_prime(m), "prime modulus expected");
    let phi_factors = factorize(m - 1);
    let mut ord = m - 1;
    for (r, _) in phi_factors {
        while ord.is_multiple_of(r) && pow_mod(a, ord / r, m) == 1 {
            ord /= r;
        }
    }
    ord
}
