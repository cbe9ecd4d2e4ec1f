use super::linalg::FpMatrix;
use super::poly;
use super::{FiniteField, PrimeField};
use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// `F_{p^k}` presented by structure constants on a basis `s_1, ..., s_k`:
/// `s_i s_j = sum_l c[i][j][l] s_l`.
///
/// Elements are coordinate vectors of length `k`. The unity is not required
/// to be a basis vector; it is solved for on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitField {
    p: u64,
    k: usize,
    c: Vec<u64>,
    one: Vec<u64>,
}

/// JSON shape: `{"p": int, "k": int, "c": [k][k][k] ints}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstants {
    pub p: u64,
    pub k: usize,
    pub c: Vec<Vec<Vec<u64>>>,
}

impl ExplicitField {
    /// Builds the field from a flat `k^3` array of constants, index `(i*k + j)*k + l`.
    ///
    /// Checks commutativity of the constants and solves for the unity; the
    /// remaining axioms are checked by [`ExplicitField::check_axioms`].
    pub fn new(p: u64, k: usize, c: Vec<u64>) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 32 {
            return Err(Error::invalid(format!("characteristic {p} is not a supported prime")));
        }
        if k == 0 || c.len() != k * k * k {
            return Err(Error::invalid("structure constants must form a k x k x k array"));
        }
        if c.iter().any(|&x| x >= p) {
            return Err(Error::invalid("structure constants must be residues in [0, p)"));
        }
        for i in 0..k {
            for j in 0..i {
                for l in 0..k {
                    if c[(i * k + j) * k + l] != c[(j * k + i) * k + l] {
                        return Err(Error::invalid("structure constants are not commutative"));
                    }
                }
            }
        }
        let one = solve_unity(p, k, &c)
            .ok_or_else(|| Error::invalid("structure constants admit no multiplicative identity"))?;
        Ok(ExplicitField { p, k, c, one })
    }

    /// `F_p[x]/(f)` on the basis `1, x, ..., x^(k-1)`, `modulus` given low
    /// degree first and monic of degree `k`.
    pub fn from_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        let fp = PrimeField::new(p)?;
        let k = modulus.len().checked_sub(1).filter(|&k| k >= 1).ok_or_else(|| Error::invalid("modulus must have degree >= 1"))?;
        if modulus[k] % p != 1 {
            return Err(Error::invalid("modulus must be monic"));
        }
        let f: Vec<u64> = modulus.iter().map(|x| x % p).collect();
        if !poly::is_irreducible(&fp, &f) {
            return Err(Error::invalid("modulus is reducible"));
        }
        let mut c = vec![0u64; k * k * k];
        for i in 0..k {
            for j in 0..k {
                let mut mono = vec![0u64; i + j + 1];
                mono[i + j] = 1;
                let (_, r) = poly::divrem(&fp, &mono, &f);
                for (l, coeff) in r.iter().enumerate() {
                    c[(i * k + j) * k + l] = *coeff;
                }
            }
        }
        Self::new(p, k, c)
    }

    /// The reference presentation of `F_{p^k}`: `F_p[x]/(f)` for the first
    /// monic primitive polynomial `f` in the order that reads the
    /// coefficients `c_0, ..., c_{k-1}` as base-`p` digits of a counter.
    pub fn standard(p: u64, k: usize) -> Result<Self> {
        let fp = PrimeField::new(p)?;
        if k == 0 {
            return Err(Error::invalid("degree must be positive"));
        }
        let q = p.checked_pow(k as u32).ok_or_else(|| Error::invalid("field order overflows"))?;
        if k == 1 {
            return Self::from_modulus(p, &[p - 1, 1]);
        }
        let order_factors = factorize(q - 1);
        for code in 1..q {
            let mut f = digits(code, p, k);
            if f[0] == 0 {
                continue;
            }
            f.push(1);
            if !poly::is_irreducible(&fp, &f) {
                continue;
            }
            // x generates the multiplicative group
            let x = [0u64, 1];
            let primitive = order_factors.iter().all(|&(r, _)| {
                let e = (q - 1) / r;
                let xe = poly::pow_mod(&fp, &x, e, &f);
                xe != [1]
            });
            if primitive {
                return Self::from_modulus(p, &f);
            }
        }
        unreachable!("primitive polynomials exist in every degree")
    }

    pub fn from_structure_constants(sc: &StructureConstants) -> Result<Self> {
        let k = sc.k;
        if sc.c.len() != k || sc.c.iter().any(|m| m.len() != k || m.iter().any(|r| r.len() != k)) {
            return Err(Error::invalid("structure constant array has wrong shape"));
        }
        let flat: Vec<u64> = sc.c.iter().flatten().flatten().copied().collect();
        Self::new(sc.p, k, flat)
    }

    pub fn structure_constants(&self) -> StructureConstants {
        let k = self.k;
        let c = (0..k)
            .map(|i| (0..k).map(|j| (0..k).map(|l| self.c[(i * k + j) * k + l]).collect()).collect())
            .collect();
        StructureConstants { p: self.p, k, c }
    }

    pub fn constant(&self, i: usize, j: usize, l: usize) -> u64 {
        self.c[(i * self.k + j) * self.k + l]
    }

    pub fn prime_field(&self) -> PrimeField {
        PrimeField::new(self.p).expect("validated on construction")
    }

    /// `n * 1`.
    pub fn scalar(&self, n: u64) -> Vec<u64> {
        self.one.iter().map(|x| x * (n % self.p) % self.p).collect()
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.k];
        v[i] = 1;
        v
    }

    /// Integer code of an element: its coordinates read as base-`p` digits.
    pub fn encode(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0u64, |acc, &d| acc * self.p + d)
    }

    pub fn decode(&self, code: u64) -> Vec<u64> {
        digits(code, self.p, self.k)
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order()).map(move |c| self.decode(c))
    }

    /// Matrix of `y -> a*y` acting on coordinate columns.
    pub fn mul_matrix(&self, a: &[u64]) -> FpMatrix {
        let cols: Vec<Vec<u64>> = (0..self.k).map(|j| self.mul(&a.to_vec(), &self.basis_vector(j))).collect();
        FpMatrix::from_columns(self.p, &cols)
    }

    pub fn frobenius(&self, a: &Vec<u64>) -> Vec<u64> {
        self.pow(a, self.p)
    }

    /// Absolute trace `a + a^p + ... + a^(p^(k-1))` as a prime-field residue.
    pub fn trace(&self, a: &Vec<u64>) -> u64 {
        let mut acc = self.zero();
        let mut x = a.clone();
        for _ in 0..self.k {
            acc = self.add(&acc, &x);
            x = self.frobenius(&x);
        }
        self.prime_part(&acc).expect("trace lies in the prime field")
    }

    /// If `a = n * 1`, returns `n`.
    pub fn prime_part(&self, a: &[u64]) -> Option<u64> {
        let (idx, &lead) = self.one.iter().enumerate().find(|(_, &x)| x != 0)?;
        let n = a[idx] * crate::arith::inv_mod(lead, self.p)? % self.p;
        (self.scalar(n) == a).then_some(n)
    }

    /// Monic minimal polynomial of `a` over `F_p`, low degree first.
    pub fn minimal_polynomial(&self, a: &Vec<u64>) -> Vec<u64> {
        let mut powers = vec![self.one()];
        loop {
            let next = self.mul(powers.last().unwrap(), a);
            powers.push(next);
            let d = powers.len() - 1;
            // look for a dependency among 1, a, ..., a^d with a^d coefficient 1
            let cols: Vec<Vec<u64>> = powers[..d].to_vec();
            let m = FpMatrix::from_columns(self.p, &cols);
            let target: Vec<u64> = powers[d].iter().map(|x| (self.p - x) % self.p).collect();
            if let Some(coeffs) = m.solve(&target) {
                let mut f = coeffs;
                f.push(1);
                return f;
            }
        }
    }

    /// Exhaustive axiom check for small fields, random spot checks otherwise.
    pub fn check_axioms(&self, rng: &mut dyn rand::RngCore, trials: usize) -> Result<()> {
        let q = self.order();
        let fail = |what: &str| Err(Error::contract(format!("structure constants violate {what}")));
        let check_triple = |a: &Vec<u64>, b: &Vec<u64>, c: &Vec<u64>| -> bool {
            self.mul(&self.mul(a, b), c) == self.mul(a, &self.mul(b, c))
                && self.mul(a, &self.add(b, c)) == self.add(&self.mul(a, b), &self.mul(a, c))
        };
        for _ in 0..trials {
            let (a, b, c) = (self.random(rng), self.random(rng), self.random(rng));
            if !check_triple(&a, &b, &c) {
                return fail("associativity or distributivity");
            }
            if self.mul(&self.one, &a) != a {
                return fail("unity");
            }
        }
        // no zero divisors: every nonzero multiplication matrix is invertible
        if q <= 4096 {
            for code in 1..q {
                if self.mul_matrix(&self.decode(code)).det() == 0 {
                    return fail("absence of zero divisors");
                }
            }
        } else {
            for _ in 0..trials {
                let a = self.random_nonzero(rng);
                if self.mul_matrix(&a).det() == 0 {
                    return fail("absence of zero divisors");
                }
            }
        }
        Ok(())
    }
}

fn digits(mut code: u64, p: u64, k: usize) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = code % p;
            code /= p;
            d
        })
        .collect()
}

/// Solves `sum_i e_i c[i][j][l] = delta_{jl}` for the unity `e`.
fn solve_unity(p: u64, k: usize, c: &[u64]) -> Option<Vec<u64>> {
    let rows: Vec<Vec<u64>> = (0..k)
        .flat_map(|j| (0..k).map(move |l| (j, l)))
        .map(|(j, l)| (0..k).map(|i| c[(i * k + j) * k + l]).collect())
        .collect();
    let rhs: Vec<u64> = (0..k).flat_map(|j| (0..k).map(move |l| u64::from(j == l))).collect();
    let m = FpMatrix::from_rows(p, &rows);
    let e = m.solve(&rhs)?;
    // uniqueness: the unity of a field is unique, so the system must be determined
    (m.rank() == k).then_some(e)
}

impl FiniteField for ExplicitField {
    type Elem = Vec<u64>;

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn degree(&self) -> usize {
        self.k
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.k]
    }

    fn one(&self) -> Vec<u64> {
        self.one.clone()
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| (self.p - x) % self.p).collect()
    }

    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let k = self.k;
        let p = self.p;
        let mut acc = vec![0u64; k];
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                let w = a[i] * b[j] % p;
                if w == 0 {
                    continue;
                }
                let base = (i * k + j) * k;
                for (l, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + w * self.c[base + l]) % p;
                }
            }
        }
        acc
    }

    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if a.iter().all(|&x| x == 0) {
            return None;
        }
        self.mul_matrix(a).solve(&self.one)
    }

    fn random(&self, rng: &mut dyn rand::RngCore) -> Vec<u64> {
        (0..self.k).map(|_| rng.gen_range(0..self.p)).collect()
    }

    fn from_int(&self, n: i64) -> Vec<u64> {
        self.scalar(n.rem_euclid(self.p as i64) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn f9_from_modulus_is_a_field() {
        let f = ExplicitField::from_modulus(3, &[1, 0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        f.check_axioms(&mut rng, 50).unwrap();
        // every nonzero element satisfies x^8 = 1
        for x in f.elements().skip(1) {
            assert_eq!(f.pow(&x, 8), f.one());
            let inv = f.inv(&x).unwrap();
            assert_eq!(f.mul(&x, &inv), f.one());
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(ExplicitField::from_modulus(3, &[2, 0, 1]).is_err());
        assert!(ExplicitField::from_modulus(3, &[1, 0, 2]).is_err());
    }

    #[test]
    fn standard_fields_are_primitive() {
        for (p, k) in [(2u64, 1usize), (2, 3), (2, 8), (3, 2), (3, 4), (5, 2), (13, 2), (13, 1)] {
            let f = ExplicitField::standard(p, k).unwrap();
            let q = f.order();
            let x = if k == 1 { f.from_int(crate::arith::primitive_root(p) as i64) } else { f.basis_vector(1) };
            let mut y = f.one();
            for i in 1..q {
                y = f.mul(&y, &x);
                assert_eq!(y == f.one(), i == q - 1, "p={p} k={k} i={i}");
            }
        }
    }

    #[test]
    fn unity_need_not_be_a_basis_vector() {
        // F_9 on the basis {x, x^2} of F_3[x]/(x^2+1): x*x = -1 = 2*x^2... build by change of basis
        let std = ExplicitField::from_modulus(3, &[1, 0, 1]).unwrap();
        let s1 = std.basis_vector(1); // x
        let s2 = std.mul(&s1, &s1); // x^2 = -1
        let basis = FpMatrix::from_columns(3, &[s1.clone(), s2.clone()]);
        let to_new = basis.inverse().unwrap();
        let b = [s1, s2];
        let mut c = vec![0u64; 8];
        for i in 0..2 {
            for j in 0..2 {
                let prod = to_new.apply(&std.mul(&b[i], &b[j]));
                for l in 0..2 {
                    c[(i * 2 + j) * 2 + l] = prod[l];
                }
            }
        }
        let f = ExplicitField::new(3, 2, c).unwrap();
        assert_eq!(f.one(), vec![0, 2]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        f.check_axioms(&mut rng, 30).unwrap();
    }

    #[test]
    fn traces_and_minimal_polynomials() {
        let f = ExplicitField::standard(3, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = f.random(&mut rng);
            let b = f.random(&mut rng);
            assert_eq!(f.trace(&f.add(&a, &b)), (f.trace(&a) + f.trace(&b)) % 3);
            let m = f.minimal_polynomial(&a);
            // evaluate m(a) = 0
            let mut acc = f.zero();
            for coeff in m.iter().rev() {
                acc = f.add(&f.mul(&acc, &a), &f.scalar(*coeff));
            }
            assert_eq!(acc, f.zero());
            assert!(4 % (m.len() - 1) == 0);
        }
    }

    #[test]
    fn json_shape_round_trip() {
        let f = ExplicitField::standard(5, 2).unwrap();
        let json = serde_json::to_string(&f.structure_constants()).unwrap();
        let back: StructureConstants = serde_json::from_str(&json).unwrap();
        assert_eq!(ExplicitField::from_structure_constants(&back).unwrap(), f);
    }
}
