//! Test-harness support: standard (P)SL2 instances hidden behind a random
//! change of basis, brute-force closure enumeration, and the decode-level
//! data that recognition algorithms are never shown.

use crate::bbox::{make_matrix_blackbox, Matrix, MatrixBackend, MatrixHarness};
use crate::error::{Error, Result};
use crate::field::{ExplicitField, FiniteField, FqTables};
use rand::{Rng, RngCore};
use std::collections::{HashSet, VecDeque};

/// A black box `(P)SL_2(q)` whose generators are the standard `u(1)`, `v(1)`
/// and `h(w)` (`w` primitive) conjugated by a hidden random matrix.
pub struct Sl2Instance {
    pub harness: MatrixHarness,
    pub field: ExplicitField,
    /// Hidden conjugator `c`; the box holds `c^-1 g c` for standard `g`.
    pub conjugator: Matrix,
    pub conjugator_inv: Matrix,
    pub psl: bool,
}

impl Sl2Instance {
    pub fn new(p: u64, k: usize, psl: bool, opaque: bool, key: u64, rng: &mut dyn RngCore) -> Result<Self> {
        let field = ExplicitField::standard(p, k)?;
        let t = FqTables::new(&field)?;
        let (one, w) = (t.one(), t.generator());
        let u1 = Matrix::new(2, vec![one, one, 0, one])?;
        let v1 = Matrix::new(2, vec![one, 0, one, one])?;
        let h = Matrix::new(2, vec![w, 0, 0, t.inv(w).unwrap()])?;
        let conjugator = loop {
            let m = Matrix::new(2, (0..4).map(|_| rng.gen_range(0..t.q())).collect())?;
            if m.det(&t) != 0 {
                break m;
            }
        };
        let conjugator_inv = conjugator.det_inverse(&t).1.unwrap();
        let gens: Vec<Matrix> = [u1, v1, h]
            .iter()
            .map(|g| conjugator_inv.mul(&t, g).mul(&t, &conjugator))
            .collect();
        let harness = make_matrix_blackbox(&field, 2, &gens, opaque, psl, key)?;
        Ok(Sl2Instance {
            harness,
            field,
            conjugator,
            conjugator_inv,
            psl,
        })
    }

    pub fn tables(&self) -> &FqTables {
        self.harness.backend().tables()
    }

    /// Standard-basis matrix -> matrix in the box's basis.
    pub fn hide(&self, m: &Matrix) -> Matrix {
        let t = self.tables();
        self.conjugator_inv.mul(t, m).mul(t, &self.conjugator)
    }

    /// Matrix in the box's basis -> standard basis.
    pub fn unhide(&self, m: &Matrix) -> Matrix {
        let t = self.tables();
        self.conjugator.mul(t, m).mul(t, &self.conjugator_inv)
    }

    /// Encodes a matrix given in the standard basis.
    pub fn standard_element(&self, entries: [u32; 4]) -> crate::bbox::ElementString {
        self.harness.encode(&self.hide(&Matrix { n: 2, entries: entries.to_vec() }))
    }

    /// Decodes to the standard basis.
    pub fn standard_matrix(&self, s: &crate::bbox::ElementString) -> Matrix {
        self.unhide(&self.harness.decode(s))
    }

    /// `u(1)`, `h(w)` and `n(1)` for the fixed primitive `w` of the tables.
    pub fn hidden_generators(&self) -> [crate::bbox::ElementString; 3] {
        let t = self.tables();
        let w = t.generator();
        [
            self.standard_element([1, 1, 0, 1]),
            self.standard_element([w, 0, 0, t.inv(w).unwrap()]),
            self.standard_element([0, 1, t.neg(1), 0]),
        ]
    }

    /// The revealed involution for characteristic 2: a conjugate of `u(1)`.
    pub fn revealed_involution(&self, rng: &mut dyn RngCore) -> Result<crate::bbox::ElementString> {
        let t = self.tables();
        if self.field.characteristic() != 2 {
            return Err(Error::invalid("revealed involutions are provided in characteristic 2 only"));
        }
        let one = t.one();
        let u1 = Matrix::new(2, vec![one, one, 0, one])?;
        let g = random_sl2_matrix(t, rng);
        let gi = g.det_inverse(t).1.unwrap();
        Ok(self.harness.encode(&self.hide(&gi.mul(t, &u1).mul(t, &g))))
    }
}

/// Uniform random element of `SL_2` over the table field.
pub fn random_sl2_matrix(t: &FqTables, rng: &mut dyn RngCore) -> Matrix {
    let e = crate::field::random_sl2(&TableField(t), rng);
    Matrix { n: 2, entries: e.to_vec() }
}

/// [`FiniteField`] view of a table field, elements are codes.
pub struct TableField<'a>(pub &'a FqTables);

impl FiniteField for TableField<'_> {
    type Elem = u32;

    fn characteristic(&self) -> u64 {
        self.0.p()
    }

    fn degree(&self) -> usize {
        self.0.k()
    }

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        self.0.one()
    }

    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.0.add(*a, *b)
    }

    fn neg(&self, a: &u32) -> u32 {
        self.0.neg(*a)
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.0.mul(*a, *b)
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        self.0.inv(*a)
    }

    fn random(&self, rng: &mut dyn RngCore) -> u32 {
        rng.gen_range(0..self.0.q())
    }

    fn pow(&self, a: &u32, e: u64) -> u32 {
        self.0.pow(*a, e)
    }
}

/// All elements of the group generated by `gens`, as canonical matrices of
/// `backend` (so modulo `±I` for quotient backends). Gives up past `limit`.
pub fn enumerate_closure(backend: &MatrixBackend, gens: &[Matrix], limit: usize) -> Result<HashSet<Matrix>> {
    let t = backend.tables();
    let n = backend.dimension();
    let gens: Vec<Matrix> = gens.iter().map(|g| backend.canonical(g)).collect();
    let start = backend.canonical(&Matrix::identity(n));
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = backend.canonical(&x.mul(t, g));
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return Err(Error::invalid(format!("closure exceeds {limit} elements")));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(seen)
}

/// Multiplicative order of a matrix by direct powering.
pub fn matrix_order(t: &FqTables, m: &Matrix, center_quotient: bool) -> u64 {
    let id = Matrix::identity(m.n);
    let neg_id = id.neg(t);
    let mut x = m.clone();
    let mut k = 1;
    while x != id && !(center_quotient && x == neg_id) {
        x = x.mul(t, m);
        k += 1;
    }
    k
}

/// An involution of a characteristic-2 matrix box, found by decoding random
/// elements and keeping the first non-identity one of trace zero.
pub fn reveal_involution(harness: &MatrixHarness, rng: &mut dyn RngCore, budget: usize) -> Result<crate::bbox::ElementString> {
    let backend = harness.backend();
    let t = backend.tables();
    if t.p() != 2 || backend.dimension() != 2 {
        return Err(Error::invalid("revealed involutions are provided for 2x2 matrices in characteristic 2"));
    }
    let x = harness.group();
    let mut sampler = crate::bbox::Sampler::new(x.as_ref(), rng);
    for _ in 0..budget {
        let s = sampler.sample();
        let m = harness.decode(&s);
        if t.add(m.get(0, 0), m.get(1, 1)) == 0 && m != Matrix::identity(2) {
            return Ok(s);
        }
    }
    Err(Error::monte_carlo("revelation", "no involution among decoded samples"))
}

/// `GL_2(p^k)` generated by `u(1)`, `n(1)` and `diag(w, 1)`.
pub fn gl2_harness(p: u64, k: usize, opaque: bool, key: u64) -> Result<MatrixHarness> {
    let field = ExplicitField::standard(p, k)?;
    let t = FqTables::new(&field)?;
    let one = t.one();
    let gens = [
        Matrix::new(2, vec![one, one, 0, one])?,
        Matrix::new(2, vec![0, one, t.neg(one), 0])?,
        Matrix::new(2, vec![t.generator(), 0, 0, one])?,
    ];
    make_matrix_blackbox(&field, 2, &gens, opaque, false, key)
}
