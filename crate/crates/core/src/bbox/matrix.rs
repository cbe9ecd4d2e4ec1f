use super::{BlackBoxGroup, ElementString, GlobalExponent, OpaqueBox, SharedBox};
use crate::arith::global_exponent_gl;
use crate::error::{Error, Result};
use crate::field::{ExplicitField, FiniteField, FqTables};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Square matrix whose entries are element codes of an [`ExplicitField`]
/// (see [`ExplicitField::encode`]), row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    pub n: usize,
    pub entries: Vec<u32>,
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<u32>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::invalid(format!("expected {} entries for a {n}x{n} matrix", n * n)));
        }
        Ok(Matrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        Matrix { n, entries }
    }

    /// From rows of coordinate vectors over the prime field.
    pub fn from_field_rows(field: &ExplicitField, rows: &[Vec<Vec<u64>>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::invalid("matrix rows must all have length n"));
            }
            for x in row {
                if x.len() != field.degree() || x.iter().any(|&c| c >= field.characteristic()) {
                    return Err(Error::invalid("matrix entry is not a coordinate vector of the field"));
                }
                entries.push(field.encode(x) as u32);
            }
        }
        Matrix::new(n, entries)
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, t: &FqTables, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut entries = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0;
                for l in 0..n {
                    acc = t.add(acc, t.mul(self.entries[i * n + l], other.entries[l * n + j]));
                }
                entries[i * n + j] = acc;
            }
        }
        Matrix { n, entries }
    }

    pub fn neg(&self, t: &FqTables) -> Matrix {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(|&x| t.neg(x)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Matrix { n, entries }
    }

    /// Entrywise map, e.g. a field automorphism.
    pub fn map(&self, f: impl Fn(u32) -> u32) -> Matrix {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Determinant and inverse by Gauss-Jordan elimination.
    pub fn det_inverse(&self, t: &FqTables) -> (u32, Option<Matrix>) {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Matrix::identity(n).entries;
        let mut det = t.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| a[r * n + col] != 0) else {
                return (0, None);
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
                det = t.neg(det);
            }
            let d = a[col * n + col];
            det = t.mul(det, d);
            let di = t.inv(d).unwrap();
            for j in 0..n {
                a[col * n + j] = t.mul(a[col * n + j], di);
                inv[col * n + j] = t.mul(inv[col * n + j], di);
            }
            for r in 0..n {
                let f = a[r * n + col];
                if r == col || f == 0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] = t.sub(a[r * n + j], t.mul(f, a[col * n + j]));
                    inv[r * n + j] = t.sub(inv[r * n + j], t.mul(f, inv[col * n + j]));
                }
            }
        }
        (det, Some(Matrix { n, entries: inv }))
    }

    pub fn det(&self, t: &FqTables) -> u32 {
        self.det_inverse(t).0
    }

    pub fn is_scalar(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[i * n + j] == 0))
            && (0..n).all(|i| self.entries[i * n + i] == self.entries[0])
    }
}

/// Transparent black box over a matrix group. Strings are the serialized
/// entry codes, so anyone holding a string can read the matrix; wrap in an
/// [`OpaqueBox`] to hide them.
///
/// With `center_quotient` set, every product is normalised to the smaller of
/// `m` and `-m`, so the box encrypts the group modulo `±I`.
#[derive(Debug)]
pub struct MatrixBackend {
    field: ExplicitField,
    tables: FqTables,
    n: usize,
    center_quotient: bool,
    generators: Vec<ElementString>,
    exponent: GlobalExponent,
}

const ENTRY_BYTES: usize = 4;

impl MatrixBackend {
    pub fn new(field: ExplicitField, n: usize, generators: &[Matrix], center_quotient: bool) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::invalid("at least one generator is required"));
        }
        let tables = FqTables::new(&field)?;
        for g in generators {
            if g.n != n || g.entries.len() != n * n {
                return Err(Error::invalid(format!("generator is not {n}x{n}")));
            }
            if g.entries.iter().any(|&x| x >= tables.q()) {
                return Err(Error::invalid("generator entry outside the field"));
            }
            let det = g.det(&tables);
            if det == 0 {
                return Err(Error::invalid("singular generator"));
            }
            if center_quotient && det != tables.one() {
                return Err(Error::invalid("quotient by the centre needs determinant-one generators"));
            }
        }
        let exponent = GlobalExponent::new(global_exponent_gl(n as u32, field.characteristic(), field.degree() as u32)?)?;
        let mut backend = MatrixBackend {
            field,
            tables,
            n,
            center_quotient,
            generators: Vec::new(),
            exponent,
        };
        backend.generators = generators.iter().map(|g| backend.encode(g)).collect();
        Ok(backend)
    }

    pub fn field(&self) -> &ExplicitField {
        &self.field
    }

    pub fn tables(&self) -> &FqTables {
        &self.tables
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn center_quotient(&self) -> bool {
        self.center_quotient
    }

    /// Canonical representative: `m` itself, or the smaller of `±m` modulo the centre.
    pub fn canonical(&self, m: &Matrix) -> Matrix {
        if self.center_quotient {
            let neg = m.neg(&self.tables);
            if neg.entries < m.entries {
                return neg;
            }
        }
        m.clone()
    }

    pub fn encode(&self, m: &Matrix) -> ElementString {
        let m = self.canonical(m);
        let mut bytes = Vec::with_capacity(ENTRY_BYTES * self.n * self.n);
        for x in &m.entries {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        ElementString::new(bytes)
    }

    pub fn decode(&self, s: &ElementString) -> Matrix {
        let entries = s
            .as_bytes()
            .chunks_exact(ENTRY_BYTES)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Matrix { n: self.n, entries }
    }

    pub fn same_element(&self, a: &Matrix, b: &Matrix) -> bool {
        self.canonical(a) == self.canonical(b)
    }
}

impl BlackBoxGroup for MatrixBackend {
    fn byte_len(&self) -> usize {
        ENTRY_BYTES * self.n * self.n
    }

    fn exponent(&self) -> &GlobalExponent {
        &self.exponent
    }

    fn generators(&self) -> &[ElementString] {
        &self.generators
    }

    fn mul(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.encode(&self.decode(a).mul(&self.tables, &self.decode(b)))
    }

    fn inv(&self, a: &ElementString) -> ElementString {
        let (_, inv) = self.decode(a).det_inverse(&self.tables);
        self.encode(&inv.expect("black box strings encode invertible matrices"))
    }

    fn eq(&self, a: &ElementString, b: &ElementString) -> bool {
        a.as_bytes() == b.as_bytes()
    }

    fn identity(&self) -> ElementString {
        self.encode(&Matrix::identity(self.n))
    }
}

/// A matrix black box together with the decoding access only a test harness
/// may use.
pub struct MatrixHarness {
    backend: Arc<MatrixBackend>,
    opaque: Option<Arc<OpaqueBox>>,
}

impl MatrixHarness {
    /// The box handed to algorithms.
    pub fn group(&self) -> SharedBox {
        match &self.opaque {
            Some(o) => o.clone(),
            None => self.backend.clone(),
        }
    }

    pub fn backend(&self) -> &MatrixBackend {
        &self.backend
    }

    pub fn is_opaque(&self) -> bool {
        self.opaque.is_some()
    }

    pub fn decode(&self, s: &ElementString) -> Matrix {
        match &self.opaque {
            Some(o) => self.backend.decode(&o.reveal(s)),
            None => self.backend.decode(s),
        }
    }

    pub fn encode(&self, m: &Matrix) -> ElementString {
        let plain = self.backend.encode(m);
        match &self.opaque {
            Some(o) => o.conceal(&plain),
            None => plain,
        }
    }
}

/// Builds a black box over the group generated by `generators` in
/// `GL_n(field)`. With `opaque` set, strings are keyed pseudorandom
/// encodings (key derived from `key`) and the same element has many strings.
pub fn make_matrix_blackbox(
    field: &ExplicitField,
    n: usize,
    generators: &[Matrix],
    opaque: bool,
    center_quotient: bool,
    key: u64,
) -> Result<MatrixHarness> {
    let backend = Arc::new(MatrixBackend::new(field.clone(), n, generators, center_quotient)?);
    let opaque = opaque.then(|| Arc::new(OpaqueBox::new(backend.clone(), key)));
    Ok(MatrixHarness { backend, opaque })
}
