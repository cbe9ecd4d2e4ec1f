use super::{ExplicitField, FiniteField};
use crate::arith::factorize;
use crate::error::{Error, Result};

const ZERO_LOG: u32 = u32::MAX;

/// Log / Zech-log tables for a small field, elements are the integer codes of
/// [`ExplicitField::encode`]. Every operation is a table lookup.
#[derive(Debug, Clone)]
pub struct FqTables {
    p: u64,
    k: usize,
    q: u32,
    /// code -> discrete log of the code w.r.t. `generator` (ZERO_LOG for 0)
    log: Vec<u32>,
    /// log -> code, length q - 1
    exp: Vec<u32>,
    /// zech[i] = log(1 + g^i) or ZERO_LOG
    zech: Vec<u32>,
    neg_one_log: u32,
}

/// Largest field handled by [`FqTables`].
pub const MAX_TABLE_ORDER: u64 = 1 << 20;

impl FqTables {
    pub fn new(field: &ExplicitField) -> Result<Self> {
        let q = field.order();
        if q > MAX_TABLE_ORDER {
            return Err(Error::invalid(format!("field of order {q} is too large for table arithmetic")));
        }
        let factors = factorize(q - 1);
        let generator = (1..q)
            .map(|c| field.decode(c))
            .find(|g| {
                factors
                    .iter()
                    .all(|&(r, _)| field.pow(g, (q - 1) / r) != field.one())
            })
            .ok_or_else(|| Error::contract("no primitive element; constants do not define a field"))?;
        let mut log = vec![ZERO_LOG; q as usize];
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut x = field.one();
        for i in 0..q - 1 {
            let code = field.encode(&x);
            if log[code as usize] != ZERO_LOG {
                return Err(Error::contract("generator powers repeat; not a field"));
            }
            log[code as usize] = i as u32;
            exp.push(code as u32);
            x = field.mul(&x, &generator);
        }
        let one = field.one();
        let zech = exp
            .iter()
            .map(|&c| {
                let s = field.add(&one, &field.decode(c as u64));
                log[field.encode(&s) as usize]
            })
            .collect();
        let neg_one_log = log[field.encode(&field.neg(&one)) as usize];
        Ok(FqTables {
            p: field.characteristic(),
            k: field.degree(),
            q: q as u32,
            log,
            exp,
            zech,
            neg_one_log,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn one(&self) -> u32 {
        self.exp[0]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.q - 1;
        let s = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % n as u64;
        self.exp[s as usize]
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let n = self.q - 1;
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        // a + b = a (1 + b/a)
        let z = self.zech[((lb + n - la) % n) as usize];
        if z == ZERO_LOG {
            return 0;
        }
        self.exp[((la as u64 + z as u64) % n as u64) as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            return 0;
        }
        let n = self.q - 1;
        self.exp[((self.log[a as usize] + self.neg_one_log) % n) as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(self.exp[((n - self.log[a as usize]) % n) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return u32::from(e == 0);
        }
        let n = (self.q - 1) as u64;
        self.exp[(self.log[a as usize] as u64 * (e % n) % n) as usize]
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> u32 {
        let r = n.rem_euclid(self.p as i64) as u64;
        let mut acc = 0;
        for _ in 0..r {
            acc = self.add(acc, self.one());
        }
        acc
    }

    /// Discrete log with respect to [`FqTables::generator`]; `None` for zero.
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> u32 {
        self.exp[1 % self.exp.len()]
    }
}
