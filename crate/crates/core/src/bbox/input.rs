//! Generator files: matrices over `F_q` given by rows of residues.
//!
//! ```json
//! {"p": 3, "k": 2, "n": 2, "center_quotient": false,
//!  "generators": [[[[1, 0], [1, 0]], [[0, 0], [1, 0]]]]}
//! ```
//!
//! Entries are integers when `k = 1` and coordinate vectors (constant term
//! first) over `F_p[x]/(f)` otherwise, where `f` is `modulus` if given and
//! the standard modulus of [`ExplicitField::standard`] if not.

use super::{make_matrix_blackbox, Matrix, MatrixHarness};
use crate::error::{Error, Result};
use crate::field::{ExplicitField, FiniteField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Residue {
    Int(u64),
    Coords(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub p: u64,
    pub k: usize,
    pub n: usize,
    #[serde(default)]
    pub center_quotient: bool,
    /// Monic, constant term first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    /// `generators[g][row][column]`
    pub generators: Vec<Vec<Vec<Residue>>>,
}

impl GeneratorFile {
    pub fn field(&self) -> Result<ExplicitField> {
        let f = match &self.modulus {
            Some(m) => ExplicitField::from_modulus(self.p, m)?,
            None => ExplicitField::standard(self.p, self.k)?,
        };
        if f.degree() != self.k {
            return Err(Error::invalid("modulus degree differs from k"));
        }
        Ok(f)
    }

    pub fn matrices(&self, field: &ExplicitField) -> Result<Vec<Matrix>> {
        if self.generators.is_empty() {
            return Err(Error::invalid("no generators"));
        }
        self.generators
            .iter()
            .map(|g| {
                if g.len() != self.n {
                    return Err(Error::invalid(format!("generator has {} rows, expected {}", g.len(), self.n)));
                }
                let rows: Vec<Vec<Vec<u64>>> = g
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|r| match r {
                                Residue::Int(a) if self.k == 1 => Ok(vec![*a]),
                                Residue::Coords(v) => Ok(v.clone()),
                                Residue::Int(_) => Err(Error::invalid("entries must be coordinate vectors when k > 1")),
                            })
                            .collect()
                    })
                    .collect::<Result<_>>()?;
                Matrix::from_field_rows(field, &rows)
            })
            .collect()
    }

    pub fn build(&self, opaque: bool, key: u64) -> Result<MatrixHarness> {
        let field = self.field()?;
        let gens = self.matrices(&field)?;
        make_matrix_blackbox(&field, self.n, &gens, opaque, self.center_quotient, key)
    }
}
