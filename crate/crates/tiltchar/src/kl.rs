//! Canonical bases of the spherical and antispherical modules and the
//! polynomial tables derived from them.
//!
//! A `KLTable` materializes, for one parity and one length bound, the
//! canonical basis elements (coefficient 1 on the diagonal, off-diagonal
//! coefficients in vZ[v]), the Deodhar tilde basis (off-diagonal
//! coefficients in v^-1 Z[v^-1]), and the inverse polynomials defined by
//! the signed orthogonality relation.

use crate::affine_weyl::{
    enumerate_wplus, identity, right_mult, AffineWeylError, AlcoveElement, RootDatum, StepResult,
};
use crate::hecke::{act_tilde_hs, act_underline_hs, ModuleVector, Parity};
use crate::laurent::LaurentPoly;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KlError {
    #[error("element {0} exceeds the precomputed length bound {1}")]
    OutOfRange(String, u32),
    #[error("generator step from {x} by s{s} is not an upward step in W+")]
    NotUpward { x: String, s: u8 },
    #[error(transparent)]
    Weyl(#[from] AffineWeylError),
}

/// Memoized table of canonical basis elements for one parity, complete
/// for all elements up to a length bound.
pub struct KLTable {
    datum: Arc<RootDatum>,
    parity: Parity,
    max_len: u32,
    elements: Vec<AlcoveElement>,
    basis: HashMap<AlcoveElement, ModuleVector>,
    tilde: HashMap<AlcoveElement, ModuleVector>,
    /// Columns of the inverse family: `inverse[x][y]` is the polynomial
    /// indexed (y, x) in the orthogonality relation, stored sparsely.
    inverse: HashMap<AlcoveElement, BTreeMap<AlcoveElement, LaurentPoly>>,
}

/// Run one step of the canonical-basis recursion: act by the generator
/// and strip constant terms by subtracting already-known basis elements,
/// longest support element first.
fn corrected_step(
    datum: &RootDatum,
    known: &HashMap<AlcoveElement, ModuleVector>,
    prev: &ModuleVector,
    s: u8,
    top: &AlcoveElement,
    tilde: bool,
) -> Result<ModuleVector, KlError> {
    let mut out = if tilde {
        act_tilde_hs(datum, prev, s)?
    } else {
        act_underline_hs(datum, prev, s)?
    };
    let mut support: Vec<AlcoveElement> = out.support().cloned().collect();
    support.sort();
    for y in support.into_iter().rev() {
        if y == *top {
            continue;
        }
        let c = out.coeff(&y).constant_term();
        if c != 0.into() {
            let base = known
                .get(&y)
                .unwrap_or_else(|| panic!("basis for {y} not yet computed"));
            out = out.sub(&base.scaled_int(&c));
        }
    }
    Ok(out)
}

impl KLTable {
    /// Build the table for every element of length at most `max_len`.
    pub fn new(datum: Arc<RootDatum>, parity: Parity, max_len: u32) -> Self {
        Self::build(datum, parity, max_len, None)
    }

    /// Build, reusing a previously dumped canonical basis if it matches.
    pub(crate) fn build(
        datum: Arc<RootDatum>,
        parity: Parity,
        max_len: u32,
        preloaded: Option<HashMap<AlcoveElement, ModuleVector>>,
    ) -> Self {
        let elements = enumerate_wplus(&datum, max_len);
        let basis = match preloaded {
            Some(b) if elements.iter().all(|x| b.contains_key(x)) => b,
            _ => {
                let mut basis: HashMap<AlcoveElement, ModuleVector> = HashMap::new();
                for x in &elements {
                    let v = if x.length() == 0 {
                        ModuleVector::basis_vector(parity, x)
                    } else {
                        let s = *x.word().last().expect("nonempty word");
                        let parent = match right_mult(&datum, x, s).expect("valid generator") {
                            StepResult::DownIn(y) => y,
                            other => panic!("canonical last letter must step down: {other:?}"),
                        };
                        let prev = basis.get(&parent).expect("parent computed first").clone();
                        corrected_step(&datum, &basis, &prev, s, x, false)
                            .expect("recursion step")
                    };
                    debug_assert!(Self::check_basis_invariant(x, &v, false));
                    basis.insert(x.clone(), v);
                }
                basis
            }
        };

        let mut tilde: HashMap<AlcoveElement, ModuleVector> = HashMap::new();
        for x in &elements {
            let v = if x.length() == 0 {
                ModuleVector::basis_vector(parity, x)
            } else {
                let s = *x.word().last().expect("nonempty word");
                let parent = match right_mult(&datum, x, s).expect("valid generator") {
                    StepResult::DownIn(y) => y,
                    other => panic!("canonical last letter must step down: {other:?}"),
                };
                let prev = tilde.get(&parent).expect("parent computed first").clone();
                corrected_step(&datum, &tilde, &prev, s, x, true).expect("recursion step")
            };
            debug_assert!(Self::check_basis_invariant(x, &v, true));
            tilde.insert(x.clone(), v);
        }

        let mut table = KLTable {
            datum,
            parity,
            max_len,
            elements,
            basis,
            tilde,
            inverse: HashMap::new(),
        };
        table.compute_inverse();
        table
    }

    fn check_basis_invariant(x: &AlcoveElement, v: &ModuleVector, tilde: bool) -> bool {
        v.iter().all(|(y, p)| {
            if y == x {
                p.is_one()
            } else if tilde {
                p.in_v_neg()
            } else {
                p.in_v_pos()
            }
        })
    }

    /// Length-ordered back-substitution for the inverse polynomials:
    /// the unique family with sum over z of
    /// (-1)^(l(z)+l(x)) inverse(z,x) * kl(z,y) equal to delta_{x,y}.
    fn compute_inverse(&mut self) {
        for x in self.elements.clone() {
            let mut column: BTreeMap<AlcoveElement, LaurentPoly> = BTreeMap::new();
            for y in &self.elements {
                if y == &x {
                    column.insert(y.clone(), LaurentPoly::one());
                    continue;
                }
                // sum over z in supp(basis(y)), z != y
                let mut acc = LaurentPoly::zero();
                let by = &self.basis[y];
                for (z, m_zy) in by.iter() {
                    if z == y {
                        continue;
                    }
                    if let Some(m_zx) = column.get(z) {
                        let sign = if (z.length() + x.length()) % 2 == 0 { 1 } else { -1 };
                        acc += &(m_zx * m_zy).mul_term(0, &sign.into());
                    }
                }
                let sign_yx = if (y.length() + x.length()) % 2 == 0 { 1 } else { -1 };
                let val = (-&acc).mul_term(0, &sign_yx.into());
                if !val.is_zero() {
                    column.insert(y.clone(), val);
                }
            }
            self.inverse.insert(x, column);
        }
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn max_len(&self) -> u32 {
        self.max_len
    }

    /// All elements in range, ordered by (length, ShortLex word).
    pub fn elements(&self) -> &[AlcoveElement] {
        &self.elements
    }

    fn check_range(&self, x: &AlcoveElement) -> Result<(), KlError> {
        if x.length() > self.max_len {
            Err(KlError::OutOfRange(x.to_string(), self.max_len))
        } else {
            Ok(())
        }
    }

    /// The canonical basis element with coefficient 1 at x and all other
    /// coefficients in vZ[v] at shorter elements.
    pub fn kl_basis(&self, x: &AlcoveElement) -> Result<&ModuleVector, KlError> {
        self.check_range(x)?;
        Ok(&self.basis[x])
    }

    /// The coefficient of y in the canonical basis element at x.
    pub fn kl_poly(&self, y: &AlcoveElement, x: &AlcoveElement) -> Result<LaurentPoly, KlError> {
        Ok(self.kl_basis(x)?.coeff(y))
    }

    /// The Deodhar variant: coefficient 1 at x, other coefficients in
    /// v^-1 Z[v^-1], built with the tilde generator action.
    pub fn tilde_basis(&self, x: &AlcoveElement) -> Result<&ModuleVector, KlError> {
        self.check_range(x)?;
        Ok(&self.tilde[x])
    }

    pub fn tilde_poly(&self, y: &AlcoveElement, x: &AlcoveElement) -> Result<LaurentPoly, KlError> {
        Ok(self.tilde_basis(x)?.coeff(y))
    }

    /// Coefficients of `basis(x) * H_underline_s` in the standard basis,
    /// excluding the leading term at xs. Requires an upward step.
    pub fn ws_coeffs(
        &self,
        x: &AlcoveElement,
        s: u8,
    ) -> Result<BTreeMap<AlcoveElement, LaurentPoly>, KlError> {
        self.check_range(x)?;
        let xs = match right_mult(&self.datum, x, s)? {
            StepResult::UpIn(y) => y,
            _ => {
                return Err(KlError::NotUpward {
                    x: x.to_string(),
                    s,
                })
            }
        };
        let acted = act_underline_hs(&self.datum, &self.basis[x], s)?;
        let mut out = BTreeMap::new();
        for (y, p) in acted.iter() {
            if *y != xs {
                out.insert(y.clone(), p.clone());
            }
        }
        Ok(out)
    }

    /// The inverse polynomial indexed (z, x); zero unless z arises in the
    /// back-substitution (in particular zero for l(z) < l(x), z != x).
    pub fn inverse_poly(
        &self,
        z: &AlcoveElement,
        x: &AlcoveElement,
    ) -> Result<LaurentPoly, KlError> {
        self.check_range(z)?;
        self.check_range(x)?;
        Ok(self
            .inverse
            .get(x)
            .and_then(|col| col.get(z))
            .cloned()
            .unwrap_or_else(LaurentPoly::zero))
    }

    /// Nonzero inverse polynomials for a fixed second index, keyed by the
    /// first index.
    pub fn inverse_column(
        &self,
        x: &AlcoveElement,
    ) -> Result<&BTreeMap<AlcoveElement, LaurentPoly>, KlError> {
        self.check_range(x)?;
        Ok(&self.inverse[x])
    }

    /// Rebuild a canonical basis element along an explicit reduced word
    /// whose prefixes all lie in W+, without consulting the cache. By
    /// uniqueness of the canonical basis the result is independent of the
    /// word; this exists so tests and sweeps can verify exactly that.
    pub fn kl_basis_along(&self, word: &[u8]) -> Result<ModuleVector, KlError> {
        let mut cur = identity(&self.datum);
        let mut vec = ModuleVector::basis_vector(self.parity, &cur);
        for &s in word {
            let next = match right_mult(&self.datum, &cur, s)? {
                StepResult::UpIn(y) => y,
                _ => {
                    return Err(KlError::NotUpward {
                        x: cur.to_string(),
                        s,
                    })
                }
            };
            self.check_range(&next)?;
            vec = corrected_step(&self.datum, &self.basis, &vec, s, &next, false)?;
            cur = next;
        }
        Ok(vec)
    }

    /// Serializable dump of the canonical-basis polynomials.
    pub fn to_dump(&self) -> KlDump {
        let mut entries = Vec::new();
        for x in &self.elements {
            for (y, p) in self.basis[x].iter() {
                entries.push(KlDumpEntry {
                    x: x.word_string(),
                    y: y.word_string(),
                    poly: p.clone(),
                });
            }
        }
        KlDump {
            datum: self.datum.label().to_string(),
            parity: self.parity.to_string(),
            max_len: self.max_len,
            entries,
        }
    }

    /// Rebuild a table from a dump. The dump is only trusted if it covers
    /// every element in range; otherwise the basis is recomputed.
    pub fn from_dump(
        datum: Arc<RootDatum>,
        parity: Parity,
        max_len: u32,
        dump: &KlDump,
    ) -> Result<Self, KlError> {
        let mut basis: HashMap<AlcoveElement, ModuleVector> = HashMap::new();
        for entry in &dump.entries {
            let x = crate::affine_weyl::parse_word(&datum, &entry.x)?;
            let y = crate::affine_weyl::parse_word(&datum, &entry.y)?;
            basis
                .entry(x)
                .or_insert_with(|| ModuleVector::zero(parity))
                .add_term(y, entry.poly.clone());
        }
        Ok(Self::build(datum, parity, max_len, Some(basis)))
    }
}

#[derive(Serialize, Deserialize, Clone)]
pub struct KlDumpEntry {
    pub x: String,
    pub y: String,
    pub poly: LaurentPoly,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct KlDump {
    pub datum: String,
    pub parity: String,
    pub max_len: u32,
    pub entries: Vec<KlDumpEntry>,
}
