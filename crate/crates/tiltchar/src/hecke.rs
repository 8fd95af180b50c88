//! Finitely supported vectors in the spherical module M and the
//! antispherical module N, with the generator actions and dualization.
//!
//! Both modules have standard basis {M_x} (resp. {N_x}) indexed by the
//! dominant-alcove set `W+`. The two parities differ only in the out-case
//! of the generator action: the spherical module picks up `v + v^-1`,
//! the antispherical module kills the term.

use crate::affine_weyl::{right_mult, AffineWeylError, AlcoveElement, RootDatum, StepResult};
use crate::laurent::LaurentPoly;
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Spherical,
    Antispherical,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Spherical => write!(f, "sph"),
            Parity::Antispherical => write!(f, "asph"),
        }
    }
}

/// A finitely supported `W+`-indexed vector of Laurent polynomials.
/// Entries never map to the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleVector {
    parity: Parity,
    entries: BTreeMap<AlcoveElement, LaurentPoly>,
}

impl ModuleVector {
    pub fn zero(parity: Parity) -> Self {
        ModuleVector {
            parity,
            entries: BTreeMap::new(),
        }
    }

    /// The standard basis vector M_x (or N_x).
    pub fn basis_vector(parity: Parity, x: &AlcoveElement) -> Self {
        let mut v = Self::zero(parity);
        v.add_term(x.clone(), LaurentPoly::one());
        v
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn coeff(&self, x: &AlcoveElement) -> LaurentPoly {
        self.entries.get(x).cloned().unwrap_or_else(LaurentPoly::zero)
    }

    pub fn add_term(&mut self, x: AlcoveElement, p: LaurentPoly) {
        if p.is_zero() {
            return;
        }
        let entry = self.entries.entry(x.clone()).or_insert_with(LaurentPoly::zero);
        *entry += &p;
        if entry.is_zero() {
            self.entries.remove(&x);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AlcoveElement, &LaurentPoly)> {
        self.entries.iter()
    }

    /// Support in increasing (length, word) order.
    pub fn support(&self) -> impl Iterator<Item = &AlcoveElement> {
        self.entries.keys()
    }

    /// The maximal support element in (length, word) order, if any.
    pub fn top(&self) -> Option<&AlcoveElement> {
        self.entries.keys().next_back()
    }

    pub fn scaled(&self, p: &LaurentPoly) -> Self {
        let mut out = Self::zero(self.parity);
        for (x, q) in &self.entries {
            out.add_term(x.clone(), p * q);
        }
        out
    }

    pub fn scaled_int(&self, c: &BigInt) -> Self {
        self.scaled(&LaurentPoly::constant(c.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.parity, other.parity, "parity mismatch");
        let mut out = self.clone();
        for (x, p) in &other.entries {
            out.add_term(x.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.parity, other.parity, "parity mismatch");
        let mut out = self.clone();
        for (x, p) in &other.entries {
            out.add_term(x.clone(), -p);
        }
        out
    }

    /// Render as a {word: polynomial} map for JSON output.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (x, p) in &self.entries {
            map.insert(x.to_string(), serde_json::to_value(p).expect("poly json"));
        }
        serde_json::Value::Object(map)
    }
}

/// Right action of `H_underline_s = H_s + v` on a vector, by linear
/// extension of the three-case formulas on the standard basis.
pub fn act_underline_hs(
    datum: &RootDatum,
    m: &ModuleVector,
    s: u8,
) -> Result<ModuleVector, AffineWeylError> {
    let mut out = ModuleVector::zero(m.parity);
    let v = LaurentPoly::monomial(1);
    let v_inv = LaurentPoly::monomial(-1);
    let gauss = LaurentPoly::gauss_sum();
    for (x, p) in m.iter() {
        match right_mult(datum, x, s)? {
            StepResult::UpIn(xs) => {
                out.add_term(xs, p.clone());
                out.add_term(x.clone(), p * &v);
            }
            StepResult::DownIn(xs) => {
                out.add_term(xs, p.clone());
                out.add_term(x.clone(), p * &v_inv);
            }
            StepResult::Out => {
                if m.parity == Parity::Spherical {
                    out.add_term(x.clone(), p * &gauss);
                }
                // Antispherical out-case kills the term.
            }
        }
    }
    Ok(out)
}

/// Right action of `H_tilde_s = H_s - v^-1`, i.e. the underline action
/// minus `(v + v^-1)` times the identity.
pub fn act_tilde_hs(
    datum: &RootDatum,
    m: &ModuleVector,
    s: u8,
) -> Result<ModuleVector, AffineWeylError> {
    let acted = act_underline_hs(datum, m, s)?;
    Ok(acted.sub(&m.scaled(&LaurentPoly::gauss_sum())))
}

/// Dual of a standard basis vector, expanded recursively along the
/// canonical word: d(e) = e, and for x = x's with s the canonical last
/// letter, d(x) = d(x') * (H_s + v - v^-1) = d(x') * H_underline_s - v^-1 d(x').
fn dual_basis(
    datum: &RootDatum,
    parity: Parity,
    x: &AlcoveElement,
) -> Result<ModuleVector, AffineWeylError> {
    let word = x.word();
    if word.is_empty() {
        return Ok(ModuleVector::basis_vector(parity, x));
    }
    let s = *word.last().expect("nonempty");
    let parent = match right_mult(datum, x, s)? {
        StepResult::DownIn(y) => y,
        other => panic!("canonical last letter must step down, got {other:?}"),
    };
    let dual_parent = dual_basis(datum, parity, &parent)?;
    let acted = act_underline_hs(datum, &dual_parent, s)?;
    Ok(acted.sub(&dual_parent.scaled(&LaurentPoly::monomial(-1))))
}

/// The bar involution of the module: coefficients are barred and each
/// standard basis vector is replaced by its dual expansion.
pub fn dualize(datum: &RootDatum, m: &ModuleVector) -> Result<ModuleVector, AffineWeylError> {
    let mut out = ModuleVector::zero(m.parity);
    for (x, p) in m.iter() {
        let d = dual_basis(datum, m.parity, x)?;
        out = out.add(&d.scaled(&p.bar()));
    }
    Ok(out)
}
