//! Sparse Laurent polynomials over the integers in the variable `v`.
//!
//! This is the scalar ring for everything else in the crate. Coefficients
//! are arbitrary-precision integers, exponents may be negative, and values
//! are kept in canonical sparse form: no stored coefficient is zero.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// An element of Z[v, v^-1], stored as an exponent -> coefficient map.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// The monomial `v^exp`.
    pub fn monomial(exp: i64) -> Self {
        Self::term(exp, BigInt::one())
    }

    /// The single term `coeff * v^exp`.
    pub fn term(exp: i64, coeff: impl Into<BigInt>) -> Self {
        let coeff = coeff.into();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(0, c)
    }

    /// `v + v^-1`, the scalar that shows up in every out-case and quadratic relation.
    pub fn gauss_sum() -> Self {
        &Self::monomial(1) + &Self::monomial(-1)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, impl Into<BigInt>)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    /// Coefficient of `v^i` (zero if absent).
    pub fn coeff(&self, i: i64) -> BigInt {
        self.terms.get(&i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    /// Sum of all coefficients, i.e. the evaluation at `v = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// The bar involution `v -> v^-1` (exponent negation).
    pub fn bar(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn is_self_dual(&self) -> bool {
        self.terms.iter().all(|(e, c)| self.coeff(-e) == *c)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// The part with strictly positive exponents.
    pub fn positive_part(&self) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| **e > 0)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// True iff all exponents are >= 1 (membership in vZ[v]), or the poly is zero.
    pub fn in_v_pos(&self) -> bool {
        self.min_exp().map_or(true, |e| e >= 1)
    }

    /// True iff all exponents are <= -1 (membership in v^-1 Z[v^-1]), or zero.
    pub fn in_v_neg(&self) -> bool {
        self.max_exp().map_or(true, |e| e <= -1)
    }

    /// Sum of coefficients of `v^j` over all `j <= i`.
    pub fn coeff_sum_up_to(&self, i: i64) -> BigInt {
        self.terms
            .iter()
            .filter(|(e, _)| **e <= i)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn add_term(&mut self, exp: i64, coeff: impl Into<BigInt>) {
        let coeff = coeff.into();
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    /// Multiply by `c * v^exp` in place.
    pub fn mul_term(&self, exp: i64, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, k)| (e + exp, k * c)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn to_pairs(&self) -> Vec<(i64, BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c.clone())).collect()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let (sign, mag) = if c.sign() == num_bigint::Sign::Minus {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            match (*e, mag.is_one()) {
                (0, _) => write!(f, "{}", mag)?,
                (1, true) => write!(f, "v")?,
                (1, false) => write!(f, "{}v", mag)?,
                (_, true) => write!(f, "v^{}", e)?,
                (_, false) => write!(f, "{}v^{}", mag, e)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({})", self)
    }
}

// Wire format: an array of [exponent, coefficient] pairs sorted by exponent.
// Coefficients that fit in an i64 are emitted as JSON numbers; anything
// bigger falls back to a decimal string.
impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in &self.terms {
            match c.to_i64() {
                Some(n) => seq.serialize_element(&(*e, n))?,
                None => seq.serialize_element(&(*e, c.to_string()))?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairSeq;

        #[derive(Deserialize)]
        #[serde(untagged)]
        enum CoeffRepr {
            Int(i64),
            Big(String),
        }

        impl<'de> Visitor<'de> for PairSeq {
            type Value = LaurentPoly;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a sequence of [exponent, coefficient] pairs")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut poly = LaurentPoly::zero();
                while let Some((e, c)) = seq.next_element::<(i64, CoeffRepr)>()? {
                    let coeff = match c {
                        CoeffRepr::Int(n) => BigInt::from(n),
                        CoeffRepr::Big(s) => s
                            .parse::<BigInt>()
                            .map_err(|_| de::Error::custom("bad coefficient string"))?,
                    };
                    poly.add_term(e, coeff);
                }
                Ok(poly)
            }
        }

        deserializer.deserialize_seq(PairSeq)
    }
}
