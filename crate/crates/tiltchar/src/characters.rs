//! Character-level formulas on top of the KL tables: the balanced tilting
//! polynomials t_{B,A}, Lusztig/Soergel multiplicities at v = 1, parity
//! filtration layers, graded tilting characters, wall-crossing, and the
//! partial-character sums from the main theorem's proof.

use crate::affine_weyl::AlcoveElement;
use crate::hecke::{act_tilde_hs, act_underline_hs, ModuleVector, Parity};
use crate::kl::{KLTable, KlError};
use crate::laurent::LaurentPoly;
use crate::RootDatum;
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CharError {
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error("filtration index {k} out of range 1..={size}")]
    KOutOfRange { k: usize, size: usize },
}

/// The spherical and antispherical tables for one root datum and length
/// bound, bundled because the tilting polynomials mix both parities.
pub struct CharTables {
    pub sph: KLTable,
    pub asph: KLTable,
}

impl CharTables {
    pub fn new(datum: Arc<RootDatum>, max_len: u32) -> Self {
        CharTables {
            sph: KLTable::new(datum.clone(), Parity::Spherical, max_len),
            asph: KLTable::new(datum, Parity::Antispherical, max_len),
        }
    }

    pub fn from_parts(sph: KLTable, asph: KLTable) -> Self {
        CharTables { sph, asph }
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        self.sph.datum()
    }

    pub fn max_len(&self) -> u32 {
        self.sph.max_len()
    }

    fn table(&self, parity: Parity) -> &KLTable {
        match parity {
            Parity::Spherical => &self.sph,
            Parity::Antispherical => &self.asph,
        }
    }
}

/// Multiplicities of simples in the layers of a graded (Loewy-type)
/// character, keyed by (alcove, offset). Offset 0 is the middle layer;
/// positive offsets run toward the socle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedCharacter {
    entries: BTreeMap<(AlcoveElement, i64), u64>,
}

impl GradedCharacter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entry(&self, b: &AlcoveElement, i: i64) -> u64 {
        self.entries.get(&(b.clone(), i)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, b: AlcoveElement, i: i64, mult: u64) {
        if mult > 0 {
            *self.entries.entry((b, i)).or_insert(0) += mult;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(AlcoveElement, i64), &u64)> {
        self.entries.iter()
    }

    pub fn is_balanced(&self) -> bool {
        self.entries
            .iter()
            .all(|((b, i), m)| self.entry(b, -i) == *m)
    }

    /// Offsets with at least one factor, ascending.
    pub fn offsets(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.entries.keys().map(|(_, i)| *i).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Factors of one layer, keyed by alcove.
    pub fn layer(&self, i: i64) -> BTreeMap<AlcoveElement, u64> {
        self.entries
            .iter()
            .filter(|((_, j), _)| *j == i)
            .map(|((b, _), m)| (b.clone(), *m))
            .collect()
    }

    /// Total multiplicity of one simple across all layers.
    pub fn total(&self, b: &AlcoveElement) -> u64 {
        self.entries
            .iter()
            .filter(|((c, _), _)| c == b)
            .map(|(_, m)| *m)
            .sum()
    }

    pub fn to_json(&self, alcove: &str) -> serde_json::Value {
        let layers: Vec<serde_json::Value> = self
            .offsets()
            .into_iter()
            .map(|i| {
                let factors: Vec<serde_json::Value> = self
                    .layer(i)
                    .into_iter()
                    .map(|(b, m)| {
                        serde_json::json!({"word": b.word_string(), "mult": m})
                    })
                    .collect();
                serde_json::json!({"offset": i, "factors": factors})
            })
            .collect();
        serde_json::json!({"alcove": alcove, "layers": layers})
    }
}

fn to_u64(c: &num_bigint::BigInt) -> u64 {
    c.to_u64().expect("multiplicity fits in u64 and is non-negative")
}

/// t_{B,A} = Σ_C n_{C,A}·bar(m^{C,B}), summed over the support of N̲_A.
pub fn tilting_poly(
    tables: &CharTables,
    b: &AlcoveElement,
    a: &AlcoveElement,
) -> Result<LaurentPoly, CharError> {
    let mut out = LaurentPoly::zero();
    for (c, n) in tables.asph.kl_basis(a)?.iter() {
        let m = tables.sph.inverse_poly(c, b)?;
        if !m.is_zero() {
            out += &(n * &m.bar());
        }
    }
    Ok(out)
}

/// The graded character of T(A): entry(B, i) = coeff(t_{B,A}, |i|).
pub fn tilting_layers(tables: &CharTables, a: &AlcoveElement) -> Result<GradedCharacter, CharError> {
    let mut out = GradedCharacter::new();
    for b in tables.asph.elements() {
        let t = tilting_poly(tables, b, a)?;
        for (exp, coeff) in t.iter() {
            if exp >= 0 {
                out.add(b.clone(), exp, to_u64(coeff));
                if exp > 0 {
                    out.add(b.clone(), -exp, to_u64(coeff));
                }
            }
        }
    }
    Ok(out)
}

/// Lusztig's formula: composition multiplicities of the Weyl module,
/// B ↦ m^{A,B}(1).
pub fn weyl_simple_mults(
    tables: &CharTables,
    a: &AlcoveElement,
) -> Result<BTreeMap<AlcoveElement, u64>, CharError> {
    let mut out = BTreeMap::new();
    for b in tables.sph.elements() {
        let val = tables.sph.inverse_poly(a, b)?.eval_at_one();
        if val != 0.into() {
            out.insert(b.clone(), to_u64(&val));
        }
    }
    Ok(out)
}

/// Soergel's formula: Δ-multiplicities of the tilting module, B ↦ n_{B,A}(1).
pub fn tilting_weyl_mults(
    tables: &CharTables,
    a: &AlcoveElement,
) -> Result<BTreeMap<AlcoveElement, u64>, CharError> {
    let mut out = BTreeMap::new();
    for (b, n) in tables.asph.kl_basis(a)?.iter() {
        let val = n.eval_at_one();
        if val != 0.into() {
            out.insert(b.clone(), to_u64(&val));
        }
    }
    Ok(out)
}

/// Layer i of the parity filtration of ∇(A): B ↦ coeff(m^{A,B}, i).
pub fn parity_layer(
    tables: &CharTables,
    a: &AlcoveElement,
    i: u32,
) -> Result<BTreeMap<AlcoveElement, u64>, CharError> {
    let mut out = BTreeMap::new();
    for b in tables.sph.elements() {
        let coeff = tables.sph.inverse_poly(a, b)?.coeff(i as i64);
        if coeff != 0.into() {
            out.insert(b.clone(), to_u64(&coeff));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Standard,
    Canonical,
    Tilde,
}

/// Unitriangular change of coordinates between the standard, canonical,
/// and tilde bases of the module of the table's parity.
pub fn basis_change(
    table: &KLTable,
    v: &ModuleVector,
    from: Basis,
    to: Basis,
) -> Result<ModuleVector, CharError> {
    if from == to {
        return Ok(v.clone());
    }
    // Expand to standard coordinates first.
    let standard = match from {
        Basis::Standard => v.clone(),
        Basis::Canonical | Basis::Tilde => {
            let mut acc = ModuleVector::zero(v.parity());
            for (x, c) in v.iter() {
                let base = match from {
                    Basis::Canonical => table.kl_basis(x)?,
                    _ => table.tilde_basis(x)?,
                };
                acc = acc.add(&base.scaled(c));
            }
            acc
        }
    };
    if to == Basis::Standard {
        return Ok(standard);
    }
    // Triangular solve: peel off the longest support element repeatedly.
    let mut rest = standard;
    let mut coords = ModuleVector::zero(v.parity());
    loop {
        let mut support: Vec<AlcoveElement> = rest.support().cloned().collect();
        if support.is_empty() {
            break;
        }
        support.sort();
        let x = support.pop().expect("nonempty");
        let c = rest.coeff(&x);
        let base = match to {
            Basis::Canonical => table.kl_basis(&x)?,
            _ => table.tilde_basis(&x)?,
        };
        rest = rest.sub(&base.scaled(&c));
        coords.add_term(x, c);
    }
    Ok(coords)
}

/// The decomposition of a wall-crossed character over the tilde basis,
/// following the paper's display: for each tilde term Ñ_B with s·B > B,
/// Ñ_B·H̲_s = (v+v⁻¹)Ñ_B + Ñ_{s·B} + Σ_D bar(m^s_{D,B})·Ñ_D. Terms with
/// s·B < B are annihilated, and so are wall-adjacent antispherical
/// terms; wall-adjacent spherical terms keep their scaled and middle
/// parts. The middle is the residual tilde step T̃_B·H̃_s minus its
/// leading term; for an upward antispherical step its coefficients are
/// the bar(m^s_{D,B}). All parts are in tilde coordinates; `remainder`
/// is whatever the displayed parts fail to account for (always zero —
/// it is kept so verification can assert exactness).
pub struct WallCrossChar {
    pub scaled: ModuleVector,
    pub shifted: ModuleVector,
    pub middle: ModuleVector,
    pub remainder: ModuleVector,
    pub total: ModuleVector,
}

pub fn wall_cross_char(
    tables: &CharTables,
    v: &ModuleVector,
    s: u8,
) -> Result<WallCrossChar, CharError> {
    let parity = v.parity();
    let table = tables.table(parity);
    let datum = tables.datum();

    let standard = basis_change(table, v, Basis::Canonical, Basis::Standard)?;
    let tilde_in = basis_change(table, &standard, Basis::Standard, Basis::Tilde)?;
    let acted = act_underline_hs(datum, &standard, s).map_err(KlError::from)?;
    let total = basis_change(table, &acted, Basis::Standard, Basis::Tilde)?;

    let gauss = LaurentPoly::gauss_sum();
    let mut scaled = ModuleVector::zero(parity);
    let mut shifted = ModuleVector::zero(parity);
    let mut middle = ModuleVector::zero(parity);
    for (b, c) in tilde_in.iter() {
        let step = crate::right_mult(datum, b, s).map_err(KlError::from)?;
        match step {
            // Terms with a descent are annihilated exactly: H̲_s = H̃_s
            // + (v+v⁻¹) and H̃_s has eigenvalue −(v+v⁻¹) on them. The
            // same happens to wall-adjacent antispherical terms.
            crate::StepResult::DownIn(_) => continue,
            crate::StepResult::Out if parity == Parity::Antispherical => continue,
            _ => {}
        }
        scaled.add_term(b.clone(), c * &gauss);
        // The residual tilde step: T̃_B·H̃_s minus its leading term.
        let acted_t =
            act_tilde_hs(datum, table.tilde_basis(b)?, s).map_err(KlError::from)?;
        let mut corr = basis_change(table, &acted_t, Basis::Standard, Basis::Tilde)?;
        if let crate::StepResult::UpIn(bs) = step {
            shifted.add_term(bs.clone(), c.clone());
            corr = corr.sub(&ModuleVector::basis_vector(parity, &bs));
        }
        for (d, p) in corr.iter() {
            middle.add_term(d.clone(), c * p);
        }
    }
    let remainder = total.sub(&scaled).sub(&shifted).sub(&middle);
    Ok(WallCrossChar {
        scaled,
        shifted,
        middle,
        remainder,
        total,
    })
}

/// The Δ-filtration occurrence list for T(A): each C in the Soergel
/// support listed n_{C,A}(1) times, sorted by decreasing length and
/// ShortLex within a length.
pub fn delta_filtration_order(
    tables: &CharTables,
    a: &AlcoveElement,
) -> Result<Vec<AlcoveElement>, CharError> {
    let mut weights: Vec<AlcoveElement> = Vec::new();
    for (c, mult) in tilting_weyl_mults(tables, a)? {
        for _ in 0..mult {
            weights.push(c.clone());
        }
    }
    weights.sort_by(|x, y| {
        y.length()
            .cmp(&x.length())
            .then_with(|| x.word().cmp(y.word()))
    });
    Ok(weights)
}

/// The partial-character sums from the main theorem's proof:
/// λ ↦ (Σ_{j≤k} bar(m^{λ_j,λ}))_{≤i}, with λ_1 ≥ λ_2 ≥ … the occurrence
/// list from `delta_filtration_order` and the cutoff summing every
/// coefficient of exponent at most i.
pub fn partial_character(
    tables: &CharTables,
    a: &AlcoveElement,
    k: usize,
    i: i64,
) -> Result<BTreeMap<AlcoveElement, i64>, CharError> {
    let order = delta_filtration_order(tables, a)?;
    if k == 0 || k > order.len() {
        return Err(CharError::KOutOfRange {
            k,
            size: order.len(),
        });
    }
    let mut out = BTreeMap::new();
    for lam in tables.sph.elements() {
        let mut acc = num_bigint::BigInt::from(0);
        for lam_j in &order[..k] {
            acc += tables.sph.inverse_poly(lam_j, lam)?.bar().coeff_sum_up_to(i);
        }
        if acc != 0.into() {
            out.insert(
                lam.clone(),
                acc.to_i64().expect("partial multiplicity fits in i64"),
            );
        }
    }
    Ok(out)
}
