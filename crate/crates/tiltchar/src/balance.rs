//! The introduction's 4-step balancing algorithm on labeled parity data:
//! start from the dual parity filtration of the top Weyl block, repeatedly
//! pick the highest label with excess below the middle, and glue in its
//! block so the head lands on the reflected layer. Runs on abstract
//! labeled blocks and on alcove-derived blocks checked against t_{B,A}.

use crate::affine_weyl::AlcoveElement;
use crate::characters::{parity_layer, tilting_layers, CharError, CharTables, GradedCharacter};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BalanceError {
    #[error("excess of '{label}' above the middle at offset {p} with nothing left to balance")]
    UnbalancedAbove { label: String, p: i64 },
    #[error("not balanced after {0} insertions")]
    MaxStepsExceeded(u64),
    #[error("no block for label '{0}'")]
    UnknownLabel(String),
    #[error("bad block '{label}': {reason}")]
    BadBlock { label: String, reason: String },
    #[error(transparent)]
    Char(#[from] CharError),
}

/// The dual parity filtration of one Weyl block: `layers[d]` is the
/// multiset of labels at depth d below the head.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParityBlock {
    pub label: String,
    pub layers: Vec<Vec<String>>,
}

impl ParityBlock {
    pub fn new(label: impl Into<String>, layers: Vec<Vec<String>>) -> Self {
        ParityBlock {
            label: label.into(),
            layers,
        }
    }

    fn validate(&self) -> Result<(), BalanceError> {
        if self.layers.first().map(Vec::as_slice) != Some(std::slice::from_ref(&self.label)) {
            return Err(BalanceError::BadBlock {
                label: self.label.clone(),
                reason: "layer 0 must be exactly the head label".into(),
            });
        }
        Ok(())
    }
}

/// The running (and final) partial Loewy series: label multiplicities per
/// offset, plus the ordered trace of placed blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceState {
    layers: BTreeMap<i64, BTreeMap<String, u64>>,
    trace: Vec<(String, i64)>,
    top_label: String,
}

impl BalanceState {
    pub fn top_label(&self) -> &str {
        &self.top_label
    }

    /// Placed blocks in order, as (label, head offset).
    pub fn trace(&self) -> &[(String, i64)] {
        &self.trace
    }

    pub fn count(&self, label: &str, offset: i64) -> u64 {
        self.layers
            .get(&offset)
            .and_then(|l| l.get(label))
            .copied()
            .unwrap_or(0)
    }

    /// Occupied offsets, ascending.
    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        self.layers
            .iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(o, _)| *o)
    }

    pub fn layer(&self, offset: i64) -> BTreeMap<String, u64> {
        self.layers.get(&offset).cloned().unwrap_or_default()
    }

    fn place(&mut self, block: &ParityBlock, head_offset: i64) {
        for (d, labels) in block.layers.iter().enumerate() {
            let row = self.layers.entry(head_offset + d as i64).or_default();
            for label in labels {
                *row.entry(label.clone()).or_insert(0) += 1;
            }
        }
        self.trace.push((block.label.clone(), head_offset));
    }

    pub fn to_json(&self) -> serde_json::Value {
        let layers: Vec<serde_json::Value> = self
            .layers
            .iter()
            .filter(|(_, l)| !l.is_empty())
            .map(|(offset, row)| {
                let factors: Vec<serde_json::Value> = row
                    .iter()
                    .map(|(label, mult)| serde_json::json!({"word": label, "mult": mult}))
                    .collect();
                serde_json::json!({"offset": offset, "factors": factors})
            })
            .collect();
        serde_json::json!({
            "alcove": self.top_label,
            "trace": self.trace.iter().map(|(l, o)| serde_json::json!([l, o])).collect::<Vec<_>>(),
            "layers": layers,
        })
    }
}

/// Run the algorithm: place the top block at offset 0, then repeatedly
/// find labels over-represented below the middle (deficit D(μ,p) =
/// count(μ, p) − count(μ, −p) > 0 for p > 0, offsets increasing upward
/// toward negative, i.e. excess at positive p means a copy is missing at
/// −p), choose the largest such μ in the label order with the smallest p,
/// and place its block with head at −p.
pub fn balance_run(
    blocks: &BTreeMap<String, ParityBlock>,
    order: &[String],
    top: &str,
    max_steps: u64,
) -> Result<BalanceState, BalanceError> {
    for block in blocks.values() {
        block.validate()?;
    }
    let rank: BTreeMap<&str, usize> = order
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let top_block = blocks
        .get(top)
        .ok_or_else(|| BalanceError::UnknownLabel(top.to_string()))?;
    let mut state = BalanceState {
        layers: BTreeMap::new(),
        trace: Vec::new(),
        top_label: top.to_string(),
    };
    state.place(top_block, 0);

    let mut steps = 0u64;
    loop {
        // Scan deficits D(μ, p) for p > 0.
        let mut best: Option<(usize, i64, String)> = None;
        let mut negative: Option<(String, i64)> = None;
        for (&p, row) in state.layers.range(1..) {
            for (label, &above) in row {
                let below = state.count(label, -p);
                if above > below {
                    let r = *rank
                        .get(label.as_str())
                        .ok_or_else(|| BalanceError::UnknownLabel(label.clone()))?;
                    let candidate = (r, p, label.clone());
                    if best.as_ref().map_or(true, |b| candidate < *b) {
                        best = Some(candidate);
                    }
                } else if above < below && negative.is_none() {
                    negative = Some((label.clone(), -p));
                }
            }
        }
        // Excess strictly below the middle with nothing above to match.
        if best.is_none() {
            for (&p, row) in state.layers.range(..0) {
                for (label, &below) in row {
                    if below > state.count(label, -p) {
                        negative = Some((label.clone(), p));
                    }
                }
            }
        }
        match (best, negative) {
            (Some((_, p, label)), _) => {
                if steps >= max_steps {
                    return Err(BalanceError::MaxStepsExceeded(max_steps));
                }
                steps += 1;
                let block = blocks
                    .get(&label)
                    .ok_or_else(|| BalanceError::UnknownLabel(label.clone()))?;
                state.place(block, -p);
            }
            (None, Some((label, p))) => {
                return Err(BalanceError::UnbalancedAbove { label, p });
            }
            (None, None) => return Ok(state),
        }
    }
}

/// The total order on alcove labels used by the algorithm: length
/// descending, then ShortLex within a length.
pub fn alcove_label_order(elements: &[AlcoveElement]) -> Vec<String> {
    let mut sorted: Vec<&AlcoveElement> = elements.iter().collect();
    sorted.sort_by(|x, y| {
        y.length()
            .cmp(&x.length())
            .then_with(|| x.word().cmp(y.word()))
    });
    sorted.iter().map(|x| x.word_string()).collect()
}

/// Build the blocks for every alcove up to ℓ(A) from the parity
/// filtration layers, run the algorithm, and compare the result against
/// the graded character cut out by the t-polynomials.
pub fn balance_from_alcove(
    tables: &CharTables,
    a: &AlcoveElement,
) -> Result<(BalanceState, GradedCharacter, bool), BalanceError> {
    let in_range: Vec<AlcoveElement> = tables
        .sph
        .elements()
        .iter()
        .filter(|x| x.length() <= a.length())
        .cloned()
        .collect();
    let mut blocks = BTreeMap::new();
    for mu in &in_range {
        let mut layers: Vec<Vec<String>> = Vec::new();
        for d in 0..=mu.length() {
            let mut row = Vec::new();
            for (b, mult) in parity_layer(tables, mu, d)? {
                for _ in 0..mult {
                    row.push(b.word_string());
                }
            }
            layers.push(row);
        }
        while layers.last().is_some_and(Vec::is_empty) {
            layers.pop();
        }
        blocks.insert(mu.word_string(), ParityBlock::new(mu.word_string(), layers));
    }
    let order = alcove_label_order(&in_range);
    let max_steps = 4u64.saturating_pow(a.length() + 2);
    let state = balance_run(&blocks, &order, &a.word_string(), max_steps)?;

    let mut character = GradedCharacter::new();
    let by_word: BTreeMap<String, &AlcoveElement> =
        in_range.iter().map(|x| (x.word_string(), x)).collect();
    for offset in state.offsets().collect::<Vec<_>>() {
        for (label, mult) in state.layer(offset) {
            character.add((*by_word[&label]).clone(), offset, mult);
        }
    }
    let expected = tilting_layers(tables, a)?;
    let equal = character == expected;
    Ok((state, character, equal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine_weyl::{parse_word, RootDatum};
    use std::sync::Arc;

    fn blocks_of(data: &[(&str, &[&[&str]])]) -> BTreeMap<String, ParityBlock> {
        data.iter()
            .map(|(label, layers)| {
                (
                    label.to_string(),
                    ParityBlock::new(
                        *label,
                        layers
                            .iter()
                            .map(|row| row.iter().map(|s| s.to_string()).collect())
                            .collect(),
                    ),
                )
            })
            .collect()
    }

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn single_block_already_balanced() {
        let blocks = blocks_of(&[("x", &[&["x"]])]);
        let state = balance_run(&blocks, &strs(&["x"]), "x", 100).unwrap();
        assert_eq!(state.trace(), &[("x".to_string(), 0)]);
        assert_eq!(state.layer(0), [("x".to_string(), 1)].into());
        assert_eq!(state.offsets().count(), 1);
    }

    #[test]
    fn sl2_chain() {
        let blocks = blocks_of(&[("K", &[&["K"], &["J"]]), ("J", &[&["J"], &["I"]])]);
        let state = balance_run(&blocks, &strs(&["K", "J", "I"]), "K", 100).unwrap();
        assert_eq!(
            state.trace(),
            &[("K".to_string(), 0), ("J".to_string(), -1)]
        );
        assert_eq!(state.layer(-1), [("J".to_string(), 1)].into());
        assert_eq!(
            state.layer(0),
            [("K".to_string(), 1), ("I".to_string(), 1)].into()
        );
        assert_eq!(state.layer(1), [("J".to_string(), 1)].into());
    }

    #[test]
    fn b2_figure_run() {
        let blocks = blocks_of(&[
            ("9", &[&["9"], &["7", "6", "3", "1"], &["2", "5"]]),
            ("7", &[&["7"], &["5", "4", "2"], &["3"]]),
            ("6", &[&["6"], &["5"]]),
            ("5", &[&["5"], &["3"]]),
            ("3", &[&["3"], &["2"]]),
            ("2", &[&["2"], &["1"]]),
        ]);
        let order = strs(&["9", "7", "6", "5", "4", "3", "2", "1"]);
        let state = balance_run(&blocks, &order, "9", 1000).unwrap();
        let expected_trace: Vec<(String, i64)> = [
            ("9", 0),
            ("7", -1),
            ("6", -1),
            ("5", -2),
            ("3", -1),
            ("2", -2),
        ]
        .iter()
        .map(|(l, o)| (l.to_string(), *o))
        .collect();
        assert_eq!(state.trace(), expected_trace.as_slice());

        let layer = |labels: &[&str]| {
            let mut m: BTreeMap<String, u64> = BTreeMap::new();
            for l in labels {
                *m.entry(l.to_string()).or_insert(0) += 1;
            }
            m
        };
        assert_eq!(state.layer(-2), layer(&["2", "5"]));
        assert_eq!(state.layer(-1), layer(&["7", "1", "6", "3", "3"]));
        assert_eq!(state.layer(0), layer(&["9", "5", "4", "2", "5", "2"]));
        assert_eq!(state.layer(1), layer(&["3", "7", "6", "3", "1"]));
        assert_eq!(state.layer(2), layer(&["2", "5"]));
        assert_eq!(state.offsets().collect::<Vec<_>>(), vec![-2, -1, 0, 1, 2]);
    }

    #[test]
    fn unknown_label_error() {
        let blocks = blocks_of(&[("x", &[&["x"], &["y"]])]);
        let err = balance_run(&blocks, &strs(&["x", "y"]), "z", 100).unwrap_err();
        assert!(matches!(err, BalanceError::UnknownLabel(l) if l == "z"));
        // Deficit names a label with no block.
        let err = balance_run(&blocks, &strs(&["x", "y"]), "x", 100).unwrap_err();
        assert!(matches!(err, BalanceError::UnknownLabel(l) if l == "y"));
    }

    #[test]
    fn unbalanced_above_error() {
        // Balancing y drags z above the middle with no partner below.
        let blocks = blocks_of(&[
            ("x", &[&["x"], &[], &["y"]]),
            ("y", &[&["y"], &["z"]]),
            ("z", &[&["z"]]),
        ]);
        let err = balance_run(&blocks, &strs(&["x", "y", "z"]), "x", 100).unwrap_err();
        assert!(matches!(err, BalanceError::UnbalancedAbove { .. }), "{err}");
    }

    #[test]
    fn max_steps_error() {
        let blocks = blocks_of(&[("K", &[&["K"], &["J"]]), ("J", &[&["J"], &["I"]])]);
        let err = balance_run(&blocks, &strs(&["K", "J", "I"]), "K", 0).unwrap_err();
        assert!(matches!(err, BalanceError::MaxStepsExceeded(0)));
    }

    #[test]
    fn bad_block_error() {
        let blocks = blocks_of(&[("x", &[&["x", "x"]])]);
        let err = balance_run(&blocks, &strs(&["x"]), "x", 100).unwrap_err();
        assert!(matches!(err, BalanceError::BadBlock { .. }));
    }

    fn tables(name: &str, max_len: u32) -> CharTables {
        CharTables::new(Arc::new(RootDatum::builtin(name).unwrap()), max_len)
    }

    #[test]
    fn alcove_identity_trivial() {
        let t = tables("A1", 4);
        let e = parse_word(t.datum(), "e").unwrap();
        let (state, character, equal) = balance_from_alcove(&t, &e).unwrap();
        assert!(equal);
        assert_eq!(state.trace().len(), 1);
        assert_eq!(character.entry(&e, 0), 1);
    }

    #[test]
    fn alcove_a1_example() {
        let t = tables("A1", 4);
        let a = parse_word(t.datum(), "01").unwrap();
        let (state, _, equal) = balance_from_alcove(&t, &a).unwrap();
        assert!(equal);
        assert_eq!(
            state.trace(),
            &[("01".to_string(), 0), ("0".to_string(), -1)]
        );
    }

    #[test]
    fn alcove_matches_tilting_layers_small() {
        for name in ["A1", "A2", "B2"] {
            let t = tables(name, 5);
            for a in t.asph.elements() {
                let (state, _, equal) = balance_from_alcove(&t, a).unwrap();
                assert!(equal, "{name} A={a}");
                // Trace content matches the Soergel Δ-multiplicities,
                // and head offsets read off the n-polynomial degrees.
                let mut traced: BTreeMap<String, Vec<i64>> = BTreeMap::new();
                for (label, offset) in state.trace() {
                    traced.entry(label.clone()).or_default().push(*offset);
                }
                for (mu, n) in t.asph.kl_basis(a).unwrap().iter() {
                    let mut expected: Vec<i64> = n
                        .iter()
                        .flat_map(|(d, c)| {
                            let c: u64 = c.try_into().unwrap();
                            std::iter::repeat(-d).take(c as usize)
                        })
                        .collect();
                    expected.sort_unstable();
                    let mut got = traced.remove(&mu.word_string()).unwrap_or_default();
                    got.sort_unstable();
                    assert_eq!(got, expected, "{name} A={a} μ={mu}");
                }
                assert!(traced.is_empty(), "{name} A={a}: extra traced {traced:?}");
            }
        }
    }

    #[test]
    fn tie_break_permutation_does_not_change_character() {
        // Reverse the ShortLex tie-break within each length and check
        // the final layers are unchanged on B2.
        let t = tables("B2", 5);
        for a in t.asph.elements() {
            let in_range: Vec<AlcoveElement> = t
                .sph
                .elements()
                .iter()
                .filter(|x| x.length() <= a.length())
                .cloned()
                .collect();
            let mut rev = in_range.clone();
            rev.sort_by(|x, y| {
                y.length()
                    .cmp(&x.length())
                    .then_with(|| y.word().cmp(x.word()))
            });
            let rev_order: Vec<String> = rev.iter().map(|x| x.word_string()).collect();

            let mut blocks = BTreeMap::new();
            for mu in &in_range {
                let mut layers: Vec<Vec<String>> = Vec::new();
                for d in 0..=mu.length() {
                    let mut row = Vec::new();
                    for (b, mult) in parity_layer(&t, mu, d).unwrap() {
                        for _ in 0..mult {
                            row.push(b.word_string());
                        }
                    }
                    layers.push(row);
                }
                while layers.last().is_some_and(Vec::is_empty) {
                    layers.pop();
                }
                blocks.insert(mu.word_string(), ParityBlock::new(mu.word_string(), layers));
            }
            let permuted =
                balance_run(&blocks, &rev_order, &a.word_string(), 1 << 20).unwrap();
            let (canonical, _, equal) = balance_from_alcove(&t, a).unwrap();
            assert!(equal);
            for offset in canonical.offsets().chain(permuted.offsets()).collect::<Vec<_>>() {
                assert_eq!(
                    canonical.layer(offset),
                    permuted.layer(offset),
                    "A={a} offset={offset}"
                );
            }
        }
    }
}
