//! Finite words over the alphabet of a system and the cuts `A*(delta)`.
//!
//! Letters are stored 0-based; `Display` prints them 1-based so that the
//! word `12` means `phi_1 ∘ phi_2`.

use std::fmt;

use crate::ifs::IfsSystem;
use crate::{Error, Result};

/// Default budget on the predicted size of a cut.
pub const DEFAULT_CUT_BUDGET: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Word {
    letters: Vec<u16>,
    weight: f64,
}

impl Eq for Word {}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on letters (a prefix sorts first).
impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.letters.cmp(&other.letters)
    }
}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.letters.hash(state)
    }
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new(), weight: 1.0 }
    }

    pub fn from_letters(system: &IfsSystem, letters: Vec<u16>) -> Self {
        let weight = letters.iter().map(|&l| system.lip(l as usize)).product();
        Word { letters, weight }
    }

    /// Parses `"1232"` (digits, 1-based) or `"1.12.3"` (dot separated).
    pub fn parse(system: &IfsSystem, text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "e" {
            return Ok(Word::empty());
        }
        let raw: Vec<usize> = if text.contains('.') {
            text.split('.')
                .map(|p| p.parse::<usize>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Parse(format!("bad letter {c:?}"))))
                .collect::<Result<_>>()?
        };
        let mut letters = Vec::with_capacity(raw.len());
        for r in raw {
            if r == 0 || r > system.len() {
                return Err(Error::Parse(format!("letter {r} outside 1..={}", system.len())));
            }
            letters.push((r - 1) as u16);
        }
        Ok(Word::from_letters(system, letters))
    }

    pub fn letters(&self) -> &[u16] {
        &self.letters
    }
    pub fn len(&self) -> usize {
        self.letters.len()
    }
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
    /// `L_w`, the product of the letters' ratios.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn child(&self, system: &IfsSystem, letter: u16) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.extend_from_slice(&self.letters);
        letters.push(letter);
        Word { letters, weight: self.weight * system.lip(letter as usize) }
    }

    pub fn concat(&self, system: &IfsSystem, tail: &[u16]) -> Word {
        let mut w = self.clone();
        for &l in tail {
            w.letters.push(l);
            w.weight *= system.lip(l as usize);
        }
        w
    }

    pub fn prefix(&self, system: &IfsSystem, n: usize) -> Word {
        Word::from_letters(system, self.letters[..n].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.letters.starts_with(&self.letters)
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.letters.iter().zip(&other.letters).take_while(|(a, b)| a == b).count()
    }

    /// Neither word is a prefix of the other.
    pub fn incomparable(&self, other: &Word) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    pub fn apply(&self, system: &IfsSystem, x: &[f64]) -> Vec<f64> {
        system.apply_letters(&self.letters, x)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "ε");
        }
        if self.letters.iter().all(|&l| l < 9) {
            for l in &self.letters {
                write!(f, "{}", l + 1)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(|l| (l + 1).to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// The cut `A*_root(delta)` in depth-first (lexicographic) order.
#[derive(Clone, Debug)]
pub struct WordCut {
    pub delta: f64,
    pub words: Vec<Word>,
}

impl WordCut {
    pub fn len(&self) -> usize {
        self.words.len()
    }
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
    /// `sum L_w^s`.
    pub fn mass(&self, s: f64) -> f64 {
        self.words.iter().map(|w| w.weight.powf(s)).sum()
    }
}

/// Predicted upper bound `L_1^{-s} (L_root / delta)^s` on the size of a cut.
pub fn predicted_cut_size(system: &IfsSystem, root_weight: f64, delta: f64) -> f64 {
    let s = system.s();
    system.min_lip().powf(-s) * (root_weight / delta).powf(s)
}

/// `A*_root(delta)` with the default budget.
pub fn word_cut(system: &IfsSystem, delta: f64, root: &Word) -> Result<WordCut> {
    word_cut_with_budget(system, delta, root, DEFAULT_CUT_BUDGET)
}

pub fn word_cut_with_budget(
    system: &IfsSystem,
    delta: f64,
    root: &Word,
    budget: usize,
) -> Result<WordCut> {
    if !(delta > 0.0) || delta > root.weight {
        return Err(Error::InvalidInput(format!(
            "cut needs 0 < delta <= L_root = {}, got {delta}",
            root.weight
        )));
    }
    if root.is_empty() && delta >= 1.0 {
        return Ok(WordCut { delta, words: vec![Word::empty()] });
    }
    let predicted = predicted_cut_size(system, root.weight, delta);
    if predicted > budget as f64 {
        return Err(Error::CutTooFine { predicted, budget });
    }
    Ok(WordCut { delta, words: expand(system, root, delta) })
}

/// All descendants `u` of `root` with `L_u < delta <= L_parent(u)`, never
/// `root` itself. Assumes `delta <= L_root`.
pub(crate) fn expand(system: &IfsSystem, root: &Word, delta: f64) -> Vec<Word> {
    let k = system.len() as u16;
    let mut out = Vec::new();
    let mut stack = vec![root.clone()];
    while let Some(w) = stack.pop() {
        if w.weight < delta && w.len() > root.len() {
            out.push(w);
            continue;
        }
        for l in (0..k).rev() {
            stack.push(w.child(system, l));
        }
    }
    out
}

/// Relative cut `A*(delta)` computed by the defining inequality for any
/// `delta <= 1` (no `A*(1) = {ε}` convention): the children suffixes used
/// when refining a cylinder.
pub(crate) fn relative_cut(system: &IfsSystem, delta: f64) -> Vec<Word> {
    expand(system, &Word::empty(), delta.min(1.0))
}

/// The unique prefix of `w` lying in `A*(delta)`.
pub fn ancestor_in_cut(system: &IfsSystem, w: &Word, delta: f64) -> Result<Word> {
    if delta <= w.weight {
        return Err(Error::NoAncestor { word: w.to_string(), delta });
    }
    if delta >= 1.0 {
        return Ok(Word::empty());
    }
    let mut weight = 1.0;
    for (n, &l) in w.letters.iter().enumerate() {
        weight *= system.lip(l as usize);
        if weight < delta {
            return Ok(Word { letters: w.letters[..=n].to_vec(), weight });
        }
    }
    // rounding can make the running product differ from the cached weight
    Ok(w.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use proptest::prelude::*;

    #[test]
    fn koch_cut_at_one_fifth() {
        let koch = gallery::koch();
        let cut = word_cut(&koch, 0.2, &Word::empty()).unwrap();
        assert_eq!(cut.len(), 16);
        assert!(cut.words.iter().all(|w| w.len() == 2));
    }

    #[test]
    fn mixed_cut_in_given_order() {
        let sys = gallery::mixed();
        let cut = word_cut(&sys, 0.3, &Word::empty()).unwrap();
        let names: Vec<String> = cut.words.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["11", "12", "13", "2", "3"]);
        let total: f64 = cut.words.iter().map(|w| w.weight()).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cut_at_one_is_the_empty_word() {
        let cut = word_cut(&gallery::gasket(), 1.0, &Word::empty()).unwrap();
        assert_eq!(cut.words, vec![Word::empty()]);
    }

    #[test]
    fn cut_budget() {
        let err = word_cut_with_budget(&gallery::gasket(), 1e-6, &Word::empty(), 1000).unwrap_err();
        assert!(matches!(err, Error::CutTooFine { .. }));
    }

    #[test]
    fn ancestor_examples() {
        let koch = gallery::koch();
        let w = Word::parse(&koch, "1232").unwrap();
        assert_eq!(ancestor_in_cut(&koch, &w, 1.0 / 3.0).unwrap().to_string(), "12");
        let single = Word::parse(&koch, "3").unwrap();
        assert_eq!(ancestor_in_cut(&koch, &single, 0.5).unwrap(), single);
        let mixed = gallery::mixed();
        let w = Word::parse(&mixed, "113").unwrap();
        assert_eq!(ancestor_in_cut(&mixed, &w, 0.3).unwrap().to_string(), "11");
        assert!(matches!(
            ancestor_in_cut(&koch, &Word::parse(&koch, "1").unwrap(), 0.2),
            Err(Error::NoAncestor { .. })
        ));
    }

    #[test]
    fn apply_word_on_the_gasket() {
        let g = gallery::gasket();
        let o = [0.0, 0.0];
        assert_eq!(Word::empty().apply(&g, &o), vec![0.0, 0.0]);
        let p = Word::parse(&g, "2").unwrap().apply(&g, &o);
        assert!((p[0] - 0.5).abs() < 1e-15 && p[1].abs() < 1e-15);
        let p = Word::parse(&g, "23").unwrap().apply(&g, &o);
        assert!((p[0] - 0.625).abs() < 1e-15);
        assert!((p[1] - 3f64.sqrt() / 8.0).abs() < 1e-15);
    }

    #[test]
    fn display_and_parse_round_trip() {
        let sys = gallery::fig4_carpet();
        let w = Word::from_letters(&sys, vec![0, 11, 13]);
        assert_eq!(w.to_string(), "1.12.14");
        assert_eq!(Word::parse(&sys, &w.to_string()).unwrap(), w);
    }

    /// Every word below the cut has exactly one prefix in it (checked
    /// exhaustively to depth 8 on a 3-letter alphabet).
    #[test]
    fn partition_uniqueness_exhaustive() {
        let sys = gallery::mixed();
        for delta in [0.3, 0.1, 0.02] {
            let cut = word_cut(&sys, delta, &Word::empty()).unwrap();
            let set: std::collections::HashSet<Vec<u16>> =
                cut.words.iter().map(|w| w.letters().to_vec()).collect();
            let mut level: Vec<Vec<u16>> = vec![vec![]];
            for _ in 0..8 {
                level = level
                    .into_iter()
                    .flat_map(|w| (0..3u16).map(move |i| [w.clone(), vec![i]].concat()))
                    .collect();
                for w in &level {
                    let word = Word::from_letters(&sys, w.clone());
                    if word.weight() >= delta {
                        continue;
                    }
                    let hits = (1..=w.len()).filter(|&n| set.contains(&w[..n])).count();
                    assert_eq!(hits, 1, "word {word} delta {delta}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn cut_invariants(lips in prop::collection::vec(0.05f64..0.7, 2..5), e in 0.5f64..4.0) {
            let sys = gallery::line_system(&lips.iter().map(|l| l / lips.iter().sum::<f64>().max(1.0)).collect::<Vec<_>>());
            let delta = 10f64.powf(-e);
            let cut = word_cut(&sys, delta, &Word::empty()).unwrap();
            let s = sys.s();
            prop_assert!((cut.mass(s) - 1.0).abs() < 1e-9);
            for w in &cut.words {
                prop_assert!(w.weight() < delta);
                let parent = Word::from_letters(&sys, w.letters()[..w.len() - 1].to_vec());
                prop_assert!(parent.weight() >= delta);
            }
            for pair in cut.words.windows(2) {
                prop_assert!(pair[0] < pair[1]);
                prop_assert!(pair[0].incomparable(&pair[1]));
            }
        }

        #[test]
        fn weight_is_multiplicative(a in prop::collection::vec(0u16..3, 0..6), b in prop::collection::vec(0u16..3, 0..6)) {
            let sys = gallery::mixed();
            let u = Word::from_letters(&sys, a.clone());
            let v = Word::from_letters(&sys, b.clone());
            let uv = u.concat(&sys, &b);
            prop_assert!((uv.weight() - u.weight() * v.weight()).abs() <= 1e-12 * uv.weight());
        }
    }
}
