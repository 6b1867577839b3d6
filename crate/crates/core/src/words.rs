//! Words over `{1, ..., d}` and the shuffle product.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{arg, Error, Result};

/// A word `i_1 ... i_k` with one-based letters. The empty word is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.contains(&0) {
            return arg("word letters are one-based");
        }
        Ok(Word(letters))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks every letter lies in `{1, ..., d}`.
    pub fn check_alphabet(&self, d: usize) -> Result<()> {
        match self.0.iter().find(|&&l| l as usize > d) {
            Some(l) => arg(format!("letter {l} outside alphabet of size {d}")),
            None => Ok(()),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word([self.0.as_slice(), other.0.as_slice()].concat())
    }

    /// Every word of length `k` over `{1..d}`, in dense-tensor order.
    pub fn all_of_length(d: usize, k: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|w| (1..=d as u8).map(move |l| {
                    let mut v = w.0.clone();
                    v.push(l);
                    Word(v)
                }))
                .collect();
        }
        out
    }

    /// Every word of length at most `n`, shortest first.
    pub fn all_up_to(d: usize, n: usize) -> Vec<Word> {
        (0..=n).flat_map(|k| Word::all_of_length(d, k)).collect()
    }
}

impl From<&[u8]> for Word {
    fn from(letters: &[u8]) -> Self {
        Word::new(letters.to_vec()).expect("one-based letters")
    }
}

impl<const N: usize> From<[u8; N]> for Word {
    fn from(letters: [u8; N]) -> Self {
        Word::from(&letters[..])
    }
}

// Shorter words first, then lexicographic.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Digit string; the empty word prints as `e`. Letters above 9 are
/// dot-separated.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        if self.0.iter().all(|&l| l < 10) {
            for l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
            f.write_str(&parts.join("."))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::empty());
        }
        let letters: Result<Vec<u8>> = if s.contains('.') {
            s.split('.')
                .map(|p| p.parse::<u8>().map_err(|e| Error::Parse(format!("bad letter {p:?}: {e}"))))
                .collect()
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad letter {c:?} in word {s:?}")))
                })
                .collect()
        };
        Word::new(letters?)
    }
}

/// A formal integer combination of words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShuffleExpansion {
    terms: BTreeMap<Word, i64>,
}

impl ShuffleExpansion {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(w: Word) -> Self {
        let mut e = Self::zero();
        e.add_term(w, 1);
        e
    }

    pub fn add_term(&mut self, w: Word, coeff: i64) {
        let c = self.terms.entry(w.clone()).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn coefficient(&self, w: &Word) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of all coefficients.
    pub fn mass(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn scaled(&self, factor: i64) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * factor);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-1))
    }

    /// Bilinear extension of the shuffle product.
    pub fn shuffle_with(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                for (w, c) in shuffle(u, v).terms() {
                    out.add_term(w.clone(), a * b * c);
                }
            }
        }
        out
    }

    /// Evaluates `sum_w c_w * f(w)`.
    pub fn evaluate(&self, mut f: impl FnMut(&Word) -> f64) -> f64 {
        self.terms().map(|(w, c)| c as f64 * f(w)).sum()
    }
}

/// The shuffle product `u ⧢ v`: every interleaving of the letters of `u` and
/// `v` that preserves their internal orders, counted with multiplicity.
pub fn shuffle(u: &Word, v: &Word) -> ShuffleExpansion {
    let mut out = ShuffleExpansion::zero();
    let mut buf = Vec::with_capacity(u.len() + v.len());
    interleave(u.letters(), v.letters(), &mut buf, &mut out);
    out
}

fn interleave(u: &[u8], v: &[u8], buf: &mut Vec<u8>, out: &mut ShuffleExpansion) {
    if u.is_empty() || v.is_empty() {
        let mut w = buf.clone();
        w.extend_from_slice(u);
        w.extend_from_slice(v);
        out.add_term(Word(w), 1);
        return;
    }
    buf.push(u[0]);
    interleave(&u[1..], v, buf, out);
    buf.pop();
    buf.push(v[0]);
    interleave(u, &v[1..], buf, out);
    buf.pop();
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn binomial(n: u64, k: u64) -> i64 {
        (1..=k).fold(1u64, |acc, i| acc * (n - k + i) / i) as i64
    }

    #[test]
    fn two_letters() {
        let s = shuffle(&Word::from([1]), &Word::from([2]));
        assert_eq!(s.len(), 2);
        assert_eq!(s.coefficient(&Word::from([1, 2])), 1);
        assert_eq!(s.coefficient(&Word::from([2, 1])), 1);
    }

    #[test]
    fn empty_word_is_unit() {
        let w = Word::from([2, 1, 1]);
        assert_eq!(shuffle(&Word::empty(), &w), ShuffleExpansion::word(w.clone()));
        assert_eq!(shuffle(&w, &Word::empty()), ShuffleExpansion::word(w));
    }

    #[test]
    fn repeated_letters_carry_multiplicity() {
        // 112 ⧢ 2 = 2·1122 + 1212 + 2112
        let s = shuffle(&Word::from([1, 1, 2]), &Word::from([2]));
        assert_eq!(s.coefficient(&Word::from([1, 1, 2, 2])), 2);
        assert_eq!(s.coefficient(&Word::from([1, 2, 1, 2])), 1);
        assert_eq!(s.coefficient(&Word::from([2, 1, 1, 2])), 1);
        assert_eq!(s.mass(), 4);
    }

    #[test]
    fn word_text_round_trip() {
        for w in Word::all_up_to(3, 3) {
            assert_eq!(w.to_string().parse::<Word>().unwrap(), w);
        }
        assert_eq!(Word::empty().to_string(), "e");
        assert!("1a".parse::<Word>().is_err());
        assert!("10".parse::<Word>().is_err());
    }

    #[test]
    fn ordering_is_length_first() {
        let words = Word::all_up_to(2, 2);
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert_eq!(words.len(), 7);
    }

    fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(1u8..=3, 0..=max_len).prop_map(Word)
    }

    proptest! {
        #[test]
        fn shuffle_mass_is_binomial(u in word_strategy(4), v in word_strategy(4)) {
            let s = shuffle(&u, &v);
            let n = (u.len() + v.len()) as u64;
            prop_assert_eq!(s.mass(), binomial(n, u.len() as u64));
        }

        #[test]
        fn shuffle_commutes(u in word_strategy(3), v in word_strategy(3)) {
            prop_assert_eq!(shuffle(&u, &v), shuffle(&v, &u));
        }

        #[test]
        fn shuffle_associates(u in word_strategy(2), v in word_strategy(2), w in word_strategy(2)) {
            let left = shuffle(&u, &v).shuffle_with(&ShuffleExpansion::word(w.clone()));
            let right = ShuffleExpansion::word(u).shuffle_with(&shuffle(&v, &w));
            prop_assert_eq!(left, right);
        }
    }
}
