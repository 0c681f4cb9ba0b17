//! Freely reduced words over a finite generating alphabet.
//!
//! A letter is a nonzero `i32`: `+(id+1)` is generator `id`, `-(id+1)` its inverse.
//! Every `Word` is freely reduced by construction. Letters are ordered
//! `g0 < g0⁻¹ < g1 < g1⁻¹ < …`; canonical cyclic forms use that order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub type Letter = i32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("invalid letter {0}: zero or out of alphabet range")]
    InvalidLetter(Letter),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid generator name `{0}`")]
    InvalidGeneratorName(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("malformed word token `{0}`")]
    MalformedToken(String),
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("alphabet mismatch: letter {letter} outside rank {rank}")]
    AlphabetMismatch { letter: Letter, rank: usize },
}

/// Ordered generator names; the order fixes the letter order everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, WordError> {
        let mut index = BTreeMap::new();
        let mut owned = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref();
            if !valid_name(n) {
                return Err(WordError::InvalidGeneratorName(n.to_string()));
            }
            if index.insert(n.to_string(), i).is_some() {
                return Err(WordError::DuplicateGenerator(n.to_string()));
            }
            owned.push(n.to_string());
        }
        Ok(Alphabet { names: owned, index })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Positive letter for generator `id`.
    pub fn letter(&self, id: usize) -> Letter {
        debug_assert!(id < self.rank());
        (id as i32) + 1
    }
}

pub fn letter_gen(l: Letter) -> usize {
    debug_assert!(l != 0);
    (l.unsigned_abs() as usize) - 1
}

pub fn letter_is_positive(l: Letter) -> bool {
    l > 0
}

/// Order key: g0 < g0⁻¹ < g1 < g1⁻¹ < …
fn letter_key(l: Letter) -> u64 {
    (letter_gen(l) as u64) * 2 + if l < 0 { 1 } else { 0 }
}

/// A freely reduced word. `Word::default()` is the empty word.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// Free reduction of an arbitrary letter sequence (stack scan, O(n)).
    pub fn normalize(seq: &[Letter]) -> Result<Word, WordError> {
        let mut stack: Vec<Letter> = Vec::with_capacity(seq.len());
        for &l in seq {
            if l == 0 {
                return Err(WordError::InvalidLetter(l));
            }
            if let Some(&top) = stack.last() {
                if top == -l {
                    stack.pop();
                    continue;
                }
            }
            stack.push(l);
        }
        Ok(Word { letters: stack })
    }

    /// The caller guarantees `seq` is already freely reduced.
    pub fn from_reduced(seq: Vec<Letter>) -> Word {
        debug_assert!(seq.iter().all(|&l| l != 0));
        debug_assert!(seq.windows(2).all(|w| w[0] != -w[1]));
        Word { letters: seq }
    }

    pub fn empty() -> Word {
        Word::default()
    }

    pub fn single(l: Letter) -> Word {
        Word { letters: vec![l] }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Reduced concatenation.
    pub fn product(&self, other: &Word) -> Word {
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            if let Some(&top) = stack.last() {
                if top == -l {
                    stack.pop();
                    continue;
                }
            }
            stack.push(l);
        }
        Word { letters: stack }
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Word {
        let mut out = Word::empty();
        for _ in 0..e {
            out = out.product(self);
        }
        out
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => f != -l,
            _ => true,
        }
    }

    /// Decomposes `u = c·v·c⁻¹` with `v` cyclically reduced (shell only, no rotation).
    fn shell_decompose(&self) -> (Word, Word) {
        let mut lo = 0usize;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == -self.letters[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        (
            Word::from_reduced(self.letters[..lo].to_vec()),
            Word::from_reduced(self.letters[lo..hi].to_vec()),
        )
    }

    /// Canonical conjugacy form: `u = conjugator · core · conjugator⁻¹` exactly,
    /// where `core` is the lexicographically least rotation of the cyclic
    /// reduction of `u`. Rotating to the canonical core is itself a conjugation,
    /// so the rotation prefix is absorbed into the conjugator.
    pub fn cyclic_normalize(&self) -> (Word, Word) {
        let (shell, v) = self.shell_decompose();
        if v.is_empty() {
            return (shell, v);
        }
        let k = least_rotation(&v.letters);
        let mut core = v.letters[k..].to_vec();
        core.extend_from_slice(&v.letters[..k]);
        let conj = shell.product(&Word::from_reduced(v.letters[..k].to_vec()));
        (conj, Word::from_reduced(core))
    }

    /// The canonical core alone (least rotation of the cyclic reduction).
    pub fn cyclic_core(&self) -> Word {
        self.cyclic_normalize().1
    }

    /// All distinct rotations, starting from this word's own rotation.
    /// Errors unless the word is cyclically reduced.
    pub fn cyclic_shifts(&self) -> Result<Vec<Word>, WordError> {
        if !self.is_cyclically_reduced() {
            return Err(WordError::NotCyclicallyReduced);
        }
        let n = self.letters.len();
        if n == 0 {
            return Ok(vec![Word::empty()]);
        }
        let d = cyclic_period(&self.letters);
        let mut out = Vec::with_capacity(d);
        for k in 0..d {
            let mut rot = self.letters[k..].to_vec();
            rot.extend_from_slice(&self.letters[..k]);
            out.push(Word::from_reduced(rot));
        }
        Ok(out)
    }

    /// Maximal root decomposition `u = root^e` with `e ≥ 2` (literal
    /// concatenation, smallest root), or `None` if `u` is not a proper power.
    pub fn is_proper_power(&self) -> Option<(Word, u32)> {
        let n = self.letters.len();
        if n == 0 {
            return None;
        }
        for d in 1..=n / 2 {
            if n % d != 0 {
                continue;
            }
            if (d..n).all(|i| self.letters[i] == self.letters[i - d]) {
                return Some((
                    Word::from_reduced(self.letters[..d].to_vec()),
                    (n / d) as u32,
                ));
            }
        }
        None
    }

    /// Exponent sum per generator, in alphabet order.
    pub fn exponent_sums(&self, alphabet: &Alphabet) -> Result<Vec<i64>, WordError> {
        let mut sums = vec![0i64; alphabet.rank()];
        for &l in &self.letters {
            let g = letter_gen(l);
            if g >= alphabet.rank() {
                return Err(WordError::AlphabetMismatch {
                    letter: l,
                    rank: alphabet.rank(),
                });
            }
            sums[g] += if l > 0 { 1 } else { -1 };
        }
        Ok(sums)
    }

    /// Parses the word text syntax: whitespace-separated `ident` or `ident^k`
    /// terms (`k` a nonzero signed integer), or the single token `eps`.
    pub fn parse(alphabet: &Alphabet, text: &str) -> Result<Word, WordError> {
        Word::normalize(&Word::parse_raw(alphabet, text)?)
    }

    /// Token expansion without free reduction, for callers that must detect
    /// whether the written form was already reduced.
    pub fn parse_raw(alphabet: &Alphabet, text: &str) -> Result<Vec<Letter>, WordError> {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() == 1 && tokens[0] == "eps" {
            return Ok(Vec::new());
        }
        let mut seq: Vec<Letter> = Vec::new();
        for tok in tokens {
            let (name, exp) = match tok.split_once('^') {
                None => (tok, 1i64),
                Some((name, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| WordError::MalformedToken(tok.to_string()))?;
                    if e == 0 {
                        return Err(WordError::MalformedToken(tok.to_string()));
                    }
                    (name, e)
                }
            };
            let id = alphabet
                .id_of(name)
                .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
            let l = alphabet.letter(id);
            let (letter, count) = if exp > 0 { (l, exp) } else { (-l, -exp) };
            for _ in 0..count {
                seq.push(letter);
            }
        }
        Ok(seq)
    }

    /// Renders in the word text syntax (run-length exponents; `eps` if empty).
    pub fn display(&self, alphabet: &Alphabet) -> Result<String, WordError> {
        if self.letters.is_empty() {
            return Ok("eps".to_string());
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let g = letter_gen(l);
            if g >= alphabet.rank() {
                return Err(WordError::AlphabetMismatch {
                    letter: l,
                    rank: alphabet.rank(),
                });
            }
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64;
            let exp = if l > 0 { run } else { -run };
            if exp == 1 {
                parts.push(alphabet.name(g).to_string());
            } else {
                parts.push(format!("{}^{}", alphabet.name(g), exp));
            }
            i = j;
        }
        Ok(parts.join(" "))
    }
}

impl fmt::Display for Word {
    /// Alphabet-free debug rendering: `+1 -2 …`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "eps");
        }
        let parts: Vec<String> = self.letters.iter().map(|l| format!("{l:+}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Booth's algorithm: index of the lexicographically least rotation.
pub fn least_rotation(seq: &[Letter]) -> usize {
    let n = seq.len();
    if n <= 1 {
        return 0;
    }
    let key = |i: usize| letter_key(seq[i % n]);
    let mut f: Vec<isize> = vec![-1; 2 * n];
    let mut k: usize = 0;
    for j in 1..2 * n {
        let sj = key(j);
        let mut i = f[j - k - 1];
        while i != -1 && sj != key(k + i as usize + 1) {
            if sj < key(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if sj != key(k + (i + 1) as usize) {
            if sj < key(k) {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k % n
}

/// Smallest cyclic period of `seq`: least d ≥ 1 with seq[i] = seq[(i+d) mod n].
/// Always divides the length.
pub fn cyclic_period(seq: &[Letter]) -> usize {
    let n = seq.len();
    if n == 0 {
        return 0;
    }
    'outer: for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        for i in 0..n {
            if seq[i] != seq[(i + d) % n] {
                continue 'outer;
            }
        }
        return d;
    }
    n
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_seq() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(prop_oneof![1..=3i32, (-3..=-1i32)], 0..60)
    }

    proptest! {
        #[test]
        fn normalize_idempotent(seq in arb_seq()) {
            let w1 = Word::normalize(&seq).unwrap();
            let w2 = Word::normalize(w1.letters()).unwrap();
            prop_assert_eq!(w1, w2);
        }

        #[test]
        fn product_associative(a in arb_seq(), b in arb_seq(), c in arb_seq()) {
            let (a, b, c) = (
                Word::normalize(&a).unwrap(),
                Word::normalize(&b).unwrap(),
                Word::normalize(&c).unwrap(),
            );
            prop_assert_eq!(a.product(&b).product(&c), a.product(&b.product(&c)));
        }

        #[test]
        fn inverse_is_involution_and_kills(a in arb_seq()) {
            let a = Word::normalize(&a).unwrap();
            prop_assert_eq!(a.inverse().inverse(), a.clone());
            prop_assert_eq!(a.product(&a.inverse()), Word::empty());
        }

        #[test]
        fn conjugates_share_core(a in arb_seq(), c in arb_seq()) {
            let a = Word::normalize(&a).unwrap();
            let c = Word::normalize(&c).unwrap();
            let conj = c.product(&a).product(&c.inverse());
            prop_assert_eq!(conj.cyclic_core(), a.cyclic_core());
        }

        #[test]
        fn exponent_sums_additive(a in arb_seq(), b in arb_seq()) {
            let alpha = Alphabet::new(&["a", "b", "c"]).unwrap();
            let a = Word::normalize(&a).unwrap();
            let b = Word::normalize(&b).unwrap();
            let sums: Vec<i64> = a
                .exponent_sums(&alpha).unwrap()
                .iter()
                .zip(b.exponent_sums(&alpha).unwrap())
                .map(|(x, y)| x + y)
                .collect();
            prop_assert_eq!(a.product(&b).exponent_sums(&alpha).unwrap(), sums);
        }

        #[test]
        fn booth_matches_naive_least_rotation(a in arb_seq()) {
            let a = Word::normalize(&a).unwrap();
            let (_, core) = a.cyclic_normalize();
            let n = core.len();
            if n > 0 {
                // naive oracle: smallest rotation by direct comparison
                let rots: Vec<Vec<u64>> = (0..n)
                    .map(|k| (0..n).map(|i| letter_key(core.letters()[(k + i) % n])).collect())
                    .collect();
                let min = rots.iter().min().unwrap();
                let got: Vec<u64> = core.letters().iter().map(|&l| letter_key(l)).collect();
                prop_assert_eq!(&got, min);
            }
        }

        #[test]
        fn proper_power_consistency(a in arb_seq()) {
            let a = Word::normalize(&a).unwrap();
            if let Some((root, e)) = a.is_proper_power() {
                prop_assert!(e >= 2);
                prop_assert_eq!(root.len() * e as usize, a.len());
                let mut rebuilt = Vec::new();
                for _ in 0..e {
                    rebuilt.extend_from_slice(root.letters());
                }
                prop_assert_eq!(rebuilt, a.letters().to_vec());
                prop_assert!(root.is_proper_power().is_none());
            }
        }
    }
}
