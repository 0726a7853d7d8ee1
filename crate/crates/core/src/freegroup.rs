//! Words over signed generator alphabets.
//!
//! A free group `F_n` is represented by the alphabet `a_1, ..., a_n` together
//! with the formal inverses `A_1, ..., A_n`. Alphabets are plain ranks: a
//! letter only stores the (1-based) generator index and a sign.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while building or evaluating words.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letter {letter} is outside an alphabet of rank {rank}")]
    LetterOutOfRange { letter: Letter, rank: usize },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("homomorphism expects {expected} images, got {got}")]
    ImageCount { expected: usize, got: usize },
}

/// A signed generator: `a_k` or its inverse `A_k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    gen: u32,
    inverse: bool,
}

impl Letter {
    /// The generator `a_gen`. Panics on `gen == 0`.
    pub fn generator(gen: usize) -> Letter {
        assert!(gen >= 1, "generator indices start at 1");
        Letter { gen: gen as u32, inverse: false }
    }

    /// The inverse letter `A_gen`.
    pub fn inverse_of(gen: usize) -> Letter {
        Letter::generator(gen).inverse()
    }

    pub fn new(gen: usize, inverse: bool) -> Letter {
        let l = Letter::generator(gen);
        if inverse {
            l.inverse()
        } else {
            l
        }
    }

    #[inline]
    pub fn gen(self) -> usize {
        self.gen as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    /// Dense code in `0..2*rank`: `a_k -> 2(k-1)`, `A_k -> 2(k-1)+1`.
    #[inline]
    pub fn code(self) -> usize {
        2 * (self.gen as usize - 1) + self.inverse as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Letter {
        Letter { gen: (code / 2 + 1) as u32, inverse: code % 2 == 1 }
    }

    /// All `2 * rank` letters in code order.
    pub fn alphabet(rank: usize) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * rank).map(Letter::from_code)
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "A{}", self.gen)
        } else {
            write!(f, "a{}", self.gen)
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A finite sequence of letters, not necessarily reduced.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator index used, 0 for the empty word.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.gen()).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<(), WordError> {
        match self.0.iter().find(|l| l.gen() > rank) {
            Some(&letter) => Err(WordError::LetterOutOfRange { letter, rank }),
            None => Ok(()),
        }
    }

    /// The formal inverse: reversed, every letter inverted.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Plain concatenation, no cancellation.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Free reduction by a single stack scan.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// `reduce(self · other)`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.reduce().0;
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.first(), self.last()) {
                (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
                _ => true,
            }
    }

    /// Splits the reduced form as `conjugator · core · conjugator⁻¹` with a
    /// cyclically reduced core.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let r = self.reduce().0;
        let mut i = 0;
        let mut j = r.len();
        while j >= i + 2 && r[i] == r[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        (Word(r[..i].to_vec()), Word(r[i..j].to_vec()))
    }

    /// Number of letters of the cyclic reduction whose generator is one of
    /// `variables`.
    pub fn degree(&self, variables: &[usize]) -> usize {
        let (_, core) = self.cyclic_reduce();
        core.0.iter().filter(|l| variables.contains(&l.gen())).count()
    }

    /// Number of letters (not reduced) over the given generator.
    pub fn count_generator(&self, gen: usize) -> usize {
        self.0.iter().filter(|l| l.gen() == gen).count()
    }

    /// Parses a word over an ambient alphabet: `a`..`z` are `a_1`..`a_26`,
    /// uppercase is the inverse. For ranks above 26 the input is a
    /// whitespace separated list of `g<i>` / `G<i>` tokens.
    pub fn parse_ambient(input: &str, rank: usize) -> Result<Word, WordError> {
        let err = |reason: String| WordError::Parse { input: input.to_string(), reason };
        let mut letters = Vec::new();
        if rank > 26 {
            for tok in input.split_whitespace() {
                let (inv, rest) = match tok.as_bytes().first() {
                    Some(b'g') => (false, &tok[1..]),
                    Some(b'G') => (true, &tok[1..]),
                    _ => return Err(err(format!("bad token {tok:?}"))),
                };
                let gen: usize = rest.parse().map_err(|_| err(format!("bad token {tok:?}")))?;
                if gen == 0 || gen > rank {
                    return Err(err(format!("generator {gen} outside rank {rank}")));
                }
                letters.push(Letter::new(gen, inv));
            }
        } else {
            for c in input.chars() {
                if c.is_whitespace() || c == '1' && input.trim() == "1" {
                    continue;
                }
                if !c.is_ascii_alphabetic() {
                    return Err(err(format!("unexpected character {c:?}")));
                }
                let gen = (c.to_ascii_lowercase() as u8 - b'a') as usize + 1;
                if gen > rank {
                    return Err(err(format!("letter {c:?} outside rank {rank}")));
                }
                letters.push(Letter::new(gen, c.is_ascii_uppercase()));
            }
        }
        Ok(Word(letters))
    }

    /// Parses an equation word over `h_1..h_r, x`: tokens `h<i>`, `H<i>`,
    /// `x`, `X`. A bare `h` means `h1`. The variable is generator `r + 1`.
    pub fn parse_equation(input: &str, r: usize) -> Result<Word, WordError> {
        let err = |reason: String| WordError::Parse { input: input.to_string(), reason };
        if input.trim() == "1" {
            return Ok(Word::empty());
        }
        let bytes = input.as_bytes();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            i += 1;
            match c {
                b' ' | b'\t' | b'\n' | b',' => {}
                b'x' | b'X' => letters.push(Letter::new(r + 1, c == b'X')),
                b'h' | b'H' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let gen = if start == i {
                        1
                    } else {
                        input[start..i].parse::<usize>().map_err(|e| err(e.to_string()))?
                    };
                    if gen == 0 || gen > r {
                        return Err(err(format!("h{gen} outside basis of size {r}")));
                    }
                    letters.push(Letter::new(gen, c == b'H'));
                }
                _ => return Err(err(format!("unexpected character {:?}", c as char))),
            }
        }
        Ok(Word(letters))
    }

    /// Renders over an ambient alphabet, the inverse of [`Word::parse_ambient`].
    pub fn to_ambient_string(&self, rank: usize) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        if rank > 26 {
            let toks: Vec<String> = self
                .0
                .iter()
                .map(|l| format!("{}{}", if l.is_inverse() { 'G' } else { 'g' }, l.gen()))
                .collect();
            return toks.join(" ");
        }
        self.0
            .iter()
            .map(|l| {
                let c = (b'a' + (l.gen() - 1) as u8) as char;
                if l.is_inverse() {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }

    /// Renders over `h_1..h_r, x`.
    pub fn to_equation_string(&self, r: usize) -> String {
        if self.is_empty() {
            return "1".to_string();
        }
        let mut s = String::new();
        for l in &self.0 {
            if l.gen() == r + 1 {
                s.push(if l.is_inverse() { 'X' } else { 'x' });
            } else {
                s.push(if l.is_inverse() { 'H' } else { 'h' });
                s.push_str(&l.gen().to_string());
            }
        }
        s
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word(")?;
        for l in &self.0 {
            write!(f, "{l:?}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Word {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Word {
        Word(iter.into_iter().collect())
    }
}

#[inline]
pub(crate) fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inverse()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

/// A homomorphism `F_m -> F_n` given by the reduced images of `b_1..b_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    source_rank: usize,
    target_rank: usize,
    images: Vec<Word>,
}

impl Homomorphism {
    /// Images are reduced on construction.
    pub fn new(source_rank: usize, target_rank: usize, images: Vec<Word>) -> Result<Self, WordError> {
        if images.len() != source_rank {
            return Err(WordError::ImageCount { expected: source_rank, got: images.len() });
        }
        for w in &images {
            w.check_rank(target_rank)?;
        }
        let images = images.iter().map(Word::reduce).collect();
        Ok(Homomorphism { source_rank, target_rank, images })
    }

    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Reduced image of a single letter.
    pub fn image(&self, l: Letter) -> Word {
        let w = &self.images[l.gen() - 1];
        if l.is_inverse() {
            w.inverse()
        } else {
            w.clone()
        }
    }

    /// `‖φ‖`: the maximal image length.
    pub fn norm(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Reduced image of `w`.
    pub fn evaluate(&self, w: &Word) -> Result<Word, WordError> {
        w.check_rank(self.source_rank)?;
        Ok(self.evaluate_unchecked(w.letters()))
    }

    pub(crate) fn evaluate_unchecked(&self, letters: &[Letter]) -> Word {
        let mut out = Vec::new();
        for &l in letters {
            let img = &self.images[l.gen() - 1];
            if l.is_inverse() {
                for &c in img.letters().iter().rev() {
                    push_reduced(&mut out, c.inverse());
                }
            } else {
                for &c in img.letters() {
                    push_reduced(&mut out, c);
                }
            }
        }
        Word(out)
    }

    /// The unreduced concatenation `ψ(w)` of letter images.
    pub fn substitute(&self, w: &Word) -> Word {
        let mut out = Vec::new();
        for &l in w.letters() {
            out.extend(self.image(l).into_letters());
        }
        Word(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb(s: &str) -> Word {
        Word::parse_ambient(s, 26).unwrap()
    }

    fn eq2(s: &str) -> Word {
        Word::parse_equation(s, 2).unwrap()
    }

    fn phi72() -> Homomorphism {
        Homomorphism::new(3, 2, vec![amb("ba"), amb("abbA"), amb("a")]).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(amb("aA").reduce(), Word::empty());
        assert_eq!(amb("abBA").reduce(), Word::empty());
        assert_eq!(amb("baA").reduce(), amb("b"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        // a x̄ ā over a rank-24 alphabet where x is the 24th letter
        let (c, core) = amb("aXA").cyclic_reduce();
        assert_eq!(c, amb("a"));
        assert_eq!(core, amb("X"));

        let gen = eq2("Xh2xxH1xH1");
        let (c, core) = gen.cyclic_reduce();
        assert!(c.is_empty());
        assert_eq!(core, gen);

        let (c, core) = amb("aA").cyclic_reduce();
        assert!(c.is_empty() && core.is_empty());
    }

    #[test]
    fn evaluate_examples() {
        let phi = phi72();
        assert_eq!(phi.evaluate(&eq2("Xh2xxH1xH1")).unwrap(), Word::empty());
        assert_eq!(phi.evaluate(&eq2("h1")).unwrap(), amb("ba"));
        assert_eq!(phi.evaluate(&Word::empty()).unwrap(), Word::empty());
        assert!(phi.evaluate(&Word::new(vec![Letter::generator(4)])).is_err());
        assert_eq!(phi.norm(), 4);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(eq2("Xh2xxH1xH1").degree(&[3]), 4);
        assert_eq!(eq2("h1xH1").degree(&[3]), 1);
        assert_eq!(eq2("h1H1").degree(&[3]), 0);
    }

    #[test]
    fn text_round_trip() {
        let w = eq2("Xh2xxH1xH1");
        assert_eq!(w.to_equation_string(2), "Xh2xxH1xH1");
        assert_eq!(amb("abBA").to_ambient_string(2), "abBA");
        let big = Word::parse_ambient("g27 G3 g1", 30).unwrap();
        assert_eq!(big.to_ambient_string(30), "g27 G3 g1");
        assert!(Word::parse_ambient("c", 2).is_err());
        assert!(Word::parse_equation("h3", 2).is_err());
    }

    #[test]
    fn cyclically_reduced_flags() {
        assert!(amb("ab").is_cyclically_reduced());
        assert!(!amb("abA").is_cyclically_reduced());
        assert!(amb("a").is_cyclically_reduced());
        assert!(Word::empty().is_cyclically_reduced());
        assert!(!amb("aAb").is_reduced());
    }
}
