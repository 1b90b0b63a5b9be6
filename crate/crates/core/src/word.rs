//! Freely reduced words in a free group of fixed rank, and endomorphisms
//! given by their values on the basis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A freely reduced word in the free group of rank `rank`.
///
/// Letters are nonzero signed indices: `+i` is the `i`-th generator,
/// `-i` its inverse, `1 <= i <= rank`. The letter vector never contains
/// an adjacent cancelling pair.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    rank: usize,
    letters: Vec<i32>,
}

impl Word {
    /// The empty word.
    pub fn identity(rank: usize) -> Self {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    /// The generator `x_index`, `1 <= index <= rank`.
    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        Word::reduce(rank, &[index as i32])
    }

    /// Free reduction of a raw letter sequence. Idempotent.
    pub fn reduce(rank: usize, raw: &[i32]) -> Result<Self> {
        let mut letters: Vec<i32> = Vec::with_capacity(raw.len());
        for &l in raw {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(Error::IndexOutOfRange {
                    index: l as i64,
                    rank,
                });
            }
            if letters.last() == Some(&-l) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Ok(Word { rank, letters })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &Word) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    /// Reduced concatenation `self * other`.
    pub fn multiply(&self, other: &Word) -> Result<Word> {
        self.check_rank(other)?;
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last() == Some(&-l) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        Ok(Word {
            rank: self.rank,
            letters,
        })
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    /// `self^k`, with negative exponents via the inverse.
    pub fn power(&self, k: i64) -> Word {
        if k < 0 {
            return self.invert().power(-k);
        }
        let mut out = Word::identity(self.rank);
        for _ in 0..k {
            out = out.multiply(self).expect("equal ranks");
        }
        out
    }

    /// Commutator `[a, b] = a^-1 b^-1 a b`.
    pub fn commutator(a: &Word, b: &Word) -> Result<Word> {
        a.check_rank(b)?;
        let mut w = a.invert();
        w = w.multiply(&b.invert())?;
        w = w.multiply(a)?;
        w.multiply(b)
    }

    /// Splits off the maximal conjugating part: returns `(core, conjugator)`
    /// with `self = conjugator^-1 * core * conjugator` and `core` cyclically
    /// reduced (its first letter is not the inverse of its last).
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut lo = 0usize;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == -self.letters[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        let core = Word {
            rank: self.rank,
            letters: self.letters[lo..hi].to_vec(),
        };
        let conjugator = Word {
            rank: self.rank,
            letters: self.letters[..lo].iter().rev().map(|&l| -l).collect(),
        };
        (core, conjugator)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => f != -l,
            _ => true,
        }
    }

    /// Exponent sum of each generator (image in H_1 of the rose).
    pub fn abelianization(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            v[i] += l.signum() as i64;
        }
        v
    }

    /// Parses the word grammar: `"1"` for the empty word, or a sequence of
    /// letters `a`-`z` (generators 1..26), `A`-`Z` (their inverses), and
    /// `x<digits>` with an optional `^-1`.
    pub fn parse(input: &str, rank: usize) -> Result<Self> {
        let s = input.trim();
        if s == "1" {
            return Ok(Word::identity(rank));
        }
        if s.is_empty() {
            return Err(Error::Parse("empty word text (use \"1\")".into()));
        }
        let mut raw: Vec<i32> = Vec::new();
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        while pos < bytes.len() {
            let c = bytes[pos] as char;
            if c.is_ascii_lowercase() && c != 'x' {
                raw.push((c as u8 - b'a') as i32 + 1);
                pos += 1;
            } else if c.is_ascii_uppercase() {
                raw.push(-((c as u8 - b'A') as i32 + 1));
                pos += 1;
            } else if c == 'x' {
                pos += 1;
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if pos == start {
                    // a bare 'x' is generator 24
                    raw.push(24);
                    continue;
                }
                let idx: i64 = s[start..pos]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad index in {input:?}")))?;
                let mut sign = 1i64;
                if bytes[pos..].starts_with(b"^-1") {
                    sign = -1;
                    pos += 3;
                }
                if idx == 0 || idx > i32::MAX as i64 {
                    return Err(Error::IndexOutOfRange { index: idx, rank });
                }
                raw.push((sign * idx) as i32);
            } else {
                return Err(Error::Parse(format!(
                    "unexpected character {c:?} in {input:?}"
                )));
            }
        }
        Word::reduce(rank, &raw)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize;
            if self.rank <= 26 {
                let c = (b'a' + (i - 1) as u8) as char;
                if l > 0 {
                    write!(f, "{c}")?;
                } else {
                    write!(f, "{}", c.to_ascii_uppercase())?;
                }
            } else if l > 0 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^-1")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// An endomorphism of the free group of rank `rank`, stored as the images
/// of the basis generators.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Endomorphism {
    rank: usize,
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let rank = images.len();
        for img in &images {
            if img.rank() != rank {
                return Err(Error::RankMismatch {
                    left: rank,
                    right: img.rank(),
                });
            }
        }
        Ok(Endomorphism { rank, images })
    }

    pub fn identity(rank: usize) -> Self {
        let images = (1..=rank)
            .map(|i| Word::generator(rank, i).expect("index in range"))
            .collect();
        Endomorphism { rank, images }
    }

    /// Conjugation by `w`: every generator maps to `w^-1 x_i w`.
    pub fn conjugation(w: &Word) -> Self {
        let rank = w.rank();
        let winv = w.invert();
        let images = (1..=rank)
            .map(|i| {
                let x = Word::generator(rank, i).expect("index in range");
                winv.multiply(&x)
                    .and_then(|u| u.multiply(w))
                    .expect("equal ranks")
            })
            .collect();
        Endomorphism { rank, images }
    }

    /// The endomorphism fixing every generator except `index`, which is
    /// conjugated by `alpha`.
    pub fn conjugate_one(index: usize, alpha: &Word) -> Result<Self> {
        let rank = alpha.rank();
        if index == 0 || index > rank {
            return Err(Error::IndexOutOfRange {
                index: index as i64,
                rank,
            });
        }
        let mut images = Vec::with_capacity(rank);
        for i in 1..=rank {
            let x = Word::generator(rank, i)?;
            if i == index {
                images.push(alpha.invert().multiply(&x)?.multiply(alpha)?);
            } else {
                images.push(x);
            }
        }
        Ok(Endomorphism { rank, images })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, index: usize) -> &Word {
        &self.images[index - 1]
    }

    /// Applies the substitution homomorphism to `w`.
    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: w.rank(),
            });
        }
        let mut raw: Vec<i32> = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                raw.extend_from_slice(img.letters());
            } else {
                raw.extend(img.letters().iter().rev().map(|&m| -m));
            }
        }
        Word::reduce(self.rank, &raw)
    }

    /// Composition `self . other`: first `other`, then `self`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let images = other
            .images
            .iter()
            .map(|w| self.apply(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Endomorphism {
            rank: self.rank,
            images,
        })
    }

    /// Column `i` is the exponent vector of the image of `x_i`.
    pub fn abelianization_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut m = vec![vec![0i64; n]; n];
        for (j, img) in self.images.iter().enumerate() {
            for (i, &e) in img.abelianization().iter().enumerate() {
                m[i][j] = e;
            }
        }
        m
    }

    /// Parses comma-separated image words, e.g. `"ab,b"` for
    /// `x1 -> x1x2, x2 -> x2`. The rank is the number of images.
    pub fn parse(input: &str) -> Result<Self> {
        let parts: Vec<&str> = input.split(',').map(str::trim).collect();
        let rank = parts.len();
        if rank < 1 {
            return Err(Error::Parse("no image words".into()));
        }
        let images = parts
            .iter()
            .map(|p| Word::parse(p, rank))
            .collect::<Result<Vec<_>>>()?;
        Endomorphism::new(images)
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self.images.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", text.join(","))
    }
}
