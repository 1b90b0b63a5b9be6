//! Lower-central-series arithmetic through the truncated Magnus expansion:
//! congruences between words modulo LCS terms, surjectivity on nilpotent
//! quotients, and the bundled witness that nilpotent-quotient surjectivity
//! does not imply surjectivity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{find_nonsurjectivity_certificate, Certificate, SearchConfig};
use crate::matrix::IntMatrix;
use crate::stallings::is_surjective;
use crate::whitehead::{connectivity_report, whitehead_graph, whitehead_reduce};
use crate::word::{Endomorphism, Word};

/// Hard cap on the truncation degree; the monomial count grows as `n^k`.
pub const MAX_SERIES_CAP: usize = 8;

/// An element of the non-commuting power series ring truncated at a fixed
/// degree. Monomials are index sequences over `1..=rank`; zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    rank: usize,
    cap: usize,
    coefficients: BTreeMap<Vec<u16>, BigInt>,
}

impl TruncatedSeries {
    pub fn one(rank: usize, cap: usize) -> Self {
        let mut coefficients = BTreeMap::new();
        coefficients.insert(Vec::new(), BigInt::one());
        TruncatedSeries {
            rank,
            cap,
            coefficients,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coefficient(&self, monomial: &[u16]) -> BigInt {
        self.coefficients.get(monomial).cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficient(&[]).is_one()
    }

    /// Lowest degree of a non-constant term, if any.
    pub fn min_nonconstant_degree(&self) -> Option<usize> {
        self.coefficients
            .keys()
            .filter(|m| !m.is_empty())
            .map(Vec::len)
            .min()
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.rank, other.rank);
        assert_eq!(self.cap, other.cap);
        let mut coefficients: BTreeMap<Vec<u16>, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.coefficients {
            for (m2, c2) in &other.coefficients {
                if m1.len() + m2.len() > self.cap {
                    continue;
                }
                let mut key = m1.clone();
                key.extend_from_slice(m2);
                let entry = coefficients.entry(key).or_default();
                *entry += c1 * c2;
            }
        }
        coefficients.retain(|_, c| !c.is_zero());
        TruncatedSeries {
            rank: self.rank,
            cap: self.cap,
            coefficients,
        }
    }

    /// The image of a single letter: `1 + X_i` for a generator, its
    /// truncated geometric inverse `1 - X_i + X_i^2 - ...` for an inverse.
    fn letter(rank: usize, cap: usize, l: i32) -> TruncatedSeries {
        let i = l.unsigned_abs() as u16;
        let mut coefficients = BTreeMap::new();
        coefficients.insert(Vec::new(), BigInt::one());
        if l > 0 {
            coefficients.insert(vec![i], BigInt::one());
        } else {
            let mut sign = BigInt::from(-1);
            for d in 1..=cap {
                coefficients.insert(vec![i; d], sign.clone());
                sign = -sign;
            }
        }
        TruncatedSeries {
            rank,
            cap,
            coefficients,
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(&Vec<u16>, &BigInt)> = self.coefficients.iter().collect();
        terms.sort_by_key(|(m, _)| (m.len(), (*m).clone()));
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (pos, (monomial, coefficient)) in terms.iter().enumerate() {
            let magnitude = coefficient.abs();
            if pos == 0 {
                if coefficient.is_negative() {
                    write!(f, "-")?;
                }
            } else if coefficient.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let body: String = monomial.iter().map(|i| format!("X{i}")).collect();
            if monomial.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{magnitude}{body}")?;
            }
        }
        Ok(())
    }
}

/// The truncated Magnus expansion of a word: the homomorphic image under
/// `x_i -> 1 + X_i`, all products cut at the given degree.
pub fn magnus(w: &Word, cap: usize) -> Result<TruncatedSeries> {
    if cap < 1 || cap > MAX_SERIES_CAP {
        return Err(Error::CostGuard(format!(
            "series cap must be in 1..={MAX_SERIES_CAP}, got {cap}"
        )));
    }
    if w.rank() > u16::MAX as usize {
        return Err(Error::CostGuard(format!(
            "series monomials index at most {} generators, got rank {}",
            u16::MAX,
            w.rank()
        )));
    }
    let mut acc = TruncatedSeries::one(w.rank(), cap);
    for &l in w.letters() {
        acc = acc.mul(&TruncatedSeries::letter(w.rank(), cap, l));
    }
    Ok(acc)
}

/// Whether `u` and `v` agree modulo the (k+1)-st lower central term: the
/// Magnus expansion of `u v^-1` carries no non-constant term of degree
/// at most `k`.
pub fn congruent_mod_lcs(u: &Word, v: &Word, k: usize) -> Result<bool> {
    let diff = u.multiply(&v.invert())?;
    Ok(magnus(&diff, k)?.is_one())
}

/// Left-normed commutators `[x_{i_1}, x_{i_2}, ..., x_{i_k}]` over all
/// index tuples in ascending lexicographic order, skipping tuples whose
/// leading pair is degenerate. They span the weight-k layer.
pub fn basic_commutators(rank: usize, weight: usize) -> Vec<Word> {
    assert!(weight >= 1);
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..weight {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (1..=rank).map(move |i| {
                    let mut next = t.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for tuple in tuples {
        if weight >= 2 && tuple[0] == tuple[1] {
            continue;
        }
        let mut acc = Word::generator(rank, tuple[0]).unwrap();
        for &i in &tuple[1..] {
            acc = Word::commutator(&acc, &Word::generator(rank, i).unwrap()).unwrap();
        }
        if !acc.is_empty() {
            out.push(acc);
        }
    }
    out
}

/// Whether the endomorphism fixes every sample element of the weight-k
/// layer modulo the (k+1)-st term. Errors if a sample is not in the
/// weight-k term.
pub fn acts_trivially_on_lcs_quotient(
    phi: &Endomorphism,
    k: usize,
    sample: &[Word],
) -> Result<bool> {
    for w in sample {
        if k >= 2 {
            let series = magnus(w, k - 1)?;
            if let Some(degree) = series.min_nonconstant_degree() {
                return Err(Error::NotInLcsTerm { degree });
            }
        }
        if !congruent_mod_lcs(&phi.apply(w)?, w, k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the induced endomorphism of the free nilpotent quotient of
/// class `k-1` is surjective. A nilpotent group is generated by any set
/// that generates its abelianization, so this reduces to the
/// abelianization matrix being invertible over the integers.
pub fn is_epi_on_nilpotent_quotient(phi: &Endomorphism, k: usize) -> Result<bool> {
    if k < 2 {
        return Err(Error::Parse(format!("nilpotent level must be >= 2, got {k}")));
    }
    let m = IntMatrix::from_rows(&phi.abelianization_matrix());
    Ok(m.determinant()?.abs() == BigInt::one())
}

/// The conjugator of Figure 2: descending generators followed by all of
/// their inverse squares, `x_n ... x_1 x_n^-2 ... x_1^-2`.
pub fn counterexample_alpha(rank: usize) -> Result<Word> {
    if rank < 2 {
        return Err(Error::Parse(format!("rank must be >= 2, got {rank}")));
    }
    let mut raw: Vec<i32> = Vec::new();
    for i in (1..=rank as i32).rev() {
        raw.push(i);
    }
    for i in (1..=rank as i32).rev() {
        raw.push(-i);
        raw.push(-i);
    }
    Word::reduce(rank, &raw)
}

/// One literal reading of the in-text variant of the conjugator, recorded
/// alongside the figure pattern: descending generators, then alternating
/// squares `x_n^-2 x_{n-1}^2 ...` down to `x_2`, then `x_1^-1`. The two
/// patterns disagree; only the figure pattern is used in certificates.
pub fn counterexample_alpha_text_variant(rank: usize) -> Result<Word> {
    if rank < 2 {
        return Err(Error::Parse(format!("rank must be >= 2, got {rank}")));
    }
    let mut raw: Vec<i32> = Vec::new();
    for i in (1..=rank as i32).rev() {
        raw.push(i);
    }
    let mut sign = -1i32;
    for i in (2..=rank as i32).rev() {
        raw.push(sign * i);
        raw.push(sign * i);
        sign = -sign;
    }
    raw.push(-1);
    Word::reduce(rank, &raw)
}

/// The endomorphism conjugating `x_1` by the Figure 2 word and fixing the
/// other generators.
pub fn counterexample_endomorphism(rank: usize) -> Result<Endomorphism> {
    Endomorphism::conjugate_one(1, &counterexample_alpha(rank)?)
}

/// Whitehead-side evidence for the witness report.
#[derive(Clone, Debug, Serialize)]
pub struct WhiteheadEvidence {
    pub word: String,
    pub connected: bool,
    pub cut_vertices: Vec<String>,
    pub certified_not_separable: bool,
    /// Result of Whitehead reduction; absent when the cost guard applies.
    pub reduced_length: Option<usize>,
}

/// The bundled evidence that the conjugating endomorphism is surjective on
/// every nilpotent quotient yet not surjective.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub rank: usize,
    pub alpha: String,
    pub endomorphism: String,
    pub fold_oracle_surjective: bool,
    /// Per-level verdicts of the nilpotent-quotient surjectivity check.
    pub nilpotent_epi_levels: Vec<NilpotentVerdict>,
    pub whitehead: WhiteheadEvidence,
    pub homology_certificate: Option<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NilpotentVerdict {
    pub k: usize,
    pub surjective: bool,
}

/// Builds the conjugating endomorphism for the given rank and gathers the
/// four pieces of evidence that it is surjective on nilpotent quotients
/// yet not surjective.
pub fn question_witness(
    rank: usize,
    nilpotent_bound: usize,
    search: &SearchConfig,
) -> Result<WitnessReport> {
    let alpha = counterexample_alpha(rank)?;
    let phi = counterexample_endomorphism(rank)?;
    let fold_oracle_surjective = is_surjective(&phi);

    let mut nilpotent_epi_levels = Vec::new();
    for k in 2..=nilpotent_bound.max(2) {
        nilpotent_epi_levels.push(NilpotentVerdict {
            k,
            surjective: is_epi_on_nilpotent_quotient(&phi, k)?,
        });
    }

    let x1x2 = Word::generator(rank, 1)?.multiply(&Word::generator(rank, 2)?)?;
    let image = phi.apply(&x1x2)?;
    let graph = whitehead_graph(&image)?;
    let report = connectivity_report(&graph);
    let reduced_length = match whitehead_reduce(&image) {
        Ok(r) => Some(r.minimal_length),
        Err(Error::CostGuard(_)) => None,
        Err(e) => return Err(e),
    };
    let whitehead = WhiteheadEvidence {
        word: image.to_string(),
        connected: report.connected_full,
        cut_vertices: report.cut_vertices.clone(),
        certified_not_separable: report.connected_full && report.cut_vertices.is_empty(),
        reduced_length,
    };

    let homology_certificate = find_nonsurjectivity_certificate(&phi, search)?;

    Ok(WitnessReport {
        rank,
        alpha: alpha.to_string(),
        endomorphism: phi.to_string(),
        fold_oracle_surjective,
        nilpotent_epi_levels,
        whitehead,
        homology_certificate,
    })
}
