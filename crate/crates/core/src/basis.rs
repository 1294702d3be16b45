//! Monomial bases of graded slices.
//!
//! A slice is fixed by a conformal weight and a charge. Its basis consists of
//! every canonical word over an alphabet of generators whose letters add up
//! to that weight and charge. Words are listed in basis order, the order of
//! [`Word`]: words led by later generators come first.

use std::collections::HashMap;

use crate::coeff::{Coeff, Symbolic, Unknown};
use crate::error::VopaError;
use crate::expr::{Expression, Generators, HalfInt, Letter, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightBasis {
    pub weight: HalfInt,
    pub charge: i64,
    /// Generator indices the words are built from.
    pub alphabet: Vec<usize>,
    pub words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl WeightBasis {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Coordinates of a canonical expression supported on the basis.
    pub fn coordinates<C: Coeff>(&self, e: &Expression<C>, gens: &Generators) -> Result<Vec<C>, VopaError> {
        let mut out = vec![C::zero(); self.words.len()];
        for (w, c) in e.iter() {
            let i = self.position(w).ok_or_else(|| VopaError::UnsupportedWord(gens.fmt_word(w)))?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    /// The expression with the given coordinates.
    pub fn reconstruct<C: Coeff>(&self, coords: &[C]) -> Expression<C> {
        let mut out = Expression::zero();
        for (w, c) in self.words.iter().zip(coords) {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    /// `sum_i ?{prefix}_{i} * word_i` with fresh unknowns, numbered from 1 in
    /// basis order.
    pub fn ansatz(&self, prefix: &str) -> (Expression<Symbolic>, Vec<Unknown>) {
        let mut e = Expression::zero();
        let mut names = Vec::new();
        for (i, w) in self.words.iter().enumerate() {
            let u = Unknown::new(&format!("{prefix}_{}", i + 1));
            e.add_term(w.clone(), Symbolic::unknown(u.clone()));
            names.push(u);
        }
        (e, names)
    }
}

/// All canonical words of the given weight and charge over `alphabet`, with
/// at most `max_der` derivatives on any letter.
pub fn enumerate_basis(
    gens: &Generators,
    weight: HalfInt,
    charge: i64,
    alphabet: &[usize],
    max_der: Option<u32>,
) -> Result<WeightBasis, VopaError> {
    if weight < HalfInt::ZERO {
        return Err(VopaError::Presentation(format!("negative weight {weight}")));
    }
    let mut letters: Vec<Letter> = Vec::new();
    for &g in alphabet {
        let gw = gens.get(g).weight;
        if gw <= HalfInt::ZERO {
            return Err(VopaError::Presentation(format!(
                "generator {} has nonpositive weight; slices would be infinite",
                gens.get(g).name
            )));
        }
        let mut d = 0u32;
        while gw + HalfInt::from_int(d as i64) <= weight && max_der.is_none_or(|m| d <= m) {
            letters.push(Letter::new(g, d));
            d += 1;
        }
    }
    letters.sort();
    letters.dedup();
    let mut words = Vec::new();
    let mut current = Vec::new();
    collect(gens, &letters, 0, weight, charge, &mut current, &mut words);
    words.sort();
    let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(WeightBasis { weight, charge, alphabet: alphabet.to_vec(), words, index })
}

fn collect(
    gens: &Generators,
    letters: &[Letter],
    from: usize,
    weight: HalfInt,
    charge: i64,
    current: &mut Vec<Letter>,
    out: &mut Vec<Word>,
) {
    if weight == HalfInt::ZERO {
        if charge == 0 {
            out.push(Word::from_letters(current));
        }
        return;
    }
    for i in from..letters.len() {
        let l = letters[i];
        let lw = gens.letter_weight(l);
        if lw > weight {
            continue;
        }
        current.push(l);
        collect(gens, letters, i, weight - lw, charge - gens.get(l.gen as usize).charge, current, out);
        current.pop();
    }
}

/// Every generator index of `gens`.
pub fn full_alphabet(gens: &Generators) -> Vec<usize> {
    (0..gens.len()).collect()
}
