//! Iterative (peeling) erasure decoding over a parity-check row set.
//!
//! A check row whose support meets the erased positions in exactly one place
//! determines that position. Decoding stalls precisely on a stopping set, so
//! the residual erased set is always one. Under `H*` the residual is the
//! largest stopping set inside the erasure pattern and does not depend on
//! the order in which rows are visited.

use rand::Rng;
use thiserror::Error;

use crate::agcode::{is_stopping_set_oracle, CodeMatrix};
use crate::ffield::FieldElement;
use crate::subsets::IndexSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("codeword length {got} does not match code length {expected}")]
    Length { expected: usize, got: usize },
    #[error("erased index outside 1..={0}")]
    ErasureRange(usize),
    #[error("word is not in the code (check row {0} fails)")]
    NotCodeword(usize),
    #[error("check row {row} disagrees with recovered values; input is not a codeword")]
    Inconsistent { row: usize },
}

#[derive(Debug, Clone)]
pub struct ErasureInstance {
    codeword: Vec<FieldElement>,
    erased: IndexSet,
}

impl ErasureInstance {
    /// `dual_generator` spans the dual code; `codeword` must be orthogonal to it.
    pub fn new(codeword: Vec<FieldElement>, erased: IndexSet, dual_generator: &CodeMatrix) -> Result<Self, DecodeError> {
        let n = dual_generator.n_cols();
        if codeword.len() != n {
            return Err(DecodeError::Length { expected: n, got: codeword.len() });
        }
        if erased.max_index().is_some_and(|i| i > n) {
            return Err(DecodeError::ErasureRange(n));
        }
        if let Some(r) = dual_generator.rows().iter().position(|row| !crate::agcode::dot(row, &codeword).is_zero()) {
            return Err(DecodeError::NotCodeword(r));
        }
        Ok(Self { codeword, erased })
    }

    /// Skips the membership check; used to feed deliberately corrupted words.
    pub fn unchecked(codeword: Vec<FieldElement>, erased: IndexSet) -> Self {
        Self { codeword, erased }
    }

    pub fn codeword(&self) -> &[FieldElement] {
        &self.codeword
    }

    pub fn erased(&self) -> IndexSet {
        self.erased
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeelOutcome {
    /// Known and recovered symbols; `None` on the residual positions.
    pub recovered: Vec<Option<FieldElement>>,
    pub residual: IndexSet,
    pub passes: usize,
}

impl PeelOutcome {
    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Peels until a full pass solves nothing or `max_passes` (default `n`) runs out.
pub fn peel<R: AsRef<[FieldElement]>>(
    rows: &[R],
    instance: &ErasureInstance,
    max_passes: Option<usize>,
) -> Result<PeelOutcome, DecodeError> {
    let n = instance.codeword.len();
    let mut erased = instance.erased;
    let mut known: Vec<Option<FieldElement>> = instance
        .codeword
        .iter()
        .enumerate()
        .map(|(i, v)| (!erased.contains(i + 1)).then(|| v.clone()))
        .collect();
    let max_passes = max_passes.unwrap_or(n).max(1);
    let mut passes = 0;
    while passes < max_passes {
        passes += 1;
        let mut progress = false;
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            let mut unknown = row.iter().enumerate().filter(|(i, h)| !h.is_zero() && erased.contains(i + 1));
            let first = unknown.next();
            if unknown.next().is_some() {
                continue;
            }
            let partial = row
                .iter()
                .zip(&known)
                .filter_map(|(h, x)| x.as_ref().map(|x| h * x))
                .fold(row[0].field().zero(), |acc, t| &acc + &t);
            match first {
                None if !partial.is_zero() => return Err(DecodeError::Inconsistent { row: r }),
                None => {}
                Some((j, h)) => {
                    let value = &(-&partial) * &h.inv().expect("support entry is nonzero");
                    known[j] = Some(value);
                    erased = erased.remove(j + 1);
                    progress = true;
                }
            }
        }
        if !progress || erased.is_empty() {
            break;
        }
    }
    Ok(PeelOutcome { recovered: known, residual: erased, passes })
}

/// The stall condition restated: no row meets the residual in one position.
pub fn residual_is_stopping<R: AsRef<[FieldElement]>>(rows: &[R], residual: IndexSet) -> bool {
    is_stopping_set_oracle(rows.iter().map(AsRef::as_ref), residual)
}

/// Uniform codeword from the span of `generator`.
pub fn random_codeword<G: Rng>(generator: &CodeMatrix, rng: &mut G) -> Vec<FieldElement> {
    let field = generator.field();
    let mut word = vec![field.zero(); generator.n_cols()];
    for row in generator.rows() {
        let c = field.from_index(rng.gen_range(0..field.order()));
        for (w, x) in word.iter_mut().zip(row) {
            *w = &*w + &(&c * x);
        }
    }
    word
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agcode::{generator_matrix, h_star, residue_generator, EllipticCodeSpec, DEFAULT_MAX_ROWS};
    use crate::curve::tests::{example_curve, example_points};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Fixture {
        rows: Vec<Vec<FieldElement>>,
        dual: CodeMatrix,
        residue: CodeMatrix,
    }

    fn fixture() -> Fixture {
        let c = example_curve();
        let pts = example_points(&c);
        let spec = EllipticCodeSpec::new(c, pts, 3).unwrap();
        let dual = generator_matrix(&spec);
        let rows = h_star(&dual, DEFAULT_MAX_ROWS).unwrap().collect();
        Fixture { rows, residue: residue_generator(&spec), dual }
    }

    fn decode(fx: &Fixture, word: &[FieldElement], erased: &[usize]) -> PeelOutcome {
        let inst = ErasureInstance::new(word.to_vec(), IndexSet::from_indices(erased.iter().copied()), &fx.dual).unwrap();
        peel(&fx.rows, &inst, None).unwrap()
    }

    #[test]
    fn examples() {
        let fx = fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let word = random_codeword(&fx.residue, &mut rng);

        let out = decode(&fx, &word, &[1, 2, 3]);
        assert!(out.is_complete());
        assert_eq!(out.recovered.iter().map(|v| v.clone().unwrap()).collect::<Vec<_>>(), word);

        assert_eq!(decode(&fx, &word, &[1, 2, 6]).residual, IndexSet::from_indices([1, 2, 6]));
        assert!(decode(&fx, &word, &[]).is_complete());

        let out = decode(&fx, &word, &[1, 2, 3, 7]);
        assert_eq!(out.residual, IndexSet::from_indices([1, 2, 3, 7]));
        assert!(residual_is_stopping(&fx.rows, out.residual));

        let out = decode(&fx, &word, &[2, 3, 4, 5]);
        assert_eq!(out.residual, IndexSet::from_indices([2, 3, 4]));
        assert_eq!(out.recovered[4].as_ref(), Some(&word[4]));
    }

    #[test]
    fn rejects_non_codewords() {
        let fx = fixture();
        let f = fx.dual.field().clone();
        let mut word = vec![f.zero(); 8];
        word[0] = f.one();
        assert!(matches!(
            ErasureInstance::new(word.clone(), IndexSet::EMPTY, &fx.dual),
            Err(DecodeError::NotCodeword(_))
        ));
        let inst = ErasureInstance::unchecked(word, IndexSet::from_indices([2]));
        assert!(matches!(peel(&fx.rows, &inst, None), Err(DecodeError::Inconsistent { .. })));
        assert!(matches!(
            ErasureInstance::new(vec![f.zero(); 8], IndexSet::from_indices([9]), &fx.dual),
            Err(DecodeError::ErasureRange(8))
        ));
    }

    #[test]
    fn residual_independent_of_row_order() {
        let fx = fixture();
        let zero = vec![fx.dual.field().zero(); 8];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for mask in 0..256u64 {
            let erased = IndexSet::from_mask(mask);
            let inst = ErasureInstance::new(zero.clone(), erased, &fx.dual).unwrap();
            let base = peel(&fx.rows, &inst, None).unwrap();
            assert!(residual_is_stopping(&fx.rows, base.residual));
            for _ in 0..3 {
                let mut rows = fx.rows.clone();
                rows.shuffle(&mut rng);
                assert_eq!(peel(&rows, &inst, None).unwrap().residual, base.residual);
            }
        }
    }
}
