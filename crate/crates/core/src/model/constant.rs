//! Degenerate predictor that always expects one fixed symbol.
//!
//! Useful as a null model: it never learns, so compression progress against
//! it is identically zero, and its code length on any stream is a fixed
//! per-symbol cost. The point mass is floored at [`SMOOTHING_FLOOR`] so that
//! off-symbol observations stay encodable (finite code length).

use serde::{Deserialize, Serialize};

use crate::Symbol;

use super::{ModelError, SequenceModel};

/// Probability assigned to each symbol other than the fixed one: 2^-16.
pub const SMOOTHING_FLOOR: f64 = 1.0 / 65536.0;

/// Flat storage cost: the model is one symbol, charged as one byte.
const CONSTANT_MODEL_BITS: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantModel {
    alphabet_size: usize,
    symbol: Symbol,
    eval_ops: u64,
}

impl ConstantModel {
    pub fn new(alphabet_size: usize, symbol: Symbol) -> Result<Self, ModelError> {
        if alphabet_size == 0 {
            return Err(ModelError::EmptyAlphabet(alphabet_size));
        }
        if (symbol as usize) >= alphabet_size {
            return Err(ModelError::SymbolOutOfRange { symbol, alphabet_size });
        }
        Ok(ConstantModel { alphabet_size, symbol, eval_ops: 0 })
    }

    pub fn symbol(&self) -> Symbol {
        self.symbol
    }
}

impl SequenceModel for ConstantModel {
    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn predict(&self, _context: &[Symbol]) -> Vec<f64> {
        let others = (self.alphabet_size - 1) as f64;
        let mut p = vec![SMOOTHING_FLOOR; self.alphabet_size];
        p[self.symbol as usize] = 1.0 - others * SMOOTHING_FLOOR;
        p
    }

    fn predict_next(&self) -> Vec<f64> {
        self.predict(&[])
    }

    fn update(&mut self, symbol: Symbol) {
        assert!(
            (symbol as usize) < self.alphabet_size,
            "symbol {symbol} outside alphabet of size {}",
            self.alphabet_size
        );
        // Parameters never change; only the work is counted.
        self.eval_ops += 1;
    }

    fn description_length_bits(&self) -> f64 {
        CONSTANT_MODEL_BITS
    }

    fn eval_ops(&self) -> u64 {
        self.eval_ops
    }

    fn reset_position(&mut self) {}
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribution_is_floored_point_mass() {
        let m = ConstantModel::new(4, 2).unwrap();
        let p = m.predict(&[]);
        assert!((p[2] - (1.0 - 3.0 * SMOOTHING_FLOOR)).abs() < 1e-15);
        assert_eq!(p[0], SMOOTHING_FLOOR);
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_symbol_alphabet_is_certain() {
        let m = ConstantModel::new(1, 0).unwrap();
        assert_eq!(m.predict(&[]), vec![1.0]);
    }

    #[test]
    fn update_never_moves_parameters() {
        let mut m = ConstantModel::new(2, 0).unwrap();
        let before = m.predict(&[]);
        m.update(1);
        m.update(0);
        assert_eq!(m.predict(&[]), before);
        assert_eq!(m.eval_ops(), 2);
    }

    #[test]
    fn symbol_must_fit_alphabet() {
        assert!(matches!(
            ConstantModel::new(2, 2),
            Err(ModelError::SymbolOutOfRange { symbol: 2, alphabet_size: 2 })
        ));
    }
}
