//! Order-k Markov predictor with additive smoothing.
//!
//! For a context `c` (the last `k` symbols) holding counts `n(c, s)`, the
//! predictive probability of symbol `s` is
//!
//! ```text
//! p(s | c) = (n(c, s) + alpha) / (sum_s' n(c, s') + alpha * A)
//! ```
//!
//! with `A` the alphabet size. `alpha = 1` is the classic add-one rule,
//! `alpha = 0.5` the Krichevsky-Trofimov choice. Any `alpha > 0` keeps the
//! distribution strictly positive, so every symbol stays encodable.
//!
//! Context rows are materialized lazily: an unseen context predicts uniform
//! without allocating, and only counts that were actually incremented are
//! charged to the description length. While fewer than `k` symbols have been
//! seen, the shorter prefix that does exist is used as the context key.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::Symbol;

use super::{ModelError, SequenceModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovModel {
    alphabet_size: usize,
    order: usize,
    alpha: f64,
    #[serde(with = "context_rows")]
    counts: BTreeMap<Vec<Symbol>, Vec<u64>>,
    // Number of count cells that are nonzero, cached for description_length_bits.
    touched: u64,
    // Last `order` symbols consumed by `update`; the live stream context.
    recent: VecDeque<Symbol>,
    eval_ops: u64,
}

impl MarkovModel {
    pub fn new(alphabet_size: usize, order: usize, alpha: f64) -> Result<Self, ModelError> {
        if alphabet_size == 0 {
            return Err(ModelError::EmptyAlphabet(alphabet_size));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ModelError::BadSmoothing(alpha));
        }
        Ok(MarkovModel {
            alphabet_size,
            order,
            alpha,
            counts: BTreeMap::new(),
            touched: 0,
            recent: VecDeque::new(),
            eval_ops: 0,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Count rows materialized so far.
    pub fn contexts(&self) -> usize {
        self.counts.len()
    }

    fn distribution_for(&self, key: &[Symbol]) -> Vec<f64> {
        let a = self.alphabet_size as f64;
        match self.counts.get(key) {
            None => vec![1.0 / a; self.alphabet_size],
            Some(row) => {
                let total: u64 = row.iter().sum();
                let denom = total as f64 + self.alpha * a;
                row.iter().map(|&n| (n as f64 + self.alpha) / denom).collect()
            }
        }
    }

    fn context_key<'a>(&self, context: &'a [Symbol]) -> &'a [Symbol] {
        let take = context.len().min(self.order);
        &context[context.len() - take..]
    }
}

impl SequenceModel for MarkovModel {
    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn predict(&self, context: &[Symbol]) -> Vec<f64> {
        self.distribution_for(self.context_key(context))
    }

    fn predict_next(&self) -> Vec<f64> {
        let key: Vec<Symbol> = self.recent.iter().copied().collect();
        self.distribution_for(&key)
    }

    fn update(&mut self, symbol: Symbol) {
        assert!(
            (symbol as usize) < self.alphabet_size,
            "symbol {symbol} outside alphabet of size {}",
            self.alphabet_size
        );
        let key: Vec<Symbol> = self.recent.iter().copied().collect();
        let row = self
            .counts
            .entry(key)
            .or_insert_with(|| vec![0; self.alphabet_size]);
        if row[symbol as usize] == 0 {
            self.touched += 1;
        }
        row[symbol as usize] += 1;

        if self.order > 0 {
            self.recent.push_back(symbol);
            if self.recent.len() > self.order {
                self.recent.pop_front();
            }
        }
        self.eval_ops += 1;
    }

    fn description_length_bits(&self) -> f64 {
        self.order as f64 * (self.alphabet_size as f64).log2() + 32.0 * self.touched as f64
    }

    fn eval_ops(&self) -> u64 {
        self.eval_ops
    }

    fn reset_position(&mut self) {
        self.recent.clear();
    }
}

// BTreeMap keys here are Vec<Symbol>, which readable text formats cannot use
// as map keys directly, so rows serialize as a (context, counts) pair list.
mod context_rows {
    use super::*;
    use serde::de::Deserializer;
    use serde::ser::Serializer;

    pub fn serialize<S: Serializer>(
        rows: &BTreeMap<Vec<Symbol>, Vec<u64>>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(&Vec<Symbol>, &Vec<u64>)> = rows.iter().collect();
        serde::Serialize::serialize(&pairs, ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<Vec<Symbol>, Vec<u64>>, D::Error> {
        let pairs: Vec<(Vec<Symbol>, Vec<u64>)> = serde::Deserialize::deserialize(de)?;
        Ok(pairs.into_iter().collect())
    }
}
