//! Incremental-parsing dictionary predictor in the LZ78 family.
//!
//! The model grows a trie of phrases. Parsing the live stream walks the trie
//! from the root; when the next symbol has no edge, that symbol completes a
//! novel phrase, a node for it is stored, and parsing restarts at the root.
//! Edge traversal counts double as statistics: at the current node the next
//! symbol is predicted with add-alpha smoothed counts over its child edges,
//!
//! ```text
//! p(s) = (visits(child_s) + alpha) / (sum_c visits(c) + alpha * A)
//! ```
//!
//! so an often-repeated phrase becomes cheap to encode while every symbol
//! keeps nonzero probability. Each stored phrase is charged 32 bits of
//! description length.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::Symbol;

use super::{ModelError, SequenceModel};

const BITS_PER_PHRASE: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Node {
    children: BTreeMap<Symbol, usize>,
    // Times this node's edge was traversed, including its creation.
    visits: u64,
}

impl Node {
    fn new() -> Self {
        Node { children: BTreeMap::new(), visits: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lz78Model {
    alphabet_size: usize,
    alpha: f64,
    // nodes[0] is the root and holds no symbol.
    nodes: Vec<Node>,
    // Trie position of the live stream parse.
    cursor: usize,
    eval_ops: u64,
}

impl Lz78Model {
    pub fn new(alphabet_size: usize, alpha: f64) -> Result<Self, ModelError> {
        if alphabet_size == 0 {
            return Err(ModelError::EmptyAlphabet(alphabet_size));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(ModelError::BadSmoothing(alpha));
        }
        Ok(Lz78Model {
            alphabet_size,
            alpha,
            nodes: vec![Node::new()],
            cursor: 0,
            eval_ops: 0,
        })
    }

    /// Phrases stored so far (the root counts as no phrase).
    pub fn phrase_count(&self) -> usize {
        self.nodes.len() - 1
    }

    fn distribution_at(&self, node: usize) -> Vec<f64> {
        let a = self.alphabet_size as f64;
        let node = &self.nodes[node];
        let total: u64 = node.children.values().map(|&c| self.nodes[c].visits).sum();
        let denom = total as f64 + self.alpha * a;
        (0..self.alphabet_size as Symbol)
            .map(|s| {
                let count = node
                    .children
                    .get(&s)
                    .map(|&c| self.nodes[c].visits)
                    .unwrap_or(0);
                (count as f64 + self.alpha) / denom
            })
            .collect()
    }

    /// Parse `context` against the frozen trie (no insertions) and return the
    /// end position. A missing edge closes the phrase and restarts at the
    /// root, mirroring how the live parse consumes a novel symbol.
    fn frozen_parse(&self, context: &[Symbol]) -> usize {
        let mut node = 0;
        for &s in context {
            node = match self.nodes[node].children.get(&s) {
                Some(&child) => child,
                None => 0,
            };
        }
        node
    }
}

impl SequenceModel for Lz78Model {
    fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn predict(&self, context: &[Symbol]) -> Vec<f64> {
        self.distribution_at(self.frozen_parse(context))
    }

    fn predict_next(&self) -> Vec<f64> {
        self.distribution_at(self.cursor)
    }

    fn update(&mut self, symbol: Symbol) {
        assert!(
            (symbol as usize) < self.alphabet_size,
            "symbol {symbol} outside alphabet of size {}",
            self.alphabet_size
        );
        match self.nodes[self.cursor].children.get(&symbol) {
            Some(&child) => {
                self.nodes[child].visits += 1;
                self.cursor = child;
            }
            None => {
                let id = self.nodes.len();
                self.nodes.push(Node::new());
                self.nodes[self.cursor].children.insert(symbol, id);
                self.cursor = 0;
            }
        }
        self.eval_ops += 1;
    }

    fn description_length_bits(&self) -> f64 {
        BITS_PER_PHRASE * self.phrase_count() as f64
    }

    fn eval_ops(&self) -> u64 {
        self.eval_ops
    }

    fn reset_position(&mut self) {
        self.cursor = 0;
    }
}
