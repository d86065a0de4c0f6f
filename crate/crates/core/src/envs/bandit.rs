//! One-state bandit over symbol streams.
//!
//! Each action selects a channel; the observation is that channel's next
//! symbol. Unselected channels do not advance, external reward is always 0,
//! and the episode never ends: the only thing at stake is which stream is
//! worth watching. Channels own their generator state, seeded from the
//! environment seed and the channel index, so a channel's emitted stream
//! depends only on how often it has been selected.
//!
//! The stock channel set spans the compressibility spectrum: `constant` is
//! the dark room, `iid_uniform` the white-noise screen, `periodic` is
//! perfectly learnable structure, `biased_coin` and `markov_chain` are
//! statistically compressible, and `pi_digits` looks like noise to every
//! statistical model here despite being deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::{Action, StateId, Symbol};

use super::{EnvDescription, Environment, EnvError, StepOutcome};

/// Generator shape for one channel, as written in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Emits the same symbol forever.
    Constant { symbol: Symbol },
    /// Cycles through `pattern` forever.
    Periodic { pattern: Vec<Symbol> },
    /// Emits 0 with probability `p`, else 1.
    BiasedCoin { p: f64 },
    /// First-order chain over symbols: `transitions[s]` is the distribution
    /// of the symbol following `s`. Starts from symbol 0.
    MarkovChain { transitions: Vec<Vec<f64>> },
    /// Uniform over the whole alphabet.
    IidUniform,
    /// Decimal digits of pi (3, 1, 4, ...), cycling after `digits` of them.
    /// Deterministic but beyond the reach of counting models.
    PiDigits {
        #[serde(default = "default_pi_digits")]
        digits: usize,
    },
}

fn default_pi_digits() -> usize {
    2048
}

impl ChannelSpec {
    fn validate(&self, index: usize, alphabet_size: usize) -> Result<(), EnvError> {
        let bad = |reason: String| EnvError::BadChannel { index, reason };
        match self {
            ChannelSpec::Constant { symbol } => {
                if (*symbol as usize) >= alphabet_size {
                    return Err(bad(format!(
                        "constant symbol {symbol} outside alphabet of size {alphabet_size}"
                    )));
                }
            }
            ChannelSpec::Periodic { pattern } => {
                if pattern.is_empty() {
                    return Err(bad("periodic pattern is empty".into()));
                }
                if let Some(s) = pattern.iter().find(|&&s| (s as usize) >= alphabet_size) {
                    return Err(bad(format!(
                        "pattern symbol {s} outside alphabet of size {alphabet_size}"
                    )));
                }
            }
            ChannelSpec::BiasedCoin { p } => {
                if alphabet_size < 2 {
                    return Err(bad("biased_coin needs an alphabet of at least 2".into()));
                }
                if !(0.0..=1.0).contains(p) {
                    return Err(bad(format!("bias {p} outside [0, 1]")));
                }
            }
            ChannelSpec::MarkovChain { transitions } => {
                let n = transitions.len();
                if n == 0 || n > alphabet_size {
                    return Err(bad(format!(
                        "chain over {n} symbols does not fit alphabet of size {alphabet_size}"
                    )));
                }
                for (row_idx, row) in transitions.iter().enumerate() {
                    if row.len() != n {
                        return Err(bad(format!(
                            "transition row {row_idx} has {} entries, expected {n}",
                            row.len()
                        )));
                    }
                    if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                        return Err(bad(format!("transition row {row_idx} has entries outside [0, 1]")));
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > 1e-9 {
                        return Err(bad(format!("transition row {row_idx} sums to {sum}, expected 1")));
                    }
                }
            }
            ChannelSpec::IidUniform => {}
            ChannelSpec::PiDigits { digits } => {
                if alphabet_size < 10 {
                    return Err(bad("pi_digits needs an alphabet of at least 10".into()));
                }
                if *digits == 0 {
                    return Err(bad("pi_digits needs at least one digit".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Channel {
    spec: ChannelSpec,
    rng: ChaCha12Rng,
    /// Position in the stream: pattern phase, pi-digit index.
    cursor: usize,
    /// Current chain symbol for markov_chain.
    chain_state: Symbol,
    /// Precomputed digits for pi_digits.
    digits: Vec<u8>,
}

impl Channel {
    fn new(spec: ChannelSpec, seed: u64, index: usize) -> Self {
        // Distinct, stable stream per (env seed, channel index).
        let channel_seed = seed ^ (0x9E37_79B9_7F4A_7C15u64).wrapping_mul(index as u64 + 1);
        let digits = match &spec {
            ChannelSpec::PiDigits { digits } => pi_digits(*digits),
            _ => Vec::new(),
        };
        Channel {
            spec,
            rng: ChaCha12Rng::seed_from_u64(channel_seed),
            cursor: 0,
            chain_state: 0,
            digits,
        }
    }

    fn next_symbol(&mut self, alphabet_size: usize) -> Symbol {
        match &self.spec {
            ChannelSpec::Constant { symbol } => *symbol,
            ChannelSpec::Periodic { pattern } => {
                let s = pattern[self.cursor % pattern.len()];
                self.cursor += 1;
                s
            }
            ChannelSpec::BiasedCoin { p } => {
                if self.rng.gen::<f64>() < *p {
                    0
                } else {
                    1
                }
            }
            ChannelSpec::MarkovChain { transitions } => {
                let row = &transitions[self.chain_state as usize];
                let draw = self.rng.gen::<f64>();
                let mut acc = 0.0;
                let mut next = row.len() - 1;
                for (s, &p) in row.iter().enumerate() {
                    acc += p;
                    if draw < acc {
                        next = s;
                        break;
                    }
                }
                self.chain_state = next as Symbol;
                self.chain_state
            }
            ChannelSpec::IidUniform => self.rng.gen_range(0..alphabet_size) as Symbol,
            ChannelSpec::PiDigits { .. } => {
                let s = self.digits[self.cursor % self.digits.len()] as Symbol;
                self.cursor += 1;
                s
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChannelBanditEnv {
    channels: Vec<Channel>,
    alphabet_size: usize,
}

impl ChannelBanditEnv {
    pub fn new(
        specs: Vec<ChannelSpec>,
        alphabet_size: usize,
        seed: u64,
    ) -> Result<Self, EnvError> {
        if specs.is_empty() {
            return Err(EnvError::BadChannel { index: 0, reason: "no channels given".into() });
        }
        for (i, spec) in specs.iter().enumerate() {
            spec.validate(i, alphabet_size)?;
        }
        let channels = specs
            .into_iter()
            .enumerate()
            .map(|(i, spec)| Channel::new(spec, seed, i))
            .collect();
        Ok(ChannelBanditEnv { channels, alphabet_size })
    }

    /// The stock four-channel set used throughout the tests: constant,
    /// periodic-8, biased coin 0.9, uniform noise, over a binary alphabet.
    pub fn standard_four(seed: u64) -> Self {
        let specs = vec![
            ChannelSpec::Constant { symbol: 0 },
            ChannelSpec::Periodic { pattern: vec![0, 1, 1, 0, 1, 0, 0, 1] },
            ChannelSpec::BiasedCoin { p: 0.9 },
            ChannelSpec::IidUniform,
        ];
        ChannelBanditEnv::new(specs, 2, seed).expect("stock channel set is valid")
    }
}

impl Environment for ChannelBanditEnv {
    fn describe(&self) -> EnvDescription {
        EnvDescription {
            state_count: 1,
            action_count: self.channels.len() as u16,
            alphabet_size: self.alphabet_size,
        }
    }

    fn state_id(&self) -> StateId {
        0
    }

    fn step(&mut self, action: Action, _rng: &mut ChaCha12Rng) -> Result<StepOutcome, EnvError> {
        let idx = action as usize;
        if idx >= self.channels.len() {
            return Err(EnvError::InvalidAction {
                action,
                action_count: self.channels.len() as u16,
            });
        }
        let alphabet_size = self.alphabet_size;
        let observation = self.channels[idx].next_symbol(alphabet_size);
        Ok(StepOutcome { observation, reward_ext: 0.0, state: 0, terminal: false })
    }

    fn reset_episode(&mut self) {}
}

/// First `n` decimal digits of pi via the Rabinowitz-Wagon spigot.
pub fn pi_digits(n: usize) -> Vec<u8> {
    // Generate a few extra so held-back predigits flush.
    let want = n + 4;
    let len = want * 10 / 3 + 1;
    let mut a = vec![2u64; len];
    let mut out: Vec<u8> = Vec::with_capacity(want);
    let mut predigit = 0u64;
    let mut nines = 0usize;
    let mut first = true;
    for _ in 0..want {
        let mut q = 0u64;
        for i in (0..len).rev() {
            let x = 10 * a[i] + q * (i as u64 + 1);
            a[i] = x % (2 * i as u64 + 1);
            q = x / (2 * i as u64 + 1);
        }
        a[0] = q % 10;
        q /= 10;
        if q == 9 {
            nines += 1;
        } else if q == 10 {
            out.push((predigit + 1) as u8);
            for _ in 0..nines {
                out.push(0);
            }
            predigit = 0;
            nines = 0;
        } else {
            if !first {
                out.push(predigit as u8);
            }
            first = false;
            predigit = q;
            for _ in 0..nines {
                out.push(9);
            }
            nines = 0;
        }
    }
    out.push(predigit as u8);
    out.truncate(n);
    out
}
