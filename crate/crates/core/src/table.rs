//! Joint outcome probabilities for several separated parties, each choosing
//! one of its measurement settings.
//!
//! Entries are laid out setting-combination-major: the flat index is
//! `settings_index * block + outcomes_index`, both mixed-radix with party 0 as
//! the most significant digit.

use crate::error::{Error, Result};

/// One measuring party: its setting labels and the outcome labels each setting
/// can produce (shared by all of its settings).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Party {
    pub label: String,
    pub settings: Vec<String>,
    pub outcomes: Vec<i32>,
}

impl Party {
    pub fn new(label: impl Into<String>, settings: Vec<String>, outcomes: Vec<i32>) -> Self {
        Self {
            label: label.into(),
            settings,
            outcomes,
        }
    }

    pub fn outcome_index(&self, outcome: i32) -> Option<usize> {
        self.outcomes.iter().position(|&o| o == outcome)
    }

    pub fn setting_index(&self, setting: &str) -> Option<usize> {
        self.settings.iter().position(|s| s == setting)
    }
}

/// Assignment of outcomes to some of the parties under fixed settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    /// `(party, setting index, outcome index)` triples.
    pub terms: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    parties: Vec<Party>,
    probs: Vec<f64>,
}

fn mixed_radix(digits: &[usize], radices: &[usize]) -> usize {
    digits
        .iter()
        .zip(radices)
        .fold(0, |acc, (&d, &r)| acc * r + d)
}

fn decode(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = index % r;
        index /= r;
    }
    digits
}

impl JointTable {
    pub fn new(parties: Vec<Party>, probs: Vec<f64>) -> Result<Self> {
        if parties.is_empty()
            || parties
                .iter()
                .any(|p| p.settings.is_empty() || p.outcomes.is_empty())
        {
            return Err(Error::InvalidState(
                "every party needs at least one setting and one outcome".into(),
            ));
        }
        let expected = Self::expected_len(&parties);
        if probs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: probs.len(),
            });
        }
        if probs.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidState("non-finite probability".into()));
        }
        Ok(Self { parties, probs })
    }

    fn expected_len(parties: &[Party]) -> usize {
        parties
            .iter()
            .map(|p| p.settings.len() * p.outcomes.len())
            .product()
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn setting_radices(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.settings.len()).collect()
    }

    pub fn outcome_radices(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.outcomes.len()).collect()
    }

    pub fn num_setting_combos(&self) -> usize {
        self.setting_radices().iter().product()
    }

    pub fn block_size(&self) -> usize {
        self.outcome_radices().iter().product()
    }

    pub fn index(&self, settings: &[usize], outcomes: &[usize]) -> usize {
        mixed_radix(settings, &self.setting_radices()) * self.block_size()
            + mixed_radix(outcomes, &self.outcome_radices())
    }

    /// `(settings, outcomes)` digits of a flat index.
    pub fn decode(&self, index: usize) -> (Vec<usize>, Vec<usize>) {
        let block = self.block_size();
        (
            decode(index / block, &self.setting_radices()),
            decode(index % block, &self.outcome_radices()),
        )
    }

    pub fn settings_of_combo(&self, combo: usize) -> Vec<usize> {
        decode(combo, &self.setting_radices())
    }

    pub fn get(&self, settings: &[usize], outcomes: &[usize]) -> f64 {
        self.probs[self.index(settings, outcomes)]
    }

    /// Probabilities of one setting combination in outcome order.
    pub fn block(&self, combo: usize) -> &[f64] {
        let b = self.block_size();
        &self.probs[combo * b..(combo + 1) * b]
    }

    /// Looks up an entry by setting and outcome labels, one pair per party in
    /// party order, e.g. `[("Y1", 1), ("Y2", 1)]`.
    pub fn prob(&self, labels: &[(&str, i32)]) -> Option<f64> {
        self.event(labels).map(|e| self.event_probability(&e))
    }

    /// Builds an event from `(setting label, outcome)` pairs.
    pub fn event(&self, labels: &[(&str, i32)]) -> Option<Event> {
        let mut terms = Vec::with_capacity(labels.len());
        for &(setting, outcome) in labels {
            let (party, s) = self
                .parties
                .iter()
                .enumerate()
                .find_map(|(k, p)| p.setting_index(setting).map(|s| (k, s)))?;
            terms.push((party, s, self.parties[party].outcome_index(outcome)?));
        }
        Some(Event { terms })
    }

    /// Probability of an event; parties the event leaves out are summed over
    /// under their first setting.
    pub fn event_probability(&self, event: &Event) -> f64 {
        let n = self.parties.len();
        let mut settings = vec![0; n];
        let mut fixed: Vec<Option<usize>> = vec![None; n];
        for &(party, s, o) in &event.terms {
            settings[party] = s;
            fixed[party] = Some(o);
        }
        let combo = mixed_radix(&settings, &self.setting_radices());
        let radices = self.outcome_radices();
        self.block(combo)
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                decode(*k, &radices)
                    .iter()
                    .zip(&fixed)
                    .all(|(d, f)| f.is_none_or(|f| f == *d))
            })
            .map(|(_, p)| p)
            .sum()
    }

    /// Largest `|Σ block − 1|` over setting combinations.
    pub fn normalization_defect(&self) -> f64 {
        (0..self.num_setting_combos())
            .map(|c| (self.block(c).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest change in any single party's marginal when the other parties
    /// change their settings.
    pub fn no_signalling_defect(&self) -> f64 {
        let radices = self.outcome_radices();
        let mut worst: f64 = 0.0;
        for (party, info) in self.parties.iter().enumerate() {
            for setting in 0..info.settings.len() {
                let mut reference: Option<Vec<f64>> = None;
                for combo in 0..self.num_setting_combos() {
                    if self.settings_of_combo(combo)[party] != setting {
                        continue;
                    }
                    let mut marginal = vec![0.0; info.outcomes.len()];
                    for (k, p) in self.block(combo).iter().enumerate() {
                        marginal[decode(k, &radices)[party]] += p;
                    }
                    match &reference {
                        None => reference = Some(marginal),
                        Some(r) => {
                            for (a, b) in r.iter().zip(&marginal) {
                                worst = worst.max((a - b).abs());
                            }
                        }
                    }
                }
            }
        }
        worst
    }

    /// Copy with entries at or below `zero_tol` set to exactly zero and each
    /// setting block rescaled to sum to one.
    pub fn idealized(&self, zero_tol: f64) -> JointTable {
        let block = self.block_size();
        let mut probs: Vec<f64> = self
            .probs
            .iter()
            .map(|&p| if p <= zero_tol { 0.0 } else { p })
            .collect();
        for chunk in probs.chunks_mut(block) {
            let s: f64 = chunk.iter().sum();
            if s > 0.0 {
                chunk.iter_mut().for_each(|p| *p /= s);
            }
        }
        JointTable {
            parties: self.parties.clone(),
            probs,
        }
    }
}
