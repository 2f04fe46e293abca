//! Finite-shot simulation of a Hardy experiment.
//!
//! Each shot picks a setting pair from a schedule and draws an outcome pair
//! from the exact joint table by inverse CDF. Random numbers come from
//! SplitMix64 evaluated at a per-shot counter, so shot `i` depends only on
//! `(seed, i)` and any shot range can be regenerated independently.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hardy::{joint_table, HardyCondition, HardyConstruction};
use crate::table::JointTable;
use crate::tensor::{StateVector, ZERO_PROBABILITY};

pub const DEFAULT_SIGMA: f64 = 4.0;

/// Weyl increment of SplitMix64 (the 64-bit golden ratio).
pub const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// First multiplier of the SplitMix64 finalizer.
pub const SPLITMIX_MUL1: u64 = 0xBF58_476D_1CE4_E5B9;
/// Second multiplier of the SplitMix64 finalizer.
pub const SPLITMIX_MUL2: u64 = 0x94D0_49BB_1331_11EB;

/// The `index`-th output of SplitMix64 seeded with `seed`.
pub fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(SPLITMIX_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(SPLITMIX_MUL1);
    z = (z ^ (z >> 27)).wrapping_mul(SPLITMIX_MUL2);
    z ^ (z >> 31)
}

/// Uniform double in `[0, 1)` from the top 53 bits of [`splitmix64`].
pub fn uniform(seed: u64, index: u64) -> f64 {
    (splitmix64(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Which setting combination each shot measures. Combinations are indexed
/// as in [`JointTable`]: for two parties, `0 = (X1,X2)`, `1 = (X1,Y2)`,
/// `2 = (Y1,X2)`, `3 = (Y1,Y2)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum SettingSchedule {
    #[default]
    RoundRobin,
    Fixed(usize),
    Cycle(Vec<usize>),
}

impl SettingSchedule {
    pub fn combo(&self, shot: usize, num_combos: usize) -> usize {
        match self {
            SettingSchedule::RoundRobin => shot % num_combos,
            SettingSchedule::Fixed(c) => *c,
            SettingSchedule::Cycle(cs) => cs[shot % cs.len()],
        }
    }

    fn validate(&self, num_combos: usize) -> Result<()> {
        let bad = match self {
            SettingSchedule::RoundRobin => None,
            SettingSchedule::Fixed(c) => (*c >= num_combos).then_some(*c),
            SettingSchedule::Cycle(cs) if cs.is_empty() => {
                return Err(Error::InvalidState("empty setting schedule".into()))
            }
            SettingSchedule::Cycle(cs) => cs.iter().copied().find(|&c| c >= num_combos),
        };
        match bad {
            Some(c) => Err(Error::InvalidState(format!(
                "setting combination {c} out of range for {num_combos}"
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotRecord {
    pub shot: usize,
    pub settings: [usize; 2],
    pub outcomes: [i32; 2],
}

/// Draws `shots` records for a two-party table.
pub fn sample_table(
    table: &JointTable,
    shots: usize,
    seed: u64,
    schedule: &SettingSchedule,
) -> Result<Vec<ShotRecord>> {
    if table.parties().len() != 2 {
        return Err(Error::InvalidState("sampling needs a two-party table".into()));
    }
    let combos = table.num_setting_combos();
    schedule.validate(combos)?;
    let block = table.block_size();
    let cdfs: Vec<Vec<f64>> = (0..combos)
        .map(|c| {
            let mut acc = 0.0;
            table
                .block(c)
                .iter()
                .map(|&p| {
                    if p > ZERO_PROBABILITY {
                        acc += p;
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let (a, b) = (&table.parties()[0], &table.parties()[1]);

    let mut out = Vec::with_capacity(shots);
    for shot in 0..shots {
        let combo = schedule.combo(shot, combos);
        let cdf = &cdfs[combo];
        let total = cdf[block - 1];
        if total <= 0.0 {
            return Err(Error::NumericalFailure(format!(
                "setting combination {combo} has no probability mass"
            )));
        }
        let u = uniform(seed, shot as u64) * total;
        let probs = table.block(combo);
        let k = (0..block)
            .find(|&k| probs[k] > ZERO_PROBABILITY && u < cdf[k])
            .unwrap_or_else(|| {
                (0..block)
                    .rev()
                    .find(|&k| probs[k] > ZERO_PROBABILITY)
                    .expect("block has mass")
            });
        let (settings, outs) = table.decode(combo * block + k);
        out.push(ShotRecord {
            shot,
            settings: [settings[0], settings[1]],
            outcomes: [a.outcomes[outs[0]], b.outcomes[outs[1]]],
        });
    }
    Ok(out)
}

/// Draws shots for the Hardy observables of `construction` on `v`.
pub fn sample(
    v: &StateVector,
    construction: &HardyConstruction,
    shots: usize,
    seed: u64,
    schedule: &SettingSchedule,
) -> Result<Vec<ShotRecord>> {
    let table = joint_table(v, &construction.parties())?;
    sample_table(&table, shots, seed, schedule)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckVerdict {
    Pass,
    Fail,
    /// Too few shots on the setting pair to decide.
    Insufficient,
}

impl CheckVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckVerdict::Pass => "pass",
            CheckVerdict::Fail => "fail",
            CheckVerdict::Insufficient => "insufficient",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellStats {
    pub combo: usize,
    /// Outcome labels of the two parties.
    pub outcomes: [i32; 2],
    pub count: usize,
    pub frequency: f64,
    pub exact: f64,
    /// `√(p(1−p)/n)` with the exact `p` and the shots `n` on this combination.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub condition: HardyCondition,
    pub shots: usize,
    pub count: usize,
    pub frequency: f64,
    pub exact: f64,
    pub std_error: f64,
    pub verdict: CheckVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub sigma: f64,
    pub total_shots: usize,
    pub shots_per_combo: Vec<usize>,
    pub cells: Vec<CellStats>,
    /// Five zero conditions followed by the Hardy condition.
    pub conditions: Vec<ConditionCheck>,
}

impl FrequencyReport {
    pub fn hardy(&self) -> &ConditionCheck {
        self.conditions.last().expect("Hardy condition present")
    }

    pub fn all_pass(&self) -> bool {
        self.conditions
            .iter()
            .all(|c| c.verdict == CheckVerdict::Pass)
    }
}

fn std_error(p: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).max(0.0).sqrt()
    }
}

/// Tallies records against the exact two-party table.
///
/// A zero condition passes when its outcome pair never occurred. The Hardy
/// condition passes when its frequency is positive and within `sigma`
/// standard errors of the exact value; it is undecided while that band still
/// reaches zero.
pub fn analyze(records: &[ShotRecord], table: &JointTable, sigma: f64) -> Result<FrequencyReport> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidState(format!("sigma must be positive, got {sigma}")));
    }
    let (a, b) = (&table.parties()[0], &table.parties()[1]);
    let combos = table.num_setting_combos();
    let block = table.block_size();
    let mut shots_per_combo = vec![0; combos];
    let mut counts = vec![0usize; table.len()];
    for r in records {
        let (Some(o1), Some(o2)) = (a.outcome_index(r.outcomes[0]), b.outcome_index(r.outcomes[1]))
        else {
            return Err(Error::InvalidState(format!(
                "shot {} has outcomes outside the table",
                r.shot
            )));
        };
        if r.settings[0] >= a.settings.len() || r.settings[1] >= b.settings.len() {
            return Err(Error::InvalidState(format!(
                "shot {} has settings outside the table",
                r.shot
            )));
        }
        let e = table.index(&r.settings, &[o1, o2]);
        counts[e] += 1;
        shots_per_combo[e / block] += 1;
    }
    let cells: Vec<CellStats> = (0..table.len())
        .map(|e| {
            let (_, o) = table.decode(e);
            let n = shots_per_combo[e / block];
            let exact = table.probs()[e];
            CellStats {
                combo: e / block,
                outcomes: [a.outcomes[o[0]], b.outcomes[o[1]]],
                count: counts[e],
                frequency: if n == 0 { 0.0 } else { counts[e] as f64 / n as f64 },
                exact,
                std_error: std_error(exact, n),
            }
        })
        .collect();

    let conditions = HardyCondition::ZERO
        .iter()
        .chain(std::iter::once(&HardyCondition::YPlusYPlus))
        .map(|&condition| {
            let (s1, o1, s2, o2) = condition.event();
            let event = table.event(&[(s1, o1), (s2, o2)]).ok_or_else(|| {
                Error::InvalidState("table lacks the Hardy setting labels".into())
            })?;
            let e = table.index(
                &[event.terms[0].1, event.terms[1].1],
                &[event.terms[0].2, event.terms[1].2],
            );
            let cell = &cells[e];
            let shots = shots_per_combo[e / block];
            let verdict = if shots == 0 {
                CheckVerdict::Insufficient
            } else if condition != HardyCondition::YPlusYPlus {
                if cell.count == 0 {
                    CheckVerdict::Pass
                } else {
                    CheckVerdict::Fail
                }
            } else if sigma * cell.std_error >= cell.exact {
                CheckVerdict::Insufficient
            } else if cell.count > 0
                && (cell.frequency - cell.exact).abs() <= sigma * cell.std_error
            {
                CheckVerdict::Pass
            } else {
                CheckVerdict::Fail
            };
            Ok(ConditionCheck {
                condition,
                shots,
                count: cell.count,
                frequency: cell.frequency,
                exact: cell.exact,
                std_error: cell.std_error,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyReport {
        sigma,
        total_shots: records.len(),
        shots_per_combo,
        cells,
        conditions,
    })
}

/// `shot,setting1,setting2,outcome1,outcome2` with one line per record.
pub fn records_to_csv(records: &[ShotRecord], table: &JointTable) -> String {
    let (a, b) = (&table.parties()[0], &table.parties()[1]);
    let mut out = String::from("shot,setting1,setting2,outcome1,outcome2\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.shot,
            a.settings[r.settings[0]],
            b.settings[r.settings[1]],
            r.outcomes[0],
            r.outcomes[1]
        )
        .expect("writing to a String");
    }
    out
}
