//! Local hidden-variable certification.
//!
//! A local model is a probability mixture of deterministic strategies, each
//! fixing one outcome for every setting of every party independently. Whether
//! such a mixture reproduces a [`JointTable`] is an LP feasibility question;
//! when it does not, the phase-one multipliers form a Bell-type inequality
//! that every strategy satisfies and the table violates.

use crate::error::{Error, Result};
use crate::hardy::{outcome_label, HardyCondition};
use crate::simplex::phase_one;
use crate::table::{Event, JointTable, Party};

pub const STRATEGY_CAP: u128 = 1_000_000;

/// Phase-one objective at or below this value counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// A feasible mixture must reproduce every table entry to this.
pub const REPRODUCTION_TOL: f64 = 1e-8;

/// Largest value a Farkas inequality may take on any local strategy.
pub const DUAL_TOL: f64 = 1e-12;

/// One outcome index per setting per party.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub outcomes: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    /// Whether this strategy produces `outcomes` under `settings`.
    pub fn predicts(&self, settings: &[usize], outcomes: &[usize]) -> bool {
        self.outcomes
            .iter()
            .zip(settings.iter().zip(outcomes))
            .all(|(party, (&s, &o))| party[s] == o)
    }

    pub fn fires(&self, event: &Event) -> bool {
        event
            .terms
            .iter()
            .all(|&(party, s, o)| self.outcomes[party][s] == o)
    }

    /// `X1=+1,Y1=-1|X2=0,Y2=+1` style description.
    pub fn describe(&self, parties: &[Party]) -> String {
        parties
            .iter()
            .zip(&self.outcomes)
            .map(|(p, outs)| {
                p.settings
                    .iter()
                    .zip(outs)
                    .map(|(s, &o)| format!("{s}={}", outcome_label(p.outcomes[o])))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

pub fn count_strategies(parties: &[Party]) -> u128 {
    parties
        .iter()
        .map(|p| (p.outcomes.len() as u128).saturating_pow(p.settings.len() as u32))
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// Every deterministic local strategy, party 0 varying slowest.
pub fn enumerate_strategies(parties: &[Party]) -> Result<Vec<DeterministicStrategy>> {
    let count = count_strategies(parties);
    if count > STRATEGY_CAP {
        return Err(Error::TooLarge {
            count,
            cap: STRATEGY_CAP,
        });
    }
    let digits: Vec<(usize, usize)> = parties
        .iter()
        .enumerate()
        .flat_map(|(k, p)| (0..p.settings.len()).map(move |s| (k, s)))
        .collect();
    let radix: Vec<usize> = digits
        .iter()
        .map(|&(k, _)| parties[k].outcomes.len())
        .collect();

    let mut out = Vec::with_capacity(count as usize);
    for mut index in 0..count as usize {
        let mut outcomes: Vec<Vec<usize>> =
            parties.iter().map(|p| vec![0; p.settings.len()]).collect();
        for (&(k, s), &r) in digits.iter().zip(&radix).rev() {
            outcomes[k][s] = index % r;
            index /= r;
        }
        out.push(DeterministicStrategy { outcomes });
    }
    Ok(out)
}

/// Strategies for two parties with identical setting and outcome counts.
pub fn enumerate_strategies_uniform(
    settings_per_side: usize,
    outcomes_per_setting: usize,
) -> Result<Vec<DeterministicStrategy>> {
    let party = |label: &str| {
        Party::new(
            label,
            (0..settings_per_side).map(|s| format!("S{s}")).collect(),
            (0..outcomes_per_setting as i32).collect(),
        )
    };
    enumerate_strategies(&[party("A"), party("B")])
}

/// A linear functional `Σ_e dual_e P(e) + offset` over table entries that is
/// at most zero for every local strategy and equals `margin > 0` on the table.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub dual: Vec<f64>,
    pub offset: f64,
    pub margin: f64,
    /// `max_k` of the functional over deterministic strategies.
    pub max_local_value: f64,
}

impl FarkasCertificate {
    /// Value of the functional on a deterministic strategy.
    pub fn local_value(&self, table: &JointTable, strategy: &DeterministicStrategy) -> f64 {
        self.offset
            + self
                .dual
                .iter()
                .enumerate()
                .filter(|(_, y)| **y != 0.0)
                .filter(|(e, _)| {
                    let (s, o) = table.decode(*e);
                    strategy.predicts(&s, &o)
                })
                .map(|(_, y)| y)
                .sum::<f64>()
    }

    pub fn table_value(&self, table: &JointTable) -> f64 {
        self.offset
            + self
                .dual
                .iter()
                .zip(table.probs())
                .map(|(y, p)| y * p)
                .sum::<f64>()
    }

    /// Re-evaluates the inequality against every strategy and the table.
    pub fn verify(&self, table: &JointTable, strategies: &[DeterministicStrategy]) -> bool {
        strategies
            .iter()
            .all(|s| self.local_value(table, s) <= DUAL_TOL)
            && self.table_value(table) > FEASIBILITY_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LhvCertificate {
    Feasible {
        /// `(strategy index, weight)` for every strategy with positive weight.
        weights: Vec<(usize, f64)>,
        max_residual: f64,
    },
    Infeasible(FarkasCertificate),
}

impl LhvCertificate {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LhvCertificate::Feasible { .. })
    }
}

#[derive(Debug, Clone)]
pub struct Certification {
    pub strategies: Vec<DeterministicStrategy>,
    pub certificate: LhvCertificate,
    pub phase_one_objective: f64,
    pub pivots: usize,
}

fn strategy_columns(table: &JointTable, strategies: &[DeterministicStrategy]) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![0.0; strategies.len()]; table.len() + 1];
    for (e, row) in rows.iter_mut().take(table.len()).enumerate() {
        let (s, o) = table.decode(e);
        for (k, strat) in strategies.iter().enumerate() {
            if strat.predicts(&s, &o) {
                row[k] = 1.0;
            }
        }
    }
    rows[table.len()].iter_mut().for_each(|v| *v = 1.0);
    rows
}

/// Decides whether a local mixture reproduces `table`.
pub fn certify(table: &JointTable) -> Result<Certification> {
    let strategies = enumerate_strategies(table.parties())?;
    let a = strategy_columns(table, &strategies);
    let mut b = table.probs().to_vec();
    b.push(1.0);
    let lp = phase_one(&a, &b)?;

    let certificate = if lp.objective <= FEASIBILITY_TOL {
        if let Some(w) = lp.x.iter().find(|&&w| w < -DUAL_TOL) {
            return Err(Error::NumericalFailure(format!(
                "negative strategy weight {w:e}"
            )));
        }
        let total: f64 = lp.x.iter().map(|w| w.max(0.0)).sum();
        let weights: Vec<f64> = lp.x.iter().map(|w| w.max(0.0) / total).collect();
        let max_residual = (0..table.len())
            .map(|e| {
                let v: f64 = a[e].iter().zip(&weights).map(|(x, w)| x * w).sum();
                (v - b[e]).abs()
            })
            .fold(0.0, f64::max);
        if max_residual > REPRODUCTION_TOL {
            return Err(Error::NumericalFailure(format!(
                "feasible mixture misses the table by {max_residual:e}"
            )));
        }
        LhvCertificate::Feasible {
            weights: weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > DUAL_TOL)
                .map(|(k, &w)| (k, w))
                .collect(),
            max_residual,
        }
    } else {
        let (offset, dual) = lp.dual.split_last().expect("normalization row");
        let mut cert = FarkasCertificate {
            dual: dual.to_vec(),
            offset: *offset,
            margin: 0.0,
            max_local_value: 0.0,
        };
        // Shifting the normalization multiplier moves every strategy value and
        // the table value by the same amount.
        let worst = strategies
            .iter()
            .map(|s| cert.local_value(table, s))
            .fold(f64::NEG_INFINITY, f64::max);
        if worst > 0.0 {
            cert.offset -= worst;
        }
        cert.max_local_value = strategies
            .iter()
            .map(|s| cert.local_value(table, s))
            .fold(f64::NEG_INFINITY, f64::max);
        cert.margin = cert.table_value(table);
        if cert.max_local_value > DUAL_TOL || cert.margin <= FEASIBILITY_TOL {
            return Err(Error::NumericalFailure(format!(
                "Farkas certificate failed verification (local max {:e}, margin {:e})",
                cert.max_local_value, cert.margin
            )));
        }
        LhvCertificate::Infeasible(cert)
    };
    Ok(Certification {
        strategies,
        certificate,
        phase_one_objective: lp.objective,
        pivots: lp.iterations,
    })
}

/// [`certify`] for tables with extra single-setting parties (the `T`
/// observables of a peeled multipartite witness).
pub fn certify_multipartite(table: &JointTable) -> Result<Certification> {
    if table.parties().len() < 3 {
        return Err(Error::TooFewSubsystems {
            required: 3,
            found: table.parties().len(),
        });
    }
    certify(table)
}

/// A named event together with its probability in the table it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: String,
    pub event: Event,
    pub observed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSet {
    pub zero: Vec<Condition>,
    pub nonzero: Condition,
}

/// The Hardy conditions on a table whose first two parties carry `X1, Y1`
/// and `X2, Y2`, each joined with the fixed `extra` terms (used for the
/// marked outcomes of the peeled `T` observables).
pub fn hardy_condition_set(
    table: &JointTable,
    extra: &[(usize, usize, usize)],
) -> Option<ConditionSet> {
    let make = |c: HardyCondition| -> Option<Condition> {
        let (s1, o1, s2, o2) = c.event();
        let mut event = table.event(&[(s1, o1), (s2, o2)])?;
        event.terms.extend_from_slice(extra);
        let mut name = c.name();
        for &(p, s, o) in extra {
            let party = &table.parties()[p];
            name.pop();
            name.push_str(&format!(
                ",{}={})",
                party.settings[s],
                outcome_label(party.outcomes[o])
            ));
        }
        Some(Condition {
            name,
            observed: table.event_probability(&event),
            event,
        })
    };
    Some(ConditionSet {
        zero: HardyCondition::ZERO
            .iter()
            .map(|&c| make(c))
            .collect::<Option<Vec<_>>>()?,
        nonzero: make(HardyCondition::YPlusYPlus)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyStatus {
    /// The strategy produces the event of this zero condition.
    Violates(usize),
    /// Consistent with all zero conditions.
    Compatible { fires_nonzero: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContradictionTrace {
    pub statuses: Vec<StrategyStatus>,
    pub zero_conditions_hold: bool,
    pub nonzero_holds: bool,
    pub compatible: usize,
    pub compatible_firing: usize,
    /// No strategy compatible with the zero conditions produces the nonzero
    /// event, while the table gives that event positive probability.
    pub contradiction: bool,
}

/// Checks every deterministic strategy against the zero conditions and
/// records whether any survivor can produce the nonzero event.
pub fn verify_no_deterministic_model(
    conditions: &ConditionSet,
    strategies: &[DeterministicStrategy],
    zero_tol: f64,
) -> ContradictionTrace {
    let statuses: Vec<StrategyStatus> = strategies
        .iter()
        .map(|s| match conditions.zero.iter().position(|c| s.fires(&c.event)) {
            Some(k) => StrategyStatus::Violates(k),
            None => StrategyStatus::Compatible {
                fires_nonzero: s.fires(&conditions.nonzero.event),
            },
        })
        .collect();
    let compatible = statuses
        .iter()
        .filter(|s| matches!(s, StrategyStatus::Compatible { .. }))
        .count();
    let compatible_firing = statuses
        .iter()
        .filter(|s| matches!(s, StrategyStatus::Compatible { fires_nonzero: true }))
        .count();
    let zero_conditions_hold = conditions.zero.iter().all(|c| c.observed <= zero_tol);
    let nonzero_holds = conditions.nonzero.observed > zero_tol;
    ContradictionTrace {
        contradiction: zero_conditions_hold && nonzero_holds && compatible_firing == 0,
        statuses,
        zero_conditions_hold,
        nonzero_holds,
        compatible,
        compatible_firing,
    }
}
