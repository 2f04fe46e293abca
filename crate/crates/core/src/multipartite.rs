//! Hardy tests for states of three or more subsystems.
//!
//! One subsystem at a time is split off by a Schmidt decomposition
//! `|ψ⟩ = Σ_k q_k |φ_k⟩ ⊗ |τ_k⟩`. Measuring the single-particle observable
//! with eigenvectors `τ_k` and finding the marked outcome leaves the branch
//! `φ_k`, which is peeled further until two subsystems remain and the
//! bipartite construction applies. The Hardy outcome then occurs jointly with
//! the marked outcomes with probability `∏ q² · P_Hardy`.

use crate::error::{Error, Result};
use crate::hardy::{
    make_witness_report, joint_table, HardyWitness, Observable, PairChoice, PartyObservables,
    WitnessOptions,
};
use crate::lhv::{hardy_condition_set, ConditionSet};
use crate::schmidt::{schmidt_decompose, WEIGHT_CUTOFF};
use crate::table::JointTable;
use crate::tensor::{complement, Bipartition, StateVector, C64};

pub const NO_USABLE_BRANCH_REASON: &str =
    "no peeling order leaves a two-party state with distinct Schmidt weights";

/// One term of the decomposition across `(others | subsystem)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    /// Normalized state of the remaining subsystems, in ascending order.
    pub residual: StateVector,
    pub tau: Vec<C64>,
}

/// Schmidt decomposition splitting `subsystem` off the rest.
pub fn peel(v: &StateVector, subsystem: usize) -> Result<Vec<Branch>> {
    let n = v.num_subsystems();
    if n < 3 {
        return Err(Error::TooFewSubsystems {
            required: 3,
            found: n,
        });
    }
    if subsystem >= n {
        return Err(Error::BadPartition(format!(
            "subsystem {} out of range for {n} subsystems",
            subsystem + 1
        )));
    }
    let others = complement(n, &[subsystem]);
    let rest_dims: Vec<usize> = others.iter().map(|&k| v.dims()[k]).collect();
    let split = Bipartition::new(others, vec![subsystem], n)?;
    let d = schmidt_decompose(v, &split)?;
    d.weights()
        .iter()
        .zip(d.left_vectors().iter().zip(d.right_vectors()))
        .filter(|(w, _)| **w > WEIGHT_CUTOFF)
        .map(|(&weight, (phi, tau))| {
            Ok(Branch {
                weight,
                residual: StateVector::new(rest_dims.clone(), phi.clone())?,
                tau: tau.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelStep {
    /// Peeled subsystem, indexed in the original state.
    pub subsystem: usize,
    pub weights: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    /// Branch whose residual continues the recursion.
    pub marked: usize,
}

impl PeelStep {
    /// Eigenvalue label of the marked branch.
    pub fn marked_label(&self) -> i32 {
        self.marked as i32 + 1
    }

    pub fn marked_weight(&self) -> f64 {
        self.weights[self.marked]
    }
}

/// Observable with eigenvalue `k + 1` on the `k`-th branch vector and `0` on
/// the complement of their span.
pub fn build_t_observable(step: &PeelStep) -> Observable {
    Observable {
        label: format!("T{}", step.subsystem + 1),
        subsystems: vec![step.subsystem],
        eigenvectors: step
            .vectors
            .iter()
            .enumerate()
            .map(|(k, t)| (k as i32 + 1, t.clone()))
            .collect(),
    }
}

/// The branch maximizing `q_k² · downstream_k` over branches that have a
/// downstream Hardy probability at all. Earlier branches win ties.
pub fn select_branch(weights: &[f64], downstream: &[Option<f64>]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, (q, d)) in weights.iter().zip(downstream).enumerate() {
        let q = *q;
        if q <= WEIGHT_CUTOFF {
            continue;
        }
        if let Some(d) = d {
            let score = q * q * d;
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((k, score));
            }
        }
    }
    best.map(|(k, _)| k)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MultipartiteOptions {
    pub witness: WitnessOptions,
    /// Try every peeling order instead of always peeling the last subsystem.
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipartiteWitness {
    pub steps: Vec<PeelStep>,
    /// Original indices of the two subsystems left after peeling.
    pub final_subsystems: [usize; 2],
    pub final_state: StateVector,
    /// Bipartite witness on `final_state` with split `1|2`.
    pub bipartite: HardyWitness,
    /// `X1, Y1, X2, Y2` acting on the original subsystems.
    pub observables: [Observable; 4],
    pub t_observables: Vec<Observable>,
    /// Joint table on the full state: two Hardy parties then one party per
    /// peeled subsystem, in peeling order.
    pub table: JointTable,
    pub conditions: ConditionSet,
    /// `∏ q_marked² · P_Hardy(p1, p2)`.
    pub combined_probability: f64,
}

impl MultipartiteWitness {
    pub fn marked_weight_product(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.marked_weight().powi(2))
            .product()
    }

    pub fn zero_conditions(&self) -> Vec<f64> {
        self.conditions.zero.iter().map(|c| c.observed).collect()
    }

    pub fn max_zero_condition(&self) -> f64 {
        self.zero_conditions().into_iter().fold(0.0, f64::max)
    }

    /// Direct Born-rule value of the joint nonzero condition.
    pub fn hardy_measured(&self) -> f64 {
        self.conditions.nonzero.observed
    }

    pub fn parties(&self) -> Vec<PartyObservables> {
        witness_parties(&self.observables, &self.t_observables)
    }
}

fn witness_parties(observables: &[Observable; 4], t_observables: &[Observable]) -> Vec<PartyObservables> {
    let mut parties = vec![
        PartyObservables {
            label: "side1".into(),
            observables: vec![observables[0].clone(), observables[1].clone()],
        },
        PartyObservables {
            label: "side2".into(),
            observables: vec![observables[2].clone(), observables[3].clone()],
        },
    ];
    parties.extend(t_observables.iter().map(|t| PartyObservables {
        label: t.label.clone(),
        observables: vec![t.clone()],
    }));
    parties
}

#[derive(Debug, Clone, PartialEq)]
pub enum MultipartiteVerdict {
    Applicable(Box<MultipartiteWitness>),
    NotApplicable { reason: String },
}

impl MultipartiteVerdict {
    pub fn witness(&self) -> Option<&MultipartiteWitness> {
        match self {
            MultipartiteVerdict::Applicable(w) => Some(w),
            MultipartiteVerdict::NotApplicable { .. } => None,
        }
    }
}

struct Plan {
    steps: Vec<PeelStep>,
    final_subsystems: [usize; 2],
    final_state: StateVector,
    bipartite: HardyWitness,
    score: f64,
}

fn search(
    v: &StateVector,
    indices: &[usize],
    options: &MultipartiteOptions,
) -> Result<Option<Plan>> {
    let n = v.num_subsystems();
    if n == 2 {
        let split = Bipartition::new(vec![0], vec![1], 2)?;
        let report = make_witness_report(v, &split, PairChoice::Auto, &options.witness)?;
        return Ok(report.witness().map(|w| Plan {
            steps: Vec::new(),
            final_subsystems: [indices[0], indices[1]],
            final_state: v.clone(),
            score: w.hardy_closed_form,
            bipartite: w.clone(),
        }));
    }
    let candidates: Vec<usize> = if options.exhaustive {
        (0..n).collect()
    } else {
        vec![n - 1]
    };
    let mut best: Option<Plan> = None;
    for s in candidates {
        let branches = peel(v, s)?;
        let rest: Vec<usize> = complement(n, &[s]).iter().map(|&k| indices[k]).collect();
        let mut plans = Vec::with_capacity(branches.len());
        for b in &branches {
            plans.push(search(&b.residual, &rest, options)?);
        }
        let weights: Vec<f64> = branches.iter().map(|b| b.weight).collect();
        let downstream: Vec<Option<f64>> =
            plans.iter().map(|p| p.as_ref().map(|p| p.score)).collect();
        let Some(k) = select_branch(&weights, &downstream) else {
            continue;
        };
        let mut plan = plans.swap_remove(k).expect("selected branch has a plan");
        plan.score *= weights[k] * weights[k];
        if best.as_ref().is_some_and(|b| b.score >= plan.score) {
            continue;
        }
        plan.steps.insert(
            0,
            PeelStep {
                subsystem: indices[s],
                weights,
                vectors: branches.into_iter().map(|b| b.tau).collect(),
                marked: k,
            },
        );
        best = Some(plan);
    }
    Ok(best)
}

/// Peels `v` down to two subsystems and evaluates the joint Hardy conditions
/// on the full state.
pub fn multipartite_witness(
    v: &StateVector,
    options: &MultipartiteOptions,
) -> Result<MultipartiteVerdict> {
    let n = v.num_subsystems();
    if n < 3 {
        return Err(Error::TooFewSubsystems {
            required: 3,
            found: n,
        });
    }
    let indices: Vec<usize> = (0..n).collect();
    let Some(plan) = search(v, &indices, options)? else {
        return Ok(MultipartiteVerdict::NotApplicable {
            reason: NO_USABLE_BRANCH_REASON.into(),
        });
    };
    let mapping = plan.final_subsystems;
    let observables = plan
        .bipartite
        .construction
        .observables
        .clone()
        .map(|o| o.relabel(&mapping));
    let t_observables: Vec<Observable> = plan.steps.iter().map(build_t_observable).collect();
    let combined_probability = plan.score;

    let parties = witness_parties(&observables, &t_observables);
    let table = joint_table(v, &parties)?;
    let extra: Vec<(usize, usize, usize)> = plan
        .steps
        .iter()
        .enumerate()
        .map(|(j, s)| (2 + j, 0, s.marked))
        .collect();
    let conditions = hardy_condition_set(&table, &extra)
        .ok_or_else(|| Error::NumericalFailure("Hardy labels missing from table".into()))?;
    let witness = MultipartiteWitness {
        steps: plan.steps,
        final_subsystems: plan.final_subsystems,
        final_state: plan.final_state,
        bipartite: plan.bipartite,
        observables,
        t_observables,
        table,
        conditions,
        combined_probability,
    };
    Ok(MultipartiteVerdict::Applicable(Box::new(witness)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::hardy_probability;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn state(dims: Vec<usize>, terms: &[(usize, f64)]) -> StateVector {
        let mut amps = vec![c(0.0); dims.iter().product()];
        for &(i, a) in terms {
            amps[i] = c(a);
        }
        StateVector::new(dims, amps).unwrap()
    }

    fn ghz(n: usize) -> StateVector {
        state(vec![2; n], &[(0, 1.0), ((1 << n) - 1, 1.0)])
    }

    /// `√0.5 φ1⊗|0⟩ + √0.5 |22⟩⊗|1⟩` with `φ1 = √0.8|00⟩ + √0.2|11⟩`.
    fn example_state() -> StateVector {
        let idx = |a: usize, b: usize, t: usize| (a * 3 + b) * 2 + t;
        state(
            vec![3, 3, 2],
            &[
                (idx(0, 0, 0), (0.5f64 * 0.8).sqrt()),
                (idx(1, 1, 0), (0.5f64 * 0.2).sqrt()),
                (idx(2, 2, 1), 0.5f64.sqrt()),
            ],
        )
    }

    #[test]
    fn peel_two_branch_example() {
        let b = peel(&example_state(), 2).unwrap();
        assert_eq!(b.len(), 2);
        for br in &b {
            assert!((br.weight - 0.5f64.sqrt()).abs() < 1e-12);
        }
        let s = (b[0].residual.amps()[0].norm() - 0.8f64.sqrt()).abs();
        assert!(s < 1e-12);
        assert!((b[1].residual.amps()[8].norm() - 1.0).abs() < 1e-12);
        let total: f64 = b.iter().map(|x| x.weight * x.weight).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn peel_ghz_gives_product_branches() {
        let b = peel(&ghz(3), 2).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b[0].weight - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((b[0].residual.amps()[0].norm() - 1.0).abs() < 1e-12);
        assert!((b[1].residual.amps()[3].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn peel_w_state() {
        let w = state(vec![2, 2, 2], &[(1, 1.0), (2, 1.0), (4, 1.0)]);
        let b = peel(&w, 2).unwrap();
        assert!((b[0].weight - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((b[1].weight - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let r = b[0].residual.amps();
        assert!((r[1].norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r[2].norm() - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((b[1].residual.amps()[0].norm() - 1.0).abs() < 1e-12);
        let out = multipartite_witness(&w, &MultipartiteOptions::default()).unwrap();
        assert!(out.witness().is_none());
    }

    #[test]
    fn peel_needs_three_subsystems() {
        let bell = state(vec![2, 2], &[(0, 1.0), (3, 1.0)]);
        assert!(matches!(peel(&bell, 1), Err(Error::TooFewSubsystems { .. })));
    }

    #[test]
    fn branch_selection() {
        let h = 0.5f64.sqrt();
        assert_eq!(select_branch(&[h, h], &[Some(0.02), Some(0.08)]), Some(1));
        assert_eq!(select_branch(&[h, h], &[None, Some(0.02)]), Some(1));
        assert_eq!(select_branch(&[h, h], &[None, None]), None);
    }

    #[test]
    fn t_observable_labels() {
        let step = PeelStep {
            subsystem: 2,
            weights: vec![0.8, 0.6],
            vectors: vec![vec![c(1.0), c(0.0), c(0.0)], vec![c(0.0), c(1.0), c(0.0)]],
            marked: 0,
        };
        let t = build_t_observable(&step);
        assert_eq!(t.label, "T3");
        assert_eq!(t.outcomes(), vec![1, 2, 0]);
        assert_eq!(step.marked_label(), 1);
    }

    #[test]
    fn example_combined_probability() {
        let v = example_state();
        let out = multipartite_witness(&v, &MultipartiteOptions::default()).unwrap();
        let w = out.witness().expect("applicable");
        let expected = 0.5 * 4.0 / 45.0;
        assert!((w.combined_probability - expected).abs() < 1e-9);
        assert!((w.hardy_measured() - expected).abs() < 1e-9);
        assert!(w.max_zero_condition() < 1e-10);
        assert_eq!(w.steps.len(), 1);
        assert_eq!(w.final_subsystems, [0, 1]);
        // Marked branch alone: P(T3 = t1) = q1².
        let t = &w.t_observables[0];
        let p = crate::tensor::joint_probability(
            &v,
            &[(&t.subsystems, &t.projector_for(w.steps[0].marked_label()).unwrap())],
        )
        .unwrap();
        assert!((p - 0.5).abs() < 1e-10);
        assert!(w.combined_probability <= w.bipartite.hardy_closed_form + 1e-15);
        assert_eq!(w.conditions.nonzero.name, "P(Y1=+1,Y2=+1,T3=+1)");
    }

    #[test]
    fn product_with_third_particle_keeps_bipartite_value() {
        let v = state(vec![2, 2, 2], &[(0, 0.8f64.sqrt()), (6, 0.2f64.sqrt())]);
        let out = multipartite_witness(&v, &MultipartiteOptions::default()).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(w.steps[0].weights.len(), 1);
        let h = hardy_probability(0.8f64.sqrt(), 0.2f64.sqrt());
        assert!((w.combined_probability - h).abs() < 1e-12);
        assert!((w.hardy_measured() - h).abs() < 1e-9);
    }

    #[test]
    fn ghz_not_applicable_in_any_order() {
        for n in [3, 4] {
            for exhaustive in [false, true] {
                let opts = MultipartiteOptions {
                    exhaustive,
                    ..Default::default()
                };
                assert!(multipartite_witness(&ghz(n), &opts).unwrap().witness().is_none());
            }
        }
    }

    #[test]
    fn four_particles_peel_twice() {
        // φ1 ⊗ |0⟩ ⊗ |0⟩ entangled with a far branch on both peeled particles.
        let mut amps = vec![c(0.0); 3 * 3 * 2 * 2];
        let idx = |a: usize, b: usize, t: usize, s: usize| ((a * 3 + b) * 2 + t) * 2 + s;
        amps[idx(0, 0, 0, 0)] = c((0.6f64 * 0.8).sqrt());
        amps[idx(1, 1, 0, 0)] = c((0.6f64 * 0.2).sqrt());
        amps[idx(2, 2, 1, 1)] = c(0.4f64.sqrt());
        let v = StateVector::new(vec![3, 3, 2, 2], amps).unwrap();
        let out = multipartite_witness(&v, &MultipartiteOptions::default()).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(w.steps.len(), 2);
        assert_eq!(w.steps[0].subsystem, 3);
        assert_eq!(w.steps[1].subsystem, 2);
        let expected = 0.6 * 4.0 / 45.0;
        assert!((w.combined_probability - expected).abs() < 1e-9);
        assert!((w.hardy_measured() - expected).abs() < 1e-9);
        assert!(w.max_zero_condition() < 1e-10);

        let ex = multipartite_witness(
            &v,
            &MultipartiteOptions {
                exhaustive: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(ex.witness().unwrap().combined_probability >= w.combined_probability - 1e-12);
    }
}
