mod common;

use common::*;
use hardy_nonlocality::hardy::{joint_table, HardyConstruction};
use hardy_nonlocality::sampler::{analyze, sample_table, SettingSchedule, CheckVerdict};
use hardy_nonlocality::schmidt::schmidt_decompose;
use hardy_nonlocality::table::JointTable;
use hardy_nonlocality::tensor::Bipartition;

const SEEDS: u64 = 100;
const SHOTS: usize = 10_000;
const SIGMA: f64 = 4.0;

fn table_for(v: &hardy_nonlocality::tensor::StateVector, split: &Bipartition) -> JointTable {
    let d = schmidt_decompose(v, split).unwrap();
    let c = HardyConstruction::from_schmidt_unchecked(&d, (0, 1)).unwrap();
    joint_table(v, &c.parties()).unwrap()
}

/// Runs every seed and returns the number of runs with at least one cell
/// outside the band, plus the per-seed Hardy frequencies.
fn sweep(table: &JointTable) -> (usize, Vec<f64>) {
    let mut bad = 0;
    let mut hardy = Vec::new();
    for seed in 0..SEEDS {
        let records = sample_table(table, SHOTS, seed, &SettingSchedule::RoundRobin).unwrap();
        let report = analyze(&records, table, SIGMA).unwrap();
        assert_eq!(report.total_shots, SHOTS);
        let outside = report.cells.iter().any(|c| {
            if c.exact < 1e-14 {
                assert_eq!(c.count, 0, "seed {seed}: impossible outcome drawn");
                false
            } else {
                (c.frequency - c.exact).abs() > SIGMA * c.std_error
            }
        });
        bad += outside as usize;
        hardy.push(report.hardy().frequency);
    }
    (bad, hardy)
}

#[test]
fn hardy_state_frequencies_converge() {
    let table = table_for(&hardy_state(), &Bipartition::leading(1, 2).unwrap());
    let (bad, hardy) = sweep(&table);
    assert!(bad <= 5, "{bad} of {SEEDS} runs left the band");

    let exact = 4.0 / 45.0;
    let n = (SHOTS / 4) as f64;
    let se = (exact * (1.0 - exact) / n).sqrt() / (SEEDS as f64).sqrt();
    let mean = hardy.iter().sum::<f64>() / SEEDS as f64;
    assert!((mean - exact).abs() < SIGMA * se, "mean {mean}");
}

#[test]
fn qutrit_frequencies_converge() {
    let mut r = rng(5);
    let v = random_state(&mut r, vec![3, 3]);
    let table = table_for(&v, &Bipartition::leading(1, 2).unwrap());
    let (bad, _) = sweep(&table);
    assert!(bad <= 5, "{bad} of {SEEDS} runs left the band");
}

#[test]
fn zero_conditions_pass_at_every_seed() {
    let table = table_for(&hardy_state(), &Bipartition::leading(1, 2).unwrap());
    for seed in 0..SEEDS {
        let records = sample_table(&table, SHOTS, seed, &SettingSchedule::RoundRobin).unwrap();
        let report = analyze(&records, &table, SIGMA).unwrap();
        for c in &report.conditions[..5] {
            assert_eq!(c.count, 0);
            assert_eq!(c.verdict, CheckVerdict::Pass);
        }
        assert_eq!(report.hardy().verdict, CheckVerdict::Pass);
    }
}
