//! Dense phase-one simplex with Bland's rule.
//!
//! Solves `min 1ᵀs  s.t.  A x + s = b,  x, s ≥ 0` (rows with negative `b` are
//! negated first). At the optimum the simplex multipliers `y` satisfy
//! `yᵀA ≤ 0` and `yᵀb = objective`, so a positive objective comes with a
//! Farkas certificate of infeasibility for `A x = b, x ≥ 0`.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const REDUCED_COST_TOL: f64 = 1e-12;
const RATIO_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PhaseOne {
    /// Sum of the artificial variables at the optimum.
    pub objective: f64,
    /// Values of the structural variables.
    pub x: Vec<f64>,
    /// Simplex multipliers, one per original row, in the original row signs.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

/// Iteration cap; Bland's rule cannot cycle, so reaching it means a bug.
pub fn iteration_limit(rows: usize, cols: usize) -> usize {
    50 * (rows + cols) + 10_000
}

pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> Result<PhaseOne> {
    let m = a.len();
    if m != b.len() {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: b.len(),
        });
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidState("ragged constraint matrix".into()));
    }
    let width = n + m;

    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut t = vec![vec![0.0; width]; m];
    let mut rhs: Vec<f64> = b.iter().zip(&sign).map(|(v, s)| v * s).collect();
    for i in 0..m {
        for j in 0..n {
            t[i][j] = a[i][j] * sign[i];
        }
        t[i][n + i] = 1.0;
    }
    let mut basis: Vec<usize> = (n..width).collect();
    let mut reduced = vec![0.0; width];
    for j in 0..n {
        reduced[j] = -t.iter().map(|row| row[j]).sum::<f64>();
    }

    let limit = iteration_limit(m, n);
    let mut iterations = 0;
    while let Some(enter) = (0..width).find(|&j| reduced[j] < -REDUCED_COST_TOL) {
        if iterations == limit {
            return Err(Error::NumericalFailure(format!(
                "simplex exceeded {limit} pivots"
            )));
        }
        iterations += 1;

        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[i][enter];
            if coef <= PIVOT_TOL {
                continue;
            }
            let ratio = rhs[i] / coef;
            leave = match leave {
                None => Some((i, ratio)),
                Some((k, best)) => {
                    if ratio < best - RATIO_TIE_TOL
                        || (ratio <= best + RATIO_TIE_TOL && basis[i] < basis[k])
                    {
                        Some((i, ratio))
                    } else {
                        Some((k, best))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            return Err(Error::NumericalFailure(
                "phase-one objective unbounded below".into(),
            ));
        };
        pivot(&mut t, &mut rhs, &mut reduced, row, enter);
        basis[row] = enter;
    }

    let mut x = vec![0.0; n];
    let mut objective = 0.0;
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = rhs[i];
        } else {
            objective += rhs[i];
        }
    }
    let dual = (0..m).map(|i| sign[i] * (1.0 - reduced[n + i])).collect();
    Ok(PhaseOne {
        objective,
        x,
        dual,
        iterations,
    })
}

fn pivot(t: &mut [Vec<f64>], rhs: &mut [f64], reduced: &mut [f64], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    rhs[row] /= p;
    let pivot_row = t[row].clone();
    let pivot_rhs = rhs[row];
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f == 0.0 {
            continue;
        }
        for (v, &pv) in r.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        r[col] = 0.0;
        rhs[i] -= f * pivot_rhs;
    }
    let f = reduced[col];
    for (v, &pv) in reduced.iter_mut().zip(&pivot_row) {
        *v -= f * pv;
    }
    reduced[col] = 0.0;
}
