//! Hardy probability of two-qubit states `√x|00⟩ + √(1−x)|11⟩` over `x`.

use crate::error::{Error, Result};
use crate::hardy::hardy_probability;

/// Refinement stops once the bracket is this narrow.
pub const REFINE_TOL: f64 = 1e-12;

/// Rows are kept only for grids up to this size.
pub const MAX_TABLE_ROWS: usize = 1000;

pub fn hardy_at(x: f64) -> f64 {
    hardy_probability(x.sqrt(), (1.0 - x).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: usize,
    /// `(x, P_Hardy)` at `x_k = k/(grid+1)`, empty above [`MAX_TABLE_ROWS`].
    pub rows: Vec<(f64, f64)>,
    pub grid_argmax: f64,
    pub grid_max: f64,
    pub argmax: f64,
    pub max: f64,
}

/// Evaluates the grid strictly inside `(0, 1)`, then refines the best grid
/// point by golden-section search between its neighbours.
pub fn scan(grid: usize) -> Result<ScanResult> {
    if grid < 2 {
        return Err(Error::InvalidState(format!("grid must be at least 2, got {grid}")));
    }
    let step = 1.0 / (grid + 1) as f64;
    let mut rows = Vec::new();
    let (mut best_k, mut best) = (1, f64::NEG_INFINITY);
    for k in 1..=grid {
        let x = k as f64 * step;
        let h = hardy_at(x);
        if h > best {
            best = h;
            best_k = k;
        }
        if grid <= MAX_TABLE_ROWS {
            rows.push((x, h));
        }
    }
    let grid_argmax = best_k as f64 * step;
    let (argmax, max) = golden_max(hardy_at, grid_argmax - step, grid_argmax + step);
    let (argmax, max) = if max >= best {
        (argmax, max)
    } else {
        (grid_argmax, best)
    };
    Ok(ScanResult {
        grid,
        rows,
        grid_argmax,
        grid_max: best,
        argmax,
        max,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > REFINE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}
