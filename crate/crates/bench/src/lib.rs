//! Deterministic inputs for the benchmarks.

use axisdecomp_core::nalgebra::DMatrix;
use axisdecomp_core::Dataset;

/// Three labelled clusters in `d` dimensions built from a fixed quasi-random
/// sequence, so every benchmark run sees the same data without an RNG.
pub fn clustered(n: usize, d: usize) -> Dataset {
    let golden = 0.618_033_988_749_895_f64;
    let mut state = 0.5_f64;
    let mut next = || {
        state = (state + golden).fract();
        // map the uniform value to roughly unit spread around zero
        (state - 0.5) * 3.4
    };
    let samples = DMatrix::from_fn(n, d, |i, j| {
        let centre = if j < 3 { 2.5 * ((i % 3) as f64) * (j as f64 + 1.0) } else { 0.0 };
        centre + next() + 0.3 * ((i * (j + 1)) as f64).sin()
    });
    let names = (0..d).map(|j| format!("x{j}")).collect();
    let labels = (0..n).map(|i| format!("c{}", i % 3)).collect();
    Dataset::new(samples, names, Some(labels)).expect("valid synthetic data")
}
